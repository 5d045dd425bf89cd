//! ADHM data on Hirzebruch surfaces (rank 1) and on multiple blowups of the
//! plane.

pub mod blowup;
pub mod hirzebruch;

pub use blowup::{blowup_assemble, blowup_group_action, blowup_residual, dims_kl, BlowupDatum, BlowupDims, BlowupGroupElement};
pub use hirzebruch::HirzRank1;
