pub mod adhm_p2;
pub mod error;
pub mod exactmat;
pub mod flag;
pub mod minimal;
pub mod quiver;
pub mod repstab;
pub mod sample;
pub mod surfaces;

pub use error::{Error, Result};
