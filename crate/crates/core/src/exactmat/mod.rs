//! Exact dense linear algebra over `Q`, `F_p` and `Q[x]/(f)`.

pub mod fp;
pub mod json;
pub mod matrix;
pub mod pencil;
pub mod poly;
pub mod scalar;
pub mod subspace;

pub use matrix::{Matrix, Rref};
pub use pencil::{is_regular_pencil, pencil_det, singular_loci, PencilPoly, PencilRoot, SingularLocus};
pub use poly::Poly;
pub use scalar::{Elem, Field, NumberField, Scalar};
pub use subspace::Subspace;
