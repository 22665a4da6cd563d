//! Exact computation with rank-metric codes given by q-polynomials over
//! finite fields.

mod error;
pub mod codes;
pub mod equivalence;
pub mod families;
pub mod geometry;
pub mod field;
pub mod linalg;
pub mod qpoly;

pub use error::{Error, Result};
pub use field::{FieldContext, FieldElement, FieldParams};
pub use codes::RankCode;
pub use qpoly::{FqBasis, QPoly};
