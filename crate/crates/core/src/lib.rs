//! Drinfeld modules over `F_q[t]`: exponentials, logarithms, periods and
//! quasi-periods, Anderson generating functions, and the difference-equation
//! data of the attached t-motives, computed with exact finite-field arithmetic
//! and precision-tracked Puiseux expansions in `1/theta`.

pub mod error;
pub mod exact;
pub mod galois;
pub mod gf;
pub mod hom;
pub mod linalg;
pub mod module;
pub mod newton;
pub mod periods;
pub mod poly;
pub mod puiseux;
pub mod quasi;
pub mod reconstruct;
pub mod relations;
pub mod tate;
pub mod tmotive;
pub mod twisted;

pub use error::{Error, Result};
