//! Arithmetic of definite quaternion algebras over the rationals: orders,
//! right ideal classes, Brandt modules with harmonic polynomial weights,
//! theta lifts to half-integral weight forms, and numerical verification of
//! central L-value ratios against those lifts.

pub mod brandt;
pub mod error;
pub mod exact;
pub mod harmonic;
pub mod lvalue;
pub mod quat;
pub mod theta;

pub use error::{Error, Result};
