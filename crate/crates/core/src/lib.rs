pub mod error;
pub mod exterior;
pub mod fixtures;
pub mod g2;
pub mod lab;
pub mod plane;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use exterior::{IndexTuple, KForm, Vector7};
pub use g2::{G2Constants, SigmaSource, TangentValuedForm};
pub use scalar::{Rational, Scalar, Tolerance};
