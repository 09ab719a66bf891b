//! Exact computations with Puiseux monoids, the lifting construction and the
//! atomic monoid whose monoid algebras fail to be atomic.

pub mod counterexample;
pub mod error;
pub mod exactnum;
pub mod lifting;
pub mod monalg;
pub mod puiseux;
pub mod report;
pub mod scenario;
pub mod seq;

pub use error::{Error, Result};
pub use exactnum::{Prime, Rational};
