//! Upper bounds on the dimension of solution sets of polynomial variational
//! inequalities, complementarity problems and fractional programs.

pub mod bound;
pub mod classify;
pub mod dim;
pub mod error;
pub mod fixtures;
pub mod kkt;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod rank;

pub use dim::Dim;
pub use error::{Error, Result};
pub use poly::{int, rat, Monomial, PolyMatrix, Polynomial, Rational};
