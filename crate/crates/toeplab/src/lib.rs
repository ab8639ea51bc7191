//! Exact and asymptotic Toeplitz, Hankel and Fredholm determinants for
//! symbols with root and jump singularities, with applications to the
//! two-dimensional Ising model, random matrices and combinatorics.

pub mod applications;
pub mod asympt;
pub mod cli;
pub mod eigen;
pub mod error;
pub mod exactdet;
pub mod ising;
pub mod linalg;
pub mod ode;
pub mod precision;
pub mod quadrature;
pub mod scaling;
pub mod specialfn;
pub mod symbols;

pub use error::{Error, Result};
pub use linalg::LogDet;
pub use precision::{Precision, C64};
pub use symbols::CircleSymbol;
