//! Baxterized braid matrices of the `ô_N` class: transfer-matrix
//! hierarchies, symmetry-reduced spectra as polynomials in `K(θ)`, chain
//! Hamiltonians, the inverse Cayley transform and the `R̂tt` relations.
//!
//! The exact layer is generic over a rational coefficient type, the
//! numeric layer over a real scalar. Most callers want the aliases below.

pub mod braid;
pub mod cayley_rtt;
pub mod eigen;
pub mod error;
pub mod exact;
pub mod hamiltonian;
pub mod matrix;
pub mod spectra;
pub mod symmetry;
pub mod transfer;

pub use error::{Error, Result};

use num_rational::BigRational;

pub use num_rational::BigRational as Rational;

pub type SLaurentQ = exact::SLaurent<BigRational>;
pub type KPolyQ = exact::KPoly<BigRational>;
pub type PolyMatrixQ = matrix::PolyMatrix<BigRational>;
pub type MonodromyQ = transfer::MonodromyBlocks<BigRational>;
pub type TransferMatrixQ = transfer::TransferMatrix<BigRational>;

pub type NumMatrix64 = matrix::NumMatrix<f64>;
pub type NumMatrix32 = matrix::NumMatrix<f32>;
pub type ModelParams64 = braid::ModelParams<f64>;
pub type ModelParams32 = braid::ModelParams<f32>;
