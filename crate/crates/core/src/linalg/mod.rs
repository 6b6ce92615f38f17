//! Dense complex linear algebra: the matrix type, a Jacobi Hermitian
//! eigensolver, spectral matrix functions and the exact oracles (sign,
//! polar) that every quantum construction is checked against.

mod eig;
mod funcs;
mod matrix;

pub use eig::{hermitian_eig, hermitian_eig_with_tol, Spectrum, MAX_SWEEPS};
pub use funcs::{
    matrix_function_hermitian, operator_norm, polar_oracle, sign_oracle, unitarity_check, Polar,
    POLAR_SIGMA_MIN,
};
pub use matrix::ComplexMatrix;

use num_complex::Complex64;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
