//! Recursive quantum eigenvalue / singular-value transformation, simulated
//! classically with dense matrices.
//!
//! The crate derives phase factors for the even members of the Padé
//! (Newton–Schulz) family, assembles QET and QSVT operators from one-qubit
//! dilations, flattens the recursion into a single long phase list, and
//! checks every construction against spectral oracles.
//!
//! Module map:
//!
//! * [`linalg`]: dense complex matrices, Jacobi Hermitian eigensolver, oracles.
//! * [`poly`]: complex polynomials, Padé family, realizability checks, roots.
//! * [`qsp`]: scalar QSP evaluators and the phase-finding pipeline.
//! * [`blockenc`]: block-encodings by unitary dilation.
//! * [`rqet`]: QET assembly, phase composition, the sign-function driver.
//! * [`rqsvt`]: QSVT assembly, polar decomposition, eigenstate filtering.
//! * [`io`]: JSON and CSV file formats.

// NaN must fail range checks, so negated comparisons are deliberate.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blockenc;
pub mod error;
pub mod io;
pub mod linalg;
pub mod par;
pub mod poly;
pub mod qsp;
pub mod random;
pub mod rqet;
pub mod rqsvt;
pub mod tol;

pub use error::{Error, ErrorKind, Result};
pub use linalg::{ComplexMatrix, Spectrum};
pub use num_complex::Complex64;
pub use par::Execution;
pub use poly::{ComplexPolynomial, Parity};
pub use qsp::{ReflectionPhases, RotationPhases};
