//! Block-encodings by one-qubit unitary dilation.
//!
//! The total space is `ancilla ⊗ system`, so the block of ancilla basis
//! state `k` occupies rows and columns `k·d_s .. (k+1)·d_s`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{matrix_function_hermitian, operator_norm, unitarity_check, ComplexMatrix};
use crate::tol;

/// Slack allowed above norm 1 when dilating.
pub const NORM_SLACK: f64 = 1e-12;

/// A unitary whose reference block equals `A / alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockEncoding {
    pub unitary: ComplexMatrix,
    pub system_dim: usize,
    pub ancilla_dim: usize,
    pub reference_index: usize,
    pub alpha: f64,
}

impl BlockEncoding {
    /// Validates dimensions and unitarity (at the decomposition tolerance).
    pub fn new(unitary: ComplexMatrix, system_dim: usize, ancilla_dim: usize, reference_index: usize) -> Result<Self> {
        if !unitary.is_square() || unitary.rows() != system_dim * ancilla_dim || system_dim == 0 {
            return Err(Error::Shape(format!(
                "unitary is {}x{} but system {system_dim} x ancilla {ancilla_dim} was declared",
                unitary.rows(),
                unitary.cols()
            )));
        }
        if reference_index >= ancilla_dim {
            return Err(Error::Input(format!("reference index {reference_index} out of range for {ancilla_dim} ancilla states")));
        }
        if !unitarity_check(&unitary, tol::DECOMPOSITION) {
            return Err(Error::Consistency("block-encoding matrix is not unitary".into()));
        }
        Ok(Self { unitary, system_dim, ancilla_dim, reference_index, alpha: 1.0 })
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim * self.ancilla_dim
    }

    /// Same layout, different unitary (no validation).
    pub(crate) fn with_unitary(&self, unitary: ComplexMatrix) -> Self {
        Self { unitary, ..self.clone() }
    }

    /// Diagonal of `R_φ = e^{iφ(2|0⟩⟨0|_b − I_b)} ⊗ I`.
    pub fn rotation_diagonal(&self, phi: f64) -> Vec<Complex64> {
        let e = Complex64::from_polar(1.0, phi);
        let ref_range = self.reference_index * self.system_dim..(self.reference_index + 1) * self.system_dim;
        (0..self.total_dim()).map(|i| if ref_range.contains(&i) { e } else { e.conj() }).collect()
    }
}

/// The encoded block `⟨0|U|0⟩_b`.
pub fn extract(be: &BlockEncoding) -> ComplexMatrix {
    let o = be.reference_index * be.system_dim;
    be.unitary.block(o, o, be.system_dim, be.system_dim)
}

/// `R_φ` as a full-dimension unitary.
pub fn ancilla_rotation(be: &BlockEncoding, phi: f64) -> ComplexMatrix {
    ComplexMatrix::from_diag(&be.rotation_diagonal(phi))
}

fn check_norm(a: &ComplexMatrix) -> Result<f64> {
    if !a.is_finite() {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let norm = operator_norm(a);
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::NormTooLarge { norm });
    }
    Ok(norm)
}

/// `√(1 − t)`, flushed to zero when `1 − t` is at round-off level so that
/// degenerate unit singular values do not pick up noise of order `√ε`.
fn sqrt_one_minus(t: f64) -> f64 {
    let d = 1.0 - t;
    if d <= tol::CONSTRUCTION {
        0.0
    } else {
        d.sqrt()
    }
}

fn sqrt_complement(gram: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function_hermitian(&gram.hermitian_part(), sqrt_one_minus)
}

/// `[[A, B], [B, −A]]` with `B = √(I − A²)`.
pub fn dilate_hermitian(a: &ComplexMatrix) -> Result<BlockEncoding> {
    if !a.is_square() {
        return Err(Error::Shape(format!("expected a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let (i, j, dev) = a.hermitian_deviation();
    if dev > tol::CONSTRUCTION {
        return Err(Error::NotHermitian { row: i, col: j, deviation: dev });
    }
    check_norm(a)?;
    let b = matrix_function_hermitian(a, |t| sqrt_one_minus(t * t))?;
    let u = ComplexMatrix::from_blocks(a, &b, &b, &a.scale_real(-1.0))?;
    BlockEncoding::new(u, a.rows(), 2, 0)
}

/// Divide by the operator norm; returns the scaled matrix and the factor.
pub fn normalize(a: &ComplexMatrix) -> (ComplexMatrix, f64) {
    let norm = operator_norm(a);
    if norm == 0.0 {
        return (a.clone(), 1.0);
    }
    (a.scale_real(1.0 / norm), norm)
}

/// Unitary with left/right projectors; the restricted block is
/// `Π₁ U Π₂` read off on the first `system_dim` coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QsvtEncoding {
    pub unitary: ComplexMatrix,
    pub proj_left: ComplexMatrix,
    pub proj_right: ComplexMatrix,
    pub system_dim: usize,
}

impl QsvtEncoding {
    pub fn new(
        unitary: ComplexMatrix,
        proj_left: ComplexMatrix,
        proj_right: ComplexMatrix,
        system_dim: usize,
    ) -> Result<Self> {
        let n = unitary.rows();
        if !unitary.is_square() || proj_left.rows() != n || proj_right.rows() != n || system_dim > n {
            return Err(Error::Shape("unitary and projectors must share one square dimension".into()));
        }
        for p in [&proj_left, &proj_right] {
            if !is_projector(p, tol::CONSTRUCTION) {
                return Err(Error::Input("projector is not Hermitian and idempotent".into()));
            }
        }
        if !unitarity_check(&unitary, tol::DECOMPOSITION) {
            return Err(Error::Consistency("QSVT encoding matrix is not unitary".into()));
        }
        Ok(Self { unitary, proj_left, proj_right, system_dim })
    }

    pub(crate) fn with_unitary(&self, unitary: ComplexMatrix) -> Self {
        Self { unitary, ..self.clone() }
    }

    /// `Π₁ U Π₂` as a full-dimension matrix.
    pub fn restricted(&self) -> ComplexMatrix {
        &(&self.proj_left * &self.unitary) * &self.proj_right
    }

    /// The encoded `system_dim` block.
    pub fn block(&self) -> ComplexMatrix {
        self.restricted().block(0, 0, self.system_dim, self.system_dim)
    }
}

/// Hermitian and idempotent within `tol`.
pub fn is_projector(p: &ComplexMatrix, tol: f64) -> bool {
    p.is_square() && p.is_hermitian(tol) && (p * p).max_abs_diff(p) <= tol
}

/// Projector onto the first `k` of `n` coordinates.
pub fn top_block_projector(n: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&(0..n).map(|i| if i < k { 1.0 } else { 0.0 }).collect::<Vec<_>>())
}

/// `R^Π_φ = e^{−iφ} I + (e^{iφ} − e^{−iφ}) Π`.
pub fn projector_rotation(p: &ComplexMatrix, phi: f64) -> ComplexMatrix {
    let e = Complex64::from_polar(1.0, phi);
    let mut r = p.scale(e - e.conj());
    for i in 0..r.rows() {
        r[(i, i)] += e.conj();
    }
    r
}

/// `[[A, √(I − AA†)], [√(I − A†A), −A†]]` with top-block projectors.
pub fn dilate_general(a: &ComplexMatrix) -> Result<QsvtEncoding> {
    if !a.is_square() {
        return Err(Error::Shape(format!("expected a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    check_norm(a)?;
    let ah = a.adjoint();
    let top = sqrt_complement(&(a * &ah))?;
    let bottom = sqrt_complement(&(&ah * a))?;
    let u = ComplexMatrix::from_blocks(a, &top, &bottom, &ah.scale_real(-1.0))?;
    let n = a.rows();
    let p = top_block_projector(2 * n, n);
    QsvtEncoding::new(u, p.clone(), p, n)
}
