use num_complex::Complex64;

use super::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};
use crate::tol;

/// Hard cap on cyclic Jacobi sweeps.
pub const MAX_SWEEPS: usize = 100;
/// Off-diagonal Frobenius mass (relative to `max(1, ‖M‖_F)`) at convergence.
const OFF_DIAGONAL_TARGET: f64 = 1e-14;
const MAX_DIM: usize = 64;

/// Eigen-decomposition of a Hermitian matrix: `M = V·diag(λ)·V†`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary, eigenvectors as columns in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// `V·diag(f(λ))·V†` for a complex-valued scalar map.
    pub fn map_complex(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let d: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.with_diagonal(&d)
    }

    /// `V·diag(d)·V†`, `d` in eigenvalue order.
    pub fn with_diagonal(&self, d: &[Complex64]) -> ComplexMatrix {
        assert_eq!(d.len(), self.dim());
        let mut vd = self.eigenvectors.clone();
        vd.scale_columns(d);
        vd.matmul(&self.eigenvectors.adjoint())
    }

    /// `V·diag(f(λ))·V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        self.map_complex(|l| Complex64::new(f(l), 0.0))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| l)
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// The input must be Hermitian to [`tol::CONSTRUCTION`] and at most 64×64.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    hermitian_eig_with_tol(m, tol::CONSTRUCTION)
}

/// As [`hermitian_eig`] with a caller-chosen Hermiticity tolerance. The
/// Hermitian part of the input is diagonalized.
pub fn hermitian_eig_with_tol(m: &ComplexMatrix, herm_tol: f64) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::Shape(format!("eigensolver needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let n = m.rows();
    if n > MAX_DIM {
        return Err(Error::Input(format!("eigensolver supports dim <= {MAX_DIM}, got {n}")));
    }
    if !m.is_finite() {
        return Err(Error::Input("matrix has non-finite entries".into()));
    }
    let (row, col, deviation) = m.hermitian_deviation();
    if deviation > herm_tol {
        return Err(Error::NotHermitian { row, col, deviation });
    }

    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = a.frobenius_norm().max(1.0);
    let target = OFF_DIAGONAL_TARGET * scale;

    let mut converged = n <= 1;
    let mut off = off_diagonal_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        off = off_diagonal_norm(&a);
    }
    if !converged && off > target {
        return Err(Error::NoConvergence { what: "Jacobi eigensolver", iterations: MAX_SWEEPS, residual: off });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(Spectrum { eigenvalues, eigenvectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One two-sided rotation `A ← G†AG`, `V ← VG`, annihilating `A[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let b_abs = b.norm();
    if b_abs <= f64::MIN_POSITIVE {
        return;
    }
    // G = diag(1, e^{-iθ}) · [[c, s], [-s, c]] with b = |b| e^{iθ}.
    let phase_conj = (b / b_abs).conj();
    let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * b_abs);
    let t = if tau == 0.0 { 1.0 } else { tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = -s * phase_conj;
    let g_qq = c * phase_conj;

    let n = a.rows();
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * g_pp + y * g_qp;
        a[(k, q)] = x * g_pq + y * g_qq;
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * g_pp + y * g_qp;
        v[(k, q)] = x * g_pq + y * g_qq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * x + g_qp.conj() * y;
        a[(q, k)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}
