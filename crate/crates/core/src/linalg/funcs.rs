use num_complex::Complex64;

use super::{hermitian_eig, hermitian_eig_with_tol, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tol;

/// Singular values below this make the polar oracle refuse the input.
pub const POLAR_SIGMA_MIN: f64 = 1e-8;

/// `V·diag(f(λ))·V†` for Hermitian `m`. Fails if `f` is not finite on the
/// spectrum.
pub fn matrix_function_hermitian(m: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let spec = hermitian_eig(m)?;
    let mut values = Vec::with_capacity(spec.dim());
    for &l in &spec.eigenvalues {
        let y = f(l);
        if !y.is_finite() {
            return Err(Error::Domain(format!("function is undefined at eigenvalue {l}")));
        }
        values.push(Complex64::new(y, 0.0));
    }
    Ok(spec.with_diagonal(&values))
}

/// Exact `sign(M)`; eigenvalues within [`tol::CONSTRUCTION`] of zero are an
/// error.
pub fn sign_oracle(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    matrix_function_hermitian(m, |x| if x.abs() <= tol::CONSTRUCTION { f64::NAN } else { x.signum() })
}

/// Largest singular value, from the spectrum of `M†M`.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint().matmul(m);
    match hermitian_eig_with_tol(&gram, f64::INFINITY) {
        Ok(s) => s.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
        // Non-finite input or dim > 64: fall back to the Frobenius bound
        // only for non-finite input, which has no meaningful norm anyway.
        Err(_) if !m.is_finite() => f64::NAN,
        Err(_) => power_iteration_norm(&gram).sqrt(),
    }
}

/// Dominant eigenvalue of a PSD matrix, used for dimensions the Jacobi
/// solver does not accept.
fn power_iteration_norm(gram: &ComplexMatrix) -> f64 {
    let n = gram.rows();
    let mut v: Vec<Complex64> = (0..n).map(|i| Complex64::new(1.0 + 0.01 * i as f64, 0.0)).collect();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let w = gram.mul_vec(&v);
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm / v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|z| z / norm).collect();
        if (next - lambda).abs() <= 1e-15 * next {
            return next;
        }
        lambda = next;
    }
    lambda
}

/// Polar factors `A = U·P`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polar {
    pub unitary: ComplexMatrix,
    pub positive: ComplexMatrix,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

/// Exact polar decomposition of a square nonsingular matrix via the
/// spectrum of `A†A`; `U = A·(√(A†A))⁻¹` with the inverse taken spectrally.
pub fn polar_oracle(a: &ComplexMatrix) -> Result<Polar> {
    if !a.is_square() {
        return Err(Error::Shape(format!("polar decomposition needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    let gram = a.adjoint().matmul(a);
    let spec = hermitian_eig_with_tol(&gram, f64::INFINITY)?;
    let sigma: Vec<f64> = spec.eigenvalues.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let sigma_min = sigma.first().copied().unwrap_or(0.0);
    let sigma_max = sigma.last().copied().unwrap_or(0.0);
    if sigma_min < POLAR_SIGMA_MIN {
        return Err(Error::IllConditioned { sigma_min, threshold: POLAR_SIGMA_MIN });
    }
    let positive = spec.map(|l| l.max(0.0).sqrt());
    let inv_sqrt = spec.map(|l| 1.0 / l.max(0.0).sqrt());
    let unitary = a.matmul(&inv_sqrt);
    Ok(Polar { unitary, positive, sigma_min, sigma_max })
}

/// `‖U†U − I‖_max ≤ tol`.
pub fn unitarity_check(u: &ComplexMatrix, tol: f64) -> bool {
    if !u.is_square() {
        return false;
    }
    let g = u.adjoint().matmul(u);
    g.max_abs_diff(&ComplexMatrix::identity(u.rows())) <= tol
}
