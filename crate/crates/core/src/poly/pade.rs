use num_complex::Complex64;

use super::{ComplexPolynomial, Parity};
use crate::error::{Error, Result};

/// Largest `l` accepted by [`deflate_pade_square`].
pub const MAX_DEFLATE_L: usize = 12;

/// `p_l(x) = x·Σ_{k≤l} binom(2k,k)/4^k · (1−x²)^k`, odd, degree `2l+1`.
///
/// The coefficients are dyadic rationals and are exact in double precision
/// for every `l` the crate works with.
pub fn pade(l: usize) -> ComplexPolynomial {
    let mut coeffs = vec![0.0f64; 2 * l + 2];
    for k in 0..=l {
        let weight = binomial(2 * k, k) / 4f64.powi(k as i32);
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            coeffs[2 * j + 1] += weight * sign * binomial(k, j);
        }
    }
    ComplexPolynomial::from_real(&coeffs, Parity::Odd).expect("odd by construction")
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64).round()
}

/// The degree-`l` polynomial `q(u)` with `1 − p_l(x)² = (1−u)^{l+1}·q(u)`,
/// `u = x²`, by exact synthetic division.
pub fn deflate_pade_square(l: usize) -> Result<ComplexPolynomial> {
    if l == 0 || !l.is_multiple_of(2) || l > MAX_DEFLATE_L {
        return Err(Error::Input(format!("deflation needs an even l in 2..={MAX_DEFLATE_L}, got {l}")));
    }
    let p = pade(l);
    let g = ComplexPolynomial::constant(Complex64::new(1.0, 0.0)).sub(&p.mul(&p));
    let scale = g.max_coeff();
    let mut cur = g.to_u(0.0)?.coeffs().to_vec();
    for _ in 0..=l {
        let (quotient, remainder) = divide_by_u_minus_one(&cur);
        if remainder.norm() > 1e-10 * scale {
            return Err(Error::Consistency(format!(
                "1 - p_{l}^2 is not divisible by (1-u)^{}: remainder {:e}",
                l + 1,
                remainder.norm()
            )));
        }
        cur = quotient;
    }
    // (1-u)^{l+1} = -(u-1)^{l+1} for even l.
    let q: Vec<Complex64> = cur.into_iter().map(|c| -c).collect();
    Ok(ComplexPolynomial::from_parts(q, Parity::None))
}

/// Synthetic division by `(u − 1)`.
pub(crate) fn divide_by_u_minus_one(coeffs: &[Complex64]) -> (Vec<Complex64>, Complex64) {
    if coeffs.is_empty() {
        return (Vec::new(), Complex64::new(0.0, 0.0));
    }
    let n = coeffs.len() - 1;
    let mut quotient = vec![Complex64::new(0.0, 0.0); n];
    let mut carry = Complex64::new(0.0, 0.0);
    for i in (0..=n).rev() {
        carry += coeffs[i];
        if i > 0 {
            quotient[i - 1] = carry;
        }
    }
    (quotient, carry)
}
