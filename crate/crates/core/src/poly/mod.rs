//! Complex polynomials with parity tracking, the Padé family, the QET
//! realizability checker and root finding in `u = x²`.

mod conditions;
mod pade;
mod roots;

pub use conditions::{check_qet_conditions, ConditionReport, DEFAULT_GRID, DEFAULT_OUTER_LIMIT};
pub use pade::{deflate_pade_square, pade, MAX_DEFLATE_L};
pub(crate) use pade::divide_by_u_minus_one;
pub use roots::{
    cubic_roots, durand_kerner, quadratic_roots, quartic_roots, root_residual, roots_in_u, DK_MAX_ITERATIONS,
};

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    None,
}

impl Parity {
    /// Parity `(-1)^q`.
    pub fn of_degree(q: usize) -> Self {
        if q.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn product(self, other: Self) -> Self {
        match (self, other) {
            (Parity::None, _) | (_, Parity::None) => Parity::None,
            (a, b) if a == b => Parity::Even,
            _ => Parity::Odd,
        }
    }

    fn sum(self, other: Self) -> Self {
        if self == other {
            self
        } else {
            Parity::None
        }
    }

    fn flipped(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
            Parity::None => Parity::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
            Parity::None => "none",
        }
    }
}

/// `Σ c_n xⁿ`, index = power. Trailing coefficients with `|c| ≤ 1e-14` are
/// trimmed; the zero polynomial has an empty coefficient list.
#[derive(Clone, PartialEq)]
pub struct ComplexPolynomial {
    coeffs: Vec<Complex64>,
    parity: Parity,
}

impl ComplexPolynomial {
    /// Validates a declared even/odd parity against the coefficients.
    pub fn new(coeffs: Vec<Complex64>, parity: Parity) -> Result<Self> {
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Input("polynomial has non-finite coefficients".into()));
        }
        let p = Self::from_parts(coeffs, parity);
        if let Some((n, c)) = p.parity_violation(parity) {
            return Err(Error::Input(format!(
                "coefficient of x^{n} has magnitude {:e} but the polynomial is declared {}",
                c.norm(),
                parity.as_str()
            )));
        }
        Ok(p)
    }

    pub fn from_real(coeffs: &[f64], parity: Parity) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), parity)
    }

    /// No validation; used by arithmetic whose parity follows by algebra.
    pub(crate) fn from_parts(mut coeffs: Vec<Complex64>, parity: Parity) -> Self {
        while coeffs.last().is_some_and(|c| c.norm() <= tol::TRIM) {
            coeffs.pop();
        }
        Self { coeffs, parity }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new(), parity: Parity::Even }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_parts(vec![c], Parity::Even)
    }

    /// `x`.
    pub fn x() -> Self {
        Self::from_parts(vec![ZERO, Complex64::new(1.0, 0.0)], Parity::Odd)
    }

    /// Chebyshev polynomial of the first kind.
    pub fn chebyshev(q: usize) -> Self {
        let mut prev = vec![1.0];
        let mut cur = vec![0.0, 1.0];
        if q == 0 {
            return Self::from_real(&prev, Parity::Even).expect("valid");
        }
        for _ in 1..q {
            let mut next = vec![0.0; cur.len() + 1];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += 2.0 * c;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c;
            }
            prev = std::mem::replace(&mut cur, next);
        }
        Self::from_real(&cur, Parity::of_degree(q)).expect("valid")
    }

    /// `∏ (x - r)` over the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = vec![Complex64::new(1.0, 0.0)];
        for r in roots {
            let mut next = vec![ZERO; coeffs.len() + 1];
            for (i, c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= c * r;
            }
            coeffs = next;
        }
        Self::from_parts(coeffs, Parity::None)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or(ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| acc * z + c)
    }

    pub fn eval_real(&self, x: f64) -> Complex64 {
        self.eval(Complex64::new(x, 0.0))
    }

    /// `f*`: coefficients conjugated.
    pub fn conj(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.conj()).collect(), parity: self.parity }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_parts(self.coeffs.iter().map(|c| c * s).collect(), self.parity)
    }

    /// `x·f`.
    pub fn mul_x(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend_from_slice(&self.coeffs);
        Self::from_parts(coeffs, self.parity.flipped())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        Self::from_parts(coeffs, self.parity_for_sum(other))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i) - other.coeff(i)).collect();
        Self::from_parts(coeffs, self.parity_for_sum(other))
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        Self::from_parts(coeffs, self.parity.product(other.parity))
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(n, c)| c * n as f64).collect();
        Self::from_parts(coeffs, self.parity.flipped())
    }

    /// Set coefficients with `|c| ≤ tol` to exactly zero, then trim.
    pub fn zero_small(&self, tol: f64) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| if c.norm() <= tol { ZERO } else { c }).collect();
        Self::from_parts(coeffs, self.parity)
    }

    /// Parity consistent with the coefficients at tolerance `tol`.
    pub fn detect_parity(&self, tol: f64) -> Parity {
        let odd_mass = self.coeffs.iter().skip(1).step_by(2).any(|c| c.norm() > tol);
        let even_mass = self.coeffs.iter().step_by(2).any(|c| c.norm() > tol);
        match (even_mass, odd_mass) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::None,
        }
    }

    /// Re-declare the parity, validating it.
    pub fn with_parity(&self, parity: Parity) -> Result<Self> {
        Self::new(self.coeffs.clone(), parity)
    }

    /// For a polynomial in `x` with only even powers, the polynomial `r(u)`
    /// with `f(x) = r(x²)`. Odd coefficients above `tol` are an error.
    pub fn to_u(&self, tol: f64) -> Result<Self> {
        if let Some((n, c)) = self.coeffs.iter().enumerate().skip(1).step_by(2).find(|(_, c)| c.norm() > tol) {
            return Err(Error::Consistency(format!("odd coefficient x^{n} = {c} in an even polynomial")));
        }
        Ok(Self::from_parts(self.coeffs.iter().step_by(2).copied().collect(), Parity::None))
    }

    /// `r(x²)` for a polynomial `r(u)`.
    pub fn from_u(&self) -> Self {
        let mut coeffs = vec![ZERO; 2 * self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[2 * i] = *c;
        }
        Self::from_parts(coeffs, Parity::Even)
    }

    /// Largest coefficient magnitude.
    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn parity_for_sum(&self, other: &Self) -> Parity {
        if self.is_zero() {
            other.parity
        } else if other.is_zero() {
            self.parity
        } else {
            self.parity.sum(other.parity)
        }
    }

    fn parity_violation(&self, parity: Parity) -> Option<(usize, Complex64)> {
        let start = match parity {
            Parity::Even => 1,
            Parity::Odd => 0,
            Parity::None => return None,
        };
        self.coeffs
            .iter()
            .enumerate()
            .skip(start)
            .step_by(2)
            .find(|(_, c)| c.norm() > tol::CONSTRUCTION)
            .map(|(n, c)| (n, *c))
    }
}

impl fmt::Debug for ComplexPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexPolynomial[{}](", self.parity.as_str())?;
        for (n, c) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:+e}{:+e}i)x^{n}", c.re, c.im)?;
        }
        write!(f, ")")
    }
}
