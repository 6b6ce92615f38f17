use num_complex::Complex64;
use serde::Serialize;

use super::{ComplexPolynomial, Parity};
use crate::tol;

pub const DEFAULT_GRID: usize = 10_000;
pub const DEFAULT_OUTER_LIMIT: f64 = 10.0;
const MIN_GRID: usize = 1000;
const SAMPLE_TOL: f64 = 1e-9;

/// Outcome of the sampled QET realizability test.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub degree: usize,
    /// Nonzero, finite polynomial.
    pub degree_ok: bool,
    /// Coefficients have parity `(-1)^degree`.
    pub parity_ok: bool,
    /// `|p| ≤ 1` on `[-1, 1]`.
    pub bounded_inside: bool,
    /// `|p| ≥ 1` on `|x| ≥ 1`.
    pub dominating_outside: bool,
    /// `|p(ix)p*(ix)| ≥ 1` for real `x`; vacuous for odd degree.
    pub even_axis_ok: bool,
    /// Where the first failing condition was observed.
    pub witness: Option<f64>,
}

impl ConditionReport {
    pub fn accepted(&self) -> bool {
        self.degree_ok && self.parity_ok && self.bounded_inside && self.dominating_outside && self.even_axis_ok
    }
}

/// Sampled check of the necessary and sufficient conditions for a degree-q
/// QET to realize `p`: degree and parity; `|p| ≤ 1` on the unit interval and
/// `|p| ≥ 1` outside it; and for even degree `|p(ix)p*(ix)| ≥ 1` on the
/// imaginary axis.
///
/// This samples `grid_size` points per region (at least 1000) up to
/// `outer_limit`; it is a screening test for known closed-form families,
/// not a proof.
pub fn check_qet_conditions(p: &ComplexPolynomial, grid_size: usize, outer_limit: f64) -> ConditionReport {
    let n = grid_size.max(MIN_GRID);
    let q = p.degree();
    let mut witness = None;
    let mut note = |ok: bool, x: f64| {
        if !ok && witness.is_none() {
            witness = Some(x);
        }
        ok
    };

    let degree_ok = note(!p.is_zero(), 0.0);
    let parity_ok = {
        let wrong = p
            .coeffs()
            .iter()
            .enumerate()
            .find(|(k, c)| Parity::of_degree(*k) != Parity::of_degree(q) && c.norm() > tol::CONSTRUCTION);
        note(wrong.is_none(), 0.0)
    };

    let inside = grid(-1.0, 1.0, n).find(|&x| p.eval_real(x).norm() > 1.0 + SAMPLE_TOL);
    let bounded_inside = note(inside.is_none(), inside.unwrap_or(0.0));

    let outer_limit = outer_limit.max(1.0);
    let outside = grid(1.0, outer_limit, n)
        .flat_map(|x| [x, -x])
        .find(|&x| p.eval_real(x).norm() < 1.0 - SAMPLE_TOL);
    // Beyond the sampled window |p| grows without bound iff deg ≥ 1.
    let asymptotic_ok = q >= 1 || p.coeff(0).norm() >= 1.0 - SAMPLE_TOL;
    let dominating_outside = note(outside.is_none() && asymptotic_ok, outside.unwrap_or(outer_limit));

    let even_axis_ok = if q.is_multiple_of(2) {
        let pc = p.conj();
        let bad = grid(0.0, outer_limit, n).find(|&y| {
            let z = Complex64::new(0.0, y);
            (p.eval(z) * pc.eval(z)).norm() < 1.0 - SAMPLE_TOL
        });
        note(bad.is_none(), bad.unwrap_or(0.0))
    } else {
        true
    };

    ConditionReport { degree: q, degree_ok, parity_ok, bounded_inside, dominating_outside, even_axis_ok, witness }
}

fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}
