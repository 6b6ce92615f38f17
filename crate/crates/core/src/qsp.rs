//! Scalar quantum signal processing.
//!
//! Two 2×2 forms are used. The rotation form
//! `e^{iφ'₀Z}·W(x)e^{iφ'₁Z}·…·W(x)e^{iφ'_qZ}` with
//! `W(x) = [[x, i√(1−x²)], [i√(1−x²), x]]` is what the phase-finding
//! recursion peels apart; the reflection form
//! `e^{iφ₁Z}R(x)·e^{iφ₂Z}R(x)·…·e^{iφ_qZ}R(x)` with
//! `R(x) = [[x, √(1−x²)], [√(1−x²), −x]]` is what QET executes on each
//! eigenvalue sector of a block-encoding. Products are in written order:
//! the `i = 1` factor is leftmost.

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::poly::{
    check_qet_conditions, deflate_pade_square, divide_by_u_minus_one, pade, roots_in_u, ComplexPolynomial, Parity, DEFAULT_GRID,
    DEFAULT_OUTER_LIMIT,
};
use crate::tol;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Grid size of every round-trip check against the target polynomial.
pub const CHECK_POINTS: usize = 201;
/// Sample count for the complementary-polynomial identity.
pub const IDENTITY_POINTS: usize = 101;
const RATIO_TOL: f64 = 1e-8;
const RECURSION_ZERO: f64 = 1e-12;
const DROP_TOL: f64 = 1e-8;

/// Map an angle to `(−π, π]`.
pub fn canonicalize(angle: f64) -> f64 {
    let r = angle.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Distance between two angles modulo `period`.
pub fn angle_distance(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// `(φ'₀, …, φ'_q)` of a degree-`q` rotation-form sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationPhases(Vec<f64>);

impl RotationPhases {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() || angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Input("rotation phases must be a non-empty list of finite angles".into()));
        }
        Ok(Self(angles))
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn canonicalized(&self) -> Self {
        Self(self.0.iter().map(|&a| canonicalize(a)).collect())
    }
}

/// `(φ₁, …, φ_q)` of a degree-`q` reflection-form (QET) sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReflectionPhases(Vec<f64>);

impl ReflectionPhases {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::Degree("a phase sequence needs at least one angle".into()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Input("phase angles must be finite".into()));
        }
        Ok(Self(angles))
    }

    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn into_angles(self) -> Vec<f64> {
        self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn canonicalized(&self) -> Self {
        Self(self.0.iter().map(|&a| canonicalize(a)).collect())
    }

    /// Same realized operator, up to global phase: equal modulo π
    /// elementwise with an even number of odd-π offsets (each π offset
    /// flips the sign of the whole product).
    pub fn equivalent_to(&self, other: &Self, tol: f64) -> bool {
        if self.0.len() != other.0.len() {
            return false;
        }
        let mut odd_shifts = 0usize;
        for (a, b) in self.0.iter().zip(&other.0) {
            if angle_distance(*a, *b, 2.0 * PI) <= tol {
                continue;
            }
            if angle_distance(*a + PI, *b, 2.0 * PI) <= tol {
                odd_shifts += 1;
                continue;
            }
            return false;
        }
        odd_shifts.is_multiple_of(2)
    }
}

/// Row-major 2×2 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [Complex64; 4]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([ONE, ZERO, ZERO, ONE]);

    pub fn upper_left(&self) -> Complex64 {
        self.0[0]
    }

    pub fn z_rotation(phi: f64) -> Mat2 {
        let e = Complex64::from_polar(1.0, phi);
        Mat2([e, ZERO, ZERO, e.conj()])
    }

    pub fn adjoint(&self) -> Mat2 {
        let m = self.0;
        Mat2([m[0].conj(), m[2].conj(), m[1].conj(), m[3].conj()])
    }

    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (self.adjoint() * *self).max_abs_diff(&Mat2::IDENTITY) <= tol
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::new(2, 2, self.0.to_vec()).expect("2x2")
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, r: Mat2) -> Mat2 {
        let (a, b) = (self.0, r.0);
        Mat2([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }
}

fn signal_sqrt(x: f64) -> Result<f64> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("signal x = {x} lies outside [-1, 1]")));
    }
    Ok((1.0 - x * x).max(0.0).sqrt())
}

/// `W(x) = [[x, i√(1−x²)], [i√(1−x²), x]]`.
pub fn w_matrix(x: f64) -> Result<Mat2> {
    let s = signal_sqrt(x)?;
    let xs = Complex64::new(x, 0.0);
    let is = Complex64::new(0.0, s);
    Ok(Mat2([xs, is, is, xs]))
}

/// `R(x) = [[x, √(1−x²)], [√(1−x²), −x]]`.
pub fn r_matrix(x: f64) -> Result<Mat2> {
    let s = signal_sqrt(x)?;
    Ok(Mat2([Complex64::new(x, 0.0), Complex64::new(s, 0.0), Complex64::new(s, 0.0), Complex64::new(-x, 0.0)]))
}

/// `e^{iφ'₀Z} ∏ᵢ [W(x) e^{iφ'ᵢZ}]`.
pub fn qsp_rotation_eval(phases: &RotationPhases, x: f64) -> Result<Mat2> {
    let w = w_matrix(x)?;
    let (first, rest) = phases.angles().split_first().expect("non-empty");
    Ok(rest.iter().fold(Mat2::z_rotation(*first), |m, &phi| m * w * Mat2::z_rotation(phi)))
}

/// `∏ᵢ [e^{iφᵢZ} R(x)]`.
pub fn qsp_reflection_eval(phases: &ReflectionPhases, x: f64) -> Result<Mat2> {
    let r = r_matrix(x)?;
    Ok(phases.angles().iter().fold(Mat2::IDENTITY, |m, &phi| m * Mat2::z_rotation(phi) * r))
}

/// Upper-left entry of [`qsp_reflection_eval`], propagating only the first
/// row; O(1) work per phase.
pub fn reflection_response(phases: &[f64], x: f64) -> Result<Complex64> {
    let s = signal_sqrt(x)?;
    let (mut a, mut b) = (ONE, ZERO);
    for &phi in phases {
        let e = Complex64::from_polar(1.0, phi);
        let (ea, eb) = (a * e, b * e.conj());
        a = ea * x + eb * s;
        b = ea * s - eb * x;
    }
    Ok(a)
}

/// Max over `n` uniform points in `[−1, 1]` of `|response(x) − f(x)|`,
/// with the location of the worst point.
pub fn max_deviation(phases: &ReflectionPhases, f: &ComplexPolynomial, n: usize) -> (f64, f64) {
    grid(n)
        .map(|x| {
            let got = reflection_response(phases.angles(), x).expect("grid inside [-1, 1]");
            ((got - f.eval_real(x)).norm(), x)
        })
        .fold((0.0, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc })
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    let n = n.max(2);
    (0..n).map(move |i| if i + 1 == n { 1.0 } else { -1.0 + 2.0 * i as f64 / (n - 1) as f64 })
}

/// The off-diagonal partner `h` with `f f* + (1−x²) h h* = 1`.
///
/// `1 − f f*` is factored in `u = x²`: the root `u = 1` (odd multiplicity
/// `m`) contributes `(x² − 1)^{(m−1)/2}` after one `(1 − x²)` is set aside;
/// each root at `u = 0` contributes a factor `x`; the remaining roots are
/// matched into conjugate (or, for real double roots, coincident) pairs and
/// each pair contributes `x² − s` with `Im s ≥ 0`. The leading constant's
/// principal square root normalizes the product.
pub fn complementary_poly(f: &ComplexPolynomial) -> Result<ComplexPolynomial> {
    let report = check_qet_conditions(f, DEFAULT_GRID, DEFAULT_OUTER_LIMIT);
    if !report.accepted() {
        return Err(Error::Domain(format!("polynomial is not QET-realizable: {report:?}")));
    }
    let q = f.degree();
    let g = ComplexPolynomial::constant(ONE).sub(&f.mul(&f.conj()));
    let scale = g.max_coeff().max(1.0);
    let g_u = g.to_u(1e-12 * scale)?;
    let mut w: Vec<Complex64> = g_u.coeffs().iter().map(|c| Complex64::new(c.re, 0.0)).collect();

    let mut zero_roots = 0usize;
    while w.len() > 1 && w[0].norm() <= 1e-12 * scale {
        w.remove(0);
        zero_roots += 1;
    }
    let mut unit_roots = 0usize;
    while w.len() > 1 {
        let (quotient, rem) = divide_by_u_minus_one(&w);
        if rem.norm() > 1e-10 * scale {
            break;
        }
        w = quotient;
        unit_roots += 1;
    }
    if unit_roots.is_multiple_of(2) {
        return Err(Error::Factorization { x: 1.0, residual: unit_roots as f64 });
    }
    // g = (u−1)^m · w̃ and (1−u)^m = −(u−1)^m for odd m.
    let rest = ComplexPolynomial::from_parts(w.iter().map(|c| -c).collect(), Parity::None);
    let roots = if rest.degree() == 0 { Vec::new() } else { roots_in_u(&rest, true)? };
    if roots.len() % 2 != 0 {
        return Err(Error::Factorization { x: 0.0, residual: roots.len() as f64 });
    }
    let lead = rest.leading();
    if lead.re <= 0.0 {
        return Err(Error::Factorization { x: f64::INFINITY, residual: lead.re });
    }

    let mut h = ComplexPolynomial::constant(Complex64::new(lead.re.sqrt(), 0.0));
    for _ in 0..zero_roots {
        h = h.mul(&ComplexPolynomial::x());
    }
    let x2_minus = |s: Complex64| ComplexPolynomial::from_parts(vec![-s, ZERO, ONE], Parity::Even);
    for _ in 0..(unit_roots - 1) / 2 {
        h = h.mul(&x2_minus(ONE));
    }
    for s in pair_roots(roots, &rest) {
        h = h.mul(&x2_minus(s));
    }
    let h = h.with_parity(Parity::of_degree(q + 1))?;
    if q > 0 && h.degree() > q - 1 {
        return Err(Error::Degree(format!("complementary polynomial has degree {} > {}", h.degree(), q - 1)));
    }

    let hc = h.conj();
    let fc = f.conj();
    let (worst, at) = grid(IDENTITY_POINTS)
        .map(|x| {
            let z = Complex64::new(x, 0.0);
            let v = f.eval(z) * fc.eval(z) + (1.0 - x * x) * h.eval(z) * hc.eval(z);
            ((v - ONE).norm(), x)
        })
        .fold((0.0, 0.0), |acc, v| if v.0 > acc.0 { v } else { acc });
    if worst > tol::comparison() {
        return Err(Error::Factorization { x: at, residual: worst });
    }
    Ok(h)
}

/// Match each root with the partner closest to its conjugate and return one
/// representative `s` per pair, with `Im s ≥ 0`. Near-coincident real pairs
/// are refined as simple roots of `r'`, other pairs as roots of `r`.
fn pair_roots(mut roots: Vec<Complex64>, r: &ComplexPolynomial) -> Vec<Complex64> {
    let dr = r.derivative();
    let ddr = dr.derivative();
    let mut out = Vec::with_capacity(roots.len() / 2);
    while let Some(z) = roots.pop() {
        let (idx, _) = roots
            .iter()
            .enumerate()
            .map(|(i, w)| (i, (w - z.conj()).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("even root count");
        let partner = roots.swap_remove(idx);
        let (upper, lower) = if z.im >= partner.im { (z, partner) } else { (partner, z) };
        let mut s = 0.5 * (upper + lower.conj());
        let coincident = (upper - lower).norm() <= 1e-4 * (1.0 + s.norm());
        s = if coincident {
            newton_polish(&dr, &ddr, Complex64::new(s.re, 0.0))
        } else {
            newton_polish(r, &dr, s)
        };
        out.push(Complex64::new(s.re, if coincident { 0.0 } else { s.im.max(0.0) }));
    }
    out
}

fn newton_polish(p: &ComplexPolynomial, dp: &ComplexPolynomial, start: Complex64) -> Complex64 {
    let mut z = start;
    let mut best = p.eval(z).norm();
    for _ in 0..8 {
        let d = dp.eval(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - p.eval(z) / d;
        let val = p.eval(next).norm();
        if !(val < best) {
            break;
        }
        z = next;
        best = val;
    }
    z
}

/// Rotation-form phases from a consistent `(f, h)` pair by repeated
/// degree reduction.
pub fn find_phases_rotation(f: &ComplexPolynomial, h: &ComplexPolynomial) -> Result<RotationPhases> {
    let q = f.degree();
    if q > 0 && h.degree() > q - 1 {
        return Err(Error::Degree(format!("h has degree {} but f has degree {q}", h.degree())));
    }
    let x = ComplexPolynomial::x();
    let one_minus_x2 = ComplexPolynomial::from_parts(vec![ONE, ZERO, -ONE], Parity::Even);
    let mut f_cur = f.clone();
    let mut h_cur = h.clone();
    let mut reversed = Vec::with_capacity(q);
    for d in (1..=q).rev() {
        let fd = f_cur.coeff(d);
        let hd = h_cur.coeff(d - 1);
        let ratio = if hd.norm() == 0.0 { f64::INFINITY } else { (fd / hd).norm() };
        if !((ratio - 1.0).abs() <= RATIO_TOL) {
            return Err(Error::InconsistentPair { degree: d, ratio });
        }
        let phi = 0.5 * (fd / hd).arg();
        let e = Complex64::from_polar(1.0, phi);
        let f_next = x.mul(&f_cur).scale(e.conj()).add(&one_minus_x2.mul(&h_cur).scale(e));
        let h_next = x.mul(&h_cur).scale(e).sub(&f_cur.scale(e.conj()));
        let scale = 1.0 + f_next.max_coeff().max(h_next.max_coeff());
        let (f_t, f_drop) = truncate(&f_next, d - 1);
        let (h_t, h_drop) = if d >= 2 { truncate(&h_next, d - 2) } else { (ComplexPolynomial::zero(), h_next.max_coeff()) };
        if f_drop.max(h_drop) > DROP_TOL * scale {
            return Err(Error::Recursion(format!(
                "degree did not drop at step {d}: residual leading terms {f_drop:.3e} (f), {h_drop:.3e} (h)"
            )));
        }
        f_cur = f_t.zero_small(RECURSION_ZERO);
        h_cur = h_t.zero_small(RECURSION_ZERO);
        reversed.push(phi);
    }
    let f0 = f_cur.coeff(0);
    if (f0.norm() - 1.0).abs() > RATIO_TOL || !h_cur.is_zero() {
        return Err(Error::Recursion(format!("base case is not a unit constant: f0 = {f0}, h = {h_cur:?}")));
    }
    let mut angles = Vec::with_capacity(q + 1);
    angles.push(f0.arg());
    angles.extend(reversed.into_iter().rev());
    let phases = RotationPhases(angles).canonicalized();

    let mut worst = (0.0, 0.0);
    for x in grid(CHECK_POINTS) {
        let d = (qsp_rotation_eval(&phases, x)?.upper_left() - f.eval_real(x)).norm();
        if d > worst.0 {
            worst = (d, x);
        }
    }
    if worst.0 > tol::comparison() {
        return Err(Error::RoundTrip { x: worst.1, max_dev: worst.0 });
    }
    Ok(phases)
}

/// Keep terms up to `x^max_degree`; also returns the largest dropped magnitude.
fn truncate(p: &ComplexPolynomial, max_degree: usize) -> (ComplexPolynomial, f64) {
    let c = p.coeffs();
    let keep = c.len().min(max_degree + 1);
    let dropped = c[keep..].iter().map(|z| z.norm()).fold(0.0, f64::max);
    (ComplexPolynomial::from_parts(c[..keep].to_vec(), p.parity()), dropped)
}

/// `φ₁ = φ'₀ + φ'_q + (q−1)π/2`, `φᵢ = φ'_{i−1} − π/2` for `2 ≤ i ≤ q`.
pub fn rotation_to_reflection(phases: &RotationPhases) -> Result<ReflectionPhases> {
    let a = phases.angles();
    if a.len() < 2 {
        return Err(Error::Degree("conversion needs a rotation sequence of degree >= 1".into()));
    }
    let q = a.len() - 1;
    let mut out = Vec::with_capacity(q);
    out.push(a[0] + a[q] + (q as f64 - 1.0) * FRAC_PI_2);
    out.extend(a[..q].iter().skip(1).map(|&p| p - FRAC_PI_2));
    Ok(ReflectionPhases(out).canonicalized())
}

/// Full pipeline: complementary polynomial, rotation-form recursion,
/// conversion, and a round-trip check of the reflection form against `f`.
pub fn find_phases(f: &ComplexPolynomial) -> Result<ReflectionPhases> {
    let h = complementary_poly(f)?;
    let rot = find_phases_rotation(f, &h)?;
    let refl = rotation_to_reflection(&rot)?;
    let (dev, x) = max_deviation(&refl, f, CHECK_POINTS);
    if dev > tol::comparison() {
        return Err(Error::RoundTrip { x, max_dev: dev });
    }
    Ok(refl)
}

/// Closed-form phases for `p₂`.
pub fn pade2_phases() -> ReflectionPhases {
    let r15 = 15f64.sqrt();
    let a = 0.5 * (r15 / 7.0).atan();
    let b = 0.5 * r15.atan();
    ReflectionPhases(vec![0.0, PI + a, PI + b, -b, -a]).canonicalized()
}

/// Phases for `p_l` without an iterative root finder: the literal closed
/// form for `l = 2`, the quartic-formula pipeline for `l = 4`.
pub fn analytic_pade_phases(l: usize) -> Result<ReflectionPhases> {
    match l {
        2 => Ok(pade2_phases()),
        4 => {
            // q(u) of degree 4 goes through `quartic_roots` inside the pipeline.
            debug_assert_eq!(deflate_pade_square(4).map(|q| q.degree()).ok(), Some(4));
            find_phases(&pade(4))
        }
        _ => Err(Error::Input(format!("analytic phases exist for l in {{2, 4}}, got {l}"))),
    }
}

/// Phases realizing `p_l` for any even `l ≤ 12`; analytic where possible.
pub fn pade_phases(l: usize) -> Result<ReflectionPhases> {
    if !l.is_multiple_of(2) || l == 0 {
        return Err(Error::Domain(format!(
            "p_{l} is not QET-realizable: odd members violate |p(x)| >= 1 for |x| >= 1"
        )));
    }
    match l {
        2 | 4 => analytic_pade_phases(l),
        _ if l <= crate::poly::MAX_DEFLATE_L => find_phases(&pade(l)),
        _ => Err(Error::Input(format!("Padé phases supported for l <= {}", crate::poly::MAX_DEFLATE_L))),
    }
}

/// Trivial Chebyshev angles `((q−1)π/2, −π/2, …, −π/2)` realizing `T_q`.
pub fn chebyshev_phases(q: usize) -> Result<ReflectionPhases> {
    if q == 0 {
        return Err(Error::Degree("Chebyshev phases need q >= 1".into()));
    }
    let mut v = vec![-FRAC_PI_2; q];
    v[0] = (q as f64 - 1.0) * FRAC_PI_2;
    Ok(ReflectionPhases(v).canonicalized())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn eq13_raw() -> [f64; 5] {
        let r15 = 15f64.sqrt();
        [0.0, PI + 0.5 * (r15 / 7.0).atan(), PI + 0.5 * r15.atan(), -0.5 * r15.atan(), -0.5 * (r15 / 7.0).atan()]
    }

    #[test]
    fn canonical_range() {
        assert_eq!(canonicalize(PI), PI);
        assert_eq!(canonicalize(-PI), PI);
        assert!((canonicalize(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(canonicalize(0.25), 0.25);
    }

    #[test]
    fn w_examples() {
        assert_eq!(w_matrix(1.0).unwrap(), Mat2::IDENTITY);
        let w0 = w_matrix(0.0).unwrap();
        assert_eq!(w0.0, [ZERO, c(0.0, 1.0), c(0.0, 1.0), ZERO]);
        let w = w_matrix(0.6).unwrap();
        assert!((w.0[1] - c(0.0, 0.8)).norm() < 1e-15);
        assert!(w.is_unitary(1e-15));
        assert!(matches!(w_matrix(1.1), Err(Error::Domain(_))));
        assert!(r_matrix(f64::NAN).is_err());
    }

    #[test]
    fn rotation_eval_examples() {
        let zero3 = RotationPhases::new(vec![0.0; 4]).unwrap();
        let m = qsp_rotation_eval(&zero3, 0.4).unwrap();
        assert!((m.upper_left() - c(-0.944, 0.0)).norm() < 1e-14);
        let q1 = RotationPhases::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(qsp_rotation_eval(&q1, 0.3).unwrap(), w_matrix(0.3).unwrap());
    }

    #[test]
    fn complementary_for_p2_matches_closed_form() {
        let h = complementary_poly(&pade(2)).unwrap();
        let r15 = 15f64.sqrt();
        let expect = [c(11.0 / 16.0, 3.0 * r15 / 16.0), ZERO, c(-17.0 / 16.0, -3.0 * r15 / 16.0), ZERO, c(3.0 / 8.0, 0.0)];
        assert_eq!(h.degree(), 4);
        for (got, want) in h.coeffs().iter().zip(expect) {
            assert!((got - want).norm() < 1e-14, "{got} vs {want}");
        }
        // identity at an off-grid sample point
        let f = pade(2);
        let x = c(0.3, 0.0);
        let v = f.eval(x) * f.conj().eval(x) + (1.0 - 0.09) * h.eval(x) * h.conj().eval(x);
        assert!((v - ONE).norm() < 1e-14);
    }

    #[test]
    fn complementary_trivial_cases() {
        let h = complementary_poly(&ComplexPolynomial::x()).unwrap();
        assert_eq!(h.coeffs(), &[ONE]);
        let h = complementary_poly(&ComplexPolynomial::chebyshev(2)).unwrap();
        assert_eq!(h.degree(), 1);
        assert!((h.coeff(1) - c(2.0, 0.0)).norm() < 1e-14 && h.coeff(0).norm() < 1e-14);
    }

    #[test]
    fn complementary_rejects_unrealizable() {
        assert!(matches!(complementary_poly(&pade(1)), Err(Error::Domain(_))));
    }

    #[test]
    fn phases_for_identity_polynomial() {
        let rot = find_phases_rotation(&ComplexPolynomial::x(), &ComplexPolynomial::constant(ONE)).unwrap();
        assert_eq!(rot.angles(), &[0.0, 0.0]);
    }

    #[test]
    fn inconsistent_pair_is_reported() {
        let h = ComplexPolynomial::constant(c(0.5, 0.0));
        assert!(matches!(
            find_phases_rotation(&ComplexPolynomial::x(), &h),
            Err(Error::InconsistentPair { degree: 1, .. })
        ));
    }

    #[test]
    fn p2_pipeline_reproduces_closed_form_set() {
        let got = find_phases(&pade(2)).unwrap();
        let want = ReflectionPhases::new(eq13_raw().to_vec()).unwrap();
        assert!(got.equivalent_to(&want, 1e-12), "{got:?}");
        assert!(max_deviation(&got, &pade(2), CHECK_POINTS).0 <= 1e-10);
    }

    #[test]
    fn closed_form_p2_values() {
        let p = pade2_phases();
        // Canonical form of the literal values.
        for (a, raw) in p.angles().iter().zip(eq13_raw()) {
            assert!(angle_distance(*a, raw, 2.0 * PI) < 1e-15);
            assert!(*a > -PI && *a <= PI);
        }
        assert!((eq13_raw()[1] - 3.394_272_908_731_872).abs() < 1e-14);
        assert!((eq13_raw()[2] - 3.800_650_689_416_202).abs() < 1e-14);
        let y = reflection_response(p.angles(), 0.5).unwrap();
        assert!((y - c(0.79296875, 0.0)).norm() <= 1e-10);
        let y = reflection_response(p.angles(), -0.5).unwrap();
        assert!((y + c(0.79296875, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn rotation_eval_of_pipeline_phases() {
        let h = complementary_poly(&pade(2)).unwrap();
        let rot = find_phases_rotation(&pade(2), &h).unwrap();
        assert_eq!(rot.degree(), 5);
        let m = qsp_rotation_eval(&rot, 0.5).unwrap();
        assert!((m.upper_left() - c(0.79296875, 0.0)).norm() <= 1e-10);
    }

    #[test]
    fn conversion_small_cases() {
        let r = rotation_to_reflection(&RotationPhases::new(vec![0.3, 0.4]).unwrap()).unwrap();
        assert!((r.angles()[0] - 0.7).abs() < 1e-15);
        let r = rotation_to_reflection(&RotationPhases::new(vec![0.0, 0.0]).unwrap()).unwrap();
        assert_eq!(r.angles(), &[0.0]);
    }

    #[test]
    fn chebyshev_trivial_angles() {
        let t3 = chebyshev_phases(3).unwrap();
        let y = qsp_reflection_eval(&t3, 0.4).unwrap().upper_left();
        assert!((y - c(-0.944, 0.0)).norm() < 1e-14);
        for q in 1..=9 {
            let ph = chebyshev_phases(q).unwrap();
            assert!(max_deviation(&ph, &ComplexPolynomial::chebyshev(q), CHECK_POINTS).0 < 1e-12, "T_{q}");
        }
    }

    #[test]
    fn chebyshev_pipeline_matches_trivial_angles_on_grid() {
        for q in 2..=7 {
            let t = ComplexPolynomial::chebyshev(q);
            let derived = find_phases(&t).unwrap();
            let trivial = chebyshev_phases(q).unwrap();
            for x in grid(CHECK_POINTS) {
                let a = qsp_reflection_eval(&derived, x).unwrap().upper_left();
                let b = qsp_reflection_eval(&trivial, x).unwrap().upper_left();
                assert!((a - b).norm() <= 1e-9, "T_{q} at {x}");
            }
        }
    }

    #[test]
    fn reflection_at_one_is_diagonal_unitary() {
        let ph = ReflectionPhases::new(vec![0.3, -1.2, 2.0]).unwrap();
        let m = qsp_reflection_eval(&ph, 1.0).unwrap();
        assert!((m.upper_left().norm() - 1.0).abs() < 1e-15);
        assert!(m.0[1].norm() < 1e-15);
    }

    #[test]
    fn fast_response_matches_full_product() {
        let ph = ReflectionPhases::new(vec![0.1, 2.2, -0.7, 1.3, 0.0, -3.0]).unwrap();
        for x in [-1.0, -0.3, 0.0, 0.55, 1.0] {
            let full = qsp_reflection_eval(&ph, x).unwrap().upper_left();
            assert!((full - reflection_response(ph.angles(), x).unwrap()).norm() < 1e-14);
        }
    }

    #[test]
    fn pade_pipeline_round_trips_even_members() {
        for l in [2usize, 4, 6, 8] {
            let ph = pade_phases(l).unwrap();
            assert_eq!(ph.degree(), 2 * l + 1);
            assert!(max_deviation(&ph, &pade(l), CHECK_POINTS).0 <= 1e-9, "l={l}");
        }
        assert!(matches!(pade_phases(3), Err(Error::Domain(_))));
    }

    #[test]
    fn pi_pair_equivalence() {
        let base = pade2_phases();
        let mut shifted = base.angles().to_vec();
        shifted[1] += PI;
        shifted[3] -= PI;
        let shifted = ReflectionPhases::new(shifted).unwrap();
        assert!(base.equivalent_to(&shifted, 1e-12));
        for x in [-0.8, 0.1, 0.6] {
            let a = qsp_reflection_eval(&base, x).unwrap();
            let b = qsp_reflection_eval(&shifted, x).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-14);
        }
        let mut single = base.angles().to_vec();
        single[2] += PI;
        assert!(!base.equivalent_to(&ReflectionPhases::new(single).unwrap(), 1e-12));
    }
}
