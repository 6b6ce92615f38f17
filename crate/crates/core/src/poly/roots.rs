use std::f64::consts::PI;

use num_complex::Complex64;

use super::ComplexPolynomial;
use crate::error::{Error, Result};

pub const DK_MAX_ITERATIONS: usize = 500;
const MAX_DEGREE: usize = 12;
const RESIDUAL_TOL: f64 = 1e-10;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Backward residual `|q(r)| / Σ|c_i||r|^i`.
pub fn root_residual(q: &ComplexPolynomial, r: Complex64) -> f64 {
    let scale: f64 = q.coeffs().iter().rev().fold(0.0, |acc, ci| acc * r.norm() + ci.norm());
    if scale == 0.0 {
        return 0.0;
    }
    q.eval(r).norm() / scale
}

/// All roots of `q`; closed forms up to degree 4 when `analytic_if_possible`,
/// Durand–Kerner otherwise.
pub fn roots_in_u(q: &ComplexPolynomial, analytic_if_possible: bool) -> Result<Vec<Complex64>> {
    let deg = q.degree();
    if q.is_zero() {
        return Err(Error::Input("the zero polynomial has no isolated roots".into()));
    }
    if deg > MAX_DEGREE {
        return Err(Error::Input(format!("root finding supports degree <= {MAX_DEGREE}, got {deg}")));
    }
    let a = q.coeffs();
    let roots = match deg {
        0 => Vec::new(),
        1 => vec![-a[0] / a[1]],
        2 if analytic_if_possible => quadratic_roots(a[2], a[1], a[0]).to_vec(),
        3 if analytic_if_possible => cubic_roots(a[3], a[2], a[1], a[0]).to_vec(),
        4 if analytic_if_possible => quartic_roots(a[4], a[3], a[2], a[1], a[0]).to_vec(),
        _ => return durand_kerner(q, DK_MAX_ITERATIONS),
    };
    let worst = roots.iter().map(|&r| root_residual(q, r)).fold(0.0, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(Error::NoConvergence { what: "closed-form root formula", iterations: 0, residual: worst });
    }
    Ok(roots)
}

/// Roots of `a z² + b z + c`, cancellation-free.
pub fn quadratic_roots(a: Complex64, b: Complex64, cc: Complex64) -> [Complex64; 2] {
    let disc = (b * b - 4.0 * a * cc).sqrt();
    // Pick the sign making |b ± disc| large.
    let s = if (b.conj() * disc).re >= 0.0 { b + disc } else { b - disc };
    if s.norm() == 0.0 {
        return [c(0.0, 0.0), c(0.0, 0.0)];
    }
    let q = -0.5 * s;
    let r1 = q / a;
    let r2 = if q.norm() > 0.0 { cc / q } else { -b / a - r1 };
    [r1, r2]
}

fn cbrt_principal(z: Complex64) -> Complex64 {
    if z.norm() == 0.0 {
        return z;
    }
    Complex64::from_polar(z.norm().cbrt(), z.arg() / 3.0)
}

/// Roots of `a z³ + b z² + c z + d` by Cardano's formula.
pub fn cubic_roots(a: Complex64, b: Complex64, cc: Complex64, d: Complex64) -> [Complex64; 3] {
    let (b, cc, d) = (b / a, cc / a, d / a);
    let d0 = b * b - 3.0 * cc;
    let d1 = 2.0 * b * b * b - 9.0 * b * cc + 27.0 * d;
    let root = (d1 * d1 - 4.0 * d0 * d0 * d0).sqrt();
    let big = if (d1 + root).norm() >= (d1 - root).norm() { d1 + root } else { d1 - root };
    let cc0 = cbrt_principal(0.5 * big);
    let xi = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut out = [c(0.0, 0.0); 3];
    for (k, slot) in out.iter_mut().enumerate() {
        let ck = cc0 * xi.powu(k as u32);
        *slot = if ck.norm() == 0.0 { -b / 3.0 } else { -(b + ck + d0 / ck) / 3.0 };
    }
    out
}

/// Roots of `a z⁴ + b z³ + c z² + d z + e` by Ferrari's method.
pub fn quartic_roots(a: Complex64, b: Complex64, cc: Complex64, d: Complex64, e: Complex64) -> [Complex64; 4] {
    let (b, cc, d, e) = (b / a, cc / a, d / a, e / a);
    // z = y − b/4 gives y⁴ + p y² + q y + r.
    let shift = -b / 4.0;
    let b2 = b * b;
    let p = cc - 3.0 * b2 / 8.0;
    let q = d - b * cc / 2.0 + b2 * b / 8.0;
    let r = e - b * d / 4.0 + b2 * cc / 16.0 - 3.0 * b2 * b2 / 256.0;
    let scale = 1.0 + p.norm() + r.norm().sqrt();

    if q.norm() <= 1e-14 * scale * scale.sqrt() {
        let [t1, t2] = quadratic_roots(c(1.0, 0.0), p, r);
        let (s1, s2) = (t1.sqrt(), t2.sqrt());
        return [s1 + shift, -s1 + shift, s2 + shift, -s2 + shift];
    }

    // Resolvent 8m³ + 8p m² + (2p² − 8r) m − q² = 0; take the largest root.
    let ms = cubic_roots(c(8.0, 0.0), 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q);
    let m = ms.into_iter().max_by(|x, y| x.norm().total_cmp(&y.norm())).expect("three roots");
    let w = (2.0 * m).sqrt();
    let half_p_m = p / 2.0 + m;
    let t = q / (2.0 * w);
    // y² − w y + (p/2 + m + t) = 0 and y² + w y + (p/2 + m − t) = 0.
    let [y1, y2] = quadratic_roots(c(1.0, 0.0), -w, half_p_m + t);
    let [y3, y4] = quadratic_roots(c(1.0, 0.0), w, half_p_m - t);
    [y1 + shift, y2 + shift, y3 + shift, y4 + shift]
}

/// Simultaneous Weierstrass (Durand–Kerner) iteration from perturbed
/// points on a circle enclosing the roots.
pub fn durand_kerner(q: &ComplexPolynomial, max_iterations: usize) -> Result<Vec<Complex64>> {
    let n = q.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = q.leading();
    let monic: Vec<Complex64> = q.coeffs().iter().map(|ci| ci / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(c(0.0, 0.0), |acc, ci| acc * z + ci);
    // Fujiwara-style bound on root magnitudes.
    let radius = monic[..n]
        .iter()
        .enumerate()
        .map(|(i, ci)| ci.norm().powf(1.0 / (n - i) as f64))
        .fold(0.0, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4)).collect();

    let mut last_step = f64::INFINITY;
    for _ in 0..max_iterations {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = c(1e-300, 0.0);
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
        }
        last_step = max_step;
        if max_step <= 1e-15 {
            break;
        }
    }
    let worst = z.iter().map(|&r| root_residual(q, r)).fold(0.0, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(Error::NoConvergence {
            what: "Durand-Kerner",
            iterations: max_iterations,
            residual: worst.max(last_step.min(worst)),
        });
    }
    Ok(z)
}
