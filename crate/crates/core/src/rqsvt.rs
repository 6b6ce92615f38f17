//! Odd-degree QSVT, the r-QSVT polar decomposition, and eigenstate
//! filtering built on the sign-function block-encoding.

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockenc::{dilate_general, projector_rotation, BlockEncoding, QsvtEncoding};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, operator_norm, polar_oracle, ComplexMatrix};
use crate::par::Execution;
use crate::qsp::{pade2_phases, ReflectionPhases};
use crate::rqet::{error_bound, query_count, run_sign, sign_iterations, IterationRow, SignConfig, SignMode, SignOutput};
use crate::tol;

/// Update-form disagreement tolerated per polar step.
pub const FORM_TOL: f64 = 1e-10;
/// Eigenvalues this close to 0 count as the zero eigenvalue.
pub const ZERO_EIGENVALUE_TOL: f64 = 1e-9;
const SLACK: f64 = 1e-12;

enum Rotation {
    Diagonal(Vec<Complex64>),
    Dense(ComplexMatrix),
}

/// `R^Π_φ`, diagonal when `Π` is.
fn rotation(p: &ComplexMatrix, phi: f64) -> Rotation {
    let n = p.rows();
    let off_diagonal = (0..n).any(|i| (0..n).any(|j| i != j && p[(i, j)].norm() != 0.0));
    if off_diagonal {
        return Rotation::Dense(projector_rotation(p, phi));
    }
    let e = Complex64::from_polar(1.0, phi);
    // e^{−iφ}(1 − π) + e^{iφ}π with π the diagonal entry.
    Rotation::Diagonal(p.diagonal().iter().map(|d| e.conj() + (e - e.conj()) * d).collect())
}

fn apply_right(exec: Execution, m: ComplexMatrix, r: Rotation) -> ComplexMatrix {
    match r {
        Rotation::Diagonal(d) => {
            let mut m = m;
            m.scale_columns(&d);
            m
        }
        Rotation::Dense(r) => m.matmul_with(exec, &r),
    }
}

/// `R^{Π₁}_{φ₁} U ∏ᵢ [R^{Π₂}_{φ₂ᵢ} U† R^{Π₁}_{φ₂ᵢ₊₁} U]` for odd `q`.
pub fn qsvt_assemble(enc: &QsvtEncoding, phases: &ReflectionPhases) -> Result<QsvtEncoding> {
    qsvt_assemble_with(Execution::default(), enc, phases)
}

pub fn qsvt_assemble_with(exec: Execution, enc: &QsvtEncoding, phases: &ReflectionPhases) -> Result<QsvtEncoding> {
    if phases.degree().is_multiple_of(2) {
        return Err(Error::Degree(format!("QSVT is implemented for odd degree only, got {}", phases.degree())));
    }
    let u = &enc.unitary;
    let u_dag = u.adjoint();
    let angles = phases.angles();
    let mut m = apply_right(exec, ComplexMatrix::identity(u.rows()), rotation(&enc.proj_left, angles[0]));
    m = m.matmul_with(exec, u);
    for pair in angles[1..].chunks(2) {
        m = apply_right(exec, m, rotation(&enc.proj_right, pair[0])).matmul_with(exec, &u_dag);
        m = apply_right(exec, m, rotation(&enc.proj_left, pair[1])).matmul_with(exec, u);
    }
    Ok(enc.with_unitary(m))
}

/// Per-step consistency of the polar recursion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarStep {
    pub n: usize,
    /// `‖X(15 − 10X†X + 3(X†X)²)/8 − (15 − 10XX† + 3(XX†)²)X/8‖`.
    pub form_gap: f64,
    /// Distance of the assembled block from the right-Gram update.
    pub realization_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarReport {
    pub rows: Vec<IterationRow>,
    pub steps: Vec<PolarStep>,
    pub epsilon: f64,
    pub normalization: f64,
}

impl PolarReport {
    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.error)
    }

    pub fn converged(&self) -> bool {
        self.final_error() <= self.epsilon
    }
}

/// `(15 − 10G + 3G²)/8`.
fn gram_update(gram: &ComplexMatrix) -> ComplexMatrix {
    let g2 = gram * gram;
    let poly = &(&ComplexMatrix::identity(gram.rows()).scale_real(15.0) - &gram.scale_real(10.0)) + &g2.scale_real(3.0);
    poly.scale_real(0.125)
}

/// Main-text (right-Gram) and left-Gram forms of one `p₂` step on `X`.
pub fn polar_updates(x: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let xh = x.adjoint();
    let right = x * &gram_update(&(&xh * x));
    let left = &gram_update(&(x * &xh)) * x;
    (right, left)
}

/// r-QSVT toward the unitary polar factor of `A`, with `σ(A) ⊂ [Δ, 1]`.
pub fn run_polar(
    a: &ComplexMatrix,
    delta: f64,
    epsilon: f64,
    iterations: Option<usize>,
    exec: Execution,
) -> Result<(QsvtEncoding, PolarReport)> {
    SignConfig::new(delta, epsilon).validate()?;
    let polar = polar_oracle(a).map_err(|e| match e {
        Error::IllConditioned { sigma_min, .. } => Error::IllConditioned { sigma_min, threshold: delta },
        other => other,
    })?;
    if polar.sigma_max > 1.0 + SLACK {
        return Err(Error::NormTooLarge { norm: polar.sigma_max });
    }
    if polar.sigma_min < delta - SLACK {
        return Err(Error::IllConditioned { sigma_min: polar.sigma_min, threshold: delta });
    }
    let target = polar.unitary;
    let n_total = iterations.unwrap_or_else(|| sign_iterations(delta, epsilon, 2));
    let mut enc = dilate_general(a)?;
    let mut report = PolarReport { rows: Vec::new(), steps: Vec::new(), epsilon, normalization: 1.0 };
    let t0 = Instant::now();
    let err0 = operator_norm(&(a - &target));
    if err0 <= epsilon || n_total == 0 {
        report.rows.push(IterationRow {
            n: 0,
            error: err0,
            bound: 1.0,
            queries: 1,
            distinct_angles: Some(0),
            wall_time_ms: t0.elapsed().as_secs_f64() * 1e3,
        });
        return Ok((enc, report));
    }
    let phases = pade2_phases();
    for n in 1..=n_total {
        let t = Instant::now();
        let x = enc.block();
        let (right, left) = polar_updates(&x);
        let form_gap = operator_norm(&(&right - &left));
        if form_gap > FORM_TOL {
            return Err(Error::Consistency(format!("polar update forms differ by {form_gap:.3e} at step {n}")));
        }
        enc = qsvt_assemble_with(exec, &enc, &phases)?;
        let block = enc.block();
        report.steps.push(PolarStep { n, form_gap, realization_residual: operator_norm(&(&block - &right)) });
        report.rows.push(IterationRow {
            n,
            error: operator_norm(&(&block - &target)),
            bound: error_bound(delta, 2, n),
            queries: query_count(n, 2)?,
            distinct_angles: None,
            wall_time_ms: t.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok((enc, report))
}

/// `e^{iθY} = [[cos θ, sin θ], [−sin θ, cos θ]]`.
fn y_rotation(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, s], [-s, c]]
}

/// Reference block of `(e^{iθ_L Y} ⊗ I) C_O (e^{iθ_R Y} ⊗ I)` with
/// `C_O = |0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ O` on `control ⊗ ancilla ⊗ system`.
fn controlled_filter(be: &BlockEncoding, theta_left: f64, theta_right: f64) -> ComplexMatrix {
    let d = be.total_dim();
    let mut c = ComplexMatrix::identity(2 * d);
    c.set_block(d, d, &be.unitary);
    let lift = |t: f64| {
        let y = y_rotation(t);
        ComplexMatrix::from_real_rows(&[y[0].to_vec(), y[1].to_vec()]).kron(&ComplexMatrix::identity(d))
    };
    let full = &(&lift(theta_left) * &c) * &lift(theta_right);
    let o = be.reference_index * be.system_dim;
    full.block(o, o, be.system_dim, be.system_dim)
}

/// `(I + X)/2` for the encoded `X ≈ sign(A)`: conjugation of the controlled
/// oracle by `e^{i(π/4)Y}` on the left and `e^{−i(π/4)Y}` on the right.
pub fn filtering_operator(be_sign: &BlockEncoding) -> ComplexMatrix {
    controlled_filter(be_sign, FRAC_PI_4, -FRAC_PI_4)
}

/// Sign-function encoding of `a` and its filtering block.
fn filter_of(a: &ComplexMatrix, delta: f64, epsilon: f64, exec: Execution) -> Result<ComplexMatrix> {
    let cfg = SignConfig::new(delta, epsilon).with_mode(SignMode::Recursive).with_exec(exec);
    let (out, _) = run_sign(a, &cfg)?;
    match out {
        SignOutput::Encoding(be) => Ok(filtering_operator(&be)),
        SignOutput::Scalar { .. } => unreachable!("recursive mode returns an encoding"),
    }
}

/// `P₊((A + Δ/2)/(1 + Δ/2)) · P₊(−(A − Δ/2)/(1 + Δ/2))`, the projector onto
/// the zero eigenspace of `A`.
pub fn preparation_projector(a: &ComplexMatrix, delta: f64, epsilon: f64, exec: Execution) -> Result<ComplexMatrix> {
    SignConfig::new(delta, epsilon).validate()?;
    let spec = hermitian_eig(a)?;
    let zeros = spec.eigenvalues.iter().filter(|l| l.abs() <= ZERO_EIGENVALUE_TOL).count();
    if zeros != 1 {
        return Err(Error::Domain(format!("expected exactly one zero eigenvalue, found {zeros}")));
    }
    let offending: Vec<f64> = spec
        .eigenvalues
        .iter()
        .copied()
        .filter(|l| l.abs() > ZERO_EIGENVALUE_TOL && l.abs() < delta - SLACK)
        .collect();
    if !offending.is_empty() {
        return Err(Error::GapViolation { gap: delta, offending });
    }
    let s = 1.0 + delta / 2.0;
    let b1 = a.shift_diagonal(delta / 2.0).scale_real(1.0 / s);
    let b2 = a.shift_diagonal(-delta / 2.0).scale_real(-1.0 / s);
    let gap = delta / (2.0 + delta);
    let p1 = filter_of(&b1, gap, epsilon / 2.0, exec)?;
    let p2 = filter_of(&b2, gap, epsilon / 2.0, exec)?;
    Ok(&p1 * &p2)
}

/// Normalized post-selected state and its success probability.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelection {
    pub state: Vec<Complex64>,
    pub probability: f64,
}

pub fn postselect(projector: &ComplexMatrix, psi: &[Complex64]) -> Result<PostSelection> {
    if psi.len() != projector.cols() {
        return Err(Error::Shape(format!("state has length {} but the projector acts on {}", psi.len(), projector.cols())));
    }
    let norm2 = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let n_in = norm2(psi);
    if n_in == 0.0 {
        return Err(Error::Input("input state is zero".into()));
    }
    let out = projector.mul_vec(psi);
    let n_out = norm2(&out);
    if n_out <= tol::TRIM {
        return Err(Error::Domain("input state has no overlap with the target subspace".into()));
    }
    let scale = 1.0 / n_out.sqrt();
    Ok(PostSelection { state: out.iter().map(|z| z * scale).collect(), probability: n_out / n_in })
}
