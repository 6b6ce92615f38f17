//! QET assembly, recursive and flattened r-QET, and the sign-function driver.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockenc::{dilate_hermitian, extract, BlockEncoding};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, operator_norm, ComplexMatrix, Spectrum};
use crate::par::{self, Execution};
use crate::poly::pade;
use crate::qsp::{angle_distance, canonicalize, pade_phases, reflection_response, ReflectionPhases};

/// Largest flattened level assembled as a dense product.
pub const MAX_FLATTENED_LEVEL: usize = 4;
/// Largest explicit flattened phase list (scalar mode and angle statistics).
pub const MAX_EXPLICIT_PHASES: usize = 1 << 24;
/// Angles within this distance of 0 (mod 2π) count as merged zeros.
pub const MERGED_ZERO: f64 = 1e-12;
/// Tolerance for identifying two angles (mod 2π).
pub const ANGLE_TOL: f64 = 1e-9;
const GAP_SLACK: f64 = 1e-12;
/// Round-off slack on the error bound: a fixed floor plus a per-query term,
/// since rounding errors accumulate along the phase sequence.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;
pub const ROUNDOFF_PER_QUERY: f64 = 1e-14;

/// One use of the base block-encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleUse {
    Forward,
    Adjoint,
}

impl OracleUse {
    fn flipped(self) -> Self {
        match self {
            Self::Forward => Self::Adjoint,
            Self::Adjoint => Self::Forward,
        }
    }
}

/// Oracle order of a degree-`q` QET operator in written order:
/// `O, O†, O, …` for odd `q`, `O†, O, O†, …` for even `q`; always ending in `O`.
pub fn oracle_template(q: usize) -> Vec<OracleUse> {
    (0..q)
        .map(|i| if (q - 1 - i).is_multiple_of(2) { OracleUse::Forward } else { OracleUse::Adjoint })
        .collect()
}

/// A phase sequence together with its oracle pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QetPlan {
    pub phases: ReflectionPhases,
    pub degree: usize,
    pub oracle_pattern: Vec<OracleUse>,
    pub query_count: usize,
}

impl QetPlan {
    pub fn new(phases: ReflectionPhases) -> Self {
        let degree = phases.degree();
        Self { oracle_pattern: oracle_template(degree), query_count: degree, degree, phases }
    }

    fn tokens(&self) -> Vec<Token> {
        self.phases
            .angles()
            .iter()
            .zip(&self.oracle_pattern)
            .flat_map(|(&phi, &o)| [Token::Rotation(phi), Token::Oracle(o)])
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Token {
    Rotation(f64),
    Oracle(OracleUse),
}

/// `QET[O, φ]`: the written-order product `R_{φ₁} O^{(†)} R_{φ₂} O^{(†)} ⋯ O`.
pub fn qet_assemble(be: &BlockEncoding, phases: &ReflectionPhases) -> BlockEncoding {
    qet_assemble_with(Execution::default(), be, phases)
}

pub fn qet_assemble_with(exec: Execution, be: &BlockEncoding, phases: &ReflectionPhases) -> BlockEncoding {
    let o = &be.unitary;
    let o_dag = o.adjoint();
    let plan = QetPlan::new(phases.clone());
    let mut m: Option<ComplexMatrix> = None;
    for (&phi, &use_) in phases.angles().iter().zip(&plan.oracle_pattern) {
        let oracle = match use_ {
            OracleUse::Forward => o,
            OracleUse::Adjoint => &o_dag,
        };
        let d = be.rotation_diagonal(phi);
        m = Some(match m {
            // R·O scales the rows of O.
            None => {
                let mut first = oracle.clone();
                first.scale_rows(&d);
                first
            }
            Some(mut acc) => {
                acc.scale_columns(&d);
                acc.matmul_with(exec, oracle)
            }
        });
    }
    be.with_unitary(m.expect("phase list is non-empty"))
}

/// One recursion level: `O_{X_{n+1}} = QET[O_{X_n}, φ]`.
pub fn qet_recursive_step(be: &BlockEncoding, phases: &ReflectionPhases) -> BlockEncoding {
    qet_assemble(be, phases)
}

/// Phases of `QET[QET[O, inner], outer]` as a single sequence in `O`.
///
/// Every `O` slot of `outer` is replaced by the token stream of `inner`, and
/// every `O†` slot by its adjoint (reversed order, negated angles, oracle
/// uses flipped); adjacent ancilla rotations are then merged by adding
/// angles and the result is checked against the oracle template.
pub fn compose_phases(outer: &ReflectionPhases, inner: &ReflectionPhases) -> Result<ReflectionPhases> {
    let inner_tokens = QetPlan::new(inner.clone()).tokens();
    let inner_adjoint: Vec<Token> = inner_tokens
        .iter()
        .rev()
        .map(|t| match *t {
            Token::Rotation(phi) => Token::Rotation(-phi),
            Token::Oracle(o) => Token::Oracle(o.flipped()),
        })
        .collect();

    let mut angles = Vec::with_capacity(outer.degree() * inner.degree());
    let mut pattern = Vec::with_capacity(angles.capacity());
    let mut pending: Option<f64> = None;
    let mut push = |t: Token, angles: &mut Vec<f64>, pattern: &mut Vec<OracleUse>| -> Result<()> {
        match t {
            Token::Rotation(phi) => pending = Some(pending.unwrap_or(0.0) + phi),
            Token::Oracle(o) => {
                let phi = pending
                    .take()
                    .ok_or_else(|| Error::Composition("two oracle uses without a rotation between them".into()))?;
                angles.push(canonicalize(phi));
                pattern.push(o);
            }
        }
        Ok(())
    };
    for t in QetPlan::new(outer.clone()).tokens() {
        match t {
            Token::Oracle(OracleUse::Forward) => {
                for &s in &inner_tokens {
                    push(s, &mut angles, &mut pattern)?;
                }
            }
            Token::Oracle(OracleUse::Adjoint) => {
                for &s in &inner_adjoint {
                    push(s, &mut angles, &mut pattern)?;
                }
            }
            rot => push(rot, &mut angles, &mut pattern)?,
        }
    }
    if pending.is_some() {
        return Err(Error::Composition("composed sequence ends with a rotation".into()));
    }
    if pattern != oracle_template(angles.len()) {
        return Err(Error::Composition(format!(
            "composed oracle pattern does not match the degree-{} template",
            angles.len()
        )));
    }
    ReflectionPhases::new(angles)
}

/// Flattened phases of `n` nested levels of `base` (`n = 0` is `(0)`).
pub fn flattened_phases(base: &ReflectionPhases, n: usize) -> Result<ReflectionPhases> {
    let total = (base.degree() as u128).checked_pow(n as u32).filter(|&d| d <= MAX_EXPLICIT_PHASES as u128);
    if total.is_none() {
        return Err(Error::BigCount(format!(
            "{} levels of a degree-{} sequence exceed {} explicit phases",
            n,
            base.degree(),
            MAX_EXPLICIT_PHASES
        )));
    }
    let mut cur = ReflectionPhases::new(vec![0.0])?;
    for _ in 0..n {
        cur = compose_phases(&cur, base)?;
    }
    Ok(cur)
}

/// Distinct nonzero angles modulo 2π, sorted, one representative each.
pub fn distinct_angles(phases: &ReflectionPhases) -> Vec<f64> {
    let mut v: Vec<f64> = phases
        .angles()
        .iter()
        .map(|&a| canonicalize(a))
        .filter(|&a| angle_distance(a, 0.0, 2.0 * PI) > MERGED_ZERO)
        .collect();
    v.sort_by(f64::total_cmp);
    let mut reps: Vec<f64> = Vec::new();
    for a in v {
        if reps.last().is_none_or(|&r| a - r > ANGLE_TOL) {
            reps.push(a);
        }
    }
    if reps.len() > 1 && angle_distance(reps[0], *reps.last().unwrap(), 2.0 * PI) <= ANGLE_TOL {
        reps.remove(0);
    }
    reps
}

/// Block layout of a flattened list: blocks of `q` angles, each a merged
/// angle followed by either `base[1..]` (an `O` slot of the outer level) or
/// its negated reverse (an `O†` slot).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunStructure {
    pub forward_runs: usize,
    pub adjoint_runs: usize,
    pub merged: Vec<f64>,
}

pub fn run_structure(flattened: &ReflectionPhases, base: &ReflectionPhases) -> Option<RunStructure> {
    let q = base.degree();
    let a = flattened.angles();
    if q < 2 || !a.len().is_multiple_of(q) {
        return None;
    }
    let fwd: Vec<f64> = base.angles()[1..].to_vec();
    let adj: Vec<f64> = fwd.iter().rev().map(|x| -x).collect();
    let same = |u: &[f64], v: &[f64]| u.iter().zip(v).all(|(x, y)| angle_distance(*x, *y, 2.0 * PI) <= ANGLE_TOL);
    let mut s = RunStructure { forward_runs: 0, adjoint_runs: 0, merged: Vec::with_capacity(a.len() / q) };
    for block in a.chunks(q) {
        s.merged.push(block[0]);
        if same(&block[1..], &fwd) {
            s.forward_runs += 1;
        } else if same(&block[1..], &adj) {
            s.adjoint_runs += 1;
        } else {
            return None;
        }
    }
    Some(s)
}

/// `n = max(0, ⌈log_{l+1}(Δ⁻² ln(1/ε))⌉)`. The logarithm inside is natural.
pub fn sign_iterations(delta: f64, epsilon: f64, l: usize) -> usize {
    if epsilon >= 1.0 {
        return 0;
    }
    let target = (1.0 / epsilon).ln() / (delta * delta);
    if target <= 1.0 {
        return 0;
    }
    (target.ln() / ((l + 1) as f64).ln()).ceil().max(0.0) as usize
}

/// `(1 − Δ²)^{(l+1)^n}`.
pub fn error_bound(delta: f64, l: usize, n: usize) -> f64 {
    (1.0 - delta * delta).powf(((l + 1) as f64).powi(n as i32))
}

/// `(2l+1)^n` exactly.
pub fn query_count(n: usize, l: usize) -> Result<u128> {
    u32::try_from(n)
        .ok()
        .and_then(|e| (2 * l as u128 + 1).checked_pow(e))
        .ok_or_else(|| Error::BigCount(format!("(2·{l}+1)^{n} overflows 128 bits")))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexityEstimate {
    /// `(2l+1)·(Δ⁻² ln(1/ε))^{log_{l+1}(2l+1)}`.
    pub bound: f64,
    /// `log_{l+1}(2l+1)`.
    pub exponent: f64,
    /// `exponent − 1`.
    pub nu: f64,
}

pub fn complexity_estimate(delta: f64, epsilon: f64, l: usize) -> ComplexityEstimate {
    let exponent = ((2 * l + 1) as f64).ln() / ((l + 1) as f64).ln();
    let base = (1.0 / epsilon).ln() / (delta * delta);
    ComplexityEstimate { bound: (2 * l + 1) as f64 * base.powf(exponent), exponent, nu: exponent - 1.0 }
}

/// `log(2l+1)/log(l+1) − 1`.
pub fn nu(l: usize) -> f64 {
    ((2 * l + 1) as f64).ln() / ((l + 1) as f64).ln() - 1.0
}

/// `2^k · c^{k²} · q` as an exact integer; an order-of-magnitude estimate.
pub fn recovery_cost(k: u32, c_phi: u64, q: u64) -> Result<u128> {
    if k == 0 {
        return Err(Error::Input("recovery order k must be at least 1".into()));
    }
    let overflow = || Error::BigCount(format!("2^{k}·{c_phi}^({k}²)·{q} overflows 128 bits"));
    let two_k = 2u128.checked_pow(k).ok_or_else(overflow)?;
    let c_pow = k.checked_mul(k).and_then(|kk| (c_phi as u128).checked_pow(kk)).ok_or_else(overflow)?;
    two_k.checked_mul(c_pow).and_then(|v| v.checked_mul(q as u128)).ok_or_else(overflow)
}

/// `φᵢ → φᵢ(1 + δ)` on the raw angles.
pub fn coherent_perturb(phases: &ReflectionPhases, delta: f64) -> ReflectionPhases {
    ReflectionPhases::new(phases.angles().iter().map(|a| a * (1.0 + delta)).collect()).expect("finite scaling")
}

/// `x ← p_l(x)`, `n` times.
pub fn scalar_sign_iterate(x0: f64, l: usize, n: usize) -> Result<f64> {
    if !(x0.abs() <= 1.0) {
        return Err(Error::Domain(format!("x0 = {x0} lies outside [-1, 1]")));
    }
    let p = pade(l);
    Ok((0..n).fold(x0, |x, _| p.eval_real(x).re))
}

/// Upper-left QSP response of `phases` at every point.
pub fn scalar_response(exec: Execution, phases: &ReflectionPhases, points: &[f64]) -> Result<Vec<Complex64>> {
    par::map(exec, points, |&x| reflection_response(phases.angles(), x)).into_iter().collect()
}

/// How the r-QET sign iteration is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    /// `n` nested dense QET steps on the block-encoding.
    #[default]
    Recursive,
    /// One dense QET with the composed phase list; `n ≤ 4`.
    Flattened,
    /// Composed phase list evaluated pointwise at the eigenvalues.
    Scalar,
}

impl SignMode {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Recursive => "recursive",
            Self::Flattened => "flattened",
            Self::Scalar => "scalar",
        }
    }
}

impl fmt::Display for SignMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SignMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "recursive" => Ok(Self::Recursive),
            "flattened" => Ok(Self::Flattened),
            "scalar" => Ok(Self::Scalar),
            _ => Err(Error::Input(format!("unknown mode '{s}' (expected recursive, flattened or scalar)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignConfig {
    pub delta: f64,
    pub epsilon: f64,
    pub l: usize,
    pub mode: SignMode,
    /// Overrides the iteration count from [`sign_iterations`].
    pub iterations: Option<usize>,
    pub exec: Execution,
}

impl SignConfig {
    pub fn new(delta: f64, epsilon: f64) -> Self {
        Self { delta, epsilon, l: 2, mode: SignMode::Recursive, iterations: None, exec: Execution::default() }
    }

    pub fn with_mode(self, mode: SignMode) -> Self {
        Self { mode, ..self }
    }

    pub fn with_iterations(self, n: usize) -> Self {
        Self { iterations: Some(n), ..self }
    }

    pub fn with_l(self, l: usize) -> Self {
        Self { l, ..self }
    }

    pub fn with_exec(self, exec: Execution) -> Self {
        Self { exec, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Input(format!("gap must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::Input(format!("epsilon must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.l == 0 || !self.l.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "p_{} is not QET-realizable: odd members violate |p(x)| >= 1 for |x| >= 1",
                self.l
            )));
        }
        Ok(())
    }

    pub fn iteration_count(&self) -> usize {
        self.iterations.unwrap_or_else(|| sign_iterations(self.delta, self.epsilon, self.l))
    }
}

/// One recorded iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRow {
    pub n: usize,
    pub error: f64,
    pub bound: f64,
    pub queries: u128,
    pub distinct_angles: Option<usize>,
    pub wall_time_ms: f64,
}

impl IterationRow {
    pub fn roundoff_slack(&self) -> f64 {
        ROUNDOFF_FLOOR + ROUNDOFF_PER_QUERY * self.queries as f64
    }

    /// `error ≤ bound` up to [`roundoff_slack`](Self::roundoff_slack).
    pub fn within_bound(&self) -> bool {
        self.error <= self.bound + self.roundoff_slack()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub rows: Vec<IterationRow>,
    pub epsilon: f64,
    /// Factor the input was divided by before encoding (1 when not normalized).
    pub normalization: f64,
}

impl IterationReport {
    pub fn final_error(&self) -> f64 {
        self.rows.last().map_or(f64::INFINITY, |r| r.error)
    }

    pub fn converged(&self) -> bool {
        self.final_error() <= self.epsilon
    }
}

/// Result of [`run_sign`] besides its report.
#[derive(Debug, Clone, PartialEq)]
pub enum SignOutput {
    Encoding(BlockEncoding),
    Scalar { points: Vec<f64>, values: Vec<Complex64> },
}

/// Eigendecomposition of `a` after checking its spectrum lies in `±[Δ, 1]`.
pub fn gapped_spectrum_of(a: &ComplexMatrix, delta: f64) -> Result<Spectrum> {
    let spec = hermitian_eig(a)?;
    let too_big: Vec<f64> = spec.eigenvalues.iter().copied().filter(|l| l.abs() > 1.0 + GAP_SLACK).collect();
    if let Some(norm) = too_big.iter().map(|l| l.abs()).reduce(f64::max) {
        return Err(Error::NormTooLarge { norm });
    }
    let offending: Vec<f64> = spec.eigenvalues.iter().copied().filter(|l| l.abs() < delta - GAP_SLACK).collect();
    if !offending.is_empty() {
        return Err(Error::GapViolation { gap: delta, offending });
    }
    Ok(spec)
}

fn distinct_count(flat: Option<&ReflectionPhases>) -> Option<usize> {
    flat.map(|p| distinct_angles(p).len())
}

/// Drive `X_{n+1} = p_l(X_n)` from `X₀ = A` toward `sign(A)`.
///
/// Rows are recorded for `n = 1..N` with `N` from the configuration, unless
/// `A` already equals its sign to within `ε`, which is reported as a single
/// `n = 0` row.
pub fn run_sign(a: &ComplexMatrix, cfg: &SignConfig) -> Result<(SignOutput, IterationReport)> {
    cfg.validate()?;
    let spec = gapped_spectrum_of(a, cfg.delta)?;
    let n_total = cfg.iteration_count();
    if cfg.mode == SignMode::Flattened && n_total > MAX_FLATTENED_LEVEL {
        return Err(Error::Input(format!(
            "flattened mode is limited to n <= {MAX_FLATTENED_LEVEL} (requested {n_total}); use scalar mode"
        )));
    }
    let target = spec.map(f64::signum);
    let lambdas = spec.eigenvalues.clone();
    let start = Instant::now();
    let err0 = lambdas.iter().map(|&l| (l - l.signum()).abs()).fold(0.0, f64::max);
    let mut report = IterationReport { rows: Vec::new(), epsilon: cfg.epsilon, normalization: 1.0 };
    let row0 = |elapsed: f64| IterationRow {
        n: 0,
        error: err0,
        bound: error_bound(cfg.delta, cfg.l, 0),
        queries: 1,
        distinct_angles: Some(0),
        wall_time_ms: elapsed,
    };

    if err0 <= cfg.epsilon || n_total == 0 {
        let be = dilate_hermitian(a)?;
        report.rows.push(row0(start.elapsed().as_secs_f64() * 1e3));
        let out = match cfg.mode {
            SignMode::Scalar => SignOutput::Scalar { values: lambdas.iter().map(|&x| Complex64::new(x, 0.0)).collect(), points: lambdas },
            _ => SignOutput::Encoding(be),
        };
        return Ok((out, report));
    }

    let base = pade_phases(cfg.l)?;
    let be0 = dilate_hermitian(a)?;
    let mut be = be0.clone();
    let mut flat = Some(ReflectionPhases::new(vec![0.0])?);
    let mut scalar_values = Vec::new();
    for n in 1..=n_total {
        let t = Instant::now();
        flat = match flat {
            Some(prev) if (prev.degree() as u128) * (base.degree() as u128) <= MAX_EXPLICIT_PHASES as u128 => {
                Some(compose_phases(&prev, &base)?)
            }
            _ => None,
        };
        let error = match cfg.mode {
            SignMode::Recursive => {
                be = qet_recursive_step(&be, &base);
                operator_norm(&(&extract(&be) - &target))
            }
            SignMode::Flattened => {
                be = qet_assemble_with(cfg.exec, &be0, flat.as_ref().expect("n <= 4 keeps the list explicit"));
                operator_norm(&(&extract(&be) - &target))
            }
            SignMode::Scalar => {
                let phases = flat.as_ref().ok_or_else(|| {
                    Error::BigCount(format!("level {n} needs more than {MAX_EXPLICIT_PHASES} explicit phases"))
                })?;
                scalar_values = scalar_response(cfg.exec, phases, &lambdas)?;
                scalar_values.iter().zip(&lambdas).map(|(v, l)| (v - l.signum()).norm()).fold(0.0, f64::max)
            }
        };
        report.rows.push(IterationRow {
            n,
            error,
            bound: error_bound(cfg.delta, cfg.l, n),
            queries: query_count(n, cfg.l)?,
            distinct_angles: distinct_count(flat.as_ref()),
            wall_time_ms: t.elapsed().as_secs_f64() * 1e3,
        });
    }
    let out = match cfg.mode {
        SignMode::Scalar => SignOutput::Scalar { points: lambdas, values: scalar_values },
        _ => SignOutput::Encoding(be),
    };
    Ok((out, report))
}

/// One point of a coherent-error sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbRow {
    pub delta: f64,
    /// Distance of the perturbed block from `sign(A)`.
    pub error: f64,
    /// Distance of the perturbed block from the unperturbed one.
    pub deviation: f64,
}

/// `levels` r-QET levels of `base` on `A` with every angle scaled by `1 + δ`,
/// for each `δ`. Rows keep the order of `deltas`.
pub fn perturb_sweep(
    exec: Execution,
    a: &ComplexMatrix,
    base: &ReflectionPhases,
    levels: usize,
    deltas: &[f64],
) -> Result<Vec<PerturbRow>> {
    let spec = hermitian_eig(a)?;
    if spec.eigenvalues.iter().any(|l| l.abs() <= crate::tol::CONSTRUCTION) {
        return Err(Error::Domain("sign(A) is undefined: A has a zero eigenvalue".into()));
    }
    let target = spec.map(f64::signum);
    let be0 = dilate_hermitian(a)?;
    let run = |phases: &ReflectionPhases| (0..levels).fold(be0.clone(), |be, _| qet_recursive_step(&be, phases));
    let clean = extract(&run(base));
    let rows = par::map(exec, deltas, |&d| {
        let block = extract(&run(&coherent_perturb(base, d)));
        PerturbRow {
            delta: d,
            error: operator_norm(&(&block - &target)),
            deviation: operator_norm(&(&block - &clean)),
        }
    });
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matrix_function_hermitian, sign_oracle};
    use crate::poly::ComplexPolynomial;
    use crate::qsp::{chebyshev_phases, pade2_phases};
    use crate::random::{random_gapped_hermitian, random_hermitian, seeded_rng};

    fn diag(v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real_diag(v)
    }

    fn rp(v: Vec<f64>) -> ReflectionPhases {
        ReflectionPhases::new(v).unwrap()
    }

    #[test]
    fn templates() {
        use OracleUse::*;
        assert_eq!(oracle_template(1), vec![Forward]);
        assert_eq!(oracle_template(3), vec![Forward, Adjoint, Forward]);
        assert_eq!(oracle_template(4), vec![Adjoint, Forward, Adjoint, Forward]);
        let plan = QetPlan::new(pade2_phases());
        assert_eq!(plan.query_count, 5);
    }

    #[test]
    fn zero_phase_is_identity_step() {
        let be = dilate_hermitian(&diag(&[0.3, -0.6])).unwrap();
        let out = qet_assemble(&be, &rp(vec![0.0]));
        assert_eq!(out.unitary, be.unitary);
    }

    #[test]
    fn chebyshev_product_order() {
        let be = dilate_hermitian(&diag(&[0.4])).unwrap();
        let out = extract(&qet_assemble(&be, &chebyshev_phases(3).unwrap()));
        assert!((out[(0, 0)] - Complex64::new(-0.944, 0.0)).norm() < 1e-14);
        let mut rng = seeded_rng(11);
        for q in 2..=7 {
            let h = random_hermitian(&mut rng, 4);
            let a = h.scale_real(0.95 / operator_norm(&h));
            let t = ComplexPolynomial::chebyshev(q);
            let want = matrix_function_hermitian(&a, |x| t.eval_real(x).re).unwrap();
            let got = extract(&qet_assemble(&dilate_hermitian(&a).unwrap(), &chebyshev_phases(q).unwrap()));
            assert!(operator_norm(&(&got - &want)) <= 1e-10, "T_{q}");
        }
    }

    #[test]
    fn one_step_on_half() {
        let be = dilate_hermitian(&diag(&[0.5])).unwrap();
        let x1 = extract(&qet_recursive_step(&be, &pade2_phases()));
        assert!((x1[(0, 0)] - Complex64::new(0.79296875, 0.0)).norm() <= 1e-12);
    }

    #[test]
    fn p2_qet_matches_oracle() {
        let mut rng = seeded_rng(2);
        let a = random_gapped_hermitian(&mut rng, 6, 0.2);
        let p = pade(2);
        let want = matrix_function_hermitian(&a, |x| p.eval_real(x).re).unwrap();
        let got = extract(&qet_assemble(&dilate_hermitian(&a).unwrap(), &pade2_phases()));
        assert!(operator_norm(&(&got - &want)) <= 1e-9);
    }

    #[test]
    fn composition_identities() {
        let base = pade2_phases();
        let id = rp(vec![0.0]);
        assert!(compose_phases(&base, &id).unwrap().equivalent_to(&base, 1e-15));
        assert!(compose_phases(&id, &base).unwrap().equivalent_to(&base, 1e-15));
        assert_eq!(compose_phases(&base, &base).unwrap().degree(), 25);
    }

    #[test]
    fn composition_equals_nesting_for_mixed_parities() {
        let mut rng = seeded_rng(5);
        let a = random_gapped_hermitian(&mut rng, 4, 0.1);
        let be = dilate_hermitian(&a).unwrap();
        let sets = [rp(vec![0.3, -1.1, 0.7]), rp(vec![0.2, 1.4]), rp(vec![-0.5, 0.9, 2.1, -0.3]), pade2_phases()];
        for outer in &sets {
            for inner in &sets {
                let nested = qet_assemble(&qet_assemble(&be, inner), outer);
                let flat = qet_assemble(&be, &compose_phases(outer, inner).unwrap());
                assert!(nested.unitary.max_abs_diff(&flat.unitary) <= 1e-12);
            }
        }
    }

    #[test]
    fn distinct_angles_and_runs() {
        let base = pade2_phases();
        for n in 2..=4 {
            let flat = flattened_phases(&base, n).unwrap();
            assert_eq!(flat.degree(), 5usize.pow(n as u32));
            let d = distinct_angles(&flat);
            assert!(d.len() <= 8, "n={n}: {d:?}");
            let allowed: Vec<f64> = base.angles()[1..].iter().flat_map(|&a| [a, -a]).collect();
            assert!(d.iter().all(|x| allowed.iter().any(|y| angle_distance(*x, *y, 2.0 * PI) <= ANGLE_TOL)));
            let runs = run_structure(&flat, &base).unwrap();
            assert_eq!(runs.forward_runs + runs.adjoint_runs, 5usize.pow(n as u32 - 1));
        }
    }

    #[test]
    fn distinct_wraps_around_pi() {
        let p = rp(vec![PI, -PI + 1e-12, 0.0, 1e-13, 0.5]);
        assert_eq!(distinct_angles(&p), vec![0.5, PI]);
    }

    #[test]
    fn iteration_counts() {
        assert_eq!(sign_iterations(0.1, 1e-10, 2), 8);
        assert_eq!(sign_iterations(0.5, 1e-8, 2), 4);
        assert_eq!(sign_iterations(0.5, 1.0, 2), 0);
        assert_eq!(sign_iterations(0.5, 2.0, 4), 0);
        assert_eq!(query_count(0, 2).unwrap(), 1);
        assert_eq!(query_count(3, 2).unwrap(), 125);
        assert_eq!(query_count(8, 2).unwrap(), 390_625);
        assert!(matches!(query_count(200, 2), Err(Error::BigCount(_))));
        assert!((error_bound(0.5, 2, 3) - 0.75f64.powi(27)).abs() < 1e-18);
    }

    #[test]
    fn complexity_numbers() {
        let c = complexity_estimate(0.1, 1e-10, 2);
        assert!((c.exponent - 5f64.ln() / 3f64.ln()).abs() < 1e-15);
        assert!((c.exponent - 1.465).abs() < 1e-3);
        assert!((nu(2) - 0.46497).abs() < 1e-5);
        for l in (2..64).step_by(2) {
            assert!(nu(l + 2) < nu(l) && nu(l + 2) > 0.0);
        }
    }

    #[test]
    fn recovery_costs() {
        assert_eq!(recovery_cost(1, 8, 125).unwrap(), 2000);
        assert_eq!(recovery_cost(2, 8, 1).unwrap(), 16384);
        assert_eq!(recovery_cost(5, 1, 7).unwrap(), 32 * 7);
        assert!(recovery_cost(0, 8, 1).is_err());
        assert!(matches!(recovery_cost(9, 1000, 1), Err(Error::BigCount(_))));
    }

    #[test]
    fn perturbation_basics() {
        let base = pade2_phases();
        assert_eq!(coherent_perturb(&base, 0.0), base);
        assert!(coherent_perturb(&base, -1.0).angles().iter().all(|&a| a == 0.0));
        let unscaled = rp(vec![3.5]);
        assert_eq!(coherent_perturb(&unscaled, 1.0).angles(), &[7.0]);
    }

    #[test]
    fn perturbation_is_first_order() {
        let rows = perturb_sweep(Execution::Sequential, &diag(&[0.5]), &pade2_phases(), 1, &[0.0, 1e-3, 5e-4]).unwrap();
        assert_eq!(rows[0].deviation, 0.0);
        let ratio = rows[1].deviation / rows[2].deviation;
        assert!(rows[1].deviation > 0.0 && (1.8..=2.2).contains(&ratio), "{ratio}");
    }

    #[test]
    fn scalar_iterates() {
        assert_eq!(scalar_sign_iterate(0.5, 2, 1).unwrap(), 0.79296875);
        assert!((scalar_sign_iterate(0.3, 2, 1).unwrap() - 0.52966125).abs() < 1e-15);
        for n in 0..5 {
            assert_eq!(scalar_sign_iterate(1.0, 2, n).unwrap(), 1.0);
            assert_eq!(scalar_sign_iterate(-1.0, 4, n).unwrap(), -1.0);
        }
        assert!(scalar_sign_iterate(1.5, 2, 1).is_err());
    }

    #[test]
    fn sign_run_fixed_point() {
        let (_, rep) = run_sign(&diag(&[1.0, -1.0]), &SignConfig::new(0.5, 1e-8)).unwrap();
        assert_eq!(rep.rows.len(), 1);
        assert_eq!(rep.rows[0].n, 0);
        assert_eq!(rep.rows[0].error, 0.0);
    }

    #[test]
    fn sign_run_diag_bound() {
        let a = diag(&[0.5, -0.7, 0.9, -0.6]);
        for mode in [SignMode::Recursive, SignMode::Flattened, SignMode::Scalar] {
            let cfg = SignConfig::new(0.5, 1e-3).with_iterations(3).with_mode(mode);
            let (_, rep) = run_sign(&a, &cfg).unwrap();
            assert_eq!(rep.rows.len(), 3);
            let last = rep.rows.last().unwrap();
            assert!(last.error <= 4.233e-4 && last.error <= last.bound, "{mode}: {last:?}");
            for w in rep.rows.windows(2) {
                assert!(w[1].error <= w[0].error);
            }
            assert!(rep.rows.iter().all(IterationRow::within_bound));
        }
    }

    #[test]
    fn eigenvalues_follow_scalar_iteration() {
        let mut rng = seeded_rng(21);
        let a = random_gapped_hermitian(&mut rng, 4, 0.3);
        let spec = hermitian_eig(&a).unwrap();
        let mut be = dilate_hermitian(&a).unwrap();
        for n in 1..=3 {
            be = qet_recursive_step(&be, &pade2_phases());
            let x = extract(&be);
            let got = hermitian_eig_loose(&x);
            let mut want: Vec<f64> =
                spec.eigenvalues.iter().map(|&l| scalar_sign_iterate(l, 2, n).unwrap()).collect();
            want.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() <= 1e-10);
            }
        }
    }

    fn hermitian_eig_loose(x: &ComplexMatrix) -> Vec<f64> {
        crate::linalg::hermitian_eig_with_tol(&x.hermitian_part(), 1e-9).unwrap().eigenvalues
    }

    #[test]
    fn gap_violation_lists_eigenvalues() {
        let err = run_sign(&diag(&[0.2, 0.9]), &SignConfig::new(0.5, 1e-3)).unwrap_err();
        match err {
            Error::GapViolation { offending, .. } => assert_eq!(offending, vec![0.2]),
            e => panic!("{e:?}"),
        }
        assert!(matches!(
            run_sign(&diag(&[0.6]), &SignConfig::new(0.5, 1e-3).with_l(3)),
            Err(Error::Domain(_))
        ));
        let deep = SignConfig::new(0.1, 1e-10).with_mode(SignMode::Flattened);
        assert!(matches!(run_sign(&diag(&[0.6]), &deep), Err(Error::Input(_))));
    }

    #[test]
    fn sign_result_matches_oracle() {
        let mut rng = seeded_rng(8);
        let a = random_gapped_hermitian(&mut rng, 8, 0.5);
        let (out, rep) = run_sign(&a, &SignConfig::new(0.5, 1e-8)).unwrap();
        assert_eq!(rep.rows.len(), 4);
        assert!(rep.converged());
        let SignOutput::Encoding(be) = out else { panic!() };
        assert!(operator_norm(&(&extract(&be) - &sign_oracle(&a).unwrap())) <= 1e-8);
    }
}
