//! Centralized tolerances.

/// Exact-by-construction checks (dilations, projectors, parity).
pub const CONSTRUCTION: f64 = 1e-12;
/// Residuals of decompositions (eigen, polar).
pub const DECOMPOSITION: f64 = 1e-10;
/// Default comparison tolerance for oracle checks.
pub const COMPARISON: f64 = 1e-9;
/// Coefficients below this magnitude are treated as zero when trimming.
pub const TRIM: f64 = 1e-14;

/// Environment variable overriding [`COMPARISON`].
pub const TOL_ENV: &str = "RQET_TOL";

/// Comparison tolerance, honoring `RQET_TOL` when it parses to a positive
/// finite number.
pub fn comparison() -> f64 {
    std::env::var(TOL_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(COMPARISON)
}
