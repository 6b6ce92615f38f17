//! JSON file formats and the CSV report layout.
//!
//! Complex numbers are `[re, im]` pairs throughout. CSV floats use 17
//! significant digits so that every value round-trips exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::blockenc::BlockEncoding;
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::poly::{ComplexPolynomial, Parity};
use crate::qsp::{ReflectionPhases, RotationPhases};
use crate::rqet::{IterationRow, PerturbRow};

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("invalid {what} JSON: {e}")))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn check_finite(values: &[Complex64], what: &str) -> Result<()> {
    if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Input(format!("{what} contains NaN or infinite entries")));
    }
    Ok(())
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::Input(format!("cannot write {}: {e}", path.display())))
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// `{"rows": n, "cols": m, "entries": [[re, im], ...]}`, row-major.
pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let f: MatrixFile = parse_json(text, "matrix")?;
    check_finite(&f.entries, "matrix")?;
    ComplexMatrix::new(f.rows, f.cols, f.entries)
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    to_json(&MatrixFile { rows: m.rows(), cols: m.cols(), entries: m.entries().to_vec() })
}

#[derive(Serialize, Deserialize)]
struct PolynomialFile {
    coeffs: Vec<Complex64>,
    parity: Parity,
}

/// `{"coeffs": [[re, im], ...], "parity": "odd" | "even" | "none"}`.
pub fn parse_polynomial(text: &str) -> Result<ComplexPolynomial> {
    let f: PolynomialFile = parse_json(text, "polynomial")?;
    check_finite(&f.coeffs, "polynomial")?;
    ComplexPolynomial::new(f.coeffs, f.parity)
}

pub fn polynomial_to_json(p: &ComplexPolynomial) -> String {
    to_json(&PolynomialFile { coeffs: p.coeffs().to_vec(), parity: p.parity() })
}

/// Phase lists as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", content = "angles", rename_all = "lowercase")]
pub enum PhaseFile {
    Rotation(Vec<f64>),
    Reflection(Vec<f64>),
}

impl From<&ReflectionPhases> for PhaseFile {
    fn from(p: &ReflectionPhases) -> Self {
        Self::Reflection(p.angles().to_vec())
    }
}

impl From<&RotationPhases> for PhaseFile {
    fn from(p: &RotationPhases) -> Self {
        Self::Rotation(p.angles().to_vec())
    }
}

/// `{"form": "rotation" | "reflection", "angles": [...]}`.
pub fn parse_phases(text: &str) -> Result<PhaseFile> {
    let f: PhaseFile = parse_json(text, "phase")?;
    match &f {
        PhaseFile::Rotation(a) => RotationPhases::new(a.clone()).map(|_| ())?,
        PhaseFile::Reflection(a) => ReflectionPhases::new(a.clone()).map(|_| ())?,
    }
    Ok(f)
}

pub fn phases_to_json(p: &PhaseFile) -> String {
    to_json(p)
}

#[derive(Serialize, Deserialize)]
struct BlockEncodingFile {
    unitary: MatrixFile,
    system_dim: usize,
    ancilla_dim: usize,
    reference_index: usize,
    alpha: f64,
}

pub fn block_encoding_to_json(be: &BlockEncoding) -> String {
    let u = &be.unitary;
    to_json(&BlockEncodingFile {
        unitary: MatrixFile { rows: u.rows(), cols: u.cols(), entries: u.entries().to_vec() },
        system_dim: be.system_dim,
        ancilla_dim: be.ancilla_dim,
        reference_index: be.reference_index,
        alpha: be.alpha,
    })
}

pub fn parse_block_encoding(text: &str) -> Result<BlockEncoding> {
    let f: BlockEncodingFile = parse_json(text, "block-encoding")?;
    check_finite(&f.unitary.entries, "block-encoding")?;
    if !(f.alpha.is_finite() && f.alpha > 0.0) {
        return Err(Error::Input(format!("alpha must be positive, got {}", f.alpha)));
    }
    let u = ComplexMatrix::new(f.unitary.rows, f.unitary.cols, f.unitary.entries)?;
    let mut be = BlockEncoding::new(u, f.system_dim, f.ancilla_dim, f.reference_index)?;
    be.alpha = f.alpha;
    Ok(be)
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const REPORT_HEADER: &str = "n,error,bound,queries,distinct_angles,wall_time_ms";
pub const PERTURB_HEADER: &str = "delta,error,deviation";

/// Report rows as CSV; an unknown distinct-angle count is an empty field.
pub fn report_csv(rows: &[IterationRow]) -> String {
    let mut s = String::from(REPORT_HEADER);
    s.push('\n');
    for r in rows {
        let distinct = r.distinct_angles.map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            r.n,
            fmt_f64(r.error),
            fmt_f64(r.bound),
            r.queries,
            distinct,
            fmt_f64(r.wall_time_ms)
        );
    }
    s
}

fn csv_body<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == header => {}
        other => return Err(Error::Input(format!("expected CSV header '{header}', got {other:?}"))),
    }
    let width = header.split(',').count();
    let rows: Vec<(usize, Vec<&str>)> =
        lines.enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| (i + 2, l.split(',').collect())).collect();
    if let Some((line, f)) = rows.iter().find(|(_, f)| f.len() != width) {
        return Err(Error::Input(format!("line {line}: expected {width} fields, got {}", f.len())));
    }
    Ok(rows.into_iter())
}

fn field<T: std::str::FromStr>(s: &str, line: usize, name: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Input(format!("line {line}: cannot parse {name} from '{s}'")))
}

pub fn parse_report_csv(text: &str) -> Result<Vec<IterationRow>> {
    csv_body(text, REPORT_HEADER)?
        .map(|(line, f)| {
            Ok(IterationRow {
                n: field(f[0], line, "n")?,
                error: field(f[1], line, "error")?,
                bound: field(f[2], line, "bound")?,
                queries: field(f[3], line, "queries")?,
                distinct_angles: if f[4].trim().is_empty() { None } else { Some(field(f[4], line, "distinct_angles")?) },
                wall_time_ms: field(f[5], line, "wall_time_ms")?,
            })
        })
        .collect()
}

pub fn perturb_csv(rows: &[PerturbRow]) -> String {
    let mut s = String::from(PERTURB_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(s, "{},{},{}", fmt_f64(r.delta), fmt_f64(r.error), fmt_f64(r.deviation));
    }
    s
}

pub fn parse_perturb_csv(text: &str) -> Result<Vec<PerturbRow>> {
    csv_body(text, PERTURB_HEADER)?
        .map(|(line, f)| {
            Ok(PerturbRow {
                delta: field(f[0], line, "delta")?,
                error: field(f[1], line, "error")?,
                deviation: field(f[2], line, "deviation")?,
            })
        })
        .collect()
}
