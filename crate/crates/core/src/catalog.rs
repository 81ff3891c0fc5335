//! Table of denominator polynomials for the 48 hyperbolic algebras, the
//! reference series for `H48`, and per-entry verification.
//!
//! Only `H48` ships with a Cartan matrix. Matrices for other entries come in
//! through an override file, one JSON record per line:
//!
//! ```text
//! {"id": 1, "name": "H1", "rank": 3, "cartan": [[2,-1,0],[-1,2,-1],[0,-4,2]]}
//! ```
//!
//! A single algebra file (used by `--file` on the command line) is one JSON
//! object with the same `name`, `rank`, `cartan` and optional `labels`.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::cartan::{classify, h48_cartan, validate_gcm, CartanMatrix};
use crate::factorization::{fit_denominator, FactorError, RationalFunction};
use crate::polyseries::{FiniteType, IntPoly, TruncSeries};
use crate::weylgrowth::{growth_series, GrowthError, GrowthOptions};

pub const Q_TABLE: &str = include_str!("../data/q_table.txt");
pub const Q_TABLE_SHA256: &str = include_str!("../data/q_table.sha256");

pub const ENTRY_COUNT: u32 = 48;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("line {line}: field `{field}`: {message}")]
    Schema {
        line: usize,
        field: String,
        message: String,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("built-in table checksum mismatch")]
    Checksum,
}

fn schema(line: usize, field: &str, message: impl Into<String>) -> CatalogError {
    CatalogError::Schema {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixSource {
    BuiltIn,
    UserFile,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: u32,
    pub name: String,
    pub cartan: Option<CartanMatrix>,
    pub matrix_source: Option<MatrixSource>,
    pub finite_type: FiniteType,
    pub q_table: IntPoly,
    pub alias_of: Option<u32>,
}

/// One record of an algebra or override file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraRecord {
    #[serde(default)]
    pub id: Option<u32>,
    pub name: String,
    pub rank: usize,
    pub cartan: Vec<Vec<i64>>,
    #[serde(default)]
    pub labels: Option<Vec<String>>,
    /// Free-text provenance, e.g. where the matrix was transcribed from.
    #[serde(default)]
    pub source: Option<String>,
}

impl AlgebraRecord {
    fn to_matrix(&self, line: usize) -> Result<CartanMatrix, CatalogError> {
        if self.rank != self.cartan.len() {
            return Err(schema(
                line,
                "rank",
                format!(
                    "rank {} but cartan has {} rows",
                    self.rank,
                    self.cartan.len()
                ),
            ));
        }
        let m =
            validate_gcm(self.cartan.clone()).map_err(|e| schema(line, "cartan", e.to_string()))?;
        match &self.labels {
            Some(l) => m
                .with_labels(l.clone())
                .map_err(|e| schema(line, "labels", e.to_string())),
            None => Ok(m),
        }
    }
}

/// Reads a single-algebra JSON file.
pub fn load_algebra_file(path: &Path) -> Result<(String, CartanMatrix), CatalogError> {
    let text = read(path)?;
    parse_algebra(&text)
}

pub fn parse_algebra(text: &str) -> Result<(String, CartanMatrix), CatalogError> {
    let rec: AlgebraRecord = serde_json::from_str(text).map_err(|e| json_error(e, 0))?;
    let m = rec.to_matrix(1)?;
    Ok((rec.name, m))
}

fn json_error(e: serde_json::Error, line_offset: usize) -> CatalogError {
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .map(str::to_string)
        .unwrap_or_else(|| "record".to_string());
    schema(line_offset + e.line(), &field, msg)
}

fn read(path: &Path) -> Result<String, CatalogError> {
    fs::read_to_string(path).map_err(|e| CatalogError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Checks the shipped table against its recorded SHA-256.
pub fn table_checksum_ok() -> bool {
    let digest = Sha256::digest(Q_TABLE.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    hex == Q_TABLE_SHA256.trim()
}

fn parse_table(text: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let mut parts = raw.split_whitespace();
        let (Some(id), Some(ty), Some(body), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(schema(line, "record", "expected `id type coefficients`"));
        };
        let id: u32 = id
            .parse()
            .map_err(|_| schema(line, "id", "not an integer"))?;
        if id as usize != entries.len() + 1 {
            return Err(schema(
                line,
                "id",
                format!("expected id {}", entries.len() + 1),
            ));
        }
        let finite_type: FiniteType = ty
            .parse()
            .map_err(|e: crate::polyseries::PolyError| schema(line, "type", e.to_string()))?;
        let (q_table, alias_of) = match body.strip_prefix('=') {
            Some(target) => {
                let t: u32 = target
                    .parse()
                    .map_err(|_| schema(line, "alias", "not an integer"))?;
                let Some(prev) = entries.iter().find(|e| e.id == t) else {
                    return Err(schema(
                        line,
                        "alias",
                        format!("alias target {t} does not precede {id}"),
                    ));
                };
                if prev.finite_type != finite_type {
                    return Err(schema(
                        line,
                        "alias",
                        "alias target has a different finite type",
                    ));
                }
                (prev.q_table.clone(), Some(t))
            }
            None => (
                body.parse::<IntPoly>()
                    .map_err(|e| schema(line, "q", e.to_string()))?,
                None,
            ),
        };
        if q_table.coeff(0) != 1.into() {
            return Err(schema(line, "q", "constant term must be 1"));
        }
        entries.push(CatalogEntry {
            id,
            name: format!("H{id}"),
            cartan: None,
            matrix_source: None,
            finite_type,
            q_table,
            alias_of,
        });
    }
    if entries.len() != ENTRY_COUNT as usize {
        return Err(schema(
            0,
            "record",
            format!("{} entries, expected {ENTRY_COUNT}", entries.len()),
        ));
    }
    Ok(entries)
}

/// The built-in catalog, optionally overlaid with matrices from a JSON-lines
/// override file.
pub fn load_catalog(overrides: Option<&Path>) -> Result<Vec<CatalogEntry>, CatalogError> {
    let text = match overrides {
        Some(p) => Some(read(p)?),
        None => None,
    };
    load_catalog_with(text.as_deref())
}

pub fn load_catalog_with(overrides: Option<&str>) -> Result<Vec<CatalogEntry>, CatalogError> {
    if !table_checksum_ok() {
        return Err(CatalogError::Checksum);
    }
    let mut entries = parse_table(Q_TABLE)?;
    let h48 = &mut entries[47];
    h48.cartan = Some(h48_cartan());
    h48.matrix_source = Some(MatrixSource::BuiltIn);

    if let Some(text) = overrides {
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            if raw.trim().is_empty() || raw.trim_start().starts_with("//") {
                continue;
            }
            let rec: AlgebraRecord = serde_json::from_str(raw).map_err(|e| json_error(e, k))?;
            let id = rec.id.ok_or_else(|| schema(line, "id", "missing"))?;
            if !(1..=ENTRY_COUNT).contains(&id) {
                return Err(schema(
                    line,
                    "id",
                    format!("{id} outside 1..={ENTRY_COUNT}"),
                ));
            }
            let m = rec.to_matrix(line)?;
            let hyperbolic = classify(&m).map(|c| c.hyperbolic).unwrap_or(false);
            if !hyperbolic {
                return Err(schema(line, "cartan", "matrix is not hyperbolic"));
            }
            let e = &mut entries[id as usize - 1];
            e.cartan = Some(m);
            e.matrix_source = Some(MatrixSource::UserFile);
        }
    }
    Ok(entries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Verified,
    MatrixUnavailable,
    Mismatch,
}

/// Outcome of checking one catalog entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub id: u32,
    pub name: String,
    pub status: Status,
    pub reason: Option<String>,
    pub finite_type: FiniteType,
    pub positive_roots: usize,
    pub depth: usize,
    pub guard: usize,
    pub q_table: IntPoly,
    pub computed_q: Option<IntPoly>,
    pub observed_degree: Option<usize>,
    pub elapsed_ms: u64,
}

/// Default depth: `D + guard` for the entry's finite type.
pub fn default_depth(e: &CatalogEntry, guard: usize) -> usize {
    e.finite_type.positive_root_count() + guard
}

/// Enumerates the entry's growth series to `depth`, fits `Q` against the
/// entry's finite type and compares with the tabulated polynomial.
pub fn verify_entry(
    e: &CatalogEntry,
    depth: usize,
    guard: usize,
    options: &GrowthOptions,
) -> VerificationReport {
    let started = Instant::now();
    let mut report = VerificationReport {
        id: e.id,
        name: e.name.clone(),
        status: Status::MatrixUnavailable,
        reason: None,
        finite_type: e.finite_type,
        positive_roots: e.finite_type.positive_root_count(),
        depth,
        guard,
        q_table: e.q_table.clone(),
        computed_q: None,
        observed_degree: None,
        elapsed_ms: 0,
    };
    let Some(m) = &e.cartan else {
        report.reason = Some("no Cartan matrix; supply one in an override file".into());
        return report;
    };
    let outcome = check_matrix(m, e, depth, guard, options);
    report.elapsed_ms = started.elapsed().as_millis() as u64;
    match outcome {
        Ok(fit) => {
            report.computed_q = Some(fit.q.clone());
            report.observed_degree = Some(fit.observed_degree);
            if fit.q != e.q_table {
                report.status = Status::Mismatch;
                report.reason = Some("computed Q differs from the tabulated one".into());
            } else if !fit.degree_is_d_or_d_minus_one() {
                report.status = Status::Mismatch;
                report.reason = Some(format!(
                    "degree {} is neither D = {} nor D - 1",
                    fit.observed_degree, fit.positive_roots
                ));
            } else {
                report.status = Status::Verified;
            }
        }
        Err(reason) => {
            report.status = Status::Mismatch;
            report.reason = Some(reason);
        }
    }
    report
}

fn check_matrix(
    m: &CartanMatrix,
    e: &CatalogEntry,
    depth: usize,
    guard: usize,
    options: &GrowthOptions,
) -> Result<crate::factorization::DenominatorFit, String> {
    let needed = e.finite_type.positive_root_count() + guard;
    if depth + 1 < needed {
        return Err(FactorError::TruncationTooShallow {
            truncation: depth,
            needed,
        }
        .to_string());
    }
    let growth = growth_series(m, depth, options).map_err(|e: GrowthError| e.to_string())?;
    let h = growth.to_series(depth);
    match fit_denominator(&h, &e.finite_type, guard) {
        Ok(Some(fit)) => Ok(fit),
        Ok(None) => Err(format!(
            "P({}) / P(H) does not terminate within {} coefficients",
            e.finite_type,
            depth + 1
        )),
        Err(err) => Err(err.to_string()),
    }
}

/// Verifies every entry in id order.
pub fn verify_catalog(
    entries: &[CatalogEntry],
    depth: Option<usize>,
    guard: usize,
    options: &GrowthOptions,
) -> Vec<VerificationReport> {
    entries
        .iter()
        .map(|e| {
            verify_entry(
                e,
                depth.unwrap_or_else(|| default_depth(e, guard)),
                guard,
                options,
            )
        })
        .collect()
}

/// `Q_i(G) = (...)` lines, one per report, with the outcome appended.
pub fn render_table(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for r in reports {
        let status = match r.status {
            Status::Verified => "verified".to_string(),
            Status::MatrixUnavailable => "matrix unavailable".to_string(),
            Status::Mismatch => format!("MISMATCH: {}", r.reason.as_deref().unwrap_or("")),
        };
        out.push_str(&format!(
            "Q_{}({}) = ({})    [{status}]\n",
            r.id, r.finite_type, r.q_table
        ));
    }
    out
}

/// Reference data: the `H48` growth series to `t^25`, `P(A4)`, the `R`
/// rational functions of the three `H48` splittings, and the per-level
/// counts of the `R_1` representatives.
#[derive(Clone, Debug)]
pub struct ReferenceData {
    pub h48_series: [u64; 26],
    pub a4_poincare: [i64; 11],
    pub r1_counts: [u64; 7],
    /// `(factor, multiplicity)`.
    pub r1_numerator_factors: Vec<(IntPoly, u32)>,
    pub r1_denominator: IntPoly,
    pub r2_numerator: IntPoly,
    pub r2_denominator: IntPoly,
    pub r3_numerator_factors: Vec<(IntPoly, u32)>,
    pub r3_denominator: IntPoly,
    pub q48: IntPoly,
}

fn p(coeffs: &[i64]) -> IntPoly {
    IntPoly::from_i64s(coeffs)
}

fn expand_factors(factors: &[(IntPoly, u32)]) -> IntPoly {
    factors
        .iter()
        .fold(IntPoly::one(), |acc, (f, e)| acc.mul(&f.pow(*e)))
}

pub fn reference_data() -> ReferenceData {
    ReferenceData {
        h48_series: [
            1, 6, 20, 52, 117, 237, 445, 791, 1347, 2216, 3550, 5568, 8582, 13044, 19604, 29189,
            43129, 63332, 92518, 134572, 195052, 281882, 406361, 584620, 839655, 1204232,
        ],
        a4_poincare: [1, 4, 9, 15, 20, 22, 20, 15, 9, 4, 1],
        r1_counts: [1, 2, 3, 7, 12, 19, 32],
        r1_numerator_factors: vec![
            (p(&[1, 1]), 3),
            (p(&[1, 0, 1]), 1),
            (p(&[1, -1, 1]), 1),
            (p(&[1, 0, 0, 0, 1]), 1),
        ],
        // 1 - t^2 - 2t^3 - t^4 + t^6 + t^7 + 3t^8 + 2t^9 - t^13 - 2t^14 - 2t^15 - t^16 + t^19 + t^20
        r1_denominator: p(&[
            1, 0, -1, -2, -1, 0, 1, 1, 3, 2, 0, 0, 0, -1, -2, -2, -1, 0, 0, 1, 1,
        ]),
        r2_numerator: p(&[1, 1]),
        r2_denominator: p(&[
            1, 0, -1, -2, -1, 0, 1, 1, 3, 2, 0, 0, 0, -1, -2, -2, -1, 0, 0, 1, 1,
        ]),
        r3_numerator_factors: vec![
            (p(&[1, -1]), 3),
            (p(&[1, 1]), 1),
            (p(&[1, 1, 1]), 2),
            (p(&[1, 0, 0, 0, 1]), 1),
            (p(&[1, 1, 1, 1, 1]), 1),
        ],
        // 1 - t^2 - 2t^3 - t^4 + t^5 + t^6 + t^8 + t^9 + t^10 + t^11 - t^14 - t^15
        r3_denominator: p(&[1, 0, -1, -2, -1, 1, 1, 0, 1, 1, 1, 1, 0, 0, -1, -1]),
        q48: p(&[
            1, -1, 0, -2, 1, 0, 1, -1, 2, -1, 1, 0, 1, 1, -1, -1, 0, 0, -1, 0, -1, 0, 0, 0, 1,
        ]),
    }
}

impl ReferenceData {
    pub fn h48(&self) -> TruncSeries {
        TruncSeries::from_u64s(&self.h48_series)
    }

    pub fn r1(&self) -> RationalFunction {
        RationalFunction::new(
            expand_factors(&self.r1_numerator_factors),
            self.r1_denominator.clone(),
        )
        .expect("unit denominator")
    }

    pub fn r2(&self) -> RationalFunction {
        RationalFunction::new(self.r2_numerator.clone(), self.r2_denominator.clone())
            .expect("unit denominator")
    }

    pub fn r3(&self) -> RationalFunction {
        RationalFunction::new(
            expand_factors(&self.r3_numerator_factors),
            self.r3_denominator.clone(),
        )
        .expect("unit denominator")
    }
}

/// Alias edges `source -> target`.
pub fn alias_graph(entries: &[CatalogEntry]) -> BTreeMap<u32, u32> {
    entries
        .iter()
        .filter_map(|e| e.alias_of.map(|t| (e.id, t)))
        .collect()
}
