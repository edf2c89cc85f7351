//! Instance text format and JSON run reports.
//!
//! An instance file has three lines: `n`, then `n` weights (integers,
//! decimals or `p/q`), then `C(n, 2)` characters `0`/`1` for the pairs
//! `(0,1), (0,2), …, (n-2,n-1)` where `1` means the smaller vertex beats the
//! larger. Text after `#` is a comment; lines holding only a comment are
//! skipped.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::lp::Tolerances;
use crate::solvers::FvsSolution;
use crate::tournament::{
    verify_fvs, CanonicalForm, FvsCheck, Tournament, TournamentError, WeightedTournament, MAX_CANONICAL_VERTICES,
};
use crate::weight::{self, Weight};

/// JSON schema for [`RunReport`], shipped with the crate.
pub const RUN_REPORT_SCHEMA: &str = include_str!("../schemas/run_report.schema.json");
/// JSON schema for [`crate::FamilyCensus`].
pub const CENSUS_SCHEMA: &str = include_str!("../schemas/census.schema.json");
/// JSON schema for [`GenManifest`].
pub const MANIFEST_SCHEMA: &str = include_str!("../schemas/manifest.schema.json");

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("missing vertex count")]
    MissingCount,
    #[error("bad vertex count {0:?}")]
    BadCount(String),
    #[error(transparent)]
    Weight(#[from] weight::WeightParseError),
    #[error("expected {expected} weights, found {got}")]
    WeightCount { expected: usize, got: usize },
    #[error("expected {expected} orientation bits, found {got}")]
    BitCount { expected: usize, got: usize },
    #[error("orientation bit must be 0 or 1, found {0:?}")]
    BadBit(char),
    #[error("unexpected content after the orientation bits")]
    TrailingContent,
    #[error(transparent)]
    Tournament(#[from] TournamentError),
}

struct Line<'a> {
    number: usize,
    text: &'a str,
}

fn err(line: usize, column: usize, kind: ParseErrorKind) -> ParseError {
    ParseError { line, column, kind }
}

/// Words of `text` with their 1-based column.
fn words(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split(|c: char| c.is_ascii_whitespace())
        .scan(0usize, |pos, w| {
            let col = *pos + 1;
            *pos += w.len() + 1;
            Some((col, w))
        })
        .filter(|(_, w)| !w.is_empty())
}

pub fn parse_instance(text: &str) -> Result<WeightedTournament, ParseError> {
    let lines: Vec<Line> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#'))
        .map(|(i, l)| Line { number: i + 1, text: l.split('#').next().unwrap_or("") })
        .collect();
    let empty = Line { number: lines.last().map_or(1, |l| l.number + 1), text: "" };
    let first = lines.first().ok_or_else(|| err(1, 1, ParseErrorKind::MissingCount))?;
    let mut count_words = words(first.text);
    let (col, word) = count_words.next().ok_or_else(|| err(first.number, 1, ParseErrorKind::MissingCount))?;
    let n: usize = word.parse().map_err(|_| err(first.number, col, ParseErrorKind::BadCount(word.into())))?;
    if let Some((col, w)) = count_words.next() {
        return Err(err(first.number, col, ParseErrorKind::BadCount(w.into())));
    }
    let wline = lines.get(1).unwrap_or(&empty);
    let mut weights = Vec::with_capacity(n);
    for (col, w) in words(wline.text) {
        weights.push(weight::parse(w).map_err(|e| err(wline.number, col, e.into()))?);
    }
    if weights.len() != n {
        return Err(err(wline.number, 1, ParseErrorKind::WeightCount { expected: n, got: weights.len() }));
    }
    let bline = lines.get(2).unwrap_or(&empty);
    let expected = n * n.saturating_sub(1) / 2;
    let mut bits = Vec::with_capacity(expected);
    let lead = bline.text.len() - bline.text.trim_start().len();
    for (i, ch) in bline.text.trim().chars().enumerate() {
        match ch {
            '0' => bits.push(false),
            '1' => bits.push(true),
            c => return Err(err(bline.number, lead + i + 1, ParseErrorKind::BadBit(c))),
        }
    }
    if bits.len() != expected {
        return Err(err(bline.number, 1, ParseErrorKind::BitCount { expected, got: bits.len() }));
    }
    if let Some(extra) = lines.iter().skip(3).find(|l| !l.text.trim().is_empty()) {
        return Err(err(extra.number, 1, ParseErrorKind::TrailingContent));
    }
    let t = Tournament::from_orientation_bits(n, &bits).map_err(|e| err(first.number, 1, e.into()))?;
    WeightedTournament::new(t, weights).map_err(|e| err(wline.number, 1, e.into()))
}

/// Canonical text: shortest exact weights, no comments, trailing newline.
pub fn emit_instance(wt: &WeightedTournament) -> String {
    let weights: Vec<String> = wt.weights.iter().map(weight::format).collect();
    let bits: String = wt.tournament.orientation_bits().iter().map(|&b| if b { '1' } else { '0' }).collect();
    format!("{}\n{}\n{}\n", wt.n(), weights.join(" "), bits)
}

/// SHA-256 of the emitted instance text, hex encoded.
pub fn instance_hash(wt: &WeightedTournament) -> String {
    hex::encode(Sha256::digest(emit_instance(wt).as_bytes()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub sa0: Option<f64>,
    pub sa1: Option<f64>,
    #[serde(with = "opt_weight", default)]
    pub exact: Option<Weight>,
}

/// Solution weight divided by each available bound.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub over_sa0: Option<f64>,
    pub over_sa1: Option<f64>,
    pub over_exact: Option<f64>,
}

impl Ratios {
    pub fn compute(w: &Weight, b: &Bounds) -> Self {
        let wf = weight::to_f64(w);
        let div = |d: f64| if d > 0.0 { Some(wf / d) } else { None };
        Ratios {
            over_sa0: b.sa0.and_then(div),
            over_sa1: b.sa1.and_then(div),
            over_exact: b.exact.as_ref().map(weight::to_f64).and_then(div),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub total_ms: f64,
    pub lp_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub tolerances: Tolerances,
    pub lazy_sa1: bool,
    pub max_sa1_vertices: usize,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub instance_hash: String,
    /// Isomorphism-invariant form, present for small instances.
    pub canonical_form: Option<CanonicalForm>,
    pub instance: String,
    pub algorithm: String,
    pub n: usize,
    pub solution: FvsSolution,
    pub bounds: Bounds,
    pub ratios: Ratios,
    pub timings: Timings,
    pub config: ReportConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<serde_json::Value>,
}

impl RunReport {
    pub fn new(
        wt: &WeightedTournament,
        algorithm: &str,
        solution: FvsSolution,
        bounds: Bounds,
        timings: Timings,
        config: ReportConfig,
    ) -> Self {
        let ratios = Ratios::compute(&solution.weight, &bounds);
        RunReport {
            schema_version: REPORT_SCHEMA_VERSION,
            instance_hash: instance_hash(wt),
            canonical_form: (wt.n() <= MAX_CANONICAL_VERTICES)
                .then(|| wt.tournament.canonical_form().expect("size checked")),
            instance: emit_instance(wt),
            algorithm: algorithm.to_string(),
            n: wt.n(),
            solution,
            bounds,
            ratios,
            timings,
            config,
            trace: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("{path}: {message}")]
    Json { path: String, message: String },
    #[error("unsupported schema version {0}")]
    Version(u32),
    #[error("embedded instance: {0}")]
    Instance(#[from] ParseError),
    #[error("instance hash does not match the embedded instance")]
    Hash,
    #[error("reported solution is invalid: {0}")]
    Solution(String),
}

pub fn write_report(r: &RunReport) -> String {
    serde_json::to_string_pretty(r).expect("reports serialize")
}

/// Parses and validates a report: schema version, instance hash, and that
/// the chosen set is a feedback vertex set of the stated weight.
pub fn read_report(json: &str) -> Result<RunReport, ReportError> {
    let de = &mut serde_json::Deserializer::from_str(json);
    let r: RunReport = serde_path_to_error::deserialize(de).map_err(|e| ReportError::Json {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })?;
    if r.schema_version != REPORT_SCHEMA_VERSION {
        return Err(ReportError::Version(r.schema_version));
    }
    let wt = parse_instance(&r.instance)?;
    if instance_hash(&wt) != r.instance_hash {
        return Err(ReportError::Hash);
    }
    match verify_fvs(&wt, r.solution.chosen) {
        FvsCheck::Violation(tr) => Err(ReportError::Solution(format!("triangle {tr} survives"))),
        FvsCheck::Valid(s) if s.weight != r.solution.weight => Err(ReportError::Solution(format!(
            "weight is {}, report says {}",
            weight::format(&s.weight),
            weight::format(&r.solution.weight)
        ))),
        FvsCheck::Valid(_) => Ok(r),
    }
}

/// One generated instance file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub seed: u64,
    pub instance_hash: String,
}

/// Provenance of a generated corpus.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenManifest {
    pub n: usize,
    pub weights: String,
    pub base_seed: u64,
    pub entries: Vec<ManifestEntry>,
}

mod opt_weight {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::weight::{self, Weight};

    pub fn serialize<S: Serializer>(w: &Option<Weight>, s: S) -> Result<S::Ok, S::Error> {
        match w {
            Some(w) => s.serialize_some(&weight::format(w)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Weight>, D::Error> {
        Option::<String>::deserialize(d)?
            .map(|s| weight::parse(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}
