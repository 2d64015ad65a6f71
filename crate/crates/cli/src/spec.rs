//! Pair-spec files: TOML ingestion, validation and explicit-form emission.
//!
//! A spec file holds exactly one of a `[pair]` table or a `[discrepancy]` table. Pair
//! tables carry a `form` tag:
//!
//! ```toml
//! [pair]
//! form = "projective"       # or "gamma", "explicit", "fibration", "blowup_chain"
//! n = 2
//! d = 1
//! hyperplanes = [{ coord = 0, mult = 1 }, { coord = 1, mult = 1 }]
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use snc_core::motivic::{DiscrepancyData, MotivicError};
use snc_core::pairs::{
    blow_up, coordinate_center, fibration_pair, gamma_model_pair, projective_space_pair, stratum_center, Divisor,
};
use snc_core::{BlowupRecord, CenterDescriptor, MotClass, PairError, Rat, SncPair, Subset};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair: Option<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discrepancy: Option<DiscrepancySpec>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum PairSpec {
    Projective {
        n: usize,
        d: i64,
        #[serde(default)]
        hyperplanes: Vec<HyperplaneSpec>,
    },
    /// `(CP^n, γ_{m_1,…,m_s})` with the forced multiplicity on `H_0`.
    Gamma { n: usize, d: i64, mults: Vec<u64> },
    Explicit {
        n: usize,
        d: i64,
        #[serde(default)]
        d_canonical: bool,
        #[serde(default)]
        divisors: Vec<DivisorSpec>,
        strata: Vec<StratumSpec>,
    },
    Fibration { base: Box<PairSpec>, fiber: Box<PairSpec> },
    BlowupChain {
        base: Box<PairSpec>,
        #[serde(default)]
        centers: Vec<CenterSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperplaneSpec {
    pub coord: usize,
    pub mult: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub label: String,
    pub mult: i64,
}

/// `[D_J]` as its Betti numbers `b_0, b_1, …`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumSpec {
    pub subset: Vec<usize>,
    pub betti: Vec<i64>,
}

/// A center: a stratum `D_J` of the current pair, or a coordinate subspace of the base model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CenterSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stratum: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<usize>>,
}

impl CenterSpec {
    pub fn stratum(ix: impl IntoIterator<Item = usize>) -> Self {
        CenterSpec {
            stratum: Some(ix.into_iter().collect()),
            coords: None,
        }
    }

    pub fn coords(ix: impl IntoIterator<Item = usize>) -> Self {
        CenterSpec {
            stratum: None,
            coords: Some(ix.into_iter().collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscrepancySpec {
    /// Discrepancies `a_j` as integers or `"p/q"` strings.
    pub discrepancies: Vec<RatLit>,
    /// Strata of the resolution given as a pair; its divisors are the exceptional ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<PairSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strata: Option<Vec<StratumSpec>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatLit {
    Int(i64),
    Text(String),
}

impl RatLit {
    fn to_rat(&self) -> Result<Rat, String> {
        match self {
            RatLit::Int(i) => Ok(Rat::from(*i)),
            RatLit::Text(s) => s.parse().map_err(|e| format!("{e}")),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error at `{field}` (invariant: {invariant}): {message}")]
    Validation {
        field: String,
        invariant: &'static str,
        message: String,
    },
}

impl SpecError {
    fn validation(field: &str, invariant: &'static str, message: impl fmt::Display) -> Self {
        SpecError::Validation {
            field: field.to_string(),
            invariant,
            message: message.to_string(),
        }
    }

    fn from_pair(field: &str, e: PairError) -> Self {
        SpecError::validation(field, pair_invariant(&e), e)
    }

    fn from_motivic(field: &str, e: MotivicError) -> Self {
        match e {
            MotivicError::Pair(p) => SpecError::from_pair(field, p),
            MotivicError::NotKlt { .. } => SpecError::validation(field, "klt: discrepancies > -1", e),
            other => SpecError::validation(field, "discrepancy data", other),
        }
    }
}

/// The name of the invariant a pair error violates.
pub fn pair_invariant(e: &PairError) -> &'static str {
    match e {
        PairError::ConditionStarViolation { .. } => "condition (⋆_d)",
        PairError::ZeroMultiplicity { .. } => "nonzero multiplicities",
        PairError::NonPositiveD(_) => "d > 0",
        PairError::MismatchedD(..) => "equal d on base and fiber",
        PairError::EmptyStratum(_) => "nonempty stratum",
        PairError::NoModelTag => "coordinate model",
        PairError::NegativeMultAtCenter { .. } => "positive multiplicities along the center",
        PairError::DegenerateCenter => "nondegenerate center",
        PairError::InvalidCenter(_) => "smooth center with normal crossings",
        PairError::InvalidStratum { invariant, .. } => invariant,
        PairError::InvalidCoordinates(_) => "distinct coordinates in range",
        PairError::TooManyDivisors(_) => "at most 64 divisors",
    }
}

/// A validated spec.
#[derive(Debug, Clone)]
pub enum Loaded {
    Pair(SncPair),
    Discrepancy(DiscrepancyData),
}

/// A pair together with the blow-ups that produced it.
#[derive(Debug, Clone)]
pub struct Chain {
    pub base: SncPair,
    pub steps: Vec<(CenterDescriptor, BlowupRecord)>,
}

impl Chain {
    /// The last pair of the chain.
    pub fn last(&self) -> &SncPair {
        self.steps.last().map(|(_, r)| &r.new_pair).unwrap_or(&self.base)
    }

    /// `base, X_1, X_2, …`.
    pub fn pairs(&self) -> impl Iterator<Item = &SncPair> {
        std::iter::once(&self.base).chain(self.steps.iter().map(|(_, r)| &r.new_pair))
    }
}

pub fn parse_spec(text: &str) -> Result<SpecFile, SpecError> {
    toml::from_str(text).map_err(|e| {
        let start = e.span().map_or(0, |s| refine_offset(text, s.start, e.message()));
        let (line, column) = line_col(text, start);
        SpecError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })
}

/// Tagged tables are buffered before deserialization, so their errors point at the table
/// header. Moves such an offset to the first line in the table naming the offending token.
fn refine_offset(text: &str, start: usize, message: &str) -> usize {
    if !text[start..].starts_with('[') {
        return start;
    }
    let token = message
        .split('`')
        .nth(1)
        .filter(|_| message.contains("field"))
        .map(|t| (t.to_string(), true))
        .or_else(|| message.split('"').nth(1).map(|t| (format!("\"{t}\""), false)));
    let Some((token, is_key)) = token else { return start };
    let mut offset = start;
    for (i, line) in text[start..].split_inclusive('\n').enumerate() {
        let trimmed = line.trim_start();
        if i > 0 && trimmed.starts_with('[') {
            break;
        }
        let hit = if is_key {
            trimmed.strip_prefix(token.as_str()).is_some_and(|r| r.trim_start().starts_with('='))
        } else {
            line.contains(token.as_str())
        };
        if hit {
            return offset + (line.len() - trimmed.len());
        }
        offset += line.len();
    }
    start
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
    (line, column)
}

pub fn read_spec(path: &Path) -> Result<SpecFile, SpecError> {
    let text = std::fs::read_to_string(path).map_err(|source| SpecError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_spec(&text)
}

/// Reads, parses and validates a spec file.
pub fn load_pair_spec(path: &Path) -> Result<Loaded, SpecError> {
    load_spec_file(&read_spec(path)?)
}

pub fn load_spec_file(file: &SpecFile) -> Result<Loaded, SpecError> {
    match (&file.pair, &file.discrepancy) {
        (Some(p), None) => Ok(Loaded::Pair(build_pair(p, "pair")?)),
        (None, Some(d)) => Ok(Loaded::Discrepancy(build_discrepancy(d, "discrepancy")?)),
        _ => Err(SpecError::validation(
            "",
            "exactly one of [pair] or [discrepancy]",
            "the file must contain exactly one top-level table",
        )),
    }
}

pub fn build_pair(spec: &PairSpec, field: &str) -> Result<SncPair, SpecError> {
    Ok(build_chain(spec, field)?.last().clone())
}

/// Builds the pair, keeping every intermediate blow-up of a chain form.
pub fn build_chain(spec: &PairSpec, field: &str) -> Result<Chain, SpecError> {
    let plain = |pair| Ok(Chain { base: pair, steps: Vec::new() });
    match spec {
        PairSpec::Projective { n, d, hyperplanes } => {
            let assigned: Vec<(usize, i64)> = hyperplanes.iter().map(|h| (h.coord, h.mult)).collect();
            plain(projective_space_pair(*n, *d, &assigned).map_err(|e| SpecError::from_pair(field, e))?)
        }
        PairSpec::Gamma { n, d, mults } => {
            plain(gamma_model_pair(*n, *d, mults).map_err(|e| SpecError::from_pair(field, e))?)
        }
        PairSpec::Explicit {
            n,
            d,
            d_canonical,
            divisors,
            strata,
        } => {
            let divisors = divisors.iter().map(|x| Divisor::new(x.label.clone(), x.mult)).collect();
            let strata = build_strata(strata, &format!("{field}.strata"))?;
            plain(SncPair::new(*n, *d, divisors, strata, *d_canonical).map_err(|e| SpecError::from_pair(field, e))?)
        }
        PairSpec::Fibration { base, fiber } => {
            let b = build_pair(base, &format!("{field}.base"))?;
            let f = build_pair(fiber, &format!("{field}.fiber"))?;
            plain(fibration_pair(&b, &f).map_err(|e| SpecError::from_pair(field, e))?)
        }
        PairSpec::BlowupChain { base, centers } => {
            let mut chain = build_chain(base, &format!("{field}.base"))?;
            for (i, c) in centers.iter().enumerate() {
                let f = format!("{field}.centers[{i}]");
                let current = chain.last().clone();
                let center = build_center(&current, c, &f)?;
                let record = blow_up(&current, &center).map_err(|e| SpecError::from_pair(&f, e))?;
                chain.steps.push((center, record));
            }
            Ok(chain)
        }
    }
}

pub fn build_center(pair: &SncPair, c: &CenterSpec, field: &str) -> Result<CenterDescriptor, SpecError> {
    match (&c.stratum, &c.coords) {
        (Some(s), None) => {
            let j: Subset = s.iter().copied().collect();
            stratum_center(pair, j).map_err(|e| SpecError::from_pair(field, e))
        }
        (None, Some(coords)) => coordinate_center(pair, coords).map_err(|e| SpecError::from_pair(field, e)),
        _ => Err(SpecError::validation(
            field,
            "exactly one of `stratum` or `coords`",
            "a center names a stratum or a coordinate subspace",
        )),
    }
}

fn build_strata(strata: &[StratumSpec], field: &str) -> Result<BTreeMap<Subset, MotClass>, SpecError> {
    let mut out = BTreeMap::new();
    for (i, s) in strata.iter().enumerate() {
        let j: Subset = s.subset.iter().copied().collect();
        if j.len() != s.subset.len() {
            return Err(SpecError::validation(
                &format!("{field}[{i}].subset"),
                "distinct divisor indices",
                format!("{:?}", s.subset),
            ));
        }
        if out.insert(j, MotClass::from_betti(s.betti.iter().copied())).is_some() {
            return Err(SpecError::validation(
                &format!("{field}[{i}].subset"),
                "one class per stratum",
                format!("{:?} given twice", s.subset),
            ));
        }
    }
    Ok(out)
}

pub fn build_discrepancy(spec: &DiscrepancySpec, field: &str) -> Result<DiscrepancyData, SpecError> {
    let discrepancies = spec
        .discrepancies
        .iter()
        .enumerate()
        .map(|(i, a)| {
            a.to_rat()
                .map_err(|e| SpecError::validation(&format!("{field}.discrepancies[{i}]"), "rational literal", e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    match (&spec.resolution, &spec.n, &spec.strata) {
        (Some(res), None, None) => {
            let pair = build_pair(res, &format!("{field}.resolution"))?;
            DiscrepancyData::from_pair(&pair, discrepancies).map_err(|e| SpecError::from_motivic(field, e))
        }
        (None, Some(n), Some(strata)) => {
            let strata = build_strata(strata, &format!("{field}.strata"))?;
            DiscrepancyData::new(*n, strata, discrepancies).map_err(|e| SpecError::from_motivic(field, e))
        }
        _ => Err(SpecError::validation(
            field,
            "either `resolution` or `n` with `strata`",
            "discrepancy data needs the strata of the resolution",
        )),
    }
}

/// The explicit form of a pair.
pub fn explicit_spec(pair: &SncPair) -> PairSpec {
    PairSpec::Explicit {
        n: pair.n(),
        d: pair.d(),
        d_canonical: pair.is_d_canonical(),
        divisors: pair
            .divisors()
            .iter()
            .map(|x| DivisorSpec {
                label: x.label.clone(),
                mult: x.mult,
            })
            .collect(),
        strata: pair
            .strata()
            .iter()
            .map(|(j, class)| StratumSpec {
                subset: j.iter().collect(),
                betti: class
                    .betti()
                    .iter()
                    .map(|b| b.to_i64().expect("Betti numbers fit in i64"))
                    .collect(),
            })
            .collect(),
    }
}

/// TOML text of the explicit form of `pair`.
pub fn emit_pair_spec(pair: &SncPair, name: Option<&str>) -> String {
    emit_spec_file(&SpecFile {
        name: name.map(str::to_string),
        pair: Some(explicit_spec(pair)),
        discrepancy: None,
    })
}

pub fn emit_spec_file(file: &SpecFile) -> String {
    toml::to_string(file).expect("spec files serialize")
}
