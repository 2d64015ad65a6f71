//! Corpus generation and the verification suite.
//!
//! Every case index yields three entries from its own ChaCha stream: an effective
//! coordinate pair with a blow-up chain (change of variables), a `γ`-model with a chain
//! (functional equation and `τ^bir`), and a fibration (bundle formula). Entries loaded
//! from a corpus directory are checked the same way, by shape.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use snc_core::invariants::chi_d;
use snc_core::motivic::{cov_certificate, require_effective, specialization_limit};
use snc_core::pairs::{blow_up_with_mult, exceptional_mult};
use snc_core::tauledger::{
    tau_bir, tau_p1_eval, tau_p2_eval, tau_projective_normal_form, tau_reachable, verify_blowup_record,
    verify_bundle_functional_equation,
};
use snc_core::{BlowupRecord, CenterDescriptor, SncPair, Subset, TauExpr};

use crate::encode;
use crate::spec::{build_center, build_pair, read_spec, CenterSpec, HyperplaneSpec, PairSpec, SpecError, SpecFile};

pub const DEFAULT_SEED: u64 = 20240607;

/// Reads `SNC_SEED` when set, otherwise returns `seed`.
pub fn seed_from_env(seed: u64) -> u64 {
    std::env::var("SNC_SEED")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub n_max: usize,
    pub d_max: i64,
    pub m_max: i64,
    pub chain_len: usize,
    pub cases: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            n_max: 4,
            d_max: 3,
            m_max: 5,
            chain_len: 3,
            cases: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    /// `F_d` before and after each blow-up of an effective pair.
    Cov,
    /// The blow-up functional equation, `χ_d` invariance and the `t → 1` bridge.
    Blowup,
    /// The projective-bundle functional equation.
    Bundle,
    /// `τ^bir = 0` along chains, with `τ` propagated through the functional equation.
    Taubir,
}

impl CheckKind {
    pub const ALL: [CheckKind; 4] = [CheckKind::Cov, CheckKind::Blowup, CheckKind::Bundle, CheckKind::Taubir];
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CheckKind::Cov => "cov",
            CheckKind::Blowup => "blowup",
            CheckKind::Bundle => "bundle",
            CheckKind::Taubir => "taubir",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub limits: Limits,
    pub checks: BTreeSet<CheckKind>,
    /// Added to every exceptional multiplicity; a deliberately wrong blow-up rule.
    pub mutation: Option<i64>,
    pub corpus: Option<PathBuf>,
    /// Worker threads; `None` uses the available parallelism.
    pub jobs: Option<usize>,
}

impl SuiteConfig {
    pub fn new(seed: u64) -> Self {
        SuiteConfig {
            seed,
            limits: Limits::default(),
            checks: CheckKind::ALL.into_iter().collect(),
            mutation: None,
            corpus: None,
            jobs: None,
        }
    }
}

/// A named pair spec to verify.
#[derive(Debug, Clone)]
pub struct Entry {
    pub name: String,
    pub spec: Result<PairSpec, String>,
}

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub check: &'static str,
    pub step: Option<usize>,
    pub ok: bool,
    pub detail: Value,
}

#[derive(Debug, Clone)]
pub struct EntryResult {
    pub name: String,
    pub input: Value,
    pub checks: Vec<CheckResult>,
    pub error: Option<String>,
}

impl EntryResult {
    pub fn ok(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.ok)
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub seed: u64,
    pub limits: Limits,
    pub checks: BTreeSet<CheckKind>,
    pub mutation: Option<i64>,
    pub entries: Vec<EntryResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(EntryResult::ok)
    }

    pub fn failed_entries(&self) -> usize {
        self.entries.iter().filter(|e| !e.ok()).count()
    }

    /// Number of individual checks of the given name, and how many of them passed.
    pub fn tally(&self, check: &str) -> (usize, usize) {
        let all: Vec<&CheckResult> = self
            .entries
            .iter()
            .flat_map(|e| e.checks.iter())
            .filter(|c| c.check == check)
            .collect();
        (all.len(), all.iter().filter(|c| c.ok).count())
    }

    pub fn to_json(&self) -> Value {
        let total: usize = self.entries.iter().map(|e| e.checks.len()).sum();
        let failed_checks: usize = self
            .entries
            .iter()
            .map(|e| e.checks.iter().filter(|c| !c.ok).count())
            .sum();
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let checks: Vec<Value> = e
                    .checks
                    .iter()
                    .map(|c| json!({ "check": c.check, "step": c.step, "ok": c.ok, "detail": c.detail }))
                    .collect();
                json!({ "name": e.name, "ok": e.ok(), "input": e.input, "checks": checks, "error": e.error })
            })
            .collect();
        json!({
            "tool": "snc",
            "version": env!("CARGO_PKG_VERSION"),
            "seed": self.seed,
            "limits": self.limits,
            "checks": self.checks.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "mutation": self.mutation,
            "summary": {
                "entries": self.entries.len(),
                "failed_entries": self.failed_entries(),
                "checks": total,
                "failed_checks": failed_checks,
                "passed": self.passed(),
            },
            "entries": entries,
        })
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Generates `limits.cases` case indices, three entries each.
pub fn generate_corpus(seed: u64, limits: &Limits) -> Vec<Entry> {
    (0..limits.cases)
        .flat_map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let effective = effective_chain(&mut rng, limits);
            let gamma = gamma_chain(&mut rng, limits);
            let bundle = bundle_pair(&mut rng, limits);
            [
                Entry {
                    name: format!("case-{i:04}-effective"),
                    spec: Ok(effective),
                },
                Entry {
                    name: format!("case-{i:04}-gamma"),
                    spec: Ok(gamma),
                },
                Entry {
                    name: format!("case-{i:04}-bundle"),
                    spec: Ok(bundle),
                },
            ]
        })
        .collect()
}

/// `(CP^n, Σ m_c H_c)` with positive multiplicities on a random set of coordinates.
fn effective_chain(rng: &mut ChaCha8Rng, limits: &Limits) -> PairSpec {
    let n = rng.gen_range(1..=limits.n_max);
    let d = rng.gen_range(1..=limits.d_max);
    let mut hyperplanes = Vec::new();
    for coord in 0..=n {
        if rng.gen_bool(2.0 / 3.0) {
            let mult = rng.gen_range(1..=limits.m_max);
            hyperplanes.push(HyperplaneSpec { coord, mult });
        }
    }
    let base = PairSpec::Projective { n, d, hyperplanes };
    with_random_chain(rng, limits, base)
}

fn gamma_chain(rng: &mut ChaCha8Rng, limits: &Limits) -> PairSpec {
    let n = rng.gen_range(1..=limits.n_max);
    let d = rng.gen_range(1..=limits.d_max);
    let s = rng.gen_range(0..=n);
    let mults = (0..s).map(|_| rng.gen_range(0..=limits.m_max as u64)).collect();
    with_random_chain(rng, limits, PairSpec::Gamma { n, d, mults })
}

/// A random `(⋆_d)` pair of dimension at most 2 over a `γ`-model fiber of dimension at most 2.
fn bundle_pair(rng: &mut ChaCha8Rng, limits: &Limits) -> PairSpec {
    let d = rng.gen_range(1..=limits.d_max);
    let nb = rng.gen_range(0..=limits.n_max.min(2));
    let mut hyperplanes = Vec::new();
    for coord in 0..=nb {
        if nb > 0 && rng.gen_bool(0.5) {
            let mult = rng.gen_range(-limits.m_max..=limits.m_max);
            if mult != 0 && mult != -d {
                hyperplanes.push(HyperplaneSpec { coord, mult });
            }
        }
    }
    let nf = rng.gen_range(1..=limits.n_max.min(2));
    let s = rng.gen_range(0..=nf);
    let mults = (0..s).map(|_| rng.gen_range(0..=limits.m_max as u64)).collect();
    PairSpec::Fibration {
        base: Box::new(PairSpec::Projective { n: nb, d, hyperplanes }),
        fiber: Box::new(PairSpec::Gamma { n: nf, d, mults }),
    }
}

/// Appends up to `chain_len` random valid centers, half of the time exactly `chain_len`.
fn with_random_chain(rng: &mut ChaCha8Rng, limits: &Limits, base: PairSpec) -> PairSpec {
    let len = if rng.gen_bool(0.5) {
        limits.chain_len
    } else {
        rng.gen_range(1..=limits.chain_len.max(1))
    };
    let mut pair = build_pair(&base, "base").expect("generated bases are valid");
    let mut centers = Vec::new();
    for step in 0..len {
        let candidates = center_candidates(&pair, step == 0);
        let Some(choice) = candidates.choose(rng) else { break };
        let c = build_center(&pair, choice, "center").expect("candidates are valid");
        let Ok(record) = snc_core::pairs::blow_up(&pair, &c) else { break };
        pair = record.new_pair;
        centers.push(choice.clone());
    }
    PairSpec::BlowupChain {
        base: Box::new(base),
        centers,
    }
}

/// Strata centers (and coordinate centers on a model) whose contained divisors all have
/// positive multiplicity; codimension one only when nothing deeper exists.
fn center_candidates(pair: &SncPair, with_coords: bool) -> Vec<CenterSpec> {
    let positive = |j: Subset| j.iter().all(|i| pair.mult(i) > 0);
    let mut deep: Vec<CenterSpec> = pair
        .strata()
        .keys()
        .filter(|j| j.len() >= 2 && positive(**j))
        .map(|j| CenterSpec::stratum(j.iter()))
        .collect();
    if with_coords {
        if let Some(model) = pair.model() {
            let n = model.n;
            for mask in 1u64..(1 << (n + 1)) {
                let coords: Vec<usize> = (0..=n).filter(|c| mask >> c & 1 == 1).collect();
                if coords.len() < 2 || coords.len() > n {
                    continue;
                }
                let s: Subset = (0..pair.num_divisors())
                    .filter(|&i| coords.contains(&model.divisor_coords[i]))
                    .collect();
                if positive(s) {
                    deep.push(CenterSpec::coords(coords));
                }
            }
        }
    }
    if !deep.is_empty() {
        return deep;
    }
    pair.strata()
        .keys()
        .filter(|j| j.len() == 1 && positive(**j))
        .map(|j| CenterSpec::stratum(j.iter()))
        .collect()
}

/// Spec files of a corpus directory, sorted by file name.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<Entry>, SpecError> {
    let read = std::fs::read_dir(dir).map_err(|source| SpecError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths: Vec<PathBuf> = read
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    Ok(paths
        .iter()
        .map(|p| {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let spec = read_spec(p).map_err(|e| e.to_string()).and_then(|f| {
                f.pair
                    .ok_or_else(|| "the suite verifies [pair] specs only".to_string())
            });
            Entry { name, spec }
        })
        .collect())
}

/// Writes `entries` as spec files named after the entries.
pub fn write_corpus_dir(dir: &Path, entries: &[Entry]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for e in entries {
        if let Ok(spec) = &e.spec {
            let file = SpecFile {
                name: Some(e.name.clone()),
                pair: Some(spec.clone()),
                discrepancy: None,
            };
            std::fs::write(dir.join(format!("{}.toml", e.name)), crate::spec::emit_spec_file(&file))?;
        }
    }
    Ok(())
}

pub fn run_verification_suite(config: &SuiteConfig) -> Result<Report, SpecError> {
    let mut entries = generate_corpus(config.seed, &config.limits);
    if let Some(dir) = &config.corpus {
        entries.extend(load_corpus_dir(dir)?);
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = config.jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder.build().expect("worker pool");
    let results = pool.install(|| entries.par_iter().map(|e| run_entry(e, config)).collect());
    Ok(Report {
        seed: config.seed,
        limits: config.limits,
        checks: config.checks.clone(),
        mutation: config.mutation,
        entries: results,
    })
}

fn run_entry(entry: &Entry, config: &SuiteConfig) -> EntryResult {
    let mut result = EntryResult {
        name: entry.name.clone(),
        input: Value::Null,
        checks: Vec::new(),
        error: None,
    };
    let spec = match &entry.spec {
        Ok(s) => s,
        Err(e) => {
            result.error = Some(e.clone());
            return result;
        }
    };
    result.input = serde_json::to_value(spec).expect("specs serialize");
    let outcome = match spec {
        PairSpec::Fibration { base, fiber } => run_bundle(base, fiber, config),
        PairSpec::BlowupChain { base, centers } => run_chain(base, centers, config),
        other => run_chain(other, &[], config),
    };
    match outcome {
        Ok(checks) => result.checks = checks,
        Err(e) => result.error = Some(e),
    }
    result
}

/// Blow-ups of a chain, with the mutated exceptional multiplicity when requested.
fn build_steps(
    base: &PairSpec,
    centers: &[CenterSpec],
    mutation: Option<i64>,
) -> Result<(SncPair, Vec<(CenterDescriptor, BlowupRecord)>), String> {
    let base = build_pair(base, "base").map_err(|e| e.to_string())?;
    let mut current = base.clone();
    let mut steps = Vec::new();
    for (i, c) in centers.iter().enumerate() {
        let center = build_center(&current, c, &format!("centers[{i}]")).map_err(|e| e.to_string())?;
        let m_e = exceptional_mult(&current, &center) + mutation.unwrap_or(0);
        let record = blow_up_with_mult(&current, &center, m_e)
            .or_else(|_| blow_up_with_mult(&current, &center, exceptional_mult(&current, &center)))
            .map_err(|e| format!("centers[{i}]: {e}"))?;
        current = record.new_pair.clone();
        steps.push((center, record));
    }
    Ok((base, steps))
}

fn check(check: &'static str, step: Option<usize>, ok: bool, detail: Value) -> CheckResult {
    CheckResult {
        check,
        step,
        ok,
        detail,
    }
}

fn run_chain(base_spec: &PairSpec, centers: &[CenterSpec], config: &SuiteConfig) -> Result<Vec<CheckResult>, String> {
    let (base, steps) = build_steps(base_spec, centers, config.mutation)?;
    let mut out = Vec::new();
    let pairs: Vec<&SncPair> = std::iter::once(&base).chain(steps.iter().map(|(_, r)| &r.new_pair)).collect();

    if config.checks.contains(&CheckKind::Blowup) {
        let chi0 = chi_d(&base).map_err(|e| e.to_string())?;
        for (k, p) in pairs.iter().enumerate() {
            let chi = chi_d(p).map_err(|e| e.to_string())?;
            if k > 0 {
                let residual = &chi - &chi0;
                out.push(check(
                    "chi_d_invariance",
                    Some(k),
                    residual.is_zero(),
                    json!({ "chi_d": encode::rat(&chi), "residual": encode::rat(&residual) }),
                ));
            }
            out.push(match specialization_limit(p) {
                Ok(limit) => check(
                    "bridge",
                    Some(k),
                    limit == chi,
                    json!({ "limit": encode::rat(&limit), "chi_d": encode::rat(&chi) }),
                ),
                Err(e) => check("bridge", Some(k), false, json!({ "error": e.to_string() })),
            });
        }
    }

    let effective = require_effective(&base).is_ok();
    if effective && config.checks.contains(&CheckKind::Cov) {
        for (k, (_, record)) in steps.iter().enumerate() {
            let cert = cov_certificate(pairs[k], record).map_err(|e| e.to_string())?;
            let residual = &cert.lhs - &cert.rhs;
            let mut detail = json!({ "residual": encode::ratfunc(&residual) });
            if !cert.equal {
                detail["lhs"] = encode::ratfunc(&cert.lhs);
                detail["rhs"] = encode::ratfunc(&cert.rhs);
            }
            out.push(check("cov", Some(k + 1), cert.equal, detail));
        }
    }

    let in_scope = tau_reachable(&base).is_ok();
    if in_scope && config.checks.contains(&CheckKind::Blowup) {
        for (k, (center, record)) in steps.iter().enumerate() {
            let cert = verify_blowup_record(pairs[k], center, record).map_err(|e| e.to_string())?;
            out.push(check("blowup", Some(k + 1), cert.ok, encode::blowup_certificate(&cert)));
        }
    }

    if in_scope && config.checks.contains(&CheckKind::Taubir) {
        let mut tau = initial_tau(base_spec, &base)?;
        if let PairSpec::Gamma { n, d, mults } = base_spec {
            if let Some(low) = low_dimensional_tau(*n, *d, mults) {
                out.push(check(
                    "normal_form",
                    Some(0),
                    low == tau,
                    json!({ "closed_form": encode::tau(&tau), "direct": encode::tau(&low) }),
                ));
            }
        }
        for (k, p) in pairs.iter().enumerate() {
            if k > 0 {
                let (center, record) = &steps[k - 1];
                let cert = verify_blowup_record(pairs[k - 1], center, record).map_err(|e| e.to_string())?;
                tau = &tau + &cert.rhs;
            }
            let value = tau_bir(p, &tau).map_err(|e| e.to_string())?;
            out.push(check(
                "taubir",
                Some(k),
                value.is_zero(),
                json!({ "tau": encode::tau(&tau), "tau_bir": encode::tau(&value) }),
            ));
        }
    }
    Ok(out)
}

/// `τ_d` of the base: the projective normal form for `γ`-models, otherwise the closed form.
fn initial_tau(spec: &PairSpec, base: &SncPair) -> Result<TauExpr, String> {
    match spec {
        PairSpec::Gamma { n, d, mults } => tau_projective_normal_form(*n, *d, mults).map_err(|e| e.to_string()),
        _ => tau_reachable(base).map_err(|e| e.to_string()),
    }
}

/// The curve and surface values computed without the normalization.
fn low_dimensional_tau(n: usize, d: i64, mults: &[u64]) -> Option<TauExpr> {
    let m = |i: usize| mults.get(i).copied().unwrap_or(0);
    match n {
        1 => Some(tau_p1_eval(m(0), d)),
        2 => Some(tau_p2_eval(m(0), m(1), d)),
        _ => None,
    }
}

fn run_bundle(base: &PairSpec, fiber: &PairSpec, config: &SuiteConfig) -> Result<Vec<CheckResult>, String> {
    if !config.checks.contains(&CheckKind::Bundle) {
        return Ok(Vec::new());
    }
    let b = build_pair(base, "base").map_err(|e| e.to_string())?;
    let f = build_pair(fiber, "fiber").map_err(|e| e.to_string())?;
    let cert = verify_bundle_functional_equation(&b, &f).map_err(|e| e.to_string())?;
    Ok(vec![check("bundle", None, cert.ok, encode::bundle_certificate(&cert))])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        let mut c = SuiteConfig::new(7);
        c.limits.cases = 6;
        c.jobs = Some(2);
        c
    }

    #[test]
    fn generated_entries_are_valid_and_reproducible() {
        let limits = Limits {
            cases: 10,
            ..Limits::default()
        };
        let a = generate_corpus(3, &limits);
        let b = generate_corpus(3, &limits);
        assert_eq!(a.len(), 30);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.spec, y.spec);
            assert!(build_pair(x.spec.as_ref().unwrap(), "pair").is_ok(), "{}", x.name);
        }
    }

    #[test]
    fn small_suite_passes() {
        let report = run_verification_suite(&small()).unwrap();
        assert!(report.passed(), "{}", report.to_json_string());
        assert!(report.tally("cov").0 > 0);
        assert!(report.tally("blowup").0 > 0);
        assert!(report.tally("bundle").0 > 0);
    }

    #[test]
    fn mutation_is_caught() {
        let mut c = small();
        c.mutation = Some(1);
        assert!(!run_verification_suite(&c).unwrap().passed());
    }
}
