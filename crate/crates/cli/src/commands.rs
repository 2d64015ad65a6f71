//! Command-line interface. Every command prints JSON (or TOML for `--emit`) on stdout.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input error.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use snc_core::invariants::{chi_d_closed_form_projective, InvariantVector};
use snc_core::motivic::{
    cov_certificate, det_line_exponents, require_effective, specialization_limit, stringy_invariants, zeta_evaluate,
};
use snc_core::pairs::blow_up;
use snc_core::tauledger::{
    bcov_klt_symbolic, normalization_term, tau_bir, tau_reachable, verify_blowup_record, TauError,
};
use snc_core::{Rat, SncPair};

use crate::encode;
use crate::spec::{build_center, emit_pair_spec, load_pair_spec, CenterSpec, Loaded, SpecError};
use crate::suite::{
    generate_corpus, run_verification_suite, seed_from_env, write_corpus_dir, CheckKind, Limits, SuiteConfig,
    DEFAULT_SEED,
};

#[derive(Debug, Parser)]
#[command(name = "snc", version, about = "Exact invariants and certificates for SNC pairs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pair-spec utilities.
    #[command(subcommand)]
    Pair(PairCommand),
    /// χ_d, χ′_d, χ″_d and P_{t,d} of a pair, or stringy invariants of discrepancy data.
    Invariants { file: PathBuf },
    /// Z(X, D; L^{-a}) realized with L = t².
    Zeta {
        file: PathBuf,
        /// Rational `a`; defaults to 1/d.
        #[arg(long)]
        at: Option<String>,
    },
    /// Stringy Poincaré polynomial and χ-invariants of discrepancy data.
    Stringy { file: PathBuf },
    /// Blows up along a center given as `stratum:0,1` or `coords:1,2`.
    Blowup {
        file: PathBuf,
        #[arg(long)]
        center: String,
        /// Print the blown-up pair as an explicit spec instead of the report.
        #[arg(long)]
        emit: bool,
    },
    /// Determinant-line exponents of every stratum.
    Detline { file: PathBuf },
    /// τ_d and τ^bir_d of a pair, or the symbolic BCOV invariant of discrepancy data.
    Tau {
        file: PathBuf,
        /// Label of the opaque atoms for discrepancy data.
        #[arg(long, default_value = "X")]
        label: String,
        /// Values of d to report for discrepancy data.
        #[arg(long = "d", default_values_t = [1i64])]
        d_values: Vec<i64>,
    },
    /// Runs the verification suite and prints a summary.
    Verify {
        #[arg(value_enum)]
        which: VerifyTarget,
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Runs every check and prints the full JSON report.
    Report {
        #[command(flatten)]
        suite: SuiteArgs,
    },
    /// Writes the generated corpus as spec files.
    Corpus {
        /// Output directory.
        dir: PathBuf,
        #[command(flatten)]
        suite: SuiteArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum PairCommand {
    /// Loads and validates a spec.
    Validate {
        file: PathBuf,
        /// Print the explicit form instead of the summary.
        #[arg(long)]
        emit: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VerifyTarget {
    Cov,
    Blowup,
    Bundle,
    Taubir,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct SuiteArgs {
    /// Seed; the SNC_SEED environment variable takes precedence.
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = Limits::default().cases)]
    pub cases: usize,
    #[arg(long, default_value_t = Limits::default().n_max)]
    pub n_max: usize,
    #[arg(long, default_value_t = Limits::default().d_max)]
    pub d_max: i64,
    #[arg(long, default_value_t = Limits::default().m_max)]
    pub m_max: i64,
    #[arg(long, default_value_t = Limits::default().chain_len)]
    pub chain_len: usize,
    /// Extra spec files to verify.
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Offset added to every exceptional multiplicity (mutation testing).
    #[arg(long, allow_hyphen_values = true)]
    pub mutate: Option<i64>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Also write the full JSON report here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl SuiteArgs {
    fn config(&self, checks: BTreeSet<CheckKind>) -> Result<SuiteConfig, String> {
        if self.n_max == 0 || self.d_max < 1 || self.m_max < 1 || self.chain_len == 0 {
            return Err("limits must be positive".into());
        }
        Ok(SuiteConfig {
            seed: seed_from_env(self.seed),
            limits: Limits {
                n_max: self.n_max,
                d_max: self.d_max,
                m_max: self.m_max,
                chain_len: self.chain_len,
                cases: self.cases,
            },
            checks,
            mutation: self.mutate,
            corpus: self.corpus.clone(),
            jobs: self.jobs,
        })
    }
}

/// What a command produced, and the exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Success(String),
    VerificationFailed(String),
    InputError(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success(_) => 0,
            Outcome::VerificationFailed(_) => 1,
            Outcome::InputError(_) => 2,
        }
    }
}

fn json_out(v: Value) -> Outcome {
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    Outcome::Success(s)
}

fn verdict(ok: bool, v: Value) -> Outcome {
    match json_out(v) {
        Outcome::Success(s) if !ok => Outcome::VerificationFailed(s),
        other => other,
    }
}

fn input<E: std::fmt::Display>(e: E) -> Outcome {
    Outcome::InputError(format!("error: {e}\n"))
}

fn load(file: &Path) -> Result<Loaded, Outcome> {
    load_pair_spec(file).map_err(|e: SpecError| input(e))
}

fn load_pair(file: &Path) -> Result<SncPair, Outcome> {
    match load(file)? {
        Loaded::Pair(p) => Ok(p),
        Loaded::Discrepancy(_) => Err(input("expected a [pair] spec")),
    }
}

pub fn run(cli: Cli) -> Outcome {
    match execute(cli) {
        Ok(o) | Err(o) => o,
    }
}

fn execute(cli: Cli) -> Result<Outcome, Outcome> {
    Ok(match cli.command {
        Command::Pair(PairCommand::Validate { file, emit }) => match load(&file)? {
            Loaded::Pair(p) if emit => Outcome::Success(emit_pair_spec(&p, None)),
            Loaded::Pair(p) => json_out(json!({ "valid": true, "kind": "pair", "pair": encode::pair(&p) })),
            Loaded::Discrepancy(d) => {
                json_out(json!({ "valid": true, "kind": "discrepancy", "discrepancy": encode::discrepancy(&d) }))
            }
        },
        Command::Invariants { file } => match load(&file)? {
            Loaded::Pair(p) => {
                let v = InvariantVector::of_pair(&p).map_err(input)?;
                let mut out = json!({ "pair": encode::pair(&p), "weighted": encode::invariants(&v) });
                if let Some(model) = p.model() {
                    if model.divisor_coords.len() == model.n + 1 {
                        let mut mults = vec![0; model.n + 1];
                        for (i, &c) in model.divisor_coords.iter().enumerate() {
                            mults[c] = p.mult(i);
                        }
                        let closed = chi_d_closed_form_projective(model.n, p.d(), &mults).map_err(input)?;
                        out["chi_d_closed_form"] = encode::rat(&closed);
                    }
                }
                json_out(out)
            }
            Loaded::Discrepancy(d) => json_out(json!({ "stringy": encode::stringy(&stringy_invariants(&d).map_err(input)?) })),
        },
        Command::Zeta { file, at } => {
            let p = load_pair(&file)?;
            let a = match at {
                Some(s) => s.parse::<Rat>().map_err(input)?,
                None => Rat::new(1, p.d()),
            };
            let z = zeta_evaluate(&p, &a).map_err(input)?;
            let mut out = json!({ "a": encode::rat(&a), "value": encode::ratfunc(&z) });
            if a == Rat::new(1, p.d()) {
                if let Ok(limit) = specialization_limit(&p) {
                    out["limit_t2n_at_1"] = encode::rat(&limit);
                }
            }
            json_out(out)
        }
        Command::Stringy { file } => match load(&file)? {
            Loaded::Discrepancy(d) => json_out(encode::stringy(&stringy_invariants(&d).map_err(input)?)),
            Loaded::Pair(_) => return Err(input("expected a [discrepancy] spec")),
        },
        Command::Blowup { file, center, emit } => {
            let p = load_pair(&file)?;
            let spec = parse_center(&center).map_err(input)?;
            let c = build_center(&p, &spec, "--center").map_err(input)?;
            let record = blow_up(&p, &c).map_err(input)?;
            if emit {
                return Ok(Outcome::Success(emit_pair_spec(&record.new_pair, None)));
            }
            let mut ok = true;
            let mut out = json!({
                "center": encode::center(&c),
                "exceptional_index": record.exceptional_index,
                "m_e": record.m_e,
                "pair": encode::pair(&record.new_pair),
            });
            if require_effective(&p).is_ok() {
                let cert = cov_certificate(&p, &record).map_err(input)?;
                ok &= cert.equal;
                out["cov"] = json!({ "equal": cert.equal, "value": encode::ratfunc(&cert.lhs) });
            }
            if tau_reachable(&p).is_ok() {
                let cert = verify_blowup_record(&p, &c, &record).map_err(input)?;
                ok &= cert.ok;
                out["functional_equation"] = encode::blowup_certificate(&cert);
            }
            verdict(ok, out)
        }
        Command::Detline { file } => {
            let p = load_pair(&file)?;
            json_out(json!({ "exponents": encode::det_line(&det_line_exponents(&p).map_err(input)?) }))
        }
        Command::Tau { file, label, d_values } => match load(&file)? {
            Loaded::Pair(p) => {
                let normalization = normalization_term(&p).map_err(input)?;
                let mut out = json!({ "normalization": encode::tau(&normalization) });
                match tau_reachable(&p) {
                    Ok(tau) => {
                        let bir = tau_bir(&p, &tau).map_err(input)?;
                        out["tau"] = encode::tau(&tau);
                        out["tau_bir"] = encode::tau(&bir);
                    }
                    Err(e @ (TauError::NotDCanonical(_) | TauError::OutOfScope(_))) => {
                        out["tau"] = Value::Null;
                        out["note"] = json!(e.to_string());
                    }
                    Err(e) => return Err(input(e)),
                }
                json_out(out)
            }
            Loaded::Discrepancy(d) => {
                let mut entries = Vec::new();
                for dv in d_values {
                    if dv < 1 {
                        return Err(input("d must be positive"));
                    }
                    let e = bcov_klt_symbolic(&d, &format!("{label}@d={dv}")).map_err(input)?;
                    entries.push(json!({ "d": dv, "tau": encode::tau(&e) }));
                }
                json_out(json!({ "bcov": entries }))
            }
        },
        Command::Verify { which, suite } => {
            let checks = match which {
                VerifyTarget::Cov => [CheckKind::Cov].into(),
                VerifyTarget::Blowup => [CheckKind::Blowup].into(),
                VerifyTarget::Bundle => [CheckKind::Bundle].into(),
                VerifyTarget::Taubir => [CheckKind::Taubir].into(),
                VerifyTarget::All => CheckKind::ALL.into_iter().collect(),
            };
            run_suite(&suite, checks, false)?
        }
        Command::Report { suite } => run_suite(&suite, CheckKind::ALL.into_iter().collect(), true)?,
        Command::Corpus { dir: out, suite } => {
            let config = suite.config(BTreeSet::new()).map_err(input)?;
            let entries = generate_corpus(config.seed, &config.limits);
            write_corpus_dir(&out, &entries).map_err(input)?;
            Outcome::Success(format!("wrote {} specs to {}\n", entries.len(), out.display()))
        }
    })
}

fn run_suite(args: &SuiteArgs, checks: BTreeSet<CheckKind>, full: bool) -> Result<Outcome, Outcome> {
    let config = args.config(checks).map_err(input)?;
    let report = run_verification_suite(&config).map_err(input)?;
    let text = report.to_json_string();
    if let Some(path) = &args.out {
        std::fs::write(path, &text).map_err(input)?;
    }
    let body = if full {
        text
    } else {
        let mut lines = String::new();
        let names = ["chi_d_invariance", "bridge", "cov", "blowup", "normal_form", "taubir", "bundle"];
        for name in names {
            let (total, passed) = report.tally(name);
            if total > 0 {
                lines.push_str(&format!("{name:<17} {passed}/{total} passed\n"));
            }
        }
        for e in report.entries.iter().filter(|e| !e.ok()) {
            let why = e.error.clone().unwrap_or_else(|| {
                e.checks
                    .iter()
                    .filter(|c| !c.ok)
                    .map(|c| format!("{} at step {}", c.check, c.step.map_or("-".into(), |s| s.to_string())))
                    .collect::<Vec<_>>()
                    .join(", ")
            });
            lines.push_str(&format!("FAIL {}: {why}\n", e.name));
        }
        lines.push_str(&format!(
            "seed {} · {} entries · {}\n",
            config.seed,
            report.entries.len(),
            if report.passed() { "all passed" } else { "FAILED" }
        ));
        lines
    };
    Ok(if report.passed() {
        Outcome::Success(body)
    } else {
        Outcome::VerificationFailed(body)
    })
}

/// `stratum:0,1` or `coords:1,2`.
pub fn parse_center(s: &str) -> Result<CenterSpec, String> {
    let (kind, list) = s
        .split_once(':')
        .ok_or_else(|| format!("center {s:?} must look like stratum:0,1 or coords:1,2"))?;
    let ix = list
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<usize>().map_err(|_| format!("bad index {x:?} in center")))
        .collect::<Result<Vec<_>, _>>()?;
    match kind.trim() {
        "stratum" => Ok(CenterSpec::stratum(ix)),
        "coords" => Ok(CenterSpec::coords(ix)),
        other => Err(format!("unknown center kind {other:?}")),
    }
}
