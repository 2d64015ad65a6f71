//! Acceptance gate. Runs every criterion in order against its time bound and prints one
//! `PASS`/`FAIL` line per criterion; exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snc_cli::spec::{build_chain, build_pair, PairSpec};
use snc_cli::suite::{generate_corpus, run_verification_suite, Entry, Limits, SuiteConfig, DEFAULT_SEED};
use snc_core::invariants::{chi_d, chi_d_closed_form_projective, InvariantVector};
use snc_core::motivic::{
    change_of_variables_check, cov_certificate, motivic_volume, specialization_limit, stringy_invariants, zeta_evaluate,
    DiscrepancyData, StringyReport,
};
use snc_core::pairs::{blow_up, coordinate_center, gamma_model_pair, projective_space_pair};
use snc_core::tauledger::{tau_bir, tau_p1_eval, tau_p2_eval, tau_projective_normal_form};
use snc_core::{GradedPoly, MotClass, Rat, RatFunc, SncPair};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn r(p: i64, q: i64) -> Rat {
    Rat::new(p, q)
}

/// `Σ c t^e` with integer exponents.
fn t_poly(terms: &[(i64, i64)]) -> GradedPoly {
    terms
        .iter()
        .fold(GradedPoly::zero(), |acc, &(e, c)| &acc + &GradedPoly::monomial(Rat::from(c), e, 1))
}

fn corpus() -> Vec<Entry> {
    generate_corpus(DEFAULT_SEED, &Limits::default())
}

fn family<'a>(entries: &'a [Entry], suffix: &'a str) -> impl Iterator<Item = (&'a str, &'a PairSpec)> {
    entries
        .iter()
        .filter(move |e| e.name.ends_with(suffix))
        .map(|e| (e.name.as_str(), e.spec.as_ref().expect("generated spec")))
}

fn chain_len(spec: &PairSpec) -> usize {
    match spec {
        PairSpec::BlowupChain { centers, .. } => centers.len(),
        _ => 0,
    }
}

fn reference_value_table() -> Outcome {
    let cp1 = InvariantVector::of_class(&MotClass::projective_space(1), 1);
    let cp2 = InvariantVector::of_class(&MotClass::projective_space(2), 2);
    ensure(
        (&cp1.chi, &cp1.chi_prime, &cp1.chi_double_prime) == (&r(2, 1), &r(2, 1), &r(0, 1)),
        || format!("CP1 gives ({}, {}, {})", cp1.chi, cp1.chi_prime, cp1.chi_double_prime),
    )?;
    ensure(
        (&cp2.chi, &cp2.chi_prime, &cp2.chi_double_prime) == (&r(3, 1), &r(6, 1), &r(2, 1)),
        || format!("CP2 gives ({}, {}, {})", cp2.chi, cp2.chi_prime, cp2.chi_double_prime),
    )?;
    let mut count = 0;
    for d in 1..=4i64 {
        for m in 0..=8u64 {
            let v = InvariantVector::of_pair(&gamma_model_pair(1, d, &[m]).unwrap()).unwrap();
            ensure(v.chi_prime == r(2, 1), || format!("χ′_{d}(CP1, γ_{m}) = {}", v.chi_prime))?;
            count += 1;
            for m2 in 0..=8u64 {
                let v = InvariantVector::of_pair(&gamma_model_pair(2, d, &[m, m2]).unwrap()).unwrap();
                let (a, b) = (m as i64, m2 as i64);
                let expected =
                    r(6, 1) - r(2, 1) * (r(a, a + d) + r(b, b + d) + r(a + b + 3 * d, a + b + 2 * d));
                ensure(v.chi_double_prime == r(2, 1), || {
                    format!("χ″_{d}(CP2, γ_{m},{m2}) = {}", v.chi_double_prime)
                })?;
                ensure(v.chi_prime == expected, || {
                    format!("χ′_{d}(CP2, γ_{m},{m2}) = {}, expected {expected}", v.chi_prime)
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("CP1, CP2 and {count} γ-model pairs"))
}

fn closed_form_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut count = 0;
    while count < 1000 {
        let n = rng.gen_range(1..=5usize);
        let d = rng.gen_range(1..=3i64);
        let mults: Vec<i64> = (0..=n).map(|_| rng.gen_range(-6..=6)).collect();
        if mults.contains(&-d) {
            continue;
        }
        // a zero multiplicity is an absent hyperplane
        let assigned: Vec<(usize, i64)> = mults.iter().copied().enumerate().filter(|&(_, m)| m != 0).collect();
        let pair = projective_space_pair(n, d, &assigned).unwrap();
        let sum = chi_d(&pair).unwrap();
        let closed = chi_d_closed_form_projective(n, d, &mults).unwrap();
        ensure(sum == closed, || format!("n={n} d={d} m={mults:?}: {sum} != {closed}"))?;
        count += 1;
    }
    Ok(format!("{count} tuples"))
}

fn blow_up_invariance(entries: &[Entry]) -> Outcome {
    let (mut cases, mut long) = (0, 0);
    for (name, spec) in family(entries, "-gamma") {
        let chain = build_chain(spec, "pair").map_err(|e| format!("{name}: {e}"))?;
        ensure(chain.base.is_d_canonical(), || format!("{name} is not d-canonical"))?;
        let chi = chi_d(&chain.base).unwrap();
        for (k, p) in chain.pairs().enumerate() {
            let now = chi_d(p).unwrap();
            ensure(now == chi, || format!("{name} step {k}: χ_d changed by {}", &now - &chi))?;
        }
        cases += 1;
        long += usize::from(chain_len(spec) == 3);
    }
    ensure(cases >= 200 && long > 0, || format!("only {cases} cases, {long} of length 3"))?;
    Ok(format!("{cases} d-canonical chains, {long} of length 3"))
}

fn change_of_variables(entries: &[Entry]) -> Outcome {
    // (CP², ∅) blown up at a point: both sides are 1 + L^{-1} + L^{-2}
    let plane = projective_space_pair(2, 1, &[]).unwrap();
    let point = coordinate_center(&plane, &[1, 2]).unwrap();
    let cert = change_of_variables_check(&plane, &point).unwrap();
    let expected = RatFunc::new(t_poly(&[(0, 1), (2, 1), (4, 1)]), t_poly(&[(4, 1)])).unwrap();
    ensure(cert.equal && cert.lhs == expected, || format!("Bl0 CP2: {} vs {}", cert.lhs, cert.rhs))?;
    ensure(zeta_evaluate(&plane, &Rat::one()).unwrap() == expected, || "Z(CP2) != 1 + L^-1 + L^-2".into())?;

    let (mut cases, mut steps) = (1, 1);
    for (name, spec) in family(entries, "-effective") {
        let chain = build_chain(spec, "pair").map_err(|e| format!("{name}: {e}"))?;
        let pairs: Vec<&SncPair> = chain.pairs().collect();
        for (k, (_, record)) in chain.steps.iter().enumerate() {
            let cert = cov_certificate(pairs[k], record).map_err(|e| format!("{name}: {e}"))?;
            ensure(cert.equal, || format!("{name} step {}: {} != {}", k + 1, cert.lhs, cert.rhs))?;
            steps += 1;
        }
        cases += 1;
    }
    ensure(cases >= 200, || format!("only {cases} cases"))?;
    Ok(format!("{cases} effective cases, {steps} blow-ups, Bl0 CP2 included"))
}

fn specialization_bridge(entries: &[Entry]) -> Outcome {
    let mut count = 0;
    for e in entries {
        let spec = e.spec.as_ref().unwrap();
        let pairs: Vec<SncPair> = match spec {
            PairSpec::Fibration { base, fiber } => vec![
                build_pair(base, "base").unwrap(),
                build_pair(fiber, "fiber").unwrap(),
                build_pair(spec, "pair").unwrap(),
            ],
            _ => build_chain(spec, "pair").unwrap().pairs().cloned().collect(),
        };
        for p in &pairs {
            let limit = specialization_limit(p).map_err(|err| format!("{}: {err}", e.name))?;
            let chi = chi_d(p).unwrap();
            ensure(limit == chi, || format!("{}: limit {limit} != χ_d {chi}", e.name))?;
            count += 1;
        }
    }
    Ok(format!("{count} pairs"))
}

fn tau_bir_base_cases() -> Outcome {
    let mut count = 0;
    for d in 1..=5i64 {
        for m1 in 0..=20u64 {
            let p1 = gamma_model_pair(1, d, &[m1]).unwrap();
            let value = tau_p1_eval(m1, d);
            ensure(tau_bir(&p1, &value).unwrap().is_zero(), || format!("τ^bir(CP1, γ_{m1}) ≠ 0 at d={d}"))?;
            ensure(tau_projective_normal_form(1, d, &[m1]).unwrap() == value, || {
                format!("normal form of (CP1, γ_{m1}) at d={d}")
            })?;
            count += 1;
            for m2 in 0..=20u64 {
                let p2 = gamma_model_pair(2, d, &[m1, m2]).unwrap();
                let value = tau_p2_eval(m1, m2, d);
                let bir = tau_bir(&p2, &value).unwrap();
                ensure(bir.is_zero(), || format!("τ^bir(CP2, γ_{m1},{m2}) = {bir} at d={d}"))?;
                ensure(tau_projective_normal_form(2, d, &[m1, m2]).unwrap() == value, || {
                    format!("normal form of (CP2, γ_{m1},{m2}) at d={d}")
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} γ-model pairs"))
}

fn certificates(report: &snc_cli::Report) -> Outcome {
    let failed: Vec<&str> = report.entries.iter().filter(|e| !e.ok()).map(|e| e.name.as_str()).collect();
    ensure(failed.is_empty(), || format!("failing entries: {}", failed.join(", ")))?;
    let (blowups, ok_b) = report.tally("blowup");
    let (bundles, ok_f) = report.tally("bundle");
    ensure(blowups > 0 && bundles > 0, || "no certificates were produced".into())?;
    ensure(ok_b == blowups && ok_f == bundles, || "nonzero residual".into())?;
    Ok(format!(
        "{} entries, {blowups} blow-up and {bundles} bundle certificates",
        report.entries.len()
    ))
}

fn blown_up_plane(a: Rat) -> (SncPair, DiscrepancyData) {
    let plane = projective_space_pair(2, 1, &[]).unwrap();
    let c = coordinate_center(&plane, &[1, 2]).unwrap();
    let blown = blow_up(&plane, &c).unwrap().new_pair;
    let disc = DiscrepancyData::from_pair(&blown, vec![a]).unwrap();
    (blown, disc)
}

fn stringy_sanity() -> Outcome {
    let (blown, crepant) = blown_up_plane(Rat::zero());
    let plain = InvariantVector::of_class(blown.ambient(), 2);
    match stringy_invariants(&crepant).unwrap() {
        StringyReport::Polynomial { poincare, chi, chi_prime, chi_double_prime } => ensure(
            poincare == plain.poincare
                && chi == plain.chi
                && chi_prime == plain.chi_prime
                && chi_double_prime == plain.chi_double_prime,
            || "crepant data differ from the resolution".into(),
        )?,
        other => return Err(format!("crepant data gave {other:?}")),
    }
    let (_, one) = blown_up_plane(Rat::one());
    let base = MotClass::projective_space(2);
    ensure(stringy_invariants(&one).unwrap().poincare() == Some(base.poincare()), || {
        "a = 1 does not recover CP2".into()
    })?;
    let (_, half) = blown_up_plane(r(1, 2));
    match stringy_invariants(&half).unwrap() {
        StringyReport::NonPolynomial(f) => {
            let scaled = motivic_volume(&half).unwrap().shift(&Rat::from(4));
            ensure(f == scaled && f.as_laurent().is_none(), || format!("realization {f}"))?
        }
        other => return Err(format!("a = 1/2 gave {other:?}")),
    }
    Ok("crepant, a = 1 and a = 1/2 fixtures".into())
}

fn determinism(first: &str) -> Outcome {
    let second = run_verification_suite(&SuiteConfig::new(DEFAULT_SEED))
        .map_err(|e| e.to_string())?
        .to_json_string();
    ensure(first == second, || "reports differ".into())?;
    Ok(format!("{} bytes identical", first.len()))
}

struct Gate {
    failures: usize,
}

impl Gate {
    fn run(&mut self, index: usize, title: &str, bound: Option<Duration>, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match (outcome, bound) {
            (Ok(_), Some(b)) if elapsed > b => Err(format!("exceeded {b:?}")),
            (o, _) => o,
        };
        let bound = bound.map_or(String::new(), |b| format!(" < {b:?}"));
        match outcome {
            Ok(detail) => println!("PASS {index} {title}: {detail} ({elapsed:.2?}{bound})"),
            Err(why) => {
                self.failures += 1;
                println!("FAIL {index} {title}: {why} ({elapsed:.2?}{bound})");
            }
        }
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut gate = Gate { failures: 0 };
    let entries = corpus();
    gate.run(1, "reference-value table", Some(secs(1)), reference_value_table);
    gate.run(2, "closed-form oracle", Some(secs(5)), closed_form_oracle);
    gate.run(3, "blow-up invariance of χ_d", Some(secs(10)), || blow_up_invariance(&entries));
    gate.run(4, "change of variables", Some(secs(30)), || change_of_variables(&entries));
    gate.run(5, "specialization bridge", None, || specialization_bridge(&entries));
    gate.run(6, "τ^bir base cases and vanishing", Some(secs(1)), tau_bir_base_cases);
    let mut first = String::new();
    gate.run(7, "functional-equation certificates", Some(secs(60)), || {
        let report = run_verification_suite(&SuiteConfig::new(DEFAULT_SEED)).map_err(|e| e.to_string())?;
        first = report.to_json_string();
        certificates(&report)
    });
    gate.run(8, "stringy sanity", None, stringy_sanity);
    gate.run(9, "determinism", None, || determinism(&first));
    if gate.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
