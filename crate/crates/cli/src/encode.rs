//! JSON encodings. Rationals are `"p/q"` strings, polynomials are lists of
//! `[[numerator, grain], "coefficient"]` (exponent `numerator/grain`) sorted by exponent, and
//! object keys are sorted, so equal values always serialize to equal bytes.

use serde_json::{json, Value};
use snc_core::invariants::InvariantVector;
use snc_core::motivic::{DetLineExponent, DiscrepancyData, StringyReport};
use snc_core::tauledger::{BlowupCertificate, BundleCertificate};
use snc_core::{CenterDescriptor, GradedPoly, MotClass, Rat, RatFunc, SncPair, Subset, TauExpr};

pub fn rat(r: &Rat) -> Value {
    Value::String(r.to_string())
}

pub fn poly(p: &GradedPoly) -> Value {
    let grain = p.grain();
    Value::Array(p.terms().map(|(e, c)| json!([[e, grain], c.to_string()])).collect())
}

pub fn ratfunc(f: &RatFunc) -> Value {
    json!({ "num": poly(f.num()), "den": poly(f.den()) })
}

pub fn class(c: &MotClass) -> Value {
    poly(c.poincare())
}

pub fn subset(j: Subset) -> Value {
    Value::Array(j.iter().map(|i| json!(i)).collect())
}

pub fn tau(e: &TauExpr) -> Value {
    let terms: Vec<Value> = e.terms().map(|(a, c)| json!([a.to_string(), c.to_string()])).collect();
    json!({ "constant": rat(e.constant()), "terms": terms, "text": e.to_string() })
}

pub fn pair(p: &SncPair) -> Value {
    let divisors: Vec<Value> = p
        .divisors()
        .iter()
        .map(|x| json!({ "label": x.label, "mult": x.mult }))
        .collect();
    let strata: Vec<Value> = p
        .strata()
        .iter()
        .map(|(j, c)| json!({ "subset": subset(*j), "class": class(c) }))
        .collect();
    json!({
        "n": p.n(),
        "d": p.d(),
        "d_canonical": p.is_d_canonical(),
        "divisors": divisors,
        "strata": strata,
    })
}

pub fn discrepancy(disc: &DiscrepancyData) -> Value {
    let strata: Vec<Value> = disc
        .strata()
        .iter()
        .map(|(j, c)| json!({ "subset": subset(*j), "class": class(c) }))
        .collect();
    json!({
        "n": disc.n(),
        "discrepancies": disc.discrepancies().iter().map(rat).collect::<Vec<_>>(),
        "strata": strata,
    })
}

pub fn center(c: &CenterDescriptor) -> Value {
    json!({ "codim": c.codim(), "contains": subset(c.contains()), "class": class(&c.class()) })
}

pub fn invariants(v: &InvariantVector) -> Value {
    json!({
        "chi": rat(&v.chi),
        "chi_prime": rat(&v.chi_prime),
        "chi_double_prime": rat(&v.chi_double_prime),
        "poincare": poly(&v.poincare),
    })
}

pub fn stringy(r: &StringyReport) -> Value {
    match r {
        StringyReport::Polynomial {
            poincare,
            chi,
            chi_prime,
            chi_double_prime,
        } => json!({
            "kind": "polynomial",
            "poincare": poly(poincare),
            "chi": rat(chi),
            "chi_prime": rat(chi_prime),
            "chi_double_prime": rat(chi_double_prime),
        }),
        StringyReport::NonPolynomial(f) => json!({ "kind": "non_polynomial", "realization": ratfunc(f) }),
    }
}

pub fn det_line(ex: &[DetLineExponent]) -> Value {
    Value::Array(
        ex.iter()
            .map(|e| json!({ "subset": subset(e.subset), "lambda": rat(&e.lambda_exp), "eta": rat(&e.eta_exp) }))
            .collect(),
    )
}

pub fn blowup_certificate(c: &BlowupCertificate) -> Value {
    json!({
        "tau_before": tau(&c.tau_before),
        "tau_after": tau(&c.tau_after),
        "rhs": tau(&c.rhs),
        "residual": tau(&c.residual),
        "ok": c.ok,
    })
}

pub fn bundle_certificate(c: &BundleCertificate) -> Value {
    json!({
        "tau_total": tau(&c.tau_total),
        "rhs": tau(&c.rhs),
        "residual": tau(&c.residual),
        "ok": c.ok,
    })
}
