//! Specializations of the motivic Igusa zeta function, the Gorenstein volume and stringy
//! invariants, all realized through Poincaré polynomials with `L = t²`.
//!
//! The zeta function `Z(X, D; T)` is never materialized as a series in `T`: every use is a
//! specialization `T = L^{-a}`, which turns the strata formula
//!
//! ```text
//! Σ_J L^{|J|-n} ∏_{j∈J} (1 - L^{a m_j}) / (L^{1 + a m_j} - 1) · [D_J]
//! ```
//!
//! into a single rational function in `t^{1/k}`.

use std::collections::BTreeMap;

use crate::exactalg::{ratfunc_over_binomials, ExactError, GradedPoly, Rat, RatFunc};
use crate::invariants::weight;
use crate::pairs::{blow_up, BlowupRecord, CenterDescriptor, MotClass, PairError, SncPair, Subset};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MotivicError {
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("specialization has a pole: 1 + a·m = 0 for divisor {index}")]
    PoleInSpecialization { index: usize },
    #[error("divisor {index} has multiplicity {mult}; the change-of-variables check needs an effective divisor")]
    NotEffective { index: usize, mult: i64 },
    #[error("discrepancy a_{index} = {value} is not > -1")]
    NotKlt { index: usize, value: Rat },
    #[error("specialization exponent must be non-negative, got {0}")]
    NegativeExponent(Rat),
    #[error("invalid discrepancy data: {0}")]
    InvalidData(String),
    #[error("product and limit formulas disagree on stratum {subset:?}")]
    RouteMismatch { subset: Subset },
}

/// A log resolution `X' → X` described by the strata classes of its exceptional divisors
/// and their discrepancies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscrepancyData {
    n: usize,
    strata: BTreeMap<Subset, MotClass>,
    discrepancies: Vec<Rat>,
}

impl DiscrepancyData {
    /// `strata[∅]` is the class of the resolution `X'`; `strata[J]` that of `E_J`.
    pub fn new(n: usize, strata: BTreeMap<Subset, MotClass>, discrepancies: Vec<Rat>) -> Result<Self, MotivicError> {
        let strata: BTreeMap<Subset, MotClass> = strata.into_iter().filter(|(_, c)| !c.is_empty()).collect();
        let minus_one = Rat::from(-1);
        for (index, a) in discrepancies.iter().enumerate() {
            if a <= &minus_one {
                return Err(MotivicError::NotKlt {
                    index,
                    value: a.clone(),
                });
            }
        }
        if !strata.contains_key(&Subset::EMPTY) {
            return Err(MotivicError::InvalidData("missing the class of the resolution".into()));
        }
        let all = Subset::full(discrepancies.len());
        for (j, class) in &strata {
            if !j.is_subset_of(all) {
                return Err(MotivicError::InvalidData(format!("stratum {j:?} names unknown divisors")));
            }
            if j.len() > n || class.degree().is_some_and(|deg| deg > 2 * (n - j.len()) as i64) {
                return Err(MotivicError::InvalidData(format!(
                    "stratum {j:?} exceeds the dimension bound"
                )));
            }
        }
        Ok(DiscrepancyData {
            n,
            strata,
            discrepancies,
        })
    }

    /// Uses the strata of `pair` as the exceptional configuration.
    pub fn from_pair(pair: &SncPair, discrepancies: Vec<Rat>) -> Result<Self, MotivicError> {
        if discrepancies.len() != pair.num_divisors() {
            return Err(MotivicError::InvalidData(format!(
                "{} discrepancies for {} divisors",
                discrepancies.len(),
                pair.num_divisors()
            )));
        }
        DiscrepancyData::new(pair.n(), pair.strata().clone(), discrepancies)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn strata(&self) -> &BTreeMap<Subset, MotClass> {
        &self.strata
    }

    pub fn discrepancies(&self) -> &[Rat] {
        &self.discrepancies
    }
}

/// `Σ_J L^{|J|-n} ∏_{j∈J} (1 - L^{α_j}) / (L^{1+α_j} - 1) · P_t(D_J)` with `L = t²`,
/// summed over one common denominator and reduced once.
fn strata_sum(n: usize, strata: &BTreeMap<Subset, MotClass>, alphas: &[Rat]) -> Result<RatFunc, MotivicError> {
    let used = strata.keys().fold(Subset::EMPTY, |acc, j| acc.union(*j));
    let two = Rat::from(2);
    let mut nums = Vec::with_capacity(alphas.len());
    let mut dens = Vec::with_capacity(alphas.len());
    for (index, alpha) in alphas.iter().enumerate() {
        let shifted = alpha + Rat::one();
        if used.contains(index) && shifted.is_zero() {
            return Err(MotivicError::PoleInSpecialization { index });
        }
        nums.push(&GradedPoly::one() - &GradedPoly::monomial_rat(Rat::one(), &(alpha * &two)));
        dens.push(&GradedPoly::monomial_rat(Rat::one(), &(&shifted * &two)) - &GradedPoly::one());
    }

    let mut total = GradedPoly::zero();
    for (&j, class) in strata {
        if j.iter().any(|i| nums[i].is_zero()) {
            continue;
        }
        let mut term = GradedPoly::monomial(Rat::one(), 2 * (j.len() as i64 - n as i64), 1);
        term = &term * class.poincare();
        for i in used.iter() {
            term = if j.contains(i) { &term * &nums[i] } else { &term * &dens[i] };
        }
        total = &total + &term;
    }
    let exponents: Vec<Rat> = used.iter().map(|i| (&alphas[i] + Rat::one()) * &two).collect();
    Ok(ratfunc_over_binomials(&total, &exponents)?)
}

/// `Z(X, D; L^{-a})` realized in `t` with `L = t²`; `a = 1/d` gives `F_d(X, D)`.
pub fn zeta_evaluate(pair: &SncPair, a: &Rat) -> Result<RatFunc, MotivicError> {
    if a.is_negative() {
        return Err(MotivicError::NegativeExponent(a.clone()));
    }
    let alphas: Vec<Rat> = pair.mults().iter().map(|&m| a * Rat::from(m)).collect();
    strata_sum(pair.n(), pair.strata(), &alphas)
}

/// `F_d(X, D) = Z(X, D; L^{-1/d})`.
pub fn f_d(pair: &SncPair) -> Result<RatFunc, MotivicError> {
    zeta_evaluate(pair, &Rat::new(1, pair.d()))
}

/// `lim_{t→1} t^{2n} F_d(X, D)`.
///
/// With `L = t²` every motivic weight tends to `w^J_d`, so this is `Σ_J w^J_d P_1(D_J)`,
/// which is `χ_d(X, D)` whenever the strata have only even-degree cohomology.
pub fn specialization_limit(pair: &SncPair) -> Result<Rat, MotivicError> {
    let scaled = f_d(pair)?.shift(&Rat::from(2 * pair.n() as i64));
    Ok(scaled.limit_at_one()?)
}

/// The Gorenstein volume `Σ_J L^{|J|-n} ∏ (1 - L^{a_j}) / (L^{a_j+1} - 1) [E_J]`.
pub fn motivic_volume(disc: &DiscrepancyData) -> Result<RatFunc, MotivicError> {
    strata_sum(disc.n, &disc.strata, &disc.discrepancies)
}

/// Stringy Poincaré data `P_t(L^n μ^Gor)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StringyReport {
    Polynomial {
        poincare: GradedPoly,
        chi: Rat,
        chi_prime: Rat,
        chi_double_prime: Rat,
    },
    /// The realization is not a Laurent polynomial with integer exponents in `t`; stringy
    /// Betti numbers and their `χ`-type invariants are not defined.
    NonPolynomial(RatFunc),
}

impl StringyReport {
    pub fn poincare(&self) -> Option<&GradedPoly> {
        match self {
            StringyReport::Polynomial { poincare, .. } => Some(poincare),
            StringyReport::NonPolynomial(_) => None,
        }
    }
}

pub fn stringy_invariants(disc: &DiscrepancyData) -> Result<StringyReport, MotivicError> {
    let scaled = motivic_volume(disc)?.shift(&Rat::from(2 * disc.n as i64));
    let poly = match scaled.as_laurent() {
        Some(p) if p.has_integer_exponents() => p,
        _ => return Ok(StringyReport::NonPolynomial(scaled)),
    };
    let minus_one = Rat::from(-1);
    let v = poly.eval_derivatives(&minus_one, 2)?;
    let n = Rat::from(disc.n as i64);
    Ok(StringyReport::Polynomial {
        chi: v[0].clone(),
        chi_prime: -&v[1],
        chi_double_prime: &v[2] - &(&n * &n * &v[0]),
        poincare: poly,
    })
}

/// Exponents of `λ_dR(H(D_J))` and `η(H(D_J))` in the determinant line of the Hodge
/// realization of `F_d · L^{n/2}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetLineExponent {
    pub subset: Subset,
    pub lambda_exp: Rat,
    pub eta_exp: Rat,
}

/// For each nonzero stratum, `λ`-exponent `f(1) = w^J_d` and `η`-exponent
/// `2 f'(1) = (|J| - n) w^J_d`, where `f(x) = x^{|J| - n/2} ∏ (1 - x^{m/d}) / (x^{1+m/d} - 1)`.
///
/// Both exponents are computed from `f` and from the closed forms; disagreement is an error.
pub fn det_line_exponents(pair: &SncPair) -> Result<Vec<DetLineExponent>, MotivicError> {
    let n = pair.n() as i64;
    let d = pair.d();
    let mut out = Vec::new();
    for &j in pair.strata().keys() {
        let mults = pair.mults_of(j);
        let w = weight(&mults, d)?;
        let mut f = RatFunc::from_poly(GradedPoly::monomial(Rat::one(), 2 * j.len() as i64 - n, 2));
        for &m in &mults {
            let a = Rat::new(m, d);
            let factor = RatFunc::new(
                &GradedPoly::one() - &GradedPoly::monomial_rat(Rat::one(), &a),
                &GradedPoly::monomial_rat(Rat::one(), &(&a + Rat::one())) - &GradedPoly::one(),
            )?;
            f = &f * &factor;
        }
        let lambda_exp = f.limit_at_one()?;
        let eta_exp = Rat::from(2) * f.derivative_at_one()?;
        if lambda_exp != w || eta_exp != Rat::from(j.len() as i64 - n) * &w {
            return Err(MotivicError::RouteMismatch { subset: j });
        }
        out.push(DetLineExponent {
            subset: j,
            lambda_exp,
            eta_exp,
        });
    }
    Ok(out)
}

/// `F_d` before and after a blow-up.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CovCertificate {
    pub lhs: RatFunc,
    pub rhs: RatFunc,
    pub equal: bool,
}

/// Checks `F_d(X, D) = F_d(X', f^*D + d K_{X'/X})` for the blow-up of `pair` along `c`.
pub fn change_of_variables_check(pair: &SncPair, c: &CenterDescriptor) -> Result<CovCertificate, MotivicError> {
    require_effective(pair)?;
    let record = blow_up(pair, c)?;
    cov_certificate(pair, &record)
}

/// The change-of-variables comparison for an already computed blow-up record.
pub fn cov_certificate(pair: &SncPair, record: &BlowupRecord) -> Result<CovCertificate, MotivicError> {
    let lhs = f_d(pair)?;
    let rhs = f_d(&record.new_pair)?;
    let equal = lhs == rhs;
    Ok(CovCertificate { lhs, rhs, equal })
}

pub fn require_effective(pair: &SncPair) -> Result<(), MotivicError> {
    match pair.divisors().iter().position(|x| x.mult < 0) {
        Some(index) => Err(MotivicError::NotEffective {
            index,
            mult: pair.mult(index),
        }),
        None => Ok(()),
    }
}
