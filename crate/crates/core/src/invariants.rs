//! Localizable invariants of pairs: the weights `w^J_d = ∏_{j∈J} -m_j/(m_j+d)` and the
//! weighted strata sums `φ_d(X, D) = Σ_J w^J_d φ(D_J)`.

use std::fmt;

use crate::exactalg::{GradedPoly, Rat};
use crate::pairs::{check_condition_star, MotClass, PairError, SncPair};

/// Which localizable invariant of a smooth projective variety to evaluate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantKind {
    /// Topological Euler characteristic `P_{-1}`.
    Chi,
    /// `d/dt P_{-t}` at `t = 1`, i.e. `-P'(-1)`; equals `dim · χ` on smooth projective classes.
    ChiPrime,
    /// `P''(-1) - dim² P(-1)`.
    ChiDoublePrime,
    /// `P_t` at a fixed rational `t`.
    PoincareAt(Rat),
    /// The whole Poincaré polynomial.
    PoincarePoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvariantValue {
    Number(Rat),
    Poly(GradedPoly),
}

impl InvariantValue {
    pub fn number(&self) -> Option<&Rat> {
        match self {
            InvariantValue::Number(r) => Some(r),
            InvariantValue::Poly(_) => None,
        }
    }

    pub fn poly(&self) -> Option<&GradedPoly> {
        match self {
            InvariantValue::Poly(p) => Some(p),
            InvariantValue::Number(_) => None,
        }
    }

    /// Unwraps a numeric value.
    pub fn into_number(self) -> Rat {
        match self {
            InvariantValue::Number(r) => r,
            InvariantValue::Poly(p) => panic!("expected a number, got polynomial {p}"),
        }
    }
}

impl fmt::Display for InvariantValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InvariantValue::Number(r) => write!(f, "{r}"),
            InvariantValue::Poly(p) => write!(f, "{p}"),
        }
    }
}

/// `χ`, `χ′`, `χ″` and the Poincaré polynomial computed from the same data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantVector {
    pub chi: Rat,
    pub chi_prime: Rat,
    pub chi_double_prime: Rat,
    pub poincare: GradedPoly,
}

impl InvariantVector {
    /// Invariants of a single smooth projective variety.
    pub fn of_class(class: &MotClass, dim: usize) -> Self {
        InvariantVector {
            chi: localizable_eval(class, dim, &InvariantKind::Chi).into_number(),
            chi_prime: localizable_eval(class, dim, &InvariantKind::ChiPrime).into_number(),
            chi_double_prime: localizable_eval(class, dim, &InvariantKind::ChiDoublePrime).into_number(),
            poincare: class.poincare().clone(),
        }
    }

    /// Weighted invariants `χ_d`, `χ′_d`, `χ″_d`, `P_{t,d}` of a pair.
    pub fn of_pair(pair: &SncPair) -> Result<Self, PairError> {
        let [chi, chi_prime, chi_double_prime] = chi_triple_d(pair)?;
        Ok(InvariantVector {
            chi,
            chi_prime,
            chi_double_prime,
            poincare: phi_d(pair, &InvariantKind::PoincarePoly)?
                .poly()
                .cloned()
                .expect("polynomial kind"),
        })
    }
}

/// `[χ_d, χ′_d, χ″_d]` in one pass over the strata.
pub fn chi_triple_d(pair: &SncPair) -> Result<[Rat; 3], PairError> {
    let minus_one = Rat::from(-1);
    let mut out = [Rat::zero(), Rat::zero(), Rat::zero()];
    for (&j, class) in pair.strata() {
        let w = weight(&pair.mults_of(j), pair.d())?;
        if w.is_zero() {
            continue;
        }
        let v = class
            .poincare()
            .eval_derivatives(&minus_one, 2)
            .expect("Poincaré polynomials have integer exponents");
        let dim = Rat::from((pair.n() - j.len()) as i64);
        out[0] += &w * &v[0];
        out[1] -= &(&w * &v[1]);
        out[2] += &w * &(&v[2] - &(&dim * &dim * &v[0]));
    }
    Ok(out)
}

/// `w = ∏ -m/(m+d)`; the empty product is 1.
pub fn weight(mults: &[i64], d: i64) -> Result<Rat, PairError> {
    check_condition_star(mults.iter().copied(), d).or_else(|e| match e {
        // a zero multiplicity is harmless here: its factor is 0
        PairError::ZeroMultiplicity { .. } => Ok(()),
        other => Err(other),
    })?;
    Ok(mults
        .iter()
        .map(|&m| Rat::new(-m, m + d))
        .product())
}

/// Evaluates a localizable invariant on the class of a smooth projective variety of
/// dimension `dim`.
pub fn localizable_eval(class: &MotClass, dim: usize, kind: &InvariantKind) -> InvariantValue {
    let p = class.poincare();
    let at = |t: &Rat, order| {
        p.eval_derivatives(t, order)
            .expect("Poincaré polynomials have integer exponents")
    };
    let minus_one = Rat::from(-1);
    let value = match kind {
        InvariantKind::PoincarePoly => return InvariantValue::Poly(p.clone()),
        InvariantKind::Chi => at(&minus_one, 0).remove(0),
        InvariantKind::ChiPrime => -at(&minus_one, 1).remove(1),
        InvariantKind::ChiDoublePrime => {
            let v = at(&minus_one, 2);
            let dim = Rat::from(dim as i64);
            &v[2] - &(&dim * &dim * &v[0])
        }
        InvariantKind::PoincareAt(t) => at(t, 0).remove(0),
    };
    InvariantValue::Number(value)
}

/// `φ_d(X, D) = Σ_J w^J_d φ(D_J)`, each stratum evaluated at its own dimension `n - |J|`.
pub fn phi_d(pair: &SncPair, kind: &InvariantKind) -> Result<InvariantValue, PairError> {
    let mut number = Rat::zero();
    let mut poly = GradedPoly::zero();
    for (&j, class) in pair.strata() {
        let w = weight(&pair.mults_of(j), pair.d())?;
        match localizable_eval(class, pair.n() - j.len(), kind) {
            InvariantValue::Number(v) => number += &w * &v,
            InvariantValue::Poly(p) => poly = &poly + &p.scale(&w),
        }
    }
    Ok(match kind {
        InvariantKind::PoincarePoly => InvariantValue::Poly(poly),
        _ => InvariantValue::Number(number),
    })
}

/// `χ_d(X, D)`.
pub fn chi_d(pair: &SncPair) -> Result<Rat, PairError> {
    Ok(phi_d(pair, &InvariantKind::Chi)?.into_number())
}

/// `χ_d(CP^n, Σ m_j H_j) = d^n Σ (m_j + d) / ∏ (m_j + d)` for all `n + 1` coordinate hyperplanes.
pub fn chi_d_closed_form_projective(n: usize, d: i64, mults: &[i64]) -> Result<Rat, PairError> {
    assert_eq!(mults.len(), n + 1, "one multiplicity per coordinate hyperplane");
    if let Some(index) = mults.iter().position(|&m| m == -d) {
        return Err(PairError::ConditionStarViolation {
            index,
            mult: mults[index],
        });
    }
    let shifted: Vec<Rat> = mults.iter().map(|&m| Rat::from(m + d)).collect();
    let prod: Rat = shifted.iter().cloned().product();
    let sum: Rat = shifted.iter().sum();
    Ok(Rat::from(d).pow(n as i64) * sum / prod)
}
