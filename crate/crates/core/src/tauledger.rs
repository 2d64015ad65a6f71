//! Formal BCOV calculus: `τ_d` values as exact linear combinations of `τ(CP¹)`, `τ(CP²)`
//! and opaque atoms, the Betti-number normalization making `τ^bir_d` a birational
//! invariant, and certificates for the blow-up and projective-bundle functional equations.
//!
//! Analytic quantities are never evaluated; every identity checked here is linear over
//! the atoms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::exactalg::Rat;
use crate::invariants::{chi_d, chi_triple_d};
use crate::motivic::{stringy_invariants, DiscrepancyData, MotivicError, StringyReport};
use crate::pairs::{
    blow_up, center_pair, fibration_pair, gamma_model_pair, restrict_to_divisor, BlowupRecord, CenterDescriptor,
    PairError, SncPair,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TauError {
    #[error(transparent)]
    Pair(#[from] PairError),
    #[error(transparent)]
    Motivic(#[from] MotivicError),
    #[error("{0} is not d-canonical")]
    NotDCanonical(&'static str),
    #[error("the fiber must be a coordinate model")]
    NotCoordinateModel,
    #[error("stringy invariants are not polynomial")]
    NonPolynomialStringy,
    #[error("{0} negative components; the ledger only reduces pairs with the single forced negative component")]
    OutOfScope(usize),
    #[error("{count} multiplicities for CP^{n}")]
    TooManyMults { n: usize, count: usize },
}

/// A formal atom of the ledger.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TauAtom {
    /// `τ(CP¹)`.
    TauP1,
    /// `τ(CP²)`.
    TauP2,
    /// `τ_d` of a pair the ledger cannot reduce.
    Opaque(String),
    /// `log((2π)^{-n} ∫ |γ γ̄|^{1/d})` of a labelled pair.
    VolLog(String),
}

impl fmt::Display for TauAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauAtom::TauP1 => write!(f, "tau(P1)"),
            TauAtom::TauP2 => write!(f, "tau(P2)"),
            TauAtom::Opaque(l) => write!(f, "tau[{l}]"),
            TauAtom::VolLog(l) => write!(f, "vollog[{l}]"),
        }
    }
}

/// A finite ℚ-linear combination of atoms plus a constant. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TauExpr {
    coeffs: BTreeMap<TauAtom, Rat>,
    constant: Rat,
}

impl TauExpr {
    pub fn zero() -> Self {
        TauExpr::default()
    }

    pub fn atom(atom: TauAtom) -> Self {
        TauExpr::term(Rat::one(), atom)
    }

    pub fn term(coeff: Rat, atom: TauAtom) -> Self {
        let mut e = TauExpr::zero();
        e.add_term(atom, coeff);
        e
    }

    pub fn constant_expr(c: Rat) -> Self {
        TauExpr {
            coeffs: BTreeMap::new(),
            constant: c,
        }
    }

    pub fn p1() -> Self {
        TauExpr::atom(TauAtom::TauP1)
    }

    pub fn p2() -> Self {
        TauExpr::atom(TauAtom::TauP2)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.constant.is_zero()
    }

    pub fn coeff(&self, atom: &TauAtom) -> Rat {
        self.coeffs.get(atom).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn constant(&self) -> &Rat {
        &self.constant
    }

    /// Nonzero coefficients in atom order.
    pub fn terms(&self) -> impl Iterator<Item = (&TauAtom, &Rat)> {
        self.coeffs.iter()
    }

    pub fn add_term(&mut self, atom: TauAtom, coeff: Rat) {
        let slot = self.coeffs.entry(atom).or_insert_with(Rat::zero);
        *slot += coeff;
        if slot.is_zero() {
            self.coeffs.retain(|_, c| !c.is_zero());
        }
    }

    pub fn scale(&self, k: &Rat) -> Self {
        if k.is_zero() {
            return TauExpr::zero();
        }
        TauExpr {
            coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), c * k)).collect(),
            constant: &self.constant * k,
        }
    }
}

impl Add<&TauExpr> for &TauExpr {
    type Output = TauExpr;
    fn add(self, rhs: &TauExpr) -> TauExpr {
        let mut out = self.clone();
        for (a, c) in &rhs.coeffs {
            out.add_term(a.clone(), c.clone());
        }
        out.constant += &rhs.constant;
        out
    }
}

impl Add for TauExpr {
    type Output = TauExpr;
    fn add(self, rhs: TauExpr) -> TauExpr {
        &self + &rhs
    }
}

impl Neg for &TauExpr {
    type Output = TauExpr;
    fn neg(self) -> TauExpr {
        self.scale(&Rat::from(-1))
    }
}

impl Neg for TauExpr {
    type Output = TauExpr;
    fn neg(self) -> TauExpr {
        -&self
    }
}

impl Sub<&TauExpr> for &TauExpr {
    type Output = TauExpr;
    fn sub(self, rhs: &TauExpr) -> TauExpr {
        self + &-rhs
    }
}

impl Sub for TauExpr {
    type Output = TauExpr;
    fn sub(self, rhs: TauExpr) -> TauExpr {
        &self - &rhs
    }
}

impl Mul<&TauExpr> for &Rat {
    type Output = TauExpr;
    fn mul(self, rhs: &TauExpr) -> TauExpr {
        rhs.scale(self)
    }
}

impl Mul<TauExpr> for Rat {
    type Output = TauExpr;
    fn mul(self, rhs: TauExpr) -> TauExpr {
        rhs.scale(&self)
    }
}

impl fmt::Display for TauExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<(bool, String)> = Vec::new();
        if !self.constant.is_zero() {
            parts.push((self.constant.is_negative(), self.constant.abs().to_string()));
        }
        for (a, c) in &self.coeffs {
            let body = if c.abs().is_one() {
                a.to_string()
            } else {
                format!("{}*{a}", c.abs())
            };
            parts.push((c.is_negative(), body));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

/// `τ_d(CP¹, γ_m) = τ(CP¹)` for every `m`.
pub fn tau_p1_eval(_m: u64, _d: i64) -> TauExpr {
    TauExpr::p1()
}

/// `τ_d(CP², γ_{m₁,m₂}) = τ(CP²) + c τ(CP¹)` with
/// `c = 3/2 - m₁/(m₁+d) - m₂/(m₂+d) - (m₁+m₂+3d)/(m₁+m₂+2d)`.
pub fn tau_p2_eval(m1: u64, m2: u64, d: i64) -> TauExpr {
    let (m1, m2) = (m1 as i64, m2 as i64);
    let c = Rat::new(3, 2) - Rat::new(m1, m1 + d) - Rat::new(m2, m2 + d) - Rat::new(m1 + m2 + 3 * d, m1 + m2 + 2 * d);
    &TauExpr::p2() + &TauExpr::term(c, TauAtom::TauP1)
}

/// `-½ χ′_d τ(CP¹) + χ″_d (-½ τ(CP²) + ¾ τ(CP¹))`.
pub fn normalization_term(pair: &SncPair) -> Result<TauExpr, TauError> {
    let [_, chi_prime, chi_double_prime] = chi_triple_d(pair)?;
    Ok(normalization_from(&chi_prime, &chi_double_prime))
}

fn normalization_from(chi_prime: &Rat, chi_double_prime: &Rat) -> TauExpr {
    let half = Rat::new(1, 2);
    let p1_coeff = -(&half * chi_prime) + Rat::new(3, 4) * chi_double_prime;
    let p2_coeff = -(&half * chi_double_prime);
    &TauExpr::term(p1_coeff, TauAtom::TauP1) + &TauExpr::term(p2_coeff, TauAtom::TauP2)
}

/// `τ_d(CP^n, γ_{m₁,…,m_s})`, which is minus the normalization because `τ^bir` vanishes
/// on coordinate models.
pub fn tau_projective_normal_form(n: usize, d: i64, mults: &[u64]) -> Result<TauExpr, TauError> {
    if mults.len() > n {
        return Err(TauError::TooManyMults { n, count: mults.len() });
    }
    Ok(-normalization_term(&gamma_model_pair(n, d, mults)?)?)
}

/// `τ^bir_d = τ_d + normalization`.
pub fn tau_bir(pair: &SncPair, tau_value: &TauExpr) -> Result<TauExpr, TauError> {
    Ok(tau_value + &normalization_term(pair)?)
}

/// `τ_d` of a pair reachable from coordinate models.
pub fn tau_reachable(pair: &SncPair) -> Result<TauExpr, TauError> {
    check_scope(pair)?;
    Ok(-normalization_term(pair)?)
}

/// d-canonical with at most one negative component, as for `γ`-models and their blow-ups.
fn check_scope(pair: &SncPair) -> Result<(), TauError> {
    if !pair.is_d_canonical() {
        return Err(TauError::NotDCanonical("pair"));
    }
    let negative = pair.mults().iter().filter(|&&m| m < 0).count();
    if negative > 1 {
        return Err(TauError::OutOfScope(negative));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowupCertificate {
    pub tau_before: TauExpr,
    pub tau_after: TauExpr,
    /// `χ_d(E, D_E) τ(CP¹) - χ_d(Y, D_Y) τ_d(CP^r, γ_{r, m_S})`.
    pub rhs: TauExpr,
    pub residual: TauExpr,
    pub ok: bool,
}

/// Checks `τ_d(X′) - τ_d(X) = χ_d(E, D_E) τ_d(CP¹, γ_{m_e}) - χ_d(Y, D_Y) τ_d(CP^r, γ_{r, m_S})`
/// for the blow-up of `pair` along `c`.
pub fn verify_blowup_functional_equation(pair: &SncPair, c: &CenterDescriptor) -> Result<BlowupCertificate, TauError> {
    check_scope(pair)?;
    let record = blow_up(pair, c)?;
    verify_blowup_record(pair, c, &record)
}

/// The blow-up certificate for an already computed blow-up of `pair` along `c`.
pub fn verify_blowup_record(
    pair: &SncPair,
    c: &CenterDescriptor,
    record: &BlowupRecord,
) -> Result<BlowupCertificate, TauError> {
    check_scope(pair)?;
    let d = pair.d();
    let tau_before = -normalization_term(pair)?;
    let tau_after = -normalization_term(&record.new_pair)?;
    let exceptional = restrict_to_divisor(&record.new_pair, record.exceptional_index)?;
    let center = center_pair(pair, c)?;
    let s_mults: Vec<u64> = c
        .contains()
        .iter()
        .map(|j| {
            let m = pair.mult(j);
            u64::try_from(m).map_err(|_| PairError::NegativeMultAtCenter { index: j, mult: m })
        })
        .collect::<Result<_, _>>()?;
    let m_e = u64::try_from(record.m_e).map_err(|_| PairError::DegenerateCenter)?;
    let rhs = &chi_d(&exceptional)? * &tau_p1_eval(m_e, d)
        - &chi_d(&center)? * &tau_projective_normal_form(c.codim(), d, &s_mults)?;
    let residual = &(&tau_after - &tau_before) - &rhs;
    let ok = residual.is_zero();
    Ok(BlowupCertificate {
        tau_before,
        tau_after,
        rhs,
        residual,
        ok,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleCertificate {
    pub tau_total: TauExpr,
    pub rhs: TauExpr,
    pub residual: TauExpr,
    pub ok: bool,
}

/// Checks `τ_d(X) = χ_d(Y, γ_Y) τ_d(Z, γ_Z)` for the fibration with base `Y` and
/// coordinate-model fiber `Z`.
pub fn verify_bundle_functional_equation(base: &SncPair, fiber: &SncPair) -> Result<BundleCertificate, TauError> {
    if !fiber.is_d_canonical() {
        return Err(TauError::NotDCanonical("fiber"));
    }
    if fiber.model().is_none() {
        return Err(TauError::NotCoordinateModel);
    }
    let total = fibration_pair(base, fiber)?;
    let tau_total = -normalization_term(&total)?;
    let rhs = &chi_d(base)? * &-normalization_term(fiber)?;
    let residual = &tau_total - &rhs;
    let ok = residual.is_zero();
    Ok(BundleCertificate {
        tau_total,
        rhs,
        residual,
        ok,
    })
}

/// `τ(X) = τ^bir_d(X, ∅) + ½ χ′(X) τ(CP¹) + χ″(X) (½ τ(CP²) - ¾ τ(CP¹))` with stringy
/// `χ`-invariants; `τ^bir_d(X, ∅)` is the opaque atom plus `χ(X)/12` times the volume atom.
pub fn bcov_klt_symbolic(disc: &DiscrepancyData, opaque_label: &str) -> Result<TauExpr, TauError> {
    let StringyReport::Polynomial {
        chi,
        chi_prime,
        chi_double_prime,
        ..
    } = stringy_invariants(disc)?
    else {
        return Err(TauError::NonPolynomialStringy);
    };
    let opaque = TauExpr::atom(TauAtom::Opaque(opaque_label.to_string()));
    let vol = TauExpr::term(chi / Rat::from(12), TauAtom::VolLog(opaque_label.to_string()));
    Ok(&(&opaque + &vol) - &normalization_from(&chi_prime, &chi_double_prime))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motivic::DiscrepancyData;
    use crate::pairs::{coordinate_center, projective_space_pair, stratum_center, MotClass, Subset};

    fn p1(c: Rat) -> TauExpr {
        TauExpr::term(c, TauAtom::TauP1)
    }

    fn p2(c: Rat) -> TauExpr {
        TauExpr::term(c, TauAtom::TauP2)
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let e = &TauExpr::p1() - &TauExpr::p1();
        assert!(e.is_zero());
        assert_eq!(e, TauExpr::zero());
        assert_eq!(tau_p2_eval(0, 0, 3), TauExpr::p2());
    }

    #[test]
    fn p2_values() {
        assert_eq!(tau_p2_eval(1, 1, 1), &TauExpr::p2() + &p1(Rat::new(-3, 4)));
        assert_eq!(tau_p2_eval(2, 0, 1), &TauExpr::p2() + &p1(Rat::new(-5, 12)));
    }

    #[test]
    fn normalization_examples() {
        let g = gamma_model_pair(1, 1, &[7]).unwrap();
        assert_eq!(normalization_term(&g).unwrap(), -TauExpr::p1());
        let g = gamma_model_pair(2, 1, &[1, 1]).unwrap();
        assert_eq!(normalization_term(&g).unwrap(), &p1(Rat::new(3, 4)) - &TauExpr::p2());
    }

    #[test]
    fn normal_forms_agree_with_low_dimensions() {
        for d in 1..=3 {
            for m1 in 0..=4 {
                assert_eq!(tau_projective_normal_form(1, d, &[m1]).unwrap(), tau_p1_eval(m1, d));
                for m2 in 0..=4 {
                    assert_eq!(tau_projective_normal_form(2, d, &[m1, m2]).unwrap(), tau_p2_eval(m1, m2, d));
                }
            }
        }
    }

    #[test]
    fn normal_form_of_projective_three_space() {
        // χ′_d = 12 - (4/3)·6 = 4, χ″_d = 8 - (4/3)·2 = 16/3
        let e = tau_projective_normal_form(3, 1, &[0, 0, 0]).unwrap();
        assert_eq!(e, &p1(Rat::from(-2)) + &p2(Rat::new(8, 3)));
        assert!(tau_projective_normal_form(1, 1, &[1, 1]).is_err());
    }

    #[test]
    fn tau_bir_vanishes_on_models_and_keeps_opaque_atoms() {
        let g = gamma_model_pair(1, 1, &[7]).unwrap();
        assert!(tau_bir(&g, &tau_p1_eval(7, 1)).unwrap().is_zero());
        let g = gamma_model_pair(2, 1, &[1, 1]).unwrap();
        assert!(tau_bir(&g, &tau_p2_eval(1, 1, 1)).unwrap().is_zero());
        let x = TauExpr::atom(TauAtom::Opaque("X".into()));
        let b = tau_bir(&g, &x).unwrap();
        assert_eq!(b.coeff(&TauAtom::Opaque("X".into())), Rat::one());
        assert!(!b.is_zero());
    }

    #[test]
    fn blowup_certificates() {
        let p = projective_space_pair(3, 1, &[(1, 1), (2, 1), (3, 1), (0, -7)]).unwrap();
        let c = coordinate_center(&p, &[1, 2, 3]).unwrap();
        let cert = verify_blowup_functional_equation(&p, &c).unwrap();
        assert!(cert.ok, "residual {}", cert.residual);

        let p = projective_space_pair(2, 1, &[(1, 1), (2, 1), (0, -5)]).unwrap();
        let c = coordinate_center(&p, &[1, 2]).unwrap();
        assert!(verify_blowup_functional_equation(&p, &c).unwrap().ok);

        // a chain: blow up the new point E ∩ H_1
        let rec = blow_up(&p, &c).unwrap();
        let e = rec.exceptional_index;
        let c2 = stratum_center(&rec.new_pair, [e, 1].into_iter().collect()).unwrap();
        assert!(verify_blowup_functional_equation(&rec.new_pair, &c2).unwrap().ok);
    }

    #[test]
    fn blowup_certificate_preconditions() {
        let p = projective_space_pair(2, 1, &[(1, 1), (2, 2), (0, -6)]).unwrap();
        let c = coordinate_center(&p, &[0, 1]).unwrap();
        assert!(matches!(
            verify_blowup_functional_equation(&p, &c),
            Err(TauError::Pair(PairError::NegativeMultAtCenter { .. }))
        ));
        let two_negative = projective_space_pair(2, 1, &[(1, 1), (2, -2), (0, -2)]).unwrap();
        let c = coordinate_center(&two_negative, &[1, 2]).unwrap();
        assert_eq!(
            verify_blowup_functional_equation(&two_negative, &c),
            Err(TauError::OutOfScope(2))
        );
        let q = projective_space_pair(2, 1, &[(1, 1)]).unwrap();
        let c = coordinate_center(&q, &[1, 2]).unwrap();
        assert_eq!(
            verify_blowup_functional_equation(&q, &c),
            Err(TauError::NotDCanonical("pair"))
        );
    }

    #[test]
    fn corrupted_exceptional_multiplicity_is_caught() {
        let p = projective_space_pair(2, 1, &[(1, 1), (2, 1), (0, -5)]).unwrap();
        let c = coordinate_center(&p, &[1, 2]).unwrap();
        let bad = crate::pairs::blow_up_with_mult(&p, &c, 4).unwrap();
        assert!(!verify_blowup_record(&p, &c, &bad).unwrap().ok);
    }

    #[test]
    fn bundle_certificates() {
        let base = projective_space_pair(1, 1, &[(0, 3), (1, -5)]).unwrap();
        let fiber = gamma_model_pair(1, 1, &[0]).unwrap();
        assert!(verify_bundle_functional_equation(&base, &fiber).unwrap().ok);

        let point = projective_space_pair(0, 1, &[]).unwrap();
        let fiber = gamma_model_pair(2, 1, &[1, 1]).unwrap();
        assert!(verify_bundle_functional_equation(&point, &fiber).unwrap().ok);

        let not_canonical = projective_space_pair(1, 1, &[(0, 1)]).unwrap();
        assert!(verify_bundle_functional_equation(&base, &not_canonical).is_err());
    }

    #[test]
    fn bcov_of_klt_data() {
        let plane = DiscrepancyData::new(2, [(Subset::EMPTY, MotClass::projective_space(2))].into(), vec![]).unwrap();
        let e = bcov_klt_symbolic(&plane, "X").unwrap();
        let expected = &(&TauExpr::atom(TauAtom::Opaque("X".into()))
            + &TauExpr::term(Rat::new(1, 4), TauAtom::VolLog("X".into())))
            + &(&p1(Rat::new(3, 2)) + &TauExpr::p2());
        assert_eq!(e, expected);

        // an abelian surface: P = (1 + t)⁴, χ = χ′ = χ″ = 0
        let abelian = MotClass::from_betti([1, 4, 6, 4, 1]);
        let cy = DiscrepancyData::new(2, [(Subset::EMPTY, abelian)].into(), vec![]).unwrap();
        assert_eq!(bcov_klt_symbolic(&cy, "E").unwrap(), TauExpr::atom(TauAtom::Opaque("E".into())));

        let p = projective_space_pair(2, 1, &[]).unwrap();
        let c = coordinate_center(&p, &[1, 2]).unwrap();
        let rec = blow_up(&p, &c).unwrap();
        let half = DiscrepancyData::from_pair(&rec.new_pair, vec![Rat::new(1, 2)]).unwrap();
        assert_eq!(bcov_klt_symbolic(&half, "Y"), Err(TauError::NonPolynomialStringy));
    }

    #[test]
    fn display() {
        let e = &(&p1(Rat::new(-3, 4)) + &TauExpr::p2()) + &TauExpr::constant_expr(Rat::from(2));
        assert_eq!(e.to_string(), "2 - 3/4*tau(P1) + tau(P2)");
        assert_eq!(TauExpr::zero().to_string(), "0");
    }
}
