use std::time::Instant;

use snc_core::invariants::{chi_d, InvariantVector};
use snc_core::motivic::{
    change_of_variables_check, cov_certificate, det_line_exponents, f_d, specialization_limit, stringy_invariants,
    DiscrepancyData, StringyReport,
};
use snc_core::pairs::{
    blow_up, blow_up_with_mult, coordinate_center, gamma_model_pair, projective_space_pair, stratum_center,
};
use snc_core::tauledger::{tau_bir, tau_reachable, verify_blowup_functional_equation, verify_blowup_record};
use snc_core::{MotClass, Rat, SncPair, Subset};

fn set(ix: &[usize]) -> Subset {
    ix.iter().copied().collect()
}

/// Blows up `pair` along the deepest nonempty stratum among the given index sets.
fn chain(mut pair: SncPair, steps: &[&[usize]]) -> Vec<SncPair> {
    let mut out = vec![pair.clone()];
    for s in steps {
        let c = stratum_center(&pair, set(s)).unwrap();
        pair = blow_up(&pair, &c).unwrap().new_pair;
        out.push(pair.clone());
    }
    out
}

#[test]
fn invariants_are_stable_along_a_chain_in_four_space() {
    let start = Instant::now();
    let base = gamma_model_pair(4, 3, &[5, 4, 3, 5]).unwrap();
    // points, then curves through the new exceptional divisors
    let pairs = chain(base.clone(), &[&[1, 2, 3, 4], &[5, 1, 2], &[6, 3]]);
    let chi = chi_d(&base).unwrap();
    let zeta = f_d(&base).unwrap();
    for p in &pairs {
        assert_eq!(chi_d(p).unwrap(), chi);
        assert_eq!(f_d(p).unwrap(), zeta);
        assert_eq!(specialization_limit(p).unwrap(), chi);
        assert!(tau_bir(p, &tau_reachable(p).unwrap()).unwrap().is_zero());
    }
    assert!(start.elapsed().as_secs() < 20, "took {:?}", start.elapsed());
}

#[test]
fn functional_equation_along_a_chain() {
    let mut pair = projective_space_pair(3, 1, &[(1, 1), (2, 2), (3, 1), (0, -8)]).unwrap();
    for s in [set(&[0, 1, 2]), set(&[4, 0]), set(&[5, 1])] {
        let c = stratum_center(&pair, s).unwrap();
        let cert = verify_blowup_functional_equation(&pair, &c).unwrap();
        assert!(cert.ok, "residual {}", cert.residual);
        pair = blow_up(&pair, &c).unwrap().new_pair;
    }
}

#[test]
fn change_of_variables_along_an_effective_chain() {
    let mut pair = projective_space_pair(3, 2, &[(0, 1), (1, 3), (2, 5)]).unwrap();
    for s in [set(&[0, 1, 2]), set(&[3, 0]), set(&[4, 3])] {
        let c = stratum_center(&pair, s).unwrap();
        let cert = change_of_variables_check(&pair, &c).unwrap();
        assert!(cert.equal, "{} != {}", cert.lhs, cert.rhs);
        pair = blow_up(&pair, &c).unwrap().new_pair;
    }
}

#[test]
fn corrupted_blow_up_rule_is_detected() {
    let pair = projective_space_pair(3, 1, &[(1, 1), (2, 2), (3, 1), (0, -8)]).unwrap();
    let c = coordinate_center(&pair, &[1, 2]).unwrap();
    let good = blow_up(&pair, &c).unwrap();
    let bad = blow_up_with_mult(&pair, &c, good.m_e + 1).unwrap();
    assert!(cov_certificate(&pair, &good).unwrap().equal);
    assert!(!cov_certificate(&pair, &bad).unwrap().equal);
    assert!(verify_blowup_record(&pair, &c, &good).unwrap().ok);
    assert!(!verify_blowup_record(&pair, &c, &bad).unwrap().ok);
    assert_ne!(chi_d(&bad.new_pair).unwrap(), chi_d(&pair).unwrap());
}

#[test]
fn crepant_resolution_has_the_invariants_of_the_resolution() {
    // the resolution of an A_1 surface point inside a surface: a (-2)-curve, discrepancy 0
    let blown = {
        let p = projective_space_pair(2, 1, &[]).unwrap();
        let c = coordinate_center(&p, &[1, 2]).unwrap();
        blow_up(&p, &c).unwrap().new_pair
    };
    let disc = DiscrepancyData::from_pair(&blown, vec![Rat::zero()]).unwrap();
    let plain = InvariantVector::of_class(blown.ambient(), 2);
    match stringy_invariants(&disc).unwrap() {
        StringyReport::Polynomial {
            poincare,
            chi,
            chi_prime,
            chi_double_prime,
        } => {
            assert_eq!(poincare, plain.poincare);
            assert_eq!((chi, chi_prime, chi_double_prime), (plain.chi, plain.chi_prime, plain.chi_double_prime));
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn discrepancy_one_returns_the_base() {
    let blown = {
        let p = projective_space_pair(2, 1, &[]).unwrap();
        let c = coordinate_center(&p, &[1, 2]).unwrap();
        blow_up(&p, &c).unwrap().new_pair
    };
    let disc = DiscrepancyData::from_pair(&blown, vec![Rat::one()]).unwrap();
    let report = stringy_invariants(&disc).unwrap();
    assert_eq!(report.poincare(), Some(MotClass::projective_space(2).poincare()));
}

#[test]
fn det_line_exponents_on_a_blow_up() {
    let p = gamma_model_pair(2, 2, &[1, 3]).unwrap();
    let c = coordinate_center(&p, &[1, 2]).unwrap();
    let rec = blow_up(&p, &c).unwrap();
    let ex = det_line_exponents(&rec.new_pair).unwrap();
    assert_eq!(ex.len(), rec.new_pair.strata().len());
    let e = ex.iter().find(|x| x.subset == Subset::singleton(rec.exceptional_index)).unwrap();
    // m_e = 1 + 3 + 2 = 6, w = -6/8
    assert_eq!(e.lambda_exp, Rat::new(-3, 4));
    assert_eq!(e.eta_exp, Rat::new(3, 4));
}
