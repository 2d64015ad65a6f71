use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::exactalg::{GradedPoly, Rat};

/// The Poincaré-polynomial realization `P_t` of a class in the Grothendieck ring.
///
/// Coefficients are integers, exponents are non-negative integers. The zero polynomial is
/// the class of the empty variety.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MotClass(GradedPoly);

impl MotClass {
    /// Wraps a polynomial, returning `None` unless it has integer coefficients and
    /// non-negative integer exponents.
    pub fn new(p: GradedPoly) -> Option<Self> {
        let ok = p.has_integer_exponents()
            && p.has_integer_coeffs()
            && p.low_degree().is_none_or(|e| !e.is_negative());
        ok.then_some(MotClass(p))
    }

    /// From Betti numbers `b_0, b_1, …`.
    pub fn from_betti<I: IntoIterator<Item = i64>>(betti: I) -> Self {
        MotClass(GradedPoly::from_coeffs(betti))
    }

    pub fn empty() -> Self {
        MotClass(GradedPoly::zero())
    }

    pub fn point() -> Self {
        MotClass(GradedPoly::one())
    }

    /// `[CP^k] = 1 + t² + … + t^{2k}`; zero for `k < 0`.
    pub fn projective_space(k: i64) -> Self {
        if k < 0 {
            return MotClass::empty();
        }
        MotClass(GradedPoly::from_pairs(
            1,
            (0..=k).map(|i| (2 * i, Rat::one())),
        ))
    }

    pub fn poincare(&self) -> &GradedPoly {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_zero()
    }

    /// Degree in `t`, `None` for the empty class.
    pub fn degree(&self) -> Option<i64> {
        self.0.degree().and_then(|e| e.to_i64())
    }

    /// Betti numbers `b_0 … b_deg`.
    pub fn betti(&self) -> Vec<Rat> {
        match self.degree() {
            None => Vec::new(),
            Some(deg) => (0..=deg).map(|i| self.0.coeff_int(i)).collect(),
        }
    }

    /// Whether `t^{2 dim} P(1/t) = P(t)` with `deg P = 2 dim`.
    pub fn is_palindromic_of_dim(&self, dim: usize) -> bool {
        let top = 2 * dim as i64;
        if self.degree() != Some(top) {
            return false;
        }
        (0..=top).all(|i| self.0.coeff_int(i) == self.0.coeff_int(top - i))
    }

    pub fn has_nonnegative_coeffs(&self) -> bool {
        self.0.terms().all(|(_, c)| !c.is_negative())
    }

    /// `P(-1)`.
    pub fn euler(&self) -> Rat {
        self.0.eval(&Rat::from(-1)).expect("integer exponents")
    }
}

impl Add for &MotClass {
    type Output = MotClass;
    fn add(self, rhs: &MotClass) -> MotClass {
        MotClass(&self.0 + &rhs.0)
    }
}

impl Sub for &MotClass {
    type Output = MotClass;
    fn sub(self, rhs: &MotClass) -> MotClass {
        MotClass(&self.0 - &rhs.0)
    }
}

impl Mul for &MotClass {
    type Output = MotClass;
    fn mul(self, rhs: &MotClass) -> MotClass {
        MotClass(&self.0 * &rhs.0)
    }
}

impl fmt::Display for MotClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.to_string().replace('q', "t"))
    }
}

impl fmt::Debug for MotClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_spaces() {
        assert_eq!(MotClass::projective_space(-1), MotClass::empty());
        assert_eq!(MotClass::projective_space(0), MotClass::point());
        assert_eq!(MotClass::projective_space(2), MotClass::from_betti([1, 0, 1, 0, 1]));
        assert!(MotClass::projective_space(3).is_palindromic_of_dim(3));
        assert!(!MotClass::projective_space(3).is_palindromic_of_dim(2));
        assert_eq!(MotClass::projective_space(4).euler(), Rat::from(5));
    }

    #[test]
    fn rejects_fractional_or_negative_exponents() {
        assert!(MotClass::new(GradedPoly::monomial(Rat::one(), 1, 2)).is_none());
        assert!(MotClass::new(GradedPoly::monomial(Rat::one(), -1, 1)).is_none());
        assert!(MotClass::new(GradedPoly::constant(Rat::new(1, 2))).is_none());
    }
}
