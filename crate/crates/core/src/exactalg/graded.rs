//! Laurent polynomials in one variable `q` with fractional exponents of bounded denominator.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;

use super::{ExactError, Rat};

/// A finite sum `Σ c_e · q^{e/grain}` with rational coefficients.
///
/// The grain is always the smallest positive integer for which every exponent is an integer
/// multiple of `1/grain`, so two polynomials are equal exactly when their stored data agree.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GradedPoly {
    grain: u32,
    terms: BTreeMap<i64, Rat>,
}

impl Default for GradedPoly {
    fn default() -> Self {
        GradedPoly::zero()
    }
}

impl GradedPoly {
    pub fn zero() -> Self {
        GradedPoly {
            grain: 1,
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        GradedPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        GradedPoly::monomial(c, 0, 1)
    }

    /// `coeff · q^{numer/grain}`.
    pub fn monomial(coeff: Rat, numer: i64, grain: u32) -> Self {
        assert!(grain > 0, "grain must be positive");
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(numer, coeff);
        }
        GradedPoly::from_terms(grain, terms)
    }

    /// `coeff · q^{exponent}` for a rational exponent.
    pub fn monomial_rat(coeff: Rat, exponent: &Rat) -> Self {
        let grain = exponent.denom().try_into().expect("exponent denominator too large");
        let numer = exponent.numer().try_into().expect("exponent numerator too large");
        GradedPoly::monomial(coeff, numer, grain)
    }

    /// The variable `q` itself.
    pub fn var() -> Self {
        GradedPoly::monomial(Rat::one(), 1, 1)
    }

    /// Polynomial with integer exponents from a coefficient list, constant term first.
    pub fn from_coeffs<I, C>(coeffs: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: Into<Rat>,
    {
        let terms = coeffs
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i as i64, c.into()))
            .collect();
        GradedPoly::from_terms(1, terms)
    }

    /// Builds from `(numerator, coefficient)` pairs over the given grain; repeated keys add up.
    pub fn from_pairs<I>(grain: u32, pairs: I) -> Self
    where
        I: IntoIterator<Item = (i64, Rat)>,
    {
        let mut terms: BTreeMap<i64, Rat> = BTreeMap::new();
        for (e, c) in pairs {
            *terms.entry(e).or_default() += c;
        }
        GradedPoly::from_terms(grain, terms)
    }

    fn from_terms(grain: u32, mut terms: BTreeMap<i64, Rat>) -> Self {
        assert!(grain > 0, "grain must be positive");
        terms.retain(|_, c| !c.is_zero());
        let mut g = grain as i64;
        for e in terms.keys() {
            g = g.gcd(e);
            if g == 1 {
                break;
            }
        }
        if terms.is_empty() {
            g = grain as i64;
        }
        if g > 1 {
            terms = terms.into_iter().map(|(e, c)| (e / g, c)).collect();
        }
        let grain = if terms.is_empty() { 1 } else { (grain as i64 / g) as u32 };
        GradedPoly { grain, terms }
    }

    pub fn grain(&self) -> u32 {
        self.grain
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(exponent numerator over grain, coefficient)`, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &Rat)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    /// Terms with their exponents as rationals, ascending.
    pub fn rat_terms(&self) -> impl Iterator<Item = (Rat, &Rat)> + '_ {
        let k = self.grain as i64;
        self.terms.iter().map(move |(e, c)| (Rat::new(*e, k), c))
    }

    /// Coefficient of `q^{exponent}`.
    pub fn coeff(&self, exponent: &Rat) -> Rat {
        let k = self.grain as i64;
        let scaled = exponent * Rat::from(k);
        match scaled.to_i64() {
            Some(e) => self.terms.get(&e).cloned().unwrap_or_default(),
            None => Rat::zero(),
        }
    }

    /// Coefficient of `q^i` for integer `i`.
    pub fn coeff_int(&self, i: i64) -> Rat {
        self.coeff(&Rat::from(i))
    }

    pub fn has_integer_exponents(&self) -> bool {
        self.grain == 1
    }

    pub fn has_integer_coeffs(&self) -> bool {
        self.terms.values().all(Rat::is_integer)
    }

    /// Largest exponent, `None` for zero.
    pub fn degree(&self) -> Option<Rat> {
        self.terms
            .keys()
            .next_back()
            .map(|e| Rat::new(*e, self.grain as i64))
    }

    /// Smallest exponent, `None` for zero.
    pub fn low_degree(&self) -> Option<Rat> {
        self.terms
            .keys()
            .next()
            .map(|e| Rat::new(*e, self.grain as i64))
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.terms.values().next_back()
    }

    /// Rewrites the keys over a multiple of the current grain.
    pub(crate) fn keys_over(&self, grain: u32) -> impl Iterator<Item = (i64, &Rat)> + '_ {
        assert!(grain.is_multiple_of(self.grain), "target grain must be a multiple");
        let f = (grain / self.grain) as i64;
        self.terms.iter().map(move |(e, c)| (e * f, c))
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return GradedPoly::zero();
        }
        GradedPoly {
            grain: self.grain,
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Multiplies by `q^{exponent}`.
    pub fn shift(&self, exponent: &Rat) -> Self {
        self * &GradedPoly::monomial_rat(Rat::one(), exponent)
    }

    /// Substitutes `q ↦ q^{factor}` for a positive rational factor.
    pub fn substitute_power(&self, factor: &Rat) -> Self {
        assert!(factor.is_positive(), "substitution exponent must be positive");
        let pairs = self.rat_terms().map(|(e, c)| (e * factor, c.clone()));
        let mut out = GradedPoly::zero();
        for (e, c) in pairs {
            out = &out + &GradedPoly::monomial_rat(c, &e);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = GradedPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Formal derivative `d/dq`.
    pub fn derivative(&self) -> Self {
        let k = self.grain as i64;
        let pairs = self
            .terms
            .iter()
            .map(|(e, c)| (e - k, c * Rat::new(*e, k)));
        GradedPoly::from_pairs(self.grain, pairs)
    }

    /// Exact value at a rational point.
    pub fn eval(&self, point: &Rat) -> Result<Rat, ExactError> {
        Ok(self.eval_derivatives(point, 0)?.remove(0))
    }

    /// `[p(x), p'(x), …, p^{(order)}(x)]` evaluated exactly at `x = point`.
    pub fn eval_derivatives(&self, point: &Rat, order: usize) -> Result<Vec<Rat>, ExactError> {
        if point.is_negative() && !self.has_integer_exponents() {
            return Err(ExactError::NonIntegerExponentAtNegativePoint);
        }
        let k = self.grain as i64;
        let mut out = vec![Rat::zero(); order + 1];
        let unit = point.is_one() || point == &-Rat::one();
        if unit && k == 1 {
            // x^{e-i} is ±1, so each term only needs an integer falling factorial
            let odd_flips = !point.is_one();
            for (&e, c) in &self.terms {
                let mut falling: i128 = 1;
                for (i, slot) in out.iter_mut().enumerate() {
                    if i > 0 {
                        falling *= (e - i as i64 + 1) as i128;
                    }
                    if falling == 0 {
                        break;
                    }
                    let sign = if odd_flips && (e - i as i64).rem_euclid(2) == 1 { -1 } else { 1 };
                    *slot += &(c * Rat::from_int(falling * sign));
                }
            }
            return Ok(out);
        }
        for (e, c) in &self.terms {
            let exponent = Rat::new(*e, k);
            // falling factorial e(e-1)…(e-i+1)
            let mut falling = Rat::one();
            for (i, slot) in out.iter_mut().enumerate() {
                if i > 0 {
                    falling *= &(&exponent - Rat::from(i as i64 - 1));
                }
                if falling.is_zero() {
                    break;
                }
                let power = rat_power(point, &(&exponent - Rat::from(i as i64)))?;
                *slot += &(c * &falling * power);
            }
        }
        Ok(out)
    }
}

/// `base^{exponent}` in ℚ, or an error when the value is undefined or irrational.
pub(crate) fn rat_power(base: &Rat, exponent: &Rat) -> Result<Rat, ExactError> {
    if exponent.is_zero() {
        return Ok(Rat::one());
    }
    if base.is_zero() {
        return if exponent.is_positive() {
            Ok(Rat::zero())
        } else {
            Err(ExactError::ZeroToNegativePower)
        };
    }
    let k: u32 = exponent
        .denom()
        .try_into()
        .map_err(|_| ExactError::IrrationalPower)?;
    let p: i64 = exponent
        .numer()
        .try_into()
        .map_err(|_| ExactError::IrrationalPower)?;
    if base.is_one() || (k == 1 && base == &-Rat::one()) {
        return Ok(if base.is_one() || p % 2 == 0 { Rat::one() } else { -Rat::one() });
    }
    if k == 1 {
        return Ok(base.pow(p));
    }
    if base.is_negative() {
        return Err(ExactError::NonIntegerExponentAtNegativePoint);
    }
    let root = base.nth_root_exact(k).ok_or(ExactError::IrrationalPower)?;
    Ok(root.pow(p))
}

/// Exact derivatives of a graded polynomial at a point.
pub fn poly_eval_derivatives(p: &GradedPoly, point: &Rat, order: usize) -> Result<Vec<Rat>, ExactError> {
    p.eval_derivatives(point, order)
}

fn lcm_grain(a: u32, b: u32) -> u32 {
    a.lcm(&b)
}

impl Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        let g = lcm_grain(self.grain, rhs.grain);
        let pairs = self
            .keys_over(g)
            .chain(rhs.keys_over(g))
            .map(|(e, c)| (e, c.clone()));
        GradedPoly::from_pairs(g, pairs)
    }
}

impl Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        self + &(-rhs)
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        GradedPoly {
            grain: self.grain,
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &GradedPoly {
    type Output = GradedPoly;
    fn mul(self, rhs: &GradedPoly) -> GradedPoly {
        let g = lcm_grain(self.grain, rhs.grain);
        let mut terms: BTreeMap<i64, Rat> = BTreeMap::new();
        for (ea, ca) in self.keys_over(g) {
            for (eb, cb) in rhs.keys_over(g) {
                *terms.entry(ea + eb).or_default() += ca * cb;
            }
        }
        GradedPoly::from_terms(g, terms)
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for GradedPoly {
            type Output = GradedPoly;
            fn $method(self, rhs: GradedPoly) -> GradedPoly {
                $tr::$method(&self, &rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        -&self
    }
}

impl fmt::Display for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.rat_terms() {
            let (sign, mag) = if c.is_negative() { ("-", c.abs()) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            if e.is_zero() {
                write!(f, "{mag}")?;
                continue;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            if e.is_one() {
                write!(f, "q")?;
            } else if e.is_integer() && !e.is_negative() {
                write!(f, "q^{e}")?;
            } else {
                write!(f, "q^({e})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GradedPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedPoly[{self}]")
    }
}
