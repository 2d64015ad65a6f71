//! Rational functions in `q^{1/k}` kept in lowest terms.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::dense::{self, Dense};
use super::{ExactError, GradedPoly, Rat};

/// A quotient `num / den` of graded polynomials.
///
/// Invariants: with `u = q^{1/K}` for `K` the lcm of both grains, `num` and `den` are
/// polynomials in `u` (no negative exponents), coprime in `ℚ[u]`, and `den` is monic.
/// Zero is `0 / 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: GradedPoly,
    den: GradedPoly,
}

impl RatFunc {
    /// Reduces `num / den` to its normalized representative.
    pub fn new(num: GradedPoly, den: GradedPoly) -> Result<Self, ExactError> {
        ratfunc_reduce(&num, &den)
    }

    pub fn from_poly(p: GradedPoly) -> Self {
        RatFunc::new(p, GradedPoly::one()).expect("unit denominator")
    }

    pub fn zero() -> Self {
        RatFunc {
            num: GradedPoly::zero(),
            den: GradedPoly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc {
            num: GradedPoly::one(),
            den: GradedPoly::one(),
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatFunc::from_poly(GradedPoly::constant(c))
    }

    pub fn num(&self) -> &GradedPoly {
        &self.num
    }

    pub fn den(&self) -> &GradedPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The Laurent polynomial equal to `self`, if the denominator is a monomial.
    pub fn as_laurent(&self) -> Option<GradedPoly> {
        if self.den.len() != 1 {
            return None;
        }
        let shift = self.den.degree().expect("nonzero denominator");
        Some(self.num.shift(&-shift))
    }

    pub fn recip(&self) -> Result<Self, ExactError> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn checked_div(&self, rhs: &RatFunc) -> Result<Self, ExactError> {
        RatFunc::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    /// Multiplies by `q^{exponent}`.
    pub fn shift(&self, exponent: &Rat) -> Self {
        RatFunc::new(self.num.shift(exponent), self.den.clone()).expect("nonzero denominator")
    }

    /// Exact limit as `q → 1`.
    pub fn limit_at_one(&self) -> Result<Rat, ExactError> {
        let d = self.den.eval(&Rat::one())?;
        if d.is_zero() {
            return Err(ExactError::PoleAtOne);
        }
        Ok(self.num.eval(&Rat::one())? / d)
    }

    /// Exact value of `d/dq` at `q = 1`.
    pub fn derivative_at_one(&self) -> Result<Rat, ExactError> {
        let one = Rat::one();
        let n = self.num.eval_derivatives(&one, 1)?;
        let d = self.den.eval_derivatives(&one, 1)?;
        if d[0].is_zero() {
            return Err(ExactError::PoleAtOne);
        }
        Ok((&n[1] * &d[0] - &n[0] * &d[1]) / (&d[0] * &d[0]))
    }
}

/// Normalizes `num / den`: cancels the polynomial gcd, makes the denominator monic and
/// moves every power of `q` into a single side.
pub fn ratfunc_reduce(num: &GradedPoly, den: &GradedPoly) -> Result<RatFunc, ExactError> {
    normalize(num, den, true)
}

/// Normalizes `num / den` whose polynomial parts in `u = q^{1/K}` are already coprime
/// up to powers of `u`.
fn ratfunc_from_coprime(num: &GradedPoly, den: &GradedPoly) -> Result<RatFunc, ExactError> {
    normalize(num, den, false)
}

fn normalize(num: &GradedPoly, den: &GradedPoly, cancel: bool) -> Result<RatFunc, ExactError> {
    if den.is_zero() {
        return Err(ExactError::ZeroDenominator);
    }
    if num.is_zero() {
        return Ok(RatFunc::zero());
    }
    let grain = num.grain().lcm(&den.grain());
    let (n_low, mut n) = to_dense(num, grain);
    let (d_low, mut d) = to_dense(den, grain);

    if cancel && d.len() > 1 && n.len() > 1 {
        let g = dense::gcd(&n, &d);
        if g.len() > 1 {
            n = dense::div_rem(&n, &g).0;
            d = dense::div_rem(&d, &g).0;
        }
    }
    let shift = n_low - d_low;
    if shift > 0 {
        n.splice(0..0, std::iter::repeat_n(Rat::zero(), shift as usize));
    } else if shift < 0 {
        d.splice(0..0, std::iter::repeat_n(Rat::zero(), (-shift) as usize));
    }
    let lead = d.last().expect("nonzero denominator").recip();
    for c in n.iter_mut().chain(d.iter_mut()) {
        *c *= &lead;
    }
    Ok(RatFunc {
        num: from_dense(&n, grain),
        den: from_dense(&d, grain),
    })
}

/// `num / ∏_j (q^{e_j} - 1)` in lowest terms, cancelling cyclotomic factors of the
/// denominator one at a time instead of running a polynomial gcd.
pub fn ratfunc_over_binomials(num: &GradedPoly, exponents: &[Rat]) -> Result<RatFunc, ExactError> {
    if exponents.iter().any(Rat::is_zero) {
        return Err(ExactError::ZeroDenominator);
    }
    if num.is_zero() {
        return Ok(RatFunc::zero());
    }
    let grain = exponents
        .iter()
        .filter_map(|e| e.denom().to_u32())
        .fold(num.grain(), |acc, k| acc.lcm(&k));
    // q^e - 1 = -q^e (q^{-e} - 1) turns every factor into one with a positive exponent
    let mut num = num.clone();
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for e in exponents {
        if e.is_negative() {
            num = num.shift(&-e).scale(&Rat::from(-1));
        }
        let k = (e.abs() * Rat::from(grain as i64)).to_i64().expect("integral over the common grain") as u64;
        for c in (1..=k).filter(|c| k.is_multiple_of(*c)) {
            *counts.entry(c).or_default() += 1;
        }
    }
    let (low, mut n) = to_dense(&num, grain);
    let mut cache = BTreeMap::new();
    let mut d: Dense = vec![Rat::one()];
    for (&c, &count) in &counts {
        let phi = dense::cyclotomic(c, &mut cache);
        let mut left = count;
        while left > 0 {
            match dense::div_exact(&n, &phi) {
                Some(q) => {
                    n = q;
                    left -= 1;
                }
                None => break,
            }
        }
        for _ in 0..left {
            d = dense::mul(&d, &phi);
        }
    }
    let num = from_dense(&n, grain).shift(&Rat::new(low, grain as i64));
    ratfunc_from_coprime(&num, &from_dense(&d, grain))
}

/// Exact `lim_{q→1} f(q)` of a rational function.
pub fn ratfunc_limit_at_one(f: &RatFunc) -> Result<Rat, ExactError> {
    f.limit_at_one()
}

/// Splits `p` over grain `k` as `u^{low} · P(u)` with `P(0) ≠ 0`.
fn to_dense(p: &GradedPoly, grain: u32) -> (i64, Dense) {
    let keyed: Vec<(i64, &Rat)> = p.keys_over(grain).collect();
    let low = keyed.first().map(|(e, _)| *e).unwrap_or(0);
    let high = keyed.last().map(|(e, _)| *e).unwrap_or(0);
    let mut out = vec![Rat::zero(); (high - low + 1) as usize];
    for (e, c) in keyed {
        out[(e - low) as usize] = c.clone();
    }
    (low, out)
}

fn from_dense(p: &[Rat], grain: u32) -> GradedPoly {
    GradedPoly::from_pairs(
        grain,
        p.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (i as i64, c.clone())),
    )
}

impl Add for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            return RatFunc::new(&self.num + &rhs.num, self.den.clone()).expect("nonzero");
        }
        RatFunc::new(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
        .expect("product of nonzero denominators")
    }
}

impl Sub for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        RatFunc::new(&self.num * &rhs.num, &self.den * &rhs.den).expect("product of nonzero denominators")
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == GradedPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({}) / ({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc[{self}]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(cs: &[i64]) -> GradedPoly {
        GradedPoly::from_coeffs(cs.iter().copied())
    }

    fn poly(terms: &[(i64, i64)]) -> GradedPoly {
        GradedPoly::from_pairs(1, terms.iter().map(|&(e, c)| (e, Rat::from(c))))
    }

    #[test]
    fn common_factor() {
        let f = RatFunc::new(p(&[-1, 0, 1]), p(&[-1, 1])).unwrap();
        assert_eq!(f, RatFunc::from_poly(p(&[1, 1])));
    }

    #[test]
    fn cyclotomic_quotient() {
        // (1 - q^3) / (q^4 - 1) = -(1 + q + q^2) / (1 + q + q^2 + q^3)
        let f = RatFunc::new(p(&[1, 0, 0, -1]), p(&[-1, 0, 0, 0, 1])).unwrap();
        assert_eq!(f.num(), &p(&[-1, -1, -1]));
        assert_eq!(f.den(), &p(&[1, 1, 1, 1]));
        assert_eq!(f.limit_at_one().unwrap(), Rat::new(-3, 4));
    }

    #[test]
    fn zero_numerator() {
        let f = RatFunc::new(GradedPoly::zero(), p(&[1, 1])).unwrap();
        assert_eq!(f.num(), &GradedPoly::zero());
        assert_eq!(f.den(), &GradedPoly::one());
    }

    #[test]
    fn zero_denominator() {
        assert_eq!(
            RatFunc::new(p(&[1]), GradedPoly::zero()),
            Err(ExactError::ZeroDenominator)
        );
    }

    #[test]
    fn laurent_powers_move_to_one_side() {
        // q^{-2} (1 + q^2) = (1 + q^2) / q^2
        let f = RatFunc::new(
            GradedPoly::from_pairs(1, [(-2, Rat::one()), (0, Rat::one())]),
            GradedPoly::one(),
        )
        .unwrap();
        assert_eq!(f.den(), &GradedPoly::var().pow(2));
        assert_eq!(
            f.as_laurent().unwrap(),
            GradedPoly::from_pairs(1, [(-2, Rat::one()), (0, Rat::one())])
        );
    }

    #[test]
    fn grain_is_minimized_after_reduction() {
        // (q - 1) / (q^{1/2} - 1) = q^{1/2} + 1
        let num = p(&[-1, 1]);
        let den = GradedPoly::from_pairs(2, [(0, Rat::from(-1)), (1, Rat::one())]);
        let f = RatFunc::new(num, den).unwrap();
        assert_eq!(f.den(), &GradedPoly::one());
        assert_eq!(f.num(), &GradedPoly::from_pairs(2, [(0, Rat::one()), (1, Rat::one())]));
        // (q^2 - 1)/(q^{1/2}... ) with integer result keeps grain 1
        let g = RatFunc::new(p(&[-1, 0, 1]), GradedPoly::from_pairs(2, [(0, Rat::from(-1)), (2, Rat::one())])).unwrap();
        assert_eq!(g, RatFunc::from_poly(p(&[1, 1])));
        assert_eq!(g.num().grain(), 1);
    }

    #[test]
    fn pole_at_one() {
        let f = RatFunc::new(p(&[1]), p(&[-1, 1])).unwrap();
        assert_eq!(f.limit_at_one(), Err(ExactError::PoleAtOne));
    }

    #[test]
    fn derivative_at_one() {
        // d/dq (q^2 / (1 + q)) = (q^2 + 2q)/(1+q)^2 → 3/4 at 1
        let f = RatFunc::new(p(&[0, 0, 1]), p(&[1, 1])).unwrap();
        assert_eq!(f.derivative_at_one().unwrap(), Rat::new(3, 4));
        // fractional: d/dq q^{1/2} = 1/2
        let h = RatFunc::from_poly(GradedPoly::monomial(Rat::one(), 1, 2));
        assert_eq!(h.derivative_at_one().unwrap(), Rat::new(1, 2));
    }

    #[test]
    fn binomial_denominators_match_generic_reduction() {
        let binomial = |e: &Rat| &GradedPoly::monomial_rat(Rat::one(), e) - &GradedPoly::one();
        let cases: Vec<(GradedPoly, Vec<Rat>)> = vec![
            (poly(&[(0, -1), (3, 1)]), vec![Rat::from(6), Rat::from(2)]),
            (poly(&[(0, 1), (1, 1)]), vec![Rat::new(3, 2), Rat::new(-4, 3)]),
            (poly(&[(-2, 5), (4, -1)]), vec![Rat::from(4), Rat::from(4), Rat::new(1, 2)]),
            (GradedPoly::zero(), vec![Rat::one()]),
        ];
        for (num, exps) in cases {
            let den = exps.iter().fold(GradedPoly::one(), |acc, e| &acc * &binomial(e));
            assert_eq!(ratfunc_over_binomials(&num, &exps).unwrap(), RatFunc::new(num, den).unwrap());
        }
        assert_eq!(
            ratfunc_over_binomials(&GradedPoly::one(), &[Rat::zero()]),
            Err(ExactError::ZeroDenominator)
        );
    }
}
