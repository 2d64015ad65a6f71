//! Dense univariate polynomials over ℚ, coefficients stored low degree first.
//!
//! Only used internally by rational-function normalization; the public carrier is
//! [`GradedPoly`](super::GradedPoly).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rat;

pub(crate) type Dense = Vec<Rat>;

pub(crate) fn trim(p: &mut Dense) {
    while p.last().is_some_and(Rat::is_zero) {
        p.pop();
    }
}

/// Euclidean division `a = q·b + r`, `deg r < deg b`. `b` must be nonzero and trimmed.
pub(crate) fn div_rem(a: &[Rat], b: &[Rat]) -> (Dense, Dense) {
    let lead = b.last().expect("division by the zero polynomial");
    let inv = lead.recip();
    let mut rem: Dense = a.to_vec();
    trim(&mut rem);
    if rem.len() < b.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rat::zero(); rem.len() - b.len() + 1];
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let c = rem.last().unwrap() * &inv;
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                rem[shift + j] -= &(&c * y);
            }
        }
        quot[shift] = c;
        rem.pop();
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

fn make_monic(p: &mut Dense) {
    if let Some(lead) = p.last().cloned() {
        if !lead.is_one() {
            let inv = lead.recip();
            for c in p.iter_mut() {
                *c *= &inv;
            }
        }
    }
}

/// Monic greatest common divisor. `gcd(0, 0)` is the zero polynomial.
///
/// Runs a primitive pseudo-remainder sequence over ℤ, which keeps coefficients small
/// compared with Euclid over ℚ.
pub(crate) fn gcd(a: &[Rat], b: &[Rat]) -> Dense {
    let mut x = primitive(a);
    let mut y = primitive(b);
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    while !y.is_empty() {
        let r = primitive_int(pseudo_rem(&x, &y));
        x = std::mem::replace(&mut y, r);
    }
    let mut out: Dense = x.into_iter().map(Rat::from).collect();
    make_monic(&mut out);
    out
}

pub(crate) fn mul(a: &[Rat], b: &[Rat]) -> Dense {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
        for (j, y) in b.iter().enumerate().filter(|(_, y)| !y.is_zero()) {
            out[i + j] += x * y;
        }
    }
    out
}

/// `Φ_n`, built as `(u^n - 1) / ∏_{e | n, e < n} Φ_e`.
pub(crate) fn cyclotomic(n: u64, cache: &mut BTreeMap<u64, Dense>) -> Dense {
    if let Some(p) = cache.get(&n) {
        return p.clone();
    }
    let mut p = vec![Rat::zero(); n as usize + 1];
    p[0] = Rat::from(-1);
    p[n as usize] = Rat::one();
    for e in (1..n).filter(|e| n.is_multiple_of(*e)) {
        let f = cyclotomic(e, cache);
        p = div_rem(&p, &f).0;
    }
    cache.insert(n, p.clone());
    p
}

/// `a / b` when `b` divides `a`.
pub(crate) fn div_exact(a: &[Rat], b: &[Rat]) -> Option<Dense> {
    let (q, r) = div_rem(a, b);
    r.is_empty().then_some(q)
}

/// Integer polynomial with coprime coefficients proportional to `p`.
fn primitive(p: &[Rat]) -> Vec<BigInt> {
    let denom = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| c.numer() * (&denom / c.denom())).collect();
    primitive_int(ints)
}

fn primitive_int(mut p: Vec<BigInt>) -> Vec<BigInt> {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
    let content = p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if !content.is_zero() && !content.is_one() {
        for c in p.iter_mut() {
            *c /= &content;
        }
    }
    p
}

/// Remainder of `lc(b)^k · a` by `b` over ℤ. `b` must be nonzero and trimmed.
fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let lead = b.last().expect("division by the zero polynomial");
    let mut rem = a.to_vec();
    while rem.len() >= b.len() {
        let shift = rem.len() - b.len();
        let top = rem.pop().expect("nonempty");
        for c in rem.iter_mut() {
            *c *= lead;
        }
        for (j, y) in b[..b.len() - 1].iter().enumerate() {
            rem[shift + j] -= &top * y;
        }
        while rem.last().is_some_and(Zero::is_zero) {
            rem.pop();
        }
    }
    rem
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(cs: &[i64]) -> Dense {
        cs.iter().map(|&c| Rat::from(c)).collect()
    }

    #[test]
    fn gcd_of_cyclotomic_products() {
        // gcd(q^4 - 1, q^6 - 1) = q^2 - 1
        let g = gcd(&d(&[-1, 0, 0, 0, 1]), &d(&[-1, 0, 0, 0, 0, 0, 1]));
        assert_eq!(g, d(&[-1, 0, 1]));
    }

    #[test]
    fn division_is_exact_on_multiples() {
        let a = d(&[1, 2, 1]);
        let b = d(&[1, 1]);
        let (q, r) = div_rem(&a, &b);
        assert_eq!(q, d(&[1, 1]));
        assert!(r.is_empty());
    }

    #[test]
    fn cyclotomic_polynomials() {
        let mut cache = BTreeMap::new();
        assert_eq!(cyclotomic(1, &mut cache), d(&[-1, 1]));
        assert_eq!(cyclotomic(6, &mut cache), d(&[1, -1, 1]));
        assert_eq!(cyclotomic(12, &mut cache), d(&[1, 0, -1, 0, 1]));
        assert_eq!(div_exact(&d(&[-1, 0, 0, 1]), &d(&[1, 1, 1])), Some(d(&[-1, 1])));
        assert_eq!(div_exact(&d(&[-1, 0, 0, 1]), &d(&[1, 1])), None);
    }

    #[test]
    fn gcd_with_rational_coefficients() {
        // (q/2 + 1/3)(q - 1) and (q/2 + 1/3)(q + 5)
        let a = d(&[-2, -1, 3]).into_iter().map(|c| c / Rat::from(6)).collect::<Vec<_>>();
        let b = [Rat::new(5, 3), Rat::new(17, 6), Rat::new(1, 2)];
        assert_eq!(gcd(&a, &b), vec![Rat::new(2, 3), Rat::one()]);
    }

    #[test]
    fn gcd_with_zero() {
        assert_eq!(gcd(&d(&[2, 4]), &[]), vec![Rat::new(1, 2), Rat::one()]);
        assert!(gcd(&[], &[]).is_empty());
    }
}
