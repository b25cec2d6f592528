//! Canonical nonnegative fractions, heights, Farey membership, and exact
//! signed accumulation.

use crate::arith::{gcd_raw, SieveTable};
use crate::error::{domain, Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;

/// A reduced fraction `s/r` with `s ≥ 0`, `r ≥ 1` and `gcd(s, r) = 1`.
///
/// Fields are private so the only way in is [`Fraction::reduce`], which makes
/// equality of values and equality of representations the same thing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub const ZERO: Fraction = Fraction { num: 0, den: 1 };
    pub const ONE: Fraction = Fraction { num: 1, den: 1 };

    pub fn reduce(s: u64, r: u64) -> Result<Fraction> {
        if r == 0 {
            return domain("fraction with zero denominator");
        }
        let g = gcd_raw(s, r);
        Ok(Fraction {
            num: s / g,
            den: r / g,
        })
    }

    /// Builds a fraction already known to be in lowest terms.
    pub(crate) fn from_reduced(num: u64, den: u64) -> Fraction {
        debug_assert!(den >= 1 && gcd_raw(num, den) == 1);
        Fraction { num, den }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn height(&self) -> u64 {
        self.num.max(self.den)
    }

    pub fn in_farey(&self, h: u64) -> bool {
        self.height() <= h
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Accepts `s/r` or a bare integer; the result is canonical either way.
    fn from_str(text: &str) -> Result<Fraction> {
        let text = text.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<u64>()
                .map_err(|e| Error::Domain(format!("bad fraction {text:?}: {e}")))
        };
        match text.split_once('/') {
            Some((s, r)) => Fraction::reduce(parse(s)?, parse(r)?),
            None => Fraction::reduce(parse(text)?, 1),
        }
    }
}

/// Number of Farey fractions of order `h` in `[0, 1]`, i.e. `1 + Σ_{r ≤ h} φ(r)`.
pub fn farey_unit_count(h: u64) -> Result<u64> {
    if h == 0 {
        return domain("Farey order must be positive");
    }
    let table = SieveTable::new(h)?;
    Ok(1 + table.phi_values().iter().sum::<u64>())
}

/// All of `F(h) ∩ [0, 1]`, ordered by denominator and then numerator.
pub fn farey_unit_fractions(h: u64) -> Vec<Fraction> {
    let mut out = vec![Fraction::ZERO, Fraction::ONE];
    for r in 2..=h {
        out.extend(
            (1..r)
                .filter(|&s| gcd_raw(s, r) == 1)
                .map(|s| Fraction::from_reduced(s, r)),
        );
    }
    if h == 0 {
        out.clear();
    }
    out
}

/// An exact signed rational kept in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Accumulator {
    num: BigInt,
    den: BigUint,
}

impl Default for Accumulator {
    fn default() -> Self {
        Accumulator::zero()
    }
}

impl Accumulator {
    pub fn zero() -> Accumulator {
        Accumulator {
            num: BigInt::zero(),
            den: BigUint::one(),
        }
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Accumulator {
        Accumulator {
            num: v.into(),
            den: BigUint::one(),
        }
    }

    pub fn numerator(&self) -> &BigInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    /// Returns `self + coeff · f`, reduced.
    pub fn accumulate(&self, coeff: &BigInt, f: &Fraction) -> Accumulator {
        let fden = BigUint::from(f.den);
        let term_num = coeff * BigInt::from(f.num);
        let g = self.den.gcd(&fden);
        let left = &fden / &g;
        let right = &self.den / &g;
        let num = &self.num * BigInt::from_biguint(Sign::Plus, left)
            + term_num * BigInt::from_biguint(Sign::Plus, right);
        let den = &self.den / &g * &fden;
        Accumulator::normalized(num, den)
    }

    /// Sum of `coeff · numerator / den` over fractions sharing one denominator,
    /// reduced once at the end.
    pub fn from_common_denominator(
        terms: &[(BigInt, u64)],
        den: u64,
    ) -> Result<Accumulator> {
        if den == 0 {
            return domain("zero denominator");
        }
        let num: BigInt = terms.iter().map(|(c, s)| c * BigInt::from(*s)).sum();
        Ok(Accumulator::normalized(num, BigUint::from(den)))
    }

    fn normalized(num: BigInt, den: BigUint) -> Accumulator {
        let g = num.magnitude().gcd(&den);
        if g.is_one() || g.is_zero() {
            if num.is_zero() {
                return Accumulator::zero();
            }
            return Accumulator { num, den };
        }
        let sign = num.sign();
        Accumulator {
            num: BigInt::from_biguint(sign, num.magnitude() / &g),
            den: den / g,
        }
    }

    /// The value as a [`Fraction`] when it is nonnegative and fits `u64`.
    pub fn to_fraction(&self) -> Option<Fraction> {
        if self.num.is_negative() {
            return None;
        }
        let num = u64::try_from(self.num.magnitude()).ok()?;
        let den = u64::try_from(&self.den).ok()?;
        Some(Fraction::from_reduced(num, den))
    }
}

impl fmt::Display for Accumulator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(s: u64, r: u64) -> Fraction {
        Fraction::reduce(s, r).unwrap()
    }

    #[test]
    fn reduce_examples() {
        assert_eq!(frac(0, 7), Fraction::ZERO);
        assert_eq!(frac(4, 6).to_string(), "2/3");
        assert_eq!(frac(5, 5), Fraction::ONE);
        assert!(matches!(Fraction::reduce(1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn height_and_membership() {
        assert_eq!(Fraction::ZERO.height(), 1);
        assert_eq!(frac(2, 3).height(), 3);
        assert_eq!(frac(7, 4).height(), 7);
        assert!(frac(1, 2).in_farey(2));
        assert!(!frac(1, 3).in_farey(2));
        assert!(Fraction::ONE.in_farey(1));
    }

    #[test]
    fn reduce_idempotent_and_canonical() {
        for s in 0..=1000u64 {
            for r in 1..=1000u64 {
                let f = frac(s, r);
                assert_eq!(frac(f.numerator(), f.denominator()), f);
            }
        }
        for s in 0..=30u64 {
            for r in 1..=30u64 {
                for k in 1..=50u64 {
                    assert_eq!(frac(k * s, k * r), frac(s, r));
                }
            }
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!("6/4".parse::<Fraction>().unwrap().to_string(), "3/2");
        assert_eq!("3".parse::<Fraction>().unwrap(), frac(3, 1));
        assert!("1/0".parse::<Fraction>().is_err());
        assert!("-1/2".parse::<Fraction>().is_err());
    }

    #[test]
    fn farey_counts() {
        assert_eq!(farey_unit_count(1), Ok(2));
        assert_eq!(farey_unit_count(2), Ok(3));
        assert_eq!(farey_unit_count(4), Ok(7));
        for h in 1..=200u64 {
            let mut brute = std::collections::HashSet::new();
            for r in 1..=h {
                for s in 0..=r {
                    brute.insert(frac(s, r));
                }
            }
            assert_eq!(farey_unit_count(h).unwrap(), brute.len() as u64, "h = {h}");
            assert_eq!(farey_unit_fractions(h).len(), brute.len());
        }
    }

    #[test]
    fn accumulate_examples() {
        let one = BigInt::from(1);
        let a = Accumulator::zero().accumulate(&one, &frac(1, 2));
        assert_eq!(a.to_string(), "1/2");
        let b = a.accumulate(&one, &frac(1, 2));
        assert_eq!(b.to_fraction(), Some(Fraction::ONE));
        let c = a.accumulate(&BigInt::from(-3), &frac(1, 3));
        assert_eq!(c.to_string(), "-1/2");
        assert!(c.is_negative());
        assert_eq!(c.to_fraction(), None);
        let z = a.accumulate(&BigInt::from(-1), &frac(1, 2));
        assert!(z.is_zero());
        assert_eq!(z, Accumulator::zero());
    }

    #[test]
    fn huge_coefficients_stay_exact() {
        let big = BigInt::from(10u8).pow(60);
        let acc = Accumulator::zero()
            .accumulate(&big, &frac(1, 3))
            .accumulate(&(-&big), &frac(1, 3));
        assert!(acc.is_zero());
    }

    #[test]
    fn common_denominator_path_matches_accumulate() {
        let terms: Vec<(BigInt, u64)> = vec![(1.into(), 3), ((-2).into(), 5), (7.into(), 1)];
        let fast = Accumulator::from_common_denominator(&terms, 12).unwrap();
        let slow = terms.iter().fold(Accumulator::zero(), |acc, (c, s)| {
            acc.accumulate(c, &frac(*s, 12))
        });
        assert_eq!(fast, slow);
        assert!(Accumulator::from_common_denominator(&terms, 0).is_err());
    }
}
