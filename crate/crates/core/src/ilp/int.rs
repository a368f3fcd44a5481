//! Integer that stays in an `i128` while it fits and spills to `BigInt`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Int {
    S(i128),
    B(BigInt),
}

impl Int {
    pub(crate) const ZERO: Int = Int::S(0);

    pub(crate) fn from_big(b: BigInt) -> Int {
        match b.to_i128() {
            Some(v) => Int::S(v),
            None => Int::B(b),
        }
    }

    pub(crate) fn big(&self) -> BigInt {
        match self {
            Int::S(v) => BigInt::from(*v),
            Int::B(b) => b.clone(),
        }
    }

    pub(crate) fn is_zero(&self) -> bool {
        matches!(self, Int::S(0))
    }

    pub(crate) fn signum(&self) -> i32 {
        match self {
            Int::S(v) => v.signum() as i32,
            Int::B(b) => {
                if b.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub(crate) fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub(crate) fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub(crate) fn neg(&self) -> Int {
        match self {
            Int::S(v) => match v.checked_neg() {
                Some(n) => Int::S(n),
                None => Int::B(-BigInt::from(*v)),
            },
            Int::B(b) => Int::from_big(-b),
        }
    }

    pub(crate) fn abs(&self) -> Int {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub(crate) fn add(&self, o: &Int) -> Int {
        if let (Int::S(a), Int::S(b)) = (self, o) {
            if let Some(s) = a.checked_add(*b) {
                return Int::S(s);
            }
        }
        Int::from_big(self.big() + o.big())
    }

    pub(crate) fn sub(&self, o: &Int) -> Int {
        if let (Int::S(a), Int::S(b)) = (self, o) {
            if let Some(s) = a.checked_sub(*b) {
                return Int::S(s);
            }
        }
        Int::from_big(self.big() - o.big())
    }

    pub(crate) fn mul(&self, o: &Int) -> Int {
        if let (Int::S(a), Int::S(b)) = (self, o) {
            if let Some(s) = a.checked_mul(*b) {
                return Int::S(s);
            }
        }
        Int::from_big(self.big() * o.big())
    }

    /// `(x·p − f·y) / d`, where the division is known to be exact.
    pub(crate) fn mul_sub_div(x: &Int, p: &Int, f: &Int, y: &Int, d: &Int) -> Int {
        if let (Int::S(x), Int::S(p), Int::S(f), Int::S(y), Int::S(d)) = (x, p, f, y, d) {
            if let (Some(a), Some(b)) = (x.checked_mul(*p), f.checked_mul(*y)) {
                if let Some(n) = a.checked_sub(b) {
                    debug_assert_eq!(n % d, 0);
                    return Int::S(n / d);
                }
            }
        }
        Int::from_big((x.big() * p.big() - f.big() * y.big()) / d.big())
    }

    /// `x·p / d`, exact.
    pub(crate) fn mul_div(x: &Int, p: &Int, d: &Int) -> Int {
        if let (Int::S(x), Int::S(p), Int::S(d)) = (x, p, d) {
            if let Some(a) = x.checked_mul(*p) {
                debug_assert_eq!(a % d, 0);
                return Int::S(a / d);
            }
        }
        Int::from_big(x.big() * p.big() / d.big())
    }

    /// Floor remainder modulo a positive `d`.
    pub(crate) fn mod_floor(&self, d: &Int) -> Int {
        if let (Int::S(a), Int::S(d)) = (self, d) {
            return Int::S(a.rem_euclid(*d));
        }
        Int::from_big(self.big().mod_floor(&d.big()))
    }

    /// Floor quotient by a positive `d`.
    pub(crate) fn div_floor(&self, d: &Int) -> Int {
        if let (Int::S(a), Int::S(d)) = (self, d) {
            return Int::S(a.div_euclid(*d));
        }
        Int::from_big(self.big().div_floor(&d.big()))
    }

    /// Compares `a·b` with `c·d`.
    pub(crate) fn cmp_products(a: &Int, b: &Int, c: &Int, d: &Int) -> Ordering {
        if let (Int::S(a), Int::S(b), Int::S(c), Int::S(d)) = (a, b, c, d) {
            if let (Some(x), Some(y)) = (a.checked_mul(*b), c.checked_mul(*d)) {
                return x.cmp(&y);
            }
        }
        (a.big() * b.big()).cmp(&(c.big() * d.big()))
    }
}

impl From<i64> for Int {
    fn from(v: i64) -> Int {
        Int::S(v as i128)
    }
}

impl From<&BigInt> for Int {
    fn from(v: &BigInt) -> Int {
        Int::from_big(v.clone())
    }
}

impl PartialOrd for Int {
    fn partial_cmp(&self, o: &Int) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Ord for Int {
    fn cmp(&self, o: &Int) -> Ordering {
        match (self, o) {
            (Int::S(a), Int::S(b)) => a.cmp(b),
            _ => self.big().cmp(&o.big()),
        }
    }
}

impl Zero for Int {
    fn zero() -> Int {
        Int::ZERO
    }
    fn is_zero(&self) -> bool {
        Int::is_zero(self)
    }
}

impl std::ops::Add for Int {
    type Output = Int;
    fn add(self, o: Int) -> Int {
        Int::add(&self, &o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spills_and_returns() {
        let a = Int::S(i128::MAX);
        let b = a.add(&Int::S(1));
        assert!(matches!(b, Int::B(_)));
        assert_eq!(b.sub(&Int::S(1)), a);
        let big = Int::S(1 << 100);
        let q = Int::mul_sub_div(&big, &big, &Int::S(1), &Int::S(0), &big);
        assert_eq!(q, big);
        assert_eq!(Int::S(i128::MIN).neg().big(), -BigInt::from(i128::MIN));
    }

    #[test]
    fn floor_ops() {
        assert_eq!(Int::S(-7).mod_floor(&Int::S(3)), Int::S(2));
        assert_eq!(Int::S(-7).div_floor(&Int::S(3)), Int::S(-3));
        let b = Int::from_big(BigInt::from(-7) * BigInt::from(u128::MAX));
        let d = Int::from_big(BigInt::from(u128::MAX));
        assert_eq!(b.div_floor(&d), Int::S(-7));
        assert_eq!(b.mod_floor(&d), Int::S(0));
    }

    #[test]
    fn product_comparison() {
        let m = Int::S(i128::MAX);
        assert_eq!(Int::cmp_products(&m, &m, &m, &Int::S(2)), Ordering::Greater);
        assert_eq!(
            Int::cmp_products(&Int::S(2), &Int::S(3), &Int::S(3), &Int::S(2)),
            Ordering::Equal
        );
    }
}
