//! Exact rational and complex-rational scalars.
//!
//! `Q` wraps a 128-bit rational and performs every operation with overflow
//! checks: a result is either exact or the process panics. Nothing is ever
//! silently rounded.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational number, always stored in lowest terms with a positive
/// denominator.
#[derive(Clone, Copy, Default)]
pub struct Q(Ratio<i128>);

// Lowest terms make equality structural; `Ratio`'s own comparison divides.
impl PartialEq for Q {
    #[inline]
    fn eq(&self, other: &Q) -> bool {
        self.0.numer() == other.0.numer() && self.0.denom() == other.0.denom()
    }
}

impl Eq for Q {}

impl std::hash::Hash for Q {
    fn hash<H: std::hash::Hasher>(&self, h: &mut H) {
        self.0.numer().hash(h);
        self.0.denom().hash(h);
    }
}

#[inline]
fn overflow() -> ! {
    panic!("rational overflow: exact coefficient exceeded 128-bit range")
}

const SMALL: i128 = 1 << 62;

#[inline]
fn small(x: i128) -> bool {
    -SMALL < x && x < SMALL
}

#[inline]
fn gcd64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    if a == 1 || b == 1 {
        return 1;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

/// Nonnegative gcd with a 64-bit fast path.
pub(crate) fn gcd(a: i128, b: i128) -> i128 {
    if small(a) && small(b) {
        gcd64(a.unsigned_abs() as u64, b.unsigned_abs() as u64) as i128
    } else {
        a.gcd(&b)
    }
}

// Reduced-input fast paths when every part fits in 62 bits, done in 64-bit
// arithmetic; products are widened to i128 and cannot overflow.
#[inline]
fn add_small(an: i128, ad: i128, bn: i128, bd: i128) -> Option<Ratio<i128>> {
    if !(small(an) && small(ad) && small(bn) && small(bd)) {
        return None;
    }
    let (an, ad, bn, bd) = (an as i64, ad as i64, bn as i64, bd as i64);
    if ad == bd {
        let n = an + bn;
        if ad == 1 {
            return Some(Ratio::new_raw(n as i128, 1));
        }
        let g = gcd64(n.unsigned_abs(), ad as u64) as i64;
        if g == 1 {
            return Some(Ratio::new_raw(n as i128, ad as i128));
        }
        return Some(Ratio::new_raw((n / g) as i128, (ad / g) as i128));
    }
    let g = gcd64(ad as u64, bd as u64) as i64;
    if g == 1 {
        let t = an as i128 * bd as i128 + bn as i128 * ad as i128;
        return Some(Ratio::new_raw(t, ad as i128 * bd as i128));
    }
    let (adg, bdg) = (ad / g, bd / g);
    let t = an as i128 * bdg as i128 + bn as i128 * adg as i128;
    if t == 0 {
        return Some(Ratio::new_raw(0, 1));
    }
    let tm = if small(t) { (t as i64).unsigned_abs() % g as u64 } else { (t.unsigned_abs() % g as u128) as u64 };
    let g2 = gcd64(tm, g as u64) as i64;
    let num = if g2 == 1 {
        t
    } else if small(t) {
        (t as i64 / g2) as i128
    } else {
        t / g2 as i128
    };
    Some(Ratio::new_raw(num, adg as i128 * (bd / g2) as i128))
}

#[inline]
fn mul_small(an: i128, ad: i128, bn: i128, bd: i128) -> Option<Ratio<i128>> {
    if !(small(an) && small(ad) && small(bn) && small(bd)) {
        return None;
    }
    let (an, ad, bn, bd) = (an as i64, ad as i64, bn as i64, bd as i64);
    let g1 = gcd64(an.unsigned_abs(), bd as u64) as i64;
    let g2 = gcd64(bn.unsigned_abs(), ad as u64) as i64;
    if g1 == 1 && g2 == 1 {
        return Some(Ratio::new_raw(an as i128 * bn as i128, ad as i128 * bd as i128));
    }
    Some(Ratio::new_raw((an / g1) as i128 * (bn / g2) as i128, (ad / g2) as i128 * (bd / g1) as i128))
}

impl Q {
    pub const ZERO: Q = Q(Ratio::new_raw(0, 1));
    pub const ONE: Q = Q(Ratio::new_raw(1, 1));

    pub fn new(num: i128, den: i128) -> Q {
        assert!(den != 0, "zero denominator");
        if den > 0 && small(num) && small(den) {
            let g = gcd64(num.unsigned_abs() as u64, den as u64) as i64;
            let (n, d) = (num as i64, den as i64);
            return Q(Ratio::new_raw((n / g) as i128, (d / g) as i128));
        }
        Q(Ratio::new(num, den))
    }

    pub fn int(n: i128) -> Q {
        Q(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i128 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i128 {
        *self.0.denom()
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.0.numer().is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn signum(&self) -> i32 {
        match self.0.numer().cmp(&0) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    pub fn abs(&self) -> Q {
        Q(self.0.abs())
    }

    pub fn recip(&self) -> Q {
        assert!(!self.is_zero(), "reciprocal of zero");
        Q(self.0.recip())
    }

    pub fn to_f64(&self) -> f64 {
        // Split to keep precision for large numerators and denominators.
        let (n, d) = (*self.0.numer(), *self.0.denom());
        let (q, r) = n.div_rem(&d);
        q.to_f64().unwrap_or(f64::NAN) + r as f64 / d as f64
    }

    pub fn pow(&self, k: u32) -> Q {
        let mut out = Q::ONE;
        for _ in 0..k {
            out = out * *self;
        }
        out
    }
}

impl fmt::Debug for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Q {
    type Err = Error;

    fn from_str(s: &str) -> Result<Q, Error> {
        let bad = || Error::Parse(format!("invalid rational {s:?}; expected \"p\" or \"p/q\""));
        let t = s.trim();
        match t.split_once('/') {
            Some((n, d)) => {
                let n: i128 = n.trim().parse().map_err(|_| bad())?;
                let d: i128 = d.trim().parse().map_err(|_| bad())?;
                if d == 0 {
                    return Err(bad());
                }
                Ok(Q::new(n, d))
            }
            None => t.parse::<i128>().map(Q::int).map_err(|_| bad()),
        }
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Q {
    fn from(n: i64) -> Q {
        Q::int(n as i128)
    }
}

impl From<i32> for Q {
    fn from(n: i32) -> Q {
        Q::int(n as i128)
    }
}

impl PartialOrd for Q {
    fn partial_cmp(&self, other: &Q) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Q {
    fn cmp(&self, other: &Q) -> Ordering {
        let (an, ad, bn, bd) = (*self.0.numer(), *self.0.denom(), *other.0.numer(), *other.0.denom());
        if ad == bd {
            return an.cmp(&bn);
        }
        if small(an) && small(ad) && small(bn) && small(bd) {
            return (an * bd).cmp(&(bn * ad));
        }
        // Ratio's Ord is overflow-safe.
        self.0.cmp(&other.0)
    }
}

impl Add for Q {
    type Output = Q;
    #[inline]
    fn add(self, rhs: Q) -> Q {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (a, b) = (&self.0, &rhs.0);
        if let Some(r) = add_small(*a.numer(), *a.denom(), *b.numer(), *b.denom()) {
            return Q(r);
        }
        Q(a.checked_add(b).unwrap_or_else(|| overflow()))
    }
}

impl Sub for Q {
    type Output = Q;
    #[inline]
    fn sub(self, rhs: Q) -> Q {
        if rhs.is_zero() {
            return self;
        }
        let (a, b) = (&self.0, &rhs.0);
        if let Some(r) = add_small(*a.numer(), *a.denom(), -*b.numer(), *b.denom()) {
            return Q(r);
        }
        Q(a.checked_sub(b).unwrap_or_else(|| overflow()))
    }
}

impl Mul for Q {
    type Output = Q;
    #[inline]
    fn mul(self, rhs: Q) -> Q {
        if self.is_zero() || rhs.is_zero() {
            return Q::ZERO;
        }
        if self == Q::ONE {
            return rhs;
        }
        if rhs == Q::ONE {
            return self;
        }
        let (a, b) = (&self.0, &rhs.0);
        if let Some(r) = mul_small(*a.numer(), *a.denom(), *b.numer(), *b.denom()) {
            return Q(r);
        }
        Q(a.checked_mul(b).unwrap_or_else(|| overflow()))
    }
}

impl Div for Q {
    type Output = Q;
    fn div(self, rhs: Q) -> Q {
        assert!(!rhs.is_zero(), "division by zero");
        Q(self.0.checked_div(&rhs.0).unwrap_or_else(|| overflow()))
    }
}

impl Neg for Q {
    type Output = Q;
    #[inline]
    fn neg(self) -> Q {
        Q(-self.0)
    }
}

impl AddAssign for Q {
    #[inline]
    fn add_assign(&mut self, rhs: Q) {
        *self = *self + rhs;
    }
}

impl SubAssign for Q {
    #[inline]
    fn sub_assign(&mut self, rhs: Q) {
        *self = *self - rhs;
    }
}

impl MulAssign for Q {
    #[inline]
    fn mul_assign(&mut self, rhs: Q) {
        *self = *self * rhs;
    }
}

impl Sum for Q {
    fn sum<I: Iterator<Item = Q>>(iter: I) -> Q {
        iter.fold(Q::ZERO, |a, b| a + b)
    }
}

/// Exact complex rational `re + i·im`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Cq {
    pub re: Q,
    pub im: Q,
}

impl Cq {
    pub const ZERO: Cq = Cq { re: Q::ZERO, im: Q::ZERO };

    pub fn new(re: Q, im: Q) -> Cq {
        Cq { re, im }
    }

    pub fn real(re: Q) -> Cq {
        Cq { re, im: Q::ZERO }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Cq {
        Cq { re: self.re, im: -self.im }
    }

    #[inline]
    pub fn scale(&self, s: Q) -> Cq {
        Cq { re: self.re * s, im: self.im * s }
    }

    /// Multiplication by `i·k`.
    #[inline]
    pub fn times_ik(&self, k: i64) -> Cq {
        let k = Q::int(k as i128);
        Cq { re: -(self.im * k), im: self.re * k }
    }
}

impl fmt::Debug for Cq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl Add for Cq {
    type Output = Cq;
    #[inline]
    fn add(self, rhs: Cq) -> Cq {
        Cq { re: self.re + rhs.re, im: self.im + rhs.im }
    }
}

impl Sub for Cq {
    type Output = Cq;
    #[inline]
    fn sub(self, rhs: Cq) -> Cq {
        Cq { re: self.re - rhs.re, im: self.im - rhs.im }
    }
}

impl Mul for Cq {
    type Output = Cq;
    #[inline]
    fn mul(self, rhs: Cq) -> Cq {
        if self.im.is_zero() && rhs.im.is_zero() {
            return Cq::real(self.re * rhs.re);
        }
        Cq { re: self.re * rhs.re - self.im * rhs.im, im: self.re * rhs.im + self.im * rhs.re }
    }
}

impl Neg for Cq {
    type Output = Cq;
    fn neg(self) -> Cq {
        Cq { re: -self.re, im: -self.im }
    }
}

impl AddAssign for Cq {
    #[inline]
    fn add_assign(&mut self, rhs: Cq) {
        self.re += rhs.re;
        self.im += rhs.im;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ratio() -> impl Strategy<Value = (i128, i128)> {
        let part = prop_oneof![-50i128..50, -(1i128 << 61)..(1i128 << 61), -(1i128 << 70)..(1i128 << 70)];
        (part.clone(), part.prop_filter("nonzero", |d| *d != 0))
    }

    proptest! {
        #[test]
        fn fast_paths_agree_with_checked_ratio(a in ratio(), b in ratio()) {
            let (ra, rb) = (Ratio::new(a.0, a.1), Ratio::new(b.0, b.1));
            let (x, y) = (Q(ra), Q(rb));
            if let Some(s) = ra.checked_add(&rb) {
                prop_assert_eq!((x + y).0, s);
            }
            if let Some(d) = ra.checked_sub(&rb) {
                prop_assert_eq!((x - y).0, d);
            }
            if let Some(p) = ra.checked_mul(&rb) {
                prop_assert_eq!((x * y).0, p);
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let q: Q = "-6/4".parse().unwrap();
        assert_eq!(q, Q::new(-3, 2));
        assert_eq!(q.to_string(), "-3/2");
        assert_eq!("7".parse::<Q>().unwrap().to_string(), "7");
        assert!("1/0".parse::<Q>().is_err());
        assert!("x".parse::<Q>().is_err());
    }

    #[test]
    fn arithmetic_is_exact() {
        let third = Q::new(1, 3);
        assert_eq!(third + third + third, Q::ONE);
        assert_eq!(third * Q::int(3), Q::ONE);
        assert_eq!((Q::new(2, 3) / Q::new(4, 9)).to_string(), "3/2");
        assert!((Q::new(1, 3).to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    #[should_panic(expected = "rational overflow")]
    fn overflow_panics() {
        let big = Q::int(i128::MAX / 2);
        let _ = big * big;
    }

    #[test]
    fn complex_ops() {
        let a = Cq::new(Q::int(1), Q::int(2));
        let b = Cq::new(Q::int(3), Q::int(-1));
        assert_eq!(a * b, Cq::new(Q::int(5), Q::int(5)));
        assert_eq!(a.times_ik(2), Cq::new(Q::int(-4), Q::int(2)));
        assert_eq!((a * a.conj()).im, Q::ZERO);
    }
}
