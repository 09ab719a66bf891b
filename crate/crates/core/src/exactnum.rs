//! Exact rational arithmetic, deterministic primality and p-adic valuations.
//!
//! Every other module works over [`Rational`]; no floating point is used
//! anywhere in the crate. Rationals print (and serialize) as `"n/d"` in lowest
//! terms, or `"n"` when the denominator is one.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default number of candidates a prime scan may examine before giving up.
pub const DEFAULT_SCAN_CAP: u64 = 10_000_000;

/// An exact rational number, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Self {
        let denom = denom.into();
        assert!(!denom.is_zero(), "zero denominator");
        Rational(BigRational::new(numer.into(), denom))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Rational(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// `floor(self)` as a big integer.
    pub fn floor(&self) -> BigInt {
        self.0.floor().to_integer()
    }

    /// `ceil(self)` as a big integer.
    pub fn ceil(&self) -> BigInt {
        self.0.ceil().to_integer()
    }

    pub fn recip(&self) -> Rational {
        Rational(self.0.recip())
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Rational {
        Rational(&self.0 * BigRational::from_integer(k.into()))
    }

    pub fn div_int(&self, k: impl Into<BigInt>) -> Rational {
        Rational(&self.0 / BigRational::from_integer(k.into()))
    }

    pub fn abs(&self) -> Rational {
        Rational(self.0.abs())
    }

    pub fn min_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
        if a <= b {
            a
        } else {
            b
        }
    }

    pub fn max_of<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
        if a >= b {
            a
        } else {
            b
        }
    }

    /// The integer value, when this rational is an integer that fits in `u64`.
    pub fn to_u64(&self) -> Option<u64> {
        if self.is_integer() {
            self.numer().to_u64()
        } else {
            None
        }
    }
}

/// `(n(q), d(q))`: the coprime numerator and denominator of a positive rational.
pub fn num_den(q: &Rational) -> Result<(BigUint, BigUint)> {
    if !q.is_positive() {
        return Err(Error::NonPositive(q.clone()));
    }
    Ok((
        q.numer().magnitude().clone(),
        q.denom().magnitude().clone(),
    ))
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            BigInt::from_str(t.trim()).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        match s.split_once('/') {
            None => Ok(Rational::from_integer(parse(s)?)),
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("{s:?}: zero denominator")));
                }
                Ok(Rational::new(parse(n)?, d))
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($tr::$method(&self.0, &rhs.0))
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(self.0, rhs.0))
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational($tr::$method(self.0, &rhs.0))
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational($tr::$method(&self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl std::ops::Div<&Rational> for &Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        assert!(!rhs.is_zero(), "division by zero");
        Rational(&self.0 / &rhs.0)
    }
}

impl std::ops::Div<&Rational> for Rational {
    type Output = Rational;
    fn div(self, rhs: &Rational) -> Rational {
        &self / rhs
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        self.0 += &rhs.0;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        self.0 -= &rhs.0;
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl<'a> std::iter::Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Rational {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// A prime number, certified by a deterministic Miller-Rabin test when built.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(BigUint);

impl Prime {
    pub fn new(value: impl Into<BigUint>) -> Result<Self> {
        let value = value.into();
        if is_prime(&value) {
            Ok(Prime(value))
        } else {
            Err(Error::NotPrime(value.to_string()))
        }
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn to_bigint(&self) -> BigInt {
        BigInt::from_biguint(Sign::Plus, self.0.clone())
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    pub fn divides(&self, n: &BigInt) -> bool {
        (n.magnitude() % &self.0).is_zero()
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for Prime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0.to_u64() {
            Some(v) => s.serialize_u64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

// Bases 2..=41 make Miller-Rabin deterministic below 3.3 * 10^24.
const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn is_prime_big(n: &BigUint) -> bool {
    let one = BigUint::one();
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return *n == BigUint::from(p);
        }
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for &a in &MR_BASES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Deterministic primality test (exact for every input below 3.3e24, which
/// covers every number this crate ever tests).
pub fn is_prime(n: &BigUint) -> bool {
    match n.to_u64() {
        Some(v) => is_prime_u64(v),
        None => is_prime_big(n),
    }
}

/// Smallest prime `p > lower` with `predicate(p)`, scanning at most `cap`
/// candidates.
pub fn next_prime_satisfying(
    lower: &BigUint,
    cap: u64,
    mut predicate: impl FnMut(&Prime) -> bool,
) -> Result<Prime> {
    let mut candidate = lower + 1u32;
    for _ in 0..cap {
        if is_prime(&candidate) {
            let p = Prime(candidate.clone());
            if predicate(&p) {
                return Ok(p);
            }
        }
        candidate += 1u32;
    }
    Err(Error::ScanCapExceeded {
        lower: lower.to_string(),
        cap,
    })
}

/// Smallest prime strictly above `lower`.
pub fn next_prime(lower: &BigUint) -> Result<Prime> {
    next_prime_satisfying(lower, DEFAULT_SCAN_CAP, |_| true)
}

fn int_valuation(n: &BigInt, p: &BigUint) -> i64 {
    let mut m = n.magnitude().clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `v_p(q)` for nonzero `q`.
pub fn p_adic_valuation(q: &Rational, p: &Prime) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(int_valuation(q.numer(), &p.0) - int_valuation(q.denom(), &p.0))
}

/// Least common multiple of the denominators of `qs` (1 for an empty list).
pub fn lcm_of_denominators<'a>(qs: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    qs.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Inverse of `a` modulo `m`, when they are coprime.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(m).extended_gcd(m);
    e.gcd.is_one().then(|| e.x.mod_floor(m))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn num_den_examples() {
        assert_eq!(num_den(&q("6/4")).unwrap(), (3u32.into(), 2u32.into()));
        assert_eq!(num_den(&q("5")).unwrap(), (5u32.into(), 1u32.into()));
        assert_eq!(num_den(&q("130/131")).unwrap(), (130u32.into(), 131u32.into()));
        assert!(matches!(num_den(&q("0")), Err(Error::NonPositive(_))));
        assert!(matches!(num_den(&q("-1/2")), Err(Error::NonPositive(_))));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(p_adic_valuation(&q("8"), &p(2)).unwrap(), 3);
        assert_eq!(p_adic_valuation(&q("1/6"), &p(3)).unwrap(), -1);
        assert_eq!(p_adic_valuation(&q("7/4"), &p(5)).unwrap(), 0);
        assert_eq!(p_adic_valuation(&q("0"), &p(5)), Err(Error::ZeroValuation));
    }

    #[test]
    fn next_prime_examples() {
        let always = |_: &Prime| true;
        assert_eq!(
            next_prime_satisfying(&256u32.into(), DEFAULT_SCAN_CAP, always).unwrap(),
            p(257)
        );
        assert_eq!(
            next_prime_satisfying(&512u32.into(), DEFAULT_SCAN_CAP, always).unwrap(),
            p(521)
        );
        let odd = |x: &Prime| x.value() % 2u32 == BigUint::one();
        assert_eq!(
            next_prime_satisfying(&2u32.into(), DEFAULT_SCAN_CAP, odd).unwrap(),
            p(3)
        );
    }

    #[test]
    fn scan_cap_is_loud() {
        let err = next_prime_satisfying(&100u32.into(), 50, |_| false).unwrap_err();
        assert!(matches!(err, Error::ScanCapExceeded { .. }));
    }

    #[test]
    fn primality_agrees_with_trial_division() {
        for n in 0u64..5000 {
            let trial = n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
            assert_eq!(is_prime_u64(n), trial, "n = {n}");
        }
        // Strong pseudoprime to several small bases.
        assert!(!is_prime_u64(3_215_031_751));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        let big = BigUint::from(2u32).pow(89) - 1u32;
        assert!(is_prime(&big));
        assert!(!is_prime(&(big * 3u32)));
    }

    #[test]
    fn display_and_parse() {
        assert_eq!(q("6/4").to_string(), "3/2");
        assert_eq!(q("-10/5").to_string(), "-2");
        assert_eq!(q(" 7 / 21 ").to_string(), "1/3");
        assert!("1/0".parse::<Rational>().is_err());
        assert!("abc".parse::<Rational>().is_err());
        let json = serde_json::to_string(&q("3/9")).unwrap();
        assert_eq!(json, "\"1/3\"");
        let back: Rational = serde_json::from_str(&json).unwrap();
        assert_eq!(back, q("1/3"));
    }
}
