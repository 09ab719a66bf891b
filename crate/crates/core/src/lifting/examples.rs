//! Lifting functions over the dyadic monoid `⟨1/2ⁿ : n ≥ 0⟩`: Grams' monoid,
//! a few perturbations of it used to exercise validation, and the antimatter
//! example whose lifting is not atomic.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use super::{BaseOracle, BaseVerdict, LiftingFunction, NumericalMonoid, SElement};
use crate::error::Result;
use crate::exactnum::{next_prime, next_prime_satisfying, Prime, Rational, DEFAULT_SCAN_CAP};
use crate::puiseux::{GeneratorStream, MembershipCertificate, MonoidSpec};
use crate::seq::Seq;

/// `1/2ⁿ`.
pub fn dyadic_unit(n: usize) -> Rational {
    Rational::new(1, BigInt::one() << n)
}

/// The exponent `n` with `d(x) = 2ⁿ`, if `x` is dyadic.
fn dyadic_exponent(x: &Rational) -> Option<usize> {
    let d = x.denom();
    let n = d.trailing_zeros().unwrap_or(0);
    (d >> n).is_one().then_some(n as usize)
}

/// The nonnegative dyadic rationals, generated by `1/2ⁿ`.
pub fn dyadic_base() -> MonoidSpec {
    MonoidSpec::stream(
        "dyadic",
        GeneratorStream {
            gens: Seq::from_fn(dyadic_unit),
            spared: Some(Arc::new(|p: &Prime| p.value() != &BigUint::from(2u8))),
            increasing_denominators: true,
        },
    )
}

/// Complete decider for the dyadic monoid. Certificates follow the binary
/// expansion: `⌊x⌋` copies of `1` and one copy of `1/2ⁱ` per set fraction bit.
#[derive(Clone, Copy, Debug, Default)]
pub struct DyadicOracle;

impl BaseOracle for DyadicOracle {
    fn member(&self, x: &Rational) -> Result<BaseVerdict> {
        if x.is_negative() {
            return Ok(BaseVerdict::NonMember(format!("{x} is negative")));
        }
        let Some(n) = dyadic_exponent(x) else {
            return Ok(BaseVerdict::NonMember(format!("d({x}) is not a power of 2")));
        };
        let whole = x.floor();
        let mut cert = MembershipCertificate::empty();
        if let Some(w) = whole.to_u64().filter(|&w| w > 0) {
            cert.add_entry(0, w);
        } else if !whole.is_zero() {
            return Ok(BaseVerdict::Unknown(format!("{x} is too large for a certificate")));
        }
        let frac = (x - &Rational::from_integer(whole)).mul_int(BigInt::one() << n);
        let bits = frac.numer().magnitude().clone();
        for i in 1..=n {
            if bits.bit((n - i) as u64) {
                cert.add_entry(i, 1);
            }
        }
        Ok(BaseVerdict::Member(cert))
    }

    fn is_atom(&self, _x: &Rational) -> Result<Option<bool>> {
        // 1/2ⁿ = 2·(1/2ⁿ⁺¹), so nothing is an atom.
        Ok(Some(false))
    }

    fn relations(&self, depth: usize) -> Vec<(MembershipCertificate, MembershipCertificate)> {
        (0..depth.saturating_sub(1))
            .map(|n| {
                (
                    MembershipCertificate::single(n, 1),
                    MembershipCertificate::single(n + 1, 2),
                )
            })
            .collect()
    }

    fn strip_denominator(&self, d: &BigInt) -> BigInt {
        let n = d.trailing_zeros().unwrap_or(0);
        d >> n
    }
}

fn odd_primes() -> Seq<Prime> {
    Seq::recursive(|_, prev: &[Prime]| {
        let lower = prev
            .last()
            .map(|p| p.value().clone())
            .unwrap_or_else(|| BigUint::from(2u8));
        next_prime(&lower).expect("primes are unbounded")
    })
}

type PiOverride = Arc<dyn Fn(usize) -> u64 + Send + Sync>;
type NBuilder = Arc<dyn Fn(&BigInt) -> Vec<BigInt> + Send + Sync>;

fn grams_general(label: &str, pi_override: Option<PiOverride>, n_gens: NBuilder) -> LiftingFunction {
    let primes = odd_primes();
    let over = pi_override.clone();
    let s = Seq::from_fn(move |j| {
        let pi = match over.as_ref().map(|f| f(j)).filter(|&p| p != 0) {
            Some(p) => Prime::new(BigUint::from(p)).expect("override must be prime"),
            None => primes.get(j),
        };
        let n = NumericalMonoid::new(n_gens(&pi.to_bigint()), pi.to_bigint())
            .expect("valid numerical monoid");
        SElement {
            value: dyadic_unit(j),
            pi,
            n,
            base_cert: MembershipCertificate::single(j, 1),
        }
    });
    LiftingFunction {
        label: label.to_string(),
        base: dyadic_base(),
        s,
        base_in_s: Arc::new(Some),
        locate: Arc::new(|x: &Rational| {
            (x.numer().is_one()).then(|| dyadic_exponent(x)).flatten()
        }),
        oracle: Arc::new(DyadicOracle),
        pi_increasing: pi_override.is_none(),
    }
}

/// Grams' monoid as a lifting: `S = {1/2ⁿ}`, `π(1/2ⁿ)` the `n`-th odd prime
/// and `N = ℕ₀`, so `M_φ = ⟨1/(2ⁿ·p_n)⟩`.
pub fn grams() -> LiftingFunction {
    grams_general("grams", None, Arc::new(|_| vec![BigInt::one()]))
}

/// Grams' data with `π(s_j)` replaced by `pi(j)` whenever it is nonzero. Used
/// to build invalid lifting functions.
pub fn grams_with(pi: impl Fn(usize) -> u64 + Send + Sync + 'static) -> LiftingFunction {
    grams_general("grams-modified", Some(Arc::new(pi)), Arc::new(|_| vec![BigInt::one()]))
}

/// Grams' primes with `N_s = ⟨π, π + 1⟩`.
pub fn grams_shifted() -> LiftingFunction {
    grams_general(
        "grams-shifted",
        None,
        Arc::new(|p: &BigInt| vec![p.clone(), p + 1]),
    )
}

/// Position of a positive dyadic in the antimatter enumeration of `M^•`:
/// block `t ≥ 1` lists `t`, then `(2k − 1)/2ʲ` for `j = 1..t−1`, `k = t − j`.
fn antimatter_index(x: &Rational) -> Option<usize> {
    if !x.is_positive() {
        return None;
    }
    let j = dyadic_exponent(x)?;
    let t = if j == 0 {
        x.numer().to_usize()?
    } else {
        let k = x.numer().to_usize()?.div_ceil(2);
        j + k
    };
    Some(t * (t - 1) / 2 + j)
}

fn antimatter_value(i: usize) -> Rational {
    let mut t = 1;
    while t * (t + 1) / 2 <= i {
        t += 1;
    }
    let j = i - t * (t - 1) / 2;
    if j == 0 {
        Rational::from_integer(t as u64)
    } else {
        Rational::new(2 * (t - j) as u64 - 1, BigInt::one() << j)
    }
}

fn antimatter_base_cert(i: usize) -> MembershipCertificate {
    let v = antimatter_value(i);
    match dyadic_exponent(&v) {
        Some(0) => MembershipCertificate::single(0, v.to_u64().expect("small")),
        Some(j) => MembershipCertificate::single(j, v.numer().to_u64().expect("small")),
        None => unreachable!("antimatter values are dyadic"),
    }
}

/// The antimatter example: `S = M^•` for the dyadic monoid `M`, with
/// `N_{s_n} = ⟨p_n, p_{n+1}⟩` where the odd primes `p_n` increase,
/// `v_{p_n}(s_n) = 0` and `p_{n+1}·s_n > p_n`. Every `s_n` stays a
/// generator, so no element of `M` becomes an atom.
///
/// Primes grow quickly; past index 50 they leave the range where primality
/// is certified.
pub fn antimatter() -> LiftingFunction {
    let coprime = |p: &Prime, s: &Rational| !p.divides(s.numer());
    let primes = Seq::recursive(move |n, prev: &[Prime]| {
        let next = match prev.last() {
            None => next_prime_satisfying(&BigUint::from(2u8), DEFAULT_SCAN_CAP, |p| {
                coprime(p, &antimatter_value(0))
            }),
            Some(last) => {
                let s = antimatter_value(n - 1);
                let pn = Rational::from_integer(last.to_bigint());
                let lower = (&pn / &s).floor().max(last.to_bigint());
                let target = antimatter_value(n);
                next_prime_satisfying(&lower.to_biguint().expect("positive"), DEFAULT_SCAN_CAP, |p| {
                    coprime(p, &target) && Rational::from_integer(p.to_bigint()) * &s > pn
                })
            }
        };
        next.expect("primes are unbounded")
    });
    let s = Seq::from_fn(move |n| {
        let (pn, next) = (primes.get(n), primes.get(n + 1));
        let n_monoid = NumericalMonoid::new([pn.to_bigint(), next.to_bigint()], pn.to_bigint())
            .expect("two distinct primes");
        SElement {
            value: antimatter_value(n),
            pi: pn,
            n: n_monoid,
            base_cert: antimatter_base_cert(n),
        }
    });
    LiftingFunction {
        label: "antimatter".into(),
        base: dyadic_base(),
        s,
        base_in_s: Arc::new(|n| Some(n * (n + 1) / 2 + n)),
        locate: Arc::new(antimatter_index),
        oracle: Arc::new(DyadicOracle),
        pi_increasing: true,
    }
}
