//! The lifting function over `M` with `S = B_ε ∪ C_ε`, `N_s = ⟨h_s, k_s⟩`
//! and `h_s + k_s = π(s)`, so that `s = H_s + K_s` stops being an atom while
//! `H_s ≈ τ(s)` and `K_s` stay atoms; and the `N_s = ℕ₀` lifting of every
//! generator, whose lifted monoid is atomic but not 2-MCD.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::deciders::{locate_generator, main_monoid, MainGen, MainOracle};
use super::params::CounterexampleParams;
use crate::error::{Error, Result};
use crate::exactnum::{next_prime_satisfying, Prime, Rational, DEFAULT_SCAN_CAP};
use crate::lifting::{LiftingFunction, NumericalMonoid, SElement};
use crate::puiseux::MembershipCertificate;
use crate::seq::Seq;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Family {
    B,
    C,
}

/// One realized `s ∈ B_ε ∪ C_ε` with its lifting data.
#[derive(Clone, Debug)]
pub struct LiftRow {
    pub index: usize,
    pub family: Family,
    /// `s = b_n` or `c_n`.
    pub n: usize,
    pub s: Rational,
    pub p: Prime,
    pub h: BigInt,
    pub k: BigInt,
}

impl LiftRow {
    pub fn generator(&self) -> MainGen {
        match self.family {
            Family::B => MainGen::B(self.n),
            Family::C => MainGen::C(self.n),
        }
    }

    /// `s/p_s`.
    pub fn unit(&self) -> Rational {
        self.s.div_int(self.p.to_bigint())
    }

    pub fn big_h(&self) -> Rational {
        self.unit().mul_int(self.h.clone())
    }

    pub fn big_k(&self) -> Rational {
        self.unit().mul_int(self.k.clone())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "index": self.index,
            "family": self.family,
            "n": self.n,
            "s": self.s,
            "p": self.p,
            "h": self.h.to_string(),
            "k": self.k.to_string(),
            "H": self.big_h(),
            "K": self.big_k(),
        })
    }
}

/// `s_{2m} = b_{m+1}`, `s_{2m+1} = c_{m+1}`.
pub fn s_generator(j: usize) -> MainGen {
    if j.is_multiple_of(2) {
        MainGen::B(j / 2 + 1)
    } else {
        MainGen::C(j / 2 + 1)
    }
}

fn s_index_of(g: MainGen) -> Option<usize> {
    match g {
        MainGen::A(_) => None,
        MainGen::B(n) => Some(2 * (n - 1)),
        MainGen::C(n) => Some(2 * (n - 1) + 1),
    }
}

/// Target value for `H_s`.
pub fn tau(params: &CounterexampleParams, family: Family) -> Rational {
    let half = Rational::new(1, 2);
    match family {
        Family::B => &half - &params.epsilon,
        Family::C => half,
    }
}

/// `argmin_{h ∈ [2, p−2]} |h·s/p − τ|`, ties to the smaller `h`.
fn nearest_h(s: &Rational, p: &BigInt, target: &Rational) -> BigInt {
    let unit = s.div_int(p.clone());
    let lo = BigInt::from(2);
    let hi = p - 2u8;
    let guess = (target / &unit).floor();
    let dist = |h: &BigInt| (unit.mul_int(h.clone()) - target).abs();
    [guess.clone(), guess + 1]
        .into_iter()
        .map(|h| h.clamp(lo.clone(), hi.clone()))
        .min_by(|a, b| dist(a).cmp(&dist(b)).then(a.cmp(b)))
        .expect("two candidates")
}

/// Lazily built tables `s_n, p_n, h_n, k_n`.
#[derive(Clone)]
pub struct MainLift {
    pub params: CounterexampleParams,
    rows: Seq<LiftRow>,
}

impl std::fmt::Debug for MainLift {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MainLift({} rows computed)", self.rows.computed())
    }
}

impl MainLift {
    pub fn new(params: CounterexampleParams) -> Self {
        let p = params.clone();
        let rows = Seq::recursive(move |j, prev: &[LiftRow]| {
            let g = s_generator(j);
            let (family, n) = match g {
                MainGen::B(n) => (Family::B, n),
                MainGen::C(n) => (Family::C, n),
                MainGen::A(_) => unreachable!("S avoids A"),
            };
            let s = g.value(&p);
            let floor = (&s / &p.delta).ceil();
            let lower = match prev.last() {
                Some(r) => floor.max(r.p.to_bigint()),
                None => floor,
            };
            let prime = next_prime_satisfying(
                &lower.to_biguint().expect("positive"),
                DEFAULT_SCAN_CAP,
                |q| q.value() != &BigUint::from(2u8) && !p.is_denominator_prime(q) && !q.divides(s.numer()),
            )
            .expect("primes are unbounded");
            let pb = prime.to_bigint();
            let h = nearest_h(&s, &pb, &tau(&p, family));
            let k = &pb - &h;
            LiftRow { index: j, family, n, s, p: prime, h, k }
        });
        MainLift { params, rows }
    }

    pub fn row(&self, j: usize) -> LiftRow {
        self.rows.get(j)
    }

    pub fn rows(&self, depth: usize) -> Vec<LiftRow> {
        self.rows.take(depth)
    }

    /// Asserts every table invariant on the first `depth` rows, naming the
    /// index and inequality on failure.
    pub fn check(&self, depth: usize) -> Result<()> {
        let prm = &self.params;
        let eps = &prm.epsilon;
        let third = Rational::new(1, 3);
        let half = Rational::new(1, 2);
        let mut last: Option<BigInt> = None;
        for r in self.rows(depth) {
            let j = r.index;
            let fail = |what: String| Err(Error::InvariantViolation(format!("s-index {j}: {what}")));
            let p = r.p.to_bigint();
            if let Some(prev) = &last {
                if &p <= prev {
                    return fail(format!("p = {p} does not exceed {prev}"));
                }
            }
            last = Some(p.clone());
            if (&p % 2u8).is_zero() || prm.is_denominator_prime(&r.p) {
                return fail(format!("p = {p} is even or divides a generator denominator"));
            }
            if r.p.divides(r.s.numer()) {
                return fail(format!("v_p(s) ≠ 0 for p = {p}"));
            }
            if r.unit() >= prm.delta {
                return fail(format!("s/p = {} is not below δ", r.unit()));
            }
            if r.h < BigInt::from(2) || r.h > &p - 2u8 {
                return fail(format!("h = {} lies outside [2, p − 2]", r.h));
            }
            if &r.h + &r.k != p {
                return fail("h + k ≠ p".into());
            }
            let (hh, kk) = (r.big_h(), r.big_k());
            if (&hh - &tau(prm, r.family)).abs() >= prm.delta {
                return fail(format!("|H − τ| ≥ δ for H = {hh}"));
            }
            if &hh + &kk != r.s {
                return fail("H + K ≠ s".into());
            }
            let (radius, h_center, k_center) = match r.family {
                Family::B => (eps.div_int(2), &half - eps, &half + eps),
                Family::C => (eps.div_int(4), half.clone(), half.clone()),
            };
            if (&hh - &h_center).abs() >= radius || (&kk - &k_center).abs() >= radius {
                return fail(format!("H = {hh}, K = {kk} leave the {radius}-neighborhoods of {h_center}, {k_center}"));
            }
            if Rational::min_of(&hh, &kk) <= &third {
                return fail("min(H, K) ≤ 1/3".into());
            }
            let quarter = Rational::one() - eps.div_int(4);
            if r.s <= quarter || r.s >= Rational::one() {
                return fail(format!("s = {} is outside (1 − ε/4, 1)", r.s));
            }
        }
        Ok(())
    }

    pub fn to_json(&self, depth: usize) -> Value {
        Value::Array(self.rows(depth).iter().map(LiftRow::to_json).collect())
    }

    /// `φ` with `S = B_ε ∪ C_ε`.
    pub fn lifting_function(&self) -> LiftingFunction {
        let rows = self.rows.clone();
        let s = Seq::from_fn(move |j| {
            let r = rows.get(j);
            SElement {
                value: r.s.clone(),
                pi: r.p.clone(),
                n: NumericalMonoid::new([r.h.clone(), r.k.clone()], r.p.to_bigint())
                    .expect("h, k coprime to each other"),
                base_cert: MembershipCertificate::single(r.generator().index(), 1),
            }
        });
        let params = self.params.clone();
        LiftingFunction {
            label: "main-theorem".into(),
            base: main_monoid(&self.params),
            s,
            base_in_s: Arc::new(|i| s_index_of(MainGen::from_index(i))),
            locate: Arc::new(move |x: &Rational| locate_generator(&params, x).and_then(s_index_of)),
            oracle: MainOracle::new(self.params.clone()),
            pi_increasing: true,
        }
    }
}

/// Builds the tables and asserts their invariants on `depth` rows.
pub fn build_main_lift(params: &CounterexampleParams, depth: usize) -> Result<MainLift> {
    let lift = MainLift::new(params.clone());
    lift.check(depth)?;
    Ok(lift)
}

/// `S` = every generator of `M`, `N_s = ℕ₀`, `π` increasing odd primes that
/// `M` spares and that avoid the numerator of `s`. The lifted monoid has
/// atoms `s/π(s)`.
pub fn strongly_atomic_lifting_function(params: &CounterexampleParams) -> LiftingFunction {
    let p = params.clone();
    let primes = Seq::recursive(move |i, prev: &[Prime]| {
        let s = MainGen::from_index(i).value(&p);
        let lower = prev
            .last()
            .map(|q| q.value().clone())
            .unwrap_or_else(|| BigUint::from(2u8));
        next_prime_satisfying(&lower, DEFAULT_SCAN_CAP, |q| {
            !p.is_denominator_prime(q) && !q.divides(s.numer())
        })
        .expect("primes are unbounded")
    });
    let p = params.clone();
    let s = Seq::from_fn(move |i| {
        let pi = primes.get(i);
        SElement {
            value: MainGen::from_index(i).value(&p),
            n: NumericalMonoid::new([BigInt::one()], pi.to_bigint()).expect("ℕ₀"),
            pi,
            base_cert: MembershipCertificate::single(i, 1),
        }
    });
    let located = params.clone();
    LiftingFunction {
        label: "strongly-atomic".into(),
        base: main_monoid(params),
        s,
        base_in_s: Arc::new(Some),
        locate: Arc::new(move |x: &Rational| locate_generator(&located, x).map(MainGen::index)),
        oracle: MainOracle::new(params.clone()),
        pi_increasing: true,
    }
}
