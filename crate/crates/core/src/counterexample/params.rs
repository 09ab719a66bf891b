//! The numeric choices behind `M = ⟨A_ε ∪ B_ε ∪ C_ε⟩`: `a_n = 1/q_n` with
//! `q_n` the least prime above `2^{n+offset}`, and `b_n`, `c_n` obtained from
//! `b_1`, `c_1` by subtracting `a_2 + … + a_n`.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::{is_prime, next_prime, Prime, Rational};
use crate::seq::Seq;

/// User-adjustable inputs. Everything else is derived.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsOverrides {
    #[serde(default)]
    pub epsilon: Option<Rational>,
    #[serde(default)]
    pub q_offset: Option<u32>,
    #[serde(default)]
    pub b1: Option<Rational>,
    #[serde(default)]
    pub c1: Option<Rational>,
}

impl ParamsOverrides {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Clone)]
pub struct CounterexampleParams {
    pub epsilon: Rational,
    /// `q_n` is the least prime above `2^{n + q_offset}`.
    pub q_offset: u32,
    pub b1: Rational,
    pub c1: Rational,
    /// `Σ_{n≥2} 2^{-(n+offset)} = 2^{-(offset+1)}`, a bound on `Σ a_n`.
    pub tail_bound: Rational,
    /// The sharper `a_2 + 2^{-(offset+2)}`, which `Σ a_n` stays strictly below.
    pub tail_strict: Rational,
    /// `L = min(b_1, c_1) − tail_bound`, a rational lower bound for `inf(B ∪ C)`.
    pub lower: Rational,
    pub delta: Rational,
    q: Seq<Prime>,
}

impl std::fmt::Debug for CounterexampleParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CounterexampleParams")
            .field("epsilon", &self.epsilon)
            .field("q_offset", &self.q_offset)
            .field("b1", &self.b1)
            .field("c1", &self.c1)
            .field("delta", &self.delta)
            .finish()
    }
}

fn pow2(e: u32) -> BigInt {
    BigInt::one() << e
}

fn q(s: &str) -> Rational {
    s.parse().expect("literal")
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvariantViolation(what()))
    }
}

/// `ε = 1/16`, `q_n` above `2^{n+6}`, `b_1 = 130/131`, `c_1 = 136/137`.
pub fn build_default_params() -> Result<CounterexampleParams> {
    CounterexampleParams::new(q("1/16"), 6, q("130/131"), q("136/137"))
}

impl CounterexampleParams {
    pub fn new(epsilon: Rational, q_offset: u32, b1: Rational, c1: Rational) -> Result<Self> {
        if q_offset > 512 {
            return Err(Error::Config(format!("q_offset {q_offset} is unreasonably large")));
        }
        let q_seq = Seq::from_fn(move |n: usize| {
            let lower = (BigUint::one() << (n as u32 + q_offset)) as BigUint;
            next_prime(&lower).expect("Bertrand")
        });
        let tail_bound = Rational::new(1, pow2(q_offset + 1));
        let a2 = Rational::new(1, q_seq.get(2).to_bigint());
        let tail_strict = &a2 + &Rational::new(1, pow2(q_offset + 2));
        let lower = Rational::min_of(&b1, &c1) - &tail_bound;
        let quarter = Rational::one() - epsilon.div_int(4);
        let gap = Rational::one() - Rational::max_of(&b1, &c1);
        let delta = Rational::min_of(&(&lower - &quarter), &gap).div_int(2);
        let params = CounterexampleParams {
            epsilon,
            q_offset,
            b1,
            c1,
            tail_bound,
            tail_strict,
            lower,
            delta,
            q: q_seq,
        };
        params.check()?;
        Ok(params)
    }

    pub fn with_overrides(o: &ParamsOverrides) -> Result<Self> {
        let d = build_default_params()?;
        Self::new(
            o.epsilon.clone().unwrap_or(d.epsilon),
            o.q_offset.unwrap_or(d.q_offset),
            o.b1.clone().unwrap_or(d.b1),
            o.c1.clone().unwrap_or(d.c1),
        )
    }

    /// Asserts every inequality the construction relies on.
    pub fn check(&self) -> Result<()> {
        let eps = &self.epsilon;
        check(eps.is_positive() && eps < &q("1/10"), || format!("ε = {eps} must lie in (0, 1/10)"))?;
        let eighth = eps.div_int(8);
        check(self.tail_bound <= eighth, || {
            format!("tail bound {} exceeds ε/8 = {eighth}", self.tail_bound)
        })?;
        check(self.tail_strict < eighth && self.tail_strict < self.tail_bound, || {
            format!("strict tail bound {} is not below ε/8 = {eighth}", self.tail_strict)
        })?;
        let low = Rational::one() - &eighth;
        for (name, v) in [("b1", &self.b1), ("c1", &self.c1)] {
            check(v > &low && v < &Rational::one(), || format!("{name} = {v} is outside (1 − ε/8, 1)"))?;
            let d = v.denom().to_biguint().expect("positive");
            check(is_prime(&d), || format!("d({name}) = {d} is not prime"))?;
            let p = Prime::new(d.clone())?;
            check(!self.is_q(&p), || format!("d({name}) = {d} is one of the q_n"))?;
        }
        check(self.b1.denom() != self.c1.denom(), || "d(b1) and d(c1) coincide".into())?;
        let quarter = Rational::one() - eps.div_int(4);
        check(self.lower > quarter, || {
            format!("L = {} does not exceed 1 − ε/4 = {quarter}", self.lower)
        })?;
        check(self.delta.is_positive(), || format!("δ = {} is not positive", self.delta))?;
        check(self.delta < &self.lower - &quarter, || "δ violates the B ∪ C margin".into())?;
        let gap = Rational::one() - Rational::max_of(&self.b1, &self.c1);
        check(self.delta < gap, || "δ violates the margin below 1".into())?;
        check(self.delta < eps.div_int(4), || "δ must stay below ε/4".into())?;
        Ok(())
    }

    /// `q_n` for `n ≥ 2`.
    pub fn q(&self, n: usize) -> Prime {
        assert!(n >= 2, "a_n starts at n = 2");
        self.q.get(n)
    }

    /// `a_n = 1/q_n`.
    pub fn a(&self, n: usize) -> Rational {
        Rational::new(1, self.q(n).to_bigint())
    }

    /// `a_2 + … + a_n`.
    pub fn partial(&self, n: usize) -> Rational {
        (2..=n).map(|k| self.a(k)).sum()
    }

    pub fn b(&self, n: usize) -> Rational {
        assert!(n >= 1);
        &self.b1 - &self.partial(n)
    }

    pub fn c(&self, n: usize) -> Rational {
        assert!(n >= 1);
        &self.c1 - &self.partial(n)
    }

    pub fn d_b(&self) -> &BigInt {
        self.b1.denom()
    }

    pub fn d_c(&self) -> &BigInt {
        self.c1.denom()
    }

    /// Window test: `p = q_k` iff `p` is the least prime above `2^{k+offset}`
    /// for the `k` with `2^{k+offset} < p ≤ 2^{k+offset+1}`.
    pub fn is_q(&self, p: &Prime) -> bool {
        self.q_index(&p.to_bigint()).is_some()
    }

    /// The `k` with `q_k = p`, if any.
    pub fn q_index(&self, p: &BigInt) -> Option<usize> {
        if p <= &BigInt::one() {
            return None;
        }
        let m = (p - 1u8).bits().checked_sub(1)? as u32;
        let k = m.checked_sub(self.q_offset)? as usize;
        (k >= 2 && &self.q(k).to_bigint() == p).then_some(k)
    }

    /// Primes that divide some generator denominator of `M`: `d(b_1)`,
    /// `d(c_1)` and the `q_k`.
    pub fn is_denominator_prime(&self, p: &Prime) -> bool {
        let v = p.to_bigint();
        &v == self.d_b() || &v == self.d_c() || self.is_q(p)
    }

    pub fn spared(&self) -> Arc<dyn Fn(&Prime) -> bool + Send + Sync> {
        let me = self.clone();
        Arc::new(move |p: &Prime| !me.is_denominator_prime(p))
    }

    /// Canonical description; `depth` controls how many `q_n` are listed.
    pub fn to_json(&self, depth: usize) -> Value {
        json!({
            "epsilon": self.epsilon,
            "q_offset": self.q_offset,
            "q": (2..depth + 2).map(|n| self.q(n)).collect::<Vec<_>>(),
            "b1": self.b1,
            "c1": self.c1,
            "tail_bound": self.tail_bound,
            "tail_strict": self.tail_strict,
            "lower": self.lower,
            "delta": self.delta,
        })
    }

    pub fn q_u64(&self, n: usize) -> Option<u64> {
        self.q(n).to_bigint().to_u64()
    }
}
