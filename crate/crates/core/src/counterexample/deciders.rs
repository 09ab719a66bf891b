//! Valuation-based deciders for `⟨A_ε⟩` and `M`.
//!
//! Every element of `⟨A_ε⟩` is `Σ r_k a_k + N` with `0 ≤ r_k < q_k` forced by
//! `v_{q_k}` and `N ∈ ℕ₀` (since `q_k·a_k = 1`). An element of `M` uses
//! `#b ≡ r_b (mod d(b_1))` generators from `B_ε` and `#c ≡ r_c (mod d(c_1))`
//! from `C_ε`; replacing some `b_n` by `b_{n+1} + a_{n+1}` only adds to the
//! `⟨A_ε⟩` part, so the deepest index settles every case.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::params::CounterexampleParams;
use crate::error::{Error, Result};
use crate::exactnum::{mod_inverse, Prime, Rational};
use crate::lifting::{BaseOracle, BaseVerdict};
use crate::puiseux::{GeneratorStream, MembershipCertificate, MonoidSpec};
use crate::seq::Seq;

/// A generator of `M` in the stream order `a_2, b_1, c_1, a_3, b_2, c_2, …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MainGen {
    A(usize),
    B(usize),
    C(usize),
}

impl MainGen {
    pub fn index(self) -> usize {
        match self {
            MainGen::A(k) => 3 * (k - 2),
            MainGen::B(n) => 3 * (n - 1) + 1,
            MainGen::C(n) => 3 * (n - 1) + 2,
        }
    }

    pub fn from_index(i: usize) -> MainGen {
        match i % 3 {
            0 => MainGen::A(i / 3 + 2),
            1 => MainGen::B(i / 3 + 1),
            _ => MainGen::C(i / 3 + 1),
        }
    }

    pub fn value(self, params: &CounterexampleParams) -> Rational {
        match self {
            MainGen::A(k) => params.a(k),
            MainGen::B(n) => params.b(n),
            MainGen::C(n) => params.c(n),
        }
    }
}

/// `⟨A_ε⟩` with generator `i` equal to `a_{i+2}`.
pub fn a_monoid(params: &CounterexampleParams) -> MonoidSpec {
    let p = params.clone();
    let spared = params.spared();
    MonoidSpec::stream(
        "A_eps",
        GeneratorStream {
            gens: Seq::from_fn(move |i| p.a(i + 2)),
            spared: Some(spared),
            increasing_denominators: true,
        },
    )
}

/// `M = ⟨A_ε ∪ B_ε ∪ C_ε⟩` in the order of [`MainGen`].
pub fn main_monoid(params: &CounterexampleParams) -> MonoidSpec {
    let p = params.clone();
    MonoidSpec::stream(
        "M",
        GeneratorStream {
            gens: Seq::from_fn(move |i| MainGen::from_index(i).value(&p)),
            spared: Some(params.spared()),
            increasing_denominators: false,
        },
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Member(MembershipCertificate),
    /// Not a member, with the obstruction.
    NonMember(String),
    OutOfScope,
}

impl Verdict {
    pub fn certificate(&self) -> Option<&MembershipCertificate> {
        match self {
            Verdict::Member(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::Member(_))
    }
}

/// `y = Σ r_k a_k + N` with the forced residues `r_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AForm {
    pub residues: Vec<(usize, u64)>,
    pub integer: BigInt,
}

/// The `k` with `q_k | d`, and the cofactor left after removing them once.
/// `Err` reports a repeated `q_k`.
pub(crate) fn q_support(params: &CounterexampleParams, d: &BigInt) -> std::result::Result<(Vec<usize>, BigInt), String> {
    let mut rest = d.clone();
    let mut ks = Vec::new();
    let mut k = 2;
    while !rest.is_one() && (BigInt::one() << (k as u32 + params.q_offset)) < rest {
        let qk = params.q(k).to_bigint();
        if (&rest % &qk).is_zero() {
            rest /= &qk;
            if (&rest % &qk).is_zero() {
                return Err(format!("q_{k} = {qk} divides the denominator twice"));
            }
            ks.push(k);
        }
        k += 1;
    }
    Ok((ks, rest))
}

fn residue_mod(x: &Rational, p: &BigInt) -> BigInt {
    // `p·x` has no `p` in its denominator here; reduce it in ℤ_(p).
    let y = x.mul_int(p.clone());
    let inv = mod_inverse(y.denom(), p).expect("coprime");
    (y.numer() * inv).mod_floor(p)
}

/// The forced form of `y` in `⟨A_ε⟩`, or why none exists.
pub fn a_form(params: &CounterexampleParams, y: &Rational) -> std::result::Result<AForm, String> {
    if y.is_negative() {
        return Err(format!("{y} is negative"));
    }
    let (ks, rest) = q_support(params, y.denom())?;
    if !rest.is_one() {
        return Err(format!("denominator factor {rest} of {y} is spared by A_eps"));
    }
    let mut residues = Vec::new();
    let mut remainder = y.clone();
    for k in ks {
        let qk = params.q(k).to_bigint();
        let r = residue_mod(y, &qk);
        let r64 = r.to_u64().expect("below q_k");
        remainder -= &params.a(k).mul_int(r);
        residues.push((k, r64));
    }
    debug_assert!(remainder.is_integer());
    let integer = remainder.numer().clone();
    if integer.is_negative() {
        return Err(format!(
            "forced coefficients of {y} already exceed it by {}",
            -remainder
        ));
    }
    Ok(AForm { residues, integer })
}

fn a_form_certificate(params: &CounterexampleParams, form: &AForm, index: impl Fn(usize) -> usize) -> Result<MembershipCertificate> {
    let mut cert = MembershipCertificate::empty();
    for &(k, r) in &form.residues {
        if r > 0 {
            cert.add_entry(index(k), r);
        }
    }
    if form.integer.is_positive() {
        let copies = (&form.integer * params.q(2).to_bigint())
            .to_u64()
            .ok_or_else(|| Error::ResourceExhausted(format!("{} copies of 1", form.integer)))?;
        cert.add_entry(index(2), copies);
    }
    Ok(cert)
}

/// Complete decider for `⟨A_ε⟩` on `[0, 1)`. Certificates index the stream
/// `a_2, a_3, …` of [`a_monoid`].
pub fn membership_a(params: &CounterexampleParams, x: &Rational) -> Result<Verdict> {
    if x >= &Rational::one() {
        return Ok(Verdict::OutOfScope);
    }
    a_membership_any(params, x, |k| k - 2)
}

fn a_membership_any(
    params: &CounterexampleParams,
    x: &Rational,
    index: impl Fn(usize) -> usize,
) -> Result<Verdict> {
    Ok(match a_form(params, x) {
        Ok(form) => Verdict::Member(a_form_certificate(params, &form, index)?),
        Err(why) => Verdict::NonMember(why),
    })
}

/// Number of `B_ε` (or `C_ε`) generators modulo `p = d(b_1)`, read off
/// `v_p(x)`; `None` when `v_p(x) ≤ −2`.
fn forced_count(x: &Rational, first: &Rational) -> Option<BigInt> {
    let p = first.denom();
    let scaled = x.mul_int(p.clone());
    if !(scaled.denom() % p).is_zero() {
        let r = residue_mod(x, p);
        let inv = mod_inverse(first.numer(), p).expect("coprime");
        Some((r * inv).mod_floor(p))
    } else {
        None
    }
}

/// Cap on the `(#b, #c)` pairs tried for large elements.
const COUNT_PAIRS_CAP: u64 = 10_000;

/// Complete decider for `M`. Certificates index [`main_monoid`].
pub fn membership_m(params: &CounterexampleParams, x: &Rational) -> Result<Verdict> {
    if x.is_negative() {
        return Ok(Verdict::NonMember(format!("{x} is negative")));
    }
    if x.is_zero() {
        return Ok(Verdict::Member(MembershipCertificate::empty()));
    }
    let (db, dc) = (params.d_b().clone(), params.d_c().clone());
    let (rb, rc) = match (forced_count(x, &params.b1), forced_count(x, &params.c1)) {
        (Some(rb), Some(rc)) => (rb, rc),
        _ => {
            return Ok(Verdict::NonMember(format!(
                "v_{db}({x}) or v_{dc}({x}) is below -1, but sums of generators stay at -1 or above"
            )))
        }
    };
    let mut d = x.denom().clone();
    for p in [&db, &dc] {
        while (&d % p).is_zero() {
            d /= p;
        }
    }
    let (ks, rest) = match q_support(params, &d) {
        Ok(v) => v,
        Err(why) => return Ok(Verdict::NonMember(why)),
    };
    if !rest.is_one() {
        return Ok(Verdict::NonMember(format!(
            "denominator factor {rest} of {x} divides no generator denominator"
        )));
    }
    let n_max = ks.iter().max().map(|k| k + 1).unwrap_or(1);
    let mut tried = 0u64;
    let mut tb = BigInt::zero();
    loop {
        let nb = &rb + &tb * &db;
        if Rational::from_integer(nb.clone()) * &params.lower > *x {
            break;
        }
        let mut tc = BigInt::zero();
        loop {
            let nc = &rc + &tc * &dc;
            let used = Rational::from_integer(&nb + &nc) * &params.lower;
            if used > *x {
                break;
            }
            tried += 1;
            if tried > COUNT_PAIRS_CAP {
                return Err(Error::ResourceExhausted(format!("generator counts for {x}")));
            }
            if let Some(cert) = settle_counts(params, x, &nb, &nc, n_max)? {
                return Ok(Verdict::Member(cert));
            }
            tc += 1;
        }
        tb += 1;
    }
    Ok(Verdict::NonMember(if rb.is_zero() && rc.is_zero() {
        format!("{x} is not in ⟨A_eps⟩ and any B/C generator count allowed by v_{db}, v_{dc} overshoots")
    } else {
        format!("v_{db}, v_{dc} force at least {rb} B- and {rc} C-generators (mod {db}, {dc}), which do not fit below {x}")
    }))
}

/// With `nb` copies of `b_n` and `nc` of `c_n`, finds the least common `n`
/// leaving a remainder in `⟨A_ε⟩`.
fn settle_counts(
    params: &CounterexampleParams,
    x: &Rational,
    nb: &BigInt,
    nc: &BigInt,
    n_max: usize,
) -> Result<Option<MembershipCertificate>> {
    let (nb64, nc64) = match (nb.to_u64(), nc.to_u64()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::ResourceExhausted("generator counts exceed u64".into())),
    };
    if nb64 == 0 && nc64 == 0 {
        return Ok(match a_form(params, x) {
            Ok(f) => Some(a_form_certificate(params, &f, |k| MainGen::A(k).index())?),
            Err(_) => None,
        });
    }
    // Beyond `n_max` and once `q_k` exceeds the count, extra `a_k` never wrap.
    let mut n_top = n_max;
    while params.q(n_top + 1).to_bigint() <= BigInt::from(nb64 + nc64) {
        n_top += 1;
    }
    let remainder = |n: usize| x - &params.b(n).mul_int(nb64) - &params.c(n).mul_int(nc64);
    if a_form(params, &remainder(n_top)).is_err() {
        return Ok(None);
    }
    for n in 1..=n_top {
        if let Ok(f) = a_form(params, &remainder(n)) {
            let mut cert = a_form_certificate(params, &f, |k| MainGen::A(k).index())?;
            if nb64 > 0 {
                cert.add_entry(MainGen::B(n).index(), nb64);
            }
            if nc64 > 0 {
                cert.add_entry(MainGen::C(n).index(), nc64);
            }
            return Ok(Some(cert));
        }
    }
    Err(Error::Defect(format!("remainder of {x} fits at depth {n_top} but at no smaller index")))
}

/// The generator of `M` equal to `x`, if any.
pub fn locate_generator(params: &CounterexampleParams, x: &Rational) -> Option<MainGen> {
    if !x.is_positive() {
        return None;
    }
    if x.numer().is_one() {
        if let Some(k) = params.q_index(x.denom()) {
            return Some(MainGen::A(k));
        }
    }
    for (first, family) in [(&params.b1, MainGen::B as fn(usize) -> MainGen), (&params.c1, MainGen::C)] {
        let p = first.denom();
        if !(x.denom() % p).is_zero() {
            continue;
        }
        let (ks, rest) = q_support(params, &(x.denom() / p)).ok()?;
        if !rest.is_one() {
            return None;
        }
        let n = ks.last().copied().unwrap_or(1);
        let g = family(n);
        return (g.value(params) == *x).then_some(g);
    }
    None
}

/// Base oracle of `M` for the lifting machinery.
#[derive(Clone, Debug)]
pub struct MainOracle {
    pub params: CounterexampleParams,
}

impl BaseOracle for MainOracle {
    fn member(&self, x: &Rational) -> Result<BaseVerdict> {
        Ok(match membership_m(&self.params, x) {
            Ok(Verdict::Member(c)) => BaseVerdict::Member(c),
            Ok(Verdict::NonMember(why)) => BaseVerdict::NonMember(why),
            Ok(Verdict::OutOfScope) => BaseVerdict::Unknown("out of scope".into()),
            Err(Error::ResourceExhausted(why)) => BaseVerdict::Unknown(why),
            Err(e) => return Err(e),
        })
    }

    /// `A(M) = A_ε`.
    fn is_atom(&self, x: &Rational) -> Result<Option<bool>> {
        Ok(Some(x.numer().is_one() && self.params.q_index(x.denom()).is_some()))
    }

    fn relations(&self, depth: usize) -> Vec<(MembershipCertificate, MembershipCertificate)> {
        let mut out = Vec::new();
        for n in 1.. {
            let (lhs_b, lhs_c) = (MainGen::B(n), MainGen::C(n));
            let rhs = [MainGen::B(n + 1), MainGen::C(n + 1), MainGen::A(n + 1)];
            if rhs.iter().any(|g| g.index() >= depth) {
                break;
            }
            let a = MainGen::A(n + 1).index();
            out.push((
                MembershipCertificate::single(lhs_b.index(), 1),
                MembershipCertificate::from_entries([(MainGen::B(n + 1).index(), 1), (a, 1)]),
            ));
            out.push((
                MembershipCertificate::single(lhs_c.index(), 1),
                MembershipCertificate::from_entries([(MainGen::C(n + 1).index(), 1), (a, 1)]),
            ));
        }
        out
    }

    fn strip_denominator(&self, d: &BigInt) -> BigInt {
        let mut rest = d.clone();
        for p in [self.params.d_b(), self.params.d_c()] {
            while (&rest % p).is_zero() {
                rest /= p;
            }
        }
        let mut k = 2;
        while !rest.is_one() && (BigInt::one() << (k as u32 + self.params.q_offset)) < rest {
            let qk = self.params.q(k).to_bigint();
            while (&rest % &qk).is_zero() {
                rest /= &qk;
            }
            k += 1;
        }
        rest
    }
}

impl MainOracle {
    pub fn new(params: CounterexampleParams) -> Arc<Self> {
        Arc::new(MainOracle { params })
    }

    /// `p` divides no generator denominator of `M`.
    pub fn spares(&self, p: &Prime) -> bool {
        !self.params.is_denominator_prime(p)
    }
}

#[cfg(test)]
mod tests {
    use super::super::params::build_default_params;
    use super::*;
    use crate::puiseux::verify_certificate;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn main_gen_indices_round_trip() {
        for i in 0..60 {
            assert_eq!(MainGen::from_index(i).index(), i);
        }
        assert_eq!(MainGen::from_index(0), MainGen::A(2));
        assert_eq!(MainGen::from_index(4), MainGen::B(2));
    }

    #[test]
    fn membership_a_examples() {
        let p = build_default_params().unwrap();
        let x = &p.a(2) + &p.a(3);
        assert_eq!(
            membership_a(&p, &x).unwrap(),
            Verdict::Member(MembershipCertificate::from_entries([(0, 1), (1, 1)]))
        );
        assert_eq!(
            membership_a(&p, &q("2/257")).unwrap(),
            Verdict::Member(MembershipCertificate::single(0, 2))
        );
        assert!(matches!(membership_a(&p, &q("1/131")).unwrap(), Verdict::NonMember(_)));
        assert_eq!(membership_a(&p, &q("1")).unwrap(), Verdict::OutOfScope);
        assert!(matches!(membership_a(&p, &p.b1).unwrap(), Verdict::NonMember(_)));
    }

    #[test]
    fn membership_m_examples() {
        let p = build_default_params().unwrap();
        let m = main_monoid(&p);
        for x in [p.b(2), p.b1.clone(), p.c(5), &p.a(3) + &p.b(4), q("1"), &p.b1 + &p.c1] {
            let v = membership_m(&p, &x).unwrap();
            let c = v.certificate().unwrap_or_else(|| panic!("{x}: {v:?}"));
            assert!(verify_certificate(&m, &x, c).unwrap(), "{x}: {c}");
        }
        assert_eq!(
            membership_m(&p, &p.b(2)).unwrap(),
            Verdict::Member(MembershipCertificate::single(MainGen::B(2).index(), 1))
        );
        let below = &p.b1 - &q("1/2");
        assert!(matches!(membership_m(&p, &below).unwrap(), Verdict::NonMember(_)));
        assert!(matches!(membership_m(&p, &q("1/3")).unwrap(), Verdict::NonMember(_)));
        // 2a_2 does not divide b_1.
        let x = &p.b1 - &p.a(2).mul_int(2);
        assert!(matches!(membership_m(&p, &x).unwrap(), Verdict::NonMember(_)));
    }

    #[test]
    fn generators_are_located() {
        let p = build_default_params().unwrap();
        for i in 0..30 {
            let g = MainGen::from_index(i);
            assert_eq!(locate_generator(&p, &g.value(&p)), Some(g));
        }
        assert_eq!(locate_generator(&p, &q("1/3")), None);
        assert_eq!(locate_generator(&p, &(&p.b(3) + &p.a(9))), None);
    }

    #[test]
    fn oracle_relations_hold() {
        let p = build_default_params().unwrap();
        let m = main_monoid(&p);
        let o = MainOracle { params: p.clone() };
        let rels = o.relations(12);
        assert_eq!(rels.len(), 6);
        for (l, r) in rels {
            assert_eq!(l.value_with(|i| m.generator(i)).unwrap(), r.value_with(|i| m.generator(i)).unwrap());
        }
        assert_eq!(o.is_atom(&p.a(5)).unwrap(), Some(true));
        assert_eq!(o.is_atom(&p.b(5)).unwrap(), Some(false));
        let d = BigInt::from(131 * 257 * 3);
        assert_eq!(o.strip_denominator(&d), BigInt::from(3));
    }
}
