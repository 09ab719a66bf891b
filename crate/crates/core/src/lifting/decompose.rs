//! Canonical decompositions `x = x0 + Σ x_s` in a lifted monoid, with
//! `x0 ∈ M`, `x_s ∈ M_s` and `s ∤ x_s` in `M_s`.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use super::{BaseVerdict, LiftedMonoid, LiftingFunction, Source};
use crate::error::{Error, Result};
use crate::exactnum::{is_prime, mod_inverse, p_adic_valuation, Prime, Rational};
use crate::puiseux::{verify_certificate, MembershipCertificate};
use crate::report::{Report, Status};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Part {
    pub s_index: usize,
    pub s: Rational,
    pub value: Rational,
}

/// The decomposition proper is `(x0, parts)`; `x0_cert` is one witness of
/// `x0 ∈ M` and does not take part in equality.
#[derive(Clone, Debug)]
pub struct CanonicalDecomposition {
    pub x0: Rational,
    pub x0_cert: MembershipCertificate,
    pub parts: BTreeMap<usize, Part>,
}

impl PartialEq for CanonicalDecomposition {
    fn eq(&self, other: &Self) -> bool {
        self.x0 == other.x0 && self.parts == other.parts
    }
}

impl Eq for CanonicalDecomposition {}

impl CanonicalDecomposition {
    pub fn zero() -> Self {
        CanonicalDecomposition {
            x0: Rational::zero(),
            x0_cert: MembershipCertificate::empty(),
            parts: BTreeMap::new(),
        }
    }

    pub fn value(&self) -> Rational {
        let mut v = self.x0.clone();
        for p in self.parts.values() {
            v += &p.value;
        }
        v
    }

    /// The `s`-component, zero when absent.
    pub fn part(&self, j: usize) -> Rational {
        self.parts.get(&j).map(|p| p.value.clone()).unwrap_or_default()
    }

    pub fn to_json(&self, base_label: &str) -> Value {
        json!({
            "x0": self.x0,
            "x0_cert": self.x0_cert.to_doc(&self.x0, base_label),
            "parts": self.parts.values().collect::<Vec<_>>(),
        })
    }

    /// A certificate over the lifted generators.
    pub fn lifted_certificate(&self, lifted: &LiftedMonoid) -> Result<MembershipCertificate> {
        let mut cert = lifted.lift_base_certificate(&self.x0_cert)?;
        for (&j, part) in &self.parts {
            let s = lifted.phi.s.get(j);
            let n = s.n_coordinate(&part.value).ok_or_else(|| {
                Error::InvariantViolation(format!("part {} is not in M_s", part.value))
            })?;
            cert.merge(&lifted.n_certificate(j, &n)?);
        }
        Ok(cert)
    }
}

/// Groups the certificate by source, then pulls every available copy of `s`
/// out of each `M_s` component into `M`.
pub fn canonical_decomposition(
    lifted: &LiftedMonoid,
    x: &Rational,
    cert: &MembershipCertificate,
) -> Result<CanonicalDecomposition> {
    if !lifted.verify(x, cert) {
        return Err(Error::InvariantViolation(format!(
            "certificate {cert} does not sum to {x}"
        )));
    }
    let phi = &lifted.phi;
    let mut x0_cert = MembershipCertificate::empty();
    let mut mass: BTreeMap<usize, BigInt> = BTreeMap::new();
    for (i, m) in cert.entries() {
        match lifted.generator(i).source {
            Source::Base(b) => x0_cert.add_entry(b, m),
            Source::Lift { s, n_index } => {
                let n = phi.s.get(s).n.generators()[n_index].clone();
                *mass.entry(s).or_insert_with(BigInt::zero) += n * m;
            }
        }
    }
    let mut parts = BTreeMap::new();
    for (j, y) in mass {
        let s = phi.s.get(j);
        let pi = s.pi.to_bigint();
        let w = s
            .n
            .apery(&y)?
            .ok_or_else(|| Error::Defect(format!("{y} has no Apéry element in N for S-index {j}")))?;
        let copies = (&y - &w) / &pi;
        let copies = copies
            .to_u64()
            .ok_or_else(|| Error::ResourceExhausted(format!("{copies} copies of s")))?;
        x0_cert.merge(&s.base_cert.scaled(copies));
        if !w.is_zero() {
            parts.insert(
                j,
                Part {
                    s_index: j,
                    s: s.value.clone(),
                    value: s.unit().mul_int(w),
                },
            );
        }
    }
    let x0 = x0_cert.value_with(|i| phi.base.generator(i))?;
    let d = CanonicalDecomposition { x0, x0_cert, parts };
    if &d.value() != x {
        return Err(Error::Defect(format!("decomposition of {x} reconstructs {}", d.value())));
    }
    Ok(d)
}

/// Outcome of decoding an element from its value alone.
#[derive(Clone, Debug, PartialEq)]
pub enum Decoded {
    Decomposed(CanonicalDecomposition),
    /// Not in the lifted monoid, with the reason.
    CertifiedOut(String),
    Inconclusive(String),
}

impl Decoded {
    pub fn decomposition(&self) -> Option<&CanonicalDecomposition> {
        match self {
            Decoded::Decomposed(d) => Some(d),
            _ => None,
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            Decoded::Decomposed(_) => "decomposed",
            Decoded::CertifiedOut(_) => "certified-out",
            Decoded::Inconclusive(_) => "inconclusive",
        }
    }
}

/// Recovers the canonical decomposition of `x` from its value. Each nonzero
/// `x_s` has `v_{π(s)}(x_s) = −1` and is forced to be the least element of
/// `M_s` in its residue class, so only `S`-indices with `π(s) | d(x)` among
/// the first `search_depth` contribute. The residual is handed to the base
/// oracle.
pub fn decode_decomposition(lifted: &LiftedMonoid, x: &Rational, search_depth: usize) -> Result<Decoded> {
    if x.is_negative() {
        return Ok(Decoded::CertifiedOut(format!("{x} is negative")));
    }
    if x.is_zero() {
        return Ok(Decoded::Decomposed(CanonicalDecomposition::zero()));
    }
    let phi = &lifted.phi;
    let mut cofactor = x.denom().clone();
    let mut residual = x.clone();
    let mut parts = BTreeMap::new();
    for j in 0..search_depth {
        let s = phi.s.get(j);
        if !s.active() {
            continue;
        }
        let p = s.pi.to_bigint();
        if !(x.denom() % &p).is_zero() {
            continue;
        }
        while (&cofactor % &p).is_zero() {
            cofactor /= &p;
        }
        let v = p_adic_valuation(x, &s.pi)?;
        if v <= -2 {
            return Ok(Decoded::CertifiedOut(format!(
                "v_{p}({x}) = {v}, but every element of the lifted monoid has v_{p} >= -1"
            )));
        }
        let y = x.mul_int(p.clone()) / &s.value;
        let inv = mod_inverse(y.denom(), &p).expect("v_p(y) >= 0");
        let r = (y.numer() * inv).mod_floor(&p);
        let Some(w) = s.n.apery(&r)? else {
            return Ok(Decoded::CertifiedOut(format!(
                "no element of M_s for S-index {j} has the residue forced by v_{p}"
            )));
        };
        let part = s.unit().mul_int(w);
        if &part > x {
            return Ok(Decoded::CertifiedOut(format!(
                "forced component {part} for S-index {j} exceeds {x}"
            )));
        }
        residual -= &part;
        parts.insert(
            j,
            Part {
                s_index: j,
                s: s.value.clone(),
                value: part,
            },
        );
    }
    if residual.is_negative() {
        return Ok(Decoded::CertifiedOut(format!("forced components exceed {x}")));
    }
    let cofactor = phi.oracle.strip_denominator(&cofactor);
    if !cofactor.is_one() {
        return Ok(explain_cofactor(phi, x, &cofactor, search_depth));
    }
    Ok(match phi.oracle.member(&residual)? {
        BaseVerdict::Member(x0_cert) => Decoded::Decomposed(CanonicalDecomposition {
            x0: residual,
            x0_cert,
            parts,
        }),
        BaseVerdict::NonMember(why) => {
            Decoded::CertifiedOut(format!("projection {residual} is not in the base monoid: {why}"))
        }
        BaseVerdict::Unknown(why) => {
            Decoded::Inconclusive(format!("projection {residual} undecided: {why}"))
        }
    })
}

const TRIAL_BOUND: u64 = 1 << 16;

/// A prime dividing `d(x)` that divides no base denominator and is no `π(s)`
/// certifies non-membership; otherwise the search is inconclusive.
fn explain_cofactor(phi: &LiftingFunction, x: &Rational, cofactor: &BigInt, depth: usize) -> Decoded {
    let mut rest = cofactor.clone();
    let mut primes = BTreeSet::new();
    let mut f = 2u64;
    while f < TRIAL_BOUND && rest > BigInt::one() {
        if (&rest % f).is_zero() {
            primes.insert(BigInt::from(f));
            while (&rest % f).is_zero() {
                rest /= f;
            }
        }
        f += if f == 2 { 1 } else { 2 };
    }
    if rest > BigInt::one() {
        let r: BigUint = rest.to_biguint().expect("positive");
        if is_prime(&r) {
            primes.insert(rest.clone());
        }
    }
    for p in primes {
        let prime = Prime::new(p.to_biguint().expect("positive")).expect("factor is prime");
        if phi.base.spares(&prime) == Some(true) && phi.excludes_pi(&p, depth) {
            return Decoded::CertifiedOut(format!(
                "{p} divides d({x}) but no generator denominator of the lifted monoid"
            ));
        }
    }
    Decoded::Inconclusive(format!(
        "denominator factor {cofactor} of {x} is not explained within {depth} S-indices"
    ))
}

/// `p ∈ M_s` and `s ∤ p` in `M_s`.
pub fn is_ms_projection(phi: &LiftingFunction, j: usize, p: &Rational) -> Result<bool> {
    if p.is_zero() {
        return Ok(true);
    }
    let s = phi.s.get(j);
    let Some(n) = s.n_coordinate(p) else {
        return Ok(false);
    };
    let pi = s.pi.to_bigint();
    Ok(s.n.contains(&n)? && !s.n.contains(&(n - pi))?)
}

/// The unique `M_s`-projection `q` with `p + q ∈ ℕ₀·s`.
pub fn complementary_projection(phi: &LiftingFunction, j: usize, p: &Rational) -> Result<Rational> {
    if !is_ms_projection(phi, j, p)? {
        return Err(Error::Precondition(format!("{p} is not an M_s-projection for S-index {j}")));
    }
    if p.is_zero() {
        return Ok(Rational::zero());
    }
    let s = phi.s.get(j);
    let n = s.n_coordinate(p).expect("checked above");
    let w = s
        .n
        .apery(&(-n))?
        .ok_or_else(|| Error::Defect(format!("empty residue class for S-index {j}")))?;
    Ok(s.unit().mul_int(w))
}

/// Certificates produced by the projection divisibility laws.
#[derive(Clone, Debug)]
pub struct ProjectionCheck {
    /// `c0 − b0` and its certificate over the base generators.
    pub part1: (Rational, MembershipCertificate),
    /// For each `S`-index with `b_s > c_s`: `c0 − b0 − s` and its certificate.
    pub part2: Vec<(usize, Rational, MembershipCertificate)>,
    pub carries: BTreeMap<usize, u64>,
}

impl ProjectionCheck {
    pub fn to_report(&self, base_label: &str) -> Report {
        let mut report = Report::new("projection divisibility");
        let (t, c) = &self.part1;
        report.witness(json!({"part": 1, "certificate": c.to_doc(t, base_label)}));
        for (j, t, c) in &self.part2 {
            report.witness(json!({
                "part": 2,
                "s_index": j,
                "carry": self.carries[j],
                "certificate": c.to_doc(t, base_label),
            }));
        }
        report.status = Status::Ok;
        report
    }
}

/// Given `b | c` in `M_φ` (with `cert` witnessing `c − b`), certifies
/// `b0 | c0` in `M`, and `b0 + s | c0` whenever `b_s > c_s`. The
/// certificates are built from the carries `b_s + d_s = c_s + m_s·s`.
/// A failure contradicts the theory and is reported as a defect.
pub fn check_projection_divisibility(
    lifted: &LiftedMonoid,
    b: &CanonicalDecomposition,
    c: &CanonicalDecomposition,
    cert: &MembershipCertificate,
) -> Result<ProjectionCheck> {
    let diff = c.value() - b.value();
    let d = canonical_decomposition(lifted, &diff, cert)?;
    let phi = &lifted.phi;

    let indices: BTreeSet<usize> = b
        .parts
        .keys()
        .chain(c.parts.keys())
        .chain(d.parts.keys())
        .copied()
        .collect();
    let mut part1 = d.x0_cert.clone();
    let mut carries = BTreeMap::new();
    for &j in &indices {
        let s = phi.s.get(j);
        let carry = (b.part(j) + d.part(j) - c.part(j)) / &s.value;
        let m = carry
            .to_u64()
            .ok_or_else(|| Error::Defect(format!("carry {carry} at S-index {j} is not a natural number")))?;
        part1.merge(&s.base_cert.scaled(m));
        carries.insert(j, m);
    }
    let target = &c.x0 - &b.x0;
    if !verify_certificate(&phi.base, &target, &part1)? {
        return Err(Error::Defect(format!("b0 = {} does not divide c0 = {}", b.x0, c.x0)));
    }

    let mut part2 = Vec::new();
    for &j in &indices {
        if b.part(j) <= c.part(j) {
            continue;
        }
        let s = phi.s.get(j);
        let cert2 = part1.minus(&s.base_cert).ok_or_else(|| {
            Error::Defect(format!("b_s > c_s at S-index {j} without a carry"))
        })?;
        let target2 = &target - &s.value;
        if !verify_certificate(&phi.base, &target2, &cert2)? {
            return Err(Error::Defect(format!("b0 + s does not divide c0 at S-index {j}")));
        }
        part2.push((j, target2, cert2));
    }
    Ok(ProjectionCheck {
        part1: (target, part1),
        part2,
        carries,
    })
}
