//! Atom classification, ACCP chain probes and the MCD transfer check.

use std::collections::BTreeSet;

use serde::Serialize;
use serde_json::{json, Value};

use super::decompose::{check_projection_divisibility, decode_decomposition, CanonicalDecomposition, Decoded};
use super::{BaseVerdict, LiftedMonoid};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::puiseux::{common_divisors, mcds, MembershipCertificate};
use crate::report::{Report, Status};

/// Where an element sits in the partition of the atoms of `M_φ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AtomClass {
    /// An atom of `M` outside `S`.
    AtomOfMNotS,
    /// An atom `a` of `M` in `S` that is also an atom of `M_a`.
    AtomOfMInSAndMs,
    /// An atom of some `M_s` other than `s`.
    AtomOfMs,
    NotAtom,
    NotMember,
    Inconclusive,
}

/// Classifies `x` using its canonical decomposition: an atom of `M_φ` has a
/// single nonzero component, and the component decides the class.
pub fn classify_atom(lifted: &LiftedMonoid, x: &Rational, depth: usize) -> Result<AtomClass> {
    if !x.is_positive() {
        return Ok(AtomClass::NotAtom);
    }
    let d = match decode_decomposition(lifted, x, depth)? {
        Decoded::Decomposed(d) => d,
        Decoded::CertifiedOut(_) => return Ok(AtomClass::NotMember),
        Decoded::Inconclusive(_) => return Ok(AtomClass::Inconclusive),
    };
    let phi = &lifted.phi;
    if !d.x0.is_zero() && !d.parts.is_empty() || d.parts.len() > 1 {
        return Ok(AtomClass::NotAtom);
    }
    if let Some(part) = d.parts.values().next() {
        let s = phi.s.get(part.s_index);
        let n = s.n_coordinate(&part.value).expect("component lies in M_s");
        return Ok(if s.n.generators().contains(&n) {
            AtomClass::AtomOfMs
        } else {
            AtomClass::NotAtom
        });
    }
    match phi.oracle.is_atom(x)? {
        None => Ok(AtomClass::Inconclusive),
        Some(false) => Ok(AtomClass::NotAtom),
        Some(true) => Ok(match phi.s_index_of(x) {
            None => AtomClass::AtomOfMNotS,
            Some(j) => {
                let s = phi.s.get(j);
                if s.n.generators().contains(&s.pi.to_bigint()) {
                    AtomClass::AtomOfMInSAndMs
                } else {
                    AtomClass::NotAtom
                }
            }
        }),
    }
}

#[derive(Clone, Debug)]
pub struct ChainStep {
    pub from: Rational,
    pub to: Rational,
    /// `from − to` over the lifted generators.
    pub difference_cert: MembershipCertificate,
    /// `to0 | from0` in `M`, built from the projection law.
    pub projection_cert: MembershipCertificate,
}

#[derive(Clone, Debug)]
pub struct ChainProbe {
    pub terms: Vec<Rational>,
    pub projections: Vec<Rational>,
    pub steps: Vec<ChainStep>,
}

impl ChainProbe {
    pub fn to_report(&self, lifted: &LiftedMonoid) -> Report {
        let mut r = Report::new(format!(
            "{} strictly ascending principal ideals starting at {}",
            self.steps.len(),
            self.terms[0]
        ));
        let label = lifted.label();
        let base = lifted.phi.base.label.clone();
        for (i, st) in self.steps.iter().enumerate() {
            let diff = &st.from - &st.to;
            let proj = &self.projections[i] - &self.projections[i + 1];
            r.witness(json!({
                "step": i + 1,
                "from": st.from,
                "to": st.to,
                "difference": st.difference_cert.to_doc(&diff, &label),
                "projection_from": self.projections[i],
                "projection_to": self.projections[i + 1],
                "projection_difference": st.projection_cert.to_doc(&proj, &base),
            }));
        }
        r
    }
}

/// Certifies that `start = b0, b1, ...` gives a strictly ascending chain of
/// principal ideals `b_i + M_φ`, and that the `M`-projections ascend in `M`.
pub fn accp_chain_probe(
    lifted: &LiftedMonoid,
    start: &Rational,
    steps: &[Rational],
    depth: usize,
) -> Result<ChainProbe> {
    let terms: Vec<Rational> = std::iter::once(start.clone()).chain(steps.iter().cloned()).collect();
    let mut decs: Vec<CanonicalDecomposition> = Vec::new();
    for (i, t) in terms.iter().enumerate() {
        match decode_decomposition(lifted, t, depth)? {
            Decoded::Decomposed(d) => decs.push(d),
            other => {
                return Err(Error::ChainBreak {
                    step: i,
                    reason: format!("{t} is not certified in the lifted monoid ({})", other.verdict()),
                })
            }
        }
    }
    let mut out = Vec::new();
    for i in 0..terms.len().saturating_sub(1) {
        let (from, to) = (&terms[i], &terms[i + 1]);
        let diff = from - to;
        if diff.is_zero() {
            return Err(Error::ChainBreak {
                step: i + 1,
                reason: format!("{to} generates the same ideal; the chain stabilizes"),
            });
        }
        if diff.is_negative() {
            return Err(Error::ChainBreak {
                step: i + 1,
                reason: format!("{to} exceeds {from}, so its ideal cannot contain {from}"),
            });
        }
        let cert = match decode_decomposition(lifted, &diff, depth)? {
            Decoded::Decomposed(d) => d.lifted_certificate(lifted)?,
            other => {
                return Err(Error::ChainBreak {
                    step: i + 1,
                    reason: format!("{from} − {to} = {diff} is {}", other.verdict()),
                })
            }
        };
        let law = check_projection_divisibility(lifted, &decs[i + 1], &decs[i], &cert)?;
        out.push(ChainStep {
            from: from.clone(),
            to: to.clone(),
            difference_cert: cert,
            projection_cert: law.part1.1,
        });
    }
    Ok(ChainProbe {
        projections: decs.iter().map(|d| d.x0.clone()).collect(),
        terms,
        steps: out,
    })
}

/// Compares common divisors of `xs ⊆ M` in truncations of `M` and `M_φ`:
/// each divisor found in `M_φ` must project to a common divisor in `M`, and
/// the maximal ones should agree.
pub fn kmcd_transfer_check(lifted: &LiftedMonoid, xs: &[Rational], depth: usize) -> Result<Report> {
    let phi = &lifted.phi;
    let mut report = Report::new(format!("common divisors of {} elements at depth {depth}", xs.len()));
    for x in xs {
        if !matches!(phi.oracle.member(x)?, BaseVerdict::Member(_)) {
            return Err(Error::Precondition(format!("{x} is not certified in the base monoid")));
        }
    }
    let base_gens = phi.base.generators(depth);
    let lifted_gens = lifted.generators(depth);
    let (in_m, in_phi) = match (common_divisors(&base_gens, xs), common_divisors(&lifted_gens, xs)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => {
            report.flag(Status::Inconclusive, json!({"reason": e.to_string()}));
            return Ok(report);
        }
    };
    for d in &in_phi {
        let dec = decode_decomposition(lifted, d, depth)?;
        let Some(dec) = dec.decomposition() else {
            return Err(Error::Defect(format!("common divisor {d} of the lifted truncation fails to decode")));
        };
        for x in xs {
            match phi.oracle.member(&(x - &dec.x0))? {
                BaseVerdict::Member(_) => {}
                BaseVerdict::NonMember(why) => {
                    report.flag(
                        Status::Violation,
                        json!({"divisor": d, "projection": dec.x0, "element": x, "reason": why}),
                    );
                }
                BaseVerdict::Unknown(why) => {
                    report.flag(
                        Status::Inconclusive,
                        json!({"divisor": d, "projection": dec.x0, "element": x, "reason": why}),
                    );
                }
            }
        }
    }
    let mcd_m = mcds(&base_gens, xs)?;
    let mcd_phi = mcds(&lifted_gens, xs)?;
    let as_json = |s: &BTreeSet<Rational>| -> Value { json!(s.iter().collect::<Vec<_>>()) };
    report.witness(json!({
        "common_divisors_base": in_m.len(),
        "common_divisors_lifted": in_phi.len(),
        "mcds_base": as_json(&mcd_m),
        "mcds_lifted": as_json(&mcd_phi),
    }));
    if mcd_m != mcd_phi {
        report.flag(Status::Inconclusive, json!({"reason": "truncated MCD sets differ"}));
    }
    Ok(report)
}
