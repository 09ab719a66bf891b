//! Common divisors of `{b_1, c_1}` in `M`: every common divisor can be pushed
//! up by some `a_{m+1}`, so none is maximal.

use serde_json::{json, Value};

use super::deciders::{main_monoid, membership_a, membership_m, MainGen, Verdict};
use super::params::CounterexampleParams;
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::puiseux::{verify_certificate, MembershipCertificate};

/// `d |_M target`, witnessed by a certificate for `target − d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisibilityWitness {
    pub target: Rational,
    pub quotient: Rational,
    pub certificate: MembershipCertificate,
}

impl DivisibilityWitness {
    pub fn verify(&self, params: &CounterexampleParams) -> bool {
        verify_certificate(&main_monoid(params), &self.quotient, &self.certificate).unwrap_or(false)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target,
            "certificate": self.certificate.to_doc(&self.quotient, "M"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommonDivisor {
    pub value: Rational,
    pub witnesses: Vec<DivisibilityWitness>,
}

impl CommonDivisor {
    pub fn verify(&self, params: &CounterexampleParams) -> bool {
        self.witnesses
            .iter()
            .all(|w| w.verify(params) && w.quotient == &w.target - &self.value)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "divisor": self.value,
            "witnesses": self.witnesses.iter().map(DivisibilityWitness::to_json).collect::<Vec<_>>(),
        })
    }
}

fn divides_in_m(params: &CounterexampleParams, d: &Rational, target: &Rational) -> Result<DivisibilityWitness> {
    let quotient = target - d;
    match membership_m(params, &quotient)? {
        Verdict::Member(certificate) => Ok(DivisibilityWitness {
            target: target.clone(),
            quotient,
            certificate,
        }),
        other => Err(Error::Defect(format!("{d} should divide {target} in M, got {other:?}"))),
    }
}

/// `a_{m+1}` for `m` the largest index among the selected `b_n`, `c_n`; it
/// divides each of them because `b_n = b_{m+1} + a_{n+1} + … + a_{m+1}`.
pub fn common_divisor_of_bc_subset(params: &CounterexampleParams, gens: &[MainGen]) -> Result<CommonDivisor> {
    let m = gens
        .iter()
        .map(|g| match g {
            MainGen::B(n) | MainGen::C(n) => Ok(*n),
            MainGen::A(_) => Err(Error::Precondition(format!("{g:?} is not in B ∪ C"))),
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .max()
        .ok_or_else(|| Error::Precondition("empty subset of B ∪ C".into()))?;
    let value = params.a(m + 1);
    let witnesses = gens
        .iter()
        .map(|g| divides_in_m(params, &value, &g.value(params)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CommonDivisor { value, witnesses })
}

/// Some `B ∪ C` generator in a certificate over `M`.
fn bc_entry(cert: &MembershipCertificate) -> Option<MainGen> {
    cert.entries()
        .map(|(i, _)| MainGen::from_index(i))
        .find(|g| !matches!(g, MainGen::A(_)))
}

/// One improvement step: from a common divisor `d` of `{b_1, c_1}`, a
/// strictly larger one `d + a_{m+1}`.
pub fn improve_common_divisor(params: &CounterexampleParams, d: &Rational) -> Result<CommonDivisor> {
    if !membership_a(params, d)?.is_member() {
        return Err(Error::Defect(format!("common divisor {d} of b1, c1 is not in ⟨A_eps⟩")));
    }
    let mut picked = Vec::new();
    for target in [&params.b1, &params.c1] {
        let w = divides_in_m(params, d, target)?;
        let g = bc_entry(&w.certificate).ok_or_else(|| {
            Error::Defect(format!("{} − {d} has no B ∪ C generator in its certificate", target))
        })?;
        picked.push(g);
    }
    let step = common_divisor_of_bc_subset(params, &picked)?;
    let value = d + &step.value;
    let witnesses = [&params.b1, &params.c1]
        .into_iter()
        .map(|t| divides_in_m(params, &value, t))
        .collect::<Result<Vec<_>>>()?;
    let next = CommonDivisor { value, witnesses };
    if !next.verify(params) {
        return Err(Error::Defect(format!("improved divisor {} fails verification", next.value)));
    }
    Ok(next)
}

/// `steps` improvements starting from `d = 0`.
pub fn improvement_chain(params: &CounterexampleParams, steps: usize) -> Result<Vec<CommonDivisor>> {
    let mut chain = Vec::with_capacity(steps);
    let mut d = Rational::zero();
    for _ in 0..steps {
        let next = improve_common_divisor(params, &d)?;
        if next.value <= d {
            return Err(Error::Defect(format!("improvement {} does not exceed {d}", next.value)));
        }
        d = next.value.clone();
        chain.push(next);
    }
    Ok(chain)
}
