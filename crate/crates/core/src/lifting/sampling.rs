//! Random elements of a lifted monoid given by two independently built
//! certificates, for exercising uniqueness of canonical decompositions.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{canonical_decomposition, check_projection_divisibility, LiftedMonoid, ProjectionCheck, Source};
use crate::error::Result;
use crate::exactnum::Rational;
use crate::puiseux::MembershipCertificate;

#[derive(Clone, Debug)]
pub struct CertificatePair {
    pub value: Rational,
    pub first: MembershipCertificate,
    pub second: MembershipCertificate,
}

/// Applies `rounds` random rewrites `l → r` or `r → l` from the oracle's
/// relations.
fn rewrite<R: Rng>(
    cert: &MembershipCertificate,
    relations: &[(MembershipCertificate, MembershipCertificate)],
    rounds: usize,
    rng: &mut R,
) -> MembershipCertificate {
    let mut cert = cert.clone();
    for _ in 0..rounds {
        let Some((l, r)) = relations.choose(rng) else {
            break;
        };
        let (from, to) = if rng.gen_bool(0.5) { (l, r) } else { (r, l) };
        if let Some(rest) = cert.minus(from) {
            cert = rest.plus(to);
        }
    }
    cert
}

/// Draws an element from the first `depth` base generators and `S`-indices
/// and certifies it twice: once with random generators of each `N_s`, once
/// with the representation found by the numerical-monoid solver, with base
/// parts rewritten independently and copies of `π(s)` sometimes traded for
/// `s` in the base.
pub fn random_certificate_pair<R: Rng>(lifted: &LiftedMonoid, depth: usize, rng: &mut R) -> Result<CertificatePair> {
    let phi = &lifted.phi;
    let relations = phi.oracle.relations(depth);

    let mut c0 = MembershipCertificate::empty();
    for _ in 0..rng.gen_range(0..=3) {
        c0.add_entry(rng.gen_range(0..depth), rng.gen_range(1..=3));
    }
    let mut base_a = rewrite(&c0, &relations, 6, rng);
    let mut base_b = rewrite(&c0, &relations, 6, rng);

    let mut lift_a = MembershipCertificate::empty();
    let mut lift_b = MembershipCertificate::empty();
    for _ in 0..rng.gen_range(0..=3) {
        let j = rng.gen_range(0..depth);
        let s = phi.s.get(j);
        if !s.active() {
            continue;
        }
        let mut y = BigInt::zero();
        for (t, g) in s.n.generators().iter().enumerate() {
            let m = rng.gen_range(0..=2u64);
            if m > 0 {
                lift_a.add_entry(lifted.index_of(Source::Lift { s: j, n_index: t })?, m);
                y += g * m;
            }
        }
        let pi = s.pi.to_bigint();
        let traded = rng.gen_bool(0.5) && y >= pi && s.n.contains(&(&y - &pi))?;
        if traded {
            y -= &pi;
            base_b.merge(&s.base_cert);
        }
        if y.is_zero() {
            continue;
        }
        lift_b.merge(&lifted.n_certificate(j, &y)?);
    }
    if rng.gen_bool(0.25) {
        // Trade the other way: a base copy of `s` becomes `π(s)` in `N_s`.
        if let Some((j, s)) = (0..depth)
            .map(|j| (j, phi.s.get(j)))
            .find(|(_, s)| s.active() && base_a.minus(&s.base_cert).is_some())
        {
            base_a = base_a.minus(&s.base_cert).expect("checked");
            lift_a.merge(&lifted.n_certificate(j, &s.pi.to_bigint())?);
        }
    }
    let first = lifted.lift_base_certificate(&base_a)?.plus(&lift_a);
    let second = lifted.lift_base_certificate(&base_b)?.plus(&lift_b);
    let value = first.value_with(|i| Ok(lifted.generator(i).value))?;
    Ok(CertificatePair { value, first, second })
}

/// Draws `b` and `d` as in [`random_certificate_pair`], sets `c = b + d`,
/// and runs the projection divisibility check on `b | c`, witnessed by an
/// independently built certificate for `d`.
pub fn projection_divisibility_trial<R: Rng>(
    lifted: &LiftedMonoid,
    depth: usize,
    rng: &mut R,
) -> Result<ProjectionCheck> {
    let b = random_certificate_pair(lifted, depth, rng)?;
    let d = random_certificate_pair(lifted, depth, rng)?;
    let c = &b.value + &d.value;
    let b_dec = canonical_decomposition(lifted, &b.value, &b.first)?;
    let c_dec = canonical_decomposition(lifted, &c, &b.second.plus(&d.first))?;
    check_projection_divisibility(lifted, &b_dec, &c_dec, &d.second)
}
