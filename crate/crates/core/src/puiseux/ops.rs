use std::collections::BTreeSet;

use num_traits::ToPrimitive;

use super::search::{check_gens, Scaled, SearchBudget, Table};
use super::{member_finite, MembershipCertificate, MonoidSpec};
use crate::error::{Error, Result};
use crate::exactnum::{lcm_of_denominators, p_adic_valuation, Prime, Rational};

/// Anything that can name generators by index.
pub trait Generators {
    fn generator(&self, index: usize) -> Result<Rational>;
}

impl Generators for MonoidSpec {
    fn generator(&self, index: usize) -> Result<Rational> {
        MonoidSpec::generator(self, index)
    }
}

impl Generators for super::Truncation {
    fn generator(&self, index: usize) -> Result<Rational> {
        super::Truncation::generator(self, index)
    }
}

impl Generators for [Rational] {
    fn generator(&self, index: usize) -> Result<Rational> {
        self.get(index).cloned().ok_or(Error::InvalidIndex {
            index,
            len: self.len(),
        })
    }
}

impl Generators for Vec<Rational> {
    fn generator(&self, index: usize) -> Result<Rational> {
        self.as_slice().generator(index)
    }
}

/// True iff the certificate sums to `x` exactly.
pub fn verify_certificate<G: Generators + ?Sized>(
    m: &G,
    x: &Rational,
    cert: &MembershipCertificate,
) -> Result<bool> {
    Ok(&cert.value_with(|i| m.generator(i))? == x)
}

/// Witness that `c − b ∈ ⟨gens⟩`, i.e. `b` divides `c`.
pub fn divides(gens: &[Rational], b: &Rational, c: &Rational) -> Result<Option<MembershipCertificate>> {
    member_finite(gens, &(c - b))
}

/// `x` is an atom of `⟨gens⟩`: a nonzero member that is not `g + y` with
/// `g` a generator below `x` and `y` a member.
pub fn is_atom_finite(gens: &[Rational], x: &Rational) -> Result<bool> {
    if !x.is_positive() || member_finite(gens, x)?.is_none() {
        return Ok(false);
    }
    for g in gens.iter().filter(|g| *g < x) {
        if member_finite(gens, &(x - g))?.is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Atoms of `⟨gens⟩`: the generators not generated by the others.
pub fn atoms_finite(gens: &[Rational]) -> Result<BTreeSet<Rational>> {
    check_gens(gens)?;
    let distinct: BTreeSet<Rational> = gens.iter().cloned().collect();
    let mut atoms = BTreeSet::new();
    for g in &distinct {
        let others: Vec<Rational> = distinct.iter().filter(|h| *h != g).cloned().collect();
        if others.is_empty() || member_finite(&others, g)?.is_none() {
            atoms.insert(g.clone());
        }
    }
    Ok(atoms)
}

/// Cap on the number of factorizations returned.
pub const FACTORIZATION_CAP: usize = 100_000;

/// All factorizations of `x` into atoms, as certificates over positions in
/// `gens` (first occurrence of each atom), in lexicographic order.
pub fn factorizations(gens: &[Rational], x: &Rational) -> Result<Vec<MembershipCertificate>> {
    check_gens(gens)?;
    if x.is_negative() {
        return Ok(Vec::new());
    }
    let atoms = atoms_finite(gens)?;
    let mut positions = Vec::new();
    for a in &atoms {
        positions.push(gens.iter().position(|g| g == a).expect("atom is a generator"));
    }
    positions.sort_unstable();
    let atom_gens: Vec<Rational> = positions.iter().map(|&i| gens[i].clone()).collect();
    let Some(problem) = Scaled::new(&atom_gens, x) else {
        return Ok(Vec::new());
    };
    let found = problem.enumerate(FACTORIZATION_CAP, SearchBudget::default())?;
    Ok(found
        .into_iter()
        .map(|c| MembershipCertificate::from_entries(c.entries().map(|(i, m)| (positions[i], m))))
        .collect())
}

/// Cap on candidate divisors examined one by one.
pub const DIVISOR_CANDIDATE_CAP: u64 = 200_000;

/// All `d ∈ ⟨gens⟩` dividing every element of `xs`.
pub fn common_divisors(gens: &[Rational], xs: &[Rational]) -> Result<BTreeSet<Rational>> {
    check_gens(gens)?;
    let Some(min) = xs.iter().min() else {
        return Err(Error::Precondition("no elements given".into()));
    };
    if min.is_negative() {
        return Err(Error::Precondition(format!("negative element {min}")));
    }
    let l = lcm_of_denominators(gens.iter());
    let mut scaled_xs = Vec::new();
    for x in xs {
        let t = x.mul_int(l.clone());
        if !t.is_integer() {
            return Ok(BTreeSet::new());
        }
        scaled_xs.push(t.numer().clone());
    }
    let k_max = min.mul_int(l.clone()).floor();
    let limit = scaled_xs.iter().max().and_then(|m| m.to_u64());
    let budget = SearchBudget::default();
    let mut out = BTreeSet::new();

    if let Some(limit) = limit.filter(|&m| m <= budget.table_limit) {
        let scaled_gens: Vec<_> = gens.iter().map(|g| g.mul_int(l.clone()).numer().clone()).collect();
        let table = Table::build(&scaled_gens, limit, 0);
        let xs_u: Vec<u64> = scaled_xs.iter().map(|x| x.to_u64().expect("below limit")).collect();
        let k_max = k_max.to_u64().expect("below limit");
        for k in 0..=k_max {
            if table.reachable(k) && xs_u.iter().all(|&x| table.reachable(x - k)) {
                out.insert(Rational::new(k, l.clone()));
            }
        }
        return Ok(out);
    }

    let count = k_max
        .to_u64()
        .filter(|&k| k < DIVISOR_CANDIDATE_CAP)
        .ok_or_else(|| {
            Error::ResourceExhausted(format!("more than {DIVISOR_CANDIDATE_CAP} divisor candidates"))
        })?;
    for k in 0..=count {
        let d = Rational::new(k, l.clone());
        if member_finite(gens, &d)?.is_none() {
            continue;
        }
        let mut all = true;
        for x in xs {
            if member_finite(gens, &(x - &d))?.is_none() {
                all = false;
                break;
            }
        }
        if all {
            out.insert(d);
        }
    }
    Ok(out)
}

/// Maximal common divisors: common divisors `d` such that no other common
/// divisor `e` has `d | e`.
pub fn mcds(gens: &[Rational], xs: &[Rational]) -> Result<BTreeSet<Rational>> {
    let divisors = common_divisors(gens, xs)?;
    let mut out = BTreeSet::new();
    for d in &divisors {
        let mut maximal = true;
        for e in divisors.range(d..).skip(1) {
            if member_finite(gens, &(e - d))?.is_some() {
                maximal = false;
                break;
            }
        }
        if maximal {
            out.insert(d.clone());
        }
    }
    Ok(out)
}

/// `v_p(g) >= 0` for each of the first `depth` generators of `m`.
pub fn sparing_witness(m: &MonoidSpec, p: &Prime, depth: usize) -> bool {
    m.generators(depth)
        .iter()
        .all(|g| p_adic_valuation(g, p).map(|v| v >= 0).unwrap_or(true))
}
