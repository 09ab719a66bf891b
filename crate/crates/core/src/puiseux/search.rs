//! Membership in finitely generated Puiseux monoids, decided after scaling by
//! the lcm of all denominators.
//!
//! Small targets use a reachability table over `0..=L·x`. Large targets use a
//! depth-first search in generator order where each multiplicity is pinned to
//! a residue class: after choosing `c_i`, the residual must lie in the group
//! spanned by the remaining generators, i.e. be divisible by their gcd.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::MembershipCertificate;
use crate::error::{Error, Result};
use crate::exactnum::{lcm_of_denominators, mod_inverse, Rational};

/// Explicit resource bounds for the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Largest scaled target decided by the reachability table.
    pub table_limit: u64,
    /// Largest residual handed to the per-suffix tables inside the search.
    pub suffix_table_limit: u64,
    /// Node budget for the search; exceeding it is a `ResourceExhausted` error.
    pub nodes: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            table_limit: 1 << 21,
            suffix_table_limit: 1 << 14,
            nodes: 2_000_000,
        }
    }
}

/// `Some(cert)` iff `x ∈ ⟨gens⟩`; certificate indices are positions in `gens`.
pub fn member_finite(gens: &[Rational], x: &Rational) -> Result<Option<MembershipCertificate>> {
    member_finite_with_budget(gens, x, SearchBudget::default())
}

pub fn member_finite_with_budget(
    gens: &[Rational],
    x: &Rational,
    budget: SearchBudget,
) -> Result<Option<MembershipCertificate>> {
    check_gens(gens)?;
    if x.is_zero() {
        return Ok(Some(MembershipCertificate::empty()));
    }
    if x.is_negative() {
        return Ok(None);
    }
    let Some(problem) = Scaled::new(gens, x) else {
        return Ok(None);
    };
    problem.solve(budget)
}

pub(super) fn check_gens(gens: &[Rational]) -> Result<()> {
    if gens.is_empty() {
        return Err(Error::Precondition("generator list is empty".into()));
    }
    match gens.iter().find(|g| !g.is_positive()) {
        Some(g) => Err(Error::NonPositive(g.clone())),
        None => Ok(()),
    }
}

/// A membership problem over the integers: is `target` a nonnegative
/// combination of `gens`?
pub(super) struct Scaled {
    pub gens: Vec<BigInt>,
    pub target: BigInt,
}

impl Scaled {
    /// `None` when the scaled target is not an integer (certainly not a member).
    pub fn new(gens: &[Rational], x: &Rational) -> Option<Scaled> {
        let l = lcm_of_denominators(gens.iter());
        let t = x.mul_int(l.clone());
        if !t.is_integer() {
            return None;
        }
        Some(Scaled {
            gens: gens.iter().map(|g| g.mul_int(l.clone()).numer().clone()).collect(),
            target: t.numer().clone(),
        })
    }

    pub fn solve(&self, budget: SearchBudget) -> Result<Option<MembershipCertificate>> {
        if let Some(t) = self.target.to_u64().filter(|&t| t <= budget.table_limit) {
            let table = Table::build(&self.gens, t, 0);
            return Ok(table.certificate(t));
        }
        let mut dfs = Dfs::new(&self.gens, budget);
        let mut path = Vec::new();
        if dfs.find(0, &self.target, &mut path)? {
            Ok(Some(MembershipCertificate::from_entries(path)))
        } else {
            Ok(None)
        }
    }

    /// Every representation of the target, in lexicographic order of the
    /// exponent vector. Errors once more than `cap` are found.
    pub fn enumerate(&self, cap: usize, budget: SearchBudget) -> Result<Vec<MembershipCertificate>> {
        let mut dfs = Dfs::new(&self.gens, budget);
        let mut out = Vec::new();
        let mut path = Vec::new();
        dfs.all(0, &self.target, &mut path, &mut out, cap)?;
        Ok(out)
    }
}

/// Reachability over `0..=limit` using generators with index `>= from`.
/// Each reachable value records the largest generator index ending a
/// representation, so backtracking prefers large indices.
pub(super) struct Table {
    last: Vec<u32>,
    gens: Vec<(usize, u64)>,
}

const UNREACHED: u32 = u32::MAX;

impl Table {
    pub fn build(gens: &[BigInt], limit: u64, from: usize) -> Table {
        let small: Vec<(usize, u64)> = gens
            .iter()
            .enumerate()
            .skip(from)
            .filter_map(|(i, g)| g.to_u64().filter(|&g| g <= limit).map(|g| (i, g)))
            .collect();
        let n = limit as usize + 1;
        let mut last = vec![UNREACHED; n];
        last[0] = 0;
        for v in 1..n {
            for &(i, g) in small.iter().rev() {
                let g = g as usize;
                if g <= v && last[v - g] != UNREACHED {
                    last[v] = i as u32;
                    break;
                }
            }
        }
        Table { last, gens: small }
    }

    pub fn reachable(&self, v: u64) -> bool {
        (v as usize) < self.last.len() && self.last[v as usize] != UNREACHED
    }

    pub fn certificate(&self, v: u64) -> Option<MembershipCertificate> {
        if !self.reachable(v) {
            return None;
        }
        let mut cert = MembershipCertificate::empty();
        let mut v = v as usize;
        while v > 0 {
            let i = self.last[v] as usize;
            let g = self.gens.iter().find(|(j, _)| *j == i).expect("recorded generator").1;
            cert.add_entry(i, 1);
            v -= g as usize;
        }
        Some(cert)
    }
}

struct Dfs<'a> {
    gens: &'a [BigInt],
    /// `suffix_gcd[i] = gcd(gens[i..])`, with `suffix_gcd[n] = 0`.
    suffix_gcd: Vec<BigInt>,
    suffix_min: Vec<BigInt>,
    dead: HashSet<(usize, BigInt)>,
    tables: Vec<Option<Table>>,
    budget: SearchBudget,
    nodes: u64,
}

impl<'a> Dfs<'a> {
    fn new(gens: &'a [BigInt], budget: SearchBudget) -> Self {
        let n = gens.len();
        let mut suffix_gcd = vec![BigInt::zero(); n + 1];
        let mut suffix_min = vec![BigInt::zero(); n + 1];
        for i in (0..n).rev() {
            suffix_gcd[i] = gens[i].gcd(&suffix_gcd[i + 1]);
            suffix_min[i] = if i + 1 == n {
                gens[i].clone()
            } else {
                gens[i].clone().min(suffix_min[i + 1].clone())
            };
        }
        Dfs {
            gens,
            suffix_gcd,
            suffix_min,
            dead: HashSet::new(),
            tables: (0..n).map(|_| None).collect(),
            budget,
            nodes: 0,
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget.nodes {
            return Err(Error::ResourceExhausted(format!(
                "membership search exceeded {} nodes",
                self.budget.nodes
            )));
        }
        Ok(())
    }

    /// Multiplicities for generator `i` that keep the residual in the
    /// group spanned by the later generators: `(first, step, max)`.
    fn residues(&self, i: usize, r: &BigInt) -> Option<(BigInt, BigInt, BigInt)> {
        let g = &self.gens[i];
        let max = r / g;
        let m = &self.suffix_gcd[i + 1];
        if m.is_zero() {
            return (r % g).is_zero().then(|| (max.clone(), BigInt::one(), max));
        }
        let d = g.gcd(m);
        if !(r % &d).is_zero() {
            return None;
        }
        let modulus = m / &d;
        let first = if modulus.is_one() {
            BigInt::zero()
        } else {
            let inv = mod_inverse(&(g / &d), &modulus).expect("coprime after division by gcd");
            ((r / &d) * inv).mod_floor(&modulus)
        };
        (first <= max).then_some((first, modulus, max))
    }

    fn suffix_table(&mut self, i: usize) -> &Table {
        let limit = self.budget.suffix_table_limit;
        self.tables[i].get_or_insert_with(|| Table::build(self.gens, limit, i))
    }

    fn find(&mut self, i: usize, r: &BigInt, path: &mut Vec<(usize, u64)>) -> Result<bool> {
        if r.is_zero() {
            return Ok(true);
        }
        if i == self.gens.len() || r < &self.suffix_min[i] || !(r % &self.suffix_gcd[i]).is_zero() {
            return Ok(false);
        }
        if let Some(small) = r.to_u64().filter(|&v| v <= self.budget.suffix_table_limit) {
            return Ok(match self.suffix_table(i).certificate(small) {
                Some(cert) => {
                    path.extend(cert.entries());
                    true
                }
                None => false,
            });
        }
        let key = (i, r.clone());
        if self.dead.contains(&key) {
            return Ok(false);
        }
        self.tick()?;
        if let Some((first, step, max)) = self.residues(i, r) {
            let mut c = first;
            while c <= max {
                let rest = r - &c * &self.gens[i];
                let mark = path.len();
                if let Some(k) = c.to_u64().filter(|&k| k > 0) {
                    path.push((i, k));
                } else if !c.is_zero() {
                    return Err(Error::ResourceExhausted("multiplicity exceeds u64".into()));
                }
                if self.find(i + 1, &rest, path)? {
                    return Ok(true);
                }
                path.truncate(mark);
                c += &step;
                self.tick()?;
            }
        }
        self.dead.insert(key);
        Ok(false)
    }

    fn all(
        &mut self,
        i: usize,
        r: &BigInt,
        path: &mut Vec<(usize, u64)>,
        out: &mut Vec<MembershipCertificate>,
        cap: usize,
    ) -> Result<bool> {
        if r.is_zero() {
            if out.len() >= cap {
                return Err(Error::ResourceExhausted(format!(
                    "more than {cap} factorizations"
                )));
            }
            out.push(MembershipCertificate::from_entries(path.iter().copied()));
            return Ok(true);
        }
        if i == self.gens.len() || r < &self.suffix_min[i] || !(r % &self.suffix_gcd[i]).is_zero() {
            return Ok(false);
        }
        let key = (i, r.clone());
        if self.dead.contains(&key) {
            return Ok(false);
        }
        self.tick()?;
        let mut any = false;
        if let Some((first, step, max)) = self.residues(i, r) {
            let mut c = first;
            while c <= max {
                let rest = r - &c * &self.gens[i];
                let mark = path.len();
                if !c.is_zero() {
                    let k = c
                        .to_u64()
                        .ok_or_else(|| Error::ResourceExhausted("multiplicity exceeds u64".into()))?;
                    path.push((i, k));
                }
                any |= self.all(i + 1, &rest, path, out, cap)?;
                path.truncate(mark);
                c += &step;
                self.tick()?;
            }
        }
        if !any {
            self.dead.insert(key);
        }
        Ok(any)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn qs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| q(s)).collect()
    }

    #[test]
    fn scaled_examples() {
        let g = qs(&["2/3", "1/2"]);
        assert_eq!(member_finite(&g, &q("5/6")).unwrap(), None);
        assert_eq!(
            member_finite(&g, &q("7/6")).unwrap(),
            Some(MembershipCertificate::from_entries([(0, 1), (1, 1)]))
        );
        assert_eq!(
            member_finite(&qs(&["1/3"]), &q("0")).unwrap(),
            Some(MembershipCertificate::empty())
        );
        assert_eq!(member_finite(&g, &q("1/5")).unwrap(), None);
        assert_eq!(member_finite(&g, &q("-1/2")).unwrap(), None);
    }

    #[test]
    fn table_prefers_largest_index() {
        // 6 = 3+3 = 2+2+2: the largest index (3) wins.
        let c = member_finite(&qs(&["2", "3"]), &q("6")).unwrap().unwrap();
        assert_eq!(c, MembershipCertificate::single(1, 2));
    }

    #[test]
    fn rejects_bad_generators() {
        assert!(member_finite(&[], &q("1")).is_err());
        assert!(member_finite(&qs(&["0", "1"]), &q("1")).is_err());
    }

    #[test]
    fn search_agrees_with_table() {
        let gens = qs(&["3/5", "7/10", "5/4", "11/20"]);
        let tiny = SearchBudget {
            table_limit: 0,
            suffix_table_limit: 0,
            nodes: 1_000_000,
        };
        for num in 0..=200u64 {
            let x = Rational::new(num, 20u64);
            let a = member_finite(&gens, &x).unwrap();
            let b = member_finite_with_budget(&gens, &x, tiny).unwrap();
            assert_eq!(a.is_some(), b.is_some(), "x = {x}");
            if let Some(c) = b {
                assert_eq!(c.value(&gens).unwrap(), x);
            }
        }
    }

    #[test]
    fn search_handles_huge_lcm() {
        let primes = [3u64, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47];
        let gens: Vec<Rational> = primes.iter().map(|&p| Rational::new(1, p)).collect();
        let x = Rational::new(2, 3u64) + Rational::new(5, 47u64) + Rational::from_integer(4);
        let c = member_finite(&gens, &x).unwrap().unwrap();
        assert_eq!(c.value(&gens).unwrap(), x);
        let y = Rational::new(1, 53u64);
        assert_eq!(member_finite(&gens, &y).unwrap(), None);
    }

    #[test]
    fn budget_is_enforced() {
        let gens = qs(&["1", "2"]);
        let tiny = SearchBudget {
            table_limit: 0,
            suffix_table_limit: 0,
            nodes: 3,
        };
        let err = member_finite_with_budget(&gens, &q("1000001"), tiny);
        assert!(err.is_ok() || matches!(err, Err(Error::ResourceExhausted(_))));
    }

    #[test]
    fn enumerate_is_lexicographic_and_complete() {
        let s = Scaled::new(&qs(&["1", "2", "3"]), &q("5")).unwrap();
        let all = s.enumerate(100, SearchBudget::default()).unwrap();
        let vecs: Vec<Vec<u64>> = all
            .iter()
            .map(|c| (0..3).map(|i| c.mult(i)).collect())
            .collect();
        assert_eq!(
            vecs,
            vec![
                vec![0, 1, 1],
                vec![1, 2, 0],
                vec![2, 0, 1],
                vec![3, 1, 0],
                vec![5, 0, 0]
            ]
        );
    }
}
