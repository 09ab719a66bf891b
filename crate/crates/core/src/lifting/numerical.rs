//! Numerical monoids `N ⊆ ℕ₀` seen through their Apéry set with respect to a
//! fixed element `π ∈ N`: `w(r)` is the least element of `N` congruent to `r`
//! modulo `π`. When `π ∈ N`, `n ∈ N` iff `n >= w(n mod π)`; otherwise
//! membership goes through the Apéry set of the least generator.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactnum::mod_inverse;

/// Largest modulus for which the Apéry set is tabulated.
const TABLE_LIMIT: u64 = 1 << 22;

pub struct NumericalMonoid {
    gens: Vec<BigInt>,
    modulus: BigInt,
    table: OnceLock<Option<Vec<u64>>>,
    /// `N` read modulo its least generator, for membership when `π ∉ N`.
    anchored: OnceLock<Box<NumericalMonoid>>,
}

impl Clone for NumericalMonoid {
    fn clone(&self) -> Self {
        NumericalMonoid {
            gens: self.gens.clone(),
            modulus: self.modulus.clone(),
            table: OnceLock::new(),
            anchored: OnceLock::new(),
        }
    }
}

impl PartialEq for NumericalMonoid {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens && self.modulus == other.modulus
    }
}

impl Eq for NumericalMonoid {}

impl fmt::Debug for NumericalMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "⟨")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, "⟩ mod {}", self.modulus)
    }
}

impl NumericalMonoid {
    /// The monoid generated by `gens`, read modulo `modulus`. Generators are
    /// reduced to the minimal generating set. `modulus` need not lie in the
    /// monoid; that is one of the conditions a lifting function must satisfy
    /// and is checked separately.
    pub fn new(gens: impl IntoIterator<Item = BigInt>, modulus: BigInt) -> Result<Self> {
        let mut gens: Vec<BigInt> = gens.into_iter().collect();
        if gens.is_empty() || gens.iter().any(|g| g <= &BigInt::zero()) {
            return Err(Error::Precondition("numerical monoid needs positive generators".into()));
        }
        if modulus <= BigInt::one() {
            return Err(Error::Precondition(format!("modulus {modulus} must exceed 1")));
        }
        gens.sort();
        gens.dedup();
        let gens = minimal_generators(gens)?;
        Ok(NumericalMonoid {
            gens,
            modulus,
            table: OnceLock::new(),
            anchored: OnceLock::new(),
        })
    }

    pub fn naturals(modulus: BigInt) -> Result<Self> {
        Self::new([BigInt::one()], modulus)
    }

    /// Minimal generators, ascending.
    pub fn generators(&self) -> &[BigInt] {
        &self.gens
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// True when the monoid is `modulus·ℕ₀`.
    pub fn is_multiples_of_modulus(&self) -> bool {
        self.gens.len() == 1 && self.gens[0] == self.modulus
    }

    fn gcd(&self) -> BigInt {
        self.gens.iter().fold(BigInt::zero(), |acc, g| acc.gcd(g))
    }

    /// Least element congruent to `r` modulo the modulus, if any.
    pub fn apery(&self, r: &BigInt) -> Result<Option<BigInt>> {
        let m = &self.modulus;
        let r = r.mod_floor(m);
        if r.is_zero() {
            return Ok(Some(BigInt::zero()));
        }
        if !(&r % self.gcd().gcd(m)).is_zero() {
            return Ok(None);
        }
        if !self.gcd().is_one() {
            return self.apery_by_table(&r);
        }
        match self.gens.as_slice() {
            [one] if one.is_one() => Ok(Some(r)),
            [a, b] if a == m || b == m => {
                let g = if a == m { b } else { a };
                let inv = mod_inverse(g, m)
                    .ok_or_else(|| Error::Precondition("generator not invertible mod π".into()))?;
                Ok(Some((r * inv).mod_floor(m) * g))
            }
            [a, b] if &(a + b) == m => {
                // x·a + y·b ≡ (x − y)·a, and lowering x, y together drops by m.
                let inv = mod_inverse(a, m)
                    .ok_or_else(|| Error::Precondition("generator not invertible mod π".into()))?;
                let u = (r * inv).mod_floor(m);
                Ok(Some((&u * a).min((m - &u) * b)))
            }
            _ => self.apery_by_table(&r),
        }
    }

    fn apery_by_table(&self, r: &BigInt) -> Result<Option<BigInt>> {
        let table = self.table.get_or_init(|| self.build_table());
        let table = table.as_ref().ok_or_else(|| {
            Error::ResourceExhausted(format!("Apéry table for modulus {}", self.modulus))
        })?;
        let w = table[r.to_usize().expect("reduced residue")];
        Ok((w != u64::MAX).then(|| BigInt::from(w)))
    }

    fn build_table(&self) -> Option<Vec<u64>> {
        let m = self.modulus.to_u64().filter(|&m| m <= TABLE_LIMIT)?;
        let gens: Vec<u64> = self.gens.iter().map(|g| g.to_u64()).collect::<Option<_>>()?;
        let mut dist = vec![u64::MAX; m as usize];
        dist[0] = 0;
        let mut heap = BinaryHeap::from([Reverse((0u64, 0u64))]);
        while let Some(Reverse((d, r))) = heap.pop() {
            if d > dist[r as usize] {
                continue;
            }
            for &g in &gens {
                let nr = (r + g % m) % m;
                let nd = d.checked_add(g)?;
                if nd < dist[nr as usize] {
                    dist[nr as usize] = nd;
                    heap.push(Reverse((nd, nr)));
                }
            }
        }
        Some(dist)
    }

    fn anchored(&self) -> &NumericalMonoid {
        self.anchored.get_or_init(|| {
            Box::new(NumericalMonoid {
                gens: self.gens.clone(),
                modulus: self.gens[0].clone(),
                table: OnceLock::new(),
                anchored: OnceLock::new(),
            })
        })
    }

    /// Whether the modulus is itself an element, which the Apéry test needs.
    fn modulus_is_member(&self) -> Result<bool> {
        if self.gens.contains(&self.modulus) {
            return Ok(true);
        }
        self.anchored().contains(&self.modulus)
    }

    pub fn contains(&self, n: &BigInt) -> Result<bool> {
        if n < &BigInt::zero() {
            return Ok(false);
        }
        if !self.modulus_is_member()? {
            return self.anchored().contains(n);
        }
        Ok(match self.apery(n)? {
            Some(w) => n >= &w,
            None => false,
        })
    }

    /// A representation `n = Σ c_i·gens[i]`, as multiplicities per generator.
    pub fn represent(&self, n: &BigInt) -> Result<Option<Vec<BigInt>>> {
        if !self.contains(n)? {
            return Ok(None);
        }
        let k = self.gens.len();
        let mut out = vec![BigInt::zero(); k];
        match self.gens.as_slice() {
            [g] => out[0] = n / g,
            [a, b] => {
                // n = x·a + y·b with x the least solution of x·a ≡ n (mod b).
                let d = a.gcd(b);
                let (a1, b1, n1) = (a / &d, b / &d, n / &d);
                let x = if b1.is_one() {
                    BigInt::zero()
                } else {
                    (&n1 * mod_inverse(&a1, &b1).expect("coprime")).mod_floor(&b1)
                };
                let y = (n - &x * a) / b;
                debug_assert!(y >= BigInt::zero());
                out[0] = x;
                out[1] = y;
            }
            _ => {
                let target = n
                    .to_u64()
                    .filter(|&t| t <= TABLE_LIMIT)
                    .ok_or_else(|| Error::ResourceExhausted(format!("representing {n}")))?;
                let gens: Vec<u64> = self.gens.iter().map(|g| g.to_u64().unwrap_or(u64::MAX)).collect();
                let mut last = vec![usize::MAX; target as usize + 1];
                last[0] = 0;
                for v in 1..=target as usize {
                    for (i, &g) in gens.iter().enumerate() {
                        if g as usize <= v && last[v - g as usize] != usize::MAX {
                            last[v] = i;
                            break;
                        }
                    }
                }
                let mut v = target as usize;
                while v > 0 {
                    let i = last[v];
                    out[i] += 1;
                    v -= gens[i] as usize;
                }
            }
        }
        Ok(Some(out))
    }
}

fn minimal_generators(gens: Vec<BigInt>) -> Result<Vec<BigInt>> {
    if gens.len() <= 2 {
        if gens.len() == 2 && (&gens[1] % &gens[0]).is_zero() {
            return Ok(vec![gens[0].clone()]);
        }
        return Ok(gens);
    }
    let limit = gens
        .last()
        .and_then(|g| g.to_u64())
        .filter(|&g| g <= TABLE_LIMIT)
        .ok_or_else(|| Error::ResourceExhausted("minimizing large generator sets".into()))?;
    let small: Vec<u64> = gens.iter().map(|g| g.to_u64().expect("bounded")).collect();
    let mut reach = vec![false; limit as usize + 1];
    reach[0] = true;
    let mut minimal = Vec::new();
    for &g in &small {
        if !reach[g as usize] {
            minimal.push(BigInt::from(g));
            for v in g as usize..reach.len() {
                if reach[v - g as usize] {
                    reach[v] = true;
                }
            }
        }
    }
    Ok(minimal)
}
