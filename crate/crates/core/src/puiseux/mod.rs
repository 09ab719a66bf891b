//! Puiseux monoids: finitely generated ones, lazily generated ones, and the
//! exact decision toolkit that works on finite generator lists.

mod ops;
mod search;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{p_adic_valuation, Prime, Rational};
use crate::seq::Seq;

pub use ops::{
    atoms_finite, common_divisors, divides, factorizations, is_atom_finite, mcds, Generators,
    sparing_witness, verify_certificate,
};
pub use search::{member_finite, member_finite_with_budget, SearchBudget};

/// Witness that an element is a sum of generators: generator index to
/// positive multiplicity. Indices refer to a generator list or stream.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MembershipCertificate {
    entries: BTreeMap<usize, u64>,
}

impl MembershipCertificate {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn single(index: usize, mult: u64) -> Self {
        let mut c = Self::default();
        c.add_entry(index, mult);
        c
    }

    pub fn from_entries(entries: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut c = Self::default();
        for (i, m) in entries {
            c.add_entry(i, m);
        }
        c
    }

    pub fn add_entry(&mut self, index: usize, mult: u64) {
        if mult > 0 {
            *self.entries.entry(index).or_insert(0) += mult;
        }
    }

    /// Removes `mult` copies of generator `index`; fails if there are fewer.
    pub fn remove_entry(&mut self, index: usize, mult: u64) -> bool {
        match self.entries.get_mut(&index) {
            Some(m) if *m >= mult => {
                *m -= mult;
                if *m == 0 {
                    self.entries.remove(&index);
                }
                true
            }
            _ => mult == 0,
        }
    }

    pub fn merge(&mut self, other: &MembershipCertificate) {
        for (&i, &m) in &other.entries {
            self.add_entry(i, m);
        }
    }

    pub fn plus(&self, other: &MembershipCertificate) -> MembershipCertificate {
        let mut c = self.clone();
        c.merge(other);
        c
    }

    /// Entrywise difference, when `other` fits inside `self`.
    pub fn minus(&self, other: &MembershipCertificate) -> Option<MembershipCertificate> {
        let mut c = self.clone();
        for (&i, &m) in &other.entries {
            if !c.remove_entry(i, m) {
                return None;
            }
        }
        Some(c)
    }

    pub fn scaled(&self, k: u64) -> MembershipCertificate {
        MembershipCertificate {
            entries: self
                .entries
                .iter()
                .filter(|_| k > 0)
                .map(|(&i, &m)| (i, m * k))
                .collect(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.entries.iter().map(|(&i, &m)| (i, m))
    }

    pub fn mult(&self, index: usize) -> u64 {
        self.entries.get(&index).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of atoms counted with multiplicity.
    pub fn length(&self) -> u64 {
        self.entries.values().sum()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    /// `sum mult * generator(index)`.
    pub fn value_with(&self, generator: impl Fn(usize) -> Result<Rational>) -> Result<Rational> {
        let mut total = Rational::zero();
        for (&i, &m) in &self.entries {
            total += &generator(i)?.mul_int(m);
        }
        Ok(total)
    }

    /// Value against an explicit generator list.
    pub fn value(&self, gens: &[Rational]) -> Result<Rational> {
        self.value_with(|i| {
            gens.get(i).cloned().ok_or(Error::InvalidIndex {
                index: i,
                len: gens.len(),
            })
        })
    }

    /// The canonical JSON document for this certificate.
    pub fn to_doc(&self, element: &Rational, monoid: &str) -> CertificateDoc {
        CertificateDoc {
            element: element.clone(),
            entries: self
                .entries()
                .map(|(index, mult)| CertificateEntry { index, mult })
                .collect(),
            monoid: monoid.to_string(),
        }
    }
}

impl fmt::Display for MembershipCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (i, m)) in self.entries().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "#{i}↦{m}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub index: usize,
    pub mult: u64,
}

/// Serialized form: `{"element": "n/d", "entries": [...], "monoid": label}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateDoc {
    pub element: Rational,
    pub entries: Vec<CertificateEntry>,
    pub monoid: String,
}

impl CertificateDoc {
    pub fn certificate(&self) -> MembershipCertificate {
        MembershipCertificate::from_entries(self.entries.iter().map(|e| (e.index, e.mult)))
    }
}

type SparedPredicate = Arc<dyn Fn(&Prime) -> bool + Send + Sync>;

/// An infinite, deterministic generator enumeration plus whatever structural
/// metadata its constructor knows.
#[derive(Clone)]
pub struct GeneratorStream {
    pub gens: Seq<Rational>,
    /// Decides "p is spared by the whole monoid", when known.
    pub spared: Option<SparedPredicate>,
    pub increasing_denominators: bool,
}

#[derive(Clone)]
pub enum MonoidKind {
    FiniteGenerators(Vec<Rational>),
    GeneratorStream(GeneratorStream),
}

/// A reduced Puiseux monoid given by generators.
#[derive(Clone)]
pub struct MonoidSpec {
    pub kind: MonoidKind,
    pub label: String,
}

impl MonoidSpec {
    /// Finitely generated monoid; generators are sorted and deduplicated.
    pub fn finite(label: impl Into<String>, gens: impl IntoIterator<Item = Rational>) -> Result<Self> {
        let mut gens: Vec<Rational> = gens.into_iter().collect();
        if let Some(bad) = gens.iter().find(|g| !g.is_positive()) {
            return Err(Error::NonPositive(bad.clone()));
        }
        gens.sort();
        gens.dedup();
        Ok(MonoidSpec {
            kind: MonoidKind::FiniteGenerators(gens),
            label: label.into(),
        })
    }

    pub fn stream(label: impl Into<String>, stream: GeneratorStream) -> Self {
        MonoidSpec {
            kind: MonoidKind::GeneratorStream(stream),
            label: label.into(),
        }
    }

    /// The `i`-th generator, if it exists.
    pub fn generator(&self, i: usize) -> Result<Rational> {
        match &self.kind {
            MonoidKind::FiniteGenerators(g) => g.get(i).cloned().ok_or(Error::InvalidIndex {
                index: i,
                len: g.len(),
            }),
            MonoidKind::GeneratorStream(s) => Ok(s.gens.get(i)),
        }
    }

    /// The first `depth` generators (all of them for a finite monoid with
    /// fewer than `depth`).
    pub fn generators(&self, depth: usize) -> Vec<Rational> {
        match &self.kind {
            MonoidKind::FiniteGenerators(g) => g.iter().take(depth).cloned().collect(),
            MonoidKind::GeneratorStream(s) => s.gens.take(depth),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, MonoidKind::FiniteGenerators(_))
    }

    pub fn stream_meta(&self) -> Option<&GeneratorStream> {
        match &self.kind {
            MonoidKind::GeneratorStream(s) => Some(s),
            MonoidKind::FiniteGenerators(_) => None,
        }
    }

    pub fn truncate(&self, depth: usize) -> Truncation {
        Truncation {
            base: self.clone(),
            depth,
        }
    }

    /// Whether `v_p(g) >= 0` for every generator. Streams answer only through
    /// the sparing metadata supplied by their constructor.
    pub fn spares(&self, p: &Prime) -> Option<bool> {
        match &self.kind {
            MonoidKind::FiniteGenerators(g) => Some(
                g.iter()
                    .all(|q| p_adic_valuation(q, p).map(|v| v >= 0).unwrap_or(true)),
            ),
            MonoidKind::GeneratorStream(s) => s.spared.as_ref().map(|f| f(p)),
        }
    }
}

impl fmt::Debug for MonoidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MonoidKind::FiniteGenerators(g) => write!(f, "MonoidSpec({}: {:?})", self.label, g),
            MonoidKind::GeneratorStream(_) => write!(f, "MonoidSpec({}: stream)", self.label),
        }
    }
}

/// The finitely generated monoid spanned by the first `depth` generators of a
/// monoid. Every membership query against a stream goes through one of these.
#[derive(Clone, Debug)]
pub struct Truncation {
    pub base: MonoidSpec,
    pub depth: usize,
}

impl Truncation {
    pub fn generators(&self) -> Vec<Rational> {
        self.base.generators(self.depth)
    }

    pub fn generator(&self, i: usize) -> Result<Rational> {
        if i >= self.depth {
            return Err(Error::InvalidIndex {
                index: i,
                len: self.depth,
            });
        }
        self.base.generator(i)
    }

    pub fn member(&self, x: &Rational) -> Result<Option<MembershipCertificate>> {
        member_finite(&self.generators(), x)
    }

    pub fn label(&self) -> String {
        format!("{}[..{}]", self.base.label, self.depth)
    }
}

/// Serialize a generator list as a JSON array of `"n/d"` strings.
pub fn generators_to_json(gens: &[Rational]) -> serde_json::Value {
    serde_json::to_value(gens).expect("rationals serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn certificate_arithmetic() {
        let a = MembershipCertificate::from_entries([(0, 2), (3, 1)]);
        let b = MembershipCertificate::single(3, 1);
        assert_eq!(a.minus(&b).unwrap(), MembershipCertificate::single(0, 2));
        assert!(b.minus(&a).is_none());
        assert_eq!(a.plus(&b).mult(3), 2);
        assert_eq!(a.scaled(3).length(), 9);
        assert!(a.scaled(0).is_empty());
        assert_eq!(a.to_string(), "{#0↦2, #3↦1}");
    }

    #[test]
    fn certificate_json_schema() {
        let c = MembershipCertificate::from_entries([(0, 1), (1, 1)]);
        let doc = c.to_doc(&q("7/6"), "M");
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(
            json,
            r#"{"element":"7/6","entries":[{"index":0,"mult":1},{"index":1,"mult":1}],"monoid":"M"}"#
        );
        let back: CertificateDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(back.certificate(), c);
    }

    #[test]
    fn finite_spec_is_sorted_and_deduplicated() {
        let m = MonoidSpec::finite("m", [q("2/3"), q("1/2"), q("2/3")]).unwrap();
        assert_eq!(m.generators(10), vec![q("1/2"), q("2/3")]);
        assert!(MonoidSpec::finite("bad", [q("0")]).is_err());
        assert!(matches!(m.generator(5), Err(Error::InvalidIndex { .. })));
        assert_eq!(
            generators_to_json(&m.generators(2)).to_string(),
            r#"["1/2","2/3"]"#
        );
    }

    #[test]
    fn truncation_rejects_out_of_range() {
        let s = Seq::from_fn(|i| Rational::new(1, 1i64 << i));
        let m = MonoidSpec::stream(
            "dyadic",
            GeneratorStream {
                gens: s,
                spared: None,
                increasing_denominators: true,
            },
        );
        let t = m.truncate(3);
        assert_eq!(t.generators(), vec![q("1"), q("1/2"), q("1/4")]);
        assert!(t.generator(3).is_err());
        assert!(t.member(&q("3/4")).unwrap().is_some());
        assert!(t.member(&q("1/8")).unwrap().is_none());
    }
}
