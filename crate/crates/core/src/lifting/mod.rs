//! The lifting construction. A lifting function attaches to each `s` in a
//! subset `S` of a monoid `M` a prime `π(s)` and a numerical monoid `N_s ∋ π(s)`;
//! the lifted monoid `M_φ` is generated by `M` together with every
//! `M_s = (s/π(s))·N_s`.

mod checks;
mod decompose;
pub mod examples;
mod numerical;
pub mod sampling;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::exactnum::{p_adic_valuation, Prime, Rational};
use crate::puiseux::{verify_certificate, GeneratorStream, MembershipCertificate, MonoidSpec};
use crate::report::{Report, Status};
use crate::seq::Seq;

pub use checks::{
    accp_chain_probe, classify_atom, kmcd_transfer_check, AtomClass, ChainProbe, ChainStep,
};
pub use decompose::{
    canonical_decomposition, check_projection_divisibility, complementary_projection,
    decode_decomposition, is_ms_projection, CanonicalDecomposition, Decoded, Part, ProjectionCheck,
};
pub use numerical::NumericalMonoid;

/// One element of `S` with its lifting data.
#[derive(Clone, Debug)]
pub struct SElement {
    pub value: Rational,
    pub pi: Prime,
    pub n: NumericalMonoid,
    /// `value` as a sum of base generators.
    pub base_cert: MembershipCertificate,
}

impl SElement {
    /// `N_s = π(s)·ℕ₀` gives `M_s = s·ℕ₀`, which changes nothing; such
    /// elements are treated as absent from `S`.
    pub fn active(&self) -> bool {
        !self.n.is_multiples_of_modulus()
    }

    /// `s / π(s)`.
    pub fn unit(&self) -> Rational {
        self.value.div_int(self.pi.to_bigint())
    }

    /// The `t`-th generator of `M_s`.
    pub fn lifted_generator(&self, t: usize) -> Rational {
        self.unit().mul_int(self.n.generators()[t].clone())
    }

    /// `(π/s)·x`, when it is an integer.
    pub fn n_coordinate(&self, x: &Rational) -> Option<BigInt> {
        let y = x.mul_int(self.pi.to_bigint()) / &self.value;
        y.is_integer().then(|| y.numer().clone())
    }
}

/// Answer of a base-monoid decider.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseVerdict {
    Member(MembershipCertificate),
    NonMember(String),
    Unknown(String),
}

/// Structural knowledge about the base monoid `M`: membership, atoms, and
/// identities between generators. Certificates index the base generators.
pub trait BaseOracle: Send + Sync {
    fn member(&self, x: &Rational) -> Result<BaseVerdict>;

    /// `Some(true/false)` when atom-ness of `x` in `M` is decided.
    fn is_atom(&self, x: &Rational) -> Result<Option<bool>>;

    /// Pairs of generator multisets with equal sums.
    fn relations(&self, depth: usize) -> Vec<(MembershipCertificate, MembershipCertificate)>;

    /// `d` with every prime that divides some generator denominator removed.
    fn strip_denominator(&self, d: &BigInt) -> BigInt;
}

type IndexMap = Arc<dyn Fn(usize) -> Option<usize> + Send + Sync>;
type Locator = Arc<dyn Fn(&Rational) -> Option<usize> + Send + Sync>;

#[derive(Clone)]
pub struct LiftingFunction {
    pub label: String,
    pub base: MonoidSpec,
    pub s: Seq<SElement>,
    /// Base generator index to the `S`-index carrying the same value.
    pub base_in_s: IndexMap,
    /// The `S`-index of a rational, if it lies in `S`.
    pub locate: Locator,
    pub oracle: Arc<dyn BaseOracle>,
    /// `π(s_j)` strictly increases with `j`.
    pub pi_increasing: bool,
}

impl fmt::Debug for LiftingFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiftingFunction({})", self.label)
    }
}

impl LiftingFunction {
    pub fn s_element(&self, j: usize) -> SElement {
        self.s.get(j)
    }

    /// The active `S`-index whose value is `x`.
    pub fn s_index_of(&self, x: &Rational) -> Option<usize> {
        (self.locate)(x).filter(|&j| self.s.get(j).active())
    }

    /// The active `S`-index for base generator `i`.
    pub fn active_s_of_base(&self, i: usize) -> Option<usize> {
        (self.base_in_s)(i).filter(|&j| self.s.get(j).active())
    }

    /// No `S`-index has `π = p`, as far as the first `depth` indices show.
    pub fn excludes_pi(&self, p: &BigInt, depth: usize) -> bool {
        if !self.pi_increasing || depth == 0 {
            return false;
        }
        let last = self.s.get(depth - 1).pi.to_bigint();
        p < &last && (0..depth).all(|j| &self.s.get(j).pi.to_bigint() != p)
    }
}

/// Checks the lifting-function conditions on the first `depth` indices of
/// `S` and of the base generators.
pub fn validate_lifting_function(phi: &LiftingFunction, depth: usize) -> Report {
    let mut report = Report::new(format!("lifting function {} on {depth} indices", phi.label));
    let base_gens = phi.base.generators(depth);
    let mut seen_pi: HashMap<Prime, usize> = HashMap::new();
    let mut seen_value: HashMap<Rational, usize> = HashMap::new();
    for j in 0..depth {
        let s = phi.s.get(j);
        if !s.value.is_positive() {
            report.flag(Status::Violation, json!({"condition": "s-positive", "index": j}));
            continue;
        }
        if let Some(&i) = seen_value.get(&s.value) {
            report.flag(Status::Violation, json!({"condition": "s-distinct", "indices": [i, j]}));
        }
        seen_value.insert(s.value.clone(), j);
        match verify_certificate(&phi.base, &s.value, &s.base_cert) {
            Ok(true) => {}
            _ => report.flag(
                Status::Violation,
                json!({"condition": "s-in-base", "index": j, "s": s.value}),
            ),
        }
        if !s.active() {
            report.witness(json!({"condition": "normalized-out", "index": j, "s": s.value}));
            continue;
        }
        if let Some(&i) = seen_pi.get(&s.pi) {
            report.flag(
                Status::Violation,
                json!({"condition": "pi-injective", "indices": [i, j], "prime": s.pi}),
            );
        }
        seen_pi.insert(s.pi.clone(), j);
        if p_adic_valuation(&s.value, &s.pi).map(|v| v != 0).unwrap_or(true) {
            report.flag(
                Status::Violation,
                json!({"condition": "pi-coprime-to-s", "index": j, "prime": s.pi}),
            );
        }
        if let Some((g, _)) = base_gens
            .iter()
            .enumerate()
            .find(|(_, g)| p_adic_valuation(g, &s.pi).map(|v| v < 0).unwrap_or(false))
        {
            report.flag(
                Status::Violation,
                json!({"condition": "pi-spares-base", "index": j, "prime": s.pi, "generator": g}),
            );
        }
        match s.n.contains(&s.pi.to_bigint()) {
            Ok(true) => {}
            _ => report.flag(
                Status::Violation,
                json!({"condition": "pi-in-n", "index": j, "prime": s.pi}),
            ),
        }
    }
    report
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// A base generator outside `S`.
    Base(usize),
    /// The `n_index`-th generator of `M_s` for the `S`-index `s`.
    Lift { s: usize, n_index: usize },
}

#[derive(Clone, Debug)]
pub struct LiftedGen {
    pub value: Rational,
    pub source: Source,
    pos: (usize, usize),
}

/// `M_φ` with a deterministic, duplicate-free generator enumeration. Row 0
/// holds base generators outside `S`; row `j + 1` holds the generators of
/// `M_{s_j}`. Rows are interleaved along anti-diagonals.
#[derive(Clone)]
pub struct LiftedMonoid {
    pub phi: LiftingFunction,
    gens: Seq<LiftedGen>,
}

impl fmt::Debug for LiftedMonoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LiftedMonoid({})", self.phi.label)
    }
}

fn position_exists(phi: &LiftingFunction, (row, col): (usize, usize)) -> Option<(Rational, Source)> {
    if row == 0 {
        let g = phi.base.generator(col).ok()?;
        return phi
            .active_s_of_base(col)
            .is_none()
            .then_some((g, Source::Base(col)));
    }
    let s = phi.s.get(row - 1);
    (s.active() && col < s.n.generators().len()).then(|| {
        (
            s.lifted_generator(col),
            Source::Lift {
                s: row - 1,
                n_index: col,
            },
        )
    })
}

fn next_position((row, col): (usize, usize)) -> (usize, usize) {
    if col > 0 {
        (row + 1, col - 1)
    } else {
        (0, row + 1)
    }
}

impl LiftedMonoid {
    /// Builds the lifted monoid after validating `phi` on `validate_depth`
    /// indices.
    pub fn new(phi: LiftingFunction, validate_depth: usize) -> Result<Self> {
        let report = validate_lifting_function(&phi, validate_depth);
        if report.status == Status::Violation {
            return Err(Error::InvariantViolation(format!(
                "invalid lifting function {}: {}",
                phi.label,
                serde_json::to_string(&report.witnesses).unwrap_or_default()
            )));
        }
        let p = phi.clone();
        let gens = Seq::recursive(move |_, prev: &[LiftedGen]| {
            let mut pos = prev.last().map(|g| next_position(g.pos)).unwrap_or((0, 0));
            loop {
                if let Some((value, source)) = position_exists(&p, pos) {
                    if !prev.iter().any(|g| g.value == value) {
                        return LiftedGen { value, source, pos };
                    }
                }
                pos = next_position(pos);
            }
        });
        Ok(LiftedMonoid { phi, gens })
    }

    pub fn label(&self) -> String {
        format!("{} lifted", self.phi.label)
    }

    pub fn generator(&self, i: usize) -> LiftedGen {
        self.gens.get(i)
    }

    pub fn generators(&self, depth: usize) -> Vec<Rational> {
        self.gens.take(depth).into_iter().map(|g| g.value).collect()
    }

    /// The lifted generators as a [`MonoidSpec`] stream.
    pub fn spec(&self) -> MonoidSpec {
        let gens = self.gens.clone();
        MonoidSpec::stream(
            self.label(),
            GeneratorStream {
                gens: Seq::from_fn(move |i| gens.get(i).value),
                spared: None,
                increasing_denominators: false,
            },
        )
    }

    /// The stream index of the generator coming from `source`.
    pub fn index_of(&self, source: Source) -> Result<usize> {
        let (pos, value) = match source {
            Source::Base(i) => ((0, i), self.phi.base.generator(i)?),
            Source::Lift { s, n_index } => {
                let e = self.phi.s.get(s);
                if n_index >= e.n.generators().len() {
                    return Err(Error::InvalidIndex {
                        index: n_index,
                        len: e.n.generators().len(),
                    });
                }
                ((s + 1, n_index), e.lifted_generator(n_index))
            }
        };
        let key = |p: (usize, usize)| (p.0 + p.1, p.0);
        let mut i = 0;
        loop {
            let g = self.gens.get(i);
            if g.value == value {
                return Ok(i);
            }
            if key(g.pos) > key(pos) {
                return Err(Error::InvariantViolation(format!("{source:?} is not a lifted generator")));
            }
            i += 1;
        }
    }

    /// Rewrites a certificate over base generators into one over lifted
    /// generators: base generators in `S` become `π(s)` expressed in `N_s`.
    pub fn lift_base_certificate(&self, cert: &MembershipCertificate) -> Result<MembershipCertificate> {
        let mut out = MembershipCertificate::empty();
        for (i, m) in cert.entries() {
            match self.phi.active_s_of_base(i) {
                None => out.add_entry(self.index_of(Source::Base(i))?, m),
                Some(j) => {
                    let s = self.phi.s.get(j);
                    let pi = s.pi.to_bigint();
                    out.merge(&self.n_certificate(j, &(pi * m))?);
                }
            }
        }
        Ok(out)
    }

    /// `(s_j/π)·n` as a certificate over lifted generators.
    pub fn n_certificate(&self, j: usize, n: &BigInt) -> Result<MembershipCertificate> {
        let s = self.phi.s.get(j);
        let rep = s.n.represent(n)?.ok_or_else(|| {
            Error::InvariantViolation(format!("{n} is not in N for S-index {j}"))
        })?;
        let mut out = MembershipCertificate::empty();
        for (t, c) in rep.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = u64::try_from(c)
                .map_err(|_| Error::ResourceExhausted(format!("multiplicity {c} exceeds u64")))?;
            out.add_entry(self.index_of(Source::Lift { s: j, n_index: t })?, c);
        }
        Ok(out)
    }

    /// A certificate for `x` over lifted generators, if the decoder finds one.
    pub fn certify(&self, x: &Rational, depth: usize) -> Result<Option<MembershipCertificate>> {
        match decode_decomposition(self, x, depth)? {
            Decoded::Decomposed(d) => Ok(Some(d.lifted_certificate(self)?)),
            _ => Ok(None),
        }
    }

    pub fn verify(&self, x: &Rational, cert: &MembershipCertificate) -> bool {
        cert.value_with(|i| Ok(self.gens.get(i).value))
            .map(|v| &v == x)
            .unwrap_or(false)
    }
}

#[cfg(test)]
mod tests {
    use super::examples::{grams, grams_with};
    use super::*;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    #[test]
    fn grams_stream_starts_as_expected() {
        let m = LiftedMonoid::new(grams(), 8).unwrap();
        assert_eq!(
            m.generators(4),
            vec![q("1/3"), q("1/10"), q("1/28"), q("1/88")]
        );
        assert_eq!(m.generator(2).source, Source::Lift { s: 2, n_index: 0 });
        assert_eq!(m.index_of(Source::Lift { s: 5, n_index: 0 }).unwrap(), 5);
    }

    #[test]
    fn validation_examples() {
        assert!(validate_lifting_function(&grams(), 5).is_ok());
        let bad = grams_with(|j| if j < 2 { 3 } else { 0 });
        let r = validate_lifting_function(&bad, 5);
        assert_eq!(r.status, Status::Violation);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w["condition"] == "pi-injective" && w["indices"] == json!([0, 1])));
        let two = grams_with(|j| if j == 1 { 2 } else { 0 });
        let r = validate_lifting_function(&two, 5);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w["condition"] == "pi-spares-base" && w["prime"] == json!(2)));
        assert!(LiftedMonoid::new(two, 5).is_err());
    }

    #[test]
    fn base_certificates_lift() {
        let m = LiftedMonoid::new(grams(), 8).unwrap();
        // 1/2 is base generator 1; in M_φ it is 5 copies of 1/10.
        let c = m.lift_base_certificate(&MembershipCertificate::single(1, 1)).unwrap();
        assert_eq!(c, MembershipCertificate::single(1, 5));
        assert!(m.verify(&q("1/2"), &c));
    }
}
