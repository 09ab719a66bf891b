//! Monoid algebras `F[M]` over `ℚ` or a prime field, with exponents in a
//! Puiseux monoid. Every exponent carries a membership certificate.

mod factor;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use crate::counterexample::{main_monoid, membership_m, CounterexampleParams, Verdict};
use crate::error::{Error, Result};
use crate::exactnum::{mod_inverse, Prime, Rational};
use crate::lifting::{decode_decomposition, Decoded, LiftedMonoid};
use crate::puiseux::{verify_certificate, MembershipCertificate, MonoidSpec};

pub use factor::{
    bounded_factor_search, descent_chain, divide_exact, furstenberg_divisor, irreducible_within,
    random_small_polynomial, FactorBounds, FurstenbergDivisor,
};

/// Coefficient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldSpec {
    Rationals,
    PrimeField(Prime),
}

impl FieldSpec {
    pub fn prime_field(p: u64) -> Result<Self> {
        Ok(FieldSpec::PrimeField(Prime::new(BigUint::from(p))?))
    }

    /// Canonical representative: itself over `ℚ`, the residue in `[0, p)`
    /// over `F_p`.
    pub fn element(&self, x: &Rational) -> Result<Rational> {
        match self {
            FieldSpec::Rationals => Ok(x.clone()),
            FieldSpec::PrimeField(p) => {
                let p = p.to_bigint();
                let inv = mod_inverse(x.denom(), &p)
                    .ok_or_else(|| Error::Precondition(format!("{x} has no image in F_{p}")))?;
                Ok(Rational::from_integer((x.numer() * inv).mod_floor(&p)))
            }
        }
    }

    fn reduce(&self, x: Rational) -> Rational {
        self.element(&x).expect("field operations stay in the field")
    }

    pub fn add(&self, a: &Rational, b: &Rational) -> Rational {
        self.reduce(a + b)
    }

    pub fn mul(&self, a: &Rational, b: &Rational) -> Rational {
        self.reduce(a * b)
    }

    pub fn neg(&self, a: &Rational) -> Rational {
        self.reduce(-a)
    }

    pub fn inv(&self, a: &Rational) -> Result<Rational> {
        if a.is_zero() {
            return Err(Error::Precondition("zero has no inverse".into()));
        }
        match self {
            FieldSpec::Rationals => Ok(a.recip()),
            FieldSpec::PrimeField(p) => {
                let p = p.to_bigint();
                let inv = mod_inverse(a.numer(), &p).expect("nonzero residue");
                Ok(Rational::from_integer(inv))
            }
        }
    }

    pub fn coef_json(&self, c: &Rational) -> Value {
        match self {
            FieldSpec::Rationals => json!(c),
            FieldSpec::PrimeField(_) => json!(c.numer().to_u64()),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldSpec::Rationals => write!(f, "q"),
            FieldSpec::PrimeField(p) => write!(f, "fp:{p}"),
        }
    }
}

/// `q` or `fp:P`.
impl FromStr for FieldSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("q") {
            return Ok(FieldSpec::Rationals);
        }
        let p = s
            .strip_prefix("fp:")
            .ok_or_else(|| Error::Parse(format!("field must be `q` or `fp:P`, got {s:?}")))?;
        let p: BigUint = p.parse().map_err(|_| Error::Parse(format!("bad modulus {p:?}")))?;
        Ok(FieldSpec::PrimeField(Prime::new(p)?))
    }
}

type Certifier = Arc<dyn Fn(&Rational) -> Result<Option<MembershipCertificate>> + Send + Sync>;
type Verifier = Arc<dyn Fn(&Rational, &MembershipCertificate) -> bool + Send + Sync>;

/// The exponent monoid: a membership certifier and a certificate checker
/// over a fixed generator indexing.
#[derive(Clone)]
pub struct Ambient {
    pub label: String,
    certify: Certifier,
    verify: Verifier,
}

impl fmt::Debug for Ambient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ambient({})", self.label)
    }
}

impl Ambient {
    pub fn new(
        label: impl Into<String>,
        certify: impl Fn(&Rational) -> Result<Option<MembershipCertificate>> + Send + Sync + 'static,
        verify: impl Fn(&Rational, &MembershipCertificate) -> bool + Send + Sync + 'static,
    ) -> Arc<Self> {
        Arc::new(Ambient {
            label: label.into(),
            certify: Arc::new(certify),
            verify: Arc::new(verify),
        })
    }

    /// A finite truncation searched exhaustively.
    pub fn truncation(spec: MonoidSpec, depth: usize) -> Arc<Self> {
        let t = spec.truncate(depth);
        let label = t.label();
        Ambient::new(
            label,
            move |x| if x.is_negative() { Ok(None) } else { t.member(x) },
            move |x, c| verify_certificate(&spec, x, c).unwrap_or(false),
        )
    }

    /// `M` with its complete decider.
    pub fn main(params: &CounterexampleParams) -> Arc<Self> {
        let p = params.clone();
        let spec = main_monoid(params);
        Ambient::new(
            "M",
            move |x| {
                Ok(match membership_m(&p, x)? {
                    Verdict::Member(c) => Some(c),
                    _ => None,
                })
            },
            move |x, c| verify_certificate(&spec, x, c).unwrap_or(false),
        )
    }

    /// A lifted monoid through the decoder; an inconclusive decode is an
    /// error rather than a silent non-member.
    pub fn lifted(lifted: LiftedMonoid, search_depth: usize) -> Arc<Self> {
        let m = lifted.clone();
        Ambient::new(
            lifted.label(),
            move |x| match decode_decomposition(&m, x, search_depth)? {
                Decoded::Decomposed(d) => Ok(Some(d.lifted_certificate(&m)?)),
                Decoded::CertifiedOut(_) => Ok(None),
                Decoded::Inconclusive(why) => Err(Error::ResourceExhausted(why)),
            },
            move |x, c| lifted.verify(x, c),
        )
    }

    pub fn certify(&self, x: &Rational) -> Result<Option<MembershipCertificate>> {
        (self.certify)(x)
    }

    pub fn verify(&self, x: &Rational, c: &MembershipCertificate) -> bool {
        (self.verify)(x, c)
    }

    fn require(&self, x: &Rational) -> Result<MembershipCertificate> {
        self.certify(x)?
            .ok_or_else(|| Error::Precondition(format!("exponent {x} is not in {}", self.label)))
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub exp: Rational,
    pub coef: Rational,
    pub cert: MembershipCertificate,
}

/// `Σ c_i X^{q_i}` with strictly increasing exponents and nonzero
/// coefficients.
#[derive(Clone)]
pub struct MonoidPolynomial {
    pub field: FieldSpec,
    pub ambient: Arc<Ambient>,
    terms: Vec<Term>,
}

impl PartialEq for MonoidPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.terms.len() == other.terms.len()
            && self
                .terms
                .iter()
                .zip(&other.terms)
                .all(|(a, b)| a.exp == b.exp && a.coef == b.coef)
    }
}

impl fmt::Debug for MonoidPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for MonoidPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, t) in self.terms.iter().rev().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}·X^{}", t.coef, t.exp)?;
        }
        Ok(())
    }
}

impl MonoidPolynomial {
    pub fn zero(field: FieldSpec, ambient: Arc<Ambient>) -> Self {
        MonoidPolynomial { field, ambient, terms: Vec::new() }
    }

    /// Builds from `(exponent, coefficient)` pairs, certifying each exponent.
    pub fn from_terms(
        field: FieldSpec,
        ambient: Arc<Ambient>,
        terms: impl IntoIterator<Item = (Rational, Rational)>,
    ) -> Result<Self> {
        let mut out: Vec<Term> = Vec::new();
        for (exp, coef) in terms {
            let coef = field.element(&coef)?;
            match out.iter_mut().find(|t| t.exp == exp) {
                Some(t) => t.coef = field.add(&t.coef, &coef),
                None => {
                    let cert = ambient.require(&exp)?;
                    out.push(Term { exp, coef, cert });
                }
            }
        }
        Ok(Self::normalized(field, ambient, out))
    }

    pub fn monomial(field: FieldSpec, ambient: Arc<Ambient>, exp: Rational, coef: Rational) -> Result<Self> {
        Self::from_terms(field, ambient, [(exp, coef)])
    }

    /// `X^exp`.
    pub fn x_pow(field: FieldSpec, ambient: Arc<Ambient>, exp: Rational) -> Result<Self> {
        Self::monomial(field, ambient, exp, Rational::one())
    }

    pub fn one(field: FieldSpec, ambient: Arc<Ambient>) -> Self {
        Self::monomial(field, ambient, Rational::zero(), Rational::one()).expect("0 is in every monoid")
    }

    fn normalized(field: FieldSpec, ambient: Arc<Ambient>, mut terms: Vec<Term>) -> Self {
        terms.retain(|t| !t.coef.is_zero());
        terms.sort_by(|a, b| a.exp.cmp(&b.exp));
        MonoidPolynomial { field, ambient, terms }
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if self.field != other.field || self.ambient.label != other.ambient.label {
            return Err(Error::AmbientMismatch(format!(
                "{}[{}] vs {}[{}]",
                self.field, self.ambient.label, other.field, other.ambient.label
            )));
        }
        Ok(())
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// A nonzero constant.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].exp.is_zero()
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn support(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.exp.clone()).collect()
    }

    pub fn coefficient(&self, exp: &Rational) -> Rational {
        self.terms
            .iter()
            .find(|t| &t.exp == exp)
            .map(|t| t.coef.clone())
            .unwrap_or_default()
    }

    pub fn ord(&self) -> Result<Rational> {
        self.terms
            .first()
            .map(|t| t.exp.clone())
            .ok_or_else(|| Error::Precondition("the zero polynomial has no order".into()))
    }

    pub fn deg(&self) -> Result<Rational> {
        self.terms
            .last()
            .map(|t| t.exp.clone())
            .ok_or_else(|| Error::Precondition("the zero polynomial has no degree".into()))
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.last()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut terms = self.terms.clone();
        for t in &other.terms {
            match terms.iter_mut().find(|s| s.exp == t.exp) {
                Some(s) => s.coef = self.field.add(&s.coef, &t.coef),
                None => terms.push(t.clone()),
            }
        }
        Ok(Self::normalized(self.field.clone(), self.ambient.clone(), terms))
    }

    pub fn neg(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coef: self.field.neg(&t.coef), ..t.clone() })
            .collect();
        Self::normalized(self.field.clone(), self.ambient.clone(), terms)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Result<Self> {
        let c = self.field.element(c)?;
        let terms = self
            .terms
            .iter()
            .map(|t| Term { coef: self.field.mul(&t.coef, &c), ..t.clone() })
            .collect();
        Ok(Self::normalized(self.field.clone(), self.ambient.clone(), terms))
    }

    /// Exponents add, and so do their certificates.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        let mut terms: Vec<Term> = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let exp = &a.exp + &b.exp;
                let coef = self.field.mul(&a.coef, &b.coef);
                match terms.iter_mut().find(|t| t.exp == exp) {
                    Some(t) => t.coef = self.field.add(&t.coef, &coef),
                    None => terms.push(Term { exp, coef, cert: a.cert.plus(&b.cert) }),
                }
            }
        }
        Ok(Self::normalized(self.field.clone(), self.ambient.clone(), terms))
    }

    /// `X^{e}·self` for a certified exponent.
    pub fn shift(&self, e: &Rational) -> Result<Self> {
        self.mul(&Self::x_pow(self.field.clone(), self.ambient.clone(), e.clone())?)
    }

    /// `g` with `self = X^a·g`, when `a` divides every exponent.
    pub fn monomial_divide(&self, a: &Rational) -> Result<Option<Self>> {
        if a.is_negative() {
            return Err(Error::Precondition(format!("cannot divide by X^{a}")));
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let exp = &t.exp - a;
            match self.ambient.certify(&exp)? {
                Some(cert) => terms.push(Term { exp, coef: t.coef.clone(), cert }),
                None => return Ok(None),
            }
        }
        Ok(Some(Self::normalized(self.field.clone(), self.ambient.clone(), terms)))
    }

    /// Every exponent certificate checks out in the ambient monoid.
    pub fn certificates_verify(&self) -> bool {
        self.terms.iter().all(|t| self.ambient.verify(&t.exp, &t.cert))
    }

    /// `[{"exp": "n/d", "coef": ...}]` sorted by exponent.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|t| json!({"exp": t.exp, "coef": self.field.coef_json(&t.coef)}))
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Rational {
        Rational::from(n)
    }
    use crate::counterexample::build_default_params;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn thirds() -> Arc<Ambient> {
        Ambient::truncation(MonoidSpec::finite("<1/3>", [q("1/3")]).unwrap(), 1)
    }

    #[test]
    fn difference_of_squares() {
        let amb = thirds();
        let f = |c: i64| {
            MonoidPolynomial::from_terms(FieldSpec::Rationals, amb.clone(), [(q("1/3"), int(1)), (q("0"), int(c))])
                .unwrap()
        };
        let prod = f(1).mul(&f(-1)).unwrap();
        let want = MonoidPolynomial::from_terms(
            FieldSpec::Rationals,
            amb.clone(),
            [(q("2/3"), int(1)), (q("0"), int(-1))],
        )
        .unwrap();
        assert_eq!(prod, want);
        assert!(prod.certificates_verify());
        assert!(f(1).add(&f(1).neg()).unwrap().is_zero());
        assert!(MonoidPolynomial::x_pow(FieldSpec::Rationals, amb, q("1/2")).is_err());
    }

    #[test]
    fn counterexample_monomials() {
        let p = build_default_params().unwrap();
        let amb = Ambient::main(&p);
        let x = |e: Rational| MonoidPolynomial::x_pow(FieldSpec::Rationals, amb.clone(), e).unwrap();
        assert_eq!(x(p.b(2)).mul(&x(p.a(2))).unwrap(), x(p.b1.clone()));
        let f = x(p.b1.clone()).add(&x(p.c1.clone())).unwrap();
        assert_eq!(f.ord().unwrap(), p.b1);
        assert_eq!(f.deg().unwrap(), p.c1);
        let g = f.monomial_divide(&p.a(2)).unwrap().unwrap();
        assert_eq!(g, x(p.b(2)).add(&x(p.c(2))).unwrap());
        assert_eq!(f.monomial_divide(&Rational::zero()).unwrap().unwrap(), f);
        let h = x(p.b1.clone()).add(&x(Rational::zero())).unwrap();
        assert!(h.monomial_divide(&p.a(2)).unwrap().is_none());
        let one = MonoidPolynomial::one(FieldSpec::Rationals, amb);
        assert_eq!((one.ord().unwrap(), one.deg().unwrap()), (Rational::zero(), Rational::zero()));
        assert!(one.is_unit());
    }

    #[test]
    fn prime_field_arithmetic() {
        let f5 = FieldSpec::prime_field(5).unwrap();
        assert_eq!(f5.element(&q("1/2")).unwrap(), int(3));
        assert_eq!(f5.add(&int(3), &int(4)), int(2));
        assert_eq!(f5.inv(&int(2)).unwrap(), int(3));
        assert!(f5.element(&q("1/5")).is_err());
        assert_eq!("fp:7".parse::<FieldSpec>().unwrap(), FieldSpec::prime_field(7).unwrap());
        assert_eq!("q".parse::<FieldSpec>().unwrap(), FieldSpec::Rationals);
        assert!("fp:8".parse::<FieldSpec>().is_err());
        assert!("r".parse::<FieldSpec>().is_err());
        let amb = thirds();
        let g = MonoidPolynomial::from_terms(f5.clone(), amb.clone(), [(q("1/3"), int(1)), (q("0"), int(1))]).unwrap();
        let sq = g.mul(&g).unwrap();
        assert_eq!(sq.coefficient(&q("1/3")), int(2));
        assert!(g.mul(&MonoidPolynomial::one(FieldSpec::Rationals, amb)).is_err());
    }
}
