use std::sync::{Arc, OnceLock};

use proptest::prelude::*;

use puiseux_lift::counterexample::{build_default_params, CounterexampleParams};
use puiseux_lift::monalg::{
    bounded_factor_search, divide_exact, Ambient, FactorBounds, FieldSpec, MonoidPolynomial,
};
use puiseux_lift::puiseux::MonoidSpec;
use puiseux_lift::{Error, Rational};

fn params() -> &'static CounterexampleParams {
    static P: OnceLock<CounterexampleParams> = OnceLock::new();
    P.get_or_init(|| build_default_params().unwrap())
}

fn ambient() -> Arc<Ambient> {
    static A: OnceLock<Arc<Ambient>> = OnceLock::new();
    A.get_or_init(|| Ambient::main(params())).clone()
}

fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

fn field() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![Just(FieldSpec::Rationals), Just(FieldSpec::prime_field(5).unwrap())]
}

/// Exponents are sums of `a_2..a_5`, `b_1` and `c_1`.
fn exponent() -> impl Strategy<Value = Rational> {
    prop::collection::vec((0usize..6, 1u32..3), 0..3).prop_map(|parts| {
        let p = params();
        parts
            .into_iter()
            .map(|(i, m)| match i {
                4 => p.b1.mul_int(m),
                5 => p.c1.mul_int(m),
                k => p.a(k + 2).mul_int(m),
            })
            .sum()
    })
}

fn poly(field: FieldSpec) -> impl Strategy<Value = MonoidPolynomial> {
    prop::collection::vec((exponent(), -4i64..5), 0..4).prop_map(move |terms| {
        let terms: Vec<_> = terms.into_iter().map(|(e, c)| (e, Rational::from(c))).collect();
        MonoidPolynomial::from_terms(field.clone(), ambient(), terms).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (MonoidPolynomial, MonoidPolynomial, MonoidPolynomial)> {
    field().prop_flat_map(|f| (poly(f.clone()), poly(f.clone()), poly(f)))
}

#[test]
fn coefficients_reduce_in_prime_fields() {
    let f3 = FieldSpec::prime_field(3).unwrap();
    let p = MonoidPolynomial::from_terms(f3.clone(), ambient(), vec![(q("0"), q("4")), (q("0"), q("2"))]).unwrap();
    assert!(p.is_zero());
    let half = MonoidPolynomial::from_terms(f3, ambient(), vec![(q("0"), q("1/2"))]).unwrap();
    assert_eq!(half.coefficient(&q("0")), q("2"));
}

#[test]
fn non_members_are_rejected() {
    let err = MonoidPolynomial::x_pow(FieldSpec::Rationals, ambient(), q("1/2")).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

#[test]
fn algebras_do_not_mix() {
    let other = Ambient::truncation(MonoidSpec::finite("halves", [q("1/2")]).unwrap(), 1);
    let a = MonoidPolynomial::one(FieldSpec::Rationals, ambient());
    let b = MonoidPolynomial::one(FieldSpec::Rationals, other);
    assert!(a.add(&b).is_err());
    let c = MonoidPolynomial::one(FieldSpec::prime_field(5).unwrap(), ambient());
    assert!(a.mul(&c).is_err());
}

#[test]
fn bounded_search_over_a_truncation() {
    // In ℚ[⟨1/2⟩], X − 1 = (X^{1/2} − 1)(X^{1/2} + 1).
    let amb = Ambient::truncation(MonoidSpec::finite("halves", [q("1/2")]).unwrap(), 1);
    let x = |e: &str| MonoidPolynomial::x_pow(FieldSpec::Rationals, amb.clone(), q(e)).unwrap();
    let one = MonoidPolynomial::one(FieldSpec::Rationals, amb.clone());
    let f = x("1").sub(&one).unwrap();
    let r = bounded_factor_search(&f, &FactorBounds::new(vec![q("1/2")]));
    assert_eq!(r.witnesses[0]["irreducible_within_bounds"], false);
    let g = x("1/2").sub(&one).unwrap();
    assert_eq!(divide_exact(&f, &g).unwrap(), Some(x("1/2").add(&one).unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_laws((f, g, h) in triple()) {
        prop_assert_eq!(f.add(&g).unwrap(), g.add(&f).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap(), g.mul(&f).unwrap());
        prop_assert_eq!(f.add(&g).unwrap().add(&h).unwrap(), f.add(&g.add(&h).unwrap()).unwrap());
        prop_assert_eq!(f.mul(&g).unwrap().mul(&h).unwrap(), f.mul(&g.mul(&h).unwrap()).unwrap());
        prop_assert_eq!(
            f.mul(&g.add(&h).unwrap()).unwrap(),
            f.mul(&g).unwrap().add(&f.mul(&h).unwrap()).unwrap()
        );
        prop_assert!(f.sub(&f).unwrap().is_zero());
        let one = MonoidPolynomial::one(f.field.clone(), ambient());
        prop_assert_eq!(f.mul(&one).unwrap(), f.clone());
        prop_assert!(f.mul(&g).unwrap().certificates_verify());
    }

    #[test]
    fn degree_and_order_add((f, g, _) in triple()) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let fg = f.mul(&g).unwrap();
        prop_assert_eq!(fg.deg().unwrap(), &f.deg().unwrap() + &g.deg().unwrap());
        prop_assert_eq!(fg.ord().unwrap(), &f.ord().unwrap() + &g.ord().unwrap());
    }

    #[test]
    fn monomial_division_round_trips((f, _, _) in triple(), e in exponent()) {
        let shifted = f.shift(&e).unwrap();
        prop_assert_eq!(shifted.monomial_divide(&e).unwrap(), Some(f.clone()));
    }

    #[test]
    fn exact_division_recovers_the_cofactor((f, g, _) in triple()) {
        prop_assume!(!g.is_zero());
        let fg = f.mul(&g).unwrap();
        prop_assert_eq!(divide_exact(&fg, &g).unwrap(), Some(f));
    }
}
