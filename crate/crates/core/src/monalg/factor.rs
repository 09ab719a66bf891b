//! Division, the descent of `X^{b_1} + X^{c_1}`, bounded factorization
//! searches and irreducible divisors of small-degree elements.

use std::sync::Arc;

use rand::Rng;
use serde_json::{json, Value};

use super::{Ambient, FieldSpec, MonoidPolynomial};
use crate::counterexample::{a_form, CounterexampleParams};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::report::{Report, Status};

/// Steps allowed in one long division.
const DIVISION_STEPS: usize = 10_000;

/// `f / g` when the quotient lies in the algebra, by cancelling leading
/// terms. A remainder with order below `ord g` can never be cancelled.
pub fn divide_exact(f: &MonoidPolynomial, g: &MonoidPolynomial) -> Result<Option<MonoidPolynomial>> {
    let lead = g
        .leading()
        .ok_or_else(|| Error::Precondition("division by zero".into()))?
        .clone();
    let inv = g.field.inv(&lead.coef)?;
    let g_ord = g.ord()?;
    let mut quotient = MonoidPolynomial::zero(f.field.clone(), f.ambient.clone());
    let mut rest = f.clone();
    for _ in 0..DIVISION_STEPS {
        let Some(top) = rest.leading().cloned() else {
            return Ok(Some(quotient));
        };
        if rest.ord()? < g_ord {
            return Ok(None);
        }
        let e = &top.exp - &lead.exp;
        if e.is_negative() || f.ambient.certify(&e)?.is_none() {
            return Ok(None);
        }
        let c = f.field.mul(&top.coef, &inv);
        let step = MonoidPolynomial::monomial(f.field.clone(), f.ambient.clone(), e, c)?;
        rest = rest.sub(&step.mul(g)?)?;
        quotient = quotient.add(&step)?;
    }
    Err(Error::ResourceExhausted(format!("dividing {f} by {g}")))
}

fn x_pow(field: &FieldSpec, ambient: &Arc<Ambient>, e: Rational) -> Result<MonoidPolynomial> {
    MonoidPolynomial::x_pow(field.clone(), ambient.clone(), e)
}

/// Rebuilds `X^{b_1} + X^{c_1} = X^{a_2 + … + a_n}·(X^{b_n} + X^{c_n})` for
/// `n = 2..=n_max` in `F[M]` and checks that each cofactor is again divisible
/// by `X^{a_{n+1}}`.
pub fn descent_chain(params: &CounterexampleParams, field: &FieldSpec, n_max: usize) -> Result<Report> {
    if n_max < 2 {
        return Err(Error::Precondition("descent needs n_max ≥ 2".into()));
    }
    let amb = Ambient::main(params);
    let binomial = |n: usize| -> Result<MonoidPolynomial> {
        x_pow(field, &amb, params.b(n))?.add(&x_pow(field, &amb, params.c(n))?)
    };
    let f = binomial(1)?;
    let mut report = Report::new(format!("descent of X^b1 + X^c1 over {field} to n = {n_max}"));
    let mut prefix = MonoidPolynomial::one(field.clone(), amb.clone());
    for n in 2..=n_max {
        prefix = prefix.mul(&x_pow(field, &amb, params.a(n))?)?;
        let cofactor = binomial(n)?;
        let rebuilt = prefix.mul(&cofactor)?;
        if rebuilt != f || !rebuilt.certificates_verify() {
            return Err(Error::Defect(format!("descent identity fails at n = {n}")));
        }
        let next = cofactor
            .monomial_divide(&params.a(n + 1))?
            .ok_or_else(|| Error::Defect(format!("X^a{} does not divide the cofactor at n = {n}", n + 1)))?;
        if x_pow(field, &amb, params.a(n + 1))?.mul(&next)? != cofactor || !next.certificates_verify() {
            return Err(Error::Defect(format!("cofactor division fails at n = {n}")));
        }
        report.witness(json!({
            "n": n,
            "prefix_exponent": prefix.deg()?,
            "cofactor": cofactor.to_json(),
            "next_divisor": params.a(n + 1),
        }));
    }
    Ok(report)
}

/// Limits for [`bounded_factor_search`]: divisor exponents are sums of at
/// most `max_summands` of `gens`; `support_bound = 2` adds divisors
/// `X^e ± 1`.
#[derive(Clone, Debug)]
pub struct FactorBounds {
    pub gens: Vec<Rational>,
    pub max_summands: usize,
    pub support_bound: usize,
    pub candidate_cap: usize,
}

impl FactorBounds {
    pub fn new(gens: Vec<Rational>) -> Self {
        FactorBounds { gens, max_summands: 2, support_bound: 2, candidate_cap: 5_000 }
    }

    /// Nonzero sums of at most `max_summands` generators, up to `limit`.
    fn lattice(&self, limit: &Rational) -> Result<Vec<Rational>> {
        let mut level = vec![Rational::zero()];
        let mut all: Vec<Rational> = Vec::new();
        for _ in 0..self.max_summands {
            let mut next = Vec::new();
            for base in &level {
                for g in &self.gens {
                    let v = base + g;
                    if &v <= limit && !all.contains(&v) && !next.contains(&v) {
                        next.push(v);
                    }
                }
            }
            all.extend(next.iter().cloned());
            if all.len() > self.candidate_cap {
                return Err(Error::ResourceExhausted(format!(
                    "exponent lattice exceeds {} candidates",
                    self.candidate_cap
                )));
            }
            level = next;
        }
        all.sort();
        Ok(all)
    }
}

/// Proper factorizations `f = g·h` with `g` drawn from the bounded candidates
/// and neither factor a unit.
fn proper_factorizations(
    f: &MonoidPolynomial,
    bounds: &FactorBounds,
) -> Result<Vec<(MonoidPolynomial, MonoidPolynomial)>> {
    if f.is_zero() || f.is_unit() {
        return Ok(Vec::new());
    }
    let deg = f.deg()?;
    let mut out = Vec::new();
    for e in bounds.lattice(&deg)? {
        let g = x_pow(&f.field, &f.ambient, e.clone())?;
        if let Some(h) = f.monomial_divide(&e)? {
            if !h.is_unit() {
                out.push((g, h));
            }
        }
        if bounds.support_bound >= 2 {
            let one = MonoidPolynomial::one(f.field.clone(), f.ambient.clone());
            for sign in [one.clone(), one.neg()] {
                let g = x_pow(&f.field, &f.ambient, e.clone())?.add(&sign)?;
                if let Some(h) = divide_exact(f, &g)? {
                    if !h.is_unit() && !out.iter().any(|(a, _)| a == &g) {
                        out.push((g, h));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// No proper factorization within `bounds`. Units are not irreducible.
pub fn irreducible_within(f: &MonoidPolynomial, bounds: &FactorBounds) -> Result<bool> {
    Ok(!f.is_zero() && !f.is_unit() && proper_factorizations(f, bounds)?.is_empty())
}

/// Lists every bounded factorization of `f` and whether each factor splits
/// further within the same bounds. The result is evidence, not a proof.
pub fn bounded_factor_search(f: &MonoidPolynomial, bounds: &FactorBounds) -> Report {
    let mut report = Report::new(format!("bounded evidence: factorizations of {f}"));
    let bounds_doc = json!({
        "generators": bounds.gens,
        "max_summands": bounds.max_summands,
        "support_bound": bounds.support_bound,
    });
    let run = || -> Result<Vec<Value>> {
        let mut found = Vec::new();
        for (g, h) in proper_factorizations(f, bounds)? {
            found.push(json!({
                "g": g.to_json(),
                "h": h.to_json(),
                "g_irreducible": irreducible_within(&g, bounds)?,
                "h_irreducible": irreducible_within(&h, bounds)?,
            }));
        }
        Ok(found)
    };
    match run() {
        Ok(found) => report.witness(json!({
            "kind": "bounded evidence",
            "bounds": bounds_doc,
            "irreducible_within_bounds": found.is_empty() && !f.is_unit() && !f.is_zero(),
            "factorizations": found,
        })),
        Err(e) => report.flag(
            Status::Inconclusive,
            json!({"kind": "bounded evidence", "bounds": bounds_doc, "resource_bound_exceeded": e.to_string()}),
        ),
    }
    report
}

#[derive(Clone, Debug)]
pub struct FurstenbergDivisor {
    pub divisor: MonoidPolynomial,
    pub cofactor: MonoidPolynomial,
    /// `common-atom` when `X^{a_k}` divides every term, `descent` otherwise.
    pub method: &'static str,
}

impl FurstenbergDivisor {
    pub fn to_json(&self) -> Value {
        json!({
            "divisor": self.divisor.to_json(),
            "cofactor": self.cofactor.to_json(),
            "method": self.method,
        })
    }
}

/// An irreducible divisor of a nonzero nonunit `g` with `deg g < 1/3`. Every
/// exponent lies in `⟨A_ε⟩`; when some `a_k` occurs in all of them `X^{a_k}`
/// is an atom monomial dividing `g`, otherwise the smallest-degree proper
/// divisor within the `a_2, …, a_{depth+1}` bounds is refined until it has
/// no bounded factorization. `None` means the bounds ran out.
pub fn furstenberg_divisor(
    g: &MonoidPolynomial,
    params: &CounterexampleParams,
    depth: usize,
) -> Result<Option<FurstenbergDivisor>> {
    if g.is_zero() || g.is_unit() {
        return Err(Error::Precondition(format!("{g} is zero or a unit")));
    }
    if g.deg()? >= Rational::new(1, 3) {
        return Err(Error::Precondition(format!("deg {g} is not below 1/3")));
    }
    let forms = g
        .support()
        .iter()
        .map(|e| a_form(params, e).map_err(|why| Error::Defect(format!("exponent {e} of {g} is outside <A_eps>: {why}"))))
        .collect::<Result<Vec<_>>>()?;
    let common = forms
        .first()
        .into_iter()
        .flat_map(|f| f.residues.iter().map(|(k, _)| *k))
        .find(|k| forms.iter().all(|f| f.residues.iter().any(|(j, r)| j == k && *r > 0)));
    if let Some(k) = common {
        let divisor = x_pow(&g.field, &g.ambient, params.a(k))?;
        let cofactor = g.monomial_divide(&params.a(k))?.ok_or_else(|| {
            Error::Defect(format!("a_{k} occurs in every exponent of {g} but X^a_{k} does not divide it"))
        })?;
        return Ok(Some(FurstenbergDivisor { divisor, cofactor, method: "common-atom" }));
    }
    let bounds = FactorBounds::new((2..depth + 2).map(|k| params.a(k)).collect());
    let mut divisor = g.clone();
    loop {
        let splits = match proper_factorizations(&divisor, &bounds) {
            Ok(s) => s,
            Err(Error::ResourceExhausted(_)) => return Ok(None),
            Err(e) => return Err(e),
        };
        let smallest = splits
            .into_iter()
            .flat_map(|(a, b)| [a, b])
            .min_by(|a, b| {
                let key = |p: &MonoidPolynomial| (p.deg().unwrap_or_default(), p.terms().len());
                key(a).cmp(&key(b))
            });
        match smallest {
            Some(d) => divisor = d,
            None => break,
        }
    }
    let cofactor = divide_exact(g, &divisor)?
        .ok_or_else(|| Error::Defect(format!("{divisor} was found as a divisor but does not divide {g}")))?;
    Ok(Some(FurstenbergDivisor { divisor, cofactor, method: "descent" }))
}

/// A random nonunit of degree below `1/3` with exponents that are small sums
/// of `a_2, …, a_{depth+1}`.
pub fn random_small_polynomial<R: Rng>(
    params: &CounterexampleParams,
    field: &FieldSpec,
    ambient: &Arc<Ambient>,
    depth: usize,
    rng: &mut R,
) -> Result<MonoidPolynomial> {
    let third = Rational::new(1, 3);
    loop {
        let mut terms = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let mut e = Rational::zero();
            if rng.gen_bool(0.8) {
                for _ in 0..rng.gen_range(1..=3) {
                    e += &params.a(rng.gen_range(2..depth + 2)).mul_int(rng.gen_range(1..=3u32));
                }
            }
            let c = Rational::from(rng.gen_range(1..=4i64));
            terms.push((e, c));
        }
        let p = MonoidPolynomial::from_terms(field.clone(), ambient.clone(), terms)?;
        if !p.is_zero() && !p.is_unit() && p.deg()? < third {
            return Ok(p);
        }
    }
}
