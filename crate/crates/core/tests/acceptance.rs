//! Acceptance criteria 1–13. Runs without the libtest harness so the criteria
//! execute one after another (wall-clock limits stay meaningful) and every
//! criterion prints a PASS/FAIL line.

use std::collections::{BTreeSet, HashSet};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use puiseux_lift::counterexample::{
    atoms_report, build_default_params, build_main_lift, claim1_check, claim2_check, improvement_chain,
    main_monoid, membership_a, membership_m, random_small_element, strongly_atomic_lifting_function,
    CounterexampleParams, Family, MainGen, Verdict,
};
use puiseux_lift::exactnum::{is_prime, lcm_of_denominators};
use puiseux_lift::lifting::examples::{antimatter, dyadic_unit, grams};
use puiseux_lift::lifting::sampling::{projection_divisibility_trial, random_certificate_pair};
use puiseux_lift::lifting::{accp_chain_probe, canonical_decomposition, LiftedMonoid, LiftingFunction};
use puiseux_lift::monalg::{
    descent_chain, furstenberg_divisor, irreducible_within, random_small_polynomial, Ambient, FactorBounds,
    FieldSpec, MonoidPolynomial,
};
use puiseux_lift::puiseux::{atoms_finite, factorizations, member_finite, verify_certificate};
use puiseux_lift::scenario::{run, Scenario, ScenarioName};
use puiseux_lift::Rational;

type Outcome = Result<String, String>;

fn q(s: &str) -> Rational {
    s.parse().expect("literal")
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn params() -> CounterexampleParams {
    build_default_params().expect("default parameters")
}

fn main_lifted(depth: usize) -> Result<LiftedMonoid, String> {
    let lift = build_main_lift(&params(), depth).map_err(e2s)?;
    LiftedMonoid::new(lift.lifting_function(), depth).map_err(e2s)
}

fn odd_primes(n: usize) -> Vec<u64> {
    (3u64..).step_by(2).filter(|&k| is_prime(&k.into())).take(n).collect()
}

fn criterion_1() -> Outcome {
    let expected: Vec<Rational> = odd_primes(8)
        .into_iter()
        .enumerate()
        .map(|(n, p)| Rational::new(1, BigInt::from(p) << n))
        .collect();
    let lifted = LiftedMonoid::new(grams(), 10).map_err(e2s)?;
    ensure(lifted.generators(8) == expected, || "lifted generators differ from 1/(2^n p_n)".into())?;
    let atoms = atoms_finite(&expected).map_err(e2s)?;
    let want: BTreeSet<Rational> = expected.iter().cloned().collect();
    ensure(atoms == want, || format!("atoms {atoms:?}"))?;
    Ok(format!("{} atoms", atoms.len()))
}

fn criterion_2() -> Outcome {
    let lifted = LiftedMonoid::new(grams(), 14).map_err(e2s)?;
    let steps: Vec<Rational> = (1..=10).map(dyadic_unit).collect();
    let probe = accp_chain_probe(&lifted, &Rational::one(), &steps, 12).map_err(e2s)?;
    ensure(probe.steps.len() == 10, || format!("{} steps", probe.steps.len()))?;
    for (i, st) in probe.steps.iter().enumerate() {
        let diff = &st.from - &st.to;
        ensure(diff.is_positive(), || format!("step {i} is not strict"))?;
        ensure(lifted.verify(&diff, &st.difference_cert), || format!("step {i}: difference certificate"))?;
        let proj = &probe.projections[i] - &probe.projections[i + 1];
        let ok = verify_certificate(&lifted.phi.base, &proj, &st.projection_cert).map_err(e2s)?;
        ensure(ok, || format!("step {i}: projection certificate"))?;
    }
    Ok("10 certified strict steps".into())
}

fn criterion_3() -> Outcome {
    let p = params();
    let monoids: Vec<(&str, LiftingFunction, usize)> = vec![
        ("grams", grams(), 8),
        ("antimatter", antimatter(), 6),
        ("strongly-atomic", strongly_atomic_lifting_function(&p), 6),
        ("main-theorem", build_main_lift(&p, 8).map_err(e2s)?.lifting_function(), 6),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (name, phi, depth) in monoids {
        let lifted = LiftedMonoid::new(phi, depth + 2).map_err(e2s)?;
        for i in 0..1000 {
            let pair = random_certificate_pair(&lifted, depth, &mut rng).map_err(e2s)?;
            ensure(lifted.verify(&pair.value, &pair.first) && lifted.verify(&pair.value, &pair.second), || {
                format!("{name} sample {i}: certificate does not verify")
            })?;
            let a = canonical_decomposition(&lifted, &pair.value, &pair.first).map_err(e2s)?;
            let b = canonical_decomposition(&lifted, &pair.value, &pair.second).map_err(e2s)?;
            ensure(a == b, || format!("{name} sample {i}: {} decomposes two ways", pair.value))?;
        }
    }
    Ok("4 x 1000 samples, 0 mismatches".into())
}

fn criterion_4() -> Outcome {
    let lifted = main_lifted(8)?;
    let base = &lifted.phi.base;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut carried = 0;
    for i in 0..500 {
        let check = projection_divisibility_trial(&lifted, 6, &mut rng).map_err(|e| format!("trial {i}: {e}"))?;
        let (t, c) = &check.part1;
        ensure(verify_certificate(base, t, c).map_err(e2s)?, || format!("trial {i}: part 1"))?;
        for (j, t, c) in &check.part2 {
            ensure(verify_certificate(base, t, c).map_err(e2s)?, || format!("trial {i}: part 2 at {j}"))?;
        }
        carried += usize::from(!check.part2.is_empty());
    }
    ensure(carried > 0, || "the second part never fired".into())?;
    Ok(format!("500 trials, {carried} with the second part"))
}

/// `Σ a_n` is bounded by `tail_bound = 1/128 = ε/8` (not strictly below it,
/// since `ε = 1/16`); the sharper `tail_strict` is strictly below `ε/8`.
fn criterion_5() -> Outcome {
    let p = params();
    let eps = &p.epsilon;
    let eighth = eps.div_int(8);
    ensure(eps < &q("1/10"), || "ε ≥ 1/10".into())?;
    ensure(p.tail_bound == q("1/128") && p.tail_bound <= eighth, || "tail bound".into())?;
    ensure(p.tail_strict < eighth, || "strict tail bound".into())?;
    for n in 2..=60 {
        ensure(p.partial(n) < p.tail_strict, || format!("partial sum {n}"))?;
    }
    for v in [&p.b1, &p.c1] {
        ensure(v > &(Rational::one() - eps.div_int(128).mul_int(16)) && v < &Rational::one(), || {
            format!("{v} outside (1 − ε/8, 1)")
        })?;
    }
    ensure(p.delta == q("3/33536"), || format!("δ = {}", p.delta))?;
    ensure(p.lower == Rational::min_of(&p.b1, &p.c1) - &p.tail_bound, || "L".into())?;
    let quarter = Rational::one() - eps.div_int(4);
    ensure(p.delta < &p.lower - &quarter, || "δ against L".into())?;
    ensure(p.delta < Rational::one() - Rational::max_of(&p.b1, &p.c1), || "δ against 1".into())?;

    let lift = build_main_lift(&p, 20).map_err(e2s)?;
    let (third, half) = (q("1/3"), q("1/2"));
    let mut last = BigInt::zero();
    for r in lift.rows(20) {
        let j = r.index;
        let pv = r.p.to_bigint();
        ensure(pv > last, || format!("row {j}: primes not increasing"))?;
        last = pv.clone();
        ensure(r.s == if j % 2 == 0 { p.b(j / 2 + 1) } else { p.c(j / 2 + 1) }, || format!("row {j}: s"))?;
        ensure(&r.s / &Rational::from_integer(pv.clone()) < p.delta, || format!("row {j}: s/p ≥ δ"))?;
        ensure(r.h >= BigInt::from(2) && r.h <= &pv - 2, || format!("row {j}: h"))?;
        ensure(&r.h + &r.k == pv, || format!("row {j}: h + k"))?;
        let hh = (&r.s / &Rational::from_integer(pv.clone())).mul_int(r.h.clone());
        let kk = (&r.s / &Rational::from_integer(pv.clone())).mul_int(r.k.clone());
        let (radius, hc, kc) = match r.family {
            Family::B => (eps.div_int(2), &half - eps, &half + eps),
            Family::C => (eps.div_int(4), half.clone(), half.clone()),
        };
        ensure((&hh - &hc).abs() < radius && (&kk - &kc).abs() < radius, || format!("row {j}: neighborhoods"))?;
        ensure(Rational::min_of(&hh, &kk) > &third, || format!("row {j}: min M_s > 1/3"))?;
    }
    lift.check(20).map_err(e2s)?;
    Ok("params and 20 rows".into())
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

fn criterion_6() -> Outcome {
    let p = params();
    let gens: Vec<Rational> = (2..8).map(|k| p.a(k)).collect();
    let mut count = 0;
    for s in subsets(5) {
        let x: Rational = s.iter().map(|&i| gens[i].clone()).sum();
        let f = factorizations(&gens, &x).map_err(e2s)?;
        ensure(f.len() == 1, || format!("{x} has {} factorizations", f.len()))?;
        let want: Vec<(usize, u64)> = s.iter().map(|&i| (i, 1)).collect();
        ensure(f[0].entries().collect::<Vec<_>>() == want, || format!("{x}: unexpected factorization"))?;
        count += 1;
    }
    Ok(format!("{count} subsets"))
}

fn criterion_7() -> Outcome {
    let p = params();
    let m = main_monoid(&p);
    let chain = improvement_chain(&p, 25).map_err(e2s)?;
    ensure(chain.len() == 25, || format!("{} steps", chain.len()))?;
    let mut prev = Rational::zero();
    for (i, cd) in chain.iter().enumerate() {
        ensure(cd.value > prev, || format!("step {i} does not increase"))?;
        prev = cd.value.clone();
        ensure(cd.verify(&p), || format!("step {i}: verify"))?;
        let targets: BTreeSet<&Rational> = cd.witnesses.iter().map(|w| &w.target).collect();
        ensure(targets == [&p.b1, &p.c1].into_iter().collect(), || format!("step {i}: targets"))?;
        for w in &cd.witnesses {
            ensure(&w.quotient + &cd.value == w.target, || format!("step {i}: quotient"))?;
            let v = w.certificate.value_with(|k| m.generator(k)).map_err(e2s)?;
            ensure(v == w.quotient, || format!("step {i}: certificate value"))?;
        }
    }
    Ok("25 certified strict steps".into())
}

fn criterion_8() -> Outcome {
    let p = params();
    let lift = build_main_lift(&p, 10).map_err(e2s)?;
    let lifted = LiftedMonoid::new(lift.lifting_function(), 12).map_err(e2s)?;
    let r = atoms_report(&lifted, &lift, 10).map_err(e2s)?;
    ensure(r.is_ok(), || format!("status {}", r.status.as_str()))?;
    // 10 a's, then H, K, s, split for each index.
    ensure(r.witnesses.len() == 10 + 4 * 10, || format!("{} witnesses", r.witnesses.len()))?;
    Ok("a_2..a_11, 10 H/K pairs, 10 non-atoms".into())
}

fn criterion_9() -> Outcome {
    let p = params();
    let lifted = main_lifted(8)?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let x = random_small_element(&p, 8, &mut rng);
        ensure(x <= q("1/3"), || format!("{x} > 1/3"))?;
        let r = claim1_check(&lifted, &p, &x, 10).map_err(e2s)?;
        ensure(r.is_ok() && r.witnesses[0]["verdict"] == "holds", || format!("claim 1 at {x}: {:?}", r.witnesses))?;
    }
    for k in 2..=10 {
        let r = claim2_check(&p, k).map_err(e2s)?;
        ensure(r.is_ok() && r.witnesses.len() == 2, || format!("claim 2 at k = {k}"))?;
    }
    Ok("200 + 9 checks".into())
}

fn criterion_10() -> Outcome {
    let p = params();
    for field in [FieldSpec::Rationals, FieldSpec::prime_field(5).map_err(e2s)?] {
        let r = descent_chain(&p, &field, 15).map_err(e2s)?;
        ensure(r.is_ok() && r.witnesses.len() == 14, || format!("{field}: {} witnesses", r.witnesses.len()))?;
        let amb = Ambient::main(&p);
        let x = |e: Rational| MonoidPolynomial::x_pow(field.clone(), amb.clone(), e).map_err(e2s);
        let f = x(p.b1.clone())?.add(&x(p.c1.clone())?).map_err(e2s)?;
        for n in 2..=15 {
            let cof = x(p.b(n))?.add(&x(p.c(n))?).map_err(e2s)?;
            ensure(x(p.partial(n))?.mul(&cof).map_err(e2s)? == f, || format!("{field}: n = {n}"))?;
            let next = cof.monomial_divide(&p.a(n + 1)).map_err(e2s)?;
            ensure(next.is_some(), || format!("{field}: X^a{} ∤ cofactor", n + 1))?;
        }
    }
    Ok("n = 2..15 over q and fp:5".into())
}

/// All elements of `⟨gens⟩` up to `limit`, by closing `{0}` under adding
/// generators.
fn reachable(gens: &[u64], limit: u64) -> HashSet<u64> {
    let mut seen = HashSet::from([0u64]);
    let mut frontier = vec![0u64];
    while let Some(v) = frontier.pop() {
        for &g in gens {
            let w = v + g;
            if g > 0 && w <= limit && seen.insert(w) {
                frontier.push(w);
            }
        }
    }
    seen
}

fn scaled(x: &Rational, l: &BigInt) -> u64 {
    let s = x.mul_int(l.clone());
    assert!(s.is_integer());
    s.numer().to_u64().expect("small")
}

fn random_finite_instance(rng: &mut ChaCha8Rng) -> (Vec<Rational>, BigInt) {
    loop {
        let gens: Vec<Rational> =
            (0..rng.gen_range(1..=4)).map(|_| Rational::new(rng.gen_range(1..=12), rng.gen_range(1..=12))).collect();
        let l = lcm_of_denominators(&gens);
        if l <= BigInt::from(5000) {
            return (gens, l);
        }
    }
}

/// `x ∈ ⟨a_2, a_3⟩`, by trying every multiplicity of `a_3`.
fn brute_a(p: &CounterexampleParams, x: &Rational) -> bool {
    let (q2, q3) = (p.q(2).to_bigint(), p.q(3).to_bigint());
    let top = x.mul_int(q3.clone()).floor().to_u64().unwrap_or(0);
    (0..=top).any(|m| {
        let r = x - &Rational::new(m, q3.clone());
        !r.is_negative() && r.mul_int(q2.clone()).is_integer()
    })
}

/// `x ∈ M` for `0 ≤ x < 2` with denominator primes among `d(b_1)`, `d(c_1)`,
/// `q_2`, `q_3` and others. Since every `b_n, c_n > 1 − ε/4`, at most two of
/// them occur; and whenever the deepest index `N ≥ 4` occurs, `v_{q_N}`
/// forces `a_N`-multiplicity `≡ #{b_N, c_N}` (mod `q_N`), which lets
/// `b_N + a_N = b_{N−1}` (or `q_N a_N = q_2 a_2`) shorten the expression. So
/// `a_2, a_3, b_1..b_3, c_1..c_3` suffice.
fn brute_m(p: &CounterexampleParams, x: &Rational) -> bool {
    let bc: Vec<Rational> = (1..=3).flat_map(|n| [p.b(n), p.c(n)]).collect();
    let mut choices: Vec<Rational> = vec![Rational::zero()];
    for i in 0..bc.len() {
        choices.push(bc[i].clone());
        for j in i..bc.len() {
            choices.push(&bc[i] + &bc[j]);
        }
    }
    choices.into_iter().any(|c| c <= *x && brute_a(p, &(x - &c)))
}

fn random_denominator(rng: &mut ChaCha8Rng, primes: &[u64], cap: Option<u64>) -> BigInt {
    loop {
        let mut d = BigInt::one();
        for &pr in primes {
            if rng.gen_bool(0.4) {
                d *= pr;
            }
        }
        if cap.is_none_or(|c| d <= BigInt::from(c)) {
            return d;
        }
    }
}

fn criterion_11() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    // Members found by each oracle, out of the instances tried.
    let mut tally = [(0, 0); 3];
    for i in 0..200 {
        let (gens, l) = random_finite_instance(&mut rng);
        let x = Rational::new(rng.gen_range(0..=3 * l.to_u64().unwrap()), l.clone());
        let ints: Vec<u64> = gens.iter().map(|g| scaled(g, &l)).collect();
        let xs = scaled(&x, &l);
        let brute = reachable(&ints, xs).contains(&xs);
        let got = member_finite(&gens, &x).map_err(e2s)?;
        ensure(got.is_some() == brute, || format!("member_finite #{i}: {x} in ⟨{gens:?}⟩"))?;
        tally[0] = (tally[0].0 + usize::from(brute), tally[0].1 + 1);
        if let Some(c) = got {
            ensure(c.value(&gens).map_err(e2s)? == x, || format!("member_finite #{i}: certificate"))?;
        }
    }
    for i in 0..200 {
        let (gens, l) = random_finite_instance(&mut rng);
        let ints: Vec<u64> = gens.iter().map(|g| scaled(g, &l)).collect();
        let top = *ints.iter().max().unwrap();
        let r = reachable(&ints, top);
        let brute: BTreeSet<Rational> = gens
            .iter()
            .zip(&ints)
            .filter(|(_, &g)| !r.iter().any(|&y| y > 0 && y < g && r.contains(&(g - y))))
            .map(|(g, _)| g.clone())
            .collect();
        ensure(atoms_finite(&gens).map_err(e2s)? == brute, || format!("atoms_finite #{i}: {gens:?}"))?;
    }

    let p = params();
    let a_gens = |k: usize| p.a(k + 2);
    let m_spec = main_monoid(&p);
    let (q2, q3) = (p.q(2).to_u64().unwrap(), p.q(3).to_u64().unwrap());
    let (db, dc) = (p.d_b().to_u64().unwrap(), p.d_c().to_u64().unwrap());
    // Half the instances keep the denominator at most 5000, the rest go wider.
    for i in 0..400 {
        let cap = (i % 2 == 0).then_some(5000);
        let x = if rng.gen_bool(0.5) {
            let d = random_denominator(&mut rng, &[q2, q3, 3, q2], cap);
            Rational::new(rng.gen_range(0..d.to_u64().unwrap()), d)
        } else {
            (&Rational::new(rng.gen_range(0..q2), q2) + &Rational::new(rng.gen_range(0..q3), q3)).min(q("998/1000"))
        };
        let got = membership_a(&p, &x).map_err(e2s)?;
        ensure(got.is_member() == brute_a(&p, &x), || format!("membership_A #{i}: {x} ({got:?})"))?;
        tally[1] = (tally[1].0 + usize::from(got.is_member()), tally[1].1 + 1);
        if let Verdict::Member(c) = got {
            ensure(c.value_with(|k| Ok(a_gens(k))).map_err(e2s)? == x, || format!("membership_A #{i}: certificate"))?;
        }
    }
    for i in 0..400 {
        let cap = (i % 2 == 0).then_some(5000);
        let x = if rng.gen_bool(0.5) {
            let d = random_denominator(&mut rng, &[db, dc, q2, q3, 3], cap);
            let top = 2 * d.to_u64().unwrap();
            Rational::new(rng.gen_range(0..top), d)
        } else {
            // Generators of the depth-3 truncation; a_4 would leave the oracle's range.
            let pool: Vec<Rational> =
                (0..9).filter(|&k| k != 6).map(|k| MainGen::from_index(k).value(&p)).collect();
            let mut x = Rational::zero();
            for _ in 0..rng.gen_range(1..=4) {
                x += pool.choose(&mut rng).unwrap();
            }
            if rng.gen_bool(0.3) {
                x += &Rational::new(1, *[3u64, q2, db].choose(&mut rng).unwrap());
            }
            x
        };
        if x >= Rational::from_integer(2) {
            continue;
        }
        let got = membership_m(&p, &x).map_err(e2s)?;
        ensure(got.is_member() == brute_m(&p, &x), || format!("membership_M #{i}: {x} ({got:?})"))?;
        tally[2] = (tally[2].0 + usize::from(got.is_member()), tally[2].1 + 1);
        if let Verdict::Member(c) = got {
            ensure(c.value_with(|k| m_spec.generator(k)).map_err(e2s)? == x, || format!("membership_M #{i}: certificate"))?;
        }
    }
    ensure(tally[2].1 >= 200, || format!("only {} membership_M instances", tally[2].1))?;
    let [f, a, m] = tally;
    Ok(format!(
        "members/instances: finite {}/{}, A {}/{}, M {}/{}; 200 atom sets",
        f.0, f.1, a.0, a.1, m.0, m.1
    ))
}

fn criterion_12() -> Outcome {
    let p = params();
    let depth = 8;
    let lifted = main_lifted(depth)?;
    let amb = Ambient::lifted(lifted, depth + 2);
    let bounds = FactorBounds::new((2..depth + 2).map(|k| p.a(k)).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for field in [FieldSpec::Rationals, FieldSpec::prime_field(3).map_err(e2s)?] {
        for i in 0..50 {
            let g = random_small_polynomial(&p, &field, &amb, depth, &mut rng).map_err(e2s)?;
            let fd = furstenberg_divisor(&g, &p, depth)
                .map_err(e2s)?
                .ok_or_else(|| format!("{field} #{i}: inconclusive for {g}"))?;
            ensure(fd.divisor.mul(&fd.cofactor).map_err(e2s)? == g, || format!("{field} #{i}: product"))?;
            ensure(!fd.divisor.is_unit(), || format!("{field} #{i}: unit divisor"))?;
            ensure(irreducible_within(&fd.divisor, &bounds).map_err(e2s)?, || format!("{field} #{i}: reducible"))?;
            ensure(fd.divisor.certificates_verify() && fd.cofactor.certificates_verify(), || {
                format!("{field} #{i}: exponent certificates")
            })?;
        }
    }
    Ok("50 over q and 50 over fp:3, none inconclusive".into())
}

fn criterion_13() -> Outcome {
    let sc = Scenario::new(ScenarioName::MainTheorem, 10).map_err(e2s)?;
    let a = run(&sc).map_err(e2s)?.canonical_json();
    let b = run(&sc).map_err(e2s)?.canonical_json();
    ensure(a == b, || "reports differ".into())?;
    Ok(format!("{} bytes identical", a.len()))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { id: 1, name: "Grams atoms", limit: secs(5), run: criterion_1 },
        Criterion { id: 2, name: "Grams ACCP failure", limit: secs(5), run: criterion_2 },
        Criterion { id: 3, name: "decomposition uniqueness", limit: secs(60), run: criterion_3 },
        Criterion { id: 4, name: "projection divisibility", limit: secs(60), run: criterion_4 },
        Criterion { id: 5, name: "construction inequalities", limit: secs(30), run: criterion_5 },
        Criterion { id: 6, name: "unique additive factorization", limit: secs(60), run: criterion_6 },
        Criterion { id: 7, name: "non-2-MCD chain", limit: secs(120), run: criterion_7 },
        Criterion { id: 8, name: "atoms of the counterexample", limit: secs(60), run: criterion_8 },
        Criterion { id: 9, name: "claims 1 and 2", limit: secs(60), run: criterion_9 },
        Criterion { id: 10, name: "descent chain", limit: secs(30), run: criterion_10 },
        Criterion { id: 11, name: "oracle equivalence", limit: secs(120), run: criterion_11 },
        Criterion { id: 12, name: "Furstenberg divisors", limit: secs(60), run: criterion_12 },
        Criterion { id: 13, name: "determinism", limit: None, run: criterion_13 },
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for c in criteria.iter().filter(|c| filter.is_empty() || filter.contains(&c.id)) {
        let start = Instant::now();
        let outcome = (c.run)();
        let took = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if took > limit => Err(format!("took {took:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {:<30} {:>9.2?}  {msg}", c.id, c.name, took),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {:<30} {:>9.2?}  {msg}", c.id, c.name, took);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
