//! Named verification suites. Each scenario runs a fixed list of checks and
//! produces a canonical JSON report plus a CSV summary.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::counterexample::{
    atoms_report, build_main_lift, claim1_check, claim2_check, improvement_chain,
    random_small_element, strongly_atomic_lifting_function, CounterexampleParams, ParamsOverrides,
};
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::lifting::examples::{antimatter, dyadic_unit, grams};
use crate::lifting::sampling::{projection_divisibility_trial, random_certificate_pair};
use crate::lifting::{
    accp_chain_probe, canonical_decomposition, classify_atom, validate_lifting_function, AtomClass,
    LiftedMonoid, LiftingFunction,
};
use crate::monalg::{
    bounded_factor_search, descent_chain, furstenberg_divisor, irreducible_within, random_small_polynomial, Ambient,
    FactorBounds, FieldSpec, MonoidPolynomial,
};
use crate::puiseux::atoms_finite;
use crate::report::{Report, Status};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioName {
    Grams,
    Antimatter,
    StronglyAtomic,
    MainTheorem,
    Furstenberg,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 5] = [
        ScenarioName::Grams,
        ScenarioName::Antimatter,
        ScenarioName::StronglyAtomic,
        ScenarioName::MainTheorem,
        ScenarioName::Furstenberg,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScenarioName::Grams => "grams",
            ScenarioName::Antimatter => "antimatter",
            ScenarioName::StronglyAtomic => "strongly-atomic",
            ScenarioName::MainTheorem => "main-theorem",
            ScenarioName::Furstenberg => "furstenberg",
        }
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScenarioName::ALL
            .into_iter()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown scenario {s:?}")))
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: ScenarioName,
    pub depth: usize,
    pub field: FieldSpec,
    pub overrides: Option<ParamsOverrides>,
    /// Only affects random sampling, never constructions.
    pub seed: u64,
}

impl Scenario {
    pub fn new(name: ScenarioName, depth: usize) -> Result<Self> {
        if depth < 2 {
            return Err(Error::Config(format!("depth must be at least 2, got {depth}")));
        }
        Ok(Scenario { name, depth, field: FieldSpec::Rationals, overrides: None, seed: 0 })
    }

    pub fn with_field(mut self, field: FieldSpec) -> Self {
        self.field = field;
        self
    }

    pub fn with_overrides(mut self, overrides: ParamsOverrides) -> Self {
        self.overrides = Some(overrides);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    fn params(&self) -> Result<CounterexampleParams> {
        match &self.overrides {
            Some(o) => CounterexampleParams::with_overrides(o),
            None => crate::counterexample::build_default_params(),
        }
        .map_err(|e| Error::Config(e.to_string()))
    }

    /// A generator seeded per check, so adding a check never shifts the
    /// samples of another.
    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ salt)
    }
}

/// One row of a run: a module operation applied to the scenario's objects.
#[derive(Clone, Debug)]
pub struct Check {
    pub id: String,
    /// The statement the check instantiates.
    pub anchor: String,
    /// Failure would contradict a theorem; bounded searches are not.
    pub theorem_backed: bool,
    pub report: Report,
}

impl Check {
    fn new(id: &str, anchor: &str, theorem_backed: bool, outcome: Result<Report>) -> Self {
        let report = outcome.unwrap_or_else(|e| {
            let mut r = Report::new(format!("{id} aborted"));
            let status = if theorem_backed { Status::Violation } else { Status::Inconclusive };
            r.flag(status, json!({"error": e.to_string()}));
            r
        });
        Check { id: id.into(), anchor: anchor.into(), theorem_backed, report }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "anchor": self.anchor,
            "theorem_backed": self.theorem_backed,
            "status": self.report.status,
            "summary": self.report.summary,
            "witnesses": self.report.witnesses,
        })
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub scenario: Scenario,
    pub params: Option<Value>,
    pub checks: Vec<Check>,
}

impl RunResult {
    pub fn status(&self) -> Status {
        self.checks.iter().fold(Status::Ok, |s, c| s.and(c.report.status))
    }

    /// No theorem-backed check failed; inconclusive searches do not count.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.report.status != Status::Violation)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scenario": self.scenario.name.as_str(),
            "depth": self.scenario.depth,
            "field": self.scenario.field.to_string(),
            "seed": self.scenario.seed,
            "params": self.params,
            "status": self.status(),
            "passed": self.passed(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
        })
    }

    /// Pretty-printed with sorted keys and a trailing newline.
    pub fn canonical_json(&self) -> String {
        canonical(&self.to_json())
    }

    pub fn csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record(["check_id", "anchor", "status", "witness_file"]).map_err(io)?;
        for c in &self.checks {
            w.write_record([&c.id, &c.anchor, c.report.status.as_str(), &witness_file(&c.id)])
                .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }
}

fn canonical(v: &Value) -> String {
    // serde_json's map is ordered by key, so this is already canonical.
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn witness_file(id: &str) -> String {
    format!("witnesses/{id}.json")
}

/// Writes `report.json`, `summary.csv` and one witness file per check.
pub fn emit_report(result: &RunResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir.join("witnesses"))?;
    let mut written = Vec::new();
    let mut put = |rel: String, body: String| -> Result<()> {
        let path = dir.join(rel);
        fs::write(&path, body)?;
        written.push(path);
        Ok(())
    };
    put("report.json".into(), result.canonical_json())?;
    put("summary.csv".into(), result.csv()?)?;
    for c in &result.checks {
        put(witness_file(&c.id), canonical(&c.to_json()))?;
    }
    Ok(written)
}

/// Runs every check of the scenario. `Err` only for configuration problems.
pub fn run(scenario: &Scenario) -> Result<RunResult> {
    let (params, checks) = match scenario.name {
        ScenarioName::Grams => (None, grams_checks(scenario)?),
        ScenarioName::Antimatter => (None, antimatter_checks(scenario)?),
        ScenarioName::StronglyAtomic => {
            let p = scenario.params()?;
            (Some(p.to_json(scenario.depth)), strongly_atomic_checks(scenario, &p)?)
        }
        ScenarioName::MainTheorem => {
            let p = scenario.params()?;
            (Some(p.to_json(scenario.depth)), main_theorem_checks(scenario, &p)?)
        }
        ScenarioName::Furstenberg => {
            let p = scenario.params()?;
            (Some(p.to_json(scenario.depth)), furstenberg_checks(scenario, &p)?)
        }
    };
    Ok(RunResult { scenario: scenario.clone(), params, checks })
}

/// Random elements certified twice must decompose identically.
pub const DECOMPOSITION_SAMPLES: usize = 100;
pub const PROJECTION_SAMPLES: usize = 100;

fn lifted_for(phi: LiftingFunction, depth: usize) -> Result<LiftedMonoid> {
    LiftedMonoid::new(phi, depth).map_err(|e| Error::Config(e.to_string()))
}

fn validation(phi: &LiftingFunction, depth: usize) -> Result<Report> {
    Ok(validate_lifting_function(phi, depth))
}

fn uniqueness(lifted: &LiftedMonoid, depth: usize, samples: usize, rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut report = Report::new(format!("{samples} elements certified twice decompose identically"));
    let mut mismatches = 0;
    for _ in 0..samples {
        let pair = random_certificate_pair(lifted, depth, rng)?;
        let a = canonical_decomposition(lifted, &pair.value, &pair.first)?;
        let b = canonical_decomposition(lifted, &pair.value, &pair.second)?;
        if a != b {
            mismatches += 1;
            report.flag(
                Status::Violation,
                json!({"value": pair.value, "first": a.to_json("M"), "second": b.to_json("M")}),
            );
        }
    }
    report.witness(json!({"samples": samples, "mismatches": mismatches}));
    Ok(report)
}

fn projections(lifted: &LiftedMonoid, depth: usize, samples: usize, rng: &mut ChaCha8Rng) -> Result<Report> {
    let mut report = Report::new(format!("{samples} random divisibilities project to the base monoid"));
    let mut with_carry = 0;
    for _ in 0..samples {
        let check = projection_divisibility_trial(lifted, depth, rng)?;
        with_carry += usize::from(!check.part2.is_empty());
    }
    report.witness(json!({"samples": samples, "with_second_part": with_carry}));
    Ok(report)
}

fn expect_class(report: &mut Report, lifted: &LiftedMonoid, x: &Rational, label: String, want: AtomClass, depth: usize) -> Result<()> {
    let got = classify_atom(lifted, x, depth)?;
    let w = json!({"element": label, "value": x, "class": got});
    if got == want {
        report.witness(w);
    } else {
        report.flag(Status::Violation, json!({"expected": want, "found": w}));
    }
    Ok(())
}

fn grams_checks(sc: &Scenario) -> Result<Vec<Check>> {
    let d = sc.depth;
    let phi = grams();
    let lifted = lifted_for(phi.clone(), d + 2)?;
    let atoms = || -> Result<Report> {
        let gens = lifted.generators(d);
        let found = atoms_finite(&gens)?;
        let mut r = Report::new(format!("atoms of the first {d} lifted generators"));
        let expected: std::collections::BTreeSet<Rational> = gens.iter().cloned().collect();
        let w = json!({"generators": gens, "atoms": found});
        if found == expected {
            r.witness(w);
        } else {
            r.flag(Status::Violation, w);
        }
        Ok(r)
    };
    let chain = || -> Result<Report> {
        let steps: Vec<Rational> = (1..=d).map(dyadic_unit).collect();
        Ok(accp_chain_probe(&lifted, &Rational::one(), &steps, d + 2)?.to_report(&lifted))
    };
    Ok(vec![
        Check::new("grams.validate", "lifting function conditions", true, validation(&phi, d)),
        Check::new("grams.atoms", "atoms of Grams' monoid", true, atoms()),
        Check::new("grams.accp", "Grams' monoid fails ACCP", true, chain()),
        Check::new(
            "grams.decomposition",
            "unique lifting decomposition",
            true,
            uniqueness(&lifted, d.min(8), DECOMPOSITION_SAMPLES, &mut sc.rng(1)),
        ),
        Check::new(
            "grams.projection",
            "projections respect divisibility",
            true,
            projections(&lifted, d.min(8), PROJECTION_SAMPLES, &mut sc.rng(2)),
        ),
    ])
}

fn antimatter_checks(sc: &Scenario) -> Result<Vec<Check>> {
    let d = sc.depth;
    let phi = antimatter();
    let lifted = lifted_for(phi.clone(), d)?;
    // Atoms of `M_φ` are the `t_n = (s_n/p_n)·p_{n+1}` (the dyadic monoid has
    // none), and every `t_n > 1`, so `1/2` is not a sum of atoms.
    let not_atomic = || -> Result<Report> {
        let mut r = Report::new("1/2 lies below every atom");
        for n in 0..d {
            let s = phi.s.get(n);
            let t = s.lifted_generator(1);
            if t <= Rational::one() {
                r.flag(Status::Violation, json!({"index": n, "atom": t, "reason": "not above 1"}));
            }
            expect_class(&mut r, &lifted, &t, format!("t[{n}]"), AtomClass::AtomOfMs, d + 2)?;
        }
        let half = Rational::new(1, 2);
        expect_class(&mut r, &lifted, &half, "1/2".into(), AtomClass::NotAtom, d + 2)?;
        Ok(r)
    };
    Ok(vec![
        Check::new("antimatter.validate", "lifting function conditions", true, validation(&phi, d)),
        Check::new("antimatter.not_atomic", "antimatter lifting is not atomic", true, not_atomic()),
        Check::new(
            "antimatter.decomposition",
            "unique lifting decomposition",
            true,
            uniqueness(&lifted, d.min(6), DECOMPOSITION_SAMPLES, &mut sc.rng(1)),
        ),
    ])
}

fn strongly_atomic_checks(sc: &Scenario, params: &CounterexampleParams) -> Result<Vec<Check>> {
    let d = sc.depth;
    let phi = strongly_atomic_lifting_function(params);
    let lifted = lifted_for(phi.clone(), d)?;
    let atoms = || -> Result<Report> {
        let mut r = Report::new(format!("s/pi(s) are atoms and s is not, for {d} generators"));
        for i in 0..d {
            let s = phi.s.get(i);
            expect_class(&mut r, &lifted, &s.unit(), format!("s[{i}]/pi"), AtomClass::AtomOfMs, d + 2)?;
            expect_class(&mut r, &lifted, &s.value, format!("s[{i}]"), AtomClass::NotAtom, d + 2)?;
        }
        Ok(r)
    };
    let mcd = || -> Result<Report> {
        let chain = improvement_chain(params, d)?;
        let mut r = Report::new(format!("{d} strictly increasing common divisors of b1, c1 in the lifted monoid"));
        for (i, cd) in chain.iter().enumerate() {
            let mut lifted_ok = true;
            let mut docs = Vec::new();
            for w in &cd.witnesses {
                let cert = lifted.lift_base_certificate(&w.certificate)?;
                lifted_ok &= lifted.verify(&w.quotient, &cert);
                docs.push(cert.to_doc(&w.quotient, &lifted.label()));
            }
            let w = json!({"step": i + 1, "divisor": cd.value, "certificates": docs});
            if lifted_ok && cd.verify(params) {
                r.witness(w);
            } else {
                r.flag(Status::Violation, w);
            }
        }
        Ok(r)
    };
    Ok(vec![
        Check::new("strongly_atomic.validate", "lifting function conditions", true, validation(&phi, d)),
        Check::new("strongly_atomic.atoms", "s/pi(s) atoms of the N0 lifting", true, atoms()),
        Check::new("strongly_atomic.mcd", "lifting monoid is not strongly atomic", true, mcd()),
        Check::new(
            "strongly_atomic.decomposition",
            "unique lifting decomposition",
            true,
            uniqueness(&lifted, d.min(6), DECOMPOSITION_SAMPLES, &mut sc.rng(1)),
        ),
    ])
}

/// Steps of the common-divisor chain and length of the descent.
pub const MCD_CHAIN_STEPS: usize = 25;
pub const DESCENT_STEPS: usize = 15;
pub const CLAIM1_SAMPLES: usize = 50;

fn main_theorem_checks(sc: &Scenario, params: &CounterexampleParams) -> Result<Vec<Check>> {
    let d = sc.depth;
    let table_depth = d.max(20);
    let lift = build_main_lift(params, table_depth).map_err(|e| Error::Config(e.to_string()))?;
    let phi = lift.lifting_function();
    let lifted = lifted_for(phi.clone(), d)?;
    let tables = || -> Result<Report> {
        let mut r = Report::new(format!("lift tables satisfy every inequality on {table_depth} rows"));
        r.witness(json!({"rows": lift.to_json(d), "checked_rows": table_depth}));
        Ok(r)
    };
    let claim1 = || -> Result<Report> {
        let mut rng = sc.rng(3);
        let mut r = Report::new(format!("{CLAIM1_SAMPLES} small elements"));
        let mut xs: Vec<Rational> = (0..CLAIM1_SAMPLES).map(|_| random_small_element(params, d, &mut rng)).collect();
        xs.push(Rational::new(1, 3));
        for x in xs {
            let c = claim1_check(&lifted, params, &x, d + 2)?;
            r.status = r.status.and(c.status);
            r.witnesses.extend(c.witnesses);
        }
        Ok(r)
    };
    let claim2 = || -> Result<Report> {
        let mut r = Report::new(format!("2 a_k divides neither b1 nor c1 for k = 2..{}", d + 1));
        for k in 2..d + 2 {
            r.witnesses.extend(claim2_check(params, k)?.witnesses);
        }
        Ok(r)
    };
    let mcd = || -> Result<Report> {
        let chain = improvement_chain(params, MCD_CHAIN_STEPS)?;
        let mut r = Report::new(format!("{} strictly increasing common divisors of b1, c1", chain.len()));
        for (i, cd) in chain.iter().enumerate() {
            let w = json!({"step": i + 1, "divisor": cd.to_json()});
            if cd.verify(params) {
                r.witness(w);
            } else {
                r.flag(Status::Violation, w);
            }
        }
        Ok(r)
    };
    let factor_search = || -> Result<Report> {
        let amb = Ambient::main(params);
        let x = |e: Rational| MonoidPolynomial::x_pow(sc.field.clone(), amb.clone(), e);
        let f = x(params.b1.clone())?.add(&x(params.c1.clone())?)?;
        let bounds = FactorBounds::new((2..d.min(6) + 2).map(|k| params.a(k)).collect());
        Ok(bounded_factor_search(&f, &bounds))
    };
    Ok(vec![
        Check::new("main.tables", "construction inequalities", true, tables()),
        Check::new("main.validate", "lifting function conditions", true, validation(&phi, d)),
        Check::new("main.atoms", "atoms of the lifted counterexample", true, atoms_report(&lifted, &lift, d)),
        Check::new("main.claim1", "small elements lie in <A_eps>", true, claim1()),
        Check::new("main.claim2", "2a does not divide b1 or c1", true, claim2()),
        Check::new("main.mcd_chain", "M is not 2-MCD", true, mcd()),
        Check::new(
            "main.descent",
            "X^b1 + X^c1 has no factorization into irreducibles",
            true,
            descent_chain(params, &sc.field, DESCENT_STEPS),
        ),
        Check::new(
            "main.decomposition",
            "unique lifting decomposition",
            true,
            uniqueness(&lifted, 6, DECOMPOSITION_SAMPLES, &mut sc.rng(1)),
        ),
        Check::new(
            "main.projection",
            "projections respect divisibility",
            true,
            projections(&lifted, 6, PROJECTION_SAMPLES, &mut sc.rng(2)),
        ),
        Check::new("main.factor_search", "bounded factorization evidence", false, factor_search()),
    ])
}

pub const FURSTENBERG_SAMPLES: usize = 50;

fn furstenberg_checks(sc: &Scenario, params: &CounterexampleParams) -> Result<Vec<Check>> {
    let d = sc.depth;
    let lift = build_main_lift(params, d).map_err(|e| Error::Config(e.to_string()))?;
    let lifted = lifted_for(lift.lifting_function(), d)?;
    let amb = Ambient::lifted(lifted, d + 2);
    let bounds = FactorBounds::new((2..d + 2).map(|k| params.a(k)).collect());
    let certify = |g: &MonoidPolynomial, r: &mut Report| -> Result<()> {
        match furstenberg_divisor(g, params, d)? {
            Some(fd) => {
                let ok = fd.divisor.mul(&fd.cofactor)? == *g
                    && irreducible_within(&fd.divisor, &bounds)?
                    && fd.divisor.certificates_verify();
                let w = json!({"g": g.to_json(), "result": fd.to_json()});
                if ok {
                    r.witness(w);
                } else {
                    r.flag(Status::Violation, w);
                }
            }
            None => r.flag(Status::Inconclusive, json!({"g": g.to_json(), "reason": "bounds exhausted"})),
        }
        Ok(())
    };
    let random = || -> Result<Report> {
        let mut rng = sc.rng(4);
        let mut r = Report::new(format!("{FURSTENBERG_SAMPLES} random small-degree nonunits over {}", sc.field));
        for _ in 0..FURSTENBERG_SAMPLES {
            let g = random_small_polynomial(params, &sc.field, &amb, d, &mut rng)?;
            certify(&g, &mut r)?;
        }
        Ok(r)
    };
    let examples = || -> Result<Report> {
        let mut r = Report::new("fixed small-degree examples");
        let x = |e: Rational| MonoidPolynomial::x_pow(sc.field.clone(), amb.clone(), e);
        let a2 = params.a(2);
        let one = MonoidPolynomial::one(sc.field.clone(), amb.clone());
        for g in [x(a2.clone())?, x(a2.mul_int(2))?.add(&x(a2.clone())?)?, x(a2)?.add(&one)?] {
            certify(&g, &mut r)?;
        }
        Ok(r)
    };
    Ok(vec![
        Check::new("furstenberg.random", "small-degree elements have irreducible divisors", true, random()),
        Check::new("furstenberg.examples", "small-degree elements have irreducible divisors", true, examples()),
    ])
}
