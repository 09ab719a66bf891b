//! Checks for the lifted monoid of the main lift: small elements come from
//! `⟨A_ε⟩`, `2a_k` divides neither `b_1` nor `c_1`, and the atoms are `A_ε`
//! together with every `H_s`, `K_s`.

use rand::Rng;
use serde_json::json;

use super::deciders::{membership_a, membership_m, Verdict};
use super::lift::MainLift;
use super::params::CounterexampleParams;
use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::lifting::{classify_atom, decode_decomposition, AtomClass, Decoded, LiftedMonoid};
use crate::report::{Report, Status};

/// For `0 ≤ x ≤ 1/3`: if the decoder certifies `x ∈ M_φ`, then `x ∈ ⟨A_ε⟩`.
pub fn claim1_check(
    lifted: &LiftedMonoid,
    params: &CounterexampleParams,
    x: &Rational,
    depth: usize,
) -> Result<Report> {
    if x.is_negative() || x > &Rational::new(1, 3) {
        return Err(Error::Precondition(format!("{x} is outside [0, 1/3]")));
    }
    let mut report = Report::new(format!("small elements of M_phi lie in <A_eps>: {x}"));
    match decode_decomposition(lifted, x, depth)? {
        Decoded::Decomposed(d) => {
            let lifted_cert = d.lifted_certificate(lifted)?;
            match membership_a(params, x)? {
                Verdict::Member(a_cert) => report.witness(json!({
                    "x": x,
                    "verdict": "holds",
                    "lifted_certificate": lifted_cert.to_doc(x, &lifted.label()),
                    "a_certificate": a_cert.to_doc(x, "A_eps"),
                })),
                other => {
                    return Err(Error::Defect(format!("{x} is in M_phi but not in <A_eps>: {other:?}")))
                }
            }
        }
        Decoded::CertifiedOut(why) => report.witness(json!({"x": x, "verdict": "vacuous", "reason": why})),
        Decoded::Inconclusive(why) => {
            report.flag(Status::Inconclusive, json!({"x": x, "verdict": "inconclusive", "reason": why}))
        }
    }
    Ok(report)
}

/// A random element of `⟨a_2, …, a_{depth+1}⟩` below `1/3`: one to four
/// generators with multiplicities up to 3.
pub fn random_small_element<R: Rng>(params: &CounterexampleParams, depth: usize, rng: &mut R) -> Rational {
    let mut x = Rational::zero();
    for _ in 0..rng.gen_range(1..=4) {
        x += &params.a(rng.gen_range(2..depth + 2)).mul_int(rng.gen_range(1..=3u32));
    }
    x
}

/// `2a_k` divides neither `b_1` nor `c_1` in `M`, hence not in `M_φ`.
pub fn claim2_check(params: &CounterexampleParams, k: usize) -> Result<Report> {
    if k < 2 {
        return Err(Error::Precondition(format!("a_{k} does not exist")));
    }
    let two_a = params.a(k).mul_int(2);
    let mut report = Report::new(format!("2 a_{k} divides neither b1 nor c1"));
    for (name, target) in [("b1", &params.b1), ("c1", &params.c1)] {
        match membership_m(params, &(target - &two_a))? {
            Verdict::NonMember(why) => report.witness(json!({
                "k": k,
                "target": name,
                "difference": target - &two_a,
                "proof": why,
            })),
            other => return Err(Error::Defect(format!("2 a_{k} divides {name} in M: {other:?}"))),
        }
    }
    Ok(report)
}

/// Classifies `a_2 … a_{depth+1}`, `H_s`, `K_s` and `s` for the first `depth`
/// `S`-indices.
pub fn atoms_report(lifted: &LiftedMonoid, lift: &MainLift, depth: usize) -> Result<Report> {
    let params = &lift.params;
    let search = depth + 2;
    let mut report = Report::new(format!("atoms of the main-theorem lifted monoid on {depth} indices"));
    let expect = |report: &mut Report, x: &Rational, label: String, want: AtomClass| -> Result<()> {
        let got = classify_atom(lifted, x, search)?;
        let w = json!({"element": label, "value": x, "class": got});
        if got == want {
            report.witness(w);
        } else {
            report.flag(Status::Violation, json!({"expected": want, "found": w}));
        }
        Ok(())
    };
    for n in 2..depth + 2 {
        expect(&mut report, &params.a(n), format!("a_{n}"), AtomClass::AtomOfMNotS)?;
    }
    for row in lift.rows(depth) {
        let j = row.index;
        let (hh, kk) = (row.big_h(), row.big_k());
        expect(&mut report, &hh, format!("H[{j}]"), AtomClass::AtomOfMs)?;
        expect(&mut report, &kk, format!("K[{j}]"), AtomClass::AtomOfMs)?;
        expect(&mut report, &row.s, format!("s[{j}]"), AtomClass::NotAtom)?;
        let cert = lifted.n_certificate(j, &row.h)?.plus(&lifted.n_certificate(j, &row.k)?);
        if &hh + &kk == row.s && lifted.verify(&row.s, &cert) {
            report.witness(json!({
                "element": format!("s[{j}]"),
                "split": [hh, kk],
                "certificate": cert.to_doc(&row.s, &lifted.label()),
            }));
        } else {
            report.flag(Status::Violation, json!({"element": format!("s[{j}]"), "split": "H + K ≠ s"}));
        }
    }
    Ok(report)
}
