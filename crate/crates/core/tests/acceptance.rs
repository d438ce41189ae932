//! Acceptance criteria 1-10. Each test prints one `criterion N: PASS|FAIL`
//! line and fails iff the criterion does.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use freeqm::cochain::{
    coboundary, is_cocycle, letter_supported, make_test_cocycle, pseudorandom, sup_norm, Domain, EvalBudget,
};
use freeqm::decomp::{check_axiom_a, check_axiom_b, measure_r, Scheme};
use freeqm::primitive::{
    build_beta_with, certify_boundedness_with, check_form_equivalence, verify_primitive_identity, BetaRoute,
    BuildOptions,
};
use freeqm::qm::{defect, PieceWeights, Quasimorphism};
use freeqm::rational::{fmt_rational, Rational};
use freeqm::report::{build_case, standard_matrix, MATRIX_QMS};
use freeqm::words::{count_occurrences, enumerate_reduced, parse_word, CountMode, GroupCtx, Word};

const SCHEMES: [&str; 6] = ["brooks:w=ab", "brooks:w=abb", "brooks:w=aBAb", "rolli", "sms:w=aba", "sms:w=abba"];
const DECOMPOSABLE: [&str; 4] = ["brooks:w=ab", "brooks:w=abb", "brooks:w=aBAb", "rolli"];

fn ctx() -> GroupCtx {
    GroupCtx::new(2).unwrap()
}

fn w(s: &str) -> Word {
    parse_word(s, ctx()).unwrap()
}

fn report(n: usize, pass: bool, detail: &str) {
    println!("criterion {n}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn finish(n: usize, pass: bool, detail: String) {
    report(n, pass, &detail);
    assert!(pass, "criterion {n} failed: {detail}");
}

/// `R̂` of each scheme at a budget, in the order of `names`.
fn r_hats(names: &[&str], budget: usize) -> Vec<usize> {
    names
        .iter()
        .map(|d| {
            let s = Scheme::parse(d, ctx()).unwrap();
            measure_r(&s, d, ctx(), budget).r_hat
        })
        .collect()
}

/// `R̂` at budget 8 for the scheme behind each matrix qm.
fn matrix_r(qm: &str) -> usize {
    let b = build_case(ctx(), qm, "zero:k=1", 1, 8, 0, None).unwrap();
    b.r_used()
}

#[test]
fn criterion_01_coboundary_squares_to_zero() {
    let start = Instant::now();
    let mut worst = Rational::from_integer(0);
    let mut checked = 0;
    for domain in [Domain::Full, Domain::Aligned] {
        for degree in 0..=3 {
            for seed in 1..=3 {
                let f = pseudorandom(degree, seed, domain);
                let dd = coboundary(&coboundary(&f));
                let r = sup_norm(
                    &dd,
                    ctx(),
                    EvalBudget {
                        degree: degree + 2,
                        max_total_len: 5,
                    },
                )
                .unwrap();
                checked += r.tuples_checked;
                worst = worst.max(r.value);
            }
        }
    }
    let elapsed = start.elapsed();
    finish(
        1,
        worst == Rational::from_integer(0) && elapsed < Duration::from_secs(10),
        format!("max |δδf| = {} over {checked} tuples in {elapsed:.2?}", fmt_rational(&worst)),
    );
}

#[test]
fn criterion_02_brooks_oracle_equivalence() {
    let start = Instant::now();
    let sms = Quasimorphism::parse("sms:w=aba", ctx()).unwrap();
    let brooks = Quasimorphism::parse("brooks:w=ab", ctx()).unwrap();
    let (aba, ab) = (w("aba"), w("ab"));
    let mut words = 0;
    let mut mismatches = Vec::new();
    for g in enumerate_reduced(ctx(), 10) {
        words += 1;
        let big = Rational::from_integer(count_occurrences(&aba, &g, CountMode::Big).unwrap());
        if sms.eval(&g) != big {
            mismatches.push(format!("sms {g}"));
        }
        let b = count_occurrences(&ab, &g, CountMode::Big).unwrap();
        let s = count_occurrences(&ab, &g, CountMode::Small).unwrap();
        if brooks.eval(&g) != Rational::from_integer(b) || b != s {
            mismatches.push(format!("brooks {g}"));
        }
    }
    let elapsed = start.elapsed();
    finish(
        2,
        mismatches.is_empty() && elapsed < Duration::from_secs(60),
        format!(
            "{words} words, {} mismatches {:?} in {elapsed:.2?}",
            mismatches.len(),
            mismatches.iter().take(3).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_03_axiom_a() {
    let mut pass = true;
    let mut parts = Vec::new();
    for d in SCHEMES {
        let s = Scheme::parse(d, ctx()).unwrap();
        let r = check_axiom_a(&s, d, ctx(), 8);
        pass &= r.pass;
        let first = r
            .violations
            .first()
            .map(|v| format!(" e.g. {} {:?} expected {:?} got {:?}", v.word, v.clause, v.expected, v.got))
            .unwrap_or_default();
        println!("  {d}: {} violations over {} words{first}", r.violation_count, r.words_checked);
        parts.push(format!("{d}={}", r.violation_count));
    }
    finish(3, pass, format!("violations at budget 8: {}", parts.join(" ")));
}

#[test]
fn criterion_04_r_stability() {
    let r6 = r_hats(&SCHEMES, 6);
    let r8 = r_hats(&SCHEMES, 8);
    let r10 = r_hats(&SCHEMES, 10);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, d) in SCHEMES.iter().enumerate() {
        let s = Scheme::parse(d, ctx()).unwrap();
        let b = check_axiom_b(&s, d, ctx(), 10, r10[i]);
        let ok = r6[i] <= r8[i] && r8[i] <= r10[i] && r8[i] == r10[i] && b.pass;
        pass &= ok;
        parts.push(format!("{d}:{}/{}/{}{}", r6[i], r8[i], r10[i], if b.pass { "" } else { " B-fail" }));
    }
    finish(4, pass, format!("R̂ at 6/8/10: {}", parts.join(" ")));
}

#[test]
fn criterion_05_defect_bound() {
    let r8 = r_hats(&DECOMPOSABLE, 8);
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, d) in DECOMPOSABLE.iter().enumerate() {
        let qm = Quasimorphism::parse(d, ctx()).unwrap();
        let Quasimorphism::Decomposable { weights, .. } = &qm else {
            panic!("{d} is not decomposable")
        };
        let bound = Rational::from_integer(3 * r8[i] as i64) * weights.bound();
        let report = defect(&qm, ctx(), 8);
        pass &= report.d_hat <= bound;
        parts.push(format!("{d}: {} <= {}", fmt_rational(&report.d_hat), fmt_rational(&bound)));
    }
    finish(5, pass, parts.join(", "));
}

#[test]
fn criterion_06_crown_identity() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut tuples = 0;
    let cases = standard_matrix();
    for case in &cases {
        let b = build_case(ctx(), &case.qm, &case.omega, case.k, 6, 0, Some(0)).unwrap();
        let r = verify_primitive_identity(&b, 6);
        tuples += r.tuples_checked;
        if !r.pass {
            failures.push(format!("{} {} k={} residual {}", case.qm, case.omega, case.k, fmt_rational(&r.max_residual)));
        }
    }
    let elapsed = start.elapsed();
    finish(
        6,
        failures.is_empty() && elapsed < Duration::from_secs(600),
        format!(
            "{} cases, {tuples} tuples, {} nonzero residuals {:?} in {elapsed:.2?}",
            cases.len(),
            failures.len(),
            failures.first()
        ),
    );
}

#[test]
fn criterion_07_reduced_form_equivalence() {
    let mut failures = Vec::new();
    let mut tuples = 0;
    let cases = standard_matrix();
    for case in &cases {
        let b = build_case(ctx(), &case.qm, &case.omega, case.k, 6, 0, Some(0)).unwrap();
        let r = check_form_equivalence(&b, 6).unwrap();
        tuples += r.tuples_checked;
        if !r.pass {
            failures.push(format!(
                "{} {} k={} diff {} cancel {:?}",
                case.qm,
                case.omega,
                case.k,
                fmt_rational(&r.max_difference),
                r.cancel_witness
            ));
        }
    }
    finish(
        7,
        failures.is_empty(),
        format!("{} cases, {tuples} tuples, {} mismatches {:?}", cases.len(), failures.len(), failures.first()),
    );
}

#[test]
fn criterion_08_boundedness_certificate() {
    let mut pass = true;
    let mut failures = Vec::new();
    let mut worst_ratio: Option<(Rational, String)> = None;
    let r: Vec<usize> = MATRIX_QMS.iter().map(|q| matrix_r(q)).collect();
    let r_of = |qm: &str| r[MATRIX_QMS.iter().position(|q| *q == qm).unwrap()];

    for case in standard_matrix() {
        let b = build_case(ctx(), &case.qm, &case.omega, case.k, 8, 0, Some(r_of(&case.qm))).unwrap();
        let at8 = certify_boundedness_with(&b, 8, 8, BetaRoute::Definitional);
        let label = format!("{} {} k={}", case.qm, case.omega, case.k);
        if !at8.pass {
            pass = false;
            failures.push(format!("{label}: {} > {}", fmt_rational(&at8.sup_beta), fmt_rational(&at8.bound)));
        }
        if at8.bound > Rational::from_integer(0) {
            let ratio = at8.sup_beta / at8.bound;
            if worst_ratio.as_ref().is_none_or(|(r, _)| ratio > *r) {
                worst_ratio = Some((ratio, label.clone()));
            }
        }
        // no growth at budget 10 against the same budget-8 bound
        if case.k == 2 && (case.omega == "qmcobound:w=ba" || case.omega == "cobound:k=2:seed=1") {
            let at10 = certify_boundedness_with(&b, 10, 8, BetaRoute::Reduced);
            let ok = at10.sup_beta <= at8.bound && at10.sup_beta >= at8.sup_beta;
            println!(
                "  {label}: sup8 {} sup10 {} bound {}",
                fmt_rational(&at8.sup_beta),
                fmt_rational(&at10.sup_beta),
                fmt_rational(&at8.bound)
            );
            if !ok {
                pass = false;
                failures.push(format!("{label}: budget 10 sup {}", fmt_rational(&at10.sup_beta)));
            }
        }
    }
    let worst = worst_ratio
        .map(|(r, l)| format!("largest sup/bound {} at {l}", fmt_rational(&r)))
        .unwrap_or_default();
    finish(8, pass, format!("R̂ {:?}; {worst}; failures {:?}", r, failures));
}

/// The η weight mutations tried for a matrix qm: every piece value (or, in
/// triplet form, every triple value) occurring in decompositions of words
/// of length `<= 3`, shifted by one.
fn mutations(qm: &Quasimorphism) -> Vec<(String, PieceWeights)> {
    let mut out = Vec::new();
    match qm {
        Quasimorphism::Decomposable { scheme, weights } => {
            let mut pieces = BTreeSet::new();
            for g in enumerate_reduced(ctx(), 3) {
                for p in scheme.decompose(&g).pieces() {
                    if !pieces.contains(&p.inverse()) {
                        pieces.insert(p.clone());
                    }
                }
            }
            for p in pieces {
                let mut m = weights.clone();
                m.set_piece(&p, weights.piece(&p) + Rational::from_integer(1));
                out.push((format!("λ({p})"), m));
            }
        }
        Quasimorphism::SmsBrooks { scheme, weights } => {
            let mut triples = BTreeSet::new();
            for g in enumerate_reduced(ctx(), 4) {
                for t in scheme.decompose(&g).pieces().windows(3) {
                    let inv = [t[2].inverse(), t[1].inverse(), t[0].inverse()];
                    if !triples.contains(&inv) {
                        triples.insert([t[0].clone(), t[1].clone(), t[2].clone()]);
                    }
                }
            }
            for [a, b, c] in triples {
                let mut m = weights.clone();
                m.set_triple(&a, &b, &c, weights.triple(&a, &b, &c) + Rational::from_integer(1));
                out.push((format!("λ̃({a},{b},{c})"), m));
            }
        }
        _ => {}
    }
    out
}

#[test]
fn criterion_09_mutation_sensitivity() {
    let omega = make_test_cocycle("cobound:k=2:seed=1", ctx(), 0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for d in MATRIX_QMS {
        let qm = Quasimorphism::parse(d, ctx()).unwrap();
        if matches!(qm, Quasimorphism::Homomorphism { .. }) {
            // a shifted letter weight is another homomorphism φ' with
            // δφ' = δφ = 0, so the mutated β is still a primitive
            println!("  {d}: n/a (mutated weights define another homomorphism)");
            parts.push(format!("{d}: n/a"));
            continue;
        }
        let muts = mutations(&qm);
        let mut missed = Vec::new();
        for (label, weights) in &muts {
            let b = build_beta_with(
                ctx(),
                &qm,
                &omega,
                BuildOptions {
                    eta_weights: Some(weights.clone()),
                    r_used: Some(0),
                },
            )
            .unwrap();
            let r = verify_primitive_identity(&b, 6);
            if r.pass {
                missed.push(label.clone());
            }
        }
        println!("  {d}: {} of {} mutations detected; missed {:?}", muts.len() - missed.len(), muts.len(), missed);
        pass &= missed.is_empty() && !muts.is_empty();
        parts.push(format!("{d}: {}/{}", muts.len() - missed.len(), muts.len()));
    }
    finish(9, pass, format!("detected mutations: {}", parts.join(", ")));
}

#[test]
fn criterion_10_aligned_one_cocycle_rigidity() {
    let values = [-1, 0, 1].map(Rational::from_integer);
    let mut passing = Vec::new();
    let mut total = 0;
    for i in 0..81usize {
        let weights: Vec<Rational> = (0..4).map(|d| values[(i / 3usize.pow(d)) % 3]).collect();
        let f = letter_supported(ctx(), weights.clone()).unwrap();
        total += 1;
        if is_cocycle(&f, ctx(), 6).holds {
            passing.push(format!("({})", weights.iter().map(fmt_rational).collect::<Vec<_>>().join(",")));
        }
    }
    let only_zero = passing.len() == 1 && passing[0] == "(0/1,0/1,0/1,0/1)";
    finish(
        10,
        only_zero,
        format!("{} of {total} letter-supported assignments are cocycles: {}", passing.len(), passing.join(" ")),
    );
}
