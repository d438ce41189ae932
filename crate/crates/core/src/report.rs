//! The end-to-end primitive verification run and the standard test matrix.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::cochain::{is_cocycle, make_test_cocycle, CocycleReport};
use crate::decomp::measure_r;
use crate::error::{Error, Result};
use crate::primitive::{
    build_beta_with, certify_boundedness, check_form_equivalence, verify_primitive_identity, BoundReport,
    BuildOptions, FormReport, PrimitiveBundle, ResidualReport,
};
use crate::qm::Quasimorphism;
use crate::rational::{self, Rational};
use crate::words::GroupCtx;

/// One `(qm, ω, k)` combination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MatrixCase {
    pub qm: String,
    pub omega: String,
    pub k: usize,
}

pub const MATRIX_QMS: [&str; 4] = ["brooks:w=ab", "rolli", "sms:w=aba", "hom:a=1"];

/// The standard matrix: every qm of [`MATRIX_QMS`] against `zero:k` and
/// `cobound:k` with seeds 1..3 for `k = 1..4`, `qmcobound:w=ba` at `k = 2`
/// and the cup of two of those at `k = 4`.
pub fn standard_matrix() -> Vec<MatrixCase> {
    let mut cases = Vec::new();
    for qm in MATRIX_QMS {
        for k in 1..=4 {
            let mut omegas = vec![format!("zero:k={k}")];
            omegas.extend((1..=3).map(|s| format!("cobound:k={k}:seed={s}")));
            if k == 2 {
                omegas.push("qmcobound:w=ba".into());
            }
            if k == 4 {
                omegas.push("cup:qmcobound:w=ba+qmcobound:w=ba".into());
            }
            cases.extend(omegas.into_iter().map(|omega| MatrixCase {
                qm: qm.to_string(),
                omega,
                k,
            }));
        }
    }
    cases
}

/// Report of one verification run.
#[derive(Debug, Clone, Serialize)]
pub struct PrimitiveRun {
    pub qm: String,
    pub omega_spec: String,
    pub k: usize,
    pub budget: usize,
    pub tuples_checked: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub max_residual: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub sup_beta: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub bound: Rational,
    #[serde(rename = "R_hat")]
    pub r_hat: usize,
    pub pass: bool,
    pub runtime_ms: Option<u64>,
    pub omega_cocycle: CocycleReport,
    pub identity: ResidualReport,
    pub forms: FormReport,
    pub boundedness: BoundReport,
}

/// Builds the bundle for a `(qm, ω, k)` case. `r_used` defaults to `R̂` at
/// the given budget.
pub fn build_case(
    ctx: GroupCtx,
    qm: &str,
    omega: &str,
    k: usize,
    budget: usize,
    seed: u64,
    r_used: Option<usize>,
) -> Result<PrimitiveBundle> {
    let phi = Quasimorphism::parse(qm, ctx)?;
    let omega_cochain = make_test_cocycle(omega, ctx, seed)?;
    if omega_cochain.degree() != k {
        return Err(Error::Degree {
            expected: k,
            got: omega_cochain.degree(),
        });
    }
    let bundle = build_beta_with(
        ctx,
        &phi,
        &omega_cochain,
        BuildOptions {
            eta_weights: None,
            r_used: Some(0),
        },
    )?;
    let r = match r_used {
        Some(r) => r,
        None => {
            let scheme = bundle.scheme();
            measure_r(scheme, &scheme.descriptor(), ctx, budget).r_hat
        }
    };
    Ok(bundle.with_r_used(r))
}

/// Runs the identity check, the form equivalence and the boundedness
/// certificate for one bundle. Passes iff all three pass.
pub fn run_bundle(bundle: &PrimitiveBundle, omega: &str, budget: usize, timing: bool) -> Result<PrimitiveRun> {
    let start = Instant::now();
    let cocycle = is_cocycle(bundle.omega(), bundle.ctx(), budget);
    let identity = verify_primitive_identity(bundle, budget);
    let forms = check_form_equivalence(bundle, budget)?;
    let bounded = certify_boundedness(bundle, budget);
    Ok(PrimitiveRun {
        qm: bundle.qm().descriptor(),
        omega_spec: omega.to_string(),
        k: bundle.k(),
        budget,
        tuples_checked: identity.tuples_checked,
        max_residual: identity.max_residual,
        sup_beta: bounded.sup_beta,
        bound: bounded.bound,
        r_hat: bundle.r_used(),
        pass: identity.pass && forms.pass && bounded.pass,
        runtime_ms: timing.then(|| start.elapsed().as_millis() as u64),
        omega_cocycle: cocycle,
        identity,
        forms,
        boundedness: bounded,
    })
}

pub fn run_primitive(
    ctx: GroupCtx,
    qm: &str,
    omega: &str,
    k: usize,
    budget: usize,
    seed: u64,
    timing: bool,
) -> Result<PrimitiveRun> {
    let bundle = build_case(ctx, qm, omega, k, budget, seed, None)?;
    run_bundle(&bundle, omega, budget, timing)
}

#[derive(Debug, Clone, Serialize)]
pub struct MatrixReport {
    pub budget: usize,
    pub cases: usize,
    pub failures: usize,
    pub pass: bool,
    pub runs: Vec<PrimitiveRun>,
}

/// Runs every case of the standard matrix, measuring `R̂` once per qm.
pub fn run_matrix(ctx: GroupCtx, budget: usize, seed: u64, timing: bool) -> Result<MatrixReport> {
    let mut r_cache: HashMap<String, usize> = HashMap::new();
    let mut runs = Vec::new();
    for case in standard_matrix() {
        let r = match r_cache.get(&case.qm) {
            Some(r) => *r,
            None => {
                let bundle = build_case(ctx, &case.qm, &case.omega, case.k, budget, seed, None)?;
                r_cache.insert(case.qm.clone(), bundle.r_used());
                bundle.r_used()
            }
        };
        let bundle = build_case(ctx, &case.qm, &case.omega, case.k, budget, seed, Some(r))?;
        runs.push(run_bundle(&bundle, &case.omega, budget, timing)?);
    }
    let failures = runs.iter().filter(|r| !r.pass).count();
    Ok(MatrixReport {
        budget,
        cases: runs.len(),
        failures,
        pass: failures == 0,
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_shape() {
        let m = standard_matrix();
        assert_eq!(m.len(), 4 * 18);
        assert!(m.iter().any(|c| c.omega == "qmcobound:w=ba" && c.k == 2));
    }

    #[test]
    fn primitive_examples() {
        let ctx = GroupCtx::new(2).unwrap();
        let run = run_primitive(ctx, "brooks:w=ab", "qmcobound:w=ba", 2, 5, 0, false).unwrap();
        assert!(run.pass);
        assert_eq!(rational::fmt_rational(&run.max_residual), "0/1");
        assert!(run.runtime_ms.is_none());
        assert!(run_primitive(ctx, "zero", "zero:k=2", 2, 4, 0, false).unwrap().pass);
        assert!(matches!(
            run_primitive(ctx, "zero", "zero:k=2", 3, 4, 0, false),
            Err(Error::Degree { .. })
        ));
    }
}
