//! The explicit primitive `β = φ∪ω + δη` of `δφ∪ω` for Δ-decomposable and
//! triplet-form Brooks quasimorphisms, its reduced three-sum evaluation,
//! exact verification of `δβ = δφ∪ω`, and the boundedness certificate.

use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use crate::cochain::{coboundary_at, domain_tuples, sup_over, Cochain, Domain, EvalBudget, NormReport};
use crate::decomp::{measure_r, triangle, triangle_from_parts, PieceSeq, Scheme, Triangle};
use crate::error::{Error, Result};
use crate::qm::{PieceWeights, Quasimorphism};
use crate::rational::{self, Rational};
use crate::words::{is_aligned, is_selfoverlapping, print_word, CountMode, GroupCtx, Word};

/// Budget used to measure `R` when a bundle is built without one.
pub const DEFAULT_R_BUDGET: usize = 8;

/// How η weighs positions of a decomposition: single pieces, or windows of
/// three consecutive pieces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaForm {
    Pieces,
    Triplets,
}

impl EtaForm {
    fn window(self) -> usize {
        match self {
            EtaForm::Pieces => 1,
            EtaForm::Triplets => 3,
        }
    }
}

/// Shared evaluation state for η and the reduced form of β.
struct Engine {
    scheme: Scheme,
    form: EtaForm,
    weights: PieceWeights,
    omega: Cochain,
}

/// `suffixes[i]` is the product of `pieces[i..]`.
fn suffix_products(seq: &PieceSeq) -> Vec<Word> {
    let pieces = seq.pieces();
    let mut out = vec![Word::identity(); pieces.len() + 1];
    for i in (0..pieces.len()).rev() {
        out[i] = pieces[i].concat(&out[i + 1]);
    }
    out
}

impl Engine {
    /// Weight of the window starting at position `j` (1-based).
    fn weight(&self, pieces: &[Word], j: usize) -> Rational {
        match self.form {
            EtaForm::Pieces => self.weights.piece(&pieces[j - 1]),
            EtaForm::Triplets => self.weights.triple(&pieces[j - 1], &pieces[j], &pieces[j + 1]),
        }
    }

    /// Number of window positions in a sequence of `n` pieces.
    fn positions(&self, n: usize) -> usize {
        (n + 1).saturating_sub(self.form.window())
    }

    /// `ω(head, rest…)`.
    fn omega_at(&self, head: Word, rest: &[Word]) -> Rational {
        let mut args = Vec::with_capacity(rest.len() + 1);
        args.push(head);
        args.extend_from_slice(rest);
        self.omega.eval(&args)
    }

    fn eta(&self, args: &[Word]) -> Rational {
        let (g, rest) = (&args[0], &args[1..]);
        let seq = self.scheme.decompose(g);
        let suffixes = suffix_products(&seq);
        let w = self.form.window();
        let mut total = Rational::zero();
        for j in 1..=self.positions(seq.len()) {
            let lambda = self.weight(seq.pieces(), j);
            if !lambda.is_zero() {
                total += lambda * self.omega_at(suffixes[j + w - 1].clone(), rest);
            }
        }
        total
    }

    /// Term `j` of one of the three sums: `weight_j · ω(z·tail, rest…)`.
    fn term(&self, seq: &PieceSeq, suffixes: &[Word], j: usize, tail: Option<&Word>, rest: &[Word]) -> Rational {
        let lambda = self.weight(seq.pieces(), j);
        if lambda.is_zero() {
            return lambda;
        }
        let z = &suffixes[j + self.form.window() - 1];
        let head = match tail {
            Some(h) => z.concat(h),
            None => z.clone(),
        };
        lambda * self.omega_at(head, rest)
    }

    fn sums(&self, t: &Triangle, h1: &Word, rest: &[Word]) -> ThreeSums {
        let w = self.form.window();
        let (k, kp, l, m) = (t.k(), t.k_prime(), t.l(), t.m());
        let c3 = t.c3.len();
        let (sg, sh, sgh) = (suffix_products(&t.dg), suffix_products(&t.dh), suffix_products(&t.dgh));

        let term1 = |j| self.term(&t.dg, &sg, j, Some(h1), rest);
        let term2 = |j| self.term(&t.dh, &sh, j, None, rest);
        let term3 = |j| self.term(&t.dgh, &sgh, j, None, rest);

        let lo = (kp + 2).saturating_sub(w).max(1);
        let hi1 = self.positions(k);
        let hi2 = self.positions(l).min(l - c3);
        let hi3 = self.positions(m).min(m - c3);

        let sum = |f: &dyn Fn(usize) -> Rational, a: usize, b: usize| -> Rational {
            (a..=b).map(f).sum()
        };
        let reduced = sum(&term1, lo, hi1) + sum(&term2, 1, hi2) - sum(&term3, lo, hi3);
        let full = sum(&term1, 1, hi1) + sum(&term2, 1, self.positions(l)) - sum(&term3, 1, self.positions(m));

        let mut mismatch = None;
        for j in 1..lo.min(hi1 + 1) {
            if term1(j) != term3(j) {
                mismatch.get_or_insert(CancelMismatch::Head { j });
            }
        }
        for j in hi2 + 1..=self.positions(l) {
            let jj = j + m - l;
            if term2(j) != term3(jj) {
                mismatch.get_or_insert(CancelMismatch::Tail { j, paired: jj });
            }
        }
        // the excluded terms of the third sum are exactly the paired ones
        let head_count = lo.saturating_sub(1).min(hi1);
        let tail_count = self.positions(l) - hi2.min(self.positions(l));
        let excluded3 = self.positions(m) - (hi3 + 1).saturating_sub(lo);
        if head_count + tail_count != excluded3 {
            mismatch.get_or_insert(CancelMismatch::Count {
                expected: excluded3,
                got: head_count + tail_count,
            });
        }
        ThreeSums {
            reduced,
            full,
            mismatch,
            ranges: [(lo, hi1), (1, hi2), (lo, hi3)],
        }
    }

    fn beta_reduced(&self, args: &[Word]) -> Rational {
        let (g, h1, rest) = (&args[0], &args[1], &args[2..]);
        let gh = g.concat(h1);
        let t = triangle_from_parts(
            self.scheme.decompose(g),
            self.scheme.decompose(h1),
            self.scheme.decompose(&gh),
        );
        self.sums(&t, h1, rest).reduced
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "at", rename_all = "snake_case")]
pub enum CancelMismatch {
    /// First and third sums disagree at an excluded head position.
    Head { j: usize },
    /// Second sum at `j` disagrees with third sum at `paired`.
    Tail { j: usize, paired: usize },
    /// The excluded positions of the third sum are not all paired.
    Count { expected: usize, got: usize },
}

struct ThreeSums {
    reduced: Rational,
    full: Rational,
    mismatch: Option<CancelMismatch>,
    ranges: [(usize, usize); 3],
}

/// Options for [`build_beta_with`].
#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    /// Weights used in η (and hence in the reduced form) instead of φ's own.
    pub eta_weights: Option<PieceWeights>,
    /// `R` to certify against; measured at [`DEFAULT_R_BUDGET`] if absent.
    pub r_used: Option<usize>,
}

#[derive(Clone)]
pub struct PrimitiveBundle {
    ctx: GroupCtx,
    qm: Quasimorphism,
    weights: PieceWeights,
    engine: Arc<Engine>,
    eta: Cochain,
    beta: Cochain,
    beta_reduced: Cochain,
    r_used: usize,
}

impl std::fmt::Debug for PrimitiveBundle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PrimitiveBundle")
            .field("qm", &self.qm.descriptor())
            .field("k", &self.k())
            .field("form", &self.engine.form)
            .field("r_used", &self.r_used)
            .finish_non_exhaustive()
    }
}

impl PrimitiveBundle {
    pub fn qm(&self) -> &Quasimorphism {
        &self.qm
    }

    pub fn ctx(&self) -> GroupCtx {
        self.ctx
    }

    pub fn scheme(&self) -> &Scheme {
        &self.engine.scheme
    }

    pub fn form(&self) -> EtaForm {
        self.engine.form
    }

    /// Degree of ω.
    pub fn k(&self) -> usize {
        self.engine.omega.degree()
    }

    pub fn omega(&self) -> &Cochain {
        &self.engine.omega
    }

    pub fn eta(&self) -> &Cochain {
        &self.eta
    }

    /// `β` by its definition `φ∪ω + δη`.
    pub fn beta(&self) -> &Cochain {
        &self.beta
    }

    /// `β` by the reduced three-sum form.
    pub fn beta_reduced(&self) -> &Cochain {
        &self.beta_reduced
    }

    /// φ's own weights.
    pub fn weights(&self) -> &PieceWeights {
        &self.weights
    }

    pub fn eta_weights(&self) -> &PieceWeights {
        &self.engine.weights
    }

    pub fn r_used(&self) -> usize {
        self.r_used
    }

    pub fn with_r_used(mut self, r: usize) -> Self {
        self.r_used = r;
        self
    }
}

/// Resolves a quasimorphism to the scheme, weights and η form used to build
/// its primitive.
fn resolve(ctx: GroupCtx, qm: &Quasimorphism) -> Result<(Quasimorphism, Scheme, PieceWeights, EtaForm)> {
    match qm {
        Quasimorphism::Decomposable { scheme, weights } => {
            Ok((qm.clone(), scheme.clone(), weights.clone(), EtaForm::Pieces))
        }
        Quasimorphism::SmsBrooks { scheme, weights } => {
            Ok((qm.clone(), scheme.clone(), weights.clone(), EtaForm::Triplets))
        }
        Quasimorphism::Homomorphism { weights, .. } => Ok((
            qm.clone(),
            Scheme::letters(ctx),
            PieceWeights::letters(weights.clone()),
            EtaForm::Pieces,
        )),
        Quasimorphism::Zero => Ok((qm.clone(), Scheme::letters(ctx), PieceWeights::zero(), EtaForm::Pieces)),
        Quasimorphism::BrooksDirect { w, mode: CountMode::Big } if !is_selfoverlapping(w) => {
            let rerouted = Quasimorphism::brooks(ctx, w.clone())?;
            resolve(ctx, &rerouted)
        }
        Quasimorphism::BrooksDirect { w, mode } => Err(Error::Unsupported(format!(
            "direct {} count of {w} has no primitive construction; use sms:w={w}",
            match mode {
                CountMode::Big => "big",
                CountMode::Small => "small",
            }
        ))),
    }
}

/// `η(g, h_1..h_{k-1}) = Σ_j λ(g_j) ω(z_j(g), h_1..h_{k-1})` with
/// `z_j(g) = g_{j+1}⋯g_K`.
pub fn build_eta(ctx: GroupCtx, qm: &Quasimorphism, omega: &Cochain) -> Result<Cochain> {
    let (_, scheme, weights, form) = resolve(ctx, qm)?;
    if form != EtaForm::Pieces {
        return Err(Error::Unsupported(format!("{qm} is not decomposable; use build_eta_sms")));
    }
    eta_cochain(scheme, weights, form, omega)
}

/// `η(g, h_1..h_{k-1}) = Σ_{j<=K-2} λ̃(g_j, g_{j+1}, g_{j+2}) ω(z_{j+2}(g), h_1..h_{k-1})`.
pub fn build_eta_sms(qm: &Quasimorphism, omega: &Cochain) -> Result<Cochain> {
    match qm {
        Quasimorphism::SmsBrooks { scheme, weights } => {
            eta_cochain(scheme.clone(), weights.clone(), EtaForm::Triplets, omega)
        }
        other => Err(Error::Unsupported(format!("{other} is not in triplet form"))),
    }
}

fn check_omega(omega: &Cochain) -> Result<()> {
    if omega.domain() != Domain::Aligned {
        return Err(Error::Domain("ω must be an aligned cochain".into()));
    }
    if omega.degree() == 0 {
        return Err(Error::Degree { expected: 1, got: 0 });
    }
    Ok(())
}

fn eta_cochain(scheme: Scheme, weights: PieceWeights, form: EtaForm, omega: &Cochain) -> Result<Cochain> {
    check_omega(omega)?;
    let engine = Arc::new(Engine {
        scheme,
        form,
        weights,
        omega: omega.clone(),
    });
    Ok(Cochain::new(omega.degree(), Domain::Aligned, move |args| engine.eta(args)))
}

pub fn build_beta(ctx: GroupCtx, qm: &Quasimorphism, omega: &Cochain) -> Result<PrimitiveBundle> {
    build_beta_with(ctx, qm, omega, BuildOptions::default())
}

pub fn build_beta_with(
    ctx: GroupCtx,
    qm: &Quasimorphism,
    omega: &Cochain,
    options: BuildOptions,
) -> Result<PrimitiveBundle> {
    check_omega(omega)?;
    let (qm, scheme, weights, form) = resolve(ctx, qm)?;
    let r_used = match options.r_used {
        Some(r) => r,
        None => measure_r(&scheme, &scheme.descriptor(), ctx, DEFAULT_R_BUDGET).r_hat,
    };
    let engine = Arc::new(Engine {
        scheme,
        form,
        weights: options.eta_weights.unwrap_or_else(|| weights.clone()),
        omega: omega.clone(),
    });
    let k = omega.degree();

    let eta = {
        let engine = engine.clone();
        Cochain::new(k, Domain::Aligned, move |args| engine.eta(args))
    };
    let beta = {
        let (eta, omega, qm) = (eta.clone(), omega.clone(), qm.clone());
        Cochain::new(k + 1, Domain::Aligned, move |args| {
            qm.eval(&args[0]) * omega.eval(&args[1..]) + coboundary_at(&eta, args)
        })
    };
    let beta_reduced = {
        let engine = engine.clone();
        Cochain::new(k + 1, Domain::Aligned, move |args| engine.beta_reduced(args))
    };
    Ok(PrimitiveBundle {
        ctx,
        qm,
        weights,
        engine,
        eta,
        beta,
        beta_reduced,
        r_used,
    })
}

/// `(r(δ¹φ) ∪ ω)(t)` at an aligned `(k+2)`-tuple.
fn target_at(bundle: &PrimitiveBundle, t: &[Word]) -> Rational {
    let qm = &bundle.qm;
    let d = qm.eval(&t[1]) - qm.eval(&t[0].concat(&t[1])) + qm.eval(&t[0]);
    if d.is_zero() {
        return d;
    }
    d * bundle.engine.omega.eval(&t[2..])
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub k: usize,
    pub budget: usize,
    pub tuples_checked: usize,
    /// Largest residual over both evaluation routes of β.
    #[serde(serialize_with = "rational::serialize")]
    pub max_residual: Rational,
    pub witness: Option<Vec<String>>,
    #[serde(serialize_with = "rational::serialize")]
    pub definitional_residual: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub reduced_residual: Rational,
    pub pass: bool,
}

/// Evaluates `δβ − r(δ¹φ) ∪ ω` on every aligned `(k+2)`-tuple of total
/// length `<= budget`, for β by definition and by the reduced form.
///
/// The definitional route is insensitive to η (`δδη = 0`); the reduced
/// route is what detects η weights that disagree with φ.
pub fn verify_primitive_identity(bundle: &PrimitiveBundle, budget: usize) -> ResidualReport {
    let k = bundle.k();
    let tuples = domain_tuples(bundle.ctx, Domain::Aligned, k + 2, budget);
    let def = sup_over(&tuples, |t| coboundary_at(&bundle.beta, t) - target_at(bundle, t));
    let red = sup_over(&tuples, |t| coboundary_at(&bundle.beta_reduced, t) - target_at(bundle, t));
    let (max, witness) = if red.value > def.value {
        (red.value, red.witness.clone())
    } else {
        (def.value, def.witness.clone())
    };
    ResidualReport {
        k,
        budget,
        tuples_checked: tuples.len(),
        max_residual: max,
        witness,
        definitional_residual: def.value,
        reduced_residual: red.value,
        pass: max.is_zero(),
    }
}

/// Per-tuple breakdown of the reduced form.
#[derive(Debug, Clone, Serialize)]
pub struct ReducedEvaluation {
    #[serde(serialize_with = "rational::serialize")]
    pub value: Rational,
    /// The three sums over their full index ranges.
    #[serde(serialize_with = "rational::serialize")]
    pub untruncated: Rational,
    /// Inclusive index ranges of the three truncated sums.
    pub ranges: [(usize, usize); 3],
    pub mismatch: Option<CancelMismatch>,
}

fn tuple_checked(bundle: &PrimitiveBundle, tuple: &[Word]) -> Result<()> {
    if tuple.len() != bundle.k() + 1 {
        return Err(Error::Degree {
            expected: bundle.k() + 1,
            got: tuple.len(),
        });
    }
    for g in tuple {
        bundle.ctx.check(g)?;
    }
    if !is_aligned(tuple) {
        let printed: Vec<String> = tuple.iter().map(print_word).collect();
        return Err(Error::NotAligned(printed.join(",")));
    }
    Ok(())
}

/// β at an aligned `(k+1)`-tuple by the reduced three-sum form.
pub fn eval_beta_reduced(bundle: &PrimitiveBundle, tuple: &[Word]) -> Result<Rational> {
    Ok(eval_beta_instrumented(bundle, tuple)?.value)
}

/// Reduced form with the untruncated sums and the head/tail cancellation
/// check for the excluded terms.
pub fn eval_beta_instrumented(bundle: &PrimitiveBundle, tuple: &[Word]) -> Result<ReducedEvaluation> {
    tuple_checked(bundle, tuple)?;
    let (g, h1) = (&tuple[0], &tuple[1]);
    let t = triangle(bundle.scheme(), g, h1)?;
    let s = bundle.engine.sums(&t, h1, &tuple[2..]);
    Ok(ReducedEvaluation {
        value: s.reduced,
        untruncated: s.full,
        ranges: s.ranges,
        mismatch: s.mismatch,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FormReport {
    pub budget: usize,
    pub tuples_checked: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub max_difference: Rational,
    pub witness: Option<Vec<String>>,
    /// First tuple whose excluded terms fail to cancel pairwise.
    pub cancel_witness: Option<Vec<String>>,
    pub pass: bool,
}

/// Compares definitional and reduced β on every aligned `(k+1)`-tuple of
/// total length `<= budget`, and checks head/tail cancellation.
pub fn check_form_equivalence(bundle: &PrimitiveBundle, budget: usize) -> Result<FormReport> {
    use rayon::prelude::*;
    let tuples = domain_tuples(bundle.ctx, Domain::Aligned, bundle.k() + 1, budget);
    let diff = sup_over(&tuples, |t| bundle.beta.eval(t) - bundle.beta_reduced.eval(t));
    let cancel = tuples
        .par_iter()
        .map(|t| eval_beta_instrumented(bundle, t).map(|e| e.mismatch.is_some().then(|| t)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next()
        .map(|t| t.iter().map(print_word).collect());
    Ok(FormReport {
        budget,
        tuples_checked: tuples.len(),
        pass: diff.value.is_zero() && cancel.is_none(),
        max_difference: diff.value,
        witness: diff.witness,
        cancel_witness: cancel,
    })
}

/// Which evaluation of β a sup-norm scan uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaRoute {
    Definitional,
    Reduced,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub budget: usize,
    pub route: BetaRoute,
    pub tuples_checked: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub sup_beta: Rational,
    pub witness: Option<Vec<String>>,
    #[serde(serialize_with = "rational::serialize")]
    pub bound: Rational,
    pub r_used: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub lambda_bound: Rational,
    #[serde(serialize_with = "rational::serialize")]
    pub omega_norm: Rational,
    pub pass: bool,
}

/// The certified constant: `3·R·‖λ‖·‖ω‖`, or `3·(R+2)·‖λ̃‖·‖ω‖` in triplet form.
pub fn beta_bound(form: EtaForm, r: usize, lambda: Rational, omega_norm: Rational) -> Rational {
    let terms = match form {
        EtaForm::Pieces => r,
        EtaForm::Triplets => r + 2,
    };
    Rational::from_integer(3 * terms as i64) * lambda * omega_norm
}

/// `sup |β|` over aligned `(k+1)`-tuples against the certified bound, with
/// `‖ω‖` measured over aligned `k`-tuples of the same budget.
pub fn certify_boundedness(bundle: &PrimitiveBundle, budget: usize) -> BoundReport {
    certify_boundedness_with(bundle, budget, budget, BetaRoute::Definitional)
}

/// As [`certify_boundedness`], with `‖ω‖` taken at `omega_budget` and β
/// evaluated by the given route.
pub fn certify_boundedness_with(
    bundle: &PrimitiveBundle,
    budget: usize,
    omega_budget: usize,
    route: BetaRoute,
) -> BoundReport {
    let k = bundle.k();
    let omega_norm = omega_norm(bundle, omega_budget).value;
    let beta = match route {
        BetaRoute::Definitional => &bundle.beta,
        BetaRoute::Reduced => &bundle.beta_reduced,
    };
    let tuples = domain_tuples(bundle.ctx, Domain::Aligned, k + 1, budget);
    let sup = sup_over(&tuples, |t| beta.eval(t));
    let lambda = bundle.eta_weights().bound();
    let bound = beta_bound(bundle.form(), bundle.r_used, lambda, omega_norm);
    BoundReport {
        budget,
        route,
        tuples_checked: tuples.len(),
        pass: sup.value <= bound,
        sup_beta: sup.value,
        witness: sup.witness,
        bound,
        r_used: bundle.r_used,
        lambda_bound: lambda,
        omega_norm,
    }
}

/// `‖ω‖` over aligned `k`-tuples of total length `<= budget`.
pub fn omega_norm(bundle: &PrimitiveBundle, budget: usize) -> NormReport {
    crate::cochain::sup_norm(
        &bundle.engine.omega,
        bundle.ctx,
        EvalBudget {
            degree: bundle.k(),
            max_total_len: budget,
        },
    )
    .expect("degree matches")
}
