//! Inhomogeneous cochains on the full domain `F^k` and on the aligned
//! domain, with exact rational values.
//!
//! A [`Cochain`] is an evaluation map, not a table: its domain is infinite,
//! so norms and cocycle checks always run over a finite budget of tuples.
//! Aligned cochains evaluate to `0` on any tuple containing the identity.

use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qm::Quasimorphism;
use crate::rational::{self, Rational};
use crate::words::{enumerate_aligned, enumerate_full, parse_word, print_word, CountMode, GroupCtx, Word};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Full,
    Aligned,
}

type EvalFn = dyn Fn(&[Word]) -> Rational + Send + Sync;

#[derive(Clone)]
pub struct Cochain {
    degree: usize,
    domain: Domain,
    f: Arc<EvalFn>,
    bound_hint: Option<Rational>,
}

impl fmt::Debug for Cochain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cochain")
            .field("degree", &self.degree)
            .field("domain", &self.domain)
            .field("bound_hint", &self.bound_hint)
            .finish_non_exhaustive()
    }
}

impl Cochain {
    pub fn new<F>(degree: usize, domain: Domain, f: F) -> Self
    where
        F: Fn(&[Word]) -> Rational + Send + Sync + 'static,
    {
        Cochain {
            degree,
            domain,
            f: Arc::new(f),
            bound_hint: None,
        }
    }

    pub fn with_bound(mut self, bound: Rational) -> Self {
        self.bound_hint = Some(bound);
        self
    }

    pub fn zero(degree: usize, domain: Domain) -> Self {
        Cochain::new(degree, domain, |_| Rational::zero()).with_bound(Rational::zero())
    }

    /// Degree-0 cochain with value `c`.
    pub fn constant(c: Rational, domain: Domain) -> Self {
        Cochain::new(0, domain, move |_| c).with_bound(c.abs())
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn bound_hint(&self) -> Option<Rational> {
        self.bound_hint
    }

    pub fn eval(&self, args: &[Word]) -> Rational {
        debug_assert_eq!(args.len(), self.degree, "cochain evaluated at wrong degree");
        if self.domain == Domain::Aligned && args.iter().any(Word::is_identity) {
            return Rational::zero();
        }
        (self.f)(args)
    }
}

fn sign(j: usize) -> Rational {
    if j % 2 == 0 {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Evaluates the coboundary of `f` at `args` (of length `deg f + 1`).
pub fn coboundary_at(f: &Cochain, args: &[Word]) -> Rational {
    let n = f.degree();
    debug_assert_eq!(args.len(), n + 1);
    let mut total = f.eval(&args[1..]);
    let mut merged: Vec<Word> = Vec::with_capacity(n);
    for j in 1..=n {
        merged.clear();
        merged.extend_from_slice(&args[..j - 1]);
        merged.push(args[j - 1].mul(&args[j]));
        merged.extend_from_slice(&args[j + 1..]);
        total += sign(j) * f.eval(&merged);
    }
    total + sign(n + 1) * f.eval(&args[..n])
}

/// The inhomogeneous coboundary, on either domain.
pub fn coboundary(f: &Cochain) -> Cochain {
    let inner = f.clone();
    let bound = f
        .bound_hint()
        .map(|b| b * Rational::from_integer(f.degree() as i64 + 2));
    let mut out = Cochain::new(f.degree() + 1, f.domain(), move |args| coboundary_at(&inner, args));
    out.bound_hint = bound;
    out
}

/// `(f ∪ g)(g_1..g_{n+m}) = f(g_1..g_n) · g(g_{n+1}..g_{n+m})`.
pub fn cup(f: &Cochain, g: &Cochain) -> Result<Cochain> {
    if f.domain() != g.domain() {
        return Err(Error::Domain(format!(
            "cannot cup a {:?} cochain with a {:?} cochain",
            f.domain(),
            g.domain()
        )));
    }
    let n = f.degree();
    let bound = match (f.bound_hint(), g.bound_hint()) {
        (Some(a), Some(b)) => Some(a * b),
        _ => None,
    };
    let (fl, gl) = (f.clone(), g.clone());
    let mut out = Cochain::new(n + g.degree(), f.domain(), move |args| {
        let left = fl.eval(&args[..n]);
        if left.is_zero() {
            return left;
        }
        left * gl.eval(&args[n..])
    });
    out.bound_hint = bound;
    Ok(out)
}

/// Restriction of a full-domain cochain to the aligned domain.
pub fn restrict(f: &Cochain) -> Result<Cochain> {
    if f.domain() != Domain::Full {
        return Err(Error::Domain("restriction expects a full-domain cochain".into()));
    }
    let inner = f.clone();
    let mut out = Cochain::new(f.degree(), Domain::Aligned, move |args| inner.eval(args));
    out.bound_hint = f.bound_hint();
    Ok(out)
}

/// `A(f)(g_1..g_n) = ½ (f(g_1..g_n) + (-1)^⌈n/2⌉ f(g_n^{-1}..g_1^{-1}))`.
pub fn alternate(f: &Cochain) -> Result<Cochain> {
    if f.domain() != Domain::Aligned {
        return Err(Error::Domain("the alternating projection acts on aligned cochains".into()));
    }
    let n = f.degree();
    let flip = sign(n.div_ceil(2));
    let half = Rational::new(1, 2);
    let inner = f.clone();
    let mut out = Cochain::new(n, Domain::Aligned, move |args| {
        let flipped: Vec<Word> = args.iter().rev().map(Word::inverse).collect();
        half * (inner.eval(args) + flip * inner.eval(&flipped))
    });
    out.bound_hint = f.bound_hint();
    Ok(out)
}

/// Canonical byte encoding of a tuple: degree, then for each word its
/// length followed by its signed indices, all as little-endian 16-bit.
pub fn canonical_encoding(args: &[Word]) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 + args.iter().map(|g| 2 + 2 * g.len()).sum::<usize>());
    out.extend_from_slice(&(args.len() as u16).to_le_bytes());
    for g in args {
        out.extend_from_slice(&(g.len() as u16).to_le_bytes());
        for l in g.letters() {
            out.extend_from_slice(&(l.index() as i16).to_le_bytes());
        }
    }
    out
}

/// FNV-1a over the seed bytes followed by `bytes`, finalised with the
/// splitmix64 avalanche.
pub fn mix(seed: u64, bytes: &[u8]) -> u64 {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;
    let mut h = OFFSET;
    for b in seed.to_le_bytes().iter().chain(bytes) {
        h ^= u64::from(*b);
        h = h.wrapping_mul(PRIME);
    }
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}

const PSEUDORANDOM_VALUES: [(i64, i64); 5] = [(-1, 1), (-1, 2), (0, 1), (1, 2), (1, 1)];

pub fn pseudorandom_value(seed: u64, args: &[Word]) -> Rational {
    let (n, d) = PSEUDORANDOM_VALUES[(mix(seed, &canonical_encoding(args)) % 5) as usize];
    Rational::new(n, d)
}

/// Deterministic bounded cochain with values in `{-1, -½, 0, ½, 1}`.
pub fn pseudorandom(degree: usize, seed: u64, domain: Domain) -> Cochain {
    Cochain::new(degree, domain, move |args| pseudorandom_value(seed, args)).with_bound(Rational::one())
}

/// Aligned 1-cochain supported on single letters, with weights indexed by
/// signed letter order of `ctx.alphabet()`.
pub fn letter_supported(ctx: GroupCtx, weights: Vec<Rational>) -> Result<Cochain> {
    let alphabet = ctx.alphabet();
    if weights.len() != alphabet.len() {
        return Err(Error::Degree {
            expected: alphabet.len(),
            got: weights.len(),
        });
    }
    let bound = weights.iter().map(|w| w.abs()).max().unwrap_or_default();
    Ok(Cochain::new(1, Domain::Aligned, move |args| match args[0].letters() {
        [l] => alphabet
            .iter()
            .position(|a| a == l)
            .map(|i| weights[i])
            .unwrap_or_default(),
        _ => Rational::zero(),
    })
    .with_bound(bound))
}

/// Tuples of a domain with total length `<= max_total_len`, in the
/// canonical enumeration order.
pub fn domain_tuples(ctx: GroupCtx, domain: Domain, degree: usize, max_total_len: usize) -> Vec<Vec<Word>> {
    match domain {
        Domain::Aligned if degree == 0 => vec![Vec::new()],
        Domain::Aligned => enumerate_aligned(ctx, degree, max_total_len)
            .map(|t| t.into_entries())
            .collect(),
        Domain::Full => enumerate_full(ctx, degree, max_total_len),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalBudget {
    pub degree: usize,
    pub max_total_len: usize,
}

fn print_tuple(args: &[Word]) -> Vec<String> {
    args.iter().map(print_word).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct NormReport {
    #[serde(serialize_with = "rational::serialize")]
    pub value: Rational,
    pub witness: Option<Vec<String>>,
    pub tuples_checked: usize,
}

/// Maximum of `|f|` over the tuples of the budget; the first tuple (in
/// enumeration order) attaining it is the witness.
pub fn sup_norm(f: &Cochain, ctx: GroupCtx, budget: EvalBudget) -> Result<NormReport> {
    if budget.degree != f.degree() {
        return Err(Error::Degree {
            expected: f.degree(),
            got: budget.degree,
        });
    }
    let tuples = domain_tuples(ctx, f.domain(), budget.degree, budget.max_total_len);
    Ok(sup_over(&tuples, |t| f.eval(t)))
}

pub(crate) fn sup_over<F>(tuples: &[Vec<Word>], eval: F) -> NormReport
where
    F: Fn(&[Word]) -> Rational + Sync,
{
    let best = tuples
        .par_iter()
        .enumerate()
        .map(|(i, t)| (eval(t).abs(), i))
        .reduce(
            || (Rational::zero(), usize::MAX),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                    b
                } else {
                    a
                }
            },
        );
    let witness = (best.0 > Rational::zero()).then(|| print_tuple(&tuples[best.1]));
    NormReport {
        value: best.0,
        witness,
        tuples_checked: tuples.len(),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CocycleReport {
    pub holds: bool,
    pub witness: Option<Vec<String>>,
    #[serde(serialize_with = "rational::serialize_opt")]
    pub witness_value: Option<Rational>,
    pub tuples_checked: usize,
}

/// Checks that `δf` vanishes on every tuple of degree `deg f + 1` and total
/// length `<= max_total_len` in the cochain's domain.
pub fn is_cocycle(f: &Cochain, ctx: GroupCtx, max_total_len: usize) -> CocycleReport {
    let tuples = domain_tuples(ctx, f.domain(), f.degree() + 1, max_total_len);
    let hit = tuples.par_iter().find_map_first(|t| {
        let v = coboundary_at(f, t);
        (!v.is_zero()).then(|| (print_tuple(t), v))
    });
    CocycleReport {
        holds: hit.is_none(),
        witness_value: hit.as_ref().map(|h| h.1),
        witness: hit.map(|h| h.0),
        tuples_checked: tuples.len(),
    }
}

/// Parses a test cocycle spec and builds the corresponding aligned cochain:
///
/// * `zero:k=K`
/// * `cobound:k=K[:seed=S]`: `δψ` for the pseudorandom aligned `(K-1)`-cochain ψ
/// * `qmcobound:w=<word>`: restricted coboundary of the Brooks count on `w`
/// * `cup:<spec>+<spec>`: cup product; the left operand may not itself be a cup
///
/// `default_seed` is used when a `cobound` spec omits its seed.
pub fn make_test_cocycle(spec: &str, ctx: GroupCtx, default_seed: u64) -> Result<Cochain> {
    let bad = |reason: &str| Error::Descriptor {
        descriptor: spec.to_string(),
        reason: reason.to_string(),
    };
    let spec = spec.trim();
    if let Some(rest) = spec.strip_prefix("cup:") {
        let (a, b) = rest.split_once('+').ok_or_else(|| bad("cup needs two operands joined by '+'"))?;
        let left = make_test_cocycle(a, ctx, default_seed)?;
        let right = make_test_cocycle(b, ctx, default_seed)?;
        return cup(&left, &right);
    }
    let mut parts = spec.split(':');
    let head = parts.next().unwrap_or_default();
    let mut k: Option<usize> = None;
    let mut seed: Option<u64> = None;
    let mut word: Option<&str> = None;
    for field in parts {
        let (key, value) = field.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        match key {
            "k" => k = Some(value.parse().map_err(|_| bad("k must be a non-negative integer"))?),
            "seed" => seed = Some(value.parse().map_err(|_| bad("seed must be a 64-bit integer"))?),
            "w" => word = Some(value),
            _ => return Err(bad("unknown field")),
        }
    }
    match head {
        "zero" => {
            let k = k.ok_or_else(|| bad("missing k"))?;
            Ok(Cochain::zero(k, Domain::Aligned))
        }
        "cobound" => {
            let k = k.ok_or_else(|| bad("missing k"))?;
            if k == 0 {
                return Err(bad("cobound needs k >= 1"));
            }
            let psi = pseudorandom(k - 1, seed.unwrap_or(default_seed), Domain::Aligned);
            Ok(coboundary(&psi))
        }
        "qmcobound" => {
            if k.is_some_and(|k| k != 2) {
                return Err(Error::Degree {
                    expected: 2,
                    got: k.unwrap_or_default(),
                });
            }
            let w = parse_word(word.ok_or_else(|| bad("missing w"))?, ctx)?;
            let qm = Quasimorphism::brooks_direct(w, CountMode::Big)?;
            restrict(&crate::qm::coboundary1(&qm))
        }
        _ => Err(bad("unknown cocycle kind")),
    }
}
