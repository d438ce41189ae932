//! Quasimorphisms on free groups: Δ-decomposable ones (Brooks on a
//! non-selfoverlapping word, Rolli, homomorphisms over letter pieces), the
//! triplet form of Brooks on a selfoverlapping word, and the direct
//! occurrence-count oracle.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::cochain::{Cochain, Domain};
use crate::decomp::{scan_pairs_max, Scheme, SchemeKind, Triangle};
use crate::error::{Error, Result};
use crate::rational::{self, parse_rational, Rational};
use crate::words::{
    count_occurrences, enumerate_reduced, is_selfoverlapping, parse_word, print_word, CountMode,
    GroupCtx, Letter, Word,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    PerPiece,
    PerTriplet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum WeightRule {
    Zero,
    /// `1` on `w`, `-1` on `w^{-1}`.
    Indicator { w: Word, w_inv: Word },
    /// `x_j^m ↦ sign(m)`.
    RolliSign,
    /// Single-letter pieces, weight per generator.
    Letters(Vec<Rational>),
    /// `1` on the triple `(s, m, s)`, `-1` on `(s^{-1}, m^{-1}, s^{-1})`.
    SmsTriple { s: Word, m: Word, s_inv: Word, m_inv: Word },
}

/// A bounded alternating weight assignment on pieces, or on ordered
/// triples of pieces. Explicit overrides take precedence over the rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieceWeights {
    rule: WeightRule,
    pieces: HashMap<Word, Rational>,
    triples: HashMap<[Word; 3], Rational>,
}

impl PieceWeights {
    fn with_rule(rule: WeightRule) -> Self {
        PieceWeights {
            rule,
            pieces: HashMap::new(),
            triples: HashMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::with_rule(WeightRule::Zero)
    }

    pub fn brooks(w: &Word) -> Self {
        Self::with_rule(WeightRule::Indicator {
            w: w.clone(),
            w_inv: w.inverse(),
        })
    }

    pub fn rolli_sign() -> Self {
        Self::with_rule(WeightRule::RolliSign)
    }

    /// Per-generator weights for letter pieces.
    pub fn letters(per_generator: Vec<Rational>) -> Self {
        Self::with_rule(WeightRule::Letters(per_generator))
    }

    pub fn sms(s: &Word, m: &Word) -> Self {
        Self::with_rule(WeightRule::SmsTriple {
            s: s.clone(),
            m: m.clone(),
            s_inv: s.inverse(),
            m_inv: m.inverse(),
        })
    }

    pub fn mode(&self) -> WeightMode {
        match self.rule {
            WeightRule::SmsTriple { .. } => WeightMode::PerTriplet,
            _ if !self.triples.is_empty() => WeightMode::PerTriplet,
            _ => WeightMode::PerPiece,
        }
    }

    /// Sets `λ(p) = value` and `λ(p^{-1}) = -value`.
    pub fn set_piece(&mut self, p: &Word, value: Rational) {
        self.pieces.insert(p.clone(), value);
        self.pieces.insert(p.inverse(), -value);
    }

    /// Sets the value of an ordered triple and the negated value of its
    /// inverse triple `(c^{-1}, b^{-1}, a^{-1})`.
    pub fn set_triple(&mut self, a: &Word, b: &Word, c: &Word, value: Rational) {
        self.triples.insert([a.clone(), b.clone(), c.clone()], value);
        self.triples
            .insert([c.inverse(), b.inverse(), a.inverse()], -value);
    }

    pub fn piece(&self, p: &Word) -> Rational {
        if let Some(v) = self.pieces.get(p) {
            return *v;
        }
        match &self.rule {
            WeightRule::Indicator { w, w_inv } => {
                if p == w {
                    Rational::one()
                } else if p == w_inv {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            }
            WeightRule::RolliSign => match p.first() {
                Some(l) if l.is_positive() => Rational::one(),
                Some(_) => -Rational::one(),
                None => Rational::zero(),
            },
            WeightRule::Letters(weights) => match p.letters() {
                [l] => {
                    let v = weights.get(l.generator() - 1).copied().unwrap_or_default();
                    if l.is_positive() {
                        v
                    } else {
                        -v
                    }
                }
                _ => Rational::zero(),
            },
            WeightRule::Zero | WeightRule::SmsTriple { .. } => Rational::zero(),
        }
    }

    pub fn triple(&self, a: &Word, b: &Word, c: &Word) -> Rational {
        if !self.triples.is_empty() {
            if let Some(v) = self.triples.get(&[a.clone(), b.clone(), c.clone()]) {
                return *v;
            }
        }
        match &self.rule {
            WeightRule::SmsTriple { s, m, s_inv, m_inv } => {
                if a == s && b == m && c == s {
                    Rational::one()
                } else if a == s_inv && b == m_inv && c == s_inv {
                    -Rational::one()
                } else {
                    Rational::zero()
                }
            }
            _ => Rational::zero(),
        }
    }

    /// `‖λ‖∞`.
    pub fn bound(&self) -> Rational {
        let rule = match &self.rule {
            WeightRule::Zero => Rational::zero(),
            WeightRule::Letters(w) => w.iter().map(|v| v.abs()).max().unwrap_or_default(),
            _ => Rational::one(),
        };
        self.pieces
            .values()
            .chain(self.triples.values())
            .map(|v| v.abs())
            .fold(rule, |a, b| a.max(b))
    }
}

/// Reads a line-oriented `piece<TAB>rational` weight table. Blank lines and
/// lines starting with `#` are skipped. Listed pieces must be Rolli pieces;
/// listing both `p` and `p^{-1}` requires opposite values.
pub fn load_rolli_weights(path: &Path, ctx: GroupCtx) -> Result<PieceWeights> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_rolli_weights(&text, ctx)
}

pub fn parse_rolli_weights(text: &str, ctx: GroupCtx) -> Result<PieceWeights> {
    let scheme = Scheme::rolli(ctx);
    let mut weights = PieceWeights::zero();
    let mut seen: HashMap<Word, Rational> = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |reason: String| Error::Descriptor {
            descriptor: format!("weights line {}", lineno + 1),
            reason,
        };
        let (piece, value) = line
            .split_once('\t')
            .ok_or_else(|| bad("expected piece<TAB>rational".into()))?;
        let p = parse_word(piece, ctx)?;
        if !scheme.is_piece(&p) {
            return Err(Error::NotAPiece(print_word(&p)));
        }
        let v = parse_rational(value)?;
        if let Some(prev) = seen.get(&p) {
            if *prev != v {
                return Err(bad(format!("{p} is not alternating: listed as {prev} and {v}")));
            }
        }
        seen.insert(p.inverse(), -v);
        seen.insert(p.clone(), v);
        weights.set_piece(&p, v);
    }
    Ok(weights)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Quasimorphism {
    /// `g ↦ Σ λ(g_j)` over `Δ(g)`.
    Decomposable { scheme: Scheme, weights: PieceWeights },
    /// `g ↦ Σ λ̃(g_j, g_{j+1}, g_{j+2})` over the sms decomposition.
    SmsBrooks { scheme: Scheme, weights: PieceWeights },
    /// Signed occurrence count of `w`.
    BrooksDirect { w: Word, mode: CountMode },
    /// Additive map with the given value on each generator.
    Homomorphism { ctx: GroupCtx, weights: Vec<Rational> },
    Zero,
}

impl Quasimorphism {
    pub fn decomposable(scheme: Scheme, weights: PieceWeights) -> Result<Self> {
        if weights.mode() != WeightMode::PerPiece {
            return Err(Error::Config("decomposable quasimorphisms take per-piece weights".into()));
        }
        Ok(Quasimorphism::Decomposable { scheme, weights })
    }

    /// Brooks quasimorphism on a non-selfoverlapping `w`, as a decomposable one.
    pub fn brooks(ctx: GroupCtx, w: Word) -> Result<Self> {
        let weights = PieceWeights::brooks(&w);
        Self::decomposable(Scheme::brooks(ctx, w)?, weights)
    }

    pub fn rolli(ctx: GroupCtx) -> Self {
        Quasimorphism::Decomposable {
            scheme: Scheme::rolli(ctx),
            weights: PieceWeights::rolli_sign(),
        }
    }

    /// Brooks quasimorphism on a selfoverlapping `w` in triplet form.
    pub fn sms_brooks(ctx: GroupCtx, w: Word) -> Result<Self> {
        let scheme = Scheme::sms(ctx, w)?;
        let (s, m) = scheme.sms_split().expect("sms scheme");
        let weights = PieceWeights::sms(s, m);
        Ok(Quasimorphism::SmsBrooks { scheme, weights })
    }

    pub fn brooks_direct(w: Word, mode: CountMode) -> Result<Self> {
        if w.is_identity() {
            return Err(Error::IdentityPattern);
        }
        Ok(Quasimorphism::BrooksDirect { w, mode })
    }

    pub fn homomorphism(ctx: GroupCtx, weights: Vec<Rational>) -> Result<Self> {
        if weights.len() != ctx.rank() {
            return Err(Error::Config(format!(
                "homomorphism needs {} generator weights, got {}",
                ctx.rank(),
                weights.len()
            )));
        }
        Ok(Quasimorphism::Homomorphism { ctx, weights })
    }

    /// Parses `brooks:w=<word>[:small]`, `rolli[:weights=<file>]`,
    /// `sms:w=<word>`, `hom:<letter>=<rational>,...` or `zero`.
    ///
    /// `brooks` on a non-selfoverlapping word gives the decomposable form;
    /// on a selfoverlapping word, or with `:small`, the direct count.
    pub fn parse(descriptor: &str, ctx: GroupCtx) -> Result<Self> {
        let bad = |reason: &str| Error::Descriptor {
            descriptor: descriptor.to_string(),
            reason: reason.to_string(),
        };
        let d = descriptor.trim();
        if d == "zero" {
            return Ok(Quasimorphism::Zero);
        }
        if d == "rolli" {
            return Ok(Quasimorphism::rolli(ctx));
        }
        if let Some(path) = d.strip_prefix("rolli:weights=") {
            let weights = load_rolli_weights(Path::new(path), ctx)?;
            return Quasimorphism::decomposable(Scheme::rolli(ctx), weights);
        }
        if let Some(rest) = d.strip_prefix("hom:") {
            let mut weights = vec![Rational::zero(); ctx.rank()];
            for item in rest.split(',').filter(|s| !s.is_empty()) {
                let (letter, value) = item.split_once('=').ok_or_else(|| bad("expected <letter>=<rational>"))?;
                let mut chars = letter.chars();
                let l = match (chars.next().and_then(Letter::from_char), chars.next()) {
                    (Some(l), None) if l.is_positive() && ctx.contains(l) => l,
                    _ => return Err(bad("homomorphism weights are given on generators a..")),
                };
                weights[l.generator() - 1] = parse_rational(value)?;
            }
            return Quasimorphism::homomorphism(ctx, weights);
        }
        if let Some(rest) = d.strip_prefix("sms:w=") {
            return Quasimorphism::sms_brooks(ctx, parse_word(rest, ctx)?);
        }
        if let Some(rest) = d.strip_prefix("brooks:w=") {
            let (word, small) = match rest.strip_suffix(":small") {
                Some(word) => (word, true),
                None => (rest, false),
            };
            let w = parse_word(word, ctx)?;
            if w.is_identity() {
                return Err(Error::IdentityPattern);
            }
            return if small {
                Quasimorphism::brooks_direct(w, CountMode::Small)
            } else if is_selfoverlapping(&w) {
                Quasimorphism::brooks_direct(w, CountMode::Big)
            } else {
                Quasimorphism::brooks(ctx, w)
            };
        }
        Err(bad("unknown quasimorphism"))
    }

    pub fn descriptor(&self) -> String {
        match self {
            Quasimorphism::Decomposable { scheme, .. } => match scheme.kind() {
                SchemeKind::Brooks { w, .. } => format!("brooks:w={w}"),
                SchemeKind::Rolli => "rolli".into(),
                _ => format!("decomposable:{}", scheme.descriptor()),
            },
            Quasimorphism::SmsBrooks { scheme, .. } => scheme.descriptor(),
            Quasimorphism::BrooksDirect { w, mode } => match mode {
                CountMode::Big => format!("brooks:w={w}"),
                CountMode::Small => format!("brooks:w={w}:small"),
            },
            Quasimorphism::Homomorphism { ctx, weights } => {
                let items: Vec<String> = weights
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i < ctx.rank())
                    .map(|(i, v)| format!("{}={}", Letter::new(i + 1, true).to_char(), rational::fmt_rational(v)))
                    .collect();
                format!("hom:{}", items.join(","))
            }
            Quasimorphism::Zero => "zero".into(),
        }
    }

    pub fn eval(&self, g: &Word) -> Rational {
        match self {
            Quasimorphism::Decomposable { scheme, weights } => scheme
                .decompose(g)
                .pieces()
                .iter()
                .map(|p| weights.piece(p))
                .sum(),
            Quasimorphism::SmsBrooks { scheme, weights } => {
                let seq = scheme.decompose(g);
                triple_sum(weights, seq.pieces())
            }
            Quasimorphism::BrooksDirect { w, mode } => {
                Rational::from_integer(count_occurrences(w, g, *mode).expect("non-identity pattern"))
            }
            Quasimorphism::Homomorphism { weights, .. } => g
                .letters()
                .iter()
                .map(|l| {
                    let v = weights[l.generator() - 1];
                    if l.is_positive() {
                        v
                    } else {
                        -v
                    }
                })
                .sum(),
            Quasimorphism::Zero => Rational::zero(),
        }
    }

    /// The quasimorphism as a full-domain 1-cochain.
    pub fn as_cochain(&self) -> Cochain {
        let qm = self.clone();
        Cochain::new(1, Domain::Full, move |args| qm.eval(&args[0]))
    }
}

impl fmt::Display for Quasimorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// `Σ_{j} λ̃(p_j, p_{j+1}, p_{j+2})` over all windows of three consecutive pieces.
pub fn triple_sum(weights: &PieceWeights, pieces: &[Word]) -> Rational {
    pieces
        .windows(3)
        .map(|t| weights.triple(&t[0], &t[1], &t[2]))
        .sum()
}

/// `φ(p)` for a piece of a decomposable quasimorphism; by the single-word
/// axioms this is `λ(p)`.
pub fn piece_value_check(qm: &Quasimorphism, p: &Word) -> Result<Rational> {
    match qm {
        Quasimorphism::Decomposable { scheme, .. } => {
            if !scheme.is_piece(p) {
                return Err(Error::NotAPiece(print_word(p)));
            }
            Ok(qm.eval(p))
        }
        other => Err(Error::Unsupported(format!(
            "{other} is not a decomposable quasimorphism"
        ))),
    }
}

/// `δ¹φ(g, h) = φ(h) - φ(gh) + φ(g)` as a full-domain 2-cochain.
pub fn coboundary1(qm: &Quasimorphism) -> Cochain {
    let qm = qm.clone();
    Cochain::new(2, Domain::Full, move |args| {
        let (g, h) = (&args[0], &args[1]);
        qm.eval(h) - qm.eval(&g.mul(h)) + qm.eval(g)
    })
}

/// `δ¹φ(g, h)` recomputed from the r-part of the `(g, h)`-triangle alone:
/// `Σ λ(r1) + Σ λ(r2) + Σ λ(r3)`.
pub fn coboundary_from_r_part(weights: &PieceWeights, t: &Triangle) -> Rational {
    [&t.r1, &t.r2, &t.r3]
        .iter()
        .flat_map(|r| r.pieces().iter())
        .map(|p| weights.piece(p))
        .sum()
}

#[derive(Debug, Clone, Serialize)]
pub struct DefectReport {
    pub qm: String,
    pub budget: usize,
    pub pairs_checked: usize,
    #[serde(serialize_with = "rational::serialize")]
    pub d_hat: Rational,
    pub witness: Option<(String, String)>,
}

/// `max |δ¹φ(g, h)|` over all pairs with `|g| + |h| <= budget`.
pub fn defect(qm: &Quasimorphism, ctx: GroupCtx, budget: usize) -> DefectReport {
    let words: Vec<Word> = enumerate_reduced(ctx, budget).collect();
    let index: HashMap<&Word, usize> = words.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let values: Vec<Rational> = words.iter().map(|g| qm.eval(g)).collect();
    let (best, pairs) = scan_pairs_max(&words, budget, |i, j| {
        let gh = words[i].mul(&words[j]);
        let k = index[&gh];
        Some((values[i] + values[j] - values[k]).abs())
    });
    let (d_hat, witness) = match best {
        Some((d, i, j)) if !d.is_zero() => (d, Some((print_word(&words[i]), print_word(&words[j])))),
        _ => (Rational::zero(), None),
    };
    DefectReport {
        qm: qm.descriptor(),
        budget,
        pairs_checked: pairs,
        d_hat,
        witness,
    }
}
