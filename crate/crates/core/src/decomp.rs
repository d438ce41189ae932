//! Δ-decompositions of the free group: a word is cut into a sequence of
//! pieces. Supported schemes are the Brooks decomposition along a
//! non-selfoverlapping word, the Rolli syllable decomposition, the `s m s`
//! decomposition along a selfoverlapping word, and the letter decomposition
//! (pieces are single letters, used for homomorphisms).
//!
//! Besides [`Scheme::decompose`] this module provides the empirical
//! checkers for the single-word axioms ([`check_axiom_a`]) and for bounded
//! triangle r-parts ([`measure_r`], [`check_axiom_b`]).

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::words::{is_reduced_concat, max_sms_split, parse_word, print_word, GroupCtx, Word};

/// Maximum number of violations kept verbatim in a report.
pub const MAX_LISTED: usize = 32;

/// A finite sequence of pieces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PieceSeq(pub Vec<Word>);

impl PieceSeq {
    pub fn empty() -> Self {
        PieceSeq(Vec::new())
    }

    pub fn pieces(&self) -> &[Word] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Product of the pieces, freely reduced.
    pub fn product(&self) -> Word {
        self.0.iter().fold(Word::identity(), |acc, p| acc.mul(p))
    }

    /// `(p_K^{-1}, ..., p_1^{-1})`.
    pub fn inverse(&self) -> PieceSeq {
        PieceSeq(self.0.iter().rev().map(Word::inverse).collect())
    }

    pub fn slice(&self, start: usize, end: usize) -> PieceSeq {
        PieceSeq(self.0[start..end].to_vec())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.0.iter().map(print_word).collect()
    }
}

impl fmt::Display for PieceSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SchemeKind {
    Brooks { w: Word, w_inv: Word },
    Rolli,
    Sms {
        w: Word,
        s: Word,
        m: Word,
        s_inv: Word,
        m_inv: Word,
    },
    Letters,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scheme {
    kind: SchemeKind,
    ctx: GroupCtx,
}

/// Anything that cuts words into piece sequences. [`Scheme`] is the real
/// implementation; the trait lets the checkers run against instrumented or
/// deliberately broken decomposers.
pub trait Decomposer: Sync {
    fn decompose(&self, g: &Word) -> PieceSeq;
}

impl Scheme {
    /// Brooks decomposition along `w`; `w` must be non-selfoverlapping.
    pub fn brooks(ctx: GroupCtx, w: Word) -> Result<Self> {
        ctx.check(&w)?;
        if w.is_identity() || !w.is_reduced() {
            return Err(Error::Config("brooks word must be reduced and non-trivial".into()));
        }
        if let Some((s, m)) = max_sms_split(&w) {
            return Err(Error::Config(format!(
                "brooks word {w} is selfoverlapping (s={}, m={}); use sms:w={w}",
                print_word(&s),
                print_word(&m)
            )));
        }
        let w_inv = w.inverse();
        Ok(Scheme {
            kind: SchemeKind::Brooks { w, w_inv },
            ctx,
        })
    }

    pub fn rolli(ctx: GroupCtx) -> Self {
        Scheme {
            kind: SchemeKind::Rolli,
            ctx,
        }
    }

    pub fn letters(ctx: GroupCtx) -> Self {
        Scheme {
            kind: SchemeKind::Letters,
            ctx,
        }
    }

    /// The `s m s` decomposition for a selfoverlapping `w`, with `(s, m)` the
    /// maximal split. A trivial `m` is rejected: the identity cannot be a piece.
    pub fn sms(ctx: GroupCtx, w: Word) -> Result<Self> {
        ctx.check(&w)?;
        if w.is_identity() || !w.is_reduced() {
            return Err(Error::Config("sms word must be reduced and non-trivial".into()));
        }
        let (s, m) = max_sms_split(&w)
            .ok_or_else(|| Error::Config(format!("{w} is not selfoverlapping; use brooks:w={w}")))?;
        if m.is_identity() {
            return Err(Error::Config(format!(
                "{w} = s s with s={s} and trivial m; the identity cannot be a piece"
            )));
        }
        let (s_inv, m_inv) = (s.inverse(), m.inverse());
        Ok(Scheme {
            kind: SchemeKind::Sms {
                w,
                s,
                m,
                s_inv,
                m_inv,
            },
            ctx,
        })
    }

    /// Parses `brooks:w=<word>`, `rolli`, `sms:w=<word>` or `letters`.
    pub fn parse(descriptor: &str, ctx: GroupCtx) -> Result<Self> {
        let bad = |reason: &str| Error::Descriptor {
            descriptor: descriptor.to_string(),
            reason: reason.to_string(),
        };
        let d = descriptor.trim();
        match d {
            "rolli" => return Ok(Scheme::rolli(ctx)),
            "letters" => return Ok(Scheme::letters(ctx)),
            _ => {}
        }
        let (head, rest) = d.split_once(':').ok_or_else(|| bad("unknown scheme"))?;
        let word = rest
            .strip_prefix("w=")
            .ok_or_else(|| bad("expected w=<word>"))?;
        let w = parse_word(word, ctx)?;
        match head {
            "brooks" => Scheme::brooks(ctx, w),
            "sms" => Scheme::sms(ctx, w),
            _ => Err(bad("unknown scheme")),
        }
    }

    pub fn kind(&self) -> &SchemeKind {
        &self.kind
    }

    pub fn ctx(&self) -> GroupCtx {
        self.ctx
    }

    pub fn descriptor(&self) -> String {
        match &self.kind {
            SchemeKind::Brooks { w, .. } => format!("brooks:w={w}"),
            SchemeKind::Rolli => "rolli".into(),
            SchemeKind::Sms { w, .. } => format!("sms:w={w}"),
            SchemeKind::Letters => "letters".into(),
        }
    }

    /// The `(s, m)` split of an sms scheme.
    pub fn sms_split(&self) -> Option<(&Word, &Word)> {
        match &self.kind {
            SchemeKind::Sms { s, m, .. } => Some((s, m)),
            _ => None,
        }
    }

    pub fn decompose(&self, g: &Word) -> PieceSeq {
        match &self.kind {
            SchemeKind::Brooks { w, w_inv } => decompose_brooks(g, w, w_inv),
            SchemeKind::Rolli => decompose_rolli(g),
            SchemeKind::Sms {
                s, m, s_inv, m_inv, ..
            } => decompose_sms(g, s, m, s_inv, m_inv),
            SchemeKind::Letters => PieceSeq(g.letters().iter().map(|&l| Word::letter(l)).collect()),
        }
    }

    /// Whether `p` belongs to the piece set of the scheme.
    pub fn is_piece(&self, p: &Word) -> bool {
        if p.is_identity() || !p.is_reduced() || self.ctx.check(p).is_err() {
            return false;
        }
        match &self.kind {
            SchemeKind::Brooks { w, w_inv } => {
                p == w || p == w_inv || !(p.contains_factor(w) || p.contains_factor(w_inv))
            }
            SchemeKind::Rolli => p.letters().iter().all(|l| *l == p.letters()[0]),
            SchemeKind::Sms {
                w, s, m, s_inv, m_inv,
            } => {
                [s, m, s_inv, m_inv].contains(&p)
                    || !(p.contains_factor(w) || p.contains_factor(&w.inverse()))
            }
            SchemeKind::Letters => p.len() == 1,
        }
    }
}

impl Decomposer for Scheme {
    fn decompose(&self, g: &Word) -> PieceSeq {
        Scheme::decompose(self, g)
    }
}

fn flush_gap(g: &Word, start: usize, end: usize, out: &mut Vec<Word>) {
    if end > start {
        out.push(g.factor(start, end));
    }
}

/// Greedy left-to-right scan: every occurrence of `w^{±1}` becomes a piece,
/// maximal gaps between them become single pieces.
fn decompose_brooks(g: &Word, w: &Word, w_inv: &Word) -> PieceSeq {
    let mut out = Vec::new();
    let (mut i, mut gap) = (0, 0);
    while i < g.len() {
        let hit = if g.has_factor_at(w, i) {
            Some(w)
        } else if g.has_factor_at(w_inv, i) {
            Some(w_inv)
        } else {
            None
        };
        match hit {
            Some(p) => {
                flush_gap(g, gap, i, &mut out);
                out.push(p.clone());
                i += p.len();
                gap = i;
            }
            None => i += 1,
        }
    }
    flush_gap(g, gap, g.len(), &mut out);
    PieceSeq(out)
}

/// Maximal syllables `x_j^m`.
fn decompose_rolli(g: &Word) -> PieceSeq {
    let letters = g.letters();
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=letters.len() {
        if i == letters.len() || letters[i] != letters[start] {
            out.push(g.factor(start, i));
            start = i;
        }
    }
    PieceSeq(out)
}

/// End of the longest run `s (m s)^n`, `n >= 1`, starting at `at`.
fn sms_run_at(g: &Word, at: usize, s: &Word, m: &Word) -> Option<usize> {
    if !(g.has_factor_at(s, at)
        && g.has_factor_at(m, at + s.len())
        && g.has_factor_at(s, at + s.len() + m.len()))
    {
        return None;
    }
    let mut end = at + 2 * s.len() + m.len();
    while g.has_factor_at(m, end) && g.has_factor_at(s, end + m.len()) {
        end += m.len() + s.len();
    }
    Some(end)
}

/// Leftmost-longest scan for maximal factors `(s m)^n s` or their inverses;
/// each run is split into its alternating `s`, `m` pieces and every maximal
/// gap becomes one piece.
fn decompose_sms(g: &Word, s: &Word, m: &Word, s_inv: &Word, m_inv: &Word) -> PieceSeq {
    let mut out = Vec::new();
    let (mut i, mut gap) = (0, 0);
    while i < g.len() {
        let run = sms_run_at(g, i, s, m)
            .map(|end| (end, s, m))
            .or_else(|| sms_run_at(g, i, s_inv, m_inv).map(|end| (end, s_inv, m_inv)));
        match run {
            Some((end, s, m)) => {
                flush_gap(g, gap, i, &mut out);
                let mut pos = i;
                out.push(s.clone());
                pos += s.len();
                while pos < end {
                    out.push(m.clone());
                    out.push(s.clone());
                    pos += m.len() + s.len();
                }
                i = end;
                gap = end;
            }
            None => i += 1,
        }
    }
    flush_gap(g, gap, g.len(), &mut out);
    PieceSeq(out)
}

/// Checks that the pieces of a decomposition concatenate, junction by
/// junction without cancellation, to `g`.
pub fn reconstructs(g: &Word, seq: &PieceSeq) -> bool {
    if seq.pieces().iter().any(Word::is_identity) {
        return false;
    }
    if seq.pieces().windows(2).any(|p| !is_reduced_concat(&p[0], &p[1])) {
        return false;
    }
    let total: usize = seq.pieces().iter().map(Word::len).sum();
    total == g.len() && seq.product() == *g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxiomAClause {
    /// Pieces multiply back to the word without cancellation.
    Product,
    /// Decomposition of the inverse is the reversed inverse sequence.
    Inverse,
    /// Decomposition of a sub-range product is that sub-range.
    SubRange,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomAViolation {
    pub word: String,
    pub clause: AxiomAClause,
    /// Inclusive 1-based piece range, for sub-range violations.
    pub range: Option<(usize, usize)>,
    pub expected: Vec<String>,
    pub got: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomAReport {
    pub scheme: String,
    pub budget: usize,
    pub words_checked: usize,
    pub violation_count: usize,
    pub violations: Vec<AxiomAViolation>,
    pub pass: bool,
}

fn axiom_a_violations<D: Decomposer + ?Sized>(dec: &D, g: &Word) -> Vec<AxiomAViolation> {
    let mut found = Vec::new();
    let seq = dec.decompose(g);
    if !reconstructs(g, &seq) {
        found.push(AxiomAViolation {
            word: print_word(g),
            clause: AxiomAClause::Product,
            range: None,
            expected: vec![print_word(g)],
            got: seq.to_strings(),
        });
        return found;
    }
    let inv = dec.decompose(&g.inverse());
    let expected_inv = seq.inverse();
    if inv != expected_inv {
        found.push(AxiomAViolation {
            word: print_word(g),
            clause: AxiomAClause::Inverse,
            range: None,
            expected: expected_inv.to_strings(),
            got: inv.to_strings(),
        });
    }
    let k = seq.len();
    for i in 0..k {
        let mut product = Word::identity();
        for j in i..k {
            product = product.concat(&seq.pieces()[j]);
            // the full range is the word itself and was checked above
            if i == 0 && j + 1 == k {
                continue;
            }
            let sub = dec.decompose(&product);
            if sub.pieces() != &seq.pieces()[i..=j] {
                found.push(AxiomAViolation {
                    word: print_word(g),
                    clause: AxiomAClause::SubRange,
                    range: Some((i + 1, j + 1)),
                    expected: seq.slice(i, j + 1).to_strings(),
                    got: sub.to_strings(),
                });
            }
        }
    }
    found
}

/// Exhaustively checks the single-word axioms on every reduced word of
/// length `<= budget`.
pub fn check_axiom_a<D: Decomposer + ?Sized>(
    dec: &D,
    label: &str,
    ctx: GroupCtx,
    budget: usize,
) -> AxiomAReport {
    let words: Vec<Word> = crate::words::enumerate_reduced(ctx, budget).collect();
    let per_word: Vec<Vec<AxiomAViolation>> = words
        .par_iter()
        .map(|g| axiom_a_violations(dec, g))
        .collect();
    let violation_count = per_word.iter().map(Vec::len).sum();
    let violations = per_word.into_iter().flatten().take(MAX_LISTED).collect();
    AxiomAReport {
        scheme: label.to_string(),
        budget,
        words_checked: words.len(),
        violation_count,
        violations,
        pass: violation_count == 0,
    }
}

/// The c/r decomposition of a `(g, h)`-triangle:
///
/// ```text
/// Δ(g)  = Δ(c1^{-1}) Δ(r1)      Δ(c2)
/// Δ(h)  = Δ(c2^{-1}) Δ(r2)      Δ(c3)
/// Δ(gh) = Δ(c1^{-1}) Δ(r3^{-1}) Δ(c3)
/// ```
///
/// `c1` and `r3` are stored as sequences for `c1` and `r3` themselves, i.e.
/// the reversed inverses of the corresponding blocks of `Δ(g)` and `Δ(gh)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub dg: PieceSeq,
    pub dh: PieceSeq,
    pub dgh: PieceSeq,
    pub c1: PieceSeq,
    pub c2: PieceSeq,
    pub c3: PieceSeq,
    pub r1: PieceSeq,
    pub r2: PieceSeq,
    pub r3: PieceSeq,
}

impl Triangle {
    /// `|Δ(g)|`
    pub fn k(&self) -> usize {
        self.dg.len()
    }

    /// `|c1|`
    pub fn k_prime(&self) -> usize {
        self.c1.len()
    }

    /// `|Δ(h)|`
    pub fn l(&self) -> usize {
        self.dh.len()
    }

    /// `|r2|`
    pub fn l_prime(&self) -> usize {
        self.r2.len()
    }

    /// `|Δ(gh)|`
    pub fn m(&self) -> usize {
        self.dgh.len()
    }

    pub fn max_r(&self) -> usize {
        self.r1.len().max(self.r2.len()).max(self.r3.len())
    }
}

/// Builds the triangle from already computed decompositions.
pub fn triangle_from_parts(dg: PieceSeq, dh: PieceSeq, dgh: PieceSeq) -> Triangle {
    let (k, l, m) = (dg.len(), dh.len(), dgh.len());
    let (g, h, gh) = (dg.pieces(), dh.pieces(), dgh.pieces());

    // c2: longest suffix of Δ(g) whose reversed inverse starts Δ(h)
    let mut t = 0;
    while t < k && t < l && g[k - 1 - t] == h[t].inverse() {
        t += 1;
    }
    let g_rem = &g[..k - t];
    let h_rem = &h[t..];

    // c1^{-1}: common head of Δ(g) and Δ(gh)
    let mut p = 0;
    while p < g_rem.len() && p < m && g_rem[p] == gh[p] {
        p += 1;
    }
    // c3: common tail of Δ(h) and Δ(gh), not reaching into the head block
    let mut q = 0;
    while q < h_rem.len()
        && q < m - p
        && h_rem[h_rem.len() - 1 - q] == gh[m - 1 - q]
    {
        q += 1;
    }

    let c1 = PieceSeq(g_rem[..p].to_vec()).inverse();
    let c2 = PieceSeq(g[k - t..].to_vec());
    let c3 = PieceSeq(h_rem[h_rem.len() - q..].to_vec());
    let r1 = PieceSeq(g_rem[p..].to_vec());
    let r2 = PieceSeq(h_rem[..h_rem.len() - q].to_vec());
    let r3 = PieceSeq(gh[p..m - q].to_vec()).inverse();
    Triangle {
        dg,
        dh,
        dgh,
        c1,
        c2,
        c3,
        r1,
        r2,
        r3,
    }
}

/// Computes the `(g, h)`-triangle and validates the three reconstruction
/// identities at letter level.
pub fn triangle<D: Decomposer + ?Sized>(dec: &D, g: &Word, h: &Word) -> Result<Triangle> {
    let gh = g.mul(h);
    let t = triangle_from_parts(dec.decompose(g), dec.decompose(h), dec.decompose(&gh));
    for (word, seq, name) in [(g, &t.dg, "g"), (h, &t.dh, "h"), (&gh, &t.dgh, "gh")] {
        if !reconstructs(word, seq) {
            return Err(Error::Consistency(format!(
                "decomposition {seq} of {name} = {} does not reconstruct it",
                print_word(word)
            )));
        }
    }
    let check = |lhs: Vec<&PieceSeq>, target: &PieceSeq, name: &str| -> Result<()> {
        let joined: Vec<Word> = lhs.iter().flat_map(|s| s.pieces().iter().cloned()).collect();
        if joined != target.pieces() {
            return Err(Error::Consistency(format!("triangle identity for {name} fails")));
        }
        Ok(())
    };
    check(vec![&t.c1.inverse(), &t.r1, &t.c2], &t.dg, "g")?;
    check(vec![&t.c2.inverse(), &t.r2, &t.c3], &t.dh, "h")?;
    check(vec![&t.c1.inverse(), &t.r3.inverse(), &t.c3], &t.dgh, "gh")?;
    Ok(t)
}

/// Memoised decompositions of every reduced word up to a length, used by
/// the exhaustive pair scans.
pub struct DecompositionTable {
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    seqs: Vec<PieceSeq>,
    /// `len_end[l]` = number of words of length `<= l`.
    len_end: Vec<usize>,
}

impl DecompositionTable {
    pub fn new<D: Decomposer + ?Sized>(dec: &D, ctx: GroupCtx, max_len: usize) -> Self {
        let words: Vec<Word> = crate::words::enumerate_reduced(ctx, max_len).collect();
        let seqs: Vec<PieceSeq> = words.par_iter().map(|g| dec.decompose(g)).collect();
        let index = words.iter().cloned().enumerate().map(|(i, g)| (g, i)).collect();
        let mut len_end = vec![0; max_len + 1];
        for g in &words {
            for slot in len_end.iter_mut().skip(g.len()) {
                *slot += 1;
            }
        }
        DecompositionTable {
            words,
            index,
            seqs,
            len_end,
        }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn seq(&self, i: usize) -> &PieceSeq {
        &self.seqs[i]
    }

    pub fn lookup(&self, g: &Word) -> Option<&PieceSeq> {
        self.index.get(g).map(|&i| &self.seqs[i])
    }

    /// Indices of the words of length `<= len`.
    pub fn upto(&self, len: usize) -> std::ops::Range<usize> {
        0..self.len_end[len.min(self.len_end.len() - 1)]
    }
}

/// Enumerates all pairs `(g, h)` of reduced words with `|g| + |h| <= budget`
/// in shortlex order of `g` then `h`, and folds a per-pair score into the
/// maximum with the first-attaining pair as witness.
pub(crate) fn scan_pairs_max<T, F>(words: &[Word], budget: usize, score: F) -> (Option<(T, usize, usize)>, usize)
where
    T: PartialOrd + Send + Clone,
    F: Fn(usize, usize) -> Option<T> + Sync,
{
    let ends: Vec<usize> = (0..=budget)
        .map(|l| words.partition_point(|w| w.len() <= l))
        .collect();
    let best = (0..ends[budget])
        .into_par_iter()
        .map(|i| {
            let mut local: Option<(T, usize, usize)> = None;
            let mut count = 0usize;
            for j in 0..ends[budget - words[i].len()] {
                count += 1;
                if let Some(v) = score(i, j) {
                    let better = match &local {
                        None => true,
                        Some((cur, _, _)) => v > *cur,
                    };
                    if better {
                        local = Some((v, i, j));
                    }
                }
            }
            (local, count)
        })
        .reduce(
            || (None, 0),
            |(a, ca), (b, cb)| {
                let merged = match (a, b) {
                    (None, x) | (x, None) => x,
                    (Some(x), Some(y)) => {
                        // ties go to the earlier pair in enumeration order
                        if y.0 > x.0 || (y.0 == x.0 && (y.1, y.2) < (x.1, x.2)) {
                            Some(y)
                        } else {
                            Some(x)
                        }
                    }
                };
                (merged, ca + cb)
            },
        );
    best
}

#[derive(Debug, Clone, Serialize)]
pub struct RReport {
    pub scheme: String,
    pub budget: usize,
    pub pairs_checked: usize,
    pub r_hat: usize,
    /// An attaining pair `(g, h)`.
    pub witness: Option<(String, String)>,
}

/// Largest r-part length over all pairs with `|g| + |h| <= budget`.
pub fn measure_r<D: Decomposer + ?Sized>(
    dec: &D,
    label: &str,
    ctx: GroupCtx,
    budget: usize,
) -> RReport {
    let table = DecompositionTable::new(dec, ctx, budget);
    let words = table.words();
    let (best, pairs) = scan_pairs_max(words, budget, |i, j| {
        let gh = words[i].mul(&words[j]);
        let dgh = table.lookup(&gh).expect("product within budget").clone();
        let t = triangle_from_parts(table.seq(i).clone(), table.seq(j).clone(), dgh);
        Some(t.max_r())
    });
    let (r_hat, witness) = match best {
        Some((r, i, j)) if r > 0 => (r, Some((print_word(&words[i]), print_word(&words[j])))),
        _ => (0, None),
    };
    RReport {
        scheme: label.to_string(),
        budget,
        pairs_checked: pairs,
        r_hat,
        witness,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BViolation {
    pub g: String,
    pub h: String,
    pub r1: usize,
    pub r2: usize,
    pub r3: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomBReport {
    pub scheme: String,
    pub budget: usize,
    pub r: usize,
    pub r_hat: usize,
    pub pairs_checked: usize,
    pub violation_count: usize,
    pub violations: Vec<BViolation>,
    pub pass: bool,
}

/// Passes iff every pair with `|g| + |h| <= budget` has r-parts of length
/// at most `r`.
pub fn check_axiom_b<D: Decomposer + ?Sized>(
    dec: &D,
    label: &str,
    ctx: GroupCtx,
    budget: usize,
    r: usize,
) -> AxiomBReport {
    let table = DecompositionTable::new(dec, ctx, budget);
    let words = table.words();
    let mut violations = Vec::new();
    let mut violation_count = 0;
    let mut pairs = 0;
    let mut r_hat = 0;
    for i in table.upto(budget) {
        for j in table.upto(budget - words[i].len()) {
            pairs += 1;
            let gh = words[i].mul(&words[j]);
            let dgh = table.lookup(&gh).expect("product within budget").clone();
            let t = triangle_from_parts(table.seq(i).clone(), table.seq(j).clone(), dgh);
            r_hat = r_hat.max(t.max_r());
            if t.max_r() > r {
                violation_count += 1;
                if violations.len() < MAX_LISTED {
                    violations.push(BViolation {
                        g: print_word(&words[i]),
                        h: print_word(&words[j]),
                        r1: t.r1.len(),
                        r2: t.r2.len(),
                        r3: t.r3.len(),
                    });
                }
            }
        }
    }
    AxiomBReport {
        scheme: label.to_string(),
        budget,
        r,
        r_hat,
        pairs_checked: pairs,
        violation_count,
        violations,
        pass: violation_count == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> GroupCtx {
        GroupCtx::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        parse_word(s, ctx()).unwrap()
    }

    fn seq(parts: &[&str]) -> PieceSeq {
        PieceSeq(parts.iter().map(|p| w(p)).collect())
    }

    #[test]
    fn decompose_examples() {
        let brooks = Scheme::parse("brooks:w=ab", ctx()).unwrap();
        assert_eq!(brooks.decompose(&w("aabb")), seq(&["a", "ab", "b"]));
        let rolli = Scheme::rolli(ctx());
        assert_eq!(rolli.decompose(&w("aaBBBa")), seq(&["aa", "BBB", "a"]));
        let sms = Scheme::parse("sms:w=aba", ctx()).unwrap();
        assert_eq!(sms.decompose(&w("ababa")), seq(&["a", "b", "a", "b", "a"]));
        for s in [&brooks, &rolli, &sms] {
            assert!(s.decompose(&Word::identity()).is_empty());
        }
    }

    #[test]
    fn sms_gaps_and_inverse_runs() {
        let sms = Scheme::parse("sms:w=aba", ctx()).unwrap();
        assert_eq!(sms.decompose(&w("babABAb")), seq(&["bab", "A", "B", "A", "b"]));
        assert_eq!(sms.decompose(&w("abab")), seq(&["a", "b", "a", "b"]));
        let abba = Scheme::parse("sms:w=abba", ctx()).unwrap();
        assert_eq!(abba.decompose(&w("abbabba")), seq(&["a", "bb", "a", "bb", "a"]));
    }

    #[test]
    fn scheme_configuration_errors() {
        assert!(matches!(Scheme::parse("sms:w=abab", ctx()), Err(Error::Config(_))));
        assert!(matches!(Scheme::parse("brooks:w=aba", ctx()), Err(Error::Config(_))));
        assert!(matches!(Scheme::parse("sms:w=ab", ctx()), Err(Error::Config(_))));
        assert!(matches!(Scheme::parse("brooks:w=", ctx()), Err(Error::Config(_))));
        assert!(matches!(Scheme::parse("nope", ctx()), Err(Error::Descriptor { .. })));
        assert!(matches!(
            Scheme::parse("brooks:w=ac", ctx()),
            Err(Error::LetterOutOfRank { .. })
        ));
    }

    #[test]
    fn piece_membership() {
        let brooks = Scheme::parse("brooks:w=ab", ctx()).unwrap();
        assert!(brooks.is_piece(&w("ab")));
        assert!(brooks.is_piece(&w("BA")));
        assert!(brooks.is_piece(&w("bbaa")));
        assert!(!brooks.is_piece(&w("aab")));
        assert!(!brooks.is_piece(&Word::identity()));
        let rolli = Scheme::rolli(ctx());
        assert!(rolli.is_piece(&w("AAA")));
        assert!(!rolli.is_piece(&w("ab")));
    }

    #[test]
    fn triangle_examples() {
        let rolli = Scheme::rolli(ctx());
        let t = triangle(&rolli, &w("aab"), &w("Baaa")).unwrap();
        assert_eq!(t.c2, seq(&["b"]));
        assert!(t.c1.is_empty() && t.c3.is_empty());
        assert_eq!(t.r1, seq(&["aa"]));
        assert_eq!(t.r2, seq(&["aaa"]));
        assert_eq!(t.r3.inverse(), seq(&["aaaaa"]));

        let brooks = Scheme::parse("brooks:w=ab", ctx()).unwrap();
        let g = w("abbaBa");
        let t = triangle(&brooks, &g, &g.inverse()).unwrap();
        assert_eq!(t.c2, brooks.decompose(&g));
        assert!(t.r1.is_empty() && t.r2.is_empty() && t.r3.is_empty());

        let h = w("bab");
        let t = triangle(&brooks, &Word::identity(), &h).unwrap();
        assert!(t.c1.is_empty() && t.c2.is_empty() && t.r1.is_empty() && t.r2.is_empty());
        assert_eq!(t.c3, brooks.decompose(&h));
    }

    #[test]
    fn aligned_triangle_has_trivial_c2() {
        let sms = Scheme::parse("sms:w=aba", ctx()).unwrap();
        let t = triangle(&sms, &w("bab"), &w("ab")).unwrap();
        assert!(t.c2.is_empty());
        assert_eq!(t.dgh, seq(&["b", "a", "b", "a", "b"]));
        assert_eq!(t.max_r(), 5);
    }

    struct Corrupted(Scheme);

    impl Decomposer for Corrupted {
        fn decompose(&self, g: &Word) -> PieceSeq {
            let mut s = self.0.decompose(g);
            // merge the first two pieces of long enough words
            if s.len() >= 3 && g.len() >= 5 {
                let merged = s.0[0].concat(&s.0[1]);
                s.0.splice(0..2, [merged]);
            }
            s
        }
    }

    #[test]
    fn axiom_a_passes_and_detects_corruption() {
        let rolli = Scheme::rolli(ctx());
        assert!(check_axiom_a(&rolli, "rolli", ctx(), 6).pass);
        let brooks = Scheme::parse("brooks:w=ab", ctx()).unwrap();
        assert!(check_axiom_a(&brooks, "brooks:w=ab", ctx(), 6).pass);
        let report = check_axiom_a(&Corrupted(brooks), "corrupted", ctx(), 6);
        assert!(!report.pass);
        assert!(report
            .violations
            .iter()
            .any(|v| v.clause == AxiomAClause::SubRange));
    }

    #[test]
    fn r_measurement_and_axiom_b() {
        let rolli = Scheme::rolli(ctx());
        let r = measure_r(&rolli, "rolli", ctx(), 4);
        assert!(r.r_hat >= 1 && r.witness.is_some());
        assert!(check_axiom_b(&rolli, "rolli", ctx(), 6, 3).pass);
        let at = measure_r(&rolli, "rolli", ctx(), 6).r_hat;
        assert!(check_axiom_b(&rolli, "rolli", ctx(), 6, at).pass);
        let fail = check_axiom_b(&rolli, "rolli", ctx(), 6, at - 1);
        assert!(!fail.pass && !fail.violations.is_empty());
    }
}
