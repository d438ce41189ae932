//! Reduced words in a free group of rank `n`, with the arithmetic and
//! scanning primitives the rest of the crate is built on.
//!
//! A word is stored as a flat sequence of signed generator indices:
//! `a..z` are generators `1..26`, `A..Z` their inverses.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Rank of the ambient free group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GroupCtx {
    rank: usize,
}

impl GroupCtx {
    pub fn new(rank: usize) -> Result<Self> {
        if (1..=26).contains(&rank) {
            Ok(GroupCtx { rank })
        } else {
            Err(Error::InvalidRank(rank))
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// The symmetric generating set, ordered by signed index
    /// (`x_n^{-1} < ... < x_1^{-1} < x_1 < ... < x_n`).
    pub fn alphabet(&self) -> Vec<Letter> {
        let n = self.rank as i8;
        (-n..=-1).chain(1..=n).map(Letter).collect()
    }

    pub fn contains(&self, letter: Letter) -> bool {
        letter.generator() <= self.rank
    }

    pub fn check(&self, g: &Word) -> Result<()> {
        match g.letters().iter().position(|&l| !self.contains(l)) {
            None => Ok(()),
            Some(offset) => Err(Error::LetterOutOfRank {
                letter: g.letters()[offset].to_char(),
                offset,
                rank: self.rank,
            }),
        }
    }
}

/// A generator or inverse generator, encoded as a non-zero signed index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(i8);

impl Letter {
    pub fn new(generator: usize, positive: bool) -> Self {
        debug_assert!((1..=26).contains(&generator));
        let g = generator as i8;
        Letter(if positive { g } else { -g })
    }

    pub fn from_index(index: i8) -> Self {
        debug_assert!(index != 0 && index.unsigned_abs() <= 26);
        Letter(index)
    }

    pub fn index(self) -> i8 {
        self.0
    }

    pub fn generator(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    pub fn to_char(self) -> char {
        let base = if self.0 > 0 { b'a' } else { b'A' };
        (base + self.0.unsigned_abs() - 1) as char
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'a'..='z' => Some(Letter((ch as u8 - b'a' + 1) as i8)),
            'A'..='Z' => Some(Letter(-((ch as u8 - b'A' + 1) as i8))),
            _ => None,
        }
    }
}

/// A reduced word. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut stack: Vec<Letter> = Vec::new();
        for l in letters {
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Word { letters: stack }
    }

    /// Wraps a letter sequence that the caller knows to be reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters.windows(2).all(|p| p[0] != p[1].inverse()));
        Word { letters }
    }

    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.letters.last().copied()
    }

    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Reduced product `self * other`.
    pub fn mul(&self, other: &Word) -> Word {
        let mut cancel = 0;
        let (a, b) = (&self.letters, &other.letters);
        while cancel < a.len() && cancel < b.len() && a[a.len() - 1 - cancel] == b[cancel].inverse()
        {
            cancel += 1;
        }
        let mut letters = Vec::with_capacity(a.len() + b.len() - 2 * cancel);
        letters.extend_from_slice(&a[..a.len() - cancel]);
        letters.extend_from_slice(&b[cancel..]);
        Word { letters }
    }

    /// Appends `other` assuming the junction does not cancel.
    pub fn concat(&self, other: &Word) -> Word {
        debug_assert!(is_reduced_concat(self, other));
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// The factor `self[start..end]`; factors of reduced words are reduced.
    pub fn factor(&self, start: usize, end: usize) -> Word {
        Word {
            letters: self.letters[start..end].to_vec(),
        }
    }

    pub fn is_reduced(&self) -> bool {
        self.letters.windows(2).all(|p| p[0] != p[1].inverse())
    }

    pub fn contains_factor(&self, w: &Word) -> bool {
        !w.is_empty() && self.letters.windows(w.len()).any(|f| f == w.letters())
    }

    pub fn has_factor_at(&self, w: &Word, at: usize) -> bool {
        at + w.len() <= self.len() && self.letters[at..at + w.len()] == w.letters[..]
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Shortlex order: by length, then lexicographic on signed indices.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Parses a word literal and freely reduces it. `"1"` is accepted as an
/// alias for the identity so that printed identities round-trip.
pub fn parse_word(text: &str, ctx: GroupCtx) -> Result<Word> {
    Ok(Word::reduce(parse_letters(text, ctx)?))
}

/// Like [`parse_word`] but rejects input that is not already reduced.
pub fn parse_word_strict(text: &str, ctx: GroupCtx) -> Result<Word> {
    let letters = parse_letters(text, ctx)?;
    if letters.windows(2).any(|p| p[0] == p[1].inverse()) {
        return Err(Error::NotReduced(text.to_string()));
    }
    Ok(Word { letters })
}

fn parse_letters(text: &str, ctx: GroupCtx) -> Result<Vec<Letter>> {
    let text = text.trim();
    if text == "1" {
        return Ok(Vec::new());
    }
    text.chars()
        .enumerate()
        .map(|(offset, ch)| {
            let l = Letter::from_char(ch).ok_or(Error::InvalidCharacter { ch, offset })?;
            if !ctx.contains(l) {
                return Err(Error::LetterOutOfRank {
                    letter: ch,
                    offset,
                    rank: ctx.rank(),
                });
            }
            Ok(l)
        })
        .collect()
}

/// Canonical printed form; the identity prints as `1`.
pub fn print_word(g: &Word) -> String {
    if g.is_identity() {
        "1".to_string()
    } else {
        g.to_string()
    }
}

pub fn multiply(g: &Word, h: &Word) -> Word {
    g.mul(h)
}

pub fn invert(g: &Word) -> Word {
    g.inverse()
}

/// True iff the junction of `g h` does not cancel.
pub fn is_reduced_concat(g: &Word, h: &Word) -> bool {
    match (g.last(), h.first()) {
        (Some(x), Some(y)) => x != y.inverse(),
        _ => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountMode {
    /// Overlapping occurrences.
    Big,
    /// Greedy left-to-right disjoint occurrences.
    Small,
}

impl std::str::FromStr for CountMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "big" => Ok(CountMode::Big),
            "small" => Ok(CountMode::Small),
            other => Err(Error::Descriptor {
                descriptor: other.to_string(),
                reason: "count mode must be 'big' or 'small'".into(),
            }),
        }
    }
}

fn count_one(w: &Word, g: &Word, mode: CountMode) -> i64 {
    let n = w.len();
    if n > g.len() {
        return 0;
    }
    match mode {
        CountMode::Big => (0..=g.len() - n).filter(|&i| g.has_factor_at(w, i)).count() as i64,
        CountMode::Small => {
            let mut count = 0;
            let mut i = 0;
            while i + n <= g.len() {
                if g.has_factor_at(w, i) {
                    count += 1;
                    i += n;
                } else {
                    i += 1;
                }
            }
            count
        }
    }
}

/// Signed number of occurrences of `w` in `g`: occurrences of `w` minus
/// occurrences of `w^{-1}`.
pub fn count_occurrences(w: &Word, g: &Word, mode: CountMode) -> Result<i64> {
    if w.is_identity() {
        return Err(Error::IdentityPattern);
    }
    Ok(count_one(w, g, mode) - count_one(&w.inverse(), g, mode))
}

/// KMP failure function over signed letters: `table[i]` is the length of the
/// longest proper border of `w[..=i]`.
pub fn border_table(w: &Word) -> Vec<usize> {
    let s = w.letters();
    let mut table = vec![0usize; s.len()];
    let mut k = 0;
    for i in 1..s.len() {
        while k > 0 && s[i] != s[k] {
            k = table[k - 1];
        }
        if s[i] == s[k] {
            k += 1;
        }
        table[i] = k;
    }
    table
}

/// Splits a selfoverlapping word as `w = s m s` with `s` the longest border
/// satisfying `2|s| <= |w|`. Returns `None` for non-selfoverlapping words.
/// `m` may be the identity (e.g. `w = abab`).
pub fn max_sms_split(w: &Word) -> Option<(Word, Word)> {
    if w.is_identity() {
        return None;
    }
    let table = border_table(w);
    let n = w.len();
    let mut b = table[n - 1];
    while b > 0 && 2 * b > n {
        b = table[b - 1];
    }
    if b == 0 {
        return None;
    }
    Some((w.factor(0, b), w.factor(b, n - b)))
}

pub fn is_selfoverlapping(w: &Word) -> bool {
    max_sms_split(w).is_some()
}

/// Number of reduced words of length exactly `len`.
pub fn sphere_size(ctx: GroupCtx, len: usize) -> u64 {
    if len == 0 {
        1
    } else {
        let r = ctx.rank() as u64;
        2 * r * (2 * r - 1).pow(len as u32 - 1)
    }
}

/// Odometer over the reduced words of one fixed length, in lexicographic
/// order of signed indices.
#[derive(Debug, Clone)]
pub struct SphereWords {
    alphabet: Vec<Letter>,
    state: Vec<usize>,
    fresh: bool,
    done: bool,
}

impl SphereWords {
    pub fn new(ctx: GroupCtx, len: usize) -> Self {
        let alphabet = ctx.alphabet();
        let mut it = SphereWords {
            alphabet,
            state: vec![0; len],
            fresh: true,
            done: false,
        };
        it.fill_minimal(0);
        it
    }

    fn valid_at(&self, pos: usize, choice: usize) -> bool {
        pos == 0 || self.alphabet[choice] != self.alphabet[self.state[pos - 1]].inverse()
    }

    fn fill_minimal(&mut self, from: usize) {
        for pos in from..self.state.len() {
            let c = (0..self.alphabet.len())
                .find(|&c| self.valid_at(pos, c))
                .expect("rank >= 1 leaves at least one choice");
            self.state[pos] = c;
        }
    }

    fn advance(&mut self) -> bool {
        let mut pos = self.state.len();
        while pos > 0 {
            pos -= 1;
            let next = (self.state[pos] + 1..self.alphabet.len()).find(|&c| self.valid_at(pos, c));
            if let Some(c) = next {
                self.state[pos] = c;
                self.fill_minimal(pos + 1);
                return true;
            }
        }
        false
    }

    fn current(&self) -> Word {
        Word::from_reduced(self.state.iter().map(|&c| self.alphabet[c]).collect())
    }
}

impl Iterator for SphereWords {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        if self.done {
            return None;
        }
        if self.fresh {
            self.fresh = false;
        } else if !self.advance() {
            self.done = true;
            return None;
        }
        Some(self.current())
    }
}

/// Every reduced word of length `<= max_len`, each once, in shortlex order.
pub fn enumerate_reduced(ctx: GroupCtx, max_len: usize) -> impl Iterator<Item = Word> {
    (0..=max_len).flat_map(move |len| SphereWords::new(ctx, len))
}

/// A tuple in the aligned domain: non-identity entries whose consecutive
/// junctions do not cancel.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlignedTuple(Vec<Word>);

impl AlignedTuple {
    pub fn new(entries: Vec<Word>) -> Result<Self> {
        if let Some(i) = entries.iter().position(Word::is_identity) {
            return Err(Error::NotAligned(format!("entry {i} is the identity")));
        }
        if let Some(i) = entries
            .windows(2)
            .position(|p| !is_reduced_concat(&p[0], &p[1]))
        {
            return Err(Error::NotAligned(format!(
                "junction between entries {i} and {} cancels",
                i + 1
            )));
        }
        Ok(AlignedTuple(entries))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Word] {
        &self.0
    }

    pub fn into_entries(self) -> Vec<Word> {
        self.0
    }
}

pub fn is_aligned(entries: &[Word]) -> bool {
    entries.iter().all(|g| !g.is_identity())
        && entries.windows(2).all(|p| is_reduced_concat(&p[0], &p[1]))
}

/// Ordered cut positions splitting a length into `parts` positive pieces.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, total: usize, left: usize, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 1 {
            if total > start {
                acc.push(total - start);
                out.push(acc.clone());
                acc.pop();
            }
            return;
        }
        for len in 1..=total.saturating_sub(start + left - 1) {
            acc.push(len);
            go(start + len, total, left - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(0, total, parts, &mut Vec::new(), &mut out);
    out
}

fn split_word(g: &Word, parts: &[usize]) -> Vec<Word> {
    let mut start = 0;
    parts
        .iter()
        .map(|&len| {
            let w = g.factor(start, start + len);
            start += len;
            w
        })
        .collect()
}

/// All aligned `degree`-tuples with total length `<= max_total_len`, each
/// exactly once. An aligned tuple is the same thing as a reduced word cut
/// into `degree` non-empty consecutive factors, which is how they are
/// generated: by total length, then word, then cut positions.
pub fn enumerate_aligned(
    ctx: GroupCtx,
    degree: usize,
    max_total_len: usize,
) -> impl Iterator<Item = AlignedTuple> {
    (degree..=max_total_len)
        .filter(move |_| degree > 0)
        .flat_map(move |total| {
            let cuts = compositions(total, degree);
            SphereWords::new(ctx, total).flat_map(move |g| {
                cuts.clone()
                    .into_iter()
                    .map(move |parts| AlignedTuple(split_word(&g, &parts)))
            })
        })
}

/// All `degree`-tuples of reduced words (identity allowed) with total
/// length `<= max_total_len`.
pub fn enumerate_full(ctx: GroupCtx, degree: usize, max_total_len: usize) -> Vec<Vec<Word>> {
    let by_len: Vec<Vec<Word>> = (0..=max_total_len)
        .map(|len| SphereWords::new(ctx, len).collect())
        .collect();
    let mut out = Vec::new();
    fn go(
        by_len: &[Vec<Word>],
        left: usize,
        budget: usize,
        acc: &mut Vec<Word>,
        out: &mut Vec<Vec<Word>>,
    ) {
        if left == 0 {
            out.push(acc.clone());
            return;
        }
        for len in 0..=budget {
            for g in &by_len[len] {
                acc.push(g.clone());
                go(by_len, left - 1, budget - len, acc, out);
                acc.pop();
            }
        }
    }
    go(&by_len, degree, max_total_len, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx2() -> GroupCtx {
        GroupCtx::new(2).unwrap()
    }

    fn w(s: &str) -> Word {
        parse_word(s, ctx2()).unwrap()
    }

    #[test]
    fn parse_reduces_and_validates() {
        assert!(w("").is_identity());
        assert_eq!(w("abB"), w("a"));
        assert_eq!(w("aBAb").to_string(), "aBAb");
        assert_eq!(w("1"), Word::identity());
        assert!(matches!(
            parse_word("ac", ctx2()),
            Err(Error::LetterOutOfRank { letter: 'c', offset: 1, .. })
        ));
        assert!(matches!(
            parse_word("a-b", ctx2()),
            Err(Error::InvalidCharacter { ch: '-', .. })
        ));
        assert!(matches!(parse_word_strict("abB", ctx2()), Err(Error::NotReduced(_))));
        assert_eq!(parse_word_strict("aBAb", ctx2()).unwrap(), w("aBAb"));
    }

    #[test]
    fn multiply_and_invert() {
        assert_eq!(multiply(&w("ab"), &w("Ba")), w("aa"));
        assert_eq!(multiply(&w("a"), &Word::identity()), w("a"));
        assert!(multiply(&w("aba"), &w("ABA")).is_identity());
        assert!(invert(&Word::identity()).is_identity());
        assert_eq!(invert(&w("ab")), w("BA"));
        assert_eq!(invert(&invert(&w("abab"))), w("abab"));
    }

    #[test]
    fn reduced_concat_junction() {
        assert!(is_reduced_concat(&w("a"), &w("a")));
        assert!(!is_reduced_concat(&w("a"), &w("A")));
        assert!(!is_reduced_concat(&w("ab"), &w("Ba")));
        assert!(is_reduced_concat(&Word::identity(), &w("A")));
    }

    #[test]
    fn occurrence_counts() {
        assert_eq!(count_occurrences(&w("aba"), &w("ababa"), CountMode::Big).unwrap(), 2);
        assert_eq!(count_occurrences(&w("aba"), &w("ababa"), CountMode::Small).unwrap(), 1);
        assert_eq!(count_occurrences(&w("ab"), &w("BA"), CountMode::Big).unwrap(), -1);
        assert_eq!(
            count_occurrences(&Word::identity(), &w("ab"), CountMode::Big),
            Err(Error::IdentityPattern)
        );
    }

    #[test]
    fn sms_splits() {
        assert_eq!(max_sms_split(&w("aba")), Some((w("a"), w("b"))));
        assert_eq!(max_sms_split(&w("ab")), None);
        assert_eq!(max_sms_split(&w("abba")), Some((w("a"), w("bb"))));
        assert_eq!(max_sms_split(&w("abab")), Some((w("ab"), Word::identity())));
        // longest border "aa" exceeds half of "aaa", the next one is used
        assert_eq!(max_sms_split(&w("aaa")), Some((w("a"), w("a"))));
    }

    #[test]
    fn reduced_enumeration_counts() {
        assert_eq!(enumerate_reduced(ctx2(), 0).count(), 1);
        assert_eq!(enumerate_reduced(ctx2(), 1).count(), 5);
        assert_eq!(enumerate_reduced(ctx2(), 2).count(), 17);
        for len in 1..=6 {
            assert_eq!(SphereWords::new(ctx2(), len).count() as u64, sphere_size(ctx2(), len));
        }
        let words: Vec<Word> = enumerate_reduced(ctx2(), 4).collect();
        assert!(words.windows(2).all(|p| p[0] < p[1]));
        assert!(words.iter().all(Word::is_reduced));
    }

    #[test]
    fn aligned_enumeration() {
        assert_eq!(enumerate_aligned(ctx2(), 2, 2).count(), 12);
        let ctx1 = GroupCtx::new(1).unwrap();
        let pairs: Vec<Vec<String>> = enumerate_aligned(ctx1, 2, 2)
            .map(|t| t.entries().iter().map(|g| g.to_string()).collect())
            .collect();
        assert_eq!(pairs, vec![vec!["A", "A"], vec!["a", "a"]]);
        assert!(enumerate_aligned(ctx2(), 2, 4)
            .all(|t| t.entries() != [w("a"), w("A")]));
    }

    #[test]
    fn aligned_matches_filtered_cross_product() {
        use std::collections::BTreeSet;
        for degree in 1..=3 {
            let fast: BTreeSet<AlignedTuple> = enumerate_aligned(ctx2(), degree, 5).collect();
            let brute: BTreeSet<AlignedTuple> = enumerate_full(ctx2(), degree, 5)
                .into_iter()
                .filter(|t| is_aligned(t))
                .map(|t| AlignedTuple::new(t).unwrap())
                .collect();
            assert_eq!(fast, brute, "degree {degree}");
            assert_eq!(fast.len(), enumerate_aligned(ctx2(), degree, 5).count());
        }
    }

    #[test]
    fn aligned_tuple_validation() {
        assert!(AlignedTuple::new(vec![w("a"), w("b")]).is_ok());
        assert!(AlignedTuple::new(vec![w("a"), Word::identity()]).is_err());
        assert!(AlignedTuple::new(vec![w("ab"), w("Ba")]).is_err());
    }

    #[test]
    fn rank_bounds() {
        assert!(GroupCtx::new(0).is_err());
        assert!(GroupCtx::new(27).is_err());
        assert_eq!(GroupCtx::new(26).unwrap().alphabet().len(), 52);
    }
}
