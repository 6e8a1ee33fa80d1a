//! Letters, freely reduced words and the prefix/extension combinatorics of
//! the Cayley tree.
//!
//! A word is stored as a plain sequence of [`Letter`]s. Words carry no
//! reference to their [`Basis`]; the basis is only needed to parse, print
//! and to know how many letters an extension may use.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported rank: one lowercase character per generator.
pub const MAX_RANK: usize = 26;

/// A generator or inverse generator. Encoded as `2 * generator + sign`, so
/// the derived order is `a < A < b < B < ...`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        debug_assert!(generator < MAX_RANK);
        Letter((generator as u8) << 1 | inverse as u8)
    }

    pub fn positive(generator: usize) -> Self {
        Letter::new(generator, false)
    }

    pub fn from_code(code: usize) -> Self {
        debug_assert!(code < 2 * MAX_RANK);
        Letter(code as u8)
    }

    /// Dense index in `0..2N`, following the letter order.
    #[inline]
    pub fn code(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn generator(self) -> usize {
        (self.0 >> 1) as usize
    }

    #[inline]
    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    #[inline]
    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    /// `+1` or `-1`.
    pub fn sign(self) -> i8 {
        if self.is_inverse() {
            -1
        } else {
            1
        }
    }

    fn default_char(self) -> char {
        let c = (b'a' + self.generator() as u8) as char;
        if self.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.default_char())
    }
}

/// A free basis `{a_1, ..., a_N}` with single-character names.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Basis {
    names: Vec<char>,
}

impl Basis {
    pub fn new(names: Vec<char>) -> Result<Self> {
        if names.len() < 2 || names.len() > MAX_RANK {
            return Err(Error::Usage(format!(
                "rank must lie in 2..={MAX_RANK}, got {}",
                names.len()
            )));
        }
        for (i, c) in names.iter().enumerate() {
            if !c.is_ascii_lowercase() {
                return Err(Error::Usage(format!(
                    "generator name {c:?} is not a lowercase ASCII letter"
                )));
            }
            if names[..i].contains(c) {
                return Err(Error::Usage(format!("generator name {c:?} repeated")));
            }
        }
        Ok(Basis { names })
    }

    /// The basis `a, b, c, ...` of the given rank.
    pub fn standard(rank: usize) -> Result<Self> {
        if !(2..=MAX_RANK).contains(&rank) {
            return Err(Error::Usage(format!(
                "rank must lie in 2..={MAX_RANK}, got {rank}"
            )));
        }
        Basis::new((0..rank).map(|i| (b'a' + i as u8) as char).collect())
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    /// All `2N` letters in the canonical order `a, A, b, B, ...`.
    pub fn letters(&self) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * self.rank()).map(Letter::from_code)
    }

    pub fn letter_char(&self, x: Letter) -> char {
        let c = self.names[x.generator()];
        if x.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn letter_from_char(&self, c: char) -> Option<Letter> {
        let lower = c.to_ascii_lowercase();
        let generator = self.names.iter().position(|&n| n == lower)?;
        Some(Letter::new(generator, c.is_ascii_uppercase()))
    }

    /// Parses a word; `""` and `"1"` denote the empty word. The input must
    /// already be freely reduced.
    pub fn parse_word(&self, text: &str) -> Result<ReducedWord> {
        let text = text.trim();
        if text.is_empty() || text == "1" {
            return Ok(ReducedWord::empty());
        }
        let mut letters = Vec::with_capacity(text.len());
        for (column, c) in text.chars().enumerate() {
            let x = self.letter_from_char(c).ok_or_else(|| {
                Error::parse(1, column + 1, format!("{c:?} is not a basis letter"))
            })?;
            if letters.last() == Some(&x.inverse()) {
                return Err(Error::parse(
                    1,
                    column + 1,
                    format!("word {text:?} is not freely reduced"),
                ));
            }
            letters.push(x);
        }
        Ok(ReducedWord(letters))
    }

    pub fn format_word(&self, w: &ReducedWord) -> String {
        if w.is_empty() {
            return "1".to_string();
        }
        w.0.iter().map(|&x| self.letter_char(x)).collect()
    }

    /// Number of one-letter reduced extensions of a word: `2N` for the
    /// empty word, `2N - 1` otherwise.
    pub fn branching(&self, w: &ReducedWord) -> usize {
        if w.is_empty() {
            2 * self.rank()
        } else {
            2 * self.rank() - 1
        }
    }

    /// Cardinality of `extend_right(w, depth)` for a word of the given
    /// emptiness; `None` on overflow.
    pub fn sphere_size(&self, prefix_is_empty: bool, depth: usize) -> Option<u128> {
        if depth == 0 {
            return Some(1);
        }
        let q = (2 * self.rank() - 1) as u128;
        let mut size: u128 = if prefix_is_empty {
            2 * self.rank() as u128
        } else {
            q
        };
        for _ in 1..depth {
            size = size.checked_mul(q)?;
        }
        Some(size)
    }
}

/// A freely reduced word: no letter is followed by its inverse.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReducedWord(Vec<Letter>);

impl ReducedWord {
    pub fn empty() -> Self {
        ReducedWord(Vec::new())
    }

    pub fn letter(x: Letter) -> Self {
        ReducedWord(vec![x])
    }

    /// Freely reduces an arbitrary letter sequence.
    pub fn reduce_from<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut w = ReducedWord::empty();
        for x in letters {
            w.push_reducing(x);
        }
        w
    }

    /// Wraps letters that are already known to be reduced.
    pub fn from_reduced(letters: Vec<Letter>) -> Option<Self> {
        if letters.windows(2).all(|p| p[1] != p[0].inverse()) {
            Some(ReducedWord(letters))
        } else {
            None
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    #[inline]
    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    #[inline]
    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    /// Multiplies by a single letter on the right, cancelling if needed.
    #[inline]
    pub fn push_reducing(&mut self, x: Letter) {
        if self.0.last() == Some(&x.inverse()) {
            self.0.pop();
        } else {
            self.0.push(x);
        }
    }

    /// Appends a letter that does not cancel. Returns `false` (and leaves
    /// the word unchanged) if it would.
    pub fn try_push(&mut self, x: Letter) -> bool {
        if self.0.last() == Some(&x.inverse()) {
            false
        } else {
            self.0.push(x);
            true
        }
    }

    /// Right-multiplies in place by `v`; returns the number of letters of
    /// `self` that cancelled.
    pub fn mul_assign(&mut self, v: &ReducedWord) -> usize {
        let c = cancellation(self, v);
        self.0.truncate(self.0.len() - c);
        self.0.extend_from_slice(&v.0[c..]);
        c
    }

    pub fn truncate(&mut self, len: usize) {
        self.0.truncate(len);
    }

    pub fn prefix(&self, len: usize) -> ReducedWord {
        ReducedWord(self.0[..len.min(self.len())].to_vec())
    }

    pub fn suffix_from(&self, start: usize) -> ReducedWord {
        ReducedWord(self.0[start.min(self.len())..].to_vec())
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }
}

impl fmt::Debug for ReducedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for x in &self.0 {
            write!(f, "{x:?}")?;
        }
        Ok(())
    }
}

/// Number of letters cancelled when freely reducing `u·v`.
pub fn cancellation(u: &ReducedWord, v: &ReducedWord) -> usize {
    u.0.iter()
        .rev()
        .zip(v.0.iter())
        .take_while(|(x, y)| **x == y.inverse())
        .count()
}

/// The reduced word equal to `u·v`.
pub fn reduce_concat(u: &ReducedWord, v: &ReducedWord) -> ReducedWord {
    let c = cancellation(u, v);
    let mut letters = Vec::with_capacity(u.len() + v.len() - 2 * c);
    letters.extend_from_slice(&u.0[..u.len() - c]);
    letters.extend_from_slice(&v.0[c..]);
    ReducedWord(letters)
}

pub fn invert(w: &ReducedWord) -> ReducedWord {
    ReducedWord(w.0.iter().rev().map(|x| x.inverse()).collect())
}

/// `w|_l`: erase the last `l` letters, clamping at the empty word.
pub fn truncate_right(w: &ReducedWord, l: usize) -> ReducedWord {
    ReducedWord(w.0[..w.len().saturating_sub(l)].to_vec())
}

/// `w|^l`: all reduced words of length `|w| + l` having `w` as a prefix,
/// in lexicographic order.
pub fn extend_right(basis: &Basis, w: &ReducedWord, l: usize) -> Vec<ReducedWord> {
    Sphere::new(basis.rank(), w.clone(), l).collect()
}

pub fn is_prefix(u: &ReducedWord, w: &ReducedWord) -> bool {
    w.0.starts_with(&u.0)
}

/// Streams `extend_right(prefix, depth)` lexicographically, refusing to
/// start if the sphere holds more than `budget` words.
pub fn enumerate_sphere(
    basis: &Basis,
    prefix: &ReducedWord,
    depth: usize,
    budget: u128,
) -> Result<Sphere> {
    match basis.sphere_size(prefix.is_empty(), depth) {
        Some(n) if n <= budget => Ok(Sphere::new(basis.rank(), prefix.clone(), depth)),
        Some(n) => Err(Error::Resource(format!(
            "sphere of depth {depth} holds {n} words, budget is {budget}"
        ))),
        None => Err(Error::Resource(format!(
            "sphere of depth {depth} overflows the word counter"
        ))),
    }
}

/// Depth-first iterator over a sphere of the Cayley tree. Holds one word
/// and one cursor per level; nothing else is materialised.
pub struct Sphere {
    two_n: usize,
    base_len: usize,
    depth: usize,
    word: Vec<Letter>,
    // next letter code to try at each level below the prefix
    cursor: Vec<usize>,
    done: bool,
}

impl Sphere {
    fn new(rank: usize, prefix: ReducedWord, depth: usize) -> Self {
        let base_len = prefix.len();
        Sphere {
            two_n: 2 * rank,
            base_len,
            depth,
            word: prefix.0,
            cursor: vec![0],
            done: false,
        }
    }
}

impl Iterator for Sphere {
    type Item = ReducedWord;

    fn next(&mut self) -> Option<ReducedWord> {
        if self.done {
            return None;
        }
        if self.depth == 0 {
            self.done = true;
            return Some(ReducedWord(self.word.clone()));
        }
        loop {
            let level = self.cursor.len() - 1;
            let code = self.cursor[level];
            if code >= self.two_n {
                self.cursor.pop();
                if self.cursor.is_empty() {
                    self.done = true;
                    return None;
                }
                self.word.pop();
                continue;
            }
            self.cursor[level] += 1;
            let x = Letter::from_code(code);
            if self.word.last() == Some(&x.inverse()) {
                continue;
            }
            self.word.push(x);
            if self.word.len() - self.base_len == self.depth {
                let out = ReducedWord(self.word.clone());
                self.word.pop();
                return Some(out);
            }
            self.cursor.push(0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b2() -> Basis {
        Basis::standard(2).unwrap()
    }

    fn w(basis: &Basis, s: &str) -> ReducedWord {
        basis.parse_word(s).unwrap()
    }

    #[test]
    fn concat_examples() {
        let b = Basis::standard(3).unwrap();
        assert!(reduce_concat(&w(&b, "ab"), &w(&b, "BA")).is_empty());
        assert_eq!(reduce_concat(&w(&b, "ab"), &w(&b, "Ba")), w(&b, "aa"));
        assert_eq!(reduce_concat(&w(&b, "abc"), &w(&b, "")), w(&b, "abc"));
    }

    #[test]
    fn invert_examples() {
        let b = b2();
        assert_eq!(invert(&w(&b, "aB")), w(&b, "bA"));
        assert!(invert(&w(&b, "")).is_empty());
        assert_eq!(invert(&w(&b, "abA")), w(&b, "aBA"));
    }

    #[test]
    fn truncate_examples() {
        let b = Basis::standard(3).unwrap();
        assert_eq!(truncate_right(&w(&b, "abc"), 2), w(&b, "a"));
        assert_eq!(truncate_right(&w(&b, "ab"), 0), w(&b, "ab"));
        assert!(truncate_right(&w(&b, "ab"), 5).is_empty());
    }

    #[test]
    fn extend_examples() {
        let b = b2();
        let names = |v: Vec<ReducedWord>| v.iter().map(|x| b.format_word(x)).collect::<Vec<_>>();
        assert_eq!(names(extend_right(&b, &w(&b, "a"), 1)), ["aa", "ab", "aB"]);
        assert_eq!(names(extend_right(&b, &w(&b, ""), 1)), ["a", "A", "b", "B"]);
        assert_eq!(names(extend_right(&b, &w(&b, "b"), 0)), ["b"]);
    }

    #[test]
    fn prefix_examples() {
        let b = b2();
        assert!(is_prefix(&w(&b, "a"), &w(&b, "ab")));
        assert!(!is_prefix(&w(&b, "ab"), &w(&b, "a")));
        assert!(is_prefix(&w(&b, ""), &w(&b, "BaB")));
    }

    #[test]
    fn sphere_counts() {
        let b = b2();
        assert_eq!(enumerate_sphere(&b, &w(&b, ""), 2, 1000).unwrap().count(), 12);
        assert_eq!(enumerate_sphere(&b, &w(&b, "a"), 2, 1000).unwrap().count(), 9);
        let b3 = Basis::standard(3).unwrap();
        assert_eq!(enumerate_sphere(&b3, &w(&b3, ""), 1, 1000).unwrap().count(), 6);
    }

    #[test]
    fn sphere_is_lexicographic() {
        let b = b2();
        let words: Vec<_> = enumerate_sphere(&b, &w(&b, "B"), 3, 1000).unwrap().collect();
        let mut sorted = words.clone();
        sorted.sort();
        assert_eq!(words, sorted);
    }

    #[test]
    fn sphere_budget() {
        let b = b2();
        let err = enumerate_sphere(&b, &w(&b, ""), 30, 1_000_000).err().unwrap();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn parse_and_format() {
        let b = b2();
        assert_eq!(b.format_word(&w(&b, "1")), "1");
        assert_eq!(b.format_word(&w(&b, "aBBa")), "aBBa");
        assert!(matches!(b.parse_word("aA"), Err(Error::Parse { .. })));
        assert!(matches!(b.parse_word("ac"), Err(Error::Parse { column: 2, .. })));
    }

    #[test]
    fn custom_names() {
        let b = Basis::new(vec!['x', 'y']).unwrap();
        assert_eq!(b.format_word(&b.parse_word("xY").unwrap()), "xY");
        assert!(Basis::new(vec!['x', 'x']).is_err());
        assert!(Basis::new(vec!['x']).is_err());
    }

    #[test]
    fn letter_order() {
        let b = Basis::standard(2).unwrap();
        let order: String = b.letters().map(|x| b.letter_char(x)).collect();
        assert_eq!(order, "aAbB");
    }
}
