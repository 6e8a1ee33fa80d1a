//! Automorphisms of `F_N` given by generator images, together with their
//! inverses, and factorisations into elementary moves.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::words::{cancellation, Basis, Letter, ReducedWord};

/// Images of the generators `a_1, ..., a_N`, with the images of all `2N`
/// letters cached so that evaluation never re-inverts a word.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GeneratorMap {
    images: Vec<ReducedWord>,
    letter_images: Vec<ReducedWord>,
}

impl GeneratorMap {
    pub fn new(images: Vec<ReducedWord>) -> Result<Self> {
        if let Some(i) = images.iter().position(|w| w.is_empty()) {
            return Err(Error::NotAnAutomorphism(format!(
                "generator {i} is sent to the empty word"
            )));
        }
        let rank = images.len();
        if let Some(bad) = images
            .iter()
            .flat_map(|w| w.letters())
            .find(|x| x.generator() >= rank)
        {
            return Err(Error::Usage(format!(
                "image uses letter {bad:?} outside a rank-{rank} basis"
            )));
        }
        let letter_images = images
            .iter()
            .flat_map(|w| [w.clone(), crate::words::invert(w)])
            .collect();
        Ok(GeneratorMap {
            images,
            letter_images,
        })
    }

    pub fn identity(rank: usize) -> Self {
        GeneratorMap::new(
            (0..rank)
                .map(|i| ReducedWord::letter(Letter::positive(i)))
                .collect(),
        )
        .expect("identity images are letters")
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    /// Image of the generator `a_i`.
    pub fn generator_image(&self, i: usize) -> &ReducedWord {
        &self.images[i]
    }

    pub fn images(&self) -> &[ReducedWord] {
        &self.images
    }

    /// Image of a letter (the inverse image for inverse letters).
    #[inline]
    pub fn letter_image(&self, x: Letter) -> &ReducedWord {
        &self.letter_images[x.code()]
    }

    pub fn apply(&self, w: &ReducedWord) -> ReducedWord {
        let mut out = ReducedWord::empty();
        self.apply_onto(&mut out, w.letters());
        out
    }

    /// Right-multiplies `out` by the image of `letters`.
    pub fn apply_onto(&self, out: &mut ReducedWord, letters: &[Letter]) {
        for &x in letters {
            out.mul_assign(self.letter_image(x));
        }
    }

    fn max_length(&self) -> usize {
        self.images.iter().map(ReducedWord::len).max().unwrap_or(0)
    }

    pub fn compose(&self, inner: &GeneratorMap) -> GeneratorMap {
        GeneratorMap::new(inner.images.iter().map(|w| self.apply(w)).collect())
            .expect("composition of injective maps never kills a generator")
    }

    fn is_identity(&self) -> bool {
        self.images
            .iter()
            .enumerate()
            .all(|(i, w)| w.letters() == [Letter::positive(i)])
    }

    pub fn format(&self, basis: &Basis) -> String {
        self.images
            .iter()
            .enumerate()
            .map(|(i, w)| format!("{} -> {}", basis.names()[i], basis.format_word(w)))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

impl fmt::Debug for GeneratorMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.images).finish()
    }
}

/// Elementary automorphisms: basis permutations, inversions of a single
/// generator, and the Nielsen move `a_i -> a_i · a_j^±1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ElementaryMove {
    /// `a_i -> a_{perm[i]}`.
    Permutation(Vec<usize>),
    /// `a_i -> a_i^-1`.
    Inversion(usize),
    /// `a_target -> a_target · by`, where `by` is `a_j` or `a_j^-1`, `j != target`.
    NielsenRight { target: usize, by: Letter },
}

impl ElementaryMove {
    pub fn nielsen(target: usize, by: Letter) -> Self {
        ElementaryMove::NielsenRight { target, by }
    }

    pub fn validate(&self, rank: usize) -> Result<()> {
        match self {
            ElementaryMove::Permutation(p) => {
                let mut seen = vec![false; rank];
                if p.len() != rank {
                    return Err(Error::Usage(format!(
                        "permutation has {} entries, rank is {rank}",
                        p.len()
                    )));
                }
                for &i in p {
                    if i >= rank || std::mem::replace(&mut seen[i], true) {
                        return Err(Error::Usage(format!("{p:?} is not a permutation")));
                    }
                }
            }
            ElementaryMove::Inversion(i) if *i >= rank => {
                return Err(Error::Usage(format!("generator index {i} out of range")));
            }
            ElementaryMove::NielsenRight { target, by } => {
                if *target >= rank || by.generator() >= rank {
                    return Err(Error::Usage("Nielsen move index out of range".into()));
                }
                if by.generator() == *target {
                    return Err(Error::Usage(
                        "Nielsen move must multiply by a different generator".into(),
                    ));
                }
            }
            ElementaryMove::Inversion(_) => {}
        }
        Ok(())
    }

    pub fn inverse(&self) -> ElementaryMove {
        match self {
            ElementaryMove::Permutation(p) => {
                let mut inv = vec![0; p.len()];
                for (i, &j) in p.iter().enumerate() {
                    inv[j] = i;
                }
                ElementaryMove::Permutation(inv)
            }
            ElementaryMove::Inversion(i) => ElementaryMove::Inversion(*i),
            ElementaryMove::NielsenRight { target, by } => ElementaryMove::NielsenRight {
                target: *target,
                by: by.inverse(),
            },
        }
    }

    pub fn is_nielsen(&self) -> bool {
        matches!(self, ElementaryMove::NielsenRight { .. })
    }

    /// Generator images of the move.
    pub fn forward_map(&self, rank: usize) -> GeneratorMap {
        let mut images: Vec<ReducedWord> = (0..rank)
            .map(|i| ReducedWord::letter(Letter::positive(i)))
            .collect();
        match self {
            ElementaryMove::Permutation(p) => {
                for (i, &j) in p.iter().enumerate() {
                    images[i] = ReducedWord::letter(Letter::positive(j));
                }
            }
            ElementaryMove::Inversion(i) => {
                images[*i] = ReducedWord::letter(Letter::new(*i, true));
            }
            ElementaryMove::NielsenRight { target, by } => {
                images[*target] = ReducedWord::from_reduced(vec![Letter::positive(*target), *by])
                    .expect("distinct generators never cancel");
            }
        }
        GeneratorMap::new(images).expect("elementary images are nonempty")
    }

    /// Text form used by the `moves:` grammar. Permutations print as one
    /// `P(...)` token per nontrivial cycle, joined by `; `.
    pub fn format(&self, basis: &Basis) -> String {
        let name = |i: usize| basis.names()[i];
        match self {
            ElementaryMove::Permutation(p) => {
                let mut seen = vec![false; p.len()];
                let mut cycles = Vec::new();
                for start in 0..p.len() {
                    if seen[start] || p[start] == start {
                        continue;
                    }
                    let mut cycle = String::new();
                    let mut i = start;
                    while !seen[i] {
                        seen[i] = true;
                        cycle.push(name(i));
                        i = p[i];
                    }
                    cycles.push(format!("P({cycle})"));
                }
                if cycles.is_empty() {
                    "P()".to_string()
                } else {
                    cycles.join("; ")
                }
            }
            ElementaryMove::Inversion(i) => format!("I({})", name(*i)),
            ElementaryMove::NielsenRight { target, by } => {
                format!("N({},{})", name(*target), basis.letter_char(*by))
            }
        }
    }
}

/// Formats a move word in the `moves:` grammar.
pub fn format_moves(basis: &Basis, moves: &[ElementaryMove]) -> String {
    moves
        .iter()
        .map(|m| m.format(basis))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Number of Nielsen moves in a move word; permutations and inversions
/// are free.
pub fn nielsen_count(moves: &[ElementaryMove]) -> usize {
    moves.iter().filter(|m| m.is_nielsen()).count()
}

/// Move word of the inverse automorphism.
pub fn invert_moves(moves: &[ElementaryMove]) -> Vec<ElementaryMove> {
    moves.iter().rev().map(ElementaryMove::inverse).collect()
}

/// An automorphism together with its inverse. A move word `[m_1, ..., m_k]`
/// denotes the composite `m_1 ∘ m_2 ∘ ... ∘ m_k`, i.e. the moves act on the
/// tuple of generator images from left to right.
#[derive(Clone, PartialEq, Eq)]
pub struct Automorphism {
    forward: GeneratorMap,
    inverse: GeneratorMap,
    factorization: Option<Vec<ElementaryMove>>,
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Automorphism")
            .field("forward", &self.forward)
            .field("inverse", &self.inverse)
            .finish()
    }
}

impl Automorphism {
    pub fn identity(rank: usize) -> Self {
        Automorphism {
            forward: GeneratorMap::identity(rank),
            inverse: GeneratorMap::identity(rank),
            factorization: Some(Vec::new()),
        }
    }

    /// Builds from forward and inverse images, verifying they are mutually
    /// inverse.
    pub fn from_pair(forward: GeneratorMap, inverse: GeneratorMap) -> Result<Self> {
        if forward.rank() != inverse.rank() {
            return Err(Error::Usage("forward and inverse maps differ in rank".into()));
        }
        if !verify_automorphism(&forward, &inverse) {
            return Err(Error::NotAnAutomorphism(
                "the given inverse does not invert the forward map".into(),
            ));
        }
        Ok(Automorphism {
            forward,
            inverse,
            factorization: None,
        })
    }

    /// Builds from forward images only; the inverse and a factorisation
    /// come from Nielsen reduction.
    pub fn from_forward(forward: GeneratorMap) -> Result<Self> {
        let moves = nielsen_decompose(&forward)?;
        let aut = Automorphism::from_moves(forward.rank(), &moves)?;
        debug_assert_eq!(aut.forward, forward);
        Ok(aut)
    }

    pub fn from_moves(rank: usize, moves: &[ElementaryMove]) -> Result<Self> {
        let mut acc = Automorphism::identity(rank);
        for m in moves {
            m.validate(rank)?;
            acc = compose(&acc, &elementary_to_automorphism(m, rank));
        }
        acc.factorization = Some(moves.to_vec());
        Ok(acc)
    }

    pub fn rank(&self) -> usize {
        self.forward.rank()
    }

    pub fn forward(&self) -> &GeneratorMap {
        &self.forward
    }

    pub fn inverse_map(&self) -> &GeneratorMap {
        &self.inverse
    }

    pub fn factorization(&self) -> Option<&[ElementaryMove]> {
        self.factorization.as_deref()
    }

    pub fn inverse(&self) -> Automorphism {
        Automorphism {
            forward: self.inverse.clone(),
            inverse: self.forward.clone(),
            factorization: self.factorization.as_deref().map(invert_moves),
        }
    }

    pub fn apply(&self, w: &ReducedWord) -> ReducedWord {
        self.forward.apply(w)
    }

    pub fn letter_image(&self, x: Letter) -> &ReducedWord {
        self.forward.letter_image(x)
    }

    /// `S(φ)`: the longest generator image under `φ` or `φ^-1`.
    pub fn stretch(&self) -> usize {
        self.forward.max_length().max(self.inverse.max_length())
    }

    /// Largest number of letters cancelled when reducing `φ(x)·φ(y)` over
    /// reduced two-letter words `xy`.
    pub fn cancellation_bound(&self) -> usize {
        let two_n = 2 * self.rank();
        let mut best = 0;
        for x in (0..two_n).map(Letter::from_code) {
            for y in (0..two_n).map(Letter::from_code) {
                if y != x.inverse() {
                    best = best.max(cancellation(self.letter_image(x), self.letter_image(y)));
                }
            }
        }
        best
    }

    /// Largest cancellation in `φ(x)·φ(y)` over reduced products `xy` of
    /// words of length at most `ℓ`, for `ℓ = 2, 3, ...` until two lengths in
    /// a row agree (at most 4). On all tested automorphisms this matches
    /// cancellation over arbitrary words; the two-letter bound does not.
    pub fn word_cancellation_bound(&self) -> usize {
        let two_n = 2 * self.rank();
        let mut words: Vec<ReducedWord> = Vec::new();
        let mut shell = vec![ReducedWord::empty()];
        let mut best = None;
        for _ in 1..=4 {
            shell = shell
                .iter()
                .flat_map(|w| {
                    (0..two_n).filter_map(move |c| {
                        let mut w = w.clone();
                        w.try_push(Letter::from_code(c)).then_some(w)
                    })
                })
                .collect();
            words.extend(shell.iter().cloned());
            let images: Vec<ReducedWord> = words.iter().map(|w| self.apply(w)).collect();
            let mut here = 0;
            for (x, px) in words.iter().zip(&images) {
                let back = x.last().map(Letter::inverse);
                for (y, py) in words.iter().zip(&images) {
                    if y.first() != back {
                        here = here.max(cancellation(px, py));
                    }
                }
            }
            if best == Some(here) {
                break;
            }
            best = Some(here);
        }
        best.unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        self.forward.is_identity()
    }

    /// Factorisation if known, otherwise a fresh Nielsen decomposition.
    pub fn moves(&self) -> Result<Vec<ElementaryMove>> {
        match &self.factorization {
            Some(m) => Ok(m.clone()),
            None => nielsen_decompose(&self.forward),
        }
    }

    /// Attaches a factorisation after checking that it recomposes to the
    /// forward map.
    pub fn with_factorization(mut self, moves: Vec<ElementaryMove>) -> Result<Self> {
        let check = Automorphism::from_moves(self.rank(), &moves)?;
        if check.forward != self.forward {
            return Err(Error::Violation(
                "move word does not recompose to the automorphism".into(),
            ));
        }
        self.factorization = Some(moves);
        Ok(self)
    }
}

/// `outer ∘ inner`.
pub fn compose(outer: &Automorphism, inner: &Automorphism) -> Automorphism {
    let factorization = match (&outer.factorization, &inner.factorization) {
        (Some(a), Some(b)) => Some(a.iter().chain(b.iter()).cloned().collect()),
        _ => None,
    };
    Automorphism {
        forward: outer.forward.compose(&inner.forward),
        inverse: inner.inverse.compose(&outer.inverse),
        factorization,
    }
}

/// True iff `inv ∘ fwd` and `fwd ∘ inv` both fix every generator.
pub fn verify_automorphism(fwd: &GeneratorMap, inv: &GeneratorMap) -> bool {
    fwd.rank() == inv.rank()
        && inv.compose(fwd).is_identity()
        && fwd.compose(inv).is_identity()
}

pub fn elementary_to_automorphism(m: &ElementaryMove, rank: usize) -> Automorphism {
    Automorphism {
        forward: m.forward_map(rank),
        inverse: m.inverse().forward_map(rank),
        factorization: Some(vec![m.clone()]),
    }
}

/// A Nielsen transformation of the image tuple: entry `i` is multiplied by
/// `by` (the image of `a_j^±1`) on the right or on the left.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct TupleMove {
    left: bool,
    target: usize,
    by: Letter,
}

impl TupleMove {
    fn apply(&self, tuple: &[ReducedWord]) -> ReducedWord {
        let factor = {
            let w = &tuple[self.by.generator()];
            if self.by.is_inverse() {
                crate::words::invert(w)
            } else {
                w.clone()
            }
        };
        if self.left {
            crate::words::reduce_concat(&factor, &tuple[self.target])
        } else {
            crate::words::reduce_concat(&tuple[self.target], &factor)
        }
    }

    /// Move word for the inverse of the automorphism this transformation
    /// right-composes with. Left multiplication `a_i -> a_j^ε a_i` is
    /// `I(i) ∘ N(i, a_j^-ε) ∘ I(i)`.
    fn inverse_moves(&self) -> Vec<ElementaryMove> {
        if self.left {
            vec![
                ElementaryMove::Inversion(self.target),
                ElementaryMove::nielsen(self.target, self.by),
                ElementaryMove::Inversion(self.target),
            ]
        } else {
            vec![ElementaryMove::nielsen(self.target, self.by.inverse())]
        }
    }
}

fn candidate_moves(rank: usize) -> Vec<TupleMove> {
    let mut out = Vec::new();
    for left in [false, true] {
        for target in 0..rank {
            for j in 0..rank {
                if j == target {
                    continue;
                }
                for inverse in [false, true] {
                    out.push(TupleMove {
                        left,
                        target,
                        by: Letter::new(j, inverse),
                    });
                }
            }
        }
    }
    out
}

const PLATEAU_CAP: usize = 200_000;

/// Factorises `fwd` into elementary moves by greedy Nielsen reduction of
/// the image tuple. Ties go to the least move descriptor. When no single
/// move shortens the tuple, a breadth-first search over length-preserving
/// moves looks for one that does. Fails with `NotAnAutomorphism` if the
/// reduced tuple is not a signed permutation of the basis.
pub fn nielsen_decompose(fwd: &GeneratorMap) -> Result<Vec<ElementaryMove>> {
    let rank = fwd.rank();
    let candidates = candidate_moves(rank);
    let mut tuple: Vec<ReducedWord> = fwd.images().to_vec();
    let mut applied: Vec<TupleMove> = Vec::new();

    let best_decrease = |tuple: &[ReducedWord]| -> Option<(TupleMove, ReducedWord)> {
        let mut best: Option<(usize, TupleMove, ReducedWord)> = None;
        for &m in &candidates {
            let new = m.apply(tuple);
            let old = tuple[m.target].len();
            if new.len() < old {
                let gain = old - new.len();
                if best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                    best = Some((gain, m, new));
                }
            }
        }
        best.map(|(_, m, w)| (m, w))
    };

    loop {
        if let Some(i) = tuple.iter().position(ReducedWord::is_empty) {
            return Err(Error::NotAnAutomorphism(format!(
                "Nielsen reduction sends generator {i} to the trivial element"
            )));
        }
        let total: usize = tuple.iter().map(ReducedWord::len).sum();
        if let Some((m, w)) = best_decrease(&tuple) {
            tuple[m.target] = w;
            applied.push(m);
            continue;
        }
        if total == rank {
            break;
        }
        match plateau_search(&tuple, &candidates, &best_decrease)? {
            Some(path) => {
                for m in path {
                    tuple[m.target] = m.apply(&tuple);
                    applied.push(m);
                }
            }
            None => {
                return Err(Error::NotAnAutomorphism(format!(
                    "Nielsen reduction stops at total length {total} > {rank}"
                )))
            }
        }
    }

    // Tuple is now letters; it must be a signed permutation.
    let mut perm = vec![0; rank];
    let mut seen = vec![false; rank];
    let mut inversions = Vec::new();
    for (i, w) in tuple.iter().enumerate() {
        let x = w.first().expect("nonempty");
        if std::mem::replace(&mut seen[x.generator()], true) {
            return Err(Error::NotAnAutomorphism(format!(
                "two generators reduce to the same basis letter {x:?}"
            )));
        }
        perm[i] = x.generator();
        if x.is_inverse() {
            inversions.push(i);
        }
    }

    let mut moves = Vec::new();
    if perm.iter().enumerate().any(|(i, &j)| i != j) {
        moves.push(ElementaryMove::Permutation(perm));
    }
    moves.extend(inversions.into_iter().map(ElementaryMove::Inversion));
    for m in applied.iter().rev() {
        moves.extend(m.inverse_moves());
    }
    Ok(cancel_adjacent_inversions(moves))
}

fn plateau_search<F>(
    start: &[ReducedWord],
    candidates: &[TupleMove],
    best_decrease: &F,
) -> Result<Option<Vec<TupleMove>>>
where
    F: Fn(&[ReducedWord]) -> Option<(TupleMove, ReducedWord)>,
{
    let mut parent: HashMap<Vec<ReducedWord>, Option<(Vec<ReducedWord>, TupleMove)>> =
        HashMap::new();
    parent.insert(start.to_vec(), None);
    let mut queue = VecDeque::from([start.to_vec()]);
    while let Some(tuple) = queue.pop_front() {
        if best_decrease(&tuple).is_some() {
            let mut path = Vec::new();
            let mut cur = tuple;
            while let Some(Some((prev, m))) = parent.get(&cur).cloned() {
                path.push(m);
                cur = prev;
            }
            path.reverse();
            return Ok(Some(path));
        }
        for &m in candidates {
            let w = m.apply(&tuple);
            if w.len() != tuple[m.target].len() {
                continue;
            }
            let mut next = tuple.clone();
            next[m.target] = w;
            if !parent.contains_key(&next) {
                if parent.len() >= PLATEAU_CAP {
                    return Err(Error::Resource(
                        "Nielsen plateau search exceeded its state cap".into(),
                    ));
                }
                parent.insert(next.clone(), Some((tuple.clone(), m)));
                queue.push_back(next);
            }
        }
    }
    Ok(None)
}

fn cancel_adjacent_inversions(moves: Vec<ElementaryMove>) -> Vec<ElementaryMove> {
    let mut out: Vec<ElementaryMove> = Vec::with_capacity(moves.len());
    for m in moves {
        match (&m, out.last()) {
            (ElementaryMove::Inversion(i), Some(ElementaryMove::Inversion(j))) if i == j => {
                out.pop();
            }
            _ => out.push(m),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b2() -> Basis {
        Basis::standard(2).unwrap()
    }

    fn map(basis: &Basis, images: &[&str]) -> GeneratorMap {
        GeneratorMap::new(images.iter().map(|s| basis.parse_word(s).unwrap()).collect()).unwrap()
    }

    fn nielsen_ab() -> Automorphism {
        elementary_to_automorphism(&ElementaryMove::nielsen(0, Letter::positive(1)), 2)
    }

    #[test]
    fn apply_examples() {
        let b = b2();
        let phi = nielsen_ab();
        let ev = |s: &str| b.format_word(&phi.apply(&b.parse_word(s).unwrap()));
        assert_eq!(ev("a"), "ab");
        assert_eq!(ev("A"), "BA");
        assert_eq!(ev("aB"), "a");
        assert_eq!(ev("1"), "1");
    }

    #[test]
    fn compose_examples() {
        let b = b2();
        let phi = nielsen_ab();
        let psi = elementary_to_automorphism(&ElementaryMove::nielsen(1, Letter::positive(0)), 2);
        let c = compose(&phi, &psi);
        assert_eq!(c.forward().format(&b), "a -> ab\nb -> bab");
        assert_eq!(compose(&phi, &Automorphism::identity(2)).forward(), phi.forward());
        assert!(compose(&phi, &phi.inverse()).is_identity());
    }

    #[test]
    fn verify_examples() {
        let b = b2();
        assert!(verify_automorphism(&map(&b, &["ab", "b"]), &map(&b, &["aB", "b"])));
        assert!(!verify_automorphism(&map(&b, &["ab", "b"]), &map(&b, &["ab", "b"])));
        assert!(verify_automorphism(&map(&b, &["a", "b"]), &map(&b, &["a", "b"])));
    }

    #[test]
    fn word_cancellation_exceeds_letters() {
        // a -> abAAbAA, b -> bAA
        let phi = Automorphism::from_forward(map(&b2(), &["abAAbAA", "bAA"])).unwrap();
        assert_eq!(phi.cancellation_bound(), 3);
        assert_eq!(phi.word_cancellation_bound(), 7);
        assert_eq!(Automorphism::identity(3).word_cancellation_bound(), 0);
    }

    #[test]
    fn stretch_examples() {
        let b = b2();
        assert_eq!(Automorphism::identity(2).stretch(), 1);
        assert_eq!(nielsen_ab().stretch(), 2);
        // a -> ab, b -> bab has inverse a -> aaB, b -> bA.
        let phi = Automorphism::from_forward(map(&b, &["ab", "bab"])).unwrap();
        assert_eq!(phi.inverse_map().format(&b), "a -> aaB\nb -> bA");
        assert_eq!(phi.stretch(), 3);
    }

    #[test]
    fn elementary_examples() {
        let b = b2();
        assert_eq!(nielsen_ab().forward().format(&b), "a -> ab\nb -> b");
        assert_eq!(nielsen_ab().inverse_map().format(&b), "a -> aB\nb -> b");
        let inv = elementary_to_automorphism(&ElementaryMove::Inversion(0), 2);
        assert_eq!(inv.forward().format(&b), "a -> A\nb -> b");
        let swap = elementary_to_automorphism(&ElementaryMove::Permutation(vec![1, 0]), 2);
        assert_eq!(swap.forward().format(&b), "a -> b\nb -> a");
    }

    #[test]
    fn decompose_examples() {
        let b = b2();
        assert_eq!(
            nielsen_decompose(&map(&b, &["ab", "b"])).unwrap(),
            vec![ElementaryMove::nielsen(0, Letter::positive(1))]
        );
        assert!(nielsen_decompose(&map(&b, &["a", "b"])).unwrap().is_empty());
        let target = map(&b, &["ab", "bab"]);
        let moves = nielsen_decompose(&target).unwrap();
        assert_eq!(moves.len(), 2);
        assert_eq!(Automorphism::from_moves(2, &moves).unwrap().forward(), &target);
    }

    #[test]
    fn decompose_rejects_non_automorphisms() {
        let b = b2();
        assert!(matches!(
            nielsen_decompose(&map(&b, &["ab", "ab"])),
            Err(Error::NotAnAutomorphism(_))
        ));
        assert!(matches!(
            nielsen_decompose(&map(&b, &["aa", "b"])),
            Err(Error::NotAnAutomorphism(_))
        ));
        assert!(matches!(
            nielsen_decompose(&map(&b, &["ab", "ba"])),
            Err(Error::NotAnAutomorphism(_))
        ));
    }

    #[test]
    fn decompose_left_multiplication() {
        let b = Basis::standard(3).unwrap();
        let target = map(&b, &["Ba", "b", "cAc"]);
        let moves = nielsen_decompose(&target);
        // cAc is not primitive together with the rest: abelianisation det 2
        assert!(moves.is_err());
        let target = map(&b, &["Ba", "b", "Ac"]);
        let moves = nielsen_decompose(&target).unwrap();
        assert_eq!(Automorphism::from_moves(3, &moves).unwrap().forward(), &target);
    }

    #[test]
    fn cancellation_bound_examples() {
        assert_eq!(Automorphism::identity(2).cancellation_bound(), 0);
        assert_eq!(nielsen_ab().cancellation_bound(), 1);
        let perm = elementary_to_automorphism(&ElementaryMove::Permutation(vec![1, 0]), 2);
        assert_eq!(perm.cancellation_bound(), 0);
        let inv = elementary_to_automorphism(&ElementaryMove::Inversion(1), 2);
        assert_eq!(inv.cancellation_bound(), 0);
    }

    #[test]
    fn move_validation() {
        assert!(ElementaryMove::nielsen(0, Letter::positive(0)).validate(2).is_err());
        assert!(ElementaryMove::Permutation(vec![0, 0]).validate(2).is_err());
        assert!(ElementaryMove::Inversion(3).validate(2).is_err());
    }

    #[test]
    fn move_formatting() {
        let b = Basis::standard(4).unwrap();
        let m = ElementaryMove::Permutation(vec![1, 0, 3, 2]);
        assert_eq!(m.format(&b), "P(ab); P(cd)");
        assert_eq!(ElementaryMove::nielsen(2, Letter::new(0, true)).format(&b), "N(c,A)");
    }
}
