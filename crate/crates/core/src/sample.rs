//! Seeded random instances for tests, the `verify` command and the demo.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automorphism::{ElementaryMove, GeneratorMap};
use crate::cylinders::PrefixSet;
use crate::words::{Letter, ReducedWord};

/// The generator used throughout; fixed so that a seed reproduces across
/// platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random elementary move. Nielsen moves are drawn with probability 3/4,
/// the rest split evenly between inversions and transpositions.
pub fn random_move<R: Rng>(rank: usize, rng: &mut R) -> ElementaryMove {
    let roll = rng.gen_range(0..8);
    if roll < 6 {
        random_nielsen(rank, rng)
    } else if roll == 6 {
        ElementaryMove::Inversion(rng.gen_range(0..rank))
    } else {
        let i = rng.gen_range(0..rank);
        let j = (i + rng.gen_range(1..rank)) % rank;
        let mut p: Vec<usize> = (0..rank).collect();
        p.swap(i, j);
        ElementaryMove::Permutation(p)
    }
}

pub fn random_nielsen<R: Rng>(rank: usize, rng: &mut R) -> ElementaryMove {
    let target = rng.gen_range(0..rank);
    let other = (target + rng.gen_range(1..rank)) % rank;
    ElementaryMove::nielsen(target, Letter::new(other, rng.gen()))
}

pub fn random_moves<R: Rng>(rank: usize, len: usize, rng: &mut R) -> Vec<ElementaryMove> {
    (0..len).map(|_| random_move(rank, rng)).collect()
}

/// A move word with exactly `t` Nielsen moves, interleaved with up to `t`
/// other moves.
pub fn random_moves_with_nielsen<R: Rng>(rank: usize, t: usize, rng: &mut R) -> Vec<ElementaryMove> {
    let mut moves: Vec<ElementaryMove> = (0..t).map(|_| random_nielsen(rank, rng)).collect();
    for _ in 0..rng.gen_range(0..=t) {
        let m = loop {
            let m = random_move(rank, rng);
            if !m.is_nielsen() {
                break m;
            }
        };
        let at = rng.gen_range(0..=moves.len());
        moves.insert(at, m);
    }
    moves
}

/// A uniformly random reduced word of exactly `len` letters.
pub fn random_word_of_len<R: Rng>(rank: usize, len: usize, rng: &mut R) -> ReducedWord {
    let mut w = ReducedWord::empty();
    while w.len() < len {
        w.try_push(Letter::from_code(rng.gen_range(0..2 * rank)));
    }
    w
}

/// A random reduced word whose length is uniform in `0..=max_len`.
pub fn random_word<R: Rng>(rank: usize, max_len: usize, rng: &mut R) -> ReducedWord {
    let len = rng.gen_range(0..=max_len);
    random_word_of_len(rank, len, rng)
}

/// Up to `max_words` random words of length `1..=max_len`. Words sharing a
/// common prefix are made likely so that reduction has work to do.
pub fn random_prefix_set<R: Rng>(
    rank: usize,
    max_words: usize,
    max_len: usize,
    rng: &mut R,
) -> PrefixSet {
    let n = rng.gen_range(1..=max_words);
    let mut words: Vec<ReducedWord> = Vec::with_capacity(n);
    for _ in 0..n {
        let w = match words.choose(rng) {
            Some(base) if rng.gen_bool(0.5) && base.len() < max_len => {
                let keep = rng.gen_range(0..=base.len());
                let mut w = base.prefix(keep);
                let len = rng.gen_range(keep.max(1)..=max_len);
                while w.len() < len {
                    w.try_push(Letter::from_code(rng.gen_range(0..2 * rank)));
                }
                w
            }
            _ => random_word(rank, max_len - 1, rng),
        };
        if !w.is_empty() {
            words.push(w);
        }
    }
    if words.is_empty() {
        words.push(random_word_of_len(rank, 1, rng));
    }
    PrefixSet::new(words)
}

/// A generator map whose abelianization has determinant `±2`: an
/// automorphism composed with `a -> aa`. Never invertible.
pub fn random_non_automorphism<R: Rng>(rank: usize, moves: usize, rng: &mut R) -> GeneratorMap {
    let mut map = GeneratorMap::identity(rank);
    for m in random_moves(rank, moves, rng) {
        map = map.compose(&m.forward_map(rank));
    }
    let mut doubled: Vec<ReducedWord> = (0..rank)
        .map(|i| ReducedWord::letter(Letter::positive(i)))
        .collect();
    let g = rng.gen_range(0..rank);
    doubled[g] = ReducedWord::reduce_from([Letter::positive(g), Letter::positive(g)]);
    map.compose(&GeneratorMap::new(doubled).expect("valid images"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::nielsen_count;

    #[test]
    fn seeded_reproducible() {
        let a = random_moves(3, 6, &mut rng(9));
        let b = random_moves(3, 6, &mut rng(9));
        assert_eq!(a, b);
    }

    #[test]
    fn shapes() {
        let mut r = rng(1);
        for _ in 0..200 {
            let moves = random_moves_with_nielsen(3, 4, &mut r);
            assert_eq!(nielsen_count(&moves), 4);
            assert!(moves.iter().all(|m| m.validate(3).is_ok()));
            assert!(random_word(2, 5, &mut r).len() <= 5);
            let s = random_prefix_set(2, 12, 6, &mut r);
            assert!(s.len() <= 12 && s.max_len() <= 6);
        }
    }
}
