//! The fast path: one finite set `U(x)` per letter such that
//!
//! ```text
//! φ*(w·x) = reduce{ φ(w)·s : s ∈ U(x) }
//! ```
//!
//! Tables for elementary moves are written down directly; tables for
//! products are obtained by composing them.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::automorphism::{compose, elementary_to_automorphism, Automorphism, ElementaryMove};
use crate::cylinders::{reduce_prefix_set, PrefixSet};
use crate::error::{Error, Result};
use crate::words::{reduce_concat, truncate_right, Basis, Letter, ReducedWord};

static REDUCTION_FIRED: AtomicU64 = AtomicU64::new(0);

/// How many times [`dual_apply_fast`] produced a set that reduction
/// actually changed, since process start.
pub fn reductions_fired() -> u64 {
    REDUCTION_FIRED.load(Ordering::Relaxed)
}

/// The `2N` sets `U(x)` of an automorphism, indexed by letter code.
#[derive(Clone, Debug)]
pub struct SuffixTable {
    automorphism: Automorphism,
    table: Vec<PrefixSet>,
    nielsen_count: usize,
}

impl SuffixTable {
    pub fn identity(rank: usize) -> Self {
        SuffixTable {
            automorphism: Automorphism::identity(rank),
            table: (0..2 * rank)
                .map(|c| PrefixSet::singleton(ReducedWord::letter(Letter::from_code(c))))
                .collect(),
            nielsen_count: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.automorphism.rank()
    }

    pub fn automorphism(&self) -> &Automorphism {
        &self.automorphism
    }

    /// `U(x)`.
    pub fn get(&self, x: Letter) -> &PrefixSet {
        &self.table[x.code()]
    }

    pub fn entries(&self) -> impl Iterator<Item = (Letter, &PrefixSet)> {
        self.table
            .iter()
            .enumerate()
            .map(|(c, s)| (Letter::from_code(c), s))
    }

    /// Number of Nielsen moves `t` the table was built from.
    pub fn nielsen_count(&self) -> usize {
        self.nielsen_count
    }

    pub fn max_card(&self) -> usize {
        self.table.iter().map(PrefixSet::len).max().unwrap_or(0)
    }

    /// Checks the structural invariants: `2N` nonempty entries whose
    /// elements are nonempty words.
    pub fn validate(&self) -> Result<()> {
        if self.table.len() != 2 * self.rank() {
            return Err(Error::Violation(format!(
                "table has {} entries, expected {}",
                self.table.len(),
                2 * self.rank()
            )));
        }
        for (x, set) in self.entries() {
            if set.is_empty() || set.iter().any(ReducedWord::is_empty) {
                return Err(Error::Violation(format!("U({x:?}) is empty or contains 1")));
            }
        }
        Ok(())
    }
}

/// Table of a single elementary move.
///
/// For `a -> ab` (with `b` standing for `a_j^ε`):
///
/// ```text
/// U(a)  = {a}            U(A)  = {BA}
/// U(b)  = {b, A}         U(B)  = {By : y ≠ b, y ≠ A}
/// U(c)  = {c}            for every other letter c
/// ```
///
/// `U(B)` has `2N - 2` elements: `{BB, Ba}` in rank 2, and additionally
/// `Bc, BC` for each further generator `c`. Permutations and inversions
/// never cancel, so their table is `U(x) = {φ(x)}`.
pub fn elementary_suffix_table(m: &ElementaryMove, rank: usize) -> SuffixTable {
    let automorphism = elementary_to_automorphism(m, rank);
    let letters = (0..2 * rank).map(Letter::from_code);
    let (table, nielsen_count) = match m {
        ElementaryMove::NielsenRight { target, by } => {
            let a = Letter::positive(*target);
            let b = *by;
            let word = |xs: &[Letter]| ReducedWord::from_reduced(xs.to_vec()).expect("reduced");
            let table = letters
                .clone()
                .map(|x| {
                    if x == a {
                        PrefixSet::singleton(word(&[a]))
                    } else if x == a.inverse() {
                        PrefixSet::singleton(word(&[b.inverse(), a.inverse()]))
                    } else if x == b {
                        PrefixSet::new([word(&[b]), word(&[a.inverse()])])
                    } else if x == b.inverse() {
                        PrefixSet::new(
                            letters
                                .clone()
                                .filter(|&y| y != b && y != a.inverse())
                                .map(|y| word(&[b.inverse(), y])),
                        )
                    } else {
                        PrefixSet::singleton(word(&[x]))
                    }
                })
                .map(|s| reduce_prefix_set(&s, rank))
                .collect();
            (table, 1)
        }
        _ => {
            let table = letters
                .map(|x| PrefixSet::singleton(automorphism.letter_image(x).clone()))
                .collect();
            (table, 0)
        }
    };
    SuffixTable {
        automorphism,
        table,
        nielsen_count,
    }
}

/// Table of `outer ∘ inner`:
///
/// ```text
/// U(x) = reduce ⋃_{s ∈ U_inner(x)} { outer(s|_1) · t : t ∈ U_outer(last s) }
/// ```
pub fn compose_suffix_tables(outer: &SuffixTable, inner: &SuffixTable) -> SuffixTable {
    let rank = inner.rank();
    let phi = &outer.automorphism;
    let table = inner
        .table
        .iter()
        .map(|u_inner| {
            let mut words = Vec::new();
            for s in u_inner.iter() {
                let head = phi.apply(&truncate_right(s, 1));
                let last = s.last().expect("table words are nonempty");
                for t in outer.get(last).iter() {
                    words.push(reduce_concat(&head, t));
                }
            }
            reduce_prefix_set(&PrefixSet::new(words), rank)
        })
        .collect();
    SuffixTable {
        automorphism: compose(&outer.automorphism, &inner.automorphism),
        table,
        nielsen_count: outer.nielsen_count + inner.nielsen_count,
    }
}

/// Folds the elementary tables of a move word. The empty word gives the
/// identity table.
pub fn build_collection(moves: &[ElementaryMove], rank: usize) -> Result<SuffixTable> {
    let mut acc = SuffixTable::identity(rank);
    for m in moves {
        m.validate(rank)?;
        acc = compose_suffix_tables(&acc, &elementary_suffix_table(m, rank));
    }
    Ok(acc)
}

/// Table for an arbitrary automorphism, factorised first if needed.
pub fn table_for(phi: &Automorphism) -> Result<SuffixTable> {
    let moves = phi.moves()?;
    let table = build_collection(&moves, phi.rank())?;
    debug_assert_eq!(table.automorphism.forward(), phi.forward());
    Ok(table)
}

/// `φ*(w) = reduce{ φ(w|_1) · u : u ∈ U(last w) }`, and `{1}` for the empty
/// word.
pub fn dual_apply_fast(table: &SuffixTable, w: &ReducedWord) -> PrefixSet {
    let Some(last) = w.last() else {
        return PrefixSet::full();
    };
    let head = table.automorphism.apply(&truncate_right(w, 1));
    let raw = table.get(last).left_multiply(&head);
    let reduced = reduce_prefix_set(&raw, table.rank());
    if reduced.words() != raw.words() {
        REDUCTION_FIRED.fetch_add(1, Ordering::Relaxed);
    }
    reduced
}

/// `reduce ⋃_{w ∈ set} φ*(w)`: one more power of the dual applied to a
/// multi-cylinder. Fails once the result would hold more than
/// `letter_budget` letters.
pub fn dual_step(table: &SuffixTable, set: &PrefixSet, letter_budget: usize) -> Result<PrefixSet> {
    let mut words = Vec::new();
    let mut letters = 0usize;
    for w in set.iter() {
        for v in dual_apply_fast(table, w).iter() {
            letters += v.len();
            if letters > letter_budget {
                return Err(Error::Resource(format!(
                    "dual iterate exceeds {letter_budget} letters"
                )));
            }
            words.push(v.clone());
        }
    }
    Ok(reduce_prefix_set(&PrefixSet::new(words), table.rank()))
}

/// `(φ^k)*(x)`, computed as `V_1 = U(x)`, `V_{m+1} = reduce ⋃_{w ∈ V_m} φ*(w)`.
/// `letter_budget` caps the total number of letters held in `V_m`.
pub fn dual_iterate(
    table: &SuffixTable,
    x: Letter,
    k: usize,
    letter_budget: usize,
) -> Result<PrefixSet> {
    if k == 0 {
        return Err(Error::Usage("iteration count must be positive".into()));
    }
    let mut current = table.get(x).clone();
    for _ in 1..k {
        current = dual_step(table, &current, letter_budget)?;
    }
    Ok(current)
}

/// Letter-by-letter rendering of a table, used by the CLI and the demo.
pub fn format_table(table: &SuffixTable, basis: &Basis) -> Vec<(String, Vec<String>)> {
    table
        .entries()
        .map(|(x, s)| (basis.letter_char(x).to_string(), s.to_strings(basis)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::nielsen_count;
    use crate::cylinders::dual_apply_general;

    fn nab() -> ElementaryMove {
        ElementaryMove::nielsen(0, Letter::positive(1))
    }

    fn entry(basis: &Basis, t: &SuffixTable, c: char) -> Vec<String> {
        t.get(basis.letter_from_char(c).unwrap()).to_strings(basis)
    }

    #[test]
    fn elementary_rank_two() {
        let b = Basis::standard(2).unwrap();
        let t = elementary_suffix_table(&nab(), 2);
        assert_eq!(entry(&b, &t, 'a'), ["a"]);
        assert_eq!(entry(&b, &t, 'A'), ["BA"]);
        assert_eq!(entry(&b, &t, 'b'), ["A", "b"]);
        assert_eq!(entry(&b, &t, 'B'), ["Ba", "BB"]);
        assert_eq!(t.nielsen_count(), 1);
    }

    #[test]
    fn elementary_rank_three_extra_branches() {
        let b = Basis::standard(3).unwrap();
        let t = elementary_suffix_table(&nab(), 3);
        assert_eq!(entry(&b, &t, 'B'), ["Ba", "BB", "Bc", "BC"]);
        assert_eq!(entry(&b, &t, 'c'), ["c"]);
        assert_eq!(entry(&b, &t, 'C'), ["C"]);
    }

    #[test]
    fn elementary_inversion() {
        let b = Basis::standard(2).unwrap();
        let t = elementary_suffix_table(&ElementaryMove::Inversion(0), 2);
        assert_eq!(entry(&b, &t, 'a'), ["A"]);
        assert_eq!(entry(&b, &t, 'b'), ["b"]);
        assert_eq!(t.nielsen_count(), 0);
    }

    #[test]
    fn compose_with_identity() {
        let t = elementary_suffix_table(&nab(), 2);
        let id = SuffixTable::identity(2);
        let c = compose_suffix_tables(&id, &t);
        assert_eq!(c.table, t.table);
        let c = compose_suffix_tables(&t, &id);
        assert_eq!(c.table, t.table);
    }

    #[test]
    fn compose_with_permutation_relabels() {
        let b = Basis::standard(2).unwrap();
        let t = elementary_suffix_table(&nab(), 2);
        let swap = elementary_suffix_table(&ElementaryMove::Permutation(vec![1, 0]), 2);
        let c = compose_suffix_tables(&swap, &t);
        // swap ∘ (a -> ab): images relabelled letter by letter
        assert_eq!(entry(&b, &c, 'B'), ["AA", "Ab"]);
        assert_eq!(entry(&b, &c, 'b'), ["a", "B"]);
    }

    #[test]
    fn square_of_nielsen_move_matches_general() {
        // a -> abb; values frozen from the general formula
        let b = Basis::standard(2).unwrap();
        let t = build_collection(&[nab(), nab()], 2).unwrap();
        assert_eq!(entry(&b, &t, 'a'), ["a"]);
        assert_eq!(entry(&b, &t, 'A'), ["BBA"]);
        assert_eq!(entry(&b, &t, 'b'), ["A", "b", "BA"]);
        assert_eq!(entry(&b, &t, 'B'), ["Ba", "BBa", "BBB"]);
        for x in b.letters() {
            let general =
                dual_apply_general(t.automorphism(), &b, &ReducedWord::letter(x), 100_000).unwrap();
            assert_eq!(t.get(x), &general);
        }
    }

    #[test]
    fn build_examples() {
        let id = build_collection(&[], 2).unwrap();
        for (x, s) in id.entries() {
            assert_eq!(s, &PrefixSet::singleton(ReducedWord::letter(x)));
        }
        let moves = [nab(), ElementaryMove::nielsen(1, Letter::positive(0))];
        let t = build_collection(&moves, 2).unwrap();
        assert_eq!(t.nielsen_count(), nielsen_count(&moves));
        assert!(t.max_card() <= 4);
    }

    #[test]
    fn fast_examples() {
        let b = Basis::standard(2).unwrap();
        let t = elementary_suffix_table(&nab(), 2);
        let f = |w: &str| dual_apply_fast(&t, &b.parse_word(w).unwrap()).to_strings(&b);
        assert_eq!(f("aab"), ["ababA", "ababb"]);
        assert_eq!(f("bA"), ["A"]);
        assert_eq!(f("b"), ["A", "b"]);
        assert_eq!(f(""), ["1"]);
    }

    #[test]
    fn iterate_examples() {
        let b = Basis::standard(2).unwrap();
        let t = elementary_suffix_table(&nab(), 2);
        let x = b.letter_from_char('b').unwrap();
        assert_eq!(dual_iterate(&t, x, 1, 1000).unwrap(), *t.get(x));
        let id = SuffixTable::identity(2);
        assert_eq!(dual_iterate(&id, x, 5, 1000).unwrap().to_strings(&b), ["b"]);
        let square = build_collection(&[nab(), nab()], 2).unwrap();
        assert_eq!(dual_iterate(&t, x, 2, 1000).unwrap(), *square.get(x));
    }
}
