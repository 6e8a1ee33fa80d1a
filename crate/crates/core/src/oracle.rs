//! Brute-force ground truth for `φ(C_u)`.
//!
//! Pushes every extension of `u` of a given length through `φ` and records
//! the first `m` letters of the images, extending further wherever an image
//! is still too short for its prefix to be settled. Once three consecutive
//! extension lengths yield the same prefix set, that set is taken as the
//! `m`-letter prefixes of `φ(C_u)`. Nothing here uses suffix tables or the
//! reduced formula.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::automorphism::Automorphism;
use crate::cylinders::{boundary_prefixes, covers_at_depth, PrefixSet};
use crate::error::{Error, Result};
use crate::words::{Basis, Letter, ReducedWord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleConfig {
    /// First extension length tried.
    pub probe_depth_start: usize,
    /// Length `m` of the recorded image prefixes.
    pub out_depth: usize,
    /// Longest extension tried before giving up.
    pub max_depth: usize,
    /// Cap on the total number of extensions pushed through `φ`.
    pub budget: u64,
}

impl OracleConfig {
    pub fn new(out_depth: usize) -> Self {
        OracleConfig {
            probe_depth_start: 1,
            out_depth,
            max_depth: 40,
            budget: 10_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.out_depth == 0 || self.probe_depth_start == 0 {
            return Err(Error::Usage("oracle depths must be positive".into()));
        }
        if self.probe_depth_start > self.max_depth {
            return Err(Error::Usage(format!(
                "start depth {} exceeds max depth {}",
                self.probe_depth_start, self.max_depth
            )));
        }
        if self.budget == 0 {
            return Err(Error::Usage("oracle budget must be positive".into()));
        }
        Ok(())
    }
}

/// Stabilised prefix set and how it was obtained.
#[derive(Clone, Debug)]
pub struct OracleImage {
    pub prefixes: BTreeSet<ReducedWord>,
    /// Extension length at which the set first repeated.
    pub depth: usize,
    pub evaluations: u64,
}

/// `{ φ(u')|^m : u' ∈ u|^L }` for increasing `L`, returned once it is the
/// same for `L`, `L+1` and `L+2`. An extension whose image is shorter than
/// `m + c`, `c` being [`Automorphism::word_cancellation_bound`], is replaced by its
/// own extensions until the image is long enough. A length only counts if
/// that happens before `max_depth` on every branch.
pub fn boundary_image_prefixes(
    phi: &Automorphism,
    basis: &Basis,
    u: &ReducedWord,
    cfg: &OracleConfig,
) -> Result<OracleImage> {
    cfg.validate()?;
    let needed = cfg.out_depth + phi.word_cancellation_bound();
    let mut evaluations = 0u64;
    let mut history: Vec<(usize, BTreeSet<ReducedWord>)> = Vec::new();
    for depth in cfg.probe_depth_start..=cfg.max_depth {
        let level = probe_level(phi, basis.rank(), u, depth, cfg, needed, &mut evaluations)?;
        match level {
            Some(set) => history.push((depth, set)),
            None => history.clear(),
        }
        if let [.., (d0, a), (_, b), (_, c)] = history.as_slice() {
            if a == b && b == c {
                return Ok(OracleImage {
                    prefixes: a.clone(),
                    depth: *d0,
                    evaluations,
                });
            }
        }
    }
    Err(Error::Inconclusive(format!(
        "prefixes of length {} did not stabilise by extension length {}",
        cfg.out_depth, cfg.max_depth
    )))
}

/// `None` when some branch is still too short at `max_depth`.
fn probe_level(
    phi: &Automorphism,
    rank: usize,
    u: &ReducedWord,
    depth: usize,
    cfg: &OracleConfig,
    needed: usize,
    evaluations: &mut u64,
) -> Result<Option<BTreeSet<ReducedWord>>> {
    struct Frame {
        removed: Vec<Letter>,
        added: usize,
    }
    let mut image: Vec<Letter> = phi.apply(u).into_letters();
    let mut preimage: Vec<Letter> = u.letters().to_vec();
    let mut undo: Vec<Frame> = Vec::with_capacity(depth);
    // next letter code to try at each extension position
    let mut cursor: Vec<usize> = vec![0];
    let mut out = BTreeSet::new();
    let mut short = false;

    while let Some(next) = cursor.last_mut() {
        let settled = image.len() >= needed || undo.len() >= cfg.max_depth;
        if *next == 0 && undo.len() >= depth && settled {
            *evaluations += 1;
            if *evaluations > cfg.budget {
                return Err(Error::Inconclusive(format!(
                    "oracle budget of {} evaluations exhausted",
                    cfg.budget
                )));
            }
            short |= image.len() < needed;
            let m = cfg.out_depth.min(image.len());
            out.insert(ReducedWord::from_reduced(image[..m].to_vec()).expect("reduced"));
            cursor.pop();
            pop(&mut image, &mut preimage, &mut undo);
            continue;
        }
        if *next >= 2 * rank {
            cursor.pop();
            if !undo.is_empty() {
                pop(&mut image, &mut preimage, &mut undo);
            }
            continue;
        }
        let y = Letter::from_code(*next);
        *next += 1;
        if preimage.last() == Some(&y.inverse()) {
            continue;
        }
        let mut removed = Vec::new();
        let mut added = 0;
        for &x in phi.letter_image(y).letters() {
            if image.last() == Some(&x.inverse()) {
                removed.push(image.pop().expect("nonempty"));
            } else {
                image.push(x);
                added += 1;
            }
        }
        preimage.push(y);
        undo.push(Frame { removed, added });
        cursor.push(0);
    }
    return Ok(if short { None } else { Some(out) });

    fn pop(image: &mut Vec<Letter>, preimage: &mut Vec<Letter>, undo: &mut Vec<Frame>) {
        let f = undo.pop().expect("frame");
        image.truncate(image.len() - f.added);
        image.extend(f.removed.into_iter().rev());
        preimage.pop();
    }
}

/// Whether the oracle's prefixes of `φ(C_u)` coincide with the cylinders of
/// `set`. Requires `m` to reach the longest word of `set`.
pub fn assert_image_equal(
    phi: &Automorphism,
    basis: &Basis,
    u: &ReducedWord,
    set: &PrefixSet,
    cfg: &OracleConfig,
) -> Result<bool> {
    let expected = covers_at_depth(set, basis, cfg.out_depth)?;
    Ok(boundary_image_prefixes(phi, basis, u, cfg)?.prefixes == expected)
}

/// Like [`assert_image_equal`] for any `m`: compares only the first `m`
/// letters of the boundary points on both sides.
pub fn agrees_at_depth(
    phi: &Automorphism,
    basis: &Basis,
    u: &ReducedWord,
    set: &PrefixSet,
    cfg: &OracleConfig,
) -> Result<bool> {
    let expected = boundary_prefixes(set, basis, cfg.out_depth);
    Ok(boundary_image_prefixes(phi, basis, u, cfg)?.prefixes == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::ElementaryMove;

    fn nab() -> Automorphism {
        Automorphism::from_moves(2, &[ElementaryMove::nielsen(0, Letter::positive(1))]).unwrap()
    }

    fn prefixes(phi: &Automorphism, u: &str, m: usize) -> Vec<String> {
        let b = Basis::standard(phi.rank()).unwrap();
        let img = boundary_image_prefixes(phi, &b, &b.parse_word(u).unwrap(), &OracleConfig::new(m))
            .unwrap();
        img.prefixes.iter().map(|w| b.format_word(w)).collect()
    }

    #[test]
    fn examples() {
        let id = Automorphism::identity(2);
        assert_eq!(prefixes(&id, "a", 2), ["aa", "ab", "aB"]);
        assert_eq!(prefixes(&nab(), "b", 1), ["A", "b"]);
        assert_eq!(prefixes(&nab(), "B", 2), ["Ba", "BB"]);
    }

    #[test]
    fn equality_examples() {
        let b = Basis::standard(2).unwrap();
        let w = |s: &str| b.parse_word(s).unwrap();
        let set = |s: &str| PrefixSet::parse(&b, s).unwrap();
        let cfg = OracleConfig::new(2);
        let id = Automorphism::identity(2);
        assert!(assert_image_equal(&id, &b, &w("ab"), &set("{ab}"), &cfg).unwrap());
        assert!(assert_image_equal(&nab(), &b, &w("b"), &set("{b, A}"), &cfg).unwrap());
        assert!(!assert_image_equal(&nab(), &b, &w("b"), &set("{b}"), &cfg).unwrap());
        assert!(matches!(
            assert_image_equal(&id, &b, &w("ab"), &set("{abab}"), &cfg),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn budget_gives_inconclusive() {
        let b = Basis::standard(3).unwrap();
        let cfg = OracleConfig {
            budget: 50,
            ..OracleConfig::new(3)
        };
        let r = boundary_image_prefixes(&Automorphism::identity(3), &b, &ReducedWord::empty(), &cfg);
        assert!(matches!(r, Err(Error::Inconclusive(_))));
    }

    #[test]
    fn undo_restores_images() {
        // a -> abb cancels heavily against B-extensions
        let m = ElementaryMove::nielsen(0, Letter::positive(1));
        let phi = Automorphism::from_moves(2, &[m.clone(), m]).unwrap();
        let b = Basis::standard(2).unwrap();
        let u = b.parse_word("aB").unwrap();
        let cfg = OracleConfig::new(3);
        let mut evals = 0;
        let got = probe_level(&phi, 2, &u, 4, &cfg, 0, &mut evals).unwrap().unwrap();
        let want: BTreeSet<ReducedWord> = crate::words::extend_right(&b, &u, 4)
            .iter()
            .map(|w| {
                let img = phi.apply(w);
                img.prefix(3.min(img.len()))
            })
            .collect();
        assert_eq!(got, want);
        assert_eq!(evals, 81);
    }
}
