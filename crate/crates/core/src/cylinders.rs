//! Multi-cylinders of the boundary as finite prefix sets, their unique
//! reduced form, and the general cylinder-image formula
//!
//! ```text
//! φ(C_u) = ⋃ { C_{φ(u')|_T} : u' ∈ u|^k },   T = S², k = S⁴ + S³ + S²
//! ```
//!
//! where `S` is the stretch factor of `φ`.
//!
//! The raw set is exponential in `k`, so besides a literal enumeration
//! ([`cylinder_image_general`]) there is [`FormulaEvaluator`], which
//! computes the *reduced* form of the same set by a memoised depth-first
//! walk. The walk exploits bounded cancellation: once a letter of `φ(u')`
//! lies more than `S²` letters from the end it is never cancelled by any
//! extension of `u'`, so the outcome of a subtree depends only on the
//! mutable tail of the image, the last letter of `u'` and the remaining
//! depth.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automorphism::Automorphism;
use crate::error::{Error, Result};
use crate::words::{
    cancellation, extend_right, is_prefix, reduce_concat, truncate_right, Basis, Letter,
    ReducedWord,
};

/// A finite set of reduced words standing for the union of their
/// cylinders. Iteration order is the letter order `a < A < b < B < ...`.
#[derive(Clone, Default)]
pub struct PrefixSet {
    words: BTreeSet<ReducedWord>,
    // known to be fully reduced; a cache, not part of the value
    reduced: bool,
}

impl PartialEq for PrefixSet {
    fn eq(&self, other: &Self) -> bool {
        self.words == other.words
    }
}

impl Eq for PrefixSet {}

impl std::hash::Hash for PrefixSet {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.words.hash(state);
    }
}

impl PrefixSet {
    pub fn new<I: IntoIterator<Item = ReducedWord>>(words: I) -> Self {
        PrefixSet {
            words: words.into_iter().collect(),
            reduced: false,
        }
    }

    /// The multi-cylinder of the whole boundary.
    pub fn full() -> Self {
        PrefixSet {
            words: BTreeSet::from([ReducedWord::empty()]),
            reduced: true,
        }
    }

    pub fn singleton(w: ReducedWord) -> Self {
        PrefixSet {
            words: BTreeSet::from([w]),
            reduced: true,
        }
    }

    pub fn parse(basis: &Basis, text: &str) -> Result<Self> {
        let body = text.trim();
        let body = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .unwrap_or(body);
        let mut words = BTreeSet::new();
        for part in body.split(',') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            words.insert(basis.parse_word(part)?);
        }
        Ok(PrefixSet {
            words,
            reduced: false,
        })
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ReducedWord> {
        self.words.iter()
    }

    pub fn words(&self) -> &BTreeSet<ReducedWord> {
        &self.words
    }

    pub fn contains(&self, w: &ReducedWord) -> bool {
        self.words.contains(w)
    }

    pub fn max_len(&self) -> usize {
        self.words.iter().map(ReducedWord::len).max().unwrap_or(0)
    }

    /// `{ab, BA, b}`.
    pub fn format(&self, basis: &Basis) -> String {
        let items: Vec<String> = self.words.iter().map(|w| basis.format_word(w)).collect();
        format!("{{{}}}", items.join(", "))
    }

    /// Word strings in letter order.
    pub fn to_strings(&self, basis: &Basis) -> Vec<String> {
        self.words.iter().map(|w| basis.format_word(w)).collect()
    }

    /// Left-multiplies every element by `v` with free reduction.
    pub fn left_multiply(&self, v: &ReducedWord) -> PrefixSet {
        PrefixSet::new(self.words.iter().map(|w| reduce_concat(v, w)))
    }
}

impl fmt::Debug for PrefixSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.words).finish()
    }
}

impl FromIterator<ReducedWord> for PrefixSet {
    fn from_iter<I: IntoIterator<Item = ReducedWord>>(iter: I) -> Self {
        PrefixSet::new(iter)
    }
}

/// Outcome of reducing a set of words hanging below some fixed vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Reduced {
    /// The set covers every end below the vertex.
    Everything,
    Words(Vec<ReducedWord>),
}

/// Reduces words relative to a root vertex. `context` is the letter on the
/// edge entering the root (if any); it removes one branch from the root's
/// star, so a complete star there has `2N - 1` rather than `2N` members.
pub(crate) fn reduce_words(
    mut words: Vec<ReducedWord>,
    rank: usize,
    context: Option<Letter>,
) -> Reduced {
    words.sort_unstable();
    words.dedup();

    // Lexicographic order puts every word right after its surviving prefix.
    let mut kept: Vec<ReducedWord> = Vec::with_capacity(words.len());
    for w in words {
        if kept.last().is_some_and(|p| is_prefix(p, &w)) {
            continue;
        }
        kept.push(w);
    }
    if kept.first().is_some_and(ReducedWord::is_empty) {
        return Reduced::Everything;
    }

    let max_len = kept.iter().map(ReducedWord::len).max().unwrap_or(0);
    let mut buckets: Vec<Vec<ReducedWord>> = vec![Vec::new(); max_len + 1];
    for w in kept {
        let l = w.len();
        buckets[l].push(w);
    }
    let mut out = Vec::new();
    for len in (1..=max_len).rev() {
        let mut bucket = std::mem::take(&mut buckets[len]);
        bucket.sort_unstable();
        let needed_at_root = 2 * rank - usize::from(context.is_some());
        let mut i = 0;
        while i < bucket.len() {
            let parent = &bucket[i].letters()[..len - 1];
            let mut j = i + 1;
            while j < bucket.len() && &bucket[j].letters()[..len - 1] == parent {
                j += 1;
            }
            let needed = if len == 1 {
                needed_at_root
            } else {
                2 * rank - 1
            };
            if j - i == needed {
                buckets[len - 1].push(truncate_right(&bucket[i], 1));
            } else {
                out.extend(bucket[i..j].iter().cloned());
            }
            i = j;
        }
    }
    if !buckets[0].is_empty() {
        return Reduced::Everything;
    }
    out.sort_unstable();
    Reduced::Words(out)
}

/// The unique reduced set with the same multi-cylinder: prefix-free, free
/// of complete stars, and equal to `{1}` whenever it covers the boundary.
pub fn reduce_prefix_set(set: &PrefixSet, rank: usize) -> PrefixSet {
    if set.reduced {
        return set.clone();
    }
    match reduce_words(set.words.iter().cloned().collect(), rank, None) {
        Reduced::Everything => PrefixSet::full(),
        Reduced::Words(w) => PrefixSet {
            words: w.into_iter().collect(),
            reduced: true,
        },
    }
}

/// Reduction by repeatedly applying a randomly chosen elementary step
/// (drop an element with a proper prefix in the set, collapse a complete
/// star, collapse onto the empty word). Slow; exists to test that the
/// reduced form does not depend on the order of steps.
pub fn reduce_prefix_set_randomized<R: Rng>(set: &PrefixSet, rank: usize, rng: &mut R) -> PrefixSet {
    enum Step {
        Drop(ReducedWord),
        Star(ReducedWord),
        Empty,
    }
    let basis_letters: Vec<Letter> = (0..2 * rank).map(Letter::from_code).collect();
    let mut words: BTreeSet<ReducedWord> = set.words.clone();
    loop {
        let mut steps = Vec::new();
        if words.contains(&ReducedWord::empty()) && words.len() > 1 {
            steps.push(Step::Empty);
        }
        for w in &words {
            if (0..w.len()).any(|l| words.contains(&w.prefix(l))) {
                steps.push(Step::Drop(w.clone()));
            }
        }
        let parents: BTreeSet<ReducedWord> = words
            .iter()
            .filter(|w| !w.is_empty())
            .map(|w| truncate_right(w, 1))
            .collect();
        for v in parents {
            let complete = basis_letters.iter().all(|&x| {
                let mut e = v.clone();
                !e.try_push(x) || words.contains(&e)
            });
            if complete {
                steps.push(Step::Star(v));
            }
        }
        let Some(step) = steps.choose(rng) else {
            break;
        };
        match step {
            Step::Empty => words = BTreeSet::from([ReducedWord::empty()]),
            Step::Drop(w) => {
                words.remove(w);
            }
            Step::Star(v) => {
                for &x in &basis_letters {
                    let mut e = v.clone();
                    if e.try_push(x) {
                        words.remove(&e);
                    }
                }
                words.insert(v.clone());
            }
        }
    }
    PrefixSet {
        words,
        reduced: true,
    }
}

/// All reduced words of length `depth` lying in the multi-cylinder.
pub fn covers_at_depth(set: &PrefixSet, basis: &Basis, depth: usize) -> Result<BTreeSet<ReducedWord>> {
    if depth < set.max_len() {
        return Err(Error::Usage(format!(
            "depth {depth} is shorter than the longest word ({})",
            set.max_len()
        )));
    }
    let mut out = BTreeSet::new();
    for w in set.iter() {
        out.extend(extend_right(basis, w, depth - w.len()));
    }
    Ok(out)
}

/// The `depth`-letter prefixes of the boundary points in the multi-cylinder.
/// Agrees with [`covers_at_depth`] once `depth` reaches the longest word.
pub fn boundary_prefixes(set: &PrefixSet, basis: &Basis, depth: usize) -> BTreeSet<ReducedWord> {
    let mut out = BTreeSet::new();
    for w in set.iter() {
        if w.len() >= depth {
            out.insert(w.prefix(depth));
        } else {
            out.extend(extend_right(basis, w, depth - w.len()));
        }
    }
    out
}

/// Decides `C_U = C_V` by comparing reduced forms.
pub fn sets_equivalent(a: &PrefixSet, b: &PrefixSet, rank: usize) -> bool {
    reduce_prefix_set(a, rank).words == reduce_prefix_set(b, rank).words
}

/// Truncation length `S²` and extension depth `S⁴ + S³ + S²` of the general
/// formula.
pub fn formula_constants(phi: &Automorphism) -> (usize, usize) {
    let s = phi.stretch();
    (s * s, s.pow(4) + s.pow(3) + s * s)
}

/// The raw set `{ φ(u')|_T : u' ∈ u|^depth }` for explicit parameters,
/// enumerated word by word.
pub fn cylinder_image_raw(
    phi: &Automorphism,
    basis: &Basis,
    u: &ReducedWord,
    depth: usize,
    truncation: usize,
    budget: u128,
) -> Result<PrefixSet> {
    let sphere = crate::words::enumerate_sphere(basis, u, depth, budget)?;
    let mut out = BTreeSet::new();
    for w in sphere {
        out.insert(truncate_right(&phi.apply(&w), truncation));
    }
    Ok(PrefixSet {
        words: out,
        reduced: false,
    })
}

/// The raw, unreduced set of the general formula at its full depth.
/// Fails with a resource error when `(2N-1)^k` exceeds `budget`; use
/// [`dual_apply_general`] or the suffix-table path instead.
pub fn cylinder_image_general(
    phi: &Automorphism,
    basis: &Basis,
    u: &ReducedWord,
    budget: u128,
) -> Result<PrefixSet> {
    let (t, k) = formula_constants(phi);
    cylinder_image_raw(phi, basis, u, k, t, budget).map_err(|e| match e {
        Error::Resource(msg) => Error::Resource(format!(
            "{msg}; the general formula needs depth k = {k} here, use the memoised \
             evaluator or the suffix-table path"
        )),
        other => other,
    })
}

/// Fewest consecutive equal reduced sets the adaptive evaluation accepts.
pub const ADAPTIVE_WINDOW: usize = 3;

/// `φ*(u)`: the reduced general formula at its full depth.
pub fn dual_apply_general(
    phi: &Automorphism,
    basis: &Basis,
    u: &ReducedWord,
    state_budget: usize,
) -> Result<PrefixSet> {
    let mut ev = FormulaEvaluator::new(phi, basis.rank(), state_budget);
    ev.reduced_image_full(u)
}

/// The general formula with the extension depth raised from
/// [`FormulaEvaluator::first_full_depth`] until the reduced set is stable
/// over [`FormulaEvaluator::stable_window`] consecutive depths.
pub fn dual_apply_adaptive(
    phi: &Automorphism,
    basis: &Basis,
    u: &ReducedWord,
    state_budget: usize,
) -> Result<GeneralImage> {
    let mut ev = FormulaEvaluator::new(phi, basis.rank(), state_budget);
    let start = ev.first_full_depth(u);
    let window = ev.stable_window();
    ev.adaptive_image(u, start, window)
}

/// Result of a general-formula evaluation.
#[derive(Clone, Debug)]
pub struct GeneralImage {
    pub set: PrefixSet,
    /// Extension depth at which the reduced set first repeated
    /// `window` times in a row.
    pub depth: usize,
    /// Whether the level iteration converged or hit the full formula depth,
    /// making the result exact rather than merely stable.
    pub exact: bool,
}

/// Reduced set outcome of one subtree, expressed below that subtree's
/// frozen image prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Rel {
    /// The frozen prefix with its last `j` letters removed. Absorbs
    /// everything else in the subtree.
    Cut(usize),
    /// Nonempty continuations after the frozen prefix, reduced.
    Words(Vec<ReducedWord>),
}

/// Everything a subtree's outcome depends on apart from the remaining
/// depth.
#[derive(Clone, PartialEq, Eq, Hash)]
struct Key {
    live: ReducedWord,
    context: Option<Letter>,
    last: Option<Letter>,
}

struct Node {
    key: Key,
    // (newly frozen segment, child index) per admissible next letter
    children: Vec<(ReducedWord, usize)>,
}

/// Evaluation of the reduced general formula for one automorphism.
///
/// The image of a preimage word splits into a frozen prefix, which no
/// extension can cancel into, and a live tail of at most `margin` letters.
/// The margin starts at the two-letter cancellation of `φ` and doubles,
/// up to `S²`, whenever some state cancels through it; since the graph
/// holds every reachable state, a completed build is exact.
/// A subtree's reduced outcome depends only on the live tail, the letter
/// before it, the last preimage letter and the remaining depth. The
/// evaluator builds the finite graph of such states once and then computes
/// the outcome level by level: since one level is a fixed function of the
/// level below, two equal consecutive levels mean every deeper level is
/// equal too, and the full formula depth is reached without walking it.
pub struct FormulaEvaluator<'a> {
    phi: &'a Automorphism,
    rank: usize,
    truncation: usize,
    full_depth: usize,
    margin: usize,
    state_budget: usize,
    nodes: Vec<Node>,
    index: HashMap<Key, usize>,
}

/// Levels of the value iteration for one root.
struct Levels {
    root: usize,
    prefix: ReducedWord,
    values: Vec<Rel>,
    level: usize,
    converged: bool,
}

impl<'a> FormulaEvaluator<'a> {
    pub fn new(phi: &'a Automorphism, rank: usize, state_budget: usize) -> Self {
        let (truncation, full_depth) = formula_constants(phi);
        FormulaEvaluator {
            phi,
            rank,
            truncation,
            full_depth,
            margin: phi.cancellation_bound().clamp(1, truncation.max(1)),
            state_budget,
            nodes: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn full_depth(&self) -> usize {
        self.full_depth
    }

    /// Smallest depth at which every image in the formula has at least
    /// `T` letters, so that no term is cut short. Uses
    /// `|φ(w)| ≥ |w| / S`, which holds because `S` bounds `φ⁻¹` too.
    pub fn first_full_depth(&self, u: &ReducedWord) -> usize {
        let s = self.phi.stretch();
        (self.truncation * s).saturating_sub(u.len()).clamp(1, self.full_depth)
    }

    /// Levels over which a repeated set counts as stable. The sets sharpen
    /// by as little as one letter per `S` levels, so a plateau shorter than
    /// `T·S` levels says nothing; a window of 3 was fooled by `a -> ab,
    /// b -> bab`.
    pub fn stable_window(&self) -> usize {
        (self.truncation * self.phi.stretch() + 1).max(ADAPTIVE_WINDOW)
    }

    /// Current live-tail margin.
    pub fn margin(&self) -> usize {
        self.margin
    }

    /// Number of states built so far.
    pub fn states(&self) -> usize {
        self.nodes.len()
    }

    pub fn reduced_image_full(&mut self, u: &ReducedWord) -> Result<PrefixSet> {
        self.reduced_image(u, self.full_depth)
    }

    /// `reduce({ φ(u')|_T : u' ∈ u|^depth })`.
    pub fn reduced_image(&mut self, u: &ReducedWord, depth: usize) -> Result<PrefixSet> {
        let mut levels = self.start(u)?;
        while levels.level < depth && !levels.converged {
            self.step(&mut levels);
        }
        Ok(self.root_set(&levels))
    }

    /// Increases the extension depth from `start` until the reduced set
    /// repeats `window` times in a row. Stops early with the exact answer
    /// when the level iteration converges or the full depth is reached.
    pub fn adaptive_image(
        &mut self,
        u: &ReducedWord,
        start: usize,
        window: usize,
    ) -> Result<GeneralImage> {
        let mut levels = self.start(u)?;
        let start = start.min(self.full_depth);
        let mut history: Vec<PrefixSet> = Vec::new();
        loop {
            if levels.converged || levels.level >= self.full_depth {
                return Ok(GeneralImage {
                    set: self.root_set(&levels),
                    depth: levels.level,
                    exact: true,
                });
            }
            if levels.level >= start {
                history.push(self.root_set(&levels));
                let n = history.len();
                if n >= window && history[n - window..].iter().all(|s| s == &history[n - 1]) {
                    return Ok(GeneralImage {
                        set: history.pop().unwrap(),
                        depth: levels.level + 1 - window,
                        exact: false,
                    });
                }
            }
            self.step(&mut levels);
        }
    }

    fn start(&mut self, u: &ReducedWord) -> Result<Levels> {
        let g = self.phi.apply(u);
        let frozen = g.len().saturating_sub(self.margin);
        let key = Key {
            live: g.suffix_from(frozen),
            context: frozen.checked_sub(1).map(|i| g.letters()[i]),
            last: u.last(),
        };
        let root = match self.build(key) {
            Err(Error::Violation(_)) if self.margin < self.truncation => {
                self.margin = (2 * self.margin).min(self.truncation);
                self.nodes.clear();
                self.index.clear();
                return self.start(u);
            }
            other => other?,
        };
        let values = self.nodes.iter().map(|n| self.leaf(&n.key)).collect();
        Ok(Levels {
            root,
            prefix: g.prefix(frozen),
            values,
            level: 0,
            converged: false,
        })
    }

    fn root_set(&self, levels: &Levels) -> PrefixSet {
        let words: Vec<ReducedWord> = match &levels.values[levels.root] {
            Rel::Cut(j) => vec![truncate_right(&levels.prefix, *j)],
            Rel::Words(ws) => ws.iter().map(|w| append(&levels.prefix, w)).collect(),
        };
        reduce_prefix_set(&PrefixSet::new(words), self.rank)
    }

    fn step(&self, levels: &mut Levels) {
        let next: Vec<Rel> = (0..levels.values.len())
            .map(|i| self.combine(&self.nodes[i], &levels.values))
            .collect();
        levels.converged = next == levels.values;
        levels.values = next;
        levels.level += 1;
    }

    fn leaf(&self, key: &Key) -> Rel {
        let live_len = key.live.len();
        if self.truncation < live_len {
            Rel::Words(vec![truncate_right(&key.live, self.truncation)])
        } else {
            Rel::Cut(self.truncation - live_len)
        }
    }

    /// Adds every state reachable from `key` to the graph.
    fn build(&mut self, key: Key) -> Result<usize> {
        if let Some(&i) = self.index.get(&key) {
            return Ok(i);
        }
        let root = self.push(key)?;
        let mut todo = vec![root];
        while let Some(i) = todo.pop() {
            let key = self.nodes[i].key.clone();
            let mut children = Vec::with_capacity(2 * self.rank);
            for y in (0..2 * self.rank).map(Letter::from_code) {
                if key.last == Some(y.inverse()) {
                    continue;
                }
                let image = self.phi.letter_image(y);
                let c = cancellation(&key.live, image);
                let child = reduce_concat(&key.live, image);
                if c == key.live.len()
                    && key.context.is_some()
                    && child.first() == key.context.map(Letter::inverse)
                {
                    return Err(Error::Violation(format!(
                        "cancellation reached past the {}-letter margin",
                        self.margin
                    )));
                }
                let frozen = child.len().saturating_sub(self.margin);
                let segment = child.prefix(frozen);
                let child_key = Key {
                    live: child.suffix_from(frozen),
                    context: segment.last().or(key.context),
                    last: Some(y),
                };
                let j = match self.index.get(&child_key) {
                    Some(&j) => j,
                    None => {
                        let j = self.push(child_key)?;
                        todo.push(j);
                        j
                    }
                };
                children.push((segment, j));
            }
            self.nodes[i].children = children;
        }
        Ok(root)
    }

    fn push(&mut self, key: Key) -> Result<usize> {
        if self.nodes.len() >= self.state_budget {
            return Err(Error::Resource(format!(
                "general formula evaluation exceeded {} states",
                self.state_budget
            )));
        }
        let i = self.nodes.len();
        self.index.insert(key.clone(), i);
        self.nodes.push(Node {
            key,
            children: Vec::new(),
        });
        Ok(i)
    }

    fn combine(&self, node: &Node, below: &[Rel]) -> Rel {
        let mut cut: Option<usize> = None;
        let mut words: Vec<ReducedWord> = Vec::new();
        for (segment, j) in &node.children {
            match &below[*j] {
                Rel::Cut(j) if *j > segment.len() => {
                    let j = j - segment.len();
                    cut = Some(cut.map_or(j, |c| c.max(j)));
                }
                Rel::Cut(j) => {
                    let w = truncate_right(segment, *j);
                    if w.is_empty() {
                        cut = Some(cut.unwrap_or(0));
                    } else {
                        words.push(w);
                    }
                }
                Rel::Words(ws) => words.extend(ws.iter().map(|w| append(segment, w))),
            }
        }
        if let Some(j) = cut {
            return Rel::Cut(j);
        }
        match reduce_words(words, self.rank, node.key.context) {
            Reduced::Everything => Rel::Cut(0),
            Reduced::Words(w) => Rel::Words(w),
        }
    }
}

fn append(prefix: &ReducedWord, tail: &ReducedWord) -> ReducedWord {
    let mut e = prefix.clone();
    for &x in tail.letters() {
        e.try_push(x);
    }
    e
}
