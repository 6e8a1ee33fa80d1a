//! Dual growth rate: the last-letter transition matrix of a suffix table,
//! its Perron-Frobenius eigenvalue, and the empirical growth of
//! `card (φ^k)*(x)`.

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::automorphism::{invert_moves, ElementaryMove};
use crate::dual::{build_collection, dual_step, SuffixTable};
use crate::error::{Error, Result};
use crate::words::{Basis, Letter};

/// Iteration cap of the eigenvalue solver.
pub const MAX_ITERATIONS: usize = 100_000;

/// Square nonnegative integer matrix. For a suffix table, rows and columns
/// are indexed by letter code and `M[y][x]` counts the words of `U(x)`
/// ending in `y`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransitionMatrix {
    rows: Vec<Vec<u64>>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: Vec<Vec<u64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Usage("matrix must be square and nonempty".into()));
        }
        Ok(TransitionMatrix { rows })
    }

    pub fn dimension(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.rows[row][col]
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.rows
    }

    pub fn column_sum(&self, col: usize) -> u64 {
        self.rows.iter().map(|r| r[col]).sum()
    }

    /// `P·M·Pᵀ` for the permutation sending index `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> TransitionMatrix {
        let n = self.dimension();
        let mut rows = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                rows[perm[i]][perm[j]] = self.rows[i][j];
            }
        }
        TransitionMatrix { rows }
    }
}

pub fn build_transition_matrix(table: &SuffixTable) -> TransitionMatrix {
    let n = 2 * table.rank();
    let mut rows = vec![vec![0u64; n]; n];
    for (x, set) in table.entries() {
        for u in set.iter() {
            let y = u.last().expect("table words are nonempty");
            rows[y.code()][x.code()] += 1;
        }
    }
    TransitionMatrix { rows }
}

/// Spectral radius of a nonnegative matrix, to within `tol`.
///
/// The radius is the largest radius among the irreducible diagonal blocks
/// (strongly connected components of the nonzero pattern). A `1×1` block
/// contributes its entry exactly. Larger blocks `B` are handled by power
/// iteration on `B + I`, which is primitive, so the iteration converges
/// without oscillating; each step brackets the radius between the least
/// and greatest ratio `((B+I)v)_i / v_i` and the loop stops once the
/// bracket is narrower than `tol`.
pub fn pf_eigenvalue(m: &TransitionMatrix, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Usage("tolerance must be positive".into()));
    }
    let n = m.dimension();
    let mut graph = DiGraph::<(), ()>::new();
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) > 0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut radius: f64 = 0.0;
    for component in tarjan_scc(&graph) {
        let idx: Vec<usize> = component.iter().map(|v| v.index()).collect();
        let r = if let [i] = idx.as_slice() {
            m.get(*i, *i) as f64
        } else {
            block_radius(m, &idx, tol)?
        };
        radius = radius.max(r);
    }
    Ok(radius)
}

fn block_radius(m: &TransitionMatrix, idx: &[usize], tol: f64) -> Result<f64> {
    let k = idx.len();
    let b: Vec<Vec<f64>> = idx
        .iter()
        .map(|&i| idx.iter().map(|&j| m.get(i, j) as f64).collect())
        .collect();
    let mut v = vec![1.0f64; k];
    let (mut lo, mut hi) = (0.0, f64::INFINITY);
    for _ in 0..MAX_ITERATIONS {
        let w: Vec<f64> = (0..k)
            .map(|i| v[i] + (0..k).map(|j| b[i][j] * v[j]).sum::<f64>())
            .collect();
        let ratios = w.iter().zip(&v).map(|(a, b)| a / b);
        lo = ratios.clone().fold(f64::INFINITY, f64::min);
        hi = ratios.fold(0.0, f64::max);
        if hi - lo <= tol {
            return Ok((lo + hi) / 2.0 - 1.0);
        }
        let scale = w.iter().cloned().fold(0.0, f64::max);
        v = w.into_iter().map(|x| x / scale).collect();
    }
    Err(Error::Numeric(format!(
        "power iteration on a {k}x{k} block did not converge in {MAX_ITERATIONS} steps: \
         radius bracketed in [{}, {}]",
        lo - 1.0,
        hi - 1.0
    )))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmpiricalPoint {
    pub k: usize,
    /// `max_x card (φ^k)*(x)`.
    pub card: usize,
    /// `card^(1/k)`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    pub lambda_matrix: f64,
    pub empirical: Vec<EmpiricalPoint>,
    /// Largest ratio over the last three computed iterates.
    pub tail_limsup: f64,
    /// Set when the letter budget stopped the iteration before `kmax`.
    pub partial: bool,
    pub tolerance: f64,
}

/// The matrix eigenvalue together with `max_x card (φ^k)*(x)` for
/// `k = 1..=kmax`. Iterates are computed incrementally; when one would
/// exceed `letter_budget` letters the sequence stops there and the estimate
/// is flagged partial.
pub fn empirical_growth(
    table: &SuffixTable,
    kmax: usize,
    letter_budget: usize,
    tol: f64,
) -> Result<GrowthEstimate> {
    if kmax == 0 {
        return Err(Error::Usage("kmax must be positive".into()));
    }
    let lambda_matrix = pf_eigenvalue(&build_transition_matrix(table), tol)?;
    if lambda_matrix < 1.0 - tol {
        return Err(Error::Numeric(format!(
            "eigenvalue {lambda_matrix} below 1 for an automorphism table"
        )));
    }
    let letters = (0..2 * table.rank()).map(Letter::from_code);
    let mut current: Vec<_> = letters.map(|x| table.get(x).clone()).collect();
    let mut empirical = Vec::new();
    let mut partial = false;
    for k in 1..=kmax {
        if k > 1 {
            let next: Result<Vec<_>> = current
                .iter()
                .map(|s| dual_step(table, s, letter_budget))
                .collect();
            match next {
                Ok(next) => current = next,
                Err(Error::Resource(_)) => {
                    partial = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let card = current.iter().map(|s| s.len()).max().unwrap_or(0);
        empirical.push(EmpiricalPoint {
            k,
            card,
            ratio: (card as f64).powf(1.0 / k as f64),
        });
    }
    let tail_limsup = empirical
        .iter()
        .rev()
        .take(3)
        .map(|p| p.ratio)
        .fold(0.0, f64::max);
    Ok(GrowthEstimate {
        lambda_matrix,
        empirical,
        tail_limsup,
        partial,
        tolerance: tol,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BasisCheck {
    pub lambda: f64,
    pub lambda_conjugate: f64,
    pub agree: bool,
}

/// Compares the eigenvalue for `φ` with the one for `ψ⁻¹∘φ∘ψ`, i.e. `φ`
/// written in the basis `ψ(𝒜)`.
pub fn basis_independence_check(
    phi: &[ElementaryMove],
    psi: &[ElementaryMove],
    rank: usize,
    tol: f64,
) -> Result<BasisCheck> {
    let conj: Vec<ElementaryMove> = invert_moves(psi)
        .into_iter()
        .chain(phi.iter().cloned())
        .chain(psi.iter().cloned())
        .collect();
    let solver_tol = (tol / 100.0).max(1e-13);
    let lambda = pf_eigenvalue(&build_transition_matrix(&build_collection(phi, rank)?), solver_tol)?;
    let lambda_conjugate =
        pf_eigenvalue(&build_transition_matrix(&build_collection(&conj, rank)?), solver_tol)?;
    Ok(BasisCheck {
        lambda,
        lambda_conjugate,
        agree: (lambda - lambda_conjugate).abs() <= tol,
    })
}

/// Letter labels in matrix order.
pub fn letter_order(basis: &Basis) -> Vec<String> {
    basis.letters().map(|x| basis.letter_char(x).to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dual::elementary_suffix_table;

    fn nab() -> ElementaryMove {
        ElementaryMove::nielsen(0, Letter::positive(1))
    }

    #[test]
    fn matrix_of_nielsen_move() {
        let m = build_transition_matrix(&elementary_suffix_table(&nab(), 2));
        // columns a, A, b, B
        let want = vec![
            vec![1, 0, 0, 1],
            vec![0, 1, 1, 0],
            vec![0, 0, 1, 0],
            vec![0, 0, 0, 1],
        ];
        assert_eq!(m.rows(), want.as_slice());
        assert_eq!(pf_eigenvalue(&m, 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn identity_and_permutation_exact() {
        let id = build_transition_matrix(&SuffixTable::identity(3));
        assert_eq!(pf_eigenvalue(&id, 1e-12).unwrap(), 1.0);
        let p = build_collection(&[ElementaryMove::Permutation(vec![1, 2, 0])], 3).unwrap();
        assert_eq!(pf_eigenvalue(&build_transition_matrix(&p), 1e-12).unwrap(), 1.0);
    }

    #[test]
    fn golden_harness() {
        let m = TransitionMatrix::from_rows(vec![vec![1, 1], vec![1, 2]]).unwrap();
        let want = (3.0 + 5f64.sqrt()) / 2.0;
        assert!((pf_eigenvalue(&m, 1e-12).unwrap() - want).abs() < 1e-9);
    }

    #[test]
    fn periodic_and_reducible() {
        // a 3-cycle scaled by 2 has radius 2, period 3
        let m = TransitionMatrix::from_rows(vec![vec![0, 2, 0], vec![0, 0, 2], vec![2, 0, 0]])
            .unwrap();
        assert!((pf_eigenvalue(&m, 1e-12).unwrap() - 2.0).abs() < 1e-9);
        let m = TransitionMatrix::from_rows(vec![vec![1, 5, 0], vec![0, 3, 0], vec![7, 1, 2]])
            .unwrap();
        assert!((pf_eigenvalue(&m, 1e-12).unwrap() - 3.0).abs() < 1e-9);
        assert!((pf_eigenvalue(&m.permuted(&[2, 0, 1]), 1e-12).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn column_sums_are_cardinalities() {
        let t = build_collection(&[nab(), ElementaryMove::nielsen(1, Letter::positive(0))], 2).unwrap();
        let m = build_transition_matrix(&t);
        for (x, s) in t.entries() {
            assert_eq!(m.column_sum(x.code()), s.len() as u64);
        }
    }

    #[test]
    fn empirical_identity_and_nielsen() {
        let g = empirical_growth(&SuffixTable::identity(2), 5, 1 << 20, 1e-9).unwrap();
        assert!(g.empirical.iter().all(|p| p.card == 1 && p.ratio == 1.0));
        let t = elementary_suffix_table(&nab(), 2);
        let g = empirical_growth(&t, 8, 1 << 20, 1e-9).unwrap();
        assert!(!g.partial);
        for p in &g.empirical {
            assert!(p.card <= p.k + 1, "{p:?}");
        }
    }

    #[test]
    fn budget_marks_partial() {
        let t = build_collection(&[nab(), ElementaryMove::nielsen(1, Letter::positive(0))], 2).unwrap();
        let g = empirical_growth(&t, 30, 2_000, 1e-9).unwrap();
        assert!(g.partial);
        assert!(g.empirical.len() < 30);
    }

    #[test]
    fn basis_examples() {
        let phi = [nab(), ElementaryMove::nielsen(1, Letter::positive(0))];
        assert!(basis_independence_check(&[], &phi, 2, 1e-9).unwrap().agree);
        let swap = [ElementaryMove::Permutation(vec![1, 0])];
        let c = basis_independence_check(&phi, &swap, 2, 1e-9).unwrap();
        assert_eq!(c.lambda, c.lambda_conjugate);
        assert!(basis_independence_check(&phi, &[nab()], 2, 1e-6).unwrap().agree);
    }
}
