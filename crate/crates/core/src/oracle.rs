//! Independent boolean-matrix route to flooding reachability, used to
//! cross-validate the set-based engine.
//!
//! Each snapshot maps to an n-by-n boolean matrix with a true diagonal;
//! multiplying the per-round matrices in chronological order over the
//! OR/AND semiring gives, at entry `(j, i)`, whether datum `j` has reached
//! node `i`. Only positivity patterns matter, so no numeric entries are
//! kept, and rows are packed into the same bit layout as knowledge states.

use crate::bits::BitRow;
use crate::graph::{GraphSequence, GraphSnapshot, NodeId};
use crate::knowledge::KnowledgeState;

/// Dense boolean matrix with an always-true diagonal.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoolMatrix {
    n: usize,
    rows: Vec<BitRow>,
}

impl BoolMatrix {
    pub fn identity(n: usize) -> BoolMatrix {
        let rows = (0..n)
            .map(|i| {
                let mut row = BitRow::zeros(n);
                row.set(i);
                row
            })
            .collect();
        BoolMatrix { n, rows }
    }

    /// Entry `(i, j)` true iff `(i, j)` is an edge, plus the diagonal.
    pub fn from_snapshot(g: &GraphSnapshot) -> BoolMatrix {
        let mut m = BoolMatrix::identity(g.n());
        for (from, to) in g.edges() {
            m.rows[from.index()].set(to.index());
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: NodeId, col: NodeId) -> bool {
        self.rows[row.index()].get(col.index())
    }

    pub fn row(&self, row: NodeId) -> &BitRow {
        &self.rows[row.index()]
    }

    pub fn column(&self, col: NodeId) -> BitRow {
        let mut out = BitRow::zeros(self.n);
        for i in 0..self.n {
            if self.rows[i].get(col.index()) {
                out.set(i);
            }
        }
        out
    }

    /// Boolean-semiring product `self * rhs`.
    pub fn multiply(&self, rhs: &BoolMatrix) -> BoolMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut out = BitRow::zeros(self.n);
                for mid in row.ones() {
                    out.union_with(&rhs.rows[mid]);
                }
                out
            })
            .collect();
        BoolMatrix { n: self.n, rows }
    }

    pub fn transpose(&self) -> BoolMatrix {
        let mut rows = vec![BitRow::zeros(self.n); self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.ones() {
                rows[j].set(i);
            }
        }
        BoolMatrix { n: self.n, rows }
    }

    pub fn is_all_true(&self) -> bool {
        self.rows.iter().all(BitRow::is_full)
    }

    /// The central cross-check: entry `(j, i)` of a reachability product is
    /// true exactly when the set-based engine has node `i` holding datum `j`,
    /// i.e. this matrix transposed equals the state's rows.
    pub fn matches_knowledge(&self, state: &KnowledgeState) -> bool {
        self.n == state.n() && self.transpose().rows == state.rows()
    }
}

/// Product of the per-round matrices in round order. The empty sequence
/// multiplies nothing and yields the identity pattern.
pub fn product_reachability(seq: &GraphSequence) -> BoolMatrix {
    let mut acc = BoolMatrix::identity(seq.n());
    for snap in seq.iter() {
        acc = acc.multiply(&BoolMatrix::from_snapshot(snap));
    }
    acc
}

/// Checks the collection/dissemination duality at one node: the set of
/// nodes `node`'s datum reaches under `seq` (row `node` of the forward
/// product) must equal the set of data `node` collects under the
/// reverse-transposed sequence (column `node` of that product).
pub fn duality_check(seq: &GraphSequence, node: NodeId) -> bool {
    let forward = product_reachability(seq);
    let backward = product_reachability(&seq.reverse_transpose());
    *forward.row(node) == backward.column(node)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_sequence, seeded_rng, GraphSequence, GraphSnapshot};
    use crate::knowledge::run;

    fn nid(v: u32) -> NodeId {
        NodeId::new(v)
    }

    fn snapshot(n: usize, round: usize, edges: &[(u32, u32)]) -> GraphSnapshot {
        GraphSnapshot::new(n, round, edges.iter().map(|&(a, b)| (nid(a), nid(b)))).unwrap()
    }

    fn fixed_cycle_sequence(n: usize, steps: usize) -> GraphSequence {
        let snaps = (0..steps)
            .map(|k| {
                let edges: Vec<(u32, u32)> =
                    (1..=n as u32).map(|i| (i, i % n as u32 + 1)).collect();
                snapshot(n, k, &edges)
            })
            .collect();
        GraphSequence::new(n, snaps).unwrap()
    }

    #[test]
    fn empty_graph_maps_to_identity() {
        let m = BoolMatrix::from_snapshot(&GraphSnapshot::empty(4, 0));
        assert_eq!(m, BoolMatrix::identity(4));
    }

    #[test]
    fn single_edge_gives_upper_triangle_at_n2() {
        let m = BoolMatrix::from_snapshot(&snapshot(2, 0, &[(1, 2)]));
        assert!(m.get(nid(1), nid(1)) && m.get(nid(1), nid(2)) && m.get(nid(2), nid(2)));
        assert!(!m.get(nid(2), nid(1)));
    }

    #[test]
    fn fixed_cycle_matrix_pattern() {
        let n = 4;
        let m = BoolMatrix::from_snapshot(fixed_cycle_sequence(n, 1).get(0).unwrap());
        for i in 1..=n as u32 {
            assert!(m.get(nid(i), nid(i)));
        }
        for i in 1..n as u32 {
            assert!(m.get(nid(i), nid(i + 1)));
        }
        assert!(m.get(nid(4), nid(1)));
        assert_eq!(
            (1..=4u32)
                .flat_map(|i| (1..=4u32).map(move |j| (i, j)))
                .filter(|&(i, j)| m.get(nid(i), nid(j)))
                .count(),
            8
        );
    }

    #[test]
    fn product_over_empty_and_edgeless_rounds() {
        assert_eq!(
            product_reachability(&GraphSequence::empty(3)),
            BoolMatrix::identity(3)
        );
        let seq = GraphSequence::new(3, vec![GraphSnapshot::empty(3, 0)]).unwrap();
        assert_eq!(product_reachability(&seq), BoolMatrix::identity(3));
    }

    #[test]
    fn fixed_cycle_saturates_only_at_n_minus_1_rounds() {
        let n = 5;
        for steps in 1..=n {
            let m = product_reachability(&fixed_cycle_sequence(n, steps));
            assert_eq!(m.is_all_true(), steps >= n - 1, "steps={steps}");
        }
    }

    #[test]
    fn product_matches_set_engine_on_random_sequences() {
        for seed in 0..20 {
            let n = 4 + (seed as usize % 9);
            let steps = 1 + (seed as usize % (n + 2));
            let seq = random_sequence(n, steps, &mut seeded_rng(seed)).unwrap();
            let final_state = run(&seq).unwrap().pop().unwrap();
            let m = product_reachability(&seq);
            assert!(m.matches_knowledge(&final_state), "seed={seed}");
        }
    }

    #[test]
    fn reverse_transpose_product_is_the_transpose() {
        for seed in 0..10 {
            let seq = random_sequence(6, 4, &mut seeded_rng(100 + seed)).unwrap();
            let forward = product_reachability(&seq);
            let backward = product_reachability(&seq.reverse_transpose());
            assert_eq!(backward, forward.transpose());
        }
    }

    #[test]
    fn duality_on_single_edge() {
        let seq = GraphSequence::new(2, vec![snapshot(2, 0, &[(1, 2)])]).unwrap();
        assert!(duality_check(&seq, nid(1)));
        assert!(duality_check(&seq, nid(2)));
    }

    #[test]
    fn duality_on_random_sequences() {
        for seed in 0..15 {
            let n = 3 + (seed as usize % 8);
            let seq = random_sequence(n, n - 1, &mut seeded_rng(200 + seed)).unwrap();
            for v in 1..=n as u32 {
                assert!(duality_check(&seq, nid(v)));
            }
        }
    }
}
