//! Per-round digraphs, random Hamiltonian-cycle sampling, and sequence
//! containers.
//!
//! Nodes are labeled `1..=n`. Snapshots and sequences are immutable after
//! construction and safe to share across concurrent trials.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The toolkit's named generator: ChaCha8 seeded from a `u64`.
///
/// Every random artifact (sequences, schedules, sweeps) draws from a stream
/// created here, so a fixed seed reproduces identical output on any machine.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// 1-based node identifier.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    /// Builds a node id from its 1-based label. Panics on zero; range checks
    /// against a concrete network size happen where a size is known.
    pub fn new(value: u32) -> NodeId {
        assert!(value >= 1, "node labels start at 1");
        NodeId(value)
    }

    pub(crate) fn from_index(index: usize) -> NodeId {
        assert!(
            index < u32::MAX as usize,
            "node index {index} overflows the label space"
        );
        NodeId(index as u32 + 1)
    }

    /// The 1-based label.
    pub fn value(self) -> u32 {
        self.0
    }

    /// The 0-based array index.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn in_range(self, n: usize) -> bool {
        self.0 >= 1 && self.0 as usize <= n
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One round's communication digraph over nodes `1..=n`.
///
/// Self-loop pairs are never stored: retention of a node's own data is a
/// semantic of the flooding update, not an edge. Edge sets are deduplicated
/// and kept in sorted order so serialized output is stable.
#[derive(Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    n: usize,
    round: usize,
    edges: BTreeSet<(NodeId, NodeId)>,
}

impl GraphSnapshot {
    pub fn new(
        n: usize,
        round: usize,
        edges: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self> {
        let mut set = BTreeSet::new();
        for (from, to) in edges {
            for node in [from, to] {
                if !node.in_range(n) {
                    return Err(Error::InvalidNode {
                        node: node.value(),
                        n,
                    });
                }
            }
            if from != to {
                set.insert((from, to));
            }
        }
        Ok(GraphSnapshot {
            n,
            round,
            edges: set,
        })
    }

    pub fn empty(n: usize, round: usize) -> Self {
        GraphSnapshot {
            n,
            round,
            edges: BTreeSet::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// The same snapshot re-tagged with a different round index.
    pub fn at_round(mut self, round: usize) -> Self {
        self.round = round;
        self
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.edges.contains(&(from, to))
    }

    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    /// Out-neighbor lists indexed by 0-based node index.
    pub fn out_adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(from, to) in &self.edges {
            adj[from.index()].push(to);
        }
        adj
    }

    /// In-neighbor lists indexed by 0-based node index.
    pub fn in_adjacency(&self) -> Vec<Vec<NodeId>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(from, to) in &self.edges {
            adj[to.index()].push(from);
        }
        adj
    }

    /// Edge-reversed copy of this snapshot at the given round.
    pub fn reversed(&self, round: usize) -> GraphSnapshot {
        GraphSnapshot {
            n: self.n,
            round,
            edges: self.edges.iter().map(|&(a, b)| (b, a)).collect(),
        }
    }
}

impl fmt::Debug for GraphSnapshot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "G(round={}, n={}, edges={:?})",
            self.round, self.n, self.edges
        )
    }
}

/// Edges of the directed cycle visiting `order` in sequence and wrapping.
pub(crate) fn cycle_edges(order: &[NodeId]) -> Vec<(NodeId, NodeId)> {
    let m = order.len();
    (0..m).map(|i| (order[i], order[(i + 1) % m])).collect()
}

/// A uniformly random permutation of `1..=n`.
fn random_permutation(n: usize, rng: &mut impl Rng) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..n).map(NodeId::from_index).collect();
    order.shuffle(rng);
    order
}

/// Draws a random connected graph: the directed Hamiltonian cycle induced by
/// a uniformly random permutation of `1..=n`. Every node gets exactly one
/// in-edge and one out-edge, and the edge set forms a single n-cycle.
pub fn random_cycle_graph(n: usize, rng: &mut impl Rng) -> Result<GraphSnapshot> {
    Ok(random_cycle_with_order(n, 0, rng)?.0)
}

/// As [`random_cycle_graph`], also returning the cycle's node order for use
/// as a certificate.
pub(crate) fn random_cycle_with_order(
    n: usize,
    round: usize,
    rng: &mut impl Rng,
) -> Result<(GraphSnapshot, Vec<NodeId>)> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let order = random_permutation(n, rng);
    let snapshot = GraphSnapshot::new(n, round, cycle_edges(&order))?;
    Ok((snapshot, order))
}

/// `steps` independent draws of [`random_cycle_graph`], rounds `0..steps`.
pub fn random_sequence(n: usize, steps: usize, rng: &mut impl Rng) -> Result<GraphSequence> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let snapshots = (0..steps)
        .map(|k| Ok(random_cycle_with_order(n, k, rng)?.0))
        .collect::<Result<Vec<_>>>()?;
    GraphSequence::new(n, snapshots)
}

/// An ordered run of snapshots; the snapshot at position `k` carries round
/// index `k` and all snapshots share `n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphSequence {
    n: usize,
    snapshots: Vec<GraphSnapshot>,
}

impl GraphSequence {
    pub fn new(n: usize, snapshots: Vec<GraphSnapshot>) -> Result<Self> {
        for (k, snap) in snapshots.iter().enumerate() {
            if snap.n() != n {
                return Err(Error::Contract(format!(
                    "snapshot {k} has n={}, sequence has n={n}",
                    snap.n()
                )));
            }
            if snap.round() != k {
                return Err(Error::Contract(format!(
                    "snapshot at position {k} carries round {}",
                    snap.round()
                )));
            }
        }
        Ok(GraphSequence { n, snapshots })
    }

    pub fn empty(n: usize) -> Self {
        GraphSequence {
            n,
            snapshots: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn get(&self, round: usize) -> Option<&GraphSnapshot> {
        self.snapshots.get(round)
    }

    pub fn iter(&self) -> impl Iterator<Item = &GraphSnapshot> {
        self.snapshots.iter()
    }

    /// The sequence whose snapshot at round `k` is the edge-reversed snapshot
    /// of `self` at round `len-1-k`. An involution.
    pub fn reverse_transpose(&self) -> GraphSequence {
        let len = self.snapshots.len();
        let snapshots = (0..len)
            .map(|k| self.snapshots[len - 1 - k].reversed(k))
            .collect();
        GraphSequence {
            n: self.n,
            snapshots,
        }
    }

    pub fn to_dump(&self) -> SequenceDump {
        SequenceDump {
            n: self.n,
            rounds: self
                .snapshots
                .iter()
                .map(|s| s.edges().map(|(a, b)| (a.value(), b.value())).collect())
                .collect(),
        }
    }
}

/// JSON wire form of a graph sequence:
/// `{"n": int, "rounds": [[[from, to], ...], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SequenceDump {
    pub n: usize,
    pub rounds: Vec<Vec<(u32, u32)>>,
}

impl SequenceDump {
    pub fn into_sequence(self) -> Result<GraphSequence> {
        if self.n == 0 {
            return Err(Error::Malformed("sequence dump with n=0".into()));
        }
        let snapshots = self
            .rounds
            .into_iter()
            .enumerate()
            .map(|(k, edges)| {
                let edges: Vec<(NodeId, NodeId)> = edges
                    .into_iter()
                    .map(|(a, b)| {
                        if a == 0 || b == 0 {
                            return Err(Error::Malformed(format!(
                                "edge ({a},{b}) uses label 0; labels start at 1"
                            )));
                        }
                        Ok((NodeId::new(a), NodeId::new(b)))
                    })
                    .collect::<Result<_>>()?;
                GraphSnapshot::new(self.n, k, edges)
            })
            .collect::<Result<Vec<_>>>()?;
        GraphSequence::new(self.n, snapshots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn nid(v: u32) -> NodeId {
        NodeId::new(v)
    }

    /// Walk the unique out-edge from node 1 and require returning to the
    /// start after exactly n steps, visiting n distinct nodes.
    fn assert_single_cycle(g: &GraphSnapshot) {
        let adj = g.out_adjacency();
        for (i, outs) in adj.iter().enumerate() {
            assert_eq!(outs.len(), 1, "node {} out-degree", i + 1);
        }
        let inc = g.in_adjacency();
        for (i, ins) in inc.iter().enumerate() {
            assert_eq!(ins.len(), 1, "node {} in-degree", i + 1);
        }
        let mut seen = vec![false; g.n()];
        let mut cur = nid(1);
        for _ in 0..g.n() {
            assert!(!seen[cur.index()], "revisited {cur} early");
            seen[cur.index()] = true;
            cur = adj[cur.index()][0];
        }
        assert_eq!(cur, nid(1), "walk did not close after n steps");
    }

    #[test]
    fn two_node_cycle_is_the_only_one() {
        let mut rng = seeded_rng(1);
        for _ in 0..5 {
            let g = random_cycle_graph(2, &mut rng).unwrap();
            assert!(g.has_edge(nid(1), nid(2)) && g.has_edge(nid(2), nid(1)));
            assert_eq!(g.edge_count(), 2);
        }
    }

    #[test]
    fn random_cycle_is_single_cycle() {
        let mut rng = seeded_rng(42);
        let g = random_cycle_graph(5, &mut rng).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_single_cycle(&g);
    }

    #[test]
    fn rejects_undersized_network() {
        let mut rng = seeded_rng(0);
        assert_eq!(
            random_cycle_graph(1, &mut rng).unwrap_err(),
            Error::InvalidSize { n: 1, min: 2 }
        );
        assert!(random_sequence(0, 3, &mut rng).is_err());
    }

    #[test]
    fn cycle_draws_are_uniform_at_n4() {
        // All 3! = 6 distinct directed Hamiltonian cycles on 4 nodes,
        // enumerated by brute force over permutations fixing node 1 first.
        let mut expected = BTreeMap::new();
        let perms = [
            [1, 2, 3, 4],
            [1, 2, 4, 3],
            [1, 3, 2, 4],
            [1, 3, 4, 2],
            [1, 4, 2, 3],
            [1, 4, 3, 2],
        ];
        for p in perms {
            let order: Vec<NodeId> = p.iter().map(|&v| nid(v)).collect();
            let mut edges: Vec<(u32, u32)> = cycle_edges(&order)
                .into_iter()
                .map(|(a, b)| (a.value(), b.value()))
                .collect();
            edges.sort_unstable();
            expected.insert(edges, 0usize);
        }
        assert_eq!(expected.len(), 6);

        let mut rng = seeded_rng(7);
        let draws = 10_000;
        for _ in 0..draws {
            let g = random_cycle_graph(4, &mut rng).unwrap();
            let mut edges: Vec<(u32, u32)> =
                g.edges().map(|(a, b)| (a.value(), b.value())).collect();
            edges.sort_unstable();
            *expected.get_mut(&edges).expect("draw outside cycle space") += 1;
        }
        for (edges, count) in &expected {
            let freq = *count as f64 / draws as f64;
            assert!(
                (freq - 1.0 / 6.0).abs() < 0.02,
                "cycle {edges:?} frequency {freq}"
            );
        }
    }

    #[test]
    fn empty_sequence() {
        let mut rng = seeded_rng(3);
        let seq = random_sequence(5, 0, &mut rng).unwrap();
        assert!(seq.is_empty());
        assert_eq!(seq.reverse_transpose().len(), 0);
    }

    #[test]
    fn sequences_reproduce_from_equal_seeds() {
        let a = random_sequence(3, 2, &mut seeded_rng(99)).unwrap();
        let b = random_sequence(3, 2, &mut seeded_rng(99)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn every_snapshot_passes_walk_check() {
        let mut rng = seeded_rng(11);
        let seq = random_sequence(6, 5, &mut rng).unwrap();
        assert_eq!(seq.len(), 5);
        for (k, g) in seq.iter().enumerate() {
            assert_eq!(g.round(), k);
            assert_single_cycle(g);
        }
    }

    #[test]
    fn reverse_transpose_single_edge() {
        let g = GraphSnapshot::new(2, 0, [(nid(1), nid(2))]).unwrap();
        let seq = GraphSequence::new(2, vec![g]).unwrap();
        let rt = seq.reverse_transpose();
        assert!(rt.get(0).unwrap().has_edge(nid(2), nid(1)));
        assert!(!rt.get(0).unwrap().has_edge(nid(1), nid(2)));
    }

    #[test]
    fn reverse_transpose_is_involution() {
        let mut rng = seeded_rng(5);
        let seq = random_sequence(7, 4, &mut rng).unwrap();
        assert_eq!(seq.reverse_transpose().reverse_transpose(), seq);
    }

    #[test]
    fn self_loops_are_dropped() {
        let g = GraphSnapshot::new(3, 0, [(nid(1), nid(1)), (nid(1), nid(2))]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn snapshot_rejects_out_of_range() {
        let err = GraphSnapshot::new(3, 0, [(nid(1), nid(4))]).unwrap_err();
        assert_eq!(err, Error::InvalidNode { node: 4, n: 3 });
    }

    #[test]
    fn sequence_rejects_inconsistent_snapshots() {
        let wrong_round = vec![GraphSnapshot::empty(3, 1)];
        assert!(matches!(
            GraphSequence::new(3, wrong_round),
            Err(Error::Contract(_))
        ));
        let wrong_size = vec![GraphSnapshot::empty(4, 0)];
        assert!(matches!(
            GraphSequence::new(3, wrong_size),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn dump_round_trips() {
        let mut rng = seeded_rng(8);
        let seq = random_sequence(5, 3, &mut rng).unwrap();
        let dump = seq.to_dump();
        let back = dump.into_sequence().unwrap();
        assert_eq!(back, seq);
    }
}
