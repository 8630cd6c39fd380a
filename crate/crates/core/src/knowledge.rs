//! The flooding update, knowledge-state predicates, and the size-inference
//! termination rule.
//!
//! Each node starts knowing exactly its own datum; when an edge `(i, j)` is
//! live for a round, node `j` absorbs all of node `i`'s data. Data values
//! carry no arithmetic role here, so datum `d_i` is identified with the node
//! label `i` and knowledge sets are bit vectors over `1..=n`.

use std::io::{self, Write};

use crate::bits::BitRow;
use crate::error::{Error, Result};
use crate::graph::{GraphSequence, GraphSnapshot, NodeId};

/// Per-node knowledge sets at one round. Bit `j` of node `i` means node `i`
/// holds datum `d_{j+1}`. A node's own bit is always set, and stepping never
/// clears bits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KnowledgeState {
    n: usize,
    round: usize,
    rows: Vec<BitRow>,
}

impl KnowledgeState {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn round(&self) -> usize {
        self.round
    }

    /// Raw per-node bit rows, indexed by 0-based node index. Row layout is
    /// shared with the boolean-matrix oracle so equality checks are direct.
    pub fn rows(&self) -> &[BitRow] {
        &self.rows
    }

    pub fn knows(&self, node: NodeId, datum: NodeId) -> bool {
        self.rows[node.index()].get(datum.index())
    }

    /// `|K_i|` for node `i`.
    pub fn cardinality(&self, node: NodeId) -> usize {
        self.rows[node.index()].count()
    }

    /// Sum of all knowledge-set sizes.
    pub fn total_knowledge(&self) -> usize {
        self.rows.iter().map(BitRow::count).sum()
    }

    /// Full collection state: `node` holds every datum.
    pub fn is_fcs(&self, node: NodeId) -> bool {
        self.rows[node.index()].is_full()
    }

    /// Full disseminated state: every node holds `datum`.
    pub fn is_fds(&self, datum: NodeId) -> bool {
        self.rows.iter().all(|row| row.get(datum.index()))
    }

    /// Full knowledge state: every node holds every datum.
    pub fn is_fks(&self) -> bool {
        self.rows.iter().all(BitRow::is_full)
    }

    /// Number of nodes currently holding `datum`.
    pub fn holders_of(&self, datum: NodeId) -> usize {
        self.rows
            .iter()
            .filter(|row| row.get(datum.index()))
            .count()
    }
}

/// The diagonal state at round 0: each node knows exactly its own datum.
pub fn initial_state(n: usize) -> Result<KnowledgeState> {
    if n < 1 {
        return Err(Error::InvalidSize { n, min: 1 });
    }
    let rows = (0..n)
        .map(|i| {
            let mut row = BitRow::zeros(n);
            row.set(i);
            row
        })
        .collect();
    Ok(KnowledgeState { n, round: 0, rows })
}

/// One synchronous round: every node keeps its own set and absorbs the sets
/// of all in-neighbors. The snapshot's round must match the state's round.
pub fn flood_step(state: &KnowledgeState, g: &GraphSnapshot) -> Result<KnowledgeState> {
    if state.n != g.n() {
        return Err(Error::Contract(format!(
            "state has n={}, snapshot has n={}",
            state.n,
            g.n()
        )));
    }
    if state.round != g.round() {
        return Err(Error::Contract(format!(
            "state at round {}, snapshot at round {}",
            state.round,
            g.round()
        )));
    }
    let mut rows = state.rows.clone();
    for (from, to) in g.edges() {
        rows[to.index()].union_with(&state.rows[from.index()]);
    }
    Ok(KnowledgeState {
        n: state.n,
        round: state.round + 1,
        rows,
    })
}

/// Runs the flooding update over a whole sequence, returning the states at
/// rounds `0..=len`.
pub fn run(seq: &GraphSequence) -> Result<Vec<KnowledgeState>> {
    let mut states = Vec::with_capacity(seq.len() + 1);
    states.push(initial_state(seq.n())?);
    for g in seq.iter() {
        let next = flood_step(states.last().unwrap(), g)?;
        states.push(next);
    }
    Ok(states)
}

/// What a node concluded about the network size, and when.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NodeInference {
    pub size: usize,
    pub round: usize,
}

/// Per-node outcome of the size-inference rule over a trace.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TerminationView {
    inferences: Vec<Option<NodeInference>>,
}

impl TerminationView {
    pub fn node(&self, node: NodeId) -> Option<NodeInference> {
        self.inferences[node.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = Option<NodeInference>> + '_ {
        self.inferences.iter().copied()
    }

    pub fn all_inferred(&self) -> bool {
        self.inferences.iter().all(Option::is_some)
    }
}

/// Applies the first-failure rule: node `i` pins the network size at the
/// first round `k` where `|K_i(k)| < k + 1`, concluding `n = |K_i(k)|`.
///
/// The conclusion is sound only under schedules that guarantee knowledge
/// sets grow by at least one item per round until saturation; under such
/// schedules every node infers `n` exactly at round `n`. On arbitrary traces
/// the rule can fire early with a wrong size, so callers are expected to
/// invoke it only on qualifying runs. Nodes whose trace is too short to
/// trigger the rule are left without an inference.
pub fn infer_size(trace: &[KnowledgeState]) -> TerminationView {
    let n = trace.first().map_or(0, KnowledgeState::n);
    let mut inferences = vec![None; n];
    for (index, slot) in inferences.iter_mut().enumerate() {
        let node = NodeId::from_index(index);
        for state in trace {
            let size = state.cardinality(node);
            if size < state.round() + 1 {
                *slot = Some(NodeInference {
                    size,
                    round: state.round(),
                });
                break;
            }
        }
    }
    TerminationView { inferences }
}

/// Writes a trace as CSV with columns `round,node,cardinality,is_fcs`.
pub fn write_trace_csv<W: Write>(trace: &[KnowledgeState], mut out: W) -> io::Result<()> {
    writeln!(out, "round,node,cardinality,is_fcs")?;
    for state in trace {
        for index in 0..state.n() {
            let node = NodeId::from_index(index);
            writeln!(
                out,
                "{},{},{},{}",
                state.round(),
                node,
                state.cardinality(node),
                state.is_fcs(node)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{random_sequence, seeded_rng};

    fn nid(v: u32) -> NodeId {
        NodeId::new(v)
    }

    fn snapshot(n: usize, round: usize, edges: &[(u32, u32)]) -> GraphSnapshot {
        GraphSnapshot::new(n, round, edges.iter().map(|&(a, b)| (nid(a), nid(b)))).unwrap()
    }

    fn cycle_sequence(n: usize, steps: usize) -> GraphSequence {
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
    fn initial_state_is_diagonal() {
        let s = initial_state(4).unwrap();
        for v in 1..=4 {
            assert_eq!(s.cardinality(nid(v)), 1);
            assert!(s.knows(nid(v), nid(v)));
        }
        assert_eq!(s.total_knowledge(), 4);
        let s1 = initial_state(1).unwrap();
        assert!(s1.is_fks());
        assert!(initial_state(0).is_err());
    }

    #[test]
    fn empty_round_only_advances_the_clock() {
        let s = initial_state(3).unwrap();
        let s1 = flood_step(&s, &GraphSnapshot::empty(3, 0)).unwrap();
        assert_eq!(s1.round(), 1);
        assert_eq!(s1.rows(), s.rows());
    }

    #[test]
    fn single_transfer() {
        let s = initial_state(2).unwrap();
        let s1 = flood_step(&s, &snapshot(2, 0, &[(1, 2)])).unwrap();
        assert_eq!(s1.cardinality(nid(2)), 2);
        assert_eq!(s1.cardinality(nid(1)), 1);
    }

    #[test]
    fn three_cycle_one_round() {
        let s = initial_state(3).unwrap();
        let s1 = flood_step(&s, &snapshot(3, 0, &[(1, 2), (2, 3), (3, 1)])).unwrap();
        for v in 1..=3 {
            assert_eq!(s1.cardinality(nid(v)), 2);
        }
    }

    #[test]
    fn step_rejects_mismatches() {
        let s = initial_state(3).unwrap();
        assert!(matches!(
            flood_step(&s, &GraphSnapshot::empty(4, 0)),
            Err(Error::Contract(_))
        ));
        assert!(matches!(
            flood_step(&s, &GraphSnapshot::empty(3, 1)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn run_on_empty_sequence() {
        let states = run(&GraphSequence::empty(4)).unwrap();
        assert_eq!(states.len(), 1);
        assert_eq!(states[0].round(), 0);
    }

    #[test]
    fn fixed_cycle_reaches_fks_exactly_at_n_minus_1() {
        let n = 5;
        let states = run(&cycle_sequence(n, n - 1)).unwrap();
        assert!(states[n - 1].is_fks());
        for state in &states[..n - 1] {
            assert!(!state.is_fks());
        }
    }

    #[test]
    fn random_sequences_saturate_by_n_minus_1() {
        // Every random snapshot is a full cycle, so total knowledge at round
        // n-1 is n^2 regardless of the draw.
        let n = 6;
        for seed in 0..5 {
            let seq = random_sequence(n, n - 1, &mut seeded_rng(seed)).unwrap();
            let states = run(&seq).unwrap();
            assert_eq!(states[n - 1].total_knowledge(), n * n);
        }
    }

    #[test]
    fn predicates_on_initial_and_full_states() {
        let s = initial_state(4).unwrap();
        for v in 1..=4 {
            assert!(!s.is_fcs(nid(v)));
            assert!(!s.is_fds(nid(v)));
        }
        assert!(!s.is_fks());

        let full = run(&cycle_sequence(4, 3)).unwrap().pop().unwrap();
        for v in 1..=4 {
            assert!(full.is_fcs(nid(v)));
            assert!(full.is_fds(nid(v)));
        }
        assert!(full.is_fks());
    }

    #[test]
    fn monotone_under_stepping() {
        let seq = random_sequence(7, 6, &mut seeded_rng(17)).unwrap();
        let states = run(&seq).unwrap();
        for pair in states.windows(2) {
            for (before, after) in pair[0].rows().iter().zip(pair[1].rows()) {
                assert!(after.contains_all(before));
            }
        }
    }

    #[test]
    fn extra_edges_never_shrink_knowledge() {
        let base = snapshot(5, 0, &[(1, 2), (3, 4)]);
        let richer = snapshot(5, 0, &[(1, 2), (3, 4), (4, 5), (2, 3)]);
        let s = initial_state(5).unwrap();
        let a = flood_step(&s, &base).unwrap();
        let b = flood_step(&s, &richer).unwrap();
        for v in 1..=5 {
            assert!(b.cardinality(nid(v)) >= a.cardinality(nid(v)));
        }
    }

    #[test]
    fn doubling_cap_under_one_in_regular_rounds() {
        for seed in 0..10 {
            let n = 9;
            let seq = random_sequence(n, n - 1, &mut seeded_rng(seed)).unwrap();
            let states = run(&seq).unwrap();
            for (k, state) in states.iter().enumerate() {
                let cap = (1usize << k.min(30)).min(n);
                for v in 1..=n as u32 {
                    assert!(state.cardinality(nid(v)) <= cap);
                }
            }
        }
    }

    #[test]
    fn fixed_cycle_trace_infers_size_at_round_n() {
        let n = 5;
        // One round past n-1 so the inference rule can fire.
        let states = run(&cycle_sequence(n, n)).unwrap();
        // On the fixed cycle |K_i(k)| = min(k+1, n) exactly.
        for (k, state) in states.iter().enumerate() {
            for v in 1..=n as u32 {
                assert_eq!(state.cardinality(nid(v)), (k + 1).min(n));
            }
        }
        let view = infer_size(&states);
        assert!(view.all_inferred());
        for v in 1..=n as u32 {
            let inf = view.node(nid(v)).unwrap();
            assert_eq!((inf.size, inf.round), (n, n));
        }
    }

    #[test]
    fn single_node_infers_immediately() {
        let seq = GraphSequence::new(1, vec![GraphSnapshot::empty(1, 0)]).unwrap();
        let states = run(&seq).unwrap();
        let view = infer_size(&states);
        let inf = view.node(nid(1)).unwrap();
        assert_eq!((inf.size, inf.round), (1, 1));
    }

    #[test]
    fn short_trace_leaves_inference_open() {
        let states = run(&cycle_sequence(4, 2)).unwrap();
        let view = infer_size(&states);
        assert!(!view.all_inferred());
    }

    #[test]
    fn trace_csv_schema() {
        let states = run(&cycle_sequence(3, 1)).unwrap();
        let mut buf = Vec::new();
        write_trace_csv(&states, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("round,node,cardinality,is_fcs"));
        assert_eq!(lines.next(), Some("0,1,1,false"));
        assert_eq!(text.lines().count(), 1 + 2 * 3);
    }
}
