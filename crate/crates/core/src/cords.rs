//! Input-cords, output-cords, closure, and cycle-membership checks.
//!
//! A cord is a simple directed path of distinct nodes attached to a target
//! node; its cardinality measures how much fresh data can flow into (input)
//! or out of (output) the target in one round. The searches here are
//! exhaustive and meant for desk-scale graphs (see [`SEARCH_NODE_LIMIT`]);
//! generated schedules instead carry explicit certificate cords that verify
//! in linear time at any size.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphSnapshot, NodeId};

/// Advisory ceiling for the exhaustive searches in this module. Schedule
/// certificates never need it; the CLI enforces it on search-based paths.
pub const SEARCH_NODE_LIMIT: usize = 20;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CordDirection {
    Input,
    Output,
}

/// A simple directed path certifying one-round connectivity at a target.
///
/// For an input cord the listed nodes chain `nodes[0] -> nodes[1] -> ... ->
/// target`; a closed input cord additionally has the edge `target ->
/// nodes[0]`, so the whole forms a directed cycle through the target. For an
/// output cord the chain runs the other way: `target -> nodes[last] -> ... ->
/// nodes[0]`. Closure is a notion for input cords; constructors in this
/// crate never set it on output cords, and verification of a closed output
/// cord checks the mirrored edge `nodes[0] -> target`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Cord {
    pub target: NodeId,
    pub nodes: Vec<NodeId>,
    pub direction: CordDirection,
    pub closed: bool,
}

impl Cord {
    pub fn cardinality(&self) -> usize {
        self.nodes.len()
    }
}

/// Checks a cord against a snapshot's edge set: nodes pairwise distinct and
/// excluding the target, every chain edge present, the attachment edge
/// present, and the closure edge present when `closed` is set. Nodes outside
/// `[1, n]` are an error rather than a `false`.
pub fn verify_cord(cord: &Cord, g: &GraphSnapshot) -> Result<bool> {
    let n = g.n();
    for node in cord.nodes.iter().chain(std::iter::once(&cord.target)) {
        if !node.in_range(n) {
            return Err(Error::InvalidNode {
                node: node.value(),
                n,
            });
        }
    }

    let mut seen = vec![false; n];
    seen[cord.target.index()] = true;
    for node in &cord.nodes {
        if seen[node.index()] {
            return Ok(false);
        }
        seen[node.index()] = true;
    }

    if cord.nodes.is_empty() {
        // An empty cord certifies nothing; only a closure claim can fail.
        return Ok(!cord.closed);
    }

    let first = cord.nodes[0];
    let last = *cord.nodes.last().unwrap();
    let ok = match cord.direction {
        CordDirection::Input => {
            cord.nodes.windows(2).all(|w| g.has_edge(w[0], w[1]))
                && g.has_edge(last, cord.target)
                && (!cord.closed || g.has_edge(cord.target, first))
        }
        CordDirection::Output => {
            cord.nodes.windows(2).all(|w| g.has_edge(w[1], w[0]))
                && g.has_edge(cord.target, last)
                && (!cord.closed || g.has_edge(first, cord.target))
        }
    };
    Ok(ok)
}

/// A maximum-cardinality input cord to `target`: the longest simple directed
/// path ending at the target, found by exhaustive DFS over predecessor
/// chains. Returns the empty cord when the target has no in-edges.
///
/// Worst case is exponential; intended for graphs within
/// [`SEARCH_NODE_LIMIT`] nodes.
pub fn longest_input_cord(g: &GraphSnapshot, target: NodeId) -> Cord {
    let preds = g.in_adjacency();
    let mut on_path = vec![false; g.n()];
    on_path[target.index()] = true;
    // `chain` grows from the target outward, so chain[0] is the node
    // adjacent to the target and the cord lists it last.
    let mut chain = Vec::new();
    let mut best = Vec::new();
    extend_backwards(target, &preds, &mut on_path, &mut chain, &mut best);
    best.reverse();
    Cord {
        target,
        nodes: best,
        direction: CordDirection::Input,
        closed: false,
    }
}

fn extend_backwards(
    cur: NodeId,
    preds: &[Vec<NodeId>],
    on_path: &mut [bool],
    chain: &mut Vec<NodeId>,
    best: &mut Vec<NodeId>,
) {
    for &p in &preds[cur.index()] {
        if on_path[p.index()] {
            continue;
        }
        on_path[p.index()] = true;
        chain.push(p);
        if chain.len() > best.len() {
            best.clone_from(chain);
        }
        extend_backwards(p, preds, on_path, chain, best);
        chain.pop();
        on_path[p.index()] = false;
    }
}

/// True iff every node lies on a directed cycle of length at least `chi`
/// (equivalently, has a closed input cord of cardinality greater than
/// `chi - 2`). Values `chi <= 1` read as membership in any cycle, which
/// coincides with `chi = 2` since self-loops are never stored.
pub fn chi_cycle_check(g: &GraphSnapshot, chi: usize) -> bool {
    chi_cycle_certificates(g, chi).is_some()
}

/// Certificate-producing form of [`chi_cycle_check`]: one closed input cord
/// per node on success, `None` as soon as some node has no qualifying cycle.
/// Callers should hold on to the result instead of re-searching.
pub fn chi_cycle_certificates(g: &GraphSnapshot, chi: usize) -> Option<Vec<Cord>> {
    let min_cycle_len = chi.max(2);
    let succs = g.out_adjacency();
    let mut certs = Vec::with_capacity(g.n());
    for index in 0..g.n() {
        let start = NodeId::from_index(index);
        let cord = closed_cord_through(start, min_cycle_len, &succs, g.n())?;
        certs.push(cord);
    }
    Some(certs)
}

/// Searches for a simple cycle through `start` of length >= `min_cycle_len`
/// and returns it as a closed input cord to `start`.
fn closed_cord_through(
    start: NodeId,
    min_cycle_len: usize,
    succs: &[Vec<NodeId>],
    n: usize,
) -> Option<Cord> {
    let mut on_path = vec![false; n];
    on_path[start.index()] = true;
    let mut path = Vec::new();
    if walk_forward(start, start, min_cycle_len, succs, &mut on_path, &mut path) {
        return Some(Cord {
            target: start,
            nodes: path,
            direction: CordDirection::Input,
            closed: true,
        });
    }
    None
}

fn walk_forward(
    cur: NodeId,
    start: NodeId,
    min_cycle_len: usize,
    succs: &[Vec<NodeId>],
    on_path: &mut [bool],
    path: &mut Vec<NodeId>,
) -> bool {
    for &next in &succs[cur.index()] {
        if next == start {
            // path holds the cycle's interior; cycle length is path.len()+1.
            if path.len() + 1 >= min_cycle_len {
                return true;
            }
            continue;
        }
        if on_path[next.index()] {
            continue;
        }
        on_path[next.index()] = true;
        path.push(next);
        if walk_forward(next, start, min_cycle_len, succs, on_path, path) {
            return true;
        }
        path.pop();
        on_path[next.index()] = false;
    }
    false
}
