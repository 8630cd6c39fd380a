//! Named deterministic graph schedules, each bundled with certificates that
//! prove its connectivity condition in linear time.
//!
//! Two families exist. Path schedules (`dp_path`, `cp_path`) realize the
//! minimal edge sets for disseminating one node's datum or collecting into
//! one node, meeting their growth bounds with equality; their certificates
//! are the paths themselves as cords. Cycle schedules (`psi`, `nu`, `eta`,
//! `fixed_cycle`, `doubling`, `random`) put every node on a directed cycle
//! whose required length varies by round; their certificates are the cycle
//! decompositions.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cords::{verify_cord, Cord, CordDirection};
use crate::error::{Error, Result};
use crate::graph::{cycle_edges, seeded_rng, GraphSequence, GraphSnapshot, NodeId, SequenceDump};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleName {
    DpPath,
    CpPath,
    Psi,
    Nu,
    Eta,
    FixedCycle,
    Doubling,
    Random,
}

impl ScheduleName {
    pub const ALL: [ScheduleName; 8] = [
        ScheduleName::DpPath,
        ScheduleName::CpPath,
        ScheduleName::Psi,
        ScheduleName::Nu,
        ScheduleName::Eta,
        ScheduleName::FixedCycle,
        ScheduleName::Doubling,
        ScheduleName::Random,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleName::DpPath => "dp_path",
            ScheduleName::CpPath => "cp_path",
            ScheduleName::Psi => "psi",
            ScheduleName::Nu => "nu",
            ScheduleName::Eta => "eta",
            ScheduleName::FixedCycle => "fixed_cycle",
            ScheduleName::Doubling => "doubling",
            ScheduleName::Random => "random",
        }
    }
}

impl fmt::Display for ScheduleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScheduleName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ScheduleName::ALL
            .into_iter()
            .find(|name| name.as_str() == s)
            .ok_or_else(|| Error::Malformed(format!("unknown schedule name `{s}`")))
    }
}

/// Construction parameters recorded alongside a schedule.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ScheduleParams {
    pub n: usize,
    pub steps: usize,
    /// RNG seed, for the random family.
    pub seed: Option<u64>,
    /// Distinguished node: the source `w` for dp_path, the sink `q` for
    /// cp_path.
    pub target: Option<NodeId>,
}

/// Proof object for one round.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RoundCertificate {
    /// A cord of at least `min_cardinality` nodes that must verify against
    /// the round's snapshot.
    Cord { cord: Cord, min_cardinality: usize },
    /// Disjoint directed cycles covering all nodes, each of length >= `chi`,
    /// witnessing that the round's graph contains `chi`-cycles everywhere.
    CycleCover {
        chi: usize,
        cycles: Vec<Vec<NodeId>>,
    },
}

/// A named finite graph sequence plus per-round certificates.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Schedule {
    pub name: ScheduleName,
    pub sequence: GraphSequence,
    pub certificates: Vec<RoundCertificate>,
    pub params: ScheduleParams,
}

impl Schedule {
    /// Checks every round's certificate against its snapshot. Linear in the
    /// total certificate size; never searches.
    pub fn verify_certificates(&self) -> Result<()> {
        if self.certificates.len() != self.sequence.len() {
            return Err(Error::Contract(format!(
                "{} certificates for {} rounds",
                self.certificates.len(),
                self.sequence.len()
            )));
        }
        for (k, cert) in self.certificates.iter().enumerate() {
            let snap = self.sequence.get(k).expect("round within sequence");
            verify_round_certificate(cert, snap)
                .map_err(|e| Error::Contract(format!("round {k}: {e}")))?;
        }
        Ok(())
    }

    pub fn to_dump(&self) -> ScheduleDump {
        ScheduleDump {
            name: self.name,
            n: self.params.n,
            steps: self.params.steps,
            seed: self.params.seed,
            target: self.params.target,
            sequence: self.sequence.to_dump(),
            certificates: self.certificates.clone(),
        }
    }
}

fn verify_round_certificate(cert: &RoundCertificate, snap: &GraphSnapshot) -> Result<()> {
    match cert {
        RoundCertificate::Cord {
            cord,
            min_cardinality,
        } => {
            if cord.cardinality() < *min_cardinality {
                return Err(Error::Contract(format!(
                    "cord has {} nodes, needs {min_cardinality}",
                    cord.cardinality()
                )));
            }
            if !verify_cord(cord, snap)? {
                return Err(Error::Contract("cord does not verify".into()));
            }
            Ok(())
        }
        RoundCertificate::CycleCover { chi, cycles } => {
            let n = snap.n();
            let mut covered = vec![false; n];
            for cycle in cycles {
                if cycle.len() < (*chi).max(2) {
                    return Err(Error::Contract(format!(
                        "cycle of length {} below chi={chi}",
                        cycle.len()
                    )));
                }
                for node in cycle {
                    if !node.in_range(n) {
                        return Err(Error::InvalidNode {
                            node: node.value(),
                            n,
                        });
                    }
                    if covered[node.index()] {
                        return Err(Error::Contract(format!("node {node} covered twice")));
                    }
                    covered[node.index()] = true;
                }
                for (from, to) in cycle_edges(cycle) {
                    if !snap.has_edge(from, to) {
                        return Err(Error::Contract(format!("missing edge ({from},{to})")));
                    }
                }
            }
            if let Some(index) = covered.iter().position(|c| !c) {
                return Err(Error::Contract(format!(
                    "node {} not covered by any cycle",
                    index + 1
                )));
            }
            Ok(())
        }
    }
}

/// JSON wire form of a schedule: the sequence dump plus certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScheduleDump {
    pub name: ScheduleName,
    pub n: usize,
    pub steps: usize,
    pub seed: Option<u64>,
    pub target: Option<NodeId>,
    pub sequence: SequenceDump,
    pub certificates: Vec<RoundCertificate>,
}

impl ScheduleDump {
    pub fn into_schedule(self) -> Result<Schedule> {
        let sequence = self.sequence.into_sequence()?;
        if sequence.n() != self.n {
            return Err(Error::Malformed(format!(
                "dump declares n={}, sequence has n={}",
                self.n,
                sequence.n()
            )));
        }
        Ok(Schedule {
            name: self.name,
            sequence,
            certificates: self.certificates,
            params: ScheduleParams {
                n: self.n,
                steps: self.steps,
                seed: self.seed,
                target: self.target,
            },
        })
    }
}

/// Wraps an offset computation back into the label range `1..=n`.
fn wrap(n: usize, base: NodeId, offset: i64) -> NodeId {
    let idx = (base.index() as i64 + offset).rem_euclid(n as i64);
    NodeId::from_index(idx as usize)
}

/// `ceil(n/2)`, the knee shared by the round-indexed cycle profiles.
fn half_point(n: usize) -> usize {
    n.div_ceil(2)
}

/// Collection-first cycle-length profile: full cycles for the first half of
/// the rounds, then shrinking as `n - k`. Meaningful for rounds `0..=n-2`;
/// later rounds saturate to 0 (no requirement).
pub fn psi_value(n: usize, k: usize) -> usize {
    if k < half_point(n) {
        n
    } else {
        n.saturating_sub(k)
    }
}

/// Dissemination-first profile: growing as `k + 2` for the first half of the
/// rounds, then full cycles.
pub fn nu_value(n: usize, k: usize) -> usize {
    if k < half_point(n) {
        k + 2
    } else {
        n
    }
}

/// The pointwise minimum of the two profiles.
pub fn eta_value(n: usize, k: usize) -> usize {
    psi_value(n, k).min(nu_value(n, k))
}

/// Splits `1..=n` into consecutive-label directed cycles, all of length
/// `chi` except the last, which absorbs the remainder.
fn chi_partition(n: usize, round: usize, chi: usize) -> Result<(GraphSnapshot, Vec<Vec<NodeId>>)> {
    let chi = chi.clamp(2, n);
    let groups = n / chi;
    let mut cycles = Vec::with_capacity(groups);
    let mut edges = Vec::with_capacity(n);
    let mut start = 0usize;
    for g in 0..groups {
        let len = if g == groups - 1 { chi + n % chi } else { chi };
        let cycle: Vec<NodeId> = (start..start + len).map(NodeId::from_index).collect();
        edges.extend(cycle_edges(&cycle));
        cycles.push(cycle);
        start += len;
    }
    Ok((GraphSnapshot::new(n, round, edges)?, cycles))
}

fn cycle_profile_schedule(
    name: ScheduleName,
    n: usize,
    profile: fn(usize, usize) -> usize,
) -> Result<Schedule> {
    if n < 3 {
        return Err(Error::InvalidSize { n, min: 3 });
    }
    let steps = n - 1;
    let mut snapshots = Vec::with_capacity(steps);
    let mut certificates = Vec::with_capacity(steps);
    for k in 0..steps {
        let chi = profile(n, k);
        let (snap, cycles) = chi_partition(n, k, chi)?;
        snapshots.push(snap);
        certificates.push(RoundCertificate::CycleCover { chi, cycles });
    }
    Ok(Schedule {
        name,
        sequence: GraphSequence::new(n, snapshots)?,
        certificates,
        params: ScheduleParams {
            n,
            steps,
            seed: None,
            target: None,
        },
    })
}

/// Rounds 0..n-2 each contain every node on a cycle of length `psi(k)`;
/// running the flood under it grows every knowledge set by at least one item
/// per round, which is what makes size inference possible.
pub fn psi_schedule(n: usize) -> Result<Schedule> {
    cycle_profile_schedule(ScheduleName::Psi, n, psi_value)
}

/// Rounds 0..n-2 each contain every node on a cycle of length `nu(k)`;
/// every datum's holder count grows by at least one per round.
pub fn nu_schedule(n: usize) -> Result<Schedule> {
    cycle_profile_schedule(ScheduleName::Nu, n, nu_value)
}

/// The weakest of the three profiles; still saturates total knowledge to
/// n^2 by round n-1.
pub fn eta_schedule(n: usize) -> Result<Schedule> {
    cycle_profile_schedule(ScheduleName::Eta, n, eta_value)
}

/// Minimal edge sets growing an output path from `w`: at round `k` the path
/// `w -> w+1 -> ... -> w+k+1` (labels wrapping), so exactly `k + 2` nodes
/// hold `w`'s datum after the round. `w` itself never receives anything.
pub fn dp_path_schedule(n: usize, w: NodeId) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    if !w.in_range(n) {
        return Err(Error::InvalidNode { node: w.value(), n });
    }
    let steps = n - 1;
    let mut snapshots = Vec::with_capacity(steps);
    let mut certificates = Vec::with_capacity(steps);
    for k in 0..steps {
        let edges: Vec<(NodeId, NodeId)> = (0..=k as i64)
            .map(|j| (wrap(n, w, j), wrap(n, w, j + 1)))
            .collect();
        snapshots.push(GraphSnapshot::new(n, k, edges)?);
        // Output cords list the far end first.
        let nodes: Vec<NodeId> = (1..=k as i64 + 1).rev().map(|j| wrap(n, w, j)).collect();
        certificates.push(RoundCertificate::Cord {
            cord: Cord {
                target: w,
                nodes,
                direction: CordDirection::Output,
                closed: false,
            },
            min_cardinality: k + 1,
        });
    }
    Ok(Schedule {
        name: ScheduleName::DpPath,
        sequence: GraphSequence::new(n, snapshots)?,
        certificates,
        params: ScheduleParams {
            n,
            steps,
            seed: None,
            target: Some(w),
        },
    })
}

/// Minimal edge sets shrinking an input path into `q`: at round `k` the
/// `n-k-1` nodes just below `q` (labels wrapping) chain into `q`, so `q`
/// gains exactly one datum per round and collects everything at round n-1.
pub fn cp_path_schedule(n: usize, q: NodeId) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    if !q.in_range(n) {
        return Err(Error::InvalidNode { node: q.value(), n });
    }
    let steps = n - 1;
    let mut snapshots = Vec::with_capacity(steps);
    let mut certificates = Vec::with_capacity(steps);
    for k in 0..steps {
        let m = n - k - 1;
        let path: Vec<NodeId> = (0..m).map(|t| wrap(n, q, t as i64 - m as i64)).collect();
        let mut edges: Vec<(NodeId, NodeId)> = path.windows(2).map(|w| (w[0], w[1])).collect();
        edges.push((*path.last().unwrap(), q));
        snapshots.push(GraphSnapshot::new(n, k, edges)?);
        certificates.push(RoundCertificate::Cord {
            cord: Cord {
                target: q,
                nodes: path,
                direction: CordDirection::Input,
                closed: false,
            },
            min_cardinality: m,
        });
    }
    Ok(Schedule {
        name: ScheduleName::CpPath,
        sequence: GraphSequence::new(n, snapshots)?,
        certificates,
        params: ScheduleParams {
            n,
            steps,
            seed: None,
            target: Some(q),
        },
    })
}

/// The single cycle `1 -> 2 -> ... -> n -> 1` repeated `steps` times: the
/// worst connected case, where every knowledge set grows by exactly one item
/// per round and full knowledge arrives only at round n-1.
pub fn fixed_cycle_schedule(n: usize, steps: usize) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let order: Vec<NodeId> = (0..n).map(NodeId::from_index).collect();
    let edges = cycle_edges(&order);
    let snapshots = (0..steps)
        .map(|k| GraphSnapshot::new(n, k, edges.iter().copied()))
        .collect::<Result<Vec<_>>>()?;
    let certificates = (0..steps)
        .map(|_| RoundCertificate::CycleCover {
            chi: n,
            cycles: vec![order.clone()],
        })
        .collect();
    Ok(Schedule {
        name: ScheduleName::FixedCycle,
        sequence: GraphSequence::new(n, snapshots)?,
        certificates,
        params: ScheduleParams {
            n,
            steps,
            seed: None,
            target: None,
        },
    })
}

/// Round `k` shifts every label by `2^k`, so knowledge sets are contiguous
/// intervals that double each round and full knowledge arrives at round
/// `ceil(log2 n)`, the fastest any one-in-regular sequence can manage.
/// For even `n` the shift graphs split into `gcd(2^k, n)` disjoint cycles.
pub fn doubling_schedule(n: usize) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let steps = crate::bounds::min_fks_time(n);
    let mut snapshots = Vec::with_capacity(steps);
    let mut certificates = Vec::with_capacity(steps);
    for k in 0..steps {
        let shift = 1usize << k;
        let edges: Vec<(NodeId, NodeId)> = (0..n)
            .map(|i| {
                let from = NodeId::from_index(i);
                (from, wrap(n, from, shift as i64))
            })
            .collect();
        snapshots.push(GraphSnapshot::new(n, k, edges)?);
        certificates.push(shift_cycle_cover(n, shift));
    }
    Ok(Schedule {
        name: ScheduleName::Doubling,
        sequence: GraphSequence::new(n, snapshots)?,
        certificates,
        params: ScheduleParams {
            n,
            steps,
            seed: None,
            target: None,
        },
    })
}

fn shift_cycle_cover(n: usize, shift: usize) -> RoundCertificate {
    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        while !visited[cur] {
            visited[cur] = true;
            cycle.push(NodeId::from_index(cur));
            cur = (cur + shift) % n;
        }
        cycles.push(cycle);
    }
    let chi = cycles.iter().map(Vec::len).min().unwrap_or(n);
    RoundCertificate::CycleCover { chi, cycles }
}

/// `steps` fresh random Hamiltonian cycles from the named seeded generator;
/// each round's cycle doubles as its own certificate.
pub fn random_schedule(n: usize, steps: usize, seed: u64) -> Result<Schedule> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let mut rng = seeded_rng(seed);
    let mut snapshots = Vec::with_capacity(steps);
    let mut certificates = Vec::with_capacity(steps);
    for k in 0..steps {
        let (snap, order) = crate::graph::random_cycle_with_order(n, k, &mut rng)?;
        snapshots.push(snap);
        certificates.push(RoundCertificate::CycleCover {
            chi: n,
            cycles: vec![order],
        });
    }
    Ok(Schedule {
        name: ScheduleName::Random,
        sequence: GraphSequence::new(n, snapshots)?,
        certificates,
        params: ScheduleParams {
            n,
            steps,
            seed: Some(seed),
            target: None,
        },
    })
}
