//! Monte Carlo estimation of earliest and latest full-knowledge times over
//! random cycle sequences.
//!
//! Trials are independent units of work: each derives its own RNG seed from
//! the sweep's base seed, so results are identical whether trials run
//! serially or in parallel, and identical configs produce byte-identical
//! CSV output.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::bounds::{bound_windows, Windows};
use crate::error::{Error, Result};
use crate::graph::{random_cycle_graph, seeded_rng, NodeId};
use crate::knowledge::{flood_step, initial_state};

/// Outcome of one trial: the round at which the first node holds everything
/// ("earliest") and the round at which every node does ("latest").
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TrialRecord {
    pub n: usize,
    pub seed: u64,
    pub earliest_fks: usize,
    pub latest_fks: usize,
}

/// Steps fresh random cycle graphs until full knowledge. Guaranteed to halt
/// by round `n - 1` since every draw is a full cycle; overshooting that is
/// reported as a contract violation rather than looping.
pub fn run_trial(n: usize, seed: u64) -> Result<TrialRecord> {
    if n < 2 {
        return Err(Error::InvalidSize { n, min: 2 });
    }
    let mut rng = seeded_rng(seed);
    let mut state = initial_state(n)?;
    let mut earliest = None;
    loop {
        let g = random_cycle_graph(n, &mut rng)?.at_round(state.round());
        state = flood_step(&state, &g)?;
        let round = state.round();
        if earliest.is_none() && (0..n).any(|i| state.is_fcs(NodeId::new(i as u32 + 1))) {
            earliest = Some(round);
        }
        if state.is_fks() {
            return Ok(TrialRecord {
                n,
                seed,
                earliest_fks: earliest.expect("fks implies some node at fcs"),
                latest_fks: round,
            });
        }
        if round >= n - 1 {
            return Err(Error::Contract(format!(
                "trial at n={n} seed={seed} not saturated by round {round}"
            )));
        }
    }
}

/// Derives the per-trial seed from the sweep's base seed with a SplitMix64
/// finalizer over `(base, n, trial)`, making trials order-independent.
pub fn derive_seed(base: u64, n: usize, trial: usize) -> u64 {
    let mut z = base
        .wrapping_add((n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((trial as u64).wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Aggregates for one network size, with the analytic windows attached.
#[derive(Clone, PartialEq, Debug)]
pub struct SweepRow {
    pub n: usize,
    pub trials: usize,
    pub mean_earliest: f64,
    pub mean_latest: f64,
    /// Population standard deviations (divide by trial count).
    pub std_earliest: f64,
    pub std_latest: f64,
    pub min_latest: usize,
    pub max_latest: usize,
    pub windows: Windows,
}

/// One sweep: `trials` trials per network size.
#[derive(Clone, PartialEq, Debug)]
pub struct SweepReport {
    pub base_seed: u64,
    pub trials: usize,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    pub const CSV_HEADER: &'static str = "n,trials,mean_earliest,mean_latest,std_earliest,\
                                          std_latest,min_latest,max_latest,phi,latest_low,\
                                          latest_high,earliest_low,earliest_high";

    /// Writes the sweep CSV. Column set and order are fixed; identical
    /// reports serialize to identical bytes.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", Self::CSV_HEADER)?;
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                row.n,
                row.trials,
                row.mean_earliest,
                row.mean_latest,
                row.std_earliest,
                row.std_latest,
                row.min_latest,
                row.max_latest,
                row.windows.phi,
                row.windows.latest.0,
                row.windows.latest.1,
                row.windows.earliest.0,
                row.windows.earliest.1,
            )?;
        }
        Ok(())
    }
}

fn mean_and_std(values: impl Iterator<Item = usize> + Clone, count: usize) -> (f64, f64) {
    let mean = values.clone().sum::<usize>() as f64 / count as f64;
    let var = values
        .map(|v| {
            let d = v as f64 - mean;
            d * d
        })
        .sum::<f64>()
        / count as f64;
    (mean, var.sqrt())
}

/// Runs `trials` trials for every size in `n_values` (each size needs
/// `n >= 3` so the analytic windows exist) and aggregates per size. Trials
/// execute in parallel; aggregation is order-independent.
pub fn sweep(n_values: &[usize], trials: usize, base_seed: u64) -> Result<SweepReport> {
    if trials < 1 {
        return Err(Error::Contract("sweep needs at least one trial".into()));
    }
    let rows = n_values
        .iter()
        .map(|&n| {
            let windows = bound_windows(n)?;
            let records: Vec<TrialRecord> = (0..trials)
                .into_par_iter()
                .map(|t| run_trial(n, derive_seed(base_seed, n, t)))
                .collect::<Result<_>>()?;
            let (mean_earliest, std_earliest) =
                mean_and_std(records.iter().map(|r| r.earliest_fks), trials);
            let (mean_latest, std_latest) =
                mean_and_std(records.iter().map(|r| r.latest_fks), trials);
            Ok(SweepRow {
                n,
                trials,
                mean_earliest,
                mean_latest,
                std_earliest,
                std_latest,
                min_latest: records.iter().map(|r| r.latest_fks).min().unwrap(),
                max_latest: records.iter().map(|r| r.latest_fks).max().unwrap(),
                windows,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepReport {
        base_seed,
        trials,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::min_fks_time;

    #[test]
    fn two_nodes_finish_in_one_round() {
        for seed in 0..20 {
            let r = run_trial(2, seed).unwrap();
            assert_eq!((r.earliest_fks, r.latest_fks), (1, 1));
        }
    }

    #[test]
    fn three_nodes_finish_within_two_rounds() {
        for seed in 0..50 {
            let r = run_trial(3, seed).unwrap();
            assert!(r.latest_fks <= 2);
        }
    }

    #[test]
    fn trials_are_seed_deterministic() {
        let a = run_trial(12, 777).unwrap();
        let b = run_trial(12, 777).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn records_respect_the_hard_caps() {
        for seed in 0..100 {
            let n = 2 + (seed as usize % 30);
            let r = run_trial(n, derive_seed(3, n, seed as usize)).unwrap();
            assert!(r.earliest_fks >= min_fks_time(n), "n={n} seed={seed}");
            assert!(r.earliest_fks <= r.latest_fks);
            assert!(r.latest_fks < n, "n={n} seed={seed}");
        }
    }

    #[test]
    fn undersized_trial_is_rejected() {
        assert!(run_trial(1, 0).is_err());
    }

    #[test]
    fn sweeps_reproduce_and_order_means() {
        let a = sweep(&[4, 6, 8], 25, 9).unwrap();
        let b = sweep(&[4, 6, 8], 25, 9).unwrap();
        assert_eq!(a, b);
        for row in &a.rows {
            assert!(row.mean_earliest <= row.mean_latest);
            assert!(row.min_latest <= row.max_latest);
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        a.write_csv(&mut left).unwrap();
        b.write_csv(&mut right).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn csv_schema_is_pinned() {
        let report = sweep(&[5], 3, 1).unwrap();
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(
            header,
            "n,trials,mean_earliest,mean_latest,std_earliest,std_latest,\
             min_latest,max_latest,phi,latest_low,latest_high,earliest_low,earliest_high"
        );
        assert_eq!(text.lines().count(), 2);
        assert!(text.lines().nth(1).unwrap().starts_with("5,3,"));
    }
}
