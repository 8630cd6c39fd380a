//! Closed-form quantities: the phi anchor, the expected-time windows for
//! earliest and latest full knowledge, the mean-field expectation recursion,
//! and the minimum-time formula. All logarithms are base 2.

use crate::error::{Error, Result};

/// `phi(n) = -log2(1 - log2(n-2) / log2(n))`, defined for `n >= 3`.
///
/// Anchors both expected-time windows: latest full knowledge is expected in
/// `[phi+2, phi+3]` rounds, earliest (first node full) in `[phi, phi+1]`.
pub fn phi(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "phi undefined for n={n} (needs n >= 3)"
        )));
    }
    let ratio = ((n - 2) as f64).log2() / (n as f64).log2();
    // `+ 0.0` folds the n=3 result -0.0 to 0.0.
    Ok(-(1.0 - ratio).log2() + 0.0)
}

/// The two expectation windows for a given network size.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Windows {
    pub phi: f64,
    /// Expected round of the last node's full collection: `[phi+2, phi+3]`.
    pub latest: (f64, f64),
    /// Expected round of the first node's full collection: `[phi, phi+1]`.
    pub earliest: (f64, f64),
}

pub fn bound_windows(n: usize) -> Result<Windows> {
    let phi = phi(n)?;
    Ok(Windows {
        phi,
        latest: (phi + 2.0, phi + 3.0),
        earliest: (phi, phi + 1.0),
    })
}

/// Mean-field expected count of foreign data per node, `E_0..=E_k_max`.
///
/// `E_0 = 0` and `E_k = n-1 - prod_{r<k}(n-2-E_r) / (n-1)^{k-1}`. The product
/// accumulates as a running sum of logs (one exponentiation per step) so
/// large `n, k` do not underflow. Each factor is a conditional probability
/// scaled by `n-1` and is clamped at zero: once some `E_r` reaches `n-2` the
/// mean-field model saturates and the curve stays at exactly `n-1`.
pub fn expected_knowledge_curve(n: usize, k_max: usize) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::Domain(format!(
            "expectation recursion undefined for n={n} (needs n >= 3)"
        )));
    }
    let nf = n as f64;
    let log_n1 = (nf - 1.0).ln();
    let mut curve = Vec::with_capacity(k_max + 1);
    curve.push(0.0);
    let mut log_prod = 0.0f64;
    for k in 1..=k_max {
        let factor = (nf - 2.0 - curve[k - 1]).max(0.0);
        log_prod += factor.ln(); // -inf once saturated; exp then gives 0
        let e_k = (nf - 1.0) - (log_prod - (k as f64 - 1.0) * log_n1).exp();
        curve.push(e_k);
    }
    Ok(curve)
}

/// `ceil(log2 n)`: the minimum round at which full knowledge is possible
/// under one-in-regular rounds (knowledge can at best double per round).
pub fn min_fks_time(n: usize) -> usize {
    assert!(n >= 1, "network size must be positive");
    n.next_power_of_two().trailing_zeros() as usize
}

/// Checks `log2(n^2) > 2 + phi(n) > log2(n)`, which places the latest-FKS
/// window strictly between one and two log factors.
pub fn proposition_check(n: usize) -> Result<bool> {
    let phi = phi(n)?;
    let log_n = (n as f64).log2();
    Ok(2.0 * log_n > 2.0 + phi && 2.0 + phi > log_n)
}

/// Tightness of the latest-FKS window: one full round below `k_hat =
/// 2 + phi(n)` the expected total knowledge has not yet reached the
/// saturation threshold `(n^2 - n - 1) / n`.
///
/// Integer-round convention: the recursion is evaluated at round
/// `floor(k_hat) - 1`, the last full round strictly inside the window.
pub fn tightness_check(n: usize) -> Result<bool> {
    if n < 4 {
        return Err(Error::Domain(format!(
            "tightness check undefined for n={n} (needs n >= 4)"
        )));
    }
    let k_hat = 2.0 + phi(n)?;
    let round = k_hat.floor() as usize - 1;
    let curve = expected_knowledge_curve(n, round)?;
    let nf = n as f64;
    let threshold = (nf * nf - nf - 1.0) / nf;
    Ok(curve[round] < threshold)
}

/// Everything the bounds CLI and sweep attach per network size.
#[derive(Clone, PartialEq, Debug)]
pub struct BoundsReport {
    pub n: usize,
    pub phi: f64,
    pub latest_window: (f64, f64),
    pub earliest_window: (f64, f64),
    pub min_fks_time: usize,
    pub e_curve: Vec<(usize, f64)>,
}

pub fn bounds_report(n: usize, k_max: usize) -> Result<BoundsReport> {
    let windows = bound_windows(n)?;
    let curve = expected_knowledge_curve(n, k_max)?;
    Ok(BoundsReport {
        n,
        phi: windows.phi,
        latest_window: windows.latest,
        earliest_window: windows.earliest,
        min_fks_time: min_fks_time(n),
        e_curve: curve.into_iter().enumerate().collect(),
    })
}
