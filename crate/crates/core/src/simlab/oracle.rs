use rand::Rng;
use serde::{Deserialize, Serialize};

use super::sampling::sample_multinomial;
use crate::error::{Error, Result};
use crate::simplex::{clr_unchecked, Composition};

/// Monte Carlo moments of `clr(q_hat)` over multinomial draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McMoments {
    pub mean: Vec<f64>,
    pub variance: Vec<f64>,
    /// Standard error of each mean, `sqrt(variance / replicates_used)`.
    pub std_error: Vec<f64>,
    pub replicates_used: usize,
    pub rejected_zero_draws: usize,
}

/// Per-part mean and variance of `clr(n / n_total)` for `n ~ Mult(n_total, q)`.
///
/// Draws containing a zero count have no clr image; they are rejected and
/// counted, so the estimate is conditional on an interior observed point.
pub fn mc_clr_moments<R: Rng + ?Sized>(
    q: &Composition,
    n_total: u64,
    replicates: usize,
    rng: &mut R,
) -> Result<McMoments> {
    q.check_interior()?;
    if n_total == 0 {
        return Err(Error::InsufficientData(
            "sample size must be at least 1".into(),
        ));
    }
    let d = q.dim();
    let mut mean = vec![0.0; d];
    let mut m2 = vec![0.0; d];
    let mut used = 0usize;
    let mut rejected = 0usize;
    for _ in 0..replicates {
        let counts = sample_multinomial(q, n_total, rng);
        if counts.counts().contains(&0) {
            rejected += 1;
            continue;
        }
        used += 1;
        let c = clr_unchecked(&counts.as_f64());
        // Welford
        for j in 0..d {
            let delta = c[j] - mean[j];
            mean[j] += delta / used as f64;
            m2[j] += delta * (c[j] - mean[j]);
        }
    }
    if used == 0 {
        return Err(Error::OracleStarved { replicates });
    }
    let variance: Vec<f64> = if used > 1 {
        m2.iter().map(|s| s / (used - 1) as f64).collect()
    } else {
        vec![0.0; d]
    };
    let std_error = variance.iter().map(|v| (v / used as f64).sqrt()).collect();
    Ok(McMoments {
        mean,
        variance,
        std_error,
        replicates_used: used,
        rejected_zero_draws: rejected,
    })
}
