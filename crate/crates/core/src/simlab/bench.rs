//! Monte Carlo comparison of the empirical, shrinkage and exponential
//! shrinkage estimators on multinomial samples with essential zeros.

use std::collections::HashMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::{sample_stream, truth_stream, MAX_SCENARIOS, MAX_SIZES};
use super::sampling::{sample_dirichlet, sample_multinomial};
use crate::error::{Error, Result};
use crate::infogeo::DirichletParams;
use crate::shrinkage::{
    empirical_estimate, exp_shrinkage_optimal_with, shrinkage_optimal, sq_error_loss, VarianceForm,
};
use crate::simplex::Composition;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimScenario {
    pub label: String,
    pub dim: usize,
    /// Number of parts with nonzero truth; the remaining parts are exact zeros.
    pub support_size: usize,
    /// Symmetric Dirichlet concentration on the support.
    pub dirichlet_alpha0: f64,
}

impl SimScenario {
    pub fn new(label: impl Into<String>, dim: usize, support_size: usize, alpha0: f64) -> Self {
        Self {
            label: label.into(),
            dim,
            support_size,
            dirichlet_alpha0: alpha0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub scenarios: Vec<SimScenario>,
    pub sample_sizes: Vec<u64>,
    pub replicates: u32,
    pub seed: u64,
    #[serde(default)]
    pub variance_form: VarianceForm,
}

impl Default for SimConfig {
    /// Three scenarios of increasing sparsity at `D = 100`, sample sizes
    /// `D/5, D, 5D`, 500 replicates.
    fn default() -> Self {
        Self {
            scenarios: vec![
                SimScenario::new("A", 100, 100, 1.0),
                SimScenario::new("B", 100, 50, 0.5),
                SimScenario::new("C", 100, 20, 0.5),
            ],
            sample_sizes: vec![20, 100, 500],
            replicates: 500,
            seed: 20240917,
            variance_form: VarianceForm::DeltaMethod,
        }
    }
}

fn config_error(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        reason: reason.into(),
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scenarios.is_empty() {
            return Err(config_error(
                "scenarios",
                "at least one scenario is required",
            ));
        }
        if self.scenarios.len() > MAX_SCENARIOS {
            return Err(config_error(
                "scenarios",
                format!("at most {MAX_SCENARIOS} scenarios"),
            ));
        }
        for (i, s) in self.scenarios.iter().enumerate() {
            if s.support_size < 2 {
                return Err(config_error(
                    format!("scenarios[{i}].support_size"),
                    "must be at least 2",
                ));
            }
            if s.support_size > s.dim {
                return Err(config_error(
                    format!("scenarios[{i}].support_size"),
                    format!("must not exceed dim = {}", s.dim),
                ));
            }
            if !(s.dirichlet_alpha0.is_finite() && s.dirichlet_alpha0 > 0.0) {
                return Err(config_error(
                    format!("scenarios[{i}].dirichlet_alpha0"),
                    "must be positive",
                ));
            }
            if s.label.contains([',', '"', '\n', '\r']) {
                return Err(config_error(
                    format!("scenarios[{i}].label"),
                    "must not contain commas, quotes or newlines",
                ));
            }
        }
        if self.sample_sizes.is_empty() {
            return Err(config_error(
                "sample_sizes",
                "at least one sample size is required",
            ));
        }
        if self.sample_sizes.len() > MAX_SIZES {
            return Err(config_error(
                "sample_sizes",
                format!("at most {MAX_SIZES} sizes"),
            ));
        }
        if let Some(n) = self.sample_sizes.iter().find(|&&n| n < 2) {
            return Err(config_error(
                "sample_sizes",
                format!("sizes must be at least 2, got {n}"),
            ));
        }
        if self.replicates == 0 {
            return Err(config_error("replicates", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Empirical,
    Shrinkage,
    ExpShrinkage,
}

impl Estimator {
    pub const ALL: [Estimator; 3] = [
        Estimator::Empirical,
        Estimator::Shrinkage,
        Estimator::ExpShrinkage,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Estimator::Empirical => "empirical",
            Estimator::Shrinkage => "shrinkage",
            Estimator::ExpShrinkage => "exp_shrinkage",
        }
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Estimator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Estimator::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| format!("unknown estimator `{s}`"))
    }
}

/// One benchmark row. `weight` is 0 for the empirical estimator, `lambda`
/// for shrinkage and `beta` for exponential shrinkage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimRecord {
    pub scenario: String,
    pub n: u64,
    pub replicate: u32,
    pub estimator: Estimator,
    pub mse: f64,
    pub weight: f64,
}

/// The true composition of a scenario: Dirichlet on the first
/// `support_size` parts, exact zeros elsewhere.
pub fn scenario_truth(seed: u64, index: usize, scenario: &SimScenario) -> Result<Composition> {
    let alpha = DirichletParams::symmetric(scenario.support_size, scenario.dirichlet_alpha0)?;
    let on_support = sample_dirichlet(&alpha, &mut truth_stream(seed, index));
    let mut parts = on_support.into_parts();
    parts.resize(scenario.dim, 0.0);
    Composition::closure(&parts)
}

fn run_replicate(
    cfg: &SimConfig,
    truths: &[Composition],
    scenario: usize,
    size_index: usize,
    replicate: u32,
) -> Result<[SimRecord; 3]> {
    let truth = &truths[scenario];
    let n = cfg.sample_sizes[size_index];
    let mut rng = sample_stream(cfg.seed, scenario, size_index, replicate);
    let counts = sample_multinomial(truth, n, &mut rng);
    let target = Composition::uniform(truth.dim())?;

    let emp = empirical_estimate(&counts)?;
    let sh = shrinkage_optimal(&counts, &target)?;
    let es = exp_shrinkage_optimal_with(&counts, &target, cfg.variance_form)?;

    let label = &cfg.scenarios[scenario].label;
    let record = |estimator, est: &Composition, weight| -> Result<SimRecord> {
        Ok(SimRecord {
            scenario: label.clone(),
            n,
            replicate,
            estimator,
            mse: sq_error_loss(est, truth)?,
            weight,
        })
    };
    Ok([
        record(Estimator::Empirical, &emp, 0.0)?,
        record(Estimator::Shrinkage, &sh.estimate, sh.weight)?,
        record(Estimator::ExpShrinkage, &es.estimate, es.weight)?,
    ])
}

/// Runs every (scenario, sample size, replicate) cell on the current rayon
/// pool. Output is ordered by scenario, size, replicate, estimator and does
/// not depend on the number of threads.
pub fn run_benchmark(cfg: &SimConfig) -> Result<Vec<SimRecord>> {
    cfg.validate()?;
    let truths = cfg
        .scenarios
        .iter()
        .enumerate()
        .map(|(i, s)| scenario_truth(cfg.seed, i, s))
        .collect::<Result<Vec<_>>>()?;
    let tasks: Vec<(usize, usize, u32)> = (0..cfg.scenarios.len())
        .flat_map(|s| {
            (0..cfg.sample_sizes.len())
                .flat_map(move |k| (0..cfg.replicates).map(move |r| (s, k, r)))
        })
        .collect();
    let rows = tasks
        .par_iter()
        .map(|&(s, k, r)| run_replicate(cfg, &truths, s, k, r))
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub const CSV_HEADER: &str = "scenario,n,replicate,estimator,mse,weight";

/// Float rendering with 17 significant digits; parses back exactly.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_records_csv<W: Write>(records: &[SimRecord], mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.scenario,
            r.n,
            r.replicate,
            r.estimator,
            format_float(r.mse),
            format_float(r.weight)
        )?;
    }
    out.flush()
}

/// Five-number summary of the MSE for one (scenario, n, estimator) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuartileSummary {
    pub scenario: String,
    pub n: u64,
    pub estimator: Estimator,
    pub count: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data (`h = (len - 1) p`).
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Groups records by (scenario, n, estimator) in order of first appearance.
pub fn summarize_quartiles(records: &[SimRecord]) -> Result<Vec<QuartileSummary>> {
    if records.is_empty() {
        return Err(Error::DegenerateInput("no records to summarize".into()));
    }
    let mut order: Vec<(String, u64, Estimator)> = Vec::new();
    let mut groups: HashMap<(String, u64, Estimator), Vec<f64>> = HashMap::new();
    for r in records {
        let key = (r.scenario.clone(), r.n, r.estimator);
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(r.mse);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let mut v = groups.remove(&key).unwrap_or_default();
            v.sort_by(f64::total_cmp);
            QuartileSummary {
                count: v.len(),
                min: v[0],
                q1: quantile_sorted(&v, 0.25),
                median: quantile_sorted(&v, 0.5),
                q3: quantile_sorted(&v, 0.75),
                max: v[v.len() - 1],
                scenario: key.0,
                n: key.1,
                estimator: key.2,
            }
        })
        .collect())
}

pub fn write_summary_table<W: Write>(summary: &[QuartileSummary], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "{:<10} {:>6} {:<14} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "scenario", "n", "estimator", "min", "q1", "median", "q3", "max"
    )?;
    for s in summary {
        writeln!(
            out,
            "{:<10} {:>6} {:<14} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            s.scenario, s.n, s.estimator, s.min, s.q1, s.median, s.q3, s.max
        )?;
    }
    Ok(())
}
