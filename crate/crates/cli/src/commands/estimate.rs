use std::str::FromStr;

use clap::{Args, ValueEnum};
use codashrink::shrinkage::{exp_shrinkage_optimal_with, shrinkage_optimal, VarianceForm};
use codashrink::simplex::{generalized_power_transform_on_support, m_geodesic_point};
use codashrink::Composition;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::input::{as_counts, read_matrix, read_target, InputArgs};
use crate::output::{Cell, OutputArgs, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Empirical,
    /// Mixture shrinkage `lambda target + (1 - lambda) q_hat`.
    Shrink,
    /// Exponential shrinkage `target^(1-beta) q_hat^beta` on the nonzero parts.
    Expshrink,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VarianceArg {
    Delta,
    Printed,
}

impl From<VarianceArg> for VarianceForm {
    fn from(v: VarianceArg) -> Self {
        match v {
            VarianceArg::Delta => VarianceForm::DeltaMethod,
            VarianceArg::Printed => VarianceForm::Printed,
        }
    }
}

/// `auto` or a fixed value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Weight {
    Auto,
    Fixed(f64),
}

impl FromStr for Weight {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "auto" {
            return Ok(Weight::Auto);
        }
        match s.parse::<f64>() {
            Ok(v) if (0.0..=1.0).contains(&v) => Ok(Weight::Fixed(v)),
            _ => Err(format!("expected `auto` or a number in [0, 1], got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub method: Method,
    /// `uniform` or a file with one row of target weights.
    #[arg(long, default_value = "uniform")]
    pub target: String,
    /// Target weight for `shrink`.
    #[arg(long, default_value = "auto")]
    pub lambda: Weight,
    /// Data weight for `expshrink`.
    #[arg(long, default_value = "auto")]
    pub beta: Weight,
    /// Variance approximation used by automatic `beta`.
    #[arg(long, value_enum, default_value_t = VarianceArg::Delta)]
    pub variance: VarianceArg,
    #[command(flatten)]
    pub output: OutputArgs,
}

struct RowEstimate {
    estimate: Composition,
    weight: Option<f64>,
    clamped: bool,
}

fn estimate_row(
    row: &[f64],
    args: &EstimateArgs,
    target: &Composition,
) -> Result<RowEstimate, String> {
    let q_hat = Composition::closure(row).map_err(|e| e.to_string())?;
    let fixed = |estimate, w| RowEstimate {
        estimate,
        weight: Some(w),
        clamped: false,
    };
    let counts = || {
        as_counts(row).ok_or_else(|| {
            "non-integer counts; automatic weights need integer counts (pass a fixed weight)"
                .to_string()
        })
    };
    let r = match (args.method, args.lambda, args.beta) {
        (Method::Empirical, _, _) => RowEstimate {
            estimate: q_hat,
            weight: None,
            clamped: false,
        },
        (Method::Shrink, Weight::Fixed(l), _) => fixed(
            m_geodesic_point(target, &q_hat, l).map_err(|e| e.to_string())?,
            l,
        ),
        (Method::Shrink, Weight::Auto, _) => {
            let s = shrinkage_optimal(&counts()?, target).map_err(|e| e.to_string())?;
            RowEstimate {
                estimate: s.estimate,
                weight: Some(s.weight),
                clamped: s.weight_was_clamped,
            }
        }
        (Method::Expshrink, _, Weight::Fixed(b)) => fixed(
            generalized_power_transform_on_support(&q_hat, target, b).map_err(|e| e.to_string())?,
            b,
        ),
        (Method::Expshrink, _, Weight::Auto) => {
            let s = exp_shrinkage_optimal_with(&counts()?, target, args.variance.into())
                .map_err(|e| e.to_string())?;
            RowEstimate {
                estimate: s.estimate,
                weight: Some(s.weight),
                clamped: s.weight_was_clamped,
            }
        }
    };
    Ok(r)
}

pub fn run(args: &EstimateArgs) -> CliResult<()> {
    let m = read_matrix(&args.input)?;
    let target = read_target(&args.target, m.dim())?;

    let results: Vec<_> = m
        .rows
        .par_iter()
        .map(|row| estimate_row(row, args, &target))
        .collect();

    let mut columns = Vec::new();
    if m.row_ids.is_some() {
        columns.push("id".to_string());
    }
    columns.extend(m.names());
    columns.extend(["weight".to_string(), "clamped".to_string()]);
    let mut table = Table::new(columns);
    for (i, result) in results.into_iter().enumerate() {
        let r = result.map_err(|e| CliError::domain(format!("{}: {e}", m.row_label(i))))?;
        let mut cells = Vec::new();
        if let Some(ids) = &m.row_ids {
            cells.push(Cell::Text(ids[i].clone()));
        }
        cells.extend(r.estimate.parts().iter().map(|&v| Cell::Num(v)));
        cells.push(r.weight.map_or(Cell::Empty, Cell::Num));
        cells.push(Cell::Bool(r.clamped));
        table.push(cells);
    }
    table.write(args.output.format, args.output.open()?)
}
