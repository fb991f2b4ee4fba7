use clap::{Args, ValueEnum};
use codashrink::infogeo::theta_of;
use codashrink::simplex::{clr, generalized_power_transform_on_support};
use codashrink::Composition;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};
use crate::input::{read_matrix, read_target, InputArgs};
use crate::output::{Cell, OutputArgs, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Op {
    /// Centered log-ratio; rows must have no zeros.
    Clr,
    /// Log-ratios against the last part; rows must have no zeros.
    Alr,
    /// `q^beta`, closed; zeros stay zero.
    Power,
    /// `target^(1-beta) q^beta`, closed; zeros stay zero.
    Gpower,
}

#[derive(Debug, Clone, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum)]
    pub op: Op,
    /// Exponent for `power` and `gpower`.
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    /// `uniform` or a file with one row of target weights (`gpower` only).
    #[arg(long, default_value = "uniform")]
    pub target: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn transform_row(
    row: &[f64],
    op: Op,
    beta: f64,
    target: &Composition,
) -> codashrink::Result<Vec<f64>> {
    let q = Composition::closure(row)?;
    match op {
        Op::Clr => Ok(clr(&q)?.into_coords()),
        Op::Alr => Ok(theta_of(&q)?.values().to_vec()),
        Op::Power | Op::Gpower => {
            Ok(generalized_power_transform_on_support(&q, target, beta)?.into_parts())
        }
    }
}

pub fn run(args: &TransformArgs) -> CliResult<()> {
    let beta = match (args.op, args.beta) {
        (Op::Power | Op::Gpower, None) => {
            return Err(CliError::input("--beta is required for power and gpower"))
        }
        (_, Some(b)) if !b.is_finite() => return Err(CliError::input("--beta must be finite")),
        (_, b) => b.unwrap_or(1.0),
    };
    let m = read_matrix(&args.input)?;
    let d = m.dim();
    let target = match args.op {
        Op::Gpower => read_target(&args.target, d)?,
        _ => Composition::uniform(d)?,
    };

    let names = m.names();
    let value_names = match args.op {
        Op::Alr => names[..d - 1].to_vec(),
        _ => names,
    };
    let width = value_names.len();
    let mut columns = Vec::new();
    if m.row_ids.is_some() {
        columns.push("id".to_string());
    }
    columns.extend(value_names);
    columns.push("error".into());

    let results: Vec<_> = m
        .rows
        .par_iter()
        .map(|row| transform_row(row, args.op, beta, &target))
        .collect();

    let mut table = Table::new(columns);
    let mut succeeded = 0;
    for (i, result) in results.into_iter().enumerate() {
        let mut cells = Vec::with_capacity(width + 2);
        if let Some(ids) = &m.row_ids {
            cells.push(Cell::Text(ids[i].clone()));
        }
        match result {
            Ok(values) => {
                succeeded += 1;
                cells.extend(values.into_iter().map(Cell::Num));
                cells.push(Cell::Empty);
            }
            Err(e) => {
                cells.extend(std::iter::repeat_n(Cell::Empty, width));
                cells.push(Cell::Text(e.to_string()));
            }
        }
        table.push(cells);
    }
    table.write(args.output.format, args.output.open()?)?;
    if succeeded == 0 {
        return Err(CliError::domain(format!(
            "all {} rows failed",
            m.rows.len()
        )));
    }
    Ok(())
}
