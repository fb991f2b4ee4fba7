use clap::Args;
use codashrink::shrinkage::{
    delta_clr_mean, delta_clr_var, delta_clr_var_printed, empirical_estimate,
};
use codashrink::simlab::{mc_clr_moments, oracle_stream};
use codashrink::simplex::clr;
use codashrink::{Composition, CountVector};

use crate::error::{CliError, CliResult};
use crate::input::{composition_from_parts, parse_composition_spec, parse_list};
use crate::output::{Cell, OutputArgs, Table};

#[derive(Debug, Clone, Args)]
#[command(group(clap::ArgGroup::new("point").required(true).args(["q", "counts"])))]
pub struct MomentsArgs {
    /// Reference composition: `uniformD` or comma-separated parts.
    #[arg(long)]
    pub q: Option<String>,
    /// Comma-separated counts; the reference is their closure and `n` their total.
    #[arg(long)]
    pub counts: Option<String>,
    /// Sample size (required with `--q`).
    #[arg(long)]
    pub n: Option<u64>,
    /// Add a Monte Carlo estimate from this many multinomial draws.
    #[arg(long)]
    pub mc: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Close `--q` instead of rejecting it when it does not sum to 1.
    #[arg(long)]
    pub renormalize: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn reference(args: &MomentsArgs) -> CliResult<(Composition, u64)> {
    if let Some(spec) = &args.q {
        let q = parse_composition_spec(spec, args.renormalize)?;
        let n = args
            .n
            .ok_or_else(|| CliError::input("--n is required with --q"))?;
        return Ok((q, n));
    }
    let values = parse_list(args.counts.as_deref().unwrap_or_default())?;
    if values.iter().any(|v| v.fract() != 0.0 || *v < 0.0) {
        return Err(CliError::input("--counts must be nonnegative integers"));
    }
    let counts = CountVector::new(values.iter().map(|&v| v as u64).collect())
        .map_err(|e| CliError::input(e.to_string()))?;
    let q = empirical_estimate(&counts)?;
    let q = composition_from_parts(q.into_parts(), false)?;
    Ok((q, args.n.unwrap_or(counts.total())))
}

pub fn run(args: &MomentsArgs) -> CliResult<()> {
    let (q, n) = reference(args)?;
    if n == 0 {
        return Err(CliError::input("sample size must be at least 1"));
    }
    let c = clr(&q)?;
    let mean = delta_clr_mean(&q, n)?;
    let var = delta_clr_var(&q, n)?;
    let var_printed = delta_clr_var_printed(&q, n)?;
    let mc = match args.mc {
        Some(reps) => Some(mc_clr_moments(
            &q,
            n,
            reps,
            &mut oracle_stream(args.seed, 0),
        )?),
        None => None,
    };

    let mut columns: Vec<String> = ["part", "q", "clr", "mean", "var", "var_printed"]
        .map(String::from)
        .to_vec();
    if mc.is_some() {
        columns.extend(["mc_mean", "mc_var", "mc_se", "mc_used", "mc_rejected"].map(String::from));
    }
    let mut table = Table::new(columns);
    for j in 0..q.dim() {
        let mut row = vec![
            Cell::Int(j as u64 + 1),
            Cell::Num(q.parts()[j]),
            Cell::Num(c.coords()[j]),
            Cell::Num(mean[j]),
            Cell::Num(var[j]),
            Cell::Num(var_printed[j]),
        ];
        if let Some(m) = &mc {
            row.extend([
                Cell::Num(m.mean[j]),
                Cell::Num(m.variance[j]),
                Cell::Num(m.std_error[j]),
                Cell::Int(m.replicates_used as u64),
                Cell::Int(m.rejected_zero_draws as u64),
            ]);
        }
        table.push(row);
    }
    table.write(args.output.format, args.output.open()?)
}
