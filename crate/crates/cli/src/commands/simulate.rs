use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::Args;
use codashrink::simlab::{
    run_benchmark, summarize_quartiles, write_records_csv, write_summary_table, SimConfig,
    SimScenario,
};

use super::estimate::VarianceArg;
use crate::error::{CliError, CliResult};
use crate::output::{Format, OutputArgs};

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// JSON file with the fields of a simulation config; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of parts of a single custom scenario (replaces the scenario list).
    #[arg(long)]
    pub dim: Option<usize>,
    /// Parts with nonzero truth in the custom scenario; defaults to `--dim`.
    #[arg(long, requires = "dim")]
    pub support: Option<usize>,
    /// Symmetric Dirichlet concentration of the custom scenario.
    #[arg(long, requires = "dim", default_value_t = 1.0)]
    pub alpha0: f64,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<u64>>,
    #[arg(long)]
    pub replicates: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Variance approximation for the optimal beta.
    #[arg(long, value_enum)]
    pub variance: Option<VarianceArg>,
    /// Skip the quartile summary.
    #[arg(long)]
    pub quiet: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn build_config(args: &SimulateArgs) -> CliResult<SimConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read `{}`: {e}", path.display())))?;
            serde_json::from_str::<SimConfig>(&text)
                .map_err(|e| CliError::input(format!("config `{}`: {e}", path.display())))?
        }
        None => SimConfig::default(),
    };
    if let Some(dim) = args.dim {
        let support = args.support.unwrap_or(dim);
        cfg.scenarios = vec![SimScenario::new(
            format!("D{dim}_d{support}"),
            dim,
            support,
            args.alpha0,
        )];
    }
    if let Some(sizes) = &args.sizes {
        cfg.sample_sizes = sizes.clone();
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(v) = args.variance {
        cfg.variance_form = v.into();
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let cfg = build_config(args)?;
    let records = run_benchmark(&cfg)?;
    let mut out = args.output.open()?;
    match args.output.format {
        Format::Csv => write_records_csv(&records, &mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &records)
                .map_err(|e| CliError::input(format!("write failed: {e}")))?;
            writeln!(out)?;
            out.flush()?;
        }
    }
    drop(out);
    if !args.quiet {
        let summary = summarize_quartiles(&records)?;
        if args.output.to_stdout() {
            write_summary_table(&summary, io::stderr().lock())?;
        } else {
            write_summary_table(&summary, io::stdout().lock())?;
        }
    }
    Ok(())
}
