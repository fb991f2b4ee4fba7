//! Simulation lab: seeded sampling, a Monte Carlo moment oracle and the
//! estimator benchmark.

pub mod bench;
pub mod oracle;
pub mod rng;
pub mod sampling;

pub use bench::{
    format_float, run_benchmark, scenario_truth, summarize_quartiles, write_records_csv,
    write_summary_table, Estimator, QuartileSummary, SimConfig, SimRecord, SimScenario, CSV_HEADER,
};
pub use oracle::{mc_clr_moments, McMoments};
pub use rng::{oracle_stream, sample_stream, stream_rng, truth_stream, SimRng};
pub use sampling::{sample_dirichlet, sample_multinomial, sample_poisson_vector};
