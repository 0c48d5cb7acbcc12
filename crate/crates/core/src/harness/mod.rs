//! Experiment harness: JSON configs and presets, compiled scheme stepping,
//! Monte Carlo convergence runs, order fits, plot emission and the named
//! verification suites.

mod config;
mod emit;
mod fit;
mod run;
mod simulate;
mod verify;

pub use config::{
    ExperimentConfig, FieldsConfig, FourierConfig, JumpConfig, OutputConfig, SchemeSpec, Setup, TimingConfig, SCHEMA_VERSION,
};
pub use emit::{emit, to_csv, to_gnuplot, to_svg, CSV_COLUMNS};
pub use fit::{fit_points, OrderFit};
pub use run::{run_step, CompiledScheme};
pub use simulate::{
    cpu_crossover, fit_order, simulate_paths, with_workers, Comparison, ConvergenceReport, Point, SchemeReport, WORKERS_ENV,
};
pub use verify::{base_alphabet, run_suite, VerifyOptions, SUITES};
