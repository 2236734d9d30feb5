//! Experiment configuration, ℏ-ladder runs, rate fits and reports.

mod checks;
mod config;
mod fit;
mod report;
mod run;

pub use checks::{ladder_states, run_check};
pub use config::{
    CheckConfig, EvolutionParams, ExperimentConfig, ExperimentKind, Exponent, GridConfig, InitialData, KernelConfig,
    SlopeBand, SyntheticConfig, CHECK_NAMES,
};
pub use fit::{rate_fit, RateFit};
pub use report::{
    checkpoint_csv, checkpoint_dat, checks_csv, rates_dat, read_report, report_json, summary, write_report,
    CHECKPOINT_CSV, CHECKPOINT_DAT, CHECKS_CSV, RATES_DAT, REPORT_FILE, TIMING_FILE,
};
pub use run::{
    lab_threads, run_experiment, Checkpoint, FitRecord, LadderPoint, LadderRun, PointMetrics, SelfConvergence, SCHEMA,
};
