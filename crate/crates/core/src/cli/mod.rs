//! Batch front end: JSON run configs in, deterministic JSON or CSV reports out.

mod config;
mod run;

pub use config::{
    parse_config, BundleConfig, Coeff, Context, FieldConfig, Format, OneOrMany, Params, RunConfig,
    Task, DEFAULT_BUDGET, DEFAULT_PRECISION, DEFAULT_TRUNCATION,
};
pub use run::{exit_code, render, rows_csv, run_report, Outcome};
