//! Seeded ensemble experiments.
//!
//! Each experiment draws `ensemble` random inputs per modulus `N`, evaluates an
//! upper bound for the left-hand side of an embedding and the quasi-norm on the
//! right-hand side, and records the ratio. An experiment passes when every
//! ratio is finite, every checked hypothesis holds, and the largest ratio grows
//! by less than `growth_budget` between consecutive moduli. Sample `s` always
//! uses the stream `derive_seed(seed, s)`, so reports are reproducible bit for
//! bit and independent of the thread count.

mod config;
mod experiments;
mod report;

use std::time::Instant;

pub use config::{
    ExperimentConfig, ExperimentName, IdealChoice, LatticeEntry, LatticeSpec, Target, Tolerances,
    WeightSpecs,
};
pub use report::{ExperimentReport, Hypothesis, Row, RunReport, CSV_HEADER};

use crate::error::Result;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "TFQ_THREADS";

/// Sizes the global thread pool from `TFQ_THREADS`; later calls are no-ops.
pub fn init_threads() {
    if let Some(k) = std::env::var(THREADS_ENV).ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(k.max(1)).build_global();
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let start = Instant::now();
    let out = match cfg.name {
        ExperimentName::Schatten | ExperimentName::Nuclear => experiments::pseudo(cfg)?,
        ExperimentName::Kernels => experiments::kernels(cfg)?,
        ExperimentName::Minimality | ExperimentName::Maximality => experiments::embedding(cfg)?,
    };
    Ok(ExperimentReport::assemble(
        cfg,
        out.runs,
        out.hypotheses,
        out.notes,
        start.elapsed().as_secs_f64(),
    ))
}

pub fn exp_schatten_pseudo(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment(&with_name(cfg, ExperimentName::Schatten))
}

pub fn exp_nuclear_pseudo(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment(&with_name(cfg, ExperimentName::Nuclear))
}

pub fn exp_kernels(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment(&with_name(cfg, ExperimentName::Kernels))
}

pub fn exp_minimality(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment(&with_name(cfg, ExperimentName::Minimality))
}

pub fn exp_maximality(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    run_experiment(&with_name(cfg, ExperimentName::Maximality))
}

fn with_name(cfg: &ExperimentConfig, name: ExperimentName) -> ExperimentConfig {
    ExperimentConfig {
        name,
        ..cfg.clone()
    }
}
