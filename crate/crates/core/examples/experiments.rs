//! Seeded ensemble experiments with the growth policy, run from code.
//!
//! ```bash
//! cargo run -p tfq --release --example experiments
//! ```

use tfq::harness::{run_experiment, ExperimentConfig, ExperimentName, Target};
use tfq::weights::WeightKind;

fn main() -> tfq::Result<()> {
    let mut schatten = ExperimentConfig::new(ExperimentName::Schatten, 7);
    schatten.ns = vec![8, 12, 16];
    schatten.ensemble = 8;
    let report = run_experiment(&schatten)?;
    println!("schatten\n{}\n", report.summary());

    let mut minimality = ExperimentConfig::from_json(
        r#"{"name": "minimality", "seed": 3, "N": [8, 16], "ensemble": 8, "target": "lattice"}"#,
    )?;
    println!("minimality (lattice)\n{}\n", run_experiment(&minimality)?.summary());

    minimality.target = Some(Target::Modulation);
    minimality.weights.omega = WeightKind::Exponential(1.0);
    let report = run_experiment(&minimality)?;
    println!("minimality with a non-moderate weight\n{}", report.summary());
    println!("failed hypotheses: {:?}", report.failed_hypotheses());
    Ok(())
}
