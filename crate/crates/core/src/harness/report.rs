use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{hex, ExperimentConfig};
use crate::error::Result;

pub const CSV_HEADER: &str = "sample,numerator,denominator,ratio";

/// One ensemble member: `ratio = numerator / denominator`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub sample: u64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Results at one modulus N.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    #[serde(rename = "N")]
    pub n: usize,
    pub rows: Vec<Row>,
    /// Samples with both sides zero.
    pub skipped: Vec<u64>,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub min_ratio: f64,
    /// Certificates and auxiliary constants computed for this N.
    pub constants: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(n: usize, mut rows: Vec<Row>, skipped: Vec<u64>) -> Self {
        rows.sort_by_key(|r| r.sample);
        let mut ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let (max, min, median) = if ratios.is_empty() {
            (f64::NAN, f64::NAN, f64::NAN)
        } else {
            let k = ratios.len();
            let median = if k % 2 == 1 {
                ratios[k / 2]
            } else {
                0.5 * (ratios[k / 2 - 1] + ratios[k / 2])
            };
            (ratios[k - 1], ratios[0], median)
        };
        RunReport {
            n,
            rows,
            skipped,
            max_ratio: max,
            median_ratio: median,
            min_ratio: min,
            constants: BTreeMap::new(),
        }
    }

    pub fn constant(&mut self, key: &str, value: f64) {
        self.constants.insert(key.to_string(), value);
    }
}

/// Outcome of one precondition of the theorem behind an experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub id: u8,
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub version: String,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub runs: Vec<RunReport>,
    /// `max_ratio(N_{k+1}) / max_ratio(N_k)`.
    pub growth: Vec<f64>,
    pub budget: f64,
    pub hypotheses: Vec<Hypothesis>,
    pub pass: bool,
    pub notes: Vec<String>,
    /// Seconds; excluded from `hash`.
    pub wall_time: f64,
    /// SHA-256 of the report JSON with `wall_time = 0` and `hash = ""`.
    pub hash: String,
}

impl ExperimentReport {
    /// Applies the growth policy and seals the report.
    pub fn assemble(
        config: &ExperimentConfig,
        runs: Vec<RunReport>,
        hypotheses: Vec<Hypothesis>,
        notes: Vec<String>,
        wall_time: f64,
    ) -> Self {
        let budget = config.tolerances.growth_budget;
        let growth = growth_of(&runs);
        let finite = runs.iter().all(|r| r.rows.iter().all(|w| w.ratio.is_finite()));
        let pass = finite
            && runs.iter().all(|r| !r.rows.is_empty())
            && growth.iter().all(|&g| g < budget)
            && hypotheses.iter().all(|h| h.holds);
        let mut report = ExperimentReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.clone(),
            config_hash: config.hash(),
            runs,
            growth,
            budget,
            hypotheses,
            pass,
            notes,
            wall_time,
            hash: String::new(),
        };
        report.hash = report.compute_hash();
        report
    }

    pub fn compute_hash(&self) -> String {
        let mut sealed = self.clone();
        sealed.wall_time = 0.0;
        sealed.hash = String::new();
        let json = serde_json::to_string(&sealed).expect("report serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }

    /// Recomputes every statistic and the verdict from the stored rows.
    pub fn verify(&self) -> bool {
        let runs: Vec<RunReport> = self
            .runs
            .iter()
            .map(|r| {
                let rows: Vec<Row> = r
                    .rows
                    .iter()
                    .map(|w| Row {
                        ratio: w.numerator / w.denominator,
                        ..*w
                    })
                    .collect();
                let mut fresh = RunReport::new(r.n, rows, r.skipped.clone());
                fresh.constants = r.constants.clone();
                fresh
            })
            .collect();
        let again = ExperimentReport::assemble(
            &self.config,
            runs,
            self.hypotheses.clone(),
            self.notes.clone(),
            self.wall_time,
        );
        same_bits(&again.runs, &self.runs) && again.pass == self.pass && again.hash == self.hash
    }

    pub fn failed_hypotheses(&self) -> Vec<u8> {
        self.hypotheses.iter().filter(|h| !h.holds).map(|h| h.id).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Rows of every run; the sample id encodes `N` in the high 32 bits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for run in &self.runs {
            for r in &run.rows {
                let id = ((run.n as u64) << 32) | r.sample;
                let _ = writeln!(out, "{id},{:e},{:e},{:e}", r.numerator, r.denominator, r.ratio);
            }
        }
        out
    }

    /// Writes `<name>.json` and `<name>.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir)?;
        let stem = serde_json::to_value(self.config.name)?
            .as_str()
            .unwrap_or("report")
            .to_string();
        let json = dir.join(format!("{stem}.json"));
        let csv = dir.join(format!("{stem}.csv"));
        std::fs::write(&json, self.to_json())?;
        std::fs::write(&csv, self.to_csv())?;
        Ok((json, csv))
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for run in &self.runs {
            let _ = writeln!(
                s,
                "N={:<3} samples={:<3} skipped={:<2} max={:.6e} median={:.6e} min={:.6e}",
                run.n,
                run.rows.len(),
                run.skipped.len(),
                run.max_ratio,
                run.median_ratio,
                run.min_ratio
            );
        }
        for h in &self.hypotheses {
            let _ = writeln!(
                s,
                "hypothesis ({}) {}: {} [{}]",
                h.id,
                h.name,
                if h.holds { "ok" } else { "FAILED" },
                h.detail
            );
        }
        let growth: Vec<String> = self.growth.iter().map(|g| format!("{g:.4}")).collect();
        let _ = writeln!(
            s,
            "growth=[{}] budget={} -> {}",
            growth.join(", "),
            self.budget,
            if self.pass { "PASS" } else { "FAIL" }
        );
        let _ = write!(s, "hash={}", self.hash);
        s
    }
}

fn growth_of(runs: &[RunReport]) -> Vec<f64> {
    runs.windows(2)
        .map(|w| w[1].max_ratio / w[0].max_ratio)
        .collect()
}

fn same_bits(a: &[RunReport], b: &[RunReport]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.rows.len() == y.rows.len()
                && x.rows
                    .iter()
                    .zip(&y.rows)
                    .all(|(r, s)| r.ratio.to_bits() == s.ratio.to_bits())
                && x.max_ratio.to_bits() == y.max_ratio.to_bits()
        })
}
