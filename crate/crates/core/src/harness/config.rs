use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quant::QuantMatrix;
use crate::spaces::Exponent;
use crate::weights::WeightKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentName {
    Schatten,
    Nuclear,
    Kernels,
    Minimality,
    Maximality,
}

/// Quasi-norm `B` compared against `M^p_{(w)}` by the embedding experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    /// `M^p_{(w)}` itself.
    Modulation,
    /// Greedy upper bound for the atomic quasi-norm with atom `psi` = Gaussian.
    Atomic,
    /// `l^{p,q}` norm of the dual-window lattice coefficients.
    Lattice,
    /// `M^p_{(w)}` with a narrower Gaussian window.
    Window,
    /// Weighted Schatten-`p` quasi-norm of a matrix against `U^p`.
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdealChoice {
    Schatten,
    Nuclear,
}

fn constant() -> WeightKind {
    WeightKind::Constant
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpecs {
    #[serde(default = "constant")]
    pub omega: WeightKind,
    #[serde(default = "constant")]
    pub v: WeightKind,
    #[serde(default = "constant")]
    pub omega0: WeightKind,
    #[serde(default = "constant")]
    pub omega1: WeightKind,
    #[serde(default = "constant")]
    pub omega2: WeightKind,
}

impl Default for WeightSpecs {
    fn default() -> Self {
        WeightSpecs {
            omega: WeightKind::Constant,
            v: WeightKind::Constant,
            omega0: WeightKind::Constant,
            omega1: WeightKind::Constant,
            omega2: WeightKind::Constant,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeEntry {
    #[serde(rename = "N", default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub a: usize,
    pub b: usize,
}

/// One `(a, b)` for every N, or a list keyed by N.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeSpec {
    Single(LatticeEntry),
    PerN(Vec<LatticeEntry>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Largest accepted ratio between the max ratios at consecutive N.
    #[serde(default = "default_budget")]
    pub growth_budget: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atomic_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_atoms: Option<usize>,
    /// Relative slack for the empirical shift and triangle checks.
    #[serde(default = "default_check_tol")]
    pub check_tol: f64,
}

fn default_budget() -> f64 {
    2.0
}

fn default_check_tol() -> f64 {
    1e-9
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            growth_budget: default_budget(),
            atomic_tol: None,
            max_atoms: None,
            check_tol: default_check_tol(),
        }
    }
}

fn default_ns() -> Vec<usize> {
    vec![8, 16]
}

fn default_d() -> usize {
    1
}

fn default_ensemble() -> usize {
    16
}

/// Experiment parameters as read from JSON.
///
/// ```json
/// {"name": "schatten", "N": [8, 16], "seed": 7, "ensemble": 16,
///  "p": "2", "q": "2", "r": "2/3",
///  "weights": {"omega1": {"kind": "polynomial", "param": 1.0}}}
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: ExperimentName,
    #[serde(rename = "N", default = "default_ns")]
    pub ns: Vec<usize>,
    #[serde(default = "default_d")]
    pub d: usize,
    pub seed: u64,
    #[serde(default = "default_ensemble")]
    pub ensemble: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<Exponent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Exponent>,
    #[serde(default)]
    pub weights: WeightSpecs,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<LatticeSpec>,
    #[serde(default = "QuantMatrix::zero")]
    pub quant: QuantMatrix,
    /// `(d1, d2)`: kernels map functions on `Z_N^{d1}` to functions on `Z_N^{d2}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kernel_dims: Option<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ideal: Option<IdealChoice>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

impl ExperimentConfig {
    /// Defaults for everything but the name and seed.
    pub fn new(name: ExperimentName, seed: u64) -> Self {
        ExperimentConfig {
            name,
            ns: default_ns(),
            d: default_d(),
            seed,
            ensemble: default_ensemble(),
            p: None,
            q: None,
            r: None,
            weights: WeightSpecs::default(),
            lattice: None,
            quant: QuantMatrix::zero(),
            kernel_dims: None,
            target: None,
            ideal: None,
            tolerances: Tolerances::default(),
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        hex(&Sha256::digest(self.to_json().as_bytes()))
    }

    /// `(p, q, r)` with the per-experiment defaults filled in.
    pub fn exponents(&self) -> (Exponent, Exponent, Exponent) {
        let two = Exponent::two();
        let (p, q, r) = match self.name {
            ExperimentName::Schatten | ExperimentName::Kernels => {
                (two, two, Exponent::new(2, 3).expect("valid"))
            }
            ExperimentName::Nuclear => (Exponent::one(), Exponent::one(), Exponent::one()),
            ExperimentName::Minimality => (Exponent::half(), Exponent::half(), Exponent::half()),
            ExperimentName::Maximality => (Exponent::one(), Exponent::one(), Exponent::one()),
        };
        (self.p.unwrap_or(p), self.q.or(self.p).unwrap_or(q), self.r.unwrap_or(r))
    }

    pub fn target(&self) -> Target {
        self.target.unwrap_or(match self.name {
            ExperimentName::Maximality => Target::Modulation,
            _ => Target::Atomic,
        })
    }

    pub fn kernel_dims(&self) -> (usize, usize) {
        self.kernel_dims.unwrap_or((self.d, self.d))
    }

    /// Lattice for modulus `n`. Without an explicit choice: `a = N/4`, `b = 2`,
    /// which keeps the redundancy per dimension at 2.
    pub fn lattice_for(&self, n: usize) -> Result<(usize, usize)> {
        match &self.lattice {
            Some(LatticeSpec::Single(e)) => Ok((e.a, e.b)),
            Some(LatticeSpec::PerN(list)) => list
                .iter()
                .find(|e| e.n == Some(n))
                .map(|e| (e.a, e.b))
                .ok_or_else(|| Error::Config(format!("no lattice given for N = {n}"))),
            None if n % 4 == 0 && n >= 8 => Ok((n / 4, 2)),
            None => Err(Error::Config(format!(
                "no default lattice for N = {n}; give \"lattice\" explicitly"
            ))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ns.is_empty() {
            return Err(Error::Config("\"N\" must list at least one modulus".into()));
        }
        if self.ensemble == 0 {
            return Err(Error::Config("ensemble must be positive".into()));
        }
        if !(1..=2).contains(&self.d) {
            return Err(Error::Config(format!("d = {} not supported", self.d)));
        }
        if let Some((d1, d2)) = self.kernel_dims {
            if !(1..=2).contains(&d1) || !(1..=2).contains(&d2) {
                return Err(Error::Config(format!("kernel dims ({d1}, {d2}) outside 1..=2")));
            }
        }
        if !(self.tolerances.growth_budget > 1.0) {
            return Err(Error::Config("growth_budget must exceed 1".into()));
        }
        for &n in &self.ns {
            if n < 2 {
                return Err(Error::Config(format!("N = {n} too small")));
            }
        }
        Ok(())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}
