//! Moderate and submultiplicative weights on finite grids.
//!
//! A [`Weight`] is a total array of positive values over a [`Domain`]. On a
//! cyclic group every positive weight is moderate with *some* constant, so
//! the interesting output is the constant itself: [`moderateness_constant`]
//! returns a [`ModerateCertificate`] carrying the maximizing pair so the
//! value can be replayed.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Domain, Grid, PhasePoint};
use crate::quant::QuantMatrix;
use crate::rng::SplitMix64;

/// Exhaustive search is used while the number of evaluated tuples stays below this.
pub const EXHAUSTIVE_LIMIT: usize = 1 << 16;

/// Number of random tuples drawn above [`EXHAUSTIVE_LIMIT`].
pub const SAMPLE_COUNT: u64 = 1_000_000;

/// Seed used by the sampled searches unless the caller provides one.
pub const DEFAULT_SEED: u64 = 0x7466_715f_7765_6967;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum WeightKind {
    Constant,
    Polynomial(f64),
    Exponential(f64),
    Custom,
}

impl WeightKind {
    /// Value of the standard weight at a point of Euclidean length `m`.
    pub fn eval(&self, m: f64) -> f64 {
        match *self {
            WeightKind::Constant | WeightKind::Custom => 1.0,
            WeightKind::Polynomial(s) => (1.0 + m * m).powf(s / 2.0),
            WeightKind::Exponential(r) => (r * m).exp(),
        }
    }
}

impl FromStr for WeightKind {
    type Err = Error;

    /// `constant`, `polynomial:s` or `exponential:r`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, param) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let bad = || Error::InvalidWeight(format!("cannot parse weight {s:?}"));
        let num = || -> Result<f64> {
            let v: f64 = param.ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad())
            }
        };
        match name {
            "constant" if param.is_none() => Ok(WeightKind::Constant),
            "polynomial" => Ok(WeightKind::Polynomial(num()?)),
            "exponential" => Ok(WeightKind::Exponential(num()?)),
            _ => Err(bad()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    domain: Domain,
    values: Vec<f64>,
    kind: WeightKind,
}

impl Weight {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        Self::with_kind(domain, values, WeightKind::Custom)
    }

    fn with_kind(domain: Domain, values: Vec<f64>, kind: WeightKind) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch {
                expected: domain.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values
            .iter()
            .position(|&v| !(v.is_finite() && v > 0.0 && (1.0 / v).is_finite()))
        {
            return Err(Error::InvalidWeight(format!(
                "value {} at index {i} is not a positive finite number",
                values[i]
            )));
        }
        Ok(Weight {
            domain,
            values,
            kind,
        })
    }

    pub fn constant(domain: Domain) -> Self {
        standard_weight(WeightKind::Constant, domain)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn at(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn is_constant(&self) -> bool {
        self.values.iter().all(|&v| v == self.values[0])
    }

    /// Pointwise `c * w`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Weight::new(self.domain, self.values.iter().map(|v| v * c).collect())
    }

    /// Pointwise reciprocal `1 / w`.
    pub fn reciprocal(&self) -> Self {
        Weight {
            domain: self.domain,
            values: self.values.iter().map(|v| 1.0 / v).collect(),
            kind: match self.kind {
                WeightKind::Constant => WeightKind::Constant,
                WeightKind::Polynomial(s) => WeightKind::Polynomial(-s),
                WeightKind::Exponential(r) => WeightKind::Exponential(-r),
                WeightKind::Custom => WeightKind::Custom,
            },
        }
    }

    /// Tensor product `(w1 (x) w2)(a, b) = w1(a) w2(b)` on the product domain.
    pub fn tensor(&self, other: &Weight) -> Result<Self> {
        let dom = self.domain.product(&other.domain)?;
        let m = other.values.len();
        Weight::new(
            dom,
            (0..dom.len())
                .map(|i| self.values[i / m] * other.values[i % m])
                .collect(),
        )
    }

    /// Restriction to the sub-lattice `{(j a, k b)}` of a phase-space weight on `grid`.
    pub fn restrict_to_lattice(&self, grid: &Grid, points: &[PhasePoint]) -> Result<Vec<f64>> {
        if self.domain != grid.phase_domain() {
            return Err(Error::GridMismatch(
                "weight does not live on the phase space of this grid".into(),
            ));
        }
        Ok(points.iter().map(|p| self.values[p.phase_index(grid)]).collect())
    }

    /// Tensor product of two phase-space weights `v1(x1, xi1) v2(x2, xi2)` laid out on
    /// the phase space of `Z_N^2`, whose coordinates are ordered `(x1, x2, xi1, xi2)`.
    pub fn phase_tensor(v1: &Weight, v2: &Weight) -> Result<Self> {
        let n = v1.domain.n();
        if v1.domain != Domain::new(n, 2)? || v2.domain != v1.domain {
            return Err(Error::GridMismatch(
                "phase tensor needs two weights on the phase space of Z_N".into(),
            ));
        }
        let dom = Domain::new(n, 4)?;
        Weight::new(
            dom,
            (0..dom.len())
                .map(|i| {
                    let c = dom.unravel(i);
                    v1.values[c[0] * n + c[2]] * v2.values[c[1] * n + c[3]]
                })
                .collect(),
        )
    }
}

/// `constant -> 1`, `polynomial(s) -> (1 + |x|^2)^{s/2}`, `exponential(r) -> e^{r |x|}`,
/// where `|x|` is the Euclidean length of the symmetric representative.
pub fn standard_weight(kind: WeightKind, domain: Domain) -> Weight {
    let values = (0..domain.len())
        .map(|i| {
            kind.eval(domain.magnitude(i))
        })
        .collect();
    Weight {
        domain,
        values,
        kind,
    }
}

/// Smallest `C` with `lhs <= C * rhs` over the searched tuples, and where it is attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModerateCertificate {
    pub constant: f64,
    /// Linear indices of the maximizing tuple.
    pub witness: Vec<usize>,
    /// `true` when every tuple was checked; otherwise `constant` is a sampled lower estimate.
    pub exhaustive: bool,
    pub evaluated: u64,
    pub seed: u64,
}

struct Search {
    best: f64,
    witness: Vec<usize>,
    evaluated: u64,
}

impl Search {
    fn new(arity: usize) -> Self {
        Search {
            best: f64::NEG_INFINITY,
            witness: vec![0; arity],
            evaluated: 0,
        }
    }

    #[inline]
    fn offer(&mut self, ratio: f64, tuple: &[usize]) {
        self.evaluated += 1;
        if ratio > self.best {
            self.best = ratio;
            self.witness.copy_from_slice(tuple);
        }
    }

    fn finish(self, exhaustive: bool, seed: u64) -> ModerateCertificate {
        ModerateCertificate {
            constant: self.best,
            witness: self.witness,
            exhaustive,
            evaluated: self.evaluated,
            seed,
        }
    }
}

fn check_same_domain(a: &Weight, b: &Weight) -> Result<()> {
    if a.domain != b.domain {
        return Err(Error::GridMismatch(format!(
            "weights on {:?} and {:?}",
            a.domain, b.domain
        )));
    }
    Ok(())
}

/// `C = max_{x,y} w(x + y) / (w(x) v(y))`.
pub fn moderateness_constant(w: &Weight, v: &Weight) -> Result<ModerateCertificate> {
    moderateness_constant_seeded(w, v, DEFAULT_SEED)
}

pub fn moderateness_constant_seeded(
    w: &Weight,
    v: &Weight,
    seed: u64,
) -> Result<ModerateCertificate> {
    check_same_domain(w, v)?;
    let dom = w.domain;
    let len = dom.len();
    let mut search = Search::new(2);
    let eval = |x: usize, y: usize, s: &mut Search| {
        let r = w.values[dom.add(x, y)] / (w.values[x] * v.values[y]);
        s.offer(r, &[x, y]);
    };
    if len.saturating_mul(len) <= EXHAUSTIVE_LIMIT {
        for x in 0..len {
            for y in 0..len {
                eval(x, y, &mut search);
            }
        }
        Ok(search.finish(true, seed))
    } else {
        let mut rng = SplitMix64::new(seed);
        for _ in 0..SAMPLE_COUNT {
            let x = rng.below(len);
            let y = rng.below(len);
            eval(x, y, &mut search);
        }
        Ok(search.finish(false, seed))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubmultiplicativityReport {
    /// `v(-x) == v(x)` for every `x` (exact comparison).
    pub even: bool,
    /// First `x` with `v(-x) != v(x)`, if any.
    pub evenness_violation: Option<usize>,
    pub certificate: ModerateCertificate,
}

/// Evenness check plus `moderateness_constant(v, v)`. Non-even input is flagged, not rejected.
pub fn submultiplicativity_check(v: &Weight) -> Result<SubmultiplicativityReport> {
    let dom = v.domain;
    let violation = (0..dom.len()).find(|&x| v.values[dom.neg(x)] != v.values[x]);
    Ok(SubmultiplicativityReport {
        even: violation.is_none(),
        evenness_violation: violation,
        certificate: moderateness_constant(v, v)?,
    })
}

/// `w_X(y, eta) = w(y - x, eta - xi)` for a weight on the phase space of `grid`.
pub fn shifted_weight(w: &Weight, grid: &Grid, at: PhasePoint) -> Result<Weight> {
    if w.domain != grid.phase_domain() {
        return Err(Error::GridMismatch(
            "shifted_weight needs a weight on the phase space of the grid".into(),
        ));
    }
    let shift = at.phase_index(grid);
    let dom = w.domain;
    Ok(Weight {
        domain: dom,
        values: (0..dom.len()).map(|p| w.values[dom.sub(p, shift)]).collect(),
        kind: w.kind,
    })
}

/// `w_A(x, xi, eta, y) = w(x + A y, xi + A^* eta, eta, y)` on `(Z_N^{2d})^2`.
pub fn weight_transform_a(w: &Weight, a: &QuantMatrix) -> Result<Weight> {
    let dom = w.domain;
    if dom.dims() % 4 != 0 {
        return Err(Error::GridMismatch(
            "weight transform needs a weight on (Z_N^{2d})^2".into(),
        ));
    }
    let d = dom.dims() / 4;
    let sub = Domain::new(dom.n(), d)?;
    let a = a.resolve(sub)?;
    let m = sub.len();
    let values = (0..dom.len())
        .map(|i| {
            let (x, xi, eta, y) = split4(i, m);
            let x2 = sub.add(x, a.apply(y));
            let xi2 = sub.add(xi, a.apply_transpose(eta));
            w.values[join4(x2, xi2, eta, y, m)]
        })
        .collect();
    Ok(Weight {
        domain: dom,
        values,
        kind: w.kind,
    })
}

#[inline]
pub(crate) fn split4(i: usize, m: usize) -> (usize, usize, usize, usize) {
    (i / (m * m * m), (i / (m * m)) % m, (i / m) % m, i % m)
}

#[inline]
pub(crate) fn join4(a: usize, b: usize, c: usize, d: usize, m: usize) -> usize {
    ((a * m + b) * m + c) * m + d
}

/// Smallest `C` with
/// `w2(x, xi) / w1(y, eta) <= C * w0(x + A(y - x), eta + A^*(xi - eta), xi - eta, y - x)`.
pub fn omega0_compatibility(
    w1: &Weight,
    w2: &Weight,
    w0: &Weight,
    a: &QuantMatrix,
) -> Result<ModerateCertificate> {
    omega0_compatibility_seeded(w1, w2, w0, a, DEFAULT_SEED)
}

pub fn omega0_compatibility_seeded(
    w1: &Weight,
    w2: &Weight,
    w0: &Weight,
    a: &QuantMatrix,
    seed: u64,
) -> Result<ModerateCertificate> {
    check_same_domain(w1, w2)?;
    let pd = w1.domain;
    if pd.dims() % 2 != 0 || w0.domain.dims() != 2 * pd.dims() || w0.domain.n() != pd.n() {
        return Err(Error::GridMismatch(
            "w1, w2 must live on (Z_N^d)^2 and w0 on (Z_N^{2d})^2".into(),
        ));
    }
    let sub = Domain::new(pd.n(), pd.dims() / 2)?;
    let a = a.resolve(sub)?;
    let m = sub.len();
    let mut search = Search::new(4);
    let eval = |x: usize, xi: usize, y: usize, eta: usize, s: &mut Search| {
        let ymx = sub.sub(y, x);
        let ximeta = sub.sub(xi, eta);
        let p0 = sub.add(x, a.apply(ymx));
        let p1 = sub.add(eta, a.apply_transpose(ximeta));
        let rhs = w0.values[join4(p0, p1, ximeta, ymx, m)];
        let lhs = w2.values[x * m + xi] / w1.values[y * m + eta];
        s.offer(lhs / rhs, &[x, xi, y, eta]);
    };
    if m.pow(4) <= EXHAUSTIVE_LIMIT {
        for x in 0..m {
            for xi in 0..m {
                for y in 0..m {
                    for eta in 0..m {
                        eval(x, xi, y, eta, &mut search);
                    }
                }
            }
        }
        Ok(search.finish(true, seed))
    } else {
        let mut rng = SplitMix64::new(seed);
        for _ in 0..SAMPLE_COUNT {
            let t = [rng.below(m), rng.below(m), rng.below(m), rng.below(m)];
            eval(t[0], t[1], t[2], t[3], &mut search);
        }
        Ok(search.finish(false, seed))
    }
}

#[derive(Serialize, Deserialize)]
struct DomainJson {
    #[serde(rename = "N")]
    n: usize,
    d: usize,
}

#[derive(Serialize, Deserialize)]
struct WeightJson {
    grid: DomainJson,
    kind: String,
    #[serde(default)]
    param: f64,
    values: Vec<f64>,
}

impl Serialize for Weight {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (kind, param) = match self.kind {
            WeightKind::Constant => ("constant", 0.0),
            WeightKind::Polynomial(p) => ("polynomial", p),
            WeightKind::Exponential(p) => ("exponential", p),
            WeightKind::Custom => ("custom", 0.0),
        };
        WeightJson {
            grid: DomainJson {
                n: self.domain.n(),
                d: self.domain.dims(),
            },
            kind: kind.into(),
            param,
            values: self.values.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = WeightJson::deserialize(d)?;
        let dom = Domain::new(raw.grid.n, raw.grid.d).map_err(D::Error::custom)?;
        let kind = match raw.kind.as_str() {
            "constant" => WeightKind::Constant,
            "polynomial" => WeightKind::Polynomial(raw.param),
            "exponential" => WeightKind::Exponential(raw.param),
            "custom" => WeightKind::Custom,
            other => return Err(D::Error::custom(format!("unknown weight kind {other:?}"))),
        };
        let values = if raw.values.is_empty() && kind != WeightKind::Custom {
            standard_weight(kind, dom).values
        } else {
            raw.values
        };
        Weight::with_kind(dom, values, kind).map_err(D::Error::custom)
    }
}
