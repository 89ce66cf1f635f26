//! Operator ideals between weighted sequence spaces.
//!
//! Exact singular values in the weighted `l^2` setting and certified upper
//! bounds elsewhere. Every bound is built from the elementary decomposition
//! `T = sum t(i, j) e_i (x) delta_j`, sorted by `b(i, j) = |t(i, j)| w2(i) / w1(j)`
//! (ties broken by row-major index), so it can be replayed from the report.

pub mod oracle;

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{singular_values, spectral_norm, CMatrix};
use crate::spaces::{lp_weighted_norm, Exponent, MatrixOperator};

pub use oracle::{min_ratio_search, phase_search_norm, sigma2_power_oracle, OracleBound};

/// Relative slack accepted when a certified bound is compared with an exact value.
pub const CERT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "p", rename_all = "lowercase")]
pub enum SpaceKind {
    Linf,
    Lp(Exponent),
}

impl SpaceKind {
    pub fn exponent(&self) -> Exponent {
        match self {
            SpaceKind::Linf => Exponent::Infinite,
            SpaceKind::Lp(p) => *p,
        }
    }
}

/// Weighted sequence space with norm `|| f w ||_{l^p}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub weight: Vec<f64>,
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind, weight: Vec<f64>) -> Result<Self> {
        if let Some(i) = weight.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::InvalidWeight(format!(
                "space weight {} at index {i} is not positive and finite",
                weight[i]
            )));
        }
        Ok(SpaceSpec { kind, weight })
    }

    pub fn linf(weight: Vec<f64>) -> Result<Self> {
        Self::new(SpaceKind::Linf, weight)
    }

    pub fn lp(p: Exponent, weight: Vec<f64>) -> Result<Self> {
        Self::new(SpaceKind::Lp(p), weight)
    }

    pub fn unweighted(kind: SpaceKind, size: usize) -> Self {
        SpaceSpec {
            kind,
            weight: vec![1.0; size],
        }
    }

    pub fn size(&self) -> usize {
        self.weight.len()
    }

    pub fn exponent(&self) -> Exponent {
        self.kind.exponent()
    }

    pub fn is_hilbert(&self) -> bool {
        self.exponent() == Exponent::two()
    }

    pub fn is_banach(&self) -> bool {
        self.exponent().is_banach()
    }

    pub fn norm(&self, f: &[Complex64]) -> Result<f64> {
        lp_weighted_norm(f, self.exponent(), &self.weight)
    }
}

/// `(source, target)` spaces carrying the column and row weights of `op`.
pub fn spaces_of(op: &MatrixOperator, from: SpaceKind, to: SpaceKind) -> (SpaceSpec, SpaceSpec) {
    (
        SpaceSpec {
            kind: from,
            weight: op.w_cols().to_vec(),
        },
        SpaceSpec {
            kind: to,
            weight: op.w_rows().to_vec(),
        },
    )
}

/// Result of the exponent condition `1/r - 1 >= max(1/p - 1, 0) + max(1/q - 1, 0) + 1/q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PqrCheck {
    pub holds: bool,
    pub slack: Rational64,
}

impl PqrCheck {
    pub fn slack_f64(&self) -> f64 {
        *self.slack.numer() as f64 / *self.slack.denom() as f64
    }
}

impl Serialize for PqrCheck {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("PqrCheck", 3)?;
        st.serialize_field("holds", &self.holds)?;
        st.serialize_field("slack", &self.slack.to_string())?;
        st.serialize_field("slack_value", &self.slack_f64())?;
        st.end()
    }
}

/// Exact rational evaluation with `1/inf = 0`.
pub fn pqr_condition(p: Exponent, q: Exponent, r: Exponent) -> PqrCheck {
    let one = Rational64::from_integer(1);
    let pos = |x: Rational64| if x > Rational64::zero() { x } else { Rational64::zero() };
    let slack = r.recip() - one - pos(p.recip() - one) - pos(q.recip() - one) - q.recip();
    PqrCheck {
        holds: slack >= Rational64::zero(),
        slack,
    }
}

fn check_shape(t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Result<()> {
    if t.ncols() != from.size() || t.nrows() != to.size() {
        return Err(Error::LengthMismatch {
            expected: t.nrows() * t.ncols(),
            got: to.size() * from.size(),
        });
    }
    Ok(())
}

/// Singular values of `D_{w2} T D_{w1}^{-1}`: the approximation numbers of `T`
/// from `l^2_{(w1)}` to `l^2_{(w2)}`.
pub fn singular_values_hilbert(t: &CMatrix, w1: &[f64], w2: &[f64]) -> Result<Vec<f64>> {
    if t.ncols() != w1.len() || t.nrows() != w2.len() {
        return Err(Error::LengthMismatch {
            expected: t.nrows() * t.ncols(),
            got: w1.len() * w2.len(),
        });
    }
    let scaled = CMatrix::from_fn(t.nrows(), t.ncols(), |i, j| t[(i, j)] * (w2[i] / w1[j]));
    Ok(singular_values(&scaled))
}

/// Which certified estimate applies to a pair of spaces.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Route {
    /// `l^inf -> l^p`, `p <= 1`: `(sum b^p)^{1/p}`.
    SumP(f64),
    /// `l^inf -> l^p`, `p > 1`: `(sum_i (sum_j b)^p)^{1/p}`.
    RowSums(Exponent),
    /// `l^2 -> l^2`: Schur test `sqrt(max row sum * max column sum)`.
    Schur,
    /// `l^{p1} -> l^{p2}`, `p1 <= min(1, p2)`: largest column norm.
    Columns(Exponent),
}

fn route(from: &SpaceSpec, to: &SpaceSpec) -> Route {
    let (p1, p2) = (from.exponent(), to.exponent());
    if p1 == Exponent::two() && p2 == Exponent::two() {
        Route::Schur
    } else if p1 <= Exponent::one() && p1 <= p2 {
        Route::Columns(p2)
    } else if !p2.is_infinite() && p2 <= Exponent::one() {
        // any source embeds in l^inf with the same weight
        Route::SumP(p2.value())
    } else {
        Route::RowSums(p2)
    }
}

/// Entry magnitudes with the incremental state needed to evaluate the bound
/// of `T - T_k` as entries are removed in sorted order.
struct Tail {
    route: Route,
    rows: usize,
    cols: usize,
    b: Vec<f64>,
    removed: Vec<bool>,
    order: Vec<usize>,
    suffix: Vec<f64>,
    row_val: Vec<f64>,
    col_val: Vec<f64>,
}

impl Tail {
    fn new(t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Self {
        let (rows, cols) = t.shape();
        let b: Vec<f64> = (0..rows * cols)
            .map(|k| {
                let (i, j) = (k / cols, k % cols);
                t[(i, j)].norm() * to.weight[i] / from.weight[j]
            })
            .collect();
        let mut order: Vec<usize> = (0..b.len()).filter(|&k| b[k] > 0.0).collect();
        order.sort_by(|&x, &y| b[y].total_cmp(&b[x]).then(x.cmp(&y)));
        let route = route(from, to);
        let mut tail = Tail {
            route,
            rows,
            cols,
            removed: vec![false; b.len()],
            suffix: Vec::new(),
            row_val: vec![0.0; rows],
            col_val: vec![0.0; cols],
            order,
            b,
        };
        if let Route::SumP(p) = route {
            // summed from the small end so every tail is accurate
            let mut acc = 0.0;
            let mut suffix = vec![0.0; tail.order.len() + 1];
            for k in (0..tail.order.len()).rev() {
                acc += tail.b[tail.order[k]].powf(p);
                suffix[k] = acc;
            }
            tail.suffix = suffix;
        }
        for i in 0..rows {
            tail.refresh_row(i);
        }
        for j in 0..cols {
            tail.refresh_col(j);
        }
        tail
    }

    fn refresh_row(&mut self, i: usize) {
        let vals = (0..self.cols)
            .map(|j| i * self.cols + j)
            .filter(|&k| !self.removed[k])
            .map(|k| self.b[k]);
        self.row_val[i] = vals.sum();
    }

    fn refresh_col(&mut self, j: usize) {
        let vals: Vec<f64> = (0..self.rows)
            .map(|i| i * self.cols + j)
            .filter(|&k| !self.removed[k])
            .map(|k| self.b[k])
            .collect();
        self.col_val[j] = match self.route {
            Route::Columns(p) => crate::spaces::pnorm(&vals, p),
            _ => vals.iter().sum(),
        };
    }

    /// Bound for `T` with the `k` largest entries removed.
    fn value(&self, k: usize) -> f64 {
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        match self.route {
            Route::SumP(p) => self.suffix[k.min(self.order.len())].powf(1.0 / p),
            Route::RowSums(p) => crate::spaces::pnorm(&self.row_val, p),
            Route::Schur => (max(&self.row_val) * max(&self.col_val)).sqrt(),
            Route::Columns(_) => max(&self.col_val),
        }
    }

    fn remove(&mut self, k: usize) {
        if k >= self.order.len() {
            return;
        }
        let idx = self.order[k];
        self.removed[idx] = true;
        if !matches!(self.route, Route::SumP(_)) {
            self.refresh_row(idx / self.cols);
            self.refresh_col(idx % self.cols);
        }
    }

    /// Upper bound for the rank: number of non-zero rows or columns.
    fn rank_cap(&self) -> usize {
        let mut rows = vec![false; self.rows];
        let mut cols = vec![false; self.cols];
        for &k in &self.order {
            rows[k / self.cols] = true;
            cols[k % self.cols] = true;
        }
        let count = |v: &[bool]| v.iter().filter(|&&x| x).count();
        count(&rows).min(count(&cols))
    }
}

/// Certified upper bound for the operator norm of `T` from `from` to `to`.
pub fn opnorm_upper(t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Result<f64> {
    check_shape(t, from, to)?;
    Ok(Tail::new(t, from, to).value(0))
}

/// Certified upper bounds for the approximation numbers `sigma_1 .. sigma_count`:
/// `sigma_{k+1}(T) <= |T - T_k|`, with `T_k` the `k` largest entries.
pub fn approx_numbers_upper(
    t: &CMatrix,
    from: &SpaceSpec,
    to: &SpaceSpec,
    count: usize,
) -> Result<Vec<f64>> {
    check_shape(t, from, to)?;
    if count > t.len() {
        return Err(Error::Precondition(format!(
            "count {count} exceeds the number of entries {}",
            t.len()
        )));
    }
    let mut tail = Tail::new(t, from, to);
    let cap = tail.rank_cap();
    let mut out = Vec::with_capacity(count);
    let mut running = f64::INFINITY;
    for k in 0..count {
        let v = if k >= cap { 0.0 } else { tail.value(k) };
        running = running.min(v);
        out.push(running);
        tail.remove(k);
    }
    Ok(out)
}

/// One term `t(row, col) e_row (x) delta_col` of the elementary decomposition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionTerm {
    pub row: usize,
    pub col: usize,
    pub coefficient: Complex64,
    /// `|t| w2(row) / w1(col)`.
    pub weighted: f64,
}

fn decomposition(t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Vec<DecompositionTerm> {
    let tail = Tail::new(t, from, to);
    tail.order
        .iter()
        .map(|&k| {
            let (row, col) = (k / tail.cols, k % tail.cols);
            DecompositionTerm {
                row,
                col,
                coefficient: t[(row, col)],
                weighted: tail.b[k],
            }
        })
        .collect()
}

/// Certified bounds for one operator between two weighted spaces.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdealReport {
    pub from: SpaceKind,
    pub to: SpaceKind,
    pub sigma_upper: Vec<f64>,
    pub sigma_exact: Option<Vec<f64>>,
    pub schatten_q: Option<Exponent>,
    pub schatten_q_upper: Option<f64>,
    pub schatten_q_exact: Option<f64>,
    pub nuclear_r: Option<Exponent>,
    pub nuclear_r_upper: Option<f64>,
    /// Terms in the order they were peeled off.
    pub decomposition: Vec<DecompositionTerm>,
    pub oracle_lower: Option<OracleBound>,
}

impl IdealReport {
    fn empty(from: &SpaceSpec, to: &SpaceSpec) -> Self {
        IdealReport {
            from: from.kind,
            to: to.kind,
            sigma_upper: Vec::new(),
            sigma_exact: None,
            schatten_q: None,
            schatten_q_upper: None,
            schatten_q_exact: None,
            nuclear_r: None,
            nuclear_r_upper: None,
            decomposition: Vec::new(),
            oracle_lower: None,
        }
    }

    /// Nuclear bound recomputed from the stored decomposition.
    pub fn replay_nuclear(&self) -> Option<f64> {
        let r = self.nuclear_r?;
        let w: Vec<f64> = self.decomposition.iter().map(|t| t.weighted).collect();
        Some(crate::spaces::pnorm(&w, r))
    }

    /// Adds the brute-force norm oracle (phase search, at most three columns).
    pub fn with_oracle(mut self, t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Result<Self> {
        self.oracle_lower = Some(phase_search_norm(t, from, to)?);
        Ok(self)
    }
}

/// `l^q` norm of the certified approximation-number bounds. Values past
/// `min(rows, cols)` vanish and are not listed. In the `l^2 -> l^2` case the
/// exact singular values are attached and checked against the bound.
pub fn schatten_upper(
    t: &CMatrix,
    from: &SpaceSpec,
    to: &SpaceSpec,
    q: Exponent,
) -> Result<IdealReport> {
    check_shape(t, from, to)?;
    let count = t.nrows().min(t.ncols());
    let sigma = approx_numbers_upper(t, from, to, count)?;
    let upper = if q.is_infinite() {
        opnorm_upper(t, from, to)?
    } else {
        crate::spaces::pnorm(&sigma, q)
    };
    let mut report = IdealReport::empty(from, to);
    if from.is_hilbert() && to.is_hilbert() {
        let exact = singular_values_hilbert(t, &from.weight, &to.weight)?;
        let exact_q = crate::spaces::pnorm(&exact, q);
        if upper < exact_q * (1.0 - CERT_SLACK) {
            return Err(Error::Precondition(format!(
                "certified Schatten bound {upper} fell below the exact value {exact_q}"
            )));
        }
        report.sigma_exact = Some(exact);
        report.schatten_q_exact = Some(exact_q);
    }
    report.sigma_upper = sigma;
    report.schatten_q = Some(q);
    report.schatten_q_upper = Some(upper);
    report.decomposition = decomposition(t, from, to);
    Ok(report)
}

/// `|T|_{N_r} <= (sum (|t(i,j)| w2(i) / w1(j))^r)^{1/r}` from the elementary
/// decomposition; the norm of `delta_j` in the dual of the (Banach) source is `1 / w1(j)`.
pub fn nuclear_upper(
    t: &CMatrix,
    from: &SpaceSpec,
    to: &SpaceSpec,
    r: Exponent,
) -> Result<IdealReport> {
    check_shape(t, from, to)?;
    if r > Exponent::one() {
        return Err(Error::InvalidExponent(format!(
            "nuclear order r = {r} must satisfy r <= 1"
        )));
    }
    if !from.is_banach() {
        return Err(Error::Precondition(format!(
            "nuclear bound needs a Banach source space, got exponent {}",
            from.exponent()
        )));
    }
    let mut report = IdealReport::empty(from, to);
    report.decomposition = decomposition(t, from, to);
    report.nuclear_r = Some(r);
    report.nuclear_r_upper = report.replay_nuclear();
    Ok(report)
}

/// `(sum (|e_j| |eps_j|)^r)^{1/r}` for an explicit decomposition `T = sum e_j (x) eps_j`.
pub fn nuclear_bound_of_terms(norms: &[(f64, f64)], r: Exponent) -> Result<f64> {
    if r > Exponent::one() {
        return Err(Error::InvalidExponent(format!(
            "nuclear order r = {r} must satisfy r <= 1"
        )));
    }
    let prods: Vec<f64> = norms.iter().map(|(a, b)| a * b).collect();
    Ok(crate::spaces::pnorm(&prods, r))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "order", rename_all = "lowercase")]
pub enum IdealKind {
    Schatten(Exponent),
    Nuclear(Exponent),
}

/// `|T2 T T1| <= |T2| |T| |T1|` applied to the bound stored in `report`.
pub fn compose_bound(
    report: &IdealReport,
    t1_norm: f64,
    t2_norm: f64,
    kind: IdealKind,
) -> Result<f64> {
    if !(t1_norm >= 0.0 && t2_norm >= 0.0) {
        return Err(Error::Precondition("operator norms must be non-negative".into()));
    }
    let base = match kind {
        IdealKind::Schatten(q) if report.schatten_q == Some(q) => report.schatten_q_upper,
        IdealKind::Nuclear(r) if report.nuclear_r == Some(r) => report.nuclear_r_upper,
        _ => None,
    }
    .ok_or_else(|| Error::Precondition(format!("report carries no {kind:?} bound")))?;
    Ok(base * t1_norm * t2_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComposeCheck {
    pub composed: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Exact Hilbert-space check of `|T2 T T1|_{S_q} <= |T2| |T|_{S_q} |T1|`.
pub fn compose_check_hilbert(
    t1: &CMatrix,
    t: &CMatrix,
    t2: &CMatrix,
    q: Exponent,
) -> Result<ComposeCheck> {
    if t2.ncols() != t.nrows() || t.ncols() != t1.nrows() {
        return Err(Error::Precondition("composition shapes do not chain".into()));
    }
    let composed = crate::spaces::pnorm(&singular_values(&(t2 * t * t1)), q);
    let bound = spectral_norm(t2) * crate::spaces::pnorm(&singular_values(t), q) * spectral_norm(t1);
    Ok(ComposeCheck {
        composed,
        bound,
        holds: composed <= bound * (1.0 + 1e-9),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleReport {
    pub sigma_constant: f64,
    pub ideal_constant: f64,
    pub sigma_checks: usize,
    pub sigma_violations: usize,
    /// Smallest `rhs - lhs` over the singular-value inequalities.
    pub min_sigma_slack: f64,
    pub ideal_lhs: f64,
    pub ideal_rhs: f64,
    pub ideal_holds: bool,
}

/// Checks `sigma_{j1+j2+1}(T1 + T2) <= C (sigma_{j1+1}(T1) + sigma_{j2+1}(T2))` with
/// `C = 2^{max(1/p-1,0)}` for every index pair, and the quasi-triangle inequality
/// of the Schatten-`q` quasi-norm with `C' = 2^{max(1/p-1,0) + max(1/q-1,0) + 1/q}`,
/// using exact singular values.
pub fn schatten_triangle_check(
    t1: &CMatrix,
    t2: &CMatrix,
    p: Exponent,
    q: Exponent,
) -> Result<TriangleReport> {
    if t1.shape() != t2.shape() {
        return Err(Error::Precondition("summands must have equal shapes".into()));
    }
    let pos = |x: f64| x.max(0.0);
    let c = 2f64.powf(pos(p.recip_f64() - 1.0));
    let c_ideal = 2f64.powf(pos(p.recip_f64() - 1.0) + pos(q.recip_f64() - 1.0) + q.recip_f64());
    let s1 = singular_values(t1);
    let s2 = singular_values(t2);
    let s = singular_values(&(t1 + t2));
    let n = s.len();
    let scale = s.first().copied().unwrap_or(0.0).max(1.0);
    let (mut checks, mut violations, mut min_slack) = (0, 0, f64::INFINITY);
    for j1 in 0..n {
        for j2 in 0..n - j1 {
            let lhs = s[j1 + j2];
            let rhs = c * (s1[j1] + s2[j2]);
            checks += 1;
            min_slack = min_slack.min(rhs - lhs);
            if lhs > rhs + CERT_SLACK * scale {
                violations += 1;
            }
        }
    }
    let ideal_lhs = crate::spaces::pnorm(&s, q);
    let ideal_rhs = c_ideal * (crate::spaces::pnorm(&s1, q) + crate::spaces::pnorm(&s2, q));
    Ok(TriangleReport {
        sigma_constant: c,
        ideal_constant: c_ideal,
        sigma_checks: checks,
        sigma_violations: violations,
        min_sigma_slack: min_slack,
        ideal_lhs,
        ideal_rhs,
        ideal_holds: ideal_lhs <= ideal_rhs * (1.0 + CERT_SLACK),
    })
}
