//! Brute-force reference values for tiny matrices.
//!
//! The phase search evaluates `|T f|` on a grid of the torus
//! `{f : |f_j| w1(j) = 1}`, which contains the maximizers for an `l^inf`
//! source (each `|T f|^p` is subharmonic in every coordinate). With `S`
//! phase steps the grid point nearest a maximizer differs by at most
//! `delta = 2 sin(pi / (2 S))` in the source norm, so
//! `value <= |T| <= value / factor` with `factor = (1 - delta^s)^{1/s}`, `s = min(p, 1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::SpaceSpec;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::rng::SplitMix64;

/// Phase steps per coordinate.
pub const PHASE_STEPS: usize = 16;

/// Largest source dimension accepted by the searches.
pub const MAX_ORACLE_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleBound {
    pub value: f64,
    pub phase_steps: usize,
    pub dims: usize,
    /// `value >= factor * exact` (norm search only).
    pub factor: f64,
    pub evaluated: u64,
}

fn check_oracle(t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Result<()> {
    if t.ncols() > MAX_ORACLE_DIM || t.ncols() == 0 {
        return Err(Error::Precondition(format!(
            "brute-force search supports 1..={MAX_ORACLE_DIM} source dimensions, got {}",
            t.ncols()
        )));
    }
    if t.ncols() != from.size() || t.nrows() != to.size() {
        return Err(Error::LengthMismatch {
            expected: t.nrows() * t.ncols(),
            got: to.size() * from.size(),
        });
    }
    Ok(())
}

fn apply(t: &CMatrix, f: &[Complex64], out: &mut [Complex64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = f.iter().enumerate().map(|(j, v)| t[(i, j)] * v).sum();
    }
}

fn phase(k: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / PHASE_STEPS as f64)
}

/// Lower estimate of the norm of `T` from an `l^inf` source: maximum of `|T f|`
/// over the discretized torus. The first phase is fixed to 1 (global phase).
pub fn phase_search_norm(t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Result<OracleBound> {
    check_oracle(t, from, to)?;
    if !from.exponent().is_infinite() {
        return Err(Error::Precondition("phase search needs an l^inf source".into()));
    }
    let n = t.ncols();
    let mut f = vec![Complex64::new(0.0, 0.0); n];
    let mut out = vec![Complex64::new(0.0, 0.0); t.nrows()];
    let total = PHASE_STEPS.pow(n as u32 - 1);
    let mut best = 0.0f64;
    for code in 0..total {
        let mut rest = code;
        for (j, v) in f.iter_mut().enumerate() {
            let k = if j == 0 { 0 } else { rest % PHASE_STEPS };
            if j > 0 {
                rest /= PHASE_STEPS;
            }
            *v = phase(k) / from.weight[j];
        }
        apply(t, &f, &mut out);
        best = best.max(to.norm(&out)?);
    }
    let s = to.exponent().triangle_order();
    let delta = 2.0 * (PI / (2.0 * PHASE_STEPS as f64)).sin();
    Ok(OracleBound {
        value: best,
        phase_steps: PHASE_STEPS,
        dims: n,
        factor: (1.0 - delta.powf(s)).powf(1.0 / s),
        evaluated: total as u64,
    })
}

/// `min |T f| / |f|` over a grid of the source unit sphere (one coordinate on the
/// unit circle, the others on `(PHASE_STEPS + 1)` radii times `PHASE_STEPS` phases).
/// Every operator of rank below the source dimension annihilates some `f`, so the
/// true minimum is a lower bound for the last approximation number; the grid value
/// approximates it from above.
pub fn min_ratio_search(t: &CMatrix, from: &SpaceSpec, to: &SpaceSpec) -> Result<OracleBound> {
    check_oracle(t, from, to)?;
    let n = t.ncols();
    let radii: Vec<f64> = (0..=PHASE_STEPS).map(|k| k as f64 / PHASE_STEPS as f64).collect();
    let mut points: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
    for &r in &radii[1..] {
        points.extend((0..PHASE_STEPS).map(|k| phase(k) * r));
    }
    let m = points.len();
    let mut f = vec![Complex64::new(0.0, 0.0); n];
    let mut out = vec![Complex64::new(0.0, 0.0); t.nrows()];
    let mut best = f64::INFINITY;
    let mut evaluated = 0u64;
    for lead in 0..n {
        for code in 0..m.pow(n as u32 - 1) {
            let mut rest = code;
            for (j, v) in f.iter_mut().enumerate() {
                let z = if j == lead {
                    Complex64::new(1.0, 0.0)
                } else {
                    let z = points[rest % m];
                    rest /= m;
                    z
                };
                *v = z / from.weight[j];
            }
            let norm = from.norm(&f)?;
            apply(t, &f, &mut out);
            best = best.min(to.norm(&out)? / norm);
            evaluated += 1;
        }
    }
    Ok(OracleBound {
        value: best,
        phase_steps: PHASE_STEPS,
        dims: n,
        factor: 1.0,
        evaluated,
    })
}

fn power_top(t: &CMatrix, seed: u64) -> (f64, CVector, CVector) {
    let n = t.ncols();
    let mut rng = SplitMix64::new(seed);
    let mut v = CVector::from_fn(n, |_, _| rng.complex_normal());
    v /= Complex64::new(v.norm(), 0.0);
    let gram = t.adjoint() * t;
    let mut prev = 0.0;
    for _ in 0..200_000 {
        let w = &gram * &v;
        let lambda = w.norm();
        if lambda == 0.0 {
            break;
        }
        v = w / Complex64::new(lambda, 0.0);
        if (lambda - prev).abs() <= 1e-15 * lambda {
            break;
        }
        prev = lambda;
    }
    let tv = t * &v;
    let sigma = tv.norm();
    let u = if sigma > 0.0 {
        tv / Complex64::new(sigma, 0.0)
    } else {
        tv
    };
    (sigma, u, v)
}

/// `sigma_2` in the `l^2` setting without an SVD: power iteration for the best
/// rank-one approximation, then the norm of the remainder by power iteration.
pub fn sigma2_power_oracle(t: &CMatrix) -> f64 {
    let (s1, u, v) = power_top(t, 0x5157);
    let rest = t - (u * v.adjoint()) * Complex64::new(s1, 0.0);
    power_top(&rest, 0x5158).0
}
