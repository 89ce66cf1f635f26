//! Weighted sequence quasi-norms and modulation-space quasi-norms.
//!
//! All quasi-norms here are finite sums on counting measure, so for
//! `p <= 1` the `p`-triangle inequality `|f + g|^p <= |f|^p + |g|^p` holds
//! exactly up to rounding.

mod atomic;
mod exponent;
mod matrix;
mod tensor;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use atomic::{atomic_norm_upper, AtomicBound, AtomicOptions, AtomicRep};
pub use exponent::Exponent;
pub use matrix::{up_matrix_norm, MatrixOperator};
pub use tensor::{tensor_norm_upper, tensor_norm_upper_with, TensorBound};

use crate::error::{Error, Result};
use crate::gabor::GaborSystem;
use crate::lattice::{check_same_grid, Domain, DomainFourier, Grid, Signal};
use crate::rng::{derive_seed, SplitMix64};
use crate::timefreq::{stft, PhaseArray};
use crate::weights::Weight;

/// `(sum x_i^p)^{1/p}` of non-negative magnitudes, `max` for `p = inf`.
pub(crate) fn pnorm(values: &[f64], p: Exponent) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 || p.is_infinite() {
        return max;
    }
    let pv = p.value();
    let s: f64 = values.iter().map(|&v| (v / max).powf(pv)).sum();
    max * s.powf(1.0 / pv)
}

/// `|| c * w ||_{l^p}`.
pub fn lp_weighted_norm(c: &[Complex64], p: Exponent, w: &[f64]) -> Result<f64> {
    if c.len() != w.len() {
        return Err(Error::LengthMismatch {
            expected: c.len(),
            got: w.len(),
        });
    }
    let mags: Vec<f64> = c.iter().zip(w).map(|(v, w)| v.norm() * w).collect();
    Ok(pnorm(&mags, p))
}

/// Mixed norm of magnitudes stored `x` major over an `m x m` index set:
/// inner `p` over `x` for each `xi`, outer `q` over `xi`.
fn mixed_norm_raw(mags: &[f64], m: usize, p: Exponent, q: Exponent) -> f64 {
    let mut col = vec![0.0; m];
    let inner: Vec<f64> = (0..m)
        .map(|xi| {
            for (x, c) in col.iter_mut().enumerate() {
                *c = mags[x * m + xi];
            }
            pnorm(&col, p)
        })
        .collect();
    pnorm(&inner, q)
}

/// `|| V w ||_{l^{p,q}}`: inner `p` over `x`, outer `q` over `xi`.
pub fn mixed_lpq_norm(v: &PhaseArray, p: Exponent, q: Exponent, w: &Weight) -> Result<f64> {
    if w.domain() != v.grid().phase_domain() {
        return Err(Error::GridMismatch(
            "weight must live on the phase space of the array".into(),
        ));
    }
    let mags: Vec<f64> = v
        .values()
        .iter()
        .zip(w.values())
        .map(|(a, w)| a.norm() * w)
        .collect();
    Ok(mixed_norm_raw(&mags, v.grid().len(), p, q))
}

/// Parameters of a modulation quasi-norm `M^{p,q}_{(w)}` with window `phi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModSpec {
    pub p: Exponent,
    pub q: Exponent,
    pub weight: Weight,
    pub window: Signal,
}

impl ModSpec {
    pub fn new(p: Exponent, q: Exponent, weight: Weight, window: Signal) -> Result<Self> {
        if window.is_zero() {
            return Err(Error::ZeroWindow);
        }
        if weight.domain() != window.grid().phase_domain() {
            return Err(Error::GridMismatch(
                "weight must live on the phase space of the window grid".into(),
            ));
        }
        Ok(ModSpec {
            p,
            q,
            weight,
            window,
        })
    }

    /// `M^{p,p}` with unit weight and the Gaussian window.
    pub fn unweighted(grid: Grid, p: Exponent) -> Self {
        ModSpec {
            p,
            q: p,
            weight: Weight::constant(grid.phase_domain()),
            window: Signal::gaussian(grid),
        }
    }

    pub fn grid(&self) -> Grid {
        self.window.grid()
    }

    pub fn with_weight(&self, weight: Weight) -> Result<Self> {
        ModSpec::new(self.p, self.q, weight, self.window.clone())
    }

    pub fn with_window(&self, window: Signal) -> Result<Self> {
        ModSpec::new(self.p, self.q, self.weight.clone(), window)
    }
}

/// `|| V_phi f ||_{l^{p,q}_{(w)}}`.
pub fn modnorm(f: &Signal, spec: &ModSpec) -> Result<f64> {
    let v = stft(f, &spec.window)?;
    mixed_lpq_norm(&v, spec.p, spec.q, &spec.weight)
}

/// Mixed `l^{p,q}` norm of the lattice coefficients `<f, pi(lambda) gamma>` with the
/// weight restricted to the lattice, `gamma` the canonical dual of `sys`.
pub fn lattice_modnorm(
    f: &Signal,
    sys: &GaborSystem,
    p: Exponent,
    q: Exponent,
    w: &Weight,
) -> Result<f64> {
    let gamma = sys.canonical_dual()?;
    let lat = sys.lattice();
    check_same_grid(f.grid(), lat.grid())?;
    let coeffs = crate::gabor::analysis_with(f, gamma, lat)?;
    let wl = w.restrict_to_lattice(&lat.grid(), &lat.points())?;
    let (tc, kc) = (lat.time_count(), lat.freq_count());
    let mut col = vec![0.0; tc];
    let inner: Vec<f64> = (0..kc)
        .map(|k| {
            for (j, c) in col.iter_mut().enumerate() {
                let l = j * kc + k;
                *c = coeffs[l].norm() * wl[l];
            }
            pnorm(&col, p)
        })
        .collect();
    Ok(pnorm(&inner, q))
}

/// Modulation quasi-norm of `f` on an arbitrary domain `Z_N^k` without
/// materializing the STFT; `weight(x, xi)` takes linear indices of `domain`.
///
/// Intended for domains too large for [`Grid`], e.g. kernels on `Z_N^3`.
pub fn modnorm_on_domain(
    values: &[Complex64],
    domain: Domain,
    window: &[Complex64],
    p: Exponent,
    q: Exponent,
    weight: &(dyn Fn(usize, usize) -> f64 + Sync),
) -> Result<f64> {
    let m = domain.len();
    if values.len() != m || window.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            got: values.len().min(window.len()),
        });
    }
    if window.iter().all(|v| v.norm() == 0.0) {
        return Err(Error::ZeroWindow);
    }
    let plan = DomainFourier::new(domain);
    const CHUNK: usize = 64;
    let starts: Vec<usize> = (0..m).step_by(CHUNK).collect();
    // one partial accumulator per fixed chunk keeps the reduction order deterministic
    let partials: Vec<Vec<f64>> = starts
        .par_iter()
        .map(|&start| {
            let mut acc = vec![0.0f64; m];
            let mut buf = vec![Complex64::new(0.0, 0.0); m];
            for x in start..(start + CHUNK).min(m) {
                for (y, b) in buf.iter_mut().enumerate() {
                    *b = values[y] * window[domain.sub(y, x)].conj();
                }
                plan.forward_in_place(&mut buf);
                for (xi, a) in acc.iter_mut().enumerate() {
                    let v = buf[xi].norm() * weight(x, xi);
                    if p.is_infinite() {
                        *a = a.max(v);
                    } else {
                        *a += v.powf(p.value());
                    }
                }
            }
            acc
        })
        .collect();
    let mut inner = vec![0.0f64; m];
    for part in &partials {
        for (a, v) in inner.iter_mut().zip(part) {
            if p.is_infinite() {
                *a = a.max(*v);
            } else {
                *a += v;
            }
        }
    }
    if !p.is_infinite() {
        let e = 1.0 / p.value();
        inner.iter_mut().for_each(|v| *v = v.powf(e));
    }
    Ok(pnorm(&inner, q))
}

/// Outcome of comparing two modulation quasi-norms on a seeded ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    /// `max w2 / w1`, the predicted embedding constant.
    pub constant: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Sample id attaining `max_ratio`.
    pub witness: u64,
    pub ensemble: usize,
    pub seed: u64,
    pub holds: bool,
}

/// Checks `modnorm(f, spec2) <= C * modnorm(f, spec1)` with `C = max w2 / w1` on
/// random signals; requires `p1 <= p2`, `q1 <= q2` and a common window.
pub fn embedding_check(
    spec1: &ModSpec,
    spec2: &ModSpec,
    ensemble: usize,
    seed: u64,
) -> Result<EmbeddingReport> {
    if spec1.p > spec2.p || spec1.q > spec2.q {
        return Err(Error::Precondition(format!(
            "embedding needs p1 <= p2 and q1 <= q2, got ({}, {}) and ({}, {})",
            spec1.p, spec1.q, spec2.p, spec2.q
        )));
    }
    if spec1.window != spec2.window {
        return Err(Error::Precondition(
            "embedding check compares quasi-norms with a common window".into(),
        ));
    }
    let constant = spec2
        .weight
        .values()
        .iter()
        .zip(spec1.weight.values())
        .map(|(a, b)| a / b)
        .fold(0.0, f64::max);
    let grid = spec1.grid();
    let ratios: Vec<(u64, f64)> = (0..ensemble as u64)
        .into_par_iter()
        .map(|id| {
            let mut rng = SplitMix64::new(derive_seed(seed, id));
            let f = Signal::random(grid, &mut rng);
            Ok((id, modnorm(&f, spec2)? / modnorm(&f, spec1)?))
        })
        .collect::<Result<_>>()?;
    let (mut max_ratio, mut min_ratio, mut witness) = (0.0f64, f64::INFINITY, 0);
    for &(id, r) in &ratios {
        if r > max_ratio {
            max_ratio = r;
            witness = id;
        }
        min_ratio = min_ratio.min(r);
    }
    Ok(EmbeddingReport {
        constant,
        max_ratio,
        min_ratio,
        witness,
        ensemble,
        seed,
        holds: max_ratio <= constant * (1.0 + 1e-12),
    })
}
