//! Finite cyclic-group model `Z_N^d`.
//!
//! Everything else in the crate is built on the types here: [`Grid`] for the
//! signal domain, [`Domain`] for products of up to four copies of `Z_N`
//! (phase space, doubled phase space), [`Signal`] and the elementary
//! operations: unitary DFT, inner product and time-frequency shifts.
//!
//! Index convention: multi-indices are stored row-major, so on `Z_N^2` the
//! point `(i, j)` has linear index `i * N + j`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted number of points `N^d`.
pub const MAX_POINTS: usize = 1 << 26;

/// Maximum number of `Z_N` factors in a [`Domain`].
pub const MAX_DIMS: usize = 4;

/// Symmetric representative of `k mod n` in `[-floor(n/2), ceil(n/2))`.
pub fn symmetric_rep(k: usize, n: usize) -> i64 {
    let k = (k % n) as i64;
    let n = n as i64;
    if k >= n - n / 2 {
        k - n
    } else {
        k
    }
}

/// Product `Z_N^dims` with row-major linear indexing, `1 <= dims <= 4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Domain {
    n: usize,
    dims: usize,
}

impl Domain {
    pub fn new(n: usize, dims: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("modulus N must be positive".into()));
        }
        if dims == 0 || dims > MAX_DIMS {
            return Err(Error::InvalidGrid(format!(
                "dimension {dims} outside 1..={MAX_DIMS}"
            )));
        }
        match n.checked_pow(dims as u32) {
            Some(len) if len <= MAX_POINTS => Ok(Domain { n, dims }),
            _ => Err(Error::InvalidGrid(format!(
                "N^d = {n}^{dims} exceeds 2^26 points"
            ))),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dims as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinates of a linear index; unused trailing slots are zero.
    pub fn unravel(&self, mut idx: usize) -> [usize; MAX_DIMS] {
        let mut c = [0; MAX_DIMS];
        for k in (0..self.dims).rev() {
            c[k] = idx % self.n;
            idx /= self.n;
        }
        c
    }

    /// Linear index of coordinates, each reduced mod N.
    pub fn ravel(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.dims);
        coords.iter().fold(0, |acc, &c| acc * self.n + c % self.n)
    }

    /// Linear index of signed coordinates, reduced mod N.
    pub fn ravel_signed(&self, coords: &[i64]) -> usize {
        let n = self.n as i64;
        coords
            .iter()
            .fold(0, |acc, &c| acc * self.n + c.rem_euclid(n) as usize)
    }

    fn zip_with(&self, i: usize, j: usize, f: impl Fn(usize, usize) -> usize) -> usize {
        let a = self.unravel(i);
        let b = self.unravel(j);
        let mut out = 0;
        for k in 0..self.dims {
            out = out * self.n + f(a[k], b[k]) % self.n;
        }
        out
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        self.zip_with(i, j, |a, b| a + b)
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        let n = self.n;
        self.zip_with(i, j, |a, b| a + n - b)
    }

    pub fn neg(&self, i: usize) -> usize {
        self.sub(0, i)
    }

    /// `<i, j> mod N`.
    pub fn dot(&self, i: usize, j: usize) -> usize {
        let a = self.unravel(i);
        let b = self.unravel(j);
        (0..self.dims).fold(0, |acc, k| (acc + a[k] * b[k]) % self.n)
    }

    /// Euclidean length of the symmetric representative of a point.
    pub fn magnitude(&self, i: usize) -> f64 {
        let c = self.unravel(i);
        c[..self.dims]
            .iter()
            .map(|&k| {
                let r = symmetric_rep(k, self.n) as f64;
                r * r
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Cartesian product `self x other` (coordinates of `self` first).
    pub fn product(&self, other: &Domain) -> Result<Domain> {
        if self.n != other.n {
            return Err(Error::GridMismatch(format!(
                "moduli {} and {} differ",
                self.n, other.n
            )));
        }
        Domain::new(self.n, self.dims + other.dims)
    }
}

/// Signal domain `Z_N^d` with `d in {1, 2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    domain: Domain,
}

impl Grid {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if !(1..=2).contains(&d) {
            return Err(Error::InvalidGrid(format!("d = {d} not supported (d in {{1,2}})")));
        }
        Ok(Grid {
            domain: Domain::new(n, d)?,
        })
    }

    pub fn n(&self) -> usize {
        self.domain.n
    }

    pub fn d(&self) -> usize {
        self.domain.dims
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Phase space `(Z_N^d)^2`, indexed `(x, xi)` with `x` major.
    pub fn phase_domain(&self) -> Domain {
        Domain {
            n: self.domain.n,
            dims: 2 * self.domain.dims,
        }
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        self.domain.add(i, j)
    }

    pub fn sub(&self, i: usize, j: usize) -> usize {
        self.domain.sub(i, j)
    }

    pub fn neg(&self, i: usize) -> usize {
        self.domain.neg(i)
    }

    pub fn dot(&self, i: usize, j: usize) -> usize {
        self.domain.dot(i, j)
    }

    pub fn ravel(&self, coords: &[usize]) -> usize {
        self.domain.ravel(coords)
    }

    pub fn unravel(&self, idx: usize) -> [usize; MAX_DIMS] {
        self.domain.unravel(idx)
    }

    pub fn roots(&self) -> Roots {
        Roots::new(self.n())
    }
}

/// Table of the `N`-th roots of unity `e^{2 pi i k / N}`.
#[derive(Debug, Clone)]
pub struct Roots {
    table: Vec<Complex64>,
}

impl Roots {
    pub fn new(n: usize) -> Self {
        let table = (0..n)
            .map(|k| {
                let (s, c) = (2.0 * PI * k as f64 / n as f64).sin_cos();
                Complex64::new(c, s)
            })
            .collect();
        Roots { table }
    }

    /// `e^{2 pi i k / N}` for any integer `k`.
    #[inline]
    pub fn get(&self, k: usize) -> Complex64 {
        self.table[k % self.table.len()]
    }

    /// `e^{-2 pi i k / N}`.
    #[inline]
    pub fn get_conj(&self, k: usize) -> Complex64 {
        let n = self.table.len();
        self.table[(n - k % n) % n]
    }
}

/// Complex function on a [`Grid`], row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Signal {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Signal { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Signal {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Kronecker delta at linear index `at`.
    pub fn delta(grid: Grid, at: usize) -> Self {
        let mut s = Self::zeros(grid);
        s.values[at % grid.len()] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn from_real(grid: Grid, values: &[f64]) -> Result<Self> {
        Self::new(grid, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(grid: Grid, f: impl Fn(usize) -> Complex64) -> Self {
        Signal {
            grid,
            values: (0..grid.len()).map(f).collect(),
        }
    }

    /// Periodized discrete Gaussian `e^{-pi |rep(n)|^2 / N}`, unit `l^2` norm.
    pub fn gaussian(grid: Grid) -> Self {
        let n = grid.n() as f64;
        let dom = grid.domain();
        let g = Self::from_fn(grid, |i| {
            let m = dom.magnitude(i);
            Complex64::new((-PI * m * m / n).exp(), 0.0)
        });
        g.normalized()
    }

    /// I.i.d. standard complex Gaussian entries.
    pub fn random(grid: Grid, rng: &mut crate::rng::SplitMix64) -> Self {
        Signal {
            grid,
            values: rng.complex_vec(grid.len()),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    pub fn normalized(&self) -> Self {
        let nrm = self.norm();
        if nrm == 0.0 {
            return self.clone();
        }
        self.scale(Complex64::new(1.0 / nrm, 0.0))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Signal {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        Signal {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn add(&self, other: &Signal) -> Result<Self> {
        check_same_grid(self.grid, other.grid)?;
        Ok(Signal {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &Signal) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Signal) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Tensor product `(f (x) g)(x1, x2) = f(x1) g(x2)` of two `d = 1` signals.
    pub fn tensor(&self, other: &Signal) -> Result<Signal> {
        if self.grid.d() != 1 || other.grid.d() != 1 || self.grid.n() != other.grid.n() {
            return Err(Error::GridMismatch(
                "tensor product needs two d = 1 signals on the same Z_N".into(),
            ));
        }
        let grid = Grid::new(self.grid.n(), 2)?;
        let n = self.grid.n();
        Ok(Signal::from_fn(grid, |i| self.values[i / n] * other.values[i % n]))
    }
}

pub(crate) fn check_same_grid(a: Grid, b: Grid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!(
            "({}, d={}) vs ({}, d={})",
            a.n(),
            a.d(),
            b.n(),
            b.d()
        )));
    }
    Ok(())
}

/// Unitary FFT plans for one grid (`d = 1` or separable `d = 2`).
#[derive(Clone)]
pub struct FourierPlan {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for FourierPlan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FourierPlan").field("grid", &self.grid).finish()
    }
}

impl FourierPlan {
    pub fn new(grid: Grid) -> Self {
        let mut planner = FftPlanner::new();
        let n = grid.n();
        FourierPlan {
            grid,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
            scale: (grid.len() as f64).powf(-0.5),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    fn run(&self, buf: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        if self.grid.d() == 1 {
            fft.process(buf);
        } else {
            for row in buf.chunks_exact_mut(n) {
                fft.process(row);
            }
            let mut col = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for i in 0..n {
                    col[i] = buf[i * n + j];
                }
                fft.process(&mut col);
                for i in 0..n {
                    buf[i * n + j] = col[i];
                }
            }
        }
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }

    /// In-place unitary forward transform.
    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.forward)
    }

    /// In-place unitary inverse transform.
    pub fn inverse_in_place(&self, buf: &mut [Complex64]) {
        self.run(buf, &self.inverse)
    }
}

/// Unitary forward FFT on an arbitrary [`Domain`], applied axis by axis.
#[derive(Clone)]
pub struct DomainFourier {
    domain: Domain,
    forward: Arc<dyn Fft<f64>>,
    scale: f64,
}

impl std::fmt::Debug for DomainFourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DomainFourier").field("domain", &self.domain).finish()
    }
}

impl DomainFourier {
    pub fn new(domain: Domain) -> Self {
        DomainFourier {
            domain,
            forward: FftPlanner::new().plan_fft_forward(domain.n()),
            scale: (domain.len() as f64).powf(-0.5),
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) {
        let n = self.domain.n();
        let len = self.domain.len();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        let mut stride = 1;
        for _ in 0..self.domain.dims() {
            let block = stride * n;
            for start in (0..len).step_by(block) {
                for off in 0..stride {
                    let base = start + off;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = buf[base + k * stride];
                    }
                    self.forward.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        buf[base + k * stride] = *v;
                    }
                }
            }
            stride = block;
        }
        for v in buf.iter_mut() {
            *v *= self.scale;
        }
    }
}

/// Unitary DFT `(dft f)(xi) = N^{-d/2} sum_x f(x) e^{-2 pi i <x, xi> / N}`.
pub fn dft(f: &Signal) -> Signal {
    let plan = FourierPlan::new(f.grid);
    let mut values = f.values.clone();
    plan.forward_in_place(&mut values);
    Signal {
        grid: f.grid,
        values,
    }
}

/// Inverse of [`dft`], kernel `e^{+2 pi i <x, xi> / N}`.
pub fn idft(f: &Signal) -> Signal {
    let plan = FourierPlan::new(f.grid);
    let mut values = f.values.clone();
    plan.inverse_in_place(&mut values);
    Signal {
        grid: f.grid,
        values,
    }
}

/// Direct `O(N^{2d})` summation of the unitary DFT, used to cross-check the FFT path.
pub fn dft_direct(f: &Signal, inverse: bool) -> Signal {
    let grid = f.grid;
    let roots = grid.roots();
    let scale = (grid.len() as f64).powf(-0.5);
    Signal::from_fn(grid, |xi| {
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, v) in f.values.iter().enumerate() {
            let k = grid.dot(x, xi);
            let w = if inverse { roots.get(k) } else { roots.get_conj(k) };
            acc += v * w;
        }
        acc * scale
    })
}

/// Point `(x, xi)` of phase space, stored as linear indices into the signal grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: usize,
    pub xi: usize,
}

impl PhasePoint {
    /// Build from coordinate slices (length `d`), reducing each mod N.
    pub fn new(grid: &Grid, x: &[i64], xi: &[i64]) -> Result<Self> {
        if x.len() != grid.d() || xi.len() != grid.d() {
            return Err(Error::LengthMismatch {
                expected: grid.d(),
                got: x.len().max(xi.len()),
            });
        }
        Ok(PhasePoint {
            x: grid.domain().ravel_signed(x),
            xi: grid.domain().ravel_signed(xi),
        })
    }

    pub fn origin() -> Self {
        PhasePoint { x: 0, xi: 0 }
    }

    /// Linear index in [`Grid::phase_domain`].
    pub fn phase_index(&self, grid: &Grid) -> usize {
        self.x * grid.len() + self.xi
    }

    pub fn from_phase_index(grid: &Grid, idx: usize) -> Self {
        PhasePoint {
            x: idx / grid.len(),
            xi: idx % grid.len(),
        }
    }

    pub fn neg(&self, grid: &Grid) -> Self {
        PhasePoint {
            x: grid.neg(self.x),
            xi: grid.neg(self.xi),
        }
    }

    pub fn add(&self, other: &PhasePoint, grid: &Grid) -> Self {
        PhasePoint {
            x: grid.add(self.x, other.x),
            xi: grid.add(self.xi, other.xi),
        }
    }
}

/// Time-frequency shift `(pi(x, xi) f)(n) = e^{2 pi i <xi, n> / N} f(n - x)`.
pub fn tf_shift(f: &Signal, at: PhasePoint) -> Signal {
    let grid = f.grid;
    let roots = grid.roots();
    tf_shift_with(f, at, &roots)
}

pub(crate) fn tf_shift_with(f: &Signal, at: PhasePoint, roots: &Roots) -> Signal {
    let grid = f.grid;
    Signal::from_fn(grid, |n| {
        roots.get(grid.dot(at.xi, n)) * f.values[grid.sub(n, at.x)]
    })
}

/// `<f, g> = sum_n f(n) conj(g(n))`.
pub fn inner(f: &Signal, g: &Signal) -> Result<Complex64> {
    check_same_grid(f.grid, g.grid)?;
    Ok(inner_unchecked(&f.values, &g.values))
}

pub(crate) fn inner_unchecked(f: &[Complex64], g: &[Complex64]) -> Complex64 {
    f.iter().zip(g).map(|(a, b)| a * b.conj()).sum()
}

#[derive(Serialize, Deserialize)]
struct SignalJson {
    #[serde(rename = "N")]
    n: usize,
    d: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for Signal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SignalJson {
            n: self.grid.n(),
            d: self.grid.d(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = SignalJson::deserialize(d)?;
        if raw.re.len() != raw.im.len() {
            return Err(D::Error::custom(format!(
                "re/im length mismatch: {} vs {}",
                raw.re.len(),
                raw.im.len()
            )));
        }
        let grid = Grid::new(raw.n, raw.d).map_err(D::Error::custom)?;
        let values = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        Signal::new(grid, values).map_err(D::Error::custom)
    }
}
