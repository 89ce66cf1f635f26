//! Gabor systems on separable lattices `aZ^d x bZ^d` of `Z_N^d`.
//!
//! Analysis `C_phi f = (<f, pi(lambda) phi>)_lambda`, synthesis
//! `D_phi c = sum_lambda c_lambda pi(lambda) phi`, the frame operator
//! `S = D_phi C_phi`, the canonical dual `gamma = S^{-1} phi`, and Gabor
//! matrices `M = C_phi T D_gamma` with `D_gamma M C_phi = T` whenever
//! `D_gamma C_phi = Id`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_same_grid, tf_shift_with, FourierPlan, Grid, PhasePoint, Signal};
use crate::linalg::{hermitian_eigenvalues, solve_hpd, CMatrix, CVector};
use crate::spaces::MatrixOperator;

/// Frames with lower bound at or below this are rejected.
pub const FRAME_TOL: f64 = 1e-10;

/// Largest accepted reconstruction residual for a dual pair.
pub const DUAL_TOL: f64 = 1e-8;

/// Separable lattice `{(j a, k b)}` in the phase space of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaborLattice {
    grid: Grid,
    a: usize,
    b: usize,
}

impl GaborLattice {
    pub fn new(grid: Grid, a: usize, b: usize) -> Result<Self> {
        let n = grid.n();
        if a == 0 || b == 0 || n % a != 0 || n % b != 0 {
            return Err(Error::InvalidLattice(format!(
                "steps a = {a}, b = {b} must divide N = {n}"
            )));
        }
        Ok(GaborLattice { grid, a, b })
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn a(&self) -> usize {
        self.a
    }

    pub fn b(&self) -> usize {
        self.b
    }

    /// Number of time positions `(N/a)^d`.
    pub fn time_count(&self) -> usize {
        (self.grid.n() / self.a).pow(self.grid.d() as u32)
    }

    /// Number of frequency positions `(N/b)^d`.
    pub fn freq_count(&self) -> usize {
        (self.grid.n() / self.b).pow(self.grid.d() as u32)
    }

    pub fn len(&self) -> usize {
        self.time_count() * self.freq_count()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Redundancy `|Lambda| / N^d`.
    pub fn redundancy(&self) -> f64 {
        self.len() as f64 / self.grid.len() as f64
    }

    fn scaled_point(&self, idx: usize, step: usize) -> usize {
        let g = self.grid;
        let per = g.n() / step;
        let mut coords = [0usize; 2];
        let mut rest = idx;
        for k in (0..g.d()).rev() {
            coords[k] = (rest % per) * step;
            rest /= per;
        }
        g.ravel(&coords[..g.d()])
    }

    pub fn time_point(&self, j: usize) -> usize {
        self.scaled_point(j, self.a)
    }

    pub fn freq_point(&self, k: usize) -> usize {
        self.scaled_point(k, self.b)
    }

    /// Lattice point with index `lambda = j * freq_count + k`.
    pub fn point(&self, lambda: usize) -> PhasePoint {
        let kc = self.freq_count();
        PhasePoint {
            x: self.time_point(lambda / kc),
            xi: self.freq_point(lambda % kc),
        }
    }

    pub fn points(&self) -> Vec<PhasePoint> {
        (0..self.len()).map(|l| self.point(l)).collect()
    }

    /// Index of a phase point on the lattice, if it is one.
    pub fn index_of(&self, p: PhasePoint) -> Option<usize> {
        let g = self.grid;
        let (cx, cxi) = (g.unravel(p.x), g.unravel(p.xi));
        let (pa, pb) = (g.n() / self.a, g.n() / self.b);
        let mut j = 0;
        let mut k = 0;
        for i in 0..g.d() {
            if cx[i] % self.a != 0 || cxi[i] % self.b != 0 {
                return None;
            }
            j = j * pa + cx[i] / self.a;
            k = k * pb + cxi[i] / self.b;
        }
        Some(j * self.freq_count() + k)
    }

    /// Adjoint lattice `(N/b)Z^d x (N/a)Z^d`.
    pub fn adjoint_points(&self) -> Vec<PhasePoint> {
        let g = self.grid;
        let adj = GaborLattice {
            grid: g,
            a: g.n() / self.b,
            b: g.n() / self.a,
        };
        adj.points()
    }

    /// `true` when `m - n` lies in `(N/b) Z^d`.
    fn freq_alias(&self, m: usize, n: usize) -> bool {
        let g = self.grid;
        let step = g.n() / self.b;
        let diff = g.unravel(g.sub(m, n));
        diff[..g.d()].iter().all(|&t| t % step == 0)
    }
}

/// Gabor coefficients `c(j, k)` stored `j` major.
pub type Coefficients = Vec<Complex64>;

/// `c(j, k) = <f, pi(j a, k b) phi>`.
pub fn analysis_with(f: &Signal, window: &Signal, lattice: &GaborLattice) -> Result<Coefficients> {
    check_same_grid(f.grid(), window.grid())?;
    check_same_grid(f.grid(), lattice.grid)?;
    let g = lattice.grid;
    let m = g.len();
    let plan = FourierPlan::new(g);
    let unscale = (m as f64).sqrt();
    let (kc, tc) = (lattice.freq_count(), lattice.time_count());
    let mut out = Vec::with_capacity(lattice.len());
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..tc {
        let x = lattice.time_point(j);
        for (y, v) in buf.iter_mut().enumerate() {
            *v = f.values()[y] * window.values()[g.sub(y, x)].conj();
        }
        plan.forward_in_place(&mut buf);
        out.extend((0..kc).map(|k| buf[lattice.freq_point(k)] * unscale));
    }
    Ok(out)
}

/// `sum_{j,k} c(j, k) pi(j a, k b) phi`.
pub fn synthesis_with(c: &[Complex64], window: &Signal, lattice: &GaborLattice) -> Result<Signal> {
    check_same_grid(window.grid(), lattice.grid)?;
    if c.len() != lattice.len() {
        return Err(Error::LengthMismatch {
            expected: lattice.len(),
            got: c.len(),
        });
    }
    let g = lattice.grid;
    let m = g.len();
    let plan = FourierPlan::new(g);
    let unscale = (m as f64).sqrt();
    let (kc, tc) = (lattice.freq_count(), lattice.time_count());
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..tc {
        buf.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for k in 0..kc {
            buf[lattice.freq_point(k)] = c[j * kc + k];
        }
        plan.inverse_in_place(&mut buf);
        let x = lattice.time_point(j);
        for (n, o) in out.iter_mut().enumerate() {
            *o += buf[n] * unscale * window.values()[g.sub(n, x)];
        }
    }
    Signal::new(g, out)
}

/// `S_{gamma,phi} = D_gamma C_phi` assembled through the Walnut form
/// `S(m, n) = (N/b)^d 1[m - n in (N/b)Z^d] sum_j gamma(m - x_j) conj(phi(n - x_j))`.
pub fn mixed_frame_operator(
    gamma: &Signal,
    phi: &Signal,
    lattice: &GaborLattice,
) -> Result<CMatrix> {
    check_same_grid(gamma.grid(), lattice.grid)?;
    check_same_grid(phi.grid(), lattice.grid)?;
    let g = lattice.grid;
    let m = g.len();
    let scale = lattice.freq_count() as f64;
    let xs: Vec<usize> = (0..lattice.time_count()).map(|j| lattice.time_point(j)).collect();
    Ok(CMatrix::from_fn(m, m, |r, c| {
        if !lattice.freq_alias(r, c) {
            return Complex64::new(0.0, 0.0);
        }
        xs.iter()
            .map(|&x| gamma.values()[g.sub(r, x)] * phi.values()[g.sub(c, x)].conj())
            .sum::<Complex64>()
            * scale
    }))
}

/// `S = D_phi C_phi`.
pub fn frame_operator(window: &Signal, lattice: &GaborLattice) -> Result<CMatrix> {
    mixed_frame_operator(window, window, lattice)
}

/// Largest `l^2` column error of `D_gamma C_phi - Id` (reconstruction of each basis vector).
pub fn dual_residual(phi: &Signal, gamma: &Signal, lattice: &GaborLattice) -> Result<f64> {
    let s = mixed_frame_operator(gamma, phi, lattice)?;
    let id = CMatrix::identity(s.nrows(), s.ncols());
    let diff = s - id;
    Ok(diff
        .column_iter()
        .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .fold(0.0, f64::max))
}

/// `max_{mu in adjoint lattice} |<gamma, pi(mu) phi> - (ab/N)^d delta_{mu,0}|`.
pub fn wexler_raz_residual(phi: &Signal, gamma: &Signal, lattice: &GaborLattice) -> Result<f64> {
    check_same_grid(phi.grid(), lattice.grid)?;
    check_same_grid(gamma.grid(), lattice.grid)?;
    let g = lattice.grid;
    let roots = g.roots();
    let target = ((lattice.a * lattice.b) as f64 / g.n() as f64).powi(g.d() as i32);
    Ok(lattice
        .adjoint_points()
        .into_iter()
        .map(|mu| {
            let atom = tf_shift_with(phi, mu, &roots);
            let ip = crate::lattice::inner_unchecked(gamma.values(), atom.values());
            let expect = if mu == PhasePoint::origin() { target } else { 0.0 };
            (ip - Complex64::new(expect, 0.0)).norm()
        })
        .fold(0.0, f64::max))
}

/// Window, lattice, frame bounds and (for frames) the canonical dual window.
#[derive(Debug, Clone, PartialEq)]
pub struct GaborSystem {
    window: Signal,
    lattice: GaborLattice,
    lower: f64,
    upper: f64,
    dual: Option<Signal>,
}

impl GaborSystem {
    /// Assemble the frame operator, record its extreme eigenvalues and, when the
    /// lower bound exceeds [`FRAME_TOL`], solve for the canonical dual.
    pub fn new(window: Signal, lattice: GaborLattice) -> Result<Self> {
        let s = frame_operator(&window, &lattice)?;
        let eig = hermitian_eigenvalues(&s);
        let lower = eig.first().copied().unwrap_or(0.0).max(0.0);
        let upper = eig.last().copied().unwrap_or(0.0).max(0.0);
        let dual = if lower > FRAME_TOL {
            let rhs = CVector::from_column_slice(window.values());
            let sol = solve_hpd(&s, &rhs)?;
            Some(Signal::new(window.grid(), sol.iter().copied().collect())?)
        } else {
            None
        };
        Ok(GaborSystem {
            window,
            lattice,
            lower,
            upper,
            dual,
        })
    }

    pub fn window(&self) -> &Signal {
        &self.window
    }

    pub fn lattice(&self) -> &GaborLattice {
        &self.lattice
    }

    pub fn grid(&self) -> Grid {
        self.lattice.grid
    }

    /// `(A_low, B_high)`.
    pub fn frame_bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn is_frame(&self) -> bool {
        self.dual.is_some()
    }

    /// Canonical dual `S^{-1} phi`; errors when the system is not a frame.
    pub fn canonical_dual(&self) -> Result<&Signal> {
        self.dual.as_ref().ok_or(Error::NotAFrame {
            lower_bound: self.lower,
        })
    }

    /// System generated by the canonical dual on the same lattice.
    pub fn dual_system(&self) -> Result<GaborSystem> {
        GaborSystem::new(self.canonical_dual()?.clone(), self.lattice)
    }

    pub fn analysis(&self, f: &Signal) -> Result<Coefficients> {
        analysis_with(f, &self.window, &self.lattice)
    }

    pub fn synthesis(&self, c: &[Complex64]) -> Result<Signal> {
        synthesis_with(c, &self.window, &self.lattice)
    }

    pub fn frame_operator(&self) -> Result<CMatrix> {
        frame_operator(&self.window, &self.lattice)
    }
}

/// Canonical dual window of `sys`.
pub fn canonical_dual(sys: &GaborSystem) -> Result<Signal> {
    sys.canonical_dual().cloned()
}

/// Dense `N^d x |Lambda|` synthesis matrix, column `lambda` is `pi(lambda) window`.
pub fn synthesis_matrix(window: &Signal, lattice: &GaborLattice) -> Result<CMatrix> {
    check_same_grid(window.grid(), lattice.grid)?;
    let roots = lattice.grid.roots();
    let m = lattice.grid.len();
    let mut out = CMatrix::zeros(m, lattice.len());
    for l in 0..lattice.len() {
        let atom = tf_shift_with(window, lattice.point(l), &roots);
        out.column_mut(l).copy_from_slice(atom.values());
    }
    Ok(out)
}

/// `M(lambda, mu) = <T pi(mu) gamma, pi(lambda) phi>`, i.e. `M = C_phi T D_gamma`.
///
/// The pair must satisfy `D_gamma C_phi = Id` within [`DUAL_TOL`]; then
/// `D_gamma M C_phi = T`.
pub fn gabor_matrix(
    t: &CMatrix,
    phi: &Signal,
    gamma: &Signal,
    lattice: &GaborLattice,
) -> Result<MatrixOperator> {
    let m = lattice.grid.len();
    if t.nrows() != m || t.ncols() != m {
        return Err(Error::LengthMismatch {
            expected: m * m,
            got: t.nrows() * t.ncols(),
        });
    }
    let residual = dual_residual(phi, gamma, lattice)?;
    if residual > DUAL_TOL {
        return Err(Error::NotDual { residual });
    }
    let d_phi = synthesis_matrix(phi, lattice)?;
    let d_gamma = synthesis_matrix(gamma, lattice)?;
    let mat = d_phi.adjoint() * (t * d_gamma);
    Ok(MatrixOperator::unweighted(mat))
}

/// `D_gamma M C_phi`, the operator a Gabor matrix represents.
pub fn gabor_reconstruct(
    m: &MatrixOperator,
    phi: &Signal,
    gamma: &Signal,
    lattice: &GaborLattice,
) -> Result<CMatrix> {
    let d_phi = synthesis_matrix(phi, lattice)?;
    let d_gamma = synthesis_matrix(gamma, lattice)?;
    Ok(d_gamma * (m.entries() * d_phi.adjoint()))
}

#[derive(Serialize, Deserialize)]
struct GaborSystemJson {
    window: Signal,
    a: usize,
    b: usize,
}

impl Serialize for GaborSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GaborSystemJson {
            window: self.window.clone(),
            a: self.lattice.a,
            b: self.lattice.b,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaborSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = GaborSystemJson::deserialize(d)?;
        let lattice = GaborLattice::new(raw.window.grid(), raw.a, raw.b).map_err(D::Error::custom)?;
        GaborSystem::new(raw.window, lattice).map_err(D::Error::custom)
    }
}
