use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::{pnorm, Exponent};
use crate::error::{Error, Result};
use crate::gabor::{analysis_with, GaborSystem};
use crate::lattice::{check_same_grid, tf_shift_with, PhasePoint, Signal};
use crate::timefreq::stft;
use crate::weights::Weight;

/// Stopping rules for the greedy pursuit; `None` selects the defaults
/// `tol = 1e-8 |f|_2` and `max_atoms = 4 N^{2d}`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct AtomicOptions {
    pub max_atoms: Option<usize>,
    pub tol: Option<f64>,
}

/// `f = sum_n a_n pi(X_n) psi + residual`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicRep {
    pub atoms: Vec<(Complex64, PhasePoint)>,
    pub window: Signal,
    pub residual: Signal,
}

impl AtomicRep {
    /// `sum_n a_n pi(X_n) psi + residual`.
    pub fn reconstruct(&self) -> Signal {
        let grid = self.window.grid();
        let roots = grid.roots();
        let mut out = self.residual.values().to_vec();
        for &(a, x) in &self.atoms {
            let atom = tf_shift_with(&self.window, x, &roots);
            for (o, v) in out.iter_mut().zip(atom.values()) {
                *o += a * v;
            }
        }
        Signal::new(grid, out).expect("finite sum of finite signals")
    }

    /// `(sum |a_n w(X_n)|^p)^{1/p}`.
    pub fn coefficient_norm(&self, p: Exponent, w: &Weight) -> f64 {
        let grid = self.window.grid();
        let mags: Vec<f64> = self
            .atoms
            .iter()
            .map(|(a, x)| a.norm() * w.at(x.phase_index(&grid)))
            .collect();
        pnorm(&mags, p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomicBound {
    /// Reported upper bound for the atomic quasi-norm.
    pub bound: f64,
    /// Coefficient quasi-norm of the pursuit atoms.
    pub pursuit_bound: f64,
    /// Value of the lattice expansion `f = D_psi C_gamma f`.
    pub lattice_bound: f64,
    pub converged: bool,
    pub steps: usize,
    /// Representation realizing `bound`.
    pub rep: AtomicRep,
}

fn lattice_rep(f: &Signal, sys: &GaborSystem) -> Result<AtomicRep> {
    let gamma = sys.canonical_dual()?;
    let lat = sys.lattice();
    let coeffs = analysis_with(f, gamma, lat)?;
    let atoms: Vec<(Complex64, PhasePoint)> = coeffs
        .into_iter()
        .enumerate()
        .map(|(l, c)| (c, lat.point(l)))
        .collect();
    let mut rep = AtomicRep {
        atoms,
        window: sys.window().clone(),
        residual: Signal::zeros(f.grid()),
    };
    rep.residual = f.sub(&rep.reconstruct())?;
    Ok(rep)
}

/// Upper bound for `inf { (sum |a_n w(X_n)|^p)^{1/p} : f = sum a_n pi(X_n) psi }`.
///
/// Greedy matching pursuit over every phase point (ties go to the lowest
/// phase index), compared with the lattice expansion `f = D_psi C_gamma f`.
/// The pursuit stops once the residual is below `tol`; the residual is kept
/// in the representation. If it never gets there, the lattice value is
/// returned and `converged` is `false`.
pub fn atomic_norm_upper(
    f: &Signal,
    sys: &GaborSystem,
    p: Exponent,
    w: &Weight,
    opts: AtomicOptions,
) -> Result<AtomicBound> {
    let psi = sys.window();
    let grid = psi.grid();
    check_same_grid(f.grid(), grid)?;
    if w.domain() != grid.phase_domain() {
        return Err(Error::GridMismatch(
            "weight must live on the phase space of the signal grid".into(),
        ));
    }
    sys.canonical_dual()?;
    let m = grid.len();
    let tol = opts.tol.unwrap_or(1e-8 * f.norm());
    let max_atoms = opts.max_atoms.unwrap_or(4 * m * m);
    let roots = grid.roots();
    let unscale = (m as f64).sqrt() / psi.norm_sqr();

    let mut residual = f.clone();
    let mut coeffs: BTreeMap<usize, Complex64> = BTreeMap::new();
    let mut steps = 0;
    while steps < max_atoms && residual.norm() > tol {
        let v = stft(&residual, psi)?;
        let mut best = 0;
        let mut best_abs = -1.0;
        for (i, val) in v.values().iter().enumerate() {
            let a = val.norm();
            if a > best_abs {
                best_abs = a;
                best = i;
            }
        }
        let x = PhasePoint::from_phase_index(&grid, best);
        let a = v.values()[best] * unscale;
        let atom = tf_shift_with(psi, x, &roots);
        let next: Vec<Complex64> = residual
            .values()
            .iter()
            .zip(atom.values())
            .map(|(r, s)| r - a * s)
            .collect();
        residual = Signal::new(grid, next)?;
        *coeffs.entry(best).or_default() += a;
        steps += 1;
    }
    let converged = residual.norm() <= tol;
    let pursuit = AtomicRep {
        atoms: coeffs
            .into_iter()
            .map(|(i, c)| (c, PhasePoint::from_phase_index(&grid, i)))
            .collect(),
        window: psi.clone(),
        residual,
    };
    let pursuit_bound = pursuit.coefficient_norm(p, w);

    let lattice = lattice_rep(f, sys)?;
    let lattice_bound = lattice.coefficient_norm(p, w);

    let (bound, rep) = if converged && pursuit_bound <= lattice_bound {
        (pursuit_bound, pursuit)
    } else {
        (lattice_bound, lattice)
    };
    Ok(AtomicBound {
        bound,
        pursuit_bound,
        lattice_bound,
        converged,
        steps,
        rep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gabor::GaborLattice;
    use crate::lattice::{tf_shift, Grid};
    use crate::rng::SplitMix64;
    use crate::weights::{standard_weight, WeightKind};

    fn system(n: usize, a: usize, b: usize) -> GaborSystem {
        let g = Grid::new(n, 1).unwrap();
        GaborSystem::new(Signal::gaussian(g), GaborLattice::new(g, a, b).unwrap()).unwrap()
    }

    #[test]
    fn single_atom_target() {
        let sys = system(8, 2, 2);
        let g = sys.grid();
        let w = standard_weight(WeightKind::Polynomial(1.0), g.phase_domain());
        let x0 = PhasePoint { x: 3, xi: 5 };
        let f = tf_shift(sys.window(), x0).scale(Complex64::new(3.0, 0.0));
        let r = atomic_norm_upper(&f, &sys, Exponent::half(), &w, AtomicOptions::default()).unwrap();
        assert_eq!(r.steps, 1);
        assert!(r.converged);
        let expect = 3.0 * w.at(x0.phase_index(&g));
        assert!(r.bound <= expect * (1.0 + 1e-8));
        assert!(r.rep.reconstruct().max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn zero_target() {
        let sys = system(8, 2, 2);
        let w = Weight::constant(sys.grid().phase_domain());
        let r = atomic_norm_upper(&Signal::zeros(sys.grid()), &sys, Exponent::one(), &w, AtomicOptions::default())
            .unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.steps, 0);
    }

    #[test]
    fn representation_is_exact_and_bound_is_minimum() {
        let sys = system(8, 2, 2);
        let g = sys.grid();
        let w = standard_weight(WeightKind::Polynomial(0.5), g.phase_domain());
        let mut rng = SplitMix64::new(51);
        for max_atoms in [Some(3), None] {
            let f = Signal::random(g, &mut rng);
            let opts = AtomicOptions { max_atoms, tol: None };
            let r = atomic_norm_upper(&f, &sys, Exponent::half(), &w, opts).unwrap();
            assert!(r.rep.reconstruct().max_abs_diff(&f) < 1e-10);
            assert!(r.bound <= r.lattice_bound);
            assert!((r.rep.coefficient_norm(Exponent::half(), &w) - r.bound).abs() < 1e-12 * r.bound);
            if max_atoms == Some(3) {
                assert!(!r.converged);
                assert_eq!(r.bound, r.lattice_bound);
            }
        }
    }

    #[test]
    fn rejects_non_frames() {
        let g = Grid::new(4, 1).unwrap();
        let sys = GaborSystem::new(Signal::gaussian(g), GaborLattice::new(g, 4, 4).unwrap()).unwrap();
        let w = Weight::constant(g.phase_domain());
        let f = Signal::delta(g, 0);
        assert!(matches!(
            atomic_norm_upper(&f, &sys, Exponent::one(), &w, AtomicOptions::default()),
            Err(Error::NotAFrame { .. })
        ));
    }
}
