//! Atomic decompositions by matching pursuit against the lattice expansion.
//!
//! ```bash
//! cargo run -p tfq --example atomic
//! ```

use num_complex::Complex64;
use tfq::gabor::{GaborLattice, GaborSystem};
use tfq::lattice::{tf_shift, Grid, PhasePoint, Signal};
use tfq::rng::SplitMix64;
use tfq::spaces::{atomic_norm_upper, modnorm, AtomicOptions, Exponent, ModSpec};
use tfq::weights::{standard_weight, WeightKind};

fn main() -> tfq::Result<()> {
    let grid = Grid::new(16, 1)?;
    let psi = Signal::gaussian(grid);
    let sys = GaborSystem::new(psi.clone(), GaborLattice::new(grid, 4, 2)?)?;
    let w = standard_weight(WeightKind::Polynomial(1.0), grid.phase_domain());
    let p = Exponent::half();

    let x0 = PhasePoint::new(&grid, &[3], &[-2])?;
    let sparse = tf_shift(&psi, x0)
        .scale(Complex64::new(3.0, 0.0))
        .add(&tf_shift(&psi, PhasePoint::new(&grid, &[-5], &[4])?))?;
    let b = atomic_norm_upper(&sparse, &sys, p, &w, AtomicOptions::default())?;
    println!(
        "two-atom signal: bound {:.4} after {} steps (pursuit {:.4}, lattice {:.4})",
        b.bound, b.steps, b.pursuit_bound, b.lattice_bound
    );

    let spec = ModSpec::new(p, p, w.clone(), psi)?;
    let mut rng = SplitMix64::new(5);
    for _ in 0..3 {
        let f = Signal::random(grid, &mut rng);
        let b = atomic_norm_upper(&f, &sys, p, &w, AtomicOptions::default())?;
        println!(
            "random signal: bound {:.4e} |f|_M {:.4e} converged {}",
            b.bound,
            modnorm(&f, &spec)?,
            b.converged
        );
    }
    Ok(())
}
