//! Weighted modulation quasi-norms, their lattice discretization, and the
//! p-triangle inequality for p < 1.
//!
//! ```bash
//! cargo run -p tfq --example modnorm
//! ```

use tfq::gabor::{GaborLattice, GaborSystem};
use tfq::lattice::{Grid, Signal};
use tfq::rng::SplitMix64;
use tfq::spaces::{lattice_modnorm, modnorm, Exponent, ModSpec};
use tfq::weights::{standard_weight, WeightKind};

fn main() -> tfq::Result<()> {
    let grid = Grid::new(16, 1)?;
    let mut rng = SplitMix64::new(1);
    let f = Signal::random(grid, &mut rng);
    let g = Signal::random(grid, &mut rng);
    let omega = standard_weight(WeightKind::Polynomial(1.0), grid.phase_domain());
    let sys = GaborSystem::new(Signal::gaussian(grid), GaborLattice::new(grid, 2, 2)?)?;

    for p in [Exponent::new(1, 2)?, Exponent::one(), Exponent::two(), Exponent::Infinite] {
        let spec = ModSpec::new(p, p, omega.clone(), Signal::gaussian(grid))?;
        let full = modnorm(&f, &spec)?;
        let lattice = lattice_modnorm(&f, &sys, p, p, &omega)?;
        println!("p={p:<4} |f|_M={full:.6e} lattice={lattice:.6e} ratio={:.4}", lattice / full);
    }

    let half = Exponent::half();
    let spec = ModSpec::new(half, half, omega, Signal::gaussian(grid))?;
    let s = half.value();
    let lhs = modnorm(&f.add(&g)?, &spec)?.powf(s);
    let rhs = modnorm(&f, &spec)?.powf(s) + modnorm(&g, &spec)?.powf(s);
    println!("p=1/2 triangle: |f+g|^p = {lhs:.6e} <= {rhs:.6e}");
    Ok(())
}
