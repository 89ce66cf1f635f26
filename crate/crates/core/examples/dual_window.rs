//! Canonical dual windows of Gaussian Gabor systems at several redundancies.
//!
//! ```bash
//! cargo run -p tfq --example dual_window
//! ```

use tfq::gabor::{dual_residual, wexler_raz_residual, GaborLattice, GaborSystem};
use tfq::lattice::{Grid, Signal};
use tfq::Error;

fn main() -> tfq::Result<()> {
    let grid = Grid::new(16, 1)?;
    let phi = Signal::gaussian(grid);
    for (a, b) in [(1, 1), (2, 2), (4, 2), (4, 4), (8, 4)] {
        let lattice = GaborLattice::new(grid, a, b)?;
        match GaborSystem::new(phi.clone(), lattice.clone()).and_then(|sys| {
            let gamma = sys.canonical_dual()?.clone();
            Ok((sys, gamma))
        }) {
            Ok((sys, gamma)) => {
                let (lo, hi) = sys.frame_bounds();
                println!(
                    "a={a} b={b} redundancy={:.2} bounds=[{lo:.4}, {hi:.4}] dual residual={:.1e} Wexler-Raz={:.1e}",
                    lattice.redundancy(),
                    dual_residual(&phi, &gamma, &lattice)?,
                    wexler_raz_residual(&phi, &gamma, &lattice)?,
                );
            }
            Err(e @ Error::NotAFrame { .. }) => println!("a={a} b={b}: {e}"),
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
