//! Kohn-Nirenberg and Weyl quantization: kernels, changes of quantization and
//! rank-one operators from cross Wigner distributions.
//!
//! ```bash
//! cargo run -p tfq --example quantization
//! ```

use tfq::lattice::{inner, Grid, Signal};
use tfq::quant::{apply_op, change_quantization, kernel_of_symbol, QuantMatrix};
use tfq::rng::SplitMix64;
use tfq::timefreq::{cross_wigner_a, PhaseArray};

fn main() -> tfq::Result<()> {
    let grid = Grid::new(5, 1)?;
    let mut rng = SplitMix64::new(7);
    let symbol = PhaseArray::new(grid, rng.complex_vec(25))?;
    let weyl = QuantMatrix::weyl();
    let kn = QuantMatrix::zero();

    let as_weyl = change_quantization(&symbol, &kn, &weyl)?;
    let f = Signal::random(grid, &mut rng);
    let a = apply_op(&symbol, &kn, &f)?;
    let b = apply_op(&as_weyl, &weyl, &f)?;
    println!("Op_0(a) f vs Op_(1/2)(a') f: {:.2e}", a.max_abs_diff(&b));

    let k = kernel_of_symbol(&symbol, &kn)?;
    println!("kernel is {}x{}", k.entries().nrows(), k.entries().ncols());

    let (f1, f2, g) = (
        Signal::random(grid, &mut rng),
        Signal::random(grid, &mut rng),
        Signal::random(grid, &mut rng),
    );
    for (name, q) in [("0", QuantMatrix::zero()), ("1/2", weyl), ("I", QuantMatrix::identity())] {
        let w = cross_wigner_a(&f1, &f2, &q)?;
        let lhs = apply_op(&w, &q, &g)?;
        let rhs = f1.scale(inner(&g, &f2)? / 5f64.sqrt());
        println!("A={name:<3} rank-one identity error {:.2e}", lhs.max_abs_diff(&rhs));
    }
    Ok(())
}
