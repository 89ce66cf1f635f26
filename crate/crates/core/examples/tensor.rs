//! Projective tensor bounds on Z_N^2 from the singular value decomposition.
//!
//! ```bash
//! cargo run -p tfq --example tensor
//! ```

use tfq::lattice::{Grid, Signal};
use tfq::rng::SplitMix64;
use tfq::spaces::{modnorm, tensor_norm_upper_with, Exponent, ModSpec};
use tfq::weights::{standard_weight, Weight, WeightKind};

fn main() -> tfq::Result<()> {
    let (g1, g2) = (Grid::new(8, 1)?, Grid::new(8, 2)?);
    let v1 = standard_weight(WeightKind::Polynomial(1.0), g1.phase_domain());
    let v = Weight::phase_tensor(&v1, &v1)?;
    let p = Exponent::one();
    let spec = ModSpec::new(p, p, v, Signal::gaussian(g2))?;
    let mut rng = SplitMix64::new(9);

    let (a, b) = (Signal::random(g1, &mut rng), Signal::random(g1, &mut rng));
    let rank_one = a.tensor(&b)?;
    let t = tensor_norm_upper_with(&rank_one, p, &v1, &v1, &Signal::gaussian(g1))?;
    let rest = t.singular_values[1..].iter().fold(0.0f64, |m, s| m.max(*s));
    println!("f (x) g: leading singular value {:.4}, rest <= {rest:.1e}, bound {:.6}", t.singular_values[0], t.bound);

    let f = Signal::random(g2, &mut rng);
    let t = tensor_norm_upper_with(&f, p, &v1, &v1, &Signal::gaussian(g1))?;
    println!(
        "random F: {} terms, bound {:.4e}, |F|_M {:.4e}",
        t.singular_values.len(),
        t.bound,
        modnorm(&f, &spec)?
    );
    Ok(())
}
