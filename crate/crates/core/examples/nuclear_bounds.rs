//! Nuclear bounds from the elementary decomposition, compared with the trace norm.
//!
//! ```bash
//! cargo run -p tfq --example nuclear_bounds
//! ```

use tfq::linalg::{singular_values, CMatrix};
use tfq::opnorms::{compose_check_hilbert, nuclear_upper, SpaceKind, SpaceSpec};
use tfq::rng::SplitMix64;
use tfq::spaces::Exponent;

fn main() -> tfq::Result<()> {
    let mut rng = SplitMix64::new(11);
    let l2 = SpaceSpec::unweighted(SpaceKind::Lp(Exponent::two()), 8);
    for _ in 0..4 {
        let t = CMatrix::from_fn(8, 8, |_, _| rng.complex_normal());
        let rep = nuclear_upper(&t, &l2, &l2, Exponent::one())?;
        let trace: f64 = singular_values(&t).iter().sum();
        let bound = rep.nuclear_r_upper.unwrap_or(f64::NAN);
        println!(
            "bound {bound:.4} trace norm {trace:.4} factor {:.3} ({} terms)",
            bound / trace,
            rep.decomposition.len()
        );
    }

    let (t1, t, t2) = (
        CMatrix::from_fn(4, 4, |_, _| rng.complex_normal()),
        CMatrix::from_fn(4, 4, |_, _| rng.complex_normal()),
        CMatrix::from_fn(4, 4, |_, _| rng.complex_normal()),
    );
    let c = compose_check_hilbert(&t1, &t, &t2, Exponent::one())?;
    println!("|T2 T T1|_1 = {:.4} <= {:.4}: {}", c.composed, c.bound, c.holds);
    Ok(())
}
