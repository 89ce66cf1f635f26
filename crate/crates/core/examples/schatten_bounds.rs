//! Certified approximation numbers and Schatten quasi-norm bounds between
//! weighted sequence spaces.
//!
//! ```bash
//! cargo run -p tfq --example schatten_bounds
//! ```

use num_complex::Complex64;
use tfq::linalg::CMatrix;
use tfq::opnorms::{approx_numbers_upper, pqr_condition, schatten_upper, SpaceKind, SpaceSpec};
use tfq::rng::SplitMix64;
use tfq::spaces::Exponent;

fn main() -> tfq::Result<()> {
    let diag = CMatrix::from_fn(2, 2, |i, j| {
        Complex64::new(if i == j { [3.0, 1.0][i] } else { 0.0 }, 0.0)
    });
    let linf = SpaceSpec::unweighted(SpaceKind::Linf, 2);
    let l1 = SpaceSpec::unweighted(SpaceKind::Lp(Exponent::one()), 2);
    println!("diag(3,1) linf -> l1: sigma <= {:?}", approx_numbers_upper(&diag, &linf, &l1, 3)?);

    let mut rng = SplitMix64::new(3);
    let t = CMatrix::from_fn(6, 6, |_, _| rng.complex_normal());
    let w: Vec<f64> = (0..6).map(|k| 1.0 + k as f64).collect();
    let l2 = SpaceSpec::lp(Exponent::two(), w.clone())?;
    for q in [Exponent::new(2, 3)?, Exponent::one(), Exponent::two()] {
        let rep = schatten_upper(&t, &l2, &l2, q)?;
        println!(
            "l2_(w) -> l2_(w), q={q}: bound {:.4} exact {:.4}",
            rep.schatten_q_upper.unwrap_or(f64::NAN),
            rep.schatten_q_exact.unwrap_or(f64::NAN),
        );
    }

    for (p, q, r) in [("1", "inf", "1"), ("2", "2", "2/3"), ("2", "2", "1")] {
        let c = pqr_condition(p.parse()?, q.parse()?, r.parse()?);
        println!("exponents ({p}, {q}, {r}): holds={} slack={}", c.holds, c.slack);
    }
    Ok(())
}
