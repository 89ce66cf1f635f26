//! Standard weights, moderateness certificates and the quantization transform.
//!
//! ```bash
//! cargo run -p tfq --example weights
//! ```

use tfq::lattice::Domain;
use tfq::quant::QuantMatrix;
use tfq::weights::{
    moderateness_constant, standard_weight, submultiplicativity_check, weight_transform_a,
    WeightKind,
};

fn main() -> tfq::Result<()> {
    let dom = Domain::new(8, 2)?;
    let pairs = [
        (WeightKind::Polynomial(1.0), WeightKind::Polynomial(1.0)),
        (WeightKind::Polynomial(2.0), WeightKind::Polynomial(1.0)),
        (WeightKind::Exponential(1.0), WeightKind::Exponential(0.5)),
    ];
    for (wk, vk) in pairs {
        let w = standard_weight(wk, dom);
        let v = standard_weight(vk, dom);
        let c = moderateness_constant(&w, &v)?;
        println!(
            "{wk:?} against {vk:?}: C = {:.6} (witness {:?}, exhaustive {})",
            c.constant, c.witness, c.exhaustive
        );
    }

    let v = standard_weight(WeightKind::Polynomial(1.0), dom);
    let report = submultiplicativity_check(&v)?;
    println!("polynomial(1) even={} C(v,v)={:.6}", report.even, report.certificate.constant);

    let w = standard_weight(WeightKind::Polynomial(1.0), Domain::new(5, 4)?);
    let moved = weight_transform_a(&w, &QuantMatrix::weyl())?;
    let c = moderateness_constant(&moved, &w)?;
    println!("Weyl transform of polynomial(1) on Z_5^4: C(w_A, w) = {:.6}", c.constant);
    Ok(())
}
