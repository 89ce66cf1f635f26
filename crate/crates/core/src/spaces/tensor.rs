use serde::Serialize;

use super::{modnorm, pnorm, Exponent, ModSpec};
use crate::error::{Error, Result};
use crate::lattice::{Grid, Signal};
use crate::linalg::CMatrix;
use crate::weights::Weight;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorBound {
    pub bound: f64,
    pub singular_values: Vec<f64>,
    /// `(|f_{1,j}|_{M^p_{(v1)}}, |f_{2,j}|_{M^p_{(v2)}})` for each rank-one term.
    pub factor_norms: Vec<(f64, f64)>,
}

/// Upper bound for the projective tensor quasi-norm of `F` on `Z_N^2`, from the
/// singular value decomposition `F = sum_j f_{1,j} (x) f_{2,j}`; Gaussian window.
pub fn tensor_norm_upper(f: &Signal, p: Exponent, v1: &Weight, v2: &Weight) -> Result<f64> {
    let g1 = Grid::new(f.grid().n(), 1)?;
    Ok(tensor_norm_upper_with(f, p, v1, v2, &Signal::gaussian(g1))?.bound)
}

/// `(sum_j |f_{1,j}|^p_{M^p_{(v1)}} |f_{2,j}|^p_{M^p_{(v2)}})^{1/p}`.
pub fn tensor_norm_upper_with(
    f: &Signal,
    p: Exponent,
    v1: &Weight,
    v2: &Weight,
    window: &Signal,
) -> Result<TensorBound> {
    let grid = f.grid();
    if grid.d() != 2 {
        return Err(Error::GridMismatch("tensor norm needs a signal on Z_N^2".into()));
    }
    let n = grid.n();
    let g1 = Grid::new(n, 1)?;
    if window.grid() != g1 {
        return Err(Error::GridMismatch("window must live on Z_N".into()));
    }
    let s1 = ModSpec::new(p, p, v1.clone(), window.clone())?;
    let s2 = ModSpec::new(p, p, v2.clone(), window.clone())?;
    let mat = CMatrix::from_fn(n, n, |i, j| f.values()[i * n + j]);
    let svd = mat.svd(true, true);
    let u = svd.u.expect("requested");
    let vt = svd.v_t.expect("requested");
    let mut singular_values = Vec::new();
    let mut factor_norms = Vec::new();
    for (j, &s) in svd.singular_values.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        let f1 = Signal::new(g1, (0..n).map(|i| u[(i, j)] * s).collect())?;
        let f2 = Signal::new(g1, (0..n).map(|i| vt[(j, i)]).collect())?;
        singular_values.push(s);
        factor_norms.push((modnorm(&f1, &s1)?, modnorm(&f2, &s2)?));
    }
    let products: Vec<f64> = factor_norms.iter().map(|(a, b)| a * b).collect();
    Ok(TensorBound {
        bound: pnorm(&products, p),
        singular_values,
        factor_norms,
    })
}
