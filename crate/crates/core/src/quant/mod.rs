//! Pseudo-differential quantizations `Op_A(a)` on `Z_N^d`.
//!
//! A symbol `a` on phase space determines the kernel
//! `K(m, n) = N^{-d/2} (F_2^{-1} a)(m - A(m - n), m - n)`, where `F_2^{-1}` is the
//! unitary inverse DFT in the frequency slot. For every integer `A` the change
//! of variables `(m, n) <-> (m - A(m - n), m - n)` is a bijection of
//! `(Z_N^d)^2`, so symbols and kernels correspond one to one and changing the
//! quantization is a kernel round trip.

mod matrix;

pub use matrix::{QuantMatrix, ResolvedQuant};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_same_grid, FourierPlan, Grid, Signal};
use crate::linalg::{CMatrix, CVector};
use crate::timefreq::{cross_wigner_a, PhaseArray};

/// Kernel of a linear map from signals on `col_grid` to signals on `row_grid`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    row_grid: Grid,
    col_grid: Grid,
    entries: CMatrix,
}

impl KernelMatrix {
    pub fn new(row_grid: Grid, col_grid: Grid, entries: CMatrix) -> Result<Self> {
        if entries.nrows() != row_grid.len() || entries.ncols() != col_grid.len() {
            return Err(Error::LengthMismatch {
                expected: row_grid.len() * col_grid.len(),
                got: entries.nrows() * entries.ncols(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(0));
        }
        Ok(KernelMatrix {
            row_grid,
            col_grid,
            entries,
        })
    }

    pub fn square(grid: Grid, entries: CMatrix) -> Result<Self> {
        Self::new(grid, grid, entries)
    }

    pub fn row_grid(&self) -> Grid {
        self.row_grid
    }

    pub fn col_grid(&self) -> Grid {
        self.col_grid
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn apply(&self, f: &Signal) -> Result<Signal> {
        check_same_grid(f.grid(), self.col_grid)?;
        let v = &self.entries * CVector::from_column_slice(f.values());
        Signal::new(self.row_grid, v.iter().copied().collect())
    }

    /// The kernel viewed as a signal on `Z_N^{d2 + d1}` (rows major); needs `d1 + d2 <= 2`.
    pub fn to_signal(&self) -> Result<Signal> {
        let grid = Grid::new(self.row_grid.n(), self.row_grid.d() + self.col_grid.d())?;
        let (r, c) = self.entries.shape();
        Signal::new(grid, (0..r * c).map(|i| self.entries[(i / c, i % c)]).collect())
    }
}

/// `K(m, n) = N^{-d/2} (F_2^{-1} a)(m - A(m - n), m - n)`.
pub fn kernel_of_symbol(a: &PhaseArray, quant: &QuantMatrix) -> Result<KernelMatrix> {
    let grid = a.grid();
    let q = quant.resolve(grid.domain())?;
    let m = grid.len();
    let plan = FourierPlan::new(grid);
    let mut b = a.values().to_vec();
    for row in b.chunks_exact_mut(m) {
        plan.inverse_in_place(row);
    }
    let scale = (m as f64).powf(-0.5);
    let entries = CMatrix::from_fn(m, m, |row, col| {
        let y = grid.sub(row, col);
        let x = grid.sub(row, q.apply(y));
        b[x * m + y] * scale
    });
    Ok(KernelMatrix {
        row_grid: grid,
        col_grid: grid,
        entries,
    })
}

/// Exact inverse of [`kernel_of_symbol`].
pub fn symbol_of_kernel(k: &KernelMatrix, quant: &QuantMatrix) -> Result<PhaseArray> {
    if k.row_grid != k.col_grid {
        return Err(Error::GridMismatch("symbol_of_kernel needs a square kernel".into()));
    }
    let grid = k.row_grid;
    let q = quant.resolve(grid.domain())?;
    let m = grid.len();
    let plan = FourierPlan::new(grid);
    let scale = (m as f64).sqrt();
    let mut b = vec![Complex64::new(0.0, 0.0); m * m];
    for (x, row) in b.chunks_exact_mut(m).enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            let r = grid.add(x, q.apply(y));
            let c = grid.sub(r, y);
            *v = k.entries[(r, c)] * scale;
        }
        plan.forward_in_place(row);
    }
    PhaseArray::new(grid, b)
}

/// `Op_A(a) f`.
pub fn apply_op(a: &PhaseArray, quant: &QuantMatrix, f: &Signal) -> Result<Signal> {
    check_same_grid(a.grid(), f.grid())?;
    kernel_of_symbol(a, quant)?.apply(f)
}

/// Symbol `a2` with `Op_{A2}(a2) = Op_{A1}(a1)`.
pub fn change_quantization(
    a1: &PhaseArray,
    from: &QuantMatrix,
    to: &QuantMatrix,
) -> Result<PhaseArray> {
    symbol_of_kernel(&kernel_of_symbol(a1, from)?, to)
}

/// `W^A_{f1,f2}`, whose quantization is the rank-one map `g -> N^{-d/2} <g, f2> f1`.
pub fn rank_one_symbol(f1: &Signal, f2: &Signal, quant: &QuantMatrix) -> Result<PhaseArray> {
    cross_wigner_a(f1, f2, quant)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PadSide {
    Row,
    Col,
}

/// Tensor-pad the lower-dimensional variable of a `d1 -> d2` kernel with `phi` so the
/// kernel becomes square: `K0(x, (y, y0)) = K(x, y) phi(y0)` for `Col`,
/// `K0((x, x0), y) = K(x, y) phi(x0)` for `Row`.
pub fn pad_kernel(k: &KernelMatrix, phi: &Signal, side: PadSide) -> Result<KernelMatrix> {
    let (d2, d1) = (k.row_grid.d(), k.col_grid.d());
    if d1 == d2 {
        return Ok(k.clone());
    }
    if phi.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let n = k.row_grid.n();
    let expected = match side {
        PadSide::Col if d2 > d1 => d2 - d1,
        PadSide::Row if d1 > d2 => d1 - d2,
        _ => {
            return Err(Error::Precondition(format!(
                "cannot pad {side:?} of a {d1} -> {d2} kernel"
            )))
        }
    };
    if phi.grid() != Grid::new(n, expected)? {
        return Err(Error::GridMismatch(format!(
            "padding window must live on Z_{n}^{expected}"
        )));
    }
    let p = phi.grid().len();
    let pv = phi.values();
    let e = &k.entries;
    let (entries, grid) = match side {
        PadSide::Col => (
            CMatrix::from_fn(e.nrows(), e.ncols() * p, |r, c| e[(r, c / p)] * pv[c % p]),
            k.row_grid,
        ),
        PadSide::Row => (
            CMatrix::from_fn(e.nrows() * p, e.ncols(), |r, c| e[(r / p, c)] * pv[r % p]),
            k.col_grid,
        ),
    };
    KernelMatrix::new(grid, grid, entries)
}

#[derive(Serialize, Deserialize)]
struct GridJson {
    #[serde(rename = "N")]
    n: usize,
    d: usize,
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    rows: usize,
    cols: usize,
    row_grid: GridJson,
    col_grid: GridJson,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for KernelMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (r, c) = self.entries.shape();
        let flat: Vec<Complex64> = (0..r * c).map(|i| self.entries[(i / c, i % c)]).collect();
        KernelJson {
            rows: r,
            cols: c,
            row_grid: GridJson {
                n: self.row_grid.n(),
                d: self.row_grid.d(),
            },
            col_grid: GridJson {
                n: self.col_grid.n(),
                d: self.col_grid.d(),
            },
            re: flat.iter().map(|v| v.re).collect(),
            im: flat.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KernelMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = KernelJson::deserialize(d)?;
        if raw.re.len() != raw.rows * raw.cols || raw.im.len() != raw.re.len() {
            return Err(D::Error::custom("kernel data does not match its shape header"));
        }
        let rg = Grid::new(raw.row_grid.n, raw.row_grid.d).map_err(D::Error::custom)?;
        let cg = Grid::new(raw.col_grid.n, raw.col_grid.d).map_err(D::Error::custom)?;
        let entries = CMatrix::from_fn(raw.rows, raw.cols, |r, c| {
            let i = r * raw.cols + c;
            Complex64::new(raw.re[i], raw.im[i])
        });
        KernelMatrix::new(rg, cg, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{dft, inner};
    use crate::linalg::{frobenius, singular_values};
    use crate::rng::SplitMix64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_symbol(grid: Grid, rng: &mut SplitMix64) -> PhaseArray {
        PhaseArray::new(grid, rng.complex_vec(grid.len() * grid.len())).unwrap()
    }

    fn random_signal(grid: Grid, rng: &mut SplitMix64) -> Signal {
        Signal::new(grid, rng.complex_vec(grid.len())).unwrap()
    }

    /// `N^{-d} sum_n sum_xi a(m - A(m - n), xi) f(n) e^{2 pi i <m - n, xi> / N}`.
    fn apply_direct(a: &PhaseArray, s: i64, f: &Signal) -> Signal {
        let g = f.grid();
        let n = g.n() as i64;
        let roots = g.roots();
        Signal::from_fn(g, |m| {
            let mut acc = c(0.0);
            for k in 0..g.len() {
                let y = g.sub(m, k);
                let x = (m as i64 - s * y as i64).rem_euclid(n) as usize;
                for xi in 0..g.len() {
                    acc += a.values()[x * g.len() + xi] * f.values()[k] * roots.get(y * xi);
                }
            }
            acc / g.len() as f64
        })
    }

    #[test]
    fn constant_symbol_is_identity() {
        let g = Grid::new(4, 1).unwrap();
        let one = PhaseArray::from_fn(g, |_, _| c(1.0));
        let k = kernel_of_symbol(&one, &QuantMatrix::zero()).unwrap();
        assert!((k.entries() - CMatrix::identity(4, 4)).camax() < 1e-15);
        let back = symbol_of_kernel(&k, &QuantMatrix::zero()).unwrap();
        assert!(back.max_abs_diff(&one) < 1e-15);
    }

    #[test]
    fn multiplication_symbol_is_diagonal() {
        let g = Grid::new(4, 1).unwrap();
        let h = [1.0, -2.0, 0.5, 3.0];
        let a = PhaseArray::from_fn(g, |x, _| c(h[x]));
        let k = kernel_of_symbol(&a, &QuantMatrix::zero()).unwrap();
        assert!((k.entries() - crate::linalg::diag(&h)).camax() < 1e-15);
        let back = symbol_of_kernel(&k, &QuantMatrix::zero()).unwrap();
        assert!(back.max_abs_diff(&a) < 1e-15);
    }

    #[test]
    fn kohn_nirenberg_matches_fourier_sum() {
        let g = Grid::new(4, 1).unwrap();
        let mut rng = SplitMix64::new(11);
        let a = random_symbol(g, &mut rng);
        let f = random_signal(g, &mut rng);
        let fhat = dft(&f);
        let roots = g.roots();
        let expect = Signal::from_fn(g, |m| {
            (0..4)
                .map(|xi| a.values()[m * 4 + xi] * fhat.values()[xi] * roots.get(m * xi))
                .sum::<Complex64>()
                * 0.5
        });
        let got = apply_op(&a, &QuantMatrix::zero(), &f).unwrap();
        assert!(got.max_abs_diff(&expect) < 1e-12);
    }

    #[test]
    fn kernel_matches_double_sum() {
        let g = Grid::new(8, 1).unwrap();
        let mut rng = SplitMix64::new(12);
        for s in [0i64, 1, 3] {
            let a = random_symbol(g, &mut rng);
            let f = random_signal(g, &mut rng);
            let got = apply_op(&a, &QuantMatrix::scalar(s, 1), &f).unwrap();
            assert!(got.max_abs_diff(&apply_direct(&a, s, &f)) < 1e-10);
        }
    }

    #[test]
    fn fourier_multiplier_projection() {
        let g = Grid::new(4, 1).unwrap();
        let a = PhaseArray::from_fn(g, |_, xi| c(if xi == 0 { 1.0 } else { 0.0 }));
        let f = Signal::from_real(g, &[1.0, 2.0, 3.0, 6.0]).unwrap();
        let p = apply_op(&a, &QuantMatrix::zero(), &f).unwrap();
        for v in p.values() {
            assert!((v - c(3.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn weyl_round_trip_and_hilbert_schmidt() {
        let g = Grid::new(5, 1).unwrap();
        let mut rng = SplitMix64::new(13);
        let k = KernelMatrix::square(g, CMatrix::from_fn(5, 5, |_, _| rng.complex_normal())).unwrap();
        let a = symbol_of_kernel(&k, &QuantMatrix::scalar(3, 1)).unwrap();
        let back = kernel_of_symbol(&a, &QuantMatrix::weyl()).unwrap();
        assert!((back.entries() - k.entries()).camax() < 1e-12);
        // ||K||_F = N^{-d/2} ||a||_2
        assert!((frobenius(k.entries()) - a.norm() / 5f64.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn change_quantization_examples() {
        let g = Grid::new(5, 1).unwrap();
        let mut rng = SplitMix64::new(14);
        let a = random_symbol(g, &mut rng);
        let same = change_quantization(&a, &QuantMatrix::weyl(), &QuantMatrix::weyl()).unwrap();
        assert!(same.max_abs_diff(&a) < 1e-12);
        let one = PhaseArray::from_fn(g, |_, _| c(1.0));
        let t = change_quantization(&one, &QuantMatrix::zero(), &QuantMatrix::weyl()).unwrap();
        assert!(t.max_abs_diff(&one) < 1e-12);

        // exponential symbol picks up a unimodular constant, compared with a brute-force
        // kernel computation and with the closed form e^{-2 pi i u v (A2 - A1) / N}
        let (u, v) = (2usize, 3usize);
        let roots = g.roots();
        let e = PhaseArray::from_fn(g, |x, xi| roots.get(u * x + v * xi));
        let e2 = change_quantization(&e, &QuantMatrix::zero(), &QuantMatrix::weyl()).unwrap();
        let ratio = e2.values()[0] / e.values()[0];
        assert!((ratio.norm() - 1.0).abs() < 1e-12);
        for (p, q) in e2.values().iter().zip(e.values()) {
            assert!((p - ratio * q).norm() < 1e-12);
        }
        let k1 = KernelMatrix::square(
            g,
            CMatrix::from_fn(5, 5, |m, n| {
                let f = Signal::delta(g, n);
                apply_direct(&e, 0, &f).values()[m]
            }),
        )
        .unwrap();
        let k2 = kernel_of_symbol(&e2, &QuantMatrix::weyl()).unwrap();
        assert!((k1.entries() - k2.entries()).camax() < 1e-12);
        let expect = roots.get_conj((u * v * 3) % 5);
        assert!((ratio - expect).norm() < 1e-12);
    }

    #[test]
    fn rank_one_examples() {
        let g = Grid::new(4, 1).unwrap();
        let d = Signal::delta(g, 0);
        let w = rank_one_symbol(&d, &d, &QuantMatrix::zero()).unwrap();
        let gsig = Signal::from_real(g, &[2.0, 5.0, -1.0, 7.0]).unwrap();
        let out = apply_op(&w, &QuantMatrix::zero(), &gsig).unwrap();
        assert!(out.max_abs_diff(&d.scale(c(0.5 * 2.0))) < 1e-14);

        let zero = rank_one_symbol(&d, &Signal::zeros(g), &QuantMatrix::zero()).unwrap();
        assert!(zero.is_zero());

        let g5 = Grid::new(5, 1).unwrap();
        let mut rng = SplitMix64::new(15);
        let (f1, f2, h) = (
            random_signal(g5, &mut rng),
            random_signal(g5, &mut rng),
            random_signal(g5, &mut rng),
        );
        let w = rank_one_symbol(&f1, &f2, &QuantMatrix::weyl()).unwrap();
        let out = apply_op(&w, &QuantMatrix::weyl(), &h).unwrap();
        let expect = f1.scale(inner(&h, &f2).unwrap() / 5f64.sqrt());
        assert!(out.max_abs_diff(&expect) <= 1e-10 * expect.norm());
        let k = kernel_of_symbol(&w, &QuantMatrix::weyl()).unwrap();
        let s = singular_values(k.entries());
        assert!(s[1] <= 1e-10 * s[0]);
    }

    #[test]
    fn pad_kernel_examples() {
        let g1 = Grid::new(4, 1).unwrap();
        let g2 = Grid::new(4, 2).unwrap();
        let mut rng = SplitMix64::new(16);
        let phi = Signal::gaussian(g1).scale(c(1.7));
        let sq = KernelMatrix::square(g1, CMatrix::from_fn(4, 4, |_, _| rng.complex_normal())).unwrap();
        assert_eq!(pad_kernel(&sq, &phi, PadSide::Col).unwrap(), sq);

        let f = random_signal(g2, &mut rng);
        let gg = random_signal(g1, &mut rng);
        let k = KernelMatrix::new(
            g2,
            g1,
            CMatrix::from_fn(16, 4, |r, cc| f.values()[r] * gg.values()[cc].conj()),
        )
        .unwrap();
        let k0 = pad_kernel(&k, &phi, PadSide::Col).unwrap();
        let gphi = gg.tensor(&phi.conj()).unwrap();
        for r in 0..16 {
            for cc in 0..16 {
                let expect = f.values()[r] * gphi.values()[cc].conj();
                assert!((k0.entries()[(r, cc)] - expect).norm() < 1e-14);
            }
        }

        let kr = KernelMatrix::new(g2, g1, CMatrix::from_fn(16, 4, |_, _| rng.complex_normal())).unwrap();
        let k0 = pad_kernel(&kr, &phi, PadSide::Col).unwrap();
        let s = singular_values(kr.entries());
        let s0 = singular_values(k0.entries());
        for (a, b) in s.iter().zip(&s0) {
            assert!((a * phi.norm() - b).abs() < 1e-10);
        }
        assert!(s0[4..].iter().all(|&v| v < 1e-10));

        let kt = KernelMatrix::new(g1, g2, kr.entries().transpose()).unwrap();
        let k0 = pad_kernel(&kt, &phi, PadSide::Row).unwrap();
        assert_eq!(k0.entries().shape(), (16, 16));
        assert!(pad_kernel(&kt, &phi, PadSide::Col).is_err());
        assert!(pad_kernel(&kr, &Signal::zeros(g1), PadSide::Col).is_err());
    }

    #[test]
    fn kernel_json_roundtrip() {
        let g = Grid::new(3, 1).unwrap();
        let k = KernelMatrix::square(g, CMatrix::from_fn(3, 3, |r, cc| Complex64::new(r as f64, cc as f64))).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        let back: KernelMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, k);
    }
}
