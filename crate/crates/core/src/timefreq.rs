//! Short-time Fourier transform, its left inverse, and cross `A`-Wigner
//! distributions on `Z_N^d`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{check_same_grid, FourierPlan, Grid, PhasePoint, Signal};
use crate::quant::QuantMatrix;

/// Complex function on phase space `(Z_N^d)^2`, indexed `(x, xi)` with `x` major.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseArray {
    grid: Grid,
    values: Vec<Complex64>,
}

impl PhaseArray {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        let len = grid.len() * grid.len();
        if values.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(PhaseArray { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        PhaseArray {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len() * grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let m = grid.len();
        PhaseArray {
            grid,
            values: (0..m * m).map(|i| f(i / m, i % m)).collect(),
        }
    }

    /// Signal grid whose phase space this array lives on.
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, at: PhasePoint) -> Complex64 {
        self.values[at.phase_index(&self.grid)]
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &PhaseArray) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        PhaseArray {
            grid: self.grid,
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == Complex64::new(0.0, 0.0))
    }

    /// View a phase array over `Z_N` as a signal on `Z_N^2` (same row-major data).
    pub fn to_signal(&self) -> Result<Signal> {
        if self.grid.d() != 1 {
            return Err(Error::InvalidGrid(
                "only phase arrays over Z_N can be viewed as signals on Z_N^2".into(),
            ));
        }
        Signal::new(Grid::new(self.grid.n(), 2)?, self.values.clone())
    }

    /// Inverse of [`PhaseArray::to_signal`].
    pub fn from_signal(s: &Signal) -> Result<Self> {
        if s.grid().d() != 2 {
            return Err(Error::InvalidGrid("expected a signal on Z_N^2".into()));
        }
        PhaseArray::new(Grid::new(s.grid().n(), 1)?, s.values().to_vec())
    }
}

/// `V(x, xi) = N^{-d/2} sum_y f(y) conj(phi(y - x)) e^{-2 pi i <y, xi> / N}`.
///
/// One FFT over `y` per time shift `x`.
pub fn stft(f: &Signal, window: &Signal) -> Result<PhaseArray> {
    check_same_grid(f.grid(), window.grid())?;
    if window.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let grid = f.grid();
    let m = grid.len();
    let plan = FourierPlan::new(grid);
    let fv = f.values();
    let wv = window.values();
    let mut values = vec![Complex64::new(0.0, 0.0); m * m];
    values.par_chunks_mut(m).enumerate().for_each(|(x, col)| {
        for (y, c) in col.iter_mut().enumerate() {
            *c = fv[y] * wv[grid.sub(y, x)].conj();
        }
        plan.forward_in_place(col);
    });
    Ok(PhaseArray { grid, values })
}

/// Direct `O(N^{3d})` evaluation of [`stft`] through `N^{-d/2} <f, pi(x, xi) phi>`.
pub fn stft_direct(f: &Signal, window: &Signal) -> Result<PhaseArray> {
    check_same_grid(f.grid(), window.grid())?;
    if window.is_zero() {
        return Err(Error::ZeroWindow);
    }
    let grid = f.grid();
    let roots = grid.roots();
    let scale = (grid.len() as f64).powf(-0.5);
    Ok(PhaseArray::from_fn(grid, |x, xi| {
        let mut acc = Complex64::new(0.0, 0.0);
        for y in 0..grid.len() {
            let atom = roots.get(grid.dot(xi, y)) * window.values()[grid.sub(y, x)];
            acc += f.values()[y] * atom.conj();
        }
        acc * scale
    }))
}

/// `f = ||phi||^{-2} N^{-d/2} sum_{x,xi} V(x, xi) pi(x, xi) phi`, the left inverse of [`stft`].
pub fn istft(v: &PhaseArray, window: &Signal) -> Result<Signal> {
    check_same_grid(v.grid, window.grid())?;
    let energy = window.norm_sqr();
    if energy == 0.0 {
        return Err(Error::ZeroWindow);
    }
    let grid = v.grid;
    let m = grid.len();
    let plan = FourierPlan::new(grid);
    let wv = window.values();
    let mut out = vec![Complex64::new(0.0, 0.0); m];
    let mut col = vec![Complex64::new(0.0, 0.0); m];
    for x in 0..m {
        col.copy_from_slice(&v.values[x * m..(x + 1) * m]);
        plan.inverse_in_place(&mut col);
        for (n, o) in out.iter_mut().enumerate() {
            *o += col[n] * wv[grid.sub(n, x)];
        }
    }
    for o in out.iter_mut() {
        *o /= energy;
    }
    Signal::new(grid, out)
}

/// Cross `A`-Wigner distribution
/// `W(x, xi) = N^{-d/2} sum_y f1(x + A y) conj(f2(x - (I - A) y)) e^{-2 pi i <y, xi> / N}`.
pub fn cross_wigner_a(f1: &Signal, f2: &Signal, a: &QuantMatrix) -> Result<PhaseArray> {
    check_same_grid(f1.grid(), f2.grid())?;
    let grid = f1.grid();
    let a = a.resolve(grid.domain())?;
    let m = grid.len();
    let plan = FourierPlan::new(grid);
    let (v1, v2) = (f1.values(), f2.values());
    let mut values = vec![Complex64::new(0.0, 0.0); m * m];
    values.par_chunks_mut(m).enumerate().for_each(|(x, col)| {
        for (y, c) in col.iter_mut().enumerate() {
            let ay = a.apply(y);
            let p = grid.add(x, ay);
            let q = grid.sub(p, y);
            *c = v1[p] * v2[q].conj();
        }
        plan.forward_in_place(col);
    });
    Ok(PhaseArray { grid, values })
}

#[derive(Serialize, Deserialize)]
struct PhaseArrayJson {
    #[serde(rename = "N")]
    n: usize,
    d2: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl Serialize for PhaseArray {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseArrayJson {
            n: self.grid.n(),
            d2: 2 * self.grid.d(),
            re: self.values.iter().map(|v| v.re).collect(),
            im: self.values.iter().map(|v| v.im).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhaseArray {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = PhaseArrayJson::deserialize(d)?;
        if raw.d2 % 2 != 0 || raw.re.len() != raw.im.len() {
            return Err(D::Error::custom("malformed phase array"));
        }
        let grid = Grid::new(raw.n, raw.d2 / 2).map_err(D::Error::custom)?;
        let values = raw
            .re
            .iter()
            .zip(&raw.im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        PhaseArray::new(grid, values).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{dft, tf_shift};
    use crate::rng::SplitMix64;

    fn random_signal(grid: Grid, rng: &mut SplitMix64) -> Signal {
        Signal::new(grid, rng.complex_vec(grid.len())).unwrap()
    }

    #[test]
    fn delta_window_collapses() {
        let g = Grid::new(4, 1).unwrap();
        let mut rng = SplitMix64::new(1);
        let f = random_signal(g, &mut rng);
        let v = stft(&f, &Signal::delta(g, 0)).unwrap();
        for x in 0..4 {
            for xi in 0..4 {
                let p = PhasePoint { x, xi };
                assert!((v.get(p).norm() - 0.5 * f.values()[x].norm()).abs() < 1e-14);
            }
        }
        let d = Signal::delta(g, 0);
        let v = stft(&d, &d).unwrap();
        for x in 0..4 {
            for xi in 0..4 {
                let expect = if x == 0 { 0.5 } else { 0.0 };
                assert!((v.get(PhasePoint { x, xi }) - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn zero_window_rejected() {
        let g = Grid::new(4, 1).unwrap();
        let f = Signal::delta(g, 1);
        assert_eq!(stft(&f, &Signal::zeros(g)), Err(Error::ZeroWindow));
        assert!(istft(&PhaseArray::zeros(g), &Signal::zeros(g)).is_err());
    }

    #[test]
    fn fft_path_matches_direct_sum_in_two_dims() {
        let g = Grid::new(4, 2).unwrap();
        let mut rng = SplitMix64::new(2);
        let f = random_signal(g, &mut rng);
        let w = random_signal(g, &mut rng);
        let a = stft(&f, &w).unwrap();
        let b = stft_direct(&f, &w).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
    }

    #[test]
    fn istft_examples() {
        let g = Grid::new(8, 1).unwrap();
        let w = Signal::gaussian(g);
        let d = Signal::delta(g, 0);
        let back = istft(&stft(&d, &w).unwrap(), &w).unwrap();
        assert!(back.max_abs_diff(&d) < 1e-12);
        assert!(istft(&PhaseArray::zeros(g), &w).unwrap().is_zero());
    }

    #[test]
    fn rihaczek_form_at_a_zero() {
        let g = Grid::new(4, 1).unwrap();
        let mut rng = SplitMix64::new(3);
        let f1 = random_signal(g, &mut rng);
        let f2 = random_signal(g, &mut rng);
        let w = cross_wigner_a(&f1, &f2, &QuantMatrix::zero()).unwrap();
        let f2hat = dft(&f2);
        let roots = g.roots();
        for x in 0..4 {
            for xi in 0..4 {
                let expect = f1.values()[x] * f2hat.values()[xi].conj() * roots.get_conj(x * xi);
                assert!((w.get(PhasePoint { x, xi }) - expect).norm() < 1e-13);
            }
        }
        let d = Signal::delta(g, 0);
        let w = cross_wigner_a(&d, &d, &QuantMatrix::zero()).unwrap();
        for x in 0..4 {
            for xi in 0..4 {
                let expect = if x == 0 { 0.5 } else { 0.0 };
                assert!((w.get(PhasePoint { x, xi }) - Complex64::new(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn wigner_direct_sum_and_norm() {
        let g = Grid::new(5, 1).unwrap();
        let mut rng = SplitMix64::new(4);
        let f1 = random_signal(g, &mut rng);
        let f2 = random_signal(g, &mut rng);
        let w = cross_wigner_a(&f1, &f2, &QuantMatrix::scalar(3, 1)).unwrap();
        // direct sum with A = 3 = 1/2 mod 5
        let roots = g.roots();
        for x in 0..5 {
            for xi in 0..5 {
                let mut acc = Complex64::new(0.0, 0.0);
                for y in 0..5 {
                    let p = (x + 3 * y) % 5;
                    let q = (x + 5 * 5 - (1 + 5 - 3) * y) % 5;
                    acc += f1.values()[p] * f2.values()[q].conj() * roots.get_conj(y * xi);
                }
                acc /= 5f64.sqrt();
                assert!((w.get(PhasePoint { x, xi }) - acc).norm() < 1e-12);
            }
        }
        assert!((w.norm() - f1.norm() * f2.norm()).abs() < 1e-12);
        let w2 = cross_wigner_a(&f1, &f2, &QuantMatrix::weyl()).unwrap();
        assert!(w2.max_abs_diff(&w) < 1e-12);
    }

    #[test]
    fn covariance_of_magnitudes() {
        let g = Grid::new(8, 1).unwrap();
        let mut rng = SplitMix64::new(5);
        let f = random_signal(g, &mut rng);
        let w = Signal::gaussian(g);
        let x = PhasePoint::new(&g, &[3], &[5]).unwrap();
        let a = stft(&tf_shift(&f, x), &w).unwrap();
        let b = stft(&f, &w).unwrap();
        let pd = g.phase_domain();
        for p in 0..pd.len() {
            let q = pd.sub(p, x.phase_index(&g));
            assert!((a.values()[p].norm() - b.values()[q].norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_array_json() {
        let g = Grid::new(3, 1).unwrap();
        let p = PhaseArray::from_fn(g, |x, xi| Complex64::new(x as f64, xi as f64));
        let s = serde_json::to_string(&p).unwrap();
        assert!(s.contains("\"d2\":2"));
        let back: PhaseArray = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
