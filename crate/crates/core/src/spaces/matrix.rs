use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{pnorm, Exponent};
use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Matrix `t(j2, j1)` acting from a weighted space on `J1` (columns, weight `w1`)
/// into a weighted space on `J2` (rows, weight `w2`), with an optional entry
/// weight `w(j2, j1)` stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixOperator {
    entries: CMatrix,
    w_rows: Vec<f64>,
    w_cols: Vec<f64>,
    w_entries: Option<Vec<f64>>,
}

fn check_positive(w: &[f64], what: &str) -> Result<()> {
    match w.iter().position(|v| !(v.is_finite() && *v > 0.0)) {
        Some(i) => Err(Error::InvalidWeight(format!(
            "{what} weight {} at index {i} is not positive and finite",
            w[i]
        ))),
        None => Ok(()),
    }
}

impl MatrixOperator {
    pub fn new(entries: CMatrix, w_rows: Vec<f64>, w_cols: Vec<f64>) -> Result<Self> {
        if w_rows.len() != entries.nrows() || w_cols.len() != entries.ncols() {
            return Err(Error::LengthMismatch {
                expected: entries.nrows() + entries.ncols(),
                got: w_rows.len() + w_cols.len(),
            });
        }
        check_positive(&w_rows, "row")?;
        check_positive(&w_cols, "column")?;
        if let Some(i) = entries.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(i));
        }
        Ok(MatrixOperator {
            entries,
            w_rows,
            w_cols,
            w_entries: None,
        })
    }

    /// All weights equal to one, including the entry weight.
    pub fn unweighted(entries: CMatrix) -> Self {
        let (r, c) = entries.shape();
        MatrixOperator {
            entries,
            w_rows: vec![1.0; r],
            w_cols: vec![1.0; c],
            w_entries: Some(vec![1.0; r * c]),
        }
    }

    pub fn with_entry_weight(mut self, w: Vec<f64>) -> Result<Self> {
        if w.len() != self.entries.len() {
            return Err(Error::LengthMismatch {
                expected: self.entries.len(),
                got: w.len(),
            });
        }
        check_positive(&w, "entry")?;
        self.w_entries = Some(w);
        Ok(self)
    }

    /// Entry weight `w2(j2) / w1(j1)`, the one matching the operator norms.
    pub fn with_ratio_entry_weight(self) -> Self {
        let w = (0..self.rows())
            .flat_map(|i| (0..self.cols()).map(move |j| (i, j)))
            .map(|(i, j)| self.w_rows[i] / self.w_cols[j])
            .collect();
        MatrixOperator {
            w_entries: Some(w),
            ..self
        }
    }

    pub fn with_entries(&self, entries: CMatrix) -> Result<Self> {
        if entries.shape() != self.entries.shape() {
            return Err(Error::LengthMismatch {
                expected: self.entries.len(),
                got: entries.len(),
            });
        }
        Ok(MatrixOperator {
            entries,
            ..self.clone()
        })
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn w_rows(&self) -> &[f64] {
        &self.w_rows
    }

    pub fn w_cols(&self) -> &[f64] {
        &self.w_cols
    }

    pub fn w_entries(&self) -> Option<&[f64]> {
        self.w_entries.as_deref()
    }

    /// `|t(i, j)| w2(i) / w1(j)`.
    pub fn weighted_abs(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)].norm() * self.w_rows[i] / self.w_cols[j]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        MatrixOperator {
            entries: &self.entries * s,
            ..self.clone()
        }
    }
}

/// `|| t * w ||_{l^p}` over all entries.
pub fn up_matrix_norm(a: &MatrixOperator, p: Exponent) -> Result<f64> {
    let w = a
        .w_entries
        .as_ref()
        .ok_or_else(|| Error::Precondition("matrix has no entry weight".into()))?;
    let (r, c) = a.entries.shape();
    let mags: Vec<f64> = (0..r)
        .flat_map(|i| (0..c).map(move |j| (i, j)))
        .zip(w)
        .map(|((i, j), w)| a.entries[(i, j)].norm() * w)
        .collect();
    Ok(pnorm(&mags, p))
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_rows: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_cols: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    w_entries: Option<Vec<f64>>,
}

impl Serialize for MatrixOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (rows, cols) = self.entries.shape();
        let row_major: Vec<Complex64> = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|ij| self.entries[ij])
            .collect();
        MatrixJson {
            rows,
            cols,
            re: row_major.iter().map(|v| v.re).collect(),
            im: row_major.iter().map(|v| v.im).collect(),
            w_rows: Some(self.w_rows.clone()),
            w_cols: Some(self.w_cols.clone()),
            w_entries: self.w_entries.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MatrixOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = MatrixJson::deserialize(d)?;
        let n = raw.rows * raw.cols;
        if raw.re.len() != n || (!raw.im.is_empty() && raw.im.len() != n) {
            return Err(D::Error::custom(format!(
                "matrix data must have rows * cols = {n} entries"
            )));
        }
        let im = |k: usize| raw.im.get(k).copied().unwrap_or(0.0);
        let entries = CMatrix::from_fn(raw.rows, raw.cols, |i, j| {
            let k = i * raw.cols + j;
            Complex64::new(raw.re[k], im(k))
        });
        let op = MatrixOperator::new(
            entries,
            raw.w_rows.unwrap_or_else(|| vec![1.0; raw.rows]),
            raw.w_cols.unwrap_or_else(|| vec![1.0; raw.cols]),
        )
        .map_err(D::Error::custom)?;
        match raw.w_entries {
            Some(w) => op.with_entry_weight(w).map_err(D::Error::custom),
            None => Ok(op.with_ratio_entry_weight()),
        }
    }
}
