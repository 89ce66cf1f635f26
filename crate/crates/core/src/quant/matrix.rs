use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Domain;

/// Quantization parameter `A`: either `(u / v) I` or an explicit integer matrix,
/// both read mod N.
///
/// `A = 0` is the Kohn-Nirenberg quantization, `A = 1/2` the Weyl quantization
/// (which only exists for odd N).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum QuantMatrix {
    Scalar { num: i64, den: i64 },
    Matrix(Vec<Vec<i64>>),
}

impl QuantMatrix {
    pub fn scalar(num: i64, den: i64) -> Self {
        QuantMatrix::Scalar { num, den }
    }

    pub fn zero() -> Self {
        Self::scalar(0, 1)
    }

    pub fn identity() -> Self {
        Self::scalar(1, 1)
    }

    pub fn weyl() -> Self {
        Self::scalar(1, 2)
    }

    /// Reduce to an integer matrix mod N acting on `Z_N^dims`.
    pub fn resolve(&self, dom: Domain) -> Result<ResolvedQuant> {
        let n = dom.n();
        let d = dom.dims();
        let mut m = [[0usize; 2]; 2];
        if d > 2 {
            return Err(Error::InvalidQuantization {
                modulus: n,
                reason: format!("dimension {d} > 2"),
            });
        }
        match self {
            QuantMatrix::Scalar { num, den } => {
                if *den == 0 {
                    return Err(Error::InvalidQuantization {
                        modulus: n,
                        reason: "zero denominator".into(),
                    });
                }
                let inv = mod_inverse(*den, n as i64).ok_or_else(|| Error::InvalidQuantization {
                    modulus: n,
                    reason: format!("gcd({den}, {n}) != 1, no inverse of the denominator"),
                })?;
                let s = (num.rem_euclid(n as i64) * inv).rem_euclid(n as i64) as usize;
                for (k, row) in m.iter_mut().enumerate().take(d) {
                    row[k] = s;
                }
            }
            QuantMatrix::Matrix(rows) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::InvalidQuantization {
                        modulus: n,
                        reason: format!("explicit matrix must be {d}x{d}"),
                    });
                }
                for i in 0..d {
                    for j in 0..d {
                        m[i][j] = rows[i][j].rem_euclid(n as i64) as usize;
                    }
                }
            }
        }
        Ok(ResolvedQuant { dom, m })
    }
}

fn mod_inverse(a: i64, n: i64) -> Option<i64> {
    if n == 1 {
        return Some(0);
    }
    let e = a.rem_euclid(n).extended_gcd(&n);
    (e.gcd == 1).then(|| e.x.rem_euclid(n))
}

impl fmt::Display for QuantMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantMatrix::Scalar { num, den } if *den == 1 => write!(f, "{num}"),
            QuantMatrix::Scalar { num, den } => write!(f, "{num}/{den}"),
            QuantMatrix::Matrix(rows) => write!(f, "{rows:?}"),
        }
    }
}

impl FromStr for QuantMatrix {
    type Err = Error;

    /// Accepts `"u"`, `"u/v"` or a JSON integer matrix such as `"[[1,0],[0,1]]"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('[') {
            let rows: Vec<Vec<i64>> = serde_json::from_str(s)
                .map_err(|e| Error::Config(format!("bad quantization matrix {s:?}: {e}")))?;
            return Ok(QuantMatrix::Matrix(rows));
        }
        let bad = || Error::Config(format!("bad quantization parameter {s:?}"));
        match s.split_once('/') {
            Some((u, v)) => Ok(QuantMatrix::scalar(
                u.trim().parse().map_err(|_| bad())?,
                v.trim().parse().map_err(|_| bad())?,
            )),
            None => Ok(QuantMatrix::scalar(s.parse().map_err(|_| bad())?, 1)),
        }
    }
}

/// `A` as a concrete map on `Z_N^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResolvedQuant {
    dom: Domain,
    m: [[usize; 2]; 2],
}

impl ResolvedQuant {
    pub fn domain(&self) -> Domain {
        self.dom
    }

    fn mul(&self, y: usize, transpose: bool) -> usize {
        let d = self.dom.dims();
        let n = self.dom.n();
        let c = self.dom.unravel(y);
        let mut out = [0usize; 2];
        for (i, o) in out.iter_mut().enumerate().take(d) {
            *o = (0..d).fold(0, |acc, j| {
                let a = if transpose { self.m[j][i] } else { self.m[i][j] };
                (acc + a * c[j]) % n
            });
        }
        self.dom.ravel(&out[..d])
    }

    /// `A y mod N`.
    pub fn apply(&self, y: usize) -> usize {
        self.mul(y, false)
    }

    /// `A^* y mod N` (transpose; `A` is real).
    pub fn apply_transpose(&self, y: usize) -> usize {
        self.mul(y, true)
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|&v| v == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_needs_odd_modulus() {
        let d5 = Domain::new(5, 1).unwrap();
        let r = QuantMatrix::weyl().resolve(d5).unwrap();
        assert_eq!(r.apply(1), 3);
        let d4 = Domain::new(4, 1).unwrap();
        assert!(matches!(
            QuantMatrix::weyl().resolve(d4),
            Err(Error::InvalidQuantization { .. })
        ));
    }

    #[test]
    fn parse_forms() {
        assert_eq!("0".parse::<QuantMatrix>().unwrap(), QuantMatrix::zero());
        assert_eq!("1/2".parse::<QuantMatrix>().unwrap(), QuantMatrix::weyl());
        assert_eq!(
            "[[1,2],[0,1]]".parse::<QuantMatrix>().unwrap(),
            QuantMatrix::Matrix(vec![vec![1, 2], vec![0, 1]])
        );
        assert!("x/2".parse::<QuantMatrix>().is_err());
    }

    #[test]
    fn explicit_matrix_and_transpose() {
        let dom = Domain::new(7, 2).unwrap();
        let a = QuantMatrix::Matrix(vec![vec![1, 2], vec![0, 1]]).resolve(dom).unwrap();
        let y = dom.ravel(&[1, 1]);
        assert_eq!(a.apply(y), dom.ravel(&[3, 1]));
        assert_eq!(a.apply_transpose(y), dom.ravel(&[1, 3]));
        let wrong = QuantMatrix::Matrix(vec![vec![1]]).resolve(dom);
        assert!(wrong.is_err());
    }
}
