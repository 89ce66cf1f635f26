use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lebesgue exponent in `(0, inf]`, kept as an exact rational.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    Finite(Rational64),
    Infinite,
}

impl Exponent {
    pub const INFINITY: Exponent = Exponent::Infinite;

    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 || num == 0 || (num < 0) != (den < 0) {
            return Err(Error::InvalidExponent(format!("{num}/{den} is not positive")));
        }
        Ok(Exponent::Finite(Rational64::new(num, den)))
    }

    pub fn integer(n: i64) -> Result<Self> {
        Self::new(n, 1)
    }

    pub fn one() -> Self {
        Exponent::Finite(Rational64::from_integer(1))
    }

    pub fn two() -> Self {
        Exponent::Finite(Rational64::from_integer(2))
    }

    pub fn half() -> Self {
        Exponent::Finite(Rational64::new(1, 2))
    }

    /// Exact conversion of the shortest decimal representation of `x`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if x == f64::INFINITY {
            return Ok(Exponent::Infinite);
        }
        format!("{x}").parse()
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// `1/p`, with `1/inf = 0`.
    pub fn recip(&self) -> Rational64 {
        match self {
            Exponent::Finite(r) => r.recip(),
            Exponent::Infinite => Rational64::from_integer(0),
        }
    }

    pub fn recip_f64(&self) -> f64 {
        let r = self.recip();
        *r.numer() as f64 / *r.denom() as f64
    }

    pub fn value(&self) -> f64 {
        match self {
            Exponent::Finite(r) => *r.numer() as f64 / *r.denom() as f64,
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// `p >= 1`: the `l^p` quasi-norm is a norm.
    pub fn is_banach(&self) -> bool {
        self.recip() <= Rational64::from_integer(1)
    }

    /// Order of the quasi-triangle inequality, `min(p, 1)`.
    pub fn triangle_order(&self) -> f64 {
        self.value().min(1.0)
    }

    /// `p'` with `1/p + 1/p' = 1`; defined for `p >= 1`.
    pub fn conjugate(&self) -> Result<Exponent> {
        if !self.is_banach() {
            return Err(Error::InvalidExponent(format!(
                "conjugate exponent undefined for p = {self} < 1"
            )));
        }
        let r = Rational64::from_integer(1) - self.recip();
        Ok(if r == Rational64::from_integer(0) {
            Exponent::Infinite
        } else {
            Exponent::Finite(r.recip())
        })
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        other.recip().cmp(&self.recip())
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinite => write!(f, "inf"),
            Exponent::Finite(r) if *r.denom() == 1 => write!(f, "{}", r.numer()),
            Exponent::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

fn parse_int(s: &str, whole: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidExponent(format!("cannot parse {whole:?}")))
}

fn parse_decimal(s: &str) -> Result<Rational64> {
    let bad = || Error::InvalidExponent(format!("cannot parse {s:?}"));
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], parse_int(&s[i + 1..], s)?),
        None => (s, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let num: i64 = digits.parse().map_err(|_| bad())?;
    let shift = exp - frac_part.len() as i64;
    let pow = 10i64.checked_pow(shift.unsigned_abs() as u32).ok_or_else(bad)?;
    Ok(if shift >= 0 {
        Rational64::from_integer(num.checked_mul(pow).ok_or_else(bad)?)
    } else {
        Rational64::new(num, pow)
    })
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `inf`, `u/v` and finite decimals such as `0.5` or `2`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "∞" => return Ok(Exponent::Infinite),
            _ => {}
        }
        let r = match t.split_once('/') {
            Some((n, d)) => {
                let (n, d) = (parse_int(n, s)?, parse_int(d, s)?);
                return Exponent::new(n, d);
            }
            None => parse_decimal(t)?,
        };
        if r <= Rational64::from_integer(0) {
            return Err(Error::InvalidExponent(format!("{s:?} is not positive")));
        }
        Ok(Exponent::Finite(r))
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawExponent {
    Num(f64),
    Str(String),
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match RawExponent::deserialize(d)? {
            RawExponent::Num(x) => Exponent::from_f64(x),
            RawExponent::Str(s) => s.parse(),
        }
        .map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parsing() {
        assert_eq!("1/2".parse::<Exponent>().unwrap(), Exponent::half());
        assert_eq!("0.5".parse::<Exponent>().unwrap(), Exponent::half());
        assert_eq!("2".parse::<Exponent>().unwrap(), Exponent::two());
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinite);
        assert_eq!("2e-1".parse::<Exponent>().unwrap(), Exponent::new(1, 5).unwrap());
        assert_eq!(Exponent::from_f64(0.25).unwrap(), Exponent::new(1, 4).unwrap());
        for bad in ["0", "-1", "1/0", "abc", "", "-1/2"] {
            assert!(bad.parse::<Exponent>().is_err(), "{bad}");
        }
    }

    #[test]
    fn ordering_and_conjugates() {
        assert!(Exponent::half() < Exponent::one());
        assert!(Exponent::two() < Exponent::Infinite);
        assert_eq!(Exponent::one().conjugate().unwrap(), Exponent::Infinite);
        assert_eq!(Exponent::two().conjugate().unwrap(), Exponent::two());
        assert_eq!(Exponent::Infinite.conjugate().unwrap(), Exponent::one());
        assert!(Exponent::half().conjugate().is_err());
        assert_eq!(Exponent::Infinite.recip_f64(), 0.0);
    }

    #[test]
    fn serde_round_trip() {
        for e in [Exponent::half(), Exponent::Infinite, Exponent::new(2, 3).unwrap()] {
            let s = serde_json::to_string(&e).unwrap();
            assert_eq!(serde_json::from_str::<Exponent>(&s).unwrap(), e);
        }
        assert_eq!(serde_json::from_str::<Exponent>("0.5").unwrap(), Exponent::half());
        assert_eq!(serde_json::from_str::<Exponent>("1").unwrap(), Exponent::one());
    }
}
