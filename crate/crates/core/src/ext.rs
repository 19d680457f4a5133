//! Extended real numbers.
//!
//! Pseudo-inverses, integral functionals and inequality sides can be
//! `±∞`. Those cases carry meaning (an `−∞` lower bound is vacuous, a
//! `+∞` tail marks the end of a curve's domain), so they are kept as
//! explicit variants instead of being folded into `f64` arithmetic where
//! `∞ − ∞` silently becomes NaN.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ext {
    NegInf,
    Finite(f64),
    PosInf,
}

impl Ext {
    pub const ZERO: Ext = Ext::Finite(0.0);

    /// Maps IEEE infinities onto the markers. NaN is rejected.
    pub fn from_f64(x: f64) -> Ext {
        assert!(!x.is_nan(), "NaN is not an extended real");
        if x == f64::INFINITY {
            Ext::PosInf
        } else if x == f64::NEG_INFINITY {
            Ext::NegInf
        } else {
            Ext::Finite(x)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ext::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Ext::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        !self.is_finite()
    }

    /// Lossy conversion for printing and plotting.
    pub fn to_f64(self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::Finite(x) => x,
            Ext::PosInf => f64::INFINITY,
        }
    }

    /// Multiplication by a finite nonnegative scalar. `0 · ±∞` is taken
    /// as `0`, the measure-theoretic convention.
    pub fn scale(self, k: f64) -> Ext {
        debug_assert!(k >= 0.0 && k.is_finite());
        match self {
            Ext::Finite(x) => Ext::Finite(k * x),
            _ if k == 0.0 => Ext::ZERO,
            inf => inf,
        }
    }

    /// Sum, `None` for the undefined `+∞ + −∞`.
    pub fn checked_add(self, other: Ext) -> Option<Ext> {
        match (self, other) {
            (Ext::Finite(a), Ext::Finite(b)) => Some(Ext::Finite(a + b)),
            (Ext::PosInf, Ext::NegInf) | (Ext::NegInf, Ext::PosInf) => None,
            (Ext::PosInf, _) | (_, Ext::PosInf) => Some(Ext::PosInf),
            (Ext::NegInf, _) | (_, Ext::NegInf) => Some(Ext::NegInf),
        }
    }

    pub fn max(self, other: Ext) -> Ext {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Ext) -> Ext {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for Ext {
    fn from(x: f64) -> Self {
        Ext::from_f64(x)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use Ext::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::Finite(x) => Ext::Finite(-x),
            Ext::PosInf => Ext::NegInf,
        }
    }
}

/// Panics on `+∞ + −∞`; use [`Ext::checked_add`] when that can occur.
impl Add for Ext {
    type Output = Ext;
    fn add(self, rhs: Ext) -> Ext {
        self.checked_add(rhs).expect("undefined sum +inf + -inf")
    }
}

impl Add<f64> for Ext {
    type Output = Ext;
    fn add(self, rhs: f64) -> Ext {
        self + Ext::Finite(rhs)
    }
}

impl Sub for Ext {
    type Output = Ext;
    fn sub(self, rhs: Ext) -> Ext {
        self + (-rhs)
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => write!(f, "-inf"),
            Ext::Finite(x) => write!(f, "{x}"),
            Ext::PosInf => write!(f, "+inf"),
        }
    }
}

// JSON has no infinities: finite values are numbers, the markers are the
// strings "+inf" / "-inf".
impl Serialize for Ext {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Ext::Finite(x) => s.serialize_f64(*x),
            Ext::PosInf => s.serialize_str("+inf"),
            Ext::NegInf => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Ext {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(x) if x.is_finite() => Ok(Ext::Finite(x)),
            Repr::Num(_) => Err(serde::de::Error::custom("non-finite number")),
            Repr::Str(s) => match s.as_str() {
                "+inf" | "inf" => Ok(Ext::PosInf),
                "-inf" => Ok(Ext::NegInf),
                other => Err(serde::de::Error::custom(format!(
                    "expected number, \"+inf\" or \"-inf\", got {other:?}"
                ))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_markers_at_the_ends() {
        assert!(Ext::NegInf < Ext::Finite(-1e300));
        assert!(Ext::Finite(1e300) < Ext::PosInf);
        assert_eq!(Ext::Finite(2.0).max(Ext::NegInf), Ext::Finite(2.0));
    }

    #[test]
    fn opposite_infinities_do_not_add() {
        assert_eq!(Ext::PosInf.checked_add(Ext::NegInf), None);
        assert_eq!(Ext::PosInf + Ext::Finite(-3.0), Ext::PosInf);
        assert_eq!(Ext::PosInf.scale(0.0), Ext::ZERO);
    }

    #[test]
    fn json_markers() {
        let v = vec![Ext::NegInf, Ext::Finite(1.5), Ext::PosInf];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"["-inf",1.5,"+inf"]"#);
        let back: Vec<Ext> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
