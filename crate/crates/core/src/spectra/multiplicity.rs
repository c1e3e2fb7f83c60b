use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// How often a spectral value occurs.
///
/// `Unquantified` marks a finite count that the algebra does not track (tails of
/// progression sums); it still counts as finite for essential-spectrum purposes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Multiplicity {
    Finite(u64),
    Unquantified,
    Infinite,
}

impl Multiplicity {
    pub const ONE: Multiplicity = Multiplicity::Finite(1);

    pub fn is_infinite(self) -> bool {
        self == Multiplicity::Infinite
    }

    pub fn exact(self) -> Option<u64> {
        match self {
            Multiplicity::Finite(n) => Some(n),
            _ => None,
        }
    }

    /// The `d` with `lower + d = self`, for `lower < self`.
    pub(crate) fn increment_over(self, lower: Option<Multiplicity>) -> Multiplicity {
        match (self, lower) {
            (Multiplicity::Finite(b), Some(Multiplicity::Finite(a))) => Multiplicity::Finite(b - a),
            _ => self,
        }
    }

    fn rank(self) -> (u8, u64) {
        match self {
            Multiplicity::Finite(n) => (0, n),
            Multiplicity::Unquantified => (1, 0),
            Multiplicity::Infinite => (2, 0),
        }
    }
}

impl Ord for Multiplicity {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rank().cmp(&other.rank())
    }
}

impl PartialOrd for Multiplicity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Multiplicity {
    type Output = Multiplicity;

    fn add(self, rhs: Self) -> Self {
        use Multiplicity::*;
        match (self, rhs) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Unquantified, _) | (_, Unquantified) => Unquantified,
            (Finite(a), Finite(b)) => a.checked_add(b).map_or(Unquantified, Finite),
        }
    }
}

impl Mul for Multiplicity {
    type Output = Multiplicity;

    fn mul(self, rhs: Self) -> Self {
        use Multiplicity::*;
        match (self, rhs) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Unquantified, _) | (_, Unquantified) => Unquantified,
            (Finite(a), Finite(b)) => a.checked_mul(b).map_or(Unquantified, Finite),
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Unquantified => f.write_str("finite"),
            Multiplicity::Infinite => f.write_str("infinite"),
        }
    }
}

impl Serialize for Multiplicity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Multiplicity::Finite(n) => s.serialize_u64(*n),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Multiplicity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Multiplicity;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a positive integer, \"finite\" or \"infinite\"")
            }

            fn visit_u64<E: de::Error>(self, n: u64) -> Result<Multiplicity, E> {
                if n == 0 {
                    Err(E::custom("multiplicity must be at least 1"))
                } else {
                    Ok(Multiplicity::Finite(n))
                }
            }

            fn visit_i64<E: de::Error>(self, n: i64) -> Result<Multiplicity, E> {
                u64::try_from(n)
                    .map_err(|_| E::custom("multiplicity must be at least 1"))
                    .and_then(|n| self.visit_u64(n))
            }

            fn visit_str<E: de::Error>(self, s: &str) -> Result<Multiplicity, E> {
                match s {
                    "infinite" | "inf" => Ok(Multiplicity::Infinite),
                    "finite" => Ok(Multiplicity::Unquantified),
                    _ => Err(E::custom(format!("unknown multiplicity {s:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::Multiplicity::*;
    use super::*;

    #[test]
    fn order_and_arithmetic() {
        assert!(Finite(7) < Unquantified && Unquantified < Infinite);
        assert_eq!(Finite(1) + Finite(2), Finite(3));
        assert_eq!(Finite(1) + Unquantified, Unquantified);
        assert_eq!(Unquantified + Infinite, Infinite);
        assert_eq!(Finite(2) * Finite(3), Finite(6));
        assert_eq!(Finite(u64::MAX) * Finite(2), Unquantified);
        assert_eq!(Finite(3) * Infinite, Infinite);
        assert_eq!(Finite(5).increment_over(Some(Finite(2))), Finite(3));
        assert_eq!(Infinite.increment_over(Some(Finite(2))), Infinite);
    }

    #[test]
    fn serde_forms() {
        assert_eq!(serde_json::to_string(&Finite(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&Infinite).unwrap(), "\"infinite\"");
        let m: Multiplicity = serde_json::from_str("\"finite\"").unwrap();
        assert_eq!(m, Unquantified);
        assert!(serde_json::from_str::<Multiplicity>("0").is_err());
    }
}
