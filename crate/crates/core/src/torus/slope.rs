use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slope `p/q` of a simple closed curve on the once-punctured torus.
///
/// Stored reduced with `q ≥ 0`; `(1, 0)` is `∞`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "[i64; 2]", into = "[i64; 2]")]
pub struct Slope {
    p: i64,
    q: i64,
}

impl Slope {
    pub const INFINITY: Slope = Slope { p: 1, q: 0 };
    pub const ZERO: Slope = Slope { p: 0, q: 1 };
    pub const ONE: Slope = Slope { p: 1, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Self> {
        if (p, q) == (0, 0) || p.gcd(&q) != 1 {
            return Err(Error::InvalidSlope { p, q });
        }
        Ok(Self::normalized(p, q))
    }

    fn normalized(p: i64, q: i64) -> Self {
        if q < 0 || (q == 0 && p < 0) {
            Slope { p: -p, q: -q }
        } else {
            Slope { p, q }
        }
    }

    pub fn p(self) -> i64 {
        self.p
    }

    pub fn q(self) -> i64 {
        self.q
    }

    pub fn is_infinity(self) -> bool {
        self.q == 0
    }

    /// Algebraic intersection number `p₁q₂ − q₁p₂` (up to sign).
    pub fn det(self, other: Slope) -> i64 {
        self.p * other.q - self.q * other.p
    }

    /// True when the two curves meet exactly once (Farey neighbors).
    pub fn is_neighbor(self, other: Slope) -> bool {
        self.det(other).abs() == 1
    }

    pub(crate) fn sum(self, other: Slope) -> Slope {
        Self::normalized(self.p + other.p, self.q + other.q)
    }

    pub(crate) fn diff(self, other: Slope) -> Slope {
        Self::normalized(self.p - other.p, self.q - other.q)
    }

    /// The vertex across edge `{self, other}` from `opposite` in the Farey tessellation.
    pub(crate) fn across(self, other: Slope, opposite: Slope) -> Slope {
        let s = self.sum(other);
        if s == opposite {
            self.diff(other)
        } else {
            s
        }
    }

    /// A Farey neighbor `c` with `det(self, c) = 1`.
    pub fn neighbor(self) -> Slope {
        // extended gcd: p·s − q·r = 1 → c = (r, s)
        let e = self.p.extended_gcd(&self.q);
        // e.x·p + e.y·q = 1  ⇒ det((p,q),(−e.y, e.x)) = p·e.x + q·e.y = 1
        Self::normalized(-e.y, e.x)
    }

    /// Cyclic order on the projective line: `s` lies on the arc running
    /// from `a` to `b` in increasing direction.
    pub(crate) fn cyclically_between(a: Slope, s: Slope, b: Slope) -> bool {
        (a < s && s < b) || (s < b && b < a) || (b < a && a < s)
    }
}

impl Ord for Slope {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.q, other.q) {
            (0, 0) => Ordering::Equal,
            (0, _) => Ordering::Greater,
            (_, 0) => Ordering::Less,
            _ => ((self.p as i128) * (other.q as i128)).cmp(&((other.p as i128) * (self.q as i128))),
        }
    }
}

impl PartialOrd for Slope {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.q {
            0 => write!(f, "inf"),
            1 => write!(f, "{}", self.p),
            _ => write!(f, "{}/{}", self.p, self.q),
        }
    }
}

impl TryFrom<[i64; 2]> for Slope {
    type Error = Error;
    fn try_from(v: [i64; 2]) -> Result<Self> {
        Slope::new(v[0], v[1])
    }
}

impl From<Slope> for [i64; 2] {
    fn from(s: Slope) -> Self {
        [s.p, s.q]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_sign() {
        assert_eq!(Slope::new(1, -1).unwrap(), Slope::new(-1, 1).unwrap());
        assert_eq!(Slope::new(-1, 0).unwrap(), Slope::INFINITY);
        assert!(Slope::new(2, 4).is_err());
        assert!(Slope::new(0, 0).is_err());
    }

    #[test]
    fn neighbor_has_unit_determinant() {
        for (p, q) in [(1, 0), (0, 1), (3, 5), (-7, 4), (13, 8)] {
            let s = Slope::new(p, q).unwrap();
            assert_eq!(s.det(s.neighbor()).abs(), 1);
        }
    }

    #[test]
    fn across_the_root_triangle() {
        let (i, z, o) = (Slope::INFINITY, Slope::ZERO, Slope::ONE);
        assert_eq!(i.across(z, o), Slope::new(-1, 1).unwrap());
        assert_eq!(i.across(o, z), Slope::new(2, 1).unwrap());
        assert_eq!(z.across(o, i), Slope::new(1, 2).unwrap());
    }
}
