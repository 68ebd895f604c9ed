//! Exact points and vectors in the plane and in 3-space.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::num::{fmt_rat, Rat};

/// Point in the plane with exact rational coordinates.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct P2 {
    pub x: Rat,
    pub y: Rat,
}

/// Vector in the plane.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct V2 {
    pub x: Rat,
    pub y: Rat,
}

/// Point in 3-space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct P3 {
    pub x: Rat,
    pub y: Rat,
    pub z: Rat,
}

/// Vector in 3-space.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct V3 {
    pub x: Rat,
    pub y: Rat,
    pub z: Rat,
}

impl P2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        P2 { x, y }
    }

    /// Squared Euclidean distance to another point (exact).
    pub fn dist2(&self, other: &P2) -> Rat {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }
}

impl V2 {
    pub fn new(x: Rat, y: Rat) -> Self {
        V2 { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl P3 {
    pub fn new(x: Rat, y: Rat, z: Rat) -> Self {
        P3 { x, y, z }
    }

    pub fn coords(&self) -> [&Rat; 3] {
        [&self.x, &self.y, &self.z]
    }
}

impl V3 {
    pub fn new(x: Rat, y: Rat, z: Rat) -> Self {
        V3 { x, y, z }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero() && self.z.is_zero()
    }

    pub fn dot(&self, other: &V3) -> Rat {
        &self.x * &other.x + &self.y * &other.y + &self.z * &other.z
    }

    pub fn cross(&self, other: &V3) -> V3 {
        V3 {
            x: &self.y * &other.z - &self.z * &other.y,
            y: &self.z * &other.x - &self.x * &other.z,
            z: &self.x * &other.y - &self.y * &other.x,
        }
    }

    /// Scale by a rational factor.
    pub fn scale(&self, s: &Rat) -> V3 {
        V3 {
            x: &self.x * s,
            y: &self.y * s,
            z: &self.z * s,
        }
    }

    /// True when `other` is a rational multiple of `self` (or both zero).
    pub fn parallel(&self, other: &V3) -> bool {
        self.cross(other).is_zero()
    }
}

impl Add<&V2> for &P2 {
    type Output = P2;
    fn add(self, v: &V2) -> P2 {
        P2::new(&self.x + &v.x, &self.y + &v.y)
    }
}

impl Sub<&P2> for &P2 {
    type Output = V2;
    fn sub(self, other: &P2) -> V2 {
        V2::new(&self.x - &other.x, &self.y - &other.y)
    }
}

impl Add<&V2> for &V2 {
    type Output = V2;
    fn add(self, other: &V2) -> V2 {
        V2::new(&self.x + &other.x, &self.y + &other.y)
    }
}

impl Neg for &V2 {
    type Output = V2;
    fn neg(self) -> V2 {
        V2::new(-&self.x, -&self.y)
    }
}

impl Add<&V3> for &P3 {
    type Output = P3;
    fn add(self, v: &V3) -> P3 {
        P3::new(&self.x + &v.x, &self.y + &v.y, &self.z + &v.z)
    }
}

impl Sub<&P3> for &P3 {
    type Output = V3;
    fn sub(self, other: &P3) -> V3 {
        V3::new(&self.x - &other.x, &self.y - &other.y, &self.z - &other.z)
    }
}

impl Sub<&V3> for &V3 {
    type Output = V3;
    fn sub(self, other: &V3) -> V3 {
        V3::new(&self.x - &other.x, &self.y - &other.y, &self.z - &other.z)
    }
}

impl Mul<&Rat> for &V2 {
    type Output = V2;
    fn mul(self, s: &Rat) -> V2 {
        V2::new(&self.x * s, &self.y * s)
    }
}

impl fmt::Debug for P2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_rat(&self.x), fmt_rat(&self.y))
    }
}

impl fmt::Debug for V2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", fmt_rat(&self.x), fmt_rat(&self.y))
    }
}

impl fmt::Debug for P3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {})",
            fmt_rat(&self.x),
            fmt_rat(&self.y),
            fmt_rat(&self.z)
        )
    }
}

impl fmt::Debug for V3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "<{}, {}, {}>",
            fmt_rat(&self.x),
            fmt_rat(&self.y),
            fmt_rat(&self.z)
        )
    }
}

/// Shorthand constructors used heavily in tests.
pub fn p2(x: i64, y: i64) -> P2 {
    P2::new(crate::num::rat(x), crate::num::rat(y))
}

pub fn p3(x: i64, y: i64, z: i64) -> P3 {
    P3::new(crate::num::rat(x), crate::num::rat(y), crate::num::rat(z))
}

pub fn v3(x: i64, y: i64, z: i64) -> V3 {
    V3::new(crate::num::rat(x), crate::num::rat(y), crate::num::rat(z))
}
