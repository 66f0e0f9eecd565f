use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{EddyError, Result};

/// Half of the sign partition `Z²₀ = Z²₊ ∪ Z²₋` a mode belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Partition {
    Plus,
    Minus,
}

/// A nonzero lattice point `k ∈ Z²₀`.
///
/// `k ∈ Z²₊` iff `k₁ > 0`, or `k₁ = 0` and `k₂ > 0`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "[i32; 2]", into = "[i32; 2]")]
pub struct Mode {
    k1: i32,
    k2: i32,
}

impl Mode {
    pub fn new(k1: i32, k2: i32) -> Result<Self> {
        if k1 == 0 && k2 == 0 {
            return Err(EddyError::ZeroMode);
        }
        Ok(Self { k1, k2 })
    }

    #[inline]
    pub fn k1(&self) -> i32 {
        self.k1
    }

    #[inline]
    pub fn k2(&self) -> i32 {
        self.k2
    }

    #[inline]
    pub fn as_array(&self) -> [i32; 2] {
        [self.k1, self.k2]
    }

    #[inline]
    pub fn partition(&self) -> Partition {
        if self.k1 > 0 || (self.k1 == 0 && self.k2 > 0) {
            Partition::Plus
        } else {
            Partition::Minus
        }
    }

    #[inline]
    pub fn is_plus(&self) -> bool {
        self.partition() == Partition::Plus
    }

    #[inline]
    pub fn neg(&self) -> Mode {
        Mode { k1: -self.k1, k2: -self.k2 }
    }

    /// The member of `{k, −k}` lying in `Z²₊`.
    #[inline]
    pub fn plus_representative(&self) -> Mode {
        if self.is_plus() {
            *self
        } else {
            self.neg()
        }
    }

    #[inline]
    pub fn norm_sq(&self) -> i64 {
        let (a, b) = (self.k1 as i64, self.k2 as i64);
        a * a + b * b
    }

    #[inline]
    pub fn norm(&self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    /// `self + other`, or `None` when the sum is the zero mode.
    #[inline]
    pub fn checked_add(&self, other: Mode) -> Option<Mode> {
        Mode::new(self.k1 + other.k1, self.k2 + other.k2).ok()
    }

    #[inline]
    pub fn checked_sub(&self, other: Mode) -> Option<Mode> {
        Mode::new(self.k1 - other.k1, self.k2 - other.k2).ok()
    }

    /// `k·x` for a point of the torus.
    #[inline]
    pub fn dot_point(&self, x: [f64; 2]) -> f64 {
        self.k1 as f64 * x[0] + self.k2 as f64 * x[1]
    }
}

impl TryFrom<[i32; 2]> for Mode {
    type Error = EddyError;

    fn try_from(value: [i32; 2]) -> Result<Self> {
        Mode::new(value[0], value[1])
    }
}

impl From<Mode> for [i32; 2] {
    fn from(m: Mode) -> Self {
        m.as_array()
    }
}

impl fmt::Debug for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k1, self.k2)
    }
}
