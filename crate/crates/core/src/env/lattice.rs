use std::fmt;
use std::ops::{Add, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, RwreError};

/// Largest lattice dimension supported by the fixed-size representation.
pub const MAX_DIM: usize = 4;

/// A point (or jump) of Z^d. Copyable; unused coordinates are kept at zero so
/// equality, ordering and hashing are by value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticeVector {
    dim: u8,
    coords: [i64; MAX_DIM],
}

impl LatticeVector {
    pub fn new(coords: &[i64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(RwreError::InvalidParameter(format!(
                "lattice dimension must be in 1..={MAX_DIM}, got {}",
                coords.len()
            )));
        }
        let mut c = [0i64; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self { dim: coords.len() as u8, coords: c })
    }

    /// Panicking constructor for literals in code and tests.
    pub fn of(coords: &[i64]) -> Self {
        Self::new(coords).expect("lattice vector literal")
    }

    #[inline]
    pub fn from_1d(x: i64) -> Self {
        Self { dim: 1, coords: [x, 0, 0, 0] }
    }

    pub fn zero(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim));
        Self { dim: dim as u8, coords: [0; MAX_DIM] }
    }

    pub fn unit(dim: usize, axis: usize) -> Self {
        let mut v = Self::zero(dim);
        v.coords[axis] = 1;
        v
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn get(&self, axis: usize) -> i64 {
        self.coords[axis]
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> i64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0;
        for i in 0..MAX_DIM {
            s += self.coords[i] * other.coords[i];
        }
        s
    }

    /// l1 norm.
    pub fn norm1(&self) -> i64 {
        self.coords().iter().map(|c| c.abs()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords().iter().map(|&c| c as f64).collect()
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = *self;
        for c in out.coords.iter_mut() {
            *c *= k;
        }
        out
    }
}

impl Add for LatticeVector {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.coords[i] += rhs.coords[i];
        }
        self
    }
}

impl Sub for LatticeVector {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..MAX_DIM {
            self.coords[i] -= rhs.coords[i];
        }
        self
    }
}

impl Neg for LatticeVector {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1)
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for LatticeVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for LatticeVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        LatticeVector::new(&v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_norms() {
        let a = LatticeVector::of(&[1, -2]);
        let b = LatticeVector::of(&[3, 4]);
        assert_eq!(a + b, LatticeVector::of(&[4, 2]));
        assert_eq!(b - a, LatticeVector::of(&[2, 6]));
        assert_eq!(a.dot(&b), -5);
        assert_eq!(a.norm1(), 3);
        assert_eq!(-a, LatticeVector::of(&[-1, 2]));
    }

    #[test]
    fn ordering_is_lexicographic() {
        let mut v = [
            LatticeVector::of(&[1, 0]),
            LatticeVector::of(&[0, 5]),
            LatticeVector::of(&[1, -1]),
        ];
        v.sort();
        assert_eq!(v[0], LatticeVector::of(&[0, 5]));
        assert_eq!(v[1], LatticeVector::of(&[1, -1]));
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(LatticeVector::new(&[]).is_err());
        assert!(LatticeVector::new(&[0; MAX_DIM + 1]).is_err());
    }

    #[test]
    fn serde_as_plain_array() {
        let a = LatticeVector::of(&[2, -3]);
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, "[2,-3]");
        let b: LatticeVector = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
