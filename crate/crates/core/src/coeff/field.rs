use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The prime field `F_p` for a prime `2 <= p <= 97`.
///
/// Field values are plain `u32` in `[0, p)`; [`FpElem`] pairs a value with
/// its field when value semantics are more convenient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;
    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

impl PrimeField {
    pub const MAX_P: u32 = 97;

    pub fn new(p: u32) -> Result<Self> {
        if !(2..=Self::MAX_P).contains(&p) || !(2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d)) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.p
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: u32) -> Option<u32> {
        if a.is_multiple_of(self.p) {
            None
        } else {
            Some(self.pow(a, (self.p - 2) as u64))
        }
    }

    pub fn elem(self, value: i64) -> FpElem {
        FpElem {
            value: self.reduce(value),
            field: self,
        }
    }

    pub fn elements(self) -> impl Iterator<Item = FpElem> {
        (0..self.p).map(move |v| FpElem { value: v, field: self })
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

/// An element of `F_p` carrying its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FpElem {
    value: u32,
    field: PrimeField,
}

impl FpElem {
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn field(self) -> PrimeField {
        self.field
    }

    pub fn inv(self) -> Option<FpElem> {
        self.field.inv(self.value).map(|value| FpElem { value, ..self })
    }
}

impl fmt::Display for FpElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Add for FpElem {
    type Output = FpElem;
    fn add(self, rhs: FpElem) -> FpElem {
        assert_eq!(self.field, rhs.field, "adding elements of different prime fields");
        FpElem {
            value: self.field.add(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Sub for FpElem {
    type Output = FpElem;
    fn sub(self, rhs: FpElem) -> FpElem {
        assert_eq!(self.field, rhs.field, "subtracting elements of different prime fields");
        FpElem {
            value: self.field.sub(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Mul for FpElem {
    type Output = FpElem;
    fn mul(self, rhs: FpElem) -> FpElem {
        assert_eq!(self.field, rhs.field, "multiplying elements of different prime fields");
        FpElem {
            value: self.field.mul(self.value, rhs.value),
            field: self.field,
        }
    }
}

impl Neg for FpElem {
    type Output = FpElem;
    fn neg(self) -> FpElem {
        FpElem {
            value: self.field.neg(self.value),
            field: self.field,
        }
    }
}
