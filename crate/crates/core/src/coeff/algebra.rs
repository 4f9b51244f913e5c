use std::collections::BTreeMap;
use std::fmt;

use super::field::{FpElem, PrimeField};
use crate::error::{Error, Result};

/// A commutative ring of prime characteristic with value semantics.
///
/// Binary operations panic when the operands come from different rings;
/// the fallible inherent methods of each implementor report that instead.
pub trait CharPRing: Clone + PartialEq + fmt::Debug {
    fn characteristic(&self) -> u32;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;

    fn ring_pow(&self, mut e: u64) -> Self {
        let mut acc = self.one_like();
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.ring_mul(&base);
            }
            base = base.ring_mul(&base);
            e >>= 1;
        }
        acc
    }
}

impl CharPRing for FpElem {
    fn characteristic(&self) -> u32 {
        self.field().p()
    }
    fn zero_like(&self) -> Self {
        self.field().elem(0)
    }
    fn one_like(&self) -> Self {
        self.field().elem(1)
    }
    fn ring_add(&self, other: &Self) -> Self {
        *self + *other
    }
    fn ring_mul(&self, other: &Self) -> Self {
        *self * *other
    }
    fn is_zero(&self) -> bool {
        self.value() == 0
    }
}

/// An element of `F_p[A]` for a finite abelian group `A = Z/n_1 x ... x Z/n_r`.
///
/// Group elements are exponent vectors with `0 <= e_i < n_i`; only nonzero
/// coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroupAlgebraElem {
    field: PrimeField,
    orders: Vec<u32>,
    coeffs: BTreeMap<Vec<u32>, u32>,
}

impl AbelianGroupAlgebraElem {
    pub fn zero(field: PrimeField, orders: Vec<u32>) -> Self {
        assert!(orders.iter().all(|&n| n >= 1), "cyclic factor of order 0");
        AbelianGroupAlgebraElem {
            field,
            orders,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one(field: PrimeField, orders: Vec<u32>) -> Self {
        let id = vec![0; orders.len()];
        Self::zero(field, orders).with_term(id, 1)
    }

    /// The basis element `[g]`; exponents are reduced modulo the orders.
    pub fn basis(field: PrimeField, orders: Vec<u32>, g: &[i64]) -> Self {
        Self::zero(field, orders).with_term_i64(g, 1)
    }

    pub fn from_terms(field: PrimeField, orders: Vec<u32>, terms: &[(Vec<i64>, i64)]) -> Self {
        terms
            .iter()
            .fold(Self::zero(field, orders), |acc, (g, c)| acc.with_term_i64(g, *c))
    }

    fn with_term_i64(self, g: &[i64], c: i64) -> Self {
        assert_eq!(g.len(), self.orders.len(), "exponent vector has wrong length");
        let key = g
            .iter()
            .zip(&self.orders)
            .map(|(&e, &n)| e.rem_euclid(n as i64) as u32)
            .collect();
        let c = self.field.reduce(c);
        self.with_term(key, c)
    }

    fn with_term(mut self, key: Vec<u32>, c: u32) -> Self {
        let f = self.field;
        let entry = self.coeffs.entry(key).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.coeffs.retain(|_, v| *v != 0);
        }
        self
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn group_order(&self) -> usize {
        self.orders.iter().map(|&n| n as usize).product()
    }

    pub fn coeff(&self, g: &[u32]) -> u32 {
        self.coeffs.get(g).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, u32)> {
        self.coeffs.iter().map(|(g, &c)| (g, c))
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.field != other.field || self.orders != other.orders {
            return Err(Error::RingMismatch(format!(
                "{}[{:?}] vs {}[{:?}]",
                self.field, self.orders, other.field, other.orders
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (g, &c) in &other.coeffs {
            let e = out.coeffs.entry(g.clone()).or_insert(0);
            *e = self.field.add(*e, c);
        }
        out.coeffs.retain(|_, v| *v != 0);
        Ok(out)
    }

    pub fn scale(&self, c: u32) -> Self {
        let f = self.field;
        let mut out = Self::zero(f, self.orders.clone());
        for (g, &v) in &self.coeffs {
            let w = f.mul(v, c % f.p());
            if w != 0 {
                out.coeffs.insert(g.clone(), w);
            }
        }
        out
    }

    /// Group-algebra product: `(sum a_g g)(sum b_h h) = sum a_g b_h (g + h)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let f = self.field;
        let mut acc: BTreeMap<Vec<u32>, u32> = BTreeMap::new();
        for (g, &a) in &self.coeffs {
            for (h, &b) in &other.coeffs {
                let gh: Vec<u32> = g
                    .iter()
                    .zip(h)
                    .zip(&self.orders)
                    .map(|((x, y), n)| (x + y) % n)
                    .collect();
                let e = acc.entry(gh).or_insert(0);
                *e = f.add(*e, f.mul(a, b));
            }
        }
        acc.retain(|_, v| *v != 0);
        Ok(AbelianGroupAlgebraElem {
            field: f,
            orders: self.orders.clone(),
            coeffs: acc,
        })
    }

    /// Enumerates every group element in lexicographic exponent order.
    pub fn group_elements(orders: &[u32]) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for &n in orders {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..n).map(move |e| {
                        let mut v = prefix.clone();
                        v.push(e);
                        v
                    })
                })
                .collect();
        }
        out
    }
}

impl fmt::Debug for AbelianGroupAlgebraElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AbelianGroupAlgebraElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(g, c)| format!("{c}*{g:?}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl CharPRing for AbelianGroupAlgebraElem {
    fn characteristic(&self) -> u32 {
        self.field.p()
    }
    fn zero_like(&self) -> Self {
        Self::zero(self.field, self.orders.clone())
    }
    fn one_like(&self) -> Self {
        Self::one(self.field, self.orders.clone())
    }
    fn ring_add(&self, other: &Self) -> Self {
        self.add(other).expect("operands from different group algebras")
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self.convolve(other).expect("operands from different group algebras")
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}
