use std::collections::BTreeMap;

use serde::Serialize;

use super::field::PrimeField;
use crate::error::{Error, Result};

/// A sparse vector over `F_p`: `(index, value)` pairs sorted by index, no zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SparseVec(Vec<(usize, u32)>);

impl SparseVec {
    pub fn new() -> Self {
        SparseVec(Vec::new())
    }

    pub fn unit(i: usize) -> Self {
        SparseVec(vec![(i, 1)])
    }

    /// Builds a vector from arbitrary pairs, summing repeated indices mod p.
    pub fn from_pairs(field: PrimeField, pairs: impl IntoIterator<Item = (usize, i64)>) -> Self {
        let mut acc: BTreeMap<usize, u32> = BTreeMap::new();
        for (i, v) in pairs {
            let e = acc.entry(i).or_insert(0);
            *e = field.add(*e, field.reduce(v));
        }
        SparseVec(acc.into_iter().filter(|&(_, v)| v != 0).collect())
    }

    /// Builds a vector from already reduced values; zeros are dropped.
    pub fn from_map(map: &BTreeMap<usize, u32>) -> Self {
        SparseVec(map.iter().filter(|&(_, &v)| v != 0).map(|(&i, &v)| (i, v)).collect())
    }

    pub fn from_dense(dense: &[u32]) -> Self {
        SparseVec(
            dense
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v != 0)
                .map(|(i, &v)| (i, v))
                .collect(),
        )
    }

    pub fn to_dense(&self, n: usize) -> Vec<u32> {
        let mut out = vec![0; n];
        for &(i, v) in &self.0 {
            out[i] = v;
        }
        out
    }

    pub fn entries(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len_nonzero(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, i: usize) -> u32 {
        match self.0.binary_search_by_key(&i, |&(j, _)| j) {
            Ok(pos) => self.0[pos].1,
            Err(_) => 0,
        }
    }

    pub fn leading(&self) -> Option<(usize, u32)> {
        self.0.first().copied()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.0.last().map(|&(i, _)| i)
    }

    pub fn scale(&self, field: PrimeField, c: u32) -> Self {
        if c.is_multiple_of(field.p()) {
            return SparseVec::new();
        }
        SparseVec(self.0.iter().map(|&(i, v)| (i, field.mul(v, c))).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, field: PrimeField, c: u32, other: &SparseVec) -> Self {
        let c = c % field.p();
        if c == 0 {
            return self.clone();
        }
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i]);
                i += 1;
            } else if take_b {
                out.push((b[j].0, field.mul(c, b[j].1)));
                j += 1;
            } else {
                let v = field.add(a[i].1, field.mul(c, b[j].1));
                if v != 0 {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVec(out)
    }

    pub fn add(&self, field: PrimeField, other: &SparseVec) -> Self {
        self.axpy(field, 1, other)
    }

    pub fn dot_dense(&self, field: PrimeField, dense: &[u32]) -> u32 {
        self.0
            .iter()
            .fold(0, |acc, &(i, v)| field.add(acc, field.mul(v, dense[i])))
    }
}

/// A sparse matrix over `F_p` in coordinate format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    /// Sorted row-major, no duplicate coordinates, all values nonzero.
    entries: Vec<(usize, usize, u32)>,
}

impl SparseMatrix {
    pub fn from_entries(
        field: PrimeField,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, i64)>,
    ) -> Result<Self> {
        let mut out: Vec<(usize, usize, u32)> = Vec::new();
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::MalformedMatrix(format!(
                    "entry ({r}, {c}) outside {rows}x{cols}"
                )));
            }
            out.push((r, c, field.reduce(v)));
        }
        out.sort_unstable();
        if let Some(w) = out.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::MalformedMatrix(format!(
                "duplicate coordinate ({}, {})",
                w[0].0, w[0].1
            )));
        }
        out.retain(|e| e.2 != 0);
        Ok(SparseMatrix {
            field,
            rows,
            cols,
            entries: out,
        })
    }

    pub fn from_rows(field: PrimeField, cols: usize, rows: &[SparseVec]) -> Result<Self> {
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(r, v)| v.entries().iter().map(move |&(c, x)| (r, c, x as i64)));
        Self::from_entries(field, rows.len(), cols, entries)
    }

    pub fn from_dense(field: PrimeField, dense: &[Vec<u32>]) -> Result<Self> {
        let cols = dense.first().map_or(0, Vec::len);
        if dense.iter().any(|r| r.len() != cols) {
            return Err(Error::MalformedMatrix("ragged rows".into()));
        }
        let entries = dense.iter().enumerate().flat_map(|(r, row)| {
            row.iter().enumerate().map(move |(c, &v)| (r, c, v as i64))
        });
        Self::from_entries(field, dense.len(), cols, entries)
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        SparseMatrix {
            field,
            rows: n,
            cols: n,
            entries: (0..n).map(|i| (i, i, 1)).collect(),
        }
    }

    pub fn zero(field: PrimeField, rows: usize, cols: usize) -> Self {
        SparseMatrix {
            field,
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, u32)] {
        &self.entries
    }

    pub fn row_vectors(&self) -> Vec<SparseVec> {
        let mut out = vec![Vec::new(); self.rows];
        for &(r, c, v) in &self.entries {
            out[r].push((c, v));
        }
        out.into_iter().map(SparseVec).collect()
    }

    pub fn mul_dense(&self, x: &[u32]) -> Vec<u32> {
        assert_eq!(x.len(), self.cols);
        let f = self.field;
        let mut out = vec![0; self.rows];
        for &(r, c, v) in &self.entries {
            out[r] = f.add(out[r], f.mul(v, x[c]));
        }
        out
    }
}

/// Row echelon form built incrementally; pivot rows are normalised to a
/// leading 1 at the lowest column index.
struct Echelon {
    field: PrimeField,
    pivots: BTreeMap<usize, SparseVec>,
}

impl Echelon {
    fn new(field: PrimeField) -> Self {
        Echelon {
            field,
            pivots: BTreeMap::new(),
        }
    }

    fn insert(&mut self, v: SparseVec) -> bool {
        let f = self.field;
        let mut v = v;
        loop {
            let Some((c, a)) = v.leading() else {
                return false;
            };
            match self.pivots.get(&c) {
                Some(piv) => v = v.axpy(f, f.neg(a), piv),
                None => {
                    let inv = f.inv(a).expect("leading entry is nonzero");
                    self.pivots.insert(c, v.scale(f, inv));
                    return true;
                }
            }
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Fully reduced rows in ascending pivot order.
    fn into_rref(self) -> Vec<SparseVec> {
        let f = self.field;
        let mut reduced: BTreeMap<usize, SparseVec> = BTreeMap::new();
        for (&c, row) in self.pivots.iter().rev() {
            let mut out = row.clone();
            for &(j, val) in row.entries() {
                if j != c {
                    if let Some(rj) = reduced.get(&j) {
                        out = out.axpy(f, f.neg(val), rj);
                    }
                }
            }
            reduced.insert(c, out);
        }
        reduced.into_values().collect()
    }
}

/// Reduced row echelon basis of the span of `vectors`, pivots ascending.
pub fn rref(field: PrimeField, vectors: impl IntoIterator<Item = SparseVec>) -> Vec<SparseVec> {
    let mut ech = Echelon::new(field);
    for v in vectors {
        ech.insert(v);
    }
    ech.into_rref()
}

fn check_cap(cols: usize, cap: usize) -> Result<()> {
    if cols > cap {
        return Err(Error::CapExceeded {
            what: "nullspace columns",
            size: cols,
            cap,
        });
    }
    Ok(())
}

pub fn rank(m: &SparseMatrix, cap: usize) -> Result<usize> {
    check_cap(m.cols, cap)?;
    let mut ech = Echelon::new(m.field);
    for row in m.row_vectors() {
        ech.insert(row);
    }
    Ok(ech.rank())
}

/// Basis of `{x : m x = 0}` in reduced row echelon form (lowest pivot first).
pub fn nullspace(m: &SparseMatrix, cap: usize) -> Result<Vec<SparseVec>> {
    check_cap(m.cols, cap)?;
    let f = m.field;
    let mut ech = Echelon::new(f);
    for row in m.row_vectors() {
        ech.insert(row);
    }
    let rows = ech.into_rref();
    let pivot_cols: Vec<usize> = rows.iter().map(|r| r.leading().unwrap().0).collect();
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivot_cols {
        is_pivot[c] = true;
    }
    // Column-wise view of the non-pivot entries of the RREF.
    let mut by_free: BTreeMap<usize, Vec<(usize, u32)>> = BTreeMap::new();
    for (row, &pc) in rows.iter().zip(&pivot_cols) {
        for &(j, v) in row.entries() {
            if j != pc {
                by_free.entry(j).or_default().push((pc, v));
            }
        }
    }
    let basis = (0..m.cols).filter(|&j| !is_pivot[j]).map(|free| {
        let mut pairs: Vec<(usize, i64)> = vec![(free, 1)];
        if let Some(col) = by_free.get(&free) {
            pairs.extend(col.iter().map(|&(pc, v)| (pc, f.neg(v) as i64)));
        }
        SparseVec::from_pairs(f, pairs)
    });
    Ok(rref(f, basis))
}

/// A subspace of `F_p^n` stored by its canonical reduced echelon basis, so
/// equality of subspaces is equality of values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Subspace {
    #[serde(skip)]
    field: PrimeField,
    ambient_dim: usize,
    basis: Vec<SparseVec>,
}

impl Subspace {
    pub fn span(field: PrimeField, ambient_dim: usize, vectors: impl IntoIterator<Item = SparseVec>) -> Self {
        let basis = rref(field, vectors);
        debug_assert!(basis.iter().all(|v| v.max_index().is_none_or(|i| i < ambient_dim)));
        Subspace {
            field,
            ambient_dim,
            basis,
        }
    }

    pub fn zero(field: PrimeField, ambient_dim: usize) -> Self {
        Self::span(field, ambient_dim, [])
    }

    pub fn full(field: PrimeField, ambient_dim: usize) -> Self {
        Self::span(field, ambient_dim, (0..ambient_dim).map(SparseVec::unit))
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SparseVec] {
        &self.basis
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.basis.iter().map(|v| v.leading().unwrap().0).collect()
    }

    /// Coefficients of `v` in the echelon basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<u32>> {
        let f = self.field;
        let coords: Vec<u32> = self.pivots().iter().map(|&c| v.get(c)).collect();
        let mut rest = v.clone();
        for (b, &c) in self.basis.iter().zip(&coords) {
            rest = rest.axpy(f, f.neg(c), b);
        }
        rest.is_empty().then_some(coords)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(
            self.field,
            self.ambient_dim,
            self.basis.iter().chain(&other.basis).cloned(),
        )
    }
}

fn commutant_equations(field: PrimeField, n: usize, perms: &[Vec<usize>]) -> Result<Echelon> {
    let mut ech = Echelon::new(field);
    for perm in perms {
        if perm.len() != n {
            return Err(Error::MalformedMatrix(format!(
                "permutation of length {} on {n} points",
                perm.len()
            )));
        }
        for i in 0..n {
            for j in 0..n {
                let a = perm[i] * n + perm[j];
                let b = i * n + j;
                if a != b {
                    ech.insert(SparseVec::from_pairs(field, [(a, 1), (b, -1)]));
                }
            }
        }
    }
    Ok(ech)
}

/// Dimension of the space of `n x n` matrices commuting with every given
/// permutation matrix, found by a sparse linear solve on `n^2` unknowns.
///
/// For a permutation `pi` (with `P e_j = e_{pi(j)}`) the condition `TP = PT`
/// reads `T[pi(i)][pi(j)] = T[i][j]`.
pub fn commutant_dim(field: PrimeField, n: usize, perms: &[Vec<usize>], cap: usize) -> Result<usize> {
    let unknowns = n * n;
    check_cap(unknowns, cap)?;
    Ok(unknowns - commutant_equations(field, n, perms)?.rank())
}

/// A basis of the commutant, each matrix flattened row-major (`T[i][j]` at
/// index `i * n + j`).
pub fn commutant_basis(field: PrimeField, n: usize, perms: &[Vec<usize>], cap: usize) -> Result<Vec<SparseVec>> {
    let unknowns = n * n;
    check_cap(unknowns, cap)?;
    let rows = commutant_equations(field, n, perms)?.into_rref();
    let m = SparseMatrix::from_rows(field, unknowns, &rows)?;
    nullspace(&m, cap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn identity_has_trivial_kernel() {
        let m = SparseMatrix::identity(f(3), 3);
        assert!(nullspace(&m, 5000).unwrap().is_empty());
    }

    #[test]
    fn zero_matrix_kernel_is_everything() {
        let m = SparseMatrix::zero(f(2), 4, 4);
        let ns = nullspace(&m, 5000).unwrap();
        assert_eq!(ns, (0..4).map(SparseVec::unit).collect::<Vec<_>>());
    }

    /// Brute force over all 27 vectors of F_3^3 for the kernel of P - I.
    #[test]
    fn cyclic_shift_minus_identity() {
        let field = f(3);
        // P e_j = e_{j+1}; (P - I)[i][j] = [i == j+1] - [i == j].
        let m = SparseMatrix::from_entries(
            field,
            3,
            3,
            (0..3).flat_map(|j| [((j + 1) % 3, j, 1), (j, j, -1)]),
        )
        .unwrap();
        let mut kernel = Vec::new();
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let x = [a, b, c];
                    if m.mul_dense(&x).iter().all(|&v| v == 0) {
                        kernel.push(x);
                    }
                }
            }
        }
        assert_eq!(kernel, vec![[0, 0, 0], [1, 1, 1], [2, 2, 2]]);
        let ns = nullspace(&m, 5000).unwrap();
        assert_eq!(ns, vec![SparseVec::from_dense(&[1, 1, 1])]);
    }

    #[test]
    fn duplicate_coordinates_rejected() {
        let err = SparseMatrix::from_entries(f(5), 2, 2, [(0, 0, 1), (0, 0, 2)]);
        assert!(matches!(err, Err(Error::MalformedMatrix(_))));
        let err = SparseMatrix::from_entries(f(5), 2, 2, [(2, 0, 1)]);
        assert!(matches!(err, Err(Error::MalformedMatrix(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let m = SparseMatrix::zero(f(2), 1, 6000);
        assert!(matches!(nullspace(&m, 5000), Err(Error::CapExceeded { .. })));
        assert!(matches!(rank(&m, 5000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn subspace_equality_is_canonical() {
        let field = f(5);
        let a = Subspace::span(field, 3, [SparseVec::from_dense(&[1, 2, 0]), SparseVec::from_dense(&[0, 1, 1])]);
        let b = Subspace::span(field, 3, [SparseVec::from_dense(&[1, 3, 1]), SparseVec::from_dense(&[2, 4, 0])]);
        assert_eq!(a, b);
        assert_eq!(a.dim(), 2);
        assert!(a.contains(&SparseVec::from_dense(&[1, 2, 0])));
        assert!(!a.contains(&SparseVec::from_dense(&[0, 0, 1])));
    }

    #[test]
    fn commutant_of_regular_cyclic_group() {
        // The commutant of the regular representation of Z/4 is F_p[Z/4].
        let perm: Vec<usize> = (0..4).map(|i| (i + 1) % 4).collect();
        assert_eq!(commutant_dim(f(2), 4, &[perm], 5000).unwrap(), 4);
        assert_eq!(commutant_dim(f(2), 3, &[], 5000).unwrap(), 9);
    }
}
