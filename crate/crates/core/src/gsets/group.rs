use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Canonical encoding of a group element or a point: a short integer word.
///
/// Equality of elements is equality of encodings, and the derived order
/// (lexicographic) is the tie-break used for every deterministic ordering.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(pub Vec<i64>);

impl Elem {
    pub fn new(words: impl Into<Vec<i64>>) -> Self {
        Elem(words.into())
    }

    pub fn words(&self) -> &[i64] {
        &self.0
    }

    /// Parses the `Display` form `a,b,c`, optionally wrapped in brackets.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix('[').and_then(|t| t.strip_suffix(']')).unwrap_or(s);
        if s.trim().is_empty() {
            return Ok(Elem(Vec::new()));
        }
        s.split(',')
            .map(|w| {
                w.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad element encoding {s:?}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Elem)
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let words: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "{}", words.join(","))
    }
}

/// A multiplication table read from JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulTable {
    names: Vec<String>,
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

#[derive(Deserialize)]
struct MulTableDoc {
    elements: Vec<String>,
    table: Vec<Vec<String>>,
}

impl MulTable {
    /// Parses `{"elements": [names], "table": [[names]]}` where
    /// `table[i][j]` names the product `elements[i] * elements[j]`.
    pub fn from_json(json: &str) -> Result<Self> {
        let doc: MulTableDoc = serde_json::from_str(json)?;
        let n = doc.elements.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty element list".into()));
        }
        let lookup: HashMap<&str, usize> = doc
            .elements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if lookup.len() != n {
            return Err(Error::InvalidGroup("duplicate element names".into()));
        }
        if doc.table.len() != n || doc.table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup(format!("table is not {n}x{n}")));
        }
        let table = doc
            .table
            .iter()
            .map(|row| {
                row.iter()
                    .map(|s| {
                        lookup
                            .get(s.as_str())
                            .copied()
                            .ok_or_else(|| Error::InvalidGroup(format!("unknown element {s:?} in table")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let inverses = (0..n)
            .map(|x| {
                (0..n)
                    .find(|&y| table[x][y] == identity && table[y][x] == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("{} has no inverse", doc.elements[x])))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!(
                            "not associative at ({}, {}, {})",
                            doc.elements[a], doc.elements[b], doc.elements[c]
                        )));
                    }
                }
            }
        }
        Ok(MulTable {
            names: doc.elements,
            table,
            identity,
            inverses,
        })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// The ambient arithmetic in which group elements are multiplied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ambient {
    /// `dim x dim` matrices over `Z/modulus`, row-major; only invertible ones
    /// may be used as group elements.
    Matrices { dim: usize, modulus: i64 },
    /// Permutations of `0..degree` as image lists, composed right to left:
    /// `(a * b)(i) = a(b(i))`.
    Permutations { degree: usize },
    /// `Z/n_1 x ... x Z/n_r` written additively.
    Additive { orders: Vec<i64> },
    /// `(Z/modulus)^x`.
    Units { modulus: i64 },
    /// `Z^rank` written additively (infinite; never enumerated whole).
    Lattice { rank: usize },
    /// Direct product; encodings are concatenated.
    Product(Vec<Ambient>),
    /// Elements `0..n` of an explicit multiplication table.
    Table(Arc<MulTable>),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    (old_r == 1 || m == 1).then(|| old_s.rem_euclid(m))
}

impl Ambient {
    pub fn encoded_len(&self) -> usize {
        match self {
            Ambient::Matrices { dim, .. } => dim * dim,
            Ambient::Permutations { degree } => *degree,
            Ambient::Additive { orders } => orders.len(),
            Ambient::Units { .. } => 1,
            Ambient::Lattice { rank } => *rank,
            Ambient::Product(fs) => fs.iter().map(Ambient::encoded_len).sum(),
            Ambient::Table(_) => 1,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Ambient::Matrices { dim, modulus } => format!("M_{dim}(Z/{modulus})"),
            Ambient::Permutations { degree } => format!("Sym({degree})"),
            Ambient::Additive { orders } => {
                let parts: Vec<String> = orders.iter().map(|n| format!("Z/{n}")).collect();
                if parts.is_empty() {
                    "1".into()
                } else {
                    parts.join(" x ")
                }
            }
            Ambient::Units { modulus } => format!("(Z/{modulus})^x"),
            Ambient::Lattice { rank } => format!("Z^{rank}"),
            Ambient::Product(fs) => fs.iter().map(Ambient::describe).collect::<Vec<_>>().join(" x "),
            Ambient::Table(t) => format!("table({})", t.len()),
        }
    }

    pub fn identity(&self) -> Elem {
        match self {
            Ambient::Matrices { dim, modulus } => {
                let mut w = vec![0; dim * dim];
                for i in 0..*dim {
                    w[i * dim + i] = 1 % modulus;
                }
                Elem(w)
            }
            Ambient::Permutations { degree } => Elem((0..*degree as i64).collect()),
            Ambient::Additive { orders } => Elem(vec![0; orders.len()]),
            Ambient::Units { modulus } => Elem(vec![1 % modulus]),
            Ambient::Lattice { rank } => Elem(vec![0; *rank]),
            Ambient::Product(fs) => Elem(fs.iter().flat_map(|f| f.identity().0).collect()),
            Ambient::Table(t) => Elem(vec![t.identity as i64]),
        }
    }

    fn split<'a>(&self, e: &'a [i64]) -> Vec<&'a [i64]> {
        let Ambient::Product(fs) = self else {
            return vec![e];
        };
        let mut out = Vec::with_capacity(fs.len());
        let mut rest = e;
        for f in fs {
            let (head, tail) = rest.split_at(f.encoded_len());
            out.push(head);
            rest = tail;
        }
        out
    }

    /// Whether `e` is a well-formed, invertible element of this ambient.
    pub fn is_valid(&self, e: &Elem) -> bool {
        if e.0.len() != self.encoded_len() {
            return false;
        }
        match self {
            Ambient::Matrices { modulus, .. } => {
                e.0.iter().all(|&x| (0..*modulus).contains(&x)) && self.inv(e).is_ok()
            }
            Ambient::Permutations { degree } => {
                let mut seen = vec![false; *degree];
                e.0.iter().all(|&x| {
                    (0..*degree as i64).contains(&x) && !std::mem::replace(&mut seen[x as usize], true)
                })
            }
            Ambient::Additive { orders } => e.0.iter().zip(orders).all(|(&x, &n)| (0..n).contains(&x)),
            Ambient::Units { modulus } => (0..*modulus).contains(&e.0[0]) && gcd(e.0[0], *modulus) == 1,
            Ambient::Lattice { .. } => true,
            Ambient::Product(fs) => fs
                .iter()
                .zip(self.split(&e.0))
                .all(|(f, part)| f.is_valid(&Elem(part.to_vec()))),
            Ambient::Table(t) => (0..t.len() as i64).contains(&e.0[0]),
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match self {
            Ambient::Matrices { dim, modulus } => {
                let n = *dim;
                let mut out = vec![0i64; n * n];
                for i in 0..n {
                    for k in 0..n {
                        let aik = a.0[i * n + k];
                        if aik == 0 {
                            continue;
                        }
                        for j in 0..n {
                            out[i * n + j] += aik * b.0[k * n + j];
                        }
                    }
                }
                for x in &mut out {
                    *x = x.rem_euclid(*modulus);
                }
                Elem(out)
            }
            Ambient::Permutations { .. } => Elem(b.0.iter().map(|&i| a.0[i as usize]).collect()),
            Ambient::Additive { orders } => Elem(
                a.0.iter()
                    .zip(&b.0)
                    .zip(orders)
                    .map(|((x, y), n)| (x + y).rem_euclid(*n))
                    .collect(),
            ),
            Ambient::Units { modulus } => Elem(vec![(a.0[0] * b.0[0]).rem_euclid(*modulus)]),
            Ambient::Lattice { .. } => Elem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect()),
            Ambient::Product(fs) => {
                let (pa, pb) = (self.split(&a.0), self.split(&b.0));
                Elem(
                    fs.iter()
                        .zip(pa.into_iter().zip(pb))
                        .flat_map(|(f, (x, y))| f.mul(&Elem(x.to_vec()), &Elem(y.to_vec())).0)
                        .collect(),
                )
            }
            Ambient::Table(t) => Elem(vec![t.table[a.0[0] as usize][b.0[0] as usize] as i64]),
        }
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        match self {
            Ambient::Matrices { dim, modulus } => matrix_inverse(*dim, *modulus, &a.0).map(Elem),
            Ambient::Permutations { degree } => {
                let mut out = vec![0i64; *degree];
                for (i, &x) in a.0.iter().enumerate() {
                    out[x as usize] = i as i64;
                }
                Ok(Elem(out))
            }
            Ambient::Additive { orders } => Ok(Elem(
                a.0.iter().zip(orders).map(|(x, n)| (-x).rem_euclid(*n)).collect(),
            )),
            Ambient::Units { modulus } => mod_inverse(a.0[0], *modulus)
                .map(|x| Elem(vec![x]))
                .ok_or_else(|| Error::NotInvertible(format!("{} mod {modulus}", a.0[0]))),
            Ambient::Lattice { .. } => Ok(Elem(a.0.iter().map(|x| -x).collect())),
            Ambient::Product(fs) => {
                let mut out = Vec::with_capacity(a.0.len());
                for (f, part) in fs.iter().zip(self.split(&a.0)) {
                    out.extend(f.inv(&Elem(part.to_vec()))?.0);
                }
                Ok(Elem(out))
            }
            Ambient::Table(t) => Ok(Elem(vec![t.inverses[a.0[0] as usize] as i64])),
        }
    }

    /// `a b == b a`, with an early exit for matrices.
    pub fn commutes(&self, a: &Elem, b: &Elem) -> bool {
        match self {
            Ambient::Matrices { dim, modulus } => {
                let n = *dim;
                for i in 0..n {
                    for j in 0..n {
                        let mut ab = 0i64;
                        let mut ba = 0i64;
                        for k in 0..n {
                            ab += a.0[i * n + k] * b.0[k * n + j];
                            ba += b.0[i * n + k] * a.0[k * n + j];
                        }
                        if (ab - ba).rem_euclid(*modulus) != 0 {
                            return false;
                        }
                    }
                }
                true
            }
            Ambient::Additive { .. } | Ambient::Units { .. } | Ambient::Lattice { .. } => true,
            _ => self.mul(a, b) == self.mul(b, a),
        }
    }

    /// Natural reduction map into a coarser ambient of the same shape
    /// (entries reduced modulo the target modulus).
    pub fn reduce_to(&self, e: &Elem, target: &Ambient) -> Result<Elem> {
        let bad = || {
            Error::InvalidArgument(format!(
                "no reduction map {} -> {}",
                self.describe(),
                target.describe()
            ))
        };
        match (self, target) {
            (Ambient::Matrices { dim: d1, modulus: m1 }, Ambient::Matrices { dim: d2, modulus: m2 })
                if d1 == d2 && m1 % m2 == 0 =>
            {
                Ok(Elem(e.0.iter().map(|x| x.rem_euclid(*m2)).collect()))
            }
            (Ambient::Units { modulus: m1 }, Ambient::Units { modulus: m2 }) if m1 % m2 == 0 => {
                Ok(Elem(vec![e.0[0].rem_euclid(*m2)]))
            }
            (Ambient::Additive { orders: o1 }, Ambient::Additive { orders: o2 })
                if o1.len() == o2.len() && o1.iter().zip(o2).all(|(a, b)| a % b == 0) =>
            {
                Ok(Elem(e.0.iter().zip(o2).map(|(x, n)| x.rem_euclid(*n)).collect()))
            }
            (Ambient::Lattice { rank: r1 }, Ambient::Lattice { rank: r2 }) if r1 == r2 => Ok(e.clone()),
            (Ambient::Product(f1), Ambient::Product(f2)) if f1.len() == f2.len() => {
                let mut out = Vec::new();
                for ((a, b), part) in f1.iter().zip(f2).zip(self.split(&e.0)) {
                    out.extend(a.reduce_to(&Elem(part.to_vec()), b)?.0);
                }
                Ok(Elem(out))
            }
            _ if self == target => Ok(e.clone()),
            _ => Err(bad()),
        }
    }

    /// Diagonal matrix helper for the matrix ambients.
    pub fn diagonal(dim: usize, modulus: i64, diag: &[i64]) -> Elem {
        assert_eq!(diag.len(), dim);
        let mut w = vec![0; dim * dim];
        for (i, &d) in diag.iter().enumerate() {
            w[i * dim + i] = d.rem_euclid(modulus);
        }
        Elem(w)
    }

    /// Elementary matrix `I + c E_{ij}`.
    pub fn elementary(dim: usize, modulus: i64, i: usize, j: usize, c: i64) -> Elem {
        let mut w = Ambient::Matrices { dim, modulus }.identity().0;
        w[i * dim + j] = (w[i * dim + j] + c).rem_euclid(modulus);
        Elem(w)
    }
}

/// Gauss-Jordan inversion over `Z/modulus`, pivoting on unit entries.
fn matrix_inverse(n: usize, modulus: i64, a: &[i64]) -> Result<Vec<i64>> {
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|i| {
            let mut row: Vec<i64> = a[i * n..(i + 1) * n].iter().map(|x| x.rem_euclid(modulus)).collect();
            row.extend((0..n).map(|j| i64::from(i == j)));
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| gcd(m[r][col], modulus) == 1)
            .ok_or_else(|| Error::NotInvertible(format!("matrix {a:?} mod {modulus}")))?;
        m.swap(col, pivot);
        let inv = mod_inverse(m[col][col], modulus).expect("unit pivot");
        for x in &mut m[col] {
            *x = (*x * inv).rem_euclid(modulus);
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let factor = m[r][col];
                for c in 0..2 * n {
                    m[r][c] = (m[r][c] - factor * m[col][c]).rem_euclid(modulus);
                }
            }
        }
    }
    Ok(m.into_iter().flat_map(|row| row[n..].to_vec()).collect())
}

/// A finite group enumerated inside an ambient arithmetic.
///
/// Elements are indexed `0..order`; index 0 is the identity and the order
/// is breadth-first from the identity along right multiplication by the
/// generators, ties within a layer broken by encoding.
#[derive(Clone)]
pub struct GroupModel {
    name: String,
    ambient: Ambient,
    elements: Vec<Elem>,
    index: HashMap<Elem, usize>,
    generators: Vec<usize>,
    inverses: Vec<usize>,
}

impl fmt::Debug for GroupModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupModel")
            .field("name", &self.name)
            .field("ambient", &self.ambient.describe())
            .field("order", &self.order())
            .finish()
    }
}

/// Closes `generators` under multiplication inside `ambient`.
pub fn enumerate_group(ambient: &Ambient, generators: &[Elem], cap: usize) -> Result<GroupModel> {
    for g in generators {
        if !ambient.is_valid(g) {
            return Err(Error::NotInvertible(format!(
                "generator {g} is not an invertible element of {}",
                ambient.describe()
            )));
        }
    }
    let id = ambient.identity();
    let mut elements = vec![id.clone()];
    let mut index: HashMap<Elem, usize> = HashMap::from([(id, 0)]);
    let mut layer_start = 0;
    while layer_start < elements.len() {
        let layer_end = elements.len();
        let mut next: Vec<Elem> = Vec::new();
        let mut fresh: HashSet<Elem> = HashSet::new();
        for x in &elements[layer_start..layer_end] {
            for g in generators {
                let y = ambient.mul(x, g);
                if !index.contains_key(&y) && fresh.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        if elements.len() + next.len() > cap {
            return Err(Error::CapExceeded {
                what: "group order",
                size: elements.len() + next.len(),
                cap,
            });
        }
        next.sort();
        for y in next {
            index.insert(y.clone(), elements.len());
            elements.push(y);
        }
        layer_start = layer_end;
    }
    let mut gen_idx: Vec<usize> = generators.iter().map(|g| index[g]).collect();
    gen_idx.dedup();
    let mut seen = HashSet::new();
    gen_idx.retain(|g| seen.insert(*g));
    let inverses = elements
        .iter()
        .map(|x| {
            let xi = ambient.inv(x)?;
            index
                .get(&xi)
                .copied()
                .ok_or_else(|| Error::InvalidGroup(format!("inverse of {x} escaped the closure")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupModel {
        name: String::new(),
        ambient: ambient.clone(),
        elements,
        index,
        generators: gen_idx,
        inverses,
    })
}

impl GroupModel {
    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Builds the group of an explicit multiplication table (see [`MulTable::from_json`]).
    pub fn from_table_json(json: &str) -> Result<Self> {
        let table = Arc::new(MulTable::from_json(json)?);
        let ambient = Ambient::Table(table.clone());
        let all: Vec<Elem> = (0..table.len() as i64).map(|i| Elem(vec![i])).collect();
        let gens = greedy_generators(&ambient, &all, usize::MAX)?;
        let g = enumerate_group(&ambient, &gens, usize::MAX)?;
        if g.order() != table.len() {
            return Err(Error::InvalidGroup("table elements do not form one group".into()));
        }
        Ok(g)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn ambient(&self) -> &Ambient {
        &self.ambient
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &Elem {
        &self.elements[i]
    }

    pub fn index_of(&self, e: &Elem) -> Option<usize> {
        self.index.get(e).copied()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.index.contains_key(e)
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        let e = self.ambient.mul(&self.elements[a], &self.elements[b]);
        self.index[&e]
    }

    #[inline]
    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    /// `g x g^{-1}`.
    pub fn conj(&self, g: usize, x: usize) -> usize {
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|&a| {
            self.generators
                .iter()
                .all(|&b| self.ambient.commutes(&self.elements[a], &self.elements[b]))
        })
    }

    /// Indices of central elements.
    pub fn center(&self) -> Vec<usize> {
        (0..self.order())
            .filter(|&x| {
                self.generators
                    .iter()
                    .all(|&g| self.ambient.commutes(&self.elements[x], &self.elements[g]))
            })
            .collect()
    }

    pub fn is_p_group(&self, p: u32) -> bool {
        let mut n = self.order();
        while n.is_multiple_of(p as usize) {
            n /= p as usize;
        }
        n == 1
    }

    /// The subgroup with the given member indices, re-enumerated with its own
    /// canonical element order and a greedily chosen generating set.
    pub fn subgroup(&self, members: &[usize]) -> Result<GroupModel> {
        let member_set: HashSet<usize> = members.iter().copied().collect();
        if member_set.len() == self.order() {
            return Ok(self.clone());
        }
        let elems: Vec<Elem> = {
            let mut v: Vec<usize> = member_set.iter().copied().collect();
            v.sort_unstable();
            v.into_iter().map(|i| self.elements[i].clone()).collect()
        };
        let gens = greedy_generators(&self.ambient, &elems, members.len())?;
        let sub = enumerate_group(&self.ambient, &gens, member_set.len())
            .map_err(|_| Error::NotASubgroup("members are not closed under multiplication".into()))?;
        if sub.order() != member_set.len() || !elems.iter().all(|e| sub.contains(e)) {
            return Err(Error::NotASubgroup(
                "members are not closed under multiplication".into(),
            ));
        }
        Ok(sub)
    }

    /// Indices in `self` of the elements of `sub`, which must live in the same ambient.
    pub fn embed(&self, sub: &GroupModel) -> Result<Vec<usize>> {
        sub.elements
            .iter()
            .map(|e| {
                self.index_of(e)
                    .ok_or_else(|| Error::NotASubgroup(format!("{e} is not an element of {}", self.name)))
            })
            .collect()
    }
}

/// Walks `elems` in order, keeping each element not yet generated by the
/// previous picks.
fn greedy_generators(ambient: &Ambient, elems: &[Elem], cap: usize) -> Result<Vec<Elem>> {
    let mut gens: Vec<Elem> = Vec::new();
    let mut closure: HashSet<Elem> = HashSet::from([ambient.identity()]);
    for e in elems {
        if closure.contains(e) {
            continue;
        }
        gens.push(e.clone());
        let g = enumerate_group(ambient, &gens, cap)
            .map_err(|_| Error::NotASubgroup("members are not closed under multiplication".into()))?;
        closure = g.elements.into_iter().collect();
    }
    Ok(gens)
}
