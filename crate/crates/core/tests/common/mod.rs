//! Brute-force oracles, written without the library's linear algebra or
//! orbit machinery.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use bernstein_core::gsets::GAction;

/// Rank over `F_p` by dense Gaussian elimination.
pub fn dense_rank(p: u32, rows: &[Vec<u32>]) -> usize {
    let p = p as u64;
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x as u64 % p).collect()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, pivot);
        let inv = pow_mod(m[rank][c], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != rank && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..cols {
                    m[r][j] = (m[r][j] + p * p - f * m[rank][j]) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    acc
}

/// Every vector of `F_p^cols` killed by `rows`, by exhaustive enumeration.
pub fn brute_force_kernel(p: u32, rows: &[Vec<u32>], cols: usize) -> Vec<Vec<u32>> {
    let total = (p as usize).pow(cols as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut v = vec![0u32; cols];
        let mut c = code;
        for x in v.iter_mut() {
            *x = (c % p as usize) as u32;
            c /= p as usize;
        }
        if rows.iter().all(|r| r.iter().zip(&v).map(|(a, b)| a * b).sum::<u32>() % p == 0) {
            out.push(v);
        }
    }
    out
}

/// Conjugacy classes of the Heisenberg group mod `p`, as triples
/// `(a, b, c)` with `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`.
pub fn heisenberg_class_count(p: u64) -> usize {
    let mul = |x: (u64, u64, u64), y: (u64, u64, u64)| ((x.0 + y.0) % p, (x.1 + y.1) % p, (x.2 + y.2 + x.0 * y.1) % p);
    let inv = |x: (u64, u64, u64)| {
        let (a, b) = ((p - x.0) % p, (p - x.1) % p);
        // (a,b,c)^-1 = (-a, -b, ab - c)
        (a, b, (x.0 * x.1 % p + p - x.2) % p)
    };
    let all: Vec<(u64, u64, u64)> = (0..p).flat_map(|a| (0..p).flat_map(move |b| (0..p).map(move |c| (a, b, c)))).collect();
    let mut seen = BTreeSet::new();
    let mut classes = 0;
    for &x in &all {
        if seen.contains(&x) {
            continue;
        }
        classes += 1;
        for &g in &all {
            seen.insert(mul(mul(g, x), inv(g)));
        }
    }
    classes
}

/// Orbits of the group generated by `perms` on `0..n`, by union-find.
pub fn orbit_count(n: usize, perms: &[Vec<usize>]) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for perm in perms {
        for x in 0..n {
            let (a, b) = (find(&mut parent, x), find(&mut parent, perm[x]));
            parent[a] = b;
        }
    }
    (0..n).filter(|&x| find(&mut parent, x) == x).count()
}

/// The permutation of every group element (not just generators).
pub fn all_perms(action: &GAction) -> Vec<Vec<usize>> {
    (0..action.group().order())
        .map(|g| (0..action.num_points()).map(|y| action.act(g, y)).collect())
        .collect()
}

/// Rows of the stacked matrices `P_g - I`, one row per (g, point).
pub fn invariance_rows(p: u32, perms: &[Vec<usize>]) -> Vec<Vec<u32>> {
    let mut rows = Vec::new();
    for perm in perms {
        let n = perm.len();
        for y in 0..n {
            // coefficient condition: v[perm^-1(y)] = v[y], written as v[x] - v[perm(x)]
            let mut row = vec![0u32; n];
            row[y] = (row[y] + 1) % p;
            row[perm[y]] = (row[perm[y]] + p - 1) % p;
            rows.push(row);
        }
    }
    rows
}

/// Coarsest refinement of `labels` stable under `perms`, by repeatedly
/// splitting on the labels of images until nothing changes.
pub fn naive_stable_refinement(labels: &[usize], perms: &[Vec<usize>]) -> BTreeSet<BTreeSet<usize>> {
    let mut current: Vec<usize> = labels.to_vec();
    loop {
        let mut sig: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
        let mut next = Vec::with_capacity(current.len());
        for y in 0..current.len() {
            let key: Vec<usize> = std::iter::once(current[y]).chain(perms.iter().map(|p| current[p[y]])).collect();
            let fresh = sig.len();
            next.push(*sig.entry(key).or_insert(fresh));
        }
        let count = |v: &[usize]| v.iter().collect::<BTreeSet<_>>().len();
        if count(&next) == count(&current) {
            return blocks(&next);
        }
        current = next;
    }
}

pub fn blocks(labels: &[usize]) -> BTreeSet<BTreeSet<usize>> {
    let mut by: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (y, &l) in labels.iter().enumerate() {
        by.entry(l).or_default().insert(y);
    }
    by.into_values().collect()
}

/// Orbits of `G x U` on pairs `(x, y)` of group elements under
/// `(g, u)(x, y) = (g x u^-1, g y u^-1)`: the dimension of the commutant of
/// the permutation representation `F_p[G]`, whatever `p` is.
pub fn pair_orbit_count(order: usize, mul: &dyn Fn(usize, usize) -> usize, inv: &dyn Fn(usize) -> usize, u: &[usize]) -> usize {
    let mut seen = vec![false; order * order];
    let mut count = 0;
    for start in 0..order * order {
        if seen[start] {
            continue;
        }
        count += 1;
        let (x, y) = (start / order, start % order);
        for g in 0..order {
            for &h in u {
                let hi = inv(h);
                let (a, b) = (mul(mul(g, x), hi), mul(mul(g, y), hi));
                seen[a * order + b] = true;
            }
        }
    }
    count
}
