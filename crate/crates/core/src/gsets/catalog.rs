//! Small named groups, subgroups and random actions used by tests, the
//! acceptance suite and the CLI.

use std::collections::HashMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::action::{GAction, Validation};
use super::group::{enumerate_group, Ambient, Elem, GroupModel};
use crate::error::{Error, Result};

const SMALL_CAP: usize = 1 << 20;

pub fn trivial() -> GroupModel {
    enumerate_group(&Ambient::Additive { orders: vec![] }, &[], 1)
        .expect("trivial group")
        .with_name("trivial")
}

pub fn cyclic(n: i64) -> Result<GroupModel> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("cyclic group of order {n}")));
    }
    Ok(enumerate_group(&Ambient::Additive { orders: vec![n] }, &[Elem(vec![1 % n])], SMALL_CAP)?
        .with_name(format!("Z/{n}")))
}

/// `Z/n_1 x ... x Z/n_r` generated by the unit vectors.
pub fn abelian(orders: &[i64]) -> Result<GroupModel> {
    let gens: Vec<Elem> = (0..orders.len())
        .map(|i| {
            let mut w = vec![0; orders.len()];
            w[i] = 1 % orders[i];
            Elem(w)
        })
        .collect();
    let amb = Ambient::Additive {
        orders: orders.to_vec(),
    };
    Ok(enumerate_group(&amb, &gens, SMALL_CAP)?.with_name(amb.describe()))
}

pub fn symmetric(n: usize) -> Result<GroupModel> {
    let amb = Ambient::Permutations { degree: n };
    let mut gens = Vec::new();
    if n >= 2 {
        let mut swap: Vec<i64> = (0..n as i64).collect();
        swap.swap(0, 1);
        gens.push(Elem(swap));
        gens.push(Elem((0..n as i64).map(|i| (i + 1) % n as i64).collect()));
    }
    Ok(enumerate_group(&amb, &gens, SMALL_CAP)?.with_name(format!("S_{n}")))
}

pub fn alternating(n: usize) -> Result<GroupModel> {
    let amb = Ambient::Permutations { degree: n };
    // 3-cycles (i, i+1, i+2) generate A_n.
    let gens: Vec<Elem> = (0..n.saturating_sub(2))
        .map(|i| {
            let mut w: Vec<i64> = (0..n as i64).collect();
            w[i] = i as i64 + 1;
            w[i + 1] = i as i64 + 2;
            w[i + 2] = i as i64;
            Elem(w)
        })
        .collect();
    Ok(enumerate_group(&amb, &gens, SMALL_CAP)?.with_name(format!("A_{n}")))
}

/// Symmetries of a regular `n`-gon, order `2n`.
pub fn dihedral(n: usize) -> Result<GroupModel> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("dihedral group of a {n}-gon")));
    }
    let amb = Ambient::Permutations { degree: n };
    let rot = Elem((0..n as i64).map(|i| (i + 1) % n as i64).collect());
    let refl = Elem((0..n as i64).map(|i| (n as i64 - i) % n as i64).collect());
    Ok(enumerate_group(&amb, &[rot, refl], SMALL_CAP)?.with_name(format!("D_{n}")))
}

/// The quaternion group inside `SL_2(F_3)`.
pub fn quaternion() -> Result<GroupModel> {
    let amb = Ambient::Matrices { dim: 2, modulus: 3 };
    let i = Elem(vec![0, 2, 1, 0]);
    let j = Elem(vec![1, 1, 1, 2]);
    Ok(enumerate_group(&amb, &[i, j], SMALL_CAP)?.with_name("Q_8"))
}

/// Upper unitriangular `dim x dim` matrices over `Z/p^level`.
pub fn unitriangular(dim: usize, p: i64, level: u32) -> Result<GroupModel> {
    let modulus = p.pow(level);
    let amb = Ambient::Matrices { dim, modulus };
    let gens: Vec<Elem> = (0..dim.saturating_sub(1))
        .map(|i| Ambient::elementary(dim, modulus, i, i + 1, 1))
        .collect();
    Ok(enumerate_group(&amb, &gens, SMALL_CAP)?.with_name(format!("U_{dim}(Z/{modulus})")))
}

/// The Heisenberg group `H(Z/p^level)` of unitriangular 3x3 matrices.
pub fn heisenberg(p: i64, level: u32) -> Result<GroupModel> {
    Ok(unitriangular(3, p, level)?.with_name(format!("H(Z/{})", p.pow(level))))
}

/// `(Z/modulus)^x`, generated greedily by the least units.
pub fn units(modulus: i64) -> Result<GroupModel> {
    let amb = Ambient::Units { modulus };
    let all: Vec<Elem> = (0..modulus)
        .map(|x| Elem(vec![x]))
        .filter(|e| amb.is_valid(e))
        .collect();
    let mut gens: Vec<Elem> = Vec::new();
    let mut current = enumerate_group(&amb, &gens, SMALL_CAP)?;
    for e in all {
        if !current.contains(&e) {
            gens.push(e);
            current = enumerate_group(&amb, &gens, SMALL_CAP)?;
        }
    }
    Ok(current.with_name(format!("(Z/{modulus})^x")))
}

/// Resolves a group name used on the command line.
///
/// `p` and `level` matter only for the matrix and unit families.
pub fn group_by_name(name: &str, p: i64, level: u32) -> Result<GroupModel> {
    let lower = name.to_ascii_lowercase();
    let num = |prefix: &str| lower.strip_prefix(prefix).and_then(|s| s.parse::<i64>().ok());
    match lower.as_str() {
        "trivial" | "1" => Ok(trivial()),
        "q8" => quaternion(),
        "heisenberg3" | "heisenberg" => heisenberg(p, level),
        "unitriangular4" => Ok(unitriangular(4, p, level)?.with_name(format!("U_4(Z/{})", p.pow(level)))),
        "units" => units(p.pow(level)),
        _ => {
            if let Some(n) = num("s") {
                symmetric(n as usize)
            } else if let Some(n) = num("a") {
                alternating(n as usize)
            } else if let Some(n) = num("d") {
                dihedral(n as usize)
            } else if let Some(n) = num("c") {
                cyclic(n)
            } else {
                Err(Error::UnknownName(format!("group {name:?}")))
            }
        }
    }
}

/// Resolves a subgroup of `g` by name: `trivial`, `center`, the name of `g`
/// itself, `a3`/`c2` inside `s3`, `hx` (the index-p subgroup with vanishing
/// (1,2)-entry) inside a Heisenberg group.
pub fn subgroup_by_name(g: &GroupModel, g_name: &str, u_name: &str) -> Result<GroupModel> {
    let u_lower = u_name.to_ascii_lowercase();
    if u_lower.eq_ignore_ascii_case(g_name) || u_lower == "g" {
        return Ok(g.clone());
    }
    let members: Vec<usize> = match u_lower.as_str() {
        "trivial" | "1" => vec![g.identity()],
        "center" | "z" | "zd4" => g.center(),
        "a3" | "c2" | "c3" => {
            let gens: Vec<Elem> = match (g.ambient(), u_lower.as_str()) {
                (Ambient::Permutations { degree: 3 }, "a3" | "c3") => vec![Elem(vec![1, 2, 0])],
                (Ambient::Permutations { degree: 3 }, "c2") => vec![Elem(vec![1, 0, 2])],
                _ => return Err(Error::UnknownName(format!("subgroup {u_name:?} of {g_name:?}"))),
            };
            let u = enumerate_group(g.ambient(), &gens, g.order())?;
            g.embed(&u)?
        }
        "hx" => match g.ambient() {
            Ambient::Matrices { dim: 3, .. } => (0..g.order()).filter(|&i| g.element(i).0[1] == 0).collect(),
            _ => return Err(Error::UnknownName(format!("subgroup {u_name:?} of {g_name:?}"))),
        },
        _ => return Err(Error::UnknownName(format!("subgroup {u_name:?} of {g_name:?}"))),
    };
    Ok(g.subgroup(&members)?.with_name(u_name))
}

/// Left multiplication of `g` on the left cosets of the subgroup `h`
/// (given by member indices). Points are encoded `[component, least element
/// index of the coset]`.
pub fn coset_action(g: Arc<GroupModel>, subgroups: &[Vec<usize>]) -> Result<GAction> {
    let n = g.order();
    let mut coset_min: Vec<Vec<usize>> = Vec::new();
    let mut points: Vec<Elem> = Vec::new();
    for (c, h) in subgroups.iter().enumerate() {
        let mut min = vec![usize::MAX; n];
        for x in 0..n {
            if min[x] != usize::MAX {
                continue;
            }
            let coset: Vec<usize> = h.iter().map(|&k| g.mul(x, k)).collect();
            let m = *coset.iter().min().unwrap();
            for y in coset {
                min[y] = m;
            }
            points.push(Elem(vec![c as i64, m as i64]));
        }
        coset_min.push(min);
    }
    points.sort();
    let index: HashMap<Elem, usize> = points.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
    let pts = points.clone();
    let grp = g.clone();
    GAction::new(
        g,
        points,
        move |a, y| {
            let c = pts[y].0[0] as usize;
            let rep = pts[y].0[1] as usize;
            let m = coset_min[c][grp.mul(a, rep)];
            index[&Elem(vec![c as i64, m as i64])]
        },
        Validation::Generators,
    )
}

/// The pool of small groups (all of order at most 64) for randomized sweeps.
pub fn small_groups() -> Vec<GroupModel> {
    let mut out = vec![trivial()];
    for n in [2, 3, 4, 5, 6, 8, 9, 12, 16] {
        out.push(cyclic(n).unwrap());
    }
    for orders in [&[2, 2][..], &[2, 4], &[3, 3], &[2, 2, 2], &[4, 4], &[8, 8], &[2, 3, 5]] {
        out.push(abelian(orders).unwrap());
    }
    out.push(symmetric(3).unwrap());
    out.push(symmetric(4).unwrap());
    out.push(alternating(4).unwrap());
    for n in [4, 5, 6, 8] {
        out.push(dihedral(n).unwrap());
    }
    out.push(quaternion().unwrap());
    out.push(heisenberg(2, 1).unwrap());
    out.push(heisenberg(3, 1).unwrap());
    out.retain(|g| g.order() <= 64);
    out
}

/// A random action: a disjoint union of coset spaces `G/H_i` of a random
/// small group, with each `H_i` generated by up to two random elements.
pub fn random_action<R: Rng>(rng: &mut R, pool: &[GroupModel], max_points: usize) -> Result<GAction> {
    let g = Arc::new(pool.choose(rng).expect("nonempty pool").clone());
    let components = rng.gen_range(1..=4);
    let mut subgroups: Vec<Vec<usize>> = Vec::new();
    let mut total = 0;
    for _ in 0..components {
        let k = rng.gen_range(0..=2);
        let gens: Vec<Elem> = (0..k)
            .map(|_| g.element(rng.gen_range(0..g.order())).clone())
            .collect();
        let h = enumerate_group(g.ambient(), &gens, g.order())?;
        let idx = g.order() / h.order();
        if total + idx > max_points && !subgroups.is_empty() {
            continue;
        }
        if idx > max_points {
            // Fall back to the whole group, a single fixed point.
            subgroups.push((0..g.order()).collect());
            total += 1;
            continue;
        }
        total += idx;
        subgroups.push(g.embed(&h)?);
    }
    coset_action(g, &subgroups)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(symmetric(3).unwrap().order(), 6);
        assert_eq!(symmetric(4).unwrap().order(), 24);
        assert_eq!(alternating(4).unwrap().order(), 12);
        assert_eq!(dihedral(4).unwrap().order(), 8);
        assert_eq!(quaternion().unwrap().order(), 8);
        assert_eq!(heisenberg(2, 1).unwrap().order(), 8);
        assert_eq!(heisenberg(3, 2).unwrap().order(), 729);
        assert_eq!(units(9).unwrap().order(), 6);
        assert_eq!(units(27).unwrap().order(), 18);
        // (Z/8)^x is not cyclic: every element squares to 1.
        let u8 = units(8).unwrap();
        assert_eq!(u8.order(), 4);
        assert!((0..4).all(|x| u8.mul(x, x) == 0));
    }

    #[test]
    fn named_subgroups() {
        let s3 = group_by_name("s3", 3, 1).unwrap();
        assert_eq!(subgroup_by_name(&s3, "s3", "a3").unwrap().order(), 3);
        assert_eq!(subgroup_by_name(&s3, "s3", "c2").unwrap().order(), 2);
        let d4 = group_by_name("d4", 2, 1).unwrap();
        assert_eq!(subgroup_by_name(&d4, "d4", "center").unwrap().order(), 2);
        let h = group_by_name("heisenberg3", 3, 1).unwrap();
        assert_eq!(subgroup_by_name(&h, "heisenberg3", "hx").unwrap().order(), 9);
        assert!(group_by_name("nonsense", 3, 1).is_err());
    }

    #[test]
    fn coset_actions_have_the_right_size() {
        let s3 = Arc::new(symmetric(3).unwrap());
        let c2 = subgroup_by_name(&s3, "s3", "c2").unwrap();
        let a = coset_action(s3.clone(), &[s3.embed(&c2).unwrap()]).unwrap();
        assert_eq!(a.num_points(), 3);
        assert_eq!(a.orbit_partition().len(), 1);
    }
}
