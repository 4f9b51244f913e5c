mod common;

use std::collections::BTreeSet;

use bernstein_core::coeff::PrimeField;
use bernstein_core::gsets::{catalog, Ambient, Elem, GroupModel};
use bernstein_core::towers::{
    check_coherence, check_sigma_compatibility, density_check, example_tower, nonclosed_delta_witness, persistent_orbits,
    InvariantFamily, TowerOfActions,
};
use bernstein_core::twisted::{
    builtin_tower, orbit_centralizer_check, twisted_fixed_space, twisted_stabilization, u_w_subgroup, Conjugator, GroupTower,
};
use proptest::prelude::*;

/// Coherence straight from the definition: at every consecutive pair of
/// levels, the pushforward of the level-(k+1) invariant has, at each point
/// `y`, the sum over the full preimage of `y`.
fn coherent_by_definition(t: &TowerOfActions, p: u32, fam: &InvariantFamily) -> bool {
    (t.first_level()..t.depth()).all(|k| {
        let upper = t.level(k + 1).unwrap();
        let lower = t.level(k).unwrap();
        let (uo, lo) = (t.orbits(k + 1).unwrap(), t.orbits(k).unwrap());
        let mut sums = vec![0u32; lower.num_points()];
        for x in 0..upper.num_points() {
            let y = t.project_point(k + 1, k, x).unwrap();
            sums[y] = (sums[y] + fam.at(k + 1)[uo.orbit_of(x)]) % p;
        }
        (0..lower.num_points()).all(|y| sums[y] == fam.at(k)[lo.orbit_of(y)])
    })
}

/// The dimension of the level-`m` image of the coherent families on levels
/// `m..=n`, as `rank([C; E_m]) - rank(C)` with dense elimination.
fn coherent_image_dim_by_elimination(t: &TowerOfActions, p: u32, m: usize, n: usize) -> usize {
    let offsets: Vec<usize> = (m..=n + 1)
        .scan(0, |acc, k| {
            let here = *acc;
            if k <= n {
                *acc += t.orbits(k).unwrap().len();
            }
            Some(here)
        })
        .collect();
    let unknowns = offsets[n - m + 1];
    let mut rows = Vec::new();
    for k in m..n {
        let (uo, lo) = (t.orbits(k + 1).unwrap(), t.orbits(k).unwrap());
        for y in 0..t.level(k).unwrap().num_points() {
            let mut row = vec![0u32; unknowns];
            row[offsets[k - m] + lo.orbit_of(y)] = p - 1;
            for x in 0..t.level(k + 1).unwrap().num_points() {
                if t.project_point(k + 1, k, x).unwrap() == y {
                    let c = offsets[k + 1 - m] + uo.orbit_of(x);
                    row[c] = (row[c] + 1) % p;
                }
            }
            rows.push(row);
        }
    }
    let base = common::dense_rank(p, &rows);
    for i in 0..t.orbits(m).unwrap().len() {
        let mut row = vec![0u32; unknowns];
        row[i] = 1;
        rows.push(row);
    }
    common::dense_rank(p, &rows) - base
}

/// Orbits at level `m` with an orbit of the same size above them at level `n`.
fn persistent_by_search(t: &TowerOfActions, m: usize, n: usize) -> Vec<usize> {
    let (lo, uo) = (t.orbits(m).unwrap(), t.orbits(n).unwrap());
    let mut out: BTreeSet<usize> = BTreeSet::new();
    for c in 0..uo.len() {
        let x = uo.orbit(c)[0];
        let d = lo.orbit_of(t.project_point(n, m, x).unwrap());
        if uo.orbit(c).len() == lo.orbit(d).len() {
            out.insert(d);
        }
    }
    out.into_iter().collect()
}

fn unit(len: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0; len];
    v[i] = 1;
    v
}

#[test]
fn sigma_on_the_example_tower() {
    let f = PrimeField::new(2).unwrap();
    let t = example_tower(2, 2, 1000).unwrap();
    let top = t.orbits(2).unwrap().len();
    let big = t.pushforward(f, 2, 1, &t.upsilon(f, 2, &unit(top, 2)).unwrap()).unwrap();
    assert!(big.is_empty());
    let mid = t.pushforward(f, 2, 1, &t.upsilon(f, 2, &unit(top, 1)).unwrap()).unwrap();
    let expected = t.upsilon(f, 1, &unit(2, 1)).unwrap();
    assert_eq!(mid, expected);
    assert_eq!(t.sigma(f, 2, 1, &unit(top, 1)).unwrap(), vec![0, 1]);
}

#[test]
fn largest_orbit_family_is_not_coherent() {
    let f = PrimeField::new(2).unwrap();
    let t = example_tower(2, 3, 1000).unwrap();
    let coords = (0..=3).map(|n| unit(n + 1, n)).collect();
    let fam = InvariantFamily::from_levels(&t, coords).unwrap();
    assert!(!coherent_by_definition(&t, 2, &fam));
    assert!(!check_coherence(&t, f, &fam).unwrap());
    assert!(!check_sigma_compatibility(&t, f, &fam).unwrap());
}

#[test]
fn persistence_on_the_example_tower() {
    let t = example_tower(2, 4, 1000).unwrap();
    assert_eq!(persistent_orbits(&t, 2, 4).unwrap(), vec![0, 1, 2]);
    assert_eq!(persistent_by_search(&t, 2, 4), vec![0, 1, 2]);
}

#[test]
fn density_matches_elimination() {
    for (p, depth) in [(2u32, 5usize), (3, 4), (3, 5)] {
        let t = example_tower(p, depth, 100_000).unwrap();
        let f = PrimeField::new(p).unwrap();
        let d = density_check(&t, f, 1, depth, 5000).unwrap();
        assert!(d.equal);
        assert_eq!(d.coherent_image_dim, 2);
        assert_eq!(d.persistent_span_dim, 2);
        assert_eq!(coherent_image_dim_by_elimination(&t, p, 1, depth), 2);
        assert_eq!(persistent_by_search(&t, 1, depth), d.persistent_orbits);
    }
}

#[test]
fn density_on_the_heisenberg_conjugation_tower() {
    let tower = builtin_tower("heisenberg3", 3, 2, 100_000).unwrap();
    let t = bernstein_core::twisted::conjugation_tower(&tower).unwrap();
    let d = density_check(&t, PrimeField::new(3).unwrap(), 1, 2, 5000).unwrap();
    assert_eq!(d.coherent_image_dim, coherent_image_dim_by_elimination(&t, 3, 1, 2));
    assert_eq!(d.persistent_orbits, persistent_by_search(&t, 1, 2));
    assert!(d.equal);
}

#[test]
fn witness_orbits_grow_by_p() {
    for (p, depth, expected) in [(2u32, 4usize, vec![1, 2, 4, 8, 16]), (3, 3, vec![1, 3, 9, 27])] {
        let t = example_tower(p, depth, 100_000).unwrap();
        let w = nonclosed_delta_witness(&t).unwrap();
        assert_eq!(w.orbit_sizes, expected);
        for (n, z) in w.z.iter().enumerate() {
            let action = t.level(n).unwrap();
            let y = action.point_index(&Elem::parse(z).unwrap()).unwrap();
            let orbit: BTreeSet<usize> = (0..action.group().order()).map(|g| action.act(g, y)).collect();
            assert_eq!(orbit.len(), expected[n]);
            if n > 0 {
                let below = action.point_index(&Elem::parse(z).unwrap()).unwrap();
                let down = t.project_point(n, n - 1, below).unwrap();
                assert_eq!(t.level(n - 1).unwrap().point(down).to_string(), w.z[n - 1]);
            }
        }
        for a in &w.approximants {
            let top = t.level(depth).unwrap();
            let x = top.point_index(&Elem::parse(&a.point).unwrap()).unwrap();
            assert_eq!(t.level(a.level).unwrap().point(t.project_point(depth, a.level, x).unwrap()).to_string(), w.z[a.level]);
            let orbit: BTreeSet<usize> = (0..top.group().order()).map(|g| top.act(g, x)).collect();
            let image_orbit = t.orbits(a.level).unwrap().orbit(t.orbits(a.level).unwrap().orbit_of(t.project_point(depth, a.level, x).unwrap())).len();
            assert_eq!(orbit.len(), image_orbit);
        }
    }
}

#[test]
fn builtin_tower_orders() {
    let orders = |t: &GroupTower| (t.first_level()..=t.depth()).map(|n| t.level(n).unwrap().order()).collect::<Vec<_>>();
    assert_eq!(orders(&builtin_tower("heisenberg3", 3, 2, 100_000).unwrap()), vec![27, 729]);
    assert_eq!(orders(&builtin_tower("units", 3, 3, 100_000).unwrap()), vec![2, 6, 18]);
    assert_eq!(orders(&builtin_tower("cyclic", 2, 4, 100_000).unwrap()), vec![2, 4, 8, 16]);
}

fn perm(images: &[i64]) -> Elem {
    Elem(images.to_vec())
}

fn s3_subgroup(gens: &[Elem]) -> GroupModel {
    bernstein_core::gsets::enumerate_group(&Ambient::Permutations { degree: 3 }, gens, 10).unwrap()
}

/// Orbits of `u . x = (w^-1 u w) x u^-1` on `U_w`, by direct ambient
/// arithmetic on all pairs.
fn twisted_orbits_directly(amb: &Ambient, u: &GroupModel, w: &Elem) -> Vec<usize> {
    let winv = amb.inv(w).unwrap();
    let members: BTreeSet<Elem> = u.elements().iter().cloned().collect();
    let uw: Vec<Elem> = u.elements().iter().filter(|x| members.contains(&amb.mul(&amb.mul(&winv, x), w))).cloned().collect();
    let mut seen = BTreeSet::new();
    let mut sizes = Vec::new();
    for x in &uw {
        if seen.contains(x) {
            continue;
        }
        let orbit: BTreeSet<Elem> = uw
            .iter()
            .map(|a| amb.mul(&amb.mul(&amb.mul(&amb.mul(&winv, a), w), x), &amb.inv(a).unwrap()))
            .collect();
        sizes.push(orbit.len());
        seen.extend(orbit);
    }
    sizes.sort_unstable();
    sizes
}

#[test]
fn twisted_subgroups_and_actions_in_s3() {
    let f2 = PrimeField::new(2).unwrap();
    let f3 = PrimeField::new(3).unwrap();
    let amb = Ambient::Permutations { degree: 3 };

    let u = s3_subgroup(&[perm(&[1, 0, 2])]);
    let tower = GroupTower::single(2, u.clone()).unwrap();
    let w = Conjugator::new(&tower, "(123)", vec![perm(&[1, 2, 0])]).unwrap();
    assert_eq!(u_w_subgroup(&tower, 1, &w).unwrap().order(), 1);
    assert_eq!(twisted_fixed_space(&tower, 1, &w, f2, 100).unwrap().dim, 2);
    assert_eq!(twisted_orbits_directly(&amb, &u, &perm(&[1, 2, 0])), vec![1]);

    let c3 = s3_subgroup(&[perm(&[1, 2, 0])]);
    let tower = GroupTower::single(3, c3.clone()).unwrap();
    let w = Conjugator::new(&tower, "(12)", vec![perm(&[1, 0, 2])]).unwrap();
    let fixed = twisted_fixed_space(&tower, 1, &w, f3, 100).unwrap();
    assert_eq!(fixed.orbit_sizes, vec![3]);
    assert_eq!(fixed.dim, 1);
    assert_eq!(fixed.direct_check, Some(true));
    assert_eq!(twisted_orbits_directly(&amb, &c3, &perm(&[1, 0, 2])), vec![3]);
    assert!(orbit_centralizer_check(&tower, 1, &w).unwrap().pass);
}

#[test]
fn diagonal_twists_of_the_heisenberg_group() {
    let tower = builtin_tower("heisenberg3", 3, 1, 100_000).unwrap();
    let w = Conjugator::parse(&tower, "diag(1,2,4)").unwrap();
    assert_eq!(u_w_subgroup(&tower, 1, &w).unwrap().order(), 27);
    let fixed = twisted_fixed_space(&tower, 1, &w, PrimeField::new(3).unwrap(), 5000).unwrap();
    let mut sizes = fixed.orbit_sizes.clone();
    sizes.sort_unstable();
    let u = tower.level(1).unwrap();
    assert_eq!(sizes, twisted_orbits_directly(u.ambient(), u, &w.per_level[0]));
    assert_eq!(sizes, vec![9, 9, 9]);
    assert!(orbit_centralizer_check(&tower, 1, &w).unwrap().pass);
}

#[test]
fn stabilization_at_depth_three() {
    let tower = builtin_tower("heisenberg3", 3, 3, 100_000).unwrap();
    let f = PrimeField::new(3).unwrap();
    let id = Conjugator::identity(&tower);
    let r = twisted_stabilization(&tower, &id, 1, 3, f).unwrap();
    assert_eq!(r.image_dims, vec![11, 3, 3]);
    assert_eq!(r.stable_dim, Some(3));
    assert_eq!(r.stable_is_center_span, Some(true));
    let w = Conjugator::parse(&tower, "diag(1,2,4)").unwrap();
    let r = twisted_stabilization(&tower, &w, 1, 3, f).unwrap();
    assert_eq!(r.image_dims, vec![3, 0, 0]);
    assert_eq!(r.stable_is_zero, Some(true));
}

#[test]
fn cyclic_towers_keep_every_twisted_orbit_trivial() {
    let tower = builtin_tower("cyclic", 2, 3, 1000).unwrap();
    let id = Conjugator::identity(&tower);
    let g = catalog::cyclic(8).unwrap();
    let fixed = twisted_fixed_space(&tower, 3, &id, PrimeField::new(2).unwrap(), 100).unwrap();
    assert_eq!(fixed.dim, g.order());
}

fn family_strategy(p: u32, depth: usize) -> impl Strategy<Value = (Vec<u32>, Vec<Vec<u32>>, u8)> {
    let sizes: Vec<usize> = (0..=depth).map(|n| n + 1).collect();
    (
        prop::collection::vec(0..p, depth + 1),
        sizes.into_iter().map(|s| prop::collection::vec(0..p, s)).collect::<Vec<_>>(),
        0u8..3,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coherence_criteria_agree_with_definition((top, noise, mode) in family_strategy(2, 5)) {
        let t = example_tower(2, 5, 1000).unwrap();
        let f = PrimeField::new(2).unwrap();
        let fam = match mode {
            0 => InvariantFamily::induced_from_top(&t, f, &top).unwrap(),
            1 => {
                let mut fam = InvariantFamily::induced_from_top(&t, f, &top).unwrap();
                let level = noise[0][0] as usize * 3 + top[0] as usize;
                let i = top[1] as usize % fam.coords[level].len();
                fam.coords[level][i] ^= 1;
                fam
            }
            _ => InvariantFamily::from_levels(&t, noise.clone()).unwrap(),
        };
        let truth = coherent_by_definition(&t, 2, &fam);
        prop_assert_eq!(check_coherence(&t, f, &fam).unwrap(), truth);
        prop_assert_eq!(check_sigma_compatibility(&t, f, &fam).unwrap(), truth);
        if mode == 0 {
            prop_assert!(truth);
        }
    }

    #[test]
    fn sigma_square_commutes_on_p3((top, _noise, _m) in family_strategy(3, 4)) {
        let t = example_tower(3, 4, 1000).unwrap();
        let f = PrimeField::new(3).unwrap();
        for n in 0..=4 {
            for m in 0..=n {
                let x: Vec<u32> = top.iter().cycle().take(n + 1).copied().collect();
                let lhs = t.pushforward(f, n, m, &t.upsilon(f, n, &x).unwrap()).unwrap();
                let rhs = t.upsilon(f, m, &t.sigma(f, n, m, &x).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
            }
        }
    }
}
