mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use bernstein_core::coeff::PrimeField;
use bernstein_core::gsets::{catalog, is_stable, stable_refinement, Elem, GAction, PartitionOfSet, Validation};
use bernstein_core::permmod::{bimodule_end_dim, center_group_algebra, verify_finite_invariants, InvariantRoute, PermutationModule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn natural_s3() -> GAction {
    let g = Arc::new(catalog::symmetric(3).unwrap());
    let grp = g.clone();
    let points = (0..3).map(|i| Elem(vec![i])).collect();
    GAction::new(g, points, move |a, y| grp.element(a).0[y] as usize, Validation::Full).unwrap()
}

#[test]
fn generated_group_orders() {
    assert_eq!(catalog::unitriangular(3, 3, 1).unwrap().order(), 27);
    let units = catalog::units(9).unwrap();
    // powers of 2 mod 9
    let mut powers = BTreeSet::new();
    let mut x = 1;
    loop {
        powers.insert(x);
        x = x * 2 % 9;
        if x == 1 {
            break;
        }
    }
    assert_eq!(units.order(), powers.len());
    assert_eq!(units.order(), 6);
}

#[test]
fn heisenberg_conjugation_orbits() {
    let g = Arc::new(catalog::heisenberg(3, 1).unwrap());
    let action = GAction::conjugation(g).unwrap();
    let mut sizes = action.orbit_partition().sizes();
    sizes.sort_unstable();
    assert_eq!(sizes, [vec![1; 3], vec![3; 8]].concat());
    assert_eq!(sizes.len(), common::heisenberg_class_count(3));
    assert_eq!(common::orbit_count(27, &common::all_perms(&action)), 11);
}

#[test]
fn refining_a_non_stable_partition_of_three_points() {
    let action = natural_s3();
    let part = PartitionOfSet::new(3, vec![vec![0], vec![1, 2]]).unwrap();
    assert!(!is_stable(&action, &part));
    let refined = stable_refinement(&action, &part).unwrap();
    assert_eq!(refined, PartitionOfSet::discrete(3));
    let oracle = common::naive_stable_refinement(&[0, 1, 1], &common::all_perms(&action));
    assert_eq!(oracle.len(), 3);
}

#[test]
fn regular_cyclic_invariants() {
    let g = Arc::new(catalog::cyclic(3).unwrap());
    let m = PermutationModule::new(PrimeField::new(3).unwrap(), Arc::new(GAction::left_regular(g).unwrap()));
    let inv = m.invariants(InvariantRoute::Nullspace, 100).unwrap();
    assert_eq!(inv.dim(), 1);
    assert_eq!(inv.basis()[0].to_dense(3), vec![1, 1, 1]);
}

#[test]
fn heisenberg_centers_match_brute_force() {
    for (p, expected) in [(2u32, 5usize), (3, 11)] {
        let oracle = common::heisenberg_class_count(p as u64);
        assert_eq!(oracle, expected);
        assert_eq!(oracle, (p * p + p - 1) as usize);
        let g = Arc::new(catalog::heisenberg(p as i64, 1).unwrap());
        let f = PrimeField::new(p).unwrap();
        assert_eq!(center_group_algebra(&g, f, 1000).unwrap().len(), expected);
        assert_eq!(bimodule_end_dim(&g, f, 5000).unwrap(), expected);
        let m = PermutationModule::new(f, Arc::new(GAction::conjugation(g.clone()).unwrap()));
        assert_eq!(m.invariants(InvariantRoute::Nullspace, 5000).unwrap().dim(), expected);
    }
}

#[test]
fn bimodule_commutants_of_small_groups() {
    // S_3 has 3 classes, D_4 = H(Z/2) has 5.
    let s3 = catalog::symmetric(3).unwrap();
    assert_eq!(bimodule_end_dim(&s3, PrimeField::new(3).unwrap(), 5000).unwrap(), 3);
    let d4 = catalog::dihedral(4).unwrap();
    assert_eq!(bimodule_end_dim(&d4, PrimeField::new(2).unwrap(), 5000).unwrap(), 5);
    let all: Vec<usize> = (0..s3.order()).collect();
    let mul = |a, b| s3.mul(a, b);
    let inv = |a| s3.inv(a);
    assert_eq!(common::pair_orbit_count(6, &mul, &inv, &all), 3);
}

fn action_from_seed(seed: u64) -> GAction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    catalog::random_action(&mut rng, &catalog::small_groups(), 64).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn finite_invariants_are_spanned_by_orbit_sums(seed in any::<u64>(), p in prop::sample::select(vec![2u32, 3, 5])) {
        let action = action_from_seed(seed);
        prop_assert!(action.group().order() <= 64 && action.num_points() <= 64);
        let n = action.num_points();
        let perms = common::all_perms(&action);
        let module = PermutationModule::new(PrimeField::new(p).unwrap(), Arc::new(action));
        let report = verify_finite_invariants(&module, 5000).unwrap();
        prop_assert!(report.pass);
        let oracle_dim = n - common::dense_rank(p, &common::invariance_rows(p, &perms));
        prop_assert_eq!(report.nullspace_dim, oracle_dim);
        prop_assert_eq!(report.orbit_sum_dim, common::orbit_count(n, &perms));
    }

    #[test]
    fn orbit_stabilizer_and_fixed_point_congruence(seed in any::<u64>()) {
        let action = action_from_seed(seed);
        let g = action.group().clone();
        let perms = common::all_perms(&action);
        for o in action.orbits() {
            let y = o.points[0];
            let stab = perms.iter().filter(|perm| perm[y] == y).count();
            prop_assert_eq!(stab, o.stabilizer_order);
            prop_assert_eq!(o.points.len() * stab, g.order());
        }
        for p in [2u32, 3, 5] {
            if g.is_p_group(p) {
                let fixed = (0..action.num_points()).filter(|&y| perms.iter().all(|perm| perm[y] == y)).count();
                prop_assert_eq!(fixed, action.fixed_points().len());
                prop_assert_eq!((action.num_points() - fixed) % p as usize, 0);
            }
        }
    }

    #[test]
    fn stable_refinement_is_the_coarsest(seed in any::<u64>(), labels in prop::collection::vec(0usize..3, 64)) {
        let action = action_from_seed(seed);
        let n = action.num_points();
        let labels = &labels[..n];
        let part = PartitionOfSet::from_labels(labels);
        let refined = stable_refinement(&action, &part).unwrap();
        prop_assert!(is_stable(&action, &refined));
        prop_assert!(refined.refines(&part));
        let ours: BTreeSet<BTreeSet<usize>> = refined.blocks().iter().map(|b| b.iter().copied().collect()).collect();
        prop_assert_eq!(ours, common::naive_stable_refinement(labels, action.generator_perms()));
    }
}
