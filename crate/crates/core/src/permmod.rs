//! Permutation modules `F_p[Y]` of finite actions: invariants, orbit sums,
//! and centers of finite group algebras.
//!
//! For finite `Y` the orbit sums are a basis of the invariants, so the
//! default route never builds a matrix. The nullspace route exists to
//! cross-check that claim.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::coeff::{commutant_dim, nullspace, PrimeField, SparseMatrix, SparseVec, Subspace};
use crate::error::{Error, Result};
use crate::gsets::{Elem, GAction, GroupModel};

/// How to compute an invariant subspace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvariantRoute {
    OrbitSums,
    Nullspace,
}

/// `F_p[Y]` with the group permuting basis coordinates.
#[derive(Clone, Debug)]
pub struct PermutationModule {
    field: PrimeField,
    action: Arc<GAction>,
}

/// A sparse element of a permutation module, keyed by point index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleElement {
    coeffs: BTreeMap<usize, u32>,
}

impl ModuleElement {
    pub fn from_sparse(v: &SparseVec) -> Self {
        ModuleElement {
            coeffs: v.entries().iter().copied().collect(),
        }
    }

    pub fn to_sparse(&self) -> SparseVec {
        SparseVec::from_map(&self.coeffs)
    }

    pub fn coeff(&self, y: usize) -> u32 {
        self.coeffs.get(&y).copied().unwrap_or(0)
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coeffs.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl PermutationModule {
    pub fn new(field: PrimeField, action: Arc<GAction>) -> Self {
        PermutationModule { field, action }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn action(&self) -> &Arc<GAction> {
        &self.action
    }

    pub fn dim(&self) -> usize {
        self.action.num_points()
    }

    pub fn basis_vector(&self, y: usize) -> ModuleElement {
        ModuleElement {
            coeffs: BTreeMap::from([(y, 1)]),
        }
    }

    /// `g . x`, moving the coefficient at `y` to `g y`.
    pub fn act(&self, g: usize, x: &ModuleElement) -> ModuleElement {
        ModuleElement {
            coeffs: x.coeffs.iter().map(|(&y, &c)| (self.action.act(g, y), c)).collect(),
        }
    }

    pub fn is_invariant(&self, x: &ModuleElement) -> bool {
        let generators = self.action.group().generators();
        generators.iter().all(|&g| self.act(g, x) == *x)
    }

    /// One element per orbit, with coefficient 1 on every point of the orbit.
    pub fn orbit_sums(&self) -> Vec<ModuleElement> {
        self.action
            .orbit_partition()
            .orbits()
            .iter()
            .map(|orbit| ModuleElement {
                coeffs: orbit.iter().map(|&y| (y, 1)).collect(),
            })
            .collect()
    }

    pub fn invariants(&self, route: InvariantRoute, cap: usize) -> Result<Subspace> {
        let n = self.dim();
        match route {
            InvariantRoute::OrbitSums => Ok(Subspace::span(
                self.field,
                n,
                self.orbit_sums().iter().map(ModuleElement::to_sparse),
            )),
            InvariantRoute::Nullspace => {
                // x is invariant iff x_{g y} = x_y for every generator g.
                let mut entries = Vec::new();
                let mut row = 0;
                for perm in self.action.generator_perms() {
                    for (y, &gy) in perm.iter().enumerate() {
                        if gy != y {
                            entries.push((row, gy, 1));
                            entries.push((row, y, -1));
                            row += 1;
                        }
                    }
                }
                let m = SparseMatrix::from_entries(self.field, row, n, entries)?;
                Ok(Subspace::span(self.field, n, nullspace(&m, cap)?))
            }
        }
    }

    /// Serializes `x` as `{point encoding: coefficient}`.
    pub fn element_to_json(&self, x: &ModuleElement) -> Value {
        let map: Map<String, Value> = x
            .coeffs
            .iter()
            .map(|(&y, &c)| (self.action.point(y).to_string(), Value::from(c)))
            .collect();
        Value::Object(map)
    }

    pub fn element_from_json(&self, value: &Value) -> Result<ModuleElement> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidArgument("module element must be a JSON object".into()))?;
        let mut coeffs = BTreeMap::new();
        for (key, c) in obj {
            let y = self
                .action
                .point_index(&Elem::parse(key)?)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown point {key:?}")))?;
            let c = c
                .as_i64()
                .ok_or_else(|| Error::InvalidArgument(format!("coefficient of {key:?} is not an integer")))?;
            let c = self.field.reduce(c);
            if c != 0 {
                coeffs.insert(y, c);
            }
        }
        Ok(ModuleElement { coeffs })
    }
}

/// Outcome of comparing the orbit-sum basis with the nullspace basis.
#[derive(Clone, Debug, Serialize)]
pub struct FiniteInvariantsReport {
    pub points: usize,
    pub orbit_sum_dim: usize,
    pub nullspace_dim: usize,
    pub orbit_sums_fixed: bool,
    pub same_subspace: bool,
    /// Row `i`: coefficients of the `i`-th nullspace basis vector in the
    /// orbit sums (ordered by least point).
    pub nullspace_in_orbit_sums: Vec<Vec<u32>>,
    /// Row `i`: coefficients of the `i`-th orbit sum in the nullspace basis.
    pub orbit_sums_in_nullspace: Vec<Vec<u32>>,
    pub certificate_verified: bool,
    pub pass: bool,
}

/// Checks that the orbit sums are a basis of the invariants, producing
/// change-of-basis matrices in both directions and re-verifying them.
pub fn verify_finite_invariants(m: &PermutationModule, cap: usize) -> Result<FiniteInvariantsReport> {
    let f = m.field;
    let sums = m.orbit_sums();
    let by_orbits = m.invariants(InvariantRoute::OrbitSums, cap)?;
    let by_kernel = m.invariants(InvariantRoute::Nullspace, cap)?;
    let orbit_sums_fixed = sums.iter().all(|s| m.is_invariant(s));

    // Orbit sums have disjoint supports, so the coordinate on an orbit is
    // read off at its least point.
    let leads: Vec<usize> = sums.iter().map(|s| s.support().next().unwrap()).collect();
    let mut verified = true;
    let mut nullspace_in_orbit_sums = Vec::new();
    for v in by_kernel.basis() {
        let coords: Vec<u32> = leads.iter().map(|&y| v.get(y)).collect();
        let mut rebuilt = SparseVec::new();
        for (s, &c) in sums.iter().zip(&coords) {
            rebuilt = rebuilt.axpy(f, c, &s.to_sparse());
        }
        verified &= rebuilt == *v;
        nullspace_in_orbit_sums.push(coords);
    }
    let mut orbit_sums_in_nullspace = Vec::new();
    for s in &sums {
        match by_kernel.coordinates(&s.to_sparse()) {
            Some(coords) => {
                let mut rebuilt = SparseVec::new();
                for (b, &c) in by_kernel.basis().iter().zip(&coords) {
                    rebuilt = rebuilt.axpy(f, c, b);
                }
                verified &= rebuilt == s.to_sparse();
                orbit_sums_in_nullspace.push(coords);
            }
            None => {
                verified = false;
                orbit_sums_in_nullspace.push(Vec::new());
            }
        }
    }
    let same_subspace = by_orbits == by_kernel;
    let pass = orbit_sums_fixed
        && same_subspace
        && verified
        && by_orbits.dim() == sums.len()
        && by_kernel.dim() == sums.len();
    Ok(FiniteInvariantsReport {
        points: m.dim(),
        orbit_sum_dim: by_orbits.dim(),
        nullspace_dim: by_kernel.dim(),
        orbit_sums_fixed,
        same_subspace,
        nullspace_in_orbit_sums,
        orbit_sums_in_nullspace,
        certificate_verified: verified,
        pass,
    })
}

/// Class sums of `g`: a basis of the center of `F_p[G]`, one vector per
/// conjugacy class, in the coordinates of the element list of `g`.
pub fn center_group_algebra(g: &Arc<GroupModel>, field: PrimeField, group_cap: usize) -> Result<Vec<SparseVec>> {
    if g.order() > group_cap {
        return Err(Error::CapExceeded {
            what: "group order",
            size: g.order(),
            cap: group_cap,
        });
    }
    let module = PermutationModule::new(field, Arc::new(GAction::conjugation(g.clone())?));
    Ok(module.orbit_sums().iter().map(ModuleElement::to_sparse).collect())
}

/// Left and right translation by each generator, as permutations of `G`.
///
/// Right translation by `h` is `x -> x h^{-1}` so that it is a left action.
pub fn translation_perms(g: &GroupModel, left: &[usize], right: &[usize]) -> Vec<Vec<usize>> {
    let n = g.order();
    let mut perms: Vec<Vec<usize>> = left.iter().map(|&a| (0..n).map(|x| g.mul(a, x)).collect()).collect();
    perms.extend(right.iter().map(|&b| {
        let b_inv = g.inv(b);
        (0..n).map(|x| g.mul(x, b_inv)).collect::<Vec<_>>()
    }));
    perms
}

/// Dimension of the linear maps `F_p[G] -> F_p[G]` commuting with both left
/// and right translation, by a direct solve on `|G|^2` unknowns.
pub fn bimodule_end_dim(g: &GroupModel, field: PrimeField, cap: usize) -> Result<usize> {
    let gens = g.generators();
    commutant_dim(field, g.order(), &translation_perms(g, gens, gens), cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsets::catalog;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn trivial_action_invariants_are_everything() {
        let g = Arc::new(catalog::cyclic(3).unwrap());
        let m = PermutationModule::new(f(3), Arc::new(GAction::trivial(g, 4).unwrap()));
        let r = verify_finite_invariants(&m, 5000).unwrap();
        assert!(r.pass);
        assert_eq!(r.orbit_sum_dim, 4);
        // Identity certificate.
        for (i, row) in r.nullspace_in_orbit_sums.iter().enumerate() {
            assert_eq!(row.iter().enumerate().filter(|&(j, &c)| (c == 1) == (i == j)).count(), 4);
        }
    }

    #[test]
    fn regular_action_has_one_invariant() {
        let g = Arc::new(catalog::cyclic(3).unwrap());
        let m = PermutationModule::new(f(3), Arc::new(GAction::left_regular(g).unwrap()));
        let inv = m.invariants(InvariantRoute::Nullspace, 5000).unwrap();
        assert_eq!(inv.dim(), 1);
        assert_eq!(inv.basis()[0].to_dense(3), vec![1, 1, 1]);
        let r = verify_finite_invariants(&m, 5000).unwrap();
        assert_eq!((r.orbit_sum_dim, r.nullspace_dim), (1, 1));
        assert!(r.pass);
    }

    #[test]
    fn heisenberg_conjugation_invariants() {
        let g = Arc::new(catalog::heisenberg(3, 1).unwrap());
        let m = PermutationModule::new(f(3), Arc::new(GAction::conjugation(g.clone()).unwrap()));
        assert_eq!(m.invariants(InvariantRoute::Nullspace, 5000).unwrap().dim(), 11);
        assert_eq!(center_group_algebra(&g, f(3), 1000).unwrap().len(), 11);
    }

    #[test]
    fn singleton_orbit_sum_is_a_basis_vector() {
        let g = Arc::new(catalog::cyclic(2).unwrap());
        let m = PermutationModule::new(f(2), Arc::new(GAction::trivial(g, 1).unwrap()));
        assert_eq!(m.orbit_sums(), vec![m.basis_vector(0)]);
    }

    #[test]
    fn bimodule_commutant_matches_class_count() {
        assert_eq!(bimodule_end_dim(&catalog::trivial(), f(2), 5000).unwrap(), 1);
        assert_eq!(bimodule_end_dim(&catalog::symmetric(3).unwrap(), f(3), 5000).unwrap(), 3);
        assert_eq!(bimodule_end_dim(&catalog::heisenberg(2, 1).unwrap(), f(2), 5000).unwrap(), 5);
    }

    #[test]
    fn json_round_trip() {
        let g = Arc::new(catalog::cyclic(3).unwrap());
        let m = PermutationModule::new(f(3), Arc::new(GAction::left_regular(g).unwrap()));
        let x = m.orbit_sums().remove(0);
        let json = m.element_to_json(&x);
        assert_eq!(json, serde_json::json!({"0": 1, "1": 1, "2": 1}));
        assert_eq!(m.element_from_json(&json).unwrap(), x);
    }

    #[test]
    fn nullspace_route_respects_cap() {
        let g = Arc::new(catalog::cyclic(8).unwrap());
        let m = PermutationModule::new(f(2), Arc::new(GAction::left_regular(g).unwrap()));
        assert!(matches!(
            m.invariants(InvariantRoute::Nullspace, 4),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(m.invariants(InvariantRoute::OrbitSums, 4).unwrap().dim(), 1);
    }
}
