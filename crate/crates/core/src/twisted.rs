//! Twisted conjugation on towers of finite groups.
//!
//! For a level `U_n` sitting inside an ambient group and an ambient element
//! `w`, the subgroup `U_w = {u in U_n : w^-1 u w in U_n}` acts on `U_n` by
//! `u . x = (w^-1 u w) x u^-1`. Its fixed space in `F_p[U_n]` is spanned by
//! orbit sums, and the orbit of `x` has size `[U_w : S_x]` where `S_x` is the
//! centralizer of `w x` inside `U_w`.

use std::sync::Arc;

use serde::Serialize;

use crate::coeff::{nullspace, PrimeField, SparseMatrix, SparseVec, Subspace};
use crate::error::{Error, Result};
use crate::gsets::{catalog, Ambient, Elem, GAction, GroupModel, Validation};
use crate::permmod::{InvariantRoute, ModuleElement, PermutationModule};
use crate::towers::{reduction_map, TowerOfActions};

/// A chain of finite groups `U_1 <- U_2 <- ... <- U_N`, each enumerated
/// inside an ambient arithmetic (matrices mod `p^n`, or the group itself).
#[derive(Clone, Debug)]
pub struct GroupTower {
    name: String,
    p: u32,
    first_level: usize,
    levels: Vec<Arc<GroupModel>>,
    /// `quotient_maps[i]` sends relative level `i + 1` onto level `i`.
    quotient_maps: Vec<Vec<usize>>,
    is_pro_p: bool,
}

impl GroupTower {
    pub fn new(name: impl Into<String>, p: u32, first_level: usize, levels: Vec<GroupModel>) -> Result<Self> {
        PrimeField::new(p)?;
        if levels.is_empty() {
            return Err(Error::InvalidTower("a group tower needs at least one level".into()));
        }
        let levels: Vec<Arc<GroupModel>> = levels.into_iter().map(Arc::new).collect();
        let mut quotient_maps = Vec::new();
        for pair in levels.windows(2) {
            let (lower, upper) = (&pair[0], &pair[1]);
            let map = reduction_map(upper, lower)?;
            let mut hit = vec![false; lower.order()];
            for &h in &map {
                hit[h] = true;
            }
            if hit.contains(&false) {
                return Err(Error::InvalidTower(format!("{} does not map onto {}", upper.name(), lower.name())));
            }
            for &s in upper.generators() {
                for h in 0..upper.order() {
                    if map[upper.mul(s, h)] != lower.mul(map[s], map[h]) {
                        return Err(Error::InvalidTower(format!(
                            "reduction {} -> {} is not a homomorphism",
                            upper.name(),
                            lower.name()
                        )));
                    }
                }
            }
            quotient_maps.push(map);
        }
        let is_pro_p = levels.iter().all(|g| g.is_p_group(p));
        Ok(GroupTower {
            name: name.into(),
            p,
            first_level,
            levels,
            quotient_maps,
            is_pro_p,
        })
    }

    /// A one-level tower: the finite group `u` inside the ambient of `g`.
    pub fn single(p: u32, u: GroupModel) -> Result<Self> {
        let name = u.name().to_string();
        GroupTower::new(name, p, 1, vec![u])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn first_level(&self) -> usize {
        self.first_level
    }

    pub fn depth(&self) -> usize {
        self.first_level + self.levels.len() - 1
    }

    /// Whether every level is a `p`-group. The units tower is not.
    pub fn is_pro_p(&self) -> bool {
        self.is_pro_p
    }

    fn rel(&self, n: usize) -> Result<usize> {
        if n < self.first_level || n > self.depth() {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        Ok(n - self.first_level)
    }

    pub fn level(&self, n: usize) -> Result<&Arc<GroupModel>> {
        Ok(&self.levels[self.rel(n)?])
    }

    pub fn ambient(&self, n: usize) -> Result<&Ambient> {
        Ok(self.level(n)?.ambient())
    }

    /// The composite reduction `U_n -> U_m` on element indices.
    pub fn projection(&self, n: usize, m: usize) -> Result<Vec<usize>> {
        let (rn, rm) = (self.rel(n)?, self.rel(m)?);
        if rm > rn {
            return Err(Error::InvalidArgument(format!("target level {m} lies above source level {n}")));
        }
        let mut table: Vec<usize> = (0..self.levels[rn].order()).collect();
        for i in (rm..rn).rev() {
            for x in table.iter_mut() {
                *x = self.quotient_maps[i][*x];
            }
        }
        Ok(table)
    }
}

/// Predicted order of a built-in level, checked before enumerating.
fn predicted_order(name: &str, p: i64, n: u32) -> Option<i64> {
    let phi = |m: i64| (1..=m).filter(|&k| gcd(k, m) == 1).count() as i64;
    match name {
        "heisenberg3" => p.checked_pow(3 * n),
        "unitriangular4" => p.checked_pow(6 * n),
        "cyclic" => p.checked_pow(n),
        "units" => p.checked_pow(n).map(phi),
        _ => None,
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// `heisenberg3`, `unitriangular4`, `cyclic` or `units`, levels `1..=depth`.
pub fn builtin_tower(name: &str, p: u32, depth: usize, group_cap: usize) -> Result<GroupTower> {
    PrimeField::new(p)?;
    if depth < 1 {
        return Err(Error::InvalidArgument("a group tower needs depth at least 1".into()));
    }
    let pi = p as i64;
    let mut levels = Vec::new();
    for n in 1..=depth as u32 {
        let order = predicted_order(name, pi, n).ok_or_else(|| Error::UnknownName(format!("tower {name:?}")))?;
        if order as usize > group_cap {
            return Err(Error::CapExceeded {
                what: "group order",
                size: order as usize,
                cap: group_cap,
            });
        }
        let g = match name {
            "heisenberg3" => catalog::heisenberg(pi, n)?,
            "unitriangular4" => catalog::unitriangular(4, pi, n)?,
            "cyclic" => catalog::cyclic(pi.pow(n))?,
            _ => catalog::units(pi.pow(n))?,
        };
        levels.push(g);
    }
    GroupTower::new(name, p, 1, levels)
}

/// One ambient element per level, compatible with the reductions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conjugator {
    pub description: String,
    pub per_level: Vec<Elem>,
}

impl Conjugator {
    pub fn identity(tower: &GroupTower) -> Self {
        Conjugator {
            description: "identity".into(),
            per_level: tower.levels.iter().map(|g| g.ambient().identity()).collect(),
        }
    }

    /// Validates invertibility and compatibility with the ambient reductions.
    pub fn new(tower: &GroupTower, description: impl Into<String>, per_level: Vec<Elem>) -> Result<Self> {
        if per_level.len() != tower.levels.len() {
            return Err(Error::InvalidArgument(format!(
                "conjugator has {} levels, tower has {}",
                per_level.len(),
                tower.levels.len()
            )));
        }
        for (g, w) in tower.levels.iter().zip(&per_level) {
            if !g.ambient().is_valid(w) {
                return Err(Error::NotInvertible(format!("{w} in {}", g.ambient().describe())));
            }
        }
        for (i, pair) in per_level.windows(2).enumerate() {
            let (lower, upper) = (tower.levels[i].ambient(), tower.levels[i + 1].ambient());
            if upper.reduce_to(&pair[1], lower)? != pair[0] {
                return Err(Error::InvalidArgument(format!(
                    "conjugator {} does not reduce to {} at level {}",
                    pair[1],
                    pair[0],
                    tower.first_level + i
                )));
            }
        }
        Ok(Conjugator {
            description: description.into(),
            per_level,
        })
    }

    /// Parses `identity`, `diag(d_1,...,d_k)` (matrix ambients) or a raw
    /// element encoding, reduced into the ambient of every level.
    pub fn parse(tower: &GroupTower, desc: &str) -> Result<Self> {
        let desc = desc.trim();
        if matches!(desc, "identity" | "id" | "e" | "1") {
            return Ok(Conjugator::identity(tower));
        }
        let mut per_level = Vec::new();
        for g in &tower.levels {
            let amb = g.ambient();
            let w = if let Some(inner) = desc.strip_prefix("diag(").and_then(|s| s.strip_suffix(')')) {
                let Ambient::Matrices { dim, modulus } = amb else {
                    return Err(Error::InvalidArgument(format!("diag(...) needs a matrix ambient, not {}", amb.describe())));
                };
                let diag = Elem::parse(inner)?.0;
                if diag.len() != *dim {
                    return Err(Error::InvalidArgument(format!("diag needs {dim} entries")));
                }
                Ambient::diagonal(*dim, *modulus, &diag)
            } else {
                let raw = Elem::parse(desc)?;
                match amb {
                    Ambient::Matrices { modulus, .. } | Ambient::Units { modulus } => {
                        Elem(raw.0.iter().map(|x| x.rem_euclid(*modulus)).collect())
                    }
                    Ambient::Additive { orders } if orders.len() == raw.0.len() => {
                        Elem(raw.0.iter().zip(orders).map(|(x, n)| x.rem_euclid(*n)).collect())
                    }
                    _ => raw,
                }
            };
            per_level.push(w);
        }
        Conjugator::new(tower, desc, per_level)
    }

    pub fn at(&self, tower: &GroupTower, n: usize) -> Result<&Elem> {
        Ok(&self.per_level[tower.rel(n)?])
    }
}

/// `U_w = {u in U_n : w^-1 u w in U_n}`.
pub fn u_w_subgroup(tower: &GroupTower, n: usize, w: &Conjugator) -> Result<GroupModel> {
    let u = tower.level(n)?;
    let amb = u.ambient();
    let wn = w.at(tower, n)?;
    let w_inv = amb.inv(wn)?;
    let members: Vec<usize> = (0..u.order())
        .filter(|&i| u.contains(&amb.mul(&amb.mul(&w_inv, u.element(i)), wn)))
        .collect();
    Ok(u.subgroup(&members)?.with_name(format!("{}_w", u.name())))
}

/// The twisted action of `U_w` on the points of `U_n` (encoded as elements).
pub fn twisted_action(tower: &GroupTower, n: usize, w: &Conjugator) -> Result<GAction> {
    let u = tower.level(n)?.clone();
    let uw = Arc::new(u_w_subgroup(tower, n, w)?);
    let amb = u.ambient().clone();
    let wn = w.at(tower, n)?.clone();
    let w_inv = amb.inv(&wn)?;
    // For each element of U_w: its index in U_n, and that of w^-1 u w.
    let mut as_point = Vec::with_capacity(uw.order());
    let mut twisted = Vec::with_capacity(uw.order());
    for e in uw.elements() {
        as_point.push(u.index_of(e).ok_or_else(|| Error::NotASubgroup(format!("{e} not in {}", u.name())))?);
        let t = amb.mul(&amb.mul(&w_inv, e), &wn);
        twisted.push(u.index_of(&t).ok_or_else(|| Error::ActionViolation(format!("w^-1 {e} w leaves {}", u.name())))?);
    }
    let points = u.elements().to_vec();
    let grp = u.clone();
    GAction::new(
        uw,
        points,
        move |a, x| grp.mul(grp.mul(twisted[a], x), grp.inv(as_point[a])),
        Validation::Generators,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct TwistedFixedSpace {
    pub level: usize,
    pub points: usize,
    pub u_w_order: usize,
    pub orbit_sizes: Vec<usize>,
    /// The fixed space in coordinates indexed by the elements of `U_n`.
    #[serde(skip)]
    pub space: Subspace,
    pub dim: usize,
    /// `Some(agree)` if the direct linear condition was solved too.
    pub direct_check: Option<bool>,
}

/// The fixed space `{lambda : lambda u = (w^-1 u w) lambda}` via orbit sums,
/// cross-checked against a direct solve of the linear condition on the
/// generators of `U_w` when `|U_n|` is within `cap`.
pub fn twisted_fixed_space(
    tower: &GroupTower,
    n: usize,
    w: &Conjugator,
    field: PrimeField,
    cap: usize,
) -> Result<TwistedFixedSpace> {
    let action = Arc::new(twisted_action(tower, n, w)?);
    let module = PermutationModule::new(field, action.clone());
    let space = module.invariants(InvariantRoute::OrbitSums, cap)?;
    let orbit_sizes = action.orbit_partition().sizes();
    let direct_check = if action.num_points() <= cap {
        Some(direct_fixed_space(tower, n, w, field, cap)? == space)
    } else {
        None
    };
    Ok(TwistedFixedSpace {
        level: n,
        points: action.num_points(),
        u_w_order: action.group().order(),
        orbit_sizes,
        dim: space.dim(),
        space,
        direct_check,
    })
}

/// Solves `lambda u = (w^-1 u w) lambda` for the generators `u` of `U_w`,
/// using only multiplication in `U_n`. Coefficientwise this reads
/// `lambda(y u^-1) = lambda(u'^-1 y)` with `u' = w^-1 u w`.
pub fn direct_fixed_space(tower: &GroupTower, n: usize, w: &Conjugator, field: PrimeField, cap: usize) -> Result<Subspace> {
    let u = tower.level(n)?;
    let amb = u.ambient();
    let wn = w.at(tower, n)?;
    let w_inv = amb.inv(wn)?;
    let uw = u_w_subgroup(tower, n, w)?;
    let size = u.order();
    let mut entries = Vec::new();
    let mut row = 0;
    for &g in uw.generators() {
        let e = uw.element(g);
        let gi = u.index_of(e).ok_or_else(|| Error::NotASubgroup(format!("{e}")))?;
        let ti = u
            .index_of(&amb.mul(&amb.mul(&w_inv, e), wn))
            .ok_or_else(|| Error::ActionViolation(format!("w^-1 {e} w leaves {}", u.name())))?;
        let (g_inv, t_inv) = (u.inv(gi), u.inv(ti));
        for y in 0..size {
            let (a, b) = (u.mul(y, g_inv), u.mul(t_inv, y));
            if a != b {
                entries.push((row, a, 1));
                entries.push((row, b, -1));
                row += 1;
            }
        }
    }
    let m = SparseMatrix::from_entries(field, row, size, entries)?;
    Ok(Subspace::span(field, size, nullspace(&m, cap)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitCentralizerReport {
    pub level: usize,
    pub points_checked: usize,
    pub u_w_order: usize,
    pub failures: usize,
    /// The first point where the identity fails, by encoding.
    pub counterexample: Option<String>,
    pub pass: bool,
}

/// Checks `|orbit of x| = |U_w| / |{u in U_w : u (w x) = (w x) u}|` at every
/// point, with the centralizer computed in the ambient arithmetic.
pub fn orbit_centralizer_check(tower: &GroupTower, n: usize, w: &Conjugator) -> Result<OrbitCentralizerReport> {
    let action = twisted_action(tower, n, w)?;
    let u = tower.level(n)?;
    let amb = u.ambient();
    let wn = w.at(tower, n)?;
    let uw = action.group();
    let part = action.orbit_partition();
    let mut failures = 0;
    let mut counterexample = None;
    for x in 0..u.order() {
        let wx = amb.mul(wn, u.element(x));
        let centralizer = uw.elements().iter().filter(|e| amb.commutes(e, &wx)).count();
        let orbit = part.orbit(part.orbit_of(x)).len();
        if centralizer == 0 || uw.order() % centralizer != 0 || uw.order() / centralizer != orbit {
            failures += 1;
            counterexample.get_or_insert_with(|| u.element(x).to_string());
        }
    }
    Ok(OrbitCentralizerReport {
        level: n,
        points_checked: u.order(),
        u_w_order: uw.order(),
        failures,
        counterexample,
        pass: failures == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationReport {
    pub tower: String,
    pub p: u32,
    pub w: String,
    pub target_level: usize,
    pub max_depth: usize,
    /// Levels `target..=max_depth`.
    pub levels: Vec<usize>,
    pub fixed_dims: Vec<usize>,
    pub image_dims: Vec<usize>,
    pub descending: bool,
    /// First `n` whose image equals the image at `n + 1`.
    pub stabilization_level: Option<usize>,
    pub stable_dim: Option<usize>,
    pub center_order: usize,
    /// Whether the stable image is the span of the central point masses.
    pub stable_is_center_span: Option<bool>,
    pub stable_is_zero: Option<bool>,
    /// Whether `w_n x` is a scalar matrix for some `x` in `U_n`, per level
    /// (matrix ambients only).
    pub meets_scalar_coset: Vec<Option<bool>>,
    pub inconclusive: bool,
}

/// Pushes the twisted fixed spaces of levels `m..=max_depth` down to
/// `F_p[U_m]` and records the resulting chain of images.
pub fn twisted_stabilization(
    tower: &GroupTower,
    w: &Conjugator,
    m: usize,
    max_depth: usize,
    field: PrimeField,
) -> Result<StabilizationReport> {
    if m >= max_depth || max_depth > tower.depth() || m < tower.first_level {
        return Err(Error::InvalidArgument(format!(
            "need {} <= target {m} < max depth {max_depth} <= {}",
            tower.first_level,
            tower.depth()
        )));
    }
    let target = tower.level(m)?;
    let mut images: Vec<Subspace> = Vec::new();
    let mut fixed_dims = Vec::new();
    let mut meets_scalar_coset = Vec::new();
    for n in m..=max_depth {
        let action = Arc::new(twisted_action(tower, n, w)?);
        let module = PermutationModule::new(field, action);
        let sums = module.orbit_sums();
        fixed_dims.push(sums.len());
        let table = tower.projection(n, m)?;
        let pushed = sums.iter().map(|s: &ModuleElement| {
            SparseVec::from_pairs(field, s.support().map(|x| (table[x], 1)))
        });
        images.push(Subspace::span(field, target.order(), pushed));
        meets_scalar_coset.push(meets_scalar_coset_at(tower, n, w)?);
    }
    let descending = images.windows(2).all(|pair| pair[1].is_subspace_of(&pair[0]));
    let stable_index = (0..images.len() - 1).find(|&i| images[i] == images[i + 1]);
    let center = target.center();
    let center_span = Subspace::span(field, target.order(), center.iter().map(|&z| SparseVec::unit(z)));
    let stable = stable_index.map(|i| &images[i]);
    Ok(StabilizationReport {
        tower: tower.name.clone(),
        p: tower.p,
        w: w.description.clone(),
        target_level: m,
        max_depth,
        levels: (m..=max_depth).collect(),
        fixed_dims,
        image_dims: images.iter().map(Subspace::dim).collect(),
        descending,
        stabilization_level: stable_index.map(|i| m + i),
        stable_dim: stable.map(Subspace::dim),
        center_order: center.len(),
        stable_is_center_span: stable.map(|s| *s == center_span),
        stable_is_zero: stable.map(|s| s.dim() == 0),
        meets_scalar_coset,
        inconclusive: stable_index.is_none(),
    })
}

fn meets_scalar_coset_at(tower: &GroupTower, n: usize, w: &Conjugator) -> Result<Option<bool>> {
    let u = tower.level(n)?;
    let Ambient::Matrices { dim, .. } = u.ambient() else {
        return Ok(None);
    };
    let wn = w.at(tower, n)?;
    let is_scalar = |e: &Elem| {
        (0..*dim).all(|i| (0..*dim).all(|j| if i == j { e.0[i * dim + j] == e.0[0] } else { e.0[i * dim + j] == 0 }))
    };
    Ok(Some(u.elements().iter().any(|x| is_scalar(&u.ambient().mul(wn, x)))))
}

/// Whether the points fixed by the whole of `U_n` under plain conjugation
/// are exactly the center of `U_n`.
pub fn center_is_fixed_locus(tower: &GroupTower, n: usize) -> Result<bool> {
    let action = twisted_action(tower, n, &Conjugator::identity(tower))?;
    Ok(action.fixed_points() == tower.level(n)?.center())
}

/// The tower of conjugation actions `U_n` on itself, joined by the reductions.
pub fn conjugation_tower(tower: &GroupTower) -> Result<TowerOfActions> {
    let levels = tower
        .levels
        .iter()
        .map(|g| GAction::conjugation(g.clone()).map(Arc::new))
        .collect::<Result<Vec<_>>>()?;
    TowerOfActions::new(
        format!("conjugation({})", tower.name),
        tower.first_level,
        levels,
        tower.quotient_maps.clone(),
        tower.quotient_maps.clone(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn s3_tower(u: &str) -> GroupTower {
        let g = catalog::symmetric(3).unwrap();
        GroupTower::single(3, catalog::subgroup_by_name(&g, "s3", u).unwrap()).unwrap()
    }

    #[test]
    fn builtin_orders() {
        let h = builtin_tower("heisenberg3", 3, 2, 10_000).unwrap();
        assert_eq!(h.level(1).unwrap().order(), 27);
        assert_eq!(h.level(2).unwrap().order(), 729);
        assert!(h.is_pro_p());
        let c = builtin_tower("cyclic", 2, 4, 100).unwrap();
        assert_eq!((1..=4).map(|n| c.level(n).unwrap().order()).collect::<Vec<_>>(), vec![2, 4, 8, 16]);
        let u = builtin_tower("units", 3, 3, 100).unwrap();
        assert_eq!((1..=3).map(|n| u.level(n).unwrap().order()).collect::<Vec<_>>(), vec![2, 6, 18]);
        assert!(!u.is_pro_p());
        assert!(builtin_tower("nope", 3, 1, 100).is_err());
        assert!(matches!(builtin_tower("heisenberg3", 3, 3, 1000), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn u_w_examples() {
        let h = builtin_tower("heisenberg3", 3, 1, 100).unwrap();
        let w = Conjugator::parse(&h, "diag(1,2,4)").unwrap();
        assert_eq!(u_w_subgroup(&h, 1, &w).unwrap().order(), 27);
        // U = <(12)>, w = (123): w U w^-1 = <(23)>.
        let t = s3_tower("c2");
        let w = Conjugator::parse(&t, "1,2,0").unwrap();
        assert_eq!(u_w_subgroup(&t, 1, &w).unwrap().order(), 1);
        let fixed = twisted_fixed_space(&t, 1, &w, f(2), 5000).unwrap();
        assert_eq!(fixed.dim, 2);
        assert_eq!(fixed.direct_check, Some(true));
    }

    #[test]
    fn z3_in_s3_twisted_by_a_transposition() {
        let t = s3_tower("a3");
        let w = Conjugator::parse(&t, "1,0,2").unwrap();
        let a = twisted_action(&t, 1, &w).unwrap();
        assert_eq!(a.orbit_partition().sizes(), vec![3]);
        let fixed = twisted_fixed_space(&t, 1, &w, f(3), 5000).unwrap();
        assert_eq!(fixed.dim, 1);
        assert_eq!(fixed.direct_check, Some(true));
        assert!(orbit_centralizer_check(&t, 1, &w).unwrap().pass);
    }

    #[test]
    fn identity_twist_is_conjugation() {
        let h = builtin_tower("heisenberg3", 3, 1, 100).unwrap();
        let w = Conjugator::identity(&h);
        let fixed = twisted_fixed_space(&h, 1, &w, f(3), 5000).unwrap();
        assert_eq!(fixed.dim, 11);
        assert_eq!(fixed.direct_check, Some(true));
        assert!(center_is_fixed_locus(&h, 1).unwrap());
    }

    #[test]
    fn diagonal_twist_on_heisenberg() {
        let h = builtin_tower("heisenberg3", 3, 1, 100).unwrap();
        let w = Conjugator::parse(&h, "diag(1,2,4)").unwrap();
        let a = twisted_action(&h, 1, &w).unwrap();
        assert!(a.fixed_points().is_empty());
        assert_eq!(a.orbit_partition().sizes(), vec![9, 9, 9]);
        assert!(orbit_centralizer_check(&h, 1, &w).unwrap().pass);
    }

    #[test]
    fn incompatible_conjugators_are_rejected() {
        let h = builtin_tower("heisenberg3", 3, 2, 1000).unwrap();
        let w9 = Ambient::diagonal(3, 9, &[1, 2, 4]);
        let w3 = Ambient::diagonal(3, 3, &[1, 1, 1]);
        assert!(Conjugator::new(&h, "bad", vec![w3, w9]).is_err());
        assert!(Conjugator::parse(&h, "diag(1,3,1)").is_err());
    }

    #[test]
    fn stabilization_on_small_heisenberg() {
        let h = builtin_tower("heisenberg3", 3, 2, 1000).unwrap();
        let r = twisted_stabilization(&h, &Conjugator::identity(&h), 1, 2, f(3)).unwrap();
        assert_eq!(r.image_dims, vec![11, 3]);
        assert!(r.descending);
        let w = Conjugator::parse(&h, "diag(1,2,4)").unwrap();
        let r = twisted_stabilization(&h, &w, 1, 2, f(3)).unwrap();
        assert_eq!(r.image_dims, vec![3, 0]);
        assert_eq!(r.meets_scalar_coset, vec![Some(false), Some(false)]);
    }

    #[test]
    fn abelian_tower_keeps_everything() {
        let c = builtin_tower("cyclic", 2, 3, 100).unwrap();
        let w = Conjugator::parse(&c, "1").unwrap();
        let r = twisted_stabilization(&c, &w, 1, 3, f(2)).unwrap();
        assert_eq!(r.image_dims, vec![2, 2, 2]);
        assert_eq!(r.stable_is_center_span, Some(true));
    }
}
