//! Inverse systems of finite actions.
//!
//! A tower is a chain of finite actions `Gamma_n` on `Y_n` joined by
//! equivariant surjections `Y_{n+1} -> Y_n` over surjective homomorphisms
//! `Gamma_{n+1} -> Gamma_n`. Invariants at a level are written in orbit
//! coordinates (one coefficient per orbit); the transition map `sigma`
//! multiplies by the integer `|C| / |pi(C)|`, which vanishes mod `p` as soon
//! as an orbit collapses.
//!
//! Levels carry absolute numbers starting at [`TowerOfActions::first_level`],
//! so a tower built from `U_1, U_2, ...` is addressed by `1, 2, ...`.

use std::sync::Arc;

use serde::Serialize;

use crate::coeff::{nullspace, PrimeField, SparseMatrix, SparseVec, Subspace};
use crate::error::{Error, Result};
use crate::gsets::{catalog, Elem, GAction, GroupModel, OrbitPartition, Validation};

#[derive(Clone, Debug)]
pub struct TowerOfActions {
    name: String,
    first_level: usize,
    levels: Vec<Arc<GAction>>,
    /// `set_maps[i]` sends points of relative level `i + 1` to level `i`.
    set_maps: Vec<Vec<usize>>,
    /// `group_maps[i]` sends elements of relative level `i + 1` to level `i`.
    group_maps: Vec<Vec<usize>>,
    orbits: Vec<OrbitPartition>,
}

impl TowerOfActions {
    pub fn new(
        name: impl Into<String>,
        first_level: usize,
        levels: Vec<Arc<GAction>>,
        set_maps: Vec<Vec<usize>>,
        group_maps: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidTower("a tower needs at least one level".into()));
        }
        if set_maps.len() + 1 != levels.len() || group_maps.len() + 1 != levels.len() {
            return Err(Error::InvalidTower(format!(
                "{} levels need {} set maps and group maps, got {} and {}",
                levels.len(),
                levels.len() - 1,
                set_maps.len(),
                group_maps.len()
            )));
        }
        for i in 0..set_maps.len() {
            validate_step(&levels[i + 1], &levels[i], &set_maps[i], &group_maps[i])
                .map_err(|e| Error::InvalidTower(format!("level {} -> {}: {e}", first_level + i + 1, first_level + i)))?;
        }
        let orbits = levels.iter().map(|a| a.orbit_partition()).collect();
        Ok(TowerOfActions {
            name: name.into(),
            first_level,
            levels,
            set_maps,
            group_maps,
            orbits,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn first_level(&self) -> usize {
        self.first_level
    }

    /// The deepest level.
    pub fn depth(&self) -> usize {
        self.first_level + self.levels.len() - 1
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

    pub fn level(&self, n: usize) -> Result<&Arc<GAction>> {
        Ok(&self.levels[self.rel(n)?])
    }

    pub fn orbits(&self, n: usize) -> Result<&OrbitPartition> {
        Ok(&self.orbits[self.rel(n)?])
    }

    pub fn set_map(&self, n: usize) -> Result<&[usize]> {
        let r = self.rel(n)?;
        if r == 0 {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        Ok(&self.set_maps[r - 1])
    }

    pub fn group_map(&self, n: usize) -> Result<&[usize]> {
        let r = self.rel(n)?;
        if r == 0 {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.depth(),
            });
        }
        Ok(&self.group_maps[r - 1])
    }

    fn check_pair(&self, n: usize, m: usize) -> Result<(usize, usize)> {
        let (rn, rm) = (self.rel(n)?, self.rel(m)?);
        if rm > rn {
            return Err(Error::InvalidArgument(format!("target level {m} lies above source level {n}")));
        }
        Ok((rn, rm))
    }

    /// `pi_{n -> m}` on a point.
    pub fn project_point(&self, n: usize, m: usize, y: usize) -> Result<usize> {
        let (rn, rm) = self.check_pair(n, m)?;
        Ok((rm..rn).rev().fold(y, |y, i| self.set_maps[i][y]))
    }

    /// The full map `pi_{n -> m}` as a table.
    pub fn projection(&self, n: usize, m: usize) -> Result<Vec<usize>> {
        let (rn, rm) = self.check_pair(n, m)?;
        let mut table: Vec<usize> = (0..self.levels[rn].num_points()).collect();
        for i in (rm..rn).rev() {
            for y in table.iter_mut() {
                *y = self.set_maps[i][*y];
            }
        }
        Ok(table)
    }

    /// The orbit at level `m` containing the image of orbit `c` at level `n`.
    pub fn project_orbit(&self, n: usize, m: usize, c: usize) -> Result<usize> {
        let y = self.orbits(n)?.orbit(c)[0];
        let z = self.project_point(n, m, y)?;
        Ok(self.orbits(m)?.orbit_of(z))
    }

    /// The integer `|C| / |pi(C)|` for orbit `c` at level `n`.
    pub fn sigma_factor(&self, n: usize, m: usize, c: usize) -> Result<usize> {
        let size = self.orbits(n)?.orbit(c).len();
        let image = self.orbits(m)?.orbit(self.project_orbit(n, m, c)?).len();
        if size % image != 0 {
            return Err(Error::InvalidTower(format!(
                "orbit of size {size} at level {n} maps onto an orbit of size {image}"
            )));
        }
        Ok(size / image)
    }

    /// `sigma_{n -> m}` on orbit coordinates.
    pub fn sigma(&self, field: PrimeField, n: usize, m: usize, x: &[u32]) -> Result<Vec<u32>> {
        self.check_pair(n, m)?;
        let src = self.orbits(n)?;
        if x.len() != src.len() {
            return Err(Error::InvalidArgument(format!(
                "level {n} has {} orbits, got {} coordinates",
                src.len(),
                x.len()
            )));
        }
        let mut out = vec![0; self.orbits(m)?.len()];
        for (c, &xc) in x.iter().enumerate() {
            if xc == 0 {
                continue;
            }
            let d = self.project_orbit(n, m, c)?;
            let factor = field.reduce(self.sigma_factor(n, m, c)? as i64);
            out[d] = field.add(out[d], field.mul(xc, factor));
        }
        Ok(out)
    }

    /// `upsilon`: orbit coordinates to point coordinates.
    pub fn upsilon(&self, field: PrimeField, n: usize, x: &[u32]) -> Result<SparseVec> {
        let orbits = self.orbits(n)?;
        let pairs = x
            .iter()
            .enumerate()
            .flat_map(|(c, &xc)| orbits.orbit(c).iter().map(move |&y| (y, xc as i64)));
        Ok(SparseVec::from_pairs(field, pairs))
    }

    /// Point-level pushforward `F_p[Y_n] -> F_p[Y_m]`.
    pub fn pushforward(&self, field: PrimeField, n: usize, m: usize, v: &SparseVec) -> Result<SparseVec> {
        let table = self.projection(n, m)?;
        Ok(SparseVec::from_pairs(
            field,
            v.entries().iter().map(|&(y, c)| (table[y], c as i64)),
        ))
    }

    /// The tower as plain data: point encodings, orbits and map tables.
    pub fn to_document(&self) -> TowerDocument {
        TowerDocument {
            name: self.name.clone(),
            first_level: self.first_level,
            depth: self.depth(),
            levels: self
                .levels
                .iter()
                .zip(&self.orbits)
                .enumerate()
                .map(|(i, (a, o))| LevelDocument {
                    level: self.first_level + i,
                    group: a.group().name().to_string(),
                    group_order: a.group().order(),
                    points: a.points().iter().map(Elem::to_string).collect(),
                    orbits: o.orbits().to_vec(),
                })
                .collect(),
            set_maps: self.set_maps.clone(),
            group_maps: self.group_maps.clone(),
        }
    }
}

fn validate_step(upper: &GAction, lower: &GAction, set_map: &[usize], group_map: &[usize]) -> std::result::Result<(), String> {
    let (gu, gl) = (upper.group(), lower.group());
    if set_map.len() != upper.num_points() || group_map.len() != gu.order() {
        return Err("map table has the wrong length".into());
    }
    if set_map.iter().chain(group_map).any(|&v| v == usize::MAX) {
        return Err("map table has holes".into());
    }
    let mut hit_points = vec![false; lower.num_points()];
    for &z in set_map {
        *hit_points.get_mut(z).ok_or("set map leaves the lower level")? = true;
    }
    if hit_points.contains(&false) {
        return Err("set map is not surjective".into());
    }
    let mut hit_group = vec![false; gl.order()];
    for &h in group_map {
        *hit_group.get_mut(h).ok_or("group map leaves the lower group")? = true;
    }
    if hit_group.contains(&false) {
        return Err("group map is not surjective".into());
    }
    for &s in gu.generators() {
        for h in 0..gu.order() {
            if group_map[gu.mul(s, h)] != gl.mul(group_map[s], group_map[h]) {
                return Err(format!("group map is not a homomorphism at generator {}", gu.element(s)));
            }
        }
        for y in 0..upper.num_points() {
            if set_map[upper.act(s, y)] != lower.act(group_map[s], set_map[y]) {
                return Err(format!(
                    "set map is not equivariant at generator {} and point {}",
                    gu.element(s),
                    upper.point(y)
                ));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelDocument {
    pub level: usize,
    pub group: String,
    pub group_order: usize,
    pub points: Vec<String>,
    pub orbits: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerDocument {
    pub name: String,
    pub first_level: usize,
    pub depth: usize,
    pub levels: Vec<LevelDocument>,
    pub set_maps: Vec<Vec<usize>>,
    pub group_maps: Vec<Vec<usize>>,
}

/// One orbit-coordinate vector per level of a tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvariantFamily {
    pub first_level: usize,
    pub coords: Vec<Vec<u32>>,
}

impl InvariantFamily {
    pub fn zero(t: &TowerOfActions) -> Self {
        InvariantFamily {
            first_level: t.first_level,
            coords: t.orbits.iter().map(|o| vec![0; o.len()]).collect(),
        }
    }

    pub fn from_levels(t: &TowerOfActions, coords: Vec<Vec<u32>>) -> Result<Self> {
        if coords.len() != t.levels.len() || coords.iter().zip(&t.orbits).any(|(c, o)| c.len() != o.len()) {
            return Err(Error::InvalidArgument("family shape does not match the tower".into()));
        }
        Ok(InvariantFamily {
            first_level: t.first_level,
            coords,
        })
    }

    /// The family `x_k = sigma_{N -> k}(x_top)`, coherent by construction.
    pub fn induced_from_top(t: &TowerOfActions, field: PrimeField, top: &[u32]) -> Result<Self> {
        let n = t.depth();
        let coords = (t.first_level..=n)
            .map(|k| t.sigma(field, n, k, top))
            .collect::<Result<Vec<_>>>()?;
        Self::from_levels(t, coords)
    }

    pub fn at(&self, n: usize) -> &[u32] {
        &self.coords[n - self.first_level]
    }
}

/// The size-preserving criterion: for all `n > m` and every orbit `C` at
/// level `m`, `x_m(C)` equals the sum of `x_n(B)` over the orbits `B` above
/// `C` with `|B| = |C|`.
pub fn check_coherence(t: &TowerOfActions, field: PrimeField, fam: &InvariantFamily) -> Result<bool> {
    for m in t.first_level..=t.depth() {
        for n in m + 1..=t.depth() {
            let mut sums = vec![0; t.orbits(m)?.len()];
            for b in 0..t.orbits(n)?.len() {
                let c = t.project_orbit(n, m, b)?;
                if t.orbits(n)?.orbit(b).len() == t.orbits(m)?.orbit(c).len() {
                    sums[c] = field.add(sums[c], fam.at(n)[b]);
                }
            }
            if sums != fam.at(m) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The defining condition `sigma_{n -> m}(x_n) = x_m` for all `n > m`.
pub fn check_sigma_compatibility(t: &TowerOfActions, field: PrimeField, fam: &InvariantFamily) -> Result<bool> {
    for m in t.first_level..=t.depth() {
        for n in m + 1..=t.depth() {
            if t.sigma(field, n, m, fam.at(n))? != fam.at(m) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Orbits `D` at level `m` that have an orbit of the same size above them at
/// every level `m + 1 ..= horizon`.
pub fn persistent_orbits(t: &TowerOfActions, m: usize, horizon: usize) -> Result<Vec<usize>> {
    t.check_pair(horizon, m)?;
    let om = t.orbits(m)?;
    let mut alive = vec![true; om.len()];
    for k in m + 1..=horizon {
        let ok = t.orbits(k)?;
        let mut seen = vec![false; om.len()];
        for c in 0..ok.len() {
            let d = t.project_orbit(k, m, c)?;
            if ok.orbit(c).len() == om.orbit(d).len() {
                seen[d] = true;
            }
        }
        for (a, s) in alive.iter_mut().zip(seen) {
            *a &= s;
        }
    }
    Ok((0..om.len()).filter(|&d| alive[d]).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub level: usize,
    pub horizon: usize,
    pub orbits_at_level: usize,
    pub unknowns: usize,
    pub coherent_image_dim: usize,
    pub persistent_orbits: Vec<usize>,
    pub persistent_span_dim: usize,
    pub equal: bool,
}

/// Compares the level-`m` image of all families that are coherent on the
/// levels `m..=horizon` (solved as a linear system in orbit coordinates)
/// with the span of the persistent orbits.
pub fn density_check(t: &TowerOfActions, field: PrimeField, m: usize, horizon: usize, cap: usize) -> Result<DensityReport> {
    t.check_pair(horizon, m)?;
    let mut offsets = Vec::new();
    let mut unknowns = 0;
    for k in m..=horizon {
        offsets.push(unknowns);
        unknowns += t.orbits(k)?.len();
    }
    let mut entries: Vec<(usize, usize, i64)> = Vec::new();
    let mut row = 0;
    for k in m..horizon {
        let (lo, hi) = (offsets[k - m], offsets[k + 1 - m]);
        let row0 = row;
        row += t.orbits(k)?.len();
        for d in 0..t.orbits(k)?.len() {
            entries.push((row0 + d, lo + d, -1));
        }
        for c in 0..t.orbits(k + 1)?.len() {
            let d = t.project_orbit(k + 1, k, c)?;
            let factor = t.sigma_factor(k + 1, k, c)? as i64;
            entries.push((row0 + d, hi + c, factor));
        }
    }
    // Entries for the same coordinate never repeat: each (row, column) pair
    // above is hit once, but sum defensively anyway.
    let mut summed = std::collections::BTreeMap::new();
    for (r, c, v) in entries {
        *summed.entry((r, c)).or_insert(0i64) += v;
    }
    let matrix = SparseMatrix::from_entries(field, row, unknowns, summed.into_iter().map(|((r, c), v)| (r, c, v)))?;
    let width = t.orbits(m)?.len();
    let kernel = nullspace(&matrix, cap)?;
    let image = Subspace::span(
        field,
        width,
        kernel.iter().map(|v| {
            SparseVec::from_pairs(field, v.entries().iter().filter(|&&(i, _)| i < width).map(|&(i, c)| (i, c as i64)))
        }),
    );
    let persistent = persistent_orbits(t, m, horizon)?;
    let span = Subspace::span(field, width, persistent.iter().map(|&d| SparseVec::unit(d)));
    Ok(DensityReport {
        level: m,
        horizon,
        orbits_at_level: width,
        unknowns,
        coherent_image_dim: image.dim(),
        persistent_span_dim: span.dim(),
        equal: image == span,
        persistent_orbits: persistent,
    })
}

/// The model `Y_n = Z/1 ⊔ Z/p ⊔ ... ⊔ Z/p^n` with `Z/p^n` acting by
/// translation through reduction. The map to level `n - 1` is the identity
/// on the first `n` pieces and reduction mod `p^{n-1}` on the last.
///
/// Points are encoded `[m, y]` with `y` in `Z/p^m`.
pub fn example_tower(p: u32, depth: usize, point_cap: usize) -> Result<TowerOfActions> {
    PrimeField::new(p)?;
    if depth < 1 {
        return Err(Error::InvalidArgument("the example tower needs depth at least 1".into()));
    }
    let p = p as i64;
    let total: i64 = (0..=depth as u32).map(|m| p.pow(m)).sum();
    if total as usize > point_cap {
        return Err(Error::CapExceeded {
            what: "tower points",
            size: total as usize,
            cap: point_cap,
        });
    }
    let offset = move |m: usize| -> usize { (0..m as u32).map(|k| p.pow(k) as usize).sum() };
    let mut levels = Vec::new();
    for n in 0..=depth {
        let g = Arc::new(catalog::cyclic(p.pow(n as u32))?);
        let points: Vec<Elem> = (0..=n)
            .flat_map(|m| (0..p.pow(m as u32)).map(move |y| Elem(vec![m as i64, y])))
            .collect();
        let grp = g.clone();
        let pts = points.clone();
        let act = move |a: usize, y: usize| {
            let shift = grp.element(a).0.first().copied().unwrap_or(0);
            let (m, v) = (pts[y].0[0], pts[y].0[1]);
            offset(m as usize) + (v + shift).rem_euclid(p.pow(m as u32)) as usize
        };
        levels.push(Arc::new(GAction::new(g, points, act, Validation::Generators)?));
    }
    let mut set_maps = Vec::new();
    let mut group_maps = Vec::new();
    for n in 1..=depth {
        let upper = &levels[n];
        let set_map = upper
            .points()
            .iter()
            .map(|e| {
                let (m, y) = (e.0[0] as usize, e.0[1]);
                let m_low = m.min(n - 1);
                offset(m_low) + y.rem_euclid(p.pow(m_low as u32)) as usize
            })
            .collect();
        set_maps.push(set_map);
        group_maps.push(reduction_map(upper.group(), levels[n - 1].group())?);
    }
    TowerOfActions::new(format!("example(p={p})"), 0, levels, set_maps, group_maps)
}

/// The natural reduction between two enumerated groups of the same ambient
/// shape, on element indices.
pub fn reduction_map(upper: &GroupModel, lower: &GroupModel) -> Result<Vec<usize>> {
    upper
        .elements()
        .iter()
        .map(|e| {
            let r = upper.ambient().reduce_to(e, lower.ambient())?;
            lower
                .index_of(&r)
                .ok_or_else(|| Error::InvalidTower(format!("{e} has no image in {}", lower.name())))
        })
        .collect()
}

/// `depth + 1` copies of one action joined by identity maps.
pub fn constant_tower(action: Arc<GAction>, depth: usize) -> Result<TowerOfActions> {
    let n = action.num_points();
    let order = action.group().order();
    TowerOfActions::new(
        "constant",
        0,
        vec![action; depth + 1],
        vec![(0..n).collect(); depth],
        vec![(0..order).collect(); depth],
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct Approximant {
    pub level: usize,
    /// A point at the deepest level lying over the witness point at `level`.
    pub point: String,
    pub orbit_size: usize,
    pub image: String,
    pub image_matches: bool,
    pub size_preserved: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonClosedDeltaWitness {
    pub depth: usize,
    /// Encodings of the coherent point, one per level.
    pub z: Vec<String>,
    pub orbit_sizes: Vec<usize>,
    pub strictly_increasing: bool,
    pub approximants: Vec<Approximant>,
}

/// A coherent point whose orbits keep growing, together with, at each level,
/// a point of the deepest level with the same image there whose orbit does
/// not grow from that level on. The first is in the closure of the finite
/// orbit points without being one of them.
pub fn nonclosed_delta_witness(t: &TowerOfActions) -> Result<NonClosedDeltaWitness> {
    let top = t.depth();
    let top_orbits = t.orbits(top)?;
    let largest = (0..top_orbits.len())
        .max_by_key(|&c| (top_orbits.orbit(c).len(), std::cmp::Reverse(c)))
        .ok_or_else(|| Error::NoWitness("empty top level".into()))?;
    let z_top = top_orbits.orbit(largest)[0];
    let mut z = Vec::new();
    let mut orbit_sizes = Vec::new();
    let mut approximants = Vec::new();
    for n in t.first_level..=top {
        let zn = t.project_point(top, n, z_top)?;
        let on = t.orbits(n)?;
        let size = on.orbit(on.orbit_of(zn)).len();
        z.push(t.level(n)?.point(zn).to_string());
        orbit_sizes.push(size);
        let table = t.projection(top, n)?;
        let found = (0..table.len()).find(|&y| {
            table[y] == zn && top_orbits.orbit(top_orbits.orbit_of(y)).len() == size
        });
        let y = found.ok_or_else(|| Error::NoWitness(format!("no point of bounded orbit over level {n}")))?;
        approximants.push(Approximant {
            level: n,
            point: t.level(top)?.point(y).to_string(),
            orbit_size: top_orbits.orbit(top_orbits.orbit_of(y)).len(),
            image: t.level(n)?.point(table[y]).to_string(),
            image_matches: table[y] == zn,
            size_preserved: true,
        });
    }
    let strictly_increasing = orbit_sizes.windows(2).all(|w| w[0] < w[1]);
    if !strictly_increasing {
        return Err(Error::NoWitness(format!("orbit sizes {orbit_sizes:?} do not keep growing")));
    }
    Ok(NonClosedDeltaWitness {
        depth: top,
        z,
        orbit_sizes,
        strictly_increasing,
        approximants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn example_tower_sizes() {
        let t = example_tower(2, 1, 1000).unwrap();
        assert_eq!(t.level(0).unwrap().num_points(), 1);
        assert_eq!(t.level(1).unwrap().num_points(), 3);
        let t = example_tower(2, 3, 1000).unwrap();
        assert_eq!(t.level(3).unwrap().num_points(), 15);
        assert_eq!(t.orbits(3).unwrap().len(), 4);
        let t = example_tower(3, 2, 1000).unwrap();
        assert_eq!(t.level(2).unwrap().num_points(), 13);
        assert!(example_tower(2, 10, 100).is_err());
    }

    #[test]
    fn sigma_on_the_example() {
        let t = example_tower(2, 2, 1000).unwrap();
        // Orbit m of level n is Y_n(m).
        assert_eq!(t.sigma(f(2), 2, 1, &[0, 0, 1]).unwrap(), vec![0, 0]);
        assert_eq!(t.sigma(f(2), 2, 1, &[0, 1, 0]).unwrap(), vec![0, 1]);
        assert!(t.sigma(f(2), 1, 2, &[0, 0]).is_err());
        assert!(t.sigma(f(2), 7, 1, &[0]).is_err());
    }

    #[test]
    fn coherence_examples() {
        let t = example_tower(2, 3, 1000).unwrap();
        assert!(check_coherence(&t, f(2), &InvariantFamily::zero(&t)).unwrap());
        let coords = (0..=3).map(|n| (0..=n).map(|m| u32::from(m == n)).collect()).collect();
        let fam = InvariantFamily::from_levels(&t, coords).unwrap();
        assert!(!check_coherence(&t, f(2), &fam).unwrap());
        assert!(!check_sigma_compatibility(&t, f(2), &fam).unwrap());
    }

    #[test]
    fn persistence_on_the_example() {
        let t = example_tower(2, 4, 1000).unwrap();
        assert_eq!(persistent_orbits(&t, 0, 4).unwrap(), vec![0]);
        assert_eq!(persistent_orbits(&t, 2, 4).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn constant_tower_is_fully_persistent_and_dense() {
        let g = Arc::new(catalog::symmetric(3).unwrap());
        let t = constant_tower(Arc::new(GAction::conjugation(g).unwrap()), 3).unwrap();
        assert_eq!(persistent_orbits(&t, 1, 3).unwrap(), vec![0, 1, 2]);
        let r = density_check(&t, f(3), 1, 3, 5000).unwrap();
        assert!(r.equal);
        assert_eq!(r.coherent_image_dim, 3);
    }

    #[test]
    fn density_on_the_example() {
        for (p, depth) in [(2, 5), (3, 4)] {
            let t = example_tower(p, depth, 1000).unwrap();
            let r = density_check(&t, f(p), 1, depth, 5000).unwrap();
            assert!(r.equal);
            assert_eq!((r.coherent_image_dim, r.persistent_span_dim), (2, 2));
        }
    }

    #[test]
    fn witness_orbit_sizes_are_powers_of_p() {
        let w = nonclosed_delta_witness(&example_tower(2, 4, 1000).unwrap()).unwrap();
        assert_eq!(w.orbit_sizes, vec![1, 2, 4, 8, 16]);
        assert!(w.approximants.iter().all(|a| a.image_matches));
        let w = nonclosed_delta_witness(&example_tower(3, 1, 1000).unwrap()).unwrap();
        assert_eq!(w.orbit_sizes, vec![1, 3]);
    }

    #[test]
    fn document_lists_every_level() {
        let doc = example_tower(2, 2, 1000).unwrap().to_document();
        assert_eq!(doc.levels.len(), 3);
        assert_eq!(doc.levels[2].points.len(), 7);
        assert_eq!(doc.set_maps[1], vec![0, 1, 2, 1, 2, 1, 2]);
    }
}
