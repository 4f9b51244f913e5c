use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::group::{Elem, GroupModel};
use crate::error::{Error, Result};

type ActFn = dyn Fn(usize, usize) -> usize + Send + Sync;

/// How much of the action axioms to check at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Validation {
    /// Identity plus compatibility on generator pairs.
    Generators,
    /// Compatibility on every pair of group elements.
    Full,
}

/// A finite group acting on a finite set of encoded points.
///
/// The action is given by a function on indices `(group element, point)`;
/// the permutation of each generator is cached.
#[derive(Clone)]
pub struct GAction {
    group: Arc<GroupModel>,
    points: Vec<Elem>,
    point_index: HashMap<Elem, usize>,
    gen_perms: Vec<Vec<usize>>,
    act: Arc<ActFn>,
}

impl fmt::Debug for GAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GAction")
            .field("group", &self.group)
            .field("points", &self.points.len())
            .finish()
    }
}

/// One orbit together with the order of the stabilizer of its least point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Orbit {
    pub points: Vec<usize>,
    pub stabilizer_order: usize,
}

impl Orbit {
    pub fn stabilizer_index(&self, group_order: usize) -> usize {
        group_order / self.stabilizer_order
    }
}

/// Orbits of an action, sorted by least point encoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    orbits: Vec<Vec<usize>>,
    orbit_of: Vec<usize>,
}

impl OrbitPartition {
    pub fn orbits(&self) -> &[Vec<usize>] {
        &self.orbits
    }

    pub fn len(&self) -> usize {
        self.orbits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orbits.is_empty()
    }

    pub fn orbit_of(&self, point: usize) -> usize {
        self.orbit_of[point]
    }

    pub fn orbit(&self, i: usize) -> &[usize] {
        &self.orbits[i]
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.orbits.iter().map(Vec::len).collect()
    }
}

impl GAction {
    pub fn new(
        group: Arc<GroupModel>,
        points: Vec<Elem>,
        act: impl Fn(usize, usize) -> usize + Send + Sync + 'static,
        validation: Validation,
    ) -> Result<Self> {
        let point_index: HashMap<Elem, usize> =
            points.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        if point_index.len() != points.len() {
            return Err(Error::ActionViolation("duplicate point encodings".into()));
        }
        let n = points.len();
        let act: Arc<ActFn> = Arc::new(act);
        let mut gen_perms = Vec::with_capacity(group.generators().len());
        for &g in group.generators() {
            let perm: Vec<usize> = (0..n).map(|y| act(g, y)).collect();
            let mut hit = vec![false; n];
            for (y, &gy) in perm.iter().enumerate() {
                if gy >= n || std::mem::replace(&mut hit[gy], true) {
                    return Err(Error::ActionViolation(format!(
                        "generator {} does not permute the points (at point {})",
                        group.element(g),
                        points[y]
                    )));
                }
            }
            gen_perms.push(perm);
        }
        let action = GAction {
            group,
            points,
            point_index,
            gen_perms,
            act,
        };
        action.validate(validation)?;
        Ok(action)
    }

    fn validate(&self, validation: Validation) -> Result<()> {
        let g = &self.group;
        let n = self.points.len();
        for y in 0..n {
            if self.act(g.identity(), y) != y {
                return Err(Error::ActionViolation(format!(
                    "identity moves point {}",
                    self.points[y]
                )));
            }
        }
        let pairs: Vec<(usize, usize)> = match validation {
            Validation::Generators => {
                let gens = g.generators();
                gens.iter().flat_map(|&a| gens.iter().map(move |&b| (a, b))).collect()
            }
            Validation::Full => (0..g.order())
                .flat_map(|a| (0..g.order()).map(move |b| (a, b)))
                .collect(),
        };
        for (a, b) in pairs {
            let ab = g.mul(a, b);
            for y in 0..n {
                if self.act(ab, y) != self.act(a, self.act(b, y)) {
                    return Err(Error::ActionViolation(format!(
                        "act({0}*{1}, y) != act({0}, act({1}, y)) at y = {2}",
                        g.element(a),
                        g.element(b),
                        self.points[y]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<GroupModel> {
        &self.group
    }

    pub fn points(&self) -> &[Elem] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn point(&self, i: usize) -> &Elem {
        &self.points[i]
    }

    pub fn point_index(&self, e: &Elem) -> Option<usize> {
        self.point_index.get(e).copied()
    }

    #[inline]
    pub fn act(&self, g: usize, y: usize) -> usize {
        (self.act)(g, y)
    }

    /// Cached permutations of the points, one per group generator.
    pub fn generator_perms(&self) -> &[Vec<usize>] {
        &self.gen_perms
    }

    /// Orbit decomposition via the generator permutations.
    pub fn orbit_partition(&self) -> OrbitPartition {
        let n = self.points.len();
        let mut orbit_of = vec![usize::MAX; n];
        let mut orbits: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if orbit_of[start] != usize::MAX {
                continue;
            }
            let id = orbits.len();
            orbit_of[start] = id;
            let mut orbit = vec![start];
            let mut i = 0;
            while i < orbit.len() {
                let y = orbit[i];
                for perm in &self.gen_perms {
                    let z = perm[y];
                    if orbit_of[z] == usize::MAX {
                        orbit_of[z] = id;
                        orbit.push(z);
                    }
                }
                i += 1;
            }
            orbit.sort_by(|&a, &b| self.points[a].cmp(&self.points[b]));
            orbits.push(orbit);
        }
        orbits.sort_by(|a, b| self.points[a[0]].cmp(&self.points[b[0]]));
        for (id, orbit) in orbits.iter().enumerate() {
            for &y in orbit {
                orbit_of[y] = id;
            }
        }
        OrbitPartition { orbits, orbit_of }
    }

    /// Stabilizer of a point, by scanning every group element.
    pub fn stabilizer(&self, y: usize) -> Vec<usize> {
        (0..self.group.order()).filter(|&g| self.act(g, y) == y).collect()
    }

    /// Orbits with the stabilizer order of each orbit's least point.
    pub fn orbits(&self) -> Vec<Orbit> {
        self.orbit_partition()
            .orbits
            .into_iter()
            .map(|points| {
                let stabilizer_order = self.stabilizer(points[0]).len();
                Orbit {
                    points,
                    stabilizer_order,
                }
            })
            .collect()
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.points.len())
            .filter(|&y| self.gen_perms.iter().all(|perm| perm[y] == y))
            .collect()
    }

    /// Left multiplication of the group on itself.
    pub fn left_regular(group: Arc<GroupModel>) -> Result<Self> {
        let points = group.elements().to_vec();
        let g = group.clone();
        GAction::new(group, points, move |a, x| g.mul(a, x), Validation::Generators)
    }

    /// Conjugation `x -> g x g^{-1}` of the group on itself.
    pub fn conjugation(group: Arc<GroupModel>) -> Result<Self> {
        let points = group.elements().to_vec();
        let g = group.clone();
        GAction::new(group, points, move |a, x| g.conj(a, x), Validation::Generators)
    }

    /// The identity action on `n` points labelled `0..n`.
    pub fn trivial(group: Arc<GroupModel>, n: usize) -> Result<Self> {
        let points = (0..n as i64).map(|i| Elem(vec![i])).collect();
        GAction::new(group, points, |_, y| y, Validation::Generators)
    }
}
