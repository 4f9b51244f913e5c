//! Double cosets, the bimodule `F_p[G]` and the endomorphism bookkeeping
//! behind the Mackey decomposition.
//!
//! An endomorphism of `F_p[G]` commuting with left translation by `G` and
//! right translation by `U` is determined by a function `lambda` on `G`
//! invariant under conjugation by `U`. Restricting `lambda` to `w U` for each
//! double coset representative `w` gives an element of the twisted fixed
//! space `k[U]_w`, and at finite level this is a bijection onto the product.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Serialize;

use crate::coeff::{commutant_basis, commutant_dim, rref, PrimeField, SparseVec, Subspace};
use crate::error::{Error, Result};
use crate::gsets::{enumerate_group, Ambient, Elem, GAction, GroupModel, Validation};
use crate::permmod::{translation_perms, PermutationModule};
use crate::twisted::{twisted_fixed_space, Conjugator, GroupTower};

#[derive(Clone, Debug, Serialize)]
pub struct DoubleCoset {
    /// Index in `G` of the least element (by encoding) of the double coset.
    pub rep: usize,
    pub rep_encoding: String,
    pub elements: Vec<usize>,
    /// Members of `U ∩ w U w^-1`, as indices in `G`.
    pub u_w: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleCosetDecomp {
    pub g_order: usize,
    pub u_order: usize,
    pub cosets: Vec<DoubleCoset>,
}

impl DoubleCosetDecomp {
    pub fn reps(&self) -> Vec<usize> {
        self.cosets.iter().map(|c| c.rep).collect()
    }
}

/// `G = ⊔ U w U`, with each `w` the least element of its double coset.
pub fn double_cosets(g: &GroupModel, u: &GroupModel) -> Result<DoubleCosetDecomp> {
    let members = g.embed(u)?;
    let in_u = {
        let mut v = vec![false; g.order()];
        for &x in &members {
            v[x] = true;
        }
        v
    };
    let mut label = vec![usize::MAX; g.order()];
    let mut cosets = Vec::new();
    for x in 0..g.order() {
        if label[x] != usize::MAX {
            continue;
        }
        let mut elements: Vec<usize> = members
            .iter()
            .flat_map(|&a| members.iter().map(move |&b| (a, b)))
            .map(|(a, b)| g.mul(g.mul(a, x), b))
            .collect();
        elements.sort_unstable();
        elements.dedup();
        for &y in &elements {
            label[y] = cosets.len();
        }
        let rep = *elements.iter().min_by(|&&a, &&b| g.element(a).cmp(g.element(b))).unwrap();
        let rep_inv = g.inv(rep);
        let u_w = members
            .iter()
            .copied()
            .filter(|&a| in_u[g.mul(g.mul(rep_inv, a), rep)])
            .collect();
        elements.sort_by(|&a, &b| g.element(a).cmp(g.element(b)));
        cosets.push(DoubleCoset {
            rep,
            rep_encoding: g.element(rep).to_string(),
            elements,
            u_w,
        });
    }
    cosets.sort_by(|a, b| g.element(a.rep).cmp(g.element(b.rep)));
    Ok(DoubleCosetDecomp {
        g_order: g.order(),
        u_order: u.order(),
        cosets,
    })
}

/// `F_p[G]` with `G` acting by left and `U` by right translation, realized
/// as an action of `G x U` on the points of `G`: `(g, u) . x = g x u^-1`.
#[derive(Clone, Debug)]
pub struct BiModule {
    g: Arc<GroupModel>,
    u: Arc<GroupModel>,
    u_in_g: Vec<usize>,
    module: PermutationModule,
}

/// Which translations an endomorphism must commute with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Commuting {
    LeftOnly,
    Both,
}

pub fn induced_bimodule(g: Arc<GroupModel>, u: Arc<GroupModel>, field: PrimeField) -> Result<BiModule> {
    let u_in_g = g.embed(&u)?;
    let amb = Ambient::Product(vec![g.ambient().clone(), u.ambient().clone()]);
    let (eg, eu) = (g.ambient().identity(), u.ambient().identity());
    let pair = |a: &Elem, b: &Elem| Elem(a.0.iter().chain(&b.0).copied().collect());
    let mut gens: Vec<Elem> = g.generators().iter().map(|&s| pair(g.element(s), &eu)).collect();
    gens.extend(u.generators().iter().map(|&t| pair(&eg, u.element(t))));
    let product = Arc::new(
        enumerate_group(&amb, &gens, g.order() * u.order())?.with_name(format!("{} x {}", g.name(), u.name())),
    );
    let split = g.ambient().encoded_len();
    let (gg, uu, uig, prod) = (g.clone(), u.clone(), u_in_g.clone(), product.clone());
    let action = GAction::new(
        product,
        g.elements().to_vec(),
        move |a, x| {
            let e = prod.element(a);
            let left = gg.index_of(&Elem(e.0[..split].to_vec())).expect("left factor");
            let right = uu.index_of(&Elem(e.0[split..].to_vec())).expect("right factor");
            gg.mul(gg.mul(left, x), gg.inv(uig[right]))
        },
        Validation::Generators,
    )?;
    Ok(BiModule {
        g,
        u,
        u_in_g,
        module: PermutationModule::new(field, Arc::new(action)),
    })
}

impl BiModule {
    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    pub fn module(&self) -> &PermutationModule {
        &self.module
    }

    /// Extension by zero of a function on `U` (indexed by `U`'s elements) to
    /// a function on `G`.
    pub fn iota(&self, f: &SparseVec) -> SparseVec {
        SparseVec::from_pairs(
            self.module.field(),
            f.entries().iter().map(|&(v, c)| (self.u_in_g[v], c as i64)),
        )
    }

    /// Checks on point masses that `iota` commutes with left and right
    /// translation by the generators of `U`.
    pub fn iota_is_equivariant(&self) -> bool {
        let (g, u) = (&self.g, &self.u);
        u.generators().iter().all(|&t| {
            let tg = self.u_in_g[t];
            (0..u.order()).all(|v| {
                let delta = SparseVec::unit(v);
                let image = self.iota(&delta);
                // Left: delta_v -> delta_{t v}.
                let left_ok = self.iota(&SparseVec::unit(u.mul(t, v))) == SparseVec::unit(g.mul(tg, image.entries()[0].0));
                // Right: delta_v -> delta_{v t^-1}.
                let right_ok = self.iota(&SparseVec::unit(u.mul(v, u.inv(t))))
                    == SparseVec::unit(g.mul(image.entries()[0].0, g.inv(tg)));
                left_ok && right_ok
            })
        })
    }

    fn perms(&self, which: Commuting) -> Vec<Vec<usize>> {
        let right: Vec<usize> = match which {
            Commuting::LeftOnly => Vec::new(),
            Commuting::Both => self.u.generators().iter().map(|&t| self.u_in_g[t]).collect(),
        };
        translation_perms(&self.g, self.g.generators(), &right)
    }

    pub fn commutant_dim(&self, which: Commuting, cap: usize) -> Result<usize> {
        commutant_dim(self.module.field(), self.dim(), &self.perms(which), cap)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PerRep {
    pub rep: String,
    pub double_coset_size: usize,
    pub u_w_order: usize,
    pub index_identity: bool,
    pub fixed_dim: usize,
    pub direct_check: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaSpotCheck {
    pub endomorphisms: usize,
    /// Every restriction `x -> lambda(w x)` lies in the twisted fixed space.
    pub lands_in_fixed_spaces: bool,
    pub injective: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OmegaReport {
    pub g: String,
    pub u: String,
    pub p: u32,
    pub u_is_p_group: bool,
    pub covers: bool,
    pub per_rep: Vec<PerRep>,
    pub sum_fixed_dims: usize,
    pub commutant_dim: usize,
    pub equal: bool,
    pub iota_equivariant: bool,
    pub spot_check: Option<OmegaSpotCheck>,
    pub pass: bool,
}

/// Computes `dim End_{G x U}(F_p[G])` by a commutant solve and the sum over
/// double coset representatives of `dim k[U]_w` by twisted orbit sums, and
/// compares them. When `|G|^2` is within `cap` the map
/// `alpha -> (x -> alpha(delta_e)(w x))_w` is also evaluated on a basis.
pub fn omega_dimension_check(g: &Arc<GroupModel>, u: &Arc<GroupModel>, p: u32, cap: usize) -> Result<OmegaReport> {
    let field = PrimeField::new(p)?;
    let decomp = double_cosets(g, u)?;
    let tower = GroupTower::single(p, (**u).clone())?;
    let covers = decomp.cosets.iter().map(|c| c.elements.len()).sum::<usize>() == g.order();
    let mut per_rep = Vec::new();
    let mut spaces = Vec::new();
    for c in &decomp.cosets {
        let w = Conjugator::new(&tower, c.rep_encoding.clone(), vec![g.element(c.rep).clone()])?;
        let fixed = twisted_fixed_space(&tower, 1, &w, field, cap)?;
        if fixed.u_w_order != c.u_w.len() {
            return Err(Error::NotASubgroup(format!(
                "U_w for {} has order {} by conjugation but {} by double cosets",
                c.rep_encoding,
                fixed.u_w_order,
                c.u_w.len()
            )));
        }
        per_rep.push(PerRep {
            rep: c.rep_encoding.clone(),
            double_coset_size: c.elements.len(),
            u_w_order: c.u_w.len(),
            index_identity: c.elements.len() * c.u_w.len() == u.order() * u.order(),
            fixed_dim: fixed.dim,
            direct_check: fixed.direct_check,
        });
        spaces.push(fixed.space);
    }
    let bm = induced_bimodule(g.clone(), u.clone(), field)?;
    let commutant = bm.commutant_dim(Commuting::Both, cap)?;
    let sum_fixed_dims = per_rep.iter().map(|r| r.fixed_dim).sum();
    let spot_check = if g.order() * g.order() <= cap {
        Some(spot_check(g, u, &bm, &decomp, &spaces, field, cap)?)
    } else {
        None
    };
    let equal = sum_fixed_dims == commutant;
    let iota_equivariant = bm.iota_is_equivariant();
    let pass = equal
        && covers
        && iota_equivariant
        && per_rep.iter().all(|r| r.index_identity && r.direct_check != Some(false))
        && spot_check.as_ref().is_none_or(|s| s.lands_in_fixed_spaces && s.injective);
    Ok(OmegaReport {
        g: g.name().to_string(),
        u: u.name().to_string(),
        p,
        u_is_p_group: u.is_p_group(p),
        covers,
        per_rep,
        sum_fixed_dims,
        commutant_dim: commutant,
        equal,
        iota_equivariant,
        spot_check,
        pass,
    })
}

fn spot_check(
    g: &GroupModel,
    u: &GroupModel,
    bm: &BiModule,
    decomp: &DoubleCosetDecomp,
    spaces: &[Subspace],
    field: PrimeField,
    cap: usize,
) -> Result<OmegaSpotCheck> {
    let n = g.order();
    let basis = commutant_basis(field, n, &bm.perms(Commuting::Both), cap)?;
    let e = g.identity();
    let mut lands = true;
    let mut images = Vec::new();
    for t in &basis {
        // lambda(z) = T[z][e], the image of the point mass at the identity.
        let lambda: BTreeMap<usize, u32> = t
            .entries()
            .iter()
            .filter(|&&(idx, _)| idx % n == e)
            .map(|&(idx, c)| (idx / n, c))
            .collect();
        let mut stacked = Vec::new();
        let mut offset = 0;
        for (c, space) in decomp.cosets.iter().zip(spaces) {
            let mu: Vec<(usize, i64)> = (0..u.order())
                .filter_map(|x| {
                    let wx = g.mul(c.rep, bm.u_in_g[x]);
                    lambda.get(&wx).map(|&v| (x, v as i64))
                })
                .collect();
            let mu = SparseVec::from_pairs(field, mu);
            lands &= space.contains(&mu);
            stacked.extend(mu.entries().iter().map(|&(x, v)| (offset + x, v as i64)));
            offset += u.order();
        }
        images.push(SparseVec::from_pairs(field, stacked));
    }
    let injective = rref(field, images).len() == basis.len();
    Ok(OmegaSpotCheck {
        endomorphisms: basis.len(),
        lands_in_fixed_spaces: lands,
        injective,
    })
}
