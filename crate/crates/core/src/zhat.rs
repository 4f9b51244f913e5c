//! Truncated arithmetic in the completed group ring of `Z = A x Z_0`.
//!
//! `A` is a finitely generated abelian group (free part plus finite cyclic
//! factors) and is never completed: coefficients have finite support in the
//! `A` direction, so for `A = Z` elements are Laurent polynomials in a
//! uniformizer `π`. `Z_0` is a profinite abelian group given by its finite
//! quotients, and an element at level `m` lives in `F_p[A x Z_0/Z_m]`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::coeff::{commutant_dim, nullspace, CharPRing, PrimeField, SparseMatrix};
use crate::error::{Error, Result};
use crate::gsets::{enumerate_group, Ambient, Elem, GAction, GroupModel};
use crate::twisted::{builtin_tower, GroupTower};

/// `Z = Z^free_rank x (Z/t_1 x ... ) x Z_0`, with `Z_0` given as a tower.
#[derive(Clone, Debug)]
pub struct ZSpec {
    name: String,
    field: PrimeField,
    free_rank: usize,
    torsion: Vec<i64>,
    z0: GroupTower,
    /// Name of the free generator when printing Laurent polynomials.
    symbol: Option<String>,
}

impl ZSpec {
    pub fn new(name: impl Into<String>, p: u32, free_rank: usize, torsion: Vec<i64>, z0: GroupTower) -> Result<Self> {
        let field = PrimeField::new(p)?;
        if torsion.iter().any(|&t| t < 1) {
            return Err(Error::InvalidArgument("torsion orders must be positive".into()));
        }
        for n in z0.first_level()..=z0.depth() {
            if !z0.level(n)?.is_abelian() {
                return Err(Error::InvalidArgument(format!("level {n} of {} is not abelian", z0.name())));
            }
        }
        Ok(ZSpec {
            name: name.into(),
            field,
            free_rank,
            torsion,
            z0,
            symbol: None,
        })
    }

    /// `a2-z4`: `A = Z/2` with the tower `Z/2^m`, `p = 2`.
    /// `qp-units`: `Q_p^x = π^Z x Z_p^x` with the tower `(Z/p^m)^x`.
    /// `trivial-a`: `A` trivial with the tower `Z/p^m`.
    pub fn builtin(name: &str, p: u32, max_level: usize, group_cap: usize) -> Result<Self> {
        match name {
            "a2-z4" => ZSpec::new(name, 2, 0, vec![2], builtin_tower("cyclic", 2, max_level, group_cap)?),
            "qp-units" => {
                let mut spec = ZSpec::new(name, p, 1, vec![], builtin_tower("units", p, max_level, group_cap)?)?;
                spec.symbol = Some("π".into());
                Ok(spec)
            }
            "trivial-a" => ZSpec::new(name, p, 0, vec![], builtin_tower("cyclic", p, max_level, group_cap)?),
            _ => Err(Error::UnknownName(format!("zhat spec {name:?}"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion(&self) -> &[i64] {
        &self.torsion
    }

    pub fn a_is_finite(&self) -> bool {
        self.free_rank == 0
    }

    pub fn z0(&self) -> &GroupTower {
        &self.z0
    }

    pub fn max_level(&self) -> usize {
        self.z0.depth()
    }

    pub fn level_group(&self, m: usize) -> Result<&Arc<GroupModel>> {
        self.z0.level(m)
    }

    fn a_len(&self) -> usize {
        self.free_rank + self.torsion.len()
    }

    fn normalize_a(&self, a: &[i64]) -> Vec<i64> {
        a.iter()
            .enumerate()
            .map(|(i, &x)| if i < self.free_rank { x } else { x.rem_euclid(self.torsion[i - self.free_rank]) })
            .collect()
    }

    fn add_a(&self, a: &[i64], b: &[i64]) -> Vec<i64> {
        let sum: Vec<i64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.normalize_a(&sum)
    }
}

/// An element of `F_p[A x Z_0/Z_m]`, keyed by `(A-exponents, Z_0 index)`.
#[derive(Clone)]
pub struct ZhatElement {
    spec: Arc<ZSpec>,
    level: usize,
    coeffs: BTreeMap<(Vec<i64>, usize), u32>,
}

impl PartialEq for ZhatElement {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.spec, &other.spec) && self.level == other.level && self.coeffs == other.coeffs
    }
}

impl Eq for ZhatElement {}

impl ZhatElement {
    pub fn zero(spec: &Arc<ZSpec>, level: usize) -> Result<Self> {
        spec.level_group(level)?;
        Ok(ZhatElement {
            spec: spec.clone(),
            level,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn monomial(spec: &Arc<ZSpec>, level: usize, a: &[i64], z: usize, c: i64) -> Result<Self> {
        let g = spec.level_group(level)?;
        if a.len() != spec.a_len() || z >= g.order() {
            return Err(Error::InvalidArgument(format!(
                "monomial ({a:?}, {z}) does not fit {} at level {level}",
                spec.name
            )));
        }
        let mut x = Self::zero(spec, level)?;
        x.add_term(spec.normalize_a(a), z, spec.field.reduce(c));
        Ok(x)
    }

    pub fn one(spec: &Arc<ZSpec>, level: usize) -> Result<Self> {
        let e = spec.level_group(level)?.identity();
        Self::monomial(spec, level, &vec![0; spec.a_len()], e, 1)
    }

    /// The uniformizer `π` (first free generator), if `A` has a free part.
    pub fn pi(spec: &Arc<ZSpec>, level: usize) -> Result<Self> {
        Self::free_generator(spec, level, 1)
    }

    pub fn pi_inv(spec: &Arc<ZSpec>, level: usize) -> Result<Self> {
        Self::free_generator(spec, level, -1)
    }

    fn free_generator(spec: &Arc<ZSpec>, level: usize, exp: i64) -> Result<Self> {
        if spec.free_rank == 0 {
            return Err(Error::InvalidArgument(format!("{} has no free part", spec.name)));
        }
        let mut a = vec![0; spec.a_len()];
        a[0] = exp;
        let e = spec.level_group(level)?.identity();
        Self::monomial(spec, level, &a, e, 1)
    }

    fn add_term(&mut self, a: Vec<i64>, z: usize, c: u32) {
        let f = self.spec.field;
        let entry = self.coeffs.entry((a, z)).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.coeffs.retain(|_, v| *v != 0);
        }
    }

    pub fn spec(&self) -> &Arc<ZSpec> {
        &self.spec
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], usize, u32)> {
        self.coeffs.iter().map(|((a, z), &c)| (a.as_slice(), *z, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if !Arc::ptr_eq(&self.spec, &other.spec) || self.level != other.level {
            return Err(Error::RingMismatch(format!(
                "{} at level {} vs {} at level {}",
                self.spec.name, self.level, other.spec.name, other.level
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let mut out = self.clone();
        for ((a, z), &c) in &other.coeffs {
            out.add_term(a.clone(), *z, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> Self {
        let f = self.spec.field;
        let c = f.reduce(c);
        let mut out = self.clone();
        out.coeffs = self
            .coeffs
            .iter()
            .map(|(k, &v)| (k.clone(), f.mul(v, c)))
            .filter(|&(_, v)| v != 0)
            .collect();
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same_ring(other)?;
        let f = self.spec.field;
        let g = self.spec.level_group(self.level)?;
        let mut acc: BTreeMap<(Vec<i64>, usize), u32> = BTreeMap::new();
        for ((a1, z1), &c1) in &self.coeffs {
            for ((a2, z2), &c2) in &other.coeffs {
                let key = (self.spec.add_a(a1, a2), g.mul(*z1, *z2));
                let e = acc.entry(key).or_insert(0);
                *e = f.add(*e, f.mul(c1, c2));
            }
        }
        acc.retain(|_, v| *v != 0);
        Ok(ZhatElement {
            spec: self.spec.clone(),
            level: self.level,
            coeffs: acc,
        })
    }

    pub fn pow(&self, e: u64) -> Self {
        self.ring_pow(e)
    }

    /// Pushforward along `Z_0/Z_level -> Z_0/Z_target`.
    pub fn reduce(&self, target: usize) -> Result<Self> {
        let table = self.spec.z0.projection(self.level, target)?;
        let mut out = Self::zero(&self.spec, target)?;
        for ((a, z), &c) in &self.coeffs {
            out.add_term(a.clone(), table[*z], c);
        }
        Ok(out)
    }

    /// A random element with up to `terms` terms and free exponents in
    /// `[-window, window]`.
    pub fn random<R: Rng>(spec: &Arc<ZSpec>, level: usize, rng: &mut R, terms: usize, window: i64) -> Result<Self> {
        let g = spec.level_group(level)?;
        let mut x = Self::zero(spec, level)?;
        for _ in 0..rng.gen_range(0..=terms) {
            let a: Vec<i64> = (0..spec.a_len())
                .map(|i| {
                    if i < spec.free_rank {
                        rng.gen_range(-window..=window)
                    } else {
                        rng.gen_range(0..spec.torsion[i - spec.free_rank])
                    }
                })
                .collect();
            let z = rng.gen_range(0..g.order());
            let c = rng.gen_range(1..spec.field.p());
            x.add_term(a, z, c);
        }
        Ok(x)
    }

    fn a_key(a: &[i64]) -> String {
        a.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
    }

    /// `{"level": m, "coeffs": {"<A exponents>|<Z_0 encoding>": c}}`.
    pub fn to_json(&self) -> Value {
        let g = self.spec.level_group(self.level).expect("level checked at construction");
        let coeffs: Map<String, Value> = self
            .coeffs
            .iter()
            .map(|((a, z), &c)| (format!("{}|{}", Self::a_key(a), g.element(*z)), Value::from(c)))
            .collect();
        serde_json::json!({ "spec": self.spec.name, "level": self.level, "coeffs": coeffs })
    }

    pub fn from_json(spec: &Arc<ZSpec>, value: &Value) -> Result<Self> {
        let bad = |what: &str| Error::InvalidArgument(format!("zhat element JSON: {what}"));
        let level = value.get("level").and_then(Value::as_u64).ok_or_else(|| bad("missing level"))? as usize;
        let g = spec.level_group(level)?;
        let mut x = Self::zero(spec, level)?;
        let coeffs = value.get("coeffs").and_then(Value::as_object).ok_or_else(|| bad("missing coeffs"))?;
        for (key, c) in coeffs {
            let (a, z) = key.split_once('|').ok_or_else(|| bad("key without '|'"))?;
            let a = if a.is_empty() { Vec::new() } else { Elem::parse(a)?.0 };
            if a.len() != spec.a_len() {
                return Err(bad("wrong number of A exponents"));
            }
            let z = g.index_of(&Elem::parse(z)?).ok_or_else(|| bad("unknown Z_0 element"))?;
            let c = c.as_i64().ok_or_else(|| bad("non-integer coefficient"))?;
            x.add_term(spec.normalize_a(&a), z, spec.field.reduce(c));
        }
        Ok(x)
    }
}

impl fmt::Debug for ZhatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ZhatElement[{}, level {}]({self})", self.spec.name, self.level)
    }
}

/// Groups terms by `A` exponent. For a spec with a named free generator and
/// no torsion this prints a Laurent polynomial, e.g. `[1] + (2[2] + [4])·π^-1`.
impl fmt::Display for ZhatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let g = self.spec.level_group(self.level).map_err(|_| fmt::Error)?;
        let mut by_a: BTreeMap<&Vec<i64>, Vec<String>> = BTreeMap::new();
        for ((a, z), &c) in &self.coeffs {
            let coeff = if c == 1 { String::new() } else { c.to_string() };
            by_a.entry(a).or_default().push(format!("{coeff}[{}]", g.element(*z)));
        }
        let laurent = self.spec.symbol.as_ref().filter(|_| self.spec.free_rank == 1 && self.spec.torsion.is_empty());
        let parts: Vec<String> = by_a
            .into_iter()
            .map(|(a, zs)| {
                let inner = if zs.len() == 1 { zs[0].clone() } else { format!("({})", zs.join(" + ")) };
                match laurent {
                    Some(sym) => match a[0] {
                        0 => inner,
                        1 => format!("{inner}·{sym}"),
                        k => format!("{inner}·{sym}^{k}"),
                    },
                    None if a.is_empty() => inner,
                    None => format!("{inner}·a^({})", Self::a_key(a)),
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl CharPRing for ZhatElement {
    fn characteristic(&self) -> u32 {
        self.spec.field.p()
    }
    fn zero_like(&self) -> Self {
        Self::zero(&self.spec, self.level).expect("level checked at construction")
    }
    fn one_like(&self) -> Self {
        Self::one(&self.spec, self.level).expect("level checked at construction")
    }
    fn ring_add(&self, other: &Self) -> Self {
        self.add(other).expect("operands from different rings")
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self.mul(other).expect("operands from different rings")
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RemarkIsoReport {
    pub spec: String,
    pub level: usize,
    pub a_finite: bool,
    /// Half-width of the box of free exponents compared, when `A` is infinite.
    pub window: Option<i64>,
    pub basis_size: usize,
    pub pairs_checked: usize,
    pub mismatches: usize,
    pub first_mismatch: Option<String>,
    pub pass: bool,
}

/// Compares multiplication in `F_p[Z/Z_m]`, with `Z/Z_m` multiplied as a
/// group in its own right, against multiplication of the corresponding
/// monomials `a · z` in `F_p[A][Z_0/Z_m]`.
pub fn remark_iso_check(spec: &Arc<ZSpec>, level: usize, window: i64) -> Result<RemarkIsoReport> {
    let zg = spec.level_group(level)?;
    let mut parts = Vec::new();
    if spec.free_rank > 0 {
        parts.push(Ambient::Lattice { rank: spec.free_rank });
    }
    if !spec.torsion.is_empty() {
        parts.push(Ambient::Additive {
            orders: spec.torsion.clone(),
        });
    }
    parts.push(zg.ambient().clone());
    let amb = Ambient::Product(parts);
    let a_len = spec.a_len();

    let basis: Vec<Elem> = if spec.a_is_finite() {
        let mut gens = Vec::new();
        for i in 0..a_len {
            let mut a = vec![0; a_len];
            a[i] = 1 % spec.torsion[i];
            gens.push(Elem(a.into_iter().chain(zg.ambient().identity().0).collect()));
        }
        for &s in zg.generators() {
            gens.push(Elem(vec![0; a_len].into_iter().chain(zg.element(s).0.iter().copied()).collect()));
        }
        let whole = enumerate_group(&amb, &gens, usize::MAX)?;
        let expected = spec.torsion.iter().product::<i64>() as usize * zg.order();
        if whole.order() != expected {
            return Err(Error::InvalidGroup(format!(
                "A x Z_0/Z_m has {} elements, expected {expected}",
                whole.order()
            )));
        }
        whole.elements().to_vec()
    } else {
        let mut boxes: Vec<Vec<i64>> = vec![Vec::new()];
        for i in 0..a_len {
            let range: Vec<i64> = if i < spec.free_rank {
                (-window..=window).collect()
            } else {
                (0..spec.torsion[i - spec.free_rank]).collect()
            };
            boxes = boxes
                .into_iter()
                .flat_map(|b| range.iter().map(move |&x| b.iter().copied().chain([x]).collect()))
                .collect();
        }
        boxes
            .into_iter()
            .flat_map(|a| zg.elements().iter().map(move |z| Elem(a.iter().copied().chain(z.0.iter().copied()).collect())))
            .collect()
    };

    let to_monomial = |e: &Elem| -> Result<ZhatElement> {
        let z = zg
            .index_of(&Elem(e.0[a_len..].to_vec()))
            .ok_or_else(|| Error::InvalidGroup(format!("{e} has no Z_0 part in {}", zg.name())))?;
        ZhatElement::monomial(spec, level, &e.0[..a_len], z, 1)
    };
    let monomials = basis.iter().map(&to_monomial).collect::<Result<Vec<_>>>()?;
    let mut mismatches = 0;
    let mut first_mismatch = None;
    for (x, mx) in basis.iter().zip(&monomials) {
        for (y, my) in basis.iter().zip(&monomials) {
            let direct = to_monomial(&amb.mul(x, y))?;
            if mx.mul(my)? != direct {
                mismatches += 1;
                first_mismatch.get_or_insert_with(|| format!("({x}) * ({y})"));
            }
        }
    }
    Ok(RemarkIsoReport {
        spec: spec.name.clone(),
        level,
        a_finite: spec.a_is_finite(),
        window: (!spec.a_is_finite()).then_some(window),
        basis_size: basis.len(),
        pairs_checked: basis.len() * basis.len(),
        mismatches,
        first_mismatch,
        pass: mismatches == 0,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FaithfulnessReport {
    pub group: String,
    pub order: usize,
    pub p: u32,
    /// Dimension of `{lambda : lambda * delta_e = 0}`.
    pub annihilator_dim: usize,
    /// Dimension of `{lambda : lambda * v = 0 for all v}`.
    pub module_annihilator_dim: usize,
    pub endomorphism_dim: usize,
    pub pass: bool,
}

/// `F_p[Z']` acts faithfully on itself, and its module endomorphisms are
/// exactly the `|Z'|`-dimensional algebra itself.
pub fn faithfulness_check(g: &Arc<GroupModel>, p: u32, cap: usize) -> Result<FaithfulnessReport> {
    let field = PrimeField::new(p)?;
    if !g.is_abelian() {
        return Err(Error::InvalidArgument(format!("{} is not abelian", g.name())));
    }
    let n = g.order();
    // (lambda * delta_h)(y) = lambda(y h^-1); one block of rows per h.
    let kernel_dim = |hs: &[usize]| -> Result<usize> {
        let mut entries = Vec::new();
        for (b, &h) in hs.iter().enumerate() {
            let h_inv = g.inv(h);
            for y in 0..n {
                entries.push((b * n + y, g.mul(y, h_inv), 1));
            }
        }
        let m = SparseMatrix::from_entries(field, hs.len() * n, n, entries)?;
        Ok(nullspace(&m, cap)?.len())
    };
    let annihilator_dim = kernel_dim(&[g.identity()])?;
    let all: Vec<usize> = (0..n).collect();
    let module_annihilator_dim = kernel_dim(&all)?;
    let regular = GAction::left_regular(g.clone())?;
    let endomorphism_dim = commutant_dim(field, n, regular.generator_perms(), cap)?;
    Ok(FaithfulnessReport {
        group: g.name().to_string(),
        order: n,
        p,
        annihilator_dim,
        module_annihilator_dim,
        endomorphism_dim,
        pass: annihilator_dim == 0 && module_annihilator_dim == 0 && endomorphism_dim == n,
    })
}

/// Degree-zero monomials multiply as the finite group `Z_0/Z_m` does.
pub fn degree_zero_is_group_algebra(spec: &Arc<ZSpec>, level: usize) -> Result<bool> {
    let g = spec.level_group(level)?;
    let zero_a = vec![0; spec.a_len()];
    for x in 0..g.order() {
        for y in 0..g.order() {
            let lhs = ZhatElement::monomial(spec, level, &zero_a, x, 1)?.mul(&ZhatElement::monomial(spec, level, &zero_a, y, 1)?)?;
            if lhs != ZhatElement::monomial(spec, level, &zero_a, g.mul(x, y), 1)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
