//! Report-producing experiment runners behind the CLI subcommands.
//!
//! Every runner is deterministic in its configuration (randomized sweeps use
//! a seeded ChaCha stream) and records a pass/fail line per assertion.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::caps::Caps;
use crate::coeff::{nullspace, rank, AbelianGroupAlgebraElem, CharPRing, PrimeField, SparseMatrix};
use crate::error::{Error, Result};
use crate::gsets::{catalog, is_stable, stable_refinement, GAction, GroupModel, PartitionOfSet};
use crate::mackey::{double_cosets, omega_dimension_check};
use crate::permmod::{bimodule_end_dim, center_group_algebra, verify_finite_invariants, PermutationModule};
use crate::report::{Report, Table};
use crate::towers::{
    check_coherence, check_sigma_compatibility, density_check, example_tower, nonclosed_delta_witness, persistent_orbits,
    InvariantFamily, TowerOfActions,
};
use crate::twisted::{
    builtin_tower, center_is_fixed_locus, conjugation_tower, orbit_centralizer_check, twisted_fixed_space,
    twisted_stabilization, Conjugator,
};
use crate::zhat::{degree_zero_is_group_algebra, faithfulness_check, remark_iso_check, ZSpec, ZhatElement};

/// Options shared by all runners; unset fields take per-runner defaults.
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub p: Option<u32>,
    pub depth: Option<usize>,
    pub level: Option<usize>,
    pub group: Option<String>,
    pub action: Option<String>,
    pub tower: Option<String>,
    pub w: Option<String>,
    pub g: Option<String>,
    pub u: Option<String>,
    pub spec: Option<String>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub caps: Caps,
    pub record_timings: bool,
}

fn start(command: &str, cfg: &RunConfig) -> Report {
    let mut r = Report::new(command);
    r.config("seed", cfg.seed);
    r.config("caps", cfg.caps);
    if cfg.record_timings {
        r.enable_timings();
    }
    r
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Conjugacy classes by scanning the whole group for every element.
pub fn naive_conjugacy_classes(g: &GroupModel) -> Vec<Vec<usize>> {
    let mut seen = vec![false; g.order()];
    let mut classes = Vec::new();
    for x in 0..g.order() {
        if seen[x] {
            continue;
        }
        let mut class: Vec<usize> = (0..g.order()).map(|a| g.conj(a, x)).collect();
        class.sort_unstable();
        class.dedup();
        for &y in &class {
            seen[y] = true;
        }
        classes.push(class);
    }
    classes
}

const NAIVE_LIMIT: usize = 4_000_000;

fn named_group(cfg: &RunConfig, default: &str, default_p: u32) -> Result<(String, u32, usize, Arc<GroupModel>)> {
    let name = cfg.group.clone().unwrap_or_else(|| default.into());
    let p = cfg.p.unwrap_or(default_p);
    PrimeField::new(p)?;
    let level = cfg.level.unwrap_or(1);
    let g = catalog::group_by_name(&name, p as i64, level as u32)?;
    if g.order() > cfg.caps.group_order {
        return Err(Error::CapExceeded {
            what: "group order",
            size: g.order(),
            cap: cfg.caps.group_order,
        });
    }
    Ok((name, p, level, Arc::new(g)))
}

/// Orbits of a group acting on itself (by conjugation or translation).
pub fn orbits(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("orbits", cfg);
    let (name, p, level, g) = named_group(cfg, "heisenberg3", 3)?;
    let kind = cfg.action.clone().unwrap_or_else(|| "conjugation".into());
    r.config("group", &name);
    r.config("p", p);
    r.config("level", level);
    r.config("action", &kind);
    let t = Instant::now();
    let action = match kind.as_str() {
        "conjugation" => GAction::conjugation(g.clone())?,
        "regular" => GAction::left_regular(g.clone())?,
        other => return Err(Error::UnknownName(format!("action {other:?}"))),
    };
    let orbits = action.orbits();
    r.time("orbits", ms(t));

    let mut table = Table::new("orbits", &["orbit", "least_point", "size", "stabilizer_order"]);
    let mut bad = None;
    for (i, o) in orbits.iter().enumerate() {
        table.push(vec![i.into(), action.point(o.points[0]).to_string().into(), o.points.len().into(), o.stabilizer_order.into()]);
        if o.points.len() * o.stabilizer_order != g.order() && bad.is_none() {
            bad = Some(json!({ "orbit": i, "least_point": action.point(o.points[0]).to_string(), "size": o.points.len(), "stabilizer_order": o.stabilizer_order }));
        }
    }
    r.tables.push(table);
    r.check_with(
        "orbit_stabilizer",
        bad.is_none(),
        format!("|orbit| * |stabilizer| = {} for all {} orbits", g.order(), orbits.len()),
        || bad.clone().unwrap_or(Value::Null),
    );
    let covered: usize = orbits.iter().map(|o| o.points.len()).sum();
    r.check("orbits_partition_points", covered == action.num_points(), format!("{covered} of {} points", action.num_points()));
    let fixed = action.fixed_points().len();
    if g.is_p_group(p) {
        r.check(
            "p_group_fixed_point_congruence",
            (action.num_points() - fixed) % p as usize == 0,
            format!("|Y| = {}, |Y^G| = {fixed}, p = {p}", action.num_points()),
        );
    }
    let part = PartitionOfSet::new(action.num_points(), action.orbit_partition().orbits().to_vec())?;
    let refined = stable_refinement(&action, &part)?;
    r.check(
        "orbit_partition_is_stable",
        is_stable(&action, &part) && refined == part,
        "the orbit partition is stable and is its own stable refinement",
    );
    if kind == "conjugation" && g.order() * g.order() <= NAIVE_LIMIT {
        let t = Instant::now();
        let naive = naive_conjugacy_classes(&g);
        r.time("naive_classes", ms(t));
        let mut ours: Vec<Vec<usize>> = orbits.iter().map(|o| {
            let mut v = o.points.clone();
            v.sort_unstable();
            v
        }).collect();
        ours.sort();
        let mut theirs = naive.clone();
        theirs.sort();
        r.check("matches_naive_class_enumeration", ours == theirs, format!("{} classes by full scan", naive.len()));
    }
    if name.starts_with("heisenberg") && level == 1 && kind == "conjugation" {
        let expected = (p * p + p - 1) as usize;
        r.check("heisenberg_class_count", orbits.len() == expected, format!("p^2 + p - 1 = {expected}"));
    }
    r.result("group", g.name());
    r.result("group_order", g.order());
    r.result("orbit_count", orbits.len());
    r.result("fixed_points", fixed);
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for o in &orbits {
        *hist.entry(o.points.len()).or_default() += 1;
    }
    r.result("orbit_size_histogram", hist.iter().map(|(k, v)| json!({"size": k, "count": v})).collect::<Vec<_>>());
    Ok(r)
}

/// The center of `F_p[G]` by class sums, against a commutant solve and the
/// nullspace route.
pub fn center(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("center", cfg);
    let (name, p, level, g) = named_group(cfg, "heisenberg3", 3)?;
    r.config("group", &name);
    r.config("p", p);
    r.config("level", level);
    let field = PrimeField::new(p)?;
    let t = Instant::now();
    let sums = center_group_algebra(&g, field, cfg.caps.group_order)?;
    r.time("class_sums", ms(t));
    let dim = sums.len();
    r.result("group", g.name());
    r.result("group_order", g.order());
    r.result("center_dim", dim);

    let module = PermutationModule::new(field, Arc::new(GAction::conjugation(g.clone())?));
    r.check(
        "class_sums_are_central",
        module.orbit_sums().iter().all(|s| module.is_invariant(s)),
        "every class sum is fixed by conjugation",
    );
    if g.order() <= cfg.caps.nullspace_cols {
        let rep = verify_finite_invariants(&module, cfg.caps.nullspace_cols)?;
        r.check(
            "class_sums_span_invariants",
            rep.pass,
            format!("orbit-sum dim {} vs nullspace dim {}", rep.orbit_sum_dim, rep.nullspace_dim),
        );
    }
    if g.order() * g.order() <= NAIVE_LIMIT {
        let naive = naive_conjugacy_classes(&g).len();
        r.result("naive_class_count", naive);
        r.check("matches_naive_class_count", naive == dim, format!("{naive} classes by full scan"));
    }
    if g.order() * g.order() <= cfg.caps.nullspace_cols {
        let t = Instant::now();
        let end = bimodule_end_dim(&g, field, cfg.caps.nullspace_cols)?;
        r.time("bimodule_commutant", ms(t));
        r.result("bimodule_end_dim", end);
        r.check("matches_bimodule_commutant", end == dim, format!("commutant dim {end}"));
    } else {
        r.result("bimodule_end_dim", Value::Null);
    }
    if g.is_abelian() {
        r.check("abelian_center_is_everything", dim == g.order(), format!("|G| = {}", g.order()));
    }
    if name.starts_with("heisenberg") && level == 1 {
        let expected = (p * p + p - 1) as usize;
        r.check("heisenberg_formula", dim == expected, format!("p^2 + p - 1 = {expected}"));
    }
    let mut table = Table::new("class_sizes", &["size", "count"]);
    let mut hist: BTreeMap<usize, usize> = BTreeMap::new();
    for s in &sums {
        *hist.entry(s.len_nonzero()).or_default() += 1;
    }
    for (k, v) in hist {
        table.push(vec![k.into(), v.into()]);
    }
    r.tables.push(table);
    Ok(r)
}

fn build_tower(cfg: &RunConfig, default_p: u32, default_depth: usize) -> Result<(String, u32, usize, TowerOfActions)> {
    let name = cfg.tower.clone().unwrap_or_else(|| "example".into());
    let p = cfg.p.unwrap_or(default_p);
    let depth = cfg.depth.unwrap_or(default_depth);
    let t = if name == "example" {
        example_tower(p, depth, cfg.caps.tower_points)?
    } else {
        conjugation_tower(&builtin_tower(&name, p, depth, cfg.caps.group_order)?)?
    };
    Ok((name, p, depth, t))
}

/// Checks the commuting square `pushforward ∘ υ = υ ∘ σ` on every orbit of
/// every level pair, and that `σ` vanishes exactly on collapsing orbits.
fn sigma_checks(r: &mut Report, t: &TowerOfActions, field: PrimeField) -> Result<()> {
    let p = field.p() as usize;
    let mut square_bad = None;
    let mut vanishing_bad = None;
    let mut pairs = 0;
    for n in t.first_level()..=t.depth() {
        for m in t.first_level()..=n {
            for c in 0..t.orbits(n)?.len() {
                pairs += 1;
                let mut e = vec![0; t.orbits(n)?.len()];
                e[c] = 1;
                let lhs = t.pushforward(field, n, m, &t.upsilon(field, n, &e)?)?;
                let rhs = t.upsilon(field, m, &t.sigma(field, n, m, &e)?)?;
                if lhs != rhs && square_bad.is_none() {
                    square_bad = Some(json!({"from": n, "to": m, "orbit": c}));
                }
                let factor = t.sigma_factor(n, m, c)?;
                let size = t.orbits(n)?.orbit(c).len();
                let image = t.orbits(m)?.orbit(t.project_orbit(n, m, c)?).len();
                let preserved = size == image;
                let nonzero = factor % p != 0;
                if nonzero != preserved && vanishing_bad.is_none() {
                    vanishing_bad = Some(json!({"from": n, "to": m, "orbit": c, "size": size, "image_size": image}));
                }
            }
        }
    }
    r.check_with(
        "sigma_square_commutes",
        square_bad.is_none(),
        format!("{pairs} (orbit, level pair) cases"),
        || square_bad.clone().unwrap_or(Value::Null),
    );
    r.check_with(
        "sigma_vanishes_iff_orbit_collapses",
        vanishing_bad.is_none(),
        format!("{pairs} (orbit, level pair) cases"),
        || vanishing_bad.clone().unwrap_or(Value::Null),
    );
    Ok(())
}

/// `σ`, persistence and the density identity on a tower.
pub fn tower_density(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("tower-density", cfg);
    let (name, p, depth, t) = build_tower(cfg, 2, 5)?;
    let field = PrimeField::new(p)?;
    let m = cfg.level.unwrap_or(t.first_level() + 1).max(t.first_level());
    r.config("tower", &name);
    r.config("p", p);
    r.config("depth", depth);
    r.config("level", m);
    if m > t.depth() {
        return Err(Error::LevelOutOfRange { level: m, depth: t.depth() });
    }
    let clock = Instant::now();
    sigma_checks(&mut r, &t, field)?;
    r.time("sigma", ms(clock));

    let clock = Instant::now();
    let mut table = Table::new("density", &["level", "horizon", "coherent_image_dim", "persistent_span_dim", "equal"]);
    let mut all_equal = true;
    let mut monotone = true;
    for lo in t.first_level()..=t.depth() {
        let mut previous: Option<Vec<usize>> = None;
        for hi in lo..=t.depth() {
            let persistent = persistent_orbits(&t, lo, hi)?;
            if let Some(prev) = &previous {
                monotone &= persistent.iter().all(|d| prev.contains(d));
            }
            previous = Some(persistent);
            if hi >= lo + 2 {
                let d = density_check(&t, field, lo, hi, cfg.caps.nullspace_cols)?;
                all_equal &= d.equal;
                table.push(vec![lo.into(), hi.into(), d.coherent_image_dim.into(), d.persistent_span_dim.into(), d.equal.into()]);
            }
        }
    }
    r.tables.push(table);
    r.check("density_all_pairs", all_equal, "coherent image = persistent span whenever horizon - level >= 2");
    r.check("persistence_monotone", monotone, "persistent orbits shrink as the horizon grows");
    let main = density_check(&t, field, m, t.depth(), cfg.caps.nullspace_cols)?;
    r.check(
        "density",
        main.equal,
        format!(
            "level {m}, horizon {}: dims {} and {}",
            t.depth(),
            main.coherent_image_dim,
            main.persistent_span_dim
        ),
    );
    if name == "example" && m < t.depth() {
        let expected: Vec<usize> = (0..=m).collect();
        r.check(
            "example_persistent_orbits",
            main.persistent_orbits == expected,
            format!("persistent orbits at level {m} are Y_{m}(0..={m})"),
        );
    }
    r.time("density", ms(clock));
    r.result("density", &main);
    r.result("tower", t.to_document().levels.iter().map(|l| json!({"level": l.level, "points": l.points.len(), "orbits": l.orbits.len()})).collect::<Vec<_>>());
    Ok(r)
}

/// The coherent point with unbounded orbits and its bounded approximants.
pub fn nonclosed_delta(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("nonclosed-delta", cfg);
    let p = cfg.p.unwrap_or(2);
    let depth = cfg.depth.unwrap_or(4);
    r.config("p", p);
    r.config("depth", depth);
    let t = example_tower(p, depth, cfg.caps.tower_points)?;
    let w = nonclosed_delta_witness(&t)?;
    let expected: Vec<usize> = (0..=depth as u32).map(|n| (p as usize).pow(n)).collect();
    r.check_with(
        "orbit_sizes_are_powers_of_p",
        w.orbit_sizes == expected,
        format!("sizes {:?}", w.orbit_sizes),
        || json!({"sizes": w.orbit_sizes, "expected": expected}),
    );
    r.check("orbit_sizes_strictly_increase", w.strictly_increasing, "z has unbounded orbit sizes");
    let mut all_persistent = true;
    for a in &w.approximants {
        let top = t.orbits(depth)?;
        let y = t.level(depth)?.point_index(&crate::gsets::Elem::parse(&a.point)?).expect("approximant point");
        let d = t.orbits(a.level)?.orbit_of(t.project_point(depth, a.level, y)?);
        all_persistent &= persistent_orbits(&t, a.level, depth)?.contains(&d) && top.orbit(top.orbit_of(y)).len() == a.orbit_size;
    }
    r.check(
        "approximants_match_images",
        w.approximants.iter().all(|a| a.image_matches && a.size_preserved),
        "each level has a point of bounded orbit with the same image",
    );
    r.check("approximants_are_persistent", all_persistent, "their orbits are persistent up to the top level");
    let mut table = Table::new("witness", &["level", "z", "orbit_size", "approximant", "approximant_orbit_size"]);
    for (n, a) in w.approximants.iter().enumerate() {
        table.push(vec![a.level.into(), w.z[n].clone().into(), w.orbit_sizes[n].into(), a.point.clone().into(), a.orbit_size.into()]);
    }
    r.tables.push(table);
    r.result("witness", &w);
    Ok(r)
}

/// Images of twisted fixed spaces pushed down a group tower.
pub fn twisted_stab(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("twisted-stab", cfg);
    let name = cfg.tower.clone().unwrap_or_else(|| "heisenberg3".into());
    let p = cfg.p.unwrap_or(3);
    let depth = cfg.depth.unwrap_or(3);
    let m = cfg.level.unwrap_or(1);
    let w_desc = cfg.w.clone().unwrap_or_else(|| "identity".into());
    r.config("tower", &name);
    r.config("p", p);
    r.config("depth", depth);
    r.config("level", m);
    r.config("w", &w_desc);
    let field = PrimeField::new(p)?;
    let tower = builtin_tower(&name, p, depth, cfg.caps.group_order)?;
    let w = Conjugator::parse(&tower, &w_desc)?;
    r.result("is_pro_p", tower.is_pro_p());

    let is_identity = w.per_level == Conjugator::identity(&tower).per_level;
    let clock = Instant::now();
    let report = twisted_stabilization(&tower, &w, m, depth, field)?;
    r.time("stabilization", ms(clock));
    r.check("image_chain_descends", report.descending, format!("image dims {:?}", report.image_dims));

    let mut table = Table::new("chain", &["level", "u_w_order", "fixed_dim", "image_dim", "direct_check", "orbit_centralizer", "meets_scalar_coset"]);
    for (i, n) in (m..=depth).enumerate() {
        let clock = Instant::now();
        let oc = orbit_centralizer_check(&tower, n, &w)?;
        r.time(&format!("orbit_centralizer_{n}"), ms(clock));
        r.check_with(
            format!("orbit_centralizer_level_{n}"),
            oc.pass,
            format!("{} points, |U_w| = {}", oc.points_checked, oc.u_w_order),
            || json!({"level": n, "point": oc.counterexample}),
        );
        let fixed = twisted_fixed_space(&tower, n, &w, field, cfg.caps.nullspace_cols)?;
        match fixed.direct_check {
            Some(ok) => {
                r.check(format!("direct_solve_level_{n}"), ok, format!("orbit sums vs linear condition, dim {}", fixed.dim));
            }
            None => r.result(&format!("direct_solve_level_{n}"), "skipped: above the nullspace cap, orbit route only"),
        }
        if report.fixed_dims[i] != fixed.dim {
            r.check(format!("fixed_dim_consistent_level_{n}"), false, "stabilization and fixed-space runs disagree");
        }
        table.push(vec![
            n.into(),
            oc.u_w_order.into(),
            fixed.dim.into(),
            report.image_dims[i].into(),
            json!(fixed.direct_check),
            oc.pass.into(),
            json!(report.meets_scalar_coset[i]),
        ]);
        if is_identity {
            r.check(format!("center_is_fixed_locus_level_{n}"), center_is_fixed_locus(&tower, n)?, "Z(U_n) = points fixed by all of U_n");
        }
    }
    r.tables.push(table);

    match (report.stabilization_level, report.stable_is_center_span, report.stable_is_zero) {
        (Some(level), Some(center), Some(zero)) => {
            if is_identity {
                r.check(
                    "stable_image_is_center",
                    center,
                    format!("stable at level {level}, dim {} vs |Z(U_{m})| = {}", report.stable_dim.unwrap_or_default(), report.center_order),
                );
            }
            if report.meets_scalar_coset.iter().all(|x| *x == Some(false)) {
                r.check("stable_image_is_zero", zero, format!("stable at level {level}, dim {}", report.stable_dim.unwrap_or_default()));
            }
        }
        _ => r.result("inconclusive", "no two consecutive equal images within the horizon"),
    }
    r.result("stabilization", &report);
    Ok(r)
}

/// The Ω dimension identity for a pair `U <= G`.
pub fn mackey_dim(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("mackey-dim", cfg);
    let g_name = cfg.g.clone().unwrap_or_else(|| "s3".into());
    let u_name = cfg.u.clone().unwrap_or_else(|| "a3".into());
    let p = cfg.p.unwrap_or(3);
    let level = cfg.level.unwrap_or(1);
    r.config("g", &g_name);
    r.config("u", &u_name);
    r.config("p", p);
    r.config("level", level);
    let g = Arc::new(catalog::group_by_name(&g_name, p as i64, level as u32)?);
    let u = Arc::new(catalog::subgroup_by_name(&g, &g_name, &u_name)?);
    omega_into(&mut r, &g, &u, p, cfg)?;
    Ok(r)
}

fn omega_into(r: &mut Report, g: &Arc<GroupModel>, u: &Arc<GroupModel>, p: u32, cfg: &RunConfig) -> Result<()> {
    let clock = Instant::now();
    let o = omega_dimension_check(g, u, p, cfg.caps.nullspace_cols)?;
    r.time("omega", ms(clock));
    r.check_with(
        "omega_dimension_equality",
        o.equal,
        format!("commutant {} vs sum {}", o.commutant_dim, o.sum_fixed_dims),
        || json!({"per_rep": o.per_rep, "commutant_dim": o.commutant_dim}),
    );
    r.check("double_cosets_cover", o.covers, format!("{} double cosets", o.per_rep.len()));
    r.check(
        "double_coset_index_identity",
        o.per_rep.iter().all(|x| x.index_identity),
        "|UwU| * |U_w| = |U|^2 for every representative",
    );
    r.check(
        "twisted_direct_solves",
        o.per_rep.iter().all(|x| x.direct_check != Some(false)),
        "orbit sums agree with the linear condition for every w",
    );
    r.check("iota_equivariant", o.iota_equivariant, "extension by zero commutes with U on both sides");
    if let Some(s) = &o.spot_check {
        r.check(
            "omega_explicit_map",
            s.injective && s.lands_in_fixed_spaces,
            format!("{} endomorphisms restricted to w U", s.endomorphisms),
        );
    }
    let mut table = Table::new("reps", &["rep", "double_coset_size", "u_w_order", "fixed_dim"]);
    for x in &o.per_rep {
        table.push(vec![x.rep.clone().into(), x.double_coset_size.into(), x.u_w_order.into(), x.fixed_dim.into()]);
    }
    r.tables.push(table);
    r.result("omega", &o);
    Ok(())
}

fn zhat_spec_names(cfg: &RunConfig) -> Vec<String> {
    match cfg.spec.as_deref() {
        None | Some("all") => vec!["a2-z4".into(), "qp-units".into()],
        Some(s) => vec![s.into()],
    }
}

/// Arithmetic in the truncated completed group rings of the built-in specs.
pub fn zhat(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("zhat", cfg);
    let max_level = cfg.level.unwrap_or(3);
    let samples = cfg.samples.unwrap_or(200);
    let p_qp = cfg.p.unwrap_or(3);
    r.config("spec", cfg.spec.clone().unwrap_or_else(|| "all".into()));
    r.config("level", max_level);
    r.config("samples", samples);
    r.config("p", p_qp);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new("remark_iso", &["spec", "level", "basis_size", "pairs_checked", "mismatches"]);
    for name in zhat_spec_names(cfg) {
        let spec = Arc::new(ZSpec::builtin(&name, p_qp, max_level, cfg.caps.group_order)?);
        let p = spec.field().p();
        let clock = Instant::now();
        for m in 1..=max_level {
            let iso = remark_iso_check(&spec, m, 2)?;
            table.push(vec![name.clone().into(), m.into(), iso.basis_size.into(), iso.pairs_checked.into(), iso.mismatches.into()]);
            r.check_with(
                format!("{name}/remark_iso_level_{m}"),
                iso.pass,
                format!("{} basis elements", iso.basis_size),
                || json!({"first_mismatch": iso.first_mismatch}),
            );
            r.check(
                format!("{name}/degree_zero_subring_level_{m}"),
                degree_zero_is_group_algebra(&spec, m)?,
                "A-degree 0 multiplies as Z_0/Z_m",
            );
        }
        r.time(&format!("{name}/remark_iso"), ms(clock));

        let clock = Instant::now();
        let (mut frob_ok, mut hom_ok, mut unital_ok) = (true, true, true);
        let mut first_bad: Option<Value> = None;
        for _ in 0..samples {
            let m = rng.gen_range(1..=max_level);
            let m2 = rng.gen_range(1..=m);
            let x = ZhatElement::random(&spec, m, &mut rng, 4, 2)?;
            let y = ZhatElement::random(&spec, m, &mut rng, 4, 2)?;
            let frob = x.add(&y)?.pow(p as u64) == x.pow(p as u64).add(&y.pow(p as u64))?;
            let hom = x.mul(&y)?.reduce(m2)? == x.reduce(m2)?.mul(&y.reduce(m2)?)?
                && x.add(&y)?.reduce(m2)? == x.reduce(m2)?.add(&y.reduce(m2)?)?;
            let unital = ZhatElement::one(&spec, m)?.reduce(m2)? == ZhatElement::one(&spec, m2)?;
            if !(frob && hom && unital) && first_bad.is_none() {
                first_bad = Some(json!({"x": x.to_json(), "y": y.to_json(), "target_level": m2}));
            }
            frob_ok &= frob;
            hom_ok &= hom;
            unital_ok &= unital;
        }
        r.time(&format!("{name}/random"), ms(clock));
        let cx = first_bad.clone().unwrap_or(Value::Null);
        r.check_with(format!("{name}/frobenius"), frob_ok, format!("(x+y)^{p} = x^{p} + y^{p} on {samples} pairs"), || cx.clone());
        r.check_with(format!("{name}/reduce_is_ring_hom"), hom_ok && unital_ok, format!("{samples} random pairs"), || cx.clone());
        if spec.free_rank() > 0 {
            let pi = ZhatElement::pi(&spec, 1)?;
            r.check(
                format!("{name}/uniformizer_invertible"),
                pi.mul(&ZhatElement::pi_inv(&spec, 1)?)? == ZhatElement::one(&spec, 1)?,
                "π · π^-1 = 1",
            );
            let g = spec.level_group(1)?;
            let gen = g.generators().first().copied().unwrap_or(g.identity());
            let x = ZhatElement::one(&spec, 1)?.add(&ZhatElement::monomial(&spec, 1, &[1], gen, 1)?)?;
            r.result(&format!("{name}/example"), json!({"x": x.to_string(), format!("x^{p}"): x.pow(p as u64).to_string()}));
        }
        for m in 1..=max_level {
            let f = faithfulness_check(spec.level_group(m)?, p, cfg.caps.nullspace_cols)?;
            r.check(
                format!("{name}/faithful_level_{m}"),
                f.pass,
                format!("annihilator {} and endomorphisms {} for |Z'| = {}", f.module_annihilator_dim, f.endomorphism_dim, f.order),
            );
        }
    }
    for (label, g, p) in [("Z/4", catalog::cyclic(4)?, 2u32), ("(Z/9)^x", catalog::units(9)?, 3)] {
        let f = faithfulness_check(&Arc::new(g), p, cfg.caps.nullspace_cols)?;
        r.check(
            format!("faithfulness/{label}"),
            f.pass && f.endomorphism_dim == f.order,
            format!("endomorphism dim {}", f.endomorphism_dim),
        );
    }
    r.tables.push(table);
    Ok(r)
}

/// Randomized checks of the linear algebra and coefficient rings.
fn coeff_sweep(r: &mut Report, rng: &mut ChaCha8Rng, cfg: &RunConfig) -> Result<()> {
    let mut ok = true;
    let mut rank_nullity = true;
    for _ in 0..40 {
        let p = *[2u32, 3, 5, 7].choose(rng).unwrap();
        let field = PrimeField::new(p)?;
        let (rows, cols) = (rng.gen_range(1..=20), rng.gen_range(1..=20));
        let mut entries: Vec<(usize, usize, i64)> = Vec::new();
        for i in 0..rows {
            for j in 0..cols {
                if rng.gen_bool(0.3) {
                    entries.push((i, j, rng.gen_range(1..p as i64)));
                }
            }
        }
        let m = SparseMatrix::from_entries(field, rows, cols, entries)?;
        let kernel = nullspace(&m, cfg.caps.nullspace_cols)?;
        ok &= kernel.iter().all(|v| m.mul_dense(&v.to_dense(cols)).iter().all(|&x| x == 0));
        rank_nullity &= kernel.len() + rank(&m, cfg.caps.nullspace_cols)? == cols;
    }
    r.check("coeff/nullspace_vectors_are_in_kernel", ok, "40 random sparse matrices");
    r.check("coeff/rank_nullity", rank_nullity, "40 random sparse matrices");
    let mut frob = true;
    let mut char_p = true;
    for _ in 0..40 {
        let p = *[2u32, 3, 5].choose(rng).unwrap();
        let field = PrimeField::new(p)?;
        let orders: Vec<u32> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(1..=6)).collect();
        let random = |rng: &mut ChaCha8Rng| {
            let terms: Vec<(Vec<i64>, i64)> = (0..rng.gen_range(0..=5))
                .map(|_| (orders.iter().map(|&n| rng.gen_range(0..n as i64)).collect(), rng.gen_range(0..p as i64)))
                .collect();
            AbelianGroupAlgebraElem::from_terms(field, orders.clone(), &terms)
        };
        let (x, y) = (random(rng), random(rng));
        frob &= x.ring_add(&y).ring_pow(p as u64) == x.ring_pow(p as u64).ring_add(&y.ring_pow(p as u64));
        char_p &= (0..p).fold(x.zero_like(), |acc, _| acc.ring_add(&x)).is_zero();
    }
    r.check("coeff/frobenius", frob, "40 random pairs in F_p[A]");
    r.check("coeff/characteristic_p", char_p, "p copies of x sum to 0");
    Ok(())
}

/// Random actions: orbit-stabilizer, stable refinements, fixed points and
/// the orbit-sum basis of the invariants.
fn action_sweep(r: &mut Report, rng: &mut ChaCha8Rng, cfg: &RunConfig, count: usize) -> Result<()> {
    let pool = catalog::small_groups();
    let (mut orbit_stab, mut refine_ok, mut congruence, mut invariants_ok) = (true, true, true, true);
    let mut first_bad: Option<Value> = None;
    for i in 0..count {
        let action = catalog::random_action(rng, &pool, 64)?;
        let g = action.group().clone();
        for o in action.orbits() {
            orbit_stab &= o.points.len() * o.stabilizer_order == g.order();
        }
        let labels: Vec<usize> = (0..action.num_points()).map(|_| rng.gen_range(0..3)).collect();
        let part = PartitionOfSet::from_labels(&labels);
        let refined = stable_refinement(&action, &part)?;
        refine_ok &= is_stable(&action, &refined) && refined.refines(&part);
        let p = *[2u32, 3, 5].choose(rng).unwrap();
        if g.is_p_group(p) {
            congruence &= (action.num_points() - action.fixed_points().len()) % p as usize == 0;
        }
        let module = PermutationModule::new(PrimeField::new(p)?, Arc::new(action.clone()));
        let rep = verify_finite_invariants(&module, cfg.caps.nullspace_cols)?;
        if !rep.pass && first_bad.is_none() {
            first_bad = Some(json!({
                "sample": i,
                "group": g.name(),
                "p": p,
                "points": action.points().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
            }));
        }
        invariants_ok &= rep.pass;
    }
    r.check("gsets/orbit_stabilizer", orbit_stab, format!("{count} random actions"));
    r.check("gsets/stable_refinement", refine_ok, format!("{count} random partitions"));
    r.check("gsets/p_group_congruence", congruence, "|Y| = |Y^G| mod p whenever G is a p-group");
    r.check_with(
        "permmod/finite_invariants_bijection",
        invariants_ok,
        format!("{count} random actions, p in {{2,3,5}}"),
        || first_bad.clone().unwrap_or(Value::Null),
    );
    Ok(())
}

fn coherence_sweep(r: &mut Report, rng: &mut ChaCha8Rng, t: &TowerOfActions, field: PrimeField, count: usize) -> Result<()> {
    let p = field.p();
    let mut agree = true;
    let mut coherent = 0;
    for i in 0..count {
        let top: Vec<u32> = (0..t.orbits(t.depth())?.len()).map(|_| rng.gen_range(0..p)).collect();
        let mut fam = InvariantFamily::induced_from_top(t, field, &top)?;
        if i % 2 == 1 {
            let level = rng.gen_range(0..fam.coords.len());
            let idx = rng.gen_range(0..fam.coords[level].len());
            fam.coords[level][idx] = rng.gen_range(0..p);
        }
        if i % 5 == 4 {
            for c in fam.coords.iter_mut() {
                for x in c.iter_mut() {
                    *x = rng.gen_range(0..p);
                }
            }
        }
        let a = check_coherence(t, field, &fam)?;
        let b = check_sigma_compatibility(t, field, &fam)?;
        agree &= a == b;
        coherent += usize::from(a);
    }
    r.check(
        "towers/coherence_criterion_agrees",
        agree,
        format!("{count} families, {coherent} coherent"),
    );
    Ok(())
}

/// Every experiment plus randomized sweeps, under one seed.
pub fn verify_all(cfg: &RunConfig) -> Result<Report> {
    let mut r = start("verify-all", cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let sub = |f: fn(&RunConfig) -> Result<Report>, c: RunConfig| f(&RunConfig { caps: cfg.caps, seed: cfg.seed, record_timings: cfg.record_timings, ..c });

    let clock = Instant::now();
    coeff_sweep(&mut r, &mut rng, cfg)?;
    action_sweep(&mut r, &mut rng, cfg, 50)?;
    r.time("sweeps", ms(clock));

    for (label, group, p) in [("s3", "s3", 3), ("d4", "d4", 2), ("q8", "q8", 2), ("h2", "heisenberg3", 2), ("h3", "heisenberg3", 3)] {
        let c = RunConfig { group: Some(group.into()), p: Some(p), level: Some(1), ..Default::default() };
        r.absorb(&format!("orbits/{label}"), sub(orbits, c.clone())?);
        r.absorb(&format!("center/{label}"), sub(center, c)?);
    }
    let pool = catalog::small_groups();
    let mut agree = true;
    for g in pool.iter().filter(|g| g.order() <= 48) {
        for p in [2u32, 3] {
            let field = PrimeField::new(p)?;
            let classes = center_group_algebra(&Arc::new(g.clone()), field, cfg.caps.group_order)?.len();
            agree &= classes == bimodule_end_dim(g, field, cfg.caps.nullspace_cols)?;
        }
    }
    r.check("permmod/center_matches_commutant_on_pool", agree, "all pool groups of order <= 48, p in {2,3}");

    for (p, depth) in [(2u32, 5usize), (3, 5)] {
        let c = RunConfig { tower: Some("example".into()), p: Some(p), depth: Some(depth), level: Some(1), ..Default::default() };
        r.absorb(&format!("tower-density/example-p{p}"), sub(tower_density, c)?);
    }
    let c = RunConfig { tower: Some("heisenberg3".into()), p: Some(3), depth: Some(2), level: Some(1), ..Default::default() };
    r.absorb("tower-density/heisenberg3", sub(tower_density, c)?);
    let ex = example_tower(2, 5, cfg.caps.tower_points)?;
    coherence_sweep(&mut r, &mut rng, &ex, PrimeField::new(2)?, 100)?;
    for (p, depth) in [(2u32, 4usize), (3, 3)] {
        let c = RunConfig { p: Some(p), depth: Some(depth), ..Default::default() };
        r.absorb(&format!("nonclosed-delta/p{p}"), sub(nonclosed_delta, c)?);
    }

    for w in ["identity", "diag(1,2,4)"] {
        let c = RunConfig { tower: Some("heisenberg3".into()), p: Some(3), depth: Some(2), level: Some(1), w: Some(w.into()), ..Default::default() };
        r.absorb(&format!("twisted-stab/heisenberg3/{w}"), sub(twisted_stab, c)?);
    }
    let c = RunConfig { tower: Some("cyclic".into()), p: Some(2), depth: Some(3), level: Some(1), w: Some("identity".into()), ..Default::default() };
    r.absorb("twisted-stab/cyclic", sub(twisted_stab, c)?);

    for (g, u, p) in [("s3", "a3", 3u32), ("d4", "center", 2), ("heisenberg3", "hx", 3), ("s3", "c2", 2), ("s3", "trivial", 3)] {
        let c = RunConfig { g: Some(g.into()), u: Some(u.into()), p: Some(p), level: Some(1), ..Default::default() };
        r.absorb(&format!("mackey-dim/{g}-{u}"), sub(mackey_dim, c)?);
    }
    let s3 = catalog::symmetric(3)?;
    let c2 = catalog::subgroup_by_name(&s3, "s3", "c2")?;
    let d = double_cosets(&s3, &c2)?;
    let mut sizes: Vec<usize> = d.cosets.iter().map(|c| c.elements.len()).collect();
    sizes.sort_unstable();
    r.check("mackey/double_cosets_s3_c2", sizes == vec![2, 4], format!("sizes {sizes:?}"));

    let c = RunConfig { level: Some(3), samples: Some(200), ..Default::default() };
    r.absorb("zhat", sub(zhat, c)?);

    r.result(
        "operations_exercised",
        [
            "coeff::nullspace", "coeff::convolve", "gsets::enumerate_group", "gsets::orbits", "gsets::stable_refinement",
            "gsets::is_stable", "permmod::invariants", "permmod::orbit_sums", "permmod::verify_finite_invariants",
            "permmod::center_group_algebra", "permmod::bimodule_end_dim", "towers::sigma", "towers::check_coherence",
            "towers::persistent_orbits", "towers::density_check", "towers::example_tower", "towers::nonclosed_delta_witness",
            "twisted::u_w_subgroup", "twisted::twisted_action", "twisted::twisted_fixed_space",
            "twisted::orbit_centralizer_check", "twisted::twisted_stabilization", "twisted::builtin_tower",
            "mackey::double_cosets", "mackey::induced_bimodule", "mackey::commutant_dim", "mackey::omega_dimension_check",
            "zhat::zhat_mul", "zhat::zhat_reduce", "zhat::remark_iso_check", "zhat::faithfulness_check",
        ],
    );
    r.result("assertion_count", r.assertions.len());
    Ok(r)
}
