//! Experiment drivers: a config in, tables out. No file IO happens here.

use std::path::{Path, PathBuf};

use log::{debug, info};
use rayon::prelude::*;
use singspec_core::analysis::{
    abel_reconstruct, free_dirichlet_box, geometric_times, linear_radii, loglog_slope, mollifier_sweep_1d, sandwich_check,
    subordination_estimate, weyl_leading, weyl_profile, CountingFunction, Eigensystem,
};
use singspec_core::femnd::{assemble_forms, attach_flux, lowest_eigenpairs, mesh_disk, Space};
use singspec_core::potentials::{
    admissibility_field, admissibility_primitive, Grid1D, MollifiedFamily, Primitive1D, QuadratureSpec, TheoremTag,
};
use singspec_core::quasi1d::{eigenvalues_complex, eigenvalues_selfadjoint, galerkin_1d, galerkin_eigenvalues, BoundaryCondition1D, Spectrum1D};
use singspec_core::C64;

use crate::config::{
    parse_bc1d, parse_space, Abel, Admissible, Cauchy2d, Check, Converge, Datum, EngineChoice, Experiment, ExperimentConfig,
    GalerkinOrder, Geometry, Sandwich, Solve1d, Solve2d, Subord, Weyl,
};
use crate::error::{AppError, AppResult};
use crate::output::{Cell, Report, Table};
use crate::potential::{DomainSpec, PotentialSpec};

/// Where relative potential paths resolve, and the `--seed` override.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub base: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl Context {
    fn base(&self) -> Option<&Path> {
        self.base.as_deref()
    }
}

/// Seed in effect: the flag wins over the config.
pub fn effective_seed(cfg: &ExperimentConfig, ctx: &Context) -> Option<u64> {
    ctx.seed.or(cfg.seed)
}

pub fn run(cfg: &ExperimentConfig, ctx: &Context) -> AppResult<Report> {
    info!("running {} ({})", cfg.stem(), cfg.experiment.kind());
    match &cfg.experiment {
        Experiment::Solve1d(e) => solve1d(e, ctx),
        Experiment::GalerkinOrder(e) => galerkin_order(e, ctx),
        Experiment::Solve2d(e) => solve2d(e, ctx),
        Experiment::Cauchy2d(e) => cauchy2d(e, ctx),
        Experiment::Weyl(e) => weyl(e),
        Experiment::Sandwich(e) => sandwich(e, ctx),
        Experiment::Converge(e) => converge(e, ctx),
        Experiment::Abel(e) => abel(e, ctx),
        Experiment::Subord(e) => {
            let seed = effective_seed(cfg, ctx).ok_or_else(|| AppError::config("seed: subord needs a seed (config `seed` or --seed)"))?;
            subord(e, seed, ctx)
        }
        Experiment::Admissible(e) => admissible(e, ctx),
    }
}

fn positive(name: &str, n: usize) -> AppResult<()> {
    if n == 0 {
        return Err(AppError::config(format!("{name}: must be at least 1")));
    }
    Ok(())
}

fn primitive(src: &crate::potential::PotentialSource, ctx: &Context) -> AppResult<Primitive1D> {
    src.load(ctx.base())?.primitive()
}

/// Uniform mesh on the potential's interval with every jump site as a node.
fn mesh_for(u: &Primitive1D, cells: usize) -> AppResult<Grid1D> {
    let sites: Vec<f64> = u.jumps().iter().map(|j| j.site).collect();
    Ok(Grid1D::uniform_with(u.a(), u.b(), cells, &sites)?)
}

fn zero_like(u: &Primitive1D) -> AppResult<Primitive1D> {
    Ok(Primitive1D::zero(Grid1D::uniform(u.a(), u.b(), 2)?))
}

fn spectrum_1d(u: &Primitive1D, bc: &BoundaryCondition1D, engine: EngineChoice, count: usize, cells: usize) -> AppResult<Spectrum1D> {
    let selfadjoint = u.is_real() && bc.is_real();
    Ok(match engine {
        EngineChoice::Auto if selfadjoint => eigenvalues_selfadjoint(u, bc, count)?,
        EngineChoice::Auto => eigenvalues_complex(u, bc, count, cells)?,
        EngineChoice::Shooting if selfadjoint => eigenvalues_selfadjoint(u, bc, count)?,
        EngineChoice::Shooting => return Err(AppError::config("engine: shooting needs a real potential and real boundary condition")),
        EngineChoice::Galerkin => galerkin_eigenvalues(u, bc, &mesh_for(u, cells)?, count)?,
    })
}

fn eigen_table(values: &[C64], residuals: &[f64]) -> Table {
    let mut t = Table::new("eigenvalues", &["index", "re", "im", "residual"]);
    for (i, z) in values.iter().enumerate() {
        t.push(vec![i.into(), z.re.into(), z.im.into(), residuals.get(i).copied().unwrap_or(f64::NAN).into()]);
    }
    t
}

/// Relative errors against `check`, recorded as footers and failures.
fn apply_check(report: &mut Report, table: usize, values: &[C64], check: &Option<Check>) {
    let Some(check) = check else { return };
    let mut worst = 0.0f64;
    for (i, &e) in check.expected.iter().enumerate() {
        let got = values.get(i).map_or(f64::NAN, |z| z.re);
        let err = if e == 0.0 { got.abs() } else { ((got - e) / e).abs() };
        worst = if err.is_nan() { f64::NAN } else { worst.max(err) };
    }
    let t = &mut report.tables[table];
    t.note("check_max_rel_error", worst);
    t.note("check_rel_tol", check.rel_tol);
    if !(worst <= check.rel_tol) {
        report.failures.push(format!("eigenvalue check: max relative error {worst:.3e} above {:.3e}", check.rel_tol));
    }
}

fn solve1d(e: &Solve1d, ctx: &Context) -> AppResult<Report> {
    positive("count", e.count)?;
    let u = primitive(&e.potential, ctx)?;
    let bc = parse_bc1d(&e.bc)?;
    let s = spectrum_1d(&u, &bc, e.engine, e.count, e.cells)?;
    let mut report = Report::new("solve1d");
    let mut t = eigen_table(&s.eigenvalues, &s.residuals);
    t.note("engine", format!("{:?}", s.engine).to_lowercase().as_str());
    report.tables.push(t);
    apply_check(&mut report, 0, &s.eigenvalues, &e.check);
    if s.site_checks.iter().any(|c| !c.is_empty()) {
        let mut sites = Table::new("sites", &["index", "site", "y_mismatch", "y1_mismatch", "jump_error"]);
        let (mut y1_worst, mut jump_worst) = (0.0f64, 0.0f64);
        for (i, checks) in s.site_checks.iter().enumerate() {
            for c in checks {
                y1_worst = y1_worst.max(c.y1_mismatch);
                jump_worst = jump_worst.max(c.jump_error());
                sites.push(vec![i.into(), c.site.into(), c.y_mismatch.into(), c.y1_mismatch.into(), c.jump_error().into()]);
            }
        }
        sites.note("max_y1_mismatch", y1_worst);
        sites.note("max_jump_error", jump_worst);
        report.tables.push(sites);
    }
    Ok(report)
}

fn galerkin_order(e: &GalerkinOrder, ctx: &Context) -> AppResult<Report> {
    positive("count", e.count)?;
    if e.meshes.len() < 2 {
        return Err(AppError::config("meshes: need at least two meshes"));
    }
    let u = primitive(&e.potential, ctx)?;
    let bc = parse_bc1d(&e.bc)?;
    let reference = spectrum_1d(&u, &bc, EngineChoice::Auto, e.count, 400)?.eigenvalues;
    let runs: Vec<AppResult<(f64, Vec<C64>)>> = e
        .meshes
        .par_iter()
        .map(|&cells| {
            let mesh = mesh_for(&u, cells)?;
            let s = galerkin_eigenvalues(&u, &bc, &mesh, e.count)?;
            debug!("galerkin mesh {cells} done");
            Ok((mesh.max_width(), s.eigenvalues))
        })
        .collect();
    let mut cols = vec!["cells".to_string(), "h".to_string()];
    cols.extend((0..e.count).map(|i| format!("rel_error_{i}")));
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("errors", &col_refs);
    let mut hs = Vec::new();
    let mut errs = vec![Vec::new(); e.count];
    for (&cells, run) in e.meshes.iter().zip(runs) {
        let (h, vals) = run?;
        let mut row: Vec<Cell> = vec![cells.into(), h.into()];
        for (i, (v, r)) in vals.iter().zip(&reference).enumerate() {
            let err = (v - r).norm() / r.norm().max(f64::MIN_POSITIVE);
            errs[i].push(err);
            row.push(err.into());
        }
        hs.push(h);
        t.push(row);
    }
    let mut orders = Vec::new();
    for (i, err) in errs.iter().enumerate() {
        let p = loglog_slope(&hs, err).unwrap_or(f64::NAN);
        t.note(&format!("order_{i}"), p);
        orders.push(p);
    }
    t.note("order_min", orders.iter().copied().fold(f64::INFINITY, f64::min));
    t.note("order_max", orders.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let mut report = Report::new("galerkin-order");
    let mut refs = eigen_table(&reference, &[]);
    refs.name = "reference".into();
    report.tables.push(refs);
    report.tables.push(t);
    Ok(report)
}

fn field_of(src: &Option<crate::potential::PotentialSource>, ctx: &Context) -> AppResult<Option<singspec_core::potentials::VectorField>> {
    src.as_ref().map(|s| s.load(ctx.base())?.field()).transpose()
}

fn solve2d(e: &Solve2d, ctx: &Context) -> AppResult<Report> {
    positive("count", e.count)?;
    let domain = DomainSpec::parse(&e.domain)?;
    let space = parse_space(&e.bc)?;
    let field = field_of(&e.potential, ctx)?;
    let mesh = domain.mesh()?;
    let forms = assemble_forms(&mesh, field.as_ref(), space)?;
    let mut s = lowest_eigenpairs(&forms, e.count)?;
    if space == Space::Neumann {
        attach_flux(&mesh, &forms, &mut s, field.as_ref())?;
    }
    let mut t = eigen_table(&s.eigenvalues, &s.residuals);
    if !s.flux.is_empty() {
        t.columns.push("flux".into());
        for (row, f) in t.rows.iter_mut().zip(&s.flux) {
            row.push((*f).into());
        }
    }
    t.note("vertices", mesh.vertices.len());
    t.note("triangles", mesh.triangles.len());
    t.note("max_edge", mesh.max_edge());
    t.note("hermitian", s.hermitian);
    let mut report = Report::new("solve2d");
    report.tables.push(t);
    apply_check(&mut report, 0, &s.eigenvalues, &e.check);
    Ok(report)
}

fn cauchy2d(e: &Cauchy2d, ctx: &Context) -> AppResult<Report> {
    positive("count", e.count)?;
    if e.levels.len() < 2 {
        return Err(AppError::config("levels: need at least two refinement levels"));
    }
    let field = e.potential.load(ctx.base())?.field()?;
    let runs: Vec<AppResult<(usize, f64, f64, Vec<C64>)>> = e
        .levels
        .par_iter()
        .map(|&level| {
            let mesh = mesh_disk(e.radius, level)?;
            let forms = assemble_forms(&mesh, Some(&field), Space::Dirichlet)?;
            let total = forms.total();
            let defect = total.hermitian_defect();
            let s = lowest_eigenpairs(&forms, e.count)?;
            debug!("disk level {level}: {} unknowns", forms.dim());
            Ok((mesh.vertices.len(), mesh.max_edge(), defect, s.eigenvalues))
        })
        .collect();
    let mut cols = vec!["level".to_string(), "vertices".into(), "max_edge".into(), "hermitian_defect".into()];
    cols.extend((0..e.count).map(|i| format!("lambda_{i}")));
    cols.push("rel_change".into());
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("levels", &col_refs);
    let mut prev: Option<Vec<C64>> = None;
    let mut last_change = f64::NAN;
    let mut worst_defect = 0.0f64;
    for (&level, run) in e.levels.iter().zip(runs) {
        let (nv, h, defect, vals) = run?;
        worst_defect = worst_defect.max(defect);
        let change = match &prev {
            Some(p) => p.iter().zip(&vals).map(|(a, b)| (b - a).norm() / b.norm()).fold(0.0, f64::max),
            None => f64::NAN,
        };
        let mut row: Vec<Cell> = vec![level.into(), nv.into(), h.into(), defect.into()];
        row.extend(vals.iter().map(|z| Cell::from(z.re)));
        row.push(change.into());
        t.push(row);
        last_change = change;
        prev = Some(vals);
    }
    t.note("last_rel_change", last_change);
    t.note("max_hermitian_defect", worst_defect);
    let mut report = Report::new("cauchy2d");
    report.tables.push(t);
    Ok(report)
}

fn weyl(e: &Weyl) -> AppResult<Report> {
    positive("points", e.points)?;
    if !(e.r_max > 0.0) {
        return Err(AppError::config("r_max: must be positive"));
    }
    let radii = linear_radii(e.r_max / e.points as f64, e.r_max, e.points);
    // resolve twice the range so every radius is well inside the computed spectrum
    let limit = 2.0 * e.r_max / singspec_core::analysis::RESOLVED_FRACTION;
    let mut report = Report::new("weyl");
    let (dim, volume, values, len) = match e.geometry {
        Geometry::Interval([a, b]) => {
            if !(a < b) {
                return Err(AppError::config("geometry.interval: need a < b"));
            }
            let len = b - a;
            let count = (len * limit.sqrt() / std::f64::consts::PI).ceil() as usize + 2;
            let u = Primitive1D::zero(Grid1D::uniform(a, b, 2)?);
            let s = eigenvalues_selfadjoint(&u, &BoundaryCondition1D::Dirichlet, count)?;
            (1, len, s.real_values(), Some(len))
        }
        Geometry::Rectangle([lx, ly]) => {
            if !(lx > 0.0 && ly > 0.0) {
                return Err(AppError::config("geometry.rectangle: sides must be positive"));
            }
            (2, lx * ly, free_dirichlet_box(lx, ly, limit), None)
        }
    };
    let n = CountingFunction::new(values)?;
    let profile = weyl_profile(&n, dim, volume, &radii)?;
    let mut t = Table::new("profile", &["r", "count", "leading", "remainder"]);
    for i in 0..radii.len() {
        t.push(vec![radii[i].into(), profile.counts[i].into(), profile.leading[i].into(), profile.remainders[i].into()]);
    }
    t.note("dim", dim);
    t.note("volume", volume);
    t.note("max_abs_remainder", profile.max_abs_remainder());
    t.note("sup_abs_remainder", sup_remainder(&n, dim, volume, e.r_max));
    if let Some(len) = len {
        // N(r) = floor(len √r / π) away from the eigenvalues themselves
        let (mut mismatches, mut skipped) = (0usize, 0usize);
        for (&r, &c) in radii.iter().zip(&profile.counts) {
            if n.distance(r) <= 1e-8 * r {
                skipped += 1;
                continue;
            }
            let predicted = (len * r.sqrt() / std::f64::consts::PI).floor() as usize;
            if predicted != c {
                mismatches += 1;
            }
        }
        t.note("integer_mismatches", mismatches);
        t.note("radii_on_spectrum", skipped);
    }
    report.tables.push(t);
    Ok(report)
}

/// `sup |N(r) - leading(r)| / r^{(n-1)/2}` over `0 < r ≤ r_max`.
///
/// Between jumps the normalized remainder is monotone, so the supremum is
/// attained at an eigenvalue, from one side or the other, or at `r_max`.
fn sup_remainder(n: &CountingFunction, dim: usize, volume: f64, r_max: f64) -> f64 {
    let norm = |r: f64, c: usize| (c as f64 - weyl_leading(dim, volume, r)).abs() / r.powf((dim as f64 - 1.0) / 2.0);
    let mut sup = norm(r_max, n.count(r_max));
    for &l in n.values().iter().filter(|&&l| l <= r_max) {
        sup = sup.max(norm(l, n.count(l))).max(norm(l, n.count_below(l)));
    }
    sup
}

fn sandwich(e: &Sandwich, ctx: &Context) -> AppResult<Report> {
    positive("points", e.points)?;
    positive("count", e.count)?;
    if e.meshes.is_empty() {
        return Err(AppError::config("meshes: need at least one mesh"));
    }
    let u = primitive(&e.potential, ctx)?;
    let free = zero_like(&u)?;
    let bc = parse_bc1d(&e.bc)?;
    let radii = linear_radii(e.r_max / e.points as f64, e.r_max, e.points);
    let runs: Vec<AppResult<singspec_core::analysis::SandwichReport>> = e
        .meshes
        .par_iter()
        .map(|&cells| {
            let mesh = mesh_for(&u, cells)?;
            let p = galerkin_eigenvalues(&u, &bc, &mesh, e.count)?.real_values();
            let f = galerkin_eigenvalues(&free, &bc, &mesh, e.count)?.real_values();
            Ok(sandwich_check(&CountingFunction::new(p)?, &CountingFunction::new(f)?, e.theta, &radii)?)
        })
        .collect();
    let mut t = Table::new("fits", &["cells", "c", "C", "verdict", "differing_radii"]);
    let mut widths = Vec::new();
    let mut all = true;
    for (&cells, run) in e.meshes.iter().zip(runs) {
        let r = run?;
        let differing = r.rows.iter().filter(|row| row.lhs > 0).count();
        all &= r.verdict;
        widths.push(r.width);
        t.push(vec![cells.into(), r.width.into(), r.multiplier.into(), r.verdict.into(), differing.into()]);
    }
    let last = *widths.last().expect("nonempty");
    let spread = widths.iter().map(|w| (w / last - 1.0).abs()).fold(0.0, f64::max);
    t.note("theta", e.theta);
    t.note("verdict", all);
    t.note("c_spread", spread);
    let mut report = Report::new("sandwich");
    report.tables.push(t);
    Ok(report)
}

fn converge(e: &Converge, ctx: &Context) -> AppResult<Report> {
    if e.k0 > e.k1 {
        return Err(AppError::config("k0: must not exceed k1"));
    }
    if e.indices.is_empty() {
        return Err(AppError::config("indices: track at least one eigenvalue"));
    }
    let u = primitive(&e.potential, ctx)?;
    let bc = parse_bc1d(&e.bc)?;
    let scales = MollifiedFamily::dyadic_scales(e.k0, e.k1);
    let mesh = match &e.resolvent {
        Some(r) => Some((mesh_for(&u, r.cells)?, r.rho)),
        None => None,
    };
    let table = mollifier_sweep_1d(&u, &bc, &scales, &e.indices, mesh.as_ref().map(|(m, rho)| (m, *rho)))?;
    let mut cols = vec!["scale".to_string(), "norm".into()];
    cols.extend(e.indices.iter().map(|i| format!("gap_{i}")));
    cols.push("resolvent_gap".into());
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut t = Table::new("convergence", &col_refs);
    for row in &table.rows {
        let mut cells: Vec<Cell> = vec![row.scale.into(), row.norm.into()];
        cells.extend(row.gaps.iter().map(|&g| Cell::from(g)));
        cells.push(row.resolvent_gap.unwrap_or(f64::NAN).into());
        t.push(cells);
    }
    for (k, &i) in e.indices.iter().enumerate() {
        t.note(&format!("reference_{i}"), table.reference[i].re);
        t.note(&format!("slope_{i}"), table.slope(k).unwrap_or(f64::NAN));
    }
    if mesh.is_some() {
        t.note("resolvent_slope", table.resolvent_slope().unwrap_or(f64::NAN));
        t.note("resolvent_reduction", table.resolvent_reduction().unwrap_or(f64::NAN));
    }
    let mut report = Report::new("converge");
    if let Some(err) = &table.failure {
        t.note("failure", err.to_string().as_str());
        report.failures.push(err.to_string());
    }
    report.tables.push(t);
    Ok(report)
}

fn abel(e: &Abel, ctx: &Context) -> AppResult<Report> {
    positive("modes", e.modes)?;
    positive("times", e.times)?;
    if !(e.t_max >= e.t_min && e.t_min > 0.0) {
        return Err(AppError::config("t_min: need 0 < t_min <= t_max"));
    }
    let u = primitive(&e.potential, ctx)?;
    let bc = parse_bc1d(&e.bc)?;
    let mesh = mesh_for(&u, e.cells)?;
    let forms = galerkin_1d(&u, &bc, &mesh)?;
    let s = lowest_eigenpairs(&forms, e.modes)?;
    let sys = Eigensystem::from_spectrum(&forms, &s);
    let f: Vec<C64> = match e.datum {
        Datum::FirstMode => sys.right.column(0).iter().copied().collect(),
        Datum::Bubble => {
            let mut f = vec![C64::new(0.0, 0.0); forms.dim()];
            let len = u.b() - u.a();
            for (x, m) in mesh.nodes().iter().zip(&forms.node_map) {
                if let Some((k, c)) = m {
                    let t = (x - u.a()) / len;
                    f[*k] = C64::new(t * (1.0 - t), 0.0) / c;
                }
            }
            f
        }
    };
    let times = geometric_times(e.t_max, e.t_min, e.times);
    let exp = abel_reconstruct(&sys, &f, e.alpha, &times)?;
    let rel = exp.relative_errors();
    let mut t = Table::new("reconstruction", &["t", "error", "relative_error"]);
    for i in 0..times.len() {
        t.push(vec![times[i].into(), exp.errors[i].into(), rel[i].into()]);
    }
    t.note("alpha", e.alpha);
    t.note("modes", exp.modes);
    t.note("lambda_0_re", sys.values[0].re);
    t.note("lambda_0_im", sys.values[0].im);
    t.note("truncation", exp.truncation);
    t.note("biorthogonality_defect", sys.biorthogonality_defect());
    t.note("nonincreasing", exp.nonincreasing(0.0));
    t.note("final_relative_error", *rel.last().expect("times nonempty"));
    // reaching this point means no mode violated the branch condition
    t.note("branch_violation", false);
    let mut report = Report::new("abel");
    report.tables.push(t);
    Ok(report)
}

fn subord(e: &Subord, seed: u64, ctx: &Context) -> AppResult<Report> {
    positive("samples", e.samples)?;
    if e.modes.is_empty() || e.modes.contains(&0) {
        return Err(AppError::config("modes: need positive mode counts"));
    }
    let u = primitive(&e.potential, ctx)?;
    let runs: Vec<AppResult<f64>> = e
        .modes
        .par_iter()
        .map(|&m| Ok(subordination_estimate(&u, e.theta, m, e.samples, seed)?.value))
        .collect();
    let mut t = Table::new("estimates", &["modes", "value"]);
    let mut values = Vec::new();
    for (&m, v) in e.modes.iter().zip(runs) {
        let v = v?;
        values.push(v);
        t.push(vec![m.into(), v.into()]);
    }
    t.note("theta", e.theta);
    t.note("samples", e.samples);
    t.note("seed", seed as usize);
    if let [.., a, b] = values[..] {
        let change = if a == b { 0.0 } else { (b / a - 1.0).abs() };
        t.note("last_rel_change", change);
    }
    let mut report = Report::new("subord");
    report.tables.push(t);
    Ok(report)
}

fn parse_tag(s: &str) -> AppResult<TheoremTag> {
    match s {
        "dirichlet" => Ok(TheoremTag::Dirichlet),
        "neumann" => Ok(TheoremTag::Neumann),
        other => Err(AppError::config(format!("tag: expected dirichlet or neumann, got `{other}`"))),
    }
}

/// Admissibility report for a potential; planar fields need a domain.
pub fn admissibility(spec: &PotentialSpec, domain: Option<&str>, epsilon: f64, tag: TheoremTag) -> AppResult<singspec_core::potentials::AdmissibilityReport> {
    let q = QuadratureSpec::default();
    match spec {
        PotentialSpec::Primitive1D(p) => Ok(admissibility_primitive(&p.build()?, tag, &q)?),
        PotentialSpec::Field2D(f) => {
            let d = DomainSpec::parse(domain.ok_or_else(|| AppError::config("domain: field potentials need a domain"))?)?;
            Ok(admissibility_field(&f.build()?, &d.domain(), epsilon, tag, &q)?)
        }
    }
}

fn admissible(e: &Admissible, ctx: &Context) -> AppResult<Report> {
    let spec = e.potential.load(ctx.base())?;
    let r = admissibility(&spec, e.domain.as_deref(), e.epsilon, parse_tag(&e.tag)?)?;
    let mut t = Table::new("admissibility", &["dim", "exponent", "epsilon", "norm", "admissible", "condition"]);
    t.push(vec![
        r.dim.into(),
        r.exponent.into(),
        r.epsilon.into(),
        r.norm.unwrap_or(f64::INFINITY).into(),
        r.admissible.into(),
        r.condition.as_str().into(),
    ]);
    let mut report = Report::new("admissible");
    report.tables.push(t);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Issue {
    pub severity: Severity,
    pub message: String,
}

/// Dry run: schema-level checks, potential construction and admissibility.
/// Nothing is solved.
pub fn validate(cfg: &ExperimentConfig, ctx: &Context) -> Vec<Issue> {
    let mut issues = Vec::new();
    let mut err = |m: String| issues.push(Issue { severity: Severity::Error, message: m });
    let bc1 = |s: &str, err: &mut dyn FnMut(String)| {
        if let Err(e) = parse_bc1d(s) {
            err(e.to_string());
        }
    };
    let nonzero = |name: &str, n: usize, err: &mut dyn FnMut(String)| {
        if n == 0 {
            err(format!("{name}: must be at least 1"));
        }
    };
    let mut potential = None;
    let mut domain = None;
    match &cfg.experiment {
        Experiment::Solve1d(e) => {
            bc1(&e.bc, &mut err);
            nonzero("count", e.count, &mut err);
            nonzero("cells", e.cells, &mut err);
            if let Some(c) = &e.check {
                if !(c.rel_tol > 0.0) {
                    err("check.rel_tol: must be positive".into());
                }
            }
            potential = Some(&e.potential);
        }
        Experiment::GalerkinOrder(e) => {
            bc1(&e.bc, &mut err);
            nonzero("count", e.count, &mut err);
            if e.meshes.len() < 2 {
                err("meshes: need at least two meshes".into());
            }
            potential = Some(&e.potential);
        }
        Experiment::Solve2d(e) => {
            if let Err(x) = parse_space(&e.bc) {
                err(x.to_string());
            }
            if let Err(x) = DomainSpec::parse(&e.domain) {
                err(x.to_string());
            }
            nonzero("count", e.count, &mut err);
            if let Some(c) = &e.check {
                if !(c.rel_tol > 0.0) {
                    err("check.rel_tol: must be positive".into());
                }
            }
            potential = e.potential.as_ref();
            domain = Some(e.domain.clone());
        }
        Experiment::Cauchy2d(e) => {
            nonzero("count", e.count, &mut err);
            if e.levels.len() < 2 {
                err("levels: need at least two refinement levels".into());
            }
            if !(e.radius > 0.0) {
                err("radius: must be positive".into());
            }
            potential = Some(&e.potential);
            domain = Some(format!("disk:{},1", e.radius));
        }
        Experiment::Weyl(e) => {
            nonzero("points", e.points, &mut err);
            if !(e.r_max > 0.0) {
                err("r_max: must be positive".into());
            }
        }
        Experiment::Sandwich(e) => {
            bc1(&e.bc, &mut err);
            nonzero("count", e.count, &mut err);
            nonzero("points", e.points, &mut err);
            if !(0.0..1.0).contains(&e.theta) {
                err("theta: must lie in [0, 1)".into());
            }
            if e.meshes.is_empty() {
                err("meshes: need at least one mesh".into());
            }
            potential = Some(&e.potential);
        }
        Experiment::Converge(e) => {
            bc1(&e.bc, &mut err);
            if e.k0 > e.k1 {
                err("k0: must not exceed k1".into());
            }
            if e.indices.is_empty() {
                err("indices: track at least one eigenvalue".into());
            }
            if let Some(r) = &e.resolvent {
                if !(r.rho > 0.0) {
                    err("resolvent.rho: must be positive".into());
                }
            }
            potential = Some(&e.potential);
        }
        Experiment::Abel(e) => {
            bc1(&e.bc, &mut err);
            nonzero("modes", e.modes, &mut err);
            nonzero("times", e.times, &mut err);
            if !(e.alpha > 0.0) {
                err("alpha: must be positive".into());
            }
            if !(e.t_max >= e.t_min && e.t_min > 0.0) {
                err("t_min: need 0 < t_min <= t_max".into());
            }
            if e.modes >= e.cells {
                err(format!("modes: {} modes need more than {} cells", e.modes, e.cells));
            }
            potential = Some(&e.potential);
        }
        Experiment::Subord(e) => {
            if effective_seed(cfg, ctx).is_none() {
                err("seed: subord needs a seed (config `seed` or --seed)".into());
            }
            nonzero("samples", e.samples, &mut err);
            if e.modes.is_empty() || e.modes.contains(&0) {
                err("modes: need positive mode counts".into());
            }
            if !(0.0..=1.0).contains(&e.theta) {
                err("theta: must lie in [0, 1]".into());
            }
            potential = Some(&e.potential);
        }
        Experiment::Admissible(e) => {
            if let Err(x) = parse_tag(&e.tag) {
                err(x.to_string());
            }
            if !(e.epsilon > 0.0) {
                err("epsilon: must be positive".into());
            }
            potential = Some(&e.potential);
            domain = e.domain.clone();
        }
    }
    if let Some(src) = potential {
        match src.load(ctx.base()) {
            Err(e) => err(e.to_string()),
            Ok(spec) => admissibility_issues(&spec, domain.as_deref(), &mut issues),
        }
    }
    issues
}

fn admissibility_issues(spec: &PotentialSpec, domain: Option<&str>, issues: &mut Vec<Issue>) {
    let built = match spec {
        PotentialSpec::Primitive1D(p) => p.build().map(|_| ()),
        PotentialSpec::Field2D(f) => f.build().map(|_| ()),
    };
    if let Err(e) = built {
        issues.push(Issue { severity: Severity::Error, message: e.to_string() });
        return;
    }
    if matches!(spec, PotentialSpec::Field2D(_)) && domain.is_none() {
        return;
    }
    let eps = singspec_core::potentials::DEFAULT_EPSILON;
    match admissibility(spec, domain, eps, TheoremTag::Dirichlet) {
        Ok(r) if r.admissible => {}
        Ok(r) => {
            let need = match r.dim {
                1 => "q ∈ H^{-1}_2 (primitive in L_2)".to_string(),
                2 => format!("q ∈ H^{{-1}}_{{2+ε}} with V ∈ L_{{2+ε}}, checked at ε = {eps}"),
                n => format!("q ∈ H^{{-1}}_{{{n}}} with V ∈ L_{{{n}}}"),
            };
            issues.push(Issue { severity: Severity::Warning, message: format!("admissibility: potential fails {need}") });
        }
        Err(e) => issues.push(Issue { severity: Severity::Error, message: e.to_string() }),
    }
}
