//! Acceptance suite: every criterion runs through the bundled presets and
//! prints one pass/fail line with the measured value and its tolerance.
//! Reference values come from oracles written here, independent of the
//! engines under test.
//!
//! Runs without the libtest harness so the criterion lines always print.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use singspec::experiments::{run, Context};
use singspec::output::{render_csv, render_json, Cell, Metadata, Report, Table};
use singspec::presets;

struct Outcome {
    id: usize,
    label: &'static str,
    measured: String,
    tolerance: String,
    pass: bool,
}

struct Suite {
    outcomes: Vec<Outcome>,
    renders: BTreeMap<String, String>,
}

/// Everything written for a preset run, headers included.
fn rendered(name: &str, report: &Report) -> String {
    let cfg = presets::preset(name).unwrap();
    let meta = Metadata::new(cfg.experiment.kind(), cfg.seed, &cfg.canonical());
    let mut s: String = report.tables.iter().map(|t| render_csv(&meta, t)).collect();
    s.push_str(&render_json(&meta, report));
    s
}

impl Suite {
    fn run(&mut self, name: &str) -> Report {
        let cfg = presets::preset(name).unwrap();
        let report = run(&cfg, &Context::default()).unwrap_or_else(|e| panic!("preset {name}: {e}"));
        self.renders.insert(name.to_string(), rendered(name, &report));
        report
    }

    fn record(&mut self, id: usize, label: &'static str, measured: String, tolerance: String, pass: bool) {
        println!("[{}] criterion {id:>2} {label}: {measured} (tolerance {tolerance})", if pass { "PASS" } else { "FAIL" });
        self.outcomes.push(Outcome { id, label, measured, tolerance, pass });
    }
}

fn table<'a>(r: &'a Report, name: &str) -> &'a Table {
    r.table(name).unwrap_or_else(|| panic!("missing table {name}"))
}

fn flag(t: &Table, key: &str) -> bool {
    matches!(t.footer(key), Some(Cell::Text(s)) if s == "true")
}

fn max_rel(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    got.iter().zip(want).map(|(g, w)| if *w == 0.0 { g.abs() } else { ((g - w) / w).abs() }).fold(0.0, f64::max)
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 || b - a < 1e-15 * b.abs() {
            return m;
        }
        if fa * fm < 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Dirichlet eigenvalues of `-y'' + s δ(x - 1/2) y` on (0, 1) from jump
/// matching: odd modes keep `k = 2πm`, even modes solve
/// `2k cos(k/2) + s sin(k/2) = 0` on `((2m+1)π, (2m+2)π)`.
fn delta_oracle(s: f64, count: usize) -> Vec<f64> {
    let mut ks = Vec::new();
    for m in 0..count {
        ks.push(2.0 * PI * (m + 1) as f64);
        let g = |k: f64| 2.0 * k * (k / 2.0).cos() + s * (k / 2.0).sin();
        ks.push(bisect(g, (2 * m + 1) as f64 * PI, (2 * m + 2) as f64 * PI));
    }
    let mut lambdas: Vec<f64> = ks.iter().map(|k| k * k).collect();
    lambdas.sort_by(f64::total_cmp);
    lambdas.truncate(count);
    lambdas
}

/// First zero of `J0` from its power series.
fn bessel_j0_zero() -> f64 {
    let j0 = |x: f64| {
        let (mut term, mut sum) = (1.0f64, 1.0f64);
        for k in 1..60 {
            term *= -(x * x / 4.0) / (k * k) as f64;
            sum += term;
        }
        sum
    };
    bisect(j0, 2.0, 3.0)
}

/// `#{(m, n) ≥ 1 : m² + n² ≤ r}`.
fn lattice_count(r: f64) -> usize {
    let top = r.sqrt() as usize + 1;
    (1..=top).map(|m| (1..=top).filter(|n| (m * m + n * n) as f64 <= r).count()).sum()
}

fn free_spectra(s: &mut Suite) {
    let clock = Instant::now();
    let d = s.run("free-dirichlet-1d-k10");
    let n = s.run("free-neumann-1d");
    let secs = clock.elapsed().as_secs_f64();
    let dir: Vec<f64> = (1..=10).map(|k| (k * k) as f64).collect();
    let neu: Vec<f64> = (0..10).map(|k| (k * k) as f64).collect();
    let ed = max_rel(&table(&d, "eigenvalues").column("re").unwrap(), &dir);
    // λ = 0 is compared absolutely
    let en = max_rel(&table(&n, "eigenvalues").column("re").unwrap(), &neu);
    s.record(
        1,
        "free 1D spectra",
        format!("dirichlet rel {ed:.2e}, neumann rel {en:.2e}, {secs:.2} s"),
        "1e-10, < 1 s".into(),
        ed <= 1e-10 && en <= 1e-10 && secs < 1.0,
    );
}

fn delta_oracle_and_sites(s: &mut Suite) {
    let clock = Instant::now();
    let shoot = s.run("delta10-dirichlet");
    let order = s.run("delta10-galerkin-order");
    let secs = clock.elapsed().as_secs_f64();
    let oracle = delta_oracle(10.0, 8);
    let err = max_rel(&table(&shoot, "eigenvalues").column("re").unwrap(), &oracle);
    let errors = table(&order, "errors");
    let (pmin, pmax) = (errors.footer_f64("order_min").unwrap(), errors.footer_f64("order_max").unwrap());
    s.record(
        2,
        "delta-potential oracle",
        format!("shooting rel {err:.2e}, galerkin order [{pmin:.3}, {pmax:.3}], {secs:.2} s"),
        "1e-8, order 2.0 ± 0.2, < 5 s".into(),
        err <= 1e-8 && (pmin - 2.0).abs() <= 0.2 && (pmax - 2.0).abs() <= 0.2 && secs < 5.0,
    );
    let sites = table(&shoot, "sites");
    let y1 = sites.footer_f64("max_y1_mismatch").unwrap();
    let jump = sites.footer_f64("max_jump_error").unwrap();
    let rows = sites.rows.len();
    s.record(
        3,
        "quasi-derivative regularity",
        format!("{rows} eigenfunctions, y1 mismatch {y1:.2e}, y' jump error {jump:.2e} (× max|y|)"),
        "1e-8 × max|y|".into(),
        rows == 8 && y1 <= 1e-8 && jump <= 1e-8,
    );
}

fn mollifier_convergence(s: &mut Suite) {
    let clock = Instant::now();
    let r = s.run("delta10-converge");
    let secs = clock.elapsed().as_secs_f64();
    let t = table(&r, "convergence");
    let scales = t.column("scale").unwrap();
    let expected: Vec<f64> = (2..=8).map(|k| 2f64.powi(-k)).collect();
    let slope = t.footer_f64("slope_0").unwrap();
    let reduction = t.footer_f64("resolvent_reduction").unwrap();
    s.record(
        4,
        "mollifier convergence",
        format!("slope {slope:.3}, resolvent reduction {reduction:.3e}, {secs:.1} s"),
        "slope ≥ 0.9, reduction ≤ 0.1, < 30 s".into(),
        scales == expected && slope >= 0.9 && reduction <= 0.1 && secs < 30.0 && r.failures.is_empty(),
    );
}

fn planar_free_spectra(s: &mut Suite) {
    let clock = Instant::now();
    let d = s.run("square-dirichlet-2d");
    let n = s.run("square-neumann-2d");
    let disk = s.run("disk-dirichlet-2d");
    let secs = clock.elapsed().as_secs_f64();
    let ed = max_rel(&table(&d, "eigenvalues").column("re").unwrap(), &[2.0, 5.0, 5.0, 8.0, 10.0]);
    let en = max_rel(&table(&n, "eigenvalues").column("re").unwrap(), &[0.0, 1.0, 1.0, 2.0, 4.0]);
    let j = bessel_j0_zero();
    let edisk = max_rel(&table(&disk, "eigenvalues").column("re").unwrap(), &[j * j]);
    s.record(
        5,
        "planar free spectra",
        format!("square D {ed:.2e}, square N {en:.2e}, disk {edisk:.2e} vs j0,1² = {:.10}, {secs:.1} s", j * j),
        "1%, < 60 s".into(),
        ed <= 0.01 && en <= 0.01 && edisk <= 0.01 && secs < 60.0,
    );
}

fn weyl_profiles(s: &mut Suite) {
    let clock = Instant::now();
    let sq = s.run("weyl-square");
    let iv = s.run("weyl-interval");
    let secs = clock.elapsed().as_secs_f64();
    let t = table(&sq, "profile");
    let radii = t.column("r").unwrap();
    let counts = t.column("count").unwrap();
    // pointwise lattice match away from the spectrum, where counts are unambiguous
    let lattice_ok = radii
        .iter()
        .zip(&counts)
        .filter(|(&r, _)| lattice_count(r) == lattice_count(r - 1e-9))
        .all(|(&r, &c)| lattice_count(r) as f64 == c);
    let r_max = *radii.last().unwrap();
    // the normalized remainder is monotone between jumps, so its supremum
    // sits at a lattice value m² + n² (from either side) or at r_max
    let norm = |r: f64, c: usize| (c as f64 - PI * r / 4.0).abs() / r.sqrt();
    let mut oracle_sup = norm(r_max, lattice_count(r_max));
    for v in 2..=(r_max as usize) {
        let r = v as f64;
        let (above, below) = (lattice_count(r), lattice_count(r - 0.5));
        if above != below {
            oracle_sup = oracle_sup.max(norm(r, above)).max(norm(r, below));
        }
    }
    let sup = t.footer_f64("sup_abs_remainder").unwrap();
    let worst = sup.max(oracle_sup);
    let t = table(&iv, "profile");
    let (radii, counts) = (t.column("r").unwrap(), t.column("count").unwrap());
    let mut checked = 0;
    let mut mismatches = 0;
    for (&r, &c) in radii.iter().zip(&counts) {
        let root = r.sqrt();
        // radii on the spectrum {k²} are ambiguous for a floating-point count
        if (root - root.round()).abs() < 1e-9 {
            continue;
        }
        checked += 1;
        if root.floor() != c {
            mismatches += 1;
        }
    }
    s.record(
        6,
        "Weyl profile",
        format!(
            "square sup |N - πr/4|/√r = {sup:.4} (oracle {oracle_sup:.4}, lattice match {lattice_ok}, r ≤ {r_max}), interval {mismatches} mismatches of {checked}, {secs:.2} s"
        ),
        "1.5, exact counts, < 10 s".into(),
        lattice_ok && (sup - oracle_sup).abs() <= 1e-9 && worst <= 1.5 && mismatches == 0 && checked > 0 && secs < 10.0,
    );
}

fn sandwich(s: &mut Suite) {
    let r = s.run("delta10-sandwich");
    let t = table(&r, "fits");
    let c = t.column("c").unwrap();
    let cc = t.column("C").unwrap();
    let spread = t.footer_f64("c_spread").unwrap();
    let verdict = flag(t, "verdict");
    s.record(
        7,
        "sandwich inequality",
        format!("c = {:.4} over {} meshes, C ≤ {:.3}, verdict {verdict}, c spread {spread:.2e}", c[c.len() - 1], c.len(), cc.iter().fold(0.0f64, |m, &x| m.max(x))),
        "verdict true for r ≤ 2500, c within ±20% over 2 refinements".into(),
        verdict && c.len() >= 3 && spread <= 0.2 && c.iter().all(|&x| x > 0.0),
    );
}

fn singular_disk(s: &mut Suite) {
    let adm = s.run("singular-disk-admissible");
    let admissible = matches!(table(&adm, "admissibility").rows[0][4], Cell::Text(ref v) if v == "true");
    let r = s.run("singular-disk-2d");
    let t = table(&r, "levels");
    let change = t.footer_f64("last_rel_change").unwrap();
    let defect = t.footer_f64("max_hermitian_defect").unwrap();
    let changes: Vec<f64> = t.column("rel_change").unwrap().into_iter().skip(1).collect();
    let cauchy = changes.windows(2).all(|w| w[1] < w[0]);
    s.record(
        8,
        "singular planar potential",
        format!("last relative change {change:.2e}, changes shrinking {cauchy}, Hermitian defect {defect:e}, admissible {admissible}"),
        "≤ 1e-2, defect exactly 0".into(),
        change <= 1e-2 && cauchy && defect == 0.0 && admissible,
    );
}

fn abel(s: &mut Suite) {
    let r = s.run("abel-idelta10");
    let t = table(&r, "reconstruction");
    let times = t.column("t").unwrap();
    let errs = t.column("relative_error").unwrap();
    let last_t = *times.last().unwrap();
    let last = *errs.last().unwrap();
    let decreasing = errs.windows(2).all(|w| w[1] < w[0]);
    let modes = t.footer_f64("modes").unwrap();
    s.record(
        9,
        "Abel summation",
        format!("error {last:.3e} at t = {last_t:e} with {modes} modes, decreasing {decreasing}, branch violation {}", flag(t, "branch_violation")),
        "≤ 0.05, monotone, no violation".into(),
        (last_t - 1e-4).abs() < 1e-12 && last <= 0.05 && decreasing && modes == 200.0 && !flag(t, "branch_violation"),
    );
}

fn subordination(s: &mut Suite) {
    let zero = table(&s.run("subord-zero"), "estimates").column("value").unwrap()[0];
    let unit = table(&s.run("subord-unit"), "estimates").column("value").unwrap()[0];
    let r = s.run("subord-delta10");
    let t = table(&r, "estimates");
    let modes = t.column("modes").unwrap();
    let change = t.footer_f64("last_rel_change").unwrap();
    s.record(
        10,
        "subordination estimator",
        format!("q = 0: {zero:e}, q ≡ 1: {unit:.6}, 10δ modes {modes:?} change {change:.3e}"),
        "0, 1 ± 0.05, ±10%".into(),
        zero == 0.0 && (unit - 1.0).abs() <= 0.05 && modes.len() == 2 && modes[1] == 2.0 * modes[0] && change <= 0.1,
    );
}

fn determinism(s: &mut Suite) {
    let mut differing = Vec::new();
    let names: Vec<&str> = presets::names().collect();
    for name in &names {
        let cfg = presets::preset(name).unwrap();
        let report = run(&cfg, &Context::default()).unwrap();
        let again = rendered(name, &report);
        let first = match s.renders.get(*name) {
            Some(first) => first.clone(),
            // presets no criterion ran yet get their first run here
            None => rendered(name, &run(&cfg, &Context::default()).unwrap()),
        };
        if first != again {
            differing.push(*name);
        }
    }
    s.record(
        11,
        "determinism",
        format!("{} presets re-run, {} differ {differing:?}", names.len(), differing.len()),
        "byte-identical".into(),
        differing.is_empty(),
    );
}

fn main() {
    oracles_agree_with_closed_forms();
    let mut s = Suite { outcomes: Vec::new(), renders: BTreeMap::new() };
    free_spectra(&mut s);
    delta_oracle_and_sites(&mut s);
    mollifier_convergence(&mut s);
    planar_free_spectra(&mut s);
    weyl_profiles(&mut s);
    sandwich(&mut s);
    singular_disk(&mut s);
    abel(&mut s);
    subordination(&mut s);
    determinism(&mut s);
    let failed: Vec<String> = s.outcomes.iter().filter(|o| !o.pass).map(|o| format!("{} ({}: {} vs {})", o.id, o.label, o.measured, o.tolerance)).collect();
    let passed = s.outcomes.len() - failed.len();
    println!("acceptance: {passed}/{} criteria pass", s.outcomes.len());
    assert_eq!(s.outcomes.len(), 11);
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}

fn oracles_agree_with_closed_forms() {
    // zero strength reduces to (kπ)²
    let free = delta_oracle(0.0, 4);
    let exact: Vec<f64> = (1..=4).map(|k| (k as f64 * PI).powi(2)).collect();
    assert!(max_rel(&free, &exact) < 1e-14);
    assert!((bessel_j0_zero() - 2.404_825_557_695_773).abs() < 1e-13);
    assert_eq!(lattice_count(2.0), 1);
    assert_eq!(lattice_count(5.0), 3);
    assert_eq!(lattice_count(10.0), 6);
}
