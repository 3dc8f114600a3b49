use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::Serialize;

use sone_index::config::ExperimentConfig;
use sone_index::geometry::surface::{from_sph, Surface};
use sone_index::geometry::{SOneSpace, SpaceKind, TwistBundle, TwistKind, Vec3};
use sone_index::heatkernel::bounds::DEFAULT_MARGIN;
use sone_index::heatkernel::{oracle, verify_bounds, KernelField, KernelOptions};
use sone_index::index::report::INTEGER_TOL;
use sone_index::index::{
    geometric_index, index_density_m, mckean_singer_index, IndexReport, IndexSetup,
};
use sone_index::stochastic::{exit_time, sample_path, MeanEstimate, PathOptions, RandomSource};
use sone_index::{Error, Result};

use crate::output::Artifacts;

/// Quadrature order of the Chern–Weil integral.
const GEOMETRIC_ORDER: usize = 24;
/// Finer order for the `I_m` table: the teardrop's curvature band converges
/// only algebraically (about 2e-5 at order 24, 3e-8 at 96).
const MODE_ORDER: usize = 96;
/// Relative tolerance of kernel values against their closed forms.
const KERNEL_TOL: f64 = 1e-3;
/// Rows allowed in `paths.csv`.
const DUMP_LIMIT: usize = 1_000_000;

fn twist(s: &SOneSpace, k: i64) -> Result<TwistBundle> {
    TwistBundle::new(TwistKind::of_degree(s, k), &s.base)
}

fn path_options(cfg: &ExperimentConfig) -> PathOptions {
    PathOptions {
        h: cfg.h,
        ..Default::default()
    }
}

fn run_index(cfg: &ExperimentConfig, s: SOneSpace, source: RandomSource) -> Result<IndexReport> {
    let tw = twist(&s, cfg.twist)?;
    let geometric = geometric_index(&s, &tw, GEOMETRIC_ORDER);
    let (name, params, kind) = (s.name(), s.params, tw.kind);
    let setup = IndexSetup::new(s, tw, cfg.exec)?
        .with_estimator(cfg.estimator)
        .with_antithetic(cfg.antithetic)
        .with_paths(path_options(cfg));
    let seed = source.seed;
    let est = mckean_singer_index(&setup, cfg.t, cfg.order, cfg.paths, source)?;
    Ok(IndexReport::new(name, params, kind, &est, geometric, seed))
}

fn report_line(r: &IndexReport, twist: i64) -> String {
    format!(
        "{} twist {}: analytic {:.5} ± {:.5} (N = {}, t = {}), geometric {:.9}, nearest {}: {:?}",
        r.space,
        twist,
        r.analytic.value,
        r.analytic.stderr,
        r.analytic.n,
        r.analytic.t,
        r.geometric.value,
        r.nearest_integer,
        r.verdict
    )
}

pub fn index(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<bool> {
    cfg.validate()?;
    let report = run_index(cfg, cfg.space()?, RandomSource::new(cfg.seed()?))?;
    out.json("index.json", &report)?;
    let line = report_line(&report, cfg.twist);
    println!("{line}");
    out.text("summary.txt", &(line + "\n"))?;
    Ok(report.passed())
}

#[derive(Serialize)]
struct SuiteRow {
    space: String,
    twist: i64,
    analytic: f64,
    stderr: f64,
    paths: usize,
    geometric: f64,
    verdict: String,
}

pub fn suite(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<bool> {
    cfg.validate()?;
    let names: Vec<String> = match &cfg.suite {
        Some(list) => list
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect(),
        None => SpaceKind::ALL
            .iter()
            .map(|k| k.name().to_string())
            .collect(),
    };
    if names.is_empty() {
        return Err(Error::InvalidConfig("`suite` lists no spaces".into()));
    }
    let root = RandomSource::new(cfg.seed()?);
    let mut reports = Vec::new();
    let mut summary = String::new();
    for (i, name) in names.iter().enumerate() {
        let run = ExperimentConfig {
            space: name.clone(),
            ..cfg.clone()
        };
        let report = run_index(&run, run.space()?, root.fork(i as u64))?;
        let line = report_line(&report, cfg.twist);
        println!("{line}");
        writeln!(summary, "{line}").unwrap();
        reports.push(report);
    }
    let rows: Vec<SuiteRow> = reports
        .iter()
        .map(|r| SuiteRow {
            space: r.space.clone(),
            twist: cfg.twist,
            analytic: r.analytic.value,
            stderr: r.analytic.stderr,
            paths: r.analytic.n,
            geometric: r.geometric.value,
            verdict: format!("{:?}", r.verdict).to_lowercase(),
        })
        .collect();
    out.csv("suite.csv", &rows)?;
    out.json("suite.json", &reports)?;
    let passed = reports.iter().all(IndexReport::passed);
    writeln!(
        summary,
        "{} of {} spaces pass",
        reports.iter().filter(|r| r.passed()).count(),
        reports.len()
    )
    .unwrap();
    out.text("summary.txt", &summary)?;
    Ok(passed)
}

/// Deterministic pairs at distances `(i + ½)·d_max/n`, from golden-angle starts.
fn sweep(s: &SOneSpace, n: usize, d_max: f64, phase: f64) -> Result<Vec<(Vec3, Vec3)>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let f = (i as f64 + 0.5) / n as f64;
            let ang = golden * i as f64 + phase;
            let d = f * d_max;
            match s.base {
                Surface::Torus { l1, l2 } => {
                    let x = Vec3::new((ang * 3.0).rem_euclid(l1), (ang * 7.0).rem_euclid(l2), 0.0);
                    Ok((x, s.base.exp_polar(&x, d, ang)?))
                }
                Surface::Revolution(_) => {
                    // Meridian pairs: the only distances known in closed form everywhere.
                    let r0 = (PI - d) * ((ang * 5.0).sin() * 0.5 + 0.5);
                    Ok((Vec3::new(r0, ang, 0.0), Vec3::new(r0 + d, ang, 0.0)))
                }
                _ => {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
                    let x = from_sph(z.acos(), ang);
                    Ok((x, s.base.exp_polar(&x, d, 2.0 * ang)?))
                }
            }
        })
        .collect()
}

fn closed_form(k: &KernelField, t: f64, x: &Vec3, y: &Vec3) -> Option<f64> {
    match *k.surface() {
        Surface::Torus { l1, l2 } => Some(oracle::torus(t, y.x - x.x, y.y - x.y, l1, l2)),
        Surface::Sphere { radius, .. } => {
            let s = k.surface();
            let sum: f64 = s
                .images(y)
                .iter()
                .map(|g| oracle::sphere(t, s.cover_distance(x, g), radius))
                .sum();
            Some(sum * k.multiplicity())
        }
        _ => None,
    }
}

#[derive(Serialize)]
struct KernelRow {
    t: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    y1: f64,
    y2: f64,
    y3: f64,
    distance: f64,
    value: f64,
    oracle: Option<f64>,
    rel_err: Option<f64>,
}

pub fn heat(cfg: &ExperimentConfig, out: &mut Artifacts) -> Result<bool> {
    cfg.validate_unseeded()?;
    let s = cfg.space()?;
    let k = KernelField::for_space(&s, 2, KernelOptions::default())?;
    let times = match cfg.t_grid {
        Some(_) => cfg.times(),
        None => (0..6).map(|i| 0.05 + 0.09 * i as f64).collect(),
    };
    let d_max = match s.base {
        Surface::Torus { l1, l2 } => 0.5 * l1.min(l2),
        Surface::Revolution(_) => 0.95 * PI,
        _ => 2.9 * s.params.radius,
    };
    let table = sweep(&s, 16, d_max, 0.3)?;
    let mut rows = Vec::new();
    for &t in &times {
        for (x, y) in &table {
            let value = k.eval(t, x, y);
            let oracle = closed_form(&k, t, x, y);
            rows.push(KernelRow {
                t,
                x1: x.x,
                x2: x.y,
                x3: x.z,
                y1: y.x,
                y2: y.y,
                y3: y.z,
                distance: s.base.distance(x, y)?,
                value,
                oracle,
                rel_err: oracle.map(|o| (value / o - 1.0).abs()),
            });
        }
    }
    let worst = rows.iter().filter_map(|r| r.rel_err).fold(0.0, f64::max);
    let kernel_ok = worst < KERNEL_TOL;
    out.csv("kernel.csv", &rows)?;

    let train = sweep(&s, 24, d_max, 1.1)?;
    let holdout = sweep(&s, 24, d_max, 2.3)?;
    let near = 0.25 * d_max;
    let bounds = verify_bounds(
        &k,
        &s.base,
        &times,
        &train,
        &holdout,
        near,
        DEFAULT_MARGIN,
        cfg.exec,
    );
    out.json("bounds.json", &bounds)?;

    let mut summary = String::new();
    match rows.iter().any(|r| r.oracle.is_some()) {
        true => writeln!(
            summary,
            "kernel vs closed form: max rel err {worst:.2e} over {} values (tol {KERNEL_TOL:e})",
            rows.len()
        ),
        false => writeln!(
            summary,
            "kernel: {} values, no closed form on {}",
            rows.len(),
            s.name()
        ),
    }
    .unwrap();
    writeln!(
        summary,
        "gaussian bounds: C1 {:.4}, C2 {:.4}, {} violations on {} held-out samples, {} unresolved, chain {}/{} hold",
        bounds.min_ratio,
        bounds.max_ratio,
        bounds.violations,
        bounds.holdout,
        bounds.unresolved,
        bounds.chain.len() - bounds.chain_violations,
        bounds.chain.len()
    )
    .unwrap();
    print!("{summary}");
    out.text("summary.txt", &summary)?;
    Ok(kernel_ok && bounds.passed())
}

#[derive(Serialize)]
struct Statistic {
    name: &'static str,
    mean: f64,
    stderr: f64,
    target: Option<f64>,
    pass: Option<bool>,
}

impl Statistic {
    fn new(name: &'static str, m: &MeanEstimate, target: Option<f64>) -> Self {
        Statistic {
            name,
            mean: m.mean,
            stderr: m.stderr,
            target,
            pass: target.map(|v| m.within(v, 3.0)),
        }
    }
}

#[derive(Serialize)]
struct SampleReport<'a> {
    space: &'a str,
    t: f64,
    h: f64,
    paths: usize,
    seed: u64,
    exit_radius: f64,
    exit_missing: usize,
    stats: Vec<Statistic>,
}

#[derive(Serialize)]
struct PathRow {
    path: usize,
    step: usize,
    time: f64,
    x1: f64,
    x2: f64,
    x3: f64,
}

/// Quadratic variation and exit time everywhere; zero mean and the exact exit
/// target only on the flat torus, where displacements are unwrapped.
pub fn sample(
    cfg: &ExperimentConfig,
    exit_radius: f64,
    dump: usize,
    out: &mut Artifacts,
) -> Result<bool> {
    cfg.validate()?;
    if !(exit_radius > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "exit radius must be positive, got {exit_radius}"
        )));
    }
    let s = cfg.space()?;
    let opts = path_options(cfg);
    let steps = opts.steps(cfg.t);
    let dump = dump.min(cfg.paths);
    if dump * (steps + 1) > DUMP_LIMIT {
        return Err(Error::InvalidConfig(format!(
            "path dump of {dump} paths × {} points exceeds {DUMP_LIMIT} rows",
            steps + 1
        )));
    }
    let x = match s.base {
        Surface::Torus { .. } => Vec3::new(1.0, 2.0, 0.0),
        Surface::Revolution(rev) => Vec3::new(0.5 * (rev.a + rev.b), 0.0, 0.0),
        _ => from_sph(1.0, 0.5),
    };
    let src = RandomSource::new(cfg.seed()?);
    let walks = cfg.exec.map(cfg.paths, |i| -> Result<_> {
        let p = sample_path(&s.base, &x, cfg.t, &opts, &mut src.stream(i as u64))?;
        let rows: Vec<PathRow> = match i < dump {
            true => p
                .points
                .iter()
                .zip(&p.times)
                .enumerate()
                .map(|(step, (q, &time))| PathRow {
                    path: i,
                    step,
                    time,
                    x1: q.x,
                    x2: q.y,
                    x3: q.z,
                })
                .collect(),
            false => Vec::new(),
        };
        Ok((p.quadratic_variation(), p.last() - x, rows))
    });
    let walks = walks.into_iter().collect::<Result<Vec<_>>>()?;
    let h = cfg.t / steps as f64;
    let exit_src = src.fork(1);
    let t_max = 50.0 * exit_radius * exit_radius;
    let exits = cfg.exec.map(cfg.paths, |i| {
        exit_time(
            &s.base,
            &x,
            exit_radius,
            h.min(1e-4),
            t_max,
            &mut exit_src.stream(i as u64),
        )
    });
    let exits = exits.into_iter().collect::<Result<Vec<_>>>()?;
    let exit_missing = exits.iter().filter(|e| e.is_none()).count();
    let exit_times: Vec<f64> = exits.into_iter().flatten().collect();

    let dim = s.base.dim() as f64;
    let flat = matches!(s.base, Surface::Torus { .. });
    let qv = MeanEstimate::from_samples(&walks.iter().map(|w| w.0).collect::<Vec<_>>());
    let mut stats = vec![Statistic::new(
        "quadratic_variation",
        &qv,
        Some(dim * cfg.t),
    )];
    for (c, name) in [(0, "mean_dx"), (1, "mean_dy")] {
        let m = MeanEstimate::from_samples(&walks.iter().map(|w| w.1[c]).collect::<Vec<_>>());
        stats.push(Statistic::new(name, &m, flat.then_some(0.0)));
    }
    let exit = MeanEstimate::from_samples(&exit_times);
    let exit_target = (flat && exit_missing == 0).then_some(exit_radius * exit_radius / dim);
    stats.push(Statistic::new("exit_time", &exit, exit_target));

    let report = SampleReport {
        space: s.name(),
        t: cfg.t,
        h,
        paths: cfg.paths,
        seed: src.seed,
        exit_radius,
        exit_missing,
        stats,
    };
    out.json("sample.json", &report)?;
    if dump > 0 {
        let rows: Vec<PathRow> = walks.into_iter().flat_map(|w| w.2).collect();
        out.csv("paths.csv", &rows)?;
    }
    let mut summary = String::new();
    for st in &report.stats {
        let target = st.target.map_or("-".to_string(), |v| format!("{v:.6}"));
        let verdict = st.pass.map_or("", |p| if p { "ok" } else { "FAIL" });
        writeln!(
            summary,
            "{:<20} {:>12.6} ± {:<10.2e} target {target:<10} {verdict}",
            st.name, st.mean, st.stderr
        )
        .unwrap();
    }
    if exit_missing > 0 {
        writeln!(
            summary,
            "{exit_missing} walks stayed in the ball until t = {t_max}"
        )
        .unwrap();
    }
    print!("{summary}");
    out.text("summary.txt", &summary)?;
    Ok(report.stats.iter().all(|st| st.pass != Some(false)))
}

#[derive(Serialize)]
struct ModeRow {
    m: i64,
    resolved: bool,
    density: f64,
    expected: f64,
    abs_err: f64,
}

/// `I_m` for `|m| ≤ max_mode` against `δ(p | m)(k + m·e/p)`.
pub fn fourier(cfg: &ExperimentConfig, max_mode: i64, out: &mut Artifacts) -> Result<bool> {
    cfg.validate_unseeded()?;
    if max_mode < 0 {
        return Err(Error::InvalidConfig(format!(
            "max mode must be non-negative, got {max_mode}"
        )));
    }
    let s = cfg.space()?;
    let tw = twist(&s, cfg.twist)?;
    let proj = sone_index::index::FourierProjector::new(cfg.fourier_nodes)?;
    let resolved = proj.resolved_modes() as i64;
    let p = s.p as i64;
    let rows: Vec<ModeRow> = (-max_mode..=max_mode)
        .map(|m| {
            let density = index_density_m(&s, &tw, m, MODE_ORDER);
            let expected = match m.rem_euclid(p) {
                0 => tw.degree() as f64 + m as f64 * s.euler / p as f64,
                _ => 0.0,
            };
            ModeRow {
                m,
                resolved: m.abs() <= resolved,
                density,
                expected,
                abs_err: (density - expected).abs(),
            }
        })
        .collect();
    out.csv("modes.csv", &rows)?;
    let worst = rows.iter().map(|r| r.abs_err).fold(0.0, f64::max);
    let mut summary = String::new();
    for r in &rows {
        writeln!(
            summary,
            "m = {:>3}: I_m = {:>12.9}, expected {:>12.9}",
            r.m, r.density, r.expected
        )
        .unwrap();
    }
    writeln!(
        summary,
        "{}: max |I_m − expected| = {worst:.2e}, modes resolved by K = {}: |m| ≤ {resolved}",
        s.name(),
        proj.nodes
    )
    .unwrap();
    print!("{summary}");
    out.text("summary.txt", &summary)?;
    Ok(worst < INTEGER_TOL)
}
