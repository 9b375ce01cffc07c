//! Scenario runner: builds initial data from a config, runs it, writes CSV snapshots,
//! a `meta` file and gnuplot scripts.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{Config, Initial, PotentialKind, ScenarioKind};
use crate::covariant::{conserved, rel_fluid_step, RelFluidState};
use crate::error::{Error, Result};
use crate::fields::{ComplexField, Grid1D, ScalarField, SpacetimeField};
use crate::madelung::{
    bohmian_trajectories, default_dt, integrate, integrate_with, total_energy_field, IntegrateOptions, MadelungState,
    Scheme,
};
use crate::nonlocal::{nonlocal_free_energy, retarded_comparison, retarded_free_energy, truncated_free_energy, Retardation};
use crate::params::PhysicalParams;
use crate::schrodinger::{inverse_madelung, madelung_transform, ssfm_evolve};

/// exp of a trigonometric polynomial with `modes` random harmonics whose
/// coefficients are uniform in [-amplitude/k, amplitude/k].
pub fn random_positive_field(grid: Grid1D, seed: u64, modes: usize, amplitude: f64) -> ScalarField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<(f64, f64)> = (1..=modes)
        .map(|k| {
            let s = amplitude / k as f64;
            (rng.random_range(-s..s), rng.random_range(-s..s))
        })
        .collect();
    let base = 2.0 * PI / grid.length();
    let vals = grid
        .coords()
        .iter()
        .map(|&x| {
            let e: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let k = base * (i + 1) as f64;
                    a * (k * x).cos() + b * (k * x).sin()
                })
                .sum();
            e.exp()
        })
        .collect();
    ScalarField::raw(grid, vals)
}

pub fn potential_field(cfg: &Config) -> ScalarField {
    let g = cfg.grid;
    match cfg.scenario.potential {
        PotentialKind::None => ScalarField::constant(g, 0.0),
        PotentialKind::Harmonic => {
            let k = cfg.physics.mass * cfg.scenario.omega * cfg.scenario.omega;
            ScalarField::raw(g, g.coords().iter().map(|x| 0.5 * k * x * x).collect())
        }
    }
}

/// Nearest wavenumber that fits the periodic box.
fn grid_wavenumber(k: f64, g: Grid1D) -> f64 {
    let base = 2.0 * PI / g.length();
    (k / base).round() * base
}

pub fn initial_state(cfg: &Config) -> Result<MadelungState> {
    let g = cfg.grid;
    let sc = &cfg.scenario;
    let p = &cfg.physics;
    let gauss = |x: f64, centre: f64, var: f64| (-(x - centre).powi(2) / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
    let xs = g.coords();
    let zero = vec![0.0; g.n()];
    let (rho, s): (Vec<f64>, Vec<f64>) = match sc.initial {
        Initial::Gaussian => (
            xs.iter().map(|&x| gauss(x, sc.x0, sc.sigma * sc.sigma)).collect(),
            xs.iter().map(|&x| p.hbar * sc.k0 * x).collect(),
        ),
        Initial::Ground | Initial::Coherent => {
            let var = p.hbar / (2.0 * p.mass * sc.omega);
            let centre = if sc.initial == Initial::Coherent { sc.x0 } else { 0.0 };
            (xs.iter().map(|&x| gauss(x, centre, var)).collect(), zero)
        }
        Initial::Plane => {
            let k = grid_wavenumber(sc.k0, g);
            (vec![1.0; g.n()], xs.iter().map(|&x| p.hbar * k * x).collect())
        }
        Initial::Pulse => {
            let var = sc.sigma * sc.sigma;
            (xs.iter().map(|&x| 1.0 + sc.amplitude * (-(x - sc.x0).powi(2) / (2.0 * var)).exp()).collect(), zero)
        }
        Initial::Uniform => (vec![1.0; g.n()], zero),
        Initial::Random => (random_positive_field(g, sc.seed, 6, sc.amplitude).into_values(), zero),
    };
    MadelungState::new(ScalarField::new(g, rho)?, ScalarField::new(g, s)?, 0.0)
}

/// Outcome of one scenario run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
    /// Scenario-defined error against its reference, if it has one.
    pub metric: Option<(&'static str, f64)>,
    /// Conserved-quantity drifts, normalized per 1000 steps.
    pub drifts: Vec<(&'static str, f64)>,
    pub final_rho: Option<ScalarField>,
    pub dt: f64,
    pub steps: usize,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

struct Writer {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Writer {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Writer { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn table(&mut self, name: &str, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(headers)?;
        let rows = columns.first().map_or(0, |c| c.len());
        for i in 0..rows {
            w.write_record(columns.iter().map(|c| fmt(c[i])))?;
        }
        w.flush()?;
        self.files.push(path);
        Ok(())
    }

    fn pairs(&mut self, name: &str, headers: [&str; 2], rows: &[(&str, f64)]) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(headers)?;
        for (k, v) in rows {
            w.write_record([k.to_string(), fmt(*v)])?;
        }
        w.flush()?;
        self.files.push(path);
        Ok(())
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, body)?;
        self.files.push(path);
        Ok(())
    }

    fn plot(&mut self, name: &str, pattern: &str, ylabel: &str, column: usize) -> Result<()> {
        let body = format!(
            "set datafile separator ','\nset key autotitle columnhead\nset xlabel 'x'\nset ylabel '{ylabel}'\n\
             files = system('ls {pattern}')\nplot for [f in files] f using 1:{column} with lines title f\npause -1\n"
        );
        self.text(name, &body)
    }

    fn series_plot(&mut self, name: &str, file: &str, xlabel: &str, ylabel: &str, column: usize, log: bool) -> Result<()> {
        let scale = if log { "set logscale y\n" } else { "" };
        let body = format!(
            "set datafile separator ','\nset key autotitle columnhead\n{scale}set xlabel '{xlabel}'\nset ylabel '{ylabel}'\n\
             plot '{file}' using 1:{column} with linespoints\npause -1\n"
        );
        self.text(name, &body)
    }
}

fn snapshot_name(k: usize) -> String {
    format!("density_t{k:05}.csv")
}

pub fn l2_relative(a: &ScalarField, b: &ScalarField) -> f64 {
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.values().iter().map(|y| y * y).sum();
    (num / den).sqrt()
}

/// sqrt(sum (a - b)^2 dx).
pub fn l2_distance(a: &ScalarField, b: &ScalarField) -> f64 {
    let num: f64 = a.values().iter().zip(b.values()).map(|(x, y)| (x - y).powi(2)).sum();
    (num * a.grid().dx()).sqrt()
}

fn steps_for(span: f64, dt: f64) -> usize {
    ((span / dt - 1e-9).ceil() as usize).max(1)
}

/// Runs the configured scenario into `dir`. A numerical abort leaves a
/// `diagnostics` file next to whatever was written before it.
pub fn run(cfg: &Config, dir: &Path) -> Result<RunSummary> {
    let mut w = Writer::new(dir)?;
    let out = match cfg.scenario.kind {
        ScenarioKind::Madelung => run_madelung(cfg, &mut w),
        ScenarioKind::Schrodinger => run_schrodinger(cfg, &mut w),
        ScenarioKind::Compare => run_compare(cfg, &mut w),
        ScenarioKind::Relativistic => run_relativistic(cfg, &mut w),
        ScenarioKind::NonlocalStudy => run_nonlocal(cfg, &mut w),
        ScenarioKind::RetardedStudy => run_retarded(cfg, &mut w),
    };
    match out {
        Ok((metric, drifts, final_rho, dt, steps, tolerances)) => {
            write_meta(cfg, &mut w, dt, steps, &tolerances, metric, &drifts)?;
            Ok(RunSummary { dir: dir.to_path_buf(), files: w.files, metric, drifts, final_rho, dt, steps })
        }
        Err(e) => {
            if e.is_numerical() {
                fs::write(dir.join("diagnostics"), format!("scenario aborted\nerror = {e}\n"))?;
            }
            Err(e)
        }
    }
}

type Outcome = (
    Option<(&'static str, f64)>,
    Vec<(&'static str, f64)>,
    Option<ScalarField>,
    f64,
    usize,
    Vec<(&'static str, f64)>,
);

fn write_meta(
    cfg: &Config,
    w: &mut Writer,
    dt: f64,
    steps: usize,
    tolerances: &[(&str, f64)],
    metric: Option<(&str, f64)>,
    drifts: &[(&str, f64)],
) -> Result<()> {
    let p = &cfg.physics;
    let mut s = String::new();
    let mut line = |k: &str, v: String| s.push_str(&format!("{k} = {v}\n"));
    line("scenario", cfg.get("scenario.name").unwrap_or("").trim().to_string());
    line("config_sha256", cfg.hash());
    line("code_version", env!("CARGO_PKG_VERSION").to_string());
    line("grid_n", cfg.grid.n().to_string());
    line("grid_length", fmt(cfg.grid.length()));
    line("grid_dx", fmt(cfg.grid.dx()));
    line("dt", fmt(dt));
    line("steps", steps.to_string());
    line("t_end", fmt(cfg.scenario.t_end));
    line("hbar", fmt(p.hbar));
    line("mass", fmt(p.mass));
    line("kT", fmt(p.kt));
    line("c", fmt(p.c));
    line("a", fmt(p.a));
    line("rho_floor", fmt(p.rho_floor));
    line("seed", cfg.scenario.seed.to_string());
    for (k, v) in tolerances {
        line(&format!("tolerance_{k}"), fmt(*v));
    }
    if let Some((k, v)) = metric {
        line(&format!("metric_{k}"), fmt(v));
    }
    for (k, v) in drifts {
        line(&format!("drift_{k}"), fmt(*v));
    }
    w.text("meta", &s)
}

fn madelung_dt(cfg: &Config) -> f64 {
    cfg.scenario.dt.unwrap_or_else(|| default_dt(cfg.grid, &cfg.physics))
}

fn run_madelung(cfg: &Config, w: &mut Writer) -> Result<Outcome> {
    let p = cfg.physics;
    let st = initial_state(cfg)?;
    let v = potential_field(cfg);
    let scheme = cfg.scenario.scheme;
    let dt = madelung_dt(cfg);
    let steps = steps_for(cfg.scenario.t_end, dt);
    let opts = IntegrateOptions { scheme, dt: Some(dt), stride: cfg.stride };
    let xs = cfg.grid.coords();
    let mut snaps: Vec<MadelungState> = Vec::new();
    let mut io_err = None;
    let res = integrate_with(&st, &p, &v, cfg.scenario.t_end, opts, |s| {
        if snaps.last().is_some_and(|l| l.time >= s.time) {
            return;
        }
        let vel = s.velocity(&p, scheme);
        let e = total_energy_field(s, &p, &v, scheme);
        let name = snapshot_name(snaps.len());
        if let Err(err) = w.table(&name, &["x", "rho", "S", "v", "E"], &[&xs, s.rho.values(), s.s.values(), vel.values(), e.values()]) {
            io_err.get_or_insert(err);
        }
        snaps.push(s.clone());
    });
    if let Some(e) = io_err {
        return Err(e);
    }
    let last = res?;
    let times: Vec<f64> = snaps.iter().map(|s| s.time).collect();
    let mass: Vec<f64> = snaps.iter().map(|s| s.mass()).collect();
    w.table("conserved.csv", &["t", "mass"], &[&times, &mass])?;
    w.plot("density.gp", "density_t*.csv", "rho", 2)?;
    if !cfg.scenario.seeds.is_empty() {
        let tr = bohmian_trajectories(&snaps, &cfg.scenario.seeds, &p, scheme)?;
        let mut headers = vec!["t".to_string()];
        headers.extend((0..tr.positions.len()).map(|i| format!("x{i}")));
        let heads: Vec<&str> = headers.iter().map(String::as_str).collect();
        let mut cols: Vec<&[f64]> = vec![&tr.times];
        cols.extend(tr.positions.iter().map(|p| p.as_slice()));
        w.table("trajectories.csv", &heads, &cols)?;
        let flags: Vec<f64> = tr.flagged.iter().map(|&f| f as u8 as f64).collect();
        w.table("trajectory_seeds.csv", &["seed", "vacuum"], &[&cfg.scenario.seeds, &flags])?;
    }
    let drift = (last.mass() - st.mass()).abs() * 1000.0 / steps as f64;
    Ok((None, vec![("mass_per_1000_steps", drift)], Some(last.rho), dt, steps, vec![("mass_per_1000_steps", 1e-10)]))
}

/// Advances psi by `span` with steps no longer than `dt`.
fn ssfm_span(psi: &ComplexField, v: &ScalarField, p: &PhysicalParams, span: f64, dt: f64) -> Result<(ComplexField, usize)> {
    let n = steps_for(span, dt);
    Ok((ssfm_evolve(psi, v, p, span / n as f64, n)?, n))
}

fn run_schrodinger(cfg: &Config, w: &mut Writer) -> Result<Outcome> {
    let p = cfg.physics;
    let st = initial_state(cfg)?;
    let v = potential_field(cfg);
    let dt = cfg.scenario.dt.unwrap_or(1e-3);
    let steps = steps_for(cfg.scenario.t_end, dt);
    let h = cfg.scenario.t_end / steps as f64;
    let mut psi = inverse_madelung(&st.rho, &st.s, &p)?;
    let norm0 = psi.norm();
    let xs = cfg.grid.coords();
    let mut times = Vec::new();
    let mut norms = Vec::new();
    let mut k = 0;
    let mut done = 0;
    loop {
        let hyd = madelung_transform(&psi, &p);
        let re: Vec<f64> = psi.values().iter().map(|z| z.re).collect();
        let im: Vec<f64> = psi.values().iter().map(|z| z.im).collect();
        w.table(&snapshot_name(k), &["x", "rho", "re", "im", "S"], &[&xs, hyd.rho.values(), &re, &im, hyd.s.values()])?;
        times.push(done as f64 * h);
        norms.push(psi.norm());
        k += 1;
        if done == steps {
            break;
        }
        let chunk = cfg.stride.min(steps - done);
        psi = ssfm_evolve(&psi, &v, &p, h, chunk)?;
        done += chunk;
    }
    w.table("conserved.csv", &["t", "norm"], &[&times, &norms])?;
    w.plot("density.gp", "density_t*.csv", "rho", 2)?;
    let drift = (psi.norm() - norm0).abs() * 1000.0 / steps as f64;
    Ok((None, vec![("norm_per_1000_steps", drift)], Some(psi.density()), h, steps, vec![("norm_per_1000_steps", 1e-12)]))
}

fn run_compare(cfg: &Config, w: &mut Writer) -> Result<Outcome> {
    let p = cfg.physics;
    let st = initial_state(cfg)?;
    let v = potential_field(cfg);
    let scheme = cfg.scenario.scheme;
    let dt = madelung_dt(cfg);
    let steps = steps_for(cfg.scenario.t_end, dt);
    let opts = IntegrateOptions { scheme, dt: Some(dt), stride: cfg.stride };
    let sol = integrate(&st, &p, &v, cfg.scenario.t_end, opts)?;
    let xs = cfg.grid.coords();
    let mut psi = inverse_madelung(&st.rho, &st.s, &p)?;
    let mut t = st.time;
    let (mut times, mut errs, mut masses, mut norms) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for (k, s) in sol.iter().enumerate() {
        if s.time > t {
            psi = ssfm_span(&psi, &v, &p, s.time - t, 1e-3)?.0;
            t = s.time;
        }
        let oracle = psi.density();
        w.table(&snapshot_name(k), &["x", "rho_madelung", "rho_schrodinger", "S"], &[&xs, s.rho.values(), oracle.values(), s.s.values()])?;
        times.push(s.time);
        errs.push(l2_relative(&s.rho, &oracle));
        masses.push(s.mass());
        norms.push(psi.norm());
    }
    w.table("error_vs_time.csv", &["t", "l2_relative", "mass_madelung", "norm_schrodinger"], &[&times, &errs, &masses, &norms])?;
    w.plot("density.gp", "density_t*.csv", "rho", 2)?;
    w.series_plot("error.gp", "error_vs_time.csv", "t", "relative L2 error", 2, true)?;
    let last = sol.last().expect("integrate emits the final state");
    let drift = (last.mass() - st.mass()).abs() * 1000.0 / steps as f64;
    Ok((
        Some(("l2_relative", *errs.last().unwrap())),
        vec![("mass_per_1000_steps", drift)],
        Some(last.rho.clone()),
        dt,
        steps,
        vec![("l2_relative", 1e-3), ("mass_per_1000_steps", 1e-10)],
    ))
}

/// Relativistic run of a Madelung initial state and the L2 distance of its
/// final density to the Madelung solution of the same data.
pub fn relativistic_run(
    st: &MadelungState,
    p: &PhysicalParams,
    v: &ScalarField,
    t_end: f64,
    dt: Option<f64>,
    stride: usize,
    mut emit: impl FnMut(&RelFluidState, f64, f64) -> Result<()>,
) -> Result<(RelFluidState, f64, usize, f64, f64)> {
    let g = st.grid();
    let vel = st.velocity(p, Scheme::Spectral);
    let rel0 = RelFluidState::new(st.rho.clone(), vel, 0.0, p.c)?;
    let h_max = dt.unwrap_or(0.5 * g.dx() / p.c);
    let steps = steps_for(t_end, h_max);
    let h = t_end / steps as f64;
    let (e0, m0) = conserved(&rel0, p, v)?;
    let (e0, m0) = (e0.integral(), m0.integral());
    let mut cur = rel0;
    emit(&cur, e0, m0)?;
    for k in 1..=steps {
        cur = rel_fluid_step(&cur, p, v, h)?;
        cur.time = if k == steps { t_end } else { k as f64 * h };
        if k % stride.max(1) == 0 || k == steps {
            let (e, m) = conserved(&cur, p, v)?;
            emit(&cur, e.integral(), m.integral())?;
        }
    }
    let (e1, m1) = conserved(&cur, p, v)?;
    let scale = 1000.0 / steps as f64;
    let e_drift = (e1.integral() - e0).abs() / e0.abs() * scale;
    let m_drift = (m1.integral() - m0).abs() * scale;
    Ok((cur, h, steps, e_drift, m_drift))
}

/// Madelung reference for the relativistic limit: spectral scheme, fine steps.
pub fn nonrelativistic_reference(st: &MadelungState, p: &PhysicalParams, v: &ScalarField, t_end: f64) -> Result<ScalarField> {
    let p = PhysicalParams { c: f64::INFINITY, ..*p };
    let dt = default_dt(st.grid(), &p).min(1e-3);
    let sol = integrate(st, &p, v, t_end, IntegrateOptions { scheme: Scheme::Spectral, dt: Some(dt), stride: usize::MAX })?;
    Ok(sol.last().expect("final state").rho.clone())
}

fn run_relativistic(cfg: &Config, w: &mut Writer) -> Result<Outcome> {
    let p = cfg.physics;
    let st = initial_state(cfg)?;
    let v = potential_field(cfg);
    let xs = cfg.grid.coords();
    let (mut times, mut es, mut ms) = (Vec::new(), Vec::new(), Vec::new());
    let mut k = 0;
    let (last, h, steps, e_drift, m_drift) =
        relativistic_run(&st, &p, &v, cfg.scenario.t_end, cfg.scenario.dt, cfg.stride, |s, e, m| {
            let (ef, mf) = conserved(s, &p, &v)?;
            w.table(&snapshot_name(k), &["x", "rho", "v", "E", "M"], &[&xs, s.rho.values(), s.v.values(), ef.values(), mf.values()])?;
            k += 1;
            times.push(s.time);
            es.push(e);
            ms.push(m);
            Ok(())
        })?;
    w.table("conserved.csv", &["t", "E", "M"], &[&times, &es, &ms])?;
    w.plot("density.gp", "density_t*.csv", "rho", 2)?;
    let reference = nonrelativistic_reference(&st, &p, &v, cfg.scenario.t_end)?;
    let dist = l2_distance(&last.rho, &reference);
    w.table("nonrelativistic_reference.csv", &["x", "rho_relativistic", "rho_madelung"], &[&xs, last.rho.values(), reference.values()])?;
    Ok((
        Some(("l2_to_madelung", dist)),
        vec![("energy_relative_per_1000_steps", e_drift), ("momentum_per_1000_steps", m_drift)],
        Some(last.rho),
        h,
        steps,
        vec![("energy_relative_per_1000_steps", 1e-10), ("momentum_per_1000_steps", 1e-10)],
    ))
}

fn run_nonlocal(cfg: &Config, w: &mut Writer) -> Result<Outcome> {
    let st = initial_state(cfg)?;
    let v = potential_field(cfg);
    let k = cfg.scenario.kernel.dilate(cfg.scenario.kernel_scale)?;
    let a2 = crate::kernel::kernel_second_moment(&k)?;
    let p = PhysicalParams { a: a2.sqrt(), ..cfg.physics };
    let exact = nonlocal_free_energy(&st.rho, &k, &v, &p)?;
    let trunc = truncated_free_energy(&st.rho, &p, &v)?;
    let local = crate::potentials::mu_thermo(&st.rho, &p, &v)?;
    let resid = exact.zip_map(&trunc, |a, b| a - b).max_abs();
    let xs = cfg.grid.coords();
    w.table("nonlocal.csv", &["x", "rho", "exact", "truncated", "local"], &[&xs, st.rho.values(), exact.values(), trunc.values(), local.values()])?;
    w.pairs("truncation.csv", ["quantity", "value"], &[("kernel_scale", cfg.scenario.kernel_scale), ("a2", a2), ("residual", resid)])?;
    w.plot("nonlocal.gp", "nonlocal.csv", "free energy", 3)?;
    let tolerances = vec![("truncation_slope", 4.0), ("truncation_slope_width", 0.3), ("leading_correction_relative", 0.01)];
    Ok((Some(("truncation_residual", resid)), Vec::new(), None, 0.0, 0, tolerances))
}

fn run_retarded(cfg: &Config, w: &mut Writer) -> Result<Outcome> {
    let p = cfg.physics;
    let st = initial_state(cfg)?;
    let v = potential_field(cfg);
    let g = cfg.grid;
    let k = cfg.scenario.kernel.dilate(cfg.scenario.kernel_scale)?;
    // uniformly spaced history from a Madelung run, every `stride` steps
    let dt = madelung_dt(cfg);
    let span = cfg.scenario.t_end;
    let steps = steps_for(span, dt);
    let stride = cfg.stride.max(1);
    let steps = steps.div_ceil(stride) * stride;
    let h = span / steps as f64;
    let opts = IntegrateOptions { scheme: cfg.scenario.scheme, dt: Some(h), stride };
    let sol = integrate(&st, &p, &v, span, opts)?;
    let hist = SpacetimeField::new(g, 0.0, h * stride as f64, sol.iter().map(|s| s.rho.values().to_vec()).collect())?;
    let index = hist.len() / 2;
    let report = retarded_comparison(&hist, &k, &p, &v, index)?;
    let pa = PhysicalParams { a: report.a2.sqrt(), ..p };
    let instant = nonlocal_free_energy(&hist.field(index), &k, &v, &pa)?;
    let ret = retarded_free_energy(&hist, &k, &pa, &v, index, Retardation::Retarded)?;
    let sym = retarded_free_energy(&hist, &k, &pa, &v, index, Retardation::Symmetric)?;
    let xs = g.coords();
    w.pairs("retarded_report.csv", ["quantity", "value"], &report.rows())?;
    w.table("retarded_fields.csv", &["x", "instantaneous", "retarded", "symmetric"], &[&xs, instant.values(), ret.values(), sym.values()])?;
    w.plot("retarded.gp", "retarded_fields.csv", "free energy", 3)?;
    let tolerances = vec![("spatial_terms", 1e-10), ("static_history", 1e-12), ("fast_signal", 1e-6)];
    Ok((Some(("sign_discrepancy", report.sign_discrepancy)), Vec::new(), None, h, steps, tolerances))
}

/// One row of a parameter sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub value: f64,
    pub error: Option<f64>,
    pub drifts: Vec<(&'static str, f64)>,
}

#[derive(Clone, Debug)]
pub struct SweepSummary {
    pub parameter: String,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of ln(error) against ln(abscissa).
    pub slope: Option<f64>,
    pub abscissa: &'static str,
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Reruns the scenario for each value of `parameter` (a `section.key`).
///
/// Errors: `scenario.dt` measures the final density against a rerun at a
/// quarter of the smallest step; `physics.c` and `scenario.kernel_scale` use
/// the scenario's own metric. The slope for `physics.c` is fitted against 1/c.
pub fn sweep(cfg: &Config, parameter: &str, values: &[f64], dir: &Path) -> Result<SweepSummary> {
    if values.is_empty() {
        return Err(Error::Validation(vec![format!("{parameter}: no values")]));
    }
    if !is_numeric_key(parameter) {
        return Err(Error::Validation(vec![format!("{parameter} is not a numeric key")]));
    }
    let mut runs = Vec::new();
    for (i, &val) in values.iter().enumerate() {
        let c = cfg.with_override(parameter, &format!("{val:e}"))?;
        runs.push((val, run(&c, &dir.join(format!("run{i:02}")))?));
    }
    let reference = if parameter == "scenario.dt" {
        let fine = values.iter().cloned().fold(f64::INFINITY, f64::min) / 4.0;
        let c = cfg.with_override(parameter, &format!("{fine:e}"))?;
        run(&c, &dir.join("reference"))?.final_rho
    } else {
        None
    };
    let rows: Vec<SweepRow> = runs
        .iter()
        .map(|(val, s)| {
            let error = match (&reference, &s.final_rho) {
                (Some(r), Some(f)) => Some(l2_relative(f, r)),
                _ => s.metric.map(|m| m.1),
            };
            SweepRow { value: *val, error, drifts: s.drifts.clone() }
        })
        .collect();
    let abscissa = if parameter == "physics.c" { "1/c" } else { "value" };
    let fit: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.error.filter(|e| *e > 0.0).map(|e| (if parameter == "physics.c" { 1.0 / r.value } else { r.value }, e)))
        .collect();
    let slope = (fit.len() >= 2 && (reference.is_some() || runs[0].1.metric.is_some()))
        .then(|| loglog_slope(&fit.iter().map(|f| f.0).collect::<Vec<_>>(), &fit.iter().map(|f| f.1).collect::<Vec<_>>()));

    let mut w = Writer::new(dir)?;
    let path = dir.join("sweep.csv");
    let mut csvw = csv::Writer::from_path(&path)?;
    let mut header = vec!["value".to_string(), "error".to_string()];
    header.extend(rows[0].drifts.iter().map(|d| d.0.to_string()));
    csvw.write_record(&header)?;
    for r in &rows {
        let mut rec = vec![fmt(r.value), r.error.map_or("nan".into(), fmt)];
        rec.extend(r.drifts.iter().map(|d| fmt(d.1)));
        csvw.write_record(&rec)?;
    }
    csvw.flush()?;
    w.files.push(path);
    w.text(
        "slope",
        &format!("parameter = {parameter}\nabscissa = {abscissa}\nslope = {}\n", slope.map_or("none".into(), fmt)),
    )?;
    Ok(SweepSummary { parameter: parameter.to_string(), rows, slope, abscissa })
}

fn is_numeric_key(key: &str) -> bool {
    matches!(
        key,
        "grid.length"
            | "physics.hbar"
            | "physics.mass"
            | "physics.kT"
            | "physics.c"
            | "physics.a"
            | "physics.rho_floor"
            | "scenario.sigma"
            | "scenario.x0"
            | "scenario.k0"
            | "scenario.amplitude"
            | "scenario.omega"
            | "scenario.t_end"
            | "scenario.dt"
            | "scenario.kernel_scale"
            | "scenario.kernel_amp1"
            | "scenario.kernel_sigma1"
            | "scenario.kernel_amp2"
            | "scenario.kernel_sigma2"
    )
}
