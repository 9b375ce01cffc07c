//! Acceptance checks with pinned tolerances, grouped into suites.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::Config;
use crate::covariant::{conserved, formulation_residuals, primitive_recovery, RelFluidState};
use crate::error::{Error, Result};
use crate::fields::{Grid1D, ScalarField, SpacetimeField};
use crate::kernel::{Dim, Kernel};
use crate::madelung::{integrate, total_energy_field, IntegrateOptions, MadelungState, Scheme};
use crate::nonlocal::{
    functional_derivative_check, nonlocal_free_energy, retarded_comparison, retarded_free_energy, truncation_residual,
    Retardation,
};
use crate::params::PhysicalParams;
use crate::potentials::{bohm_potential, log_derivatives, mu_nonlocal_log, mu_thermo, BohmForm};
use crate::scenario::{l2_distance, l2_relative, loglog_slope, nonrelativistic_reference, random_positive_field, relativistic_run};
use crate::schrodinger::{inverse_madelung, ssfm_evolve};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Identities,
    Oracle,
    Covariant,
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(Suite::All),
            "identities" => Ok(Suite::Identities),
            "oracle" => Ok(Suite::Oracle),
            "covariant" => Ok(Suite::Covariant),
            other => Err(Error::Validation(vec![format!("suite '{other}'")])),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tolerance {
    Below(f64),
    Within { target: f64, width: f64 },
}

impl Tolerance {
    pub fn accepts(&self, x: f64) -> bool {
        match *self {
            Tolerance::Below(t) => x < t,
            Tolerance::Within { target, width } => (x - target).abs() <= width,
        }
    }
}

impl std::fmt::Display for Tolerance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tolerance::Below(t) => write!(f, "< {t:.0e}"),
            Tolerance::Within { target, width } if *width < 1e-3 => write!(f, "{target} +- {width:.0e}"),
            Tolerance::Within { target, width } => write!(f, "{target} +- {width}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub criterion: u8,
    pub name: String,
    pub measured: f64,
    pub tolerance: Tolerance,
    pub passed: bool,
}

impl Row {
    fn new(criterion: u8, name: &str, measured: f64, tolerance: Tolerance) -> Self {
        let passed = measured.is_finite() && tolerance.accepts(measured);
        Row { criterion, name: name.to_string(), measured, tolerance, passed }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub rows: Vec<Row>,
    pub elapsed: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.passed)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:>3}  {:<58} {:>13}  {:>12}  {}", "#", "check", "measured", "tolerance", "status");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:>3}  {:<58} {:>13.4e}  {:>12}  {}",
                r.criterion,
                r.name,
                r.measured,
                r.tolerance.to_string(),
                if r.passed { "PASS" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "{} of {} checks passed in {:.2} s", self.rows.iter().filter(|r| r.passed).count(), self.rows.len(), self.elapsed);
        s
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["criterion", "check", "measured", "tolerance", "passed"])?;
        for r in &self.rows {
            w.write_record([r.criterion.to_string(), r.name.clone(), format!("{:.16e}", r.measured), r.tolerance.to_string(), r.passed.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn gaussian_density(g: Grid1D, var: f64) -> ScalarField {
    ScalarField::raw(g, g.coords().iter().map(|x| (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()).collect())
}

/// Free Gaussian: Madelung density against the split-step oracle.
pub fn free_gaussian_oracle() -> Result<Vec<Row>> {
    let g = Grid1D::new(512, 40.0)?;
    let p = PhysicalParams::default();
    let rho = gaussian_density(g, 4.0);
    let s = ScalarField::constant(g, 0.0);
    let v = ScalarField::constant(g, 0.0);
    let st = MadelungState::new(rho.clone(), s.clone(), 0.0)?;
    let clock = Instant::now();
    let sol = integrate(&st, &p, &v, 1.0, IntegrateOptions { scheme: Scheme::LogDensity, dt: None, stride: usize::MAX })?;
    let runtime = clock.elapsed().as_secs_f64();
    let psi = ssfm_evolve(&inverse_madelung(&rho, &s, &p)?, &v, &p, 1e-3, 1000)?;
    let err = l2_relative(&sol.last().expect("final state").rho, &psi.density());
    Ok(vec![
        Row::new(1, "free Gaussian density vs split-step, relative L2", err, Tolerance::Below(1e-3)),
        Row::new(1, "free Gaussian Madelung runtime [s]", runtime, Tolerance::Below(5.0)),
    ])
}

/// Harmonic ground state held for t in [0, 5].
pub fn ground_state_stationarity() -> Result<Vec<Row>> {
    let g = Grid1D::new(128, 10.0)?;
    let p = PhysicalParams::default();
    let v = ScalarField::raw(g, g.coords().iter().map(|x| 0.5 * x * x).collect());
    let st = MadelungState::new(gaussian_density(g, 0.5), ScalarField::constant(g, 0.0), 0.0)?;
    let sol = integrate(&st, &p, &v, 5.0, IntegrateOptions { scheme: Scheme::LogDensity, dt: None, stride: 10 })?;
    let (mut vmax, mut spread, mut offset) = (0.0f64, 0.0f64, 0.0f64);
    for s in &sol {
        vmax = vmax.max(s.velocity(&p, Scheme::LogDensity).max_abs());
        let e = total_energy_field(s, &p, &v, Scheme::LogDensity);
        let inside: Vec<f64> = (0..g.n()).filter(|&j| s.rho.values()[j] > 1e-8).map(|j| e.values()[j]).collect();
        let (lo, hi) = inside.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
        spread = spread.max(hi - lo);
        offset = offset.max(inside.iter().fold(0.0f64, |m, x| m.max((x - 0.5).abs())));
    }
    Ok(vec![
        Row::new(2, "ground state max |v| over t in [0, 5]", vmax, Tolerance::Below(1e-6)),
        Row::new(2, "ground state energy spread on rho > 1e-8", spread, Tolerance::Below(1e-6)),
        Row::new(2, "ground state energy minus hbar omega / 2", offset, Tolerance::Below(1e-6)),
    ])
}

/// Log form and square-root form of the non-local potential on random fields.
pub fn log_sqrt_identity() -> Result<Vec<Row>> {
    let g = Grid1D::new(128, 20.0)?;
    let p = PhysicalParams { kt: 1.0, a: 2f64.sqrt(), ..Default::default() };
    let mut worst = 0.0f64;
    for i in 0..20 {
        let rho = random_positive_field(g, 1000 + i, 6, 0.5);
        let log_form = mu_nonlocal_log(&rho, &p)?;
        let sqrt_form = bohm_potential(&rho, &p, BohmForm::Thermal)?;
        worst = worst.max(log_form.zip_map(&sqrt_form, |a, b| a - b).max_abs());
    }
    Ok(vec![Row::new(3, "log form vs sqrt form, 20 random fields", worst, Tolerance::Below(1e-8))])
}

/// Exact convolution against the Taylor truncation under kernel dilation.
pub fn truncation_order() -> Result<Vec<Row>> {
    let g = Grid1D::new(512, 64.0)?;
    let k = 2.0 * PI / g.length();
    let rho = ScalarField::raw(g, g.coords().iter().map(|x| (0.5 * (k * x).cos() + 0.3 * (2.0 * k * x).sin()).exp()).collect());
    let v = ScalarField::constant(g, 0.0);
    let p = PhysicalParams { kt: 1.0, ..Default::default() };
    let base = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One)?;
    let scales = [1.0, 0.5, 0.25];
    let mut res = Vec::new();
    for s in scales {
        res.push(truncation_residual(&rho, &base.dilate(s)?, &v, &p)?);
    }
    let slope = loglog_slope(&scales, &res);

    let kq = base.dilate(0.25)?;
    let pa = PhysicalParams { a: crate::kernel::kernel_second_moment(&kq)?.sqrt(), ..p };
    let exact = nonlocal_free_energy(&rho, &kq, &v, &pa)?;
    let local = mu_thermo(&rho, &pa, &v)?;
    let (_, l2) = log_derivatives(&rho, &pa)?;
    let lead = l2.map(|d| -0.5 * pa.kt * pa.a * pa.a * d);
    let excess = exact.zip_map(&local, |e, l| e - l);
    let rel = excess.zip_map(&lead, |x, y| x - y).max_abs() / lead.max_abs();
    Ok(vec![
        Row::new(4, "truncation residual slope over s = 1, 1/2, 1/4", slope, Tolerance::Within { target: 4.0, width: 0.3 }),
        Row::new(4, "leading correction vs -kT a^2 lap ln rho / 2 at s = 1/4", rel, Tolerance::Below(0.01)),
    ])
}

/// Thermal-length mapping makes the two Bohm prefactors coincide.
pub fn thermal_length_consistency() -> Result<Vec<Row>> {
    let g = Grid1D::new(128, 20.0)?;
    let p = PhysicalParams { hbar: 1.3, mass: 0.8, kt: 0.37, ..Default::default() }.with_thermal_length()?;
    let mut worst = 0.0f64;
    for i in 0..5 {
        let rho = random_positive_field(g, 2000 + i, 6, 0.5);
        let q = bohm_potential(&rho, &p, BohmForm::Quantum)?;
        let t = bohm_potential(&rho, &p, BohmForm::Thermal)?;
        worst = worst.max(q.zip_map(&t, |a, b| a - b).max_abs() / q.max_abs());
    }
    Ok(vec![Row::new(5, "thermal vs quantum Bohm potential, relative", worst, Tolerance::Below(1e-14))])
}

fn moving_history(g: Grid1D, dt: f64, count: usize, moving: bool) -> Result<SpacetimeField> {
    let k = 4.0 * PI / g.length();
    SpacetimeField::from_fn(g, 0.0, dt, count, |x, t| {
        let t = if moving { t } else { 0.0 };
        (0.3 * (k * x - t).cos() + 0.2 * (2.0 * k * x).sin() * (0.5 * t).cos()).exp()
    })
}

/// Retarded evaluator limits and the constitutive-vs-direct comparison.
pub fn retarded_checks() -> Result<Vec<Row>> {
    let g = Grid1D::new(256, 40.0)?;
    let kern = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One)?.dilate(0.5)?;
    let a = crate::kernel::kernel_second_moment(&kern)?.sqrt();
    let v = ScalarField::constant(g, 0.0);
    let index = 40;
    let finite = PhysicalParams { kt: 1.0, c: 20.0, a, ..Default::default() };

    let stat = moving_history(g, 0.05, 81, false)?;
    let instant = nonlocal_free_energy(&stat.field(index), &kern, &v, &finite)?;
    let ret = retarded_free_energy(&stat, &kern, &finite, &v, index, Retardation::Retarded)?;
    let static_diff = ret.zip_map(&instant, |a, b| a - b).max_abs();

    let hist = moving_history(g, 0.05, 81, true)?;
    let fast = PhysicalParams { c: 1e6, ..finite };
    let instant = nonlocal_free_energy(&hist.field(index), &kern, &v, &fast)?;
    let ret = retarded_free_energy(&hist, &kern, &fast, &v, index, Retardation::Retarded)?;
    let fast_diff = ret.zip_map(&instant, |a, b| a - b).max_abs();

    let report = retarded_comparison(&hist, &kern, &finite, &v, index)?;
    let ratio = report.sign_discrepancy / (2.0 * report.time_term);
    Ok(vec![
        Row::new(6, "static history, retarded vs instantaneous", static_diff, Tolerance::Below(1e-12)),
        Row::new(6, "c = 1e6, retarded vs instantaneous", fast_diff, Tolerance::Below(1e-6)),
        Row::new(6, "box form vs direct expansion, spatial terms", report.spatial_difference, Tolerance::Below(1e-10)),
        Row::new(6, "time-term sign discrepancy / (2 x time term)", ratio, Tolerance::Within { target: 1.0, width: 1e-6 }),
    ])
}

fn pulse_state(g: Grid1D, eps: f64) -> Result<MadelungState> {
    let rho = ScalarField::raw(g, g.coords().iter().map(|x| 1.0 + eps * (-x * x / 2.0).exp()).collect());
    MadelungState::new(rho, ScalarField::constant(g, 0.0), 0.0)
}

/// Conserved integrals of the three integrators, per 1000 steps.
pub fn conservation() -> Result<Vec<Row>> {
    let p = PhysicalParams::default();

    let g = Grid1D::new(512, 40.0)?;
    let zero = ScalarField::constant(g, 0.0);
    let st = MadelungState::new(gaussian_density(g, 4.0), zero.clone(), 0.0)?;
    let sol = integrate(&st, &p, &zero, 0.61, IntegrateOptions { scheme: Scheme::LogDensity, dt: Some(0.61e-3), stride: usize::MAX })?;
    let log_drift = (sol.last().expect("final").mass() - st.mass()).abs();

    // Displaced ground state in a trap, as in configs/coherent.cfg. The log-density
    // scheme has open edges, so its drift follows the flux through the box edge.
    let gh = Grid1D::new(128, 10.0)?;
    let vh = ScalarField::raw(gh, gh.coords().iter().map(|x| 0.5 * x * x).collect());
    let displaced = ScalarField::raw(gh, gh.coords().iter().map(|x| (-(x - 0.5).powi(2)).exp() / PI.sqrt()).collect());
    let st = MadelungState::new(displaced, ScalarField::constant(gh, 0.0), 0.0)?;
    let dt = crate::madelung::default_dt(gh, &p);
    let sol = integrate(&st, &p, &vh, 1000.0 * dt, IntegrateOptions { scheme: Scheme::LogDensity, dt: Some(dt), stride: usize::MAX })?;
    let coherent_drift = (sol.last().expect("final").mass() - st.mass()).abs();

    let gp = Grid1D::new(64, 20.0)?;
    let zp = ScalarField::constant(gp, 0.0);
    let pk = PhysicalParams { kt: 0.1, ..p };
    let st = pulse_state(gp, 0.2)?;
    let sol = integrate(&st, &pk, &zp, 1.0, IntegrateOptions { scheme: Scheme::Spectral, dt: Some(1e-3), stride: usize::MAX })?;
    let spectral_drift = (sol.last().expect("final").mass() - st.mass()).abs();

    let rho = ScalarField::raw(gh, gh.coords().iter().map(|x| (-(x - 1.0).powi(2)).exp() / PI.sqrt()).collect());
    let psi = inverse_madelung(&rho, &ScalarField::constant(gh, 0.0), &p)?;
    let out = ssfm_evolve(&psi, &vh, &p, 1e-3, 1000)?;
    let norm_drift = (out.norm() - psi.norm()).abs();

    let pc = PhysicalParams { c: 10.0, ..pk };
    let dt = 0.5 * gp.dx() / pc.c;
    let (_, _, steps, e_drift, m_drift) = relativistic_run(&st, &pc, &zp, 1000.0 * dt, Some(dt), usize::MAX, |_, _, _| Ok(()))?;
    debug_assert_eq!(steps, 1000);
    Ok(vec![
        Row::new(7, "Madelung mass drift, log-density scheme, free packet", log_drift, Tolerance::Below(1e-10)),
        Row::new(7, "Madelung mass drift, log-density scheme, trapped packet", coherent_drift, Tolerance::Below(1e-10)),
        Row::new(7, "Madelung mass drift, spectral scheme", spectral_drift, Tolerance::Below(1e-10)),
        Row::new(7, "Schrodinger norm drift", norm_drift, Tolerance::Below(1e-12)),
        Row::new(7, "relativistic energy integral drift, relative", e_drift, Tolerance::Below(1e-10)),
        Row::new(7, "relativistic momentum integral drift", m_drift, Tolerance::Below(1e-10)),
    ])
}

/// Relativistic fluid approaches the Madelung solution as c grows.
pub fn relativistic_limit() -> Result<Vec<Row>> {
    let g = Grid1D::new(64, 20.0)?;
    let v = ScalarField::constant(g, 0.0);
    let p = PhysicalParams { kt: 0.1, ..Default::default() };
    let st = pulse_state(g, 1e-6)?;
    let reference = nonrelativistic_reference(&st, &p, &v, 1.0)?;
    let speeds = [10.0, 20.0, 40.0];
    let mut dists = Vec::new();
    for c in speeds {
        let pc = PhysicalParams { c, ..p };
        let (last, ..) = relativistic_run(&st, &pc, &v, 1.0, None, usize::MAX, |_, _, _| Ok(()))?;
        dists.push(l2_distance(&last.rho, &reference));
    }
    let inv: Vec<f64> = speeds.iter().map(|c| 1.0 / c).collect();
    let slope = loglog_slope(&inv, &dists);
    Ok(vec![Row::new(8, "relativistic vs Madelung distance slope in 1/c", slope, Tolerance::Within { target: 2.0, width: 0.3 })])
}

/// Stress-energy roundtrip on random states and the two divergence forms.
pub fn recovery_and_equivalence() -> Result<Vec<Row>> {
    let g = Grid1D::new(64, 20.0)?;
    let k = 2.0 * PI / g.length();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let c = rng.random_range(5.0..50.0);
        let p = PhysicalParams { c, kt: rng.random_range(0.0..0.5), ..Default::default() };
        let scale = rng.random_range(0.5..2.0);
        let rho = random_positive_field(g, 3000 + i, 4, 0.5).map(|r| scale * r);
        let (amp, phase) = (rng.random_range(0.0..0.8), rng.random_range(0.0..2.0 * PI));
        let vel = ScalarField::raw(g, g.coords().iter().map(|x| amp * c * (k * x + phase).sin()).collect());
        let pot = ScalarField::raw(g, g.coords().iter().map(|x| 0.3 * (2.0 * k * x).cos()).collect());
        let st = RelFluidState::new(rho, vel, 0.0, c)?;
        let (e, m) = conserved(&st, &p, &pot)?;
        let lambda = rng.random_range(0.5..2.0);
        let guess = RelFluidState { rho: st.rho.map(|r| lambda * r), v: ScalarField::constant(g, 0.0), time: 0.0 };
        let out = primitive_recovery(&e, &m, &p, &pot, &guess)?;
        for j in 0..g.n() {
            let dr = (out.rho.values()[j] - st.rho.values()[j]).abs() / st.rho.values()[j];
            let dv = (out.v.values()[j] - st.v.values()[j]).abs() / c;
            worst = worst.max(dr).max(dv);
        }
    }

    let p = PhysicalParams { c: 10.0, kt: 0.1, ..Default::default() };
    let pot = ScalarField::raw(g, g.coords().iter().map(|x| 0.1 * (k * x).cos()).collect());
    let rho = SpacetimeField::from_fn(g, 0.0, 0.01, 5, |x, t| 1.0 + 0.2 * (k * x - 0.7 * t).cos())?;
    let vel = SpacetimeField::from_fn(g, 0.0, 0.01, 5, |x, t| 0.3 * (k * x - 0.7 * t).sin())?;
    let diff = formulation_residuals(&rho, &vel, &p, &pot, 2)?.max_difference();
    Ok(vec![
        Row::new(9, "stress-energy / primitive roundtrip, 100 states", worst, Tolerance::Below(1e-10)),
        Row::new(9, "pressure+force vs enthalpy divergence", diff, Tolerance::Below(1e-8)),
    ])
}

/// Numeric functional derivative against the closed-form chemical potential.
pub fn functional_derivative() -> Result<Vec<Row>> {
    let g = Grid1D::new(128, 20.0)?;
    let p = PhysicalParams { kt: 1.0, a: 2f64.sqrt(), ..Default::default() };
    let v = ScalarField::constant(g, 0.0);
    let rho = ScalarField::raw(g, g.coords().iter().map(|x| 0.2 + (-x * x).exp()).collect());
    let numeric = functional_derivative_check(&rho, &p, &v)?;
    let analytic = mu_thermo(&rho, &p, &v)?.zip_map(&mu_nonlocal_log(&rho, &p)?, |a, b| a + b);
    let diff = numeric.zip_map(&analytic, |a, b| a - b);
    let mean = diff.mean();
    let rel = diff.map(|d| d - mean).max_abs() / analytic.max_abs();
    Ok(vec![Row::new(10, "numeric functional derivative vs mu_th + mu_nl", rel, Tolerance::Below(1e-4))])
}

type Check = fn() -> Result<Vec<Row>>;

fn checks(suite: Suite) -> Vec<Check> {
    let identities: [Check; 5] =
        [log_sqrt_identity, truncation_order, thermal_length_consistency, retarded_checks, functional_derivative];
    let oracle: [Check; 3] = [free_gaussian_oracle, ground_state_stationarity, conservation];
    let covariant: [Check; 2] = [relativistic_limit, recovery_and_equivalence];
    match suite {
        Suite::Identities => identities.to_vec(),
        Suite::Oracle => oracle.to_vec(),
        Suite::Covariant => covariant.to_vec(),
        Suite::All => vec![
            free_gaussian_oracle,
            ground_state_stationarity,
            log_sqrt_identity,
            truncation_order,
            thermal_length_consistency,
            retarded_checks,
            conservation,
            relativistic_limit,
            recovery_and_equivalence,
            functional_derivative,
        ],
    }
}

fn run_checks(suite: Suite) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for c in checks(suite) {
        rows.extend(c()?);
    }
    rows.sort_by_key(|r| r.criterion);
    Ok(rows)
}

const HARNESS_CONFIG: &str = "[grid]\nn = 128\nlength = 20\n[scenario]\nname = compare\ninitial = gaussian\nsigma = 2\n\
                              scheme = log-density\nt_end = 0.2\n[output]\nstride = 50\n";

fn directories_match(a: &Path, b: &Path) -> Result<bool> {
    let mut names: Vec<_> = std::fs::read_dir(a)?.map(|e| e.map(|e| e.file_name())).collect::<std::io::Result<_>>()?;
    names.sort();
    for name in &names {
        if std::fs::read(a.join(name))? != std::fs::read(b.join(name))? {
            return Ok(false);
        }
    }
    Ok(std::fs::read_dir(b)?.count() == names.len())
}

/// Runs the suite. `All` also reruns every check and a small scenario to
/// confirm bit-identical output, and times the whole pass.
pub fn run_suite(suite: Suite) -> Result<Report> {
    let clock = Instant::now();
    let mut rows = run_checks(suite)?;
    if suite == Suite::All {
        let again = run_checks(suite)?;
        let mismatches = rows
            .iter()
            .zip(&again)
            .filter(|(a, b)| !a.name.contains("runtime") && a.measured.to_bits() != b.measured.to_bits())
            .count();
        let cfg = Config::parse(HARNESS_CONFIG)?;
        let root = std::env::temp_dir().join(format!("qhydro-verify-{}", std::process::id()));
        crate::scenario::run(&cfg, &root.join("a"))?;
        crate::scenario::run(&cfg, &root.join("b"))?;
        let same = directories_match(&root.join("a"), &root.join("b"))?;
        let _ = std::fs::remove_dir_all(&root);
        let elapsed = clock.elapsed().as_secs_f64();
        rows.push(Row::new(11, "rerun mismatches in check values", mismatches as f64, Tolerance::Below(0.5)));
        rows.push(Row::new(11, "rerun mismatches in scenario output files", if same { 0.0 } else { 1.0 }, Tolerance::Below(0.5)));
        rows.push(Row::new(11, "full suite wall time, both passes [s]", elapsed, Tolerance::Below(60.0)));
    }
    Ok(Report { rows, elapsed: clock.elapsed().as_secs_f64() })
}
