//! Continuity plus quantum Hamilton-Jacobi evolution of (rho, S), and guidance trajectories.
//!
//! Two discretizations are provided. `Scheme::Spectral` differentiates rho and S
//! spectrally on the periodic grid; it is exact for periodic states that stay
//! well away from vacuum. `Scheme::LogDensity` evolves R = ln rho with
//! fourth-order stencils and ghost points that continue R and S with their
//! initial edge curvature. Gaussian states have quadratic R and S, so the
//! scheme represents them exactly, and it stays stable on localized states
//! whose tails are far below round-off relative to the peak, where any
//! relative-error formulation on rho itself amplifies noise without bound.

use crate::error::{Error, Result};
use crate::fields::{spectral_power, Grid1D, ScalarField};
use crate::params::PhysicalParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Scheme {
    #[default]
    Spectral,
    LogDensity,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MadelungState {
    pub rho: ScalarField,
    pub s: ScalarField,
    pub time: f64,
}

impl MadelungState {
    pub fn new(rho: ScalarField, s: ScalarField, time: f64) -> Result<Self> {
        if rho.grid() != s.grid() {
            return Err(Error::Grid("rho and S live on different grids".into()));
        }
        rho.check_finite("rho")?;
        s.check_finite("S")?;
        if let Some(j) = rho.values().iter().position(|&r| r < 0.0) {
            return Err(Error::Vacuum(format!("negative density at point {j}")));
        }
        Ok(MadelungState { rho, s, time })
    }

    pub fn grid(&self) -> Grid1D {
        self.rho.grid()
    }

    pub fn mass(&self) -> f64 {
        self.rho.integral()
    }

    /// v = grad S / m with the scheme's derivative.
    pub fn velocity(&self, p: &PhysicalParams, scheme: Scheme) -> ScalarField {
        let g = self.grid();
        let d = match scheme {
            Scheme::Spectral => phase_gradient(self.s.values(), g, p.hbar),
            Scheme::LogDensity => open_fd4(self.s.values(), g.dx(), 1),
        };
        ScalarField::raw(g, d.into_iter().map(|x| x / p.mass).collect())
    }
}

/// Spectral gradient of S that tolerates an integer winding across the seam.
fn phase_gradient(s: &[f64], g: Grid1D, hbar: f64) -> Vec<f64> {
    let n = s.len();
    let period = 2.0 * std::f64::consts::PI * hbar;
    let winding = ((s[n - 1] - s[0]) / period).round();
    let slope = winding * period / g.length();
    let periodic: Vec<f64> = s.iter().enumerate().map(|(j, v)| v - slope * g.x(j)).collect();
    spectral_power(&periodic, g, 1).into_iter().map(|d| d + slope).collect()
}

/// Fourth-order first (order 1) or second (order 2) derivative with one-sided
/// six-point closures at both ends.
pub(crate) fn open_fd4(f: &[f64], dx: f64, order: u32) -> Vec<f64> {
    const W1: [[f64; 6]; 2] = [
        [-137.0 / 60.0, 5.0, -5.0, 10.0 / 3.0, -5.0 / 4.0, 1.0 / 5.0],
        [-1.0 / 5.0, -13.0 / 12.0, 2.0, -1.0, 1.0 / 3.0, -1.0 / 20.0],
    ];
    const W2: [[f64; 6]; 2] = [
        [15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0],
        [5.0 / 6.0, -5.0 / 4.0, -1.0 / 3.0, 7.0 / 6.0, -1.0 / 2.0, 1.0 / 12.0],
    ];
    let n = f.len();
    let mut d = vec![0.0; n];
    for j in 2..n - 2 {
        d[j] = if order == 1 {
            (-f[j + 2] + 8.0 * f[j + 1] - 8.0 * f[j - 1] + f[j - 2]) / (12.0 * dx)
        } else {
            (-f[j + 2] + 16.0 * f[j + 1] - 30.0 * f[j] + 16.0 * f[j - 1] - f[j - 2]) / (12.0 * dx * dx)
        };
    }
    let (w, scale, sign) = if order == 1 { (&W1, dx, -1.0) } else { (&W2, dx * dx, 1.0) };
    for i in 0..2 {
        let left: f64 = (0..6).map(|q| w[i][q] * f[q]).sum();
        let right: f64 = (0..6).map(|q| w[i][q] * f[n - 1 - q]).sum();
        d[i] = left / scale;
        d[n - 1 - i] = sign * right / scale;
    }
    d
}

/// Spectral right-hand side: d rho/dt = -d_x(rho v), dS/dt = -(m v^2/2 + kT ln rho + V + V_Q).
pub fn madelung_rhs(st: &MadelungState, p: &PhysicalParams, v: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    let g = st.grid();
    let vel = st.velocity(p, Scheme::Spectral);
    let flux: Vec<f64> = st.rho.values().iter().zip(vel.values()).map(|(r, u)| r * u).collect();
    let drho = spectral_power(&flux, g, 1).into_iter().map(|d| -d).collect();
    let energy = energy_values(&st.rho, &vel, p, v);
    let ds: Vec<f64> = energy.into_iter().map(|e| -e).collect();
    if let Some(j) = ds.iter().position(|x: &f64| !x.is_finite()) {
        return Err(Error::Unstable { time: st.time, reason: format!("non-finite S rate at point {j}") });
    }
    Ok((ScalarField::raw(g, drho), ScalarField::raw(g, ds)))
}

fn energy_values(rho: &ScalarField, vel: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> Vec<f64> {
    let g = rho.grid();
    let clamped: Vec<f64> = rho.values().iter().map(|&r| p.clamp(r)).collect();
    let root: Vec<f64> = clamped.iter().map(|r| r.sqrt()).collect();
    let curv = spectral_power(&root, g, 2);
    let q = -p.hbar * p.hbar / (2.0 * p.mass);
    (0..g.n())
        .map(|j| {
            let u = vel.values()[j];
            0.5 * p.mass * u * u + p.kt * clamped[j].ln() + v.values()[j] + q * curv[j] / root[j]
        })
        .collect()
}

/// m v^2 / 2 + kT ln rho + V + V_Q, pointwise.
pub fn total_energy_field(st: &MadelungState, p: &PhysicalParams, v: &ScalarField, scheme: Scheme) -> ScalarField {
    let g = st.grid();
    match scheme {
        Scheme::Spectral => ScalarField::raw(g, energy_values(&st.rho, &st.velocity(p, scheme), p, v)),
        Scheme::LogDensity => {
            let r: Vec<f64> = st.rho.values().iter().map(|&x| log_density(x, p)).collect();
            let (r1, r2) = (open_fd4(&r, g.dx(), 1), open_fd4(&r, g.dx(), 2));
            let s1 = open_fd4(st.s.values(), g.dx(), 1);
            let q = p.hbar * p.hbar / (2.0 * p.mass);
            let vals = (0..g.n())
                .map(|j| {
                    let u = s1[j] / p.mass;
                    0.5 * p.mass * u * u + p.kt * r[j] + v.values()[j] - q * (0.5 * r2[j] + 0.25 * r1[j] * r1[j])
                })
                .collect();
            ScalarField::raw(g, vals)
        }
    }
}

/// ln rho, with the floor applied only where rho is not positive. Clamping
/// small positive values would put a kink into the tails that the log form
/// otherwise resolves exactly.
fn log_density(rho: f64, p: &PhysicalParams) -> f64 {
    if rho > 0.0 {
        rho.ln()
    } else {
        p.rho_floor.ln()
    }
}

/// Log-density discretization with frozen-curvature ghost points.
struct LogDensity {
    dx: f64,
    curv_r: [f64; 2],
    curv_s: [f64; 2],
    ext: Vec<f64>,
}

impl LogDensity {
    fn new(r: &[f64], s: &[f64], dx: f64) -> Self {
        let edge = |f: &[f64]| {
            let d = open_fd4(f, dx, 2);
            [d[0], d[f.len() - 1]]
        };
        LogDensity { dx, curv_r: edge(r), curv_s: edge(s), ext: vec![0.0; r.len() + 4] }
    }

    /// Extend f by two ghost points per side so that second differences about
    /// the edge points equal the stored curvature.
    fn extend(&mut self, f: &[f64], curv: [f64; 2]) {
        let n = f.len();
        let h2 = self.dx * self.dx;
        self.ext[2..n + 2].copy_from_slice(f);
        self.ext[1] = 2.0 * f[0] - f[1] + h2 * curv[0];
        self.ext[0] = 2.0 * f[0] - f[2] + 4.0 * h2 * curv[0];
        self.ext[n + 2] = 2.0 * f[n - 1] - f[n - 2] + h2 * curv[1];
        self.ext[n + 3] = 2.0 * f[n - 1] - f[n - 3] + 4.0 * h2 * curv[1];
    }

    fn derivs(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let e = &self.ext;
        let dx = self.dx;
        let d1 = (0..n).map(|j| (-e[j + 4] + 8.0 * e[j + 3] - 8.0 * e[j + 1] + e[j]) / (12.0 * dx)).collect();
        let d2 = (0..n)
            .map(|j| (-e[j + 4] + 16.0 * e[j + 3] - 30.0 * e[j + 2] + 16.0 * e[j + 1] - e[j]) / (12.0 * dx * dx))
            .collect();
        (d1, d2)
    }

    fn rhs(&mut self, r: &[f64], s: &[f64], p: &PhysicalParams, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = r.len();
        self.extend(r, self.curv_r);
        let (r1, r2) = self.derivs(n);
        self.extend(s, self.curv_s);
        let (s1, s2) = self.derivs(n);
        let q = p.hbar * p.hbar / (2.0 * p.mass);
        let mut dr = Vec::with_capacity(n);
        let mut ds = Vec::with_capacity(n);
        for j in 0..n {
            let u = s1[j] / p.mass;
            dr.push(-(u * r1[j] + s2[j] / p.mass));
            let vq = -q * (0.5 * r2[j] + 0.25 * r1[j] * r1[j]);
            ds.push(-(0.5 * p.mass * u * u + p.kt * r[j] + v[j] + vq));
        }
        (dr, ds)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrateOptions {
    pub scheme: Scheme,
    /// Defaults to 0.1 m dx^2 / hbar.
    pub dt: Option<f64>,
    /// Steps between emitted snapshots.
    pub stride: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions { scheme: Scheme::Spectral, dt: None, stride: 10 }
    }
}

pub fn default_dt(g: Grid1D, p: &PhysicalParams) -> f64 {
    0.1 * p.mass * g.dx() * g.dx() / p.hbar
}

/// Classic RK4 from `st.time` to `t_end`. Snapshots (the initial state, every
/// `stride` steps and the final state) are passed to `emit`. On instability the
/// last stable state is emitted before the error is returned.
pub fn integrate_with(
    st: &MadelungState,
    p: &PhysicalParams,
    v: &ScalarField,
    t_end: f64,
    opts: IntegrateOptions,
    mut emit: impl FnMut(&MadelungState),
) -> Result<MadelungState> {
    if !(t_end > st.time) {
        return Err(Error::param("t_end", format!("{t_end} must exceed the start time {}", st.time)));
    }
    p.validate()?;
    let g = st.grid();
    let dt_req = opts.dt.unwrap_or_else(|| default_dt(g, p));
    if !(dt_req > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let steps = ((t_end - st.time) / dt_req - 1e-9).ceil().max(1.0) as usize;
    let dt = (t_end - st.time) / steps as f64;
    let stride = opts.stride.max(1);
    let rho_max0 = st.rho.max_abs();
    emit(st);

    let (to_internal, from_internal): (fn(f64, &PhysicalParams) -> f64, fn(f64) -> f64) = match opts.scheme {
        Scheme::Spectral => (|r, _| r, |r| r),
        Scheme::LogDensity => (log_density, f64::exp),
    };
    let mut a: Vec<f64> = st.rho.values().iter().map(|&r| to_internal(r, p)).collect();
    let mut s = st.s.values().to_vec();
    let mut log_ops = LogDensity::new(&a, &s, g.dx());
    let mut rhs = |a: &[f64], s: &[f64], t: f64| -> Result<(Vec<f64>, Vec<f64>)> {
        match opts.scheme {
            Scheme::Spectral => {
                let state = MadelungState {
                    rho: ScalarField::raw(g, a.to_vec()),
                    s: ScalarField::raw(g, s.to_vec()),
                    time: t,
                };
                let (dr, ds) = madelung_rhs(&state, p, v)?;
                Ok((dr.into_values(), ds.into_values()))
            }
            Scheme::LogDensity => Ok(log_ops.rhs(a, s, p, v.values())),
        }
    };

    let n = g.n();
    let axpy = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> { x.iter().zip(k).map(|(x, k)| x + h * k).collect() };
    let mut last = st.clone();
    for step in 1..=steps {
        let t = st.time + (step - 1) as f64 * dt;
        let (k1a, k1s) = rhs(&a, &s, t)?;
        let (k2a, k2s) = rhs(&axpy(&a, &k1a, 0.5 * dt), &axpy(&s, &k1s, 0.5 * dt), t + 0.5 * dt)?;
        let (k3a, k3s) = rhs(&axpy(&a, &k2a, 0.5 * dt), &axpy(&s, &k2s, 0.5 * dt), t + 0.5 * dt)?;
        let (k4a, k4s) = rhs(&axpy(&a, &k3a, dt), &axpy(&s, &k3s, dt), t + dt)?;
        for j in 0..n {
            a[j] += dt / 6.0 * (k1a[j] + 2.0 * k2a[j] + 2.0 * k3a[j] + k4a[j]);
            s[j] += dt / 6.0 * (k1s[j] + 2.0 * k2s[j] + 2.0 * k3s[j] + k4s[j]);
        }
        let time = if step == steps { t_end } else { st.time + step as f64 * dt };
        let rho: Vec<f64> = a.iter().map(|&x| from_internal(x)).collect();
        let bad = rho.iter().chain(&s).position(|x| !x.is_finite());
        let peak = rho.iter().fold(0.0f64, |m, r| m.max(r.abs()));
        if bad.is_some() || peak > 10.0 * rho_max0 {
            emit(&last);
            let reason = match bad {
                Some(j) => format!("non-finite value at point {}", j % n),
                None => format!("peak density grew from {rho_max0:.3e} to {peak:.3e}"),
            };
            return Err(Error::Unstable { time, reason });
        }
        last = MadelungState { rho: ScalarField::raw(g, rho), s: ScalarField::raw(g, s.clone()), time };
        if step % stride == 0 || step == steps {
            emit(&last);
        }
    }
    Ok(last)
}

pub fn integrate(
    st: &MadelungState,
    p: &PhysicalParams,
    v: &ScalarField,
    t_end: f64,
    opts: IntegrateOptions,
) -> Result<Vec<MadelungState>> {
    let mut out = Vec::new();
    integrate_with(st, p, v, t_end, opts, |s| {
        if out.last().map_or(true, |l: &MadelungState| l.time < s.time) {
            out.push(s.clone())
        }
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// positions[seed][time index]
    pub positions: Vec<Vec<f64>>,
    /// Seeds that started where rho < 1e-8.
    pub flagged: Vec<bool>,
}

fn lagrange(nodes: &[f64], t: f64) -> Vec<f64> {
    (0..nodes.len())
        .map(|a| {
            (0..nodes.len())
                .filter(|&b| b != a)
                .map(|b| (t - nodes[b]) / (nodes[a] - nodes[b]))
                .product()
        })
        .collect()
}

/// Cubic periodic interpolation of grid values at position x.
fn interp_periodic(f: &[f64], g: Grid1D, x: f64) -> f64 {
    let n = f.len() as isize;
    let s = (x - g.x(0)) / g.dx();
    let i = s.floor() as isize;
    let frac = s - i as f64;
    let w = lagrange(&[-1.0, 0.0, 1.0, 2.0], frac);
    (0..4).map(|q| w[q] * f[(i - 1 + q as isize).rem_euclid(n) as usize]).sum()
}

fn wrap(x: f64, g: Grid1D) -> f64 {
    let l = g.length();
    (x + 0.5 * l).rem_euclid(l) - 0.5 * l
}

/// Integrates dx/dt = v(x, t) through the stored snapshots with RK4.
pub fn bohmian_trajectories(solution: &[MadelungState], seeds: &[f64], p: &PhysicalParams, scheme: Scheme) -> Result<Trajectory> {
    if solution.len() < 2 {
        return Err(Error::param("solution", "need at least two snapshots"));
    }
    let g = solution[0].grid();
    let times: Vec<f64> = solution.iter().map(|s| s.time).collect();
    let vels: Vec<Vec<f64>> = solution.iter().map(|s| s.velocity(p, scheme).into_values()).collect();
    let flagged = seeds.iter().map(|&x| interp_periodic(solution[0].rho.values(), g, x) < 1e-8).collect();

    let m = times.len();
    let vel_at = |k: usize, t: f64, x: f64| -> f64 {
        // cubic in time over the snapshots around interval k
        let lo = (k as isize - 1).clamp(0, m as isize - 4.min(m as isize)) as usize;
        let hi = (lo + 4).min(m);
        let w = lagrange(&times[lo..hi], t);
        (lo..hi).zip(&w).map(|(q, wq)| wq * interp_periodic(&vels[q], g, x)).sum()
    };

    let mut positions: Vec<Vec<f64>> = seeds.iter().map(|&x| vec![wrap(x, g)]).collect();
    for k in 0..m - 1 {
        let (t0, t1) = (times[k], times[k + 1]);
        let h = t1 - t0;
        for path in positions.iter_mut() {
            let x = *path.last().unwrap();
            let k1 = vels[k].as_slice();
            let v1 = interp_periodic(k1, g, x);
            let v2 = vel_at(k, t0 + 0.5 * h, x + 0.5 * h * v1);
            let v3 = vel_at(k, t0 + 0.5 * h, x + 0.5 * h * v2);
            let v4 = interp_periodic(&vels[k + 1], g, x + h * v3);
            let next = x + h / 6.0 * (v1 + 2.0 * v2 + 2.0 * v3 + v4);
            if !next.is_finite() {
                return Err(Error::Unstable { time: t1, reason: "non-finite trajectory".into() });
            }
            path.push(wrap(next, g));
        }
    }
    Ok(Trajectory { times, positions, flagged })
}
