//! Special-relativistic fluid in 1+1 dimensions with the quantum potential in the enthalpy.
//!
//! Signature diag(1, -1). The conserved pair is (E, M) = (T^00, T^0x / c), with
//! dE/dt = -d_x(c T^0x) and dM/dt = -d_x T^xx; rho is the rest-frame density.

use crate::error::{Error, Result};
use crate::fields::{spectral_power, ScalarField, SpacetimeField};
use crate::params::PhysicalParams;
use crate::potentials::{bohm_potential, BohmForm};

#[derive(Clone, Debug, PartialEq)]
pub struct RelFluidState {
    pub rho: ScalarField,
    pub v: ScalarField,
    pub time: f64,
}

impl RelFluidState {
    pub fn new(rho: ScalarField, v: ScalarField, time: f64, c: f64) -> Result<Self> {
        if rho.grid() != v.grid() {
            return Err(Error::Grid("rho and v live on different grids".into()));
        }
        rho.check_finite("rho")?;
        v.check_finite("v")?;
        if let Some(j) = rho.values().iter().position(|&r| r <= 0.0) {
            return Err(Error::Vacuum(format!("non-positive density at point {j}")));
        }
        if let Some(j) = v.values().iter().position(|u| u.abs() >= c) {
            return Err(Error::param("v", format!("|v| >= c at point {j}")));
        }
        Ok(RelFluidState { rho, v, time })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StressEnergy1p1 {
    pub t00: ScalarField,
    pub t0x: ScalarField,
    pub txx: ScalarField,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TensorForm {
    /// Isotropic part h = P + (V + V_Q) rho.
    #[default]
    Enthalpy,
    /// Isotropic part P only; the potentials enter through `force_density`.
    Pressure,
}

/// (1 - v^2/c^2)^(-1/2), evaluated through logarithms so that v close to c stays accurate.
pub fn lorentz_factor(v: f64, c: f64) -> Result<f64> {
    let beta = v / c;
    if !(beta.abs() < 1.0) {
        return Err(Error::param("v", format!("|v| = {} is not below c = {c}", v.abs())));
    }
    Ok((-0.5 * ((-beta).ln_1p() + beta.ln_1p())).exp())
}

/// d_t rho + d_x(rho v) at snapshot `index`. The four-flux (rho c, rho v) is
/// contracted with (d_t / c, d_x), so c cancels from the time component.
pub fn continuity_residual(rho: &SpacetimeField, vel: &SpacetimeField, index: usize, c: f64) -> Result<ScalarField> {
    if rho.grid() != vel.grid() || rho.len() != vel.len() || rho.t0() != vel.t0() || rho.dt() != vel.dt() {
        return Err(Error::History("density and velocity histories are not aligned".into()));
    }
    if !(c > 0.0) {
        return Err(Error::param("c", "must be positive"));
    }
    let dt_rho = rho.time_derivative(index, crate::fields::Order::First)?;
    let flux: Vec<f64> = rho.snapshot(index).iter().zip(vel.snapshot(index)).map(|(r, u)| r * u).collect();
    let div = spectral_power(&flux, rho.grid(), 1);
    Ok(dt_rho.zip_map(&ScalarField::raw(rho.grid(), div), |a, b| a + b))
}

/// (V + V_Q) rho with V_Q rho written as -(hbar^2/2m) sqrt(rho) lap sqrt(rho).
fn potential_energy_density(rho: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> Vec<f64> {
    let root: Vec<f64> = rho.values().iter().map(|&r| p.clamp(r).sqrt()).collect();
    let curv = spectral_power(&root, rho.grid(), 2);
    let q = p.hbar * p.hbar / (2.0 * p.mass);
    (0..root.len()).map(|j| v.values()[j] * rho.values()[j] - q * root[j] * curv[j]).collect()
}

/// h = kT rho + (V + V_Q) rho.
pub fn enthalpy_density(rho: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> ScalarField {
    let pot = potential_energy_density(rho, p, v);
    let vals = rho.values().iter().zip(pot).map(|(r, e)| p.kt * r + e).collect();
    ScalarField::raw(rho.grid(), vals)
}

fn tensor_from_iso(st: &RelFluidState, p: &PhysicalParams, iso: &[f64]) -> Result<StressEnergy1p1> {
    let c = p.c;
    let g = st.rho.grid();
    let n = g.n();
    let (mut t00, mut t0x, mut txx) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for j in 0..n {
        let (r, u) = (st.rho.values()[j], st.v.values()[j]);
        let gam = lorentz_factor(u, c)?;
        let w = gam * gam * (p.kt * r / (c * c) + r);
        t00.push(-iso[j] + w * c * c);
        t0x.push(w * c * u);
        txx.push(iso[j] + w * u * u);
    }
    Ok(StressEnergy1p1 {
        t00: ScalarField::raw(g, t00),
        t0x: ScalarField::raw(g, t0x),
        txx: ScalarField::raw(g, txx),
    })
}

/// T^ab = -iso eta^ab + (P/c^2 + rho) U^a U^b with U = gamma (c, v).
pub fn stress_energy(st: &RelFluidState, p: &PhysicalParams, v: &ScalarField, form: TensorForm) -> Result<StressEnergy1p1> {
    if !p.c.is_finite() {
        return Err(Error::param("c", "the relativistic fluid needs a finite signal speed"));
    }
    let iso: Vec<f64> = match form {
        TensorForm::Enthalpy => enthalpy_density(&st.rho, p, v).into_values(),
        TensorForm::Pressure => st.rho.values().iter().map(|r| p.kt * r).collect(),
    };
    tensor_from_iso(st, p, &iso)
}

/// Spatial component of -d^b[(V + V_Q) rho]. With d^x = -d_x this is +d_x[(V + V_Q) rho].
pub fn force_density(rho: &ScalarField, v: &ScalarField, vq: &ScalarField) -> ScalarField {
    let e: Vec<f64> = (0..rho.values().len()).map(|j| (v.values()[j] + vq.values()[j]) * rho.values()[j]).collect();
    ScalarField::raw(rho.grid(), spectral_power(&e, rho.grid(), 1))
}

/// Divergence residuals d_a T^a0 and d_a T^ax for both tensor forms at one snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct FormulationResiduals {
    pub enthalpy: [ScalarField; 2],
    /// Pressure-form divergence plus the force density.
    pub pressure: [ScalarField; 2],
}

impl FormulationResiduals {
    pub fn max_difference(&self) -> f64 {
        (0..2)
            .map(|b| self.enthalpy[b].zip_map(&self.pressure[b], |x, y| x - y).max_abs())
            .fold(0.0, f64::max)
    }
}

/// Evaluates both divergence forms on a density/velocity history. The
/// pressure form carries the potentials as a force, d_a T_P^ab + G^b, where
/// G^0 = -(1/c) d_t[(V + V_Q) rho] and G^x = force_density.
pub fn formulation_residuals(
    rho: &SpacetimeField,
    vel: &SpacetimeField,
    p: &PhysicalParams,
    v: &ScalarField,
    index: usize,
) -> Result<FormulationResiduals> {
    if rho.grid() != vel.grid() || rho.len() != vel.len() || rho.dt() != vel.dt() {
        return Err(Error::History("density and velocity histories are not aligned".into()));
    }
    let g = rho.grid();
    let c = p.c;
    let mut comps: Vec<[Vec<f64>; 3]> = Vec::new();
    let mut pcomps: Vec<[Vec<f64>; 3]> = Vec::new();
    let mut pots: Vec<Vec<f64>> = Vec::new();
    for k in 0..rho.len() {
        let st = RelFluidState { rho: rho.field(k), v: vel.field(k), time: rho.time(k) };
        let te = stress_energy(&st, p, v, TensorForm::Enthalpy)?;
        let tp = stress_energy(&st, p, v, TensorForm::Pressure)?;
        comps.push([te.t00.into_values(), te.t0x.into_values(), te.txx.into_values()]);
        pcomps.push([tp.t00.into_values(), tp.t0x.into_values(), tp.txx.into_values()]);
        pots.push(potential_energy_density(&st.rho, p, v));
    }
    let history = |which: &Vec<[Vec<f64>; 3]>, comp: usize| {
        SpacetimeField::new(g, rho.t0(), rho.dt(), which.iter().map(|c| c[comp].clone()).collect())
    };
    let dt_of = |h: SpacetimeField| h.time_derivative(index, crate::fields::Order::First).map(|f| f.into_values());
    let dx_of = |f: &[f64]| spectral_power(f, g, 1);

    let divergence = |which: &Vec<[Vec<f64>; 3]>| -> Result<[Vec<f64>; 2]> {
        let d00 = dt_of(history(which, 0)?)?;
        let d0x = dt_of(history(which, 1)?)?;
        let x0 = dx_of(&which[index][1]);
        let xx = dx_of(&which[index][2]);
        let r0 = (0..g.n()).map(|j| d00[j] / c + x0[j]).collect();
        let rx = (0..g.n()).map(|j| d0x[j] / c + xx[j]).collect();
        Ok([r0, rx])
    };
    let [e0, ex] = divergence(&comps)?;
    let [p0, px] = divergence(&pcomps)?;
    let dpot_dt = dt_of(SpacetimeField::new(g, rho.t0(), rho.dt(), pots.clone())?)?;
    let force = dx_of(&pots[index]);
    let p0: Vec<f64> = (0..g.n()).map(|j| p0[j] - dpot_dt[j] / c).collect();
    let px: Vec<f64> = (0..g.n()).map(|j| px[j] + force[j]).collect();
    Ok(FormulationResiduals {
        enthalpy: [ScalarField::raw(g, e0), ScalarField::raw(g, ex)],
        pressure: [ScalarField::raw(g, p0), ScalarField::raw(g, px)],
    })
}

/// Conserved pair (E, M) = (T^00, T^0x / c) in the enthalpy form.
pub fn conserved(st: &RelFluidState, p: &PhysicalParams, v: &ScalarField) -> Result<(ScalarField, ScalarField)> {
    let t = stress_energy(st, p, v, TensorForm::Enthalpy)?;
    let c = p.c;
    Ok((t.t00, t.t0x.map(|x| x / c)))
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_ITERS: usize = 50;
const PICARD_SWEEPS: usize = 2;

/// Solves for v at one point with the potential q = V + V_Q + kT frozen:
/// (M q / c^2) v^2 - E alpha v + M (alpha c^2 - q) = 0, alpha = 1 + kT / c^2.
fn recover_point(e: f64, m: f64, q: f64, alpha: f64, c: f64, guess: f64) -> Option<(f64, f64)> {
    let a = m * q / (c * c);
    let b = -e * alpha;
    let k = m * (alpha * c * c - q);
    let mut u = if guess.abs() < c { guess } else { 0.0 };
    for _ in 0..NEWTON_ITERS {
        let f = (a * u + b) * u + k;
        let df = 2.0 * a * u + b;
        if df == 0.0 {
            return None;
        }
        let mut step = f / df;
        // keep iterates inside the light cone
        while (u - step).abs() >= c {
            step *= 0.5;
        }
        u -= step;
        if step.abs() <= NEWTON_TOL * (1.0 + u.abs()) {
            let gam2 = 1.0 / (1.0 - (u / c) * (u / c));
            let rho = e / (alpha * gam2 * c * c - q);
            return (rho > 0.0 && rho.is_finite()).then_some((rho, u));
        }
    }
    None
}

/// Inverts (E, M) for (rho, v). V_Q is frozen within each point-wise solve and
/// refreshed from the recovered density between sweeps.
pub fn primitive_recovery(
    e: &ScalarField,
    m: &ScalarField,
    p: &PhysicalParams,
    v: &ScalarField,
    guess: &RelFluidState,
) -> Result<RelFluidState> {
    let c = p.c;
    let g = e.grid();
    let alpha = 1.0 + p.kt / (c * c);
    let mut rho = guess.rho.clone();
    let mut vel = guess.v.values().to_vec();
    for _ in 0..PICARD_SWEEPS {
        let pot = potential_energy_density(&rho, p, v);
        let mut next = Vec::with_capacity(g.n());
        for j in 0..g.n() {
            let (ej, mj) = (e.values()[j], m.values()[j]);
            if !(ej > mj.abs() * c) {
                return Err(Error::Recovery { index: j, residual: mj.abs() * c - ej });
            }
            let q = pot[j] / rho.values()[j] + p.kt;
            let (r, u) = recover_point(ej, mj, q, alpha, c, vel[j])
                .ok_or(Error::Recovery { index: j, residual: f64::NAN })?;
            next.push(r);
            vel[j] = u;
        }
        rho = ScalarField::raw(g, next);
    }
    Ok(RelFluidState { rho, v: ScalarField::raw(g, vel), time: guess.time })
}

/// One RK4 step of dE/dt = -d_x(c T^0x), dM/dt = -d_x T^xx, with primitives
/// recovered at every stage.
pub fn rel_fluid_step(st: &RelFluidState, p: &PhysicalParams, v: &ScalarField, dt: f64) -> Result<RelFluidState> {
    let g = st.rho.grid();
    if !p.c.is_finite() {
        return Err(Error::param("c", "the relativistic fluid needs a finite signal speed"));
    }
    if !(dt > 0.0 && dt <= 0.5 * g.dx() / p.c) {
        return Err(Error::param("dt", format!("{dt} violates dt <= 0.5 dx / c = {}", 0.5 * g.dx() / p.c)));
    }
    let c = p.c;
    let rates = |s: &RelFluidState| -> Result<(Vec<f64>, Vec<f64>)> {
        let t = stress_energy(s, p, v, TensorForm::Enthalpy)?;
        let fe: Vec<f64> = t.t0x.values().iter().map(|x| c * x).collect();
        let de = spectral_power(&fe, g, 1).into_iter().map(|d| -d).collect();
        let dm = spectral_power(t.txx.values(), g, 1).into_iter().map(|d| -d).collect();
        Ok((de, dm))
    };
    let (e0, m0) = conserved(st, p, v)?;
    let (e0, m0) = (e0.into_values(), m0.into_values());
    let stage = |ke: &[f64], km: &[f64], h: f64, guess: &RelFluidState| -> Result<RelFluidState> {
        let e: Vec<f64> = e0.iter().zip(ke).map(|(x, k)| x + h * k).collect();
        let m: Vec<f64> = m0.iter().zip(km).map(|(x, k)| x + h * k).collect();
        primitive_recovery(&ScalarField::raw(g, e), &ScalarField::raw(g, m), p, v, guess)
    };
    let (k1e, k1m) = rates(st)?;
    let s2 = stage(&k1e, &k1m, 0.5 * dt, st)?;
    let (k2e, k2m) = rates(&s2)?;
    let s3 = stage(&k2e, &k2m, 0.5 * dt, &s2)?;
    let (k3e, k3m) = rates(&s3)?;
    let s4 = stage(&k3e, &k3m, dt, &s3)?;
    let (k4e, k4m) = rates(&s4)?;
    let comb = |a: &[f64], b: &[f64], c: &[f64], d: &[f64]| -> Vec<f64> {
        (0..a.len()).map(|j| (a[j] + 2.0 * b[j] + 2.0 * c[j] + d[j]) / 6.0).collect()
    };
    let mut next = stage(&comb(&k1e, &k2e, &k3e, &k4e), &comb(&k1m, &k2m, &k3m, &k4m), dt, &s4)?;
    next.time = st.time + dt;
    Ok(next)
}

/// Steps from `st.time` to `t_end` with the largest step not above `dt`.
pub fn rel_fluid_evolve(st: &RelFluidState, p: &PhysicalParams, v: &ScalarField, t_end: f64, dt: f64) -> Result<RelFluidState> {
    if !(t_end > st.time) {
        return Err(Error::param("t_end", "must exceed the start time"));
    }
    let steps = ((t_end - st.time) / dt - 1e-9).ceil().max(1.0) as usize;
    let h = (t_end - st.time) / steps as f64;
    let mut cur = st.clone();
    for k in 1..=steps {
        cur = rel_fluid_step(&cur, p, v, h)?;
        cur.time = if k == steps { t_end } else { st.time + k as f64 * h };
    }
    Ok(cur)
}

/// V_Q of the state's density, for callers that want the force density.
pub fn quantum_potential(st: &RelFluidState, p: &PhysicalParams) -> Result<ScalarField> {
    bohm_potential(&st.rho, p, BohmForm::Quantum)
}
