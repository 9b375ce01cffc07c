//! Split-step Fourier integrator and the map between wavefunction and hydrodynamic fields.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fields::{fourier_multiply, spectral_power_complex, ComplexField, ScalarField};
use crate::params::PhysicalParams;

/// Strang splitting: half potential kick, exact kinetic drift, half potential kick.
pub fn ssfm_evolve(psi: &ComplexField, vcl: &ScalarField, p: &PhysicalParams, dt: f64, steps: usize) -> Result<ComplexField> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let vmax = vcl.max_abs();
    if dt * vmax / p.hbar > PI {
        return Err(Error::param("dt", format!("dt * max|V| / hbar = {:.3} exceeds pi", dt * vmax / p.hbar)));
    }
    let g = psi.grid();
    let half_kick: Vec<Complex64> =
        vcl.values().iter().map(|&v| Complex64::from_polar(1.0, -0.5 * v * dt / p.hbar)).collect();
    let drift: Vec<Complex64> = (0..g.n())
        .map(|j| {
            let k = g.wavenumber(j);
            Complex64::from_polar(1.0, -p.hbar * k * k * dt / (2.0 * p.mass))
        })
        .collect();
    let mut w = psi.clone().into_values();
    for _ in 0..steps {
        w.iter_mut().zip(&half_kick).for_each(|(z, k)| *z *= k);
        fourier_multiply(&mut w, &drift);
        w.iter_mut().zip(&half_kick).for_each(|(z, k)| *z *= k);
    }
    ComplexField::new(g, w)
}

/// <H> = sum (hbar^2/2m)|psi'|^2 + V |psi|^2 dx.
pub fn energy_expectation(psi: &ComplexField, vcl: &ScalarField, p: &PhysicalParams) -> f64 {
    let d = spectral_power_complex(psi.values(), psi.grid(), 1);
    let kin = p.hbar * p.hbar / (2.0 * p.mass);
    let sum: f64 = (0..d.len()).map(|j| kin * d[j].norm_sqr() + vcl.values()[j] * psi.values()[j].norm_sqr()).sum();
    sum * psi.grid().dx()
}

#[derive(Clone, Debug, PartialEq)]
pub struct HydroFields {
    pub rho: ScalarField,
    pub s: ScalarField,
    /// Points where |psi|^2 is below the floor and the phase is undefined.
    pub vacuum: Vec<bool>,
}

impl HydroFields {
    pub fn has_vacuum(&self) -> bool {
        self.vacuum.iter().any(|&v| v)
    }
}

fn wrap_phase(d: f64) -> f64 {
    let w = (d + PI).rem_euclid(2.0 * PI) - PI;
    if w == -PI {
        PI
    } else {
        w
    }
}

/// rho = |psi|^2 and S = hbar * phase unwrapped from the left edge.
pub fn madelung_transform(psi: &ComplexField, p: &PhysicalParams) -> HydroFields {
    let g = psi.grid();
    let rho = psi.density();
    let phase: Vec<f64> = psi.values().iter().map(|z| z.arg()).collect();
    let mut s = Vec::with_capacity(phase.len());
    let mut acc = wrap_phase(phase[0]);
    s.push(p.hbar * acc);
    for j in 1..phase.len() {
        acc += wrap_phase(phase[j] - phase[j - 1]);
        s.push(p.hbar * acc);
    }
    let vacuum = rho.values().iter().map(|&r| r < p.rho_floor).collect();
    HydroFields { rho, s: ScalarField::raw(g, s), vacuum }
}

/// psi = sqrt(rho) exp(i S / hbar).
pub fn inverse_madelung(rho: &ScalarField, s: &ScalarField, p: &PhysicalParams) -> Result<ComplexField> {
    if let Some(j) = rho.values().iter().position(|&r| r < 0.0) {
        return Err(Error::Vacuum(format!("negative density at point {j}")));
    }
    let vals = rho.values().iter().zip(s.values()).map(|(&r, &s)| Complex64::from_polar(r.sqrt(), s / p.hbar)).collect();
    ComplexField::new(rho.grid(), vals)
}
