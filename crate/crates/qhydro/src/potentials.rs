//! Chemical potentials, the Bohm potential and the Korteweg force.

use crate::error::{Error, Result};
use crate::fields::{spectral_power, ScalarField};
use crate::params::PhysicalParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BohmForm {
    Quantum,
    Thermal,
}

fn clamped(rho: &ScalarField, p: &PhysicalParams) -> Result<Vec<f64>> {
    rho.check_finite("density")?;
    Ok(rho.values().iter().map(|&r| p.clamp(r)).collect())
}

/// kT ln rho + V. The constant kT from the ideal-gas relation is dropped.
pub fn mu_thermo(rho: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> Result<ScalarField> {
    let r = clamped(rho, p)?;
    let vals = r.iter().zip(v.values()).map(|(&r, &v)| p.kt * r.ln() + v).collect();
    Ok(ScalarField::raw(rho.grid(), vals))
}

/// First and second derivatives of ln rho, formed from derivatives of rho itself.
///
/// Differentiating ln rho directly would pick up the non-periodic tails of
/// localized states; rho decays to zero and stays smooth across the seam.
pub fn log_derivatives(rho: &ScalarField, p: &PhysicalParams) -> Result<(ScalarField, ScalarField)> {
    let r = clamped(rho, p)?;
    let g = rho.grid();
    let d1 = spectral_power(rho.values(), g, 1);
    let d2 = spectral_power(rho.values(), g, 2);
    let l1: Vec<f64> = d1.iter().zip(&r).map(|(d, r)| d / r).collect();
    let l2 = d2.iter().zip(&r).zip(&l1).map(|((d, r), l)| d / r - l * l).collect();
    Ok((ScalarField::raw(g, l1), ScalarField::raw(g, l2)))
}

/// -kT a^2 [ lap ln rho + (grad ln rho)^2 / 2 ].
pub fn mu_nonlocal_log(rho: &ScalarField, p: &PhysicalParams) -> Result<ScalarField> {
    let (l1, l2) = log_derivatives(rho, p)?;
    let pre = -p.kt * p.a * p.a;
    Ok(l2.zip_map(&l1, |d2, d1| pre * (d2 + 0.5 * d1 * d1)))
}

/// lap sqrt(rho) / sqrt(rho) on the clamped density.
pub fn sqrt_curvature(rho: &ScalarField, p: &PhysicalParams) -> Result<ScalarField> {
    let s: Vec<f64> = clamped(rho, p)?.into_iter().map(f64::sqrt).collect();
    let d2 = spectral_power(&s, rho.grid(), 2);
    Ok(ScalarField::raw(rho.grid(), d2.iter().zip(&s).map(|(d, s)| d / s).collect()))
}

pub fn bohm_prefactor(p: &PhysicalParams, form: BohmForm) -> f64 {
    match form {
        BohmForm::Quantum => -p.hbar * p.hbar / (2.0 * p.mass),
        BohmForm::Thermal => -2.0 * p.kt * p.a * p.a,
    }
}

pub fn bohm_potential(rho: &ScalarField, p: &PhysicalParams, form: BohmForm) -> Result<ScalarField> {
    let pre = bohm_prefactor(p, form);
    Ok(sqrt_curvature(rho, p)?.map(|q| pre * q))
}

/// a = hbar / sqrt(4 m kT).
pub fn thermal_length(p: &PhysicalParams) -> Result<f64> {
    if !(p.kt > 0.0) {
        return Err(Error::param("kT", "thermal length needs kT > 0"));
    }
    if !(p.mass > 0.0) {
        return Err(Error::param("mass", "must be positive"));
    }
    Ok(p.hbar / (4.0 * p.mass * p.kt).sqrt())
}

/// -grad V_Q.
pub fn korteweg_force(rho: &ScalarField, p: &PhysicalParams) -> Result<ScalarField> {
    let vq = bohm_potential(rho, p, BohmForm::Quantum)?;
    Ok(ScalarField::raw(rho.grid(), spectral_power(vq.values(), rho.grid(), 1)).map(|f| -f))
}

/// (hbar^2 / 2m) d/dx (s''/s) expanded as s'''/s - s'' s'/s^2, with s = sqrt(rho).
pub fn korteweg_force_explicit(rho: &ScalarField, p: &PhysicalParams) -> Result<ScalarField> {
    let s: Vec<f64> = clamped(rho, p)?.into_iter().map(f64::sqrt).collect();
    let g = rho.grid();
    let (s1, s2, s3) = (spectral_power(&s, g, 1), spectral_power(&s, g, 2), spectral_power(&s, g, 3));
    let pre = p.hbar * p.hbar / (2.0 * p.mass);
    let vals = (0..g.n()).map(|j| pre * (s3[j] / s[j] - s2[j] * s1[j] / (s[j] * s[j]))).collect();
    Ok(ScalarField::raw(g, vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid1D;

    fn params() -> PhysicalParams {
        PhysicalParams { kt: 1.0, a: 2f64.sqrt(), ..Default::default() }
    }

    #[test]
    fn uniform_density_has_no_nonlocal_terms() {
        let g = Grid1D::new(32, 10.0).unwrap();
        let rho = ScalarField::constant(g, 0.7);
        let p = params();
        assert!(mu_nonlocal_log(&rho, &p).unwrap().max_abs() < 1e-14);
        assert!(bohm_potential(&rho, &p, BohmForm::Quantum).unwrap().max_abs() < 1e-14);
        assert!(korteweg_force(&rho, &p).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn mu_thermo_values() {
        let g = Grid1D::new(16, 4.0).unwrap();
        let p = PhysicalParams { kt: 0.5, ..Default::default() };
        let v = ScalarField::constant(g, 0.25);
        let mu = mu_thermo(&ScalarField::constant(g, 2.0), &p, &v).unwrap();
        assert!(mu.values().iter().all(|m| (m - (0.5 * 2f64.ln() + 0.25)).abs() < 1e-15));
        let cold = PhysicalParams::default();
        assert_eq!(mu_thermo(&ScalarField::constant(g, 3.0), &cold, &v).unwrap(), v);
    }

    #[test]
    fn thermal_length_examples() {
        let p = PhysicalParams { kt: 0.25, ..Default::default() };
        assert_eq!(thermal_length(&p).unwrap(), 1.0);
        let p = PhysicalParams { hbar: 2.0, kt: 1.0, ..Default::default() };
        assert_eq!(thermal_length(&p).unwrap(), 1.0);
        assert!(thermal_length(&PhysicalParams::default()).is_err());
    }
}
