use std::f64::consts::PI;

use proptest::prelude::*;
use qhydro::covariant::{
    conserved, continuity_residual, lorentz_factor, primitive_recovery, quantum_potential, rel_fluid_evolve,
    rel_fluid_step, stress_energy,
};
use qhydro::potentials::{bohm_potential, BohmForm};
use qhydro::scenario::random_positive_field;
use qhydro::{Error, Grid1D, PhysicalParams, RelFluidState, ScalarField, SpacetimeField, TensorForm};

#[test]
fn lorentz_factor_values() {
    assert!((lorentz_factor(3.0, 5.0).unwrap() - 1.25).abs() < 1e-15);
    assert!((lorentz_factor(-3.0, 5.0).unwrap() - 1.25).abs() < 1e-15);
    assert!(lorentz_factor(5.0, 5.0).is_err());
}

#[test]
fn states_must_be_subluminal_and_positive() {
    let g = Grid1D::new(8, 1.0).unwrap();
    let one = ScalarField::constant(g, 1.0);
    assert!(RelFluidState::new(one.clone(), ScalarField::constant(g, 2.0), 0.0, 2.0).is_err());
    assert!(RelFluidState::new(ScalarField::constant(g, 0.0), one.clone(), 0.0, 2.0).is_err());
    assert!(RelFluidState::new(one.clone(), one, 0.0, 2.0).is_ok());
}

#[test]
fn advected_profile_has_zero_four_divergence() {
    let g = Grid1D::new(64, 20.0).unwrap();
    let (u, k, dt) = (0.8, 2.0 * PI / 20.0, 1e-3);
    let rho = SpacetimeField::from_fn(g, 0.0, dt, 5, |x, t| 1.0 + 0.3 * (k * (x - u * t)).cos()).unwrap();
    let vel = SpacetimeField::from_fn(g, 0.0, dt, 5, |_, _| u).unwrap();
    let r = continuity_residual(&rho, &vel, 2, 10.0).unwrap();
    // central differences in time leave an O((k u dt)^2) remainder
    assert!(r.max_abs() < 1e-7, "{}", r.max_abs());
    let misaligned = SpacetimeField::from_fn(g, 0.0, 2.0 * dt, 5, |_, _| u).unwrap();
    assert!(continuity_residual(&rho, &misaligned, 2, 10.0).is_err());
}

#[test]
fn tensor_forms_differ_by_the_potential_energy() {
    // uniform density has no quantum potential, so the isotropic parts differ by V rho
    let g = Grid1D::new(16, 4.0).unwrap();
    let p = PhysicalParams { c: 8.0, kt: 0.4, ..Default::default() };
    let st = RelFluidState::new(ScalarField::constant(g, 1.5), ScalarField::constant(g, 2.0), 0.0, 8.0).unwrap();
    let v = ScalarField::constant(g, 0.7);
    let a = stress_energy(&st, &p, &v, TensorForm::Enthalpy).unwrap();
    let b = stress_energy(&st, &p, &v, TensorForm::Pressure).unwrap();
    for j in 0..g.n() {
        assert!((a.t00.values()[j] - b.t00.values()[j] + 0.7 * 1.5).abs() < 1e-12);
        assert!((a.txx.values()[j] - b.txx.values()[j] - 0.7 * 1.5).abs() < 1e-12);
        assert_eq!(a.t0x.values()[j], b.t0x.values()[j]);
    }
    assert!(stress_energy(&st, &PhysicalParams::default(), &v, TensorForm::Enthalpy).is_err());
}

#[test]
fn quantum_potential_matches_the_bohm_potential() {
    let g = Grid1D::new(64, 20.0).unwrap();
    let p = PhysicalParams { c: 10.0, ..Default::default() };
    let rho = random_positive_field(g, 5, 4, 0.5);
    let st = RelFluidState::new(rho.clone(), ScalarField::constant(g, 0.0), 0.0, 10.0).unwrap();
    assert_eq!(quantum_potential(&st, &p).unwrap(), bohm_potential(&rho, &p, BohmForm::Quantum).unwrap());
}

#[test]
fn recovery_refuses_superluminal_momentum() {
    let g = Grid1D::new(8, 1.0).unwrap();
    let p = PhysicalParams { c: 2.0, ..Default::default() };
    let e = ScalarField::constant(g, 1.0);
    let m = ScalarField::constant(g, 1.0);
    let guess = RelFluidState::new(ScalarField::constant(g, 1.0), ScalarField::constant(g, 0.0), 0.0, 2.0).unwrap();
    let err = primitive_recovery(&e, &m, &p, &ScalarField::constant(g, 0.0), &guess).unwrap_err();
    assert!(matches!(err, Error::Recovery { index: 0, .. }));
}

#[test]
fn step_enforces_the_light_cone_condition() {
    let g = Grid1D::new(32, 10.0).unwrap();
    let p = PhysicalParams { c: 10.0, ..Default::default() };
    let st = RelFluidState::new(ScalarField::constant(g, 1.0), ScalarField::constant(g, 0.0), 0.0, 10.0).unwrap();
    let zero = ScalarField::constant(g, 0.0);
    assert!(rel_fluid_step(&st, &p, &zero, 0.5 * g.dx() / 10.0 * 1.01).is_err());
    assert!(rel_fluid_step(&st, &p, &zero, 0.5 * g.dx() / 10.0).is_ok());
}

#[test]
fn uniform_boosted_fluid_stays_uniform() {
    let g = Grid1D::new(32, 10.0).unwrap();
    let p = PhysicalParams { c: 5.0, kt: 0.2, ..Default::default() };
    let st = RelFluidState::new(ScalarField::constant(g, 2.0), ScalarField::constant(g, 3.0), 0.0, 5.0).unwrap();
    let zero = ScalarField::constant(g, 0.0);
    let out = rel_fluid_evolve(&st, &p, &zero, 0.5, 0.02).unwrap();
    assert!(out.rho.values().iter().all(|r| (r - 2.0).abs() < 1e-12));
    assert!(out.v.values().iter().all(|u| (u - 3.0).abs() < 1e-12));
    assert_eq!(out.time, 0.5);
}

#[test]
fn isothermal_sound_wave_inverts_after_half_a_period() {
    // Linear standing wave with speed sqrt(kT / m); a tiny hbar keeps dispersion out.
    let g = Grid1D::new(32, 20.0).unwrap();
    let (kt, c, eps) = (0.01, 20.0, 1e-5);
    let p = PhysicalParams { hbar: 1e-8, kt, c, ..Default::default() };
    let k = 2.0 * PI / g.length();
    let rho = ScalarField::from_fn(g, |x| 1.0 + eps * (k * x).cos()).unwrap();
    let st = RelFluidState::new(rho, ScalarField::constant(g, 0.0), 0.0, c).unwrap();
    let zero = ScalarField::constant(g, 0.0);
    let half = PI / (kt.sqrt() * k);
    let out = rel_fluid_evolve(&st, &p, &zero, half, 0.5 * g.dx() / c).unwrap();
    let want = ScalarField::from_fn(g, |x| 1.0 - eps * (k * x).cos()).unwrap();
    let err = out.rho.zip_map(&want, |a, b| a - b).max_abs();
    assert!(err < 0.01 * eps, "{err:e}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn recovery_inverts_the_tensor(seed in 0u64..1000, c in 3.0f64..60.0, frac in -0.9f64..0.9, kt in 0.0f64..1.0) {
        let g = Grid1D::new(32, 10.0).unwrap();
        let p = PhysicalParams { c, kt, ..Default::default() };
        let rho = random_positive_field(g, seed, 3, 0.5);
        let k = 2.0 * PI / g.length();
        let vel = ScalarField::from_fn(g, |x| frac * c * (k * x).cos()).unwrap();
        let pot = ScalarField::from_fn(g, |x| 0.2 * (k * x).sin()).unwrap();
        let st = RelFluidState::new(rho, vel, 0.0, c).unwrap();
        let (e, m) = conserved(&st, &p, &pot).unwrap();
        let guess = RelFluidState { rho: st.rho.map(|r| 1.3 * r), v: ScalarField::constant(g, 0.0), time: 0.0 };
        let out = primitive_recovery(&e, &m, &p, &pot, &guess).unwrap();
        prop_assert!(out.rho.zip_map(&st.rho, |a, b| (a - b) / b).max_abs() < 1e-10);
        prop_assert!(out.v.zip_map(&st.v, |a, b| a - b).max_abs() < 1e-10 * c);
    }

    #[test]
    fn energy_exceeds_momentum_flux(seed in 0u64..1000, frac in -0.99f64..0.99) {
        let g = Grid1D::new(32, 10.0).unwrap();
        let p = PhysicalParams { c: 4.0, kt: 0.3, ..Default::default() };
        let rho = random_positive_field(g, seed, 3, 0.3);
        let st = RelFluidState::new(rho, ScalarField::constant(g, frac * 4.0), 0.0, 4.0).unwrap();
        let (e, m) = conserved(&st, &p, &ScalarField::constant(g, 0.0)).unwrap();
        prop_assert!(e.values().iter().zip(m.values()).all(|(e, m)| *e > m.abs() * 4.0));
    }
}
