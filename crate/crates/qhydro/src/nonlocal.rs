//! Non-local free energy: exact convolution, Taylor truncation, retarded
//! evaluation and the variational chemical potential.

use crate::error::{Error, Result};
use crate::fields::{circular_sum, dalembertian, spectral_power, Order, ScalarField, SpacetimeField};
use crate::kernel::{kernel_second_moment, Kernel};
use crate::params::PhysicalParams;
use crate::potentials::log_derivatives;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Retardation {
    Retarded,
    /// Average of the retarded and advanced evaluations.
    Symmetric,
}

fn log_clamped(rho: &ScalarField, p: &PhysicalParams) -> Result<ScalarField> {
    rho.check_finite("density")?;
    Ok(rho.map(|r| p.clamp(r).ln()))
}

/// kT (u * ln rho) + V.
pub fn nonlocal_free_energy(rho: &ScalarField, k: &Kernel, v: &ScalarField, p: &PhysicalParams) -> Result<ScalarField> {
    let ln = log_clamped(rho, p)?;
    let w = k.grid_weights(rho.grid())?;
    let conv = ScalarField::raw(rho.grid(), circular_sum(ln.values(), &w));
    Ok(conv.zip_map(v, |c, v| p.kt * c + v))
}

/// kT ln rho + V - (kT a^2 / 2) lap ln rho.
pub fn truncated_free_energy(rho: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> Result<ScalarField> {
    let ln = log_clamped(rho, p)?;
    let (_, l2) = log_derivatives(rho, p)?;
    let local = ln.zip_map(v, |l, v| p.kt * l + v);
    let half = 0.5 * p.kt * p.a * p.a;
    Ok(local.zip_map(&l2, |f, d| f - half * d))
}

/// max |exact - truncated| with `a` taken from the kernel's second moment.
pub fn truncation_residual(rho: &ScalarField, k: &Kernel, v: &ScalarField, p: &PhysicalParams) -> Result<f64> {
    let p = PhysicalParams { a: kernel_second_moment(k)?.sqrt(), ..*p };
    let exact = nonlocal_free_energy(rho, k, v, &p)?;
    let trunc = truncated_free_energy(rho, &p, v)?;
    Ok(exact.zip_map(&trunc, |a, b| a - b).max_abs())
}

/// Interpolation nodes and cubic Lagrange weights for time `t` in a history.
fn time_stencil(hist: &SpacetimeField, t: f64) -> Option<([usize; 4], [f64; 4])> {
    let s = (t - hist.t0()) / hist.dt();
    let last = hist.len() - 1;
    if s < -1e-9 || s > last as f64 + 1e-9 {
        return None;
    }
    let base = (s.floor() as isize - 1).clamp(0, last as isize - 3) as usize;
    let nodes = [base, base + 1, base + 2, base + 3];
    let mut w = [0.0; 4];
    for (a, wa) in w.iter_mut().enumerate() {
        *wa = (0..4)
            .filter(|&b| b != a)
            .map(|b| (s - nodes[b] as f64) / (nodes[a] as f64 - nodes[b] as f64))
            .product();
    }
    Some((nodes, w))
}

fn retarded_sum(ln: &SpacetimeField, w: &[f64], t: f64, c: f64, sign: f64) -> Result<Vec<f64>> {
    let g = ln.grid();
    let n = g.n();
    let dx = g.dx();
    let mut out = vec![0.0; n];
    for (j, &wj) in w.iter().enumerate() {
        if wj == 0.0 {
            continue;
        }
        let offset = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
        let delay = if c.is_infinite() { 0.0 } else { offset.abs() * dx / c };
        let tj = t - sign * delay;
        let (nodes, lw) = time_stencil(ln, tj).ok_or_else(|| {
            Error::History(format!(
                "time {tj:.6} outside history [{:.6}, {:.6}]; need (L/2)/c = {:.6} of depth on each used side",
                ln.t0(),
                ln.time(ln.len() - 1),
                0.5 * g.length() / c
            ))
        })?;
        for (i, o) in out.iter_mut().enumerate() {
            let src = (i + n - j) % n;
            let val: f64 = (0..4).map(|q| lw[q] * ln.snapshot(nodes[q])[src]).sum();
            *o += wj * val;
        }
    }
    Ok(out)
}

/// kT int u(x - x') ln rho(x', t - |x - x'|/c) dx' + V at snapshot `index`.
pub fn retarded_free_energy(
    hist: &SpacetimeField,
    k: &Kernel,
    p: &PhysicalParams,
    v: &ScalarField,
    index: usize,
    mode: Retardation,
) -> Result<ScalarField> {
    if index >= hist.len() {
        return Err(Error::History(format!("time index {index} beyond history of {}", hist.len())));
    }
    let ln = hist.map(|r| p.clamp(r).ln());
    let w = k.grid_weights(hist.grid())?;
    let t = hist.time(index);
    let conv = match mode {
        Retardation::Retarded => retarded_sum(&ln, &w, t, p.c, 1.0)?,
        Retardation::Symmetric => {
            let r = retarded_sum(&ln, &w, t, p.c, 1.0)?;
            let a = retarded_sum(&ln, &w, t, p.c, -1.0)?;
            r.iter().zip(&a).map(|(r, a)| 0.5 * (r + a)).collect()
        }
    };
    Ok(ScalarField::raw(hist.grid(), conv).zip_map(v, |c, v| p.kt * c + v))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetardedCorrection {
    /// (kT a^2 / 2) box ln rho, the Lorentz-invariant constitutive form.
    pub constitutive: ScalarField,
    /// (kT m2 / 2)(lap + c^-2 d2/dt2) ln rho with m2 = -a^2, from a direct expansion.
    pub direct: ScalarField,
}

pub fn truncated_retarded_correction(hist: &SpacetimeField, p: &PhysicalParams, index: usize) -> Result<RetardedCorrection> {
    let ln = hist.map(|r| p.clamp(r).ln());
    let half = 0.5 * p.kt * p.a * p.a;
    let boxed = dalembertian(&ln, index, p.c)?;
    let tt = ln.time_derivative(index, Order::Second)?;
    let xx = ScalarField::raw(hist.grid(), spectral_power(ln.snapshot(index), hist.grid(), 2));
    let inv_c2 = if p.c.is_infinite() { 0.0 } else { 1.0 / (p.c * p.c) };
    Ok(RetardedCorrection {
        constitutive: boxed.map(|b| half * b),
        direct: xx.zip_map(&tt, |x, t| -half * (x + inv_c2 * t)),
    })
}

/// Side-by-side comparison of the two second-order forms of the retarded energy.
#[derive(Clone, Debug, PartialEq)]
pub struct RetardedReport {
    pub time: f64,
    pub c: f64,
    pub a2: f64,
    /// max |spatial part of the constitutive form - spatial part of the direct form|
    pub spatial_difference: f64,
    /// max |(kT a^2/2) c^-2 d2/dt2 ln rho|, carried with + sign by the constitutive form
    pub time_term: f64,
    /// max |constitutive - direct|, which is twice the time term
    pub sign_discrepancy: f64,
    /// max |f_symmetric - f_instant - time term| for each sign choice
    pub residual_vs_constitutive: f64,
    pub residual_vs_direct: f64,
    /// max |f_mode - f_instant - direct time term| for each retardation mode
    pub linear_retarded: f64,
    pub linear_symmetric: f64,
    /// kT m1 / c max |d/dt ln rho| with m1 = int |xi| u
    pub linear_predicted: f64,
}

impl RetardedReport {
    pub fn rows(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("time", self.time),
            ("c", self.c),
            ("a2", self.a2),
            ("spatial_difference", self.spatial_difference),
            ("time_term", self.time_term),
            ("sign_discrepancy", self.sign_discrepancy),
            ("residual_vs_constitutive", self.residual_vs_constitutive),
            ("residual_vs_direct", self.residual_vs_direct),
            ("linear_retarded", self.linear_retarded),
            ("linear_symmetric", self.linear_symmetric),
            ("linear_predicted", self.linear_predicted),
        ]
    }
}

pub fn retarded_comparison(
    hist: &SpacetimeField,
    k: &Kernel,
    p: &PhysicalParams,
    v: &ScalarField,
    index: usize,
) -> Result<RetardedReport> {
    let a2 = kernel_second_moment(k)?;
    let m2 = -a2;
    let p = PhysicalParams { a: a2.sqrt(), ..*p };
    let ln = hist.map(|r| p.clamp(r).ln());
    let g = hist.grid();
    let inv_c2 = 1.0 / (p.c * p.c);
    let lap = spectral_power(ln.snapshot(index), g, 2);
    let tt = ln.time_derivative(index, Order::Second)?;
    let t1 = ln.time_derivative(index, Order::First)?;

    // the constitutive form is (kT a^2/2)(c^-2 d_tt - lap); the direct form is (kT m2/2)(lap + c^-2 d_tt)
    let spatial_constitutive: Vec<f64> = lap.iter().map(|l| -0.5 * p.kt * a2 * l).collect();
    let spatial_direct: Vec<f64> = lap.iter().map(|l| 0.5 * p.kt * m2 * l).collect();
    let spatial_difference =
        spatial_constitutive.iter().zip(&spatial_direct).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let time_constitutive = tt.map(|d| 0.5 * p.kt * a2 * inv_c2 * d);
    let time_direct = tt.map(|d| 0.5 * p.kt * m2 * inv_c2 * d);
    let corr = truncated_retarded_correction(hist, &p, index)?;
    let sign_discrepancy = corr.constitutive.zip_map(&corr.direct, |a, b| a - b).max_abs();

    let instant = nonlocal_free_energy(&hist.field(index), k, v, &p)?;
    let sym = retarded_free_energy(hist, k, &p, v, index, Retardation::Symmetric)?;
    let ret = retarded_free_energy(hist, k, &p, v, index, Retardation::Retarded)?;
    let excess = |f: &ScalarField, term: &ScalarField| {
        (0..g.n()).fold(0.0f64, |m, j| m.max((f.values()[j] - instant.values()[j] - term.values()[j]).abs()))
    };
    let m1 = k.moment(1);
    Ok(RetardedReport {
        time: hist.time(index),
        c: p.c,
        a2,
        spatial_difference,
        time_term: time_constitutive.max_abs(),
        sign_discrepancy,
        residual_vs_constitutive: excess(&sym, &time_constitutive),
        residual_vs_direct: excess(&sym, &time_direct),
        linear_retarded: excess(&ret, &time_direct),
        linear_symmetric: excess(&sym, &time_direct),
        linear_predicted: p.kt * m1 / p.c * t1.max_abs(),
    })
}

/// Gradient form: sum rho (kT ln rho + V + (kT a^2/2)(grad ln rho)^2) dx.
pub fn free_energy_functional(rho: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> Result<f64> {
    rho.check_finite("density")?;
    let r: Vec<f64> = rho.values().iter().map(|&x| p.clamp(x)).collect();
    let d1 = spectral_power(&r, rho.grid(), 1);
    let half = 0.5 * p.kt * p.a * p.a;
    let sum: f64 = (0..r.len())
        .map(|j| {
            let l1 = d1[j] / r[j];
            r[j] * (p.kt * r[j].ln() + v.values()[j] + half * l1 * l1)
        })
        .sum();
    Ok(sum * rho.grid().dx())
}

/// Laplacian form: sum rho (kT ln rho + V - (kT a^2/2) lap ln rho) dx.
pub fn free_energy_functional_laplacian(rho: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> Result<f64> {
    let (_, l2) = log_derivatives(rho, p)?;
    let half = 0.5 * p.kt * p.a * p.a;
    let sum: f64 = (0..rho.grid().n())
        .map(|j| {
            let r = p.clamp(rho.values()[j]);
            r * (p.kt * r.ln() + v.values()[j] - half * l2.values()[j])
        })
        .sum();
    Ok(sum * rho.grid().dx())
}

/// Numeric functional derivative by central single-cell perturbations.
pub fn functional_derivative_check(rho: &ScalarField, p: &PhysicalParams, v: &ScalarField) -> Result<ScalarField> {
    rho.check_finite("density")?;
    let h = 1e-6 * rho.max_abs();
    if let Some(j) = rho.values().iter().position(|&r| r - h < p.rho_floor) {
        return Err(Error::Vacuum(format!(
            "perturbation of size {h:.3e} drives point {j} (rho = {:.3e}) below the floor",
            rho.values()[j]
        )));
    }
    let dx = rho.grid().dx();
    let mut work = rho.values().to_vec();
    let mut out = Vec::with_capacity(work.len());
    for j in 0..work.len() {
        let r0 = work[j];
        work[j] = r0 + h;
        let up = free_energy_functional(&ScalarField::raw(rho.grid(), work.clone()), p, v)?;
        work[j] = r0 - h;
        let down = free_energy_functional(&ScalarField::raw(rho.grid(), work.clone()), p, v)?;
        work[j] = r0;
        out.push((up - down) / (2.0 * h * dx));
    }
    Ok(ScalarField::raw(rho.grid(), out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Grid1D;
    use crate::kernel::Dim;

    fn kernel() -> Kernel {
        Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One).unwrap()
    }

    #[test]
    fn uniform_density_gives_local_energy() {
        let g = Grid1D::new(128, 40.0).unwrap();
        let p = PhysicalParams { kt: 0.7, a: 1.3, ..Default::default() };
        let rho = ScalarField::constant(g, 2.5);
        let v = ScalarField::from_fn(g, |x| 0.1 * x).unwrap();
        let want = v.map(|v| 0.7 * 2.5f64.ln() + v);
        for f in [nonlocal_free_energy(&rho, &kernel(), &v, &p).unwrap(), truncated_free_energy(&rho, &p, &v).unwrap()] {
            assert!(f.zip_map(&want, |a, b| a - b).max_abs() < 1e-13);
        }
    }

    #[test]
    fn zero_temperature_leaves_potential() {
        let g = Grid1D::new(64, 40.0).unwrap();
        let p = PhysicalParams::default();
        let rho = ScalarField::from_fn(g, |x| 1.0 + 0.5 * (0.3 * x).cos()).unwrap();
        let v = ScalarField::from_fn(g, |x| x * x).unwrap();
        assert_eq!(nonlocal_free_energy(&rho, &kernel(), &v, &p).unwrap(), v);
    }

    #[test]
    fn gaussian_log_density_has_constant_correction() {
        let g = Grid1D::new(512, 40.0).unwrap();
        let p = PhysicalParams { kt: 1.0, a: 2f64.sqrt(), rho_floor: 1e-300, ..Default::default() };
        let rho = ScalarField::from_fn(g, |x| (-x * x).exp()).unwrap();
        let v = ScalarField::constant(g, 0.0);
        let f = truncated_free_energy(&rho, &p, &v).unwrap();
        for (j, x) in g.coords().into_iter().enumerate() {
            if x.abs() <= 3.0 {
                assert!((f.values()[j] - (-x * x + 2.0)).abs() < 1e-8, "x = {x}");
            }
        }
    }

    #[test]
    fn time_stencil_reproduces_cubics() {
        let g = Grid1D::new(8, 1.0).unwrap();
        let h = SpacetimeField::from_fn(g, 0.0, 0.5, 6, |_, t| t * t * t - t).unwrap();
        for t in [0.0, 0.3, 1.1, 2.5] {
            let (nodes, w) = time_stencil(&h, t).unwrap();
            let val: f64 = (0..4).map(|q| w[q] * h.snapshot(nodes[q])[0]).sum();
            assert!((val - (t * t * t - t)).abs() < 1e-13);
        }
        assert!(time_stencil(&h, -0.1).is_none());
    }

    #[test]
    fn short_history_is_rejected() {
        let g = Grid1D::new(64, 40.0).unwrap();
        let p = PhysicalParams { kt: 1.0, c: 1.0, ..Default::default() };
        let h = SpacetimeField::from_fn(g, 0.0, 0.1, 6, |_, _| 1.0).unwrap();
        let v = ScalarField::constant(g, 0.0);
        let err = retarded_free_energy(&h, &kernel(), &p, &v, 5, Retardation::Retarded);
        assert!(matches!(err, Err(Error::History(_))));
    }

    #[test]
    fn two_energy_forms_agree() {
        let g = Grid1D::new(256, 40.0).unwrap();
        let p = PhysicalParams { kt: 1.0, a: 2f64.sqrt(), ..Default::default() };
        let rho = ScalarField::from_fn(g, |x| 0.05 + (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt()).unwrap();
        let v = ScalarField::constant(g, 0.0);
        let a = free_energy_functional(&rho, &p, &v).unwrap();
        let b = free_energy_functional_laplacian(&rho, &p, &v).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn uniform_functional_energy() {
        let g = Grid1D::new(32, 8.0).unwrap();
        let p = PhysicalParams { kt: 2.0, a: 1.0, ..Default::default() };
        let rho = ScalarField::constant(g, 0.5);
        let v = ScalarField::constant(g, 0.0);
        let f = free_energy_functional(&rho, &p, &v).unwrap();
        assert!((f - 0.5 * 2.0 * 0.5f64.ln() * 8.0).abs() < 1e-13);
    }

    #[test]
    fn perturbation_below_floor_rejected() {
        let g = Grid1D::new(16, 8.0).unwrap();
        let p = PhysicalParams { kt: 1.0, ..Default::default() };
        let mut vals = vec![1.0; 16];
        vals[3] = 1e-13;
        let rho = ScalarField::new(g, vals).unwrap();
        let v = ScalarField::constant(g, 0.0);
        assert!(matches!(functional_derivative_check(&rho, &p, &v), Err(Error::Vacuum(_))));
    }
}
