//! Radial interaction kernels with unit normalization and negative second moment.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fields::Grid1D;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Dim {
    #[default]
    One,
    Three,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelFamily {
    /// amp1 * g(sigma1) - amp2 * g(sigma2) with normalized Gaussians g.
    DiffGauss { amp1: f64, sigma1: f64, amp2: f64, sigma2: f64 },
    /// Radial samples u(i * spacing), i = 0.., already normalized.
    Tabulated { spacing: f64, samples: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Kernel {
    family: KernelFamily,
    dim: Dim,
}

fn gauss(r: f64, sigma: f64, dim: Dim) -> f64 {
    let e = (-0.5 * r * r / (sigma * sigma)).exp();
    match dim {
        Dim::One => e / ((2.0 * PI).sqrt() * sigma),
        Dim::Three => e / ((2.0 * PI).powf(1.5) * sigma.powi(3)),
    }
}

/// Adaptive double-exponential quadrature over fixed panels.
fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * h;
            quadrature::integrate(&f, lo, lo + h, 1e-16).integral
        })
        .sum()
}

impl Kernel {
    pub fn diff_gauss(amp1: f64, sigma1: f64, amp2: f64, sigma2: f64, dim: Dim) -> Result<Self> {
        let all = [amp1, sigma1, amp2, sigma2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Kernel("parameters must be finite".into()));
        }
        if sigma1 <= 0.0 || sigma2 <= 0.0 {
            return Err(Error::Kernel("widths must be positive".into()));
        }
        if ((amp1 - amp2) - 1.0).abs() > 1e-12 {
            return Err(Error::Kernel(format!("amplitudes must satisfy A - B = 1, got {}", amp1 - amp2)));
        }
        Ok(Kernel { family: KernelFamily::DiffGauss { amp1, sigma1, amp2, sigma2 }, dim })
    }

    /// Radial samples at multiples of `spacing`, rescaled to unit integral.
    pub fn tabulated(spacing: f64, samples: Vec<f64>, dim: Dim) -> Result<Self> {
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(Error::Kernel("spacing must be positive".into()));
        }
        if samples.is_empty() || samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::Kernel("samples must be non-empty and finite".into()));
        }
        let mass = match dim {
            Dim::One => spacing * (samples[0] + 2.0 * samples[1..].iter().sum::<f64>()),
            Dim::Three => {
                4.0 * PI
                    * spacing
                    * samples.iter().enumerate().map(|(i, u)| (i as f64 * spacing).powi(2) * u).sum::<f64>()
            }
        };
        if !(mass.abs() > 0.0) {
            return Err(Error::Kernel("samples have zero mass".into()));
        }
        let samples = samples.into_iter().map(|u| u / mass).collect();
        Ok(Kernel { family: KernelFamily::Tabulated { spacing, samples }, dim })
    }

    /// Single-cell kernel: convolution with it is the identity on grids of this spacing.
    pub fn delta(dx: f64) -> Result<Self> {
        Self::tabulated(dx, vec![1.0 / dx], Dim::One)
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// u_s(r) = u(r/s) / s^d.
    pub fn dilate(&self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Kernel("dilation factor must be positive".into()));
        }
        match &self.family {
            KernelFamily::DiffGauss { amp1, sigma1, amp2, sigma2 } => {
                Self::diff_gauss(*amp1, sigma1 * s, *amp2, sigma2 * s, self.dim)
            }
            KernelFamily::Tabulated { spacing, samples } => Self::tabulated(spacing * s, samples.clone(), self.dim),
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let r = r.abs();
        match &self.family {
            KernelFamily::DiffGauss { amp1, sigma1, amp2, sigma2 } => {
                amp1 * gauss(r, *sigma1, self.dim) - amp2 * gauss(r, *sigma2, self.dim)
            }
            KernelFamily::Tabulated { spacing, samples } => {
                let t = r / spacing;
                let m = samples.len() as isize;
                if t > (m - 1) as f64 {
                    return 0.0;
                }
                let i = t.floor() as isize;
                if (t - i as f64) == 0.0 {
                    return samples[i as usize];
                }
                let at = |k: isize| {
                    let k = k.abs();
                    if k < m {
                        samples[k as usize]
                    } else {
                        0.0
                    }
                };
                // cubic Lagrange through i-1 .. i+2 on the even extension
                let nodes = [i - 1, i, i + 1, i + 2];
                nodes
                    .iter()
                    .map(|&k| {
                        let w: f64 = nodes
                            .iter()
                            .filter(|&&q| q != k)
                            .map(|&q| (t - q as f64) / (k - q) as f64)
                            .product();
                        w * at(k)
                    })
                    .sum()
            }
        }
    }

    /// Radius beyond which the kernel is zero to double precision.
    pub fn support_radius(&self) -> f64 {
        match &self.family {
            KernelFamily::DiffGauss { sigma1, sigma2, .. } => 40.0 * sigma1.max(*sigma2),
            KernelFamily::Tabulated { spacing, samples } => spacing * (samples.len() - 1) as f64,
        }
    }

    fn panels(&self, a: f64, b: f64) -> usize {
        let scale = match &self.family {
            KernelFamily::DiffGauss { sigma1, sigma2, .. } => 0.5 * sigma1.min(*sigma2),
            KernelFamily::Tabulated { spacing, .. } => *spacing,
        };
        (((b - a) / scale).ceil() as usize).clamp(1, 4096)
    }

    /// Radial moment of order p in the kernel's dimension.
    pub fn moment(&self, p: i32) -> f64 {
        let rmax = self.support_radius();
        if rmax == 0.0 {
            // single-sample tabulated kernel: all mass at the origin
            return if p == 0 { 1.0 } else { 0.0 };
        }
        let n = self.panels(0.0, rmax);
        match self.dim {
            Dim::One => 2.0 * integrate(|r| r.powi(p) * self.eval(r), 0.0, rmax, n),
            Dim::Three => 4.0 * PI * integrate(|r| r.powi(p + 2) * self.eval(r), 0.0, rmax, n),
        }
    }

    /// Mass of |u| outside |r| > half_width, 1D only.
    pub fn tail_mass(&self, half_width: f64) -> f64 {
        let rmax = self.support_radius();
        if half_width >= rmax {
            return 0.0;
        }
        let n = self.panels(half_width, rmax);
        2.0 * integrate(|r| self.eval(r).abs(), half_width, rmax, n)
    }

    /// Sampled weights u(xi_j) dx at circular offsets, renormalized to sum to one.
    pub fn grid_weights(&self, grid: Grid1D) -> Result<Vec<f64>> {
        if self.dim != Dim::One {
            return Err(Error::Kernel("grid convolution needs a 1D kernel".into()));
        }
        let tail = self.tail_mass(0.5 * grid.length());
        if tail >= 1e-12 {
            return Err(Error::KernelTail { tail });
        }
        let n = grid.n();
        let dx = grid.dx();
        let mut w: Vec<f64> = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                self.eval(m * dx) * dx
            })
            .collect();
        let total: f64 = w.iter().sum();
        if !(total.abs() > 0.0) {
            return Err(Error::Kernel("kernel is unresolved on this grid".into()));
        }
        w.iter_mut().for_each(|v| *v /= total);
        Ok(w)
    }
}

/// a^2 = -m2, rejecting kernels whose second moment is not negative.
pub fn kernel_second_moment(k: &Kernel) -> Result<f64> {
    let m2 = k.moment(2);
    if m2 >= 0.0 {
        return Err(Error::RepulsiveKernel { m2 });
    }
    Ok(-m2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> Kernel {
        Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::One).unwrap()
    }

    #[test]
    fn normalized_in_both_dimensions() {
        assert!((example().moment(0) - 1.0).abs() < 1e-12);
        let k3 = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::Three).unwrap();
        assert!((k3.moment(0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn example_kernel_squared_length() {
        let a2 = kernel_second_moment(&example()).unwrap();
        assert!((a2 - 2.0).abs() < 2e-10);
    }

    #[test]
    fn three_dimensional_moment_carries_factor_three() {
        let k3 = Kernel::diff_gauss(2.0, 1.0, 1.0, 2.0, Dim::Three).unwrap();
        let a2 = kernel_second_moment(&k3).unwrap();
        assert!((a2 - 6.0).abs() < 1e-9);
    }

    #[test]
    fn single_gaussian_is_repulsive() {
        let k = Kernel::diff_gauss(1.0, 1.0, 0.0, 1.0, Dim::One).unwrap();
        assert!(matches!(kernel_second_moment(&k), Err(Error::RepulsiveKernel { .. })));
    }

    #[test]
    fn amplitude_constraint_enforced() {
        assert!(Kernel::diff_gauss(2.0, 1.0, 0.5, 2.0, Dim::One).is_err());
        assert!(Kernel::diff_gauss(2.0, 0.0, 1.0, 2.0, Dim::One).is_err());
    }

    #[test]
    fn tabulated_kernel_is_normalized_and_interpolates() {
        let h = 0.05;
        let samples: Vec<f64> = (0..400).map(|i| (-(i as f64 * h).powi(2) / 2.0).exp() * 7.0).collect();
        let k = Kernel::tabulated(h, samples, Dim::One).unwrap();
        assert!((k.moment(0) - 1.0).abs() < 1e-6);
        let exact = |r: f64| (-r * r / 2.0).exp() / (2.0 * PI).sqrt();
        for r in [0.0, 0.013, 0.5, 1.234, 3.0] {
            assert!((k.eval(r) - exact(r)).abs() < 1e-6, "r = {r}");
        }
    }

    #[test]
    fn delta_weights_are_identity() {
        let g = Grid1D::new(16, 4.0).unwrap();
        let w = Kernel::delta(g.dx()).unwrap().grid_weights(g).unwrap();
        assert_eq!(w[0], 1.0);
        assert!(w[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn wide_kernel_rejected_by_tail_check() {
        let g = Grid1D::new(64, 8.0).unwrap();
        match example().grid_weights(g) {
            Err(Error::KernelTail { tail }) => assert!(tail > 1e-12),
            other => panic!("expected tail error, got {other:?}"),
        }
    }

    #[test]
    fn weights_sum_to_one() {
        let g = Grid1D::new(256, 40.0).unwrap();
        let w = example().grid_weights(g).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }
}
