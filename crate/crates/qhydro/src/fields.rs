//! Periodic 1D grids, sampled fields and the differential operators built on them.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::kernel::Kernel;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    n: usize,
    length: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::Grid(format!("n = {n} must be a power of two and at least 8")));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::Grid(format!("length = {length} must be positive")));
        }
        Ok(Grid1D { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.length + j as f64 * self.dx()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed angular wavenumber of FFT bin `j`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        2.0 * PI * m / self.length
    }
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { what, index }),
        None => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: Grid1D,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Length { expected: grid.n(), got: values.len() });
        }
        check_finite(&values, "field")?;
        Ok(ScalarField { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.coords().into_iter().map(f).collect())
    }

    pub fn constant(grid: Grid1D, c: f64) -> Self {
        ScalarField { grid, values: vec![c; grid.n()] }
    }

    pub(crate) fn raw(grid: Grid1D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        ScalarField::raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        ScalarField::raw(self.grid, values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Rectangle-rule integral, which is the trapezoid rule on a periodic grid.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.dx()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn check_finite(&self, what: &'static str) -> Result<()> {
        check_finite(&self.values, what)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    grid: Grid1D,
    values: Vec<Complex64>,
}

impl ComplexField {
    pub fn new(grid: Grid1D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::Length { expected: grid.n(), got: values.len() });
        }
        if let Some(index) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite { what: "complex field", index });
        }
        Ok(ComplexField { grid, values })
    }

    pub fn from_fn(grid: Grid1D, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        Self::new(grid, grid.coords().into_iter().map(f).collect())
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn density(&self) -> ScalarField {
        ScalarField::raw(self.grid, self.values.iter().map(|z| z.norm_sqr()).collect())
    }

    pub fn norm(&self) -> f64 {
        self.density().integral()
    }
}

/// Snapshots of a field at uniformly spaced times.
#[derive(Clone, Debug, PartialEq)]
pub struct SpacetimeField {
    grid: Grid1D,
    t0: f64,
    dt: f64,
    snapshots: Vec<Vec<f64>>,
}

impl SpacetimeField {
    pub fn new(grid: Grid1D, t0: f64, dt: f64, snapshots: Vec<Vec<f64>>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::History(format!("time step {dt} must be positive")));
        }
        if snapshots.len() < 5 {
            return Err(Error::History(format!("{} snapshots given, at least 5 required", snapshots.len())));
        }
        for s in &snapshots {
            if s.len() != grid.n() {
                return Err(Error::Length { expected: grid.n(), got: s.len() });
            }
            check_finite(s, "history")?;
        }
        Ok(SpacetimeField { grid, t0, dt, snapshots })
    }

    pub fn from_fn(grid: Grid1D, t0: f64, dt: f64, count: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let xs = grid.coords();
        let snapshots = (0..count)
            .map(|i| {
                let t = t0 + i as f64 * dt;
                xs.iter().map(|&x| f(x, t)).collect()
            })
            .collect();
        Self::new(grid, t0, dt, snapshots)
    }

    pub fn grid(&self) -> Grid1D {
        self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.snapshots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.snapshots.is_empty()
    }

    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 * self.dt
    }

    pub fn snapshot(&self, i: usize) -> &[f64] {
        &self.snapshots[i]
    }

    pub fn field(&self, i: usize) -> ScalarField {
        ScalarField::raw(self.grid, self.snapshots[i].clone())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        let snapshots = self.snapshots.iter().map(|s| s.iter().map(|&v| f(v)).collect()).collect();
        SpacetimeField { snapshots, ..*self }
    }

    fn interior(&self, index: usize) -> Result<()> {
        if index < 2 || index + 2 >= self.snapshots.len() {
            return Err(Error::History(format!(
                "time index {index} needs two snapshots on each side (history has {})",
                self.snapshots.len()
            )));
        }
        Ok(())
    }

    /// Fourth-order central time derivative (order 1 or 2) at snapshot `index`.
    pub fn time_derivative(&self, index: usize, order: Order) -> Result<ScalarField> {
        self.interior(index)?;
        let s = |k: usize| &self.snapshots[k];
        let (m2, m1, c0, p1, p2) = (s(index - 2), s(index - 1), s(index), s(index + 1), s(index + 2));
        let values = (0..self.grid.n())
            .map(|j| match order {
                Order::First => (m2[j] - 8.0 * m1[j] + 8.0 * p1[j] - p2[j]) / (12.0 * self.dt),
                Order::Second => {
                    (-m2[j] + 16.0 * m1[j] - 30.0 * c0[j] + 16.0 * p1[j] - p2[j]) / (12.0 * self.dt * self.dt)
                }
            })
            .collect();
        Ok(ScalarField::raw(self.grid, values))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    First,
    Second,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DerivMode {
    #[default]
    Spectral,
    FourthOrder,
}

/// Multiply the spectrum by (ik)^power. Odd powers drop the unpaired Nyquist mode.
pub(crate) fn spectral_power(values: &[f64], grid: Grid1D, power: u32) -> Vec<f64> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        p.plan_fft_forward(n).process(&mut buf);
        for (j, z) in buf.iter_mut().enumerate() {
            if power % 2 == 1 && j == n / 2 {
                *z = Complex64::new(0.0, 0.0);
                continue;
            }
            *z *= Complex64::new(0.0, grid.wavenumber(j)).powu(power);
        }
        p.plan_fft_inverse(n).process(&mut buf);
    });
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|z| z.re * scale).collect()
}

/// Complex counterpart of `spectral_power`.
pub(crate) fn spectral_power_complex(values: &[Complex64], grid: Grid1D, power: u32) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        p.plan_fft_forward(n).process(&mut buf);
        for (j, z) in buf.iter_mut().enumerate() {
            if power % 2 == 1 && j == n / 2 {
                *z = Complex64::new(0.0, 0.0);
                continue;
            }
            *z *= Complex64::new(0.0, grid.wavenumber(j)).powu(power);
        }
        p.plan_fft_inverse(n).process(&mut buf);
    });
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|z| z * scale).collect()
}

/// Apply a diagonal multiplier in Fourier space.
pub(crate) fn fourier_multiply(values: &mut [Complex64], multiplier: &[Complex64]) {
    let n = values.len();
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        p.plan_fft_forward(n).process(values);
        let scale = 1.0 / n as f64;
        for (z, m) in values.iter_mut().zip(multiplier) {
            *z *= m * scale;
        }
        p.plan_fft_inverse(n).process(values);
    });
}

pub(crate) fn fd4(values: &[f64], dx: f64, order: Order) -> Vec<f64> {
    let n = values.len();
    let at = |j: isize| values[j.rem_euclid(n as isize) as usize];
    (0..n as isize)
        .map(|j| match order {
            Order::First => (-at(j + 2) + 8.0 * at(j + 1) - 8.0 * at(j - 1) + at(j - 2)) / (12.0 * dx),
            Order::Second => {
                (-at(j + 2) + 16.0 * at(j + 1) - 30.0 * at(j) + 16.0 * at(j - 1) - at(j - 2)) / (12.0 * dx * dx)
            }
        })
        .collect()
}

pub(crate) fn derivative_values(values: &[f64], grid: Grid1D, order: Order, mode: DerivMode) -> Vec<f64> {
    match mode {
        DerivMode::Spectral => spectral_power(values, grid, if order == Order::First { 1 } else { 2 }),
        DerivMode::FourthOrder => fd4(values, grid.dx(), order),
    }
}

pub fn spatial_derivative(field: &ScalarField, order: Order, mode: DerivMode) -> Result<ScalarField> {
    field.check_finite("derivative input")?;
    Ok(ScalarField::raw(field.grid, derivative_values(&field.values, field.grid, order, mode)))
}

/// Spectral derivative of arbitrary order, used where third derivatives are needed.
pub fn spectral_derivative_n(field: &ScalarField, power: u32) -> Result<ScalarField> {
    field.check_finite("derivative input")?;
    Ok(ScalarField::raw(field.grid, spectral_power(&field.values, field.grid, power)))
}

/// (1/c^2) d2/dt2 - d2/dx2 at snapshot `index`.
pub fn dalembertian(hist: &SpacetimeField, index: usize, c: f64) -> Result<ScalarField> {
    if !(c > 0.0) {
        return Err(Error::param("c", "signal speed must be positive"));
    }
    let tt = hist.time_derivative(index, Order::Second)?;
    let xx = spectral_power(hist.snapshot(index), hist.grid, 2);
    let inv_c2 = if c.is_infinite() { 0.0 } else { 1.0 / (c * c) };
    Ok(tt.zip_map(&ScalarField::raw(hist.grid, xx), |t, x| inv_c2 * t - x))
}

/// Direct circular convolution with the kernel sampled on the grid.
pub fn convolve_periodic(field: &ScalarField, kernel: &Kernel) -> Result<ScalarField> {
    field.check_finite("convolution input")?;
    let w = kernel.grid_weights(field.grid)?;
    Ok(ScalarField::raw(field.grid, circular_sum(&field.values, &w)))
}

/// out[i] = sum_j w[j] f[i - j], with w indexed by circular offset.
pub(crate) fn circular_sum(f: &[f64], w: &[f64]) -> Vec<f64> {
    let n = f.len();
    let offsets: Vec<(usize, f64)> = w.iter().copied().enumerate().filter(|&(_, wj)| wj != 0.0).collect();
    (0..n)
        .map(|i| offsets.iter().map(|&(j, wj)| wj * f[(i + n - j) % n]).sum())
        .collect()
}
