//! Nonlocal thermodynamic and quantum hydrodynamics on periodic 1-D grids.

pub mod config;
pub mod covariant;
pub mod error;
pub mod fields;
pub mod kernel;
pub mod madelung;
pub mod nonlocal;
pub mod params;
pub mod potentials;
pub mod scenario;
pub mod schrodinger;
pub mod verify;

pub use error::{Error, Result};
pub use fields::{ComplexField, DerivMode, Grid1D, Order, ScalarField, SpacetimeField};
pub use kernel::{Dim, Kernel, KernelFamily};
pub use madelung::{IntegrateOptions, MadelungState, Scheme, Trajectory};
pub use covariant::{RelFluidState, StressEnergy1p1, TensorForm};
pub use params::PhysicalParams;
