//! Numerical machinery for the fractional heat operator `(d/dt - Delta)^s`,
//! its Caffarelli-Silvestre type extension, and a Giga-Kohn type monotone
//! functional for backward solutions of the fractional Lane-Emden problem
//! `(-d/dt - Delta)^s u = |u|^(p-1) u`.
//!
//! * [`kernels`] — parameters, exponents and closed-form kernels.
//! * [`quadrature`] — Gauss rules, double-exponential rules and the
//!   Gaussian-, binomial- and singular-weighted integrators built on them.
//! * [`fields`] — boundary data, extensions and static fields, with jets.
//! * [`extension`] — fractional operators, Poisson extension, traces.
//! * [`functionals`] — `J`, `D`, the rescaled energy and the elliptic energy.
//! * [`lift`] — the high-dimensional elliptic lift in reduced coordinates.
//! * [`harness`] — scenarios, checks, reports.

pub mod error;
pub mod extension;
pub mod fields;
pub mod functionals;
pub mod harness;
pub mod kernels;
pub mod lift;
pub mod quadrature;
pub mod special;

pub use error::{Error, Result};
pub use fields::{TimePowerExtension, TimePowerSolution};
pub use kernels::{FracKernels, FracParams, KernelConstants, MAX_DIM};
