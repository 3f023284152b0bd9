//! Evaluable fields: boundary data `u(x, t)`, extensions `U(x0, x, t)` and
//! static fields `V(z0, z)` of the elliptic problem.

mod basic;
mod bump;
mod fundamental;
mod grid;
mod jet;
mod statics;
mod time_power;

pub use basic::{AffineInTime, ConstantField, Negated};
pub use bump::{GaussianBump, TimeProfile};
pub use fundamental::FundamentalSolution;
pub use grid::GridField;
pub use jet::{finite_difference_jet, finite_difference_jet_with_steps, first_order_jet, Gradient, Jet};
pub use statics::{HomogeneousField, Rescaled, StaticBump, StaticField};
pub use time_power::{self_similar_amplitude, TimePowerExtension, TimePowerSolution};

use crate::error::{check_dim, Error, Result};
use crate::quadrature::cached_hermite;

/// Boundary data `u(x, t)` on `R^d x I`.
pub trait BoundaryField: Send + Sync {
    /// Spatial dimension `d`.
    fn dim(&self) -> usize;

    /// `u(x, t)`.
    fn value(&self, x: &[f64], t: f64) -> Result<f64>;

    /// Open time interval on which the field is defined.
    fn time_domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// Whether `u` is independent of `x`.
    fn uniform_in_x(&self) -> bool {
        false
    }

    /// Heat-semigroup average `(e^(sigma Delta) u(., tau))(x)`, the Gaussian
    /// mean of `u(., tau)` with variance `2 sigma` per coordinate. The default
    /// uses a Gauss-Hermite tensor rule with `res` nodes per dimension.
    fn heat_average(&self, x: &[f64], tau: f64, sigma: f64, res: usize) -> Result<f64> {
        let d = self.dim();
        check_dim(d, x.len())?;
        if sigma < 0.0 {
            return Err(Error::domain(format!("sigma = {sigma} must be >= 0")));
        }
        if sigma == 0.0 || self.uniform_in_x() {
            return self.value(x, tau);
        }
        let rule = cached_hermite(res)?;
        let n = rule.len();
        let scale = (4.0 * sigma).sqrt();
        let mut acc = crate::quadrature::CompensatedSum::new();
        let mut y = [0.0; crate::MAX_DIM];
        for idx in 0..n.pow(d as u32) {
            let mut rem = idx;
            let mut w = 1.0;
            for k in 0..d {
                let i = rem % n;
                rem /= n;
                y[k] = x[k] - scale * rule.nodes[i];
                w *= rule.weights[i];
            }
            acc.add(w * self.value(&y[..d], tau)?);
        }
        Ok(acc.value() / std::f64::consts::PI.powf(0.5 * d as f64))
    }
}

/// A field on the upper half-space, `U(x0, x, t)` with `x0 > 0`.
pub trait ExtensionField: Send + Sync {
    /// Spatial dimension `d` (the half-space is `R^(d+1)_+`).
    fn dim(&self) -> usize;

    /// `U(x0, x, t)`.
    fn value(&self, x0: f64, x: &[f64], t: f64) -> Result<f64>;

    /// Value with first and second partials. Defaults to central finite
    /// differences (steps `1e-4 sqrt(t)` in space and `1e-4 t` in time).
    fn jet(&self, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
        finite_difference_jet(self, x0, x, t)
    }

    /// Whether [`ExtensionField::jet`] is exact rather than finite differences.
    fn has_analytic_jet(&self) -> bool {
        false
    }

    /// Whether `U` is independent of `x`.
    fn uniform_in_x(&self) -> bool {
        false
    }

    /// Open time interval on which the field is defined.
    fn time_domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

pub(crate) fn check_time_in(domain: (f64, f64), t: f64) -> Result<()> {
    if t > domain.0 && t < domain.1 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "t = {t} outside the field's time domain ({}, {})",
            domain.0, domain.1
        )))
    }
}

pub(crate) fn check_x0(x0: f64) -> Result<()> {
    if x0 > 0.0 && x0.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("x0 = {x0} must be finite and > 0")))
    }
}
