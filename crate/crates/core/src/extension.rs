//! The operator layer: the (backward or forward) fractional heat operator
//! applied to boundary data, the extension by Poisson convolution, and the
//! Dirichlet/Neumann traces and PDE residual of extensions.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::fields::{
    finite_difference_jet_with_steps, BoundaryField, ExtensionField, Jet, TimePowerSolution,
};
use crate::kernels::{FracKernels, FracParams};
use crate::quadrature::{check_resolution, log_trapezoid, singular_difference_integral, CompensatedSum};
use crate::special::gamma;

/// Time orientation of the fractional heat operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `(d_t - Delta)^s`: looks into the past, `u(z, t - sigma)`.
    Forward,
    /// `(-d_t - Delta)^s`: looks into the future, `u(z, t + sigma)`.
    Backward,
}

/// `(+-d_t - Delta)^s u(x, t)`:
/// `(1/|Gamma(-s)|) int_0^inf (u(x,t) - (e^(sigma Delta) u(., t -+ sigma))(x)) sigma^(-1-s) dsigma`.
///
/// The spatial convolution with the Gaussian factor of the kernel is the
/// field's heat average (exact for bumps, Gauss-Hermite otherwise); the time
/// integral is the one-sided singular rule split at `sigma = |t|` (or 1 at
/// `t = 0`).
pub fn fractional_heat_apply(
    u: &dyn BoundaryField,
    x: &[f64],
    t: f64,
    direction: Direction,
    params: &FracParams,
    res: usize,
) -> Result<f64> {
    check_dim(u.dim(), x.len())?;
    let sign = match direction {
        Direction::Forward => -1.0,
        Direction::Backward => 1.0,
    };
    let split = if t != 0.0 { t.abs() } else { 1.0 };
    let e = singular_difference_integral(
        |sigma| {
            if sigma == 0.0 {
                u.value(x, t)
            } else {
                u.heat_average(x, t + sign * sigma, sigma, res)
            }
        },
        params.s(),
        split,
        res,
    )?;
    Ok(e.value / gamma(-params.s())?.abs())
}

/// `U(x0, x, t)` of the backward extension problem by Poisson convolution,
/// `(1/Gamma(s)) int_0^inf w^(s-1) e^-w (e^(sigma Delta) u(., t + sigma))(x) dw`
/// with `sigma = x0^2 / 4w`, integrated by the trapezoid rule in `ln w`
/// (step `8/res`).
pub fn extend(u: &dyn BoundaryField, x0: f64, x: &[f64], t: f64, params: &FracParams, res: usize) -> Result<f64> {
    check_dim(u.dim(), x.len())?;
    check_resolution(res)?;
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::domain(format!("x0 = {x0} must be finite and > 0")));
    }
    let s = params.s();
    let h = 8.0 / res as f64;
    let v_hi = 45f64.ln();
    let v_lo = ((0.25 * x0 * x0).ln().min(0.0) - 40.0 / s).max(-700.0);
    let mut acc = CompensatedSum::new();
    for node in log_trapezoid(v_lo, v_hi, h) {
        let w = node.x;
        let sigma = 0.25 * x0 * x0 / w;
        let avg = u.heat_average(x, t + sigma, sigma, res)?;
        if !avg.is_finite() {
            return Err(Error::NonFinite {
                location: format!("sigma = {sigma:e} (x0 = {x0}, t = {t})"),
                value: avg,
            });
        }
        acc.add(node.weight * w.powf(s - 1.0) * (-w).exp() * avg);
    }
    Ok(acc.value() / gamma(s)?)
}

/// `U(x0, t) = int_0^inf m(x0, sigma) A (t + c + sigma)^-beta dsigma` with the
/// closed-form spatial marginal `m` of the parabolic Poisson kernel; a direct
/// trapezoid rule in `ln sigma`, independent of [`crate::fields::TimePowerExtension`].
pub fn extension_of_time_power(sol: &TimePowerSolution, x0: f64, t: f64, res: usize) -> Result<f64> {
    check_resolution(res)?;
    let params = *sol.params();
    let kernels = FracKernels::new(params)?;
    let tt = t + sol.shift();
    if !(tt > 0.0) {
        return Err(Error::domain(format!("t + c = {tt} must be > 0")));
    }
    if !(x0 > 0.0) {
        return Err(Error::domain(format!("x0 = {x0} must be > 0")));
    }
    let rate = params.s() + params.beta();
    let c = (0.25 * x0 * x0).ln();
    let v_lo = c - 750f64.ln();
    let v_hi = c.max(tt.ln()) + 40.0 / rate;
    let h = 8.0 / res as f64;
    let mut acc = CompensatedSum::new();
    for node in log_trapezoid(v_lo, v_hi, h) {
        let sigma = node.x;
        let m = kernels.poisson_marginal(x0, sigma)?;
        if m == 0.0 {
            continue;
        }
        acc.add(node.weight * m * sol.at(t + sigma)?);
    }
    Ok(acc.value())
}

/// The Poisson extension of arbitrary boundary data as an
/// [`ExtensionField`]; values come from [`extend`], derivatives from
/// finite differences.
#[derive(Debug, Clone)]
pub struct PoissonExtension<B> {
    pub boundary: B,
    pub params: FracParams,
    pub res: usize,
}

impl<B: BoundaryField> ExtensionField for PoissonExtension<B> {
    fn dim(&self) -> usize {
        self.boundary.dim()
    }
    fn value(&self, x0: f64, x: &[f64], t: f64) -> Result<f64> {
        extend(&self.boundary, x0, x, t, &self.params, self.res)
    }
    fn uniform_in_x(&self) -> bool {
        self.boundary.uniform_in_x()
    }
    fn time_domain(&self) -> (f64, f64) {
        self.boundary.time_domain()
    }
}

/// Boundary limits of an extension at one boundary point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub x: Vec<f64>,
    pub t: f64,
    /// `|U(x0_D, x, t) - u(x, t)|` at `x0_D` (absent without boundary data).
    pub dirichlet_gap: Option<f64>,
    pub dirichlet_x0: f64,
    /// Extrapolated `lim x0^a dU/dx0`.
    pub neumann_value: f64,
    /// `-eta_s |u|^(p-1) u(x, t)` (absent without boundary data).
    pub neumann_target: Option<f64>,
    /// `(h, h^a dU/dx0(h))` for `h = h0, h0/2, h0/4`.
    pub extrapolation_steps: Vec<(f64, f64)>,
    /// The two-term and three-term extrapolations agree better than the
    /// spread of the raw samples.
    pub converged: bool,
}

/// Options of [`neumann_trace`].
#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// First extrapolation node; defaults to `1e-2 sqrt(t)`.
    pub h0: Option<f64>,
    /// Height at which the Dirichlet gap is measured.
    pub dirichlet_x0: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            h0: None,
            dirichlet_x0: 1e-3,
        }
    }
}

/// Solve the 3x3 system `L + c1 h_i^e1 + c2 h_i^e2 = f_i` for `L`.
fn extrapolate3(h: [f64; 3], f: [f64; 3], e1: f64, e2: f64) -> f64 {
    let m = nalgebra::Matrix3::new(
        1.0,
        h[0].powf(e1),
        h[0].powf(e2),
        1.0,
        h[1].powf(e1),
        h[1].powf(e2),
        1.0,
        h[2].powf(e1),
        h[2].powf(e2),
    );
    let rhs = nalgebra::Vector3::new(f[0], f[1], f[2]);
    match m.lu().solve(&rhs) {
        Some(sol) => sol[0],
        None => f[2],
    }
}

/// Weighted normal derivative `lim x0^a dU/dx0` by Richardson extrapolation
/// over `x0 in {h0, h0/2, h0/4}`.
///
/// An extension of bounded data behaves like
/// `u + c x0^(2s) + d x0^2 + ...`, so the weighted derivative behaves like
/// `L + c1 x0^(2-2s) + c2 x0^2`; both terms are eliminated.
pub fn neumann_trace(
    ext: &dyn ExtensionField,
    boundary: Option<&dyn BoundaryField>,
    x: &[f64],
    t: f64,
    params: &FracParams,
    opts: TraceOptions,
) -> Result<TraceReport> {
    check_dim(ext.dim(), x.len())?;
    let h0 = opts.h0.unwrap_or(1e-2 * t.abs().sqrt());
    if !(h0 > 0.0) {
        return Err(Error::domain(format!("h0 = {h0} must be > 0")));
    }
    let a = params.a();
    let hs = [h0, 0.5 * h0, 0.25 * h0];
    let mut steps = Vec::with_capacity(3);
    for &h in &hs {
        let dx0 = weighted_normal_derivative(ext, h, x, t)?;
        steps.push((h, h.powf(a) * dx0));
    }
    let f = [steps[0].1, steps[1].1, steps[2].1];
    let e1 = 2.0 - 2.0 * params.s();
    let l3 = extrapolate3(hs, f, e1, 2.0);
    let two = |i: usize| {
        let r = 2f64.powf(e1);
        (r * f[i + 1] - f[i]) / (r - 1.0)
    };
    let (l2a, l2b) = (two(0), two(1));
    let converged = (l3 - l2b).abs() <= (l2a - l2b).abs().max(1e-14 * l3.abs())
        && (l2a - l2b).abs() <= (f[0] - f[2]).abs().max(1e-14 * l3.abs());

    let (dirichlet_gap, neumann_target) = match boundary {
        Some(u) => {
            let ub = u.value(x, t)?;
            let gap = (ext.value(opts.dirichlet_x0, x, t)? - ub).abs();
            let eta = FracKernels::new(*params)?.constants().eta_s;
            (Some(gap), Some(-eta * ub.abs().powf(params.p() - 1.0) * ub))
        }
        None => (None, None),
    };
    Ok(TraceReport {
        x: x.to_vec(),
        t,
        dirichlet_gap,
        dirichlet_x0: opts.dirichlet_x0,
        neumann_value: l3,
        neumann_target,
        extrapolation_steps: steps,
        converged,
    })
}

fn weighted_normal_derivative(ext: &dyn ExtensionField, x0: f64, x: &[f64], t: f64) -> Result<f64> {
    if ext.has_analytic_jet() {
        return Ok(ext.jet(x0, x, t)?.grad[0]);
    }
    // The relative step keeps the truncation error free of the x0^(2s)
    // boundary singularity (it scales out of the extrapolation otherwise).
    let h = 2e-3 * x0;
    let up = ext.value(x0 + h, x, t)?;
    let um = ext.value(x0 - h, x, t)?;
    let up2 = ext.value(x0 + 0.5 * h, x, t)?;
    let um2 = ext.value(x0 - 0.5 * h, x, t)?;
    // Fourth-order central difference.
    Ok((8.0 * (up2 - um2) - (up - um)) / (6.0 * h))
}

/// Residual of the backward extension equation,
/// `dU/dt + Delta_x U + (a/x0) dU/dx0 + d^2U/dx0^2`.
///
/// Uses the field's analytic jet when available; otherwise central
/// differences with spatial step `h` (time step `h^2`-scaled to `h`).
pub fn pde_residual(ext: &dyn ExtensionField, x0: f64, x: &[f64], t: f64, params: &FracParams, h: Option<f64>) -> Result<f64> {
    let jet: Jet = match (ext.has_analytic_jet(), h) {
        (false, Some(h)) => finite_difference_jet_with_steps(ext, x0, x, t, h, h)?,
        _ => ext.jet(x0, x, t)?,
    };
    Ok(jet.dt + jet.lap_x + params.a() / x0 * jet.grad[0] + jet.d2_x0)
}
