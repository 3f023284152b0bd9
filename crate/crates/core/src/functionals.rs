//! The monotone functional `J(t)`, its derivative `D(t)`, the radially
//! rescaled form `E(R)`, the elliptic energy, and finite-difference checks.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{finite, Error, Result};
use crate::fields::{first_order_jet, BoundaryField, ExtensionField, StaticField};
use crate::kernels::{FracKernels, FracParams};
use crate::quadrature::{
    eval_nodes, integrate_boundary_gaussian_multi, integrate_halfspace_gaussian_multi, CompensatedSum,
    HalfspaceOptions, IntegralEstimate, TanhSinh,
};
use crate::special::gamma;

/// The three summands of `J(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JTerms {
    /// `t^(gamma+1) (1/2) int x0^a |grad U|^2 G`.
    pub energy: f64,
    /// `-t^(gamma+1) eta_s/(p+1) int |u|^(p+1) G(0, x, t) dx`.
    pub potential: f64,
    /// `t^gamma s/(2(p-1)) int x0^a U^2 G`.
    pub l2: f64,
    /// Sum of the absolute quadrature error estimates of the three terms.
    pub quadrature_error: f64,
}

impl JTerms {
    pub fn total(&self) -> f64 {
        self.energy + self.potential + self.l2
    }

    /// `|energy| + |potential| + |l2|`.
    pub fn magnitude(&self) -> f64 {
        self.energy.abs() + self.potential.abs() + self.l2.abs()
    }
}

fn check_compatible(u: &dyn BoundaryField, ext: &dyn ExtensionField, params: &FracParams) -> Result<()> {
    let d = params.d();
    if u.dim() != d || ext.dim() != d {
        return Err(Error::Dimension {
            expected: d,
            got: if u.dim() != d { u.dim() } else { ext.dim() },
        });
    }
    Ok(())
}

/// Normalisation `1 / ((4 pi)^(d/2) Gamma(s) t^(d/2+1-s))` of the
/// fundamental solution.
fn fundamental_norm(params: &FracParams, t: f64) -> Result<f64> {
    let d = params.d() as f64;
    Ok(1.0 / ((4.0 * PI).powf(0.5 * d) * gamma(params.s())? * t.powf(0.5 * d + 1.0 - params.s())))
}

fn eta(params: &FracParams) -> Result<f64> {
    Ok(FracKernels::new(*params)?.constants().eta_s)
}

/// The raw Gaussian moments at time `t`:
/// `[int x0^a |grad U|^2 e, int x0^a U^2 e]` and `int |u|^(p+1) e dx`.
fn gaussian_moments(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    t: f64,
    params: &FracParams,
    res: usize,
) -> Result<([IntegralEstimate; 2], IntegralEstimate)> {
    let d = params.d();
    let opts = HalfspaceOptions {
        uniform_in_x: ext.uniform_in_x(),
        ..HalfspaceOptions::default()
    };
    let bulk = integrate_halfspace_gaussian_multi(
        |x0, x| {
            let j = first_order_jet(ext, x0, x, t)?;
            Ok([j.grad_norm2(d), j.value * j.value])
        },
        t,
        params,
        res,
        opts,
    )?;
    let p1 = params.p() + 1.0;
    let [pot] = integrate_boundary_gaussian_multi(|x| Ok([u.value(x, t)?.abs().powf(p1)]), t, d, res, u.uniform_in_x())?;
    Ok((bulk, pot))
}

/// `J(t)` term by term.
pub fn eval_j(u: &dyn BoundaryField, ext: &dyn ExtensionField, t: f64, params: &FracParams, res: usize) -> Result<JTerms> {
    check_compatible(u, ext, params)?;
    let ([grad, sq], pot) = gaussian_moments(u, ext, t, params, res)?;
    let norm = fundamental_norm(params, t)?;
    let g = params.gamma_exponent();
    let tg1 = t.powf(g + 1.0) * norm;
    let c_e = 0.5 * tg1;
    let c_p = -tg1 * eta(params)? / (params.p() + 1.0);
    let c_l = t.powf(g) * norm * params.s() / (2.0 * (params.p() - 1.0));
    Ok(JTerms {
        energy: c_e * grad.value,
        potential: c_p * pot.value,
        l2: c_l * sq.value,
        quadrature_error: c_e.abs() * grad.error_estimate
            + c_p.abs() * pot.error_estimate
            + c_l.abs() * sq.error_estimate,
    })
}

/// `D(t) = int x0^a (dU/dt + X.grad U/2t + gamma U/2t)^2 t^(gamma+1) G dX`,
/// the weighted square of the self-similarity residual (the exact
/// derivative of `J` along solutions).
pub fn eval_d(ext: &dyn ExtensionField, t: f64, params: &FracParams, res: usize) -> Result<IntegralEstimate> {
    if ext.dim() != params.d() {
        return Err(Error::Dimension {
            expected: params.d(),
            got: ext.dim(),
        });
    }
    let g = params.gamma_exponent();
    let opts = HalfspaceOptions {
        uniform_in_x: ext.uniform_in_x(),
        // (2t U_t + X.grad U + gamma U)^2 does not vanish at x0 = 0.
        boundary_rate: Some(1.0 - params.a()),
    };
    let [e] = integrate_halfspace_gaussian_multi(
        |x0, x| {
            let j = first_order_jet(ext, x0, x, t)?;
            let r = j.dt + (j.x_dot_grad(x0, x) + g * j.value) / (2.0 * t);
            Ok([r * r])
        },
        t,
        params,
        res,
        opts,
    )?;
    let c = t.powf(g + 1.0) * fundamental_norm(params, t)?;
    Ok(IntegralEstimate {
        value: c * e.value,
        error_estimate: c * e.error_estimate,
        resolution: res,
    })
}

/// Central difference at `h` and `h/2` combined by Richardson
/// extrapolation (exact on cubics).
pub fn richardson_derivative<F: Fn(f64) -> Result<f64>>(f: F, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::domain(format!("finite-difference step {h} must be > 0")));
    }
    let d1 = (f(t + h)? - f(t - h)?) / (2.0 * h);
    let d2 = (f(t + 0.5 * h)? - f(t - 0.5 * h)?) / h;
    Ok((4.0 * d2 - d1) / 3.0)
}

/// Finite-difference `dJ/dt` (Richardson over `h`, `h/2`); requires
/// `t - 2h > 0`.
pub fn dj_dt_fd(u: &dyn BoundaryField, ext: &dyn ExtensionField, t: f64, h: f64, params: &FracParams, res: usize) -> Result<f64> {
    if !(t - 2.0 * h > 0.0) {
        return Err(Error::domain(format!("[t - 2h, t + 2h] = [{}, {}] must lie in t > 0", t - 2.0 * h, t + 2.0 * h)));
    }
    richardson_derivative(|tt| Ok(eval_j(u, ext, tt, params, res)?.total()), t, h)
}

/// `E(R)` term by term, with `t = R^2/2` and `G = e^(-|X|^2/2R^2)`:
/// `R^(kappa-d) [(1/2) I1 - eta/(p+1) I2] + R^(kappa-d-2) s/(p-1) I3`.
pub fn eval_e_script_terms(u: &dyn BoundaryField, ext: &dyn ExtensionField, r: f64, params: &FracParams, res: usize) -> Result<JTerms> {
    check_compatible(u, ext, params)?;
    if !(r > 0.0) {
        return Err(Error::domain(format!("R = {r} must be > 0")));
    }
    let t = 0.5 * r * r;
    let ([grad, sq], pot) = gaussian_moments(u, ext, t, params, res)?;
    let d = params.d() as f64;
    let k = params.kappa();
    let c_e = 0.5 * r.powf(k - d);
    let c_p = -r.powf(k - d) * eta(params)? / (params.p() + 1.0);
    let c_l = r.powf(k - d - 2.0) * params.s() / (params.p() - 1.0);
    Ok(JTerms {
        energy: c_e * grad.value,
        potential: c_p * pot.value,
        l2: c_l * sq.value,
        quadrature_error: c_e.abs() * grad.error_estimate
            + c_p.abs() * pot.error_estimate
            + c_l.abs() * sq.error_estimate,
    })
}

/// `E(R)`.
pub fn eval_e_script(u: &dyn BoundaryField, ext: &dyn ExtensionField, r: f64, params: &FracParams, res: usize) -> Result<f64> {
    Ok(eval_e_script_terms(u, ext, r, params, res)?.total())
}

/// The constant `c` with `J(t) = c E(sqrt(2t))`:
/// `1 / ((4 pi)^(d/2) Gamma(s) 2^(s(p+1)/(p-1) - d/2))`.
pub fn j_to_e_factor(params: &FracParams) -> Result<f64> {
    let d = params.d() as f64;
    Ok(1.0 / ((4.0 * PI).powf(0.5 * d) * gamma(params.s())? * 2f64.powf(0.5 * params.kappa() - 0.5 * d)))
}

/// `dE/dR = R^(kappa-d-3) int x0^a (X.grad U + R^2 dU/dt + gamma U)^2 e^(-|X|^2/2R^2) dX`.
pub fn eval_d_script(ext: &dyn ExtensionField, r: f64, params: &FracParams, res: usize) -> Result<IntegralEstimate> {
    if !(r > 0.0) {
        return Err(Error::domain(format!("R = {r} must be > 0")));
    }
    let t = 0.5 * r * r;
    let g = params.gamma_exponent();
    let opts = HalfspaceOptions {
        uniform_in_x: ext.uniform_in_x(),
        boundary_rate: Some(1.0 - params.a()),
    };
    let [e] = integrate_halfspace_gaussian_multi(
        |x0, x| {
            let j = first_order_jet(ext, x0, x, t)?;
            let v = j.x_dot_grad(x0, x) + r * r * j.dt + g * j.value;
            Ok([v * v])
        },
        t,
        params,
        res,
        opts,
    )?;
    let c = r.powf(params.kappa() - params.d() as f64 - 3.0);
    Ok(IntegralEstimate {
        value: c * e.value,
        error_estimate: c * e.error_estimate,
        resolution: res,
    })
}

/// The elliptic energy of a static field on the half-ball `B_R^+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticEnergy {
    /// `R^(kappa-N) (1/2) int_{B_R^+} z0^a |grad V|^2`.
    pub gradient: f64,
    /// `-R^(kappa-N) kappa_s/(p+1) int_{|z|<R} |V(0,z)|^(p+1) dz`.
    pub potential: f64,
    /// `R^(kappa-N-1) s/(p-1) int_{dB_R^+} z0^a V^2 dsigma`.
    pub sphere: f64,
    pub total: f64,
    pub quadrature_error: f64,
}

impl EllipticEnergy {
    /// The gradient and potential part, which carries the scaling identity
    /// without the sphere term.
    pub fn bulk(&self) -> f64 {
        self.gradient + self.potential
    }
}

/// Nodes `(nu, w)` of the unit sphere `S^(m-1)` in `R^m`, `m <= 3`.
fn sphere_nodes(m: usize, res: usize, coarse: bool) -> Vec<([f64; 3], f64)> {
    match m {
        1 => vec![([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)],
        2 => {
            let k = if coarse { res / 2 } else { res };
            (0..k)
                .map(|i| {
                    let phi = 2.0 * PI * i as f64 / k as f64;
                    ([phi.cos(), phi.sin(), 0.0], 2.0 * PI / k as f64)
                })
                .collect()
        }
        _ => {
            let ts = TanhSinh::for_resolution(res);
            let circle = sphere_nodes(2, res, coarse);
            let mut out = Vec::new();
            for node in ts.nodes.iter().filter(|n| !coarse || n.even) {
                let psi = PI * node.from_lo;
                let w = PI * node.weight * if coarse { 2.0 } else { 1.0 } * psi.sin();
                for (c, wc) in &circle {
                    out.push(([psi.cos(), psi.sin() * c[0], psi.sin() * c[1]], w * wc));
                }
            }
            out
        }
    }
}

/// Nodes `(omega, w)` of the upper unit hemisphere in `R^(N+1)`.
fn hemisphere_nodes(n: usize, res: usize, coarse: bool) -> Vec<([f64; 4], f64)> {
    let ts = TanhSinh::for_resolution(res);
    let inner = sphere_nodes(n, res, coarse);
    let mut out = Vec::new();
    for node in ts.nodes.iter().filter(|nd| !coarse || nd.even) {
        let theta_w = 0.5 * PI * node.weight * if coarse { 2.0 } else { 1.0 };
        let cos = (0.5 * PI * node.from_hi).sin();
        let sin = (0.5 * PI * node.from_lo).sin();
        let w = theta_w * sin.powi(n as i32 - 1);
        for (nu, wn) in &inner {
            let mut om = [0.0; 4];
            om[0] = cos;
            for i in 0..n {
                om[i + 1] = sin * nu[i];
            }
            out.push((om, w * wn));
        }
    }
    out
}

fn radial_nodes(r: f64, res: usize, coarse: bool) -> Vec<(f64, f64)> {
    let ts = TanhSinh::for_resolution(res);
    ts.nodes
        .iter()
        .filter(|nd| !coarse || nd.even)
        .map(|nd| (r * nd.from_lo, r * nd.weight * if coarse { 2.0 } else { 1.0 }))
        .collect()
}

fn elliptic_pass(v: &dyn StaticField, r_max: f64, params: &FracParams, res: usize, coarse: bool) -> Result<[f64; 3]> {
    let n = v.dim();
    let a = params.a();
    let hemi = hemisphere_nodes(n, res, coarse);
    let radial = radial_nodes(r_max, res, coarse);
    let per_r = eval_nodes(radial.len(), |i| {
        let (r, wr) = radial[i];
        let mut acc = CompensatedSum::new();
        for (om, w) in &hemi {
            let z0 = r * om[0];
            let g = v.gradient(z0, &[om[1] * r, om[2] * r, om[3] * r][..n])?;
            let g2: f64 = g[..=n].iter().map(|c| c * c).sum();
            acc.add(w * z0.powf(a) * g2);
        }
        Ok(wr * r.powi(n as i32) * acc.value())
    })?;
    let mut grad = CompensatedSum::new();
    for v in per_r {
        grad.add(v);
    }
    let mut sphere = CompensatedSum::new();
    for (om, w) in &hemi {
        let z0 = r_max * om[0];
        let val = v.value(z0, &[om[1] * r_max, om[2] * r_max, om[3] * r_max][..n])?;
        sphere.add(w * z0.powf(a) * val * val);
    }
    let sphere = sphere.value() * r_max.powi(n as i32);
    let bdry = sphere_nodes(n, res, coarse);
    let p1 = params.p() + 1.0;
    let mut pot = CompensatedSum::new();
    for (rho, wr) in &radial {
        let mut inner = CompensatedSum::new();
        for (nu, w) in &bdry {
            let val = v.value(0.0, &[rho * nu[0], rho * nu[1], rho * nu[2]][..n])?;
            inner.add(w * val.abs().powf(p1));
        }
        pot.add(wr * rho.powi(n as i32 - 1) * inner.value());
    }
    Ok([grad.value(), pot.value(), sphere])
}

/// `E(R)` of a static field by polar quadrature on the half-ball (tanh-sinh
/// in the radius and the polar angle from the `z0` axis, trapezoid in the
/// periodic angle); `N = V.dim() <= 3`.
pub fn eval_e_elliptic(v: &dyn StaticField, r: f64, params: &FracParams, res: usize) -> Result<EllipticEnergy> {
    crate::quadrature::check_resolution(res)?;
    let n = v.dim();
    if n == 0 || n > 3 {
        return Err(Error::domain(format!("elliptic dimension N = {n} must lie in 1..=3")));
    }
    if !(r > 0.0) {
        return Err(Error::domain(format!("R = {r} must be > 0")));
    }
    let k = params.kappa();
    let nf = n as f64;
    let kappa_s = FracKernels::new(*params)?.constants().kappa_s;
    let c = [
        0.5 * r.powf(k - nf),
        -r.powf(k - nf) * kappa_s / (params.p() + 1.0),
        r.powf(k - nf - 1.0) * params.s() / (params.p() - 1.0),
    ];
    let fine = elliptic_pass(v, r, params, res, false)?;
    let coarse = elliptic_pass(v, r, params, res, true)?;
    let terms: [f64; 3] = std::array::from_fn(|i| c[i] * fine[i]);
    let err: f64 = (0..3).map(|i| c[i].abs() * (fine[i] - coarse[i]).abs()).sum();
    Ok(EllipticEnergy {
        gradient: terms[0],
        potential: terms[1],
        sphere: terms[2],
        total: terms.iter().sum(),
        quadrature_error: err,
    })
}

/// One point of a functional curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSample {
    pub t: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "dJdt_fd")]
    pub dj_dt_fd: f64,
    pub term_energy: f64,
    pub term_potential: f64,
    pub term_l2: f64,
    pub quadrature_error: f64,
}

/// Summary verdicts of a curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveVerdicts {
    /// No decrease of `J` beyond the monotonicity tolerance.
    pub monotone: bool,
    /// `|D - dJ/dt_fd| <= tol max(max |D|, scale)` at interior points.
    pub derivative_match: bool,
    /// Largest decrease `J(t_i) - J(t_(i+1))` (negative when increasing).
    pub max_violation: f64,
    /// Largest relative derivative mismatch at interior points.
    pub max_derivative_gap: f64,
    /// `D >= -quadrature error` everywhere.
    pub nonnegative_d: bool,
    /// `max_i (|energy| + |potential| + |l2|)(t_i) / t_i`, the size of `dJ/dt`
    /// when all terms move at their natural rate.
    pub scale: f64,
}

/// Tolerances of the curve verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveTolerances {
    /// Allowed decrease relative to `max |J|`.
    pub monotone_rel: f64,
    /// Allowed derivative mismatch relative to `max(max |D|, scale)`.
    pub derivative_rel: f64,
}

impl Default for CurveTolerances {
    fn default() -> Self {
        Self {
            monotone_rel: 1e-8,
            derivative_rel: 1e-3,
        }
    }
}

/// `J`, `D` and finite-difference `dJ/dt` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalCurve {
    pub params: FracParams,
    pub samples: Vec<FunctionalSample>,
    pub verdicts: CurveVerdicts,
}

impl FunctionalCurve {
    /// Recompute the verdicts from the stored samples.
    pub fn judge(params: FracParams, samples: Vec<FunctionalSample>, tol: CurveTolerances) -> Self {
        let max_j = samples.iter().map(|s| s.j.abs()).fold(0.0, f64::max);
        let max_d = samples.iter().map(|s| s.d.abs()).fold(0.0, f64::max);
        let scale = samples
            .iter()
            .map(|s| (s.term_energy.abs() + s.term_potential.abs() + s.term_l2.abs()) / s.t)
            .fold(0.0, f64::max);
        let max_violation = samples
            .windows(2)
            .map(|w| w[0].j - w[1].j)
            .fold(f64::NEG_INFINITY, f64::max);
        let max_violation = if samples.len() < 2 { 0.0 } else { max_violation };
        let dscale = max_d.max(scale * f64::EPSILON.sqrt());
        let interior = if samples.len() > 2 { &samples[1..samples.len() - 1] } else { &samples[..] };
        let max_derivative_gap = interior
            .iter()
            .map(|s| (s.d - s.dj_dt_fd).abs() / dscale.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        let verdicts = CurveVerdicts {
            monotone: max_violation <= tol.monotone_rel * max_j,
            derivative_match: max_derivative_gap <= tol.derivative_rel,
            max_violation,
            max_derivative_gap,
            nonnegative_d: samples.iter().all(|s| s.d >= -s.quadrature_error),
            scale,
        };
        Self {
            params,
            samples,
            verdicts,
        }
    }
}

/// Evaluate one curve sample.
pub fn eval_sample(u: &dyn BoundaryField, ext: &dyn ExtensionField, t: f64, params: &FracParams, res: usize, fd_h: f64) -> Result<FunctionalSample> {
    let terms = eval_j(u, ext, t, params, res)?;
    let d = eval_d(ext, t, params, res)?;
    let fd = dj_dt_fd(u, ext, t, fd_h, params, res)?;
    Ok(FunctionalSample {
        t,
        j: finite(terms.total(), || format!("J at t = {t}"))?,
        d: finite(d.value, || format!("D at t = {t}"))?,
        dj_dt_fd: fd,
        term_energy: terms.energy,
        term_potential: terms.potential,
        term_l2: terms.l2,
        quadrature_error: terms.quadrature_error + d.error_estimate,
    })
}

/// Evaluate `J`, `D` and the FD derivative on `t_grid` (strictly
/// increasing, positive), samples in parallel, merged in `t` order.
pub fn functional_curve(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    params: &FracParams,
    t_grid: &[f64],
    res: usize,
    fd_h: f64,
    tol: CurveTolerances,
) -> Result<FunctionalCurve> {
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || t_grid.first().is_some_and(|t| !(*t > 0.0)) {
        return Err(Error::config("t_grid", "must be strictly increasing with t > 0"));
    }
    let samples = eval_nodes(t_grid.len(), |i| eval_sample(u, ext, t_grid[i], params, res, fd_h))?;
    Ok(FunctionalCurve::judge(*params, samples, tol))
}
