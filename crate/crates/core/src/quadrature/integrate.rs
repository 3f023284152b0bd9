//! Integrators built on the rules of this module.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use super::de::{log_trapezoid, TanhSinh};
use super::rules::{build_rule, legendre, QuadratureRule, RuleKind};
use super::sum::{CompensatedSum, CompensatedSums};
use crate::error::{Error, Result};
use crate::kernels::{FracParams, MAX_DIM};
use crate::special::{gamma, ln_gamma};

/// Value of an integral with the difference between two resolutions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub resolution: usize,
}

impl IntegralEstimate {
    fn from_pair(fine: f64, coarse: f64, resolution: usize) -> Self {
        Self {
            value: fine,
            error_estimate: (fine - coarse).abs(),
            resolution,
        }
    }

    fn exact(value: f64, resolution: usize) -> Self {
        Self {
            value,
            error_estimate: 0.0,
            resolution,
        }
    }
}

fn pairs<const K: usize>(fine: [f64; K], coarse: [f64; K], res: usize) -> [IntegralEstimate; K] {
    std::array::from_fn(|k| IntegralEstimate::from_pair(fine[k], coarse[k], res))
}

/// Resolutions must be even and at least 8.
pub(crate) fn check_resolution(res: usize) -> Result<()> {
    if res < 8 || res % 2 != 0 || res > super::rules::MAX_NODES {
        Err(Error::config(
            "res",
            format!("resolution {res} must be even and lie in 8..={}", super::rules::MAX_NODES),
        ))
    } else {
        Ok(())
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("t = {t} must be finite and > 0")))
    }
}

/// Evaluate `f(0..count)` (in parallel when enabled) keeping index order.
pub(crate) fn eval_nodes<T, F>(count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

fn non_finite(location: String, value: f64) -> Error {
    Error::NonFinite { location, value }
}

fn check_values<const K: usize>(v: &[f64; K], location: impl FnOnce() -> String) -> Result<()> {
    match v.iter().find(|x| !x.is_finite()) {
        Some(bad) => Err(non_finite(location(), *bad)),
        None => Ok(()),
    }
}

type RuleCache<T> = OnceLock<Mutex<HashMap<(u8, u64, usize), Arc<T>>>>;

fn cached<T>(cache: &'static RuleCache<T>, key: (u8, u64, usize), make: impl FnOnce() -> Result<T>) -> Result<Arc<T>> {
    let map = cache.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = map.lock().expect("rule cache").get(&key) {
        return Ok(r.clone());
    }
    let rule = Arc::new(make()?);
    map.lock().expect("rule cache").insert(key, rule.clone());
    Ok(rule)
}

static HERMITE: RuleCache<QuadratureRule> = OnceLock::new();
static JACOBI: RuleCache<QuadratureRule> = OnceLock::new();
static LEGENDRE: RuleCache<(Vec<f64>, Vec<f64>)> = OnceLock::new();
static TANH_SINH: RuleCache<TanhSinh> = OnceLock::new();

pub(crate) fn cached_hermite(n: usize) -> Result<Arc<QuadratureRule>> {
    cached(&HERMITE, (0, 0, n), || build_rule(RuleKind::Hermite, n))
}

fn cached_jacobi(mu: f64, n: usize) -> Result<Arc<QuadratureRule>> {
    cached(&JACOBI, (1, mu.to_bits(), n), || build_rule(RuleKind::JacobiSingular { mu }, n))
}

fn cached_legendre(n: usize) -> Result<Arc<(Vec<f64>, Vec<f64>)>> {
    cached(&LEGENDRE, (2, 0, n), || legendre(n))
}

fn cached_tanh_sinh(half_count: usize) -> Result<Arc<TanhSinh>> {
    cached(&TANH_SINH, (3, 0, half_count), || Ok(TanhSinh::new(half_count, 4.0)))
}

/// Tensor product of a 1-D rule in `d` dimensions: points (scaled by
/// `scale`) and weights.
fn tensor(rule: &QuadratureRule, d: usize, scale: f64) -> (Vec<[f64; MAX_DIM]>, Vec<f64>) {
    let n = rule.len();
    let total = n.pow(d as u32);
    let mut pts = Vec::with_capacity(total);
    let mut wts = Vec::with_capacity(total);
    for idx in 0..total {
        let mut p = [0.0; MAX_DIM];
        let mut w = 1.0;
        let mut rem = idx;
        for slot in p.iter_mut().take(d) {
            let i = rem % n;
            rem /= n;
            *slot = scale * rule.nodes[i];
            w *= rule.weights[i];
        }
        pts.push(p);
        wts.push(w);
    }
    (pts, wts)
}

/// Tuning of a half-space Gaussian integral.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfspaceOptions {
    /// The integrand does not depend on `x`: the `x`-integral is done in
    /// closed form and `f` is sampled at `x = 0` only.
    pub uniform_in_x: bool,
    /// Smallest algebraic rate `theta` such that `x0^(1+a) f = O(x0^theta)`
    /// as `x0 -> 0`; sets the lower truncation of the `x0` grid. Defaults to
    /// `min(2s, 2-2s)`.
    pub boundary_rate: Option<f64>,
}

/// `int_{R^(d+1)_+} f(X) x0^a e^(-|X|^2/4t) dX` for a scalar integrand.
pub fn integrate_halfspace_gaussian<F>(f: F, t: f64, params: &FracParams, res: usize) -> Result<IntegralEstimate>
where
    F: Fn(f64, &[f64]) -> Result<f64> + Sync + Send,
{
    let [e] = integrate_halfspace_gaussian_multi(|x0, x| Ok([f(x0, x)?]), t, params, res, HalfspaceOptions::default())?;
    Ok(e)
}

/// Vector-valued half-space Gaussian integral: one evaluation of `f` feeds
/// `K` integrals.
///
/// In `x0` the rule is a trapezoid in `v = ln(x0 / sqrt(4t))` (step
/// `8/res`, halved for the reported value), which converges geometrically
/// for integrands with an algebraic singularity at `x0 = 0`. In `x` it is a
/// Gauss-Hermite tensor rule with `res/2` nodes per dimension (`res/4` for
/// the comparison value).
pub fn integrate_halfspace_gaussian_multi<const K: usize, F>(
    f: F,
    t: f64,
    params: &FracParams,
    res: usize,
    opts: HalfspaceOptions,
) -> Result<[IntegralEstimate; K]>
where
    F: Fn(f64, &[f64]) -> Result<[f64; K]> + Sync + Send,
{
    check_resolution(res)?;
    check_time(t)?;
    let d = params.d();
    let a = params.a();
    let scale = (4.0 * t).sqrt();
    let theta = opts.boundary_rate.unwrap_or_else(|| params.boundary_rate()).clamp(1e-3, 1.0);
    let h = 8.0 / res as f64;
    let nodes = log_trapezoid(-40.0 / theta, 7f64.ln(), 0.5 * h);
    let x0_factor = scale.powf(1.0 + a);

    let (fine_x, coarse_x) = if opts.uniform_in_x {
        let w = PI.powf(0.5 * d as f64) * scale.powi(d as i32);
        ((vec![[0.0; MAX_DIM]], vec![w]), (vec![[0.0; MAX_DIM]], vec![w]))
    } else {
        let sx = scale.powi(d as i32);
        let (pf, wf) = tensor(&*cached_hermite((res / 2).max(4))?, d, scale);
        let (pc, wc) = tensor(&*cached_hermite((res / 4).max(4))?, d, scale);
        (
            (pf, wf.iter().map(|w| w * sx).collect()),
            (pc, wc.iter().map(|w| w * sx).collect()),
        )
    };

    let inner = |x0: f64, pts: &[[f64; MAX_DIM]], wts: &[f64]| -> Result<[f64; K]> {
        let mut acc = CompensatedSums::<K>::default();
        for (p, w) in pts.iter().zip(wts) {
            let v = f(x0, &p[..d])?;
            check_values(&v, || format!("x0 = {x0:e}, x = {:?}, t = {t}", &p[..d]))?;
            acc.add_scaled(*w, &v);
        }
        Ok(acc.value())
    };

    let per_node = eval_nodes(nodes.len(), |i| {
        let node = nodes[i];
        let xi = node.x;
        let radial = x0_factor * xi.powf(a) * (-xi * xi).exp() * node.weight;
        if radial == 0.0 {
            return Ok(([0.0; K], [0.0; K], radial));
        }
        let x0 = scale * xi;
        let fine = inner(x0, &fine_x.0, &fine_x.1)?;
        let coarse = if !node.even {
            [0.0; K]
        } else if opts.uniform_in_x {
            fine
        } else {
            inner(x0, &coarse_x.0, &coarse_x.1)?
        };
        Ok((fine, coarse, radial))
    })?;

    let mut fine = CompensatedSums::<K>::default();
    let mut coarse = CompensatedSums::<K>::default();
    for (node, (vf, vc, w)) in nodes.iter().zip(&per_node) {
        fine.add_scaled(*w, vf);
        if node.even {
            coarse.add_scaled(2.0 * w, vc);
        }
    }
    Ok(pairs(fine.value(), coarse.value(), res))
}

/// `int_{R^d} f(x) e^(-|x|^2/4t) dx` with a Gauss-Hermite tensor rule of
/// `res` nodes per dimension (`res/2` for the comparison value).
pub fn integrate_boundary_gaussian<F>(f: F, t: f64, d: usize, res: usize) -> Result<IntegralEstimate>
where
    F: Fn(&[f64]) -> Result<f64> + Sync + Send,
{
    let [e] = integrate_boundary_gaussian_multi(|x| Ok([f(x)?]), t, d, res, false)?;
    Ok(e)
}

/// Vector-valued boundary Gaussian integral; with `uniform_in_x` the
/// integrand is sampled once at `x = 0`.
pub fn integrate_boundary_gaussian_multi<const K: usize, F>(
    f: F,
    t: f64,
    d: usize,
    res: usize,
    uniform_in_x: bool,
) -> Result<[IntegralEstimate; K]>
where
    F: Fn(&[f64]) -> Result<[f64; K]> + Sync + Send,
{
    check_resolution(res)?;
    check_time(t)?;
    if d == 0 || d > MAX_DIM {
        return Err(Error::domain(format!("dimension {d} outside 1..={MAX_DIM}")));
    }
    let mass = (4.0 * PI * t).powf(0.5 * d as f64);
    if uniform_in_x {
        let v = f(&vec![0.0; d])?;
        check_values(&v, || format!("x = 0, t = {t}"))?;
        return Ok(std::array::from_fn(|k| IntegralEstimate::exact(v[k] * mass, res)));
    }
    let scale = (4.0 * t).sqrt();
    let sx = scale.powi(d as i32);
    let run = |n: usize| -> Result<[f64; K]> {
        let (pts, wts) = tensor(&*cached_hermite(n)?, d, scale);
        let vals = eval_nodes(pts.len(), |i| {
            let v = f(&pts[i][..d])?;
            check_values(&v, || format!("x = {:?}, t = {t}", &pts[i][..d]))?;
            Ok(v)
        })?;
        let mut acc = CompensatedSums::<K>::default();
        for (w, v) in wts.iter().zip(&vals) {
            acc.add_scaled(w * sx, v);
        }
        Ok(acc.value())
    };
    let fine = run(res)?;
    let coarse = run(res / 2)?;
    Ok(pairs(fine, coarse, res))
}

/// `int_0^inf (psi(0) - psi(sigma)) sigma^(-1-s) dsigma`.
///
/// On `[0, split]` a Gauss-Jacobi rule with weight `sigma^-s` integrates the
/// difference quotient; on `[split, inf)` the substitution
/// `y = (sigma/split)^-s` maps the tail to `(split^-s / s) int_0^1 (psi(0) -
/// psi(split y^(-1/s))) dy`, integrated by Gauss-Legendre panels graded
/// geometrically toward `y = 0` (down to `y = 4^-28`).
pub fn singular_difference_integral<F>(psi: F, s: f64, split: f64, res: usize) -> Result<IntegralEstimate>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    check_resolution(res)?;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::domain(format!("s = {s} must lie in (0, 1)")));
    }
    if !(split > 0.0 && split.is_finite()) {
        return Err(Error::domain(format!("split = {split} must be > 0")));
    }
    let psi0 = psi(0.0)?;
    if !psi0.is_finite() {
        return Err(non_finite("sigma = 0".into(), psi0));
    }
    let eval = |sigma: f64| -> Result<f64> {
        let v = psi(sigma)?;
        if v.is_finite() {
            Ok(psi0 - v)
        } else {
            Err(non_finite(format!("sigma = {sigma:e}"), v))
        }
    };
    const PANELS: i32 = 28;
    let run = |n: usize| -> Result<f64> {
        let near_rule = cached_jacobi(-s, n)?;
        let near_vals = eval_nodes(near_rule.len(), |i| {
            let sigma = split * near_rule.nodes[i];
            Ok(eval(sigma)? / sigma)
        })?;
        let mut near = CompensatedSum::new();
        for (w, v) in near_rule.weights.iter().zip(&near_vals) {
            near.add(w * v);
        }
        let near = near.value() * split.powf(1.0 - s);

        let per_panel = (n / 2).max(8);
        let gl = cached_legendre(per_panel)?;
        let mut ys = Vec::with_capacity(per_panel * (PANELS as usize + 1));
        let mut ws = Vec::with_capacity(ys.capacity());
        for k in 0..=PANELS {
            let hi = 0.25f64.powi(k);
            let lo = if k == PANELS { 0.0 } else { 0.25f64.powi(k + 1) };
            for (yi, wi) in gl.0.iter().zip(&gl.1) {
                ys.push(lo + 0.5 * (hi - lo) * (1.0 + yi));
                ws.push(0.5 * (hi - lo) * wi);
            }
        }
        let far_vals = eval_nodes(ys.len(), |i| eval(split * ys[i].powf(-1.0 / s)))?;
        let mut far = CompensatedSum::new();
        for (w, v) in ws.iter().zip(&far_vals) {
            far.add(w * v);
        }
        Ok(near + far.value() * split.powf(-s) / s)
    };
    let fine = run(res)?;
    let coarse = run(res / 2)?;
    Ok(IntegralEstimate::from_pair(fine, coarse, res))
}

/// One-sided (future) Marchaud derivative of a function of time,
/// `(1/|Gamma(-s)|) int_0^inf (u(t) - u(t+sigma)) sigma^(-1-s) dsigma`,
/// with the near/far split at `sigma = t`.
pub fn marchaud_apply<F>(u: F, t: f64, s: f64, res: usize) -> Result<IntegralEstimate>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    check_time(t)?;
    let g = gamma(-s)?.abs();
    let e = singular_difference_integral(|sigma| u(t + sigma), s, t, res)?;
    Ok(IntegralEstimate {
        value: e.value / g,
        error_estimate: e.error_estimate / g,
        resolution: res,
    })
}

/// Nodes `(r, w)` for `n int_0^R (r/R)^(n-1) h(r) dr ~ sum w h(r)`.
///
/// On `[eps R, R]` the substitution `r = R e^(-u/n)` turns the integral into
/// `R int_0^(n ln(1/eps)) e^(-u) h(R e^(-u/n)) du`, integrated by
/// Gauss-Legendre panels `[0,1], [1,2], [2,4], ...`; `[0, eps R]` is a direct
/// composite Gauss-Legendre rule. With `truncate`, parts whose total weight
/// is below `e^-48` (relative) are dropped.
fn radial_nodes(r_max: f64, n: usize, res: usize, eps: f64, truncate: bool) -> Result<Vec<(f64, f64)>> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::domain(format!("R = {r_max} must be finite and > 0")));
    }
    if n < 2 {
        return Err(Error::domain(format!("n = {n} must be >= 2")));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::domain(format!("eps = {eps} must lie in (0, 1)")));
    }
    check_resolution(res)?;
    const TAIL: f64 = 48.0;
    let nf = n as f64;
    let per_panel = (res / 4).max(8);
    let gl = cached_legendre(per_panel)?;
    let mut out = Vec::new();
    let u_end = nf * (1.0 / eps).ln();
    let u_stop = if truncate { u_end.min(TAIL) } else { u_end };
    let mut lo = 0.0;
    let mut hi: f64 = 1.0;
    while lo < u_stop {
        let b = hi.min(u_stop);
        for (yi, wi) in gl.0.iter().zip(&gl.1) {
            let u = lo + 0.5 * (b - lo) * (1.0 + yi);
            let w = 0.5 * (b - lo) * wi;
            out.push((r_max * (-u / nf).exp(), r_max * w * (-u).exp()));
        }
        lo = b;
        hi = 2.0 * b.max(1.0);
    }
    // [0, eps R]: total weight eps^n.
    if !truncate || nf * eps.ln() > -TAIL {
        let panels = 4;
        let r_eps = eps * r_max;
        for p in 0..panels {
            let a = r_eps * p as f64 / panels as f64;
            let b = r_eps * (p + 1) as f64 / panels as f64;
            for (yi, wi) in gl.0.iter().zip(&gl.1) {
                let r = a + 0.5 * (b - a) * (1.0 + yi);
                let w = 0.5 * (b - a) * wi * nf * (r / r_max).powi(n as i32 - 1);
                out.push((r, w));
            }
        }
    }
    Ok(out)
}

/// `n int_0^R (r/R)^(n-1) h(r) dr`.
pub fn integrate_radial_concentration<F>(h: F, r_max: f64, n: usize, res: usize, eps: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    let [v] = radial_concentration_multi(|r| Ok([h(r)?]), r_max, n, res, eps)?;
    Ok(v)
}

/// Vector-valued radial concentration integral; contributions with total
/// relative weight below `e^-48` are skipped (each node of `h` is usually
/// an expensive inner integral).
pub fn radial_concentration_multi<const K: usize, F>(h: F, r_max: f64, n: usize, res: usize, eps: f64) -> Result<[f64; K]>
where
    F: Fn(f64) -> Result<[f64; K]> + Sync + Send,
{
    let nodes = radial_nodes(r_max, n, res, eps, true)?;
    let vals = eval_nodes(nodes.len(), |i| {
        let r = nodes[i].0;
        let v = h(r)?;
        check_values(&v, || format!("r = {r}"))?;
        Ok(v)
    })?;
    let mut acc = CompensatedSums::<K>::default();
    for ((_, w), v) in nodes.iter().zip(&vals) {
        acc.add_scaled(*w, v);
    }
    Ok(acc.value())
}

/// The concentration functional `F_n(f) = n int_eps^1 t^(n-1) f(t) dt`,
/// integrated over the full interval without truncation.
pub fn concentration_functional<F>(f: F, n: usize, eps: f64, res: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let nodes = radial_nodes(1.0, n, res, eps, false)?;
    // The last 4 * per_panel nodes cover [0, eps]; drop them.
    let per_panel = (res / 4).max(8);
    let upper = nodes.len() - 4 * per_panel;
    let mut acc = CompensatedSum::new();
    for (r, w) in &nodes[..upper] {
        acc.add(w * f(*r));
    }
    Ok(acc.value())
}

/// Shape of the binomial weight `G_n(X, t) = (1 - |X|^2 / 2nt)_+^((n-2)/2)`.
struct Binomial {
    m: f64,
    rho: f64,
}

impl Binomial {
    fn new(n: usize, t: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("n = {n} must be >= 2")));
        }
        check_time(t)?;
        Ok(Self {
            m: 0.5 * (n as f64 - 2.0),
            rho: (2.0 * n as f64 * t).sqrt(),
        })
    }

    /// `int_{R^d} (1 - |x|^2/rho^2)_+^m dx / rho^d`.
    fn ball_factor(&self, d: usize) -> Result<f64> {
        let hd = 0.5 * d as f64;
        Ok(PI.powf(hd) * (ln_gamma(self.m + 1.0)? - ln_gamma(self.m + 1.0 + hd)?).exp())
    }
}

/// Nested tanh-sinh over the ball `|x|^2 < rem * rho^2` in `dims`
/// dimensions, accumulating `(1 - |X|^2/rho^2)^m`. `rem` is the remaining
/// factor `1 - |X_prefix|^2 / rho^2`, tracked multiplicatively.
///
/// Each direction is split at its centre and both halves are mapped to
/// `[0, 1]` with the centre at the clustered endpoint: for large `m` the
/// weight is concentrated in a width `1/sqrt(m)` around the centre, which a
/// single tanh-sinh rule spanning the full chord would under-resolve.
#[allow(clippy::too_many_arguments)]
fn nested_ball<const K: usize>(
    rule: &TanhSinh,
    coarse: bool,
    rho: f64,
    m: f64,
    rem_ln: f64,
    prefix: &mut [f64; MAX_DIM],
    depth: usize,
    d: usize,
    leaf: &mut dyn FnMut(&[f64]) -> Result<[f64; K]>,
) -> Result<[f64; K]> {
    if depth == d {
        let w = (m * rem_ln).exp();
        let v = leaf(&prefix[..d])?;
        return Ok(std::array::from_fn(|k| w * v[k]));
    }
    let half = rho * (0.5 * rem_ln).exp();
    let mut acc = CompensatedSums::<K>::default();
    for node in &rule.nodes {
        if coarse && !node.even {
            continue;
        }
        // 1 - y^2 = (1 - y)(1 + y) with y = from_lo.
        let ln_next = rem_ln + node.from_hi.ln() + node.from_lo.ln_1p();
        let w = half * node.weight * if coarse { 2.0 } else { 1.0 };
        if w == 0.0 || ln_next == f64::NEG_INFINITY {
            continue;
        }
        for sign in [1.0, -1.0] {
            prefix[depth] = sign * half * node.from_lo;
            let v = nested_ball(rule, coarse, rho, m, ln_next, prefix, depth + 1, d, leaf)?;
            acc.add_scaled(w, &v);
        }
    }
    Ok(acc.value())
}

/// `int_{R^(d+1)_+} f(X) x0^a G_n(X, t) dX`.
///
/// The support is the half-ball of radius `sqrt(2nt)`; the `x0` direction
/// (and, for non-uniform integrands, each `x` direction nested inside it)
/// uses a tanh-sinh rule with `2 res + 1` nodes, compared against the
/// nested rule with half as many.
pub fn integrate_halfspace_binomial<const K: usize, F>(
    f: F,
    t: f64,
    n: usize,
    params: &FracParams,
    res: usize,
    uniform_in_x: bool,
) -> Result<[IntegralEstimate; K]>
where
    F: Fn(f64, &[f64]) -> Result<[f64; K]> + Sync + Send,
{
    check_resolution(res)?;
    let b = Binomial::new(n, t)?;
    let d = params.d();
    let a = params.a();
    let rule = cached_tanh_sinh(res)?;
    let xrule = cached_tanh_sinh(res)?;
    let ball = b.ball_factor(d)? * b.rho.powi(d as i32);
    let per_node = eval_nodes(rule.nodes.len(), |i| {
        let node = rule.nodes[i];
        let x0 = b.rho * node.from_lo;
        // 1 - x0^2/rho^2 = (1 - y)(1 + y), y = x0/rho.
        let rem_ln = node.from_hi.ln() + node.from_lo.ln_1p();
        let w = b.rho * node.weight * x0.powf(a);
        if w == 0.0 || !w.is_finite() || rem_ln == f64::NEG_INFINITY {
            return Ok(([0.0; K], [0.0; K], 0.0));
        }
        if uniform_in_x {
            let v = f(x0, &[0.0; MAX_DIM][..d])?;
            check_values(&v, || format!("x0 = {x0:e}, t = {t}"))?;
            let g = ((b.m + 0.5 * d as f64) * rem_ln).exp() * ball;
            let out = std::array::from_fn(|k| g * v[k]);
            return Ok((out, out, w));
        }
        let mut leaf = |x: &[f64]| -> Result<[f64; K]> {
            let v = f(x0, x)?;
            check_values(&v, || format!("x0 = {x0:e}, x = {x:?}, t = {t}"))?;
            Ok(v)
        };
        let mut prefix = [0.0; MAX_DIM];
        let fine = nested_ball(&xrule, false, b.rho, b.m, rem_ln, &mut prefix, 0, d, &mut leaf)?;
        let coarse = if node.even {
            nested_ball(&xrule, true, b.rho, b.m, rem_ln, &mut prefix, 0, d, &mut leaf)?
        } else {
            [0.0; K]
        };
        Ok((fine, coarse, w))
    })?;
    let mut fine = CompensatedSums::<K>::default();
    let mut coarse = CompensatedSums::<K>::default();
    for (node, (vf, vc, w)) in rule.nodes.iter().zip(&per_node) {
        fine.add_scaled(*w, vf);
        if node.even {
            coarse.add_scaled(2.0 * w, vc);
        }
    }
    Ok(pairs(fine.value(), coarse.value(), res))
}

/// `int_{R^d} f(x) G_n((0, x), t) dx`.
pub fn integrate_boundary_binomial<const K: usize, F>(
    f: F,
    t: f64,
    n: usize,
    d: usize,
    res: usize,
    uniform_in_x: bool,
) -> Result<[IntegralEstimate; K]>
where
    F: Fn(&[f64]) -> Result<[f64; K]> + Sync + Send,
{
    check_resolution(res)?;
    let b = Binomial::new(n, t)?;
    if d == 0 || d > MAX_DIM {
        return Err(Error::domain(format!("dimension {d} outside 1..={MAX_DIM}")));
    }
    if uniform_in_x {
        let v = f(&[0.0; MAX_DIM][..d])?;
        check_values(&v, || format!("x = 0, t = {t}"))?;
        let g = b.ball_factor(d)? * b.rho.powi(d as i32);
        return Ok(std::array::from_fn(|k| IntegralEstimate::exact(g * v[k], res)));
    }
    let rule = cached_tanh_sinh(res)?;
    let mut leaf = |x: &[f64]| -> Result<[f64; K]> {
        let v = f(x)?;
        check_values(&v, || format!("x = {x:?}, t = {t}"))?;
        Ok(v)
    };
    let mut prefix = [0.0; MAX_DIM];
    let fine = nested_ball(&rule, false, b.rho, b.m, 0.0, &mut prefix, 0, d, &mut leaf)?;
    let coarse = nested_ball(&rule, true, b.rho, b.m, 0.0, &mut prefix, 0, d, &mut leaf)?;
    Ok(pairs(fine, coarse, res))
}
