//! The parabolic-to-elliptic dictionary: lifted points and fields, the
//! chain-rule identity, the source term `H`, the binomial weights `G_n`, and
//! the reduced-coordinate evaluation of the lifted energy `C_n E_n(R)` with
//! its derivative terms `A_n`, `B_n`.
//!
//! Everything that lives on `R^(n+d+1)_+` is evaluated in the reduced
//! coordinates `(r, X)`: the radius `r = sqrt(2t)` and the half-space
//! point `X = (x0, x)`; the ambient space is never discretised.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::fields::{first_order_jet, BoundaryField, ExtensionField, Jet};
use crate::functionals::{eval_d_script, eval_e_script_terms, richardson_derivative};
use crate::kernels::{FracKernels, FracParams, MAX_DIM};
use crate::quadrature::{eval_nodes, integrate_boundary_binomial, integrate_halfspace_binomial, radial_concentration_multi};
use crate::special::ln_gamma;

/// A point `(z0, z, y)` of `R^(n+d+1)_+`; only `|y|` matters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftPoint {
    pub z0: f64,
    pub z: Vec<f64>,
    pub y_norm: f64,
    pub n: usize,
}

impl LiftPoint {
    pub fn new(z0: f64, z: Vec<f64>, y_norm: f64, n: usize) -> Result<Self> {
        if !(z0 > 0.0 && z0.is_finite()) {
            return Err(Error::domain(format!("z0 = {z0} must be finite and > 0")));
        }
        if !(y_norm >= 0.0 && y_norm.is_finite()) {
            return Err(Error::domain(format!("|y| = {y_norm} must be finite and >= 0")));
        }
        if n == 0 {
            return Err(Error::domain("n must be >= 1"));
        }
        if z.is_empty() || z.len() > MAX_DIM {
            return Err(Error::domain(format!("z must have 1..={MAX_DIM} entries")));
        }
        Ok(Self { z0, z, y_norm, n })
    }

    /// The lift point over `(X, t)` with the given radius split: `z = x/sqrt(n)`
    /// and `|y|^2 = 2t - |X|^2/n` (requires `|X|^2 <= 2nt`).
    pub fn over(x0: f64, x: &[f64], t: f64, n: usize) -> Result<Self> {
        let sn = (n as f64).sqrt();
        let z0 = x0 / sn;
        let z: Vec<f64> = x.iter().map(|v| v / sn).collect();
        let rest = 2.0 * t - z0 * z0 - z.iter().map(|v| v * v).sum::<f64>();
        if rest < 0.0 {
            return Err(Error::domain(format!("|X|^2 exceeds 2nt at (x0 = {x0}, x = {x:?}, t = {t}, n = {n})")));
        }
        Self::new(z0, z, rest.sqrt(), n)
    }

    fn sqrt_n(&self) -> f64 {
        (self.n as f64).sqrt()
    }
    /// `x0 = sqrt(n) z0`.
    pub fn x0(&self) -> f64 {
        self.sqrt_n() * self.z0
    }
    /// `x = sqrt(n) z`.
    pub fn x(&self) -> Vec<f64> {
        self.z.iter().map(|v| self.sqrt_n() * v).collect()
    }
    /// `t = (z0^2 + |z|^2 + |y|^2) / 2`.
    pub fn t(&self) -> f64 {
        0.5 * (self.z0 * self.z0 + self.z.iter().map(|v| v * v).sum::<f64>() + self.y_norm * self.y_norm)
    }
    /// `r = sqrt(2t)`.
    pub fn r(&self) -> f64 {
        (2.0 * self.t()).sqrt()
    }
}

/// `V_n = U o F` at a lift point.
pub fn eval_lift(ext: &dyn ExtensionField, pt: &LiftPoint) -> Result<f64> {
    check_dim(ext.dim(), pt.z.len())?;
    ext.value(pt.x0(), &pt.x(), pt.t())
}

/// Result of [`chain_rule_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleResidual {
    /// `|grad V_n|^2` by finite differences in lift coordinates.
    pub lhs: f64,
    /// `n |grad U|^2 + 2 (X.grad U) dU/dt + 2t (dU/dt)^2`.
    pub rhs: f64,
    /// `|lhs - rhs| / max(|rhs|, 1e-300)`.
    pub grad_gap: f64,
    /// Largest gap in `dV/dz_i = sqrt(n) dU/dx_i + z_i dU/dt` (including `z0`),
    /// relative to the size of the gradient.
    pub component_gap: f64,
}

impl ChainRuleResidual {
    pub fn residual(&self) -> f64 {
        self.grad_gap.max(self.component_gap)
    }
}

/// Fourth-order central difference.
fn d4<F: Fn(f64) -> Result<f64>>(f: F, h: f64) -> Result<f64> {
    Ok((8.0 * (f(h)? - f(-h)?) - (f(2.0 * h)? - f(-2.0 * h)?)) / (12.0 * h))
}

/// Compare `|grad V_n|^2` computed by finite differences in the lift
/// coordinates with the chain-rule expression in terms of `U`.
pub fn chain_rule_check(ext: &dyn ExtensionField, pt: &LiftPoint) -> Result<ChainRuleResidual> {
    check_dim(ext.dim(), pt.z.len())?;
    let d = pt.z.len();
    let scale = pt.r().max(1.0);
    let h = 1e-4 * scale;
    let h0 = h.min(0.25 * pt.z0);
    let v_at = |z0: f64, z: &[f64], y: f64| -> Result<f64> {
        let p = LiftPoint {
            z0,
            z: z.to_vec(),
            y_norm: y.abs(),
            n: pt.n,
        };
        eval_lift(ext, &p)
    };
    let mut fd = [0.0; MAX_DIM + 2];
    fd[0] = d4(|e| v_at(pt.z0 + e, &pt.z, pt.y_norm), h0)?;
    for i in 0..d {
        fd[i + 1] = d4(
            |e| {
                let mut z = pt.z.clone();
                z[i] += e;
                v_at(pt.z0, &z, pt.y_norm)
            },
            h,
        )?;
    }
    // V depends on y through |y| only: the y-gradient has norm |dV/d|y||,
    // which vanishes at y = 0 by symmetry.
    fd[d + 1] = if pt.y_norm > 0.0 {
        d4(|e| v_at(pt.z0, &pt.z, pt.y_norm + e), h.min(0.25 * pt.y_norm))?
    } else {
        0.0
    };
    let lhs: f64 = fd[..d + 2].iter().map(|v| v * v).sum();

    let (x0, x, t) = (pt.x0(), pt.x(), pt.t());
    let j = first_order_jet(ext, x0, &x, t)?;
    let n = pt.n as f64;
    let rhs = n * j.grad_norm2(d) + 2.0 * j.x_dot_grad(x0, &x) * j.dt + 2.0 * t * j.dt * j.dt;
    let sn = n.sqrt();
    let mut exact = [0.0; MAX_DIM + 2];
    exact[0] = sn * j.grad[0] + pt.z0 * j.dt;
    for i in 0..d {
        exact[i + 1] = sn * j.grad[i + 1] + pt.z[i] * j.dt;
    }
    exact[d + 1] = pt.y_norm * j.dt.abs();
    let norm = rhs.abs().sqrt().max(1e-300);
    let component_gap = (0..d + 1)
        .map(|i| (fd[i] - exact[i]).abs())
        .chain(std::iter::once((fd[d + 1].abs() - exact[d + 1]).abs()))
        .fold(0.0, f64::max)
        / norm;
    Ok(ChainRuleResidual {
        lhs,
        rhs,
        grad_gap: (lhs - rhs).abs() / rhs.abs().max(1e-300),
        component_gap,
    })
}

/// `H = 2 (X, t) . grad_(X,t) dU/dt + a dU/dt` from a jet.
pub fn h_from_jet(j: &Jet, x0: f64, x: &[f64], t: f64, params: &FracParams) -> f64 {
    2.0 * (j.x_dot_grad_dt(x0, x) + t * j.dtt) + params.a() * j.dt
}

/// The source of the lifted equation, `div(z0^a grad V_n) = z0^a S` with
/// `S = H + (d+1) dU/dt`: each of the `d+1` directions `z0, z_i` contributes
/// `d/dz_i (z_i dU/dt) = dU/dt + ...` beyond the terms collected in `H`.
pub fn source_from_jet(j: &Jet, x0: f64, x: &[f64], t: f64, params: &FracParams) -> f64 {
    h_from_jet(j, x0, x, t, params) + (params.d() as f64 + 1.0) * j.dt
}

/// `S(X, t)` (see [`source_from_jet`]).
pub fn eval_lift_source(ext: &dyn ExtensionField, x0: f64, x: &[f64], t: f64, params: &FracParams) -> Result<f64> {
    check_dim(ext.dim(), x.len())?;
    let j = ext.jet(x0, x, t)?;
    Ok(source_from_jet(&j, x0, x, t, params))
}

/// `H(X, t)`; needs second partials (analytic when available).
pub fn eval_h(ext: &dyn ExtensionField, x0: f64, x: &[f64], t: f64, params: &FracParams) -> Result<f64> {
    check_dim(ext.dim(), x.len())?;
    let j = ext.jet(x0, x, t)?;
    Ok(h_from_jet(&j, x0, x, t, params))
}

/// The binomial weights `G_n`, `G~_n` and the normalisation `C_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftWeights {
    pub n: usize,
    /// `ln C_n`; `C_n = n^((d+1+a)/2) / |S^(n-1)|` itself overflows for
    /// large `n`, and the reduced forms never need it.
    pub ln_cn: f64,
}

/// The domination constant `sup G_n / G` over all `n >= 2`: the ratio
/// `(1 - w)^((n-2)/2) e^(nw/2)` peaks at `w = 2/n` with value
/// `((n-2)/n)^((n-2)/2) e < e`.
pub const DOMINATION_CONSTANT: f64 = std::f64::consts::E;

impl LiftWeights {
    pub fn new(n: usize, params: &FracParams) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("n = {n} must be >= 2")));
        }
        let nf = n as f64;
        let e = 0.5 * (params.d() as f64 + 1.0 + params.a());
        // |S^(n-1)| = 2 pi^(n/2) / Gamma(n/2)
        let ln_sphere = std::f64::consts::LN_2 + 0.5 * nf * std::f64::consts::PI.ln() - ln_gamma(0.5 * nf)?;
        Ok(Self {
            n,
            ln_cn: e * nf.ln() - ln_sphere,
        })
    }

    /// `C_n` (may overflow to infinity for large `n`).
    pub fn cn(&self) -> f64 {
        self.ln_cn.exp()
    }

    /// `G_n(X, t) = (1 - |X|^2/2nt)_+^((n-2)/2)`.
    pub fn gn(&self, x0: f64, x: &[f64], t: f64) -> f64 {
        let r2 = x0 * x0 + x.iter().map(|v| v * v).sum::<f64>();
        self.profile(r2 / (2.0 * self.n as f64 * t))
    }

    /// `G~_n(x, t) = G_n((0, x), t)`.
    pub fn gn_tilde(&self, x: &[f64], t: f64) -> f64 {
        self.gn(0.0, x, t)
    }

    /// `(1 - w)_+^((n-2)/2)` with an exact zero for `w >= 1`.
    pub fn profile(&self, w: f64) -> f64 {
        if w >= 1.0 {
            return 0.0;
        }
        let m = 0.5 * (self.n as f64 - 2.0);
        if m == 0.0 {
            return 1.0;
        }
        (m * (-w).ln_1p()).exp()
    }

    /// `sup_q |G_n - e^-q|` over `q = |X|^2/4t` in `[0, q_max]` on `samples`
    /// equally spaced points.
    pub fn sup_gap(&self, q_max: f64, samples: usize) -> f64 {
        let nf = self.n as f64;
        (0..=samples)
            .map(|i| {
                let q = q_max * i as f64 / samples as f64;
                (self.profile(2.0 * q / nf) - (-q).exp()).abs()
            })
            .fold(0.0, f64::max)
    }

    /// `sup_q G_n / e^-q` on the same kind of grid.
    pub fn sup_ratio(&self, q_max: f64, samples: usize) -> f64 {
        let nf = self.n as f64;
        (0..=samples)
            .map(|i| {
                let q = q_max * i as f64 / samples as f64;
                self.profile(2.0 * q / nf) * q.exp()
            })
            .fold(0.0, f64::max)
    }
}

/// `C_n E_n(R)` in reduced form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LiftEnergy {
    /// `R^(kappa-d-1) n int_0^R (r/R)^(n-1) (1/2) int x0^a (|grad U|^2
    /// + (2 (X.grad U) dU/dt + r^2 (dU/dt)^2)/n) G_n dX dr`.
    pub e1: f64,
    /// `-eta_s/(p+1) R^(kappa-d-1) n int_0^R (r/R)^(n-1) int |u|^(p+1) G~_n dx dr`.
    pub e2: f64,
    /// `R^(kappa-d-2) s/(p-1) int x0^a U^2 G_n(X, R^2/2) dX`.
    pub e3: f64,
    pub total: f64,
}

/// The two terms of `d/dR (C_n E_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LiftDerivative {
    /// `R^(kappa-d-3) int x0^a (X.grad U + R^2 dU/dt + gamma U)^2 G_n(X, R^2/2) dX >= 0`.
    pub a_n: f64,
    /// `R^(kappa-d-2) int_0^R (r/R)^(n-1) int x0^a H (gamma U + X.grad U
    /// + r^2 dU/dt) G_n dX dr`; of order `1/n`.
    pub b_n: f64,
}

/// Options of the reduced lift integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftOptions {
    pub res: usize,
    /// Split `eps R` of the radial concentration integrals.
    pub eps: f64,
}

impl Default for LiftOptions {
    fn default() -> Self {
        Self { res: 64, eps: 0.5 }
    }
}

fn check_fields(u: &dyn BoundaryField, ext: &dyn ExtensionField, params: &FracParams) -> Result<()> {
    check_dim(params.d(), u.dim())?;
    check_dim(params.d(), ext.dim())
}

/// Radial parts: `[E1 inner, E2 inner, B inner]` integrated in `r`.
fn radial_parts(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    r_max: f64,
    n: usize,
    params: &FracParams,
    opts: LiftOptions,
    with_b: bool,
) -> Result<[f64; 3]> {
    let d = params.d();
    let g = params.gamma_exponent();
    let nf = n as f64;
    let p1 = params.p() + 1.0;
    radial_concentration_multi(
        |r| {
            let t = 0.5 * r * r;
            let [e1, b] = integrate_halfspace_binomial(
                |x0, x| {
                    let j = if with_b { ext.jet(x0, x, t)? } else { first_order_jet(ext, x0, x, t)? };
                    let xg = j.x_dot_grad(x0, x);
                    let e1 = 0.5 * (j.grad_norm2(d) + (2.0 * xg * j.dt + r * r * j.dt * j.dt) / nf);
                    let b = if with_b {
                        source_from_jet(&j, x0, x, t, params) * (g * j.value + xg + r * r * j.dt)
                    } else {
                        0.0
                    };
                    Ok([e1, b])
                },
                t,
                n,
                params,
                opts.res,
                ext.uniform_in_x(),
            )?;
            let [e2] = integrate_boundary_binomial(|x| Ok([u.value(x, t)?.abs().powf(p1)]), t, n, d, opts.res, u.uniform_in_x())?;
            Ok([e1.value, e2.value, b.value])
        },
        r_max,
        n,
        opts.res,
        opts.eps,
    )
}

/// Slice parts at `t = R^2/2`: `[int x0^a U^2 G_n, int x0^a (...)^2 G_n]`.
fn slice_parts(ext: &dyn ExtensionField, r: f64, n: usize, params: &FracParams, opts: LiftOptions) -> Result<[f64; 2]> {
    let t = 0.5 * r * r;
    let g = params.gamma_exponent();
    let [sq, a] = integrate_halfspace_binomial(
        |x0, x| {
            let j = first_order_jet(ext, x0, x, t)?;
            let v = j.x_dot_grad(x0, x) + r * r * j.dt + g * j.value;
            Ok([j.value * j.value, v * v])
        },
        t,
        n,
        params,
        opts.res,
        ext.uniform_in_x(),
    )?;
    Ok([sq.value, a.value])
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("R = {r} must be finite and > 0")))
    }
}

fn assemble_energy(rad: [f64; 3], sq: f64, r: f64, params: &FracParams) -> Result<LiftEnergy> {
    let d = params.d() as f64;
    let k = params.kappa();
    let eta = FracKernels::new(*params)?.constants().eta_s;
    let e1 = r.powf(k - d - 1.0) * rad[0];
    let e2 = -eta / (params.p() + 1.0) * r.powf(k - d - 1.0) * rad[1];
    let e3 = r.powf(k - d - 2.0) * params.s() / (params.p() - 1.0) * sq;
    Ok(LiftEnergy {
        e1,
        e2,
        e3,
        total: e1 + e2 + e3,
    })
}

/// `C_n E_n(R)` from the three reduced integrals.
pub fn eval_en_reduced(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    r: f64,
    n: usize,
    params: &FracParams,
    opts: LiftOptions,
) -> Result<LiftEnergy> {
    check_fields(u, ext, params)?;
    check_radius(r)?;
    let rad = radial_parts(u, ext, r, n, params, opts, false)?;
    let [sq, _] = slice_parts(ext, r, n, params, opts)?;
    assemble_energy(rad, sq, r, params)
}

/// `A_n` and `B_n`.
pub fn eval_an_bn(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    r: f64,
    n: usize,
    params: &FracParams,
    opts: LiftOptions,
) -> Result<LiftDerivative> {
    Ok(eval_lift_cell(u, ext, r, n, params, opts)?.1)
}

/// Energy and derivative terms together (shares the radial sweep).
pub fn eval_lift_cell(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    r: f64,
    n: usize,
    params: &FracParams,
    opts: LiftOptions,
) -> Result<(LiftEnergy, LiftDerivative)> {
    check_fields(u, ext, params)?;
    check_radius(r)?;
    let rad = radial_parts(u, ext, r, n, params, opts, true)?;
    let [sq, a] = slice_parts(ext, r, n, params, opts)?;
    let d = params.d() as f64;
    let k = params.kappa();
    let energy = assemble_energy(rad, sq, r, params)?;
    let deriv = LiftDerivative {
        a_n: r.powf(k - d - 3.0) * a,
        b_n: r.powf(k - d - 2.0) * rad[2] / n as f64,
    };
    Ok((energy, deriv))
}

/// One `(R, n)` cell of the convergence table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiftRow {
    #[serde(rename = "R")]
    pub r: f64,
    pub n: usize,
    pub ln_cn: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
    /// `C_n E_n(R)`.
    pub cn_en: f64,
    /// `E(R)`.
    pub e_script: f64,
    /// `|C_n E_n(R) - E(R)|`.
    pub energy_gap: f64,
    pub a_n: f64,
    /// `dE/dR` of the limit functional.
    pub d_script: f64,
    /// `|A_n - dE/dR|`.
    pub a_gap: f64,
    pub b_n: f64,
    /// `d/dR (C_n E_n)` by Richardson-extrapolated central differences.
    pub fd_derivative: f64,
    /// `|fd_derivative - (A_n - B_n)| / (|A_n| + |B_n|)`.
    pub theorem_residual: f64,
}

/// Least-squares fit `|B_n| ~ C n^-q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    #[serde(rename = "R")]
    pub r: f64,
    pub exponent: f64,
    pub constant: f64,
}

/// Per-`R` monotonicity of the gaps in `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapTrend {
    #[serde(rename = "R")]
    pub r: f64,
    pub energy_gap_decreasing: bool,
    pub a_gap_decreasing: bool,
}

/// The `n -> infinity` diagnostics over a grid of radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<LiftRow>,
    pub b_decay: Vec<DecayFit>,
    pub trends: Vec<GapTrend>,
    /// `(n, sup |G_n - G|)` on `|X|^2/4t in [0, 40]`.
    pub gn_sup_gap: Vec<(usize, f64)>,
    pub options: LiftOptions,
}

/// Fit `ln |y| = ln C - q ln n`.
pub fn fit_power_decay(ns: &[usize], ys: &[f64]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(ys)
        .map(|(n, y)| ((*n as f64).ln(), y.abs().ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (-slope, (my - slope * mx).exp())
}

/// A single cell with its finite-difference derivative check.
pub fn lift_row(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    r: f64,
    n: usize,
    params: &FracParams,
    opts: LiftOptions,
) -> Result<LiftRow> {
    let (energy, deriv) = eval_lift_cell(u, ext, r, n, params, opts)?;
    let fd = richardson_derivative(|rr| Ok(eval_en_reduced(u, ext, rr, n, params, opts)?.total), r, 1e-3 * r)?;
    let e_script = eval_e_script_terms(u, ext, r, params, opts.res)?.total();
    let d_script = eval_d_script(ext, r, params, opts.res)?.value;
    let scale = deriv.a_n.abs() + deriv.b_n.abs();
    Ok(LiftRow {
        r,
        n,
        ln_cn: LiftWeights::new(n, params)?.ln_cn,
        e1: energy.e1,
        e2: energy.e2,
        e3: energy.e3,
        cn_en: energy.total,
        e_script,
        energy_gap: (energy.total - e_script).abs(),
        a_n: deriv.a_n,
        d_script,
        a_gap: (deriv.a_n - d_script).abs(),
        b_n: deriv.b_n,
        fd_derivative: fd,
        theorem_residual: (fd - (deriv.a_n - deriv.b_n)).abs() / scale.max(1e-300),
    })
}

/// The full table over `r_grid x n_list` (cells evaluated in parallel,
/// assembled in `(R, n)` order).
pub fn convergence_report(
    u: &dyn BoundaryField,
    ext: &dyn ExtensionField,
    params: &FracParams,
    r_grid: &[f64],
    n_list: &[usize],
    opts: LiftOptions,
) -> Result<ConvergenceReport> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) || n_list.first().is_some_and(|n| *n < 2) {
        return Err(Error::config("n_list", "must be strictly increasing with n >= 2"));
    }
    let cells: Vec<(f64, usize)> = r_grid.iter().flat_map(|r| n_list.iter().map(move |n| (*r, *n))).collect();
    let rows = eval_nodes(cells.len(), |i| lift_row(u, ext, cells[i].0, cells[i].1, params, opts))?;
    let mut b_decay = Vec::new();
    let mut trends = Vec::new();
    for r in r_grid {
        let sub: Vec<&LiftRow> = rows.iter().filter(|row| row.r == *r).collect();
        let ns: Vec<usize> = sub.iter().map(|row| row.n).collect();
        let bs: Vec<f64> = sub.iter().map(|row| row.b_n).collect();
        if ns.len() >= 2 {
            let (q, c) = fit_power_decay(&ns, &bs);
            b_decay.push(DecayFit {
                r: *r,
                exponent: q,
                constant: c,
            });
        }
        trends.push(GapTrend {
            r: *r,
            energy_gap_decreasing: sub.windows(2).all(|w| w[1].energy_gap < w[0].energy_gap),
            a_gap_decreasing: sub.windows(2).all(|w| w[1].a_gap < w[0].a_gap),
        });
    }
    let gn_sup_gap = n_list
        .iter()
        .map(|n| Ok((*n, LiftWeights::new(*n, params)?.sup_gap(40.0, 4000))))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport {
        rows,
        b_decay,
        trends,
        gn_sup_gap,
        options: opts,
    })
}
