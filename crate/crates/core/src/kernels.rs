//! Parameters, normalising constants and closed-form kernels of the
//! fractional heat operator `(d_t - Delta)^s` and its extension problem.
//!
//! Points of the upper half-space are written `X = (x0, x)` with `x0 > 0` the
//! extension variable and `x` in `R^d`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::special::gamma;

/// Exponents below this value make `exp` underflow to zero; kernels return
/// an exact zero instead of calling `exp`.
const EXP_UNDERFLOW: f64 = -745.0;

/// Largest spatial dimension supported by the fixed-size jets.
pub const MAX_DIM: usize = 3;

/// Model parameters `(s, p, d)` together with the derived exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct FracParams {
    s: f64,
    p: f64,
    d: usize,
    a: f64,
    beta: f64,
}

#[derive(Deserialize)]
struct RawParams {
    s: f64,
    p: f64,
    d: usize,
}

impl TryFrom<RawParams> for FracParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        FracParams::new(raw.s, raw.p, raw.d)
    }
}

impl FracParams {
    /// Validate and build. Requires `0 < s < 1`, `p > 1` and `1 <= d <= 3`.
    pub fn new(s: f64, p: f64, d: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return Err(Error::domain(format!("s = {s} must lie in (0, 1)")));
        }
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::domain(format!("p = {p} must be finite and > 1")));
        }
        if d == 0 || d > MAX_DIM {
            return Err(Error::domain(format!(
                "spatial dimension d = {d} must lie in 1..={MAX_DIM}"
            )));
        }
        Ok(Self {
            s,
            p,
            d,
            a: 1.0 - 2.0 * s,
            beta: s / (p - 1.0),
        })
    }

    /// Fractional order `s`.
    pub fn s(&self) -> f64 {
        self.s
    }
    /// Nonlinearity exponent `p`.
    pub fn p(&self) -> f64 {
        self.p
    }
    /// Spatial dimension `d`.
    pub fn d(&self) -> usize {
        self.d
    }
    /// Extension weight exponent `a = 1 - 2s`.
    pub fn a(&self) -> f64 {
        self.a
    }
    /// Self-similar decay rate `beta = s / (p - 1)`.
    pub fn beta(&self) -> f64 {
        self.beta
    }
    /// Homogeneity of backward self-similar solutions, `2s / (p - 1)`.
    pub fn gamma_exponent(&self) -> f64 {
        2.0 * self.beta
    }
    /// Scaling exponent of the functionals, `2s(p + 1)/(p - 1)`.
    pub fn kappa(&self) -> f64 {
        2.0 * self.s * (self.p + 1.0) / (self.p - 1.0)
    }
    /// Minimal algebraic rate of `x0^a f` near `x0 = 0` for fields that are
    /// bounded with a bounded weighted normal derivative: `min(2s, 2 - 2s)`.
    pub(crate) fn boundary_rate(&self) -> f64 {
        (2.0 * self.s).min(2.0 - 2.0 * self.s)
    }
}

/// The two normalising constants of the nonlocal problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelConstants {
    /// `2s |Gamma(-s)| / (4^s Gamma(s))`, the trace constant of the extension.
    pub eta_s: f64,
    /// `Gamma(1 - s) / (2^(2s-1) Gamma(s))`, the Caffarelli-Silvestre constant.
    pub kappa_s: f64,
}

/// Kernels and constants for a fixed set of parameters.
#[derive(Debug, Clone)]
pub struct FracKernels {
    params: FracParams,
    gamma_s: f64,
    abs_gamma_neg_s: f64,
    consts: KernelConstants,
    ks_pref: f64,
    fund_pref: f64,
    poisson_pref: f64,
}

/// Exact partial derivatives of the extension fundamental solution.
#[derive(Debug, Clone, Copy, Default)]
pub struct FundamentalJet {
    pub value: f64,
    /// `d/dx0`, `d/dx_i`.
    pub grad: [f64; MAX_DIM + 1],
    pub dt: f64,
}

fn norm2(z: &[f64]) -> f64 {
    z.iter().map(|v| v * v).sum()
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {v} must be finite and > 0")))
    }
}

impl FracKernels {
    /// Build and validate the kernels for `params`.
    pub fn new(params: FracParams) -> Result<Self> {
        let s = params.s();
        let d = params.d() as f64;
        let gamma_s = gamma(s)?;
        let abs_gamma_neg_s = gamma(-s)?.abs();
        let eta_s = 2.0 * s * abs_gamma_neg_s / (4f64.powf(s) * gamma_s);
        let kappa_s = gamma(1.0 - s)? / (2f64.powf(2.0 * s - 1.0) * gamma_s);
        let four_pi_half_d = (4.0 * PI).powf(0.5 * d);
        Ok(Self {
            params,
            gamma_s,
            abs_gamma_neg_s,
            consts: KernelConstants { eta_s, kappa_s },
            ks_pref: 1.0 / (four_pi_half_d * abs_gamma_neg_s),
            fund_pref: 1.0 / (four_pi_half_d * gamma_s),
            poisson_pref: 1.0 / (4f64.powf(0.5 * d + s) * PI.powf(0.5 * d) * gamma_s),
        })
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }

    /// `Gamma(s)`.
    pub fn gamma_s(&self) -> f64 {
        self.gamma_s
    }

    /// `|Gamma(-s)|`.
    pub fn abs_gamma_neg_s(&self) -> f64 {
        self.abs_gamma_neg_s
    }

    /// Both normalising constants.
    pub fn constants(&self) -> KernelConstants {
        self.consts
    }

    /// Heat-type kernel of the fractional heat operator,
    /// `K_s(z, tau) = e^(-|z|^2/4tau) / ((4 pi)^(d/2) |Gamma(-s)| tau^(d/2+1+s))`.
    pub fn ks(&self, z: &[f64], tau: f64) -> Result<f64> {
        check_dim(self.params.d(), z.len())?;
        check_positive("tau", tau)?;
        let e = -norm2(z) / (4.0 * tau);
        if e < EXP_UNDERFLOW {
            return Ok(0.0);
        }
        let d = self.params.d() as f64;
        Ok(self.ks_pref * e.exp() * tau.powf(-(0.5 * d + 1.0 + self.params.s())))
    }

    /// Fundamental solution of the extension operator at `X = (x0, x)`:
    /// `e^(-|X|^2/4tau) / ((4 pi)^(d/2) Gamma(s) tau^(d/2+1-s))`.
    pub fn fundamental(&self, x0: f64, x: &[f64], tau: f64) -> Result<f64> {
        check_dim(self.params.d(), x.len())?;
        check_positive("tau", tau)?;
        if !(x0 >= 0.0) {
            return Err(Error::domain(format!("x0 = {x0} must be >= 0")));
        }
        let e = -(x0 * x0 + norm2(x)) / (4.0 * tau);
        if e < EXP_UNDERFLOW {
            return Ok(0.0);
        }
        let d = self.params.d() as f64;
        Ok(self.fund_pref * e.exp() * tau.powf(-(0.5 * d + 1.0 - self.params.s())))
    }

    /// The fundamental solution with its value and first derivatives.
    pub fn fundamental_jet(&self, x0: f64, x: &[f64], tau: f64) -> Result<FundamentalJet> {
        let value = self.fundamental(x0, x, tau)?;
        let d = self.params.d();
        let mut grad = [0.0; MAX_DIM + 1];
        grad[0] = -x0 / (2.0 * tau) * value;
        for i in 0..d {
            grad[i + 1] = -x[i] / (2.0 * tau) * value;
        }
        let r2 = x0 * x0 + norm2(x);
        let ex = 0.5 * d as f64 + 1.0 - self.params.s();
        let dt = value * (r2 / (4.0 * tau * tau) - ex / tau);
        Ok(FundamentalJet { value, grad, dt })
    }

    /// Rescaled weight `t^(gamma+1) G(X, t)` used by the monotone functional.
    /// With `boundary = true` the point is `(0, x)` and only `x` is passed.
    pub fn fundamental_rescaled(&self, point: &[f64], t: f64, boundary: bool) -> Result<f64> {
        let g = if boundary {
            self.fundamental(0.0, point, t)?
        } else {
            if point.is_empty() {
                return Err(Error::Dimension {
                    expected: self.params.d() + 1,
                    got: 0,
                });
            }
            self.fundamental(point[0], &point[1..], t)?
        };
        Ok(t.powf(self.params.gamma_exponent() + 1.0) * g)
    }

    /// Elliptic Poisson kernel of the weighted extension in `R^(N+1)_+`,
    /// `C z0^(1-a) |(z0, z)|^-(N+1-a)`. Here `N = z.len()` may differ from `d`.
    pub fn poisson_elliptic(&self, z0: f64, z: &[f64]) -> Result<f64> {
        check_positive("z0", z0)?;
        let n = z.len() as f64;
        let a = self.params.a();
        let c = gamma(0.5 * (n + 1.0 - a))? / (PI.powf(0.5 * n) * gamma(0.5 * (1.0 - a))?);
        let r2 = z0 * z0 + norm2(z);
        Ok(c * z0.powf(1.0 - a) * r2.powf(-0.5 * (n + 1.0 - a)))
    }

    /// Parabolic Poisson kernel of the extension problem,
    /// `x0^(2s) tau^(-d/2-1-s) e^(-(x0^2+|z|^2)/4tau) / (4^(d/2+s) pi^(d/2) Gamma(s))`.
    pub fn poisson_parabolic(&self, x0: f64, z: &[f64], tau: f64) -> Result<f64> {
        check_dim(self.params.d(), z.len())?;
        check_positive("x0", x0)?;
        check_positive("tau", tau)?;
        let e = -(x0 * x0 + norm2(z)) / (4.0 * tau);
        if e < EXP_UNDERFLOW {
            return Ok(0.0);
        }
        let s = self.params.s();
        let d = self.params.d() as f64;
        Ok(self.poisson_pref * x0.powf(2.0 * s) * tau.powf(-(0.5 * d + 1.0 + s)) * e.exp())
    }

    /// Spatial marginal of the parabolic Poisson kernel,
    /// `x0^(2s) tau^(-1-s) e^(-x0^2/4tau) / (4^s Gamma(s))`; a probability
    /// density in `tau` on `(0, inf)` for every `x0 > 0`.
    pub fn poisson_marginal(&self, x0: f64, tau: f64) -> Result<f64> {
        check_positive("x0", x0)?;
        check_positive("tau", tau)?;
        let e = -x0 * x0 / (4.0 * tau);
        if e < EXP_UNDERFLOW {
            return Ok(0.0);
        }
        let s = self.params.s();
        Ok(x0.powf(2.0 * s) * tau.powf(-1.0 - s) * e.exp() / (4f64.powf(s) * self.gamma_s))
    }
}
