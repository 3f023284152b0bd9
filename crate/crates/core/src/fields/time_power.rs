use crate::error::{check_dim, Error, Result};
use crate::kernels::FracParams;
use crate::quadrature::CompensatedSum;
use crate::special::gamma;

use super::{check_time_in, check_x0, BoundaryField, ExtensionField, Jet};

/// Amplitude `A = (Gamma(beta + s) / Gamma(beta))^(1/(p-1))` for which
/// `A (t + c)^-beta` solves the backward equation.
pub fn self_similar_amplitude(params: &FracParams) -> Result<f64> {
    let b = params.beta();
    let ratio = gamma(b + params.s())? / gamma(b)?;
    Ok(ratio.powf(1.0 / (params.p() - 1.0)))
}

/// `u(x, t) = A (t + c)^-beta`, `beta = s/(p-1)`, independent of `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimePowerSolution {
    params: FracParams,
    amplitude: f64,
    shift: f64,
}

impl TimePowerSolution {
    /// Any amplitude; only `self_similar_amplitude` gives a solution.
    pub fn new(params: FracParams, amplitude: f64, shift: f64) -> Result<Self> {
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::domain(format!("shift c = {shift} must be finite and >= 0")));
        }
        if !amplitude.is_finite() {
            return Err(Error::domain("amplitude must be finite"));
        }
        Ok(Self {
            params,
            amplitude,
            shift,
        })
    }

    /// The exact solution with shift `c`.
    pub fn exact(params: FracParams, shift: f64) -> Result<Self> {
        Self::new(params, self_similar_amplitude(&params)?, shift)
    }

    pub fn params(&self) -> &FracParams {
        &self.params
    }
    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// `u` as a function of time only.
    pub fn at(&self, t: f64) -> Result<f64> {
        let tt = t + self.shift;
        if !(tt > 0.0) {
            return Err(Error::domain(format!("t + c = {tt} must be > 0")));
        }
        Ok(self.amplitude * tt.powf(-self.params.beta()))
    }

    /// The extension `U`, evaluated on a precomputed grid.
    pub fn extension(&self) -> TimePowerExtension {
        TimePowerExtension::new(*self)
    }
}

impl BoundaryField for TimePowerSolution {
    fn dim(&self) -> usize {
        self.params.d()
    }
    fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        check_dim(self.params.d(), x.len())?;
        self.at(t)
    }
    fn time_domain(&self) -> (f64, f64) {
        (-self.shift, f64::INFINITY)
    }
    fn uniform_in_x(&self) -> bool {
        true
    }
    fn heat_average(&self, x: &[f64], tau: f64, _sigma: f64, _res: usize) -> Result<f64> {
        self.value(x, tau)
    }
}

/// Step in `v = ln w` of the extension quadrature.
const STEP: f64 = 0.125;
/// `e^-w` is below `3e-20` beyond `w = 45`.
const V_TOP: f64 = 3.806_662_489_770_319; // ln 45
const V_BOTTOM: f64 = -700.0;

/// Extension of [`TimePowerSolution`]:
/// `U(x0, t) = (A / Gamma(s)) int_0^inf w^(s-1) e^-w (t + c + x0^2/4w)^-beta dw`,
/// the Poisson-kernel average of `u(t + sigma)` written in `w = x0^2/(4 sigma)`.
///
/// The integral is a trapezoid rule in `ln w` on a fixed grid, started
/// where the integrand has decayed by `e^-40`; derivatives are the same sums
/// applied to the differentiated integrand, so they are consistent with the
/// value to rounding.
#[derive(Debug, Clone)]
pub struct TimePowerExtension {
    sol: TimePowerSolution,
    /// `1/(4 w_j)` for `v_j = V_TOP - j STEP`.
    inv4w: Vec<f64>,
    /// `STEP w_j^s e^-w_j A / Gamma(s)`.
    base: Vec<f64>,
    tail: f64,
}

struct Sums {
    u: f64,
    ut: f64,
    ux: f64,
    uxx: f64,
    utt: f64,
    utx: f64,
}

impl TimePowerExtension {
    pub fn new(sol: TimePowerSolution) -> Self {
        let s = sol.params.s();
        let k = sol.amplitude / gamma(s).expect("0 < s < 1");
        let count = ((V_TOP - V_BOTTOM) / STEP).ceil() as usize + 1;
        let mut inv4w = Vec::with_capacity(count);
        let mut base = Vec::with_capacity(count);
        for j in 0..count {
            let v = V_TOP - j as f64 * STEP;
            let w = v.exp();
            inv4w.push(0.25 / w);
            base.push(STEP * k * (s * v - w).exp());
        }
        let tail = 40.0 / (s + sol.params.beta());
        Self {
            sol,
            inv4w,
            base,
            tail,
        }
    }

    pub fn solution(&self) -> &TimePowerSolution {
        &self.sol
    }

    fn check(&self, x0: f64, x: &[f64], t: f64) -> Result<f64> {
        check_x0(x0)?;
        check_dim(self.sol.params.d(), x.len())?;
        check_time_in((-self.sol.shift, f64::INFINITY), t)?;
        Ok(t + self.sol.shift)
    }

    /// Index range of grid nodes that matter for `xi = x0^2/(4T)`.
    fn last_index(&self, xi: f64) -> usize {
        let v_lo = (xi.ln().min(0.0) - self.tail).max(V_BOTTOM);
        (((V_TOP - v_lo) / STEP).ceil() as usize).min(self.base.len() - 1)
    }

    fn sums(&self, x0: f64, tt: f64) -> Sums {
        let beta = self.sol.params.beta();
        let x02 = x0 * x0;
        let last = self.last_index(x02 / (4.0 * tt));
        let mut acc = [CompensatedSum::new(); 6];
        for j in 0..=last {
            let b = self.base[j];
            let i4 = self.inv4w[j];
            let q = tt + x02 * i4;
            let g = (-beta * q.ln()).exp() * b;
            let gq = -beta * g / q;
            let gqq = -(beta + 1.0) * gq / q;
            let y = 2.0 * x0 * i4;
            acc[0].add(g);
            acc[1].add(gq);
            acc[2].add(gq * y);
            acc[3].add(gqq * y * y + 2.0 * gq * i4);
            acc[4].add(gqq);
            acc[5].add(gqq * y);
        }
        Sums {
            u: acc[0].value(),
            ut: acc[1].value(),
            ux: acc[2].value(),
            uxx: acc[3].value(),
            utt: acc[4].value(),
            utx: acc[5].value(),
        }
    }

    /// `U(x0, t)`; the field does not depend on `x`.
    pub fn profile(&self, x0: f64, t: f64) -> Result<f64> {
        let tt = t + self.sol.shift;
        check_x0(x0)?;
        check_time_in((-self.sol.shift, f64::INFINITY), t)?;
        let beta = self.sol.params.beta();
        let x02 = x0 * x0;
        let last = self.last_index(x02 / (4.0 * tt));
        let mut acc = CompensatedSum::new();
        for j in 0..=last {
            let q = tt + x02 * self.inv4w[j];
            acc.add(self.base[j] * (-beta * q.ln()).exp());
        }
        Ok(acc.value())
    }
}

impl ExtensionField for TimePowerExtension {
    fn dim(&self) -> usize {
        self.sol.params.d()
    }

    fn value(&self, x0: f64, x: &[f64], t: f64) -> Result<f64> {
        self.check(x0, x, t)?;
        self.profile(x0, t)
    }

    fn jet(&self, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
        let tt = self.check(x0, x, t)?;
        let s = self.sums(x0, tt);
        let mut jet = Jet {
            value: s.u,
            dt: s.ut,
            d2_x0: s.uxx,
            dtt: s.utt,
            ..Jet::default()
        };
        jet.grad[0] = s.ux;
        jet.grad_dt[0] = s.utx;
        Ok(jet)
    }

    fn has_analytic_jet(&self) -> bool {
        true
    }

    fn uniform_in_x(&self) -> bool {
        true
    }

    fn time_domain(&self) -> (f64, f64) {
        (-self.sol.shift, f64::INFINITY)
    }
}
