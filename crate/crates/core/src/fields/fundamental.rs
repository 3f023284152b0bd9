use crate::error::{Error, Result};
use crate::kernels::FracKernels;

use super::{check_x0, ExtensionField, Jet};

/// The fundamental solution of the extension operator as a field,
/// `U(X, t) = G(X, tau)` with `tau = t` or, with a reversal time `T0`,
/// `tau = T0 - t` (which solves the backward extension equation).
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    kernels: FracKernels,
    reversal: Option<f64>,
}

impl FundamentalSolution {
    pub fn forward(kernels: FracKernels) -> Self {
        Self {
            kernels,
            reversal: None,
        }
    }

    pub fn reversed(kernels: FracKernels, t0: f64) -> Self {
        Self {
            kernels,
            reversal: Some(t0),
        }
    }

    fn tau(&self, t: f64) -> Result<(f64, f64)> {
        let (tau, sign) = match self.reversal {
            None => (t, 1.0),
            Some(t0) => (t0 - t, -1.0),
        };
        if tau > 0.0 {
            Ok((tau, sign))
        } else {
            Err(Error::domain(format!("kernel time {tau} must be > 0 (t = {t})")))
        }
    }
}

impl ExtensionField for FundamentalSolution {
    fn dim(&self) -> usize {
        self.kernels.params().d()
    }

    fn value(&self, x0: f64, x: &[f64], t: f64) -> Result<f64> {
        check_x0(x0)?;
        let (tau, _) = self.tau(t)?;
        self.kernels.fundamental(x0, x, tau)
    }

    fn jet(&self, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
        check_x0(x0)?;
        let (tau, sign) = self.tau(t)?;
        let g = self.kernels.fundamental(x0, x, tau)?;
        let p = self.kernels.params();
        let d = p.d();
        let alpha = 0.5 * d as f64 + 1.0 - p.s();
        let r2 = x0 * x0 + x.iter().map(|v| v * v).sum::<f64>();
        let inv = 1.0 / (2.0 * tau);
        // log-derivative in tau and its tau-derivative
        let l = r2 / (4.0 * tau * tau) - alpha / tau;
        let lt = -r2 / (2.0 * tau * tau * tau) + alpha / (tau * tau);
        let mut jet = Jet {
            value: g,
            dt: sign * g * l,
            dtt: g * (l * l + lt),
            d2_x0: g * (x0 * x0 * inv * inv - inv),
            ..Jet::default()
        };
        let coords = std::iter::once(x0).chain(x.iter().copied());
        for (i, c) in coords.enumerate() {
            jet.grad[i] = -c * inv * g;
            // d/dtau (-c g / 2tau) = -c (g l / 2tau - g / 2tau^2)
            jet.grad_dt[i] = sign * (-c * inv * g * l + c * g * inv / tau);
            if i > 0 {
                jet.lap_x += g * (c * c * inv * inv - inv);
            }
        }
        Ok(jet)
    }

    fn has_analytic_jet(&self) -> bool {
        true
    }

    fn time_domain(&self) -> (f64, f64) {
        match self.reversal {
            None => (0.0, f64::INFINITY),
            Some(t0) => (f64::NEG_INFINITY, t0),
        }
    }
}
