use crate::error::Result;
use crate::kernels::MAX_DIM;

use super::{check_x0, ExtensionField};

/// Gradient `(d/dx0, d/dx_1, ..., d/dx_d)`, padded to [`MAX_DIM`] + 1.
pub type Gradient = [f64; MAX_DIM + 1];

/// Value and partial derivatives of an extension field at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Jet {
    pub value: f64,
    /// `grad[0] = dU/dx0`, `grad[i] = dU/dx_i`.
    pub grad: Gradient,
    pub dt: f64,
    /// `d^2 U / dx0^2`.
    pub d2_x0: f64,
    /// `Delta_x U` (spatial Laplacian, without `x0`).
    pub lap_x: f64,
    /// `d/dt` of the gradient.
    pub grad_dt: Gradient,
    pub dtt: f64,
}

impl Jet {
    /// `|grad_X U|^2` over the `d + 1` half-space coordinates.
    pub fn grad_norm2(&self, d: usize) -> f64 {
        self.grad[..=d].iter().map(|g| g * g).sum()
    }

    /// `X . grad U` with `X = (x0, x)`.
    pub fn x_dot_grad(&self, x0: f64, x: &[f64]) -> f64 {
        x0 * self.grad[0] + x.iter().zip(&self.grad[1..]).map(|(a, b)| a * b).sum::<f64>()
    }

    /// `X . grad dU/dt`.
    pub fn x_dot_grad_dt(&self, x0: f64, x: &[f64]) -> f64 {
        x0 * self.grad_dt[0] + x.iter().zip(&self.grad_dt[1..]).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Multiply every entry by `c`.
    pub fn scaled(&self, c: f64) -> Jet {
        let mut j = *self;
        j.value *= c;
        j.dt *= c;
        j.d2_x0 *= c;
        j.lap_x *= c;
        j.dtt *= c;
        for g in j.grad.iter_mut().chain(j.grad_dt.iter_mut()) {
            *g *= c;
        }
        j
    }
}

/// Central-difference jet of any extension field. Spatial steps are
/// `1e-4 sqrt(t)` (at most `x0 / 2` in the `x0` direction), the time step is
/// `1e-4 t`.
pub fn finite_difference_jet<F: ExtensionField + ?Sized>(field: &F, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
    let hs = 1e-4 * t.abs().sqrt().max(1e-8);
    let ht = 1e-4 * t.abs().max(1e-8);
    finite_difference_jet_with_steps(field, x0, x, t, hs, ht)
}

/// Central-difference jet with explicit spatial step `hs` (capped at
/// `x0 / 2` in the `x0` direction) and time step `ht`.
pub fn finite_difference_jet_with_steps<F: ExtensionField + ?Sized>(
    field: &F,
    x0: f64,
    x: &[f64],
    t: f64,
    hs: f64,
    ht: f64,
) -> Result<Jet> {
    check_x0(x0)?;
    if !(hs > 0.0 && ht > 0.0) {
        return Err(crate::Error::domain("finite-difference steps must be > 0"));
    }
    let d = x.len();
    let mut p = [0.0; MAX_DIM];
    p[..d].copy_from_slice(x);

    let eval = |dx0: f64, dx: Option<(usize, f64)>, dt: f64| -> Result<f64> {
        let mut q = p;
        if let Some((i, h)) = dx {
            q[i] += h;
        }
        field.value(x0 + dx0, &q[..d], t + dt)
    };

    let u = eval(0.0, None, 0.0)?;
    let mut jet = Jet {
        value: u,
        ..Jet::default()
    };
    let up = eval(0.0, None, ht)?;
    let um = eval(0.0, None, -ht)?;
    jet.dt = (up - um) / (2.0 * ht);
    jet.dtt = (up - 2.0 * u + um) / (ht * ht);

    // x0 direction.
    let h0 = hs.min(0.5 * x0);
    let ap = eval(h0, None, 0.0)?;
    let am = eval(-h0, None, 0.0)?;
    jet.grad[0] = (ap - am) / (2.0 * h0);
    jet.d2_x0 = (ap - 2.0 * u + am) / (h0 * h0);
    let mixed = |dx0: f64, dx: Option<(usize, f64)>, h: f64| -> Result<f64> {
        let pp = eval(dx0, dx, ht)?;
        let pm = eval(dx0, dx, -ht)?;
        let neg = dx.map(|(i, v)| (i, -v));
        let mp = eval(-dx0, neg, ht)?;
        let mm = eval(-dx0, neg, -ht)?;
        Ok((pp - pm - mp + mm) / (4.0 * h * ht))
    };
    jet.grad_dt[0] = mixed(h0, None, h0)?;

    for i in 0..d {
        let bp = eval(0.0, Some((i, hs)), 0.0)?;
        let bm = eval(0.0, Some((i, -hs)), 0.0)?;
        jet.grad[i + 1] = (bp - bm) / (2.0 * hs);
        jet.lap_x += (bp - 2.0 * u + bm) / (hs * hs);
        jet.grad_dt[i + 1] = mixed(0.0, Some((i, hs)), hs)?;
    }
    Ok(jet)
}

/// Value, gradient and time derivative only: the analytic jet when the
/// field has one, otherwise `2(d + 2) + 1` evaluations of central
/// differences (cheaper than the full finite-difference jet).
pub fn first_order_jet<F: ExtensionField + ?Sized>(field: &F, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
    if field.has_analytic_jet() {
        return field.jet(x0, x, t);
    }
    check_x0(x0)?;
    let d = x.len();
    let hs = 1e-4 * t.abs().sqrt().max(1e-8);
    let ht = 1e-4 * t.abs().max(1e-8);
    let mut jet = Jet {
        value: field.value(x0, x, t)?,
        ..Jet::default()
    };
    jet.dt = (field.value(x0, x, t + ht)? - field.value(x0, x, t - ht)?) / (2.0 * ht);
    let h0 = hs.min(0.5 * x0);
    jet.grad[0] = (field.value(x0 + h0, x, t)? - field.value(x0 - h0, x, t)?) / (2.0 * h0);
    let mut p = [0.0; MAX_DIM];
    p[..d].copy_from_slice(x);
    for i in 0..d {
        p[i] = x[i] + hs;
        let up = field.value(x0, &p[..d], t)?;
        p[i] = x[i] - hs;
        let um = field.value(x0, &p[..d], t)?;
        p[i] = x[i];
        jet.grad[i + 1] = (up - um) / (2.0 * hs);
    }
    Ok(jet)
}
