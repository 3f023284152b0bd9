//! WebAssembly bindings for the demo page in `www/`.
//!
//! Each export returns a flat `Float64Array` of row-major records; the
//! plain-Rust functions behind them are public so they can be tested
//! natively.

use fracmono::fields::ExtensionField;
use fracmono::functionals::{functional_curve, CurveTolerances};
use fracmono::harness::linspace;
use fracmono::lift::LiftWeights;
use fracmono::{FracParams, TimePowerSolution};
use wasm_bindgen::prelude::*;

/// Columns per record of [`curve_records`].
pub const CURVE_COLUMNS: usize = 4;

/// `[t, J, D, dJ/dt_fd]` on `points` equally spaced times in `[t_lo, t_hi]`
/// for `u = A (t + c)^(-s/(p-1))` in one dimension.
pub fn curve_records(s: f64, p: f64, c: f64, t_lo: f64, t_hi: f64, points: usize, res: usize) -> Result<Vec<f64>, String> {
    if points < 2 || points > 101 {
        return Err("points must lie in 2..=101".into());
    }
    let params = FracParams::new(s, p, 1).map_err(|e| e.to_string())?;
    let sol = TimePowerSolution::exact(params, c).map_err(|e| e.to_string())?;
    let ext = sol.extension();
    let grid = linspace(t_lo, t_hi, points);
    let fd_h = 1e-3 * t_lo.min(1.0);
    let curve = functional_curve(&sol, &ext, &params, &grid, res, fd_h, CurveTolerances::default()).map_err(|e| e.to_string())?;
    Ok(curve.samples.iter().flat_map(|x| [x.t, x.j, x.d, x.dj_dt_fd]).collect())
}

/// Columns per record of [`binomial_records`].
pub const BINOMIAL_COLUMNS: usize = 3;

/// `[q, G_n, e^-q]` with `q = |X|^2/4t` on `samples + 1` points of `[0, q_max]`.
pub fn binomial_records(n: usize, q_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(q_max > 0.0) || samples == 0 || samples > 10_000 {
        return Err("need q_max > 0 and 1..=10000 samples".into());
    }
    let params = FracParams::new(0.5, 2.0, 1).map_err(|e| e.to_string())?;
    let w = LiftWeights::new(n, &params).map_err(|e| e.to_string())?;
    let nf = n as f64;
    Ok((0..=samples)
        .flat_map(|i| {
            let q = q_max * i as f64 / samples as f64;
            [q, w.profile(2.0 * q / nf), (-q).exp()]
        })
        .collect())
}

/// Columns per record of [`extension_records`].
pub const EXTENSION_COLUMNS: usize = 3;

/// `[x0, U(x0, t), u(t)]` of the time-power extension on `samples` points of
/// `(0, x0_max]`.
pub fn extension_records(s: f64, p: f64, c: f64, t: f64, x0_max: f64, samples: usize) -> Result<Vec<f64>, String> {
    if !(x0_max > 0.0) || samples == 0 || samples > 10_000 {
        return Err("need x0_max > 0 and 1..=10000 samples".into());
    }
    let params = FracParams::new(s, p, 1).map_err(|e| e.to_string())?;
    let sol = TimePowerSolution::exact(params, c).map_err(|e| e.to_string())?;
    let ext = sol.extension();
    let u = sol.at(t).map_err(|e| e.to_string())?;
    (1..=samples)
        .map(|i| {
            let x0 = x0_max * i as f64 / samples as f64;
            Ok([x0, ext.value(x0, &[0.0], t).map_err(|e| e.to_string())?, u])
        })
        .collect::<Result<Vec<[f64; 3]>, String>>()
        .map(|v| v.concat())
}

/// `J`, `D` and the finite-difference `dJ/dt`; see [`curve_records`].
#[wasm_bindgen]
pub fn functional_curve_js(s: f64, p: f64, c: f64, t_lo: f64, t_hi: f64, points: usize, res: usize) -> Result<Vec<f64>, JsError> {
    curve_records(s, p, c, t_lo, t_hi, points, res).map_err(|e| JsError::new(&e))
}

/// The binomial weight against its Gaussian limit; see [`binomial_records`].
#[wasm_bindgen]
pub fn binomial_weight_js(n: usize, q_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    binomial_records(n, q_max, samples).map_err(|e| JsError::new(&e))
}

/// The extension's boundary layer; see [`extension_records`].
#[wasm_bindgen]
pub fn extension_profile_js(s: f64, p: f64, c: f64, t: f64, x0_max: f64, samples: usize) -> Result<Vec<f64>, JsError> {
    extension_records(s, p, c, t, x0_max, samples).map_err(|e| JsError::new(&e))
}
