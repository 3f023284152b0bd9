use crate::error::{check_dim, Error, Result};

use super::Gradient;

/// A time-independent field `V(z0, z)` on `R^(N+1)_+`.
pub trait StaticField: Send + Sync {
    /// Boundary dimension `N`.
    fn dim(&self) -> usize;

    /// `V(z0, z)`, defined for `z0 >= 0`.
    fn value(&self, z0: f64, z: &[f64]) -> Result<f64>;

    /// `(dV/dz0, dV/dz_1, ...)`; defaults to central differences with
    /// relative step `1e-5`.
    fn gradient(&self, z0: f64, z: &[f64]) -> Result<Gradient> {
        let n = z.len();
        let mut g = Gradient::default();
        let scale = (z0 * z0 + z.iter().map(|v| v * v).sum::<f64>()).sqrt().max(1.0);
        let h = 1e-5 * scale;
        let h0 = h.min(0.5 * z0.max(0.0)).max(1e-300);
        g[0] = if z0 > 0.0 {
            (self.value(z0 + h0, z)? - self.value(z0 - h0, z)?) / (2.0 * h0)
        } else {
            (self.value(h, z)? - self.value(0.0, z)?) / h
        };
        let mut p = z.to_vec();
        for i in 0..n {
            p[i] = z[i] + h;
            let up = self.value(z0, &p)?;
            p[i] = z[i] - h;
            let um = self.value(z0, &p)?;
            p[i] = z[i];
            g[i + 1] = (up - um) / (2.0 * h);
        }
        Ok(g)
    }
}

/// `V(Z) = amplitude e^(-|Z - center|^2 / width^2)` with
/// `center = (c0, c)` in `R^(N+1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticBump {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub width: f64,
}

impl StaticBump {
    /// `center` has `N + 1` entries (the first is the `z0` coordinate).
    pub fn new(amplitude: f64, center: Vec<f64>, width: f64) -> Result<Self> {
        if center.len() < 2 || center.len() > crate::MAX_DIM + 1 {
            return Err(Error::domain(format!(
                "static bump centre needs 2..={} coordinates",
                crate::MAX_DIM + 1
            )));
        }
        if !(width > 0.0) {
            return Err(Error::domain("bump width must be > 0"));
        }
        Ok(Self {
            amplitude,
            center,
            width,
        })
    }

    fn offsets(&self, z0: f64, z: &[f64]) -> Result<Gradient> {
        check_dim(self.center.len() - 1, z.len())?;
        let mut o = Gradient::default();
        o[0] = z0 - self.center[0];
        for (i, v) in z.iter().enumerate() {
            o[i + 1] = v - self.center[i + 1];
        }
        Ok(o)
    }
}

impl StaticField for StaticBump {
    fn dim(&self) -> usize {
        self.center.len() - 1
    }

    fn value(&self, z0: f64, z: &[f64]) -> Result<f64> {
        let o = self.offsets(z0, z)?;
        let r2: f64 = o.iter().map(|v| v * v).sum();
        Ok(self.amplitude * (-r2 / (self.width * self.width)).exp())
    }

    fn gradient(&self, z0: f64, z: &[f64]) -> Result<Gradient> {
        let o = self.offsets(z0, z)?;
        let v = self.value(z0, z)?;
        let c = -2.0 * v / (self.width * self.width);
        Ok(std::array::from_fn(|i| c * o[i]))
    }
}

/// `W(Z) = R^gamma V(R Z)`.
#[derive(Debug, Clone)]
pub struct Rescaled<F> {
    pub inner: F,
    pub radius: f64,
    pub exponent: f64,
}

impl<F: StaticField> StaticField for Rescaled<F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, z0: f64, z: &[f64]) -> Result<f64> {
        let r = self.radius;
        let zs: Vec<f64> = z.iter().map(|v| r * v).collect();
        Ok(r.powf(self.exponent) * self.inner.value(r * z0, &zs)?)
    }

    fn gradient(&self, z0: f64, z: &[f64]) -> Result<Gradient> {
        let r = self.radius;
        let zs: Vec<f64> = z.iter().map(|v| r * v).collect();
        let g = self.inner.gradient(r * z0, &zs)?;
        let c = r.powf(self.exponent + 1.0);
        Ok(std::array::from_fn(|i| c * g[i]))
    }
}

/// Homogeneous field `V(Z) = |Z|^-gamma (c + b . Z/|Z|)` of degree `-gamma`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousField {
    pub degree: f64,
    pub constant: f64,
    /// `N + 1` coefficients of the angular linear part.
    pub linear: Vec<f64>,
}

impl HomogeneousField {
    fn parts(&self, z0: f64, z: &[f64]) -> Result<(f64, f64, Gradient)> {
        check_dim(self.linear.len() - 1, z.len())?;
        let mut p = Gradient::default();
        p[0] = z0;
        p[1..=z.len()].copy_from_slice(z);
        let r2: f64 = p.iter().map(|v| v * v).sum();
        if r2 == 0.0 {
            return Err(Error::domain("homogeneous field is singular at the origin"));
        }
        let bz: f64 = self.linear.iter().zip(&p).map(|(a, b)| a * b).sum();
        Ok((r2.sqrt(), bz, p))
    }
}

impl StaticField for HomogeneousField {
    fn dim(&self) -> usize {
        self.linear.len() - 1
    }

    fn value(&self, z0: f64, z: &[f64]) -> Result<f64> {
        let (r, bz, _) = self.parts(z0, z)?;
        let g = self.degree;
        Ok(self.constant * r.powf(-g) + bz * r.powf(-g - 1.0))
    }

    fn gradient(&self, z0: f64, z: &[f64]) -> Result<Gradient> {
        let (r, bz, p) = self.parts(z0, z)?;
        let g = self.degree;
        let a = -g * self.constant * r.powf(-g - 2.0) - (g + 1.0) * bz * r.powf(-g - 3.0);
        let b = r.powf(-g - 1.0);
        let mut out = Gradient::default();
        for i in 0..self.linear.len() {
            out[i] = a * p[i] + b * self.linear[i];
        }
        Ok(out)
    }
}
