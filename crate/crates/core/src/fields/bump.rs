use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

use super::BoundaryField;

/// Time factor `g(t)` of a [`GaussianBump`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeProfile {
    /// `g = 1`.
    Constant,
    /// `g = e^(-rate t)`.
    Exponential { rate: f64 },
}

impl TimeProfile {
    fn at(&self, t: f64) -> f64 {
        match self {
            TimeProfile::Constant => 1.0,
            TimeProfile::Exponential { rate } => (-rate * t).exp(),
        }
    }
}

/// `u(x, t) = amplitude e^(-|x - center|^2 / width^2) g(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBump {
    pub amplitude: f64,
    pub center: Vec<f64>,
    pub width: f64,
    pub profile: TimeProfile,
}

impl GaussianBump {
    /// Time-independent bump.
    pub fn new(amplitude: f64, center: Vec<f64>, width: f64) -> Result<Self> {
        Self::with_profile(amplitude, center, width, TimeProfile::Constant)
    }

    pub fn with_profile(amplitude: f64, center: Vec<f64>, width: f64, profile: TimeProfile) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::domain(format!("bump width {width} must be > 0")));
        }
        if center.is_empty() || center.len() > crate::MAX_DIM {
            return Err(Error::domain(format!("bump dimension {} unsupported", center.len())));
        }
        Ok(Self {
            amplitude,
            center,
            width,
            profile,
        })
    }

    fn dist2(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum()
    }
}

impl BoundaryField for GaussianBump {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        check_dim(self.center.len(), x.len())?;
        Ok(self.amplitude * (-self.dist2(x) / (self.width * self.width)).exp() * self.profile.at(t))
    }

    /// Closed form: the Gaussian stays Gaussian with squared width
    /// `width^2 + 4 sigma`.
    fn heat_average(&self, x: &[f64], tau: f64, sigma: f64, _res: usize) -> Result<f64> {
        check_dim(self.center.len(), x.len())?;
        if sigma < 0.0 {
            return Err(Error::domain(format!("sigma = {sigma} must be >= 0")));
        }
        let w2 = self.width * self.width;
        let v2 = w2 + 4.0 * sigma;
        let d = self.center.len() as f64;
        Ok(self.amplitude * (w2 / v2).powf(0.5 * d) * (-self.dist2(x) / v2).exp() * self.profile.at(tau))
    }
}
