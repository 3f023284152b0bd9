use crate::error::{check_dim, Result};

use super::{check_x0, BoundaryField, ExtensionField, Jet};

/// The constant field `u = U = value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantField {
    pub dim: usize,
    pub value: f64,
}

impl ConstantField {
    pub fn new(dim: usize, value: f64) -> Self {
        Self { dim, value }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(dim, 0.0)
    }
}

impl BoundaryField for ConstantField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64], _t: f64) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value)
    }
    fn uniform_in_x(&self) -> bool {
        true
    }
    fn heat_average(&self, x: &[f64], _tau: f64, _sigma: f64, _res: usize) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.value)
    }
}

impl ExtensionField for ConstantField {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x0: f64, x: &[f64], _t: f64) -> Result<f64> {
        check_x0(x0)?;
        check_dim(self.dim, x.len())?;
        Ok(self.value)
    }
    fn jet(&self, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
        Ok(Jet {
            value: ExtensionField::value(self, x0, x, t)?,
            ..Jet::default()
        })
    }
    fn has_analytic_jet(&self) -> bool {
        true
    }
    fn uniform_in_x(&self) -> bool {
        true
    }
}

/// `U(x0, x, t) = offset + slope t`, constant in space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineInTime {
    pub dim: usize,
    pub offset: f64,
    pub slope: f64,
}

impl ExtensionField for AffineInTime {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x0: f64, x: &[f64], t: f64) -> Result<f64> {
        check_x0(x0)?;
        check_dim(self.dim, x.len())?;
        Ok(self.offset + self.slope * t)
    }
    fn jet(&self, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
        Ok(Jet {
            value: self.value(x0, x, t)?,
            dt: self.slope,
            ..Jet::default()
        })
    }
    fn has_analytic_jet(&self) -> bool {
        true
    }
    fn uniform_in_x(&self) -> bool {
        true
    }
}

/// The field `-F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Negated<F>(pub F);

impl<F: BoundaryField> BoundaryField for Negated<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(-self.0.value(x, t)?)
    }
    fn time_domain(&self) -> (f64, f64) {
        self.0.time_domain()
    }
    fn uniform_in_x(&self) -> bool {
        self.0.uniform_in_x()
    }
    fn heat_average(&self, x: &[f64], tau: f64, sigma: f64, res: usize) -> Result<f64> {
        Ok(-self.0.heat_average(x, tau, sigma, res)?)
    }
}

impl<F: ExtensionField> ExtensionField for Negated<F> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn value(&self, x0: f64, x: &[f64], t: f64) -> Result<f64> {
        Ok(-self.0.value(x0, x, t)?)
    }
    fn jet(&self, x0: f64, x: &[f64], t: f64) -> Result<Jet> {
        Ok(self.0.jet(x0, x, t)?.scaled(-1.0))
    }
    fn has_analytic_jet(&self) -> bool {
        self.0.has_analytic_jet()
    }
    fn uniform_in_x(&self) -> bool {
        self.0.uniform_in_x()
    }
    fn time_domain(&self) -> (f64, f64) {
        self.0.time_domain()
    }
}
