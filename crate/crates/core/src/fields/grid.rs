use crate::error::{check_dim, Error, Result};

use super::{check_x0, ExtensionField};

/// Spatially uniform extension field sampled on a tensor grid in
/// `(x0, t)` and interpolated by cubic Lagrange polynomials in each axis
/// (four nearest nodes, shifted inward at the grid edges).
#[derive(Debug, Clone)]
pub struct GridField {
    dim: usize,
    x0: Vec<f64>,
    t: Vec<f64>,
    /// Row-major, `values[i * t.len() + j] = U(x0[i], t[j])`.
    values: Vec<f64>,
}

fn check_axis(name: &str, v: &[f64]) -> Result<()> {
    if v.len() < 4 {
        return Err(Error::config(name, "grid axis needs at least 4 nodes"));
    }
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config(name, "grid axis must be strictly increasing"));
    }
    Ok(())
}

/// Lagrange weights at `x` for the four nodes around it.
fn stencil(axis: &[f64], x: f64) -> Result<(usize, [f64; 4])> {
    let n = axis.len();
    if !(x >= axis[0] && x <= axis[n - 1]) {
        return Err(Error::domain(format!(
            "{x} outside the sampled range [{}, {}]",
            axis[0],
            axis[n - 1]
        )));
    }
    let k = axis.partition_point(|a| *a <= x).saturating_sub(1);
    let start = k.saturating_sub(1).min(n - 4);
    let nodes = &axis[start..start + 4];
    let w = std::array::from_fn(|i| {
        let mut l = 1.0;
        for (j, xj) in nodes.iter().enumerate() {
            if j != i {
                l *= (x - xj) / (nodes[i] - xj);
            }
        }
        l
    });
    Ok((start, w))
}

impl GridField {
    /// Sample `field` at `x = 0` on the grid.
    pub fn sample<F: ExtensionField + ?Sized>(field: &F, x0: Vec<f64>, t: Vec<f64>) -> Result<Self> {
        check_axis("x0", &x0)?;
        check_axis("t", &t)?;
        let dim = field.dim();
        let zero = vec![0.0; dim];
        let mut values = Vec::with_capacity(x0.len() * t.len());
        for a in &x0 {
            for b in &t {
                values.push(field.value(*a, &zero, *b)?);
            }
        }
        Ok(Self { dim, x0, t, values })
    }
}

impl ExtensionField for GridField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x0: f64, x: &[f64], t: f64) -> Result<f64> {
        check_x0(x0)?;
        check_dim(self.dim, x.len())?;
        let (i0, wx) = stencil(&self.x0, x0)?;
        let (j0, wt) = stencil(&self.t, t)?;
        let nt = self.t.len();
        let mut acc = 0.0;
        for (i, a) in wx.iter().enumerate() {
            for (j, b) in wt.iter().enumerate() {
                acc += a * b * self.values[(i0 + i) * nt + j0 + j];
            }
        }
        Ok(acc)
    }

    fn uniform_in_x(&self) -> bool {
        true
    }

    fn time_domain(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }
}
