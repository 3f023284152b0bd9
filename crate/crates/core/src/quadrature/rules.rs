//! Gaussian quadrature rules from the Golub-Welsch eigenproblem, polished by
//! Newton iteration on the orthonormal recurrence; weights use the
//! Christoffel formula `w = 1 / sum_k q_k(x)^2`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma, ln_gamma};

/// Largest supported number of nodes per rule.
pub const MAX_NODES: usize = 512;

/// Family of a Gaussian rule; each lives on a canonical interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleKind {
    /// Weight `e^(-x^2)` on the real line.
    Hermite,
    /// Weight `x^alpha e^(-x)` on `(0, inf)`, `alpha > -1`.
    GeneralizedLaguerre { alpha: f64 },
    /// Weight `x^mu` on `(0, 1)`, `mu > -1`.
    JacobiSingular { mu: f64 },
    /// Unit weight on `(0, 1)` split into `panels` equal panels of `n` nodes.
    LegendreComposite { panels: usize },
}

/// Nodes and weights of a rule: `sum w_i f(x_i)` approximates the weighted
/// integral of `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum w_i f(x_i)`.
    pub fn apply(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = super::CompensatedSum::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(*x));
        }
        acc.value()
    }
}

/// Three-term recurrence of the orthonormal polynomials:
/// `x q_k = b_(k+1) q_(k+1) + a_k q_k + b_k q_(k-1)`, with `q_0 = 1/sqrt(mu0)`.
struct Recurrence {
    a: Vec<f64>,
    /// `b[k]` for `k = 0..=n`; `b[0]` is unused.
    b: Vec<f64>,
    mu0: f64,
}

impl Recurrence {
    fn hermite(n: usize) -> Self {
        let a = vec![0.0; n];
        let b = (0..=n).map(|k| (0.5 * k as f64).sqrt()).collect();
        Self {
            a,
            b,
            mu0: std::f64::consts::PI.sqrt(),
        }
    }

    fn laguerre(n: usize, alpha: f64) -> Result<Self> {
        let a = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let b = (0..=n)
            .map(|k| (k as f64 * (k as f64 + alpha)).max(0.0).sqrt())
            .collect();
        Ok(Self {
            a,
            b,
            mu0: gamma(alpha + 1.0)?,
        })
    }

    /// Jacobi weight `(1-y)^al (1+y)^be` on `(-1, 1)`.
    fn jacobi(n: usize, al: f64, be: f64) -> Result<Self> {
        let ab = al + be;
        let a = (0..n)
            .map(|k| {
                let k = k as f64;
                if k == 0.0 {
                    (be - al) / (ab + 2.0)
                } else {
                    (be * be - al * al) / ((2.0 * k + ab) * (2.0 * k + ab + 2.0))
                }
            })
            .collect();
        let b = (0..=n)
            .map(|k| {
                if k == 0 {
                    return 0.0;
                }
                let k = k as f64;
                let c = 2.0 * k + ab;
                let num = 4.0 * k * (k + al) * (k + be) * (k + ab);
                let den = c * c * (c + 1.0) * (c - 1.0);
                (num / den).sqrt()
            })
            .collect();
        let lmu = (ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(al + 1.0)? + ln_gamma(be + 1.0)?
            - ln_gamma(ab + 2.0)?;
        Ok(Self {
            a,
            b,
            mu0: lmu.exp(),
        })
    }

    /// `(q_n(x), q_n'(x), sum_(k<n) q_k(x)^2)`.
    fn eval(&self, n: usize, x: f64) -> (f64, f64, f64) {
        let mut q_prev = 0.0;
        let mut q = 1.0 / self.mu0.sqrt();
        let mut dq_prev = 0.0;
        let mut dq = 0.0;
        let mut sumsq = 0.0;
        for k in 0..n {
            sumsq += q * q;
            let bk1 = self.b[k + 1];
            let q_next = ((x - self.a[k]) * q - self.b[k] * q_prev) / bk1;
            let dq_next = ((x - self.a[k]) * dq + q - self.b[k] * dq_prev) / bk1;
            q_prev = q;
            q = q_next;
            dq_prev = dq;
            dq = dq_next;
        }
        (q, dq, sumsq)
    }

    fn rule(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let mut jm = DMatrix::<f64>::zeros(n, n);
        for k in 0..n {
            jm[(k, k)] = self.a[k];
            if k + 1 < n {
                jm[(k, k + 1)] = self.b[k + 1];
                jm[(k + 1, k)] = self.b[k + 1];
            }
        }
        let eig = SymmetricEigen::new(jm);
        let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        nodes.sort_by(|x, y| x.partial_cmp(y).expect("finite eigenvalues"));
        let mut weights = Vec::with_capacity(n);
        for x in nodes.iter_mut() {
            for _ in 0..3 {
                let (q, dq, _) = self.eval(n, *x);
                let step = q / dq;
                if !step.is_finite() {
                    break;
                }
                *x -= step;
                if step.abs() <= 1e-16 * x.abs().max(1e-300) {
                    break;
                }
            }
            let (_, _, sumsq) = self.eval(n, *x);
            // Far-out nodes of large rules carry weights below the smallest
            // double; the recurrence then overflows and the weight is zero.
            let w = if sumsq.is_finite() { 1.0 / sumsq } else { 0.0 };
            weights.push(w);
        }
        Ok((nodes, weights))
    }
}

fn check_size(n: usize) -> Result<()> {
    if n < 2 || n > MAX_NODES {
        Err(Error::config(
            "rule size",
            format!("{n} nodes requested; supported range is 2..={MAX_NODES}"),
        ))
    } else {
        Ok(())
    }
}

/// Build an `n`-point rule of the given family.
pub fn build_rule(kind: RuleKind, n: usize) -> Result<QuadratureRule> {
    check_size(n)?;
    let (nodes, weights) = match kind {
        RuleKind::Hermite => Recurrence::hermite(n).rule(n)?,
        RuleKind::GeneralizedLaguerre { alpha } => {
            if !(alpha > -1.0) {
                return Err(Error::domain(format!("Laguerre alpha = {alpha} must be > -1")));
            }
            Recurrence::laguerre(n, alpha)?.rule(n)?
        }
        RuleKind::JacobiSingular { mu } => {
            if !(mu > -1.0) {
                return Err(Error::domain(format!("Jacobi exponent mu = {mu} must be > -1")));
            }
            // x = (1 + y)/2 maps the weight (1 + y)^mu on (-1, 1) to x^mu on (0, 1).
            let (y, w) = Recurrence::jacobi(n, 0.0, mu)?.rule(n)?;
            let scale = 2f64.powf(-1.0 - mu);
            (
                y.iter().map(|y| 0.5 * (1.0 + y)).collect(),
                w.iter().map(|w| w * scale).collect(),
            )
        }
        RuleKind::LegendreComposite { panels } => {
            if panels == 0 {
                return Err(Error::config("panels", "must be at least 1"));
            }
            let (y, w) = legendre(n)?;
            let h = 1.0 / panels as f64;
            let mut nodes = Vec::with_capacity(n * panels);
            let mut weights = Vec::with_capacity(n * panels);
            for p in 0..panels {
                let lo = p as f64 * h;
                for (yi, wi) in y.iter().zip(&w) {
                    nodes.push(lo + 0.5 * h * (1.0 + yi));
                    weights.push(0.5 * h * wi);
                }
            }
            (nodes, weights)
        }
    };
    Ok(QuadratureRule {
        kind,
        nodes,
        weights,
    })
}

/// Gauss-Legendre nodes and weights on `(-1, 1)`.
pub fn legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_size(n)?;
    Recurrence::jacobi(n, 0.0, 0.0)?.rule(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = legendre(7).unwrap();
        let m: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((m - 2.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn jacobi_singular_moments() {
        let r = build_rule(RuleKind::JacobiSingular { mu: -0.6 }, 10).unwrap();
        let m = r.apply(|x| x * x * x);
        assert!((m - 1.0 / 3.4).abs() < 1e-14);
    }

    #[test]
    fn rejects_sizes() {
        assert!(build_rule(RuleKind::Hermite, 0).is_err());
        assert!(build_rule(RuleKind::Hermite, MAX_NODES + 1).is_err());
        assert!(build_rule(RuleKind::GeneralizedLaguerre { alpha: -1.0 }, 4).is_err());
    }
}
