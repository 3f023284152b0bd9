//! Deterministic quadrature for every integral shape used by the crate:
//! Gaussian-weighted half-space and boundary integrals with the weight
//! `x0^a`, binomial-weighted (`G_n`) integrals on balls, one-sided singular
//! time integrals, and radial concentration integrals.
//!
//! Every estimate carries the difference between two nested resolutions as
//! its error estimate. Sums are accumulated in a fixed order with Neumaier
//! compensation, so results are bit-identical across runs and thread counts.

mod de;
mod integrate;
mod rules;
mod sum;

pub use de::{log_trapezoid, LogNode, TanhSinh, TanhSinhNode};
pub use integrate::{
    concentration_functional, integrate_boundary_binomial, integrate_boundary_gaussian,
    integrate_boundary_gaussian_multi, integrate_halfspace_binomial, integrate_halfspace_gaussian,
    integrate_halfspace_gaussian_multi, integrate_radial_concentration, marchaud_apply,
    radial_concentration_multi, singular_difference_integral, HalfspaceOptions, IntegralEstimate,
};
pub use rules::{build_rule, legendre, QuadratureRule, RuleKind, MAX_NODES};
pub use sum::{CompensatedSum, CompensatedSums};

pub(crate) use integrate::{cached_hermite, check_resolution, eval_nodes};
