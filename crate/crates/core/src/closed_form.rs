//! Reference solutions with known laws: the Polya urn (Beta family), its
//! Kumaraswamy reparameterization, and urns with scaled-Bernoulli
//! reinforcements, as single laws and as whole solution fields.

use alloc::format;

use crate::dist::{pushforward_monotone, QuantileDist};
use crate::error::{Error, Result};
use crate::solver::{from_star, GridSpec, SolutionField};
use crate::special::beta_quantile;

/// Absolute accuracy of Beta quantiles.
pub const BETA_QUANTILE_TOL: f64 = 1e-10;

/// Shape parameters of a Beta law. `a = 0` is the point mass at 0 and `b = 0`
/// the point mass at 1; they cannot both vanish.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    a: f64,
    b: f64,
}

impl BetaParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a >= 0.0 && b >= 0.0) || (a == 0.0 && b == 0.0) {
            return Err(Error::Parameter(format!("invalid Beta parameters ({a}, {b})")));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Quantile at level `p`.
    pub fn quantile(&self, p: f64) -> f64 {
        if self.a == 0.0 {
            0.0
        } else if self.b == 0.0 {
            1.0
        } else {
            beta_quantile(self.a, self.b, p, BETA_QUANTILE_TOL)
        }
    }
}

/// `Beta(a, b)` on the `k`-point midpoint grid.
pub fn beta_quantile_dist(a: f64, b: f64, k: usize) -> Result<QuantileDist> {
    let params = BetaParams::new(a, b)?;
    QuantileDist::from_quantile_fn(1.0, k, |p| params.quantile(p))
}

/// Law of `W^{1/γ}` for `W ~ Beta(x, y)`; at `x = 1` this is the Kumaraswamy
/// law with shapes `(γ, y)`.
pub fn kumaraswamy_dist(gamma: f64, x: f64, y: f64, k: usize) -> Result<QuantileDist> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Parameter(format!("gamma must be positive, got {gamma}")));
    }
    let beta = beta_quantile_dist(x, y, k)?;
    pushforward_monotone(&beta, |t| libm::pow(t, 1.0 / gamma), 1.0)
}

/// The monotone reparameterization linking scaled-Bernoulli urns to Beta laws:
/// `h(t) = t k_ν / (t k_ν + (1 - t) k_μ)` and its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HMap {
    k_mu: f64,
    k_nu: f64,
}

/// Builds the pair `(h, h⁻¹)` for scales `k_μ, k_ν > 0`.
pub fn h_map(k_mu: f64, k_nu: f64) -> Result<HMap> {
    if !(k_mu.is_finite() && k_nu.is_finite() && k_mu > 0.0 && k_nu > 0.0) {
        return Err(Error::Parameter(format!("scales must be positive, got {k_mu}, {k_nu}")));
    }
    Ok(HMap { k_mu, k_nu })
}

impl HMap {
    pub fn h(&self, t: f64) -> f64 {
        let num = t * self.k_nu;
        let den = num + (1.0 - t) * self.k_mu;
        if den == 0.0 {
            0.0
        } else {
            (num / den).clamp(0.0, 1.0)
        }
    }

    pub fn h_inverse(&self, u: f64) -> f64 {
        let num = u * self.k_mu;
        let den = num + (1.0 - u) * self.k_nu;
        if den == 0.0 {
            0.0
        } else {
            (num / den).clamp(0.0, 1.0)
        }
    }
}

/// Law of the limit proportion of the urn with `μ = k_μ·Bernoulli(m/k_μ)`,
/// `ν = k_ν·Bernoulli(m/k_ν)` started at `(x, y)`: `h⁻¹ ∘ Beta(x/k_μ, y/k_ν)`.
pub fn scaled_bernoulli_solution(k_mu: f64, k_nu: f64, x: f64, y: f64, k: usize) -> Result<QuantileDist> {
    let h = h_map(k_mu, k_nu)?;
    let beta = beta_quantile_dist(x / k_mu, y / k_nu, k)?;
    pushforward_monotone(&beta, |u| h.h_inverse(u), 1.0)
}

/// Field whose interior node at `(x, y)` is `law(x, y)` and whose far-field
/// node in direction `y*` is `far(y*)`.
fn closed_form_field(
    grid: GridSpec,
    k: usize,
    far: impl Fn(f64) -> Result<QuantileDist>,
    law: impl Fn(f64, f64) -> Result<QuantileDist>,
) -> Result<SolutionField> {
    SolutionField::from_fn(grid, k, |xs, ys| {
        if xs == 0.0 {
            far(ys)
        } else {
            let (x, y) = from_star(xs, ys)?;
            law(x, y)
        }
    })
}

/// `Beta(x, y)` at every node: the canonical solution for `μ = ν = δ₁`.
pub fn beta_field(grid: GridSpec, k: usize) -> Result<SolutionField> {
    closed_form_field(grid, k, |t| QuantileDist::point_mass(t, 1.0, k), |x, y| beta_quantile_dist(x, y, k))
}

/// `Beta(x/k_μ, y/k_ν)` at every node: the scaled-Bernoulli urn with boundary
/// datum `h ∘ δ`.
pub fn scaled_beta_field(k_mu: f64, k_nu: f64, grid: GridSpec, k: usize) -> Result<SolutionField> {
    let h = h_map(k_mu, k_nu)?;
    closed_form_field(
        grid,
        k,
        |t| QuantileDist::point_mass(h.h(t), 1.0, k),
        |x, y| beta_quantile_dist(x / k_mu, y / k_nu, k),
    )
}

/// [`scaled_bernoulli_solution`] at every node: the scaled-Bernoulli urn with
/// the canonical datum `δ`.
pub fn scaled_bernoulli_field(k_mu: f64, k_nu: f64, grid: GridSpec, k: usize) -> Result<SolutionField> {
    h_map(k_mu, k_nu)?;
    closed_form_field(
        grid,
        k,
        |t| QuantileDist::point_mass(t, 1.0, k),
        |x, y| scaled_bernoulli_solution(k_mu, k_nu, x, y, k),
    )
}
