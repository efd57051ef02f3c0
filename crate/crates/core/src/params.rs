//! Reinforcement laws: pairs `(μ, ν)` on `[0, β]` with a common mean
//! `m >= m0 > 0`, and the Manhattan metric `d_W(μ₁, μ₂) + d_W(ν₁, ν₂)` on them.

use alloc::format;
use alloc::vec::Vec;

use crate::dist::{mixture_with, wasserstein, QuantileDist, Regrid};
use crate::error::{Error, Result};

/// Means of a valid pair may differ by this much, relative to `β`.
pub const MEAN_TOL: f64 = 1e-9;

/// A validated reinforcement pair. Both laws are stored on `[0, β]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ReinforcementPair {
    mu: QuantileDist,
    nu: QuantileDist,
    beta: f64,
    mean: f64,
    m0: f64,
}

impl ReinforcementPair {
    /// Checks support, equal means and the lower mean bound.
    pub fn validate(mu: QuantileDist, nu: QuantileDist, beta: f64, m0: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::Parameter(format!("beta must be positive, got {beta}")));
        }
        if mu.k() != nu.k() {
            return Err(Error::Dimension(format!("mu has K = {}, nu has K = {}", mu.k(), nu.k())));
        }
        let mu = mu
            .with_upper(beta)
            .map_err(|_| Error::Parameter(format!("mu is not supported in [0, {beta}]")))?;
        let nu = nu
            .with_upper(beta)
            .map_err(|_| Error::Parameter(format!("nu is not supported in [0, {beta}]")))?;
        let (m_mu, m_nu) = (mu.mean(), nu.mean());
        if (m_mu - m_nu).abs() > MEAN_TOL * beta {
            return Err(Error::Parameter(format!("means differ: mean(mu) = {m_mu}, mean(nu) = {m_nu}")));
        }
        if !(m0.is_finite() && m0 > 0.0) {
            return Err(Error::Parameter(format!("m0 must be positive, got {m0}")));
        }
        if m_mu < m0 {
            return Err(Error::Parameter(format!("common mean {m_mu} is below m0 = {m0}")));
        }
        Ok(Self { mu, nu, beta, mean: m_mu, m0 })
    }

    /// [`validate`](Self::validate) with `m0` set to half the measured mean.
    pub fn with_default_m0(mu: QuantileDist, nu: QuantileDist, beta: f64) -> Result<Self> {
        let m0 = 0.5 * mu.mean();
        Self::validate(mu, nu, beta, m0)
    }

    pub fn mu(&self) -> &QuantileDist {
        &self.mu
    }

    pub fn nu(&self) -> &QuantileDist {
        &self.nu
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Common mean `m`.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn k(&self) -> usize {
        self.mu.k()
    }

    /// Distinct reinforcement values of `μ` with their masses.
    pub fn mu_atoms(&self) -> Vec<(f64, f64)> {
        distinct_atoms(&self.mu)
    }

    /// Distinct reinforcement values of `ν` with their masses.
    pub fn nu_atoms(&self) -> Vec<(f64, f64)> {
        distinct_atoms(&self.nu)
    }
}

/// Groups equal quantiles into `(value, mass)` atoms, in increasing order.
pub fn distinct_atoms(d: &QuantileDist) -> Vec<(f64, f64)> {
    let w = 1.0 / d.k() as f64;
    let mut out: Vec<(f64, f64)> = Vec::new();
    for &v in d.quantiles() {
        match out.last_mut() {
            Some((last, mass)) if *last == v => *mass += w,
            _ => out.push((v, w)),
        }
    }
    out
}

/// `d_M((μ₁, ν₁), (μ₂, ν₂)) = d_W(μ₁, μ₂) + d_W(ν₁, ν₂)`.
pub fn manhattan(a: &ReinforcementPair, b: &ReinforcementPair) -> Result<f64> {
    if a.beta != b.beta {
        return Err(Error::Dimension(format!("beta {} vs {}", a.beta, b.beta)));
    }
    Ok(wasserstein(&a.mu, &b.mu)? + wasserstein(&a.nu, &b.nu)?)
}

/// Replaces `(μ, ν)` by `(pμ + (1-p)δ₀, pν + (1-p)δ₀)`, which leaves the
/// solution of the functional equation unchanged. `frac` must lie in
/// `[m0/m, 1]` so the diluted mean stays above `m0`.
///
/// The mixture is re-gridded by cell averages, so the mean scales by exactly
/// `frac` for every admissible `frac`, not only multiples of `1/K`.
pub fn dilute(pair: &ReinforcementPair, frac: f64) -> Result<ReinforcementPair> {
    let lo = pair.m0 / pair.mean;
    if !(frac.is_finite() && frac >= lo * (1.0 - 1e-12) && frac <= 1.0) {
        return Err(Error::Parameter(format!("dilution fraction {frac} outside [{lo}, 1]")));
    }
    if frac == 1.0 {
        return Ok(pair.clone());
    }
    let k = pair.k();
    let zero = QuantileDist::point_mass(0.0, pair.beta, k)?;
    let mu = mixture_with(&[(frac, &pair.mu), (1.0 - frac, &zero)], k, Regrid::CellAverage)?;
    let nu = mixture_with(&[(frac, &pair.nu), (1.0 - frac, &zero)], k, Regrid::CellAverage)?;
    // frac * m may fall a rounding error short of m0 at the lower end
    let m0 = pair.m0.min(mu.mean());
    ReinforcementPair::validate(mu, nu, pair.beta, m0)
}

/// `μ = k_μ · Bernoulli(m / k_μ)`, `ν = k_ν · Bernoulli(m / k_ν)` on
/// `[0, max(k_μ, k_ν)]`, with `m0 = m / 2`.
///
/// Both success probabilities must be at most one, i.e. `m <= min(k_μ, k_ν)`.
/// `m / k` should be a multiple of `1/K` or the grid means will not agree.
pub fn scaled_bernoulli_pair(k_mu: f64, k_nu: f64, m: f64, k: usize) -> Result<ReinforcementPair> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::Parameter(format!("mean must be positive, got {m}")));
    }
    if !(k_mu > 0.0 && k_nu > 0.0 && k_mu.is_finite() && k_nu.is_finite()) {
        return Err(Error::Parameter(format!("scales must be positive, got {k_mu}, {k_nu}")));
    }
    if m > k_mu || m > k_nu {
        return Err(Error::Parameter(format!(
            "success probability above 1: m = {m} exceeds min(k_mu, k_nu) = {}",
            k_mu.min(k_nu)
        )));
    }
    let beta = k_mu.max(k_nu);
    let mu = QuantileDist::bernoulli(m / k_mu, k_mu, beta, k)?;
    let nu = QuantileDist::bernoulli(m / k_nu, k_nu, beta, k)?;
    ReinforcementPair::validate(mu, nu, beta, 0.5 * m)
}
