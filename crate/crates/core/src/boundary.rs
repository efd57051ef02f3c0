//! Boundary data `φ : [0, 1] → P([0, 1])` and the mixing maps built from them.
//!
//! A datum is stored on the uniform grid `t_j = j / (T - 1)`; between nodes
//! its quantile vectors are interpolated linearly, which keeps every value a
//! valid law. The canonical datum is `δ(t) = δ_t`.

use alloc::format;
use alloc::vec::Vec;

use crate::dist::{mixture, pushforward_general, quantile_l1, regrid_atoms, QuantileDist, Regrid};
use crate::error::{Error, Result};
use crate::solver::SolutionField;

/// Number of `t` nodes used when nothing else is specified.
pub const DEFAULT_T: usize = 101;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "repr::BoundaryRepr", into = "repr::BoundaryRepr"))]
pub struct BoundaryDatum {
    values: Vec<QuantileDist>,
}

fn t_node(j: usize, t: usize) -> f64 {
    j as f64 / (t - 1) as f64
}

impl BoundaryDatum {
    /// Values at `t_j = j / (T - 1)`: laws on `[0, 1]` with a common `K`.
    pub fn new(values: Vec<QuantileDist>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::Input(format!("boundary datum needs at least 2 nodes, got {}", values.len())));
        }
        let k = values[0].k();
        for (j, v) in values.iter().enumerate() {
            if v.upper() != 1.0 {
                return Err(Error::Input(format!("boundary value {j} is supported on [0, {}], not [0, 1]", v.upper())));
            }
            if v.k() != k {
                return Err(Error::Dimension(format!("boundary value {j} has K = {}, expected {k}", v.k())));
            }
        }
        Ok(Self { values })
    }

    pub fn from_fn(t_nodes: usize, f: impl Fn(f64) -> Result<QuantileDist>) -> Result<Self> {
        if t_nodes < 2 {
            return Err(Error::Input(format!("boundary datum needs at least 2 nodes, got {t_nodes}")));
        }
        Self::new((0..t_nodes).map(|j| f(t_node(j, t_nodes))).collect::<Result<_>>()?)
    }

    /// `t ↦ δ_{f(t)}` for a continuous `f : [0, 1] → [0, 1]`.
    pub fn from_point_map(t_nodes: usize, k: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(t_nodes, |t| QuantileDist::point_mass(f(t), 1.0, k))
    }

    /// The canonical datum `δ(t) = δ_t`.
    pub fn delta(t_nodes: usize, k: usize) -> Result<Self> {
        Self::from_point_map(t_nodes, k, |t| t)
    }

    /// `φ(t) ≡ xi`.
    pub fn constant(xi: &QuantileDist, t_nodes: usize) -> Result<Self> {
        Self::from_fn(t_nodes, |_| Ok(xi.clone()))
    }

    /// `φ_γ(t) = δ_{t^{1/γ}}`.
    pub fn power(gamma: f64, t_nodes: usize, k: usize) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::Parameter(format!("gamma must be positive, got {gamma}")));
        }
        Self::from_point_map(t_nodes, k, |t| libm::pow(t, 1.0 / gamma))
    }

    /// `h ∘ δ` with `h(t) = t k_ν / (t k_ν + (1 - t) k_μ)`.
    pub fn hdelta(k_mu: f64, k_nu: f64, t_nodes: usize, k: usize) -> Result<Self> {
        let h = crate::closed_form::h_map(k_mu, k_nu)?;
        Self::from_point_map(t_nodes, k, |t| h.h(t))
    }

    /// `h ∘ φ`: every value pushed forward by the continuous map `h` into `[0, 1]`.
    pub fn map(&self, h: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| pushforward_general(v, &h, 1.0)).collect::<Result<_>>()?)
    }

    /// Number of `t` nodes.
    pub fn t_nodes(&self) -> usize {
        self.values.len()
    }

    pub fn k(&self) -> usize {
        self.values[0].k()
    }

    pub fn values(&self) -> &[QuantileDist] {
        &self.values
    }

    /// `φ(t)` for `t ∈ [0, 1]` (clamped).
    pub fn eval(&self, t: f64) -> QuantileDist {
        let mut out = alloc::vec![0.0; self.k()];
        self.eval_into(t, &mut out);
        QuantileDist::repaired(1.0, out)
    }

    /// Quantile vector of `φ(t)` written into `out` (length `K`).
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let (j, f) = self.locate(t);
        let a = self.values[j].quantiles();
        if f == 0.0 {
            out.copy_from_slice(a);
            return;
        }
        let b = self.values[j + 1].quantiles();
        for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
            *o = (1.0 - f) * x + f * y;
        }
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let last = self.values.len() - 1;
        let s = t.clamp(0.0, 1.0) * last as f64;
        let j = (libm::floor(s) as usize).min(last - 1);
        let f = (s - j as f64).clamp(0.0, 1.0);
        if f == 1.0 {
            (j + 1, 0.0)
        } else {
            (j, f)
        }
    }

    /// Location of `φ(t)` when every value is a point mass.
    fn point_location(&self, t: f64) -> f64 {
        let (j, f) = self.locate(t);
        let a = self.values[j].quantiles()[0];
        if f == 0.0 {
            a
        } else {
            (1.0 - f) * a + f * self.values[j + 1].quantiles()[0]
        }
    }

    fn is_point_valued(&self) -> bool {
        self.values.iter().all(QuantileDist::is_point_mass)
    }

    fn is_constant(&self) -> bool {
        self.values.iter().all(|v| v == &self.values[0])
    }
}

/// `d_∞(φ₁, φ₂) = max_j d_W(φ₁(t_j), φ₂(t_j))`.
pub fn sup_distance(phi1: &BoundaryDatum, phi2: &BoundaryDatum) -> Result<f64> {
    if phi1.t_nodes() != phi2.t_nodes() || phi1.k() != phi2.k() {
        return Err(Error::Dimension(format!(
            "boundary grids (T = {}, K = {}) and (T = {}, K = {})",
            phi1.t_nodes(),
            phi1.k(),
            phi2.t_nodes(),
            phi2.k()
        )));
    }
    Ok(phi1
        .values
        .iter()
        .zip(&phi2.values)
        .map(|(a, b)| quantile_l1(a.quantiles(), b.quantiles()))
        .fold(0.0, f64::max))
}

/// `Γ_φ(ξ) = ∫ φ(t) ξ(dt)`: the mixture over the atoms of `ξ` of `φ` at each
/// atom, on `φ`'s resolution.
pub fn gamma_map(phi: &BoundaryDatum, xi: &QuantileDist) -> Result<QuantileDist> {
    if xi.upper() != 1.0 {
        return Err(Error::Input(format!("Γ needs a law on [0, 1], got support bound {}", xi.upper())));
    }
    let k = phi.k();
    if phi.is_constant() {
        return Ok(phi.values[0].clone());
    }
    if phi.is_point_valued() {
        // a mixture of point masses is the image law of ξ
        let image = pushforward_general(xi, |t| phi.point_location(t), 1.0)?;
        if image.k() == k {
            return Ok(image);
        }
        let w = 1.0 / image.k() as f64;
        let mut atoms: Vec<(f64, f64)> = image.quantiles().iter().map(|&v| (v, w)).collect();
        return Ok(regrid_atoms(&mut atoms, 1.0, k, Regrid::Midpoint));
    }
    let w = 1.0 / (xi.k() * k) as f64;
    let mut atoms = Vec::with_capacity(xi.k() * k);
    let mut buf = alloc::vec![0.0; k];
    for &t in xi.quantiles() {
        phi.eval_into(t, &mut buf);
        atoms.extend(buf.iter().map(|&v| (v, w)));
    }
    Ok(regrid_atoms(&mut atoms, 1.0, k, Regrid::Midpoint))
}

/// `Ψ_φ`: [`gamma_map`] at every node of a field whose values are laws on
/// `[0, 1]`. Boundary rows and the far-field column are reset to `φ(0)`,
/// `φ(1)` and `φ(y*)`.
pub fn psi_map(phi: &BoundaryDatum, field: &SolutionField) -> Result<SolutionField> {
    if phi.k() != field.k() {
        return Err(Error::Dimension(format!("boundary K = {} but field K = {}", phi.k(), field.k())));
    }
    let mapped = crate::rng::map_indices(field.node_count(), |idx| {
        let node = QuantileDist::repaired(1.0, field.node_by_index(idx).to_vec());
        gamma_map(phi, &node).map(QuantileDist::into_quantiles)
    });
    let mut out = field.clone();
    for (idx, q) in mapped.into_iter().enumerate() {
        out.node_by_index_mut(idx).copy_from_slice(&q?);
    }
    out.pin_boundary(phi)?;
    Ok(out)
}

/// `Φ = ∫₀¹ φ(t) dt` by the trapezoid rule on the `t` grid.
pub fn aggregate_phi(phi: &BoundaryDatum) -> Result<QuantileDist> {
    let t = phi.t_nodes();
    let h = 1.0 / (t - 1) as f64;
    let comps: Vec<(f64, &QuantileDist)> = phi
        .values
        .iter()
        .enumerate()
        .map(|(j, v)| (if j == 0 || j == t - 1 { 0.5 * h } else { h }, v))
        .collect();
    mixture(&comps)
}

/// Whether `φ(t_j) ≤_st φ(t_{j+1})` for all adjacent nodes, i.e. every
/// quantile is nondecreasing in `t` (up to `1e-12`).
pub fn is_monotonic(phi: &BoundaryDatum) -> bool {
    phi.values.windows(2).all(|w| {
        w[0].quantiles()
            .iter()
            .zip(w[1].quantiles())
            .all(|(a, b)| *a <= b + 1e-12)
    })
}

#[cfg(feature = "serde")]
mod repr {
    use alloc::vec::Vec;

    use serde::{Deserialize, Serialize};

    use super::BoundaryDatum;
    use crate::dist::QuantileDist;
    use crate::error::Error;

    /// Wire form: `{"T": T, "values": [law, ...]}`.
    #[derive(Serialize, Deserialize)]
    pub(super) struct BoundaryRepr {
        #[serde(rename = "T")]
        t: usize,
        values: Vec<QuantileDist>,
    }

    impl TryFrom<BoundaryRepr> for BoundaryDatum {
        type Error = Error;

        fn try_from(r: BoundaryRepr) -> Result<Self, Error> {
            if r.t != r.values.len() {
                return Err(Error::Input(alloc::format!("T = {} but {} values given", r.t, r.values.len())));
            }
            BoundaryDatum::new(r.values)
        }
    }

    impl From<BoundaryDatum> for BoundaryRepr {
        fn from(b: BoundaryDatum) -> Self {
            Self { t: b.values.len(), values: b.values }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{level, wasserstein};

    const K: usize = 64;

    fn delta() -> BoundaryDatum {
        BoundaryDatum::delta(DEFAULT_T, K).unwrap()
    }

    fn reversed() -> BoundaryDatum {
        BoundaryDatum::from_point_map(DEFAULT_T, K, |t| 1.0 - t).unwrap()
    }

    fn uniform() -> QuantileDist {
        QuantileDist::uniform(0.0, 1.0, 1.0, K).unwrap()
    }

    #[test]
    fn delta_datum_examples() {
        let d = delta();
        assert_eq!(d.eval(0.0), QuantileDist::point_mass(0.0, 1.0, K).unwrap());
        let mid = d.eval(0.505);
        assert!(mid.is_point_mass());
        assert!((mid.quantiles()[0] - 0.505).abs() < 1e-12);
        assert_eq!(sup_distance(&d, &d).unwrap(), 0.0);
        assert!(BoundaryDatum::delta(1, K).is_err());
    }

    #[test]
    fn sup_distance_examples() {
        let zero = BoundaryDatum::constant(&QuantileDist::point_mass(0.0, 1.0, K).unwrap(), DEFAULT_T).unwrap();
        assert_eq!(sup_distance(&delta(), &zero).unwrap(), 1.0);
        assert_eq!(sup_distance(&delta(), &reversed()).unwrap(), 1.0);
        let coarse = BoundaryDatum::delta(11, K).unwrap();
        assert!(matches!(sup_distance(&delta(), &coarse), Err(Error::Dimension(_))));
    }

    #[test]
    fn gamma_map_examples() {
        let xi = crate::closed_form::beta_quantile_dist(2.0, 3.0, K).unwrap();
        let g = gamma_map(&delta(), &xi).unwrap();
        assert!(wasserstein(&g, &xi).unwrap() < 2.0 / K as f64);

        let phi = BoundaryDatum::from_fn(DEFAULT_T, |t| QuantileDist::uniform(0.0, t, 1.0, K)).unwrap();
        let at = gamma_map(&phi, &QuantileDist::point_mass(0.3, 1.0, K).unwrap()).unwrap();
        assert!(wasserstein(&at, &phi.eval(0.3)).unwrap() < 1e-12);

        let flat = BoundaryDatum::constant(&uniform(), DEFAULT_T).unwrap();
        assert_eq!(gamma_map(&flat, &xi).unwrap(), uniform());
    }

    #[test]
    fn gamma_map_general_path_matches_cdf_oracle() {
        // φ(t) = Uniform[0, t] mixed over ξ = Uniform[0, 1]: F(z) = z (1 - ln z)
        let phi = BoundaryDatum::from_fn(DEFAULT_T, |t| QuantileDist::uniform(0.0, t, 1.0, K)).unwrap();
        let g = gamma_map(&phi, &uniform()).unwrap();
        let oracle = crate::dist::from_cdf(|z| if z <= 0.0 { 0.0 } else { z * (1.0 - libm::log(z)) }, 1.0, K).unwrap();
        assert!(wasserstein(&g, &oracle).unwrap() < 2.0 / K as f64);
    }

    #[test]
    fn gamma_map_is_linear() {
        let phi = BoundaryDatum::from_fn(DEFAULT_T, |t| QuantileDist::uniform(0.0, t, 1.0, K)).unwrap();
        let a = crate::closed_form::beta_quantile_dist(2.0, 5.0, K).unwrap();
        let b = crate::closed_form::beta_quantile_dist(4.0, 1.0, K).unwrap();
        let mix = mixture(&[(0.3, &a), (0.7, &b)]).unwrap();
        let lhs = gamma_map(&phi, &mix).unwrap();
        let (ga, gb) = (gamma_map(&phi, &a).unwrap(), gamma_map(&phi, &b).unwrap());
        let rhs = mixture(&[(0.3, &ga), (0.7, &gb)]).unwrap();
        assert!(wasserstein(&lhs, &rhs).unwrap() < 2.0 / K as f64);
    }

    #[test]
    fn composition_commutes_with_gamma() {
        let phi = BoundaryDatum::from_fn(DEFAULT_T, |t| QuantileDist::uniform(0.5 * t, t, 1.0, K)).unwrap();
        // atoms on the t grid, where interpolation is not involved
        let xi = QuantileDist::from_quantile_fn(1.0, K, |u| libm::floor(u * u * 100.0) / 100.0).unwrap();
        let h = |t: f64| t * t;
        let lhs = gamma_map(&phi.map(h).unwrap(), &xi).unwrap();
        let rhs = crate::dist::pushforward_monotone(&gamma_map(&phi, &xi).unwrap(), h, 1.0).unwrap();
        assert!(wasserstein(&lhs, &rhs).unwrap() < 1e-9);
    }

    #[test]
    fn aggregate_examples() {
        let xi = crate::closed_form::beta_quantile_dist(2.0, 2.0, K).unwrap();
        assert_eq!(aggregate_phi(&BoundaryDatum::constant(&xi, DEFAULT_T).unwrap()).unwrap(), xi);
        let agg = aggregate_phi(&delta()).unwrap();
        assert!(wasserstein(&agg, &uniform()).unwrap() <= 1.0 / DEFAULT_T as f64 + 1.0 / K as f64);
        let half = BoundaryDatum::constant(&QuantileDist::point_mass(0.5, 1.0, K).unwrap(), DEFAULT_T).unwrap();
        let agg = aggregate_phi(&half).unwrap();
        assert_eq!(crate::dist::largest_atom(&agg, 1e-9).mass_estimate, 1.0);
    }

    #[test]
    fn monotonicity_examples() {
        assert!(is_monotonic(&delta()));
        assert!(!is_monotonic(&reversed()));
        // means increase with t but the CDFs of the two ends cross
        let crossing = BoundaryDatum::from_fn(3, |t| {
            if t == 0.0 {
                QuantileDist::uniform(0.2, 0.4, 1.0, K)
            } else if t == 1.0 {
                QuantileDist::uniform(0.0, 1.0, 1.0, K)
            } else {
                QuantileDist::uniform(0.1, 0.7, 1.0, K)
            }
        })
        .unwrap();
        let means: Vec<f64> = crossing.values().iter().map(QuantileDist::mean).collect();
        assert!(means[0] < means[1] && means[1] < means[2]);
        assert!(!is_monotonic(&crossing));
    }

    #[test]
    fn interpolation_stays_monotone() {
        let phi = BoundaryDatum::from_fn(5, |t| {
            QuantileDist::from_quantile_fn(1.0, K, |u| libm::pow(u, 1.0 + 3.0 * t))
        })
        .unwrap();
        for i in 0..=40 {
            let v = phi.eval(i as f64 / 40.0);
            assert!(v.quantiles().windows(2).all(|w| w[0] <= w[1]));
        }
        let q = phi.eval(0.0);
        for (i, v) in q.quantiles().iter().enumerate() {
            assert!((v - level(i, K)).abs() < 1e-15);
        }
    }
}
