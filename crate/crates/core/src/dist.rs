//! Probability laws on a compact interval `[0, c]`, stored as midpoint quantile
//! grids.
//!
//! A [`QuantileDist`] with `K` entries is the uniform mixture of the point
//! masses `q[0] <= ... <= q[K-1]`; entry `i` is the quantile at level
//! `(i + 1/2) / K`. In one dimension the quantile coupling is optimal, so the
//! 1-Wasserstein distance between two such laws is the mean absolute
//! difference of their quantile vectors. Convex combinations of quantile
//! vectors stay monotone, which is what lets the solver interpolate laws
//! componentwise.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Grid resolution used when nothing else is specified.
pub const DEFAULT_K: usize = 256;

/// Slack, relative to the support bound, allowed when validating external
/// quantile vectors.
const SLACK: f64 = 1e-12;

/// Tolerance on mixture weights summing to one.
const WEIGHT_TOL: f64 = 1e-12;

/// How a pooled weighted atom set is projected back onto `K` equal-mass atoms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Regrid {
    /// `q[i]` is the pooled quantile at level `(i + 1/2) / K`. Atoms are kept
    /// exactly; this is the W1-closest `K`-atom law.
    #[default]
    Midpoint,
    /// `q[i]` is the average of the pooled quantile function over
    /// `[i/K, (i+1)/K]`. Preserves the mean exactly and never increases the
    /// Wasserstein distance between two pooled laws (a conditional
    /// expectation is an L1 contraction). Atoms survive except in the two
    /// cells straddling their edges.
    CellAverage,
}

/// A probability law on `[0, upper]` given by `K >= 2` midpoint quantiles.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "repr::QuantileDistRepr", into = "repr::QuantileDistRepr"))]
pub struct QuantileDist {
    upper: f64,
    q: Vec<f64>,
}

/// Largest point mass detected in a quantile grid.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AtomReport {
    pub location: f64,
    /// Length of the longest run of quantiles equal within the tolerance,
    /// divided by `K`.
    pub mass_estimate: f64,
}

/// Probability level of quantile `i` on a `k`-point grid.
#[inline]
pub fn level(i: usize, k: usize) -> f64 {
    (i as f64 + 0.5) / k as f64
}

impl QuantileDist {
    /// Validates an externally supplied quantile vector.
    ///
    /// Values may sit up to `1e-12 * upper` outside `[0, upper]` or out of
    /// order; such rounding noise is repaired, anything larger is rejected.
    pub fn new(upper: f64, q: Vec<f64>) -> Result<Self> {
        check_upper(upper)?;
        if q.len() < 2 {
            return Err(Error::Input(format!("need at least 2 quantiles, got {}", q.len())));
        }
        let slack = SLACK * upper;
        for (i, &v) in q.iter().enumerate() {
            if !v.is_finite() || v < -slack || v > upper + slack {
                return Err(Error::Input(format!("quantile {i} = {v} outside [0, {upper}]")));
            }
        }
        for (i, w) in q.windows(2).enumerate() {
            if w[1] < w[0] - slack {
                return Err(Error::Input(format!(
                    "quantiles not monotone at index {}: {} > {}",
                    i + 1,
                    w[0],
                    w[1]
                )));
            }
        }
        Ok(Self::repaired(upper, q))
    }

    /// Clamps to `[0, upper]` and takes the running maximum. Only for vectors
    /// that are monotone up to rounding.
    pub(crate) fn repaired(upper: f64, mut q: Vec<f64>) -> Self {
        let mut run = 0.0f64;
        for v in q.iter_mut() {
            let c = v.clamp(0.0, upper);
            run = run.max(c);
            *v = run;
        }
        Self { upper, q }
    }

    pub fn point_mass(at: f64, upper: f64, k: usize) -> Result<Self> {
        check_upper(upper)?;
        check_k(k)?;
        if !(0.0..=upper).contains(&at) {
            return Err(Error::Input(format!("point mass at {at} outside [0, {upper}]")));
        }
        Ok(Self { upper, q: alloc::vec![at; k] })
    }

    /// Uniform law on `[a, b] ⊆ [0, upper]`.
    pub fn uniform(a: f64, b: f64, upper: f64, k: usize) -> Result<Self> {
        check_upper(upper)?;
        check_k(k)?;
        if !(0.0 <= a && a <= b && b <= upper) {
            return Err(Error::Input(format!("uniform range [{a}, {b}] not inside [0, {upper}]")));
        }
        let q = (0..k).map(|i| a + (b - a) * level(i, k)).collect();
        Ok(Self::repaired(upper, q))
    }

    /// `scale * Bernoulli(p)` on `[0, upper]`.
    pub fn bernoulli(p: f64, scale: f64, upper: f64, k: usize) -> Result<Self> {
        check_upper(upper)?;
        check_k(k)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Input(format!("bernoulli probability {p} outside [0, 1]")));
        }
        if !(0.0..=upper).contains(&scale) {
            return Err(Error::Input(format!("bernoulli scale {scale} outside [0, {upper}]")));
        }
        let q = (0..k).map(|i| if level(i, k) > 1.0 - p { scale } else { 0.0 }).collect();
        Ok(Self { upper, q })
    }

    /// Builds a law from a quantile function evaluated at the midpoint levels.
    pub fn from_quantile_fn(upper: f64, k: usize, quantile: impl Fn(f64) -> f64) -> Result<Self> {
        check_upper(upper)?;
        check_k(k)?;
        Self::new(upper, (0..k).map(|i| quantile(level(i, k))).collect())
    }

    /// Empirical law of equally weighted samples, projected onto `k` midpoint
    /// quantiles. Samples are clamped into `[0, upper]`.
    pub fn from_samples(samples: &[f64], upper: f64, k: usize) -> Result<Self> {
        check_upper(upper)?;
        check_k(k)?;
        if samples.is_empty() {
            return Err(Error::Input("no samples".into()));
        }
        if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite sample {bad}")));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        let w = 1.0 / sorted.len() as f64;
        let mut out = alloc::vec![0.0; k];
        let mut grid = Regridder::new(Regrid::Midpoint, &mut out);
        for &v in &sorted {
            grid.push(v, w);
        }
        grid.finish();
        Ok(Self::repaired(upper, out))
    }

    #[inline]
    pub fn upper(&self) -> f64 {
        self.upper
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.q.len()
    }

    #[inline]
    pub fn quantiles(&self) -> &[f64] {
        &self.q
    }

    pub fn into_quantiles(self) -> Vec<f64> {
        self.q
    }

    pub fn mean(&self) -> f64 {
        self.q.iter().sum::<f64>() / self.k() as f64
    }

    /// `∫ h dξ`, exact for the atomic law.
    pub fn expect(&self, h: impl Fn(f64) -> f64) -> f64 {
        self.q.iter().map(|&v| h(v)).sum::<f64>() / self.k() as f64
    }

    /// `F(z)`: mass of the atoms at or below `z`.
    pub fn cdf(&self, z: f64) -> f64 {
        self.q.partition_point(|&v| v <= z) as f64 / self.k() as f64
    }

    /// Generalized inverse `inf { z : F(z) >= u }` of the atomic law, for
    /// `u ∈ [0, 1]`. This is what turns a uniform draw into a reinforcement.
    #[inline]
    pub fn quantile(&self, u: f64) -> f64 {
        let k = self.k();
        let idx = libm::ceil(u * k as f64) as usize;
        self.q[idx.clamp(1, k) - 1]
    }

    /// Same quantiles with a different support bound (must still contain them).
    pub fn with_upper(&self, upper: f64) -> Result<Self> {
        check_upper(upper)?;
        if self.q[self.k() - 1] > upper {
            return Err(Error::Input(format!(
                "largest quantile {} exceeds new support bound {upper}",
                self.q[self.k() - 1]
            )));
        }
        Ok(Self { upper, q: self.q.clone() })
    }

    /// True when every quantile is the same value.
    pub fn is_point_mass(&self) -> bool {
        self.q[0] == self.q[self.k() - 1]
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.k() != other.k() {
            return Err(Error::Dimension(format!("K = {} vs K = {}", self.k(), other.k())));
        }
        if self.upper != other.upper {
            return Err(Error::Dimension(format!(
                "support bound {} vs {}",
                self.upper, other.upper
            )));
        }
        Ok(())
    }
}

fn check_upper(upper: f64) -> Result<()> {
    if upper.is_finite() && upper > 0.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("support bound must be positive and finite, got {upper}")))
    }
}

fn check_k(k: usize) -> Result<()> {
    if k >= 2 {
        Ok(())
    } else {
        Err(Error::Input(format!("grid resolution K must be at least 2, got {k}")))
    }
}

/// Exact 1-Wasserstein distance between two laws on the same grid.
pub fn wasserstein(a: &QuantileDist, b: &QuantileDist) -> Result<f64> {
    a.check_compatible(b)?;
    Ok(quantile_l1(&a.q, &b.q))
}

/// Mean absolute difference of two equally long quantile vectors.
#[inline]
pub fn quantile_l1(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() / a.len() as f64
}

/// `|∫ h da - ∫ h db|` for a caller-asserted 1-Lipschitz `h`; a lower bound on
/// the Wasserstein distance by Kantorovich-Rubinstein duality.
pub fn kr_dual_lower_bound(a: &QuantileDist, b: &QuantileDist, h: impl Fn(f64) -> f64) -> f64 {
    (a.expect(&h) - b.expect(&h)).abs()
}

/// Quantiles of a nondecreasing, right-continuous CDF on `[0, upper]` with
/// `F(upper) = 1`, by bisection to `upper * 1e-12`.
pub fn from_cdf(cdf: impl Fn(f64) -> f64, upper: f64, k: usize) -> Result<QuantileDist> {
    check_upper(upper)?;
    check_k(k)?;
    let tol = upper * 1e-12;
    let f0 = cdf(0.0);
    let fc = cdf(upper);
    if !(f0.is_finite() && fc.is_finite()) || f0 > fc {
        return Err(Error::Input(format!("CDF not monotone: F(0) = {f0}, F({upper}) = {fc}")));
    }
    if fc < 1.0 - WEIGHT_TOL {
        return Err(Error::Input(format!("CDF reaches only {fc} at the support bound {upper}")));
    }
    let mut q = Vec::with_capacity(k);
    for i in 0..k {
        let p = level(i, k);
        if f0 >= p {
            q.push(0.0);
            continue;
        }
        let (mut lo, mut hi) = (0.0, upper);
        let (mut flo, mut fhi) = (f0, fc);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            let fm = cdf(mid);
            if !(fm >= flo - WEIGHT_TOL && fm <= fhi + WEIGHT_TOL) {
                return Err(Error::Input(format!(
                    "CDF not monotone near z = {mid}: F = {fm} outside [{flo}, {fhi}]"
                )));
            }
            if fm >= p {
                hi = mid;
                fhi = fm;
            } else {
                lo = mid;
                flo = fm;
            }
        }
        if let Some(&prev) = q.last() {
            if hi < prev - tol {
                return Err(Error::Input(format!(
                    "CDF not monotone: quantile at level {p} = {hi} below previous {prev}"
                )));
            }
        }
        q.push(hi);
    }
    Ok(QuantileDist::repaired(upper, q))
}

/// Finite mixture `Σ w_c ξ_c`, re-projected onto the midpoint grid of the
/// first component's resolution.
pub fn mixture(components: &[(f64, &QuantileDist)]) -> Result<QuantileDist> {
    let k = components
        .first()
        .map(|(_, d)| d.k())
        .ok_or_else(|| Error::Input("empty mixture".into()))?;
    mixture_with(components, k, Regrid::Midpoint)
}

/// [`mixture`] with an explicit output resolution and projection rule.
pub fn mixture_with(components: &[(f64, &QuantileDist)], k: usize, mode: Regrid) -> Result<QuantileDist> {
    check_k(k)?;
    let first = components.first().ok_or_else(|| Error::Input("empty mixture".into()))?;
    let upper = first.1.upper;
    let mut total = 0.0;
    for (w, d) in components {
        if !(w.is_finite() && *w >= 0.0) {
            return Err(Error::Input(format!("mixture weight {w} is not a nonnegative number")));
        }
        if d.upper != upper {
            return Err(Error::Dimension(format!(
                "mixture components on [0, {upper}] and [0, {}]",
                d.upper
            )));
        }
        total += w;
    }
    if (total - 1.0).abs() > WEIGHT_TOL {
        return Err(Error::Input(format!("mixture weights sum to {total}, not 1")));
    }
    let mut atoms: Vec<(f64, f64)> = Vec::with_capacity(components.iter().map(|(_, d)| d.k()).sum());
    for (w, d) in components {
        if *w == 0.0 {
            continue;
        }
        let aw = w / total / d.k() as f64;
        atoms.extend(d.q.iter().map(|&v| (v, aw)));
    }
    Ok(regrid_atoms(&mut atoms, upper, k, mode))
}

/// Projects an arbitrary weighted atom set (weights summing to one) onto `k`
/// equal-mass quantiles.
pub fn regrid_atoms(atoms: &mut [(f64, f64)], upper: f64, k: usize, mode: Regrid) -> QuantileDist {
    atoms.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let mut out = alloc::vec![0.0; k];
    let mut grid = Regridder::new(mode, &mut out);
    for &(v, w) in atoms.iter() {
        grid.push(v, w);
    }
    grid.finish();
    QuantileDist::repaired(upper, out)
}

/// Image law under a nondecreasing map: quantiles commute with monotone maps,
/// so this is exact. `h` must map into `[0, upper]`.
pub fn pushforward_monotone(xi: &QuantileDist, h: impl Fn(f64) -> f64, upper: f64) -> Result<QuantileDist> {
    check_upper(upper)?;
    let mapped: Vec<f64> = xi.q.iter().map(|&v| h(v)).collect();
    let slack = 1e-12 * upper;
    for (i, w) in mapped.windows(2).enumerate() {
        if w[1].is_nan() || w[1] < w[0] - 1e-12 {
            return Err(Error::Contract(format!(
                "map is not nondecreasing: h({}) = {} > h({}) = {}",
                xi.q[i],
                w[0],
                xi.q[i + 1],
                w[1]
            )));
        }
    }
    if let Some(bad) = mapped.iter().find(|v| !(**v >= -slack && **v <= upper + slack)) {
        return Err(Error::Contract(format!("map value {bad} outside [0, {upper}]")));
    }
    Ok(QuantileDist::repaired(upper, mapped))
}

/// Image law under an arbitrary continuous map: atoms are mapped, sorted and
/// kept (equal weights need no re-gridding). Values are clamped into
/// `[0, upper]`; a non-finite value is a contract error.
pub fn pushforward_general(xi: &QuantileDist, h: impl Fn(f64) -> f64, upper: f64) -> Result<QuantileDist> {
    check_upper(upper)?;
    let mut mapped: Vec<f64> = xi.q.iter().map(|&v| h(v)).collect();
    if let Some(bad) = mapped.iter().find(|v| !v.is_finite()) {
        return Err(Error::Contract(format!("map produced {bad}")));
    }
    mapped.sort_unstable_by(f64::total_cmp);
    Ok(QuantileDist::repaired(upper, mapped))
}

/// Longest run of quantiles lying within `tol` of the run's first value.
pub fn largest_atom(xi: &QuantileDist, tol: f64) -> AtomReport {
    let q = &xi.q;
    let (mut best_start, mut best_len) = (0, 0);
    let mut start = 0;
    for end in 0..q.len() {
        while q[end] - q[start] > tol {
            start += 1;
        }
        if end + 1 - start > best_len {
            best_len = end + 1 - start;
            best_start = start;
        }
    }
    AtomReport {
        location: q[best_start],
        mass_estimate: best_len as f64 / q.len() as f64,
    }
}

/// Default atom tolerance for a law on `[0, upper]`.
pub fn default_atom_tol(upper: f64) -> f64 {
    1e-9 * upper
}

/// Streaming projection of sorted weighted atoms onto a quantile grid.
///
/// Atoms must arrive in nondecreasing order with weights summing to one. The
/// output may need [`QuantileDist::repaired`] for rounding.
pub(crate) struct Regridder<'a> {
    mode: Regrid,
    out: &'a mut [f64],
    cell: usize,
    width: f64,
    // Midpoint: cumulative mass so far.
    cum: f64,
    // CellAverage: mass and first moment in the open cell.
    filled: f64,
    acc: f64,
    cell_lo: f64,
    last: f64,
}

impl<'a> Regridder<'a> {
    pub(crate) fn new(mode: Regrid, out: &'a mut [f64]) -> Self {
        let width = 1.0 / out.len() as f64;
        Self {
            mode,
            out,
            cell: 0,
            width,
            cum: 0.0,
            filled: 0.0,
            acc: 0.0,
            cell_lo: f64::NAN,
            last: 0.0,
        }
    }

    #[inline]
    pub(crate) fn push(&mut self, v: f64, w: f64) {
        let k = self.out.len();
        self.last = v;
        match self.mode {
            Regrid::Midpoint => {
                self.cum += w;
                while self.cell < k && (self.cell as f64 + 0.5) * self.width <= self.cum + 1e-12 {
                    self.out[self.cell] = v;
                    self.cell += 1;
                }
            }
            Regrid::CellAverage => {
                let mut w = w;
                while w > 0.0 && self.cell < k {
                    if self.filled == 0.0 {
                        self.cell_lo = v;
                    }
                    let room = self.width - self.filled;
                    if w < room {
                        self.acc += v * w;
                        self.filled += w;
                        return;
                    }
                    self.acc += v * room;
                    w -= room;
                    self.close_cell(v);
                }
            }
        }
    }

    #[inline]
    fn close_cell(&mut self, hi: f64) {
        let lo = self.cell_lo;
        // a cell lying inside a single atom keeps that atom's exact value
        self.out[self.cell] = if lo == hi { hi } else { (self.acc / self.width).clamp(lo, hi) };
        self.cell += 1;
        self.filled = 0.0;
        self.acc = 0.0;
    }

    pub(crate) fn finish(mut self) {
        let k = self.out.len();
        if self.mode == Regrid::CellAverage && self.cell < k && self.filled > 0.0 {
            let lo = self.cell_lo;
            self.out[self.cell] = (self.acc / self.filled).clamp(lo, self.last);
            self.cell += 1;
        }
        while self.cell < k {
            self.out[self.cell] = self.last;
            self.cell += 1;
        }
    }
}

#[cfg(feature = "serde")]
mod repr {
    use alloc::vec::Vec;

    use serde::{Deserialize, Serialize};

    use super::QuantileDist;
    use crate::error::Error;

    /// Wire form: `{"upper": c, "K": K, "q": [...]}`.
    #[derive(Serialize, Deserialize)]
    pub(super) struct QuantileDistRepr {
        upper: f64,
        #[serde(rename = "K")]
        k: usize,
        q: Vec<f64>,
    }

    impl TryFrom<QuantileDistRepr> for QuantileDist {
        type Error = Error;

        fn try_from(r: QuantileDistRepr) -> Result<Self, Error> {
            if r.k != r.q.len() {
                return Err(Error::Input(alloc::format!(
                    "K = {} but {} quantiles given",
                    r.k,
                    r.q.len()
                )));
            }
            QuantileDist::new(r.upper, r.q)
        }
    }

    impl From<QuantileDist> for QuantileDistRepr {
        fn from(d: QuantileDist) -> Self {
            Self { upper: d.upper, k: d.q.len(), q: d.q }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unif(k: usize) -> QuantileDist {
        QuantileDist::uniform(0.0, 1.0, 1.0, k).unwrap()
    }

    fn delta(a: f64, k: usize) -> QuantileDist {
        QuantileDist::point_mass(a, 1.0, k).unwrap()
    }

    /// Midpoint-rule quadrature of `g` over `[0, 1]`.
    fn quad(g: impl Fn(f64) -> f64, n: usize) -> f64 {
        (0..n).map(|i| g((i as f64 + 0.5) / n as f64)).sum::<f64>() / n as f64
    }

    #[test]
    fn wasserstein_point_masses_and_identity() {
        let k = 64;
        assert!((wasserstein(&delta(0.3, k), &delta(0.7, k)).unwrap() - 0.4).abs() < 1e-15);
        let u = unif(k);
        assert_eq!(wasserstein(&u, &u).unwrap(), 0.0);
    }

    #[test]
    fn wasserstein_uniform_to_origin_matches_quadrature() {
        let k = 256;
        // ∫ |q_U(p) - 0| dp = ∫ p dp
        let oracle = quad(|t| t, 100_000);
        let d = wasserstein(&unif(k), &delta(0.0, k)).unwrap();
        assert!((d - oracle).abs() <= 0.5 / k as f64, "{d} vs {oracle}");
    }

    #[test]
    fn wasserstein_rejects_mismatched_grids() {
        let a = unif(8);
        assert!(matches!(wasserstein(&a, &unif(16)), Err(Error::Dimension(_))));
        let b = QuantileDist::uniform(0.0, 1.0, 2.0, 8).unwrap();
        assert!(matches!(wasserstein(&a, &b), Err(Error::Dimension(_))));
    }

    #[test]
    fn kr_dual_examples() {
        let k = 256;
        assert!((kr_dual_lower_bound(&delta(1.0, k), &delta(0.0, k), |t| t) - 1.0).abs() < 1e-15);
        assert_eq!(kr_dual_lower_bound(&unif(k), &delta(0.2, k), |_| 0.7), 0.0);
        // ∫ |t - 1/2| dt over [0, 1] minus |1/2 - 1/2|
        let oracle = quad(|t| (t - 0.5).abs(), 100_000);
        let lb = kr_dual_lower_bound(&unif(k), &delta(0.5, k), |t| (t - 0.5).abs());
        assert!((lb - oracle).abs() <= 0.5 / k as f64);
        assert!(lb <= wasserstein(&unif(k), &delta(0.5, k)).unwrap() + 1e-12);
    }

    #[test]
    fn from_cdf_examples() {
        let step = from_cdf(|z| if z >= 0.4 { 1.0 } else { 0.0 }, 1.0, 16).unwrap();
        assert!(step.quantiles().iter().all(|&v| (v - 0.4).abs() < 1e-11));

        let id = from_cdf(|z| z, 1.0, 4).unwrap();
        for (got, want) in id.quantiles().iter().zip([0.125, 0.375, 0.625, 0.875]) {
            assert!((got - want).abs() < 1e-11);
        }

        // closed-form inversion of F(z) = z^2
        let k = 100;
        let sq = from_cdf(|z| z * z, 1.0, k).unwrap();
        for (i, v) in sq.quantiles().iter().enumerate() {
            assert!((v - libm::sqrt(level(i, k))).abs() < 1e-11);
        }
    }

    #[test]
    fn from_cdf_detects_non_monotone() {
        let bumpy = |z: f64| if z < 0.5 { 0.9 } else if z < 0.75 { 0.1 } else { 1.0 };
        assert!(matches!(from_cdf(bumpy, 1.0, 8), Err(Error::Input(_))));
        assert!(matches!(from_cdf(|z| 0.5 * z, 1.0, 8), Err(Error::Input(_))));
    }

    #[test]
    fn mixture_examples() {
        let k = 32;
        let u = unif(k);
        assert_eq!(mixture(&[(1.0, &u)]).unwrap(), u);

        let two = mixture(&[(0.5, &delta(0.0, 4)), (0.5, &delta(1.0, 4))]).unwrap();
        assert_eq!(two.quantiles(), &[0.0, 0.0, 1.0, 1.0]);
    }

    #[test]
    fn mixture_of_nested_uniforms_matches_pooled_cdf_inversion() {
        let k = 200;
        let parts = [
            (0.2, QuantileDist::uniform(0.0, 1.0, 1.0, 4000).unwrap()),
            (0.3, QuantileDist::uniform(0.2, 0.6, 1.0, 4000).unwrap()),
            (0.5, QuantileDist::uniform(0.3, 0.4, 1.0, 4000).unwrap()),
        ];
        let refs: Vec<(f64, &QuantileDist)> = parts.iter().map(|(w, d)| (*w, d)).collect();
        let mixed = mixture_with(&refs, k, Regrid::Midpoint).unwrap();
        let uni_cdf = |z: f64, a: f64, b: f64| ((z - a) / (b - a)).clamp(0.0, 1.0);
        let oracle = from_cdf(
            |z| 0.2 * uni_cdf(z, 0.0, 1.0) + 0.3 * uni_cdf(z, 0.2, 0.6) + 0.5 * uni_cdf(z, 0.3, 0.4),
            1.0,
            k,
        )
        .unwrap();
        // component grids of 4000 atoms resolve the pooled CDF to ~1/4000
        for (a, b) in mixed.quantiles().iter().zip(oracle.quantiles()) {
            assert!((a - b).abs() < 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn mixture_rejects_bad_weights() {
        let u = unif(8);
        assert!(matches!(mixture(&[(0.5, &u), (0.4, &u)]), Err(Error::Input(_))));
        assert!(matches!(mixture(&[(1.5, &u), (-0.5, &u)]), Err(Error::Input(_))));
        assert!(mixture(&[]).is_err());
    }

    #[test]
    fn cell_average_keeps_mean_and_interior_atoms() {
        let k = 64;
        let a = QuantileDist::bernoulli(0.3, 1.0, 1.0, 1000).unwrap();
        let b = delta(0.5, 1000);
        let m = mixture_with(&[(0.37, &a), (0.63, &b)], k, Regrid::CellAverage).unwrap();
        let exact = 0.37 * a.mean() + 0.63 * b.mean();
        assert!((m.mean() - exact).abs() < 1e-12);
        let atom = largest_atom(&m, 1e-12);
        assert_eq!(atom.location, 0.5);
        assert!((atom.mass_estimate - 0.63).abs() <= 2.0 / k as f64);
    }

    #[test]
    fn pushforward_examples() {
        let k = 64;
        let u = unif(k);
        assert_eq!(pushforward_monotone(&u, |t| t, 1.0).unwrap(), u);
        let sq = pushforward_monotone(&u, |t| t * t, 1.0).unwrap();
        for (i, v) in sq.quantiles().iter().enumerate() {
            assert_eq!(*v, level(i, k) * level(i, k));
        }
        // Beta(1, 1) pushed by t^(1/2): Kumaraswamy(2, 1) has q(u) = √u
        let root = pushforward_monotone(&u, libm::sqrt, 1.0).unwrap();
        for (i, v) in root.quantiles().iter().enumerate() {
            assert!((v - libm::sqrt(level(i, k))).abs() < 1e-15);
        }
        assert!(matches!(pushforward_monotone(&u, |t| 1.0 - t, 1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn pushforward_general_examples() {
        let k = 128;
        let u = unif(k);
        let g = pushforward_general(&u, |t| t * t, 1.0).unwrap();
        let m = pushforward_monotone(&u, |t| t * t, 1.0).unwrap();
        assert!(wasserstein(&g, &m).unwrap() < 1e-12);

        let flip = pushforward_general(&u, |t| 1.0 - t, 1.0).unwrap();
        assert!(wasserstein(&flip, &u).unwrap() < 1e-12);

        // P(|2U - 1| <= z) = z: the fold is uniform again
        let fold = pushforward_general(&u, |t| (2.0 * t - 1.0).abs(), 1.0).unwrap();
        let oracle = from_cdf(|z| z.clamp(0.0, 1.0), 1.0, k).unwrap();
        assert!(wasserstein(&fold, &oracle).unwrap() <= 1.0 / k as f64);
    }

    #[test]
    fn largest_atom_examples() {
        let k = 256;
        let d = largest_atom(&delta(0.25, k), 1e-9);
        assert_eq!((d.location, d.mass_estimate), (0.25, 1.0));
        assert_eq!(largest_atom(&unif(k), 1e-9).mass_estimate, 1.0 / k as f64);

        let half = mixture(&[(0.5, &delta(0.5, k)), (0.5, &unif(k))]).unwrap();
        let a = largest_atom(&half, 1e-9);
        assert!((a.location - 0.5).abs() < 1e-9);
        assert!((a.mass_estimate - 0.5).abs() <= 1.0 / k as f64);
    }

    #[test]
    fn quantile_inverts_the_atomic_cdf() {
        let d = QuantileDist::new(1.0, vec![0.1, 0.2, 0.2, 0.9]).unwrap();
        assert_eq!(d.quantile(0.0), 0.1);
        assert_eq!(d.quantile(0.25), 0.1);
        assert_eq!(d.quantile(0.26), 0.2);
        assert_eq!(d.quantile(0.75), 0.2);
        assert_eq!(d.quantile(1.0), 0.9);
        assert_eq!(d.cdf(0.2), 0.75);
        assert_eq!(d.cdf(0.05), 0.0);
    }

    #[test]
    fn new_rejects_bad_vectors() {
        assert!(QuantileDist::new(1.0, vec![0.5]).is_err());
        assert!(QuantileDist::new(1.0, vec![0.6, 0.5]).is_err());
        assert!(QuantileDist::new(1.0, vec![0.0, 1.5]).is_err());
        assert!(QuantileDist::new(0.0, vec![0.0, 0.0]).is_err());
        let fixed = QuantileDist::new(1.0, vec![-1e-14, 0.5, 0.5 - 1e-14, 1.0 + 1e-14]).unwrap();
        assert_eq!(fixed.quantiles(), &[0.0, 0.5, 0.5, 1.0]);
    }

    #[test]
    fn from_samples_takes_midpoint_quantiles() {
        let d = QuantileDist::from_samples(&[0.9, 0.1, 0.5, 0.3], 1.0, 4).unwrap();
        assert_eq!(d.quantiles(), &[0.1, 0.3, 0.5, 0.9]);
        let d = QuantileDist::from_samples(&[0.0, 1.0], 1.0, 4).unwrap();
        assert_eq!(d.quantiles(), &[0.0, 0.0, 1.0, 1.0]);
    }
}
