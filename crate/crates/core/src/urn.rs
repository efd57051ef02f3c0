//! Randomly reinforced urn: trajectories, coupled trajectories, Monte Carlo
//! estimates of the limit law, and the martingale diagnostics of its Doob
//! decomposition.
//!
//! Each step draws `u, v, w` uniform on `(0, 1]`, in that order. A black ball
//! is drawn when `u <= X / (X + Y)`; black draws add `q_μ(v)` black balls,
//! white draws add `q_ν(w)` white balls. Both reinforcements are drawn every
//! step so that two urns fed the same stream stay coupled.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::dist::QuantileDist;
use crate::error::{Error, Result};
use crate::params::ReinforcementPair;
use crate::rng::{map_indices, substream, unit_open_closed};

/// Steps at which `1 / D_k` is recorded for the `E[1/D_k]` check.
pub const PROBE_STEPS: [u64; 8] = [1, 2, 5, 10, 20, 50, 100, 200];

/// Urn composition after `n` draws.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct UrnState {
    /// Black balls.
    pub x: f64,
    /// White balls.
    pub y: f64,
    pub n: u64,
}

impl UrnState {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite() && x >= 0.0 && y >= 0.0 && x + y > 0.0) {
            return Err(Error::Domain(format!("initial composition ({x}, {y}) must be nonnegative and nonzero")));
        }
        Ok(Self { x, y, n: 0 })
    }

    /// `D_n = X_n + Y_n`.
    #[inline]
    pub fn total(&self) -> f64 {
        self.x + self.y
    }

    /// `Z_n = X_n / D_n`.
    #[inline]
    pub fn proportion(&self) -> f64 {
        self.x / (self.x + self.y)
    }
}

/// One draw with the given uniforms.
#[inline]
pub fn step(state: &UrnState, pair: &ReinforcementPair, u: f64, v: f64, w: f64) -> UrnState {
    let rx = pair.mu().quantile(v);
    let ry = pair.nu().quantile(w);
    let mut next = *state;
    if u <= state.proportion() {
        next.x += rx;
    } else {
        next.y += ry;
    }
    next.n += 1;
    next
}

#[inline]
fn random_step<R: RngCore>(state: &UrnState, pair: &ReinforcementPair, rng: &mut R) -> UrnState {
    let u = unit_open_closed(rng);
    let v = unit_open_closed(rng);
    let w = unit_open_closed(rng);
    step(state, pair, u, v, w)
}

/// Seed, target bias and budget of a simulation run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunConfig {
    pub seed: u64,
    /// Target bias: trajectories stop once `D_n >= max(2β, 16β/eps²)`, which
    /// bounds `E|Z_∞ - Z_stop|` by `eps / 2`.
    pub eps: f64,
    /// Per-trajectory step budget; `None` sizes it from the threshold and `m0`.
    pub max_steps: Option<u64>,
    pub replicates: usize,
}

impl RunConfig {
    pub fn new(seed: u64, eps: f64, replicates: usize) -> Result<Self> {
        let cfg = Self { seed, eps, max_steps: None, replicates };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.eps > 0.0) {
            return Err(Error::Parameter(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_steps == Some(0) {
            return Err(Error::Parameter("max_steps must be at least 1".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Parameter("replicates must be at least 1".into()));
        }
        Ok(())
    }

    /// Stopping threshold on the total ball count.
    pub fn threshold(&self, pair: &ReinforcementPair) -> f64 {
        stopping_threshold(pair.beta(), self.eps)
    }

    pub fn step_budget(&self, pair: &ReinforcementPair) -> u64 {
        self.max_steps.unwrap_or_else(|| default_max_steps(self.threshold(pair), pair.m0()))
    }
}

/// `max(2β, 16β/eps²)`.
pub fn stopping_threshold(beta: f64, eps: f64) -> f64 {
    (2.0 * beta).max(16.0 * beta / (eps * eps))
}

/// `ceil(2 t / m0) + 10⁴`: ample, since the urn grows by `m >= m0` per step
/// on average.
pub fn default_max_steps(threshold: f64, m0: f64) -> u64 {
    libm::ceil(2.0 * threshold / m0) as u64 + 10_000
}

/// Martingale bookkeeping along one trajectory.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiagnosticsRecord {
    /// `max_r |A_r|` for the compensator `A` of `Z`.
    pub sup_compensator: f64,
    /// `Σ Δ⟨M⟩` over the simulated steps.
    pub bracket_total: f64,
    /// `(k, 1 / D_k)` for each reached step of [`PROBE_STEPS`].
    pub inv_d_at: Vec<(u64, f64)>,
}

/// Conditional one-step moments, by exact quadrature over the reinforcement
/// atoms.
struct Tracker {
    mu: Vec<(f64, f64)>,
    nu: Vec<(f64, f64)>,
    compensator: f64,
    record: DiagnosticsRecord,
}

impl Tracker {
    fn new(pair: &ReinforcementPair) -> Self {
        Self {
            mu: pair.mu_atoms(),
            nu: pair.nu_atoms(),
            compensator: 0.0,
            record: DiagnosticsRecord::default(),
        }
    }

    /// Accounts for the step taken from `state`.
    fn before_step(&mut self, state: &UrnState) {
        let d = state.total();
        let z = state.proportion();
        let moments = |atoms: &[(f64, f64)]| {
            atoms.iter().fold((0.0, 0.0), |(m1, m2), &(k, w)| {
                let r = k / (d + k);
                (m1 + w * r, m2 + w * r * r)
            })
        };
        let (mx1, mx2) = moments(&self.mu);
        let (my1, my2) = moments(&self.nu);
        let a_star = mx1 - my1;
        let z_star = (1.0 - z) * mx2 + z * my2;
        let spread = z * (1.0 - z);
        let d_comp = spread * a_star;
        let d_bracket = spread * z_star - d_comp * d_comp;
        self.compensator += d_comp;
        let rec = &mut self.record;
        rec.sup_compensator = rec.sup_compensator.max(self.compensator.abs());
        rec.bracket_total += d_bracket.max(0.0);
    }

    fn after_step(&mut self, state: &UrnState) {
        if PROBE_STEPS.contains(&state.n) {
            self.record.inv_d_at.push((state.n, 1.0 / state.total()));
        }
    }
}

/// Runs until `D_n >= threshold` and `n >= min_steps`, or the budget runs out
/// (second value `true`).
fn trajectory<R: RngCore>(
    start: UrnState,
    pair: &ReinforcementPair,
    threshold: f64,
    min_steps: u64,
    budget: u64,
    rng: &mut R,
    mut tracker: Option<&mut Tracker>,
) -> (UrnState, bool) {
    let mut state = start;
    while state.total() < threshold || state.n < min_steps {
        if state.n >= budget {
            return (state, true);
        }
        if let Some(t) = tracker.as_deref_mut() {
            t.before_step(&state);
        }
        state = random_step(&state, pair, rng);
        if let Some(t) = tracker.as_deref_mut() {
            t.after_step(&state);
        }
    }
    (state, false)
}

/// Result of [`run_until_mass`].
#[derive(Debug, Clone, PartialEq)]
pub struct StopResult {
    /// `Z` at the stopping step.
    pub z: f64,
    pub steps: u64,
    pub state: UrnState,
    pub diagnostics: DiagnosticsRecord,
}

/// Simulates one trajectory (stream `(cfg.seed, 0)`) until the total ball
/// count reaches `max(2β, 16β/eps²)`.
pub fn run_until_mass(start: UrnState, pair: &ReinforcementPair, cfg: &RunConfig) -> Result<StopResult> {
    cfg.check()?;
    let budget = cfg.step_budget(pair);
    let mut tracker = Tracker::new(pair);
    let mut rng = substream(cfg.seed, 0);
    let (state, truncated) = trajectory(start, pair, cfg.threshold(pair), 0, budget, &mut rng, Some(&mut tracker));
    if truncated {
        return Err(Error::Truncated { count: 1, total: 1, max_steps: budget });
    }
    Ok(StopResult {
        z: state.proportion(),
        steps: state.n,
        state,
        diagnostics: tracker.record,
    })
}

/// Stopped proportions of independent replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSamples {
    pub z: Vec<f64>,
    pub steps: Vec<u64>,
    /// Replicates that exhausted the step budget; their `z` is the last value.
    pub truncated: usize,
    pub threshold: f64,
    pub max_steps: u64,
}

/// Runs `cfg.replicates` trajectories from `(x, y)`; replicate `r` uses
/// stream `(cfg.seed, r)`.
pub fn sample_limit(x: f64, y: f64, pair: &ReinforcementPair, cfg: &RunConfig) -> Result<LimitSamples> {
    cfg.check()?;
    let start = UrnState::new(x, y)?;
    let threshold = cfg.threshold(pair);
    let budget = cfg.step_budget(pair);
    let runs = map_indices(cfg.replicates, |r| {
        let mut rng = substream(cfg.seed, r as u64);
        trajectory(start, pair, threshold, 0, budget, &mut rng, None)
    });
    Ok(LimitSamples {
        truncated: runs.iter().filter(|(_, t)| *t).count(),
        z: runs.iter().map(|(s, _)| s.proportion()).collect(),
        steps: runs.iter().map(|(s, _)| s.n).collect(),
        threshold,
        max_steps: budget,
    })
}

/// Empirical law of the stopped proportion on the pair's grid resolution.
/// Its bias against the law of `Z_∞` is at most `eps / 2` in `d_W`, plus
/// Monte Carlo noise of order `replicates^{-1/2}`.
pub fn estimate_limit_law(x: f64, y: f64, pair: &ReinforcementPair, cfg: &RunConfig) -> Result<QuantileDist> {
    let s = sample_limit(x, y, pair, cfg)?;
    if s.truncated > 0 {
        return Err(Error::Truncated { count: s.truncated, total: s.z.len(), max_steps: s.max_steps });
    }
    QuantileDist::from_samples(&s.z, 1.0, pair.k())
}

/// Two urns driven by the same uniforms for `steps` draws; returns
/// `Z_0, ..., Z_steps` for each.
pub fn coupled_pair(
    start_a: UrnState,
    start_b: UrnState,
    pair: &ReinforcementPair,
    steps: usize,
    seed: u64,
) -> (Vec<f64>, Vec<f64>) {
    let mut rng = substream(seed, 0);
    let (mut a, mut b) = (start_a, start_b);
    let mut za = Vec::with_capacity(steps + 1);
    let mut zb = Vec::with_capacity(steps + 1);
    za.push(a.proportion());
    zb.push(b.proportion());
    for _ in 0..steps {
        let u = unit_open_closed(&mut rng);
        let v = unit_open_closed(&mut rng);
        let w = unit_open_closed(&mut rng);
        a = step(&a, pair, u, v, w);
        b = step(&b, pair, u, v, w);
        za.push(a.proportion());
        zb.push(b.proportion());
    }
    (za, zb)
}

/// One Monte Carlo estimate compared with its theoretical bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundCheck {
    pub name: String,
    /// Step index `k` for the `E[1/D_k]` checks.
    pub step: Option<u64>,
    pub estimate: f64,
    pub std_error: f64,
    pub bound: f64,
    /// `estimate <= bound + 3 * std_error`.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundsReport {
    pub start: UrnState,
    pub replicates: usize,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var / n))
}

fn bound_check(name: &str, step: Option<u64>, samples: &[f64], bound: f64) -> BoundCheck {
    let (estimate, std_error) = mean_and_se(samples);
    // rounding allowance for bounds that hold with equality
    let pass = estimate <= bound + 3.0 * std_error + 1e-12 * bound.abs();
    BoundCheck { name: name.into(), step, estimate, std_error, bound, pass }
}

/// `(1 + (β - m)/D₀) / (D₀ + m(k - 1) + β)`, the bound on `E[1/D_k]`.
pub fn inverse_total_bound(beta: f64, m: f64, d0: f64, k: u64) -> f64 {
    (1.0 + (beta - m) / d0) / (d0 + m * (k as f64 - 1.0) + beta)
}

/// Monte Carlo check of the Doob-decomposition bounds from a start with
/// `D₀ >= 2β`:
///
/// * `E[1/D_k] <= (1 + (β - m)/D₀) / (D₀ + m(k-1) + β)` at each probe step;
/// * `E[sup_r |A_r|] <= β / D₀` for the compensator `A`;
/// * `E[⟨M⟩_∞ - ⟨M⟩_0] <= β / D₀` for the bracket of the martingale part.
///
/// The compensator increment is `Z(1-Z) A*` with
/// `A* = E[R_X/(D+R_X)] - E[R_Y/(D+R_Y)]`, and
/// `Δ⟨M⟩ = Z(1-Z) Z* - (ΔA)²` with
/// `Z* = (1-Z) E[(R_X/(D+R_X))²] + Z E[(R_Y/(D+R_Y))²]`, all computed by
/// exact quadrature over the reinforcement atoms. Trajectories run to the
/// `cfg.eps` stopping threshold (and at least to the last probe step); the
/// neglected bracket tail is at most `β / D_stop`.
pub fn diagnostics_bounds_check(pair: &ReinforcementPair, start: UrnState, cfg: &RunConfig) -> Result<BoundsReport> {
    cfg.check()?;
    let beta = pair.beta();
    let d0 = start.total();
    if d0 < 2.0 * beta {
        return Err(Error::Parameter(format!("diagnostics need D0 >= 2 beta = {}, got D0 = {d0}", 2.0 * beta)));
    }
    let threshold = cfg.threshold(pair);
    let last_probe = PROBE_STEPS[PROBE_STEPS.len() - 1];
    let budget = cfg.step_budget(pair).max(last_probe);
    let records = map_indices(cfg.replicates, |r| {
        let mut rng = substream(cfg.seed, r as u64);
        let mut tracker = Tracker::new(pair);
        let (_, truncated) = trajectory(start, pair, threshold, last_probe, budget, &mut rng, Some(&mut tracker));
        (tracker.record, truncated)
    });
    let truncated = records.iter().filter(|(_, t)| *t).count();
    if truncated > 0 {
        return Err(Error::Truncated { count: truncated, total: records.len(), max_steps: budget });
    }

    let m = pair.mean();
    let mut checks = Vec::new();
    for &k in PROBE_STEPS.iter() {
        let samples: Vec<f64> = records
            .iter()
            .filter_map(|(rec, _)| rec.inv_d_at.iter().find(|(s, _)| *s == k).map(|(_, v)| *v))
            .collect();
        checks.push(bound_check("inverse_total", Some(k), &samples, inverse_total_bound(beta, m, d0, k)));
    }
    let sups: Vec<f64> = records.iter().map(|(r, _)| r.sup_compensator).collect();
    checks.push(bound_check("sup_compensator", None, &sups, beta / d0));
    let brackets: Vec<f64> = records.iter().map(|(r, _)| r.bracket_total).collect();
    checks.push(bound_check("bracket_total", None, &brackets, beta / d0));
    Ok(BoundsReport { start, replicates: cfg.replicates, checks })
}
