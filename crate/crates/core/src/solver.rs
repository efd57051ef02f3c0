//! Fixed-point solver on the projectively transformed domain.
//!
//! The quadrant `x, y >= 0` is mapped to the strip `S* = [0, ∞) × [0, 1]` by
//! `(x*, y*) = (1 / (x + y), x / (x + y))`. The axes `x = 0` and `y = 0`
//! become the rows `y* = 0` and `y* = 1`, and the far field becomes the
//! column `x* = 0`, so all three boundary conditions are ordinary boundary
//! values on the rectangle `[0, x*_max] × [0, 1]`. The one-step operator
//!
//! ```text
//! A*(H)(x*, y*) = y*     ∫ H(x*/(1+kx*), (y*+kx*)/(1+kx*)) μ(dk)
//!               + (1-y*) ∫ H(x*/(1+kx*),  y*/(1+kx*))      ν(dk)
//! ```
//!
//! only looks at points with smaller `x*`, so no closure is needed at the
//! truncation edge. Off-grid values are bilinear interpolations of quantile
//! vectors in `(√x*, y*)`; the integrals pool the reinforcement atoms and
//! are projected back onto `K` quantiles by cell averages. Both steps are
//! convex in the nodal values and W1-contractive, so the discrete operator is
//! non-expansive in every restricted sup distance, like the exact one.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::boundary::BoundaryDatum;
use crate::dist::{quantile_l1, QuantileDist, Regrid, Regridder, DEFAULT_K};
use crate::error::{Error, Result};
use crate::params::ReinforcementPair;
use crate::rng::map_chunks_mut;

/// `(x, y) ↦ (1 / (x + y), x / (x + y))`.
pub fn to_star(x: f64, y: f64) -> Result<(f64, f64)> {
    if !(x >= 0.0 && y >= 0.0 && x + y > 0.0 && (x + y).is_finite()) {
        return Err(Error::Domain(format!("({x}, {y}) is not a point of the quadrant with x + y > 0")));
    }
    let d = x + y;
    Ok((1.0 / d, x / d))
}

/// `(x*, y*) ↦ (y* / x*, (1 - y*) / x*)`; `x* = 0` is the far field.
pub fn from_star(x_star: f64, y_star: f64) -> Result<(f64, f64)> {
    if !(x_star > 0.0 && x_star.is_finite()) {
        return Err(Error::Domain(format!("x* = {x_star} has no finite preimage")));
    }
    if !(0.0..=1.0).contains(&y_star) {
        return Err(Error::Domain(format!("y* = {y_star} outside [0, 1]")));
    }
    Ok((y_star / x_star, (1.0 - y_star) / x_star))
}

/// Uniform node grid on `[0, x*_max] × [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub mx: usize,
    pub my: usize,
    pub x_star_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { mx: 129, my: 129, x_star_max: 8.0 }
    }
}

impl GridSpec {
    pub fn new(mx: usize, my: usize, x_star_max: f64) -> Result<Self> {
        let g = Self { mx, my, x_star_max };
        g.check()?;
        Ok(g)
    }

    fn check(&self) -> Result<()> {
        if self.mx < 2 || self.my < 3 {
            return Err(Error::Parameter(format!("grid {} x {} too small (need mx >= 2, my >= 3)", self.mx, self.my)));
        }
        if !(self.x_star_max.is_finite() && self.x_star_max > 0.0) {
            return Err(Error::Parameter(format!("x_star_max must be positive, got {}", self.x_star_max)));
        }
        Ok(())
    }

    #[inline]
    pub fn hx(&self) -> f64 {
        self.x_star_max / (self.mx - 1) as f64
    }

    #[inline]
    pub fn hy(&self) -> f64 {
        1.0 / (self.my - 1) as f64
    }

    #[inline]
    pub fn x_star(&self, i: usize) -> f64 {
        i as f64 * self.hx()
    }

    #[inline]
    pub fn y_star(&self, j: usize) -> f64 {
        j as f64 * self.hy()
    }

    /// Nodes off the far-field column and the two axis rows.
    #[inline]
    pub fn is_interior(&self, i: usize, j: usize) -> bool {
        i > 0 && j > 0 && j + 1 < self.my
    }
}

/// Starting field of the iteration (boundary values are pinned either way).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Initial {
    /// `H₀*(x*, y*) = φ(y*)`, the law of the urn before any draw.
    #[default]
    FarField,
    /// `H₀* ≡ φ(0)`.
    Floor,
}

/// When the iteration is declared converged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum StopRule {
    /// Sup update between successive fields below `tol_iter`.
    Update,
    /// Additionally, the geometric tail estimate `u ρ / (1 - ρ)` of the
    /// remaining distance to the fixed point is below `tol_iter`, with `ρ` the
    /// ratio of the last two updates.
    #[default]
    ErrorEstimate,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverConfig {
    pub grid: GridSpec,
    #[cfg_attr(feature = "serde", serde(rename = "K"))]
    pub k: usize,
    pub tol_iter: f64,
    pub max_iters: usize,
    pub init: Initial,
    pub stop: StopRule,
    /// Keep the axis rows at `φ(0)`, `φ(1)`. When off they are iterated like
    /// interior nodes; only the far-field column stays fixed.
    pub pin_axes: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            k: DEFAULT_K,
            tol_iter: 1e-4,
            max_iters: 5000,
            init: Initial::default(),
            stop: StopRule::default(),
            pin_axes: true,
        }
    }
}

impl SolverConfig {
    fn check(&self) -> Result<()> {
        self.grid.check()?;
        if self.k < 2 {
            return Err(Error::Parameter(format!("K must be at least 2, got {}", self.k)));
        }
        if !(self.tol_iter.is_finite() && self.tol_iter > 0.0) {
            return Err(Error::Parameter(format!("tol_iter must be positive, got {}", self.tol_iter)));
        }
        Ok(())
    }
}

/// What produced a field.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct FieldMeta {
    pub pair: String,
    pub boundary: String,
    pub iterations: usize,
    /// Sup update of the last sweep.
    pub final_update: f64,
    pub converged: bool,
}

/// Laws on `[0, 1]` at the nodes of a [`GridSpec`]. Node `(i, j)` sits at
/// `(x*_i, y*_j)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "repr::FieldRepr", into = "repr::FieldRepr"))]
pub struct SolutionField {
    grid: GridSpec,
    k: usize,
    data: Vec<f64>,
    meta: FieldMeta,
}

impl SolutionField {
    /// Field with every node equal to `fill`.
    pub fn constant(grid: GridSpec, fill: &QuantileDist) -> Result<Self> {
        grid.check()?;
        let k = fill.k();
        let mut data = Vec::with_capacity(grid.mx * grid.my * k);
        for _ in 0..grid.mx * grid.my {
            data.extend_from_slice(fill.quantiles());
        }
        Ok(Self { grid, k, data, meta: FieldMeta::default() })
    }

    /// Field with node `(i, j)` set to `f(x*_i, y*_j)`.
    pub fn from_fn(grid: GridSpec, k: usize, f: impl Fn(f64, f64) -> Result<QuantileDist>) -> Result<Self> {
        grid.check()?;
        let mut data = Vec::with_capacity(grid.mx * grid.my * k);
        for i in 0..grid.mx {
            for j in 0..grid.my {
                let v = f(grid.x_star(i), grid.y_star(j))?;
                if v.k() != k || v.upper() != 1.0 {
                    return Err(Error::Dimension(format!(
                        "node ({i}, {j}) has K = {} on [0, {}], expected K = {k} on [0, 1]",
                        v.k(),
                        v.upper()
                    )));
                }
                data.extend_from_slice(v.quantiles());
            }
        }
        Ok(Self { grid, k, data, meta: FieldMeta::default() })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn meta(&self) -> &FieldMeta {
        &self.meta
    }

    pub fn meta_mut(&mut self) -> &mut FieldMeta {
        &mut self.meta
    }

    pub fn node_count(&self) -> usize {
        self.grid.mx * self.grid.my
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.grid.my + j
    }

    /// Quantile vector at node `(i, j)`.
    #[inline]
    pub fn node(&self, i: usize, j: usize) -> &[f64] {
        self.node_by_index(self.index(i, j))
    }

    pub fn node_dist(&self, i: usize, j: usize) -> QuantileDist {
        QuantileDist::repaired(1.0, self.node(i, j).to_vec())
    }

    /// Node in storage order (`i * my + j`).
    #[inline]
    pub fn node_by_index(&self, idx: usize) -> &[f64] {
        &self.data[idx * self.k..(idx + 1) * self.k]
    }

    pub(crate) fn node_by_index_mut(&mut self, idx: usize) -> &mut [f64] {
        &mut self.data[idx * self.k..(idx + 1) * self.k]
    }

    /// Sets node `(i, j)`; `value` must have this field's `K`.
    pub fn set_node(&mut self, i: usize, j: usize, value: &QuantileDist) -> Result<()> {
        if value.k() != self.k || value.upper() != 1.0 {
            return Err(Error::Dimension(format!("node value has K = {}, field has K = {}", value.k(), self.k)));
        }
        let idx = self.index(i, j);
        self.node_by_index_mut(idx).copy_from_slice(value.quantiles());
        Ok(())
    }

    /// Interpolated law at `(x*, y*)` (clamped to the grid): quantile vectors
    /// are combined bilinearly in `(√x*, y*)`.
    pub fn interpolate(&self, x_star: f64, y_star: f64) -> QuantileDist {
        let mut out = alloc::vec![0.0; self.k];
        interpolate_into(&self.grid, self.k, &self.data, x_star, y_star, &mut out);
        QuantileDist::repaired(1.0, out)
    }

    /// Value at the original coordinates `(x, y)`; requires `1/(x+y) <= x*_max`.
    pub fn evaluate(&self, x: f64, y: f64) -> Result<QuantileDist> {
        let (xs, ys) = to_star(x, y)?;
        if xs > self.grid.x_star_max * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "({x}, {y}) maps to x* = {xs}, beyond the grid edge {}",
                self.grid.x_star_max
            )));
        }
        Ok(self.interpolate(xs, ys))
    }

    /// Sets the axis rows to `φ(0)`, `φ(1)` and the far-field column to `φ(y*)`.
    pub fn pin_boundary(&mut self, phi: &BoundaryDatum) -> Result<()> {
        self.check_boundary_k(phi)?;
        self.pin_column(phi);
        self.pin_rows(phi);
        Ok(())
    }

    fn check_boundary_k(&self, phi: &BoundaryDatum) -> Result<()> {
        if phi.k() != self.k {
            return Err(Error::Dimension(format!("boundary K = {} but field K = {}", phi.k(), self.k)));
        }
        Ok(())
    }

    fn pin_column(&mut self, phi: &BoundaryDatum) {
        for j in 0..self.grid.my {
            let y = self.grid.y_star(j);
            let idx = self.index(0, j);
            phi.eval_into(y, self.node_by_index_mut(idx));
        }
    }

    fn pin_rows(&mut self, phi: &BoundaryDatum) {
        let (lo, hi) = (phi.eval(0.0), phi.eval(1.0));
        let top = self.grid.my - 1;
        for i in 0..self.grid.mx {
            let a = self.index(i, 0);
            self.node_by_index_mut(a).copy_from_slice(lo.quantiles());
            let b = self.index(i, top);
            self.node_by_index_mut(b).copy_from_slice(hi.quantiles());
        }
    }

    /// Every node pushed forward by the continuous map `h : [0, 1] → [0, 1]`.
    pub fn pushforward(&self, h: impl Fn(f64) -> f64) -> Result<Self> {
        let mut out = self.clone();
        for idx in 0..self.node_count() {
            let node = QuantileDist::repaired(1.0, self.node_by_index(idx).to_vec());
            let image = crate::dist::pushforward_general(&node, &h, 1.0)?;
            out.node_by_index_mut(idx).copy_from_slice(image.quantiles());
        }
        Ok(out)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid || self.k != other.k {
            return Err(Error::Dimension(format!(
                "fields on grids {:?} (K = {}) and {:?} (K = {})",
                self.grid, self.k, other.grid, other.k
            )));
        }
        Ok(())
    }
}

/// Bilinear interpolation of nodal quantile vectors in the coordinates
/// `(√x*, y*)`. Laws spread like `√x*` away from the far-field column, so
/// this is far more accurate there than interpolating linearly in `x*`, and
/// it is still a convex combination of the four corner vectors.
fn interpolate_into(grid: &GridSpec, k: usize, data: &[f64], x_star: f64, y_star: f64, out: &mut [f64]) {
    let s = x_star / grid.hx();
    let (i0, fx) = cell(s, grid.mx);
    let fx = if fx > 0.0 && fx < 1.0 {
        let (a, b) = (libm::sqrt(i0 as f64), libm::sqrt(i0 as f64 + 1.0));
        ((libm::sqrt(s) - a) / (b - a)).clamp(0.0, 1.0)
    } else {
        fx
    };
    let (j0, fy) = cell(y_star / grid.hy(), grid.my);
    let corners = [
        (i0, j0, (1.0 - fx) * (1.0 - fy)),
        (i0 + 1, j0, fx * (1.0 - fy)),
        (i0, j0 + 1, (1.0 - fx) * fy),
        (i0 + 1, j0 + 1, fx * fy),
    ];
    let mut first = true;
    for &(i, j, w) in &corners {
        if w == 0.0 {
            continue;
        }
        let base = (i * grid.my + j) * k;
        let src = &data[base..base + k];
        if first {
            for (o, &v) in out.iter_mut().zip(src) {
                *o = w * v;
            }
            first = false;
        } else {
            for (o, &v) in out.iter_mut().zip(src) {
                *o += w * v;
            }
        }
    }
}

/// Cell index and fraction for a scaled coordinate `s ∈ [0, n - 1]`.
#[inline]
fn cell(s: f64, n: usize) -> (usize, f64) {
    let s = s.clamp(0.0, (n - 1) as f64);
    let i = (libm::floor(s) as usize).min(n - 2);
    let f = (s - i as f64).clamp(0.0, 1.0);
    // snap rounding noise so that on-grid points use a single node
    if f < 1e-12 {
        (i, 0.0)
    } else if f > 1.0 - 1e-12 {
        (i, 1.0)
    } else {
        (i, f)
    }
}

/// Quadrature data of the operator: distinct reinforcement atoms and masses.
struct Quadrature {
    mu: Vec<(f64, f64)>,
    nu: Vec<(f64, f64)>,
}

impl Quadrature {
    fn new(pair: &ReinforcementPair) -> Self {
        Self { mu: pair.mu_atoms(), nu: pair.nu_atoms() }
    }

    fn len(&self) -> usize {
        self.mu.len() + self.nu.len()
    }
}

/// Scratch space for one node update.
struct Workspace {
    comps: Vec<Vec<f64>>,
    weights: Vec<f64>,
    heads: Vec<usize>,
    pooled: Vec<(f64, f64)>,
}

impl Workspace {
    fn new(quad: &Quadrature, k: usize) -> Self {
        Self {
            comps: (0..quad.len()).map(|_| alloc::vec![0.0; k]).collect(),
            weights: Vec::with_capacity(quad.len()),
            heads: Vec::with_capacity(quad.len()),
            pooled: Vec::new(),
        }
    }
}

/// `A*` at one interior node, written into `out`.
fn node_update(src: &SolutionField, quad: &Quadrature, xs: f64, ys: f64, ws: &mut Workspace, out: &mut [f64]) {
    let (grid, k, data) = (&src.grid, src.k, &src.data[..]);
    ws.weights.clear();
    let branches = [(&quad.mu, ys, true), (&quad.nu, 1.0 - ys, false)];
    for (atoms, branch_w, black) in branches {
        if branch_w <= 0.0 {
            continue;
        }
        for &(r, w) in atoms.iter() {
            let den = 1.0 + r * xs;
            let x_next = xs / den;
            let y_next = if black { (ys + r * xs) / den } else { ys / den };
            let c = ws.weights.len();
            interpolate_into(grid, k, data, x_next, y_next, &mut ws.comps[c]);
            ws.weights.push(branch_w * w);
        }
    }
    pool(ws, k, out);
}

/// Mixture of the sorted component vectors, projected by cell averages.
fn pool(ws: &mut Workspace, k: usize, out: &mut [f64]) {
    let n = ws.weights.len();
    let total: f64 = ws.weights.iter().sum();
    if n == 1 {
        out.copy_from_slice(&ws.comps[0]);
        return;
    }
    let inv_k = 1.0 / (k as f64 * total);
    let mut grid = Regridder::new(Regrid::CellAverage, out);
    if n <= 8 {
        ws.heads.clear();
        ws.heads.resize(n, 0);
        loop {
            let mut best = usize::MAX;
            let mut best_v = f64::INFINITY;
            for c in 0..n {
                let h = ws.heads[c];
                if h < k && ws.comps[c][h] < best_v {
                    best_v = ws.comps[c][h];
                    best = c;
                }
            }
            if best == usize::MAX {
                break;
            }
            ws.heads[best] += 1;
            grid.push(best_v, ws.weights[best] * inv_k);
        }
    } else {
        ws.pooled.clear();
        for c in 0..n {
            let w = ws.weights[c] * inv_k;
            ws.pooled.extend(ws.comps[c].iter().map(|&v| (v, w)));
        }
        ws.pooled.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
        for &(v, w) in ws.pooled.iter() {
            grid.push(v, w);
        }
    }
    grid.finish();
}

/// One Jacobi sweep of `A*` from `src` into `dst`. Rows are updated too when
/// `rows` is set; the far-field column never is. Returns the sup over updated
/// nodes of `d_W(dst, src)`.
fn sweep(src: &SolutionField, dst: &mut SolutionField, quad: &Quadrature, rows: bool) -> f64 {
    let grid = src.grid;
    let k = src.k;
    let col_len = grid.my * k;
    let updates = map_chunks_mut(&mut dst.data, col_len, |i, column| {
        if i == 0 {
            return 0.0f64;
        }
        let mut ws = Workspace::new(quad, k);
        let xs = grid.x_star(i);
        let mut sup = 0.0f64;
        for j in 0..grid.my {
            if !rows && !grid.is_interior(i, j) {
                continue;
            }
            let out = &mut column[j * k..(j + 1) * k];
            node_update(src, quad, xs, grid.y_star(j), &mut ws, out);
            repair(out);
            sup = sup.max(quantile_l1(out, src.node(i, j)));
        }
        sup
    });
    updates.into_iter().fold(0.0, f64::max)
}

/// Running maximum clamped to `[0, 1]`.
fn repair(q: &mut [f64]) {
    let mut run = 0.0f64;
    for v in q.iter_mut() {
        run = run.max(v.clamp(0.0, 1.0));
        *v = run;
    }
}

/// One application of `A*`. Boundary rows and the far-field column are left
/// as they are.
pub fn apply_operator(field: &SolutionField, pair: &ReinforcementPair) -> SolutionField {
    let quad = Quadrature::new(pair);
    let mut out = field.clone();
    sweep(field, &mut out, &quad, false);
    out
}

/// Iterates `A*` from the configured starting field until the stop rule
/// holds or `max_iters` sweeps have run. Non-convergence is not an error: the
/// last field is returned with `meta.converged = false`.
pub fn solve(pair: &ReinforcementPair, phi: &BoundaryDatum, cfg: &SolverConfig) -> Result<SolutionField> {
    cfg.check()?;
    if phi.k() != cfg.k {
        return Err(Error::Dimension(format!("boundary K = {} but solver K = {}", phi.k(), cfg.k)));
    }
    let grid = cfg.grid;
    let mut field = match cfg.init {
        Initial::FarField => SolutionField::from_fn(grid, cfg.k, |_, y| Ok(phi.eval(y)))?,
        Initial::Floor => SolutionField::constant(grid, &phi.eval(0.0))?,
    };
    field.pin_column(phi);
    if cfg.pin_axes {
        field.pin_rows(phi);
    }
    let quad = Quadrature::new(pair);
    let mut next = field.clone();
    let mut prev_update = f64::INFINITY;
    let mut iterations = 0;
    let mut update = f64::INFINITY;
    let mut converged = false;
    while iterations < cfg.max_iters {
        update = sweep(&field, &mut next, &quad, !cfg.pin_axes);
        core::mem::swap(&mut field, &mut next);
        iterations += 1;
        if stop_now(cfg, update, prev_update) {
            converged = true;
            break;
        }
        prev_update = update;
    }
    field.meta = FieldMeta {
        pair: String::new(),
        boundary: String::new(),
        iterations,
        final_update: update,
        converged,
    };
    Ok(field)
}

fn stop_now(cfg: &SolverConfig, update: f64, prev: f64) -> bool {
    if update >= cfg.tol_iter {
        return false;
    }
    match cfg.stop {
        StopRule::Update => true,
        StopRule::ErrorEstimate => {
            if update == 0.0 {
                return true;
            }
            let rho = update / prev;
            rho < 1.0 && update * rho / (1.0 - rho) < cfg.tol_iter
        }
    }
}

/// `max` over interior nodes of `d_W(H, A*(H))`; zero exactly at a fixed point.
pub fn residual(field: &SolutionField, pair: &ReinforcementPair) -> f64 {
    let quad = Quadrature::new(pair);
    let mut out = field.clone();
    sweep(field, &mut out, &quad, false)
}

/// `d_n`: sup of nodewise `d_W` over nodes with `x* <= n`, i.e. `x + y >= 1/n`
/// (the axis rows and far-field column included).
pub fn restricted_distance(f1: &SolutionField, f2: &SolutionField, n: f64) -> Result<f64> {
    f1.check_same_shape(f2)?;
    let grid = f1.grid;
    let mut sup = 0.0f64;
    for i in 0..grid.mx {
        if grid.x_star(i) > n * (1.0 + 1e-12) {
            break;
        }
        for j in 0..grid.my {
            sup = sup.max(quantile_l1(f1.node(i, j), f2.node(i, j)));
        }
    }
    Ok(sup)
}

/// `d = Σ_{n=1}^{⌊x*_max⌋} 2^{-n} d_n / (1 + d_n)`.
pub fn field_distance(f1: &SolutionField, f2: &SolutionField) -> Result<f64> {
    f1.check_same_shape(f2)?;
    let n_max = libm::floor(f1.grid.x_star_max) as u32;
    let mut total = 0.0;
    for n in 1..=n_max {
        let dn = restricted_distance(f1, f2, n as f64)?;
        total += libm::ldexp(dn / (1.0 + dn), -(n as i32));
    }
    Ok(total)
}

/// `G^φ = Ψ_φ(G^δ)` from a canonical (`φ = δ`) field.
pub fn compose_general(canonical: &SolutionField, phi: &BoundaryDatum) -> Result<SolutionField> {
    crate::boundary::psi_map(phi, canonical)
}

#[cfg(feature = "serde")]
mod repr {
    use alloc::format;
    use alloc::vec::Vec;

    use serde::{Deserialize, Serialize};

    use super::{FieldMeta, GridSpec, SolutionField};
    use crate::dist::QuantileDist;
    use crate::error::Error;

    /// Wire form: grid, `K`, meta and one quantile vector per node in
    /// `i * my + j` order.
    #[derive(Serialize, Deserialize)]
    pub(super) struct FieldRepr {
        grid: GridSpec,
        #[serde(rename = "K")]
        k: usize,
        meta: FieldMeta,
        nodes: Vec<Vec<f64>>,
    }

    impl TryFrom<FieldRepr> for SolutionField {
        type Error = Error;

        fn try_from(r: FieldRepr) -> Result<Self, Error> {
            r.grid.check()?;
            let count = r.grid.mx * r.grid.my;
            if r.nodes.len() != count {
                return Err(Error::Input(format!("grid has {count} nodes but {} given", r.nodes.len())));
            }
            let mut data = Vec::with_capacity(count * r.k);
            for (idx, q) in r.nodes.into_iter().enumerate() {
                if q.len() != r.k {
                    return Err(Error::Input(format!("node {idx} has {} quantiles, expected {}", q.len(), r.k)));
                }
                data.extend(QuantileDist::new(1.0, q)?.into_quantiles());
            }
            Ok(SolutionField { grid: r.grid, k: r.k, data, meta: r.meta })
        }
    }

    impl From<SolutionField> for FieldRepr {
        fn from(f: SolutionField) -> Self {
            let nodes = f.data.chunks(f.k).map(<[f64]>::to_vec).collect();
            Self { grid: f.grid, k: f.k, meta: f.meta, nodes }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::wasserstein;

    const K: usize = 32;

    fn small() -> GridSpec {
        GridSpec::new(33, 33, 4.0).unwrap()
    }

    fn polya() -> ReinforcementPair {
        let one = QuantileDist::point_mass(1.0, 1.0, K).unwrap();
        ReinforcementPair::validate(one.clone(), one, 1.0, 0.5).unwrap()
    }

    #[test]
    fn star_transform_examples() {
        assert_eq!(to_star(1.0, 1.0).unwrap(), (0.5, 0.5));
        assert_eq!(to_star(4.0, 0.0).unwrap(), (0.25, 1.0));
        assert!(to_star(0.0, 0.0).is_err());
        assert_eq!(from_star(0.5, 0.5).unwrap(), (1.0, 1.0));
        assert_eq!(from_star(1.0, 1.0).unwrap(), (1.0, 0.0));
        let (x, y) = from_star(0.25, 0.2).unwrap();
        assert!((x - 0.8).abs() < 1e-15 && (y - 3.2).abs() < 1e-15);
        assert!(from_star(0.0, 0.3).is_err());
        // far field along a fixed direction
        let (xs, ys) = to_star(0.3e12, 0.7e12).unwrap();
        assert!(xs < 1e-11 && (ys - 0.3).abs() < 1e-15);
        for &(x, y) in &[(0.1, 7.0), (3.0, 0.5), (2.0, 2.0)] {
            let (xs, ys) = to_star(x, y).unwrap();
            let (bx, by) = from_star(xs, ys).unwrap();
            assert!((bx - x).abs() < 1e-12 && (by - y).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_field_is_fixed() {
        let xi = crate::closed_form::beta_quantile_dist(2.0, 3.0, K).unwrap();
        let f = SolutionField::constant(small(), &xi).unwrap();
        assert!(residual(&f, &polya()) <= 1e-12);
        let phi = BoundaryDatum::constant(&xi, 11).unwrap();
        let cfg = SolverConfig { grid: small(), k: K, ..SolverConfig::default() };
        let solved = solve(&polya(), &phi, &cfg).unwrap();
        assert!(solved.meta().converged);
        assert_eq!(solved.meta().iterations, 1);
    }

    #[test]
    fn first_step_from_the_initial_field() {
        let grid = GridSpec::new(17, 17, 2.0).unwrap();
        let phi = BoundaryDatum::delta(101, K).unwrap();
        let h0 = SolutionField::from_fn(grid, K, |_, y| Ok(phi.eval(y))).unwrap();
        let a = apply_operator(&h0, &polya());
        let got = a.evaluate(1.0, 1.0).unwrap();
        let third = QuantileDist::point_mass(1.0 / 3.0, 1.0, K).unwrap();
        let two_thirds = QuantileDist::point_mass(2.0 / 3.0, 1.0, K).unwrap();
        let want = crate::dist::mixture(&[(0.5, &third), (0.5, &two_thirds)]).unwrap();
        assert!(wasserstein(&got, &want).unwrap() < 1e-12);
        // d_W(δ_{1/2}, ½δ_{1/3} + ½δ_{2/3}) = 1/6 at (1, 1); farther nodes move more
        assert!(residual(&h0, &polya()) >= 1.0 / 6.0 - 1e-12);
    }

    #[test]
    fn boundary_is_pinned_after_solve() {
        let phi = BoundaryDatum::power(2.0, 101, K).unwrap();
        let cfg = SolverConfig { grid: small(), k: K, max_iters: 5, ..SolverConfig::default() };
        let f = solve(&polya(), &phi, &cfg).unwrap();
        let g = *f.grid();
        for i in 0..g.mx {
            assert_eq!(f.node(i, 0), phi.eval(0.0).quantiles());
            assert_eq!(f.node(i, g.my - 1), phi.eval(1.0).quantiles());
        }
        for j in 0..g.my {
            assert_eq!(f.node(0, j), phi.eval(g.y_star(j)).quantiles());
        }
        assert!(!f.meta().converged);
        assert_eq!(f.meta().iterations, 5);
    }

    #[test]
    fn distances_examples() {
        let xi = crate::closed_form::beta_quantile_dist(2.0, 3.0, K).unwrap();
        let f = SolutionField::constant(small(), &xi).unwrap();
        assert_eq!(field_distance(&f, &f).unwrap(), 0.0);
        let mut g = f.clone();
        // x* = 3.5 is seen by d_4 but not by d_1, d_2, d_3
        g.set_node(28, 10, &QuantileDist::point_mass(1.0, 1.0, K).unwrap()).unwrap();
        assert_eq!(restricted_distance(&f, &g, 3.0).unwrap(), 0.0);
        let d4 = restricted_distance(&f, &g, 4.0).unwrap();
        assert!(d4 > 0.0);
        let d = field_distance(&f, &g).unwrap();
        assert!((d - d4 / (1.0 + d4) / 16.0).abs() < 1e-15);
        let other = SolutionField::constant(GridSpec::new(9, 9, 4.0).unwrap(), &xi).unwrap();
        assert!(matches!(field_distance(&f, &other), Err(Error::Dimension(_))));
    }

    #[test]
    fn evaluate_off_grid_edge_is_an_error() {
        let xi = QuantileDist::point_mass(0.5, 1.0, K).unwrap();
        let f = SolutionField::constant(small(), &xi).unwrap();
        assert!(f.evaluate(0.1, 0.1).is_err());
        assert_eq!(f.evaluate(0.2, 0.05).unwrap(), xi);
    }

    #[test]
    fn cell_snaps_rounding_noise() {
        assert_eq!(cell(3.0 + 1e-14, 10), (3, 0.0));
        assert_eq!(cell(9.0, 10), (8, 1.0));
        assert_eq!(cell(-1.0, 10), (0, 0.0));
        let (i, f) = cell(2.5, 10);
        assert_eq!((i, f), (2, 0.5));
    }
}
