//! Rate functional, normalizers and the diagnostics attached to them.

use std::fmt;

use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::model::{RateModel, ScalingScheme, TargetFunction};

pub const DEFAULT_PANELS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LdpError {
    #[error("phi(T) = {phi} must exceed 1 for Theta(T)")]
    PhiNotAboveOne { phi: f64 },
    #[error("quadrature needs a positive even panel count, got {0}")]
    OddPanels(usize),
    #[error("decomposition input: {0}")]
    BadNodes(String),
    #[error("partition: {0}")]
    BadPartition(String),
    #[error("no uniform partition with at most {0} cells meets the increment bound")]
    PartitionTooFine(usize),
}

/// Composite Simpson rule on a fixed number of panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    panels: usize,
}

impl QuadratureSpec {
    pub fn new(panels: usize) -> Result<Self, LdpError> {
        if panels == 0 || panels % 2 != 0 {
            return Err(LdpError::OddPanels(panels));
        }
        Ok(QuadratureSpec { panels })
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn integrate(&self, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> f64 {
        let n = self.panels;
        let h = (hi - lo) / n as f64;
        let mut odd = 0.0;
        let mut even = 0.0;
        for i in 1..n {
            let v = g(lo + i as f64 * h);
            if i % 2 == 1 {
                odd += v;
            } else {
                even += v;
            }
        }
        h / 3.0 * (g(lo) + g(hi) + 4.0 * odd + 2.0 * even)
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            panels: DEFAULT_PANELS,
        }
    }
}

/// `I(f) = ∫₀¹ f(t)^exponent dt` with `exponent = l ∨ m`.
///
/// Simpson's rule is applied after the substitution `t = s⁴`. Integrands
/// such as `t^r` with small `r` have unbounded derivatives at 0, where plain
/// Simpson converges only like `h^{1+r}`; after the substitution the
/// integrand `4s³·f(s⁴)^exponent` is smooth enough for the usual rate.
pub fn rate_functional(f: &TargetFunction, exponent: f64, quad: QuadratureSpec) -> f64 {
    quad.integrate(0.0, 1.0, |s| {
        let s2 = s * s;
        4.0 * s2 * s * f.value(s2 * s2).max(0.0).powf(exponent)
    })
}

/// Richardson estimate of the Simpson error, `|S_n − S_{n/2}| / 15`.
/// Zero when `n/2` is odd and no coarser Simpson rule exists.
pub fn rate_functional_error(f: &TargetFunction, exponent: f64, quad: QuadratureSpec) -> f64 {
    let fine = rate_functional(f, exponent, quad);
    match QuadratureSpec::new(quad.panels() / 2) {
        Ok(coarse) => (fine - rate_functional(f, exponent, coarse)).abs() / 15.0,
        Err(_) => 0.0,
    }
}

/// `ψ(T) = T·V(φ(T))`.
pub fn normalizer_psi(scheme: &ScalingScheme, model: &RateModel, horizon: f64) -> f64 {
    horizon * model.eval_v(scheme.phi(horizon))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiVerdict {
    /// `l ∨ m > 1` and `φ → ∞`, which suffices.
    HoldsShortcut,
    /// Ratios decrease over the tail half of the grid and drop tenfold.
    HoldsNumerical,
    NotHolding,
    InsufficientGrid,
}

impl PhiVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, PhiVerdict::HoldsShortcut | PhiVerdict::HoldsNumerical)
    }
}

impl fmt::Display for PhiVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhiVerdict::HoldsShortcut => "holds (shortcut: l∨m>1)",
            PhiVerdict::HoldsNumerical => "holds (numerical)",
            PhiVerdict::NotHolding => "does not hold (numerical)",
            PhiVerdict::InsufficientGrid => "insufficient grid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiConditionRow {
    pub horizon: f64,
    pub phi: f64,
    pub v: f64,
    pub psi: f64,
    /// `φ·ln φ / (T·V(φ))`.
    pub ratio: f64,
    /// Rows with `φ(T) ≤ 1` are flagged and left out of the verdict.
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiConditionReport {
    pub rows: Vec<PhiConditionRow>,
    pub shortcut: bool,
    pub verdict: PhiVerdict,
}

/// Evaluates `r(T) = φ(T)·ln φ(T) / (T·V(φ(T)))` on `grid` for a model.
pub fn check_phi_condition(scheme: &ScalingScheme, model: &RateModel, grid: &[f64]) -> PhiConditionReport {
    check_phi_condition_with(scheme, model.max_exponent(), |x| model.eval_v(x), grid)
}

/// As [`check_phi_condition`] with an arbitrary `V`.
///
/// The verdict is a numerical heuristic except for the `l ∨ m > 1` shortcut.
pub fn check_phi_condition_with(
    scheme: &ScalingScheme,
    max_exponent: f64,
    v: impl Fn(f64) -> f64,
    grid: &[f64],
) -> PhiConditionReport {
    let rows: Vec<PhiConditionRow> = grid
        .iter()
        .map(|&horizon| {
            let phi = scheme.phi(horizon);
            let vv = v(phi);
            PhiConditionRow {
                horizon,
                phi,
                v: vv,
                psi: horizon * vv,
                ratio: phi * phi.ln() / (horizon * vv),
                flagged: phi <= 1.0,
            }
        })
        .collect();
    let shortcut = max_exponent > 1.0;
    let verdict = if shortcut {
        PhiVerdict::HoldsShortcut
    } else {
        let usable: Vec<f64> = rows.iter().filter(|r| !r.flagged).map(|r| r.ratio).collect();
        let tail = &usable[usable.len().saturating_sub(1) / 2..];
        if usable.len() < 2 || tail.len() < 2 {
            PhiVerdict::InsufficientGrid
        } else if tail.windows(2).all(|w| w[1] < w[0]) && tail[tail.len() - 1] < tail[0] / 10.0 {
            PhiVerdict::HoldsNumerical
        } else {
            PhiVerdict::NotHolding
        }
    };
    PhiConditionReport {
        rows,
        shortcut,
        verdict,
    }
}

/// `δ(ε) = sup{t ∈ [0, 1] : f(t) < 2ε}` located on a grid of `resolution`
/// points, then refined by bisection against the next grid point.
pub fn delta_of_eps(f: &TargetFunction, epsilon: f64, resolution: usize) -> f64 {
    let res = resolution.max(2);
    let level = 2.0 * epsilon;
    let grid = |i: usize| i as f64 / (res - 1) as f64;
    let last = (0..res).rev().find(|&i| f.value(grid(i)) < level);
    let Some(k) = last else {
        return 0.0;
    };
    if k == res - 1 {
        return 1.0;
    }
    let (mut lo, mut hi) = (grid(k), grid(k + 1));
    for _ in 0..64 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.value(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// `Θ(T) = √(T·V(φ)·φ / ln φ)`.
pub fn theta_threshold(scheme: &ScalingScheme, model: &RateModel, horizon: f64) -> Result<f64, LdpError> {
    let phi = scheme.phi(horizon);
    theta_from_parts(horizon, phi, model.eval_v(phi))
}

pub fn theta_from_parts(horizon: f64, phi: f64, v: f64) -> Result<f64, LdpError> {
    if !(phi > 1.0) {
        return Err(LdpError::PhiNotAboveOne { phi });
    }
    Ok((horizon * v * phi / phi.ln()).sqrt())
}

/// `g = g₊ − g₋` with both parts nondecreasing, stored at the nodes of a
/// piecewise-linear `g` and interpolated linearly between them.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneDecomposition {
    times: Vec<f64>,
    plus: Vec<f64>,
    minus: Vec<f64>,
}

impl MonotoneDecomposition {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn plus(&self) -> &[f64] {
        &self.plus
    }

    pub fn minus(&self) -> &[f64] {
        &self.minus
    }

    /// `C₁ = g₊(1)`.
    pub fn c_plus(&self) -> f64 {
        *self.plus.last().unwrap()
    }

    /// `C₂ = g₋(1)`.
    pub fn c_minus(&self) -> f64 {
        *self.minus.last().unwrap()
    }

    /// `C = C₁ + C₂`, the total variation.
    pub fn total_variation(&self) -> f64 {
        self.c_plus() + self.c_minus()
    }

    pub fn eval_plus(&self, t: f64) -> f64 {
        lerp_at(&self.times, &self.plus, t)
    }

    pub fn eval_minus(&self, t: f64) -> f64 {
        lerp_at(&self.times, &self.minus, t)
    }
}

fn lerp_at(times: &[f64], values: &[f64], t: f64) -> f64 {
    let i = times.partition_point(|&s| s <= t);
    if i == 0 {
        return values[0];
    }
    if i == times.len() {
        return values[values.len() - 1];
    }
    let (t0, t1) = (times[i - 1], times[i]);
    values[i - 1] + (values[i] - values[i - 1]) * (t - t0) / (t1 - t0)
}

/// Splits a piecewise-linear `g` with `g(0) = 0` into its positive and
/// negative variations.
pub fn decompose_bv(nodes: &[(f64, f64)]) -> Result<MonotoneDecomposition, LdpError> {
    if nodes.len() < 2 {
        return Err(LdpError::BadNodes("at least two nodes are required".into()));
    }
    if nodes[0].1 != 0.0 {
        return Err(LdpError::BadNodes(format!("g(0) must be 0, got {}", nodes[0].1)));
    }
    if nodes.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(LdpError::BadNodes("node times must be strictly increasing".into()));
    }
    let mut plus = Vec::with_capacity(nodes.len());
    let mut minus = Vec::with_capacity(nodes.len());
    plus.push(0.0);
    minus.push(0.0);
    // Each step moves one part and pins the other, so the moving part is
    // recovered from g itself rather than from a running sum of increments.
    for w in nodes.windows(2) {
        let (p, m) = (*plus.last().unwrap(), *minus.last().unwrap());
        if w[1].1 >= w[0].1 {
            plus.push((w[1].1 + m).max(p));
            minus.push(m);
        } else {
            plus.push(p);
            minus.push((p - w[1].1).max(m));
        }
    }
    Ok(MonotoneDecomposition {
        times: nodes.iter().map(|n| n.0).collect(),
        plus,
        minus,
    })
}

/// Piecewise-linear interpolant of `f` on a uniform mesh fine enough that
/// `sup|f − g| < tolerance`, checked at the mesh midpoints and on a
/// `check_resolution` grid. Piecewise-linear targets are returned as is.
pub fn interpolate_target(f: &TargetFunction, tolerance: f64, check_resolution: usize) -> Vec<(f64, f64)> {
    if let TargetFunction::PiecewiseLinear { nodes } = f {
        return nodes.clone();
    }
    let mut cells = 8usize;
    loop {
        let nodes: Vec<(f64, f64)> = (0..=cells)
            .map(|i| {
                let t = i as f64 / cells as f64;
                (t, f.value(t))
            })
            .collect();
        let g = TargetFunction::PiecewiseLinear { nodes };
        let res = check_resolution.max(2);
        let grid_err = (0..res)
            .map(|i| i as f64 / (res - 1) as f64)
            .chain((0..cells).map(|i| (i as f64 + 0.5) / cells as f64))
            .map(|t| (f.value(t) - g.value(t)).abs())
            .fold(0.0f64, f64::max);
        if grid_err < tolerance || cells >= 1 << 20 {
            let TargetFunction::PiecewiseLinear { nodes } = g else {
                unreachable!()
            };
            return nodes;
        }
        cells *= 2;
    }
}

/// Smallest uniform partition of `[0, 1]` whose cells carry increments of
/// `g₊` and of `g₋` strictly below `epsilon / 8`.
pub fn default_partition(decomp: &MonotoneDecomposition, epsilon: f64) -> Result<Vec<f64>, LdpError> {
    const MAX_CELLS: usize = 1 << 22;
    let bound = epsilon / 8.0;
    let largest = decomp.c_plus().max(decomp.c_minus());
    let mut cells = ((largest / bound).floor() as usize + 1).max(1);
    while cells <= MAX_CELLS {
        let partition: Vec<f64> = (0..=cells).map(|i| i as f64 / cells as f64).collect();
        let ok = partition.windows(2).all(|w| {
            decomp.eval_plus(w[1]) - decomp.eval_plus(w[0]) < bound
                && decomp.eval_minus(w[1]) - decomp.eval_minus(w[0]) < bound
        });
        if ok {
            return Ok(partition);
        }
        cells = cells + cells / 4 + 1;
    }
    Err(LdpError::PartitionTooFine(MAX_CELLS))
}

/// `ln P₁`, `ln P₂` of the Poisson product bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonLowerBound {
    pub log_plus: f64,
    pub log_minus: f64,
}

impl PoissonLowerBound {
    /// `ln(P₁·P₂)`.
    pub fn total(&self) -> f64 {
        self.log_plus + self.log_minus
    }
}

/// `ln pmf(k; mean)` of a Poisson law.
pub fn log_poisson_pmf(k: u64, mean: f64) -> f64 {
    if mean == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    -mean + k as f64 * mean.ln() - ln_gamma(k as f64 + 1.0)
}

/// Product of Poisson probabilities that each half of the reference walk
/// (rate 1/2 each) makes exactly `⌊Δg·φ⌋` jumps on every partition cell
/// `[T·t_{i−1}, T·t_i]`, evaluated in the log domain.
pub fn poisson_tube_lower_bound(
    decomp: &MonotoneDecomposition,
    horizon: f64,
    phi: f64,
    partition: &[f64],
) -> Result<PoissonLowerBound, LdpError> {
    if partition.len() < 2 || partition[0] != 0.0 || partition[partition.len() - 1] != 1.0 {
        return Err(LdpError::BadPartition("must run from 0 to 1".into()));
    }
    if partition.windows(2).any(|w| w[1] <= w[0]) {
        return Err(LdpError::BadPartition("points must be strictly increasing".into()));
    }
    let mut log_plus = 0.0;
    let mut log_minus = 0.0;
    for w in partition.windows(2) {
        let mean = horizon * (w[1] - w[0]) / 2.0;
        let k_plus = ((decomp.eval_plus(w[1]) - decomp.eval_plus(w[0])) * phi).floor().max(0.0) as u64;
        let k_minus = ((decomp.eval_minus(w[1]) - decomp.eval_minus(w[0])) * phi).floor().max(0.0) as u64;
        log_plus += log_poisson_pmf(k_plus, mean);
        log_minus += log_poisson_pmf(k_minus, mean);
    }
    Ok(PoissonLowerBound { log_plus, log_minus })
}
