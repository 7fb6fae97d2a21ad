//! Monte Carlo estimators of path-event probabilities.
//!
//! Three estimators target the same quantity `P(ξ ∈ G, N_T ≤ max_jumps)`:
//!
//! * `direct` samples `ξ` and counts hits;
//! * `is-reference` samples the reference walk `ζ` and weighs each hit by
//!   the exact density `p(ζ)`;
//! * `is-guided` samples a [`GuidedProposal`] and weighs by
//!   `p(u) / (dQ/dζ)(u)`.
//!
//! Sample `i` always draws from stream `(seed', i)`, where `seed'` mixes
//! the user seed with the method. Work is cut into fixed chunks of sample
//! indices and the chunk accumulators are reduced in index order, so a
//! result does not depend on the number of worker threads.

use std::fmt;
use std::ops::Range;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ldp::{normalizer_psi, rate_functional, QuadratureSpec};
use crate::model::{RateModel, ScalingScheme, TargetFunction};
use crate::pathspace::{log_density, JumpPath, Tube};
use crate::sim::{
    sample_bdp_capped, sample_reference_walk, GuideError, GuidedProposal, RngStream, SampleStatus,
    DEFAULT_GUIDE_CELLS, DEFAULT_MAX_JUMPS,
};

const CHUNK: u64 = 1024;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimateError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("cannot merge an empty batch list")]
    EmptyMerge,
    #[error("cannot merge batches from different configurations ({0} vs {1})")]
    MixedBatches(String, String),
    #[error("sweep horizons must be positive and ascending")]
    BadHorizons,
    #[error(transparent)]
    Guide(#[from] GuideError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Direct,
    IsReference,
    IsGuided,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::IsReference => "is-reference",
            Method::IsGuided => "is-guided",
        }
    }

    fn salt(&self) -> u64 {
        match self {
            Method::Direct => 0x0d1e_c7d1_e5c7_0001,
            Method::IsReference => 0x0e0f_5e5e_c7ed_0002,
            Method::IsGuided => 0x96ed_ed96_1ded_0003,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Method::Direct),
            "is-reference" => Ok(Method::IsReference),
            "is-guided" => Ok(Method::IsGuided),
            other => Err(format!("unknown method '{other}'")),
        }
    }
}

/// A measurable set of paths on `[0, T]`.
pub trait PathEvent: Sync {
    fn contains(&self, path: &JumpPath) -> bool;

    /// A state that no path in the event reaches, if one is known. Direct
    /// sampling abandons a path as soon as it gets there.
    fn state_ceiling(&self) -> Option<u64> {
        None
    }
}

impl PathEvent for Tube {
    fn contains(&self, path: &JumpPath) -> bool {
        Tube::contains(self, path)
    }

    fn state_ceiling(&self) -> Option<u64> {
        Some(Tube::state_ceiling(self))
    }
}

/// Every path.
#[derive(Debug, Clone, Copy, Default)]
pub struct AllPaths;

impl PathEvent for AllPaths {
    fn contains(&self, _path: &JumpPath) -> bool {
        true
    }
}

/// Event given by a predicate.
pub struct EventFn<F>(pub F);

impl<F: Fn(&JumpPath) -> bool + Sync> PathEvent for EventFn<F> {
    fn contains(&self, path: &JumpPath) -> bool {
        (self.0)(path)
    }
}

/// Tube event intersected with a bound on the jump count.
pub struct WithJumpLimit<E> {
    pub event: E,
    pub max_jumps: usize,
}

impl<E: PathEvent> PathEvent for WithJumpLimit<E> {
    fn contains(&self, path: &JumpPath) -> bool {
        path.n_jumps() <= self.max_jumps && self.event.contains(path)
    }

    fn state_ceiling(&self) -> Option<u64> {
        self.event.state_ceiling()
    }
}

/// Outcome of one sample as seen by an accumulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    /// Outside the event, or zero density.
    Miss,
    /// Jump cap reached; scored as zero.
    Truncated,
    /// In the event with the given log-weight (possibly `-∞`).
    LogWeight(f64),
}

/// Running sums of importance weights kept relative to a max-shift.
///
/// Weights are stored as `Σ exp(lw − shift)` and `Σ exp(2(lw − shift))`;
/// the shift is raised (and the sums rescaled) whenever a larger log-weight
/// arrives.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightAccumulator {
    method: Method,
    key: u64,
    n: u64,
    hits: u64,
    truncated: u64,
    shift: f64,
    sum: f64,
    sum_sq: f64,
}

impl WeightAccumulator {
    pub fn new(method: Method, key: u64) -> Self {
        WeightAccumulator {
            method,
            key,
            n: 0,
            hits: 0,
            truncated: 0,
            shift: f64::NEG_INFINITY,
            sum: 0.0,
            sum_sq: 0.0,
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn push(&mut self, score: Score) {
        self.n += 1;
        match score {
            Score::Miss => {}
            Score::Truncated => self.truncated += 1,
            Score::LogWeight(lw) => self.add_log_weight(lw),
        }
    }

    fn add_log_weight(&mut self, lw: f64) {
        if lw == f64::NEG_INFINITY {
            return;
        }
        self.hits += 1;
        if lw > self.shift {
            self.rescale(lw);
        }
        let x = (lw - self.shift).exp();
        self.sum += x;
        self.sum_sq += x * x;
    }

    fn rescale(&mut self, shift: f64) {
        if self.shift != f64::NEG_INFINITY {
            let r = (self.shift - shift).exp();
            self.sum *= r;
            self.sum_sq *= r * r;
        }
        self.shift = shift;
    }

    /// Folds `other` into `self`. Both must come from the same configuration.
    pub fn merge(&mut self, other: &WeightAccumulator) -> Result<(), EstimateError> {
        if self.method != other.method || self.key != other.key {
            return Err(EstimateError::MixedBatches(
                format!("{}#{:016x}", self.method, self.key),
                format!("{}#{:016x}", other.method, other.key),
            ));
        }
        self.n += other.n;
        self.hits += other.hits;
        self.truncated += other.truncated;
        if other.shift == f64::NEG_INFINITY {
            return Ok(());
        }
        if other.shift > self.shift {
            self.rescale(other.shift);
        }
        let r = (other.shift - self.shift).exp();
        self.sum += other.sum * r;
        self.sum_sq += other.sum_sq * r * r;
        Ok(())
    }

    pub fn to_record(&self) -> EstimateRecord {
        let n = self.n as f64;
        let (p_hat, log_p_hat) = if self.sum > 0.0 && self.n > 0 {
            (self.shift.exp() * self.sum / n, self.shift + self.sum.ln() - n.ln())
        } else {
            (0.0, f64::NEG_INFINITY)
        };
        // Spread of the shifted weights; the relative error is formed before
        // undoing the shift so it survives when exp(shift) underflows.
        let (stderr, stderr_log) = match self.method {
            Method::Direct if self.n > 0 => {
                let se = (p_hat * (1.0 - p_hat) / n).max(0.0).sqrt();
                (se, if p_hat > 0.0 { se / p_hat } else { f64::NAN })
            }
            _ if self.n > 1 && self.sum > 0.0 => {
                let var = (self.sum_sq - self.sum * self.sum / n).max(0.0) / (n - 1.0);
                let shifted = (var / n).sqrt();
                (self.shift.exp() * shifted, shifted / (self.sum / n))
            }
            _ if self.sum > 0.0 => (0.0, 0.0),
            _ => (0.0, f64::NAN),
        };
        let ess = if self.sum_sq > 0.0 {
            self.sum * self.sum / self.sum_sq
        } else {
            0.0
        };
        EstimateRecord {
            method: self.method,
            p_hat,
            log_p_hat,
            stderr,
            stderr_log,
            n: self.n,
            hits: self.hits,
            truncated: self.truncated,
            ess,
        }
    }
}

/// Result of a Monte Carlo run.
///
/// Equality is bitwise on the floating-point fields, so two runs compare
/// equal exactly when they produced the same bits (including `NaN`).
#[derive(Debug, Clone)]
pub struct EstimateRecord {
    pub method: Method,
    pub p_hat: f64,
    /// `ln p_hat`, or `-∞` when no sample carried weight.
    pub log_p_hat: f64,
    pub stderr: f64,
    /// Delta-method standard error of `ln p_hat`, `NaN` without hits.
    pub stderr_log: f64,
    pub n: u64,
    pub hits: u64,
    pub truncated: u64,
    /// `(Σw)² / Σw²`.
    pub ess: f64,
}

impl PartialEq for EstimateRecord {
    fn eq(&self, other: &Self) -> bool {
        let floats = |r: &EstimateRecord| {
            [r.p_hat, r.log_p_hat, r.stderr, r.stderr_log, r.ess].map(f64::to_bits)
        };
        self.method == other.method
            && (self.n, self.hits, self.truncated) == (other.n, other.hits, other.truncated)
            && floats(self) == floats(other)
    }
}

impl EstimateRecord {
    /// `|a − b| / √(se_a² + se_b²)`.
    pub fn z_score(&self, other: &EstimateRecord) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        let diff = (self.p_hat - other.p_hat).abs();
        if se == 0.0 {
            if diff == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            diff / se
        }
    }
}

/// Merges batch accumulators in the given order.
pub fn merge_batches(batches: &[WeightAccumulator]) -> Result<EstimateRecord, EstimateError> {
    let (first, rest) = batches.split_first().ok_or(EstimateError::EmptyMerge)?;
    let mut acc = first.clone();
    for b in rest {
        acc.merge(b)?;
    }
    Ok(acc.to_record())
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The stream seed a method uses for a user seed.
pub fn method_seed(seed: u64, method: Method) -> u64 {
    splitmix64(seed ^ method.salt())
}

/// FNV-1a over a textual description of a configuration.
pub fn config_key(description: &str) -> u64 {
    description.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Scores samples `range` in parallel and reduces them in index order.
pub fn accumulate<F>(method: Method, key: u64, seed: u64, range: Range<u64>, score: F) -> WeightAccumulator
where
    F: Fn(&mut ChaCha8Rng) -> Score + Sync,
{
    let stream_seed = method_seed(seed, method);
    let mut bounds = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = ((lo / CHUNK + 1) * CHUNK).min(range.end);
        bounds.push((lo, hi));
        lo = hi;
    }
    let parts: Vec<WeightAccumulator> = bounds
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut acc = WeightAccumulator::new(method, key);
            for i in lo..hi {
                let mut rng = RngStream::new(stream_seed, i).rng();
                acc.push(score(&mut rng));
            }
            acc
        })
        .collect();
    let mut total = WeightAccumulator::new(method, key);
    for part in &parts {
        total.merge(part).expect("chunks share one configuration");
    }
    total
}

/// Monte Carlo sizing shared by all estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McOptions {
    pub n: u64,
    pub seed: u64,
    pub max_jumps: usize,
}

impl McOptions {
    pub fn new(n: u64, seed: u64) -> Self {
        McOptions {
            n,
            seed,
            max_jumps: DEFAULT_MAX_JUMPS,
        }
    }

    pub fn with_max_jumps(mut self, max_jumps: usize) -> Self {
        self.max_jumps = max_jumps;
        self
    }
}

/// Guided proposal settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuideOptions {
    pub base_intensity: f64,
    pub cells: usize,
}

impl Default for GuideOptions {
    fn default() -> Self {
        GuideOptions {
            base_intensity: 1.0,
            cells: DEFAULT_GUIDE_CELLS,
        }
    }
}

pub fn score_direct<E: PathEvent + ?Sized>(
    model: &RateModel,
    horizon: f64,
    event: &E,
    rng: &mut ChaCha8Rng,
    max_jumps: usize,
) -> Score {
    let out = sample_bdp_capped(model, horizon, rng, max_jumps, event.state_ceiling());
    match out.status {
        SampleStatus::Truncated => Score::Truncated,
        SampleStatus::Abandoned => Score::Miss,
        SampleStatus::Complete if event.contains(&out.path) => Score::LogWeight(0.0),
        SampleStatus::Complete => Score::Miss,
    }
}

pub fn score_reference<E: PathEvent + ?Sized>(
    model: &RateModel,
    horizon: f64,
    event: &E,
    rng: &mut ChaCha8Rng,
    max_jumps: usize,
) -> Score {
    let out = sample_reference_walk(horizon, rng, max_jumps);
    if out.status == SampleStatus::Truncated {
        return Score::Truncated;
    }
    if !event.contains(&out.path) {
        return Score::Miss;
    }
    Score::LogWeight(log_density(&out.path, model))
}

pub fn score_guided<E: PathEvent + ?Sized>(
    model: &RateModel,
    proposal: &GuidedProposal,
    event: &E,
    rng: &mut ChaCha8Rng,
    max_jumps: usize,
) -> Score {
    let out = proposal.sample(rng, max_jumps);
    if out.status == SampleStatus::Truncated {
        return Score::Truncated;
    }
    if !event.contains(&out.path) {
        return Score::Miss;
    }
    Score::LogWeight(log_density(&out.path, model) - out.log_proposal_offset)
}

/// Direct estimate of `P(ξ ∈ event)` over samples `range`.
pub fn accumulate_direct<E: PathEvent + ?Sized>(
    model: &RateModel,
    horizon: f64,
    event: &E,
    key: u64,
    opts: McOptions,
    range: Range<u64>,
) -> WeightAccumulator {
    accumulate(Method::Direct, key, opts.seed, range, |rng| {
        score_direct(model, horizon, event, rng, opts.max_jumps)
    })
}

pub fn accumulate_is_reference<E: PathEvent + ?Sized>(
    model: &RateModel,
    horizon: f64,
    event: &E,
    key: u64,
    opts: McOptions,
    range: Range<u64>,
) -> WeightAccumulator {
    accumulate(Method::IsReference, key, opts.seed, range, |rng| {
        score_reference(model, horizon, event, rng, opts.max_jumps)
    })
}

pub fn accumulate_is_guided<E: PathEvent + ?Sized>(
    model: &RateModel,
    proposal: &GuidedProposal,
    event: &E,
    key: u64,
    opts: McOptions,
    range: Range<u64>,
) -> WeightAccumulator {
    accumulate(Method::IsGuided, key, opts.seed, range, |rng| {
        score_guided(model, proposal, event, rng, opts.max_jumps)
    })
}

/// Frequency of `event` under the reference walk itself (unit weights).
pub fn reference_frequency<E: PathEvent + ?Sized>(horizon: f64, event: &E, opts: McOptions) -> EstimateRecord {
    let key = config_key(&format!("reference-frequency T={horizon}"));
    accumulate(Method::Direct, key, opts.seed, 0..opts.n, |rng| {
        let out = sample_reference_walk(horizon, rng, opts.max_jumps);
        match out.status {
            SampleStatus::Truncated => Score::Truncated,
            _ if event.contains(&out.path) => Score::LogWeight(0.0),
            _ => Score::Miss,
        }
    })
    .to_record()
}

/// A tube-probability problem `P(ξ_{φ,T} ∈ U_ε(f))`.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeProblem {
    pub model: RateModel,
    pub scheme: ScalingScheme,
    pub target: TargetFunction,
    pub epsilon: f64,
    pub horizon: f64,
}

impl TubeProblem {
    pub fn phi(&self) -> f64 {
        self.scheme.phi(self.horizon)
    }

    pub fn tube(&self) -> Tube {
        Tube::new(self.target.clone(), self.phi(), self.epsilon)
    }

    pub fn at_horizon(&self, horizon: f64) -> TubeProblem {
        TubeProblem {
            horizon,
            ..self.clone()
        }
    }

    /// Identity used to refuse merging batches of different problems.
    pub fn key(&self, method: Method, opts: McOptions, guide: Option<GuideOptions>) -> u64 {
        config_key(&format!(
            "{method}|{:?}|{:?}|{:?}|{}|{}|{}|{:?}",
            self.model, self.scheme, self.target, self.epsilon, self.horizon, opts.max_jumps, guide
        ))
    }

    pub fn proposal(&self, guide: GuideOptions) -> Result<GuidedProposal, GuideError> {
        GuidedProposal::new(&self.target, self.phi(), self.horizon, guide.base_intensity, guide.cells)
    }
}

pub fn estimate_direct(problem: &TubeProblem, opts: McOptions) -> Result<EstimateRecord, EstimateError> {
    if opts.n == 0 {
        return Err(EstimateError::NoSamples);
    }
    let tube = problem.tube();
    let key = problem.key(Method::Direct, opts, None);
    Ok(accumulate_direct(&problem.model, problem.horizon, &tube, key, opts, 0..opts.n).to_record())
}

pub fn estimate_is_reference(problem: &TubeProblem, opts: McOptions) -> Result<EstimateRecord, EstimateError> {
    if opts.n == 0 {
        return Err(EstimateError::NoSamples);
    }
    let tube = problem.tube();
    let key = problem.key(Method::IsReference, opts, None);
    Ok(accumulate_is_reference(&problem.model, problem.horizon, &tube, key, opts, 0..opts.n).to_record())
}

pub fn estimate_is_guided(
    problem: &TubeProblem,
    opts: McOptions,
    guide: GuideOptions,
) -> Result<EstimateRecord, EstimateError> {
    if opts.n == 0 {
        return Err(EstimateError::NoSamples);
    }
    let tube = problem.tube();
    let proposal = problem.proposal(guide)?;
    let key = problem.key(Method::IsGuided, opts, Some(guide));
    Ok(accumulate_is_guided(&problem.model, &proposal, &tube, key, opts, 0..opts.n).to_record())
}

pub fn estimate(
    problem: &TubeProblem,
    method: Method,
    opts: McOptions,
    guide: GuideOptions,
) -> Result<EstimateRecord, EstimateError> {
    match method {
        Method::Direct => estimate_direct(problem, opts),
        Method::IsReference => estimate_is_reference(problem, opts),
        Method::IsGuided => estimate_is_guided(problem, opts, guide),
    }
}

/// One row of a sweep over horizons.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPoint {
    pub horizon: f64,
    pub phi: f64,
    pub psi: f64,
    pub estimate: EstimateRecord,
    /// `ln p_hat / ψ(T)`.
    pub normalized: f64,
    /// `−I(f)`.
    pub neg_rate: f64,
}

impl ExperimentPoint {
    /// True when no sample carried weight and `normalized` is `-∞`.
    pub fn is_degenerate(&self) -> bool {
        self.estimate.log_p_hat == f64::NEG_INFINITY
    }
}

/// Estimates the tube probability at each horizon of `horizons` and
/// normalizes it by `ψ(T)`.
pub fn run_sweep(
    problem: &TubeProblem,
    horizons: &[f64],
    method: Method,
    opts: McOptions,
    guide: GuideOptions,
    quad: QuadratureSpec,
) -> Result<Vec<ExperimentPoint>, EstimateError> {
    if horizons.iter().any(|&t| !(t > 0.0)) || horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(EstimateError::BadHorizons);
    }
    let neg_rate = -rate_functional(&problem.target, problem.model.max_exponent(), quad);
    horizons
        .iter()
        .map(|&horizon| {
            let at = problem.at_horizon(horizon);
            let estimate = estimate(&at, method, opts, guide)?;
            let psi = normalizer_psi(&at.scheme, &at.model, horizon);
            Ok(ExperimentPoint {
                horizon,
                phi: at.phi(),
                psi,
                normalized: estimate.log_p_hat / psi,
                estimate,
                neg_rate,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulator_handles_wide_log_range() {
        let mut acc = WeightAccumulator::new(Method::IsReference, 1);
        for lw in [-800.0, -2.0, 700.0, f64::NEG_INFINITY, 3.0] {
            acc.push(Score::LogWeight(lw));
        }
        acc.push(Score::Miss);
        acc.push(Score::Truncated);
        let r = acc.to_record();
        assert_eq!(r.n, 7);
        assert_eq!(r.hits, 4);
        assert_eq!(r.truncated, 1);
        assert!((r.log_p_hat - (700.0 - 7f64.ln())).abs() < 1e-9);
        assert!(r.ess >= 1.0 && r.ess < 1.0 + 1e-9);
    }

    #[test]
    fn direct_record_is_a_frequency() {
        let mut acc = WeightAccumulator::new(Method::Direct, 1);
        for i in 0..1000 {
            acc.push(if i % 8 == 0 { Score::LogWeight(0.0) } else { Score::Miss });
        }
        let r = acc.to_record();
        assert_eq!(r.p_hat, 125.0 / 1000.0);
        assert_eq!(r.hits, 125);
        assert!((r.stderr - (0.125f64 * 0.875 / 1000.0).sqrt()).abs() < 1e-15);
        assert_eq!(r.ess, 125.0);
    }

    #[test]
    fn all_zero_batches_give_minus_infinity() {
        let mut a = WeightAccumulator::new(Method::IsGuided, 3);
        let mut b = WeightAccumulator::new(Method::IsGuided, 3);
        a.push(Score::Miss);
        b.push(Score::LogWeight(f64::NEG_INFINITY));
        let r = merge_batches(&[a, b]).unwrap();
        assert_eq!(r.p_hat, 0.0);
        assert_eq!(r.log_p_hat, f64::NEG_INFINITY);
        assert_eq!(r.hits, 0);
    }

    #[test]
    fn merge_rejects_mixed_configs() {
        let a = WeightAccumulator::new(Method::IsGuided, 3);
        let b = WeightAccumulator::new(Method::IsGuided, 4);
        let c = WeightAccumulator::new(Method::Direct, 3);
        assert!(merge_batches(&[a.clone(), b]).is_err());
        assert!(merge_batches(&[a, c]).is_err());
        assert_eq!(merge_batches(&[]), Err(EstimateError::EmptyMerge));
    }

    #[test]
    fn split_accumulation_matches_whole() {
        let weights: Vec<f64> = (0..5000).map(|i| ((i * 37) % 101) as f64 * 0.3 - 15.0).collect();
        let score = |rng: &mut ChaCha8Rng| {
            use rand::Rng;
            let i = rng.random_range(0..weights.len());
            Score::LogWeight(weights[i])
        };
        let whole = accumulate(Method::IsReference, 9, 5, 0..5000, score);
        let a = accumulate(Method::IsReference, 9, 5, 0..1777, score);
        let b = accumulate(Method::IsReference, 9, 5, 1777..5000, score);
        let merged = merge_batches(&[a, b]).unwrap();
        let w = whole.to_record();
        assert_eq!(merged.n, w.n);
        assert_eq!(merged.hits, w.hits);
        assert!((merged.p_hat - w.p_hat).abs() <= 1e-12 * w.p_hat);
    }
}
