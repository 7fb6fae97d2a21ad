//! Path samplers.
//!
//! All samplers are exact event-driven simulations. A hard cap on the number
//! of jumps guards against explosion; a capped path is returned with
//! [`SampleStatus::Truncated`] and ends at its last accepted jump.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use thiserror::Error;

use crate::model::{RateModel, TargetFunction};
use crate::pathspace::JumpPath;

pub const DEFAULT_MAX_JUMPS: usize = 10_000_000;
pub const DEFAULT_GUIDE_CELLS: usize = 1_000;

/// Reproducible random stream `(seed, stream_index)`.
///
/// Streams with the same seed and distinct indices use distinct ChaCha
/// stream ids under one key, so they never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        RngStream { seed, stream_index }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleStatus {
    Complete,
    /// The jump cap was reached before `T`.
    Truncated,
    /// The path reached a caller-supplied state ceiling and was abandoned.
    Abandoned,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub path: JumpPath,
    pub status: SampleStatus,
    /// Log-likelihood ratio of the drawn path, proposal law over reference
    /// walk law. Zero for the exact samplers.
    pub log_proposal_offset: f64,
}

impl SampleOutcome {
    fn exact(path: JumpPath, status: SampleStatus) -> Self {
        SampleOutcome {
            path,
            status,
            log_proposal_offset: 0.0,
        }
    }

    pub fn is_complete(&self) -> bool {
        self.status == SampleStatus::Complete
    }
}

#[inline]
fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Simulates the birth-death chain on `[0, horizon]` from state 0.
///
/// Holding time at `x` is exponential with rate `h(x)`; the next jump is up
/// with probability `λ(x)/h(x)`.
pub fn sample_bdp<R: Rng + ?Sized>(
    model: &RateModel,
    horizon: f64,
    rng: &mut R,
    max_jumps: usize,
) -> SampleOutcome {
    sample_bdp_capped(model, horizon, rng, max_jumps, None)
}

/// As [`sample_bdp`], but stops with [`SampleStatus::Abandoned`] as soon as
/// the state reaches `ceiling`.
pub fn sample_bdp_capped<R: Rng + ?Sized>(
    model: &RateModel,
    horizon: f64,
    rng: &mut R,
    max_jumps: usize,
    ceiling: Option<u64>,
) -> SampleOutcome {
    let mut path = JumpPath::with_capacity(horizon, 16);
    let mut t = 0.0;
    let mut state: u64 = 0;
    loop {
        let rates = model.eval_rates(state);
        let total = rates.total();
        t += exp1(rng) / total;
        if t >= horizon {
            return SampleOutcome::exact(path, SampleStatus::Complete);
        }
        if path.n_jumps() == max_jumps {
            return SampleOutcome::exact(path, SampleStatus::Truncated);
        }
        let up = rng.random::<f64>() * total < rates.lambda;
        if up {
            path.push_unchecked(t, 1);
            state += 1;
        } else {
            path.push_unchecked(t, -1);
            state -= 1;
        }
        if ceiling.is_some_and(|c| state >= c) {
            return SampleOutcome::exact(path, SampleStatus::Abandoned);
        }
    }
}

/// Simulates the reference walk: rate-1 jumps with independent fair signs.
pub fn sample_reference_walk<R: Rng + ?Sized>(
    horizon: f64,
    rng: &mut R,
    max_jumps: usize,
) -> SampleOutcome {
    let mut path = JumpPath::with_capacity(horizon, (horizon * 1.5) as usize + 8);
    let mut t = 0.0;
    loop {
        t += exp1(rng);
        if t >= horizon {
            return SampleOutcome::exact(path, SampleStatus::Complete);
        }
        if path.n_jumps() == max_jumps {
            return SampleOutcome::exact(path, SampleStatus::Truncated);
        }
        let mark = if rng.random::<bool>() { 1 } else { -1 };
        path.push_unchecked(t, mark);
    }
}

/// The reference walk built as the difference of two independent Poisson
/// processes of rate 1/2 each.
pub fn sample_reference_as_difference<R: Rng + ?Sized>(
    horizon: f64,
    rng: &mut R,
    max_jumps: usize,
) -> SampleOutcome {
    sample_poisson_difference(horizon, 0.5, 0.5, rng, max_jumps)
}

/// Merges an up-process of rate `up_rate` and a down-process of rate
/// `down_rate`. Counts are drawn first, then jump times as sorted uniforms.
pub fn sample_poisson_difference<R: Rng + ?Sized>(
    horizon: f64,
    up_rate: f64,
    down_rate: f64,
    rng: &mut R,
    max_jumps: usize,
) -> SampleOutcome {
    let n_up = poisson_count(up_rate * horizon, rng);
    let n_down = poisson_count(down_rate * horizon, rng);
    let mut jumps: Vec<(f64, i8)> = Vec::with_capacity(n_up + n_down);
    for _ in 0..n_up {
        jumps.push((uniform_open(horizon, rng), 1));
    }
    for _ in 0..n_down {
        jumps.push((uniform_open(horizon, rng), -1));
    }
    jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let status = if jumps.len() > max_jumps {
        jumps.truncate(max_jumps);
        SampleStatus::Truncated
    } else {
        SampleStatus::Complete
    };
    let mut path = JumpPath::with_capacity(horizon, jumps.len());
    let mut last = 0.0;
    for (t, m) in jumps {
        // ties have probability zero; keep times strictly increasing anyway
        let t = if t > last { t } else { last.next_up() };
        path.push_unchecked(t, m);
        last = t;
    }
    SampleOutcome::exact(path, status)
}

fn poisson_count<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    let d = Poisson::new(mean).expect("finite positive Poisson mean");
    d.sample(rng) as usize
}

fn uniform_open<R: Rng + ?Sized>(horizon: f64, rng: &mut R) -> f64 {
    loop {
        let t = rng.random::<f64>() * horizon;
        if t > 0.0 && t < horizon {
            return t;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuideError {
    #[error("base intensity must be finite and positive, got {0}")]
    BadBaseIntensity(f64),
    #[error("phi must be finite and positive, got {0}")]
    BadPhi(f64),
    #[error("horizon must be finite and positive, got {0}")]
    BadHorizon(f64),
    #[error("proposal mesh needs at least one cell")]
    NoCells,
    #[error("target slope unavailable on cell {cell}: {msg}")]
    SlopeUnavailable { cell: usize, msg: String },
}

/// Time-inhomogeneous ±1 jump proposal that follows `φ·f(t/T)`.
///
/// On mesh cell `j` the drift is the forward-difference slope
/// `d_j = φ·(f(t_{j+1}) − f(t_j))/Δ` in real time, and the up/down rates
/// are `(b + |d_j| ± d_j)/2` for base intensity `b`.
#[derive(Debug, Clone)]
pub struct GuidedProposal {
    horizon: f64,
    cell_width: f64,
    up: Vec<f64>,
    total: Vec<f64>,
    ln_up_ratio: Vec<f64>,
    ln_down_ratio: Vec<f64>,
}

impl GuidedProposal {
    pub fn new(
        target: &TargetFunction,
        phi: f64,
        horizon: f64,
        base_intensity: f64,
        cells: usize,
    ) -> Result<Self, GuideError> {
        if !(base_intensity.is_finite() && base_intensity > 0.0) {
            return Err(GuideError::BadBaseIntensity(base_intensity));
        }
        if !(phi.is_finite() && phi > 0.0) {
            return Err(GuideError::BadPhi(phi));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(GuideError::BadHorizon(horizon));
        }
        if cells == 0 {
            return Err(GuideError::NoCells);
        }
        if let TargetFunction::PiecewiseLinear { nodes } = target {
            if let Some(i) = nodes.windows(2).position(|w| w[1].0 <= w[0].0) {
                return Err(GuideError::SlopeUnavailable {
                    cell: i,
                    msg: format!("zero-width node gap at t = {}", nodes[i].0),
                });
            }
        }
        let cell_width = horizon / cells as f64;
        let mut up = Vec::with_capacity(cells);
        let mut total = Vec::with_capacity(cells);
        let mut ln_up_ratio = Vec::with_capacity(cells);
        let mut ln_down_ratio = Vec::with_capacity(cells);
        for j in 0..cells {
            let t0 = j as f64 / cells as f64;
            let t1 = (j + 1) as f64 / cells as f64;
            let drift = phi * (target.value(t1) - target.value(t0)) / cell_width;
            if !drift.is_finite() {
                return Err(GuideError::SlopeUnavailable {
                    cell: j,
                    msg: format!("non-finite slope {drift}"),
                });
            }
            let sum = base_intensity + drift.abs();
            let u = 0.5 * (sum + drift);
            let d = 0.5 * (sum - drift);
            up.push(u);
            total.push(sum);
            ln_up_ratio.push((u / 0.5).ln());
            ln_down_ratio.push((d / 0.5).ln());
        }
        Ok(GuidedProposal {
            horizon,
            cell_width,
            up,
            total,
            ln_up_ratio,
            ln_down_ratio,
        })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cells(&self) -> usize {
        self.up.len()
    }

    /// `(up, down)` rates on cell `j`.
    pub fn rates(&self, cell: usize) -> (f64, f64) {
        (self.up[cell], self.total[cell] - self.up[cell])
    }

    /// Draws one path and accumulates
    /// `Σ ln(rate of taken jump / ½) − ∫ (total rate − 1) dt`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, max_jumps: usize) -> SampleOutcome {
        let cells = self.up.len();
        let mut path = JumpPath::with_capacity(self.horizon, (self.horizon * 1.5) as usize + 8);
        let mut offset = 0.0;
        let mut t = 0.0;
        let mut cell = 0;
        let mut cell_end = self.cell_end(0);
        loop {
            let rate = self.total[cell];
            let next = t + exp1(rng) / rate;
            if next >= cell_end {
                offset -= (rate - 1.0) * (cell_end - t);
                cell += 1;
                if cell == cells {
                    break;
                }
                t = cell_end;
                cell_end = self.cell_end(cell);
                continue;
            }
            if path.n_jumps() == max_jumps {
                offset -= (rate - 1.0) * (next - t);
                return SampleOutcome {
                    path,
                    status: SampleStatus::Truncated,
                    log_proposal_offset: offset,
                };
            }
            offset -= (rate - 1.0) * (next - t);
            t = next;
            if rng.random::<f64>() * rate < self.up[cell] {
                offset += self.ln_up_ratio[cell];
                path.push_unchecked(t, 1);
            } else {
                offset += self.ln_down_ratio[cell];
                path.push_unchecked(t, -1);
            }
        }
        SampleOutcome {
            path,
            status: SampleStatus::Complete,
            log_proposal_offset: offset,
        }
    }

    #[inline]
    fn cell_end(&self, cell: usize) -> f64 {
        if cell + 1 == self.up.len() {
            self.horizon
        } else {
            (cell + 1) as f64 * self.cell_width
        }
    }

    /// Log-likelihood ratio of `path` under this proposal relative to the
    /// reference walk, recomputed from the jump list.
    pub fn log_likelihood_ratio(&self, path: &JumpPath) -> f64 {
        let cells = self.up.len();
        let mut acc = 0.0;
        for j in 0..cells {
            let lo = j as f64 * self.cell_width;
            acc -= (self.total[j] - 1.0) * (self.cell_end(j) - lo);
        }
        for (&t, &m) in path.jump_times().iter().zip(path.marks()) {
            let j = ((t / self.cell_width) as usize).min(cells - 1);
            acc += if m > 0 {
                self.ln_up_ratio[j]
            } else {
                self.ln_down_ratio[j]
            };
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SlowlyVarying;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| RngStream::new(7, 3).rng().random()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        let b: u64 = RngStream::new(7, 4).rng().random();
        assert_ne!(a[0], b);
    }

    #[test]
    fn bdp_sample_is_bit_reproducible() {
        let model = RateModel::new(1.0, 0.0, SlowlyVarying::default(), SlowlyVarying::default()).unwrap();
        let s = RngStream::new(42, 9);
        let x = sample_bdp(&model, 3.0, &mut s.rng(), 1000);
        let y = sample_bdp(&model, 3.0, &mut s.rng(), 1000);
        assert_eq!(x, y);
    }

    #[test]
    fn zero_cap_truncates_when_a_jump_is_due() {
        let model = RateModel::new(1.0, 0.0, SlowlyVarying::default(), SlowlyVarying::default()).unwrap();
        for i in 0..200 {
            let out = sample_bdp(&model, 1.0, &mut RngStream::new(1, i).rng(), 0);
            assert_eq!(out.path.n_jumps(), 0);
        }
    }

    #[test]
    fn yule_paths_are_nondecreasing() {
        let model = RateModel::pure_birth(1.0, SlowlyVarying::default()).unwrap();
        for i in 0..500 {
            let out = sample_bdp(&model, 2.0, &mut RngStream::new(3, i).rng(), 10_000);
            assert!(out.path.marks().iter().all(|&m| m == 1));
        }
    }

    #[test]
    fn capped_sampler_stops_at_ceiling() {
        let model = RateModel::new(1.0, 0.0, SlowlyVarying::default(), SlowlyVarying::default()).unwrap();
        for i in 0..200 {
            let out = sample_bdp_capped(&model, 50.0, &mut RngStream::new(5, i).rng(), 10_000, Some(4));
            assert!(out.path.pieces().all(|p| p.state <= 4));
            if out.status == SampleStatus::Abandoned {
                assert_eq!(out.path.terminal_value(), 4);
            }
        }
    }

    #[test]
    fn difference_construction_keeps_parity() {
        for i in 0..500 {
            let out = sample_reference_as_difference(3.0, &mut RngStream::new(11, i).rng(), 1000);
            let n = out.path.n_jumps() as i64;
            assert_eq!(out.path.terminal_value().rem_euclid(2), n.rem_euclid(2));
            assert!(out.path.jump_times().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn difference_construction_truncates() {
        let out = sample_poisson_difference(100.0, 0.5, 0.5, &mut RngStream::new(1, 1).rng(), 5);
        assert_eq!(out.status, SampleStatus::Truncated);
        assert_eq!(out.path.n_jumps(), 5);
    }

    #[test]
    fn guided_rates_follow_slope() {
        let f = TargetFunction::power(1.0, 1.0).unwrap();
        let g = GuidedProposal::new(&f, 10.0, 10.0, 1.0, 100).unwrap();
        let (u, d) = g.rates(17);
        assert!((u - d - 1.0).abs() < 1e-12);
        assert!((u + d - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_slope_guide_is_the_reference_walk() {
        let flat = TargetFunction::piecewise_linear(vec![(0.0, 0.0), (1.0, 0.0)]).unwrap();
        let g = GuidedProposal::new(&flat, 3.0, 8.0, 1.0, 1000).unwrap();
        for i in 0..200 {
            let out = g.sample(&mut RngStream::new(2, i).rng(), 10_000);
            assert!(out.log_proposal_offset.abs() < 1e-9);
        }
    }

    #[test]
    fn guided_offset_matches_recomputation() {
        let f = TargetFunction::piecewise_linear(vec![(0.0, 0.0), (0.3, 1.0), (0.6, 0.4), (1.0, 1.5)]).unwrap();
        let g = GuidedProposal::new(&f, 4.0, 12.0, 0.7, 50).unwrap();
        for i in 0..300 {
            let out = g.sample(&mut RngStream::new(4, i).rng(), 10_000);
            assert_eq!(out.status, SampleStatus::Complete);
            let again = g.log_likelihood_ratio(&out.path);
            assert!((out.log_proposal_offset - again).abs() < 1e-9 * (1.0 + again.abs()));
        }
    }

    #[test]
    fn guide_rejects_bad_inputs() {
        let f = TargetFunction::power(1.0, 1.0).unwrap();
        assert!(GuidedProposal::new(&f, 1.0, 1.0, 0.0, 10).is_err());
        assert!(GuidedProposal::new(&f, 1.0, 1.0, 1.0, 0).is_err());
        let degenerate = TargetFunction::PiecewiseLinear {
            nodes: vec![(0.0, 0.0), (0.5, 1.0), (0.5, 1.0), (1.0, 1.0)],
        };
        assert!(matches!(
            GuidedProposal::new(&degenerate, 1.0, 1.0, 1.0, 10),
            Err(GuideError::SlopeUnavailable { .. })
        ));
    }
}
