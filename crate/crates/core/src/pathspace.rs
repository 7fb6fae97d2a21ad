//! Jump paths on `[0, T]` and the exact path functionals.
//!
//! The law of the birth-death chain `ξ` on `[0, T]` has a density with respect
//! to the law of the reference walk `ζ` (rate 1, fair ±1 jumps). For a path
//! `u` with jumps at `t_1 < … < t_N` the log-density is
//!
//! ```text
//! ln p(u) = T − A_T(u) + B_T(u) + N·ln 2,
//! A_T(u)  = ∫₀ᵀ h(u(t)) dt,
//! B_T(u)  = Σ ln ν(u(t_{i−1}), u(t_i)),
//! ```
//!
//! where `ν` is `λ` of the departure state for an up-jump and `μ` for a
//! down-jump. Paths that leave the nonnegative integers have density zero,
//! encoded as a log-weight of `-∞`.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{RateModel, TargetFunction};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("horizon must be finite and positive, got {0}")]
    BadHorizon(f64),
    #[error("jump times must satisfy 0 < t_1 < ... < t_N < T (offending time {time} at index {index})")]
    BadJumpTime { index: usize, time: f64 },
    #[error("jump marks must be +1 or -1, got {0}")]
    BadMark(i64),
    #[error("time {t} is outside [0, {horizon}]")]
    OutOfRange { t: f64, horizon: f64 },
    #[error("malformed path text at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A right-continuous ±1 step path on `[0, T]` starting at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    horizon: f64,
    times: Vec<f64>,
    marks: Vec<i8>,
}

/// A maximal interval on which the path is constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub start: f64,
    pub end: f64,
    pub state: i64,
}

impl JumpPath {
    pub fn new(horizon: f64, jumps: impl IntoIterator<Item = (f64, i8)>) -> Result<Self, PathError> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(PathError::BadHorizon(horizon));
        }
        let mut path = JumpPath::empty(horizon);
        let mut prev = 0.0;
        for (index, (time, mark)) in jumps.into_iter().enumerate() {
            if !(time > prev && time < horizon) {
                return Err(PathError::BadJumpTime { index, time });
            }
            if mark != 1 && mark != -1 {
                return Err(PathError::BadMark(mark as i64));
            }
            path.times.push(time);
            path.marks.push(mark);
            prev = time;
        }
        Ok(path)
    }

    /// Path with no jumps. The horizon is not validated.
    pub(crate) fn empty(horizon: f64) -> Self {
        JumpPath {
            horizon,
            times: Vec::new(),
            marks: Vec::new(),
        }
    }

    pub(crate) fn with_capacity(horizon: f64, capacity: usize) -> Self {
        JumpPath {
            horizon,
            times: Vec::with_capacity(capacity),
            marks: Vec::with_capacity(capacity),
        }
    }

    /// Appends a jump; callers guarantee ordering and the `< T` bound.
    #[inline]
    pub(crate) fn push_unchecked(&mut self, time: f64, mark: i8) {
        debug_assert!(time < self.horizon && self.times.last().is_none_or(|&t| t < time));
        self.times.push(time);
        self.marks.push(mark);
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.times
    }

    pub fn marks(&self) -> &[i8] {
        &self.marks
    }

    /// `N_T`, the number of jumps.
    pub fn n_jumps(&self) -> usize {
        self.times.len()
    }

    pub fn terminal_value(&self) -> i64 {
        self.marks.iter().map(|&m| m as i64).sum()
    }

    /// Right-continuous value at `t ∈ [0, T]`.
    pub fn value(&self, t: f64) -> Result<i64, PathError> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(PathError::OutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        let k = self.times.partition_point(|&s| s <= t);
        Ok(self.marks[..k].iter().map(|&m| m as i64).sum())
    }

    /// Constant pieces in time order; there are `N_T + 1` of them.
    pub fn pieces(&self) -> impl Iterator<Item = Piece> + '_ {
        let n = self.times.len();
        let mut state = 0i64;
        (0..=n).map(move |i| {
            let start = if i == 0 { 0.0 } else { self.times[i - 1] };
            let end = if i == n { self.horizon } else { self.times[i] };
            if i > 0 {
                state += self.marks[i - 1] as i64;
            }
            Piece { start, end, state }
        })
    }

    /// True when the path never takes a −1 jump from state 0.
    pub fn is_admissible(&self) -> bool {
        let mut state = 0i64;
        for &m in &self.marks {
            state += m as i64;
            if state < 0 {
                return false;
            }
        }
        true
    }

    /// The restriction to `[0, s]` for `0 < s ≤ T` with no jump at `s`.
    pub fn prefix(&self, s: f64) -> Result<JumpPath, PathError> {
        if !(s > 0.0 && s <= self.horizon) {
            return Err(PathError::OutOfRange {
                t: s,
                horizon: self.horizon,
            });
        }
        let k = self.times.partition_point(|&t| t < s);
        if k < self.times.len() && self.times[k] == s {
            return Err(PathError::BadJumpTime { index: k, time: s });
        }
        Ok(JumpPath {
            horizon: s,
            times: self.times[..k].to_vec(),
            marks: self.marks[..k].to_vec(),
        })
    }

    /// Text form: a `T=<horizon> N=<count>` header, then `time<TAB>mark` lines.
    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn from_text(text: &str) -> Result<Self, PathError> {
        text.parse()
    }
}

impl fmt::Display for JumpPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "T={} N={}", self.horizon, self.times.len())?;
        for (t, m) in self.times.iter().zip(&self.marks) {
            writeln!(f, "{t}\t{m:+}")?;
        }
        Ok(())
    }
}

impl FromStr for JumpPath {
    type Err = PathError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |line: usize, msg: &str| PathError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = s.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let mut horizon = None;
        let mut count = None;
        for field in header.split_whitespace() {
            if let Some(v) = field.strip_prefix("T=") {
                horizon = v.parse::<f64>().ok();
            } else if let Some(v) = field.strip_prefix("N=") {
                count = v.parse::<usize>().ok();
            }
        }
        let (horizon, count) = match (horizon, count) {
            (Some(h), Some(c)) => (h, c),
            _ => return Err(parse_err(1, "header must read T=<horizon> N=<count>")),
        };
        let mut jumps = Vec::with_capacity(count);
        for (idx, line) in lines {
            let mut parts = line.split('\t');
            let time = parts.next().and_then(|p| p.trim().parse::<f64>().ok());
            let mark = parts.next().and_then(|p| p.trim().parse::<i64>().ok());
            match (time, mark, parts.next()) {
                (Some(t), Some(m), None) => {
                    if m != 1 && m != -1 {
                        return Err(PathError::BadMark(m));
                    }
                    jumps.push((t, m as i8));
                }
                _ => return Err(parse_err(idx + 1, "expected time<TAB>mark")),
            }
        }
        if jumps.len() != count {
            return Err(parse_err(1, "jump count does not match header"));
        }
        JumpPath::new(horizon, jumps)
    }
}

/// `A_T(u) = ∫₀ᵀ h(u(t)) dt`.
///
/// Returns `+∞` for a path that visits a negative state, where `h` is
/// undefined; such paths carry zero density.
pub fn functional_a(path: &JumpPath, model: &RateModel) -> f64 {
    functional_a_window(path, model, 0.0, path.horizon())
}

/// `∫ h(u(t)) dt` over `[from, to] ⊆ [0, T]`.
pub fn functional_a_window(path: &JumpPath, model: &RateModel, from: f64, to: f64) -> f64 {
    let mut acc = 0.0;
    for piece in path.pieces() {
        let lo = piece.start.max(from);
        let hi = piece.end.min(to);
        if hi <= lo {
            continue;
        }
        if piece.state < 0 {
            return f64::INFINITY;
        }
        acc += model.total_rate(piece.state as u64) * (hi - lo);
    }
    acc
}

/// `B_T(u) = Σ ln ν(u(t_{i−1}), u(t_i))`, or `-∞` if some jump has zero rate.
pub fn functional_b(path: &JumpPath, model: &RateModel) -> f64 {
    let mut state = 0i64;
    let mut acc = 0.0;
    for &mark in path.marks() {
        if state < 0 {
            return f64::NEG_INFINITY;
        }
        let rate = if mark > 0 {
            model.lambda(state as u64)
        } else {
            model.mu(state as u64)
        };
        if rate <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += rate.ln();
        state += mark as i64;
    }
    acc
}

/// `T − A_T + B_T + N_T·ln 2`, assembled from the two functionals.
pub fn log_weight_from_functionals(path: &JumpPath, model: &RateModel) -> f64 {
    let b = functional_b(path, model);
    if b == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    path.horizon() - functional_a(path, model) + b + path.n_jumps() as f64 * LN_2
}

/// Log of the density of the law of `ξ` with respect to the reference walk,
/// evaluated jump by jump in product form:
/// `Π 2·e^{−(h(u_{i−1})−1)τ_i}·ν(u_{i−1}, u_i) × e^{−(h(u_N)−1)(T−t_N)}`.
pub fn log_density(path: &JumpPath, model: &RateModel) -> f64 {
    let mut state: u64 = 0;
    let mut last = 0.0;
    let mut acc = 0.0;
    for (&t, &mark) in path.jump_times().iter().zip(path.marks()) {
        let rates = model.eval_rates(state);
        let nu = if mark > 0 { rates.lambda } else { rates.mu };
        if nu <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += LN_2 - (rates.total() - 1.0) * (t - last) + nu.ln();
        last = t;
        state = if mark > 0 { state + 1 } else { state - 1 };
    }
    acc - (model.total_rate(state) - 1.0) * (path.horizon() - last)
}

/// The path viewed on `[0, 1]` as `t ↦ u(tT)/φ`.
#[derive(Debug, Clone, Copy)]
pub struct ScaledPathView<'a> {
    pub base: &'a JumpPath,
    pub phi: f64,
}

impl<'a> ScaledPathView<'a> {
    pub fn new(base: &'a JumpPath, phi: f64) -> Self {
        ScaledPathView { base, phi }
    }

    pub fn value(&self, t: f64) -> Result<f64, PathError> {
        let s = (t * self.base.horizon()).min(self.base.horizon());
        Ok(self.base.value(s)? as f64 / self.phi)
    }

    /// Constant pieces in scaled time `[0, 1]` with scaled values.
    fn scaled_pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let horizon = self.base.horizon();
        let n = self.base.n_jumps();
        self.base.pieces().enumerate().map(move |(i, p)| {
            let end = if i == n { 1.0 } else { p.end / horizon };
            (p.start / horizon, end, p.state as f64 / self.phi)
        })
    }
}

/// `ρ(view, f) = sup_{t∈[0,1]} |view(t) − f(t)|`.
///
/// Each constant piece contributes the exact supremum of `|v − f|` over its
/// closure, which covers both one-sided limits at jump times. A uniform grid
/// of `resolution` points is evaluated as well.
pub fn sup_distance(view: &ScaledPathView<'_>, f: &TargetFunction, resolution: usize) -> f64 {
    let mut sup: f64 = 0.0;
    for (lo, hi, v) in view.scaled_pieces() {
        let (fmin, fmax) = f.range_on(lo, hi);
        sup = sup.max((v - fmin).abs()).max((v - fmax).abs());
    }
    let res = resolution.max(2);
    for i in 0..res {
        let t = i as f64 / (res - 1) as f64;
        let v = view.value(t).unwrap_or(0.0);
        sup = sup.max((v - f.value(t)).abs());
    }
    sup
}

/// `view ∈ U_ε(f)`, the open sup-norm ball.
pub fn in_tube(view: &ScaledPathView<'_>, f: &TargetFunction, epsilon: f64, resolution: usize) -> bool {
    sup_distance(view, f, resolution) < epsilon
}

/// Tube `U_ε(f)` for paths scaled by `φ`, with early exit.
///
/// Membership agrees with [`in_tube`]: the per-piece suprema are exact, so
/// the grid points can never exceed them.
#[derive(Debug, Clone)]
pub struct Tube {
    target: TargetFunction,
    phi: f64,
    epsilon: f64,
}

impl Tube {
    pub fn new(target: TargetFunction, phi: f64, epsilon: f64) -> Self {
        Tube { target, phi, epsilon }
    }

    pub fn target(&self) -> &TargetFunction {
        &self.target
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn contains(&self, path: &JumpPath) -> bool {
        let view = ScaledPathView::new(path, self.phi);
        let inside = view.scaled_pieces().all(|(lo, hi, v)| {
            let (fmin, fmax) = self.target.range_on(lo, hi);
            (v - fmin).abs() < self.epsilon && (v - fmax).abs() < self.epsilon
        });
        inside
    }

    /// Smallest state that no path in the tube can reach.
    pub fn state_ceiling(&self) -> u64 {
        let top = self.phi * (self.target.sup() + self.epsilon);
        top.max(0.0).ceil() as u64
    }
}
