//! Rate models, target functions and normalization schemes.
//!
//! A [`RateModel`] describes a birth-death chain on the nonnegative integers
//! whose rates behave like `λ(x) ~ Y(x) = y(x)·x^l` and `μ(x) ~ Z(x) = z(x)·x^m`
//! for large `x`, with `y` and `z` slowly varying. Small states can be pinned
//! to arbitrary positive rates through override tables.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of grid points used when checking membership in `F`.
pub const DEFAULT_TARGET_RESOLUTION: usize = 10_001;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("exponents must be finite and nonnegative (l = {l}, m = {m})")]
    BadExponent { l: f64, m: f64 },
    #[error("exponents must differ (l = m = {0})")]
    EqualExponents(f64),
    #[error("max(l, m) must be positive")]
    ZeroExponents,
    #[error("slowly varying factor scale must be finite and positive, got {0}")]
    BadScale(f64),
    #[error("slowly varying factor exponent must be finite, got {0}")]
    BadLogExponent(f64),
    #[error("{table} override at state {state} must be finite and positive, got {value}")]
    BadOverride {
        table: &'static str,
        state: u64,
        value: f64,
    },
    #[error("mu override at state 0 is not allowed (mu(0) = 0)")]
    MuAtZero,
    #[error("target: {0}")]
    Target(String),
    #[error("scaling: {0}")]
    Scaling(String),
}

/// Slowly varying factor: `c` or `c·ln(e + x)^β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SlowlyVarying {
    Constant { c: f64 },
    LogPower { c: f64, beta: f64 },
}

impl SlowlyVarying {
    pub fn constant(c: f64) -> Result<Self, ModelError> {
        let s = SlowlyVarying::Constant { c };
        s.validate()?;
        Ok(s)
    }

    pub fn log_power(c: f64, beta: f64) -> Result<Self, ModelError> {
        let s = SlowlyVarying::LogPower { c, beta };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let c = self.scale();
        if !(c.is_finite() && c > 0.0) {
            return Err(ModelError::BadScale(c));
        }
        if let SlowlyVarying::LogPower { beta, .. } = self {
            if !beta.is_finite() {
                return Err(ModelError::BadLogExponent(*beta));
            }
        }
        Ok(())
    }

    pub fn scale(&self) -> f64 {
        match *self {
            SlowlyVarying::Constant { c } | SlowlyVarying::LogPower { c, .. } => c,
        }
    }

    /// Evaluates the factor at `x ≥ 0`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            SlowlyVarying::Constant { c } => c,
            SlowlyVarying::LogPower { c, beta } => c * (std::f64::consts::E + x).ln().powf(beta),
        }
    }
}

impl Default for SlowlyVarying {
    fn default() -> Self {
        SlowlyVarying::Constant { c: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub lambda: f64,
    pub mu: f64,
}

impl Rates {
    /// Total jump rate `h(x) = λ(x) + μ(x)`.
    #[inline]
    pub fn total(&self) -> f64 {
        self.lambda + self.mu
    }
}

/// Birth and death rates with power-law asymptotics.
///
/// Unless overridden, `λ(x) = Y(x + 1)` and `μ(x) = Z(x)` for `x ≥ 1`, with
/// `μ(0) = 0`. A model without a death exponent is a pure-birth (Yule-type)
/// chain, `μ ≡ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateModel {
    l: f64,
    m: Option<f64>,
    y: SlowlyVarying,
    z: SlowlyVarying,
    lambda_table: BTreeMap<u64, f64>,
    mu_table: BTreeMap<u64, f64>,
}

impl RateModel {
    pub fn new(l: f64, m: f64, y: SlowlyVarying, z: SlowlyVarying) -> Result<Self, ModelError> {
        if !(l.is_finite() && m.is_finite() && l >= 0.0 && m >= 0.0) {
            return Err(ModelError::BadExponent { l, m });
        }
        if l == m {
            return Err(ModelError::EqualExponents(l));
        }
        if l.max(m) <= 0.0 {
            return Err(ModelError::ZeroExponents);
        }
        y.validate()?;
        z.validate()?;
        Ok(RateModel {
            l,
            m: Some(m),
            y,
            z,
            lambda_table: BTreeMap::new(),
            mu_table: BTreeMap::new(),
        })
    }

    /// Pure-birth chain with `λ(x) ~ y(x)·x^l` and `μ ≡ 0`.
    pub fn pure_birth(l: f64, y: SlowlyVarying) -> Result<Self, ModelError> {
        if !(l.is_finite() && l > 0.0) {
            return Err(ModelError::BadExponent { l, m: 0.0 });
        }
        y.validate()?;
        Ok(RateModel {
            l,
            m: None,
            y,
            z: SlowlyVarying::default(),
            lambda_table: BTreeMap::new(),
            mu_table: BTreeMap::new(),
        })
    }

    pub fn with_lambda_overrides(
        mut self,
        table: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<Self, ModelError> {
        for (state, value) in table {
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::BadOverride {
                    table: "lambda",
                    state,
                    value,
                });
            }
            self.lambda_table.insert(state, value);
        }
        Ok(self)
    }

    pub fn with_mu_overrides(
        mut self,
        table: impl IntoIterator<Item = (u64, f64)>,
    ) -> Result<Self, ModelError> {
        for (state, value) in table {
            if state == 0 {
                return Err(ModelError::MuAtZero);
            }
            if !(value.is_finite() && value > 0.0) {
                return Err(ModelError::BadOverride {
                    table: "mu",
                    state,
                    value,
                });
            }
            self.mu_table.insert(state, value);
        }
        Ok(self)
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    /// Death exponent, `None` for a pure-birth model.
    pub fn m(&self) -> Option<f64> {
        self.m
    }

    pub fn y(&self) -> SlowlyVarying {
        self.y
    }

    pub fn z(&self) -> SlowlyVarying {
        self.z
    }

    pub fn is_pure_birth(&self) -> bool {
        self.m.is_none()
    }

    pub fn lambda_table(&self) -> &BTreeMap<u64, f64> {
        &self.lambda_table
    }

    pub fn mu_table(&self) -> &BTreeMap<u64, f64> {
        &self.mu_table
    }

    /// `l ∨ m`, the exponent of the rate functional.
    pub fn max_exponent(&self) -> f64 {
        match self.m {
            Some(m) => self.l.max(m),
            None => self.l,
        }
    }

    /// `Y(x) = y(x)·x^l`, extended to real `x ≥ 0`.
    pub fn big_y(&self, x: f64) -> f64 {
        self.y.eval(x) * x.powf(self.l)
    }

    /// `Z(x) = z(x)·x^m`; identically zero for a pure-birth model.
    pub fn big_z(&self, x: f64) -> f64 {
        match self.m {
            Some(m) => self.z.eval(x) * x.powf(m),
            None => 0.0,
        }
    }

    /// `V(x) = max(Y(x), Z(x))`.
    pub fn eval_v(&self, x: f64) -> f64 {
        self.big_y(x).max(self.big_z(x))
    }

    #[inline]
    pub fn lambda(&self, x: u64) -> f64 {
        match self.lambda_table.get(&x) {
            Some(&v) => v,
            None => self.big_y(x as f64 + 1.0),
        }
    }

    #[inline]
    pub fn mu(&self, x: u64) -> f64 {
        if x == 0 || self.m.is_none() {
            return 0.0;
        }
        match self.mu_table.get(&x) {
            Some(&v) => v,
            None => self.big_z(x as f64),
        }
    }

    #[inline]
    pub fn eval_rates(&self, x: u64) -> Rates {
        Rates {
            lambda: self.lambda(x),
            mu: self.mu(x),
        }
    }

    /// `h(x) = λ(x) + μ(x)`.
    #[inline]
    pub fn total_rate(&self, x: u64) -> f64 {
        self.lambda(x) + self.mu(x)
    }

    /// Compares `λ/Y` and `μ/Z` with 1 over the upper half of `grid`.
    ///
    /// States where the reference value vanishes (`Y(0)` for `l > 0`, and
    /// `Z(0)`) are skipped.
    pub fn check_rate_asymptotics(&self, grid: &[u64]) -> AsymptoticsReport {
        let tail = &grid[grid.len() / 2..];
        let mut points = Vec::with_capacity(tail.len());
        let mut lambda_dev: f64 = 0.0;
        let mut mu_dev: f64 = 0.0;
        for &x in tail {
            let xf = x as f64;
            let y = self.big_y(xf);
            let dl = if y > 0.0 {
                Some((self.lambda(x) / y - 1.0).abs())
            } else {
                None
            };
            let dm = match self.m {
                Some(_) if x > 0 => Some((self.mu(x) / self.big_z(xf) - 1.0).abs()),
                _ => None,
            };
            if let Some(d) = dl {
                lambda_dev = lambda_dev.max(d);
            }
            if let Some(d) = dm {
                mu_dev = mu_dev.max(d);
            }
            points.push(AsymptoticsPoint {
                x,
                lambda_deviation: dl,
                mu_deviation: dm,
            });
        }
        AsymptoticsReport {
            max_lambda_deviation: lambda_dev,
            max_mu_deviation: mu_dev,
            points,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsPoint {
    pub x: u64,
    pub lambda_deviation: Option<f64>,
    pub mu_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub max_lambda_deviation: f64,
    pub max_mu_deviation: f64,
    pub points: Vec<AsymptoticsPoint>,
}

/// A continuous function on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetFunction {
    /// `f(t) = a·t^p`.
    Power { a: f64, p: f64 },
    /// Linear interpolation between `(t, value)` nodes spanning `[0, 1]`.
    PiecewiseLinear { nodes: Vec<(f64, f64)> },
}

impl TargetFunction {
    pub fn power(a: f64, p: f64) -> Result<Self, ModelError> {
        if !a.is_finite() || !p.is_finite() {
            return Err(ModelError::Target(format!(
                "power parameters must be finite (a = {a}, p = {p})"
            )));
        }
        if p < 0.0 {
            return Err(ModelError::Target(format!(
                "power exponent must be nonnegative, got {p}"
            )));
        }
        Ok(TargetFunction::Power { a, p })
    }

    /// Builds a piecewise-linear target. Node times must be strictly
    /// increasing, start at 0 and end at 1.
    pub fn piecewise_linear(nodes: Vec<(f64, f64)>) -> Result<Self, ModelError> {
        if nodes.len() < 2 {
            return Err(ModelError::Target("at least two nodes are required".into()));
        }
        if nodes.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
            return Err(ModelError::Target("node coordinates must be finite".into()));
        }
        if nodes[0].0 != 0.0 || nodes[nodes.len() - 1].0 != 1.0 {
            return Err(ModelError::Target(
                "nodes must start at t = 0 and end at t = 1".into(),
            ));
        }
        if let Some(w) = nodes.windows(2).find(|w| w[1].0 <= w[0].0) {
            return Err(ModelError::Target(format!(
                "node times must be strictly increasing (gap of zero or negative width at t = {})",
                w[1].0
            )));
        }
        Ok(TargetFunction::PiecewiseLinear { nodes })
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            TargetFunction::Power { a, p } => {
                if *p == 0.0 {
                    *a
                } else {
                    a * t.powf(*p)
                }
            }
            TargetFunction::PiecewiseLinear { nodes } => interpolate(nodes, t),
        }
    }

    /// Minimum and maximum of `f` over `[lo, hi]`, exact for both kinds.
    pub fn range_on(&self, lo: f64, hi: f64) -> (f64, f64) {
        let a = self.value(lo);
        let b = self.value(hi);
        let (mut min, mut max) = if a <= b { (a, b) } else { (b, a) };
        if let TargetFunction::PiecewiseLinear { nodes } = self {
            let start = nodes.partition_point(|n| n.0 <= lo);
            for &(t, v) in &nodes[start..] {
                if t >= hi {
                    break;
                }
                min = min.min(v);
                max = max.max(v);
            }
        }
        (min, max)
    }

    pub fn sup(&self) -> f64 {
        self.range_on(0.0, 1.0).1
    }

    /// Points where the function changes slope, other than the endpoints.
    pub fn breakpoints(&self) -> &[(f64, f64)] {
        match self {
            TargetFunction::Power { .. } => &[],
            TargetFunction::PiecewiseLinear { nodes } => &nodes[1..nodes.len() - 1],
        }
    }

    /// Checks `f(0) = 0` and `f(t) > 0` on `(0, 1]`.
    ///
    /// The power kind is decided in closed form; the piecewise-linear kind is
    /// checked at its nodes and on a uniform grid of `resolution` points.
    pub fn validate(&self, resolution: usize) -> Membership {
        let f0 = self.value(0.0);
        if f0 != 0.0 {
            return Membership::violated(0.0, f0, ViolationKind::NonzeroAtOrigin);
        }
        match self {
            TargetFunction::Power { a, p } => {
                if *a <= 0.0 || *p == 0.0 {
                    // p == 0 already failed f(0) = 0 unless a == 0.
                    return Membership::violated(1.0, self.value(1.0), ViolationKind::NotPositive);
                }
                Membership::member()
            }
            TargetFunction::PiecewiseLinear { nodes } => {
                let res = resolution.max(2);
                let mut candidates: Vec<f64> = (1..res).map(|i| i as f64 / (res - 1) as f64).collect();
                candidates.extend(nodes.iter().skip(1).map(|n| n.0));
                candidates.sort_by(f64::total_cmp);
                for t in candidates {
                    let v = self.value(t);
                    if v <= 0.0 {
                        return Membership::violated(t, v, ViolationKind::NotPositive);
                    }
                }
                Membership::member()
            }
        }
    }
}

fn interpolate(nodes: &[(f64, f64)], t: f64) -> f64 {
    let i = nodes.partition_point(|n| n.0 <= t);
    if i == 0 {
        return nodes[0].1;
    }
    if i == nodes.len() {
        return nodes[nodes.len() - 1].1;
    }
    let (t0, v0) = nodes[i - 1];
    let (t1, v1) = nodes[i];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    NonzeroAtOrigin,
    NotPositive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub value: f64,
    pub kind: ViolationKind,
}

/// Outcome of checking a target against `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub violation: Option<Violation>,
}

impl Membership {
    fn member() -> Self {
        Membership {
            member: true,
            violation: None,
        }
    }

    fn violated(t: f64, value: f64, kind: ViolationKind) -> Self {
        Membership {
            member: false,
            violation: Some(Violation { t, value, kind }),
        }
    }
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.violation {
            None => write!(f, "in F"),
            Some(v) => match v.kind {
                ViolationKind::NonzeroAtOrigin => write!(f, "not in F: f(0) = {} != 0", v.value),
                ViolationKind::NotPositive => {
                    write!(f, "not in F: f({}) = {} is not positive", v.t, v.value)
                }
            },
        }
    }
}

/// Normalization `T ↦ φ(T)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScalingScheme {
    /// `φ(T) = a·T^α`.
    Power { a: f64, alpha: f64 },
    /// `φ(T) = T`.
    Identity,
    /// `φ(T) = T / ln(e + T)`.
    LogDamped,
}

impl ScalingScheme {
    pub fn power(a: f64, alpha: f64) -> Result<Self, ModelError> {
        let s = ScalingScheme::Power { a, alpha };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if let ScalingScheme::Power { a, alpha } = *self {
            if !(a.is_finite() && a > 0.0 && alpha.is_finite() && alpha > 0.0) {
                return Err(ModelError::Scaling(format!(
                    "power scheme needs a > 0 and alpha > 0 (a = {a}, alpha = {alpha})"
                )));
            }
        }
        Ok(())
    }

    pub fn phi(&self, horizon: f64) -> f64 {
        match *self {
            ScalingScheme::Power { a, alpha } => a * horizon.powf(alpha),
            ScalingScheme::Identity => horizon,
            ScalingScheme::LogDamped => horizon / (std::f64::consts::E + horizon).ln(),
        }
    }
}
