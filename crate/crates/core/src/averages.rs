//! α-averages: the running recursion `δ_{n+1} = (1 − α_n) δ_n + α_n x_{n+1}`
//! with `δ_1 = x_1`, its expanded weight form, the standard weight
//! families, and the geometric mean.

use crate::error::{invalid, Error, Result};

/// A chronological sequence of finite observations, oldest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Series(Vec<f64>);

impl Series {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self(values))
    }

    /// The sequence `x_s = f(s)` for `s = 1..=n`.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((1..=n).map(f).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// 1-based access, `x_s`.
    pub fn get(&self, s: usize) -> Option<f64> {
        s.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for Series {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// The weight sequence `α = (α_1, α_2, …)` driving the recursion.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSchedule {
    /// `α_s = 1/(s+1)`: the arithmetic mean.
    Arithmetic,
    /// `α_s = 2/(s+2)`: the weighted arithmetic mean.
    WeightedArithmetic,
    /// `α_s = (μ − ν + 1)/(s + μ + 1)` with `0 ≤ ν ≤ μ`.
    Binomial { mu: f64, nu: f64 },
    /// `α_s = α` with `0 ≤ α < 1`: the exponential average.
    Constant(f64),
    /// A finite explicit list `α_1, …, α_k`.
    Explicit(Vec<f64>),
}

impl WeightSchedule {
    pub fn constant(alpha: f64) -> Result<Self> {
        let schedule = Self::Constant(alpha);
        schedule.validate()?;
        Ok(schedule)
    }

    pub fn explicit(weights: Vec<f64>) -> Result<Self> {
        let schedule = Self::Explicit(weights);
        schedule.validate()?;
        Ok(schedule)
    }

    /// Checks the parameter invariants of the schedule kind.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Arithmetic | Self::WeightedArithmetic => Ok(()),
            Self::Binomial { mu, nu } => {
                if !(mu.is_finite() && nu.is_finite()) || nu < 0.0 || nu > mu {
                    Err(invalid(format!("binomial family needs 0 ≤ ν ≤ μ, got μ={mu}, ν={nu}")))
                } else {
                    Ok(())
                }
            }
            Self::Constant(alpha) => {
                if (0.0..1.0).contains(&alpha) {
                    Ok(())
                } else {
                    Err(invalid(format!("constant weight needs 0 ≤ α < 1, got {alpha}")))
                }
            }
            Self::Explicit(ref weights) => match weights
                .iter()
                .position(|w| !(0.0..=1.0).contains(w))
            {
                Some(i) => Err(Error::WeightOutOfRange { index: i + 1, value: weights[i] }),
                None => Ok(()),
            },
        }
    }

    /// The weight `α_s` for `s ≥ 1`.
    pub fn alpha(&self, s: usize) -> Result<f64> {
        if s == 0 {
            return Err(invalid("weights are indexed from 1"));
        }
        let sf = s as f64;
        let value = match *self {
            Self::Arithmetic => 1.0 / (sf + 1.0),
            Self::WeightedArithmetic => 2.0 / (sf + 2.0),
            Self::Binomial { mu, nu } => (mu - nu + 1.0) / (sf + mu + 1.0),
            Self::Constant(alpha) => alpha,
            Self::Explicit(ref weights) => {
                *weights.get(s - 1).ok_or(Error::ScheduleExhausted {
                    index: s,
                    available: weights.len(),
                })?
            }
        };
        if (0.0..=1.0).contains(&value) {
            Ok(value)
        } else {
            Err(Error::WeightOutOfRange { index: s, value })
        }
    }

    /// `α_1, …, α_count` after validating the schedule parameters.
    pub fn take(&self, count: usize) -> Result<Vec<f64>> {
        self.validate()?;
        (1..=count).map(|s| self.alpha(s)).collect()
    }
}

/// The schedule `α_s = (μ − ν + 1)/(s + μ + 1)`.
///
/// `(0, 0)` is the arithmetic mean and `(1, 0)` the weighted arithmetic mean.
pub fn binomial_family_schedule(mu: f64, nu: f64) -> Result<WeightSchedule> {
    let schedule = WeightSchedule::Binomial { mu, nu };
    schedule.validate()?;
    Ok(schedule)
}

/// Running averages `δ_1 … δ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageSeries {
    deltas: Vec<f64>,
}

impl AverageSeries {
    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// The terminal value `δ_n`, identified with the limit average for finite data.
    pub fn limit(&self) -> f64 {
        *self.deltas.last().expect("average series is never empty")
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }
}

/// One step of the recursion. Every EA-style computation in the crate goes
/// through this function so batch and streaming paths round identically.
#[inline]
pub(crate) fn blend(previous: f64, alpha: f64, x: f64) -> f64 {
    (1.0 - alpha) * previous + alpha * x
}

pub fn alpha_average(x: &Series, alpha: &WeightSchedule) -> Result<AverageSeries> {
    let values = x.values();
    let weights = alpha.take(values.len() - 1)?;
    let mut deltas = Vec::with_capacity(values.len());
    let mut current = values[0];
    deltas.push(current);
    for (&a, &next) in weights.iter().zip(&values[1..]) {
        current = blend(current, a, next);
        deltas.push(current);
    }
    Ok(AverageSeries { deltas })
}

/// The weights `α̂^{(n)}_1 … α̂^{(n)}_n` with `δ_n = Σ α̂^{(n)}_r x_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpandedWeights {
    n: usize,
    weights: Vec<f64>,
}

impl ExpandedWeights {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn expanded_weights(alpha: &WeightSchedule, n: usize) -> Result<ExpandedWeights> {
    if n == 0 {
        return Err(invalid("expanded weights need n ≥ 1"));
    }
    let a = alpha.take(n - 1)?;
    let mut weights = vec![0.0; n];
    // suffix holds ∏_{s=r}^{n−1} (1 − α_s) while walking r downwards
    let mut suffix = 1.0;
    for r in (2..=n).rev() {
        weights[r - 1] = a[r - 2] * suffix;
        suffix *= 1.0 - a[r - 2];
    }
    weights[0] = suffix;
    Ok(ExpandedWeights { n, weights })
}

/// Terminal α-average evaluated as the dot product with the expanded weights.
pub fn alpha_average_expanded(x: &Series, alpha: &WeightSchedule) -> Result<f64> {
    let w = expanded_weights(alpha, x.len())?;
    Ok(w.weights.iter().zip(x.values()).map(|(w, v)| w * v).sum())
}

/// Running geometric mean `γ_n` of strictly positive inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricState {
    n: usize,
    gamma: f64,
}

impl GeometricState {
    /// State before any observation.
    pub fn empty() -> Self {
        Self { n: 0, gamma: 1.0 }
    }

    /// State after `n` observations with geometric mean `gamma`.
    pub fn from_parts(n: usize, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(invalid(format!("geometric mean must be positive, got {gamma}")));
        }
        Ok(Self { n, gamma })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// `γ_n = ⁿ√(γ_{n−1}^{n−1} · x_n)`, evaluated in log space.
pub fn geometric_mean_update(state: GeometricState, x: f64) -> Result<GeometricState> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(invalid(format!("geometric mean needs positive inputs, got {x}")));
    }
    let n = state.n + 1;
    let log_gamma = (state.n as f64 * state.gamma.ln() + x.ln()) / n as f64;
    Ok(GeometricState { n, gamma: log_gamma.exp() })
}

/// Geometric mean of a whole series via repeated updates.
pub fn geometric_mean(x: &Series) -> Result<f64> {
    x.values()
        .iter()
        .try_fold(GeometricState::empty(), |state, &v| geometric_mean_update(state, v))
        .map(|s| s.gamma)
}
