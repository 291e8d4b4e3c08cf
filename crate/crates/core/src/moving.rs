//! Limited-memory averages: the α-average restarted on every length-`N`
//! window, and the moving exponential average (MEA).

use crate::averages::{blend, Series, WeightSchedule};
use crate::error::{invalid, Error, Result};

/// `Δ^N_n` for every full window, `n = N ..= len`.
#[derive(Debug, Clone, PartialEq)]
pub struct MovingAverageSeries {
    window_length: usize,
    values: Vec<f64>,
}

impl MovingAverageSeries {
    pub fn window_length(&self) -> usize {
        self.window_length
    }

    /// Values ordered by window end; `values()[0]` is `Δ^N_N`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `Δ^N_n` for a 1-based window end `n ≥ N`.
    pub fn at(&self, n: usize) -> Option<f64> {
        n.checked_sub(self.window_length)
            .and_then(|i| self.values.get(i).copied())
    }

    pub fn limit(&self) -> f64 {
        *self.values.last().expect("moving series has at least one window")
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_window(len: usize, end: usize, window: usize) -> Result<()> {
    if window == 0 || end < window || end > len {
        return Err(Error::WindowOutOfRange { end, window, len });
    }
    Ok(())
}

fn window_recursion(window: &[f64], weights: &[f64]) -> f64 {
    window[1..]
        .iter()
        .zip(weights)
        .fold(window[0], |delta, (&x, &a)| blend(delta, a, x))
}

/// `δ^{(n),N}_N`: the α-average of `(x_{n−N+1}, …, x_n)`, `n` 1-based.
pub fn window_alpha_average(
    x: &Series,
    n: usize,
    window: usize,
    alpha: &WeightSchedule,
) -> Result<f64> {
    check_window(x.len(), n, window)?;
    let weights = alpha.take(window - 1)?;
    Ok(window_recursion(&x.values()[n - window..n], &weights))
}

/// The N-moving α-average `Δ^N`. Each window runs its own recursion.
pub fn moving_alpha_average(
    x: &Series,
    window: usize,
    alpha: &WeightSchedule,
) -> Result<MovingAverageSeries> {
    if window == 0 {
        return Err(invalid("window length must be at least 1"));
    }
    if x.len() < window {
        return Err(Error::SeriesTooShort { len: x.len(), required: window });
    }
    let weights = alpha.take(window - 1)?;
    let values = x
        .values()
        .windows(window)
        .map(|w| window_recursion(w, &weights))
        .collect();
    Ok(MovingAverageSeries { window_length: window, values })
}

/// Moving exponential average evaluated from its closed expansion
/// `(1−α)^{N−1} x_{n−N+1} + α Σ_{s=0}^{N−2} (1−α)^s x_{n−s}`.
pub fn mea(x: &Series, window: usize, alpha: f64) -> Result<MovingAverageSeries> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(invalid(format!("MEA needs 0 ≤ α < 1, got {alpha}")));
    }
    if window == 0 {
        return Err(invalid("window length must be at least 1"));
    }
    if x.len() < window {
        return Err(Error::SeriesTooShort { len: x.len(), required: window });
    }
    let keep = 1.0 - alpha;
    let values = x
        .values()
        .windows(window)
        .map(|w| {
            let mut decay = 1.0;
            let mut sum = 0.0;
            for &v in w[1..].iter().rev() {
                sum += decay * v;
                decay *= keep;
            }
            decay * w[0] + alpha * sum
        })
        .collect();
    Ok(MovingAverageSeries { window_length: window, values })
}
