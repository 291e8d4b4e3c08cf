//! Exponential average versus moving exponential average.
//!
//! Sequences here are indexed youngest first: `y_0` is the newest
//! observation and `y_{n−1}` the oldest. Formally infinite sums are
//! truncated at the end of the data, where the oldest element carries the
//! remaining weight `(1−α)^{len−1}`, exactly as in the finite exponential
//! average. With that convention every quantity below is an honest
//! α-average of the data it covers.
//!
//! Dropping that terminal weight gives a plain truncated sum whose weights
//! no longer add to one; it is not exposed here.

use crate::averages::Series;
use crate::error::{invalid, Error, Result};

/// A sequence ordered youngest first.
///
/// Storage is chronological so that appending a new day is a push; index
/// `k` addresses the element `k` days before the newest one.
#[derive(Debug, Clone, PartialEq)]
pub struct ReversedSeries {
    chronological: Vec<f64>,
}

impl ReversedSeries {
    /// Builds from values listed youngest first.
    pub fn from_youngest_first(values: Vec<f64>) -> Result<Self> {
        let mut series = Series::new(values)?.into_inner();
        series.reverse();
        Ok(Self { chronological: series })
    }

    pub(crate) fn from_chronological_unchecked(chronological: Vec<f64>) -> Self {
        Self { chronological }
    }

    /// `y_k`, the value `k` steps back from the newest.
    pub fn get(&self, k: usize) -> Option<f64> {
        let n = self.chronological.len();
        (k < n).then(|| self.chronological[n - 1 - k])
    }

    pub fn len(&self) -> usize {
        self.chronological.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chronological.is_empty()
    }

    /// Youngest-first iteration.
    pub fn iter(&self) -> impl DoubleEndedIterator<Item = f64> + ExactSizeIterator + '_ {
        self.chronological.iter().rev().copied()
    }

    pub fn to_youngest_first(&self) -> Vec<f64> {
        self.iter().collect()
    }

    /// Oldest-first view of the same data.
    pub fn as_chronological(&self) -> &[f64] {
        &self.chronological
    }

    /// New youngest element; every existing index shifts by one.
    pub fn push_newest(&mut self, value: f64) {
        self.chronological.push(value);
    }

    pub fn to_series(&self) -> Series {
        Series::new(self.chronological.clone()).expect("reversed series holds finite data")
    }
}

/// `y_k := x_{n−k}` (zero-based on the reversed side).
pub fn reverse(x: &Series) -> ReversedSeries {
    ReversedSeries { chronological: x.values().to_vec() }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(invalid(format!("exponential weight needs 0 ≤ α < 1, got {alpha}")))
    }
}

/// Finite exponential average of `y_start, y_{start+1}, …` with the oldest
/// element absorbing the residual weight.
fn truncated_ea(y: &ReversedSeries, start: usize, alpha: f64) -> f64 {
    let tail: Vec<f64> = y.iter().skip(start).collect();
    let (oldest, newer) = tail.split_last().expect("caller guarantees a non-empty tail");
    let keep = 1.0 - alpha;
    let mut decay = 1.0;
    let mut sum = 0.0;
    for &v in newer {
        sum += decay * v;
        decay *= keep;
    }
    decay * oldest + alpha * sum
}

/// Limit exponential average `δ̄` of the whole reversed sequence.
pub fn limit_ea(y: &ReversedSeries, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if y.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(truncated_ea(y, 0, alpha))
}

/// Limit MEA `Δ̄^N`, the exponential average of the newest `N` values.
pub fn limit_mea(y: &ReversedSeries, window: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_window(y, window)?;
    let head = ReversedSeries::from_chronological_unchecked(
        y.as_chronological()[y.len() - window..].to_vec(),
    );
    Ok(truncated_ea(&head, 0, alpha))
}

/// `α Σ_{s≥0} (1−α)^s y_{N+s}` over the available data, or `None` when the
/// sequence has no element older than `y_{N−1}`.
pub fn tail_average(y: &ReversedSeries, window: usize, alpha: f64) -> Result<Option<f64>> {
    check_alpha(alpha)?;
    Ok((y.len() > window).then(|| truncated_ea(y, window, alpha)))
}

fn check_window(y: &ReversedSeries, window: usize) -> Result<()> {
    if window == 0 {
        return Err(invalid("moving length must be at least 1"));
    }
    if y.len() < window {
        return Err(Error::SeriesTooShort { len: y.len(), required: window });
    }
    Ok(())
}

/// `δ̄ − Δ̄^N` evaluated two ways.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EaMeaDifference {
    /// `limit_ea − limit_mea`.
    pub direct: f64,
    /// `(1−α)^N (tail_average − y_{N−1})`; zero when there is no tail.
    pub factored: f64,
}

impl EaMeaDifference {
    pub fn value(&self) -> f64 {
        self.direct
    }

    pub fn discrepancy(&self) -> f64 {
        (self.direct - self.factored).abs()
    }
}

pub fn ea_mea_difference(y: &ReversedSeries, window: usize, alpha: f64) -> Result<EaMeaDifference> {
    check_alpha(alpha)?;
    check_window(y, window)?;
    let direct = limit_ea(y, alpha)? - limit_mea(y, window, alpha)?;
    let factored = match tail_average(y, window, alpha)? {
        Some(tail) => {
            let window_oldest = y.get(window - 1).expect("window checked");
            (1.0 - alpha).powi(window as i32) * (tail - window_oldest)
        }
        None => 0.0,
    };
    Ok(EaMeaDifference { direct, factored })
}

/// Admissibility diagnostics for a reversed sequence and moving length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub tail_average: f64,
    pub delta_bar: f64,
    /// `|tail_average − δ̄| / |δ̄|`.
    pub relative_gap_tail: f64,
    /// `|δ̄ − y_N| / |δ̄|`.
    pub relative_gap_yn: f64,
    pub admissible: bool,
}

pub const DEFAULT_ADMISSIBILITY_TOLERANCE: f64 = 0.05;

/// Tests whether the tail average is within `epsilon` (relative) of `δ̄`
/// and `y_N` stays within `|δ̄|` of it.
pub fn check_admissibility(
    y: &ReversedSeries,
    window: usize,
    alpha: f64,
    epsilon: f64,
) -> Result<AdmissibilityReport> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(invalid(format!("tolerance must be non-negative, got {epsilon}")));
    }
    check_alpha(alpha)?;
    if window == 0 {
        return Err(invalid("moving length must be at least 1"));
    }
    if y.len() <= window {
        return Err(Error::SeriesTooShort { len: y.len(), required: window + 1 });
    }
    let delta_bar = limit_ea(y, alpha)?;
    if delta_bar == 0.0 {
        return Err(Error::ZeroAverage);
    }
    let tail = truncated_ea(y, window, alpha);
    let y_n = y.get(window).expect("length checked");
    let relative_gap_tail = (tail - delta_bar).abs() / delta_bar.abs();
    let relative_gap_yn = (delta_bar - y_n).abs() / delta_bar.abs();
    Ok(AdmissibilityReport {
        tail_average: tail,
        delta_bar,
        relative_gap_tail,
        relative_gap_yn,
        admissible: relative_gap_tail <= epsilon && relative_gap_yn < 1.0,
    })
}

/// `(1−α)^N`, the relative error bound between limit EA and limit MEA.
pub fn relative_error_bound(alpha: f64, window: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if window == 0 {
        return Err(invalid("moving length must be at least 1"));
    }
    Ok((1.0 - alpha).powi(window as i32))
}

/// Whether `(1 − ρ/(N+1))^N ≤ e^{−ρ}` holds.
///
/// The inequality holds for `ρ` from roughly 2 upwards but fails for small
/// `ρ` (a first-order expansion of the log gives `ρ/(N+1) − Nρ²/(2(N+1)²)`,
/// positive near zero), so callers get an honest `false` there.
pub fn rho_bound_check(rho: f64, window: usize) -> Result<bool> {
    if window == 0 {
        return Err(invalid("moving length must be at least 1"));
    }
    let limit = window as f64 + 1.0;
    if !(rho > 0.0 && rho <= limit) {
        return Err(invalid(format!("ρ must lie in (0, N+1] = (0, {limit}], got {rho}")));
    }
    Ok(rho_model_bound(rho, window) <= (-rho).exp())
}

/// `(1 − ρ/(N+1))^N`.
pub fn rho_model_bound(rho: f64, window: usize) -> f64 {
    (1.0 - rho / (window as f64 + 1.0)).powi(window as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rev(v: &[f64]) -> ReversedSeries {
        ReversedSeries::from_youngest_first(v.to_vec()).unwrap()
    }

    #[test]
    fn reversal() {
        let x = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        let y = reverse(&x);
        assert_eq!(y.to_youngest_first(), vec![3.0, 2.0, 1.0]);
        assert_eq!(y.get(0), Some(3.0));
        assert_eq!(y.get(2), Some(1.0));
        assert_eq!(y.get(3), None);
        assert_eq!(y.to_series(), x);
        assert_eq!(reverse(&Series::new(vec![5.0]).unwrap()).to_youngest_first(), vec![5.0]);
        assert!(ReversedSeries::from_youngest_first(vec![]).is_err());
    }

    #[test]
    fn push_shifts_indices() {
        let mut y = rev(&[2.0, 1.0]);
        y.push_newest(3.0);
        assert_eq!(y.to_youngest_first(), vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn limit_ea_examples() {
        assert_eq!(limit_ea(&rev(&[3.0, 2.0, 1.0]), 0.5).unwrap(), 2.25);
        assert!((limit_ea(&rev(&[6.0; 9]), 0.3).unwrap() - 6.0).abs() < 1e-14);
        assert_eq!(limit_ea(&rev(&[5.0, 4.0, 9.0]), 0.0).unwrap(), 9.0);
        assert!(limit_ea(&rev(&[1.0]), 1.0).is_err());
    }

    #[test]
    fn difference_examples() {
        let d = ea_mea_difference(&rev(&[3.0, 2.0, 1.0]), 2, 0.5).unwrap();
        assert_eq!(d.direct, -0.25);
        assert_eq!(d.factored, -0.25);
        let d = ea_mea_difference(&rev(&[2.0; 12]), 5, 0.2).unwrap();
        assert!(d.direct.abs() < 1e-14 && d.factored.abs() < 1e-14);
        let d = ea_mea_difference(&rev(&[4.0, 1.0, 7.0]), 3, 0.4).unwrap();
        assert_eq!(d.direct, 0.0);
        assert_eq!(d.factored, 0.0);
        assert!(ea_mea_difference(&rev(&[1.0, 2.0]), 3, 0.5).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let r = check_admissibility(&rev(&[3.0; 20]), 4, 0.2, 1e-9).unwrap();
        assert!(r.admissible);
        assert!(r.relative_gap_tail < 1e-14 && r.relative_gap_yn < 1e-14);

        let mut spike = vec![0.0; 10];
        spike[0] = 1.0;
        let r = check_admissibility(&rev(&spike), 2, 0.5, 0.5).unwrap();
        assert_eq!(r.tail_average, 0.0);
        assert!(r.delta_bar > 0.0);
        assert_eq!(r.relative_gap_tail, 1.0);
        assert!(!r.admissible);

        let slow: Vec<f64> = (0..400).map(|s| 100.0 + (s as f64 / 50.0).sin()).collect();
        let r = check_admissibility(&rev(&slow), 12, 2.0 / 13.0, 0.05).unwrap();
        assert!(r.admissible, "{r:?}");

        assert_eq!(check_admissibility(&rev(&[0.0; 5]), 2, 0.5, 0.05), Err(Error::ZeroAverage));
        assert!(check_admissibility(&rev(&[1.0, 2.0]), 2, 0.5, 0.05).is_err());
    }

    #[test]
    fn bounds() {
        let b = relative_error_bound(2.0 / 13.0, 12).unwrap();
        assert!((b - 0.1347076).abs() < 1e-7);
        assert!(b < (-2.0f64).exp());
        assert_eq!(relative_error_bound(0.0, 7).unwrap(), 1.0);
        assert!(relative_error_bound(1.0, 7).is_err());
        assert!((-4.7f64).exp() < 0.01);

        assert!(rho_bound_check(2.0, 12).unwrap());
        assert!(rho_bound_check(2.0, 1).unwrap());
        assert!(rho_bound_check(4.7, 50).unwrap());
        assert!(!rho_bound_check(0.1, 1).unwrap());
        assert!(rho_bound_check(3.0, 1).is_err());
        assert!(rho_bound_check(0.0, 5).is_err());
    }
}
