//! Day-indexed closes, N-day EMA, MACD and the short/long signal.
//!
//! The N-day EMA is the full-history exponential average with weight
//! `ρ/(N+1)` (ρ = 2 by default). It is not restricted to a window: every
//! close seen so far contributes.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::averages::blend;
use crate::comparison::ReversedSeries;
use crate::error::{invalid, Error, Result};

pub const DEFAULT_RHO: f64 = 2.0;

/// Closes ordered youngest first, with optional per-day labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CloseSeries {
    closes: ReversedSeries,
    labels: Option<Vec<String>>,
}

fn check_close(index: usize, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { index });
    }
    if value < 0.0 {
        return Err(Error::NegativeClose { index, value });
    }
    Ok(())
}

impl CloseSeries {
    /// Builds from closes listed oldest first.
    pub fn from_chronological(closes: Vec<f64>) -> Result<Self> {
        if closes.is_empty() {
            return Err(Error::EmptySeries);
        }
        for (i, &c) in closes.iter().enumerate() {
            check_close(i, c)?;
        }
        Ok(Self {
            closes: ReversedSeries::from_chronological_unchecked(closes),
            labels: None,
        })
    }

    /// Builds from closes listed youngest first.
    pub fn from_youngest_first(mut closes: Vec<f64>) -> Result<Self> {
        closes.reverse();
        Self::from_chronological(closes)
    }

    /// Attaches labels given oldest first; one per close.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(invalid(format!(
                "{} labels for {} closes",
                labels.len(),
                self.len()
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    /// Adds the close of a new day; it becomes index 0.
    pub fn push_day(&mut self, close: f64, label: Option<String>) -> Result<()> {
        check_close(self.len(), close)?;
        match (&mut self.labels, label) {
            (Some(labels), Some(label)) => labels.push(label),
            (None, None) => {}
            _ => return Err(invalid("labels must be given for every day or for none")),
        }
        self.closes.push_newest(close);
        Ok(())
    }

    pub fn closes(&self) -> &ReversedSeries {
        &self.closes
    }

    /// Labels oldest first, when present.
    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }

    /// `c^{[k]}_0`, today's close.
    pub fn today(&self) -> f64 {
        self.closes.get(0).expect("close series is never empty")
    }
}

/// Weight of the N-day EMA under the `ρ/(N+1)` model.
pub fn ema_weight(length: usize, rho: f64) -> Result<f64> {
    if length == 0 {
        return Err(invalid("EMA length must be at least 1"));
    }
    let alpha = rho / (length as f64 + 1.0);
    // α = 1 (ρ = N+1) degenerates to "today's value" and is still a valid weight
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(invalid(format!(
            "EMA weight ρ/(N+1) = {alpha} outside (0, 1] for N={length}, ρ={rho}"
        )));
    }
    Ok(alpha)
}

fn ema_trace(chronological: &[f64], alpha: f64) -> Vec<f64> {
    let mut trace = Vec::with_capacity(chronological.len());
    let mut iter = chronological.iter();
    if let Some(&first) = iter.next() {
        let mut current = first;
        trace.push(current);
        for &x in iter {
            current = blend(current, alpha, x);
            trace.push(current);
        }
    }
    trace
}

fn ema_of(chronological: &[f64], alpha: f64) -> f64 {
    let (&first, rest) = chronological.split_first().expect("non-empty input");
    rest.iter().fold(first, |current, &x| blend(current, alpha, x))
}

/// `E^N_k(c)`: the N-day EMA of the full close history.
pub fn ema(c: &CloseSeries, length: usize, rho: f64) -> Result<f64> {
    let alpha = ema_weight(length, rho)?;
    Ok(ema_of(c.closes.as_chronological(), alpha))
}

/// The EMA of every prefix of the history; index 0 is today's EMA.
pub fn ema_series(c: &CloseSeries, length: usize, rho: f64) -> Result<ReversedSeries> {
    let alpha = ema_weight(length, rho)?;
    Ok(ReversedSeries::from_chronological_unchecked(ema_trace(
        c.closes.as_chronological(),
        alpha,
    )))
}

/// O(1)-per-close EMA. Owned by a single writer; snapshots are `Copy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmaStreamState {
    length: usize,
    alpha: f64,
    current: Option<f64>,
    count: usize,
}

impl EmaStreamState {
    pub fn new(length: usize, rho: f64) -> Result<Self> {
        Ok(Self {
            length,
            alpha: ema_weight(length, rho)?,
            current: None,
            count: 0,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `None` until the first close arrives.
    pub fn current(&self) -> Option<f64> {
        self.current
    }

    pub fn count(&self) -> usize {
        self.count
    }
}

pub fn ema_stream_update(state: EmaStreamState, close: f64) -> Result<EmaStreamState> {
    if !close.is_finite() {
        return Err(Error::NonFinite { index: state.count });
    }
    let current = match state.current {
        None => close,
        Some(previous) => blend(previous, state.alpha, close),
    };
    Ok(EmaStreamState {
        current: Some(current),
        count: state.count + 1,
        ..state
    })
}

/// Moving lengths and weight model for the MACD pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorConfig {
    /// Short EMA length N₁.
    pub n1: usize,
    /// Long EMA length N₂.
    pub n2: usize,
    /// Signal EMA length N₀.
    pub n0: usize,
    pub rho: f64,
}

impl Default for IndicatorConfig {
    fn default() -> Self {
        Self { n1: 12, n2: 26, n0: 9, rho: DEFAULT_RHO }
    }
}

impl IndicatorConfig {
    pub fn new(n1: usize, n2: usize, n0: usize, rho: f64) -> Result<Self> {
        let config = Self { n1, n2, n0, rho };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n0 == 0 || self.n1 == 0 || self.n2 == 0 {
            return Err(invalid("all moving lengths must be at least 1"));
        }
        if self.n1 >= self.n2 {
            return Err(invalid(format!(
                "short length N₁={} must be below long length N₂={}",
                self.n1, self.n2
            )));
        }
        let shortest = self.n0.min(self.n1) as f64;
        if !(self.rho > 0.0 && self.rho <= shortest + 1.0) {
            return Err(invalid(format!(
                "ρ={} must lie in (0, {}] so every EMA weight stays in (0, 1]",
                self.rho,
                shortest + 1.0
            )));
        }
        Ok(())
    }
}

/// MACD values ordered youngest first.
#[derive(Debug, Clone, PartialEq)]
pub struct MacdSeries {
    values: ReversedSeries,
}

impl MacdSeries {
    /// Wraps MACD values given oldest first.
    pub fn from_chronological(values: Vec<f64>) -> Result<Self> {
        let series = crate::averages::Series::new(values)?;
        Ok(Self {
            values: ReversedSeries::from_chronological_unchecked(series.into_inner()),
        })
    }

    pub fn values(&self) -> &ReversedSeries {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `M^{N₁,N₂}_k = E^{N₁}_k − E^{N₂}_k` for every day `k`.
pub fn macd(c: &CloseSeries, config: &IndicatorConfig) -> Result<MacdSeries> {
    config.validate()?;
    let short = ema_series(c, config.n1, config.rho)?;
    let long = ema_series(c, config.n2, config.rho)?;
    let values = short
        .as_chronological()
        .iter()
        .zip(long.as_chronological())
        .map(|(s, l)| s - l)
        .collect();
    Ok(MacdSeries {
        values: ReversedSeries::from_chronological_unchecked(values),
    })
}

/// Position of a day relative to the signal line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DayState {
    Short,
    Long,
    Flat,
}

impl DayState {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Short => "short",
            Self::Long => "long",
            Self::Flat => "flat",
        }
    }

    fn from_difference(diff: f64) -> Self {
        if diff > 0.0 {
            Self::Long
        } else if diff < 0.0 {
            Self::Short
        } else {
            Self::Flat
        }
    }
}

impl fmt::Display for DayState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `E^{N₀}_k(m)`, the N₀-day EMA of the MACD sequence, for every day.
pub fn signal_line(m: &MacdSeries, n0: usize, rho: f64) -> Result<ReversedSeries> {
    let alpha = ema_weight(n0, rho)?;
    Ok(ReversedSeries::from_chronological_unchecked(ema_trace(
        m.values.as_chronological(),
        alpha,
    )))
}

/// Today's MACD minus its N₀-day EMA, for every day, oldest first.
pub fn signal_differences(m: &MacdSeries, n0: usize, rho: f64) -> Result<Vec<f64>> {
    let signal = signal_line(m, n0, rho)?;
    Ok(m.values
        .as_chronological()
        .iter()
        .zip(signal.as_chronological())
        .map(|(v, s)| v - s)
        .collect())
}

/// N₀-short / N₀-long / flat for every day, oldest first.
pub fn classify_days(m: &MacdSeries, n0: usize, rho: f64) -> Result<Vec<DayState>> {
    Ok(signal_differences(m, n0, rho)?
        .into_iter()
        .map(DayState::from_difference)
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Buy,
    Sell,
}

impl SignalKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Buy => "buy",
            Self::Sell => "sell",
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A committed change of position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignalEvent {
    /// 1-based chronological day index.
    pub day_index: usize,
    pub kind: SignalKind,
    /// Last committed non-flat position before this day.
    pub position_before: DayState,
    pub position_after: DayState,
}

/// Buy on short→long, sell on long→short.
///
/// Flat days never emit and leave the committed position alone. The first
/// non-flat day only commits a position.
pub fn crossover_events(states: &[DayState]) -> Vec<SignalEvent> {
    let mut committed = DayState::Flat;
    let mut events = Vec::new();
    for (i, &state) in states.iter().enumerate() {
        if state == DayState::Flat {
            continue;
        }
        let kind = match (committed, state) {
            (DayState::Short, DayState::Long) => Some(SignalKind::Buy),
            (DayState::Long, DayState::Short) => Some(SignalKind::Sell),
            _ => None,
        };
        if let Some(kind) = kind {
            events.push(SignalEvent {
                day_index: i + 1,
                kind,
                position_before: committed,
                position_after: state,
            });
        }
        committed = state;
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use DayState::{Flat, Long, Short};

    fn closes(v: &[f64]) -> CloseSeries {
        CloseSeries::from_chronological(v.to_vec()).unwrap()
    }

    #[test]
    fn close_series_invariants() {
        assert!(CloseSeries::from_chronological(vec![]).is_err());
        assert!(matches!(
            CloseSeries::from_chronological(vec![1.0, -2.0]),
            Err(Error::NegativeClose { index: 1, .. })
        ));
        let mut c = closes(&[1.0, 2.0]);
        assert_eq!(c.today(), 2.0);
        c.push_day(3.0, None).unwrap();
        assert_eq!(c.closes().to_youngest_first(), vec![3.0, 2.0, 1.0]);
        assert!(c.push_day(-1.0, None).is_err());
        assert!(c.push_day(1.0, Some("x".into())).is_err());
        assert_eq!(CloseSeries::from_youngest_first(vec![3.0, 2.0, 1.0]).unwrap(), c);
    }

    #[test]
    fn ema_examples() {
        assert!((ema(&closes(&[7.0; 30]), 12, 2.0).unwrap() - 7.0).abs() < 1e-13);
        assert_eq!(ema(&closes(&[1.0, 2.0, 3.0]), 3, 2.0).unwrap(), 2.25);
        for n in [1usize, 2, 10, 100] {
            let c = CloseSeries::from_chronological((1..=n).map(|s| s as f64).collect()).unwrap();
            let expected = n as f64 - (1.0 - 0.5f64.powi(n as i32 - 1));
            assert!((ema(&c, 3, 2.0).unwrap() - expected).abs() < 1e-12);
        }
        assert!(ema_weight(0, 2.0).is_err());
        assert!(ema(&closes(&[1.0]), 1, 2.5).is_err());
        assert!(ema(&closes(&[1.0]), 3, 0.0).is_err());
    }

    #[test]
    fn ema_series_examples() {
        let s = ema_series(&closes(&[1.0, 2.0, 3.0]), 3, 2.0).unwrap();
        assert_eq!(s.to_youngest_first(), vec![2.25, 1.5, 1.0]);
        let s = ema_series(&closes(&[4.0]), 9, 2.0).unwrap();
        assert_eq!(s.to_youngest_first(), vec![4.0]);
    }

    #[test]
    fn stream_examples() {
        let s = ema_stream_update(EmaStreamState::new(3, 2.0).unwrap(), 100.0).unwrap();
        assert_eq!(s.current(), Some(100.0));
        let mut s = EmaStreamState::new(3, 2.0).unwrap();
        for x in [1.0, 2.0] {
            s = ema_stream_update(s, x).unwrap();
        }
        assert_eq!(s.current(), Some(1.5));
        let s = ema_stream_update(s, 3.0).unwrap();
        assert_eq!(s.current(), Some(2.25));
        assert_eq!(s.count(), 3);
        assert!(ema_stream_update(s, f64::INFINITY).is_err());
    }

    #[test]
    fn macd_examples() {
        let cfg = IndicatorConfig::default();
        let m = macd(&closes(&[5.0; 40]), &cfg).unwrap();
        assert!(m.values().iter().all(|v| v.abs() < 1e-12));

        let cfg = IndicatorConfig { n1: 1, n2: 3, n0: 1, rho: 2.0 };
        let m = macd(&closes(&[1.0, 2.0]), &cfg).unwrap();
        assert_eq!(m.values().get(0), Some(0.5));
    }

    #[test]
    fn config_validation() {
        assert_eq!(IndicatorConfig::default(), IndicatorConfig::new(12, 26, 9, 2.0).unwrap());
        assert!(IndicatorConfig::new(26, 12, 9, 2.0).is_err());
        assert!(IndicatorConfig::new(12, 12, 9, 2.0).is_err());
        assert!(IndicatorConfig::new(12, 26, 0, 2.0).is_err());
        assert!(IndicatorConfig::new(12, 26, 9, 0.0).is_err());
        assert!(IndicatorConfig::new(12, 26, 9, 11.0).is_err());
        assert!(IndicatorConfig::new(12, 26, 9, 4.7).is_ok());
    }

    #[test]
    fn classification() {
        let macd_const = MacdSeries {
            values: ReversedSeries::from_chronological_unchecked(vec![0.3; 10]),
        };
        assert!(classify_days(&macd_const, 9, 2.0).unwrap().iter().all(|&s| s == Flat));

        let rising = MacdSeries {
            values: ReversedSeries::from_chronological_unchecked((1..=30).map(f64::from).collect()),
        };
        let states = classify_days(&rising, 9, 2.0).unwrap();
        assert_eq!(states[0], Flat);
        assert!(states[1..].iter().all(|&s| s == Long));
    }

    #[test]
    fn events() {
        assert!(crossover_events(&[Flat, Flat, Flat]).is_empty());
        let ev = crossover_events(&[Short, Short, Long, Long, Short]);
        assert_eq!(ev.len(), 2);
        assert_eq!((ev[0].day_index, ev[0].kind), (3, SignalKind::Buy));
        assert_eq!((ev[1].day_index, ev[1].kind), (5, SignalKind::Sell));
        assert_eq!(ev[0].position_before, Short);
        assert_eq!(ev[0].position_after, Long);

        let ev = crossover_events(&[Flat, Short, Flat, Long]);
        assert_eq!(ev.len(), 1);
        assert_eq!((ev[0].day_index, ev[0].kind), (4, SignalKind::Buy));

        assert!(crossover_events(&[Flat, Long, Long]).is_empty());
    }
}
