//! Reference values for tests: closed forms on `x_s = s`, the decaying
//! sequence `x_s = (1/s)(1−β)^s`, and a brute-force weighted sum.
//!
//! `brute_force_average` recomputes every weight from its product
//! definition (O(n²)) and sums with Neumaier compensation, so it shares no
//! code path with the recursion or with `expanded_weights`.
//!
//! Averages of the decaying sequence have no trusted closed form and are
//! only ever compared against `brute_force_average`.

use crate::averages::{Series, WeightSchedule};
use crate::error::{invalid, Result};

/// Weight families with a closed form on `x_s = s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleFamily {
    Arithmetic,
    Weighted,
    Exponential(f64),
}

impl OracleFamily {
    pub fn schedule(self) -> WeightSchedule {
        match self {
            Self::Arithmetic => WeightSchedule::Arithmetic,
            Self::Weighted => WeightSchedule::WeightedArithmetic,
            Self::Exponential(alpha) => WeightSchedule::Constant(alpha),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceKind {
    /// `x_s = s`.
    Linear,
    /// `x_s = (1/s)(1−β)^s`, `0 < β < 1`.
    Decaying(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleCase {
    pub family: OracleFamily,
    pub sequence_kind: SequenceKind,
    pub n: usize,
}

impl OracleCase {
    pub fn new(family: OracleFamily, sequence_kind: SequenceKind, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("oracle cases need n ≥ 1"));
        }
        if let SequenceKind::Decaying(beta) = sequence_kind {
            check_beta(beta)?;
        }
        if let OracleFamily::Exponential(alpha) = family {
            check_exponential(alpha)?;
        }
        Ok(Self { family, sequence_kind, n })
    }

    /// `x_1 … x_n`.
    pub fn sequence(&self) -> Result<Series> {
        match self.sequence_kind {
            SequenceKind::Linear => Series::from_fn(self.n, |s| s as f64),
            SequenceKind::Decaying(beta) => {
                let values = (1..=self.n)
                    .map(|s| decaying_sequence_value(s, beta))
                    .collect::<Result<Vec<_>>>()?;
                Series::new(values)
            }
        }
    }

    /// The value `δ_n` should take: the closed form on linear data, the
    /// brute-force sum otherwise.
    pub fn expected(&self) -> Result<f64> {
        match self.sequence_kind {
            SequenceKind::Linear => closed_form_linear(self.family, self.n),
            SequenceKind::Decaying(_) => brute_force_average(&self.sequence()?, &self.family.schedule()),
        }
    }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("decaying sequence needs 0 < β < 1, got {beta}")))
    }
}

fn check_exponential(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("exponential closed form needs 0 < α < 1, got {alpha}")))
    }
}

/// `δ_n` of the family on `x_s = s`.
pub fn closed_form_linear(family: OracleFamily, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("closed forms are defined for n ≥ 1"));
    }
    let nf = n as f64;
    Ok(match family {
        OracleFamily::Arithmetic => (nf + 1.0) / 2.0,
        OracleFamily::Weighted => (2.0 * nf + 1.0) / 3.0,
        OracleFamily::Exponential(alpha) => {
            check_exponential(alpha)?;
            let keep = 1.0 - alpha;
            nf - keep / alpha * (1.0 - keep.powi(n as i32 - 1))
        }
    })
}

pub fn decaying_sequence_value(s: usize, beta: f64) -> Result<f64> {
    check_beta(beta)?;
    if s == 0 {
        return Err(invalid("sequence is indexed from 1"));
    }
    Ok((1.0 - beta).powi(s as i32) / s as f64)
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// `Σ_r α̂^{(n)}_r x_r` with each weight taken straight from its product
/// definition.
pub fn brute_force_average(x: &Series, alpha: &WeightSchedule) -> Result<f64> {
    let n = x.len();
    let a = alpha.take(n - 1)?;
    let weight = |r: usize| -> f64 {
        // r is 1-based; α̂_1 = ∏_{s=1}^{n−1}(1−α_s), α̂_r = α_{r−1} ∏_{s=r}^{n−1}(1−α_s)
        let lead = if r == 1 { 1.0 } else { a[r - 2] };
        let start = if r == 1 { 1 } else { r };
        (start..n).fold(lead, |p, s| p * (1.0 - a[s - 1]))
    };
    Ok(x
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| weight(i + 1) * v)
        .collect::<CompensatedSum>()
        .value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::averages::alpha_average;

    #[test]
    fn closed_form_examples() {
        assert_eq!(closed_form_linear(OracleFamily::Arithmetic, 9).unwrap(), 5.0);
        assert_eq!(closed_form_linear(OracleFamily::Weighted, 4).unwrap(), 3.0);
        for alpha in [0.1, 0.5, 0.9] {
            assert_eq!(closed_form_linear(OracleFamily::Exponential(alpha), 1).unwrap(), 1.0);
        }
        assert!(closed_form_linear(OracleFamily::Exponential(0.0), 3).is_err());
        assert!(closed_form_linear(OracleFamily::Exponential(1.0), 3).is_err());
        assert!(closed_form_linear(OracleFamily::Arithmetic, 0).is_err());
    }

    #[test]
    fn brute_force_examples() {
        let x = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!((brute_force_average(&x, &WeightSchedule::Arithmetic).unwrap() - 2.0).abs() < 1e-15);
        let one = Series::new(vec![-3.5]).unwrap();
        assert_eq!(brute_force_average(&one, &WeightSchedule::Constant(0.3)).unwrap(), -3.5);
    }

    #[test]
    fn decaying_values() {
        assert_eq!(decaying_sequence_value(1, 0.5).unwrap(), 0.5);
        assert_eq!(decaying_sequence_value(2, 0.5).unwrap(), 0.125);
        assert!(decaying_sequence_value(1, 0.0).is_err());
        assert!(decaying_sequence_value(1, 1.0).is_err());
        assert!(decaying_sequence_value(0, 0.5).is_err());
    }

    #[test]
    fn decaying_weighted_average_checks_against_summation() {
        let case = OracleCase::new(OracleFamily::Weighted, SequenceKind::Decaying(0.1), 20).unwrap();
        let x = case.sequence().unwrap();
        // weighted mean: 2/(n(n+1)) Σ s·x_s = 2/(n(n+1)) Σ (1−β)^s
        let direct: f64 = (1..=20).map(|s| 0.9f64.powi(s)).sum::<f64>() * 2.0 / (20.0 * 21.0);
        let expected = case.expected().unwrap();
        assert!((expected - direct).abs() < 1e-15);
        let got = alpha_average(&x, &WeightSchedule::WeightedArithmetic).unwrap().limit();
        assert!((got - expected).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let s: CompensatedSum = [1.0, 1e100, 1.0, -1e100].into_iter().collect();
        assert_eq!(s.value(), 2.0);
    }
}
