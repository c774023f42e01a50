//! Small Monte Carlo reporting types shared by the estimators.

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub value: f64,
    pub std_error: f64,
    pub draws: u64,
}

impl MonteCarloEstimate {
    /// Estimate of a probability from a success count.
    pub fn from_proportion(successes: u64, draws: u64) -> Self {
        let p = successes as f64 / draws as f64;
        Self {
            value: p,
            std_error: (p * (1.0 - p) / draws as f64).sqrt(),
            draws,
        }
    }

    /// Mean and standard error of a sample of values.
    pub fn from_values(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0).max(1.0);
        Self {
            value: mean,
            std_error: (var / n).sqrt(),
            draws: values.len() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_se() {
        let e = MonteCarloEstimate::from_proportion(40, 1000);
        assert!((e.value - 0.04).abs() < 1e-12);
        assert!((e.std_error - (0.04f64 * 0.96 / 1000.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn values_mean() {
        let e = MonteCarloEstimate::from_values(&[1.0, 2.0, 3.0]);
        assert!((e.value - 2.0).abs() < 1e-12);
        assert!((e.std_error - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
