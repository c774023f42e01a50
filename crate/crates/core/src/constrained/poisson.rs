//! Poisson rate constrained to an interval: gamma-prior elicitation and the
//! cell-based bias estimators. The sufficient statistic is the sum of the n
//! counts, handled on the sample-mean scale with cells of width delta
//! aligned with the rate grid, so the meaningful difference enters the
//! estimator the same way it enters the inference.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stats::special::{gamma_cdf, poisson_cdf};
use crate::stats::{bisect_expanding, draw_gamma, draw_poisson, RandomSource};

const BLOCK: u64 = 8192;

/// Problem setup for the constrained rate.
#[derive(Debug, Clone, Copy)]
pub struct ConstrainedPoissonSpec {
    pub l0: f64,
    pub u0: f64,
    pub l1: f64,
    pub u1: f64,
    pub m0: f64,
    pub gamma: f64,
    pub n: u32,
    pub delta: f64,
}

impl ConstrainedPoissonSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        l0: f64,
        u0: f64,
        l1: f64,
        u1: f64,
        m0: f64,
        gamma: f64,
        n: u32,
        delta: f64,
    ) -> Result<Self> {
        if !(0.0 < l0 && l0 < l1 && l1 < u1 && u1 < u0) {
            return Err(Error::Domain(format!(
                "need 0 < l0 < l1 < u1 < u0, got l0={l0}, l1={l1}, u1={u1}, u0={u0}"
            )));
        }
        if !(m0 > l1 && m0 < u1) {
            return Err(Error::Domain(format!(
                "prior mode {m0} must lie inside ({l1}, {u1})"
            )));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!("gamma must be in (0,1), got {gamma}")));
        }
        if n == 0 || !(delta > 0.0) {
            return Err(Error::Domain("need n >= 1 and delta > 0".into()));
        }
        Ok(Self {
            l0,
            u0,
            l1,
            u1,
            m0,
            gamma,
            n,
            delta,
        })
    }

    pub fn with_n(&self, n: u32) -> Self {
        Self { n, ..*self }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }

    /// Rate-grid midpoints l0 + (i - 1/2) delta covering the support.
    pub fn grid_midpoints(&self) -> Vec<f64> {
        let count = ((self.u0 - self.l0) / self.delta).round().max(1.0) as usize;
        (0..count)
            .map(|i| self.l0 + (i as f64 + 0.5) * self.delta)
            .collect()
    }
}

/// Elicit the gamma-rate prior: the mode fixes the shape through
/// alpha0 = 1 + m0 beta0, and beta0 is solved so (l1, u1) carries gamma.
pub fn elicit_gamma(spec: &ConstrainedPoissonSpec) -> Result<(f64, f64)> {
    let content = |beta0: f64| -> f64 {
        let alpha0 = 1.0 + spec.m0 * beta0;
        gamma_cdf(spec.u1, alpha0, beta0).unwrap_or(f64::NAN)
            - gamma_cdf(spec.l1, alpha0, beta0).unwrap_or(f64::NAN)
    };
    // Content of the certainty interval grows with beta0 (the prior
    // concentrates around its fixed mode).
    let beta0 = bisect_expanding(|b| content(b) - spec.gamma, 1e-6, 1.0, 1e7, 1e-10)
        .map_err(|_| {
            Error::Elicitation(format!(
                "no gamma prior with mode {} puts probability {} on ({}, {})",
                spec.m0, spec.gamma, spec.l1, spec.u1
            ))
        })?;
    Ok((1.0 + spec.m0 * beta0, beta0))
}

/// Prior weights of the rate-grid cells under the gamma prior truncated and
/// renormalized to the support.
pub fn grid_prior_weights(
    spec: &ConstrainedPoissonSpec,
    alpha0: f64,
    beta0: f64,
) -> Result<Vec<f64>> {
    let total = gamma_cdf(spec.u0, alpha0, beta0)? - gamma_cdf(spec.l0, alpha0, beta0)?;
    spec.grid_midpoints()
        .iter()
        .map(|&m| {
            let lo = gamma_cdf((m - spec.delta / 2.0).max(spec.l0), alpha0, beta0)?;
            let hi = gamma_cdf((m + spec.delta / 2.0).min(spec.u0), alpha0, beta0)?;
            Ok((hi - lo) / total)
        })
        .collect()
}

/// First count value at or above x, tolerating float fuzz on exact edges.
fn lattice_ceil(x: f64) -> i64 {
    (x - 1e-9).ceil() as i64
}

/// Binned sample of the prior predictive of the sample mean.
///
/// The bins are a fine partition of the data range, exactly as in the
/// constrained-normal case; the count lattice is respected by computing every
/// exact bin probability as a Poisson count-range probability.
#[derive(Debug, Clone)]
pub struct PoissonHistogram {
    start: f64,
    width: f64,
    n: u32,
    counts: Vec<u64>,
    total: u64,
}

impl PoissonHistogram {
    /// Simulate `draws` of (lambda ~ truncated prior, T ~ Poisson(n lambda))
    /// and bin the sample mean T/n over (l0 - 3 se, u0 + 3 se) with k bins,
    /// where se is the sampling spread at the upper support end.
    pub fn build(
        spec: &ConstrainedPoissonSpec,
        alpha0: f64,
        beta0: f64,
        draws: u64,
        k: usize,
        src: &RandomSource,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("need at least 2 bins, got {k}")));
        }
        let pad = 3.0 * (spec.u0 / spec.n as f64).sqrt();
        let start = (spec.l0 - pad).max(0.0);
        let end = spec.u0 + pad;
        let width = (end - start) / k as f64;
        let n = spec.n;
        let blocks = draws.div_ceil(BLOCK);
        let counts = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut local = src.fork(b);
                let take = BLOCK.min(draws - b * BLOCK);
                let mut counts = vec![0u64; k];
                for _ in 0..take {
                    let lambda = loop {
                        let l = draw_gamma(&mut local, alpha0, beta0).expect("validated");
                        if l > spec.l0 && l < spec.u0 {
                            break l;
                        }
                    };
                    let t = draw_poisson(&mut local, n as f64 * lambda).expect("validated");
                    let xbar = t as f64 / n as f64;
                    let idx = ((xbar - start) / width).floor();
                    if idx >= 0.0 && (idx as usize) < k {
                        counts[idx as usize] += 1;
                    }
                }
                counts
            })
            .reduce(
                || vec![0u64; k],
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            );
        Ok(Self {
            start,
            width,
            n,
            counts,
            total: draws,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }

    /// Exact probability of the sample mean landing in bin j when the rate
    /// is lambda: a count range of the Poisson(n lambda) total.
    fn bin_prob(&self, j: usize, lambda: f64) -> f64 {
        let n = self.n as f64;
        let lo = n * (self.start + j as f64 * self.width);
        let hi = n * (self.start + (j + 1) as f64 * self.width);
        let mean = n * lambda;
        poisson_cdf(lattice_ceil(hi) - 1, mean) - poisson_cdf(lattice_ceil(lo) - 1, mean)
    }

    /// Estimated probability, when `lambda_star` is true, of the data
    /// landing where the evidence goes against `lambda_star` (ratio <= 1,
    /// ties on the against side; empty bins never contribute).
    pub fn bias_against(&self, lambda_star: f64) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.counts.len() {
            let p = self.bin_prob(j, lambda_star);
            let q = self.counts[j] as f64 / self.total as f64;
            if p <= q {
                sum += p;
            }
        }
        sum
    }

    /// Estimated probability, when the truth sits at `alt`, of the data
    /// landing where the evidence still favors `lambda_star` (ratio >= 1).
    pub fn favor_probability(&self, lambda_star: f64, alt: f64) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.counts.len() {
            let p = self.bin_prob(j, lambda_star);
            let q = self.counts[j] as f64 / self.total as f64;
            if q > 0.0 && p >= q {
                sum += self.bin_prob(j, alt);
            }
        }
        sum
    }

    /// Bias in favor at difference delta: the larger favor probability over
    /// the alternatives clipped to the support.
    pub fn bias_in_favor(&self, spec: &ConstrainedPoissonSpec, lambda_star: f64, delta: f64) -> f64 {
        let lo_alt = (lambda_star - delta / 2.0).clamp(spec.l0, spec.u0);
        let hi_alt = (lambda_star + delta / 2.0).clamp(spec.l0, spec.u0);
        self.favor_probability(lambda_star, lo_alt)
            .max(self.favor_probability(lambda_star, hi_alt))
    }
}

/// One-shot bias against `lambda_star` (builds a fresh histogram; use
/// [`PoissonHistogram`] directly to amortize it across evaluations).
pub fn poisson_bias_against(
    spec: &ConstrainedPoissonSpec,
    alpha0: f64,
    beta0: f64,
    lambda_star: f64,
    draws: u64,
    k: usize,
    src: &RandomSource,
) -> Result<f64> {
    Ok(PoissonHistogram::build(spec, alpha0, beta0, draws, k, src)?.bias_against(lambda_star))
}

/// One-shot bias in favor of `lambda_star` at difference delta.
#[allow(clippy::too_many_arguments)]
pub fn poisson_bias_in_favor(
    spec: &ConstrainedPoissonSpec,
    alpha0: f64,
    beta0: f64,
    lambda_star: f64,
    delta: f64,
    draws: u64,
    k: usize,
    src: &RandomSource,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "meaningful difference must be positive, got {delta}"
        )));
    }
    Ok(PoissonHistogram::build(spec, alpha0, beta0, draws, k, src)?
        .bias_in_favor(spec, lambda_star, delta))
}

/// Frequentist lower bound and Bayesian coverage per sample size, maximizing
/// and prior-averaging the bias-against curve over the rate grid.
pub fn poisson_confidence_table(
    spec: &ConstrainedPoissonSpec,
    alpha0: f64,
    beta0: f64,
    n_list: &[u32],
    draws: u64,
    k_for: impl Fn(u32) -> usize,
    src: &RandomSource,
) -> Result<Vec<super::ConfidenceRow>> {
    n_list
        .iter()
        .enumerate()
        .map(|(i, &n)| {
            let spec_n = spec.with_n(n);
            let hist = PoissonHistogram::build(
                &spec_n,
                alpha0,
                beta0,
                draws,
                k_for(n),
                &RandomSource::new(src.seed(), src.stream() + i as u64),
            )?;
            let weights = grid_prior_weights(&spec_n, alpha0, beta0)?;
            let mut max_bias = f64::NEG_INFINITY;
            let mut avg_bias = 0.0;
            for (m, w) in spec_n.grid_midpoints().iter().zip(&weights) {
                let b = hist.bias_against(*m);
                max_bias = max_bias.max(b);
                avg_bias += b * w;
            }
            Ok(super::ConfidenceRow {
                n,
                frequentist: 1.0 - max_bias,
                bayesian: 1.0 - avg_bias,
            })
        })
        .collect()
}

/// Prior-averaged bias in favor (the estimation variant) over the rate grid.
pub fn estimation_bias_in_favor(
    spec: &ConstrainedPoissonSpec,
    alpha0: f64,
    beta0: f64,
    hist: &PoissonHistogram,
    delta: f64,
) -> Result<f64> {
    let weights = grid_prior_weights(spec, alpha0, beta0)?;
    Ok(spec
        .grid_midpoints()
        .iter()
        .zip(&weights)
        .map(|(m, w)| hist.bias_in_favor(spec, *m, delta) * w)
        .sum())
}
