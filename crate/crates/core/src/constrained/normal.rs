//! Normal mean constrained to an interval: prior elicitation and the
//! histogram bias estimators behind the confidence and accuracy tables.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::stats::special::{beta_cdf, normal_cdf};
use crate::stats::{bisect_expanding, draw_beta, draw_normal, RandomSource};

const BLOCK: u64 = 8192;

/// Problem setup: support bounds, virtual-certainty interval, prior mode,
/// certainty level, sampling variance, sample size, and the meaningful
/// difference that sets the parameter grid.
#[derive(Debug, Clone, Copy)]
pub struct ConstrainedNormalSpec {
    pub l0: f64,
    pub u0: f64,
    pub l1: f64,
    pub u1: f64,
    pub m0: f64,
    pub gamma: f64,
    pub sigma0_sq: f64,
    pub n: u32,
    pub delta: f64,
}

impl ConstrainedNormalSpec {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        l0: f64,
        u0: f64,
        l1: f64,
        u1: f64,
        m0: f64,
        gamma: f64,
        sigma0_sq: f64,
        n: u32,
        delta: f64,
    ) -> Result<Self> {
        if !(l0 < u0) || !(l0 <= l1 && l1 < u1 && u1 <= u0) {
            return Err(Error::Domain(format!(
                "need l0 <= l1 < u1 <= u0, got l0={l0}, l1={l1}, u1={u1}, u0={u0}"
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
        // Solvability for a proper certainty interval; the degenerate case
        // (l1, u1) = (l0, u0) is allowed and elicits the uniform prior.
        let full_interval = l1 == l0 && u1 == u0;
        if !full_interval && (u1 - l1) / (u0 - l0) > gamma {
            return Err(Error::Domain(format!(
                "no prior in these families can put only {gamma} on ({l1}, {u1}): the interval fills more than gamma of the support"
            )));
        }
        if !(sigma0_sq > 0.0) || n == 0 || !(delta > 0.0) {
            return Err(Error::Domain(
                "need sigma0_sq > 0, n >= 1, delta > 0".into(),
            ));
        }
        Ok(Self {
            l0,
            u0,
            l1,
            u1,
            m0,
            gamma,
            sigma0_sq,
            n,
            delta,
        })
    }

    pub fn with_n(&self, n: u32) -> Self {
        Self { n, ..*self }
    }

    /// Standard error of the sample mean.
    pub fn se(&self) -> f64 {
        (self.sigma0_sq / self.n as f64).sqrt()
    }

    /// Grid midpoints l0 + (i - 1/2) delta covering the support.
    pub fn grid_midpoints(&self) -> Vec<f64> {
        let count = ((self.u0 - self.l0) / self.delta).round().max(1.0) as usize;
        (0..count)
            .map(|i| self.l0 + (i as f64 + 0.5) * self.delta)
            .collect()
    }
}

/// An elicited prior for the constrained mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstrainedPrior {
    /// A beta(alpha0, beta0) carried onto (l0, u0).
    BetaOnInterval { alpha0: f64, beta0: f64 },
    /// A normal(mu0, tau0^2) truncated to (l0, u0).
    TruncatedNormal { mu0: f64, tau0: f64 },
}

impl ConstrainedPrior {
    /// cdf on (l0, u0), normalized to 1 at u0.
    pub fn cdf(&self, spec: &ConstrainedNormalSpec, x: f64) -> Result<f64> {
        let x = x.clamp(spec.l0, spec.u0);
        match *self {
            ConstrainedPrior::BetaOnInterval { alpha0, beta0 } => {
                beta_cdf((x - spec.l0) / (spec.u0 - spec.l0), alpha0, beta0)
            }
            ConstrainedPrior::TruncatedNormal { mu0, tau0 } => {
                let lo = normal_cdf((spec.l0 - mu0) / tau0);
                let hi = normal_cdf((spec.u0 - mu0) / tau0);
                Ok((normal_cdf((x - mu0) / tau0) - lo) / (hi - lo))
            }
        }
    }

    /// Prior mass of [lo, hi].
    pub fn interval_mass(&self, spec: &ConstrainedNormalSpec, lo: f64, hi: f64) -> Result<f64> {
        Ok(self.cdf(spec, hi)? - self.cdf(spec, lo)?)
    }

    pub fn draw(&self, spec: &ConstrainedNormalSpec, src: &mut RandomSource) -> f64 {
        match *self {
            ConstrainedPrior::BetaOnInterval { alpha0, beta0 } => {
                spec.l0
                    + (spec.u0 - spec.l0)
                        * draw_beta(src, alpha0, beta0).expect("validated parameters")
            }
            ConstrainedPrior::TruncatedNormal { mu0, tau0 } => loop {
                let x = draw_normal(src, mu0, tau0).expect("validated parameters");
                if x > spec.l0 && x < spec.u0 {
                    return x;
                }
            },
        }
    }
}

/// Elicit the beta prior: the mode pins alpha0 and beta0 to the dispersion
/// tau0, and tau0 is solved so (l1, u1) carries probability gamma.
pub fn elicit_beta(spec: &ConstrainedNormalSpec) -> Result<(f64, f64)> {
    if spec.l1 == spec.l0 && spec.u1 == spec.u0 {
        // Virtual certainty over the whole support: the noninformative case.
        return Ok((1.0, 1.0));
    }
    let width = spec.u0 - spec.l0;
    let lo1 = (spec.l1 - spec.l0) / width;
    let hi1 = (spec.u1 - spec.l0) / width;
    let shape = |tau0: f64| {
        let alpha0 = tau0 * (spec.m0 - spec.l0) / width + 1.0;
        let beta0 = tau0 * (spec.u0 - spec.m0) / width + 1.0;
        (alpha0, beta0)
    };
    let content = |tau0: f64| -> f64 {
        let (a, b) = shape(tau0);
        beta_cdf(hi1, a, b).unwrap_or(f64::NAN) - beta_cdf(lo1, a, b).unwrap_or(f64::NAN)
    };
    // Content grows from the uniform value to 1 as the prior concentrates.
    let tau0 = bisect_expanding(|t| content(t) - spec.gamma, 0.0, 1.0, 1e9, 1e-10)?;
    Ok(shape(tau0))
}

/// Elicit the truncated normal prior: mu0 is the mode and tau0 is solved so
/// the conditional probability of (l1, u1) given (l0, u0) is gamma.
pub fn elicit_truncnorm(spec: &ConstrainedNormalSpec) -> Result<(f64, f64)> {
    let mu0 = spec.m0;
    let limit = (spec.u1 - spec.l1) / (spec.u0 - spec.l0);
    if (spec.gamma - limit).abs() < 1e-12 {
        return Err(Error::Elicitation(format!(
            "gamma equals the diffuse limit {limit}: the scale diverges"
        )));
    }
    let ratio = |tau0: f64| -> f64 {
        let inner = normal_cdf((spec.u1 - mu0) / tau0) - normal_cdf((spec.l1 - mu0) / tau0);
        let outer = normal_cdf((spec.u0 - mu0) / tau0) - normal_cdf((spec.l0 - mu0) / tau0);
        inner / outer
    };
    // The ratio falls from 1 toward the diffuse limit as tau0 grows.
    let width = spec.u0 - spec.l0;
    let tau0 = bisect_expanding(
        |t| spec.gamma - ratio(t),
        1e-9 * width,
        width,
        1e9 * width,
        1e-11 * width,
    )
    .map_err(|_| {
        Error::Elicitation(format!(
            "no truncated-normal scale puts probability {} on ({}, {})",
            spec.gamma, spec.l1, spec.u1
        ))
    })?;
    Ok((mu0, tau0))
}

/// Binned sample of the prior predictive of the sample mean.
#[derive(Debug, Clone)]
pub struct PredictiveHistogram {
    lo: f64,
    width: f64,
    counts: Vec<u64>,
    total: u64,
}

impl PredictiveHistogram {
    /// Simulate `draws` values of (mu ~ prior, xbar ~ normal(mu, se^2)) and
    /// bin xbar over (l0 - 3 se, u0 + 3 se) with k equal bins.
    pub fn build(
        spec: &ConstrainedNormalSpec,
        prior: &ConstrainedPrior,
        draws: u64,
        k: usize,
        src: &RandomSource,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::Domain(format!("need at least 2 bins, got {k}")));
        }
        let se = spec.se();
        let lo = spec.l0 - 3.0 * se;
        let hi = spec.u0 + 3.0 * se;
        let width = (hi - lo) / k as f64;
        let blocks = draws.div_ceil(BLOCK);
        let counts = (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut local = src.fork(b);
                let take = BLOCK.min(draws - b * BLOCK);
                let mut counts = vec![0u64; k];
                for _ in 0..take {
                    let mu = prior.draw(spec, &mut local);
                    let xbar = mu
                        + se * crate::stats::sample::draw_std_normal(&mut local);
                    let idx = ((xbar - lo) / width).floor();
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
            lo,
            width,
            counts,
            total: draws,
        })
    }

    pub fn bin_count(&self) -> usize {
        self.counts.len()
    }


    /// Exact bin probabilities of the sample mean under the given center.
    fn sampling_probs(&self, center: f64, se: f64) -> Vec<f64> {
        let k = self.counts.len();
        let mut cdf_at_edges = Vec::with_capacity(k + 1);
        for j in 0..=k {
            let e = self.lo + j as f64 * self.width;
            cdf_at_edges.push(normal_cdf((e - center) / se));
        }
        (0..k).map(|j| cdf_at_edges[j + 1] - cdf_at_edges[j]).collect()
    }

    /// Estimated probability, when `mu_star` is true, of the observed mean
    /// landing where the evidence goes against `mu_star`.
    ///
    /// Bins with exact probability p and simulated proportion q estimate the
    /// relative belief ratio by p/q; p <= q is the evidence-against side
    /// (ties count as against), and empty bins mean ratio infinity and never
    /// contribute.
    pub fn bias_against(&self, spec: &ConstrainedNormalSpec, mu_star: f64) -> f64 {
        let probs = self.sampling_probs(mu_star, spec.se());
        let mut sum = 0.0;
        for (j, &p) in probs.iter().enumerate() {
            let q = self.counts[j] as f64 / self.total as f64;
            if p <= q {
                sum += p;
            }
        }
        sum
    }

    /// Estimated probability, when the truth sits at `alt`, of the observed
    /// mean landing where the evidence still favors `mu_star` (ratio >= 1).
    pub fn favor_probability(
        &self,
        spec: &ConstrainedNormalSpec,
        mu_star: f64,
        alt: f64,
    ) -> f64 {
        let se = spec.se();
        let probs = self.sampling_probs(mu_star, se);
        let alt_probs = self.sampling_probs(alt, se);
        let mut sum = 0.0;
        for j in 0..probs.len() {
            let q = self.counts[j] as f64 / self.total as f64;
            if q > 0.0 && probs[j] >= q {
                sum += alt_probs[j];
            }
        }
        sum
    }

    /// Bias in favor of mu_star: the larger favor probability over the two
    /// alternatives mu_star +- delta/2, clipped to the support.
    pub fn bias_in_favor(
        &self,
        spec: &ConstrainedNormalSpec,
        mu_star: f64,
        delta: f64,
    ) -> f64 {
        let lo_alt = (mu_star - delta / 2.0).clamp(spec.l0, spec.u0);
        let hi_alt = (mu_star + delta / 2.0).clamp(spec.l0, spec.u0);
        self.favor_probability(spec, mu_star, lo_alt)
            .max(self.favor_probability(spec, mu_star, hi_alt))
    }
}

/// One-shot estimate of the bias against `mu_star` (builds a fresh
/// histogram; use [`PredictiveHistogram`] directly to amortize it).
pub fn bias_against_histogram(
    spec: &ConstrainedNormalSpec,
    prior: &ConstrainedPrior,
    mu_star: f64,
    draws: u64,
    k: usize,
    src: &RandomSource,
) -> Result<f64> {
    Ok(PredictiveHistogram::build(spec, prior, draws, k, src)?.bias_against(spec, mu_star))
}

/// Bias in favor of `mu_star` at difference `delta`, plus nothing else.
pub fn bias_in_favor_normal(
    spec: &ConstrainedNormalSpec,
    prior: &ConstrainedPrior,
    mu_star: f64,
    delta: f64,
    draws: u64,
    k: usize,
    src: &RandomSource,
) -> Result<f64> {
    Ok(PredictiveHistogram::build(spec, prior, draws, k, src)?.bias_in_favor(spec, mu_star, delta))
}

/// Prior weights of the parameter grid cells.
pub fn grid_prior_weights(
    spec: &ConstrainedNormalSpec,
    prior: &ConstrainedPrior,
) -> Result<Vec<f64>> {
    spec.grid_midpoints()
        .iter()
        .map(|&m| prior.interval_mass(spec, m - spec.delta / 2.0, m + spec.delta / 2.0))
        .collect()
}

/// Frequentist lower bound and Bayesian coverage of the plausible region,
/// per sample size. The frequentist bound maximizes the bias-against curve
/// over the delta grid; the Bayesian coverage averages it under the prior.
pub fn confidence_table(
    spec: &ConstrainedNormalSpec,
    prior: &ConstrainedPrior,
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
            let hist = PredictiveHistogram::build(
                &spec_n,
                prior,
                draws,
                k_for(n),
                &RandomSource::new(src.seed(), src.stream() + i as u64),
            )?;
            let weights = grid_prior_weights(&spec_n, prior)?;
            let mut max_bias = f64::NEG_INFINITY;
            let mut avg_bias = 0.0;
            for (m, w) in spec_n.grid_midpoints().iter().zip(&weights) {
                let b = hist.bias_against(&spec_n, *m);
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

/// Prior-averaged bias in favor at difference `delta` (the estimation
/// variant), integrated over the parameter grid.
pub fn estimation_bias_in_favor(
    spec: &ConstrainedNormalSpec,
    prior: &ConstrainedPrior,
    hist: &PredictiveHistogram,
    delta: f64,
) -> Result<f64> {
    let weights = grid_prior_weights(spec, prior)?;
    Ok(spec
        .grid_midpoints()
        .iter()
        .zip(&weights)
        .map(|(m, w)| hist.bias_in_favor(spec, *m, delta) * w)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example_spec(n: u32) -> ConstrainedNormalSpec {
        ConstrainedNormalSpec::new(0.0, 10.0, 0.5, 9.5, 5.0, 0.99, 1.0, n, 0.1).unwrap()
    }

    #[test]
    fn beta_elicitation_matches_published_values() {
        let (a, b) = elicit_beta(&example_spec(10)).unwrap();
        assert!((a - 2.20).abs() < 0.01, "alpha {a}");
        assert!((b - 2.20).abs() < 0.01, "beta {b}");
        // Round trip: the elicited prior puts gamma on (l1, u1) and has the
        // requested mode.
        let spec = example_spec(10);
        let prior = ConstrainedPrior::BetaOnInterval { alpha0: a, beta0: b };
        let mass = prior.interval_mass(&spec, 0.5, 9.5).unwrap();
        assert!((mass - 0.99).abs() < 1e-6);
        let mode = spec.l0 + (spec.u0 - spec.l0) * (a - 1.0) / (a + b - 2.0);
        assert!((mode - 5.0).abs() < 1e-6);
    }

    #[test]
    fn beta_elicitation_uniform_case() {
        let spec = ConstrainedNormalSpec::new(0.0, 10.0, 0.0, 10.0, 5.0, 0.99, 1.0, 10, 0.1)
            .unwrap();
        assert_eq!(elicit_beta(&spec).unwrap(), (1.0, 1.0));
    }

    #[test]
    fn beta_elicitation_asymmetric_mode() {
        let spec =
            ConstrainedNormalSpec::new(0.0, 10.0, 0.5, 9.5, 2.0, 0.99, 1.0, 10, 0.1).unwrap();
        let (a, b) = elicit_beta(&spec).unwrap();
        let mode = 10.0 * (a - 1.0) / (a + b - 2.0);
        assert!((mode - 2.0).abs() < 1e-6, "mode {mode}");
        assert!(a >= 1.0 && b >= 1.0);
    }

    #[test]
    fn truncnorm_elicitation_matches_published_values() {
        let (mu0, tau0) = elicit_truncnorm(&example_spec(10)).unwrap();
        assert_eq!(mu0, 5.0);
        assert!((tau0 - 1.92).abs() < 0.01, "tau0 {tau0}");
        let spec = example_spec(10);
        let prior = ConstrainedPrior::TruncatedNormal { mu0, tau0 };
        let mass = prior.interval_mass(&spec, 0.5, 9.5).unwrap();
        assert!((mass - 0.99).abs() < 1e-6);
    }

    #[test]
    fn truncnorm_diverges_at_the_diffuse_limit() {
        // gamma equal to the width ratio has no finite solution.
        let spec = ConstrainedNormalSpec::new(0.0, 10.0, 0.5, 9.5, 5.0, 0.9, 1.0, 10, 0.1)
            .unwrap();
        assert!(elicit_truncnorm(&spec).is_err());
    }

    #[test]
    fn solvability_precondition_enforced() {
        assert!(
            ConstrainedNormalSpec::new(0.0, 10.0, 0.5, 9.5, 5.0, 0.5, 1.0, 10, 0.1).is_err()
        );
    }

    #[test]
    fn histogram_bias_against_shrinks_with_information() {
        let spec = example_spec(10);
        let prior = ConstrainedPrior::BetaOnInterval {
            alpha0: 2.1997,
            beta0: 2.1997,
        };
        let src = RandomSource::new(31, 2);
        let hist = PredictiveHistogram::build(&spec, &prior, 100_000, 1000, &src).unwrap();
        let b10 = hist.bias_against(&spec, 4.0);
        assert!((b10 - 0.039).abs() < 0.012, "n=10 bias {b10}");
        // Overwhelming data: nothing to bias against.
        let spec_tight = example_spec(100_000);
        let hist_tight =
            PredictiveHistogram::build(&spec_tight, &prior, 100_000, 4000, &src).unwrap();
        let b_tight = hist_tight.bias_against(&spec_tight, 4.0);
        assert!(b_tight < 0.01, "tight bias {b_tight}");
    }

    #[test]
    fn histogram_self_consistency_under_refinement() {
        let spec = example_spec(10);
        let prior = ConstrainedPrior::BetaOnInterval {
            alpha0: 2.1997,
            beta0: 2.1997,
        };
        let a = bias_against_histogram(&spec, &prior, 4.0, 50_000, 1000, &RandomSource::new(32, 0))
            .unwrap();
        let b =
            bias_against_histogram(&spec, &prior, 4.0, 100_000, 2000, &RandomSource::new(32, 1))
                .unwrap();
        // Doubling both knobs moves the estimate by a few combined standard
        // errors at most.
        let se = (a * (1.0 - a) / 50_000.0).sqrt() + (b * (1.0 - b) / 100_000.0).sqrt();
        assert!((a - b).abs() < 3.0 * se + 0.003, "a={a}, b={b}");
    }

    #[test]
    fn favor_ties_count_for_both_sides() {
        let spec = example_spec(10);
        let prior = ConstrainedPrior::BetaOnInterval {
            alpha0: 2.1997,
            beta0: 2.1997,
        };
        let src = RandomSource::new(33, 2);
        let hist = PredictiveHistogram::build(&spec, &prior, 100_000, 1000, &src).unwrap();
        let fav = hist.bias_in_favor(&spec, 4.0, 0.5);
        assert!((0.0..=1.0).contains(&fav));
        // Tiny delta: the alternative is essentially the null, so failing to
        // reject is very likely.
        let fav_tiny = hist.bias_in_favor(&spec, 4.0, 0.01);
        assert!(fav_tiny > fav);
    }
}
