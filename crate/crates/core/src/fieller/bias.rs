//! Monte Carlo bias estimation for the ratio problem.
//!
//! Bias against a value is the conditional prior probability of failing to
//! collect evidence for it when it is true; bias in favor is the probability
//! of failing to collect evidence against it when it is off by the meaningful
//! difference. Data are drawn with the sequential conditional-predictive
//! sampler and the relative belief ratio is evaluated in closed form.
//!
//! Every loop runs in fixed-size blocks with one forked random stream per
//! block, so results are identical for any thread count.

use rayon::prelude::*;

use super::sampler::{sample_conditional_predictive, NuSampler};
use super::FiellerModel;
use crate::error::{Error, Result};
use crate::mc::MonteCarloEstimate;
use crate::stats::RandomSource;

const BLOCK: u64 = 8192;
/// Fork-index offset separating the estimation loop from curve blocks.
const ESTIMATION_UNITS: u64 = 1 << 31;

/// Proportion of predictive draws from the conditional at `data_psi` for
/// which the posterior/prior density comparison at `eval_psi` satisfies
/// `event`.
fn predictive_proportion(
    model: &FiellerModel,
    data_psi: f64,
    eval_psi: f64,
    event: impl Fn(f64, f64) -> bool + Sync,
    draws: u64,
    src: &RandomSource,
    unit_offset: u64,
) -> Result<MonteCarloEstimate> {
    let prior_density = model.prior_params().density(eval_psi);
    if prior_density <= 0.0 || !prior_density.is_finite() {
        return Err(Error::DensityUnderflow { psi: eval_psi });
    }
    let sampler = NuSampler::new(model.prior_params().conditional(data_psi));
    let blocks = draws.div_ceil(BLOCK);
    let counts: Result<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut local = src.fork(unit_offset + b);
            let take = BLOCK.min(draws - b * BLOCK);
            let mut hits = 0u64;
            for _ in 0..take {
                let (xbar, ybar) =
                    sample_conditional_predictive(model, &sampler, &mut local)?;
                let posterior_density = model.posterior_params(xbar, ybar).density(eval_psi);
                if event(posterior_density, prior_density) {
                    hits += 1;
                }
            }
            Ok(hits)
        })
        .collect();
    let successes = counts?.iter().sum();
    Ok(MonteCarloEstimate::from_proportion(successes, draws))
}

fn ratio_at_most_one(post: f64, prior: f64) -> bool {
    post <= prior
}

fn ratio_at_least_one(post: f64, prior: f64) -> bool {
    post >= prior
}

/// Bias against psi0: the probability of ratio <= 1 at psi0 when psi0 is the
/// truth.
pub fn bias_against(
    model: &FiellerModel,
    psi0: f64,
    draws: u64,
    src: &RandomSource,
) -> Result<MonteCarloEstimate> {
    predictive_proportion(model, psi0, psi0, ratio_at_most_one, draws, src, 0)
}

/// Conditional coverage of the plausible region: the probability of ratio > 1
/// at psi0 (membership is strict) when psi0 is the truth.
pub fn plausible_coverage(
    model: &FiellerModel,
    psi0: f64,
    draws: u64,
    src: &RandomSource,
) -> Result<MonteCarloEstimate> {
    predictive_proportion(model, psi0, psi0, |post, prior| post > prior, draws, src, 0)
}

/// Bias in favor of psi0 at meaningful difference delta: the larger of the
/// two probabilities of ratio >= 1 at psi0 when the truth sits at
/// psi0 +- delta/2.
pub fn bias_in_favor(
    model: &FiellerModel,
    psi0: f64,
    delta: f64,
    draws: u64,
    src: &RandomSource,
) -> Result<MonteCarloEstimate> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "meaningful difference must be positive, got {delta}"
        )));
    }
    let blocks = draws.div_ceil(BLOCK);
    let low = predictive_proportion(
        model,
        psi0 - delta / 2.0,
        psi0,
        ratio_at_least_one,
        draws,
        src,
        0,
    )?;
    let high = predictive_proportion(
        model,
        psi0 + delta / 2.0,
        psi0,
        ratio_at_least_one,
        draws,
        src,
        blocks,
    )?;
    Ok(if low.value >= high.value { low } else { high })
}

/// Bias against evaluated over a grid of psi values, one estimate per point.
pub fn bias_curve(
    model: &FiellerModel,
    psi_values: &[f64],
    draws_per_point: u64,
    src: &RandomSource,
) -> Result<Vec<MonteCarloEstimate>> {
    let blocks_per_point = draws_per_point.div_ceil(BLOCK);
    psi_values
        .par_iter()
        .enumerate()
        .map(|(i, &psi)| {
            predictive_proportion(
                model,
                psi,
                psi,
                ratio_at_most_one,
                draws_per_point,
                src,
                i as u64 * blocks_per_point,
            )
        })
        .collect()
}

/// Prior-averaged biases for estimation: psi is drawn from its prior, the
/// per-value biases are estimated with inner predictive loops, and the
/// averages are reported with between-draw standard errors.
#[derive(Debug, Clone, Copy)]
pub struct EstimationBias {
    pub bias_against: MonteCarloEstimate,
    pub bias_in_favor: MonteCarloEstimate,
    /// 1 - bias_against: the prior coverage of the plausible region.
    pub bayes_coverage: f64,
}

pub fn estimation_bias(
    model: &FiellerModel,
    delta: f64,
    prior_draws: u64,
    inner_draws: u64,
    src: &RandomSource,
) -> Result<EstimationBias> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!(
            "meaningful difference must be positive, got {delta}"
        )));
    }
    let prior = model.prior_params();
    let per_draw: Result<Vec<(f64, f64)>> = (0..prior_draws)
        .into_par_iter()
        .map(|i| {
            let mut local = src.fork(ESTIMATION_UNITS + i);
            let psi = prior.draw_ratio(&mut local);
            let against = inner_proportion(
                model,
                psi,
                psi,
                ratio_at_most_one,
                inner_draws,
                &mut local,
            )?;
            let fav_lo = inner_proportion(
                model,
                psi - delta / 2.0,
                psi,
                ratio_at_least_one,
                inner_draws,
                &mut local,
            )?;
            let fav_hi = inner_proportion(
                model,
                psi + delta / 2.0,
                psi,
                ratio_at_least_one,
                inner_draws,
                &mut local,
            )?;
            Ok((against, fav_lo.max(fav_hi)))
        })
        .collect();
    let per_draw = per_draw?;
    let against: Vec<f64> = per_draw.iter().map(|p| p.0).collect();
    let favor: Vec<f64> = per_draw.iter().map(|p| p.1).collect();
    let bias_against = MonteCarloEstimate::from_values(&against);
    let bias_in_favor = MonteCarloEstimate::from_values(&favor);
    Ok(EstimationBias {
        bias_against,
        bias_in_favor,
        bayes_coverage: 1.0 - bias_against.value,
    })
}

/// Sequential inner loop used inside the prior-draw average.
fn inner_proportion(
    model: &FiellerModel,
    data_psi: f64,
    eval_psi: f64,
    event: impl Fn(f64, f64) -> bool,
    draws: u64,
    src: &mut RandomSource,
) -> Result<f64> {
    let prior_density = model.prior_params().density(eval_psi);
    if prior_density <= 0.0 || !prior_density.is_finite() {
        return Err(Error::DensityUnderflow { psi: eval_psi });
    }
    let sampler = NuSampler::new(model.prior_params().conditional(data_psi));
    let mut hits = 0u64;
    for _ in 0..draws {
        let (xbar, ybar) = sample_conditional_predictive(model, &sampler, src)?;
        let posterior_density = model.posterior_params(xbar, ybar).density(eval_psi);
        if event(posterior_density, prior_density) {
            hits += 1;
        }
    }
    Ok(hits as f64 / draws as f64)
}

/// Bias-against curve summary plus the estimation averages.
#[derive(Debug, Clone)]
pub struct BiasReport {
    pub psi_grid: Vec<f64>,
    pub bias_against: Vec<MonteCarloEstimate>,
    pub max_bias_against: f64,
    pub max_at: f64,
    /// 1 - max bias against: a lower bound on the frequentist coverage of
    /// the plausible region.
    pub confidence_lower_bound: f64,
    pub estimation: EstimationBias,
}

pub fn bias_report(
    model: &FiellerModel,
    psi_grid: Vec<f64>,
    delta: f64,
    draws_per_point: u64,
    prior_draws: u64,
    inner_draws: u64,
    src: &RandomSource,
) -> Result<BiasReport> {
    if psi_grid.is_empty() {
        return Err(Error::Domain("bias curve needs a nonempty grid".into()));
    }
    let curve = bias_curve(model, &psi_grid, draws_per_point, src)?;
    let (mut max_bias, mut max_at) = (f64::NEG_INFINITY, psi_grid[0]);
    for (psi, est) in psi_grid.iter().zip(&curve) {
        if est.value > max_bias {
            max_bias = est.value;
            max_at = *psi;
        }
    }
    let estimation = estimation_bias(model, delta, prior_draws, inner_draws, src)?;
    Ok(BiasReport {
        psi_grid,
        bias_against: curve,
        max_bias_against: max_bias,
        max_at,
        confidence_lower_bound: 1.0 - max_bias,
        estimation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieller::elicit_fieller;

    fn example_model(m: u32, n: u32) -> FiellerModel {
        let p = elicit_fieller(10.0, 25.0, 1.0, 3.0, 2.0, 0.99).unwrap();
        FiellerModel::new(p.mu0, p.tau10, p.nu0, p.tau20, 1.0, m, n).unwrap()
    }

    #[test]
    fn bias_against_true_hypothesis_is_small() {
        let model = example_model(10, 10);
        let src = RandomSource::new(21, 1);
        let b = bias_against(&model, 2.0, 20_000, &src).unwrap();
        assert!((b.value - 0.04).abs() < 0.012, "bias {b:?}");
    }

    #[test]
    fn bias_against_vanishes_with_overwhelming_data() {
        let p = elicit_fieller(10.0, 25.0, 1.0, 3.0, 2.0, 0.99).unwrap();
        let model = FiellerModel::new(p.mu0, p.tau10, p.nu0, p.tau20, 1e-6, 10, 10).unwrap();
        let src = RandomSource::new(22, 1);
        let b = bias_against(&model, 2.0, 5_000, &src).unwrap();
        assert!(b.value < 0.005, "bias {b:?}");
    }

    #[test]
    fn bias_in_favor_small_delta_is_large() {
        let model = example_model(10, 10);
        let src = RandomSource::new(23, 1);
        let b = bias_in_favor(&model, 2.0, 0.1, 20_000, &src).unwrap();
        assert!((b.value - 0.92).abs() < 0.03, "bias {b:?}");
        let b1 = bias_in_favor(&model, 2.0, 1.0, 20_000, &src).unwrap();
        assert!(b1.value < b.value, "wider delta must lower the bound");
    }

    #[test]
    fn results_independent_of_thread_count() {
        let model = example_model(10, 10);
        let src = RandomSource::new(24, 1);
        let a = bias_against(&model, 2.0, 20_000, &src).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| bias_against(&model, 2.0, 20_000, &src)).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn coverage_complement_identity() {
        // Bias against and plausible-region coverage are estimated from the
        // same seeded draws, so they sum to exactly 1.
        let model = example_model(10, 10);
        let src = RandomSource::new(25, 1);
        let against = bias_against(&model, 2.0, 10_000, &src).unwrap();
        let coverage = plausible_coverage(&model, 2.0, 10_000, &src).unwrap();
        assert!((against.value + coverage.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_nonpositive_delta() {
        let model = example_model(10, 10);
        let src = RandomSource::new(26, 1);
        assert!(bias_in_favor(&model, 2.0, 0.0, 100, &src).is_err());
        assert!(estimation_bias(&model, -1.0, 10, 10, &src).is_err());
    }
}
