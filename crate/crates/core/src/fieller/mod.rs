//! The ratio-of-normal-means problem: two independent normal samples with
//! known common variance, inference about psi = mu/nu.
//!
//! Both coordinate priors are normal, so the prior and posterior densities of
//! the ratio share one closed form, the relative belief ratio is available
//! exactly, and the conditional predictive given psi can be sampled with the
//! mixture-inversion sampler in [`sampler`].

mod bias;
mod sampler;

pub use bias::{
    bias_against, bias_curve, bias_in_favor, bias_report, estimation_bias, plausible_coverage,
    BiasReport, EstimationBias,
};
pub use sampler::{mixture_weight, mixture_weight_ln, sample_conditional_predictive, NuSampler};

use crate::engine::{self, build_grid, histogram_mass, DiscreteBeliefs, Regions};
use crate::error::{Error, Result};
use crate::stats::special::{normal_cdf, normal_pdf, normal_quantile, INV_SQRT_2PI};
use crate::stats::{bisect_expanding, draw_normal, RandomSource};

/// Hyperparameters and sampling setup for the two-sample ratio problem.
#[derive(Debug, Clone, Copy)]
pub struct FiellerModel {
    pub mu0: f64,
    pub tau10: f64,
    pub nu0: f64,
    pub tau20: f64,
    pub sigma0_sq: f64,
    pub m: u32,
    pub n: u32,
}

impl FiellerModel {
    pub fn new(
        mu0: f64,
        tau10: f64,
        nu0: f64,
        tau20: f64,
        sigma0_sq: f64,
        m: u32,
        n: u32,
    ) -> Result<Self> {
        if !(tau10 > 0.0 && tau20 > 0.0 && sigma0_sq > 0.0) {
            return Err(Error::Domain(format!(
                "scale parameters must be positive: tau10={tau10}, tau20={tau20}, sigma0_sq={sigma0_sq}"
            )));
        }
        if m == 0 || n == 0 {
            return Err(Error::Domain("sample sizes must be at least 1".into()));
        }
        Ok(Self {
            mu0,
            tau10,
            nu0,
            tau20,
            sigma0_sq,
            m,
            n,
        })
    }

    /// Location/variance pairs of the two coordinates under the prior.
    pub fn prior_params(&self) -> RatioParams {
        RatioParams {
            mu: self.mu0,
            tau1_sq: self.tau10 * self.tau10,
            nu: self.nu0,
            tau2_sq: self.tau20 * self.tau20,
        }
    }

    /// Precision-weighted posterior update for both coordinates.
    pub fn posterior_params(&self, xbar: f64, ybar: f64) -> RatioParams {
        let prior = self.prior_params();
        let wm = self.m as f64 / self.sigma0_sq;
        let wn = self.n as f64 / self.sigma0_sq;
        let v1 = 1.0 / (wm + 1.0 / prior.tau1_sq);
        let v2 = 1.0 / (wn + 1.0 / prior.tau2_sq);
        RatioParams {
            mu: v1 * (wm * xbar + self.mu0 / prior.tau1_sq),
            tau1_sq: v1,
            nu: v2 * (wn * ybar + self.nu0 / prior.tau2_sq),
            tau2_sq: v2,
        }
    }
}

/// Parameters of a ratio mu/nu where mu and nu are independent normals with
/// the given locations and variances. Serves both the prior and, after the
/// conjugate update, the posterior.
#[derive(Debug, Clone, Copy)]
pub struct RatioParams {
    pub mu: f64,
    pub tau1_sq: f64,
    pub nu: f64,
    pub tau2_sq: f64,
}

/// Conditional parameters of nu given a fixed ratio value.
#[derive(Debug, Clone, Copy)]
pub struct PsiConditional {
    pub psi: f64,
    pub tau2_psi_sq: f64,
    pub nu_psi: f64,
    pub z0: f64,
}

impl RatioParams {
    pub fn conditional(&self, psi: f64) -> PsiConditional {
        let tau2_psi_sq = 1.0 / (psi * psi / self.tau1_sq + 1.0 / self.tau2_sq);
        let nu_psi = tau2_psi_sq * (psi * self.mu / self.tau1_sq + self.nu / self.tau2_sq);
        PsiConditional {
            psi,
            tau2_psi_sq,
            nu_psi,
            z0: -nu_psi / tau2_psi_sq.sqrt(),
        }
    }

    /// Exact density of the ratio at psi.
    pub fn density(&self, psi: f64) -> f64 {
        let cond = self.conditional(psi);
        let diff = self.mu - self.nu * psi;
        let expo = -0.5 * cond.tau2_psi_sq * diff * diff / (self.tau1_sq * self.tau2_sq);
        let w0 = cond.nu_psi / cond.tau2_psi_sq.sqrt();
        // Written so both terms are nonnegative for either sign of w0.
        let brace = if w0 >= 0.0 {
            normal_pdf(w0) + w0 * (normal_cdf(w0) - 0.5)
        } else {
            normal_pdf(w0) + (-w0) * (0.5 - normal_cdf(w0))
        };
        2.0 * cond.tau2_psi_sq * INV_SQRT_2PI / (self.tau1_sq.sqrt() * self.tau2_sq.sqrt())
            * expo.exp()
            * brace
    }

    /// Draw one value of the ratio by sampling both coordinates.
    pub fn draw_ratio(&self, src: &mut RandomSource) -> f64 {
        let mu = draw_normal(src, self.mu, self.tau1_sq.sqrt()).expect("positive variance");
        loop {
            let nu = draw_normal(src, self.nu, self.tau2_sq.sqrt()).expect("positive variance");
            if nu != 0.0 {
                return mu / nu;
            }
        }
    }
}

/// Exact relative belief ratio of psi given the sufficient statistics.
pub fn rb_exact(model: &FiellerModel, psi: f64, xbar: f64, ybar: f64) -> Result<f64> {
    let prior = model.prior_params().density(psi);
    if prior <= 0.0 || !prior.is_finite() {
        return Err(Error::DensityUnderflow { psi });
    }
    Ok(model.posterior_params(xbar, ybar).density(psi) / prior)
}

/// Elicited prior hyperparameters for the ratio problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElicitedRatioPrior {
    pub mu0: f64,
    pub tau10: f64,
    pub nu0: f64,
    pub tau20: f64,
}

/// Turn virtual-certainty intervals into prior hyperparameters.
///
/// `(m1, m2)` bounds the numerator mean with probability `gamma`; `(r1, r2)`
/// bounds the ratio itself, and `psi0` is the anchor value inside it. The
/// scale of each coordinate prior is solved by bisection.
pub fn elicit_fieller(
    m1: f64,
    m2: f64,
    r1: f64,
    r2: f64,
    psi0: f64,
    gamma: f64,
) -> Result<ElicitedRatioPrior> {
    if !(m1 < m2) {
        return Err(Error::Domain(format!("need m1 < m2, got [{m1}, {m2}]")));
    }
    if !(r1 < r2) {
        return Err(Error::Domain(format!("need r1 < r2, got [{r1}, {r2}]")));
    }
    if !(r1 > 0.0) {
        return Err(Error::Domain(format!(
            "ratio bounds must be positive so the induced interval (m1/r2, m2/r1) is defined; got r1={r1}"
        )));
    }
    if !(psi0 > r1 && psi0 < r2) {
        return Err(Error::Domain(format!(
            "psi0 must lie inside ({r1}, {r2}), got {psi0}"
        )));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "gamma must be in (0,1), got {gamma}"
        )));
    }
    let mu0 = 0.5 * (m1 + m2);
    let tau10 = solve_normal_scale(m1, m2, mu0, gamma)?;
    let nu0 = mu0 / psi0;
    let (lo, hi) = (m1 / r2, m2 / r1);
    if !(lo < hi) {
        return Err(Error::Domain(format!(
            "induced interval ({lo}, {hi}) for the denominator mean is empty"
        )));
    }
    let tau20 = solve_normal_scale(lo, hi, nu0, gamma)?;
    Ok(ElicitedRatioPrior {
        mu0,
        tau10,
        nu0,
        tau20,
    })
}

/// Solve Phi((hi-center)/tau) - Phi((lo-center)/tau) = gamma for tau.
fn solve_normal_scale(lo: f64, hi: f64, center: f64, gamma: f64) -> Result<f64> {
    let width = hi - lo;
    let f = |tau: f64| normal_cdf((hi - center) / tau) - normal_cdf((lo - center) / tau) - gamma;
    // Content decreases in tau; flip the sign so the target is increasing.
    bisect_expanding(|t| -f(t), 1e-9 * width, width, 1e9 * width, 1e-11 * width.max(1.0))
        .map_err(|_| {
            Error::Elicitation(format!(
                "no scale gives the interval ({lo}, {hi}) probability {gamma} around {center}"
            ))
        })
}

/// Region obtained by inverting the classical pivotal quantity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PivotalRegion {
    Interval { lo: f64, hi: f64 },
    /// (-inf, below) united with (above, inf).
    Exclusive { below: f64, above: f64 },
    WholeLine,
    /// Degenerate leading coefficient: a single half line.
    HalfLine { bound: f64, upper: bool },
}

impl PivotalRegion {
    /// Round every bound onto a grid with the given step, moving inward so
    /// the reported points are certainly inside the region. This matches the
    /// resolution at which such regions are usually tabulated.
    pub fn quantized(&self, step: f64) -> PivotalRegion {
        let up = |x: f64| (x / step).ceil() * step;
        let down = |x: f64| (x / step).floor() * step;
        match *self {
            PivotalRegion::Interval { lo, hi } => PivotalRegion::Interval {
                lo: up(lo),
                hi: down(hi),
            },
            PivotalRegion::Exclusive { below, above } => PivotalRegion::Exclusive {
                below: down(below),
                above: up(above),
            },
            PivotalRegion::WholeLine => PivotalRegion::WholeLine,
            PivotalRegion::HalfLine { bound, upper } => PivotalRegion::HalfLine {
                bound: if upper { up(bound) } else { down(bound) },
                upper,
            },
        }
    }
}

/// Invert the pivotal (xbar - psi*ybar) / (sigma0 sqrt(1/m + psi^2/n)) at
/// confidence gamma and classify the resulting set of psi values.
pub fn pivotal_region(
    xbar: f64,
    ybar: f64,
    m: u32,
    n: u32,
    sigma0_sq: f64,
    gamma: f64,
) -> Result<PivotalRegion> {
    if m == 0 || n == 0 || !(sigma0_sq > 0.0) {
        return Err(Error::Domain(
            "pivotal_region needs m, n >= 1 and sigma0_sq > 0".into(),
        ));
    }
    let z = normal_quantile((1.0 + gamma) / 2.0)?;
    let vm = sigma0_sq / m as f64;
    let vn = sigma0_sq / n as f64;
    let a = ybar * ybar - z * z * vn;
    let b = -2.0 * xbar * ybar;
    let c = xbar * xbar - z * z * vm;
    let scale = ybar * ybar + z * z * vn;
    if a.abs() <= 1e-12 * scale {
        // Linear boundary.
        if b.abs() <= 1e-12 * scale {
            return Ok(PivotalRegion::WholeLine);
        }
        let bound = -c / b;
        return Ok(PivotalRegion::HalfLine {
            bound,
            upper: b < 0.0,
        });
    }
    let disc = b * b - 4.0 * a * c;
    if a > 0.0 {
        let s = disc.max(0.0).sqrt();
        let q = -0.5 * (b + b.signum() * s);
        let (r1, r2) = (q / a, c / q);
        Ok(PivotalRegion::Interval {
            lo: r1.min(r2),
            hi: r1.max(r2),
        })
    } else if disc > 0.0 {
        let s = disc.sqrt();
        let q = -0.5 * (b + b.signum() * s);
        let (r1, r2) = (q / a, c / q);
        Ok(PivotalRegion::Exclusive {
            below: r1.min(r2),
            above: r1.max(r2),
        })
    } else {
        Ok(PivotalRegion::WholeLine)
    }
}

/// Discretized inference output for one dataset.
#[derive(Debug, Clone)]
pub struct RatioInference {
    pub beliefs: DiscreteBeliefs,
    pub estimate: f64,
    pub regions: Regions,
}

/// Run the full discretized inference: simulate the prior and posterior of
/// the ratio, histogram both on a shared grid, and read off the evidence.
pub fn infer(
    model: &FiellerModel,
    xbar: f64,
    ybar: f64,
    delta: f64,
    tail_prob: f64,
    draws: usize,
    src: &RandomSource,
) -> Result<RatioInference> {
    let prior = model.prior_params();
    let posterior = model.posterior_params(xbar, ybar);
    let prior_draws = sample_ratio_many(&prior, draws, src, 0);
    let posterior_draws = sample_ratio_many(&posterior, draws, src, 1 << 20);
    let grid = build_grid(&prior_draws, delta, tail_prob)?;
    let prior_mass = histogram_mass(&prior_draws, &grid)?;
    let mut posterior_mass = histogram_mass(&posterior_draws, &grid)?;
    // With long-tailed ratios a sparse far-tail bin can catch a posterior
    // draw where the prior simulation saw none. The effective support is
    // where the prior histogram is positive, so such mass is dropped and
    // renormalized exactly like draws beyond the truncated range.
    let mut kept = 0.0;
    for (q, &p) in posterior_mass.iter_mut().zip(&prior_mass) {
        if p == 0.0 {
            *q = 0.0;
        } else {
            kept += *q;
        }
    }
    if kept <= 0.0 {
        return Err(Error::EmptyHistogram);
    }
    for q in posterior_mass.iter_mut() {
        *q /= kept;
    }
    let beliefs = DiscreteBeliefs::new(grid, prior_mass, posterior_mass)?;
    let estimate = engine::rb_estimate(&beliefs);
    let regions = engine::plausible_region(&beliefs);
    Ok(RatioInference {
        beliefs,
        estimate,
        regions,
    })
}

/// Simulate ratio draws in fixed-size blocks with one forked stream each, so
/// the result is identical for any thread count.
pub(crate) fn sample_ratio_many(
    params: &RatioParams,
    draws: usize,
    src: &RandomSource,
    unit_offset: u64,
) -> Vec<f64> {
    use rayon::prelude::*;
    const BLOCK: usize = 8192;
    let blocks = draws.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut local = src.fork(unit_offset + b as u64);
            let take = BLOCK.min(draws - b * BLOCK);
            (0..take).map(|_| params.draw_ratio(&mut local)).collect::<Vec<f64>>()
        })
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::special::normal_sf;

    fn example_model() -> FiellerModel {
        let p = elicit_fieller(10.0, 25.0, 1.0, 3.0, 2.0, 0.99).unwrap();
        FiellerModel::new(p.mu0, p.tau10, p.nu0, p.tau20, 1.0, 10, 10).unwrap()
    }

    /// Simpson quadrature oracle.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let n = if n % 2 == 0 { n } else { n + 1 };
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + i as f64 * h;
            s += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn elicitation_reproduces_published_scales() {
        let p = elicit_fieller(10.0, 25.0, 1.0, 3.0, 2.0, 0.99).unwrap();
        assert!((p.mu0 - 17.5).abs() < 1e-12);
        assert!((p.nu0 - 8.75).abs() < 1e-12);
        assert!((p.tau10 - 2.9117).abs() < 5e-4, "tau10 {}", p.tau10);
        // The interval (10/3, 25) around 8.75 at content 0.99.
        assert!((p.tau20 - 2.3284).abs() < 5e-4, "tau20 {}", p.tau20);
        // Round trip: the intervals really carry probability gamma.
        let c1 = normal_cdf((25.0 - p.mu0) / p.tau10) - normal_cdf((10.0 - p.mu0) / p.tau10);
        assert!((c1 - 0.99).abs() < 1e-9);
        let c2 =
            normal_cdf((25.0 - p.nu0) / p.tau20) - normal_cdf((10.0 / 3.0 - p.nu0) / p.tau20);
        assert!((c2 - 0.99).abs() < 1e-9);
    }

    #[test]
    fn elicitation_symmetric_closed_form() {
        // Symmetric bounds: mu0 = 0 and tau10 = a / z_{(1+gamma)/2}.
        let p = elicit_fieller(-5.0, 5.0, 1.0, 3.0, 2.0, 0.95).unwrap();
        assert!(p.mu0.abs() < 1e-12);
        let expect = 5.0 / normal_quantile(0.975).unwrap();
        assert!((p.tau10 - expect).abs() < 1e-6);
        // And the documented variant: tau10 = 7.5/z at gamma = 0.95 on (10, 25).
        let q = elicit_fieller(10.0, 25.0, 1.0, 3.0, 2.0, 0.95).unwrap();
        assert!((q.tau10 - 7.5 / 1.959964).abs() < 1e-5);
    }

    #[test]
    fn elicitation_domain_errors() {
        assert!(elicit_fieller(25.0, 10.0, 1.0, 3.0, 2.0, 0.99).is_err());
        assert!(elicit_fieller(10.0, 25.0, -1.0, 3.0, 2.0, 0.99).is_err());
        assert!(elicit_fieller(10.0, 25.0, 1.0, 3.0, 5.0, 0.99).is_err());
        assert!(elicit_fieller(10.0, 25.0, 1.0, 3.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn ratio_density_is_rescaled_cauchy_at_zero_centers() {
        let p = RatioParams {
            mu: 0.0,
            tau1_sq: 1.0,
            nu: 0.0,
            tau2_sq: 1.0,
        };
        for psi in [0.0, 1.0, 2.0] {
            let cauchy = 1.0 / (std::f64::consts::PI * (1.0 + psi * psi));
            assert!((p.density(psi) - cauchy).abs() < 1e-14, "psi={psi}");
        }
    }

    #[test]
    fn ratio_density_normalizes() {
        let prior = example_model().prior_params();
        let total = simpson(|t| prior.density(t), -60.0, 80.0, 200_000);
        assert!((total - 1.0).abs() < 1e-3, "total {total}");
        let tight = simpson(|t| prior.density(t), -5.0, 10.0, 100_000);
        assert!(tight > 0.998);
    }

    #[test]
    fn conditional_parameters_match_published_values() {
        let cond = example_model().prior_params().conditional(2.0);
        assert!((cond.tau2_psi_sq - 1.5239).abs() < 1e-3, "{}", cond.tau2_psi_sq);
        assert!((cond.nu_psi - 8.7502).abs() < 1e-3, "{}", cond.nu_psi);
        assert!((cond.z0 - (-7.0883)).abs() < 2e-3, "{}", cond.z0);
    }

    #[test]
    fn posterior_update_is_convex_combination() {
        let model = example_model();
        let post = model.posterior_params(20.188, 10.699);
        assert!(post.mu > 17.5 && post.mu < 20.188);
        assert!((post.mu - 20.1567).abs() < 1e-3);
        // Fixed point: data at the prior mean stays put.
        let fixed = model.posterior_params(17.5, 8.75);
        assert!((fixed.mu - 17.5).abs() < 1e-12);
        assert!((fixed.nu - 8.75).abs() < 1e-12);
    }

    #[test]
    fn flat_prior_limit_recovers_data() {
        let model = FiellerModel::new(0.0, 1e12, 0.0, 1e12, 1.0, 10, 10).unwrap();
        let post = model.posterior_params(20.188, 10.699);
        assert!((post.mu - 20.188).abs() < 1e-9);
        assert!((post.nu - 10.699).abs() < 1e-9);
    }

    #[test]
    fn rb_exact_no_data_limit() {
        // Enormous noise: the posterior stays at the prior, so the ratio is 1.
        let model = FiellerModel::new(17.5, 2.9117, 8.75, 2.3284, 1e14, 10, 10).unwrap();
        for psi in [0.5, 1.0, 2.0, 3.0] {
            let rb = rb_exact(&model, psi, 20.188, 10.699).unwrap();
            assert!((rb - 1.0).abs() < 1e-4, "psi={psi}: {rb}");
        }
    }

    #[test]
    fn rb_exact_favors_true_value() {
        let model = example_model();
        assert!(rb_exact(&model, 1.90, 20.188, 10.699).unwrap() > 1.0);
        assert!(rb_exact(&model, 3.0, 20.188, 10.699).unwrap() < 1.0);
    }

    #[test]
    fn pivotal_interval_case() {
        let r = pivotal_region(20.188, 10.699, 10, 10, 1.0, 0.95).unwrap();
        match r {
            PivotalRegion::Interval { lo, hi } => {
                assert!((lo - 1.769177).abs() < 1e-5, "lo {lo}");
                assert!((hi - 2.017340).abs() < 1e-5, "hi {hi}");
                // Oracle: the pivotal statistic changes sides exactly at the
                // roots.
                let stat = |psi: f64| {
                    (20.188 - psi * 10.699).abs() / (0.1 + psi * psi / 10.0).sqrt()
                };
                let z = normal_quantile(0.975).unwrap();
                assert!(stat(lo + 1e-6) < z && stat(lo - 1e-6) > z);
                assert!(stat(hi - 1e-6) < z && stat(hi + 1e-6) > z);
            }
            other => panic!("expected interval, got {other:?}"),
        }
        let q = r.quantized(0.002);
        match q {
            PivotalRegion::Interval { lo, hi } => {
                assert!((lo - 1.770).abs() < 1e-9);
                assert!((hi - 2.016).abs() < 1e-9);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn pivotal_exclusive_case() {
        let r = pivotal_region(10.0, 0.5, 1, 1, 1.0, 0.95).unwrap();
        match r {
            PivotalRegion::Exclusive { below, above } => {
                assert!((below - (-6.750590)).abs() < 1e-5, "below {below}");
                assert!((above - 3.966206).abs() < 1e-5, "above {above}");
            }
            other => panic!("expected exclusive, got {other:?}"),
        }
        match r.quantized(0.002) {
            PivotalRegion::Exclusive { below, above } => {
                assert!((below - (-6.752)).abs() < 1e-9);
                assert!((above - 3.968).abs() < 1e-9);
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn pivotal_whole_line_case() {
        let r = pivotal_region(0.5, 0.5, 1, 1, 1.0, 0.95).unwrap();
        assert_eq!(r, PivotalRegion::WholeLine);
    }

    #[test]
    fn pivotal_degenerate_half_line() {
        // ybar exactly at the z boundary makes the quadratic linear.
        let z = normal_quantile(0.975).unwrap();
        let r = pivotal_region(10.0, z, 1, 1, 1.0, 0.95).unwrap();
        match r {
            PivotalRegion::HalfLine { upper, .. } => assert!(upper),
            other => panic!("expected half line, got {other:?}"),
        }
    }

    #[test]
    fn mills_positivity_along_conditional() {
        // The normalizer of the upper sampling branch is positive for every
        // z0, which is exactly the Mills-ratio inequality.
        let mut z0 = -12.0;
        while z0 <= 12.0 {
            let n0 = if z0 <= 0.0 {
                normal_pdf(z0) - z0 * normal_sf(z0)
            } else {
                normal_pdf(z0) * (1.0 - z0 * crate::stats::mills_upper(z0))
            };
            assert!(n0 > 0.0, "z0={z0}");
            z0 += 0.01;
        }
    }
}
