//! Cross-module consistency: the discretized engine against the closed
//! forms, and the long-tailed textbook datasets end to end.

use relbelief::engine::credible_region;
use relbelief::fieller::{elicit_fieller, infer, rb_exact, FiellerModel};
use relbelief::stats::RandomSource;

fn example1() -> FiellerModel {
    let p = elicit_fieller(10.0, 25.0, 1.0, 3.0, 2.0, 0.99).unwrap();
    FiellerModel::new(p.mu0, p.tau10, p.nu0, p.tau20, 1.0, 10, 10).unwrap()
}

#[test]
fn discretized_ratio_agrees_with_closed_form() {
    let model = example1();
    let src = RandomSource::new(11, 0);
    let inf = infer(&model, 20.188, 10.699, 0.1, 0.001, 200_000, &src).unwrap();
    let b = &inf.beliefs;
    let prior = model.prior_params();
    let posterior = model.posterior_params(20.188, 10.699);
    // Bin-level exact ratio: integrated posterior over integrated prior
    // (five-point Simpson per bin), matching what the histogram estimates.
    let bin_exact = |i: usize| -> f64 {
        let (lo, hi) = b.grid().edges(i);
        let quad = |f: &dyn Fn(f64) -> f64| {
            let h = (hi - lo) / 4.0;
            (f(lo) + 4.0 * f(lo + h) + 2.0 * f(lo + 2.0 * h) + 4.0 * f(lo + 3.0 * h) + f(hi))
                * h
                / 3.0
        };
        quad(&|x| posterior.density(x)) / quad(&|x| prior.density(x))
    };
    let mut checked = 0;
    for i in 0..b.grid().count() {
        if b.prior_mass()[i] < 1e-3 {
            continue;
        }
        let exact = bin_exact(i);
        // Scaled so steep high-ratio bins and flat tail bins are treated
        // alike; Monte Carlo noise dominates the residual.
        let err = (b.rb()[i] - exact).abs() / (1.0 + exact);
        assert!(err < 0.1, "bin {i} at {:.2}: {} vs {exact}", b.grid().midpoint(i), b.rb()[i]);
        // The point evaluation stays in the same ballpark as well.
        let point = rb_exact(&model, b.grid().midpoint(i), 20.188, 10.699).unwrap();
        assert!((b.rb()[i] - point).abs() / (1.0 + point) < 0.25);
        checked += 1;
    }
    assert!(checked > 20, "only {checked} bins carried enough prior mass");
}

#[test]
fn credible_region_nested_in_plausible() {
    let model = example1();
    let src = RandomSource::new(12, 0);
    let inf = infer(&model, 20.188, 10.699, 0.1, 0.001, 100_000, &src).unwrap();
    let pl = &inf.regions.plausible;
    for gamma in [0.5, 0.8, 0.95] {
        if gamma <= pl.posterior_content {
            let c = credible_region(&inf.beliefs, gamma).unwrap();
            assert!(
                c.bins.iter().all(|b| pl.bins.contains(b)),
                "gamma={gamma}: credible region must sit inside the plausible region"
            );
            assert!(c.posterior_content >= gamma);
        }
    }
}

#[test]
fn infer_is_deterministic_per_seed() {
    let model = example1();
    let a = infer(&model, 20.188, 10.699, 0.1, 0.001, 50_000, &RandomSource::new(9, 0)).unwrap();
    let b = infer(&model, 20.188, 10.699, 0.1, 0.001, 50_000, &RandomSource::new(9, 0)).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.beliefs.posterior_mass(), b.beliefs.posterior_mass());
    let c = infer(&model, 20.188, 10.699, 0.1, 0.001, 50_000, &RandomSource::new(10, 0)).unwrap();
    assert_ne!(a.beliefs.posterior_mass(), c.beliefs.posterior_mass());
}

#[test]
fn long_tailed_datasets_end_to_end() {
    // Both textbook datasets where the pivotal misbehaves: the evidence
    // regions stay well defined on the truncated grid.
    let tau = 3f64.sqrt();
    // Means far apart: the plausible region is two far tails.
    let model_a = FiellerModel::new(12.0, tau, 0.0, tau, 1.0, 1, 1).unwrap();
    let inf_a = infer(&model_a, 10.0, 0.5, 0.1, 0.001, 100_000, &RandomSource::new(13, 0)).unwrap();
    let pl_a = &inf_a.regions.plausible;
    let span_a = (pl_a.intervals.first().unwrap().0, pl_a.intervals.last().unwrap().1);
    assert!(span_a.0 < -15.0 && span_a.1 > 6.0, "both tails plausible: {span_a:?}");
    assert!((pl_a.posterior_content - 0.79).abs() < 0.05, "{}", pl_a.posterior_content);
    assert!((pl_a.prior_content - 0.49).abs() < 0.06, "{}", pl_a.prior_content);
    // A central stretch carries the evidence against.
    let im_a = &inf_a.regions.implausible;
    let central = im_a
        .intervals
        .iter()
        .any(|(lo, hi)| *lo < -10.0 && *hi > 4.0);
    assert!(central, "central implausible stretch missing: {:?}", &im_a.intervals[..3.min(im_a.intervals.len())]);

    // Means both near zero: the plausible region is essentially the
    // positive half line.
    let model_b = FiellerModel::new(0.0, tau, 0.0, tau, 1.0, 1, 1).unwrap();
    let inf_b = infer(&model_b, 0.5, 0.5, 0.1, 0.001, 100_000, &RandomSource::new(13, 1)).unwrap();
    let pl_b = &inf_b.regions.plausible;
    assert!((pl_b.posterior_content - 0.534).abs() < 0.05, "{}", pl_b.posterior_content);
    assert!((pl_b.prior_content - 0.498).abs() < 0.05, "{}", pl_b.prior_content);
    let first = pl_b.intervals.first().unwrap();
    assert!(first.0 > -1.0 && first.0 < 0.5, "region starts near zero: {first:?}");
}
