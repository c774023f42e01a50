//! Discretized relative-belief machinery: grids, histogram masses, relative
//! belief ratios, and plausible / implausible / credible regions.
//!
//! The continuous parameter is cut into bins of width `delta` (the meaningful
//! difference), prior and posterior masses are estimated per bin, and all
//! inferences are read off the per-bin ratio. Evidence in favor of a bin means
//! ratio > 1, evidence against means ratio < 1, and exactly 1 is no evidence
//! either way, so a bin at exactly 1 belongs to neither region.

use crate::error::{Error, Result};

/// A delta-spaced discretization of the effective parameter range.
#[derive(Debug, Clone)]
pub struct Grid {
    lo: f64,
    delta: f64,
    count: usize,
}

impl Grid {
    /// Grid with `count` bins of width `delta` starting at `lo`.
    pub fn new(lo: f64, delta: f64, count: usize) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::DegenerateGrid(format!(
                "bin width must be positive, got {delta}"
            )));
        }
        if count == 0 {
            return Err(Error::DegenerateGrid("grid needs at least one bin".into()));
        }
        if !lo.is_finite() {
            return Err(Error::DegenerateGrid(format!("non-finite lower edge {lo}")));
        }
        Ok(Self { lo, delta, count })
    }

    /// Grid covering [lo, hi]; the range is widened symmetrically so that it
    /// is an exact number of delta bins.
    pub fn spanning(lo: f64, hi: f64, delta: f64) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::DegenerateGrid(format!(
                "empty range [{lo}, {hi}]"
            )));
        }
        let raw = (hi - lo) / delta;
        // Tolerate float fuzz when the range is already a whole number of bins.
        let count = if (raw - raw.round()).abs() < 1e-9 * raw.max(1.0) {
            raw.round() as usize
        } else {
            raw.ceil() as usize
        };
        let count = count.max(1);
        let pad = 0.5 * (count as f64 * delta - (hi - lo));
        Self::new(lo - pad, delta, count)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.lo + self.count as f64 * self.delta
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn midpoint(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * self.delta
    }

    pub fn midpoints(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.midpoint(i)).collect()
    }

    /// Bin edges [lower, upper) of bin i.
    pub fn edges(&self, i: usize) -> (f64, f64) {
        (
            self.lo + i as f64 * self.delta,
            self.lo + (i + 1) as f64 * self.delta,
        )
    }

    /// Index of the bin containing x, if x lies in [lo, hi).
    pub fn bin_of(&self, x: f64) -> Option<usize> {
        if x < self.lo {
            return None;
        }
        let i = ((x - self.lo) / self.delta) as usize;
        (i < self.count).then_some(i)
    }
}

/// Build a grid from samples: the range is the central 1 - tail_prob of the
/// empirical distribution, widened outward to a whole number of bins.
pub fn build_grid(samples: &[f64], delta: f64, tail_prob: f64) -> Result<Grid> {
    if samples.len() < 1000 {
        return Err(Error::DegenerateGrid(format!(
            "need at least 1000 samples to locate the effective range, got {}",
            samples.len()
        )));
    }
    if !(0.0..1.0).contains(&tail_prob) {
        return Err(Error::Domain(format!(
            "tail_prob must be in [0,1), got {tail_prob}"
        )));
    }
    let mut sorted: Vec<f64> = samples.iter().copied().filter(|x| x.is_finite()).collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if sorted.is_empty() || sorted[0] == sorted[sorted.len() - 1] {
        return Err(Error::DegenerateGrid("all samples equal".into()));
    }
    let quantile = |q: f64| -> f64 {
        let idx = q * (sorted.len() - 1) as f64;
        let i = idx.floor() as usize;
        let frac = idx - i as f64;
        if i + 1 < sorted.len() {
            sorted[i] * (1.0 - frac) + sorted[i + 1] * frac
        } else {
            sorted[i]
        }
    };
    let lo = quantile(tail_prob / 2.0);
    let hi = quantile(1.0 - tail_prob / 2.0);
    if !(hi > lo) {
        return Err(Error::DegenerateGrid(
            "effective range collapsed after tail truncation".into(),
        ));
    }
    // Values are meaningful to accuracy delta, so the representative points
    // are the multiples of delta: snap the lower edge outward onto the
    // half-offset lattice so every midpoint is an integer multiple of delta.
    let lo_aligned = ((lo / delta - 0.5).floor() + 0.5) * delta;
    let count = ((hi - lo_aligned) / delta).ceil().max(1.0) as usize;
    Grid::new(lo_aligned, delta, count)
}

/// Proportion of samples per bin; out-of-range samples are dropped and the
/// remaining mass renormalized to 1.
pub fn histogram_mass(samples: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    let mut counts = vec![0u64; grid.count()];
    let mut kept = 0u64;
    for &x in samples {
        if let Some(i) = grid.bin_of(x) {
            counts[i] += 1;
            kept += 1;
        }
    }
    if kept == 0 {
        return Err(Error::EmptyHistogram);
    }
    Ok(counts.iter().map(|&c| c as f64 / kept as f64).collect())
}

/// Elementwise posterior/prior ratio.
///
/// A bin with zero mass on both sides carries no evidence either way and gets
/// ratio 1; posterior mass on a zero-prior bin is an inconsistency and errors.
pub fn relative_belief(prior_mass: &[f64], posterior_mass: &[f64]) -> Result<Vec<f64>> {
    if prior_mass.len() != posterior_mass.len() {
        return Err(Error::Domain(format!(
            "mass vectors differ in length: {} vs {}",
            prior_mass.len(),
            posterior_mass.len()
        )));
    }
    let mut rb = Vec::with_capacity(prior_mass.len());
    for (i, (&p, &q)) in prior_mass.iter().zip(posterior_mass).enumerate() {
        if p < 0.0 || q < 0.0 {
            return Err(Error::Domain(format!("negative mass at bin {i}")));
        }
        if p == 0.0 {
            if q > 0.0 {
                return Err(Error::ZeroPriorMass {
                    index: i,
                    posterior: q,
                });
            }
            rb.push(1.0);
        } else {
            rb.push(q / p);
        }
    }
    Ok(rb)
}

/// Per-bin prior mass, posterior mass, and relative belief ratio for one
/// observed dataset.
#[derive(Debug, Clone)]
pub struct DiscreteBeliefs {
    grid: Grid,
    prior_mass: Vec<f64>,
    posterior_mass: Vec<f64>,
    rb: Vec<f64>,
}

impl DiscreteBeliefs {
    pub fn new(grid: Grid, prior_mass: Vec<f64>, posterior_mass: Vec<f64>) -> Result<Self> {
        if prior_mass.len() != grid.count() || posterior_mass.len() != grid.count() {
            return Err(Error::Domain(format!(
                "mass vectors must have one entry per bin ({})",
                grid.count()
            )));
        }
        for (name, v) in [("prior", &prior_mass), ("posterior", &posterior_mass)] {
            let s: f64 = v.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!("{name} mass sums to {s}, not 1")));
            }
        }
        let rb = relative_belief(&prior_mass, &posterior_mass)?;
        let beliefs = Self {
            grid,
            prior_mass,
            posterior_mass,
            rb,
        };
        // Masses that sum to one cannot put every bin strictly above 1.
        if beliefs.rb.iter().all(|&r| r > 1.0) {
            return Err(Error::Domain(
                "all bins have ratio > 1, which contradicts unit total mass".into(),
            ));
        }
        Ok(beliefs)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn prior_mass(&self) -> &[f64] {
        &self.prior_mass
    }

    pub fn posterior_mass(&self) -> &[f64] {
        &self.posterior_mass
    }

    pub fn rb(&self) -> &[f64] {
        &self.rb
    }
}

/// One side of the evidence partition: a set of bins with its merged
/// intervals and probability contents.
#[derive(Debug, Clone)]
pub struct RegionPart {
    pub bins: Vec<usize>,
    pub intervals: Vec<(f64, f64)>,
    pub posterior_content: f64,
    pub prior_content: f64,
    /// Set when the region includes the first / last grid bin, meaning it may
    /// continue beyond the truncated range.
    pub touches_lower: bool,
    pub touches_upper: bool,
}

impl RegionPart {
    fn from_bins(beliefs: &DiscreteBeliefs, bins: Vec<usize>) -> Self {
        let grid = beliefs.grid();
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        for &i in &bins {
            let (lo, hi) = grid.edges(i);
            match intervals.last_mut() {
                Some(last) if (last.1 - lo).abs() < 1e-12 * grid.delta().max(1.0) => {
                    last.1 = hi;
                }
                _ => intervals.push((lo, hi)),
            }
        }
        let posterior_content = bins.iter().map(|&i| beliefs.posterior_mass[i]).sum();
        let prior_content = bins.iter().map(|&i| beliefs.prior_mass[i]).sum();
        let touches_lower = bins.first() == Some(&0);
        let touches_upper = bins.last() == Some(&(grid.count() - 1));
        Self {
            bins,
            intervals,
            posterior_content,
            prior_content,
            touches_lower,
            touches_upper,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }
}

/// The plausible region (evidence in favor) and implausible region
/// (evidence against) of one dataset.
#[derive(Debug, Clone)]
pub struct Regions {
    pub plausible: RegionPart,
    pub implausible: RegionPart,
}

/// Split the grid by the principle of evidence: ratio > 1 is plausible,
/// ratio < 1 implausible, exactly 1 neither.
pub fn plausible_region(beliefs: &DiscreteBeliefs) -> Regions {
    let plausible: Vec<usize> = (0..beliefs.rb.len()).filter(|&i| beliefs.rb[i] > 1.0).collect();
    let implausible: Vec<usize> = (0..beliefs.rb.len()).filter(|&i| beliefs.rb[i] < 1.0).collect();
    Regions {
        plausible: RegionPart::from_bins(beliefs, plausible),
        implausible: RegionPart::from_bins(beliefs, implausible),
    }
}

/// Midpoint of the bin with the largest ratio; ties break to the smallest
/// midpoint.
pub fn rb_estimate(beliefs: &DiscreteBeliefs) -> f64 {
    let mut best = 0usize;
    for (i, &r) in beliefs.rb.iter().enumerate() {
        if r > beliefs.rb[best] {
            best = i;
        }
    }
    beliefs.grid().midpoint(best)
}

/// Relative-belief credible region: the bins with ratio >= r_gamma, where
/// r_gamma is the largest cutoff whose sub-cutoff posterior mass stays within
/// 1 - gamma. Its posterior content is always at least gamma.
pub fn credible_region(beliefs: &DiscreteBeliefs, gamma: f64) -> Result<RegionPart> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!(
            "credible level must be in (0,1), got {gamma}"
        )));
    }
    let mut order: Vec<usize> = (0..beliefs.rb.len()).collect();
    order.sort_by(|&a, &b| beliefs.rb[a].partial_cmp(&beliefs.rb[b]).unwrap());
    // Walk distinct ratio values upward while the posterior mass strictly
    // below the value stays within 1 - gamma.
    let budget = 1.0 - gamma;
    let mut below = 0.0;
    let mut r_gamma = f64::NEG_INFINITY;
    let mut j = 0;
    while j < order.len() {
        let r = beliefs.rb[order[j]];
        if below <= budget {
            r_gamma = r;
        } else {
            break;
        }
        let mut group_mass = 0.0;
        while j < order.len() && beliefs.rb[order[j]] == r {
            group_mass += beliefs.posterior_mass[order[j]];
            j += 1;
        }
        below += group_mass;
    }
    let bins: Vec<usize> = (0..beliefs.rb.len())
        .filter(|&i| beliefs.rb[i] >= r_gamma)
        .collect();
    Ok(RegionPart::from_bins(beliefs, bins))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{draw_normal, draw_uniform, RandomSource};
    use proptest::prelude::*;

    fn beliefs_from(prior: Vec<f64>, posterior: Vec<f64>) -> DiscreteBeliefs {
        let grid = Grid::new(0.0, 1.0, prior.len()).unwrap();
        DiscreteBeliefs::new(grid, prior, posterior).unwrap()
    }

    #[test]
    fn grid_midpoints() {
        let g = Grid::new(0.0, 0.1, 10).unwrap();
        assert!((g.midpoint(0) - 0.05).abs() < 1e-12);
        assert!((g.midpoint(9) - 0.95).abs() < 1e-12);
        assert_eq!(g.bin_of(0.31), Some(3));
        assert_eq!(g.bin_of(-0.01), None);
        assert_eq!(g.bin_of(1.0), None);
    }

    #[test]
    fn build_grid_unit_interval() {
        // Samples spanning [0,1]: the range is covered by bins whose
        // midpoints sit on the multiples of delta.
        let samples: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let g = build_grid(&samples, 0.1, 0.0).unwrap();
        assert_eq!(g.count(), 11);
        assert!((g.midpoint(0) - 0.0).abs() < 1e-9);
        assert!((g.midpoint(10) - 1.0).abs() < 1e-9);
        assert!(g.lo() <= 0.0 && g.hi() >= 1.0);
    }

    #[test]
    fn build_grid_normal_tails() {
        let mut src = RandomSource::new(3, 0);
        let samples: Vec<f64> =
            (0..100_000).map(|_| draw_normal(&mut src, 0.0, 1.0).unwrap()).collect();
        let g = build_grid(&samples, 0.1, 0.001).unwrap();
        assert!((g.lo() - (-3.29)).abs() < 0.1, "lo {}", g.lo());
        assert!((g.hi() - 3.29).abs() < 0.1, "hi {}", g.hi());
    }

    #[test]
    fn build_grid_rejects_degenerate_input() {
        assert!(build_grid(&[1.0; 2000], 0.1, 0.001).is_err());
        assert!(build_grid(&[1.0; 10], 0.1, 0.001).is_err());
    }

    #[test]
    fn histogram_mass_small() {
        let grid = Grid::new(0.0, 0.5, 2).unwrap();
        let m = histogram_mass(&[0.1, 0.1, 0.6, 0.9], &grid).unwrap();
        assert_eq!(m, vec![0.5, 0.5]);
        assert!(matches!(
            histogram_mass(&[5.0, 6.0], &grid),
            Err(Error::EmptyHistogram)
        ));
    }

    #[test]
    fn histogram_mass_uniform() {
        let mut src = RandomSource::new(4, 0);
        let samples: Vec<f64> =
            (0..100_000).map(|_| draw_uniform(&mut src, 0.0, 1.0).unwrap()).collect();
        let grid = Grid::new(0.0, 0.1, 10).unwrap();
        for m in histogram_mass(&samples, &grid).unwrap() {
            assert!((m - 0.1).abs() < 0.01);
        }
    }

    #[test]
    fn relative_belief_arithmetic() {
        assert_eq!(
            relative_belief(&[0.5, 0.5], &[0.5, 0.5]).unwrap(),
            vec![1.0, 1.0]
        );
        let rb = relative_belief(&[0.5, 0.5], &[0.8, 0.2]).unwrap();
        assert!((rb[0] - 1.6).abs() < 1e-12 && (rb[1] - 0.4).abs() < 1e-12);
        assert_eq!(relative_belief(&[0.0, 1.0], &[0.0, 1.0]).unwrap()[0], 1.0);
        assert!(matches!(
            relative_belief(&[0.0, 1.0], &[0.5, 0.5]),
            Err(Error::ZeroPriorMass { index: 0, .. })
        ));
    }

    #[test]
    fn no_update_gives_empty_regions() {
        let b = beliefs_from(vec![0.25; 4], vec![0.25; 4]);
        let r = plausible_region(&b);
        assert!(r.plausible.is_empty());
        assert!(r.implausible.is_empty());
    }

    #[test]
    fn estimate_and_tie_break() {
        // ratios (0.5, 2, 0.5) on midpoints (0.5, 1.5, 2.5).
        let b = beliefs_from(vec![1.0 / 3.0; 3], vec![1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0]);
        assert!((rb_estimate(&b) - 1.5).abs() < 1e-12);
        // Constant ratio ties break to the smallest midpoint.
        let b = beliefs_from(vec![0.5, 0.5], vec![0.5, 0.5]);
        assert!((rb_estimate(&b) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn region_merging_and_contents() {
        let b = beliefs_from(
            vec![0.25, 0.25, 0.25, 0.25],
            vec![0.4, 0.4, 0.1, 0.1],
        );
        let r = plausible_region(&b);
        assert_eq!(r.plausible.bins, vec![0, 1]);
        assert_eq!(r.plausible.intervals.len(), 1);
        assert!((r.plausible.posterior_content - 0.8).abs() < 1e-12);
        assert!((r.plausible.prior_content - 0.5).abs() < 1e-12);
        assert!(r.plausible.touches_lower && !r.plausible.touches_upper);
        assert_eq!(r.implausible.bins, vec![2, 3]);
    }

    #[test]
    fn credible_region_two_bins() {
        let b = beliefs_from(vec![0.5, 0.5], vec![0.7, 0.3]);
        let c = credible_region(&b, 0.6).unwrap();
        assert_eq!(c.bins, vec![0]);
        assert!(c.posterior_content >= 0.6);
    }

    #[test]
    fn credible_region_small_gamma_is_argmax() {
        let b = beliefs_from(vec![0.25; 4], vec![0.1, 0.5, 0.3, 0.1]);
        let c = credible_region(&b, 1e-9).unwrap();
        assert_eq!(c.bins, vec![1]);
    }

    proptest! {
        #[test]
        fn mass_invariants_hold(raw_prior in proptest::collection::vec(1u32..1000, 2..40),
                                raw_post in proptest::collection::vec(0u32..1000, 2..40)) {
            let n = raw_prior.len().min(raw_post.len());
            let pr: Vec<f64> = raw_prior[..n].iter().map(|&x| x as f64).collect();
            let po: Vec<f64> = raw_post[..n].iter().map(|&x| x as f64).collect();
            let ps: f64 = pr.iter().sum();
            let qs: f64 = po.iter().sum();
            prop_assume!(qs > 0.0);
            let prior: Vec<f64> = pr.iter().map(|x| x / ps).collect();
            let posterior: Vec<f64> = po.iter().map(|x| x / qs).collect();
            let grid = Grid::new(0.0, 0.5, n).unwrap();
            let b = DiscreteBeliefs::new(grid, prior, posterior).unwrap();

            // sum of rb * prior mass equals total posterior mass, i.e. 1.
            let total: f64 = b.rb().iter().zip(b.prior_mass()).map(|(r, p)| r * p).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);

            // The plausible region is never the whole grid, and the credible
            // region meets its posterior content guarantee.
            let regions = plausible_region(&b);
            prop_assert!(regions.plausible.bins.len() < b.rb().len());
            for gamma in [0.2, 0.5, 0.8, 0.95] {
                let c = credible_region(&b, gamma).unwrap();
                prop_assert!(c.posterior_content >= gamma - 1e-12);
            }
        }

        #[test]
        fn relabeling_midpoints_is_invariant(raw_prior in proptest::collection::vec(1u32..1000, 3..30),
                                             raw_post in proptest::collection::vec(1u32..1000, 3..30),
                                             lo in -5.0f64..5.0, delta in 0.01f64..2.0) {
            let n = raw_prior.len().min(raw_post.len());
            let pr: Vec<f64> = raw_prior[..n].iter().map(|&x| x as f64).collect();
            let po: Vec<f64> = raw_post[..n].iter().map(|&x| x as f64).collect();
            let ps: f64 = pr.iter().sum();
            let qs: f64 = po.iter().sum();
            let prior: Vec<f64> = pr.iter().map(|x| x / ps).collect();
            let posterior: Vec<f64> = po.iter().map(|x| x / qs).collect();

            // Same masses on two different geometries: every bin-indexed
            // output is identical, as a strictly increasing relabeling of the
            // midpoints must leave evidence untouched.
            let a = DiscreteBeliefs::new(Grid::new(0.0, 1.0, n).unwrap(),
                                         prior.clone(), posterior.clone()).unwrap();
            let b = DiscreteBeliefs::new(Grid::new(lo, delta, n).unwrap(),
                                         prior, posterior).unwrap();
            prop_assert_eq!(a.rb(), b.rb());
            let (ra, rb_) = (plausible_region(&a), plausible_region(&b));
            prop_assert_eq!(&ra.plausible.bins, &rb_.plausible.bins);
            prop_assert_eq!(&ra.implausible.bins, &rb_.implausible.bins);
            prop_assert!((ra.plausible.posterior_content - rb_.plausible.posterior_content).abs() < 1e-12);
            prop_assert!((ra.plausible.prior_content - rb_.plausible.prior_content).abs() < 1e-12);
            // The argmax bin is the same, so the estimates map to each other.
            let ia = a.grid().bin_of(rb_estimate(&a)).unwrap();
            let ib = b.grid().bin_of(rb_estimate(&b)).unwrap();
            prop_assert_eq!(ia, ib);
            for gamma in [0.3, 0.7] {
                let ca = credible_region(&a, gamma).unwrap();
                let cb = credible_region(&b, gamma).unwrap();
                prop_assert_eq!(ca.bins, cb.bins);
            }
        }
    }
}
