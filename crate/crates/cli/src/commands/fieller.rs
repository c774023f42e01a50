use clap::{Args, ValueEnum};
use std::path::PathBuf;

use super::STREAM_STRIDE;
use crate::report::{describe_intervals, fnum, text_table, write_csv};
use crate::Ctx;
use relbelief::engine::credible_region;
use relbelief::fieller::{
    bias_against, bias_in_favor, elicit_fieller, estimation_bias, infer, pivotal_region,
    FiellerModel, PivotalRegion,
};
use relbelief::stats::RandomSource;

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Observed mean of the numerator sample.
    #[arg(long, allow_negative_numbers = true)]
    pub xbar: Option<f64>,
    /// Observed mean of the denominator sample.
    #[arg(long, allow_negative_numbers = true)]
    pub ybar: Option<f64>,
    /// Numerator sample size.
    #[arg(long)]
    pub m: Option<u32>,
    /// Denominator sample size.
    #[arg(long)]
    pub n: Option<u32>,
    /// Known common variance.
    #[arg(long)]
    pub sigma2: Option<f64>,
    /// Numerator-mean certainty bounds used to elicit the prior.
    #[arg(long, allow_negative_numbers = true)]
    pub m1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m2: Option<f64>,
    /// Ratio certainty bounds used to elicit the prior.
    #[arg(long)]
    pub r1: Option<f64>,
    #[arg(long)]
    pub r2: Option<f64>,
    /// Anchor ratio value for the elicitation.
    #[arg(long)]
    pub psi0: Option<f64>,
    /// Certainty level of the elicitation intervals.
    #[arg(long)]
    pub elicit_gamma: Option<f64>,
}

pub struct ResolvedModel {
    pub model: FiellerModel,
    pub xbar: f64,
    pub ybar: f64,
}

impl ModelArgs {
    pub fn resolve(&self, ctx: &Ctx) -> Result<ResolvedModel, String> {
        let f = &ctx.file.fieller;
        let xbar = self.xbar.or(f.xbar).unwrap_or(20.188);
        let ybar = self.ybar.or(f.ybar).unwrap_or(10.699);
        let m = self.m.or(f.m).unwrap_or(10);
        let n = self.n.or(f.n).unwrap_or(10);
        let sigma2 = self.sigma2.or(f.sigma2).unwrap_or(1.0);
        let m1 = self.m1.or(f.m1).unwrap_or(10.0);
        let m2 = self.m2.or(f.m2).unwrap_or(25.0);
        let r1 = self.r1.or(f.r1).unwrap_or(1.0);
        let r2 = self.r2.or(f.r2).unwrap_or(3.0);
        let psi0 = self.psi0.or(f.psi0).unwrap_or(2.0);
        let egamma = self.elicit_gamma.or(f.elicit_gamma).unwrap_or(0.99);
        let prior = elicit_fieller(m1, m2, r1, r2, psi0, egamma).map_err(|e| e.to_string())?;
        let model = FiellerModel::new(prior.mu0, prior.tau10, prior.nu0, prior.tau20, sigma2, m, n)
            .map_err(|e| e.to_string())?;
        Ok(ResolvedModel { model, xbar, ybar })
    }
}

#[derive(Args, Debug)]
pub struct InferArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Meaningful difference: the bin width of the discretization.
    #[arg(long)]
    delta: Option<f64>,
    /// Probability trimmed from the simulated prior range (half per tail).
    #[arg(long)]
    tail_prob: Option<f64>,
    /// Confidence level of the pivotal comparison region.
    #[arg(long)]
    pivotal_gamma: Option<f64>,
    /// Credible level reported alongside the plausible region.
    #[arg(long, default_value_t = 0.95)]
    credible_gamma: f64,
    /// Write bin-level figure data (psi, prior, posterior, ratio) here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_infer(ctx: &Ctx, args: InferArgs) -> Result<(), String> {
    let f = &ctx.file.fieller;
    let resolved = args.model.resolve(ctx)?;
    let delta = args.delta.or(f.delta).unwrap_or(0.1);
    let tail_prob = args.tail_prob.or(f.tail_prob).unwrap_or(0.001);
    let pivotal_gamma = args.pivotal_gamma.or(f.pivotal_gamma).unwrap_or(0.95);
    let ResolvedModel { model, xbar, ybar } = resolved;

    let src = RandomSource::new(ctx.seed, 0);
    let inference = infer(&model, xbar, ybar, delta, tail_prob, ctx.mc as usize, &src)
        .map_err(|e| e.to_string())?;
    let pivotal = pivotal_region(xbar, ybar, model.m, model.n, model.sigma0_sq, pivotal_gamma)
        .map_err(|e| e.to_string())?;
    let credible = credible_region(&inference.beliefs, args.credible_gamma)
        .map_err(|e| e.to_string())?;

    println!("ratio inference");
    println!(
        "  data: xbar={} ybar={} m={} n={} sigma0^2={}",
        fnum(xbar),
        fnum(ybar),
        model.m,
        model.n,
        fnum(model.sigma0_sq)
    );
    println!(
        "  prior: mu0={} tau10={} nu0={} tau20={}",
        fnum(model.mu0),
        fnum(model.tau10),
        fnum(model.nu0),
        fnum(model.tau20)
    );
    let grid = inference.beliefs.grid();
    println!(
        "  grid: [{}, {}] delta={} bins={} (draws {})",
        fnum(grid.lo()),
        fnum(grid.hi()),
        fnum(grid.delta()),
        grid.count(),
        ctx.mc
    );
    println!("  estimate: {}", fnum(inference.estimate));
    let pl = &inference.regions.plausible;
    println!(
        "  plausible region: {}  posterior content {}  prior content {}{}",
        describe_intervals(&pl.intervals),
        fnum(pl.posterior_content),
        fnum(pl.prior_content),
        boundary_note(pl.touches_lower, pl.touches_upper)
    );
    let im = &inference.regions.implausible;
    if im.intervals.len() <= 6 {
        println!(
            "  implausible region: {}  posterior content {}  prior content {}",
            describe_intervals(&im.intervals),
            fnum(im.posterior_content),
            fnum(im.prior_content)
        );
    } else {
        println!(
            "  implausible region: {} pieces  posterior content {}  prior content {}",
            im.intervals.len(),
            fnum(im.posterior_content),
            fnum(im.prior_content)
        );
    }
    println!(
        "  {} credible region: {}  posterior content {}",
        fnum(args.credible_gamma),
        describe_intervals(&credible.intervals),
        fnum(credible.posterior_content)
    );
    println!("  pivotal {} region: {}", fnum(pivotal_gamma), describe_pivotal(&pivotal));

    if let Some(path) = args.out.as_deref() {
        let headers = ["psi", "prior_density", "posterior_density", "relative_belief"];
        let b = &inference.beliefs;
        let rows: Vec<Vec<String>> = (0..b.grid().count())
            .map(|i| {
                vec![
                    fnum(b.grid().midpoint(i)),
                    fnum(b.prior_mass()[i] / b.grid().delta()),
                    fnum(b.posterior_mass()[i] / b.grid().delta()),
                    fnum(b.rb()[i]),
                ]
            })
            .collect();
        write_csv(path, &headers, &rows)?;
        println!("  figure data written to {}", path.display());
    }
    Ok(())
}

fn boundary_note(lower: bool, upper: bool) -> &'static str {
    match (lower, upper) {
        (true, true) => "  [region reaches both ends of the truncated grid]",
        (true, false) => "  [region reaches the lower end of the truncated grid]",
        (false, true) => "  [region reaches the upper end of the truncated grid]",
        (false, false) => "",
    }
}

pub fn describe_pivotal(region: &PivotalRegion) -> String {
    match region {
        PivotalRegion::Interval { lo, hi } => format!("interval ({}, {})", fnum(*lo), fnum(*hi)),
        PivotalRegion::Exclusive { below, above } => format!(
            "exclusive (-inf, {}) U ({}, inf)",
            fnum(*below),
            fnum(*above)
        ),
        PivotalRegion::WholeLine => "whole line (absurd)".to_string(),
        PivotalRegion::HalfLine { bound, upper } => {
            if *upper {
                format!("half line ({}, inf)", fnum(*bound))
            } else {
                format!("half line (-inf, {})", fnum(*bound))
            }
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq)]
pub enum BiasWhat {
    Against,
    Favor,
    Estimation,
    Sweep,
    Curve,
    All,
}

#[derive(Args, Debug)]
pub struct BiasArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Which bias quantities to compute.
    #[arg(long, value_enum, default_value_t = BiasWhat::All)]
    what: BiasWhat,
    /// Hypothesized ratio value.
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    hypothesis: f64,
    /// Meaningful difference for the in-favor computations.
    #[arg(long)]
    delta: Option<f64>,
    /// Sample sizes for the sweep (applied to both samples).
    #[arg(long, value_delimiter = ',', default_values_t = vec![20u32, 100, 500])]
    sweep_sizes: Vec<u32>,
    /// Bias-against curve grid.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    curve_lo: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    curve_hi: f64,
    #[arg(long, default_value_t = 0.1)]
    curve_step: f64,
    /// Outer prior draws for the estimation averages.
    #[arg(long, default_value_t = 1000)]
    estimation_draws: u64,
    /// Inner predictive draws per outer draw.
    #[arg(long, default_value_t = 10_000)]
    inner_draws: u64,
    /// Write the bias curve as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_bias(ctx: &Ctx, args: BiasArgs) -> Result<(), String> {
    let resolved = args.model.resolve(ctx)?;
    let model = resolved.model;
    let delta = args.delta.or(ctx.file.fieller.delta).unwrap_or(0.1);
    let psi0 = args.hypothesis;
    let all = args.what == BiasWhat::All;

    println!(
        "ratio bias estimates (hypothesis {}, delta {}, draws {})",
        fnum(psi0),
        fnum(delta),
        ctx.mc
    );
    if all || args.what == BiasWhat::Against {
        let src = RandomSource::new(ctx.seed, STREAM_STRIDE);
        let b = bias_against(&model, psi0, ctx.mc, &src).map_err(|e| e.to_string())?;
        println!(
            "  bias against:   {} (se {})   [P(no evidence for the true value)]",
            fnum(b.value),
            fnum(b.std_error)
        );
    }
    if all || args.what == BiasWhat::Favor {
        let src = RandomSource::new(ctx.seed, 2 * STREAM_STRIDE);
        let b = bias_in_favor(&model, psi0, delta, ctx.mc, &src).map_err(|e| e.to_string())?;
        println!(
            "  bias in favor:  {} (se {})   [P(no evidence against a meaningfully false value)]",
            fnum(b.value),
            fnum(b.std_error)
        );
    }
    if all || args.what == BiasWhat::Estimation {
        let src = RandomSource::new(ctx.seed, 3 * STREAM_STRIDE);
        let e = estimation_bias(&model, delta, args.estimation_draws, args.inner_draws, &src)
            .map_err(|e| e.to_string())?;
        println!(
            "  estimation: bias against {} (se {}), bias in favor {} (se {}), prior coverage {}",
            fnum(e.bias_against.value),
            fnum(e.bias_against.std_error),
            fnum(e.bias_in_favor.value),
            fnum(e.bias_in_favor.std_error),
            fnum(e.bayes_coverage)
        );
    }
    if all || args.what == BiasWhat::Sweep {
        let mut rows = Vec::new();
        for (i, &size) in args.sweep_sizes.iter().enumerate() {
            let swept =
                FiellerModel::new(model.mu0, model.tau10, model.nu0, model.tau20, model.sigma0_sq, size, size)
                    .map_err(|e| e.to_string())?;
            let src = RandomSource::new(ctx.seed, (4 + i as u64) * STREAM_STRIDE);
            let b = bias_in_favor(&swept, psi0, delta, ctx.mc, &src).map_err(|e| e.to_string())?;
            rows.push(vec![size.to_string(), fnum(b.value), fnum(b.std_error)]);
        }
        println!("  bias in favor by sample size:");
        print!("{}", indent(&text_table(&["m=n", "bias_in_favor", "se"], &rows), 4));
    }
    if all || args.what == BiasWhat::Curve {
        let grid: Vec<f64> = {
            let mut g = Vec::new();
            let mut x = args.curve_lo;
            while x <= args.curve_hi + 1e-12 {
                g.push(x);
                x += args.curve_step;
            }
            g
        };
        let src = RandomSource::new(ctx.seed, 64 * STREAM_STRIDE);
        let curve =
            relbelief::fieller::bias_curve(&model, &grid, ctx.mc, &src).map_err(|e| e.to_string())?;
        let (mut max_v, mut max_at) = (f64::NEG_INFINITY, grid[0]);
        for (psi, est) in grid.iter().zip(&curve) {
            if est.value > max_v {
                max_v = est.value;
                max_at = *psi;
            }
        }
        println!(
            "  bias-against curve on [{}, {}] step {}: max {} at {} => plausible region is a {}-confidence region",
            fnum(args.curve_lo),
            fnum(args.curve_hi),
            fnum(args.curve_step),
            fnum(max_v),
            fnum(max_at),
            fnum(1.0 - max_v)
        );
        if let Some(path) = args.out.as_deref() {
            let rows: Vec<Vec<String>> = grid
                .iter()
                .zip(&curve)
                .map(|(psi, est)| vec![fnum(*psi), fnum(est.value), fnum(est.std_error)])
                .collect();
            write_csv(path, &["psi", "bias_against", "se"], &rows)?;
            println!("  curve written to {}", path.display());
        }
    }
    Ok(())
}

fn indent(text: &str, by: usize) -> String {
    let pad = " ".repeat(by);
    text.lines().map(|l| format!("{pad}{l}\n")).collect()
}
