use clap::{Args, ValueEnum};
use std::path::PathBuf;

use super::STREAM_STRIDE;
use crate::report::{fnum, text_table, write_csv};
use crate::Ctx;
use relbelief::constrained::normal::estimation_bias_in_favor;
use relbelief::constrained::poisson;
use relbelief::constrained::{
    confidence_table, elicit_beta, elicit_gamma, elicit_truncnorm, poisson_confidence_table,
    ConstrainedNormalSpec, ConstrainedPoissonSpec, ConstrainedPrior, PoissonHistogram,
    PredictiveHistogram,
};
use relbelief::stats::RandomSource;

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq)]
pub enum Table {
    /// Bias against the hypothesized value, per sample size.
    BiasAgainst,
    /// Frequentist lower bound and Bayesian coverage of the plausible region.
    Confidence,
    /// Bias in favor of the hypothesized value, per sample size and delta.
    BiasInFavor,
    /// Prior-averaged bias in favor, per sample size and delta.
    Estimation,
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq)]
pub enum PriorChoice {
    Beta,
    Truncnorm,
    Both,
}

/// Bin count rule: a fine histogram, finer for large samples.
fn default_bins(n: u32) -> usize {
    if n <= 100 {
        1000
    } else {
        4000
    }
}

#[derive(Args, Debug)]
pub struct NormalArgs {
    #[arg(long, value_enum)]
    table: Table,
    #[arg(long, value_enum, default_value_t = PriorChoice::Both)]
    prior: PriorChoice,
    /// Sample sizes (table rows).
    #[arg(long, value_delimiter = ',', default_values_t = vec![10u32, 20, 50, 100, 500])]
    n_list: Vec<u32>,
    /// Meaningful differences (paired columns where applicable).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 0.1])]
    deltas: Vec<f64>,
    /// Hypothesized mean.
    #[arg(long)]
    mu_star: Option<f64>,
    /// Histogram bin count override (default 1000, 4000 when n > 100).
    #[arg(long)]
    bins: Option<usize>,
    /// Write the table as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

struct NamedPrior {
    label: &'static str,
    prior: ConstrainedPrior,
}

fn resolve_normal_priors(
    choice: PriorChoice,
    spec: &ConstrainedNormalSpec,
) -> Result<Vec<NamedPrior>, String> {
    let mut out = Vec::new();
    if choice == PriorChoice::Beta || choice == PriorChoice::Both {
        let (alpha0, beta0) = elicit_beta(spec).map_err(|e| e.to_string())?;
        out.push(NamedPrior {
            label: "beta",
            prior: ConstrainedPrior::BetaOnInterval { alpha0, beta0 },
        });
    }
    if choice == PriorChoice::Truncnorm || choice == PriorChoice::Both {
        let (mu0, tau0) = elicit_truncnorm(spec).map_err(|e| e.to_string())?;
        out.push(NamedPrior {
            label: "truncnorm",
            prior: ConstrainedPrior::TruncatedNormal { mu0, tau0 },
        });
    }
    Ok(out)
}

pub fn run_normal(ctx: &Ctx, args: NormalArgs) -> Result<(), String> {
    let c = &ctx.file.normal;
    let l0 = c.l0.unwrap_or(0.0);
    let u0 = c.u0.unwrap_or(10.0);
    let l1 = c.l1.unwrap_or(0.5);
    let u1 = c.u1.unwrap_or(9.5);
    let m0 = c.m0.unwrap_or(0.5 * (l1 + u1));
    let gamma = c.gamma.unwrap_or(0.99);
    let sigma2 = c.sigma2.unwrap_or(1.0);
    let delta_grid = c.delta.unwrap_or(0.1);
    let mu_star = args.mu_star.or(c.mu_star).unwrap_or(4.0);
    let spec = ConstrainedNormalSpec::new(l0, u0, l1, u1, m0, gamma, sigma2, 1, delta_grid)
        .map_err(|e| e.to_string())?;
    let priors = resolve_normal_priors(args.prior, &spec)?;
    let k_for = |n: u32| args.bins.unwrap_or_else(|| default_bins(n));

    println!(
        "bounded normal mean on ({}, {}), certainty ({}, {}) at {}, mode {}, sigma0^2 {}, draws {}",
        fnum(l0), fnum(u0), fnum(l1), fnum(u1), fnum(gamma), fnum(m0), fnum(sigma2), ctx.mc
    );
    for p in &priors {
        match p.prior {
            ConstrainedPrior::BetaOnInterval { alpha0, beta0 } => {
                println!("  prior {}: alpha0={} beta0={}", p.label, fnum(alpha0), fnum(beta0))
            }
            ConstrainedPrior::TruncatedNormal { mu0, tau0 } => {
                println!("  prior {}: mu0={} tau0={}", p.label, fnum(mu0), fnum(tau0))
            }
        }
    }

    let mut headers: Vec<String> = vec!["n".into()];
    let mut rows: Vec<Vec<String>> = args.n_list.iter().map(|n| vec![n.to_string()]).collect();
    for (pi, p) in priors.iter().enumerate() {
        let stream_base = (1 + pi as u64) * 64 * STREAM_STRIDE;
        match args.table {
            Table::BiasAgainst => {
                headers.push(format!("bias_against[{}]", p.label));
                for (row, &n) in rows.iter_mut().zip(&args.n_list) {
                    let spec_n = spec.with_n(n);
                    let src = RandomSource::new(ctx.seed, stream_base + n as u64);
                    let hist =
                        PredictiveHistogram::build(&spec_n, &p.prior, ctx.mc, k_for(n), &src)
                            .map_err(|e| e.to_string())?;
                    row.push(fnum(hist.bias_against(&spec_n, mu_star)));
                }
            }
            Table::Confidence => {
                headers.push(format!("frequentist[{}]", p.label));
                headers.push(format!("bayesian[{}]", p.label));
                let src = RandomSource::new(ctx.seed, stream_base);
                let table = confidence_table(&spec, &p.prior, &args.n_list, ctx.mc, k_for, &src)
                    .map_err(|e| e.to_string())?;
                for (row, entry) in rows.iter_mut().zip(&table) {
                    row.push(fnum(entry.frequentist));
                    row.push(fnum(entry.bayesian));
                }
            }
            Table::BiasInFavor => {
                for &delta in &args.deltas {
                    headers.push(format!("favor[{} d={delta}]", p.label));
                }
                for (row, &n) in rows.iter_mut().zip(&args.n_list) {
                    let spec_n = spec.with_n(n);
                    let src = RandomSource::new(ctx.seed, stream_base + n as u64);
                    let hist =
                        PredictiveHistogram::build(&spec_n, &p.prior, ctx.mc, k_for(n), &src)
                            .map_err(|e| e.to_string())?;
                    for &delta in &args.deltas {
                        row.push(fnum(hist.bias_in_favor(&spec_n, mu_star, delta)));
                    }
                }
            }
            Table::Estimation => {
                for &delta in &args.deltas {
                    headers.push(format!("est_favor[{} d={delta}]", p.label));
                }
                for (row, &n) in rows.iter_mut().zip(&args.n_list) {
                    let spec_n = spec.with_n(n);
                    let src = RandomSource::new(ctx.seed, stream_base + n as u64);
                    let hist =
                        PredictiveHistogram::build(&spec_n, &p.prior, ctx.mc, k_for(n), &src)
                            .map_err(|e| e.to_string())?;
                    for &delta in &args.deltas {
                        let v = estimation_bias_in_favor(&spec_n, &p.prior, &hist, delta)
                            .map_err(|e| e.to_string())?;
                        row.push(fnum(v));
                    }
                }
            }
        }
    }
    emit(&headers, &rows, args.out.as_deref())
}

#[derive(Args, Debug)]
pub struct PoissonArgs {
    #[arg(long, value_enum)]
    table: Table,
    /// Sample sizes (table rows).
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u32, 10, 20, 50, 100, 500])]
    n_list: Vec<u32>,
    /// Meaningful differences (paired columns).
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0])]
    deltas: Vec<f64>,
    /// Hypothesized rate.
    #[arg(long)]
    lambda_star: Option<f64>,
    /// Histogram bin count override (default 1000, 4000 when n > 100).
    #[arg(long)]
    bins: Option<usize>,
    /// Write the table as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_poisson(ctx: &Ctx, args: PoissonArgs) -> Result<(), String> {
    let c = &ctx.file.poisson;
    let l0 = c.l0.unwrap_or(3.0);
    let u0 = c.u0.unwrap_or(10.0);
    let l1 = c.l1.unwrap_or(3.5);
    let u1 = c.u1.unwrap_or(9.5);
    let m0 = c.m0.unwrap_or(0.5 * (l1 + u1));
    let gamma = c.gamma.unwrap_or(0.99);
    let lambda_star = args.lambda_star.or(c.lambda_star).unwrap_or(6.2);
    let k_for = |n: u32| args.bins.unwrap_or_else(|| default_bins(n));

    println!(
        "bounded rate on ({}, {}), certainty ({}, {}) at {}, mode {}, draws {}",
        fnum(l0), fnum(u0), fnum(l1), fnum(u1), fnum(gamma), fnum(m0), ctx.mc
    );
    let base = |delta: f64, n: u32| {
        ConstrainedPoissonSpec::new(l0, u0, l1, u1, m0, gamma, n, delta).map_err(|e| e.to_string())
    };
    let (alpha0, beta0) = elicit_gamma(&base(args.deltas[0], 1)?).map_err(|e| e.to_string())?;
    println!("  prior: gamma alpha0={} beta0={}", fnum(alpha0), fnum(beta0));

    let mut headers: Vec<String> = vec!["n".into()];
    let mut rows: Vec<Vec<String>> = args.n_list.iter().map(|n| vec![n.to_string()]).collect();
    match args.table {
        Table::BiasAgainst => {
            for &delta in &args.deltas {
                headers.push(format!("bias_against[d={delta}]"));
            }
            for (row, &n) in rows.iter_mut().zip(&args.n_list) {
                let src = RandomSource::new(ctx.seed, 64 * STREAM_STRIDE + n as u64);
                // The histogram does not depend on delta; build once.
                let spec_n = base(args.deltas[0], n)?;
                let hist = PoissonHistogram::build(&spec_n, alpha0, beta0, ctx.mc, k_for(n), &src)
                    .map_err(|e| e.to_string())?;
                for _ in &args.deltas {
                    row.push(fnum(hist.bias_against(lambda_star)));
                }
            }
        }
        Table::Confidence => {
            for &delta in &args.deltas {
                headers.push(format!("frequentist[d={delta}]"));
                headers.push(format!("bayesian[d={delta}]"));
            }
            for (di, &delta) in args.deltas.iter().enumerate() {
                let spec_d = base(delta, 1)?;
                let src = RandomSource::new(ctx.seed, (128 + di as u64) * STREAM_STRIDE);
                let table = poisson_confidence_table(
                    &spec_d, alpha0, beta0, &args.n_list, ctx.mc, k_for, &src,
                )
                .map_err(|e| e.to_string())?;
                for (row, entry) in rows.iter_mut().zip(&table) {
                    row.push(fnum(entry.frequentist));
                    row.push(fnum(entry.bayesian));
                }
            }
        }
        Table::BiasInFavor => {
            for &delta in &args.deltas {
                headers.push(format!("favor[d={delta}]"));
            }
            for (row, &n) in rows.iter_mut().zip(&args.n_list) {
                let spec_n = base(args.deltas[0], n)?;
                let src = RandomSource::new(ctx.seed, 192 * STREAM_STRIDE + n as u64);
                let hist = PoissonHistogram::build(&spec_n, alpha0, beta0, ctx.mc, k_for(n), &src)
                    .map_err(|e| e.to_string())?;
                for &delta in &args.deltas {
                    row.push(fnum(hist.bias_in_favor(&spec_n, lambda_star, delta)));
                }
            }
        }
        Table::Estimation => {
            for &delta in &args.deltas {
                headers.push(format!("est_favor[d={delta}]"));
            }
            for (row, &n) in rows.iter_mut().zip(&args.n_list) {
                let src = RandomSource::new(ctx.seed, 256 * STREAM_STRIDE + n as u64);
                let spec_n = base(args.deltas[0], n)?;
                let hist = PoissonHistogram::build(&spec_n, alpha0, beta0, ctx.mc, k_for(n), &src)
                    .map_err(|e| e.to_string())?;
                for &delta in &args.deltas {
                    let spec_nd = base(delta, n)?;
                    let v = poisson::estimation_bias_in_favor(&spec_nd, alpha0, beta0, &hist, delta)
                        .map_err(|e| e.to_string())?;
                    row.push(fnum(v));
                }
            }
        }
    }
    emit(&headers, &rows, args.out.as_deref())
}

fn emit(headers: &[String], rows: &[Vec<String>], out: Option<&std::path::Path>) -> Result<(), String> {
    let header_refs: Vec<&str> = headers.iter().map(|s| s.as_str()).collect();
    print!("{}", text_table(&header_refs, rows));
    if let Some(path) = out {
        write_csv(path, &header_refs, rows)?;
        println!("table written to {}", path.display());
    }
    Ok(())
}
