use clap::{Args, ValueEnum};

use crate::report::fnum;
use crate::Ctx;
use relbelief::constrained::{
    elicit_beta, elicit_gamma, elicit_truncnorm, ConstrainedNormalSpec, ConstrainedPoissonSpec,
};
use relbelief::fieller::elicit_fieller;

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum Family {
    /// Two normal coordinate priors for the ratio problem.
    Fieller,
    /// Beta prior on a bounded interval.
    Beta,
    /// Normal prior truncated to a bounded interval.
    Truncnorm,
    /// Gamma prior for a bounded rate.
    Gamma,
}

#[derive(Args, Debug)]
pub struct ElicitArgs {
    #[arg(long, value_enum)]
    family: Family,

    /// Numerator-mean certainty bounds (ratio family).
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    m1: f64,
    #[arg(long, default_value_t = 25.0, allow_negative_numbers = true)]
    m2: f64,
    /// Ratio certainty bounds (ratio family).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    r1: f64,
    #[arg(long, default_value_t = 3.0)]
    r2: f64,
    /// Anchor ratio value (ratio family).
    #[arg(long, default_value_t = 2.0)]
    psi0: f64,

    /// Support bounds (bounded families).
    #[arg(long, allow_negative_numbers = true)]
    l0: Option<f64>,
    #[arg(long)]
    u0: Option<f64>,
    /// Virtual-certainty interval (bounded families).
    #[arg(long, allow_negative_numbers = true)]
    l1: Option<f64>,
    #[arg(long)]
    u1: Option<f64>,
    /// Prior mode (bounded families; default is the certainty midpoint).
    #[arg(long, allow_negative_numbers = true)]
    m0: Option<f64>,

    /// Probability assigned to the certainty interval.
    #[arg(long, default_value_t = 0.99)]
    gamma: f64,
}

pub fn run(_ctx: &Ctx, args: ElicitArgs) -> Result<(), String> {
    match args.family {
        Family::Fieller => {
            let p = elicit_fieller(args.m1, args.m2, args.r1, args.r2, args.psi0, args.gamma)
                .map_err(|e| e.to_string())?;
            println!("family: ratio of normal means");
            println!(
                "inputs: m-interval ({}, {}), ratio interval ({}, {}), psi0 {}, gamma {}",
                fnum(args.m1),
                fnum(args.m2),
                fnum(args.r1),
                fnum(args.r2),
                fnum(args.psi0),
                fnum(args.gamma)
            );
            println!("mu0    = {}", fnum(p.mu0));
            println!("tau10  = {}", fnum(p.tau10));
            println!("nu0    = {}", fnum(p.nu0));
            println!("tau20  = {}", fnum(p.tau20));
        }
        Family::Beta | Family::Truncnorm => {
            let (l0, u0) = (args.l0.unwrap_or(0.0), args.u0.unwrap_or(10.0));
            let (l1, u1) = (args.l1.unwrap_or(0.5), args.u1.unwrap_or(9.5));
            let m0 = args.m0.unwrap_or(0.5 * (l1 + u1));
            let spec = ConstrainedNormalSpec::new(l0, u0, l1, u1, m0, args.gamma, 1.0, 1, 0.1)
                .map_err(|e| e.to_string())?;
            println!("support ({}, {}), certainty ({}, {}), mode {}, gamma {}",
                fnum(l0), fnum(u0), fnum(l1), fnum(u1), fnum(m0), fnum(args.gamma));
            match args.family {
                Family::Beta => {
                    let (a, b) = elicit_beta(&spec).map_err(|e| e.to_string())?;
                    println!("family: beta on the interval");
                    println!("alpha0 = {}", fnum(a));
                    println!("beta0  = {}", fnum(b));
                }
                _ => {
                    let (mu0, tau0) = elicit_truncnorm(&spec).map_err(|e| e.to_string())?;
                    println!("family: truncated normal");
                    println!("mu0    = {}", fnum(mu0));
                    println!("tau0   = {}", fnum(tau0));
                }
            }
        }
        Family::Gamma => {
            let (l0, u0) = (args.l0.unwrap_or(3.0), args.u0.unwrap_or(10.0));
            let (l1, u1) = (args.l1.unwrap_or(3.5), args.u1.unwrap_or(9.5));
            let m0 = args.m0.unwrap_or(0.5 * (l1 + u1));
            let spec = ConstrainedPoissonSpec::new(l0, u0, l1, u1, m0, args.gamma, 1, 0.5)
                .map_err(|e| e.to_string())?;
            let (a, b) = elicit_gamma(&spec).map_err(|e| e.to_string())?;
            println!("family: gamma (rate parameterization)");
            println!("support ({}, {}), certainty ({}, {}), mode {}, gamma {}",
                fnum(l0), fnum(u0), fnum(l1), fnum(u1), fnum(m0), fnum(args.gamma));
            println!("alpha0 = {}", fnum(a));
            println!("beta0  = {}", fnum(b));
        }
    }
    Ok(())
}
