//! Sampling nu given a fixed ratio value.
//!
//! The conditional density of nu given psi is |nu| times a normal density, so
//! after standardizing, draws come from g(z) proportional to |z - z0| phi(z).
//! The two triangular-ish branches on either side of z0 are sampled by cdf
//! inversion: bracket the target by stepping outward, then bisect.

use super::{FiellerModel, PsiConditional};
use crate::error::{Error, Result};
use crate::stats::special::{
    ln_normal_pdf, normal_cdf, normal_pdf, normal_sf,
};
use crate::stats::{mills_upper, RandomSource};

/// Default step constant for the bracket expansion.
const EPSILON: f64 = 0.1;
/// Hard cap on expansion steps before the sampler gives up.
const MAX_EXPAND: u32 = 10_000;
/// Bracket width at which the inversion bisection stops.
const INVERT_TOL: f64 = 1e-10;

/// Weight of the lower branch (z <= z0) in the two-part mixture.
///
/// The normalizer -z0 + 2 h0 equals h0 + n0 exactly, which keeps the weight
/// strictly inside (0, 1) without cancellation.
pub fn mixture_weight(z0: f64) -> f64 {
    let h0 = lower_mass(z0);
    h0 / (h0 + upper_mass(z0))
}

/// Log weights (ln p, ln(1-p)) of the two branches, evaluated in log space
/// so both stay finite across the entire real line even where one branch
/// mass underflows f64.
pub fn mixture_weight_ln(z0: f64) -> (f64, f64) {
    let ln_h0 = lower_mass_ln(z0);
    let ln_n0 = upper_mass_ln(z0);
    let m = ln_h0.max(ln_n0);
    let ln_total = m + ((ln_h0 - m).exp() + (ln_n0 - m).exp()).ln();
    (ln_h0 - ln_total, ln_n0 - ln_total)
}

/// h0 = z0 Phi(z0) + phi(z0), the unnormalized mass of the lower branch.
fn lower_mass(z0: f64) -> f64 {
    if z0 >= 0.0 {
        z0 * normal_cdf(z0) + normal_pdf(z0)
    } else {
        // phi(t) (1 - t R(t)) with t = -z0 avoids the cancellation.
        let t = -z0;
        normal_pdf(t) * (1.0 - t * mills_upper(t))
    }
}

fn lower_mass_ln(z0: f64) -> f64 {
    if z0 >= 0.0 {
        lower_mass(z0).ln()
    } else {
        let t = -z0;
        ln_normal_pdf(t) + (-t * mills_upper(t)).ln_1p()
    }
}

/// n0 = phi(z0) - z0 (1 - Phi(z0)), the unnormalized mass of the upper
/// branch. Positive for every z0; this is the Mills-ratio inequality.
fn upper_mass(z0: f64) -> f64 {
    if z0 <= 0.0 {
        normal_pdf(z0) - z0 * normal_sf(z0)
    } else {
        normal_pdf(z0) * (1.0 - z0 * mills_upper(z0))
    }
}

fn upper_mass_ln(z0: f64) -> f64 {
    if z0 <= 0.0 {
        upper_mass(z0).ln()
    } else {
        ln_normal_pdf(z0) + (-z0 * mills_upper(z0)).ln_1p()
    }
}

/// Prepared sampler for the conditional of nu given one psi value.
#[derive(Debug, Clone)]
pub struct NuSampler {
    cond: PsiConditional,
    scale: f64,
    p_lower: f64,
    h0: f64,
    n0: f64,
}

impl NuSampler {
    pub fn new(cond: PsiConditional) -> Self {
        let z0 = cond.z0;
        Self {
            cond,
            scale: cond.tau2_psi_sq.sqrt(),
            p_lower: mixture_weight(z0),
            h0: lower_mass(z0),
            n0: upper_mass(z0),
        }
    }

    pub fn conditional(&self) -> &PsiConditional {
        &self.cond
    }

    /// cdf of the lower branch, valid on z <= z0.
    fn g1_cdf(&self, z: f64) -> f64 {
        let z0 = self.cond.z0;
        // (z0 Phi(z) + phi(z)) / h0, evaluated as a ratio of scaled factors
        // so the tails stay representable.
        let fac = |x: f64| {
            let l = if x < 0.0 {
                mills_upper(-x)
            } else {
                normal_cdf(x) / normal_pdf(x)
            };
            1.0 + z0 * l
        };
        let log_ratio = ln_normal_pdf(z) - ln_normal_pdf(z0);
        let denom = fac(z0);
        if denom <= 0.0 {
            // z0 >= 0 keeps fac positive; for z0 < 0 this is 1 - t R(t) > 0.
            return 0.0;
        }
        (log_ratio.exp() * fac(z) / denom).clamp(0.0, 1.0)
    }

    /// cdf of the upper branch, valid on z > z0.
    fn g0_cdf(&self, z: f64) -> f64 {
        let z0 = self.cond.z0;
        // 1 - g(z)/n0 with g(x) = phi(x) - z0 (1 - Phi(x)).
        let ratio = if z0 <= 0.0 {
            (normal_pdf(z) - z0 * normal_sf(z)) / self.n0
        } else {
            let fac = |x: f64| 1.0 - z0 * mills_upper(x);
            ((ln_normal_pdf(z) - ln_normal_pdf(z0)).exp() * fac(z) / fac(z0)).max(0.0)
        };
        (1.0 - ratio).clamp(0.0, 1.0)
    }

    /// Draw z from the standardized two-branch density |z - z0| phi(z).
    fn draw_z(&self, src: &mut RandomSource) -> Result<f64> {
        let z0 = self.cond.z0;
        if self.h0 <= 0.0 && self.n0 <= 0.0 {
            return Err(Error::Sampler(format!(
                "both branch masses vanished at z0 = {z0}"
            )));
        }
        let pick_lower = src.next_f64() < self.p_lower;
        let u = src.next_open01();
        if pick_lower {
            // Lower branch: z_up = z0, expand z_low = -i |z0 - eps| downward.
            let step = (z0 - EPSILON).abs().max(EPSILON);
            let z_up = z0;
            let mut z_low = None;
            for i in 0..MAX_EXPAND {
                let cand = -(i as f64) * step;
                if cand >= z_up {
                    continue;
                }
                if self.g1_cdf(cand) <= u {
                    z_low = Some(cand);
                    break;
                }
            }
            let z_low = z_low.ok_or_else(|| {
                Error::Sampler(format!(
                    "lower-branch bracket expansion exceeded {MAX_EXPAND} steps at z0 = {z0}"
                ))
            })?;
            Ok(bisect_cdf(|z| self.g1_cdf(z), u, z_low, z_up))
        } else {
            // Upper branch: z_low = z0, expand z_up = +i |z0 + eps| upward.
            let step = (z0 + EPSILON).abs().max(EPSILON);
            let z_low = z0;
            let mut z_up = None;
            for i in 0..MAX_EXPAND {
                let cand = (i as f64) * step;
                if cand <= z_low {
                    continue;
                }
                if self.g0_cdf(cand) >= u {
                    z_up = Some(cand);
                    break;
                }
            }
            let z_up = z_up.ok_or_else(|| {
                Error::Sampler(format!(
                    "upper-branch bracket expansion exceeded {MAX_EXPAND} steps at z0 = {z0}"
                ))
            })?;
            Ok(bisect_cdf(|z| self.g0_cdf(z), u, z_low, z_up))
        }
    }

    /// Draw nu from its conditional given psi.
    pub fn draw(&self, src: &mut RandomSource) -> Result<f64> {
        Ok(self.cond.nu_psi + self.scale * self.draw_z(src)?)
    }
}

/// Monotone-cdf bisection for G(z) = u on [lo, hi] with G(lo) <= u <= G(hi).
fn bisect_cdf(g: impl Fn(f64) -> f64, u: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= INVERT_TOL * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if g(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Draw the sufficient statistics from the conditional predictive given psi:
/// nu from its conditional, then ybar around nu and xbar around psi*nu.
pub fn sample_conditional_predictive(
    model: &FiellerModel,
    sampler: &NuSampler,
    src: &mut RandomSource,
) -> Result<(f64, f64)> {
    let nu = sampler.draw(src)?;
    let psi = sampler.conditional().psi;
    let sd_y = (model.sigma0_sq / model.n as f64).sqrt();
    let sd_x = (model.sigma0_sq / model.m as f64).sqrt();
    let ybar = crate::stats::sample::draw_std_normal(src) * sd_y + nu;
    let xbar = crate::stats::sample::draw_std_normal(src) * sd_x + psi * nu;
    Ok((xbar, ybar))
}
