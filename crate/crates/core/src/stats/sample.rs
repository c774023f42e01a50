//! Variate generation for the distributions the estimators need.
//!
//! All samplers are written against [`RandomSource`] directly so a fixed
//! `(seed, stream)` always reproduces the same draws, independent of any
//! external crate's algorithm choices.

use super::rng::RandomSource;
use super::special::ln_gamma;
use crate::error::{Error, Result};

/// Uniform draw on [lo, hi).
pub fn draw_uniform(src: &mut RandomSource, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!(
            "draw_uniform requires finite lo < hi, got [{lo}, {hi})"
        )));
    }
    Ok(lo + (hi - lo) * src.next_f64())
}

/// Normal draw via the Box-Muller transform.
pub fn draw_normal(src: &mut RandomSource, mean: f64, sd: f64) -> Result<f64> {
    if !(sd > 0.0) {
        return Err(Error::Domain(format!(
            "draw_normal requires sd > 0, got {sd}"
        )));
    }
    Ok(mean + sd * draw_std_normal(src))
}

#[inline]
pub(crate) fn draw_std_normal(src: &mut RandomSource) -> f64 {
    let u1 = src.next_open01();
    let u2 = src.next_f64();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Gamma draw with the given shape and rate (Marsaglia-Tsang).
pub fn draw_gamma(src: &mut RandomSource, shape: f64, rate: f64) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0) {
        return Err(Error::Domain(format!(
            "draw_gamma requires shape, rate > 0, got shape={shape}, rate={rate}"
        )));
    }
    Ok(draw_std_gamma(src, shape) / rate)
}

fn draw_std_gamma(src: &mut RandomSource, shape: f64) -> f64 {
    if shape < 1.0 {
        // Boost to shape+1 and scale back.
        let g = draw_std_gamma(src, shape + 1.0);
        let u = src.next_open01();
        return g * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x = draw_std_normal(src);
        let v = (1.0 + c * x).powi(3);
        if v <= 0.0 {
            continue;
        }
        let u = src.next_open01();
        if u.ln() < 0.5 * x * x + d - d * v + d * v.ln() {
            return d * v;
        }
    }
}

/// Beta draw as a ratio of gammas.
pub fn draw_beta(src: &mut RandomSource, alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Domain(format!(
            "draw_beta requires alpha, beta > 0, got alpha={alpha}, beta={beta}"
        )));
    }
    let x = draw_std_gamma(src, alpha);
    let y = draw_std_gamma(src, beta);
    Ok(x / (x + y))
}

/// Poisson draw; inversion for small means, PTRS transformed rejection
/// (Hörmann) for large ones.
pub fn draw_poisson(src: &mut RandomSource, mean: f64) -> Result<u64> {
    if !(mean > 0.0) || !mean.is_finite() {
        return Err(Error::Domain(format!(
            "draw_poisson requires finite mean > 0, got {mean}"
        )));
    }
    if mean < 10.0 {
        Ok(poisson_inversion(src, mean))
    } else {
        Ok(poisson_ptrs(src, mean))
    }
}

fn poisson_inversion(src: &mut RandomSource, mean: f64) -> u64 {
    let target = src.next_f64();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cum = p;
    while cum < target && k < 1000 {
        k += 1;
        p *= mean / k as f64;
        cum += p;
    }
    k
}

fn poisson_ptrs(src: &mut RandomSource, mean: f64) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = src.next_f64() - 0.5;
        let v = src.next_open01();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = (v * inv_alpha / (a / (us * us) + b)).ln();
        let rhs = -mean + k * loglam - ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}
