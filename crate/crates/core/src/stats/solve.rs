//! Bisection root finding on a sign-changing bracket.

use crate::error::{Error, Result};

/// Default bracket-width tolerance.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A root bracket [lo, hi] with a convergence tolerance on the width.
#[derive(Debug, Clone, Copy)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub tolerance: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        Self::with_tolerance(lo, hi, DEFAULT_TOLERANCE)
    }

    pub fn with_tolerance(lo: f64, hi: f64, tolerance: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Bracket {
                lo,
                hi,
                reason: "requires finite lo < hi".into(),
            });
        }
        if !(tolerance > 0.0) {
            return Err(Error::Bracket {
                lo,
                hi,
                reason: format!("tolerance must be positive, got {tolerance}"),
            });
        }
        Ok(Self { lo, hi, tolerance })
    }
}

/// Find a root of `f` inside the bracket by bisection.
///
/// Stops when |f| <= tolerance at the midpoint or the bracket width falls
/// below the tolerance. The function values at the ends must have opposite
/// signs unless one end is already a root within tolerance.
pub fn bisect(f: impl Fn(f64) -> f64, bracket: &RootBracket) -> Result<f64> {
    let RootBracket { mut lo, mut hi, tolerance } = *bracket;
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo.abs() <= tolerance && flo.abs() <= fhi.abs() {
        return Ok(lo);
    }
    if fhi.abs() <= tolerance && fhi.abs() < flo.abs() {
        return Ok(hi);
    }
    if flo.is_nan() || fhi.is_nan() || (flo < 0.0) == (fhi < 0.0) {
        return Err(Error::Bracket {
            lo,
            hi,
            reason: format!("f(lo)={flo} and f(hi)={fhi} do not change sign"),
        });
    }
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= tolerance || hi - lo <= tolerance {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Expand `hi` geometrically from `lo` until `f` changes sign, then bisect.
///
/// Used by the elicitation routines, where the target function is monotone
/// but the scale of the solution is unknown a priori.
pub fn bisect_expanding(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi0: f64,
    hi_cap: f64,
    tolerance: f64,
) -> Result<f64> {
    let flo = f(lo);
    let mut hi = hi0;
    let mut fhi = f(hi);
    while (flo < 0.0) == (fhi < 0.0) && fhi.abs() > tolerance {
        hi *= 2.0;
        if hi > hi_cap {
            return Err(Error::Elicitation(format!(
                "no sign change up to {hi_cap} (f({lo})={flo}, f({hi})={fhi})"
            )));
        }
        fhi = f(hi);
    }
    bisect(f, &RootBracket::with_tolerance(lo, hi, tolerance)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::special::normal_cdf;

    #[test]
    fn linear_root() {
        let b = RootBracket::with_tolerance(0.0, 10.0, 1e-9).unwrap();
        let r = bisect(|x| x - 3.0, &b).unwrap();
        assert!((r - 3.0).abs() < 1e-8);
    }

    #[test]
    fn prior_scale_equation() {
        // Phi(7.5/t) - Phi(-7.5/t) = 0.99 has the solution near 2.912.
        let b = RootBracket::with_tolerance(0.1, 100.0, 1e-10).unwrap();
        let r = bisect(|t| normal_cdf(7.5 / t) - normal_cdf(-7.5 / t) - 0.99, &b).unwrap();
        assert!((r - 2.9117).abs() < 5e-4, "got {r}");
    }

    #[test]
    fn same_sign_bracket_rejected() {
        let b = RootBracket::new(0.0, 1.0).unwrap();
        assert!(bisect(|x| x + 1.0, &b).is_err());
    }

    #[test]
    fn invalid_bracket_rejected() {
        assert!(RootBracket::new(1.0, 1.0).is_err());
        assert!(RootBracket::with_tolerance(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn root_stays_inside_bracket() {
        let b = RootBracket::new(2.0, 4.0).unwrap();
        let r = bisect(|x| (x - std::f64::consts::PI).tan(), &b).unwrap();
        assert!(r >= 2.0 && r <= 4.0);
    }
}
