//! Numerical foundations: special functions, bisection, and seeded sampling.

pub mod rng;
pub mod sample;
pub mod solve;
pub mod special;

pub use rng::RandomSource;
pub use sample::{draw_beta, draw_gamma, draw_normal, draw_poisson, draw_uniform};
pub use solve::{bisect, bisect_expanding, RootBracket, DEFAULT_TOLERANCE};
pub use special::{
    beta_cdf, gamma_cdf, ln_gamma, mills_upper, normal_cdf, normal_pdf, normal_quantile,
    normal_sf, poisson_cdf,
};
