//! Optional TOML configuration mirroring the command-line flags.
//!
//! Every value is optional; a flag given on the command line always wins
//! over the file, and built-in defaults fill whatever remains.

use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub mc: Option<u64>,
    pub full_scale: Option<bool>,
    #[serde(default)]
    pub fieller: FiellerSection,
    #[serde(default)]
    pub cox: CoxSection,
    #[serde(default)]
    pub normal: NormalSection,
    #[serde(default)]
    pub poisson: PoissonSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiellerSection {
    pub xbar: Option<f64>,
    pub ybar: Option<f64>,
    pub m: Option<u32>,
    pub n: Option<u32>,
    pub sigma2: Option<f64>,
    pub delta: Option<f64>,
    pub tail_prob: Option<f64>,
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub psi0: Option<f64>,
    pub elicit_gamma: Option<f64>,
    pub pivotal_gamma: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoxSection {
    pub prior_variance: Option<f64>,
    pub delta: Option<f64>,
    pub tail_prob: Option<f64>,
    pub grid_lo: Option<f64>,
    pub grid_hi: Option<f64>,
    pub grid_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalSection {
    pub l0: Option<f64>,
    pub u0: Option<f64>,
    pub l1: Option<f64>,
    pub u1: Option<f64>,
    pub m0: Option<f64>,
    pub gamma: Option<f64>,
    pub sigma2: Option<f64>,
    pub delta: Option<f64>,
    pub mu_star: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoissonSection {
    pub l0: Option<f64>,
    pub u0: Option<f64>,
    pub l1: Option<f64>,
    pub u1: Option<f64>,
    pub m0: Option<f64>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub lambda_star: Option<f64>,
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
}
