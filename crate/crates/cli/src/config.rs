use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Point-set generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    CantorProduct,
    HierarchicalRandom,
    LineSet,
    Empty,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SetConfig {
    pub generator: Generator,
    /// Cantor contraction ratio, in `(0, 1/2)`.
    pub ratio: f64,
    /// Generation depth; defaults to `min(h_exponent − 2, 7)`.
    pub depth: Option<u32>,
    /// Side of the bounding square; defaults to `2^h_exponent / √2`, the largest
    /// keeping the set inside `|x| ≤ 1/h`.
    pub side: Option<f64>,
    /// Cantor leaf squares sampled on `fill × fill` points.
    pub fill: usize,
    /// Hole parameter of `hierarchical_random`, in `(0, 1/4)`.
    pub hole: f64,
    /// Direction of `line_set`.
    pub angle: f64,
    /// Point spacing of `line_set`.
    pub pitch: f64,
}

impl Default for SetConfig {
    fn default() -> Self {
        SetConfig {
            generator: Generator::CantorProduct,
            ratio: 0.4,
            depth: None,
            side: None,
            fill: 1,
            hole: 0.08,
            angle: 0.3,
            pitch: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyConfig {
    /// Samples of the certification sinogram in `s` and in `θ`; a power of two.
    pub grid: usize,
    /// Certificate tolerance.
    pub tol: f64,
    /// Certify at this `σ` instead of searching for the smallest one.
    pub sigma: Option<f64>,
    pub submean_samples: usize,
    pub submean_tol: f64,
    /// Hermite nodes of each angular correction profile; a power of two.
    pub modify_nodes: usize,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        CertifyConfig {
            grid: 64,
            tol: 1e-6,
            sigma: None,
            submean_samples: 200,
            submean_tol: 1e-4,
            modify_nodes: 1024,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Seeds the random set generator, the sub-mean sampler and the identity suites.
    pub seed: u64,
    /// Porosity parameter, in `(0, 1/10)`.
    pub nu: f64,
    /// `h = 2^{−h_exponent}`.
    pub h_exponent: u32,
    pub out: PathBuf,
    pub set: SetConfig,
    pub certify: CertifyConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 0,
            nu: 0.05,
            h_exponent: 6,
            out: PathBuf::from("out"),
            set: SetConfig::default(),
            certify: CertifyConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub nu: Option<f64>,
    pub h_exponent: Option<u32>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
    pub sigma: Option<f64>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>, o: &Overrides) -> Result<Self, CliError> {
        let mut c = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
                toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?
            }
            None => RunConfig::default(),
        };
        if let Some(v) = o.seed {
            c.seed = v;
        }
        if let Some(v) = o.nu {
            c.nu = v;
        }
        if let Some(v) = o.h_exponent {
            c.h_exponent = v;
        }
        if let Some(v) = o.grid {
            c.certify.grid = v;
        }
        if let Some(v) = o.tol {
            c.certify.tol = v;
        }
        if let Some(v) = &o.out {
            c.out = v.clone();
        }
        if o.sigma.is_some() {
            c.certify.sigma = o.sigma;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.nu > 0.0 && self.nu < 0.1) {
            return bad(format!("nu = {} must lie in (0, 1/10)", self.nu));
        }
        if self.h_exponent > 16 {
            return bad(format!("h_exponent = {} exceeds 16", self.h_exponent));
        }
        let c = &self.certify;
        if !c.grid.is_power_of_two() || c.grid < 4 {
            return bad(format!("grid = {} must be a power of two ≥ 4", c.grid));
        }
        if !c.modify_nodes.is_power_of_two() || c.modify_nodes < 8 {
            return bad(format!("modify_nodes = {} must be a power of two ≥ 8", c.modify_nodes));
        }
        if !(c.tol > 0.0) || !(c.submean_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if let Some(s) = c.sigma {
            if !(s >= 0.0 && s.is_finite()) {
                return bad(format!("sigma = {s} must be finite and nonnegative"));
            }
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        2f64.powi(-(self.h_exponent as i32))
    }

    pub fn depth(&self) -> u32 {
        self.set.depth.unwrap_or_else(|| self.h_exponent.saturating_sub(2).clamp(1, 7))
    }

    pub fn side(&self) -> f64 {
        self.set.side.unwrap_or_else(|| 2f64.powi(self.h_exponent as i32) / std::f64::consts::SQRT_2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
        let c: RunConfig = toml::from_str("").unwrap();
        assert_eq!(c, RunConfig::default());
    }

    #[test]
    fn overrides_win_and_are_checked() {
        let o = Overrides {
            nu: Some(0.07),
            grid: Some(32),
            ..Default::default()
        };
        let c = RunConfig::load(None, &o).unwrap();
        assert_eq!((c.nu, c.certify.grid), (0.07, 32));
        for o in [
            Overrides { nu: Some(0.2), ..Default::default() },
            Overrides { grid: Some(48), ..Default::default() },
            Overrides { tol: Some(0.0), ..Default::default() },
            Overrides { sigma: Some(-1.0), ..Default::default() },
        ] {
            assert!(matches!(RunConfig::load(None, &o), Err(CliError::Usage(_))));
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("nuu = 0.05").is_err());
        let c: RunConfig = toml::from_str("[set]\ngenerator = \"line_set\"\npitch = 0.5").unwrap();
        assert_eq!(c.set.generator, Generator::LineSet);
    }

    #[test]
    fn derived_defaults() {
        let c = RunConfig::default();
        assert_eq!(c.depth(), 4);
        assert!((c.side() * std::f64::consts::SQRT_2 - 64.0).abs() < 1e-12);
        assert_eq!(c.h(), 1.0 / 64.0);
    }
}
