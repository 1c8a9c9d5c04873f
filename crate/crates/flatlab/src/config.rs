use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::proxy::{ProxyGrid, PROXY_ID, SPECTRUM_LEN};

pub const SCHEMA_VERSION: u32 = 1;
pub const MIN_SAMPLES: usize = 1000;

fn default_schema() -> u32 {
    SCHEMA_VERSION
}
fn default_observables() -> String {
    PROXY_ID.into()
}
fn default_k() -> usize {
    SPECTRUM_LEN
}
fn default_resolution() -> f64 {
    1.0
}
fn default_floor() -> f64 {
    1e-4
}
fn default_cap() -> f64 {
    6.0
}
fn default_bootstrap() -> usize {
    100
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    #[serde(default)]
    pub report: Option<String>,
    #[serde(default)]
    pub csv: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    /// See [`crate::surfaces::SurfaceRef::parse`].
    pub surface: String,
    pub times: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_observables")]
    pub observables: String,
    #[serde(default = "default_k")]
    pub spectrum_len: usize,
    /// Covering radius in cell half-widths; 1 is the closed cell.
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    /// Samples whose normalized systole is below this are excluded.
    #[serde(default = "default_floor")]
    pub systole_floor: f64,
    /// Largest `t` for polygonal flows. Re-cutting after `g_t` costs about `e^t` flips per
    /// edge and loses about `2t/ln 10` digits.
    #[serde(default = "default_cap")]
    pub t_cap: f64,
    #[serde(default = "default_bootstrap")]
    pub bootstrap: usize,
    #[serde(default)]
    pub grid: Option<ProxyGrid>,
    #[serde(default)]
    pub support_grid: Option<ProxyGrid>,
    #[serde(default)]
    pub outputs: Outputs,
}

impl ExperimentConfig {
    pub fn new(surface: &str, times: Vec<f64>, samples: usize, seed: u64) -> Self {
        ExperimentConfig {
            schema_version: SCHEMA_VERSION,
            surface: surface.into(),
            times,
            samples,
            seed,
            observables: default_observables(),
            spectrum_len: SPECTRUM_LEN,
            resolution: 1.0,
            systole_floor: default_floor(),
            t_cap: default_cap(),
            bootstrap: default_bootstrap(),
            grid: None,
            support_grid: None,
            outputs: Outputs::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::InvalidConfig(m));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.times.is_empty() || self.times.windows(2).any(|w| !(w[0] < w[1])) {
            return bad("time grid must be nonempty and strictly increasing".into());
        }
        if self.samples < MIN_SAMPLES {
            return bad(format!("{} samples, need at least {MIN_SAMPLES}", self.samples));
        }
        if self.observables != PROXY_ID {
            return bad(format!("unknown observable dictionary {:?}", self.observables));
        }
        if self.spectrum_len < 2 {
            return bad("spectrum length must be at least 2".into());
        }
        if !(self.resolution > 0.0) {
            return bad("resolution must be positive".into());
        }
        Ok(())
    }

    pub fn density_grid(&self) -> ProxyGrid {
        self.grid.clone().unwrap_or_else(ProxyGrid::density)
    }

    pub fn support_cells(&self) -> ProxyGrid {
        self.support_grid.clone().unwrap_or_else(ProxyGrid::support)
    }

    /// SHA-256 of the compact JSON encoding.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::new("l", vec![1.0, 2.0], 1000, 1);
        assert!(c.validate().is_ok());
        c.times = vec![2.0, 1.0];
        assert!(c.validate().is_err());
        c.times = vec![1.0];
        c.samples = 999;
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::new("l", vec![1.0], 1000, 1);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
        assert_eq!(back.hash(), a.hash());
    }
}
