use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dyadic_wavelet::{build_basis_named, WaveletBasis, DEFAULT_COARSE_LEVEL};
use crate::error::{Error, Result};
use crate::grid::level_of;

/// Suite names accepted by `run_suite`.
pub const SUITES: &[&str] = &[
    "reconstruction",
    "product_identity",
    "commutator_identity",
    "sandwich",
    "boundedness_sweep",
    "h1b_equivalence",
    "unboundedness_probe",
    "almost_diagonal",
    "molecule",
    "fractional",
    "atomic_decomposition",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisConfig {
    pub family: String,
    #[serde(default = "one")]
    pub order: u32,
}

fn one() -> u32 {
    1
}

impl BasisConfig {
    pub fn new(family: &str, order: u32) -> Self {
        Self { family: family.into(), order }
    }

    pub fn build(&self) -> Result<WaveletBasis> {
        build_basis_named(&self.family, self.order)
    }

    pub fn label(&self) -> String {
        if self.family == "haar" { "haar".into() } else { format!("{}({})", self.family, self.order) }
    }
}

impl Default for BasisConfig {
    fn default() -> Self {
        Self::new("daubechies", 4)
    }
}

fn default_coarse() -> u32 {
    DEFAULT_COARSE_LEVEL
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub suite: String,
    /// Grid sizes `N` (per axis) for one-dimensional cases.
    pub resolutions: Vec<usize>,
    /// Grid sizes for two-dimensional cases, where a suite has them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolutions_2d: Option<Vec<usize>>,
    #[serde(default)]
    pub basis: BasisConfig,
    /// Extra bases, for suites that sweep over several.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<BasisConfig>>,
    pub sample_count: usize,
    #[serde(default)]
    pub root_seed: u64,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(default = "default_coarse")]
    pub coarse_level: u32,
}

impl ExperimentConfig {
    pub fn new(suite: &str, resolutions: Vec<usize>, sample_count: usize) -> Self {
        Self {
            suite: suite.into(),
            resolutions,
            resolutions_2d: None,
            basis: BasisConfig::default(),
            bases: None,
            sample_count,
            root_seed: 0,
            tolerances: BTreeMap::new(),
            output_path: None,
            coarse_level: DEFAULT_COARSE_LEVEL,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid experiment config: {e}")))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !SUITES.contains(&self.suite.as_str()) {
            return Err(Error::Usage(format!("unknown suite '{}'; valid suites: {}", self.suite, SUITES.join(", "))));
        }
        if self.sample_count == 0 {
            return Err(Error::Config("sample_count must be at least 1".into()));
        }
        if self.resolutions.is_empty() {
            return Err(Error::Config("at least one resolution is required".into()));
        }
        for &n in self.resolutions.iter().chain(self.resolutions_2d.iter().flatten()) {
            level_of(n).map_err(|e| Error::Config(e.to_string()))?;
        }
        for (k, v) in &self.tolerances {
            if !(v.is_finite() && *v > 0.0) {
                return Err(Error::Config(format!("tolerance '{k}' must be positive and finite")));
            }
        }
        self.basis.build()?;
        for b in self.bases.iter().flatten() {
            b.build()?;
        }
        Ok(())
    }

    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }

    pub fn all_bases(&self) -> Vec<BasisConfig> {
        self.bases.clone().unwrap_or_else(|| vec![self.basis.clone()])
    }

    pub fn levels(&self) -> Vec<u32> {
        self.resolutions.iter().map(|&n| level_of(n).expect("validated")).collect()
    }

    pub fn levels_2d(&self) -> Vec<u32> {
        self.resolutions_2d.iter().flatten().map(|&n| level_of(n).expect("validated")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let c = ExperimentConfig::from_json(
            r#"{"suite":"product_identity","resolutions":[256,512],"basis":{"family":"daubechies","order":4},
                "sample_count":50,"root_seed":7,"tolerances":{"identity":1e-8}}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.coarse_level, 2);
        assert_eq!(c.tolerance("identity", 1.0), 1e-8);
        assert_eq!(c.tolerance("other", 3.0), 3.0);
        let mut bad = c.clone();
        bad.suite = "nonsense".into();
        let err = bad.validate().unwrap_err();
        assert!(matches!(err, Error::Usage(ref m) if m.contains("reconstruction")));
        let mut bad = c.clone();
        bad.resolutions = vec![300];
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let mut bad = c;
        bad.sample_count = 0;
        assert!(bad.validate().is_err());
        assert!(matches!(ExperimentConfig::from_json("{"), Err(Error::Config(_))));
    }
}
