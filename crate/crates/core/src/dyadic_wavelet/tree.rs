use serde::{Deserialize, Serialize};

use super::cube::DyadicCube;
use crate::error::{Error, Result};

/// Wavelet type index `σ ∈ E = {0,1}^n \ {0}`, encoded as the bit pattern
/// `σ_0·2^{n−1} + … + σ_{n−1}` (so `1..2^n`).  Bit set on an axis means the
/// detail filter acts along that axis.
pub type Sigma = u8;

/// Number of wavelet types `|E| = 2^n − 1`.
pub fn sigma_count(dim: usize) -> usize {
    (1 << dim) - 1
}

/// Sparse key `(I, σ)` of a detail coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CoeffKey {
    pub cube: DyadicCube,
    pub sigma: Sigma,
}

impl std::fmt::Display for CoeffKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.cube, self.sigma)
    }
}

/// Scaling coefficients `⟨f, φ_I⟩` at the coarse level `j₀` and detail
/// coefficients `⟨f, ψ_I^σ⟩` for `j₀ ≤ j < J`.
///
/// Storage is dense per level (`details[j − j₀][σ − 1][index(I)]`); the public
/// surface is keyed by `(I, σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTree {
    dim: usize,
    coarse_level: u32,
    finest_level: u32,
    scaling: Vec<f64>,
    details: Vec<Vec<Vec<f64>>>,
}

impl CoefficientTree {
    pub fn zeros(dim: usize, coarse_level: u32, finest_level: u32) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Shape(format!("dimension {dim} not supported")));
        }
        if coarse_level >= finest_level {
            return Err(Error::Resolution(format!(
                "coarse level {coarse_level} must be below finest level {finest_level}"
            )));
        }
        let scaling = vec![0.0; DyadicCube::count_at(dim, coarse_level)];
        let details = (coarse_level..finest_level)
            .map(|j| vec![vec![0.0; DyadicCube::count_at(dim, j)]; sigma_count(dim)])
            .collect();
        Ok(Self { dim, coarse_level, finest_level, scaling, details })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coarse_level(&self) -> u32 {
        self.coarse_level
    }

    pub fn finest_level(&self) -> u32 {
        self.finest_level
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        self.dim == other.dim && self.coarse_level == other.coarse_level && self.finest_level == other.finest_level
    }

    pub fn check_layout(&self, other: &Self) -> Result<()> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "tree layouts differ: (n={}, j0={}, J={}) vs (n={}, j0={}, J={})",
                self.dim, self.coarse_level, self.finest_level, other.dim, other.coarse_level, other.finest_level
            )))
        }
    }

    fn check_key(&self, cube: &DyadicCube, sigma: Sigma) -> Result<()> {
        if cube.dim() != self.dim {
            return Err(Error::Shape(format!("cube {cube} has wrong dimension")));
        }
        if cube.level() < self.coarse_level || cube.level() >= self.finest_level {
            return Err(Error::Domain(format!(
                "cube {cube} outside levels [{}, {})",
                self.coarse_level, self.finest_level
            )));
        }
        if sigma == 0 || sigma as usize > sigma_count(self.dim) {
            return Err(Error::Domain(format!("σ = {sigma} not in E")));
        }
        Ok(())
    }

    pub fn scaling(&self) -> &[f64] {
        &self.scaling
    }

    pub fn scaling_mut(&mut self) -> &mut [f64] {
        &mut self.scaling
    }

    pub fn scaling_at(&self, cube: &DyadicCube) -> f64 {
        assert_eq!(cube.level(), self.coarse_level);
        self.scaling[cube.index()]
    }

    pub fn set_scaling(&mut self, cube: &DyadicCube, value: f64) -> Result<()> {
        if cube.level() != self.coarse_level || cube.dim() != self.dim {
            return Err(Error::Domain(format!("scaling cube {cube} not at coarse level {}", self.coarse_level)));
        }
        self.scaling[cube.index()] = value;
        Ok(())
    }

    pub fn detail(&self, cube: &DyadicCube, sigma: Sigma) -> f64 {
        self.check_key(cube, sigma).expect("valid key");
        self.details[(cube.level() - self.coarse_level) as usize][sigma as usize - 1][cube.index()]
    }

    pub fn set_detail(&mut self, cube: &DyadicCube, sigma: Sigma, value: f64) -> Result<()> {
        self.check_key(cube, sigma)?;
        self.details[(cube.level() - self.coarse_level) as usize][sigma as usize - 1][cube.index()] = value;
        Ok(())
    }

    /// Dense coefficients of one `(level, σ)` band, indexed by cube index.
    pub fn band(&self, level: u32, sigma: Sigma) -> &[f64] {
        &self.details[(level - self.coarse_level) as usize][sigma as usize - 1]
    }

    pub fn band_mut(&mut self, level: u32, sigma: Sigma) -> &mut [f64] {
        &mut self.details[(level - self.coarse_level) as usize][sigma as usize - 1]
    }

    pub(crate) fn level_bands(&self, level: u32) -> &[Vec<f64>] {
        &self.details[(level - self.coarse_level) as usize]
    }

    /// All detail coefficients with nonzero value, in (level, σ, index) order.
    pub fn nonzero_details(&self) -> Vec<(CoeffKey, f64)> {
        let mut out = Vec::new();
        for (li, bands) in self.details.iter().enumerate() {
            let level = self.coarse_level + li as u32;
            for (si, band) in bands.iter().enumerate() {
                for (idx, &v) in band.iter().enumerate() {
                    if v != 0.0 {
                        let cube = DyadicCube::from_index(self.dim, level, idx);
                        out.push((CoeffKey { cube, sigma: si as Sigma + 1 }, v));
                    }
                }
            }
        }
        out
    }

    pub fn detail_energy(&self) -> f64 {
        self.details.iter().flatten().flatten().map(|v| v * v).sum()
    }

    pub fn scaling_energy(&self) -> f64 {
        self.scaling.iter().map(|v| v * v).sum()
    }

    /// `Σ scaling² + Σ detail²`.
    pub fn energy(&self) -> f64 {
        self.scaling_energy() + self.detail_energy()
    }

    /// Copy with the scaling part removed.
    pub fn details_only(&self) -> Self {
        let mut t = self.clone();
        t.scaling.iter_mut().for_each(|v| *v = 0.0);
        t
    }

    /// Copy retaining only the scaling part.
    pub fn scaling_only(&self) -> Self {
        let mut t = Self::zeros(self.dim, self.coarse_level, self.finest_level).expect("valid layout");
        t.scaling.copy_from_slice(&self.scaling);
        t
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut t = self.clone();
        t.scaling.iter_mut().for_each(|v| *v *= c);
        t.details.iter_mut().flatten().flatten().for_each(|v| *v *= c);
        t
    }

    /// `self + c·other`.
    pub fn axpy(&mut self, c: f64, other: &Self) -> Result<()> {
        self.check_layout(other)?;
        for (a, b) in self.scaling.iter_mut().zip(&other.scaling) {
            *a += c * b;
        }
        for (a, b) in self.details.iter_mut().flatten().flatten().zip(other.details.iter().flatten().flatten()) {
            *a += c * b;
        }
        Ok(())
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let s = self.scaling.iter().zip(&other.scaling).map(|(a, b)| (a - b).abs());
        let d = self
            .details
            .iter()
            .flatten()
            .flatten()
            .zip(other.details.iter().flatten().flatten())
            .map(|(a, b)| (a - b).abs());
        s.chain(d).fold(0.0, f64::max)
    }

    /// Coefficient triplets `level:offset/σ value`, one per nonzero detail.
    pub fn to_triplet_text(&self) -> String {
        let mut s = String::new();
        for (idx, v) in self.scaling.iter().enumerate() {
            if *v != 0.0 {
                let c = DyadicCube::from_index(self.dim, self.coarse_level, idx);
                s.push_str(&format!("{c}/0 {v:.17e}\n"));
            }
        }
        for (key, v) in self.nonzero_details() {
            s.push_str(&format!("{key} {v:.17e}\n"));
        }
        s
    }
}
