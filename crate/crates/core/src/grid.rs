//! Sampled functions on the periodic unit torus `[0,1)^n`, `n ∈ {1, 2}`.
//!
//! Samples sit at the left corners `i/N` of the grid cells; integrals are
//! Riemann sums with cell measure `N^{-n}`.  Index layout for `n = 2` is
//! row-major with the last axis fastest: `values[i0 * N + i1]` is the sample at
//! `(i0/N, i1/N)`.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const HLF_MAGIC: &[u8; 4] = b"HLF1";
pub const HLF_HEADER_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    dim: usize,
    level: u32,
    values: Vec<f64>,
}

impl SampledFunction {
    pub fn new(dim: usize, level: u32, values: Vec<f64>) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Shape(format!("dimension {dim} not supported (1 or 2)")));
        }
        if level > 24 {
            return Err(Error::Resolution(format!("level {level} too fine")));
        }
        let expected = 1usize << (level as usize * dim);
        if values.len() != expected {
            return Err(Error::Shape(format!(
                "expected {expected} samples for dim {dim}, level {level}, got {}",
                values.len()
            )));
        }
        Ok(Self { dim, level, values })
    }

    pub fn zeros(dim: usize, level: u32) -> Self {
        let len = 1usize << (level as usize * dim);
        Self::new(dim, level, vec![0.0; len]).expect("valid shape")
    }

    pub fn constant(dim: usize, level: u32, c: f64) -> Self {
        let mut f = Self::zeros(dim, level);
        f.values.iter_mut().for_each(|v| *v = c);
        f
    }

    /// Samples `func` at the grid points.
    pub fn from_fn(dim: usize, level: u32, func: impl Fn(&[f64]) -> f64) -> Self {
        let mut f = Self::zeros(dim, level);
        let n = f.side();
        let h = 1.0 / n as f64;
        match dim {
            1 => {
                for i in 0..n {
                    f.values[i] = func(&[i as f64 * h]);
                }
            }
            _ => {
                for i in 0..n {
                    for j in 0..n {
                        f.values[i * n + j] = func(&[i as f64 * h, j as f64 * h]);
                    }
                }
            }
        }
        f
    }

    /// Builds from a resolution `N` (samples per axis) instead of a level.
    pub fn from_resolution(dim: usize, resolution: usize, values: Vec<f64>) -> Result<Self> {
        let level = level_of(resolution)?;
        Self::new(dim, level, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `J` with `N = 2^J`.
    pub fn level(&self) -> u32 {
        self.level
    }

    /// Samples per axis `N`.
    pub fn side(&self) -> usize {
        1usize << self.level
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Measure of one grid cell, `N^{-n}`.
    pub fn cell_measure(&self) -> f64 {
        1.0 / self.values.len() as f64
    }

    /// Grid coordinates of sample `idx`.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let n = self.side();
        let h = 1.0 / n as f64;
        match self.dim {
            1 => [idx as f64 * h, 0.0],
            _ => [(idx / n) as f64 * h, (idx % n) as f64 * h],
        }
    }

    pub fn same_shape(&self, other: &Self) -> bool {
        self.dim == other.dim && self.level == other.level
    }

    pub fn check_shape(&self, other: &Self) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::Shape(format!(
                "shape mismatch: (dim {}, N {}) vs (dim {}, N {})",
                self.dim,
                self.side(),
                other.dim,
                other.side()
            )))
        }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_measure()
    }

    pub fn mean(&self) -> f64 {
        self.integral()
    }

    /// Grid inner product `∫ f g`.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert!(self.same_shape(other));
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.cell_measure()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.cell_measure()
    }

    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|v| v * v).sum::<f64>() * self.cell_measure()).sqrt()
    }

    pub fn map(&self, op: impl Fn(f64) -> f64) -> Self {
        Self { dim: self.dim, level: self.level, values: self.values.iter().map(|&v| op(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(self.same_shape(other));
        Self {
            dim: self.dim,
            level: self.level,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn add_assign(&mut self, other: &Self) {
        debug_assert!(self.same_shape(other));
        self.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += b);
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// Circular shift by whole grid cells along each axis.
    pub fn shifted(&self, shift: [isize; 2]) -> Self {
        let n = self.side();
        let wrap = |i: usize, s: isize| ((i as isize + s).rem_euclid(n as isize)) as usize;
        let mut out = vec![0.0; self.values.len()];
        match self.dim {
            1 => {
                for i in 0..n {
                    out[wrap(i, shift[0])] = self.values[i];
                }
            }
            _ => {
                for i in 0..n {
                    for j in 0..n {
                        out[wrap(i, shift[0]) * n + wrap(j, shift[1])] = self.values[i * n + j];
                    }
                }
            }
        }
        Self { dim: self.dim, level: self.level, values: out }
    }

    pub fn write_hlf<W: Write>(&self, mut w: W) -> Result<()> {
        let mut header = [0u8; HLF_HEADER_LEN];
        header[..4].copy_from_slice(HLF_MAGIC);
        header[4..8].copy_from_slice(&(self.dim as u32).to_le_bytes());
        header[8..12].copy_from_slice(&self.level.to_le_bytes());
        w.write_all(&header)?;
        let mut buf = Vec::with_capacity(self.values.len() * 8);
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_hlf<R: Read>(mut r: R) -> Result<Self> {
        let mut header = [0u8; HLF_HEADER_LEN];
        r.read_exact(&mut header)?;
        if &header[..4] != HLF_MAGIC {
            return Err(Error::Format("bad magic, expected HLF1".into()));
        }
        let dim = u32::from_le_bytes(header[4..8].try_into().unwrap()) as usize;
        let level = u32::from_le_bytes(header[8..12].try_into().unwrap());
        if dim != 1 && dim != 2 || level > 24 {
            return Err(Error::Format(format!("unsupported header dim={dim} J={level}")));
        }
        let len = 1usize << (level as usize * dim);
        let mut bytes = vec![0u8; len * 8];
        r.read_exact(&mut bytes)?;
        let values = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        Self::new(dim, level, values)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut buf = Vec::new();
        self.write_hlf(&mut buf)?;
        crate::harness::report::write_atomic(path.as_ref(), &buf)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_hlf(std::io::BufReader::new(file))
    }
}

/// `J` such that `resolution = 2^J`.
pub fn level_of(resolution: usize) -> Result<u32> {
    if resolution < 2 || !resolution.is_power_of_two() {
        return Err(Error::Resolution(format!("resolution {resolution} is not a power of two ≥ 2")));
    }
    Ok(resolution.trailing_zeros())
}

/// Geodesic distance between two points on the unit torus.
pub fn torus_distance(dim: usize, a: &[f64], b: &[f64]) -> f64 {
    (0..dim)
        .map(|i| {
            let d = (a[i] - b[i]).rem_euclid(1.0);
            let d = d.min(1.0 - d);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}
