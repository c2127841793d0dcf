use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dyadic cube `I = 2^{-j}(k + [0,1)^n)` on the unit torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    dim: u8,
    level: u32,
    offset: [u32; 2],
}

impl DyadicCube {
    pub fn new(dim: usize, level: u32, offset: &[u32]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Shape(format!("dimension {dim} not supported")));
        }
        if offset.len() != dim {
            return Err(Error::Shape(format!("offset has {} entries, dim is {dim}", offset.len())));
        }
        if level > 30 {
            return Err(Error::Domain(format!("level {level} out of range")));
        }
        let count = 1u64 << level;
        if offset.iter().any(|&k| u64::from(k) >= count) {
            return Err(Error::Domain(format!("offset {offset:?} outside [0, 2^{level})")));
        }
        let mut o = [0u32; 2];
        o[..dim].copy_from_slice(offset);
        Ok(Self { dim: dim as u8, level, offset: o })
    }

    /// Whole torus `[0,1)^n`.
    pub fn unit(dim: usize) -> Self {
        Self::new(dim, 0, &vec![0; dim]).expect("unit cube is valid")
    }

    /// Cube at `level` with row-major flat index `idx`.
    pub fn from_index(dim: usize, level: u32, idx: usize) -> Self {
        let side = 1usize << level;
        let offset = match dim {
            1 => [idx as u32, 0],
            _ => [(idx / side) as u32, (idx % side) as u32],
        };
        Self { dim: dim as u8, level, offset }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn offset(&self) -> &[u32] {
        &self.offset[..self.dim()]
    }

    pub fn index(&self) -> usize {
        match self.dim {
            1 => self.offset[0] as usize,
            _ => ((self.offset[0] as usize) << self.level) + self.offset[1] as usize,
        }
    }

    pub fn side(&self) -> f64 {
        (-(self.level as f64)).exp2()
    }

    /// `|I| = 2^{-jn}`.
    pub fn measure(&self) -> f64 {
        (-((self.level as usize * self.dim()) as f64)).exp2()
    }

    /// Center `x_I`.
    pub fn center(&self) -> [f64; 2] {
        let s = self.side();
        let mut c = [0.0; 2];
        for (i, ci) in c.iter_mut().enumerate().take(self.dim()) {
            *ci = (self.offset[i] as f64 + 0.5) * s;
        }
        c
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &DyadicCube) -> bool {
        if self.dim != other.dim || other.level < self.level {
            return false;
        }
        let shift = other.level - self.level;
        (0..self.dim()).all(|i| other.offset[i] >> shift == self.offset[i])
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        if self.level == 0 {
            return None;
        }
        let mut offset = self.offset;
        for o in offset.iter_mut().take(self.dim()) {
            *o >>= 1;
        }
        Some(Self { dim: self.dim, level: self.level - 1, offset })
    }

    /// The ancestor at `level` (≤ own level).
    pub fn ancestor(&self, level: u32) -> DyadicCube {
        assert!(level <= self.level);
        let shift = self.level - level;
        let mut offset = self.offset;
        for o in offset.iter_mut().take(self.dim()) {
            *o >>= shift;
        }
        Self { dim: self.dim, level, offset }
    }

    /// Grid cells (at resolution `2^finest`) covered by the cube, as flat indices.
    pub fn cells(&self, finest: u32) -> Vec<usize> {
        assert!(finest >= self.level);
        let span = 1usize << (finest - self.level);
        let n = 1usize << finest;
        let s0 = self.offset[0] as usize * span;
        match self.dim {
            1 => (s0..s0 + span).collect(),
            _ => {
                let s1 = self.offset[1] as usize * span;
                let mut v = Vec::with_capacity(span * span);
                for i in s0..s0 + span {
                    for j in s1..s1 + span {
                        v.push(i * n + j);
                    }
                }
                v
            }
        }
    }

    /// Number of cubes at `level` in dimension `dim`.
    pub fn count_at(dim: usize, level: u32) -> usize {
        1usize << (level as usize * dim)
    }
}

impl std::fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.dim {
            1 => write!(f, "{}:{}", self.level, self.offset[0]),
            _ => write!(f, "{}:{},{}", self.level, self.offset[0], self.offset[1]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_is_side_power() {
        for dim in 1..=2 {
            for level in 0..10 {
                let c = DyadicCube::new(dim, level, &vec![0; dim]).unwrap();
                assert_eq!(c.measure(), c.side().powi(dim as i32));
            }
        }
    }

    #[test]
    fn offsets_validated() {
        assert!(DyadicCube::new(1, 2, &[4]).is_err());
        assert!(DyadicCube::new(2, 2, &[3]).is_err());
        assert!(DyadicCube::new(2, 2, &[3, 3]).is_ok());
    }

    #[test]
    fn containment_and_ancestors() {
        let r = DyadicCube::new(2, 1, &[1, 0]).unwrap();
        let i = DyadicCube::new(2, 3, &[5, 2]).unwrap();
        assert!(r.contains(&i));
        assert_eq!(i.ancestor(1), r);
        assert!(!i.contains(&r));
        let j = DyadicCube::new(2, 3, &[1, 2]).unwrap();
        assert!(!r.contains(&j));
        assert_eq!(DyadicCube::from_index(2, 3, i.index()), i);
    }

    #[test]
    fn center_and_cells() {
        let c = DyadicCube::new(1, 2, &[3]).unwrap();
        assert_eq!(c.center()[0], 0.875);
        assert_eq!(c.cells(4), vec![12, 13, 14, 15]);
        assert_eq!(DyadicCube::new(2, 1, &[1, 1]).unwrap().cells(2), vec![10, 11, 14, 15]);
    }
}
