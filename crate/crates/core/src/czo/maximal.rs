use num_complex::Complex64;
use rayon::prelude::*;

use super::window::Window;
use super::Operator;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::SampledFunction;

/// Radial bump profiles `p(r)`, supported in `r ≤ radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BumpShape {
    /// cubic B-spline, radius 2
    CubicSpline,
    /// quadratic B-spline, radius 3/2
    QuadraticSpline,
    /// `(1 − r²)²`, radius 1
    Biweight,
}

impl BumpShape {
    pub fn radius(self) -> f64 {
        match self {
            BumpShape::CubicSpline => 2.0,
            BumpShape::QuadraticSpline => 1.5,
            BumpShape::Biweight => 1.0,
        }
    }

    /// `(p(r), p'(r))`.
    pub fn eval(self, r: f64) -> (f64, f64) {
        let r = r.abs();
        match self {
            BumpShape::CubicSpline => {
                if r < 1.0 {
                    (2.0 / 3.0 - r * r + 0.5 * r * r * r, -2.0 * r + 1.5 * r * r)
                } else if r < 2.0 {
                    let s = 2.0 - r;
                    (s * s * s / 6.0, -0.5 * s * s)
                } else {
                    (0.0, 0.0)
                }
            }
            BumpShape::QuadraticSpline => {
                if r < 0.5 {
                    (0.75 - r * r, -2.0 * r)
                } else if r < 1.5 {
                    let s = 1.5 - r;
                    (0.5 * s * s, -s)
                } else {
                    (0.0, 0.0)
                }
            }
            BumpShape::Biweight => {
                if r < 1.0 {
                    let s = 1.0 - r * r;
                    (s * s, -4.0 * r * s)
                } else {
                    (0.0, 0.0)
                }
            }
        }
    }
}

/// Test function `φ(x) = c·p(|x|)` with `c` chosen so that
/// `|φ| + |∇φ| ≤ (1+|x|²)^{−(n+1)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub shape: BumpShape,
    pub dim: usize,
    pub scale: f64,
    pub mass: f64,
}

const DENSE: usize = 200_000;

impl Bump {
    pub fn new(shape: BumpShape, dim: usize) -> Self {
        let radius = shape.radius();
        let np1 = (dim + 1) as i32;
        let mut sup: f64 = 0.0;
        for i in 0..=DENSE {
            let r = radius * i as f64 / DENSE as f64;
            let (p, dp) = shape.eval(r);
            sup = sup.max((p.abs() + dp.abs()) * (1.0 + r * r).powi(np1));
        }
        // dense sampling can miss the sup by O(DENSE^{-2}); keep a margin
        let scale = (1.0 - 1e-6) / sup;
        // Simpson on [0, radius]; knots of every profile fall on even nodes
        let panels = 24_000;
        let hstep = radius / panels as f64;
        let weight = |r: f64| if dim == 1 { 2.0 } else { 2.0 * std::f64::consts::PI * r };
        let mut acc = 0.0;
        for i in 0..=panels {
            let r = i as f64 * hstep;
            let c = if i == 0 || i == panels { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += c * shape.eval(r).0 * weight(r);
        }
        let mass = scale * acc * hstep / 3.0;
        Self { shape, dim, scale, mass }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.scale * self.shape.eval(r).0
    }

    /// Discrete `φ_t` centred at the origin, periodized, as a density whose
    /// grid integral equals `∫φ` exactly.
    pub fn kernel(&self, level: u32, t: f64) -> SampledFunction {
        let dim = self.dim;
        let n = 1usize << level;
        let h = 1.0 / n as f64;
        let reach = (self.shape.radius() * t / h).ceil() as i64 + 1;
        let mut k = SampledFunction::zeros(dim, level);
        let tn = t.powi(dim as i32);
        let vals = k.values_mut();
        let wrap = |d: i64| d.rem_euclid(n as i64) as usize;
        if dim == 1 {
            for d in -reach..=reach {
                vals[wrap(d)] += self.value(d as f64 * h / t) / tn;
            }
        } else {
            for d0 in -reach..=reach {
                for d1 in -reach..=reach {
                    let r = ((d0 * d0 + d1 * d1) as f64).sqrt() * h / t;
                    vals[wrap(d0) * n + wrap(d1)] += self.value(r) / tn;
                }
            }
        }
        let total = k.integral();
        if total > 0.0 {
            let c = self.mass / total;
            k.values_mut().iter_mut().for_each(|v| *v *= c);
        } else {
            k.values_mut()[0] = self.mass / k.cell_measure();
        }
        k
    }
}

/// The default three-shape dictionary.
pub fn default_dictionary(dim: usize) -> Vec<Bump> {
    [BumpShape::CubicSpline, BumpShape::QuadraticSpline, BumpShape::Biweight]
        .into_iter()
        .map(|s| Bump::new(s, dim))
        .collect()
}

/// `t = 2^{−k}`, `k = 0..count`.
pub fn dyadic_scales(count: usize) -> Vec<f64> {
    (0..count).map(|k| 2f64.powi(-(k as i32))).collect()
}

pub const DEFAULT_SCALE_COUNT: usize = 16;

/// Grand maximal function `𝔐` over a finite dictionary and dyadic scales;
/// the local variant `𝔪` keeps only `t < 1`.
#[derive(Debug, Clone)]
pub struct MaximalOperator {
    pub dictionary: Vec<Bump>,
    pub scales: Vec<f64>,
    pub local: bool,
}

struct Plane {
    window: Window,
    spectrum: Vec<Complex64>,
}

impl MaximalOperator {
    pub fn new(dim: usize, local: bool) -> Self {
        Self { dictionary: default_dictionary(dim), scales: dyadic_scales(DEFAULT_SCALE_COUNT), local }
    }

    pub fn with_dictionary(dictionary: Vec<Bump>, scales: Vec<f64>, local: bool) -> Result<Self> {
        let op = Self { dictionary, scales, local };
        op.check(None)?;
        Ok(op)
    }

    /// `max |∫φ|` over the dictionary.
    pub fn dictionary_mass(&self) -> f64 {
        self.dictionary.iter().map(|b| b.mass.abs()).fold(0.0, f64::max)
    }

    fn check(&self, dim: Option<usize>) -> Result<()> {
        if self.dictionary.is_empty() {
            return Err(Error::Config("maximal function needs a nonempty test-function dictionary".into()));
        }
        if self.active_scales().next().is_none() {
            return Err(Error::Config("maximal function has no admissible scales".into()));
        }
        if let Some(d) = dim {
            if self.dictionary.iter().any(|b| b.dim != d) {
                return Err(Error::Shape(format!("dictionary dimension differs from input dimension {d}")));
            }
        }
        Ok(())
    }

    fn active_scales(&self) -> impl Iterator<Item = f64> + '_ {
        self.scales.iter().copied().filter(move |&t| t > 0.0 && (!self.local || t < 1.0))
    }

    /// Distinct (kernel, window) pairs; scales below the grid collapse to one.
    fn planes(&self, dim: usize, level: u32) -> Vec<Plane> {
        let n = 1usize << level;
        let mut planes = Vec::new();
        for bump in &self.dictionary {
            let mut last: Option<(Vec<f64>, Window)> = None;
            for t in self.active_scales() {
                let kernel = bump.kernel(level, t);
                let window = Window::new(dim, n, t);
                if let Some((k, w)) = &last {
                    if k.as_slice() == kernel.values() && *w == window {
                        continue;
                    }
                }
                planes.push(Plane { window: window.clone(), spectrum: fft::kernel_spectrum(&kernel) });
                last = Some((kernel.into_values(), window));
            }
        }
        planes
    }
}

impl Operator for MaximalOperator {
    fn name(&self) -> String {
        if self.local { "local_maximal".into() } else { "maximal".into() }
    }

    fn is_linear(&self) -> bool {
        false
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        self.check(Some(f.dim()))?;
        let planes = self.planes(f.dim(), f.level());
        let spec = fft::forward(f);
        let parts: Vec<Vec<f64>> = planes
            .par_iter()
            .map(|p| {
                let conv = convolve_spectrum(&spec, &p.spectrum, f);
                let abs: Vec<f64> = conv.iter().map(|v| v.abs()).collect();
                p.window.reduce_max(&abs)
            })
            .collect();
        let mut out = vec![0.0; f.len()];
        for part in parts {
            for (o, v) in out.iter_mut().zip(part) {
                *o = f64::max(*o, v);
            }
        }
        SampledFunction::new(f.dim(), f.level(), out)
    }

    /// `x ↦ sup_{φ,t} sup_{|y−x|<t} |b(x)·(f∗φ_t)(y) − (g∗φ_t)(y)|`.
    fn apply_frozen(&self, b: &SampledFunction, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
        f.check_shape(b)?;
        f.check_shape(g)?;
        self.check(Some(f.dim()))?;
        let n = f.side();
        let dim = f.dim();
        let sf = fft::forward(f);
        let sg = fft::forward(g);
        let planes: Vec<(Vec<usize>, Vec<f64>, Vec<f64>)> = self
            .planes(dim, f.level())
            .iter()
            .map(|p| {
                let offs = flat_offsets(&p.window, dim, n);
                (offs, convolve_spectrum(&sf, &p.spectrum, f), convolve_spectrum(&sg, &p.spectrum, f))
            })
            .collect();
        let bv = b.values();
        let out: Vec<f64> = (0..f.len())
            .into_par_iter()
            .map(|x| {
                let beta = bv[x];
                let mut best: f64 = 0.0;
                for (offs, cf, cg) in &planes {
                    for &o in offs {
                        let y = shift_index(x, o, dim, n);
                        best = best.max((beta * cf[y] - cg[y]).abs());
                    }
                }
                best
            })
            .collect();
        SampledFunction::new(dim, f.level(), out)
    }
}

/// `𝔐f` (or `𝔪f` when `local`) with the default dictionary.
pub fn maximal_function(f: &SampledFunction, local: bool) -> Result<SampledFunction> {
    MaximalOperator::new(f.dim(), local).apply(f)
}

pub(crate) fn convolve_spectrum(spec: &[Complex64], kernel: &[Complex64], like: &SampledFunction) -> Vec<f64> {
    let prod: Vec<Complex64> = spec.iter().zip(kernel).map(|(a, b)| a * b).collect();
    fft::inverse_real(prod, like.dim(), like.level()).into_values()
}

/// Window offsets encoded as flat indices of the displacement.
pub(crate) fn flat_offsets(window: &Window, dim: usize, n: usize) -> Vec<usize> {
    window
        .offsets()
        .into_iter()
        .map(|(s0, s1)| if dim == 1 { s1 } else { s0 * n + s1 })
        .collect()
}

#[inline]
pub(crate) fn shift_index(x: usize, offset: usize, dim: usize, n: usize) -> usize {
    if dim == 1 {
        let y = x + offset;
        if y >= n { y - n } else { y }
    } else {
        let (x0, x1) = (x / n, x % n);
        let (o0, o1) = (offset / n, offset % n);
        ((x0 + o0) % n) * n + (x1 + o1) % n
    }
}
