use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;

use super::maximal::{flat_offsets, shift_index};
use super::window::Window;
use super::Operator;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::SampledFunction;

/// Scales `t` with quadrature weights `Δt` for the cone integral.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleGrid {
    pub scales: Vec<(f64, f64)>,
}

impl ScaleGrid {
    /// `t = t_max·2^{−i/per_octave}` down to one grid cell, `Δt = t·ln2/per_octave`.
    pub fn geometric(level: u32, per_octave: usize, t_max: f64) -> Self {
        let h = 2f64.powi(-(level as i32));
        let mut scales = Vec::new();
        if per_octave > 0 {
            let mut i = 0;
            loop {
                let t = t_max * 2f64.powf(-(i as f64) / per_octave as f64);
                if t < h * (1.0 - 1e-12) {
                    break;
                }
                scales.push((t, t * LN_2 / per_octave as f64));
                i += 1;
            }
        }
        Self { scales }
    }
}

/// Lusin area integral `S` of the Poisson extension, over the cone `|y−x| < t`.
#[derive(Debug, Clone)]
pub struct AreaIntegral {
    pub per_octave: usize,
    pub t_max: f64,
    /// Explicit grid; overrides the geometric one.
    pub grid: Option<ScaleGrid>,
}

impl Default for AreaIntegral {
    fn default() -> Self {
        Self { per_octave: 4, t_max: 1.0, grid: None }
    }
}

struct Slice {
    weight: f64,
    window: Window,
    /// `∂_{y_a} u` per axis followed by `∂_t u`
    grads: Vec<Vec<f64>>,
}

impl AreaIntegral {
    pub fn with_grid(grid: ScaleGrid) -> Self {
        Self { grid: Some(grid), ..Self::default() }
    }

    fn scale_grid(&self, level: u32) -> Result<ScaleGrid> {
        let g = self.grid.clone().unwrap_or_else(|| ScaleGrid::geometric(level, self.per_octave, self.t_max));
        if g.scales.is_empty() {
            return Err(Error::Config("area integral t-grid is empty".into()));
        }
        Ok(g)
    }

    fn slices(&self, f: &SampledFunction) -> Result<Vec<Slice>> {
        let dim = f.dim();
        let n = f.side();
        let nyq = (n / 2) as i64;
        let spec = fft::forward(f);
        let freqs: Vec<[i64; 2]> = (0..spec.len()).map(|i| fft::frequency_vector(i, dim, n)).collect();
        let grid = self.scale_grid(f.level())?;
        let cell = f.cell_measure();
        Ok(grid
            .scales
            .par_iter()
            .map(|&(t, dt)| {
                let mut grads = Vec::with_capacity(dim + 1);
                for axis in 0..=dim {
                    let s: Vec<Complex64> = spec
                        .iter()
                        .zip(&freqs)
                        .map(|(c, k)| {
                            let mag = fft::angular_magnitude(*k);
                            let p = (-t * mag).exp();
                            let m = if axis < dim {
                                if k[axis] == nyq {
                                    Complex64::new(0.0, 0.0)
                                } else {
                                    Complex64::new(0.0, 2.0 * PI * k[axis] as f64 * p)
                                }
                            } else {
                                Complex64::new(-mag * p, 0.0)
                            };
                            c * m
                        })
                        .collect();
                    grads.push(fft::inverse_real(s, dim, f.level()).into_values());
                }
                Slice { weight: t.powi(1 - dim as i32) * dt * cell, window: Window::new(dim, n, t), grads }
            })
            .collect())
    }
}

impl Operator for AreaIntegral {
    fn name(&self) -> String {
        "area".into()
    }

    fn is_linear(&self) -> bool {
        false
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let slices = self.slices(f)?;
        let mut acc = vec![0.0; f.len()];
        for s in &slices {
            let mut energy = vec![0.0; f.len()];
            for g in &s.grads {
                for (e, v) in energy.iter_mut().zip(g) {
                    *e += v * v;
                }
            }
            for (a, v) in acc.iter_mut().zip(s.window.reduce_sum(&energy)) {
                *a += s.weight * v;
            }
        }
        SampledFunction::new(f.dim(), f.level(), acc.into_iter().map(|v| v.max(0.0).sqrt()).collect())
    }

    /// `x ↦ S(b(x)f − g)(x)`, summed directly over each cone.
    fn apply_frozen(&self, b: &SampledFunction, f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
        f.check_shape(b)?;
        f.check_shape(g)?;
        let dim = f.dim();
        let n = f.side();
        let sf = self.slices(f)?;
        let sg = self.slices(g)?;
        let offsets: Vec<Vec<usize>> = sf.iter().map(|s| flat_offsets(&s.window, dim, n)).collect();
        let bv = b.values();
        let out: Vec<f64> = (0..f.len())
            .into_par_iter()
            .map(|x| {
                let beta = bv[x];
                let mut total = 0.0;
                for ((a, c), offs) in sf.iter().zip(&sg).zip(&offsets) {
                    let mut sum = 0.0;
                    for &o in offs {
                        let y = shift_index(x, o, dim, n);
                        for (ga, gc) in a.grads.iter().zip(&c.grads) {
                            let d = beta * ga[y] - gc[y];
                            sum += d * d;
                        }
                    }
                    total += a.weight * sum;
                }
                total.sqrt()
            })
            .collect();
        SampledFunction::new(dim, f.level(), out)
    }
}

/// `S(f)` with the default scale grid.
pub fn lusin_area_integral(f: &SampledFunction) -> Result<SampledFunction> {
    AreaIntegral::default().apply(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::czo::frozen_by_definition;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_gives_zero() {
        let s = lusin_area_integral(&SampledFunction::constant(1, 8, 3.0)).unwrap();
        assert!(s.sup_norm() < 1e-12);
        let s = lusin_area_integral(&SampledFunction::constant(2, 5, -1.0)).unwrap();
        assert!(s.sup_norm() < 1e-12);
    }

    #[test]
    fn homogeneous_of_degree_one() {
        let f = SampledFunction::from_fn(1, 9, |x| (7.0 * x[0]).sin() * (-x[0]).exp());
        let s1 = lusin_area_integral(&f).unwrap();
        let s2 = lusin_area_integral(&f.scale(2.0)).unwrap();
        assert!(s2.sub(&s1.scale(2.0)).sup_norm() < 1e-10);
        assert!(s1.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn empty_grid_is_config_error() {
        let op = AreaIntegral::with_grid(ScaleGrid { scales: vec![] });
        assert!(matches!(op.apply(&SampledFunction::zeros(1, 4)), Err(Error::Config(_))));
    }

    #[test]
    fn atom_decay_slope() {
        // two-sided atom of width r at x0 = 1/2
        let level = 12;
        let r = 2f64.powi(-8);
        let f = SampledFunction::from_fn(1, level, |x| {
            let d = x[0] - 0.5;
            if (0.0..r).contains(&d) { 1.0 / r } else if (-r..0.0).contains(&d) { -1.0 / r } else { 0.0 }
        });
        let s = lusin_area_integral(&f).unwrap();
        let n = f.side();
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for i in 0..n {
            let d = (i as f64 / n as f64 - 0.5).abs();
            if d > 4.0 * r && d < 0.25 {
                xs.push(d.ln());
                ys.push(s.values()[i].ln());
            }
        }
        let slope = fit_slope(&xs, &ys);
        assert!((slope + 2.0).abs() < 0.3, "slope {slope}");
    }

    fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
        let m = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
        sxy / sxx
    }

    #[test]
    fn frozen_form_matches_definition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (dim, level) in [(1, 6), (2, 3)] {
            let len = 1usize << (level as usize * dim);
            let mut draw = || SampledFunction::new(dim, level, (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
            let (b, f, g) = (draw(), draw(), draw());
            let op = AreaIntegral::default();
            let fast = op.apply_frozen(&b, &f, &g).unwrap();
            let slow = frozen_by_definition(&op, &b, &f, &g).unwrap();
            assert!(fast.sub(&slow).sup_norm() < 1e-10 * (1.0 + slow.sup_norm()));
        }
    }
}
