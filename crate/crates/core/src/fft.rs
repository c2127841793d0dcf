//! Torus FFT helpers shared by the multiplier operators.

use std::f64::consts::PI;
use std::sync::{Arc, LazyLock, Mutex};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::SampledFunction;

static PLANNER: LazyLock<Mutex<FftPlanner<f64>>> = LazyLock::new(|| Mutex::new(FftPlanner::new()));

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    let mut planner = PLANNER.lock().expect("fft planner poisoned");
    if inverse {
        planner.plan_fft_inverse(len)
    } else {
        planner.plan_fft_forward(len)
    }
}

/// Signed integer frequency of DFT bin `i` on an axis of length `n`; the
/// Nyquist bin `n/2` maps to `+n/2`.
pub fn frequency(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn transform(data: &mut [Complex64], dim: usize, n: usize, inverse: bool) {
    let fft = plan(n, inverse);
    if dim == 1 {
        fft.process(data);
        return;
    }
    fft.process(data);
    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    for i in 0..n {
        for j in 0..n {
            t[j * n + i] = data[i * n + j];
        }
    }
    fft.process(&mut t);
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = t[j * n + i];
        }
    }
}

/// Unnormalized forward DFT of the samples.
pub fn forward(f: &SampledFunction) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut data, f.dim(), f.side(), false);
    data
}

/// Inverse DFT (normalized), keeping the real part.
pub fn inverse_real(mut spectrum: Vec<Complex64>, dim: usize, level: u32) -> SampledFunction {
    let n = 1usize << level;
    transform(&mut spectrum, dim, n, true);
    let scale = 1.0 / spectrum.len() as f64;
    let values = spectrum.iter().map(|c| c.re * scale).collect();
    SampledFunction::new(dim, level, values).expect("shape preserved")
}

/// Frequency vector of flat bin index `idx`.
pub fn frequency_vector(idx: usize, dim: usize, n: usize) -> [i64; 2] {
    match dim {
        1 => [frequency(idx, n), 0],
        _ => [frequency(idx / n, n), frequency(idx % n, n)],
    }
}

/// Multiplies the spectrum of `f` by `symbol(k)` and transforms back.
pub fn apply_symbol(f: &SampledFunction, symbol: impl Fn([i64; 2]) -> Complex64) -> SampledFunction {
    let n = f.side();
    let dim = f.dim();
    let mut spec = forward(f);
    for (idx, c) in spec.iter_mut().enumerate() {
        *c *= symbol(frequency_vector(idx, dim, n));
    }
    inverse_real(spec, dim, f.level())
}

/// Periodic convolution `∫ f(x−y) k(y) dy` with grid weights.
pub fn convolve(f: &SampledFunction, kernel_spectrum: &[Complex64]) -> SampledFunction {
    let mut spec = forward(f);
    for (c, k) in spec.iter_mut().zip(kernel_spectrum) {
        *c *= k;
    }
    inverse_real(spec, f.dim(), f.level())
}

/// Spectrum of a grid kernel, scaled by the cell measure so that
/// [`convolve`] approximates the continuous convolution integral.
pub fn kernel_spectrum(kernel: &SampledFunction) -> Vec<Complex64> {
    let w = kernel.cell_measure();
    forward(kernel).into_iter().map(|c| c * w).collect()
}

/// `2π|k|` for a frequency vector.
pub fn angular_magnitude(k: [i64; 2]) -> f64 {
    2.0 * PI * ((k[0] * k[0] + k[1] * k[1]) as f64).sqrt()
}
