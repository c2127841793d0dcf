use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::WaveletMatrix;
use super::Operator;
use crate::error::{Error, Result};
use crate::fft;
use crate::grid::SampledFunction;

pub type SymbolFn = Arc<dyn Fn([i64; 2]) -> Complex64 + Send + Sync>;

/// Frequency-side symbol on integer frequencies of the torus.
#[derive(Clone)]
pub enum Symbol {
    Identity,
    /// `−i·sgn(k)` (1D only).
    Hilbert,
    /// `−i k_axis / |k|`.
    Riesz { axis: usize },
    /// `(2π|k|)^{−α}`, with the value at `k = 0` set to zero.
    Fractional { alpha: f64 },
    /// `e^{−2πt|k|}`.
    Poisson { t: f64 },
    Custom { name: String, bound: f64, func: SymbolFn },
}

impl std::fmt::Debug for Symbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Symbol::Identity => write!(f, "Identity"),
            Symbol::Hilbert => write!(f, "Hilbert"),
            Symbol::Riesz { axis } => write!(f, "Riesz({axis})"),
            Symbol::Fractional { alpha } => write!(f, "Fractional({alpha})"),
            Symbol::Poisson { t } => write!(f, "Poisson({t})"),
            Symbol::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl Symbol {
    /// Declared sup of `|symbol|` over nonzero integer frequencies.
    pub fn bound(&self) -> f64 {
        match self {
            Symbol::Fractional { alpha } => (2.0 * PI).powf(-alpha),
            Symbol::Custom { bound, .. } => *bound,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub enum OperatorKind {
    Multiplier { symbol: Symbol, conjugate: bool },
    WaveletMatrix(WaveletMatrix),
}

/// A singular or fractional integral operator, either as a frequency symbol or
/// as a matrix in a wavelet basis.
#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub name: String,
    pub kind: OperatorKind,
    /// Declared kernel regularity `δ ∈ (0,1]`.
    pub delta: f64,
    /// Must be set for symbols singular at the origin; the zero mode is then
    /// annihilated.
    pub unbounded_at_zero: bool,
}

impl OperatorSpec {
    pub fn multiplier(name: impl Into<String>, symbol: Symbol, delta: f64) -> Self {
        let unbounded_at_zero = matches!(symbol, Symbol::Fractional { .. });
        Self {
            name: name.into(),
            kind: OperatorKind::Multiplier { symbol, conjugate: false },
            delta,
            unbounded_at_zero,
        }
    }

    pub fn identity() -> Self {
        Self::multiplier("identity", Symbol::Identity, 1.0)
    }

    pub fn hilbert() -> Self {
        Self::multiplier("hilbert", Symbol::Hilbert, 1.0)
    }

    pub fn riesz(axis: usize) -> Self {
        Self::multiplier(format!("riesz{}", axis + 1), Symbol::Riesz { axis }, 1.0)
    }

    pub fn fractional(alpha: f64) -> Self {
        Self::multiplier(format!("fractional({alpha})"), Symbol::Fractional { alpha }, 1.0)
    }

    pub fn poisson(t: f64) -> Self {
        Self::multiplier(format!("poisson({t})"), Symbol::Poisson { t }, 1.0)
    }

    pub fn custom(
        name: impl Into<String>,
        bound: f64,
        func: impl Fn([i64; 2]) -> Complex64 + Send + Sync + 'static,
    ) -> Self {
        let name = name.into();
        Self::multiplier(name.clone(), Symbol::Custom { name, bound, func: Arc::new(func) }, 1.0)
    }

    pub fn is_multiplier(&self) -> bool {
        matches!(self.kind, OperatorKind::Multiplier { .. })
    }

    /// `T*`: conjugate symbol, or transposed matrix.
    pub fn adjoint(&self) -> Self {
        let kind = match &self.kind {
            OperatorKind::Multiplier { symbol, conjugate } => {
                OperatorKind::Multiplier { symbol: symbol.clone(), conjugate: !conjugate }
            }
            OperatorKind::WaveletMatrix(m) => OperatorKind::WaveletMatrix(m.transpose()),
        };
        Self { name: format!("{}*", self.name), kind, delta: self.delta, unbounded_at_zero: self.unbounded_at_zero }
    }

    /// Symbol value at integer frequency `k`.
    pub fn symbol_at(&self, k: [i64; 2], dim: usize, n: usize) -> Result<Complex64> {
        let OperatorKind::Multiplier { symbol, conjugate } = &self.kind else {
            return Err(Error::Contract(format!("operator '{}' is not a multiplier", self.name)));
        };
        let nyquist = (n / 2) as i64;
        let zero = k[0] == 0 && k[1] == 0;
        let mag = fft::angular_magnitude(k);
        let v = match symbol {
            Symbol::Identity => Complex64::new(1.0, 0.0),
            Symbol::Hilbert => {
                if dim != 1 {
                    return Err(Error::Config("the Hilbert symbol is one-dimensional; use riesz".into()));
                }
                if zero || k[0] == nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -(k[0].signum() as f64))
                }
            }
            Symbol::Riesz { axis } => {
                if *axis >= dim {
                    return Err(Error::Config(format!("riesz axis {axis} out of range for dim {dim}")));
                }
                if zero || k[*axis] == nyquist {
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(0.0, -(k[*axis] as f64) * 2.0 * PI / mag)
                }
            }
            Symbol::Fractional { alpha } => {
                if zero {
                    if !self.unbounded_at_zero {
                        return Err(Error::Config(format!(
                            "operator '{}' is singular at frequency 0 but not flagged unbounded_at_zero",
                            self.name
                        )));
                    }
                    Complex64::new(0.0, 0.0)
                } else {
                    Complex64::new(mag.powf(-alpha), 0.0)
                }
            }
            Symbol::Poisson { t } => Complex64::new((-t * mag).exp(), 0.0),
            Symbol::Custom { func, .. } => func(k),
        };
        Ok(if *conjugate { v.conj() } else { v })
    }
}

/// Forward FFT, pointwise symbol multiplication, inverse FFT.
pub fn apply_multiplier_operator(op: &OperatorSpec, f: &SampledFunction) -> Result<SampledFunction> {
    if !op.is_multiplier() {
        return Err(Error::Contract(format!("operator '{}' is not a multiplier", op.name)));
    }
    let n = f.side();
    let dim = f.dim();
    let mut spec = fft::forward(f);
    for (idx, c) in spec.iter_mut().enumerate() {
        *c *= op.symbol_at(fft::frequency_vector(idx, dim, n), dim, n)?;
    }
    Ok(fft::inverse_real(spec, dim, f.level()))
}

/// Handle evaluating an [`OperatorSpec`] on sampled functions.
#[derive(Debug, Clone)]
pub struct MultiplierOperator {
    pub spec: OperatorSpec,
}

impl MultiplierOperator {
    pub fn new(spec: OperatorSpec) -> Result<Self> {
        if !spec.is_multiplier() {
            return Err(Error::Contract(format!("operator '{}' is not a multiplier", spec.name)));
        }
        Ok(Self { spec })
    }

    pub fn hilbert() -> Self {
        Self { spec: OperatorSpec::hilbert() }
    }

    pub fn riesz(axis: usize) -> Self {
        Self { spec: OperatorSpec::riesz(axis) }
    }

    pub fn fractional(alpha: f64) -> Self {
        Self { spec: OperatorSpec::fractional(alpha) }
    }

    pub fn identity() -> Self {
        Self { spec: OperatorSpec::identity() }
    }

    pub fn adjoint(&self) -> Self {
        Self { spec: self.spec.adjoint() }
    }
}

impl Operator for MultiplierOperator {
    fn name(&self) -> String {
        self.spec.name.clone()
    }

    fn is_linear(&self) -> bool {
        true
    }

    fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        apply_multiplier_operator(&self.spec, f)
    }
}

/// Declarative operator description, as found in operator config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default = "default_kind")]
    pub kind: String,
    pub symbol: SymbolConfig,
    #[serde(default)]
    pub delta: Option<f64>,
    #[serde(default)]
    pub unbounded_at_zero: Option<bool>,
}

fn default_kind() -> String {
    "multiplier".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum SymbolConfig {
    Identity,
    Hilbert,
    Riesz { axis: usize },
    Fractional { alpha: f64 },
    Poisson { t: f64 },
}

impl OperatorConfig {
    pub fn build(&self) -> Result<OperatorSpec> {
        if self.kind != "multiplier" {
            return Err(Error::Config(format!(
                "operator kind '{}' cannot be declared in a config file (only 'multiplier')",
                self.kind
            )));
        }
        let symbol = match &self.symbol {
            SymbolConfig::Identity => Symbol::Identity,
            SymbolConfig::Hilbert => Symbol::Hilbert,
            SymbolConfig::Riesz { axis } => Symbol::Riesz { axis: *axis },
            SymbolConfig::Fractional { alpha } => Symbol::Fractional { alpha: *alpha },
            SymbolConfig::Poisson { t } => Symbol::Poisson { t: *t },
        };
        let delta = self.delta.unwrap_or(1.0);
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::Config(format!("δ = {delta} outside (0,1]")));
        }
        let name = self.name.clone().unwrap_or_else(|| format!("{symbol:?}").to_lowercase());
        let mut spec = OperatorSpec::multiplier(name, symbol, delta);
        if let Some(flag) = self.unbounded_at_zero {
            spec.unbounded_at_zero = flag;
        }
        Ok(spec)
    }
}

/// Parses a JSON list of operator declarations (or a single declaration).
pub fn parse_operator_specs(json: &str) -> Result<Vec<OperatorSpec>> {
    let value: serde_json::Value = serde_json::from_str(json)?;
    let configs: Vec<OperatorConfig> = match value {
        serde_json::Value::Array(_) => serde_json::from_value(value)?,
        serde_json::Value::Object(ref map) if map.contains_key("operators") => {
            serde_json::from_value(map["operators"].clone())?
        }
        other => vec![serde_json::from_value(other)?],
    };
    configs.iter().map(OperatorConfig::build).collect()
}

pub fn load_operator_specs(path: impl AsRef<Path>) -> Result<Vec<OperatorSpec>> {
    parse_operator_specs(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &SampledFunction, b: &SampledFunction, tol: f64) -> bool {
        a.sub(b).sup_norm() < tol
    }

    #[test]
    fn hilbert_of_cosine_is_sine() {
        let f = SampledFunction::from_fn(1, 8, |x| (2.0 * PI * x[0]).cos());
        let g = apply_multiplier_operator(&OperatorSpec::hilbert(), &f).unwrap();
        assert!(close(&g, &SampledFunction::from_fn(1, 8, |x| (2.0 * PI * x[0]).sin()), 1e-10));
        let c = apply_multiplier_operator(&OperatorSpec::hilbert(), &SampledFunction::constant(1, 8, 4.0)).unwrap();
        assert!(c.sup_norm() < 1e-14);
    }

    #[test]
    fn fractional_on_exponential_mode() {
        let alpha = 0.5;
        for k in [1i64, 3, 7] {
            let cos = SampledFunction::from_fn(1, 7, |x| (2.0 * PI * k as f64 * x[0]).cos());
            let sin = SampledFunction::from_fn(1, 7, |x| (2.0 * PI * k as f64 * x[0]).sin());
            let factor = (2.0 * PI * k as f64).powf(-alpha);
            let op = OperatorSpec::fractional(alpha);
            assert!(close(&apply_multiplier_operator(&op, &cos).unwrap(), &cos.scale(factor), 1e-12));
            assert!(close(&apply_multiplier_operator(&op, &sin).unwrap(), &sin.scale(factor), 1e-12));
        }
    }

    #[test]
    fn fractional_without_flag_is_config_error() {
        let mut op = OperatorSpec::fractional(0.5);
        op.unbounded_at_zero = false;
        let err = apply_multiplier_operator(&op, &SampledFunction::zeros(1, 4)).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn riesz_in_two_dimensions() {
        // R_1 of cos(2π(x + 2y)) is (1/√5) sin(2π(x + 2y))
        let f = SampledFunction::from_fn(2, 5, |x| (2.0 * PI * (x[0] + 2.0 * x[1])).cos());
        let g = apply_multiplier_operator(&OperatorSpec::riesz(0), &f).unwrap();
        let e = SampledFunction::from_fn(2, 5, |x| (2.0 * PI * (x[0] + 2.0 * x[1])).sin() / 5f64.sqrt());
        assert!(close(&g, &e, 1e-12));
        assert!(apply_multiplier_operator(&OperatorSpec::hilbert(), &f).is_err());
    }

    #[test]
    fn symbols_within_declared_bounds() {
        for op in [OperatorSpec::hilbert(), OperatorSpec::fractional(0.3), OperatorSpec::poisson(0.1), OperatorSpec::identity()] {
            let bound = match &op.kind {
                OperatorKind::Multiplier { symbol, .. } => symbol.bound(),
                _ => unreachable!(),
            };
            for i in 0..64 {
                let k = [fft::frequency(i, 64), 0];
                assert!(op.symbol_at(k, 1, 64).unwrap().norm() <= bound + 1e-15);
            }
        }
    }

    #[test]
    fn config_round_trip() {
        let json = r#"[{"name":"H","symbol":{"type":"hilbert"}},
                       {"symbol":{"type":"fractional","alpha":0.5},"delta":0.5},
                       {"name":"R2","symbol":{"type":"riesz","axis":1}}]"#;
        let ops = parse_operator_specs(json).unwrap();
        assert_eq!(ops.len(), 3);
        assert_eq!(ops[0].name, "H");
        assert!(ops[1].unbounded_at_zero);
        assert_eq!(ops[1].delta, 0.5);
        assert!(parse_operator_specs(r#"{"kind":"wavelet_matrix","symbol":{"type":"identity"}}"#).is_err());
        assert!(parse_operator_specs(r#"{"symbol":{"type":"hilbert"},"delta":2.0}"#).is_err());
    }
}
