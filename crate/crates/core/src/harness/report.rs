use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Fixed CSV columns; value columns follow in key order.
pub const CSV_FIXED_COLUMNS: &[&str] =
    &["schema_version", "suite", "case_id", "resolution", "sample", "label", "inputs_digest", "pass"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(Error::Usage(format!("unknown report format '{other}'; valid: json, csv"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub case_id: String,
    pub resolution: usize,
    pub sample: usize,
    pub label: String,
    /// SHA-256 of the little-endian bytes of the case inputs.
    pub inputs_digest: String,
    #[serde(deserialize_with = "nan_map")]
    pub values: BTreeMap<String, f64>,
    pub pass: bool,
}

impl CaseRecord {
    pub fn value(&self, key: &str) -> f64 {
        self.values.get(key).copied().unwrap_or(f64::NAN)
    }
}

/// One suite-level assertion: `value` against `limit` under `relation`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    #[serde(deserialize_with = "nan_f64")]
    pub value: f64,
    #[serde(deserialize_with = "nan_f64")]
    pub limit: f64,
    /// `"<"`, `"<="`, `">"` or `">="`.
    pub relation: String,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, value: f64, relation: &str, limit: f64) -> Self {
        let pass = match relation {
            "<" => value < limit,
            "<=" => value <= limit,
            ">" => value > limit,
            ">=" => value >= limit,
            _ => false,
        };
        Self { name: name.into(), value, limit, relation: relation.into(), pass }
    }

    /// Boolean condition recorded as 1/0 against 1.
    pub fn holds(name: impl Into<String>, cond: bool) -> Self {
        Self::new(name, if cond { 1.0 } else { 0.0 }, ">=", 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Summary {
    #[serde(deserialize_with = "nan_f64")]
    pub max_residual: f64,
    #[serde(deserialize_with = "nan_map")]
    pub fitted: BTreeMap<String, f64>,
    #[serde(deserialize_with = "nan_map")]
    pub drift: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub suite: String,
    pub config: ExperimentConfig,
    pub cases: Vec<CaseRecord>,
    pub summary: Summary,
    #[serde(deserialize_with = "nan_f64")]
    pub wall_time_s: f64,
}

impl ExperimentReport {
    /// Report with no cases; it does not pass.
    pub fn empty(config: ExperimentConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            suite: config.suite.clone(),
            config,
            cases: Vec::new(),
            summary: Summary { max_residual: f64::NAN, notes: vec!["no cases".into()], ..Summary::default() },
            wall_time_s: 0.0,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.summary.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.summary.checks.iter().filter(|c| !c.pass).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        canonical_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text).map_err(|e| Error::Format(format!("invalid report: {e}")))?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::Format(format!("unsupported schema_version {}", r.schema_version)));
        }
        Ok(r)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Value columns: union of case keys, sorted.
    pub fn value_columns(&self) -> Vec<String> {
        self.cases.iter().flat_map(|c| c.values.keys().cloned()).collect::<BTreeSet<_>>().into_iter().collect()
    }

    pub fn to_csv(&self) -> Result<String> {
        let columns = self.value_columns();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> = CSV_FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
        header.extend(columns.iter().cloned());
        w.write_record(&header)?;
        for c in &self.cases {
            let mut row = vec![
                SCHEMA_VERSION.to_string(),
                self.suite.clone(),
                c.case_id.clone(),
                c.resolution.to_string(),
                c.sample.to_string(),
                c.label.clone(),
                c.inputs_digest.clone(),
                c.pass.to_string(),
            ];
            row.extend(columns.iter().map(|k| c.values.get(k).map(|&v| format_g17(v)).unwrap_or_default()));
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Csv => self.to_csv(),
        }
    }
}

/// Writes the report atomically.
pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), report.render(format)?.as_bytes())
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or_else(|| Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(e.into());
    }
    Ok(())
}

/// Hex SHA-256 over the little-endian bytes of every slice in turn.
pub fn digest_values(parts: &[&[f64]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        for v in *p {
            h.update(v.to_le_bytes());
        }
    }
    hex::encode(h.finalize())
}

/// C-style `%.17g`.
pub fn format_g17(v: f64) -> String {
    if !v.is_finite() {
        return if v.is_nan() { "nan".into() } else if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{v:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let digits = (16 - exp).max(0) as usize;
        trim_fraction(&format!("{v:.digits$}")).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

struct G17;

impl serde_json::ser::Formatter for G17 {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_g17(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Sorted keys, `%.17g` floats, non-finite numbers as `null`.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // `Value` maps are ordered by key.
    let v = serde_json::to_value(value)?;
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, G17);
    v.serialize(&mut ser)?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Format(e.to_string()))
}

fn nan_f64<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

fn nan_map<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<String, f64>, D::Error> {
    let m = BTreeMap::<String, Option<f64>>::deserialize(d)?;
    Ok(m.into_iter().map(|(k, v)| (k, v.unwrap_or(f64::NAN))).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn g17_matches_c() {
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-2.5), "-2.5");
        assert_eq!(format_g17(1e-8), "1e-08");
        assert_eq!(format_g17(1.5e-8), "1.4999999999999999e-08");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(123456.0), "123456");
        assert_eq!(format_g17(1e16), "10000000000000000");
        assert_eq!(format_g17(1e17), "1e+17");
        assert_eq!(format_g17(0.0001), "0.0001");
        assert_eq!(format_g17(f64::MIN_POSITIVE), "2.2250738585072014e-308");
    }

    fn random_report(rng: &mut ChaCha8Rng) -> ExperimentReport {
        let mut cfg = ExperimentConfig::new("boundedness_sweep", vec![256, 512], rng.random_range(1..5));
        cfg.root_seed = rng.random();
        cfg.tolerances.insert("drift".into(), rng.random_range(1.0..3.0));
        let mut r = ExperimentReport::empty(cfg);
        let cases = rng.random_range(0..6);
        for i in 0..cases {
            let mut values = BTreeMap::new();
            for k in 0..rng.random_range(0..4) {
                let v: f64 = rng.random::<f64>() * 10f64.powi(rng.random_range(-300..300));
                values.insert(format!("v{k}"), if rng.random() { v } else { -v });
            }
            r.cases.push(CaseRecord {
                case_id: format!("c{i}"),
                resolution: 256,
                sample: i,
                label: "x,\"y\"".into(),
                inputs_digest: digest_values(&[&[rng.random()]]),
                values,
                pass: rng.random(),
            });
        }
        r.summary.max_residual = rng.random();
        r.summary.fitted.insert("a".into(), rng.random());
        r.summary.checks.push(Check::new("a", rng.random(), "<", 0.5));
        r.wall_time_s = rng.random();
        r
    }

    #[test]
    fn json_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let r = random_report(&mut rng);
            let text = r.to_json().unwrap();
            let back = ExperimentReport::from_json(&text).unwrap();
            assert_eq!(back, r);
            assert_eq!(back.to_json().unwrap(), text);
        }
    }

    #[test]
    fn empty_report_is_valid_json() {
        let r = ExperimentReport::empty(ExperimentConfig::new("molecule", vec![256], 1));
        let text = r.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["cases"], serde_json::json!([]));
        assert!(v["summary"]["max_residual"].is_null());
        let back = ExperimentReport::from_json(&text).unwrap();
        assert!(back.summary.max_residual.is_nan());
        assert!(!back.summary.pass);
    }

    #[test]
    fn keys_are_sorted() {
        let r = random_report(&mut ChaCha8Rng::seed_from_u64(2));
        let text = r.to_json().unwrap();
        let pos = |k: &str| text.find(&format!("\"{k}\"")).unwrap();
        assert!(pos("cases") < pos("config"));
        assert!(pos("config") < pos("schema_version"));
        assert!(pos("schema_version") < pos("wall_time_s"));
    }

    #[test]
    fn csv_layout() {
        let r = random_report(&mut ChaCha8Rng::seed_from_u64(5));
        let text = r.to_csv().unwrap();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = rd.headers().unwrap().iter().map(String::from).collect();
        assert_eq!(&header[..CSV_FIXED_COLUMNS.len()], CSV_FIXED_COLUMNS);
        assert_eq!(header[CSV_FIXED_COLUMNS.len()..], r.value_columns()[..]);
        assert_eq!(rd.records().count(), r.cases.len());
    }

    #[test]
    fn unwritable_path_is_io_error() {
        let r = ExperimentReport::empty(ExperimentConfig::new("molecule", vec![256], 1));
        let err = emit_report(&r, ReportFormat::Json, "/nonexistent-dir/x/report.json").unwrap_err();
        assert!(matches!(err, Error::Io(_)));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("r.json");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
