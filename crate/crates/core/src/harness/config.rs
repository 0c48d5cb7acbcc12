use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::operators::{Field, FieldRegistry, VectorFieldSet};
use crate::scheme::SchemeKind;
use crate::word::{Alphabet, Grading, JumpLaw};
use crate::Q;

pub const SCHEMA_VERSION: u32 = 1;

/// A scheme name such as `taylor-ms 2`, `asri 2` or `masri 2`; `euler`
/// and `milstein` stand for `taylor-ms 1` and `taylor-ms 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    pub grading: Grading,
    pub order: usize,
}

impl SchemeSpec {
    pub fn label(&self) -> String {
        match (self.kind, self.grading) {
            (SchemeKind::Taylor, Grading::WordLength) => format!("taylor-wl {}", self.order),
            (SchemeKind::Taylor, Grading::MeanSquare) => format!("taylor-ms {}", self.order),
            (k, _) => format!("{k} {}", self.order),
        }
    }

    /// Alphabet grade needed to generate the table.
    pub fn grade_needed(&self) -> usize {
        match self.kind {
            SchemeKind::Taylor => self.order,
            _ => self.order + 1,
        }
    }
}

impl FromStr for SchemeSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "euler" => return "taylor-ms 1".parse(),
            "milstein" => return "taylor-ms 2".parse(),
            _ => {}
        }
        let (name, order) = s.split_once(' ').ok_or_else(|| Error::Parse(format!("scheme {s:?} needs an order")))?;
        let order: usize = order.trim().parse().map_err(|_| Error::Parse(format!("bad scheme order in {s:?}")))?;
        let (kind, grading) = match name {
            "taylor-ms" => (SchemeKind::Taylor, Grading::MeanSquare),
            "taylor-wl" => (SchemeKind::Taylor, Grading::WordLength),
            "asri" => (SchemeKind::Asri, Grading::WordLength),
            "masri" => (SchemeKind::Masri, Grading::WordLength),
            _ => return Err(Error::Parse(format!("unknown scheme {name:?}"))),
        };
        if order == 0 {
            return Err(Error::Parse("scheme order must be positive".into()));
        }
        Ok(Self { kind, grading, order })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FieldsConfig {
    pub drift: Value,
    #[serde(default)]
    pub wiener: Vec<Value>,
    #[serde(default)]
    pub jumps: Vec<Value>,
}

/// Jump law: intensity and `(size, weight)` pairs (unit jumps if empty).
/// Numbers may be given as JSON numbers or as strings like `"3/4"`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct JumpConfig {
    pub intensity: Value,
    #[serde(default)]
    pub sizes: Vec<(Value, Value)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FourierConfig {
    /// Fourier terms used for the finest-resolution samples.
    #[serde(default = "default_fine_terms")]
    pub fine_terms: usize,
    /// `p` at `coarse_step` for timing runs; scaled like `1/h`.
    pub coarse_terms: usize,
    pub coarse_step: f64,
    /// `M = grid_factor (p + 1)`.
    #[serde(default = "default_grid_factor")]
    pub grid_factor: usize,
}

fn default_fine_terms() -> usize {
    2
}

fn default_grid_factor() -> usize {
    5
}

impl FourierConfig {
    pub fn terms_at(&self, h: f64) -> usize {
        ((self.coarse_terms as f64 * self.coarse_step / h).round() as usize).max(1)
    }

    pub fn grid_for(&self, p: usize) -> usize {
        self.grid_factor * (p + 1)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TimingConfig {
    /// Paths timed per scheme and step size; 0 disables timing.
    pub paths: usize,
    #[serde(default = "default_repeats")]
    pub repeats: usize,
}

fn default_repeats() -> usize {
    3
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".into(), "svg".into(), "gnuplot".into()]
}

/// A convergence experiment.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub name: String,
    pub fields: FieldsConfig,
    #[serde(default)]
    pub jumps: Vec<JumpConfig>,
    pub y0: Vec<f64>,
    pub horizon: f64,
    pub steps: Vec<f64>,
    pub paths: usize,
    pub schemes: Vec<String>,
    #[serde(default = "default_reference")]
    pub reference: String,
    #[serde(default = "default_fine_ratio")]
    pub fine_ratio: usize,
    pub fourier: FourierConfig,
    #[serde(default)]
    pub timing: Option<TimingConfig>,
    pub seed: u64,
    /// Also run the reference at twice the fine step and report the shift.
    #[serde(default)]
    pub refinement_check: bool,
    #[serde(default)]
    pub max_budget: Option<usize>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
}

fn default_reference() -> String {
    "taylor-ms 2".into()
}

fn default_fine_ratio() -> usize {
    32
}

pub(crate) fn rational(v: &Value) -> Result<Q> {
    let s = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        _ => return Err(Error::Config(format!("expected a number, got {v}"))),
    };
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        if frac.contains(['e', 'E']) || int.contains(['e', 'E']) {
            return Err(Error::Config(format!("exponent notation is not supported: {s}")));
        }
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let num: Q = digits.parse().map_err(|_| Error::Config(format!("bad number {s}")))?;
        let den = Q::from_integer(num_bigint::BigInt::from(10u32).pow(frac.len() as u32));
        let x = num / den;
        return Ok(if neg { -x } else { x });
    }
    s.parse::<Q>().map_err(|_| Error::Config(format!("bad number {s}")))
}

/// The parts of a config needed to run schemes.
#[derive(Clone, Debug)]
pub struct Setup {
    pub alphabet: Arc<Alphabet>,
    pub fields: Arc<VectorFieldSet>,
    pub schemes: Vec<SchemeSpec>,
    pub reference: SchemeSpec,
    pub fine_step: f64,
    /// Fine steps per coarse step, per entry of `steps`.
    pub ratios: Vec<usize>,
    pub fine_steps: usize,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text)?;
        match v.get("schema_version").and_then(Value::as_u64) {
            Some(x) if x == SCHEMA_VERSION as u64 => {}
            Some(x) => return Err(Error::Config(format!("unsupported schema_version {x}"))),
            None => return Err(Error::Config("missing schema_version".into())),
        }
        Ok(serde_json::from_value(v)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn preset(name: &str) -> Result<Self> {
        let text = match name {
            "trig4" => include_str!("../../presets/trig4.json"),
            "trig4-linear" => include_str!("../../presets/trig4-linear.json"),
            "trig4-smoke" => include_str!("../../presets/trig4-smoke.json"),
            "desk" => include_str!("../../presets/desk.json"),
            _ => return Err(Error::Config(format!("unknown preset {name:?} (trig4, trig4-linear, trig4-smoke, desk)"))),
        };
        Self::from_json(text)
    }

    pub fn jump_laws(&self) -> Result<Vec<JumpLaw>> {
        self.jumps
            .iter()
            .map(|j| {
                let lambda = rational(&j.intensity)?;
                if j.sizes.is_empty() {
                    JumpLaw::unit(lambda)
                } else {
                    let sizes = j.sizes.iter().map(|(s, w)| Ok((rational(s)?, rational(w)?))).collect::<Result<Vec<_>>>()?;
                    JumpLaw::new(lambda, sizes)
                }
            })
            .collect()
    }

    pub fn setup(&self) -> Result<Setup> {
        self.setup_with(&FieldRegistry::default())
    }

    pub fn setup_with(&self, registry: &FieldRegistry) -> Result<Setup> {
        let schemes = self.schemes.iter().map(|s| s.parse()).collect::<Result<Vec<SchemeSpec>>>()?;
        let reference: SchemeSpec = self.reference.parse()?;
        if schemes.is_empty() {
            return Err(Error::Config("no schemes".into()));
        }
        let grade = schemes.iter().chain([&reference]).map(SchemeSpec::grade_needed).max().unwrap();
        if self.fields.jumps.len() != self.jumps.len() {
            return Err(Error::Config(format!("{} jump fields but {} jump laws", self.fields.jumps.len(), self.jumps.len())));
        }
        let alphabet = Arc::new(Alphabet::new(self.fields.wiener.len() as u32, self.jump_laws()?, grade)?);
        let drift = registry.build(&self.fields.drift)?;
        let wiener = self.fields.wiener.iter().map(|v| registry.build(v)).collect::<Result<Vec<Field>>>()?;
        let jumps = self.fields.jumps.iter().map(|v| registry.build(v)).collect::<Result<Vec<Field>>>()?;
        let mut fields = VectorFieldSet::new(&alphabet, drift, wiener, jumps)?;
        if let Some(b) = self.max_budget {
            fields = fields.with_budget(b);
        }
        if self.y0.len() != fields.dim() {
            return Err(Error::Config(format!("y0 has {} entries, fields have dimension {}", self.y0.len(), fields.dim())));
        }
        if self.paths == 0 {
            return Err(Error::Config("paths must be positive".into()));
        }
        if !(self.horizon > 0.0) || self.steps.is_empty() || self.steps.iter().any(|h| !(*h > 0.0)) {
            return Err(Error::Config("horizon and steps must be positive".into()));
        }
        if self.fine_ratio == 0 {
            return Err(Error::Config("fine_ratio must be positive".into()));
        }
        let hmin = self.steps.iter().copied().fold(f64::INFINITY, f64::min);
        let fine_step = hmin / self.fine_ratio as f64;
        let ratio = |big: f64, small: f64, what: &str| -> Result<usize> {
            let r = big / small;
            let k = r.round();
            if k < 1.0 || (r - k).abs() > 1e-9 * r {
                return Err(Error::Config(format!("{what}: {big} is not an integer multiple of {small}")));
            }
            Ok(k as usize)
        };
        let ratios = self.steps.iter().map(|&h| ratio(h, fine_step, "step ladder")).collect::<Result<Vec<_>>>()?;
        for &h in &self.steps {
            ratio(self.horizon, h, "horizon")?;
        }
        let fine_steps = ratio(self.horizon, fine_step, "horizon")?;
        Ok(Setup { alphabet, fields: Arc::new(fields), schemes, reference, fine_step, ratios, fine_steps })
    }
}
