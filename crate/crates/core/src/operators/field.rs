use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use super::jet::Jet;
use crate::error::{Error, Result};

/// A smooth vector field evaluated on jets.
///
/// Implementations must be built from jet arithmetic so that derivatives of
/// any order come out exact up to rounding.
pub trait SmoothField: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[Jet]) -> Vec<Jet>;
}

#[derive(Clone, Debug)]
pub enum Field {
    /// `y -> A y`, `A` row-major.
    Linear(Vec<Vec<f64>>),
    Smooth(Arc<dyn SmoothField>),
}

impl Field {
    pub fn linear(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Config("linear field needs a nonempty square matrix".into()));
        }
        Ok(Field::Linear(rows))
    }

    pub fn zero(dim: usize) -> Self {
        Field::Linear(vec![vec![0.0; dim]; dim])
    }

    pub fn dim(&self) -> usize {
        match self {
            Field::Linear(a) => a.len(),
            Field::Smooth(f) => f.dim(),
        }
    }

    pub fn matrix(&self) -> Option<&[Vec<f64>]> {
        match self {
            Field::Linear(a) => Some(a),
            Field::Smooth(_) => None,
        }
    }

    pub fn eval_jet(&self, x: &[Jet]) -> Vec<Jet> {
        match self {
            Field::Linear(a) => a
                .iter()
                .map(|row| {
                    let mut acc = Jet::constant(0.0);
                    for (c, xi) in row.iter().zip(x) {
                        if *c != 0.0 {
                            acc.add_scaled(*c, xi);
                        }
                    }
                    acc
                })
                .collect(),
            Field::Smooth(f) => f.eval(x),
        }
    }

    pub fn eval(&self, y: &[f64]) -> Vec<f64> {
        match self {
            Field::Linear(a) => matvec(a, y),
            Field::Smooth(f) => {
                let x: Vec<Jet> = y.iter().map(|&v| Jet::constant(v)).collect();
                f.eval(&x).iter().map(Jet::value).collect()
            }
        }
    }
}

pub(crate) fn matvec(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    a.iter().map(|row| row.iter().zip(y).map(|(c, v)| c * v).sum()).collect()
}

/// `(sin x1, cos x2, x4, -sin x3)`.
#[derive(Debug)]
pub struct TrigV2;

impl SmoothField for TrigV2 {
    fn dim(&self) -> usize {
        4
    }

    fn eval(&self, x: &[Jet]) -> Vec<Jet> {
        vec![x[0].sin(), x[1].cos(), x[3].clone(), -&x[2].sin()]
    }
}

/// A state-independent field.
#[derive(Debug)]
pub struct ConstantField(pub Vec<f64>);

impl SmoothField for ConstantField {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn eval(&self, _: &[Jet]) -> Vec<Jet> {
        self.0.iter().map(|&v| Jet::constant(v)).collect()
    }
}

type Builder = Arc<dyn Fn(&Value) -> Result<Field> + Send + Sync>;

/// Named field constructors used by config files.
///
/// Entries take the JSON object describing the field, e.g.
/// `{"kind": "linear", "matrix": [[..], ..]}`. Built in: `linear`, `zero`
/// (`dim`), `constant` (`vector`), `trig-v2`, and `random-linear` (`dim`,
/// `seed`, `scale`: entries uniform in `[-scale, scale]`). Register additional kinds
/// with [`FieldRegistry::register`].
#[derive(Clone)]
pub struct FieldRegistry {
    builders: BTreeMap<String, Builder>,
}

impl Default for FieldRegistry {
    fn default() -> Self {
        let mut r = Self { builders: BTreeMap::new() };
        r.register("linear", |v| {
            let m: Vec<Vec<f64>> = serde_json::from_value(v.get("matrix").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Config(format!("linear field: {e}")))?;
            Field::linear(m)
        });
        r.register("zero", |v| {
            let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::Config("zero field needs dim".into()))?;
            Ok(Field::zero(dim as usize))
        });
        r.register("constant", |v| {
            let c: Vec<f64> = serde_json::from_value(v.get("vector").cloned().unwrap_or(Value::Null))
                .map_err(|e| Error::Config(format!("constant field: {e}")))?;
            Ok(Field::Smooth(Arc::new(ConstantField(c))))
        });
        r.register("trig-v2", |_| Ok(Field::Smooth(Arc::new(TrigV2))));
        r.register("random-linear", |v| {
            let dim = v.get("dim").and_then(Value::as_u64).ok_or_else(|| Error::Config("random-linear needs dim".into()))? as usize;
            let seed = v.get("seed").and_then(Value::as_u64).unwrap_or(0);
            let scale = v.get("scale").and_then(Value::as_f64).unwrap_or(1.0);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Field::linear((0..dim).map(|_| (0..dim).map(|_| scale * rng.random_range(-1.0..=1.0)).collect()).collect())
        });
        r
    }
}

impl FieldRegistry {
    pub fn register(&mut self, kind: &str, f: impl Fn(&Value) -> Result<Field> + Send + Sync + 'static) {
        self.builders.insert(kind.to_string(), Arc::new(f));
    }

    pub fn kinds(&self) -> impl Iterator<Item = &str> {
        self.builders.keys().map(String::as_str)
    }

    pub fn build(&self, spec: &Value) -> Result<Field> {
        let kind = spec.get("kind").and_then(Value::as_str).ok_or_else(|| Error::Config("field spec needs a kind".into()))?;
        let b = self.builders.get(kind).ok_or_else(|| Error::Config(format!("unknown field kind {kind}")))?;
        b(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn registry_builds_builtins() {
        let r = FieldRegistry::default();
        let f = r.build(&json!({"kind": "linear", "matrix": [[1.0, 2.0], [3.0, 4.0]]})).unwrap();
        assert_eq!(f.eval(&[1.0, 1.0]), vec![3.0, 7.0]);
        let v = r.build(&json!({"kind": "trig-v2"})).unwrap();
        let y = [0.1, 0.2, 0.3, 0.4];
        assert_eq!(v.eval(&y), vec![0.1f64.sin(), 0.2f64.cos(), 0.4, -(0.3f64.sin())]);
        assert!(r.build(&json!({"kind": "nope"})).is_err());
        assert!(r.build(&json!({"kind": "linear", "matrix": [[1.0, 2.0]]})).is_err());
    }
}
