use std::sync::Arc;

use crate::drivers::{CompiledExpr, DriverModel, StepSample};
use crate::error::Result;
use crate::operators::VectorFieldSet;
use crate::scheme::SchemeTable;
use crate::word::Word;

struct Row {
    word: Word,
    expr: CompiledExpr,
    /// Matrix of `V~_w(id)` when the word only touches linear fields.
    matrix: Option<Vec<Vec<f64>>>,
}

/// A scheme table bound to a driver layout and a set of vector fields.
pub struct CompiledScheme {
    label: String,
    rows: Vec<Row>,
    fields: Arc<VectorFieldSet>,
}

impl CompiledScheme {
    pub fn new(table: &SchemeTable, model: &DriverModel, fields: &Arc<VectorFieldSet>) -> Result<Self> {
        let mut rows = Vec::new();
        for (w, e) in &table.rows {
            if e.is_zero() {
                continue;
            }
            rows.push(Row { word: w.clone(), expr: CompiledExpr::compile(e, model)?, matrix: fields.word_matrix(w)? });
        }
        Ok(Self { label: table.label(), rows, fields: fields.clone() })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// `y' = Σ_rows expr(sample) V~_w(id)(y)`.
    pub fn step(&self, sample: &StepSample, y: &[f64]) -> Result<Vec<f64>> {
        let n = y.len();
        let mut out = vec![0.0; n];
        for row in &self.rows {
            let c = row.expr.eval(sample)?;
            if c == 0.0 {
                continue;
            }
            match &row.matrix {
                Some(m) => {
                    for (o, r) in out.iter_mut().zip(m) {
                        *o += c * r.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
                    }
                }
                None => {
                    let v = self.fields.apply_word(&row.word, y)?;
                    for (o, x) in out.iter_mut().zip(v) {
                        *o += c * x;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One step of `table` from `y` on `sample`.
pub fn run_step(table: &SchemeTable, sample: &StepSample, y: &[f64], fields: &Arc<VectorFieldSet>) -> Result<Vec<f64>> {
    CompiledScheme::new(table, sample.model(), fields)?.step(sample, y)
}
