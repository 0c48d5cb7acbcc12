use super::model::DriverModel;
use super::sample::StepSample;
use crate::error::{Error, Result};
use crate::scheme::IntegralExpr;
use crate::word::Word;

#[derive(Clone, Debug, PartialEq)]
enum Factor {
    L1(usize),
    L2(usize, usize),
    Long(Word),
}

/// An [`IntegralExpr`] with factors resolved to sample slots.
#[derive(Clone, Debug, PartialEq)]
pub struct CompiledExpr {
    terms: Vec<(f64, Vec<Factor>)>,
}

impl CompiledExpr {
    pub fn compile(expr: &IntegralExpr, model: &DriverModel) -> Result<Self> {
        let mut terms = Vec::with_capacity(expr.len());
        for (factors, c) in expr.terms() {
            let mut fs = Vec::with_capacity(factors.len());
            for w in factors {
                model.check_supported([w])?;
                let slot = |i: usize| model.slot(w.letters()[i]).expect("checked");
                fs.push(match w.len() {
                    1 => Factor::L1(slot(0)),
                    2 => Factor::L2(slot(0), slot(1)),
                    _ => Factor::Long(w.clone()),
                });
            }
            terms.push((crate::to_f64(c), fs));
        }
        Ok(Self { terms })
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, s: &StepSample) -> Result<f64> {
        let mut acc = 0.0;
        for (c, fs) in &self.terms {
            let mut t = *c;
            for f in fs {
                t *= match f {
                    Factor::L1(a) => s.level1(*a),
                    Factor::L2(a, b) => s.level2(*a, *b),
                    Factor::Long(w) => s.get(w).map_err(|_| Error::MissingIntegral(w.to_string()))?,
                };
            }
            acc += t;
        }
        Ok(acc)
    }
}
