use super::field::{matvec, Field};
use super::jet::Jet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::word::{Alphabet, Letter, Word};
use crate::{to_f64, Q};

/// Default cap on the number of infinitesimals used by one evaluation.
pub const DEFAULT_BUDGET: usize = 6;

#[derive(Clone, Debug)]
struct JumpField {
    field: Field,
    intensity: f64,
    /// `(size, probability)`.
    sizes: Vec<(f64, f64)>,
    /// `weights[q - 1][k]`: coefficient of the shift by size `k` in the
    /// operator of letter `Jump(., q)`.
    weights: Vec<Vec<f64>>,
}

/// Drift, diffusion and jump fields over a fixed alphabet.
#[derive(Clone, Debug)]
pub struct VectorFieldSet {
    dim: usize,
    drift: Field,
    wiener: Vec<Field>,
    jumps: Vec<JumpField>,
    budget: usize,
}

impl VectorFieldSet {
    pub fn new(alphabet: &Alphabet, drift: Field, wiener: Vec<Field>, jumps: Vec<Field>) -> Result<Self> {
        let dim = drift.dim();
        if wiener.len() != alphabet.wiener_count() as usize || jumps.len() != alphabet.jump_count() as usize {
            return Err(Error::Config(format!(
                "field counts ({} wiener, {} jump) do not match the alphabet ({}, {})",
                wiener.len(),
                jumps.len(),
                alphabet.wiener_count(),
                alphabet.jump_count()
            )));
        }
        if wiener.iter().chain(&jumps).any(|f| f.dim() != dim) {
            return Err(Error::Config("fields have different dimensions".into()));
        }
        let mut jf = Vec::new();
        for (j, field) in jumps.into_iter().enumerate() {
            let law = alphabet.jump_law(j as u32 + 1).expect("counted");
            let sizes: Vec<&Q> = law.sizes().iter().map(|(v, _)| v).collect();
            let r = sizes.len();
            // J^(q) = sum_k v_k^q N~_k, so N~_k = sum_q inv[k][q] J^(q).
            let p: Vec<Vec<Q>> = (1..=r as u32).map(|q| sizes.iter().map(|v| num_traits::pow((*v).clone(), q as usize)).collect()).collect();
            let inv = linalg::inverse(&p).ok_or_else(|| Error::Domain("jump sizes are not distinct".into()))?;
            let weights = (0..r).map(|q| (0..r).map(|k| to_f64(&inv[k][q])).collect()).collect();
            jf.push(JumpField {
                field,
                intensity: to_f64(law.intensity()),
                sizes: law.sizes().iter().map(|(v, w)| (to_f64(v), to_f64(w))).collect(),
                weights,
            });
        }
        Ok(Self { dim, drift, wiener, jumps: jf, budget: DEFAULT_BUDGET })
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_linear(&self) -> bool {
        self.drift.matrix().is_some()
            && self.wiener.iter().all(|f| f.matrix().is_some())
            && self.jumps.iter().all(|j| j.field.matrix().is_some())
    }

    pub fn drift(&self) -> &Field {
        &self.drift
    }

    pub fn wiener(&self, i: u32) -> &Field {
        &self.wiener[i as usize - 1]
    }

    pub fn jump(&self, j: u32) -> &Field {
        &self.jumps[j as usize - 1].field
    }

    fn check_letter(&self, a: Letter) -> Result<()> {
        let ok = match a {
            Letter::Time => true,
            Letter::Wiener(i) => i >= 1 && i as usize <= self.wiener.len(),
            Letter::Jump { index, power } => {
                index >= 1 && (index as usize) <= self.jumps.len() && (power as usize) <= self.jumps[index as usize - 1].weights.len()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("letter {a} has no vector field")))
        }
    }

    /// Infinitesimals needed to evaluate `w` on smooth fields.
    pub fn derivative_budget(&self, w: &Word) -> usize {
        w.letters()
            .iter()
            .map(|a| match a {
                Letter::Time if !self.wiener.is_empty() => 2,
                Letter::Time | Letter::Wiener(_) => 1,
                Letter::Jump { .. } => 0,
            })
            .sum()
    }

    /// The matrix of a letter when every field is linear:
    /// `Jump(j, 1)` acts by `A_j` and higher power brackets vanish.
    fn letter_matrix(&self, a: Letter) -> Option<&[Vec<f64>]> {
        match a {
            Letter::Time => self.drift.matrix(),
            Letter::Wiener(i) => self.wiener[i as usize - 1].matrix(),
            Letter::Jump { index, power: 1 } => self.jumps[index as usize - 1].field.matrix(),
            Letter::Jump { .. } => None,
        }
    }

    /// Whether every letter of `w` has a linear field. Then `V~_w(id)` is
    /// linear: the second-order and compensator parts of `V~_0` and the
    /// higher Taylor terms of shifts all vanish on linear functions.
    pub fn word_is_linear(&self, w: &Word) -> bool {
        w.letters().iter().all(|&a| match a {
            Letter::Time => self.drift.matrix().is_some(),
            Letter::Wiener(i) => self.wiener[i as usize - 1].matrix().is_some(),
            Letter::Jump { index, .. } => self.jumps[index as usize - 1].field.matrix().is_some(),
        })
    }

    /// The matrix of `V~_w(id)` when [`Self::word_is_linear`] holds.
    pub fn word_matrix(&self, w: &Word) -> Result<Option<Vec<Vec<f64>>>> {
        for &a in w.letters() {
            self.check_letter(a)?;
        }
        if !self.word_is_linear(w) {
            return Ok(None);
        }
        let mut m: Vec<Vec<f64>> = (0..self.dim).map(|i| (0..self.dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        for &a in w.letters() {
            let Some(b) = self.letter_matrix(a) else {
                return Ok(Some(vec![vec![0.0; self.dim]; self.dim]));
            };
            m = b.iter().map(|row| (0..self.dim).map(|j| row.iter().zip(&m).map(|(x, r)| x * r[j]).sum()).collect()).collect();
        }
        Ok(Some(m))
    }

    /// `V~_w(id)(y)`.
    pub fn apply_word(&self, w: &Word, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.dim {
            return Err(Error::Domain(format!("state has dimension {}, fields {}", y.len(), self.dim)));
        }
        for &a in w.letters() {
            self.check_letter(a)?;
        }
        if self.word_is_linear(w) {
            let mut v = y.to_vec();
            for &a in w.letters() {
                match self.letter_matrix(a) {
                    Some(m) => v = matvec(m, &v),
                    None => return Ok(vec![0.0; self.dim]),
                }
            }
            return Ok(v);
        }
        let needed = self.derivative_budget(w);
        if needed > self.budget {
            return Err(Error::Budget { word: w.to_string(), needed, limit: self.budget });
        }
        let x: Vec<Jet> = y.iter().map(|&v| Jet::constant(v)).collect();
        Ok(self.eval(w.letters(), &x, 0).iter().map(Jet::value).collect())
    }

    /// `V~_{j^(m)} V~_w(id)(y)`: the `m`-th Taylor coefficient of the shift
    /// along the jump field `j` applied to `V~_w(id)`.
    pub fn apply_power(&self, j: u32, m: usize, w: &Word, y: &[f64]) -> Result<Vec<f64>> {
        if j == 0 || j as usize > self.jumps.len() || m == 0 {
            return Err(Error::Domain(format!("no power operator {j}^({m})")));
        }
        for &a in w.letters() {
            self.check_letter(a)?;
        }
        let needed = self.derivative_budget(w) + m;
        if needed > self.budget {
            return Err(Error::Budget { word: format!("{j}^({m}) {w}"), needed, limit: self.budget });
        }
        let x: Vec<Jet> = y.iter().map(|&v| Jet::constant(v)).collect();
        let u = self.jumps[j as usize - 1].field.eval_jet(&x);
        let xs: Vec<Jet> = x
            .iter()
            .zip(&u)
            .map(|(xi, ui)| (0..m).fold(xi.clone(), |acc, k| acc.add_infinitesimal(k, ui)))
            .collect();
        let g = self.eval(w.letters(), &xs, m);
        let fact: f64 = (1..=m).map(|k| k as f64).product();
        Ok(g.iter().map(|c| (0..m).fold(c.clone(), |acc, k| acc.extract(k)).value() / fact).collect())
    }

    fn eval(&self, ops: &[Letter], x: &[Jet], next: usize) -> Vec<Jet> {
        let Some((&a, rest)) = ops.split_first() else {
            return x.to_vec();
        };
        match a {
            Letter::Wiener(i) => self.directional(&self.wiener[i as usize - 1], rest, x, next),
            Letter::Jump { index, power } => {
                let jf = &self.jumps[index as usize - 1];
                let base = self.eval(rest, x, next);
                let u = jf.field.eval_jet(x);
                let mut out = zeros(self.dim);
                for (k, &(v, _)) in jf.sizes.iter().enumerate() {
                    let c = jf.weights[power as usize - 1][k];
                    if c == 0.0 {
                        continue;
                    }
                    let shifted = self.eval(rest, &shift(x, &u, v), next);
                    axpy(&mut out, c, &sub(&shifted, &base));
                }
                out
            }
            Letter::Time => {
                // One directional derivative along the drift minus the jump
                // compensators; its value part is `g(x)`.
                let mut u = self.drift.eval_jet(x);
                for jf in &self.jumps {
                    let mean: f64 = jf.sizes.iter().map(|&(v, p)| p * v).sum();
                    axpy(&mut u, -jf.intensity * mean, &jf.field.eval_jet(x));
                }
                let xs: Vec<Jet> = x.iter().zip(&u).map(|(xi, ui)| xi.add_infinitesimal(next, ui)).collect();
                let g = self.eval(rest, &xs, next + 1);
                let mut out: Vec<Jet> = g.iter().map(|c| c.extract(next)).collect();
                let base: Vec<Jet> = g.iter().map(|c| c.drop_var(next)).collect();
                for f in &self.wiener {
                    let u = f.eval_jet(x);
                    let xs: Vec<Jet> =
                        x.iter().zip(&u).map(|(xi, ui)| xi.add_infinitesimal(next, ui).add_infinitesimal(next + 1, ui)).collect();
                    let g = self.eval(rest, &xs, next + 2);
                    let d2: Vec<Jet> = g.iter().map(|c| c.extract(next).extract(next + 1)).collect();
                    axpy(&mut out, 0.5, &d2);
                }
                for jf in &self.jumps {
                    let u = jf.field.eval_jet(x);
                    for &(v, p) in &jf.sizes {
                        let shifted = self.eval(rest, &shift(x, &u, v), next);
                        axpy(&mut out, jf.intensity * p, &sub(&shifted, &base));
                    }
                }
                out
            }
        }
    }

    fn directional(&self, field: &Field, rest: &[Letter], x: &[Jet], next: usize) -> Vec<Jet> {
        let u = field.eval_jet(x);
        let xs: Vec<Jet> = x.iter().zip(&u).map(|(xi, ui)| xi.add_infinitesimal(next, ui)).collect();
        self.eval(rest, &xs, next + 1).iter().map(|c| c.extract(next)).collect()
    }
}

fn zeros(n: usize) -> Vec<Jet> {
    vec![Jet::constant(0.0); n]
}

fn shift(x: &[Jet], u: &[Jet], v: f64) -> Vec<Jet> {
    x.iter().zip(u).map(|(a, b)| a + &b.scale(v)).collect()
}

fn sub(a: &[Jet], b: &[Jet]) -> Vec<Jet> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn axpy(out: &mut [Jet], c: f64, x: &[Jet]) {
    for (o, xi) in out.iter_mut().zip(x) {
        o.add_scaled(c, xi);
    }
}
