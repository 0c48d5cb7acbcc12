use std::sync::Arc;

use super::model::DriverModel;
use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// Iterated integrals of every word of length at most two over one step,
/// with the Wiener increments and jump events that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSample {
    model: Arc<DriverModel>,
    pub t0: f64,
    pub h: f64,
    /// `ΔW_i` per Wiener process.
    pub wiener: Vec<f64>,
    /// Per jump process: `(offset in (0, h], size)` sorted by offset.
    pub events: Vec<Vec<(f64, f64)>>,
    pub(crate) level1: Vec<f64>,
    pub(crate) level2: Vec<f64>,
}

impl StepSample {
    pub(crate) fn from_parts(
        model: Arc<DriverModel>,
        t0: f64,
        h: f64,
        wiener: Vec<f64>,
        events: Vec<Vec<(f64, f64)>>,
        level1: Vec<f64>,
        level2: Vec<f64>,
    ) -> Self {
        Self { model, t0, h, wiener, events, level1, level2 }
    }

    /// Zero-width step: the unit for [`chen_aggregate`].
    pub fn identity(model: &Arc<DriverModel>, t0: f64) -> Self {
        let l = model.letter_count();
        Self {
            model: model.clone(),
            t0,
            h: 0.0,
            wiener: vec![0.0; model.wiener_count()],
            events: vec![Vec::new(); model.jumps().len()],
            level1: vec![0.0; l],
            level2: vec![0.0; l * l],
        }
    }

    pub fn model(&self) -> &Arc<DriverModel> {
        &self.model
    }

    /// `I_a` by dense slot.
    pub fn level1(&self, slot: usize) -> f64 {
        self.level1[slot]
    }

    /// `I_{ab}` by dense slots.
    pub fn level2(&self, a: usize, b: usize) -> f64 {
        self.level2[a * self.model.letter_count() + b]
    }

    pub fn level1_all(&self) -> &[f64] {
        &self.level1
    }

    pub fn level2_all(&self) -> &[f64] {
        &self.level2
    }

    /// `I_w` for any supported word (see [`DriverModel::supports`]).
    pub fn get(&self, w: &Word) -> Result<f64> {
        let slot = |a: Letter| self.model.slot(a).ok_or_else(|| Error::UnsupportedWord(w.to_string()));
        match w.letters() {
            [] => Ok(1.0),
            [a] => Ok(self.level1[slot(*a)?]),
            [a, b] => Ok(self.level2(slot(*a)?, slot(*b)?)),
            letters => {
                if !self.model.supports(w) {
                    return Err(Error::UnsupportedWord(w.to_string()));
                }
                if letters.iter().all(|a| !matches!(a, Letter::Wiener(_))) {
                    Ok(self.time_jump_integral(letters))
                } else {
                    Ok(hermite_power(self.level1[slot(letters[0])?], self.h, letters.len()))
                }
            }
        }
    }

    /// Exact integral of a word over Time and jump letters: every prefix
    /// integral is a polynomial in time between jumps.
    fn time_jump_integral(&self, letters: &[Letter]) -> f64 {
        let m = letters.len();
        let mut all: Vec<(f64, usize, f64)> = self
            .events
            .iter()
            .enumerate()
            .flat_map(|(p, ev)| ev.iter().map(move |&(t, v)| (t, p, v)))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        // polys[k]: coefficients in absolute offset s of I_{a1..ak}(s).
        let mut polys: Vec<Vec<f64>> = (0..=m).map(|k| if k == 0 { vec![1.0] } else { vec![0.0] }).collect();
        let rate = |a: Letter| -> f64 {
            match a {
                Letter::Time => 1.0,
                Letter::Jump { index, power } => -self.model.jumps()[index as usize - 1].compensator(power),
                Letter::Wiener(_) => unreachable!("checked by caller"),
            }
        };
        // Restarts every level at `from` with the current segment's dynamics.
        let advance = |polys: &mut Vec<Vec<f64>>, from: f64| {
            let mut next: Vec<Vec<f64>> = vec![vec![1.0]];
            for k in 1..=m {
                let c = rate(letters[k - 1]);
                let anti = antiderivative(&next[k - 1]);
                let shift = eval_poly(&polys[k], from) - c * eval_poly(&anti, from);
                let mut p: Vec<f64> = anti.iter().map(|x| c * x).collect();
                p[0] += shift;
                next.push(p);
            }
            *polys = next;
        };
        let mut start = 0.0;
        for &(t, p, v) in &all {
            advance(&mut polys, start);
            // Jump: update from the top so lower levels keep left limits.
            for k in (1..=m).rev() {
                if let Letter::Jump { index, power } = letters[k - 1] {
                    if index as usize - 1 == p {
                        let left = eval_poly(&polys[k - 1], t);
                        polys[k][0] += left * v.powi(power as i32);
                    }
                }
            }
            start = t;
        }
        advance(&mut polys, start);
        eval_poly(&polys[m], self.h)
    }
}

fn eval_poly(p: &[f64], s: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, c| acc * s + c)
}

fn antiderivative(p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0];
    out.extend(p.iter().enumerate().map(|(k, c)| c / (k as f64 + 1.0)));
    out
}

/// `I_{a^k}` for a Wiener letter: `h^{k/2} He_k(ΔW/√h) / k!`.
fn hermite_power(dw: f64, h: f64, k: usize) -> f64 {
    let (mut prev, mut cur) = (1.0, dw);
    for n in 1..k {
        let next = dw * cur - n as f64 * h * prev;
        prev = cur;
        cur = next;
    }
    let fact: f64 = (1..=k).map(|x| x as f64).product();
    cur / fact
}

/// Samples of two adjacent intervals combined through Chen's relation
/// `I_ab = I_ab¹ + I_a¹ I_b² + I_ab²`.
pub fn chen_aggregate(s1: &StepSample, s2: &StepSample) -> Result<StepSample> {
    s1.model.require_same(&s2.model)?;
    let l = s1.model.letter_count();
    let mut level2 = vec![0.0; l * l];
    for a in 0..l {
        for b in 0..l {
            level2[a * l + b] = s1.level2[a * l + b] + s1.level1[a] * s2.level1[b] + s2.level2[a * l + b];
        }
    }
    let level1 = s1.level1.iter().zip(&s2.level1).map(|(x, y)| x + y).collect();
    let wiener = s1.wiener.iter().zip(&s2.wiener).map(|(x, y)| x + y).collect();
    let events = s1
        .events
        .iter()
        .zip(&s2.events)
        .map(|(e1, e2)| e1.iter().copied().chain(e2.iter().map(|&(t, v)| (t + s1.h, v))).collect())
        .collect();
    Ok(StepSample { model: s1.model.clone(), t0: s1.t0, h: s1.h + s2.h, wiener, events, level1, level2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;
    use crate::q;

    #[test]
    fn hermite_values() {
        assert!((hermite_power(0.7, 0.2, 2) - (0.49 - 0.2) / 2.0).abs() < 1e-15);
        let x: f64 = 0.7;
        assert!((hermite_power(x, 0.2, 3) - (x.powi(3) - 3.0 * 0.2 * x) / 6.0).abs() < 1e-15);
    }

    #[test]
    fn identity_step_is_neutral() {
        let a = Alphabet::standard(1, &[q(2)], 3).unwrap();
        let m = Arc::new(DriverModel::new(&a));
        let e = StepSample::identity(&m, 0.0);
        let agg = chen_aggregate(&e, &e).unwrap();
        assert_eq!(agg, e);
    }
}
