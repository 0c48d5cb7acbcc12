use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::grid::Grid;
use super::model::DriverModel;
use super::sample::StepSample;
use crate::error::{Error, Result};
use crate::word::{Letter, Word};

/// A driver path on `[0, h]` resolved on a fine grid that contains every
/// jump time.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverPath {
    model: Arc<DriverModel>,
    grid: Grid,
}

impl DriverPath {
    /// Simulates a path on `k` uniform subintervals merged with jump times.
    pub fn simulate(model: &Arc<DriverModel>, h: f64, k: usize, rng: &mut impl Rng) -> Self {
        let mut events = Vec::new();
        for jm in model.jumps() {
            let n = Poisson::new(jm.intensity * h).map(|p| p.sample(rng) as usize).unwrap_or(0);
            let mut ev: Vec<(f64, f64)> = (0..n)
                .map(|_| (h * (1.0 - rng.random::<f64>()), jm.size_from_uniform(rng.random::<f64>())))
                .collect();
            ev.sort_by(|a, b| a.0.total_cmp(&b.0));
            events.push(ev);
        }
        Self::with_events(model, h, k, events, rng)
    }

    /// Simulates the Brownian part for prescribed jump events.
    pub fn with_events(model: &Arc<DriverModel>, h: f64, k: usize, events: Vec<Vec<(f64, f64)>>, rng: &mut impl Rng) -> Self {
        let base: Vec<f64> = (0..=k).map(|i| h * i as f64 / k as f64).collect();
        let (times, event_index) = Grid::merged_times(&base, &events);
        let d = model.wiener_count();
        let mut w = vec![vec![0.0; times.len()]; d];
        for m in 1..times.len() {
            let sd = (times[m] - times[m - 1]).max(0.0).sqrt();
            for wi in w.iter_mut() {
                let z: f64 = rng.sample(StandardNormal);
                wi[m] = wi[m - 1] + sd * z;
            }
        }
        Self { model: model.clone(), grid: Grid { times, w, events, event_index } }
    }

    pub fn model(&self) -> &Arc<DriverModel> {
        &self.model
    }

    pub fn h(&self) -> f64 {
        *self.grid.times.last().unwrap()
    }

    pub fn times(&self) -> &[f64] {
        &self.grid.times
    }

    /// `W_i` on the grid (`i` zero-based).
    pub fn wiener_values(&self, i: usize) -> &[f64] {
        &self.grid.w[i]
    }

    pub fn events(&self) -> &[Vec<(f64, f64)>] {
        &self.grid.events
    }

    /// Splits at grid point `k`; the second piece is shifted to start at 0.
    pub fn split(&self, k: usize) -> Result<(DriverPath, DriverPath)> {
        let g = &self.grid;
        if k == 0 || k + 1 >= g.times.len() {
            return Err(Error::Domain(format!("split index {k} is not an interior grid point")));
        }
        let t = g.times[k];
        let piece = |range: std::ops::RangeInclusive<usize>| {
            let lo = *range.start();
            let times: Vec<f64> = g.times[range.clone()].iter().map(|s| s - g.times[lo]).collect();
            let w = g.w.iter().map(|wi| wi[range.clone()].iter().map(|x| x - wi[lo]).collect()).collect();
            let mut events = Vec::new();
            let mut event_index = Vec::new();
            for (ev, idx) in g.events.iter().zip(&g.event_index) {
                let keep: Vec<usize> = (0..ev.len()).filter(|&e| range.contains(&idx[e]) && idx[e] != lo).collect();
                events.push(keep.iter().map(|&e| (ev[e].0 - g.times[lo], ev[e].1)).collect());
                event_index.push(keep.iter().map(|&e| idx[e] - lo).collect());
            }
            DriverPath { model: self.model.clone(), grid: Grid { times, w, events, event_index } }
        };
        let _ = t;
        Ok((piece(0..=k), piece(k..=g.times.len() - 1)))
    }
}

impl StepSample {
    /// Level-one and level-two integrals of a fixed path: jump integrals
    /// exact, Wiener integrals by the trapezoidal rule on the path grid.
    pub fn from_path(path: &DriverPath) -> StepSample {
        let mut level1 = Vec::new();
        let mut level2 = Vec::new();
        path.grid.integrals(&path.model, &mut level1, &mut level2);
        let wiener = path.grid.w.iter().map(|w| *w.last().unwrap()).collect();
        StepSample::from_parts(path.model.clone(), 0.0, path.h(), wiener, path.grid.events.clone(), level1, level2)
    }
}

/// Brute-force `I_w` on a fixed path by nested sums over the grid.
///
/// Wiener increments use the left point plus the local second-order term
/// of the previous letter (`(ΔW² − Δt)/2` after the same Wiener letter,
/// `ΔW_i ΔW_j / 2` after another one, `c Δt ΔW / 2` after a time-like
/// letter of rate `c`); `dt` and compensator increments average the left
/// value and the left limit at the right end; a jump multiplies the
/// integrand's left limit.
pub fn oracle_fine_grid(w: &Word, path: &DriverPath) -> Result<f64> {
    let model = &path.model;
    for &a in w.letters() {
        if model.slot(a).is_none() {
            return Err(Error::UnsupportedWord(w.to_string()));
        }
    }
    let g = &path.grid;
    let n = g.times.len();
    // jump_at[m]: (process, size) of an event at grid index m.
    let mut jump_at: Vec<Option<(usize, f64)>> = vec![None; n];
    for (p, idx) in g.event_index.iter().enumerate() {
        for (k, &m) in idx.iter().enumerate() {
            jump_at[m] = Some((p, g.events[p][k].1));
        }
    }
    let rate = |a: Letter| match a {
        Letter::Time => 1.0,
        Letter::Jump { index, power } => -model.jumps()[index as usize - 1].compensator(power),
        Letter::Wiener(_) => 0.0,
    };
    let dw = |i: u32, m: usize| g.w[i as usize - 1][m + 1] - g.w[i as usize - 1][m];
    let mut pre = vec![1.0; n];
    let mut post = vec![1.0; n];
    // Level k - 2 and the letter before the current one.
    let mut post2 = vec![0.0; n];
    let mut prev: Option<Letter> = None;
    for &a in w.letters() {
        let mut npre = vec![0.0; n];
        let mut npost = vec![0.0; n];
        for m in 0..n - 1 {
            let dt = g.times[m + 1] - g.times[m];
            let avg = 0.5 * (post[m] + pre[m + 1]);
            let inc = match a {
                Letter::Wiener(i) => {
                    let local = match prev {
                        None => 0.0,
                        Some(Letter::Wiener(j)) if j == i => 0.5 * (dw(i, m) * dw(i, m) - dt),
                        Some(Letter::Wiener(j)) => 0.5 * dw(i, m) * dw(j, m),
                        Some(b) => 0.5 * rate(b) * dt * dw(i, m),
                    };
                    post[m] * dw(i, m) + post2[m] * local
                }
                _ => rate(a) * avg * dt,
            };
            npre[m + 1] = npost[m] + inc;
            npost[m + 1] = npre[m + 1];
            if let (Letter::Jump { index, power }, Some((p, v))) = (a, jump_at[m + 1]) {
                if p == index as usize - 1 {
                    npost[m + 1] += pre[m + 1] * v.powi(power as i32);
                }
            }
        }
        pre = npre;
        post2 = std::mem::replace(&mut post, npost);
        prev = Some(a);
    }
    Ok(post[n - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drivers::step_rng;
    use crate::word::Alphabet;
    use crate::q;

    fn model() -> Arc<DriverModel> {
        Arc::new(DriverModel::new(&Alphabet::standard(1, &[q(2)], 4).unwrap()))
    }

    #[test]
    fn unit_jump_square_integral() {
        let m = model();
        let mut rng = step_rng(1, 0, 0);
        let events = vec![vec![(0.2, 1.0), (0.5, 1.0), (0.9, 1.0)]];
        let p = DriverPath::with_events(&m, 1.0, 50, events, &mut rng);
        let s = StepSample::from_path(&p);
        let w = |x: &str| x.parse::<Word>().unwrap();
        assert!((s.get(&w("j1")).unwrap() - 1.0).abs() < 1e-14);
        assert!((s.get(&w("j1j1")).unwrap() + 1.0).abs() < 1e-14);
        // the trapezoid rule is exact up to level two only
        for (word, tol) in [("j1j1", 1e-12), ("00", 1e-12), ("j10", 1e-12), ("0j1", 1e-12), ("j1j1j1", 1e-3), ("0j1j10", 1e-3)] {
            let o = oracle_fine_grid(&w(word), &p).unwrap();
            assert!((o - s.get(&w(word)).unwrap()).abs() < tol, "{word} {o} {}", s.get(&w(word)).unwrap());
        }
    }
}
