//! Level-one and level-two integrals from increments, Wiener time integrals,
//! cross integrals and jump events.

use super::model::DriverModel;
use crate::word::Letter;

/// Ingredients from which every level-two integral follows exactly.
pub(crate) struct Ingredients<'a> {
    pub h: f64,
    pub dw: &'a [f64],
    /// `∫ W_i ds` per Wiener process.
    pub w_dt: &'a [f64],
    /// `cross[i][j] = I_{w_i w_j}` for `i < j` (zero-based), others unused.
    pub cross: &'a [Vec<f64>],
    /// Per jump process: `(offset, size)` sorted by offset.
    pub events: &'a [Vec<(f64, f64)>],
    /// Per jump process, per event: `W_i` at the event time.
    pub w_at_events: &'a [Vec<Vec<f64>>],
}

fn powi(v: f64, q: u32) -> f64 {
    v.powi(q as i32)
}

/// Fills dense level-one (`L`) and level-two (`L × L`) tables.
pub(crate) fn assemble(model: &DriverModel, ing: &Ingredients<'_>, level1: &mut Vec<f64>, level2: &mut Vec<f64>) {
    let letters = model.letters();
    let l = letters.len();
    let h = ing.h;
    level1.clear();
    level1.resize(l, 0.0);
    level2.clear();
    level2.resize(l * l, 0.0);
    // Per jump letter: I_J and I_{0J}.
    let mut i_0j = vec![0.0; l];
    for (s, &a) in letters.iter().enumerate() {
        match a {
            Letter::Time => level1[s] = h,
            Letter::Wiener(i) => level1[s] = ing.dw[i as usize - 1],
            Letter::Jump { index, power } => {
                let jm = &model.jumps()[index as usize - 1];
                let m = jm.compensator(power);
                let ev = &ing.events[index as usize - 1];
                level1[s] = ev.iter().map(|&(_, v)| powi(v, power)).sum::<f64>() - m * h;
                i_0j[s] = ev.iter().map(|&(t, v)| powi(v, power) * t).sum::<f64>() - m * h * h / 2.0;
            }
        }
    }
    let i_a0 = |s: usize| -> f64 {
        match letters[s] {
            Letter::Time => h * h / 2.0,
            Letter::Wiener(i) => ing.w_dt[i as usize - 1],
            Letter::Jump { .. } => h * level1[s] - i_0j[s],
        }
    };
    for sa in 0..l {
        for sb in 0..l {
            let a = letters[sa];
            let b = letters[sb];
            let v = match (a, b) {
                (_, Letter::Time) => i_a0(sa),
                (Letter::Time, _) => level1[sa] * level1[sb] - i_a0(sb),
                (Letter::Wiener(i), Letter::Wiener(j)) => {
                    let (i, j) = (i as usize - 1, j as usize - 1);
                    if i == j {
                        (ing.dw[i] * ing.dw[i] - h) / 2.0
                    } else if i < j {
                        ing.cross[i][j]
                    } else {
                        ing.dw[i] * ing.dw[j] - ing.cross[j][i]
                    }
                }
                (Letter::Wiener(i), Letter::Jump { index, power }) => {
                    let k = index as usize - 1;
                    let m = model.jumps()[k].compensator(power);
                    let s: f64 = ing.events[k]
                        .iter()
                        .zip(&ing.w_at_events[k])
                        .map(|(&(_, v), wv)| powi(v, power) * wv[i as usize - 1])
                        .sum();
                    s - m * ing.w_dt[i as usize - 1]
                }
                (Letter::Jump { index, power }, Letter::Wiener(i)) => {
                    let k = index as usize - 1;
                    let m = model.jumps()[k].compensator(power);
                    let s: f64 = ing.events[k]
                        .iter()
                        .zip(&ing.w_at_events[k])
                        .map(|(&(_, v), wv)| powi(v, power) * wv[i as usize - 1])
                        .sum();
                    let i_wj = s - m * ing.w_dt[i as usize - 1];
                    ing.dw[i as usize - 1] * level1[sa] - i_wj
                }
                (Letter::Jump { index: ja, power: pa }, Letter::Jump { index: jb, power: pb }) => {
                    let ea = &ing.events[ja as usize - 1];
                    let eb = &ing.events[jb as usize - 1];
                    let ma = model.jumps()[ja as usize - 1].compensator(pa);
                    let mb = model.jumps()[jb as usize - 1].compensator(pb);
                    let mut s = 0.0;
                    for &(tb, vb) in eb {
                        let before: f64 = ea.iter().filter(|&&(ta, _)| ta < tb).map(|&(_, va)| powi(va, pa)).sum();
                        s += powi(vb, pb) * (before - ma * tb);
                    }
                    s - mb * i_a0(sa)
                }
            };
            level2[sa * l + sb] = v;
        }
    }
}

/// Brownian values on a grid of times containing every jump time.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Grid {
    pub times: Vec<f64>,
    /// `w[i][k] = W_i(times[k])`, starting at zero.
    pub w: Vec<Vec<f64>>,
    pub events: Vec<Vec<(f64, f64)>>,
    /// Grid index of every event.
    pub event_index: Vec<Vec<usize>>,
}

impl Grid {
    /// Merges `base` grid times with event times (sorted) and records the
    /// position of each event.
    pub fn merged_times(base: &[f64], events: &[Vec<(f64, f64)>]) -> (Vec<f64>, Vec<Vec<usize>>) {
        let mut all: Vec<(f64, Option<(usize, usize)>)> = base.iter().map(|&t| (t, None)).collect();
        for (p, ev) in events.iter().enumerate() {
            for (k, &(t, _)) in ev.iter().enumerate() {
                all.push((t, Some((p, k))));
            }
        }
        all.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut event_index: Vec<Vec<usize>> = events.iter().map(|e| vec![0; e.len()]).collect();
        let mut times = Vec::with_capacity(all.len());
        for (t, tag) in all {
            if let Some((p, k)) = tag {
                event_index[p][k] = times.len();
            }
            times.push(t);
        }
        (times, event_index)
    }

    /// Level-one and level-two integrals with trapezoidal Wiener integrals.
    pub fn integrals(&self, model: &DriverModel, level1: &mut Vec<f64>, level2: &mut Vec<f64>) {
        let d = model.wiener_count();
        let h = *self.times.last().unwrap();
        let dw: Vec<f64> = self.w.iter().map(|w| *w.last().unwrap()).collect();
        let mut w_dt = vec![0.0; d];
        let mut cross = vec![vec![0.0; d]; d];
        for k in 0..self.times.len() - 1 {
            let dt = self.times[k + 1] - self.times[k];
            for i in 0..d {
                let mid = 0.5 * (self.w[i][k] + self.w[i][k + 1]);
                w_dt[i] += mid * dt;
                for j in i + 1..d {
                    cross[i][j] += mid * (self.w[j][k + 1] - self.w[j][k]);
                }
            }
        }
        let w_at_events: Vec<Vec<Vec<f64>>> = self
            .event_index
            .iter()
            .map(|idx| idx.iter().map(|&g| (0..d).map(|i| self.w[i][g]).collect()).collect())
            .collect();
        assemble(
            model,
            &Ingredients { h, dw: &dw, w_dt: &w_dt, cross: &cross, events: &self.events, w_at_events: &w_at_events },
            level1,
            level2,
        );
    }
}
