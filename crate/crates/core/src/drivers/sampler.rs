use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use super::grid::{assemble, Grid, Ingredients};
use super::model::DriverModel;
use super::sample::StepSample;
use crate::error::{domain, Result};

/// Parameters of the per-step sampler.
#[derive(Clone, Debug)]
pub struct DriverConfig {
    pub model: Arc<DriverModel>,
    pub h: f64,
    /// Fourier terms `p` for Lévy areas.
    pub fourier_terms: usize,
    /// Uniform subintervals `M` of the fine grid used in steps with jumps.
    pub grid_points: usize,
    pub seed: u64,
}

impl DriverConfig {
    /// Config with the default grid `M = 5(p + 1)`.
    pub fn new(model: Arc<DriverModel>, h: f64, fourier_terms: usize, seed: u64) -> Result<Self> {
        Self::with_grid(model, h, fourier_terms, 5 * (fourier_terms + 1), seed)
    }

    pub fn with_grid(model: Arc<DriverModel>, h: f64, fourier_terms: usize, grid_points: usize, seed: u64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return domain("step size must be positive");
        }
        if fourier_terms == 0 {
            return domain("at least one Fourier term is required");
        }
        if grid_points < 2 {
            return domain("the jump grid needs M >= 2");
        }
        Ok(Self { model, h, fourier_terms, grid_points, seed })
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Independent generator for `(seed, path, step)`.
pub fn step_rng(seed: u64, path: u64, step: u64) -> ChaCha8Rng {
    let x = splitmix(splitmix(splitmix(seed) ^ path) ^ step.rotate_left(32));
    ChaCha8Rng::seed_from_u64(x)
}

fn normal(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Fourier coefficients of one Brownian bridge on `[0, h]`: `(a, b, a0)`.
fn bridge_coefficients(p: usize, h: f64, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>, f64) {
    let mut a = Vec::with_capacity(p);
    let mut b = Vec::with_capacity(p);
    let mut inv_sq = 0.0;
    for r in 1..=p {
        let sd = (h / 2.0).sqrt() / (PI * r as f64);
        a.push(sd * normal(rng));
        b.push(sd * normal(rng));
        inv_sq += 1.0 / (r * r) as f64;
    }
    let tail_var = (2.0 * h / (PI * PI)) * (PI * PI / 6.0 - inv_sq);
    let a0 = -2.0 * a.iter().sum::<f64>() + tail_var.max(0.0).sqrt() * normal(rng);
    (a, b, a0)
}

/// `I_{12}` from two bridges' coefficients and increments.
fn area(dw1: f64, dw2: f64, c1: &(Vec<f64>, Vec<f64>, f64), c2: &(Vec<f64>, Vec<f64>, f64)) -> f64 {
    let mut s = 0.0;
    for r in 0..c1.0.len() {
        s += (r + 1) as f64 * (c1.0[r] * c2.1[r] - c1.1[r] * c2.0[r]);
    }
    0.5 * dw1 * dw2 + 0.5 * (dw2 * c1.2 - dw1 * c2.2) + PI * s
}

/// Truncated Fourier sample of `(I_{12}, I_{21})` given the increments;
/// `I_{12} + I_{21} = ΔW_1 ΔW_2` holds exactly.
pub fn levy_area_fourier(dw1: f64, dw2: f64, p: usize, h: f64, rng: &mut impl Rng) -> Result<(f64, f64)> {
    if p == 0 {
        return domain("at least one Fourier term is required");
    }
    let c1 = bridge_coefficients(p, h, rng);
    let c2 = bridge_coefficients(p, h, rng);
    let i12 = area(dw1, dw2, &c1, &c2);
    Ok((i12, dw1 * dw2 - i12))
}

/// Samples step `step` of path `path`.
pub fn sample_step(cfg: &DriverConfig, path: u64, step: u64) -> StepSample {
    let mut rng = step_rng(cfg.seed, path, step);
    sample_with(cfg, &mut rng, step as f64 * cfg.h)
}

pub(crate) fn sample_with(cfg: &DriverConfig, rng: &mut impl Rng, t0: f64) -> StepSample {
    let model = &cfg.model;
    let h = cfg.h;
    let d = model.wiener_count();
    let mut events: Vec<Vec<(f64, f64)>> = Vec::with_capacity(model.jumps().len());
    for jm in model.jumps() {
        let n = Poisson::new(jm.intensity * h).map(|p| p.sample(rng) as usize).unwrap_or(0);
        let mut ev: Vec<(f64, f64)> = (0..n)
            .map(|_| {
                let t = h * (1.0 - rng.random::<f64>());
                (t, jm.size_from_uniform(rng.random::<f64>()))
            })
            .collect();
        ev.sort_by(|a, b| a.0.total_cmp(&b.0));
        events.push(ev);
    }
    let mut level1 = Vec::new();
    let mut level2 = Vec::new();
    let any_jump = events.iter().any(|e| !e.is_empty());
    let wiener: Vec<f64>;
    if any_jump && d > 0 {
        let m = cfg.grid_points;
        let base: Vec<f64> = (0..=m).map(|k| h * k as f64 / m as f64).collect();
        let (times, event_index) = Grid::merged_times(&base, &events);
        let mut w = vec![vec![0.0; times.len()]; d];
        for k in 1..times.len() {
            let sd = (times[k] - times[k - 1]).max(0.0).sqrt();
            for wi in w.iter_mut() {
                wi[k] = wi[k - 1] + sd * normal(rng);
            }
        }
        wiener = w.iter().map(|x| *x.last().unwrap()).collect();
        let grid = Grid { times, w, events: events.clone(), event_index };
        grid.integrals(model, &mut level1, &mut level2);
    } else {
        let sqh = h.sqrt();
        let mut dw = vec![0.0; d];
        let mut w_dt = vec![0.0; d];
        let mut cross = vec![vec![0.0; d]; d];
        if d >= 2 {
            let mut coeffs = Vec::with_capacity(d);
            for i in 0..d {
                dw[i] = sqh * normal(rng);
                let c = bridge_coefficients(cfg.fourier_terms, h, rng);
                w_dt[i] = 0.5 * h * (dw[i] + c.2);
                coeffs.push(c);
            }
            for i in 0..d {
                for j in i + 1..d {
                    cross[i][j] = area(dw[i], dw[j], &coeffs[i], &coeffs[j]);
                }
            }
        } else {
            for i in 0..d {
                dw[i] = sqh * normal(rng);
                w_dt[i] = 0.5 * h * dw[i] + (h * h * h / 12.0).sqrt() * normal(rng);
            }
        }
        let w_at_events: Vec<Vec<Vec<f64>>> = events.iter().map(|e| vec![Vec::new(); e.len()]).collect();
        assemble(
            model,
            &Ingredients { h, dw: &dw, w_dt: &w_dt, cross: &cross, events: &events, w_at_events: &w_at_events },
            &mut level1,
            &mut level2,
        );
        wiener = dw;
    }
    StepSample::from_parts(model.clone(), t0, h, wiener, events, level1, level2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::{Alphabet, Word};
    use crate::q;

    fn cfg(d: u32, lam: i64, h: f64) -> DriverConfig {
        let a = Alphabet::standard(d, &[q(lam)], 3).unwrap();
        DriverConfig::new(Arc::new(DriverModel::new(&a)), h, 8, 11).unwrap()
    }

    #[test]
    fn area_formula_matches_the_truncated_series_path() {
        // a path given exactly by p Fourier modes, integrated numerically
        let h = 0.7;
        let p = 4;
        let mut rng = step_rng(12, 0, 0);
        let coeffs = |rng: &mut ChaCha8Rng| {
            let a: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
            let b: Vec<f64> = (0..p).map(|_| normal(rng)).collect();
            let a0 = -2.0 * a.iter().sum::<f64>();
            (a, b, a0)
        };
        let (c1, c2) = (coeffs(&mut rng), coeffs(&mut rng));
        let (dw1, dw2) = (0.8, -0.3);
        let path = |c: &(Vec<f64>, Vec<f64>, f64), dw: f64, t: f64| {
            let mut x = t / h * dw + c.2 / 2.0;
            for r in 0..p {
                let arg = 2.0 * PI * (r + 1) as f64 * t / h;
                x += c.0[r] * arg.cos() + c.1[r] * arg.sin();
            }
            x
        };
        let k = 200_000;
        let mut sum = 0.0;
        for m in 0..k {
            let (t0, t1) = (h * m as f64 / k as f64, h * (m + 1) as f64 / k as f64);
            let w1 = 0.5 * (path(&c1, dw1, t0) + path(&c1, dw1, t1));
            sum += w1 * (path(&c2, dw2, t1) - path(&c2, dw2, t0));
        }
        assert!(path(&c1, dw1, 0.0).abs() < 1e-12);
        assert!((area(dw1, dw2, &c1, &c2) - sum).abs() < 1e-8 * sum.abs(), "{} vs {sum}", area(dw1, dw2, &c1, &c2));
    }

    #[test]
    fn deterministic_stream() {
        let c = cfg(2, 2, 0.1);
        assert_eq!(sample_step(&c, 3, 4), sample_step(&c, 3, 4));
        assert_ne!(sample_step(&c, 3, 4), sample_step(&c, 3, 5));
        assert_ne!(sample_step(&c, 3, 4), sample_step(&c, 4, 4));
    }

    #[test]
    fn exact_identities_hold_per_step() {
        let c = cfg(2, 2, 0.3);
        let w = |s: &str| s.parse::<Word>().unwrap();
        for k in 0..200 {
            let s = sample_step(&c, 0, k);
            let h = c.h;
            assert_eq!(s.get(&w("0")).unwrap(), h);
            assert_eq!(s.get(&w("00")).unwrap(), h * h / 2.0);
            let dw = s.get(&w("w1")).unwrap();
            assert!((s.get(&w("w10")).unwrap() + s.get(&w("0w1")).unwrap() - h * dw).abs() < 1e-14);
            assert!((s.get(&w("w1w1")).unwrap() - (dw * dw - h) / 2.0).abs() < 1e-14);
            let dw2 = s.get(&w("w2")).unwrap();
            assert!((s.get(&w("w1w2")).unwrap() + s.get(&w("w2w1")).unwrap() - dw * dw2).abs() < 1e-14);
        }
    }

    #[test]
    fn config_validation() {
        let c = cfg(1, 1, 0.1);
        assert!(DriverConfig::new(c.model.clone(), 0.0, 1, 0).is_err());
        assert!(DriverConfig::new(c.model.clone(), 0.1, 0, 0).is_err());
        assert!(DriverConfig::with_grid(c.model.clone(), 0.1, 1, 1, 0).is_err());
        let mut rng = step_rng(0, 0, 0);
        assert!(levy_area_fourier(0.1, 0.2, 0, 0.1, &mut rng).is_err());
        let (a, b) = levy_area_fourier(0.1, 0.2, 3, 0.1, &mut rng).unwrap();
        assert!((a + b - 0.02).abs() < 1e-15);
    }
}
