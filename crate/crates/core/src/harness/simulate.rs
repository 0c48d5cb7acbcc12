use std::hash::{DefaultHasher, Hash, Hasher};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, Setup};
use super::fit::{fit_points, OrderFit};
use super::run::CompiledScheme;
use crate::drivers::{chen_aggregate, sample_step, DriverConfig, DriverModel, StepSample};
use crate::error::{Error, Result};
use crate::scheme::generate;
use std::sync::Arc;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "ASRI_WORKERS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub h: f64,
    pub mse: f64,
    pub mse_se: f64,
    /// Error against the reference at twice the fine step.
    pub mse_alt: Option<f64>,
    /// Wall seconds per path for sampling plus stepping (min over repeats).
    pub cpu_seconds: Option<f64>,
    /// Wall seconds per path for sampling alone.
    pub sample_seconds: Option<f64>,
    /// Fourier terms and grid points used by the timing runs.
    pub p: usize,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeReport {
    pub scheme: String,
    pub points: Vec<Point>,
    pub fit: Option<OrderFit>,
}

/// Paired difference `sup|e_a|² − sup|e_b|²` over paths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub a: String,
    pub b: String,
    pub h: f64,
    pub mean_diff: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl Comparison {
    /// `b` beats `a` at 95% confidence.
    pub fn b_better(&self) -> bool {
        self.ci_low > 0.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub name: String,
    pub paths: usize,
    pub seed: u64,
    pub horizon: f64,
    pub fine_step: f64,
    pub fine_terms: usize,
    pub reference: String,
    /// Hash of every fine-resolution driver sample, all paths in order.
    pub noise_hash: String,
    pub y0_norm: f64,
    pub schemes: Vec<SchemeReport>,
    pub comparisons: Vec<Comparison>,
    /// `(scheme, h)` where halving the fine step moves the error by more
    /// than its standard error.
    pub under_resolved: Vec<(String, f64)>,
}

impl ConvergenceReport {
    pub fn scheme(&self, label: &str) -> Option<&SchemeReport> {
        self.schemes.iter().find(|s| s.scheme == label)
    }

    pub fn comparison(&self, a: &str, b: &str, h: f64) -> Option<&Comparison> {
        self.comparisons.iter().find(|c| c.a == a && c.b == b && c.h == h)
    }

    /// Order fits with the cutoff `MSE < |y0| / 2`.
    pub fn fit_orders(&mut self) {
        let cutoff = 0.5 * self.y0_norm;
        for s in &mut self.schemes {
            let pts: Vec<(f64, f64)> = s.points.iter().map(|p| (p.h, p.mse)).collect();
            s.fit = fit_points(&pts, cutoff);
        }
    }
}

/// Slope fits per scheme for an existing report.
pub fn fit_order(report: &ConvergenceReport) -> Vec<(String, Option<OrderFit>)> {
    let mut r = report.clone();
    r.fit_orders();
    r.schemes.into_iter().map(|s| (s.scheme, s.fit)).collect()
}

struct PathResult {
    /// `[scheme][level]` sup over the coarse grid of `|y_ref - y|^2`.
    sup: Vec<Vec<f64>>,
    sup_alt: Vec<Vec<f64>>,
    hash: u64,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    setup: &'a Setup,
    model: Arc<DriverModel>,
    fine: DriverConfig,
    reference: CompiledScheme,
    schemes: Vec<CompiledScheme>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    if d.is_nan() {
        f64::INFINITY
    } else {
        d
    }
}

fn hash_sample(h: &mut DefaultHasher, s: &StepSample) {
    for x in s.level1_all().iter().chain(s.level2_all()) {
        x.to_bits().hash(h);
    }
}

fn simulate_path(ctx: &Context<'_>, path: u64) -> Result<PathResult> {
    let setup = ctx.setup;
    let levels = setup.ratios.len();
    let y0 = &ctx.cfg.y0;
    let mut hasher = DefaultHasher::new();
    let mut acc: Vec<StepSample> = (0..levels).map(|_| StepSample::identity(&ctx.model, 0.0)).collect();
    let mut alt_acc = StepSample::identity(&ctx.model, 0.0);
    let mut y_ref = y0.clone();
    let mut y_alt = y0.clone();
    let mut ys = vec![vec![y0.clone(); levels]; ctx.schemes.len()];
    let mut sup = vec![vec![0.0; levels]; ctx.schemes.len()];
    let mut sup_alt = vec![vec![0.0; levels]; ctx.schemes.len()];
    for k in 0..setup.fine_steps {
        let s = sample_step(&ctx.fine, path, k as u64);
        hash_sample(&mut hasher, &s);
        y_ref = ctx.reference.step(&s, &y_ref)?;
        let alt_ready = if ctx.cfg.refinement_check {
            alt_acc = chen_aggregate(&alt_acc, &s)?;
            if (k + 1) % 2 == 0 {
                y_alt = ctx.reference.step(&alt_acc, &y_alt)?;
                alt_acc = StepSample::identity(&ctx.model, (k + 1) as f64 * setup.fine_step);
                true
            } else {
                false
            }
        } else {
            false
        };
        for (l, &r) in setup.ratios.iter().enumerate() {
            acc[l] = chen_aggregate(&acc[l], &s)?;
            if (k + 1) % r != 0 {
                continue;
            }
            for (i, scheme) in ctx.schemes.iter().enumerate() {
                let y = scheme.step(&acc[l], &ys[i][l])?;
                sup[i][l] = f64::max(sup[i][l], sq_dist(&y_ref, &y));
                if alt_ready {
                    sup_alt[i][l] = f64::max(sup_alt[i][l], sq_dist(&y_alt, &y));
                }
                ys[i][l] = y;
            }
            acc[l] = StepSample::identity(&ctx.model, (k + 1) as f64 * setup.fine_step);
        }
    }
    Ok(PathResult { sup, sup_alt, hash: hasher.finish() })
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (m, 0.0);
    }
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Runs `f` on a pool sized by [`WORKERS_ENV`] when set.
pub fn with_workers<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    match std::env::var(WORKERS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
        _ => Ok(f()),
    }
}

fn timing(ctx: &Context<'_>, scheme: &CompiledScheme, h: f64) -> Result<(Option<f64>, Option<f64>, usize, usize)> {
    let four = &ctx.cfg.fourier;
    let p = four.terms_at(h);
    let m = four.grid_for(p);
    let Some(t) = &ctx.cfg.timing else {
        return Ok((None, None, p, m));
    };
    if t.paths == 0 {
        return Ok((None, None, p, m));
    }
    let cfg = DriverConfig::with_grid(ctx.model.clone(), h, p, m, ctx.cfg.seed ^ 0x7469_6d65)?;
    let steps = (ctx.cfg.horizon / h).round() as u64;
    let mut best_full = f64::INFINITY;
    let mut best_sample = f64::INFINITY;
    for _ in 0..t.repeats.max(1) {
        let start = Instant::now();
        for path in 0..t.paths as u64 {
            for k in 0..steps {
                std::hint::black_box(sample_step(&cfg, path, k));
            }
        }
        best_sample = best_sample.min(start.elapsed().as_secs_f64());
        let start = Instant::now();
        for path in 0..t.paths as u64 {
            let mut y = ctx.cfg.y0.clone();
            for k in 0..steps {
                let s = sample_step(&cfg, path, k);
                y = scheme.step(&s, &y)?;
            }
            std::hint::black_box(&y);
        }
        best_full = best_full.min(start.elapsed().as_secs_f64());
    }
    let n = t.paths as f64;
    Ok((Some(best_full / n), Some(best_sample / n), p, m))
}

/// Monte Carlo errors of every scheme at every step size against the
/// reference scheme on shared fine-resolution noise.
pub fn simulate_paths(cfg: &ExperimentConfig) -> Result<ConvergenceReport> {
    let setup = cfg.setup()?;
    let model = Arc::new(DriverModel::new(&setup.alphabet));
    let compile = |s: &super::config::SchemeSpec| -> Result<CompiledScheme> {
        let table = generate(s.kind, s.grading, s.order, &setup.alphabet)?;
        CompiledScheme::new(&table, &model, &setup.fields)
    };
    let reference = compile(&setup.reference)?;
    let schemes = setup.schemes.iter().map(compile).collect::<Result<Vec<_>>>()?;
    let fine = DriverConfig::with_grid(
        model.clone(),
        setup.fine_step,
        cfg.fourier.fine_terms,
        cfg.fourier.grid_for(cfg.fourier.fine_terms),
        cfg.seed,
    )?;
    let ctx = Context { cfg, setup: &setup, model, fine, reference, schemes };
    let results: Vec<PathResult> =
        with_workers(|| (0..cfg.paths as u64).into_par_iter().map(|p| simulate_path(&ctx, p)).collect::<Result<Vec<_>>>())??;

    let mut hasher = DefaultHasher::new();
    for r in &results {
        r.hash.hash(&mut hasher);
    }
    let labels: Vec<String> = setup.schemes.iter().map(|s| s.label()).collect();
    let mut reports = Vec::new();
    let mut under = Vec::new();
    for (i, scheme) in ctx.schemes.iter().enumerate() {
        let mut points = Vec::new();
        for (l, &h) in cfg.steps.iter().enumerate() {
            let xs: Vec<f64> = results.iter().map(|r| r.sup[i][l]).collect();
            let (m, se) = mean_se(&xs);
            let mse = m.sqrt();
            let mse_se = if m > 0.0 { se / (2.0 * mse) } else { 0.0 };
            let mse_alt = cfg.refinement_check.then(|| mean_se(&results.iter().map(|r| r.sup_alt[i][l]).collect::<Vec<_>>()).0.sqrt());
            if let Some(alt) = mse_alt {
                if (alt - mse).abs() > mse_se {
                    under.push((labels[i].clone(), h));
                }
            }
            let (cpu, samp, p, mm) = timing(&ctx, scheme, h)?;
            points.push(Point { h, mse, mse_se, mse_alt, cpu_seconds: cpu, sample_seconds: samp, p, m: mm });
        }
        reports.push(SchemeReport { scheme: labels[i].clone(), points, fit: None });
    }
    let mut comparisons = Vec::new();
    for i in 0..labels.len() {
        for j in 0..labels.len() {
            if i == j {
                continue;
            }
            for (l, &h) in cfg.steps.iter().enumerate() {
                let d: Vec<f64> = results.iter().map(|r| r.sup[i][l] - r.sup[j][l]).collect();
                let (m, se) = mean_se(&d);
                comparisons.push(Comparison {
                    a: labels[i].clone(),
                    b: labels[j].clone(),
                    h,
                    mean_diff: m,
                    ci_low: m - 1.96 * se,
                    ci_high: m + 1.96 * se,
                });
            }
        }
    }
    let mut report = ConvergenceReport {
        name: cfg.name.clone(),
        paths: cfg.paths,
        seed: cfg.seed,
        horizon: cfg.horizon,
        fine_step: setup.fine_step,
        fine_terms: cfg.fourier.fine_terms,
        reference: setup.reference.label(),
        noise_hash: format!("{:016x}", hasher.finish()),
        y0_norm: cfg.y0.iter().map(|x| x * x).sum::<f64>().sqrt(),
        schemes: reports,
        comparisons,
        under_resolved: under,
    };
    report.fit_orders();
    Ok(report)
}

/// Error level where the error-vs-cost curves of `a` and `b` cross, with
/// `a` cheaper at larger errors and `b` cheaper at smaller ones.
///
/// Each curve is interpolated linearly in log-log coordinates; the cost
/// difference is sampled at every point of either curve inside the common
/// error range.
pub fn cpu_crossover(report: &ConvergenceReport, a: &str, b: &str) -> Option<f64> {
    let curve = |label: &str| -> Option<Vec<(f64, f64)>> {
        let s = report.scheme(label)?;
        let mut c: Vec<(f64, f64)> = s.points.iter().map(|p| Some((p.mse.ln(), p.cpu_seconds?.ln()))).collect::<Option<_>>()?;
        c.sort_by(|x, y| x.0.total_cmp(&y.0));
        Some(c)
    };
    let (ca, cb) = (curve(a)?, curve(b)?);
    let interp = |c: &[(f64, f64)], e: f64| -> Option<f64> {
        if e < c[0].0 || e > c[c.len() - 1].0 {
            return None;
        }
        let k = c.windows(2).position(|w| e >= w[0].0 && e <= w[1].0)?;
        let (x0, y0, x1, y1) = (c[k].0, c[k].1, c[k + 1].0, c[k + 1].1);
        Some(if x1 == x0 { y0 } else { y0 + (y1 - y0) * (e - x0) / (x1 - x0) })
    };
    let mut diffs: Vec<(f64, f64)> = ca
        .iter()
        .chain(&cb)
        .filter_map(|&(e, _)| Some((e, interp(&ca, e)? - interp(&cb, e)?)))
        .collect();
    diffs.sort_by(|x, y| x.0.total_cmp(&y.0));
    diffs.dedup_by(|x, y| x.0 == y.0);
    // smallest errors: a must cost more; largest errors: a must cost less
    let (first, last) = (diffs.first()?, diffs.last()?);
    if !(first.1 > 0.0 && last.1 < 0.0) {
        return None;
    }
    let k = diffs.windows(2).position(|w| w[0].1 > 0.0 && w[1].1 <= 0.0)?;
    let (e0, d0, e1, d1) = (diffs[k].0, diffs[k].1, diffs[k + 1].0, diffs[k + 1].1);
    Some((e0 + (e1 - e0) * d0 / (d0 - d1)).exp())
}
