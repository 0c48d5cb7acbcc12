use std::sync::Arc;

use asri::drivers::{
    chen_aggregate, levy_area_fourier, oracle_fine_grid, sample_step, step_rng, DriverConfig, DriverModel, DriverPath, StepSample,
};
use asri::word::{Alphabet, JumpLaw, Word};
use asri::{q, qf, to_f64, Error};
use proptest::prelude::*;

fn w(s: &str) -> Word {
    s.parse().unwrap()
}

fn model(d: u32, intensities: &[i64]) -> Arc<DriverModel> {
    let l: Vec<_> = intensities.iter().map(|&x| q(x)).collect();
    Arc::new(DriverModel::new(&Alphabet::standard(d, &l, 4).unwrap()))
}

/// Mean and standard error.
fn stats(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

fn within_3_sigma(xs: &[f64], expect: f64, what: &str) {
    let (m, se) = stats(xs);
    assert!((m - expect).abs() <= 3.0 * se, "{what}: mean {m} vs {expect} (se {se})");
}

#[test]
fn second_moments() {
    let h = 0.1;
    let lambda = 2.0;
    let m = model(1, &[2]);
    let cfg = DriverConfig::new(m, h, 10, 17).unwrap();
    let samples: Vec<StepSample> = (0..40_000).map(|k| sample_step(&cfg, k, 0)).collect();
    let col = |word: &str, f: fn(f64) -> f64| samples.iter().map(|s| f(s.get(&w(word)).unwrap())).collect::<Vec<_>>();
    within_3_sigma(&col("w1", |x| x), 0.0, "E I_1");
    within_3_sigma(&col("w1", |x| x * x), h, "E I_1^2");
    within_3_sigma(&col("w1w1", |x| x * x), h * h / 2.0, "E I_11^2");
    within_3_sigma(&col("w1j1", |x| x * x), lambda * h * h / 2.0, "E I_1n^2");
    within_3_sigma(&col("j1w1", |x| x * x), lambda * h * h / 2.0, "E I_n1^2");
    within_3_sigma(&col("j1", |x| x * x), lambda * h, "E I_n^2");
    within_3_sigma(&col("j1", |x| x), 0.0, "E I_n");
    within_3_sigma(&col("w10", |x| x * x), h * h * h / 3.0, "E I_10^2");
    within_3_sigma(&col("0w1", |x| x * x), h * h * h / 3.0, "E I_01^2");
    within_3_sigma(&col("j1j1", |x| x * x), lambda * lambda * h * h / 2.0, "E I_nn^2");
}

#[test]
fn levy_area_moments() {
    let h: f64 = 0.5;
    let mut rng = step_rng(3, 0, 0);
    let n = 100_000;
    let mut i12 = Vec::with_capacity(n);
    for _ in 0..n {
        use rand_distr::{Distribution, StandardNormal};
        let z1: f64 = StandardNormal.sample(&mut rng);
        let z2: f64 = StandardNormal.sample(&mut rng);
        let (a, b) = levy_area_fourier(h.sqrt() * z1, h.sqrt() * z2, 50, h, &mut rng).unwrap();
        assert!((a + b - h * z1 * z2).abs() < 1e-14);
        i12.push(a);
    }
    within_3_sigma(&i12, 0.0, "E I_12");
    within_3_sigma(&i12.iter().map(|x| x * x).collect::<Vec<_>>(), h * h / 2.0, "E I_12^2");
    assert!(levy_area_fourier(0.1, 0.2, 0, h, &mut rng).is_err());
}

#[test]
fn two_wiener_moments_in_both_branches() {
    let h = 0.2;
    let m = model(2, &[3]);
    let cfg = DriverConfig::new(m, h, 20, 5).unwrap();
    let samples: Vec<StepSample> = (0..40_000).map(|k| sample_step(&cfg, k, 7)).collect();
    assert!(samples.iter().any(|s| !s.events[0].is_empty()));
    let sq = |word: &str| samples.iter().map(|s| s.get(&w(word)).unwrap().powi(2)).collect::<Vec<_>>();
    // the trapezoid and Fourier truncations bias these slightly downward
    let (m12, se) = stats(&sq("w1w2"));
    assert!((m12 - h * h / 2.0).abs() < 3.0 * se + 0.01 * h * h, "{m12}");
    within_3_sigma(&sq("w2w2"), h * h / 2.0, "E I_22^2");
    within_3_sigma(&sq("w2j1"), 3.0 * h * h / 2.0, "E I_2n^2");
}

#[test]
fn unit_jump_example() {
    let m = model(1, &[2]);
    let mut rng = step_rng(0, 0, 0);
    let p = DriverPath::with_events(&m, 1.0, 100, vec![vec![(0.1, 1.0), (0.4, 1.0), (0.75, 1.0)]], &mut rng);
    let s = StepSample::from_path(&p);
    assert!((s.get(&w("j1")).unwrap() - 1.0).abs() < 1e-14);
    assert!((s.get(&w("j1j1")).unwrap() + 1.0).abs() < 1e-14);
    assert!((oracle_fine_grid(&w("j1j1"), &p).unwrap() - s.get(&w("j1j1")).unwrap()).abs() < 1e-13);
}

#[test]
fn general_jump_sizes() {
    let law = JumpLaw::new(q(3), vec![(q(1), qf(1, 4)), (qf(-1, 2), qf(3, 4))]).unwrap();
    let a = Alphabet::new(1, vec![law.clone()], 4).unwrap();
    let m = Arc::new(DriverModel::new(&a));
    let cfg = DriverConfig::new(m.clone(), 0.25, 5, 2).unwrap();
    let mean = to_f64(&law.moment(1));
    let second = to_f64(&law.moment(2));
    for k in 0..200 {
        let s = sample_step(&cfg, k, 0);
        let sum1: f64 = s.events[0].iter().map(|e| e.1).sum();
        let sum2: f64 = s.events[0].iter().map(|e| e.1 * e.1).sum();
        assert!(s.events[0].iter().all(|e| e.1 == 1.0 || e.1 == -0.5));
        assert!((s.get(&w("j1")).unwrap() - (sum1 - 3.0 * 0.25 * mean)).abs() < 1e-13);
        assert!((s.get(&w("j1^2")).unwrap() - (sum2 - 3.0 * 0.25 * second)).abs() < 1e-13);
    }
    let samples: Vec<_> = (0..40_000).map(|k| sample_step(&cfg, k, 1).get(&w("j1^2")).unwrap().powi(2)).collect();
    within_3_sigma(&samples, 3.0 * 0.25 * to_f64(&law.moment(4)), "E (J^(2))^2");
}

#[test]
fn deterministic_streams() {
    let m = model(2, &[4]);
    let cfg = DriverConfig::new(m, 0.3, 8, 99).unwrap();
    for k in 0..50 {
        assert_eq!(sample_step(&cfg, 3, k), sample_step(&cfg, 3, k));
    }
    assert_ne!(sample_step(&cfg, 3, 0), sample_step(&cfg, 4, 0));
    assert_ne!(sample_step(&cfg, 3, 0), sample_step(&cfg, 3, 1));
}

#[test]
fn chen_is_associative_and_matches_whole_path() {
    let m = model(2, &[5]);
    let cfg = DriverConfig::new(m.clone(), 0.1, 6, 1).unwrap();
    for k in 0..100 {
        let s: Vec<_> = (0..3).map(|j| sample_step(&cfg, k, j)).collect();
        let left = chen_aggregate(&chen_aggregate(&s[0], &s[1]).unwrap(), &s[2]).unwrap();
        let right = chen_aggregate(&s[0], &chen_aggregate(&s[1], &s[2]).unwrap()).unwrap();
        for (x, y) in left.level2_all().iter().zip(right.level2_all()) {
            assert!((x - y).abs() <= 1e-14 * (1.0 + x.abs()));
        }
        for (x, y) in left.events.iter().flatten().zip(right.events.iter().flatten()) {
            assert!((x.0 - y.0).abs() < 1e-15 && x.1 == y.1);
        }
        assert!((left.get(&w("00")).unwrap() - 0.045).abs() < 1e-15);
    }
    let mut rng = step_rng(8, 0, 0);
    for _ in 0..20 {
        let p = DriverPath::simulate(&m, 0.4, 2000, &mut rng);
        let whole = StepSample::from_path(&p);
        let half = p.times().iter().position(|&t| t >= 0.2 - 1e-15).unwrap();
        let (a, b) = p.split(half).unwrap();
        let agg = chen_aggregate(&StepSample::from_path(&a), &StepSample::from_path(&b)).unwrap();
        for (x, y) in agg.level2_all().iter().zip(whole.level2_all()) {
            assert!((x - y).abs() < 1e-12, "{x} {y}");
        }
        // Itô values against the left-point oracle on the same grid
        for word in ["w1j1", "j1w2", "0w1", "w20", "j1j1"] {
            let o = oracle_fine_grid(&w(word), &p).unwrap();
            assert!((o - agg.get(&w(word)).unwrap()).abs() < 2e-2, "{word}");
        }
    }
}

#[test]
fn compensated_identities_on_fixed_paths() {
    let m = model(1, &[2]);
    let mut rng = step_rng(4, 0, 0);
    let p = DriverPath::simulate(&m, 0.5, 500, &mut rng);
    let s = StepSample::from_path(&p);
    let dw = s.get(&w("w1")).unwrap();
    assert!((s.get(&w("0w1")).unwrap() + s.get(&w("w10")).unwrap() - 0.5 * dw).abs() < 1e-13);
    assert!((s.get(&w("w1w1")).unwrap() - (dw * dw - 0.5) / 2.0).abs() < 1e-13);
    let n = p.events()[0].len() as f64;
    assert!((s.get(&w("j1")).unwrap() - (n - 1.0)).abs() < 1e-13);
    assert!(matches!(s.get(&w("w1w1j1")), Err(Error::UnsupportedWord(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn per_step_identities(seed in any::<u64>(), h in 0.001f64..1.0, lambda in 1i64..20) {
        let m = model(2, &[lambda]);
        let cfg = DriverConfig::new(m, h, 4, seed).unwrap();
        let s = sample_step(&cfg, 0, 0);
        let g = |x: &str| s.get(&w(x)).unwrap();
        let tol = 1e-12 * (1.0 + h);
        prop_assert!((g("0") - h).abs() < tol);
        prop_assert!((g("00") - h * h / 2.0).abs() < tol);
        for i in ["w1", "w2"] {
            let dw = g(i);
            let (a, b, c) = (format!("0{i}"), format!("{i}0"), format!("{i}{i}"));
            prop_assert!((g(&a) + g(&b) - h * dw).abs() < tol * (1.0 + dw.abs()));
            prop_assert!((g(&c) - (dw * dw - h) / 2.0).abs() < tol * (1.0 + dw * dw));
        }
        prop_assert!((g("w1w2") + g("w2w1") - g("w1") * g("w2")).abs() < tol * (1.0 + (g("w1") * g("w2")).abs()));
        prop_assert!((g("j1w1") + g("w1j1") - g("w1") * g("j1")).abs() < tol * (1.0 + (g("w1") * g("j1")).abs()));
        let id = StepSample::identity(s.model(), s.t0);
        let agg = chen_aggregate(&s, &id).unwrap();
        prop_assert_eq!(agg.level2_all(), s.level2_all());
    }
}
