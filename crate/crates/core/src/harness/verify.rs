//! Named verification suites. Each suite returns one [`Check`] per item so
//! the CLI and the acceptance tests can print them uniformly.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::drivers::{oracle_fine_grid, sample_step, DriverConfig, DriverModel, DriverPath, StepSample};
use crate::endo::identities::{
    expectation_dichotomy, hopf_identity, inner_items, leading_gap, perturbation_cross_term, reversal_items,
    standard_perturbations, wl_vs_ms, Check,
};
use crate::endo::GramSpec;
use crate::error::{Error, Result};
use crate::operators::{jet_validate, Field, Jet, TrigV2, SmoothField, VectorFieldSet};
use crate::scheme::{asri_direct, asri_modified, IntegralExpr};
use crate::word::{Alphabet, JumpLaw, Letter, Word, WordPoly};
use crate::{q, qf};

pub const SUITES: &[&str] = &[
    "hopf",
    "orthogonality",
    "expectation",
    "efficiency-gap",
    "perturbation",
    "wl-vs-ms",
    "pathwise",
    "schemes",
    "operators",
];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Truncation orders for the Gram-based suites.
    pub orders: Vec<usize>,
    pub gram_seed: u64,
    pub grams: usize,
    /// Steps for the exact branch of the pathwise suite.
    pub pathwise_steps: usize,
    /// Fixed paths and grid size for the oracle branch.
    pub oracle_paths: usize,
    pub oracle_grid: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { orders: vec![1, 2, 3], gram_seed: 1, grams: 10, pathwise_steps: 1000, oracle_paths: 20, oracle_grid: 10_000 }
    }
}

/// `{Time, Wiener(1), unit Jump(1, λ = 2)}` closed to grade `g`.
pub fn base_alphabet(g: usize) -> Result<Arc<Alphabet>> {
    Ok(Arc::new(Alphabet::standard(1, &[q(2)], g)?))
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let start = Instant::now();
    let mut checks = match name {
        "hopf" => hopf()?,
        "orthogonality" => orthogonality(opts)?,
        "expectation" => expectation()?,
        "efficiency-gap" => efficiency_gap(opts)?,
        "perturbation" => perturbation(opts)?,
        "wl-vs-ms" => wl_ms(opts)?,
        "pathwise" => pathwise(opts)?,
        "schemes" => schemes()?,
        "operators" => operators()?,
        _ => return Err(Error::Config(format!("unknown suite {name:?}; known: {}", SUITES.join(", ")))),
    };
    checks.push(Check::new("runtime", true, format!("{:.2} s", start.elapsed().as_secs_f64())));
    Ok(checks)
}

fn grams(a: &Alphabet, opts: &VerifyOptions) -> Vec<GramSpec> {
    (0..opts.grams as u64).map(|k| GramSpec::random(a, opts.gram_seed.wrapping_add(k))).collect()
}

fn max_order(opts: &VerifyOptions) -> usize {
    opts.orders.iter().copied().max().unwrap_or(1)
}

fn hopf() -> Result<Vec<Check>> {
    let a = base_alphabet(4)?;
    let bad = hopf_identity(&a)?;
    let detail = format!("{} words, {} failures {:?}", a.basis().len(), bad.len(), bad.iter().take(3).map(|w| w.to_string()).collect::<Vec<_>>());
    Ok(vec![Check::new("id⋆Ŝ = Ŝ⋆id = ν", bad.is_empty(), detail)])
}

fn orthogonality(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let a = base_alphabet(4.max(max_order(opts)))?;
    let mut out = reversal_items(&a)?;
    let gs = grams(&a, opts);
    for &n in &opts.orders {
        // Items (iii) to (vi) folded over all Grams.
        let mut summary: BTreeMap<String, (bool, usize)> = BTreeMap::new();
        for (k, g) in gs.iter().enumerate() {
            for c in inner_items(&a, n, g, opts.gram_seed.wrapping_add(1000 + k as u64))? {
                let e = summary.entry(c.name).or_insert((true, 0));
                e.0 &= c.passed;
                e.1 += usize::from(!c.passed);
            }
        }
        for (name, (ok, fails)) in summary {
            out.push(Check::new(format!("{name} n={n}"), ok, format!("{} grams, {fails} failures", gs.len())));
        }
    }
    Ok(out)
}

fn expectation() -> Result<Vec<Check>> {
    let two_sizes = JumpLaw::new(q(1), vec![(q(1), qf(1, 2)), (q(2), qf(1, 2))])?;
    let alphabets = [
        ("{0, w1, j1}", Alphabet::standard(1, &[q(2)], 3)?),
        ("{0, w1, j1 sizes 1,2}", Alphabet::new(1, vec![two_sizes], 3)?),
    ];
    let mut out = Vec::new();
    for (label, a) in alphabets {
        let (pairs, bad) = expectation_dichotomy(&a, 3)?;
        let first: Vec<String> = bad.iter().take(3).map(|(u, v)| format!("({u},{v})")).collect();
        out.push(Check::new(
            format!("E(u*v) dichotomy over {label}"),
            bad.is_empty(),
            format!("{pairs} pairs, {} violations {first:?}", bad.len()),
        ));
    }
    Ok(out)
}

fn efficiency_gap(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let a = base_alphabet(max_order(opts) + 1)?;
    let gs = grams(&a, opts);
    let mut out = Vec::new();
    for &n in &opts.orders {
        let mut fails = 0;
        let mut first = String::new();
        for g in &gs {
            let gap = leading_gap(&a, n, g)?;
            if !gap.holds() {
                fails += 1;
            }
            if first.is_empty() {
                first = format!("taylor {} = asri {} + sym {}", gap.taylor, gap.antisymmetric, gap.symmetric);
            }
        }
        out.push(Check::new(format!("‖π id‖² = ‖π ½(id−S)‖² + ‖π ½(id+S)‖² n={n}"), fails == 0, format!("{} grams, {fails} failures; {first}", gs.len())));
    }
    Ok(out)
}

fn perturbation(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let orders: Vec<usize> = opts.orders.iter().copied().filter(|n| n % 2 == 1).collect();
    let a = base_alphabet(orders.iter().max().copied().unwrap_or(1) + 1)?;
    let gs = grams(&a, opts);
    let mut out = Vec::new();
    for &n in &orders {
        for (label, z) in standard_perturbations(&a, n)? {
            let mut fails = 0;
            for g in &gs {
                if !perturbation_cross_term(&a, n, &z, g)?.is_zero() {
                    fails += 1;
                }
            }
            out.push(Check::new(format!("<π ½(id−S), π {label}> = 0 n={n}"), fails == 0, format!("{} grams, {fails} failures", gs.len())));
        }
    }
    Ok(out)
}

fn wl_ms(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let a = base_alphabet(max_order(opts) + 1)?;
    let gs = grams(&a, opts);
    let mut out = Vec::new();
    for &n in &opts.orders {
        let mut fails = 0;
        let mut first = String::new();
        for g in &gs {
            let r = wl_vs_ms(&a, n, g, false)?;
            if !r.holds(n) {
                fails += 1;
            }
            if first.is_empty() {
                first = format!("‖R^ms‖² = {}, ‖R^wl‖² = {}, ‖R̂‖² = {}", r.ms, r.wl, r.hat);
            }
        }
        out.push(Check::new(format!("<R^wl, R̂> = 0 and ‖R^ms‖² − ‖R^wl‖² = ‖R̂‖² ≥ 0 n={n}"), fails == 0, format!("{} grams, {fails} failures; {first}", gs.len())));
    }
    Ok(out)
}

/// Words of the quasi-shuffle `u * v` with coefficients, evaluated by `value`.
fn eval_poly(p: &WordPoly, mut value: impl FnMut(&Word) -> Result<f64>) -> Result<(f64, f64)> {
    let mut sum = 0.0;
    let mut scale = 0.0;
    for (w, c) in p.iter() {
        let t = crate::to_f64(c) * value(w)?;
        sum += t;
        scale += t.abs();
    }
    Ok((sum, scale))
}

fn pathwise(opts: &VerifyOptions) -> Result<Vec<Check>> {
    let a = base_alphabet(4)?;
    let model = Arc::new(DriverModel::new(&a));
    let words: Vec<Word> = a.words_up_to(2).into_iter().filter(|w| !w.is_empty()).collect();
    let mut exact = Vec::new();
    let mut oracle = Vec::new();
    for (i, u) in words.iter().enumerate() {
        for v in &words[i..] {
            let p = a.quasi_shuffle(u, v)?;
            if p.words().all(|w| model.supports(w)) {
                exact.push((u.clone(), v.clone(), p));
            } else {
                oracle.push((u.clone(), v.clone(), p));
            }
        }
    }

    let cfg = DriverConfig::new(model.clone(), 0.1, 1, 7)?;
    let mut worst = 0.0f64;
    let mut worst_pair = String::new();
    for k in 0..opts.pathwise_steps as u64 {
        let s = sample_step(&cfg, 0, k);
        for (u, v, p) in &exact {
            let lhs = s.get(u)? * s.get(v)?;
            let (rhs, scale) = eval_poly(p, |w| s.get(w))?;
            let err = (lhs - rhs).abs() / lhs.abs().max(scale).max(f64::MIN_POSITIVE);
            if err > worst {
                worst = err;
                worst_pair = format!("({u},{v})");
            }
        }
    }
    let mut out = vec![Check::new(
        "I_u I_v = I[u*v], exact branch",
        worst <= 1e-12,
        format!("{} pairs × {} steps, worst relative {worst:.2e} {worst_pair}", exact.len(), opts.pathwise_steps),
    )];

    // Oracle branch: per pair, RMS of lhs − rhs against RMS of lhs over
    // fixed fine-grid paths.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let paths: Vec<DriverPath> = (0..opts.oracle_paths).map(|_| DriverPath::simulate(&model, 0.1, opts.oracle_grid, &mut rng)).collect();
    let samples: Vec<StepSample> = paths.iter().map(StepSample::from_path).collect();
    let mut cache: Vec<BTreeMap<Word, f64>> = vec![BTreeMap::new(); paths.len()];
    let mut worst = 0.0f64;
    let mut worst_pair = String::new();
    for (u, v, p) in &oracle {
        let (mut num, mut den) = (0.0, 0.0);
        for (k, path) in paths.iter().enumerate() {
            let lhs = samples[k].get(u)? * samples[k].get(v)?;
            let (rhs, _) = eval_poly(p, |w| {
                if let Some(x) = cache[k].get(w) {
                    return Ok(*x);
                }
                let x = oracle_fine_grid(w, path)?;
                cache[k].insert(w.clone(), x);
                Ok(x)
            })?;
            num += (lhs - rhs).powi(2);
            den += lhs * lhs;
        }
        let rel = (num / den.max(f64::MIN_POSITIVE)).sqrt();
        if rel > worst {
            worst = rel;
            worst_pair = format!("({u},{v})");
        }
    }
    out.push(Check::new(
        "I_u I_v = I[u*v], fine-grid oracle branch",
        worst <= 2e-2,
        format!("{} pairs × {} paths at K = {}, worst relative {worst:.2e} {worst_pair}", oracle.len(), paths.len(), opts.oracle_grid),
    ));
    Ok(out)
}

fn integral(p: &WordPoly) -> IntegralExpr {
    IntegralExpr::from_word_poly(p)
}

fn i(w: &Word) -> IntegralExpr {
    IntegralExpr::integral(w.clone())
}

/// Reference row for `a1a2a3` at order two, written out letter by letter.
fn order_two_golden(a: &Alphabet, l: &[Letter]) -> Result<IntegralExpr> {
    let (a1, a2, a3) = (l[0], l[1], l[2]);
    let w = |x: &[Letter]| Word::new(x.to_vec());
    let mut e = i(&w(&[a1])).mul(&i(&w(&[a2, a3])));
    e = e.add(&i(&w(&[a1, a2])).mul(&i(&w(&[a3]))));
    e.add_scaled(&i(&w(&[a1])).mul(&i(&w(&[a2]))).mul(&i(&w(&[a3]))), &q(-1));
    let tail = a.bracket(a3, a2)?.concat(&WordPoly::word(w(&[a1])));
    let head = WordPoly::word(w(&[a3])).concat(&a.bracket(a2, a1)?);
    let full = a.bracket_word(&w(&[a3, a2, a1]))?;
    e = e.add(&integral(&tail.add(&head).add(&full)));
    Ok(e.scale(&qf(1, 2)))
}

fn schemes() -> Result<Vec<Check>> {
    let two_sizes = JumpLaw::new(q(3), vec![(q(1), qf(1, 2)), (q(2), qf(1, 2))])?;
    let a = Alphabet::new(2, vec![two_sizes], 3)?;
    let half = qf(1, 2);
    let mut out = Vec::new();

    // Order two: every non-palindromic row matches term for term; the
    // palindromic ones are empty and the reference linearizes to zero.
    let t2 = asri_direct(2, &a)?;
    let (mut matched, mut empty, mut bad) = (0, 0, Vec::new());
    for w in a.words_up_to(3).into_iter().filter(|w| w.len() == 3) {
        let golden = order_two_golden(&a, w.letters())?;
        let row = t2.row(&w).cloned().unwrap_or_default();
        let l = w.letters();
        if l[0] == l[2] {
            if row.is_zero() && golden.linearize(&a)?.is_zero() {
                empty += 1;
            } else {
                bad.push(w.to_string());
            }
        } else if row == golden {
            matched += 1;
        } else {
            bad.push(w.to_string());
        }
    }
    out.push(Check::new(
        "asri_direct(2) rows a1a2a3",
        bad.is_empty(),
        format!("{matched} rows term for term, {empty} palindromic rows empty, mismatches {bad:?}"),
    ));

    // Order one: ½(I_{a1}I_{a2} − I_{[a2a1]}).
    let t1 = asri_direct(1, &a)?;
    let mut bad = Vec::new();
    let mut literal_rejected = 0;
    let mut rows = 0;
    for w in a.words_up_to(2).into_iter().filter(|w| w.len() == 2) {
        let (a1, a2) = (w.letters()[0], w.letters()[1]);
        let prod = i(&Word::letter(a1)).mul(&i(&Word::letter(a2)));
        let br = integral(&a.bracket(a2, a1)?);
        let mut golden = prod.clone();
        golden.add_scaled(&br, &q(-1));
        let golden = golden.scale(&half);
        let target = WordPoly::word(w.clone()).add(&WordPoly::word(w.reversed())).scale(&half);
        if t1.row(&w).cloned().unwrap_or_default() != golden || golden.linearize(&a)? != target {
            bad.push(w.to_string());
        }
        // The form with both orderings of the product double counts it.
        let mut literal = prod.scale(&q(2));
        literal.add_scaled(&br, &q(-1));
        if literal.scale(&half).linearize(&a)? != target {
            literal_rejected += 1;
        }
        rows += 1;
    }
    out.push(Check::new(
        "asri_direct(1) rows a1a2 = ½(I_a1 I_a2 − I_[a2a1])",
        bad.is_empty(),
        format!("{rows} rows, mismatches {bad:?}; ½(I_a1 I_a2 + I_a2 I_a1 − I_[a2a1]) misses ½(w + S(w)) on {literal_rejected} rows"),
    ));

    // Modified order two: (1/3)(I_aa I_a − I_[a,a] I_a + I_[a,a,a]).
    let m2 = asri_modified(2, &a)?;
    let mut bad = Vec::new();
    for &l in a.letters() {
        let aa = Word::repeat(l, 2);
        let one = i(&Word::letter(l));
        let mut golden = i(&aa).mul(&one);
        golden.add_scaled(&integral(&a.bracket(l, l)?).mul(&one), &q(-1));
        golden = golden.add(&integral(&a.bracket_word(&Word::repeat(l, 3))?));
        let golden = golden.scale(&qf(1, 3));
        if m2.row(&Word::repeat(l, 3)).cloned().unwrap_or_default() != golden {
            bad.push(l.to_string());
        }
    }
    out.push(Check::new(
        "asri_modified(2) rows aaa",
        bad.is_empty(),
        format!("{} letters, mismatches {bad:?}", a.letters().len()),
    ));
    Ok(out)
}

/// A linear field routed through the jet path.
#[derive(Debug)]
struct JetLinear(Vec<Vec<f64>>);

impl SmoothField for JetLinear {
    fn dim(&self) -> usize {
        self.0.len()
    }
    fn eval(&self, x: &[Jet]) -> Vec<Jet> {
        Field::Linear(self.0.clone()).eval_jet(x)
    }
}

fn operators() -> Result<Vec<Check>> {
    use rand::Rng;
    let a = Alphabet::standard(2, &[q(3)], 3)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ms: Vec<Vec<Vec<f64>>> =
        (0..4).map(|_| (0..4).map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()).collect();
    let lin = |m: &Vec<Vec<f64>>| Field::Linear(m.clone());
    let fast = VectorFieldSet::new(&a, lin(&ms[0]), vec![lin(&ms[1]), lin(&ms[2])], vec![lin(&ms[3])])?;
    let jet = |m: &Vec<Vec<f64>>| Field::Smooth(Arc::new(JetLinear(m.clone())));
    let slow = VectorFieldSet::new(&a, jet(&ms[0]), vec![jet(&ms[1]), jet(&ms[2])], vec![jet(&ms[3])])?;
    let matrix = |l: &Letter| match l {
        Letter::Time => &ms[0],
        Letter::Wiener(i) => &ms[*i as usize],
        Letter::Jump { .. } => &ms[3],
    };
    let y = [1.0, 0.8, 0.6, 0.4];
    let (mut exact_fail, mut jet_worst, mut count) = (Vec::new(), 0.0f64, 0);
    for w in a.words_up_to(3) {
        let mut expect = y.to_vec();
        for l in w.letters() {
            let m = matrix(l);
            expect = m.iter().map(|r| r.iter().zip(&expect).map(|(c, v)| c * v).sum()).collect();
        }
        if fast.apply_word(&w, &y)? != expect {
            exact_fail.push(w.to_string());
        }
        for (x, e) in slow.apply_word(&w, &y)?.iter().zip(&expect) {
            jet_worst = jet_worst.max((x - e).abs() / (1.0 + e.abs()));
        }
        count += 1;
    }
    let mut out = vec![
        Check::new("V~_w y = A^am···A^a1 y, linear fast path", exact_fail.is_empty(), format!("{count} words, failures {exact_fail:?}")),
        Check::new("V~_w y = A^am···A^a1 y, jet path", jet_worst <= 1e-12, format!("{count} words, worst relative {jet_worst:.2e}")),
    ];

    let v2 = Field::Smooth(Arc::new(TrigV2));
    let mut worst = 0.0f64;
    let mut passed = true;
    let points = [([1.0, 0.8, 0.6, 0.4], [0.3, -0.5, 0.2, 0.7]), ([-0.4, 2.1, 0.9, -1.3], [1.0, 0.0, -1.0, 0.5])];
    for (yy, u) in points {
        let r = jet_validate(&v2, &yy, &u, 2, 1e-6);
        passed &= r.passed();
        for c in &r.checks {
            worst = worst.max(c.errors.iter().map(|e| e.1).fold(f64::INFINITY, f64::min));
        }
    }
    out.push(Check::new("jet vs finite differences on V2, orders ≤ 2", passed, format!("worst best-step relative error {worst:.2e}")));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_an_error() {
        assert!(run_suite("nope", &VerifyOptions::default()).is_err());
    }

    #[test]
    fn small_suites_pass() {
        let opts = VerifyOptions { orders: vec![1], grams: 2, pathwise_steps: 50, oracle_paths: 2, oracle_grid: 2000, ..Default::default() };
        for s in ["hopf", "schemes", "operators", "efficiency-gap", "perturbation", "wl-vs-ms"] {
            for c in run_suite(s, &opts).unwrap() {
                assert!(c.passed, "{s}: {} {}", c.name, c.detail);
            }
        }
    }
}
