use std::sync::Arc;

use asri::operators::{jet_derivative, jet_validate, ConstantField, Field, Jet, TrigV2, SmoothField, VectorFieldSet};
use asri::word::{Alphabet, JumpLaw, Letter, Word};
use asri::{q, qf, Error};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A linear field that goes through the jet path.
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

fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).collect()
}

fn matvec(a: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(y).map(|(c, v)| c * v).sum()).collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

fn alphabet() -> Alphabet {
    Alphabet::standard(2, &[q(3)], 3).unwrap()
}

#[test]
fn linear_fields_act_by_reversed_products() {
    let a = alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let ms: Vec<_> = (0..4).map(|_| random_matrix(3, &mut rng)).collect();
    let fields = VectorFieldSet::new(
        &a,
        Field::Linear(ms[0].clone()),
        vec![Field::Linear(ms[1].clone()), Field::Linear(ms[2].clone())],
        vec![Field::Linear(ms[3].clone())],
    )
    .unwrap();
    let matrix = |l: &Letter| match l {
        Letter::Time => &ms[0],
        Letter::Wiener(i) => &ms[*i as usize],
        Letter::Jump { .. } => &ms[3],
    };
    let y = [0.3, -1.2, 0.7];
    for w in a.words_up_to(3) {
        let mut expect = y.to_vec();
        for l in w.letters() {
            expect = matvec(matrix(l), &expect);
        }
        assert_eq!(fields.apply_word(&w, &y).unwrap(), expect, "{w}");
    }
}

#[test]
fn jet_path_agrees_with_linear_fast_path() {
    let a = alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let ms: Vec<_> = (0..4).map(|_| random_matrix(3, &mut rng)).collect();
    let lin = VectorFieldSet::new(
        &a,
        Field::Linear(ms[0].clone()),
        vec![Field::Linear(ms[1].clone()), Field::Linear(ms[2].clone())],
        vec![Field::Linear(ms[3].clone())],
    )
    .unwrap();
    let smooth = |m: &Vec<Vec<f64>>| Field::Smooth(Arc::new(JetLinear(m.clone())));
    let jet = VectorFieldSet::new(&a, smooth(&ms[0]), vec![smooth(&ms[1]), smooth(&ms[2])], vec![smooth(&ms[3])]).unwrap();
    assert!(lin.is_linear() && !jet.is_linear());
    let y = [1.0, 0.5, -0.25];
    for w in a.words_up_to(3) {
        let x = lin.apply_word(&w, &y).unwrap();
        let z = jet.apply_word(&w, &y).unwrap();
        assert!(close(&z, &x, 1e-12), "{w}: {z:?} vs {x:?}");
    }
    // unit jump shift (I + A)y - y equals A y
    let j: Word = "j1".parse().unwrap();
    assert!(close(&jet.apply_word(&j, &y).unwrap(), &matvec(&ms[3], &y), 1e-14));
}

#[test]
fn higher_power_letters_vanish_for_linear_fields() {
    let law = JumpLaw::new(q(2), vec![(q(1), qf(1, 2)), (q(-2), qf(1, 2))]).unwrap();
    let a = Alphabet::new(0, vec![law], 3).unwrap();
    assert_eq!(a.jump_rank(1), Some(2));
    let m = vec![vec![0.5, 1.0], vec![-1.0, 0.25]];
    let f = VectorFieldSet::new(&a, Field::zero(2), vec![], vec![Field::Linear(m.clone())]).unwrap();
    let g = VectorFieldSet::new(&a, Field::zero(2), vec![], vec![Field::Smooth(Arc::new(JetLinear(m.clone())))]).unwrap();
    let y = [0.4, 0.9];
    for w in ["j1^2", "j1j1^2", "j1^2j1"] {
        let w: Word = w.parse().unwrap();
        assert_eq!(f.apply_word(&w, &y).unwrap(), vec![0.0, 0.0]);
        assert!(close(&g.apply_word(&w, &y).unwrap(), &[0.0, 0.0], 1e-14), "{w}");
    }
    let j: Word = "j1".parse().unwrap();
    assert!(close(&g.apply_word(&j, &y).unwrap(), &matvec(&m, &y), 1e-14));
    // the drift operator keeps only A0 y
    let t: Word = "0".parse().unwrap();
    assert!(close(&g.apply_word(&t, &y).unwrap(), &[0.0, 0.0], 1e-14));
}

#[test]
fn scalar_nonlinear_operators_match_closed_forms() {
    // dy = sin(y) dW + sin(y) dN~, unit jumps with intensity 3, no drift
    let a = Alphabet::standard(1, &[q(3)], 3).unwrap();
    #[derive(Debug)]
    struct Sin;
    impl SmoothField for Sin {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, x: &[Jet]) -> Vec<Jet> {
            vec![x[0].sin()]
        }
    }
    let f = VectorFieldSet::new(&a, Field::zero(1), vec![Field::Smooth(Arc::new(Sin))], vec![Field::Smooth(Arc::new(Sin))]).unwrap();
    let y = 0.8f64;
    let (s, c) = y.sin_cos();
    let get = |w: &str| f.apply_word(&w.parse().unwrap(), &[y]).unwrap()[0];
    assert!((get("w1") - s).abs() < 1e-15);
    assert!((get("w1w1") - s * c).abs() < 1e-15);
    assert!((get("j1") - s).abs() < 1e-15);
    assert!((get("j1w1") - ((y + s).sin() - s)).abs() < 1e-15);
    assert!((get("j1j1") - ((y + s).sin() - s)).abs() < 1e-15);
    assert!((get("w1j1") - s * c).abs() < 1e-15);
    // (V.grad)(sin(y + sin y) - sin y)
    assert!((get("w1j1w1") - s * ((y + s).cos() * (1.0 + c) - c)).abs() < 1e-14);
    // V~_0 id vanishes; V~_0 sin = -sin^3/2 + 3 (sin(y + sin y) - sin y - sin y cos y)
    assert!(get("0").abs() < 1e-15);
    let expect = -0.5 * s * s * s + 3.0 * ((y + s).sin() - s - s * c);
    assert!((get("0w1") - expect).abs() < 1e-14);
}

#[test]
fn taylor_coefficients_of_the_shift() {
    let a = Alphabet::standard(2, &[q(1)], 3).unwrap();
    let m = vec![vec![0.2, 0.0, 0.0, 0.1], vec![0.0, -0.3, 0.1, 0.0], vec![0.0, 0.0, 0.1, 0.0], vec![0.1, 0.0, 0.0, 0.2]];
    let f = VectorFieldSet::new(&a, Field::Linear(m.clone()), vec![Field::Linear(m.clone()), Field::Smooth(Arc::new(TrigV2))], vec![
        Field::Smooth(Arc::new(TrigV2)),
    ])
    .unwrap();
    let y = [1.0, 0.8, 0.6, 0.4];
    let w: Word = "w2".parse().unwrap();
    let g = |x: &[f64]| f.apply_word(&w, x).unwrap();
    let v2 = Field::Smooth(Arc::new(TrigV2)).eval(&y);
    let coeffs: Vec<Vec<f64>> = (1..=4).map(|m| f.apply_power(1, m, &w, &y).unwrap()).collect();
    let residual = |v: f64| {
        let shifted = g(&y.iter().zip(&v2).map(|(a, b)| a + v * b).collect::<Vec<_>>());
        let base = g(&y);
        (0..4)
            .map(|i| {
                let series: f64 = (0..4).map(|m| v.powi(m as i32 + 1) * coeffs[m][i]).sum();
                (shifted[i] - base[i] - series).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    };
    let vs = [1e-1, 1e-2, 1e-3];
    let r: Vec<f64> = vs.iter().map(|&v| residual(v)).collect();
    let slope = (r[0].ln() - r[1].ln()) / (vs[0].ln() - vs[1].ln());
    assert!((slope - 5.0).abs() < 0.3, "slope {slope}, residuals {r:?}");
    assert!(r[2] < 1e-13);
}

#[test]
fn jets_match_finite_differences_on_v2() {
    let v2 = Field::Smooth(Arc::new(TrigV2));
    let y = [1.0, 0.8, 0.6, 0.4];
    let u = [0.3, -0.7, 0.2, 0.9];
    let report = jet_validate(&v2, &y, &u, 4, 1e-6);
    assert!(report.passed(), "{report:?}");
    assert!(report.checks[0].errors.iter().any(|e| e.1 < 1e-7));
}

#[test]
fn degenerate_derivatives() {
    let lin = Field::Linear(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
    assert_eq!(jet_derivative(&lin, &[0.5, 0.1], &[1.0, -1.0], 2), vec![0.0, 0.0]);
    let c = Field::Smooth(Arc::new(ConstantField(vec![2.0, -1.0])));
    for k in 1..=4 {
        assert_eq!(jet_derivative(&c, &[0.5, 0.1], &[1.0, 1.0], k), vec![0.0, 0.0]);
    }
    assert!(jet_validate(&c, &[0.5, 0.1], &[1.0, 1.0], 4, 1e-6).passed());
}

#[test]
fn budget_and_shape_errors() {
    let a = Alphabet::standard(1, &[], 6).unwrap();
    let f = VectorFieldSet::new(&a, Field::Smooth(Arc::new(TrigV2)), vec![Field::Smooth(Arc::new(TrigV2))], vec![]).unwrap();
    let y = [1.0, 0.8, 0.6, 0.4];
    let w: Word = "0000".parse().unwrap();
    match f.apply_word(&w, &y) {
        Err(Error::Budget { word, needed, limit }) => {
            assert_eq!((word.as_str(), needed, limit), ("0000", 8, 6));
        }
        other => panic!("{other:?}"),
    }
    assert!(f.apply_word(&"00w1".parse().unwrap(), &y).is_ok());
    assert!(f.apply_word(&"w2".parse().unwrap(), &y).is_err());
    assert!(f.apply_word(&"w1".parse().unwrap(), &[1.0]).is_err());
    assert!(VectorFieldSet::new(&a, Field::zero(2), vec![], vec![]).is_err());
}

#[test]
fn mixed_fields_use_matrices_only_where_valid() {
    let a = alphabet();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let ms: Vec<_> = (0..3).map(|_| random_matrix(4, &mut rng)).collect();
    let v2 = || Field::Smooth(Arc::new(TrigV2));
    let smooth = |m: &Vec<Vec<f64>>| Field::Smooth(Arc::new(JetLinear(m.clone())));
    let fast = VectorFieldSet::new(&a, Field::Linear(ms[0].clone()), vec![Field::Linear(ms[1].clone()), v2()], vec![Field::Linear(ms[2].clone())]).unwrap();
    let slow = VectorFieldSet::new(&a, smooth(&ms[0]), vec![smooth(&ms[1]), v2()], vec![smooth(&ms[2])]).unwrap();
    let y = [1.0, 0.8, 0.6, 0.4];
    for w in a.words_up_to(3) {
        let x = fast.apply_word(&w, &y).unwrap();
        let z = slow.apply_word(&w, &y).unwrap();
        assert!(close(&x, &z, 1e-12), "{w}");
        let has_v2 = w.letters().contains(&Letter::Wiener(2));
        assert_eq!(fast.word_is_linear(&w), !has_v2);
        if let Some(m) = fast.word_matrix(&w).unwrap() {
            assert!(close(&matvec(&m, &y), &x, 1e-13), "{w}");
        }
    }
}
