use super::field::Field;
use super::jet::Jet;

/// Central finite differences of order `k` along `u` with step `h`.
fn fd(field: &Field, y: &[f64], u: &[f64], k: usize, h: f64) -> Vec<f64> {
    let at = |s: f64| field.eval(&y.iter().zip(u).map(|(a, b)| a + s * b).collect::<Vec<_>>());
    let (stencil, denom): (&[(f64, f64)], f64) = match k {
        1 => (&[(1.0, 0.5), (-1.0, -0.5)], h),
        2 => (&[(1.0, 1.0), (0.0, -2.0), (-1.0, 1.0)], h * h),
        3 => (&[(2.0, 0.5), (1.0, -1.0), (-1.0, 1.0), (-2.0, -0.5)], h * h * h),
        4 => (&[(2.0, 1.0), (1.0, -4.0), (0.0, 6.0), (-1.0, -4.0), (-2.0, 1.0)], h * h * h * h),
        _ => panic!("finite differences only up to order 4"),
    };
    let mut out = vec![0.0; y.len()];
    for &(s, c) in stencil {
        for (o, v) in out.iter_mut().zip(at(s * h)) {
            *o += c * v;
        }
    }
    out.iter().map(|v| v / denom).collect()
}

/// `D^k V(y)[u, ..., u]` from jets.
pub fn jet_derivative(field: &Field, y: &[f64], u: &[f64], k: usize) -> Vec<f64> {
    let x: Vec<Jet> = y
        .iter()
        .zip(u)
        .map(|(&a, &b)| (0..k).fold(Jet::constant(a), |acc, i| acc.add_infinitesimal(i, &Jet::constant(b))))
        .collect();
    field.eval_jet(&x).iter().map(|c| (0..k).fold(c.clone(), |acc, i| acc.extract(i)).value()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderCheck {
    pub order: usize,
    /// `(step, relative error)` per finite-difference step.
    pub errors: Vec<(f64, f64)>,
    /// Log-log slope of the error over the two largest steps (orders 3-4).
    pub slope: Option<f64>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JetReport {
    pub checks: Vec<OrderCheck>,
}

impl JetReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub const FD_STEPS: [f64; 3] = [1e-3, 1e-4, 1e-5];
/// Orders 3 and 4 lose all digits to rounding at the steps above, so their
/// convergence slope is read off at these larger steps.
pub const FD_SLOPE_STEPS: [f64; 3] = [1e-1, 5e-2, 2.5e-2];

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let den: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    num / den.max(1e-300).max(1.0e-8)
}

/// Compares jet derivatives with central differences for orders `1..=order`
/// (at most 4) along direction `u`.
pub fn jet_validate(field: &Field, y: &[f64], u: &[f64], order: usize, tolerance: f64) -> JetReport {
    let mut checks = Vec::new();
    for k in 1..=order.min(4) {
        let exact = jet_derivative(field, y, u, k);
        if k <= 2 {
            let errors: Vec<_> = FD_STEPS.iter().map(|&h| (h, rel(&exact, &fd(field, y, u, k, h)))).collect();
            let best = errors.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
            checks.push(OrderCheck { order: k, errors, slope: None, passed: best <= tolerance });
        } else {
            let errors: Vec<_> = FD_SLOPE_STEPS.iter().map(|&h| (h, rel(&exact, &fd(field, y, u, k, h)))).collect();
            let (h0, e0) = errors[0];
            let (h1, e1) = errors[errors.len() - 1];
            let exact_fd = e0 < 1e-9 && e1 < 1e-9;
            let slope = if exact_fd { None } else { Some((e0.ln() - e1.ln()) / (h0.ln() - h1.ln())) };
            let passed = exact_fd || slope.is_some_and(|s| (s - 2.0).abs() < 0.3);
            checks.push(OrderCheck { order: k, errors, slope, passed });
        }
    }
    JetReport { checks }
}
