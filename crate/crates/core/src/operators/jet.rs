use std::ops::{Add, Mul, Neg, Sub};

use smallvec::{smallvec, SmallVec};

type Coeffs = SmallVec<[f64; 8]>;

/// Truncated multilinear jet: a polynomial in infinitesimals `e_0, e_1, ...`
/// with `e_k^2 = 0`, stored densely by subset bitmask.
///
/// Evaluating `g(x + e_0 u)` and reading the `e_0` coefficient gives the
/// directional derivative `Dg(x)[u]`; `m` distinct infinitesimals give
/// `m`-th mixed derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    c: Coeffs,
}

impl Jet {
    pub fn constant(x: f64) -> Self {
        Self { c: smallvec![x] }
    }

    /// `x + e_k`.
    pub fn variable(x: f64, k: usize) -> Self {
        let mut c: Coeffs = smallvec![0.0; 2 << k];
        c[0] = x;
        c[1 << k] = 1.0;
        Self { c }
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    /// Coefficient of the monomial with variable set `mask`.
    pub fn coeff(&self, mask: usize) -> f64 {
        self.c.get(mask).copied().unwrap_or(0.0)
    }

    /// Number of infinitesimal slots in use (`len = 2^vars`).
    pub fn vars(&self) -> usize {
        self.c.len().trailing_zeros() as usize
    }

    fn widened(&self, len: usize) -> Coeffs {
        let mut c = self.c.clone();
        if len > c.len() {
            c.resize(len, 0.0);
        }
        c
    }

    /// `self += s * o`.
    pub fn add_scaled(&mut self, s: f64, o: &Jet) {
        if o.c.len() > self.c.len() {
            self.c.resize(o.c.len(), 0.0);
        }
        for (x, y) in self.c.iter_mut().zip(&o.c) {
            *x += s * y;
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { c: self.c.iter().map(|x| x * s).collect() }
    }

    /// `self + e_k * u`; `u` must not depend on `e_k`.
    pub fn add_infinitesimal(&self, k: usize, u: &Jet) -> Self {
        let bit = 1 << k;
        let len = self.c.len().max(u.c.len()).max(bit << 1);
        let mut c = self.widened(len);
        for (m, &x) in u.c.iter().enumerate() {
            if x != 0.0 {
                debug_assert_eq!(m & bit, 0);
                c[m | bit] += x;
            }
        }
        Self { c }
    }

    /// The jet with `e_k` set to zero.
    pub fn drop_var(&self, k: usize) -> Self {
        let bit = 1 << k;
        let mut j = self.clone();
        for (m, x) in j.c.iter_mut().enumerate() {
            if m & bit != 0 {
                *x = 0.0;
            }
        }
        j.trim();
        j
    }

    /// The `e_k` coefficient, as a jet in the remaining variables.
    pub fn extract(&self, k: usize) -> Self {
        let bit = 1 << k;
        if self.c.len() <= bit {
            return Self::constant(0.0);
        }
        let mut c: Coeffs = smallvec![0.0; self.c.len()];
        for m in 0..self.c.len() {
            if m & bit != 0 {
                c[m & !bit] = self.c[m];
            }
        }
        let mut j = Self { c };
        j.trim();
        j
    }

    fn trim(&mut self) {
        while self.c.len() > 1 {
            let half = self.c.len() / 2;
            if self.c[half..].iter().all(|&x| x == 0.0) {
                self.c.truncate(half);
            } else {
                break;
            }
        }
    }

    /// `f(self)` given `f, f', f'', ...` at `self.value()`.
    pub fn compose(&self, derivs: &[f64]) -> Self {
        let mut n = self.clone();
        n.c[0] = 0.0;
        let mut out = Self::constant(derivs[0]);
        let mut pow = Self::constant(1.0);
        let mut fact = 1.0;
        for (j, &d) in derivs.iter().enumerate().skip(1) {
            pow = &pow * &n;
            if pow.c.iter().all(|&x| x == 0.0) {
                break;
            }
            fact *= j as f64;
            out = &out + &pow.scale(d / fact);
        }
        out
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [s, c, -s, -c];
        let k = self.vars();
        self.compose(&(0..=k).map(|j| cycle[j % 4]).collect::<Vec<_>>())
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value().sin_cos();
        let cycle = [c, -s, -c, s];
        let k = self.vars();
        self.compose(&(0..=k).map(|j| cycle[j % 4]).collect::<Vec<_>>())
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        self.compose(&vec![e; self.vars() + 1])
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        let mut c = self.widened(o.c.len());
        for (x, y) in c.iter_mut().zip(&o.c) {
            *x += y;
        }
        Jet { c }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        let mut c = self.widened(o.c.len());
        for (x, y) in c.iter_mut().zip(&o.c) {
            *x -= y;
        }
        Jet { c }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        if self.c.len() == 1 {
            return o.scale(self.c[0]);
        }
        if o.c.len() == 1 {
            return self.scale(o.c[0]);
        }
        let (a, b) = (&self.c, &o.c);
        let len = a.len().max(b.len());
        let (ma_all, mb_all) = (a.len() - 1, b.len() - 1);
        let mut c: Coeffs = smallvec![0.0; len];
        for (m, out) in c.iter_mut().enumerate() {
            // s ranges over subsets of m inside a's support whose complement
            // in m lies inside b's support.
            let ma = m & ma_all;
            let must = m & !mb_all;
            if must & !ma != 0 {
                continue;
            }
            let mut acc = 0.0;
            let mut s = ma;
            loop {
                if s & must == must {
                    acc += a[s] * b[m ^ s];
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & ma;
            }
            *out = acc;
        }
        Jet { c }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nilpotent_product() {
        let x = Jet::variable(2.0, 0);
        let y = Jet::variable(3.0, 1);
        let p = &x * &y;
        assert_eq!(p.coeff(0), 6.0);
        assert_eq!(p.coeff(1), 3.0);
        assert_eq!(p.coeff(2), 2.0);
        assert_eq!(p.coeff(3), 1.0);
        let sq = &x * &x;
        assert_eq!(sq.coeff(1), 4.0);
        assert_eq!(sq.vars(), 1);
    }

    #[test]
    fn second_derivative_of_sin() {
        let x = Jet::variable(0.7, 0).add_infinitesimal(1, &Jet::constant(1.0));
        let s = x.sin();
        assert!((s.coeff(1) - 0.7f64.cos()).abs() < 1e-15);
        assert!((s.coeff(3) + 0.7f64.sin()).abs() < 1e-15);
        let d = s.extract(0).extract(1);
        assert!((d.value() + 0.7f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn exp_third_derivative() {
        let mut x = Jet::constant(0.3);
        for k in 0..3 {
            x = x.add_infinitesimal(k, &Jet::constant(1.0));
        }
        let e = x.exp();
        assert!((e.coeff(7) - 0.3f64.exp()).abs() < 1e-14);
    }
}
