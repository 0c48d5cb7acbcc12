use std::collections::BTreeMap;
use std::fmt;

use num_traits::{Signed, Zero};

use crate::Q;

/// Polynomial in the horizon `t` with exact rational coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TimePoly(BTreeMap<u32, Q>);

impl TimePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(power: u32, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(power, c);
        p
    }

    pub fn constant(c: Q) -> Self {
        Self::monomial(0, c)
    }

    pub fn add_term(&mut self, power: u32, c: Q) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(power).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&power);
        }
    }

    pub fn add_scaled(&mut self, other: &TimePoly, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, d) in &other.0 {
            self.add_term(*k, d * c);
        }
    }

    pub fn add(&self, other: &TimePoly) -> TimePoly {
        let mut out = self.clone();
        out.add_scaled(other, &Q::from_integer(1.into()));
        out
    }

    pub fn sub(&self, other: &TimePoly) -> TimePoly {
        let mut out = self.clone();
        out.add_scaled(other, &Q::from_integer((-1).into()));
        out
    }

    pub fn scale(&self, c: &Q) -> TimePoly {
        let mut out = TimePoly::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, power: u32) -> Q {
        self.0.get(&power).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Q)> {
        self.0.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The single `(power, coefficient)` pair if this is a monomial.
    pub fn as_monomial(&self) -> Option<(u32, &Q)> {
        if self.0.len() == 1 {
            self.0.iter().next().map(|(k, c)| (*k, c))
        } else {
            None
        }
    }

    /// Every coefficient is non-negative.
    pub fn is_nonnegative(&self) -> bool {
        self.0.values().all(|c| !c.is_negative())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().map(|(k, c)| crate::to_f64(c) * t.powi(*k as i32)).sum()
    }
}

impl fmt::Display for TimePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            match k {
                0 => write!(f, "{a}")?,
                1 => write!(f, "{a}*t")?,
                _ => write!(f, "{a}*t^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qf};

    #[test]
    fn arithmetic_and_display() {
        let mut p = TimePoly::monomial(2, qf(1, 2));
        p.add_term(0, q(-3));
        assert_eq!(p.to_string(), "-3 + 1/2*t^2");
        let z = p.sub(&p);
        assert!(z.is_zero());
        assert_eq!(p.eval(2.0), -1.0);
        assert_eq!(TimePoly::monomial(1, q(1)).as_monomial(), Some((1, &q(1))));
    }
}
