use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::word::{Alphabet, Product, Word, WordPoly};
use crate::Q;

/// `Σ c · Π I_{u}`: rational combination of products of iterated integrals.
/// Factor lists are sorted and never contain the empty word (`I_𝟙 = 1`), so
/// the empty list is the constant term.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntegralExpr {
    terms: BTreeMap<Vec<Word>, Q>,
}

impl IntegralExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Q) -> Self {
        Self::product(Vec::new(), c)
    }

    /// `1 · I_w`.
    pub fn integral(w: Word) -> Self {
        Self::product(vec![w], Q::one())
    }

    /// `c · Π I_{factors}`.
    pub fn product(factors: Vec<Word>, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(factors, c);
        e
    }

    pub fn add_term(&mut self, mut factors: Vec<Word>, c: Q) {
        if c.is_zero() {
            return;
        }
        factors.retain(|w| !w.is_empty());
        factors.sort();
        let e = self.terms.entry(factors.clone()).or_insert_with(Q::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&factors);
        }
    }

    /// `Σ c_w I_w` for a word polynomial.
    pub fn from_word_poly(p: &WordPoly) -> Self {
        let mut e = Self::zero();
        for (w, c) in p.iter() {
            e.add_term(vec![w.clone()], c.clone());
        }
        e
    }

    pub fn add_scaled(&mut self, other: &IntegralExpr, c: &Q) {
        for (f, d) in &other.terms {
            self.add_term(f.clone(), d * c);
        }
    }

    pub fn add(&self, other: &IntegralExpr) -> IntegralExpr {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> IntegralExpr {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn mul(&self, other: &IntegralExpr) -> IntegralExpr {
        let mut out = Self::zero();
        for (f, c) in &self.terms {
            for (g, d) in &other.terms {
                let mut h = f.clone();
                h.extend(g.iter().cloned());
                out.add_term(h, c * d);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Word], &Q)> {
        self.terms.iter().map(|(f, c)| (f.as_slice(), c))
    }

    /// Coefficient of a factor multiset.
    pub fn coeff(&self, factors: &[Word]) -> Q {
        let mut f = factors.to_vec();
        f.retain(|w| !w.is_empty());
        f.sort();
        self.terms.get(&f).cloned().unwrap_or_else(Q::zero)
    }

    pub fn factor_words(&self) -> BTreeSet<Word> {
        self.terms.keys().flatten().cloned().collect()
    }

    pub fn max_factor_len(&self) -> usize {
        self.terms.keys().flatten().map(Word::len).max().unwrap_or(0)
    }

    /// Expands products through the quasi-shuffle: the word polynomial
    /// whose integral equals this expression pathwise.
    pub fn linearize(&self, alphabet: &Alphabet) -> Result<WordPoly> {
        let mut out = WordPoly::zero();
        for (f, c) in &self.terms {
            let mut acc = WordPoly::one();
            for w in f {
                acc = alphabet.product_poly(&acc, &WordPoly::word(w.clone()), Product::QuasiShuffle)?;
            }
            out.add_scaled(&acc, c);
        }
        Ok(out)
    }

    /// Evaluates with integral values supplied by `value`.
    pub fn eval(&self, mut value: impl FnMut(&Word) -> Result<f64>) -> Result<f64> {
        let mut s = 0.0;
        for (f, c) in &self.terms {
            let mut t = crate::to_f64(c);
            for w in f {
                t *= value(w)?;
            }
            s += t;
        }
        Ok(s)
    }
}

impl fmt::Display for IntegralExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (factors, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                f.write_str("-")?;
            }
            let a = c.abs();
            if factors.is_empty() {
                write!(f, "{a}")?;
            } else {
                write!(f, "{a}*")?;
                for w in factors {
                    write!(f, "I[{w}]")?;
                }
            }
        }
        Ok(())
    }
}

impl FromStr for IntegralExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let mut text = s.to_string();
        let mut lead_neg = false;
        if let Some(r) = text.strip_prefix('-') {
            lead_neg = true;
            text = r.to_string();
        }
        for (i, (neg, chunk)) in crate::word::split_terms(&text)?.into_iter().enumerate() {
            let neg = neg ^ (i == 0 && lead_neg);
            let (coef, rest) = match chunk.find("I[") {
                Some(0) => (Q::one(), chunk.as_str()),
                Some(pos) => {
                    let c = chunk[..pos].trim_end_matches('*').trim();
                    (parse_q(c)?, &chunk[pos..])
                }
                None => (parse_q(chunk.trim())?, ""),
            };
            let mut factors = Vec::new();
            let mut r = rest.trim();
            while !r.is_empty() {
                let Some(body) = r.strip_prefix("I[") else {
                    return Err(Error::Parse(format!("bad factor list {rest:?}")));
                };
                let end = body.find(']').ok_or_else(|| Error::Parse("unclosed I[".into()))?;
                factors.push(body[..end].parse::<Word>()?);
                r = body[end + 1..].trim_start();
            }
            out.add_term(factors, if neg { -coef } else { coef });
        }
        Ok(out)
    }
}

fn parse_q(s: &str) -> Result<Q> {
    s.parse::<Q>().map_err(|_| Error::Parse(format!("bad coefficient {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qf};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn product_and_linearize() {
        let a = Alphabet::standard(1, &[], 3).unwrap();
        let e = IntegralExpr::integral(w("w1")).mul(&IntegralExpr::integral(w("w1")));
        assert_eq!(e.linearize(&a).unwrap(), "2*w1w1 + 1*0".parse().unwrap());
        let c = IntegralExpr::integral(Word::empty());
        assert_eq!(c, IntegralExpr::constant(q(1)));
        assert_eq!(c.linearize(&a).unwrap(), WordPoly::one());
    }

    #[test]
    fn text_round_trip() {
        let mut e = IntegralExpr::zero();
        e.add_term(vec![w("w1"), w("0w1")], qf(1, 2));
        e.add_term(vec![w("w1"), w("w1"), w("w1")], qf(-1, 2));
        e.add_term(vec![], q(3));
        e.add_term(vec![w("j1^2w1")], q(-1));
        let s = e.to_string();
        assert_eq!(s.parse::<IntegralExpr>().unwrap(), e, "{s}");
        assert_eq!("0".parse::<IntegralExpr>().unwrap(), IntegralExpr::zero());
        let neg: IntegralExpr = "-1/3*I[w1] + I[0]".parse().unwrap();
        assert_eq!(neg.coeff(&[w("w1")]), qf(-1, 3));
        assert_eq!(neg.coeff(&[w("0")]), q(1));
    }

    #[test]
    fn eval_uses_values() {
        let e: IntegralExpr = "1/2*I[w1]I[w1] - 1/2*I[0]".parse().unwrap();
        let v = e.eval(|x| Ok(if x.to_string() == "w1" { 2.0 } else { 0.5 })).unwrap();
        assert_eq!(v, 1.75);
    }
}
