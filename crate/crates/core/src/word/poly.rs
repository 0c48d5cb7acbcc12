use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed, Zero};

use super::letter::Word;
use crate::error::{Error, Result};
use crate::Q;

/// Rational linear combination of words; zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct WordPoly {
    terms: BTreeMap<Word, Q>,
}

impl WordPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::word(Word::empty())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, Q::one())
    }

    pub fn term(w: Word, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &WordPoly, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (w, d) in &other.terms {
            self.add_term(w.clone(), d * c);
        }
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

    pub fn coeff(&self, w: &Word) -> Q {
        self.terms.get(w).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.terms.iter()
    }

    pub fn words(&self) -> impl Iterator<Item = &Word> {
        self.terms.keys()
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> WordPoly {
        let mut out = WordPoly::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn add(&self, other: &WordPoly) -> WordPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        out
    }

    pub fn sub(&self, other: &WordPoly) -> WordPoly {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    /// Applies a linear map defined on words.
    pub fn map_linear(&self, mut f: impl FnMut(&Word) -> WordPoly) -> WordPoly {
        let mut out = WordPoly::zero();
        for (w, c) in &self.terms {
            out.add_scaled(&f(w), c);
        }
        out
    }

    /// Keeps only the monomials satisfying `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&Word) -> bool) -> WordPoly {
        WordPoly {
            terms: self
                .terms
                .iter()
                .filter(|(w, _)| keep(w))
                .map(|(w, c)| (w.clone(), c.clone()))
                .collect(),
        }
    }

    /// Concatenation product, bilinear.
    pub fn concat(&self, other: &WordPoly) -> WordPoly {
        let mut out = WordPoly::zero();
        for (u, a) in &self.terms {
            for (v, b) in &other.terms {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }
}

impl FromIterator<(Word, Q)> for WordPoly {
    fn from_iter<I: IntoIterator<Item = (Word, Q)>>(iter: I) -> Self {
        let mut p = WordPoly::zero();
        for (w, c) in iter {
            p.add_term(w, c);
        }
        p
    }
}

impl From<Word> for WordPoly {
    fn from(w: Word) -> Self {
        WordPoly::word(w)
    }
}

impl fmt::Display for WordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (w, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
                write!(f, "{}*{}", c.abs(), w)?;
            } else {
                write!(f, "{c}*{w}")?;
            }
        }
        Ok(())
    }
}

/// Parses `c*w` terms joined by ` + ` / ` - `; a bare word has coefficient 1.
impl FromStr for WordPoly {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(WordPoly::zero());
        }
        let mut out = WordPoly::zero();
        for (sign, chunk) in split_terms(s)? {
            let (c, w) = match chunk.split_once('*') {
                Some((c, w)) => (
                    c.trim()
                        .parse::<Q>()
                        .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))?,
                    w.trim().parse::<Word>()?,
                ),
                None => (Q::one(), chunk.trim().parse::<Word>()?),
            };
            out.add_term(w, if sign { -c } else { c });
        }
        Ok(out)
    }
}

/// Splits `a + b - c` into (negated, text) chunks; only spaced operators split.
pub fn split_terms(s: &str) -> Result<Vec<(bool, String)>> {
    let mut out = Vec::new();
    let mut neg = false;
    let mut rest = s.trim();
    if let Some(r) = rest.strip_prefix("- ") {
        neg = true;
        rest = r;
    }
    loop {
        let plus = rest.find(" + ");
        let minus = rest.find(" - ");
        let next = match (plus, minus) {
            (Some(p), Some(m)) => Some((p.min(m), m < p)),
            (Some(p), None) => Some((p, false)),
            (None, Some(m)) => Some((m, true)),
            (None, None) => None,
        };
        match next {
            Some((at, is_minus)) => {
                let chunk = rest[..at].trim();
                if chunk.is_empty() {
                    return Err(Error::Parse(format!("empty term in {s:?}")));
                }
                out.push((neg, chunk.to_string()));
                neg = is_minus;
                rest = &rest[at + 3..];
            }
            None => {
                let chunk = rest.trim();
                if chunk.is_empty() {
                    return Err(Error::Parse(format!("empty term in {s:?}")));
                }
                out.push((neg, chunk.to_string()));
                return Ok(out);
            }
        }
    }
}
