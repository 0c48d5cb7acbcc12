use super::alphabet::Alphabet;
use super::letter::{Letter, Word};
use super::poly::WordPoly;
use crate::error::{domain, Result};

/// Which commutative product multiplies words.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Product {
    QuasiShuffle,
    Shuffle,
}

/// Product of two words through the recursion
/// `ua * vb = (u * vb)a + (ua * v)b + (u * v)[a, b]`, tabulated over
/// prefix pairs.
fn merge(u: &Word, v: &Word, bracket: &dyn Fn(Letter, Letter) -> WordPoly) -> WordPoly {
    let (m, n) = (u.len(), v.len());
    if m == 0 {
        return WordPoly::word(v.clone());
    }
    if n == 0 {
        return WordPoly::word(u.clone());
    }
    let ul = u.letters();
    let vl = v.letters();
    // table[i][j] = u[..i] * v[..j]
    let mut table: Vec<Vec<WordPoly>> = vec![vec![WordPoly::zero(); n + 1]; m + 1];
    for i in 0..=m {
        table[i][0] = WordPoly::word(u.slice(0, i));
    }
    for j in 0..=n {
        table[0][j] = WordPoly::word(v.slice(0, j));
    }
    for i in 1..=m {
        for j in 1..=n {
            let a = ul[i - 1];
            let b = vl[j - 1];
            let mut acc = WordPoly::zero();
            for (w, c) in table[i - 1][j].iter() {
                acc.add_term(w.push(a), c.clone());
            }
            for (w, c) in table[i][j - 1].iter() {
                acc.add_term(w.push(b), c.clone());
            }
            let br = bracket(a, b);
            if !br.is_zero() {
                acc.add_scaled(&table[i - 1][j - 1].concat(&br), &num_traits::One::one());
            }
            table[i][j] = acc;
        }
    }
    std::mem::take(&mut table[m][n])
}

/// Bracket-free product of two words (all interleavings).
pub fn shuffle(u: &Word, v: &Word) -> WordPoly {
    merge(u, v, &|_, _| WordPoly::zero())
}

/// All `|w| + 1` splittings `(u, v)` with `uv = w`, left to right.
pub fn deconcatenate(w: &Word) -> Vec<(Word, Word)> {
    (0..=w.len()).map(|k| (w.slice(0, k), w.slice(k, w.len()))).collect()
}

impl Alphabet {
    fn check_word(&self, w: &Word) -> Result<()> {
        match w.letters().iter().find(|&&a| !self.contains(a)) {
            Some(a) => domain(format!("letter {a} of {w} is not in the alphabet")),
            None => Ok(()),
        }
    }

    /// The quasi-shuffle product `u * v`.
    pub fn quasi_shuffle(&self, u: &Word, v: &Word) -> Result<WordPoly> {
        self.check_word(u)?;
        self.check_word(v)?;
        Ok(merge(u, v, &|a, b| self.bracket_unchecked(a, b)))
    }

    /// Product of two words under the selected product.
    pub fn product(&self, u: &Word, v: &Word, kind: Product) -> Result<WordPoly> {
        match kind {
            Product::QuasiShuffle => self.quasi_shuffle(u, v),
            Product::Shuffle => Ok(shuffle(u, v)),
        }
    }

    /// Bilinear extension of [`Alphabet::product`] to polynomials.
    pub fn product_poly(&self, p: &WordPoly, r: &WordPoly, kind: Product) -> Result<WordPoly> {
        let mut out = WordPoly::zero();
        for (u, a) in p.iter() {
            for (v, b) in r.iter() {
                out.add_scaled(&self.product(u, v, kind)?, &(a * b));
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn p(s: &str) -> WordPoly {
        s.parse().unwrap()
    }

    #[test]
    fn quasi_shuffle_examples() {
        let a = Alphabet::standard(1, &[q(2)], 4).unwrap();
        assert_eq!(a.quasi_shuffle(&w("w1"), &w("w1")).unwrap(), p("2*w1w1 + 1*0"));
        assert_eq!(a.quasi_shuffle(&Word::empty(), &w("w10j1")).unwrap(), p("w10j1"));
        assert_eq!(
            a.quasi_shuffle(&w("w1"), &w("w1w1")).unwrap(),
            p("3*w1w1w1 + 1*0w1 + 1*w10")
        );
        assert_eq!(
            a.quasi_shuffle(&w("j1"), &w("j1")).unwrap(),
            p("2*j1j1 + 2*0 + 1*j1")
        );
    }

    #[test]
    fn shuffle_examples() {
        assert_eq!(shuffle(&w("w1"), &w("w2")), p("w1w2 + w2w1"));
        assert_eq!(shuffle(&Word::empty(), &w("w1w2")), p("w1w2"));
        assert_eq!(shuffle(&w("w1"), &w("w2w3")), p("w1w2w3 + w2w1w3 + w2w3w1"));
        assert_eq!(shuffle(&w("w1"), &w("w1")), p("2*w1w1"));
    }

    #[test]
    fn deconcatenation() {
        assert_eq!(
            deconcatenate(&w("w1w2")),
            vec![
                (Word::empty(), w("w1w2")),
                (w("w1"), w("w2")),
                (w("w1w2"), Word::empty())
            ]
        );
        assert_eq!(deconcatenate(&Word::empty()), vec![(Word::empty(), Word::empty())]);
        assert_eq!(deconcatenate(&w("0w1j1")).len(), 4);
    }

    #[test]
    fn rejects_foreign_letters() {
        let a = Alphabet::standard(1, &[], 2).unwrap();
        assert!(a.quasi_shuffle(&w("w2"), &w("w1")).is_err());
    }
}
