use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graded::GradedEndo;
use super::timepoly::TimePoly;
use crate::error::{domain, Result};
use crate::word::{Alphabet, Letter, Word, WordPoly};
use crate::Q;

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `E(w) = t^{|w|}/|w|!` on all-Time words, zero otherwise.
pub fn expectation(p: &WordPoly) -> TimePoly {
    let mut out = TimePoly::zero();
    for (w, c) in p.iter() {
        if w.is_all_time() {
            out.add_term(w.len() as u32, c / Q::from_integer(factorial(w.len())));
        }
    }
    out
}

/// `E(u * v)` without expanding the product: a table over prefix pairs
/// counting all-Time monomials by length.
pub fn expect_product(alphabet: &Alphabet, u: &Word, v: &Word) -> Result<TimePoly> {
    let (m, n) = (u.len(), v.len());
    let ul = u.letters();
    let vl = v.letters();
    let mut lam = vec![vec![Q::zero(); n]; m];
    for i in 0..m {
        for j in 0..n {
            lam[i][j] = alphabet.bracket(ul[i], vl[j])?.coeff(&Word::letter(Letter::Time));
        }
    }
    let kmax = m + n;
    // dp[i][j][k]
    let mut dp = vec![vec![vec![Q::zero(); kmax + 1]; n + 1]; m + 1];
    dp[0][0][0] = Q::one();
    for i in 0..=m {
        for j in 0..=n {
            if i == 0 && j == 0 {
                continue;
            }
            for k in 1..=i + j {
                let mut acc = Q::zero();
                if i > 0 && ul[i - 1].is_time() {
                    acc += &dp[i - 1][j][k - 1];
                }
                if j > 0 && vl[j - 1].is_time() {
                    acc += &dp[i][j - 1][k - 1];
                }
                if i > 0 && j > 0 && !lam[i - 1][j - 1].is_zero() {
                    acc += &lam[i - 1][j - 1] * &dp[i - 1][j - 1][k - 1];
                }
                dp[i][j][k] = acc;
            }
        }
    }
    let mut out = TimePoly::zero();
    for (k, c) in dp[m][n].iter().enumerate() {
        if !c.is_zero() {
            out.add_term(k as u32, c / Q::from_integer(factorial(k)));
        }
    }
    Ok(out)
}

/// Vectors `V_w` standing in for `Ṽ_w(y0)`; the Gram entry of `(u, v)` is
/// their dot product.
#[derive(Clone, Debug, PartialEq)]
pub struct GramSpec {
    dimension: usize,
    vectors: BTreeMap<Word, Vec<Q>>,
}

impl GramSpec {
    pub fn new(dimension: usize, vectors: BTreeMap<Word, Vec<Q>>) -> Result<Self> {
        if let Some((w, _)) = vectors.iter().find(|(_, v)| v.len() != dimension) {
            return domain(format!("Gram vector for {w} has the wrong dimension"));
        }
        Ok(Self { dimension, vectors })
    }

    /// Integer vectors with entries in `-3..=3`, one per basis word, in
    /// dimension equal to the number of basis words.
    pub fn random(alphabet: &Alphabet, seed: u64) -> Self {
        let basis = alphabet.basis();
        let dim = basis.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vectors = basis
            .into_iter()
            .map(|w| {
                let v = (0..dim).map(|_| Q::from_integer(rng.random_range(-3i64..=3).into())).collect();
                (w, v)
            })
            .collect();
        Self { dimension: dim, vectors }
    }

    /// Unit vectors: the Gram matrix is the identity.
    pub fn orthonormal(alphabet: &Alphabet) -> Self {
        let basis = alphabet.basis();
        let dim = basis.len();
        let vectors = basis
            .into_iter()
            .enumerate()
            .map(|(i, w)| {
                let v = (0..dim).map(|k| if k == i { Q::one() } else { Q::zero() }).collect();
                (w, v)
            })
            .collect();
        Self { dimension: dim, vectors }
    }

    pub fn zero(alphabet: &Alphabet) -> Self {
        let basis = alphabet.basis();
        let dim = basis.len();
        let vectors = basis.into_iter().map(|w| (w, vec![Q::zero(); dim])).collect();
        Self { dimension: dim, vectors }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entry(&self, u: &Word, v: &Word) -> Result<Q> {
        let (Some(a), Some(b)) = (self.vectors.get(u), self.vectors.get(v)) else {
            return domain(format!("Gram has no vector for {u} or {v}"));
        };
        Ok(a.iter().zip(b).map(|(x, y)| x * y).sum())
    }
}

/// `⟨F, G⟩ = Σ_{u,v} E(F(u) * G(v)) (u, v)`.
pub fn inner_product(f: &GradedEndo, g: &GradedEndo, gram: &GramSpec) -> Result<TimePoly> {
    let alphabet = f.alphabet();
    if **alphabet != **g.alphabet() {
        return domain("endomorphisms live on different graded spaces");
    }
    let mut cache: HashMap<(Word, Word), TimePoly> = HashMap::new();
    let mut out = TimePoly::zero();
    for (u, fu) in f.iter() {
        for (v, gv) in g.iter() {
            let mut e = TimePoly::zero();
            for (x, c) in fu.iter() {
                for (y, d) in gv.iter() {
                    let key = (x.clone(), y.clone());
                    let val = match cache.get(&key) {
                        Some(t) => t,
                        None => {
                            let t = expect_product(alphabet, x, y)?;
                            cache.entry(key).or_insert(t)
                        }
                    };
                    e.add_scaled(val, &(c * d));
                }
            }
            if e.is_zero() {
                continue;
            }
            out.add_scaled(&e, &gram.entry(u, v)?);
        }
    }
    Ok(out)
}

/// `‖F‖² = ⟨F, F⟩`.
pub fn norm_sq(f: &GradedEndo, gram: &GramSpec) -> Result<TimePoly> {
    inner_product(f, f, gram)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qf};
    use std::sync::Arc;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn expectation_examples() {
        let a = Alphabet::standard(1, &[q(2)], 3).unwrap();
        assert_eq!(expectation(&WordPoly::word(w("00"))), TimePoly::monomial(2, qf(1, 2)));
        let prod = a.quasi_shuffle(&w("w1"), &w("w1")).unwrap();
        assert_eq!(expectation(&prod), TimePoly::monomial(1, q(1)));
        assert!(expectation(&WordPoly::word(w("0w1"))).is_zero());
        assert_eq!(expectation(&WordPoly::one()), TimePoly::constant(q(1)));
    }

    #[test]
    fn fast_product_matches_expansion() {
        let a = Alphabet::standard(1, &[q(2)], 3).unwrap();
        let words = a.words_up_to(3);
        for u in &words {
            for v in &words {
                let slow = expectation(&a.quasi_shuffle(u, v).unwrap());
                assert_eq!(expect_product(&a, u, v).unwrap(), slow, "{u} {v}");
            }
        }
    }

    #[test]
    fn nu_norm_is_one() {
        let a = Arc::new(Alphabet::standard(1, &[], 2).unwrap());
        let nu = GradedEndo::nu(&a);
        let g = GramSpec::orthonormal(&a);
        assert_eq!(norm_sq(&nu, &g).unwrap(), TimePoly::constant(q(1)));
        assert!(norm_sq(&nu, &GramSpec::zero(&a)).unwrap().is_zero());
    }

    #[test]
    fn gram_dimension_checked() {
        let mut m = BTreeMap::new();
        m.insert(Word::empty(), vec![q(1)]);
        assert!(GramSpec::new(2, m).is_err());
        let a = Arc::new(Alphabet::standard(1, &[], 2).unwrap());
        let g = GramSpec::new(1, BTreeMap::new()).unwrap();
        assert!(inner_product(&GradedEndo::nu(&a), &GradedEndo::nu(&a), &g).is_err());
    }

    #[test]
    fn random_gram_is_deterministic() {
        let a = Alphabet::standard(1, &[], 2).unwrap();
        assert_eq!(GramSpec::random(&a, 5), GramSpec::random(&a, 5));
        assert_ne!(GramSpec::random(&a, 5), GramSpec::random(&a, 6));
    }
}
