use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{domain, Result};
use crate::word::{deconcatenate, Alphabet, Grading, Product, Word, WordPoly};
use crate::Q;

/// Which grades a projection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradeSel {
    Eq(usize),
    Le(usize),
    Ge(usize),
}

impl GradeSel {
    pub fn admits(self, g: usize) -> bool {
        match self {
            GradeSel::Eq(n) => g == n,
            GradeSel::Le(n) => g <= n,
            GradeSel::Ge(n) => g >= n,
        }
    }
}

/// Linear map on the span of words of length `<= max_grade`, stored on the
/// basis. Only non-zero images are kept.
#[derive(Clone, Debug)]
pub struct GradedEndo {
    alphabet: Arc<Alphabet>,
    action: BTreeMap<Word, WordPoly>,
    truncated: bool,
}

impl PartialEq for GradedEndo {
    fn eq(&self, other: &Self) -> bool {
        self.action == other.action && *self.alphabet == *other.alphabet
    }
}

impl GradedEndo {
    /// Builds the map from its values on basis words, dropping monomials
    /// longer than the maximal grade.
    pub fn from_fn(alphabet: &Arc<Alphabet>, mut f: impl FnMut(&Word) -> WordPoly) -> Self {
        let mut out = Self::zero(alphabet);
        for w in alphabet.basis() {
            let img = f(&w);
            out.set(w, img);
        }
        out
    }

    pub fn try_from_fn(
        alphabet: &Arc<Alphabet>,
        mut f: impl FnMut(&Word) -> Result<WordPoly>,
    ) -> Result<Self> {
        let mut out = Self::zero(alphabet);
        for w in alphabet.basis() {
            let img = f(&w)?;
            out.set(w, img);
        }
        Ok(out)
    }

    pub fn zero(alphabet: &Arc<Alphabet>) -> Self {
        Self { alphabet: alphabet.clone(), action: BTreeMap::new(), truncated: false }
    }

    /// Sets the image of a basis word; overlong monomials are dropped and flagged.
    pub fn set(&mut self, w: Word, img: WordPoly) {
        let n = self.alphabet.max_grade();
        if w.len() > n {
            return;
        }
        let img = if img.max_len() > n {
            self.truncated = true;
            img.filter(|x| x.len() <= n)
        } else {
            img
        };
        if img.is_zero() {
            self.action.remove(&w);
        } else {
            self.action.insert(w, img);
        }
    }

    pub fn identity(alphabet: &Arc<Alphabet>) -> Self {
        Self::from_fn(alphabet, |w| WordPoly::word(w.clone()))
    }

    /// Convolution unit: keeps the empty word, kills everything else.
    pub fn nu(alphabet: &Arc<Alphabet>) -> Self {
        let mut out = Self::zero(alphabet);
        out.set(Word::empty(), WordPoly::one());
        out
    }

    /// Augmented ideal projector `id - nu`.
    pub fn aug_ideal(alphabet: &Arc<Alphabet>) -> Self {
        Self::from_fn(alphabet, |w| {
            if w.is_empty() {
                WordPoly::zero()
            } else {
                WordPoly::word(w.clone())
            }
        })
    }

    /// `|S|`: plain reversal.
    pub fn reversal(alphabet: &Arc<Alphabet>) -> Self {
        Self::from_fn(alphabet, |w| WordPoly::word(w.reversed()))
    }

    /// `S`: reversal with sign `(-1)^|w|`.
    pub fn sign_reversal(alphabet: &Arc<Alphabet>) -> Self {
        Self::from_fn(alphabet, |w| WordPoly::term(w.reversed(), sign(w.len())))
    }

    /// Convolution inverse of the identity for the given product.
    pub fn antipode(alphabet: &Arc<Alphabet>, product: Product) -> Self {
        match product {
            Product::Shuffle => Self::sign_reversal(alphabet),
            Product::QuasiShuffle => Self::from_fn(alphabet, |w| {
                antipode_word(alphabet, w).expect("basis words use alphabet letters")
            }),
        }
    }

    pub fn alphabet(&self) -> &Arc<Alphabet> {
        &self.alphabet
    }

    pub fn max_grade(&self) -> usize {
        self.alphabet.max_grade()
    }

    /// Whether some image lost monomials beyond the maximal grade.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn apply(&self, w: &Word) -> WordPoly {
        self.action.get(w).cloned().unwrap_or_default()
    }

    pub fn apply_ref(&self, w: &Word) -> Option<&WordPoly> {
        self.action.get(w)
    }

    pub fn apply_poly(&self, p: &WordPoly) -> WordPoly {
        p.map_linear(|w| self.apply(w))
    }

    /// Non-zero images in basis order.
    pub fn iter(&self) -> impl Iterator<Item = (&Word, &WordPoly)> {
        self.action.iter()
    }

    fn check_same(&self, other: &GradedEndo) -> Result<()> {
        if Arc::ptr_eq(&self.alphabet, &other.alphabet) || *self.alphabet == *other.alphabet {
            Ok(())
        } else {
            domain("endomorphisms live on different graded spaces")
        }
    }

    pub fn linear_comb(&self, a: &Q, other: &GradedEndo, b: &Q) -> Result<GradedEndo> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.alphabet);
        out.truncated = self.truncated || other.truncated;
        let words: std::collections::BTreeSet<&Word> = self.action.keys().chain(other.action.keys()).collect();
        for w in words {
            let mut img = self.apply(w).scale(a);
            img.add_scaled(&other.apply(w), b);
            out.set(w.clone(), img);
        }
        Ok(out)
    }

    pub fn add(&self, other: &GradedEndo) -> Result<GradedEndo> {
        self.linear_comb(&Q::one(), other, &Q::one())
    }

    pub fn sub(&self, other: &GradedEndo) -> Result<GradedEndo> {
        self.linear_comb(&Q::one(), other, &-Q::one())
    }

    pub fn scale(&self, c: &Q) -> GradedEndo {
        let mut out = Self::zero(&self.alphabet);
        out.truncated = self.truncated;
        for (w, p) in &self.action {
            out.set(w.clone(), p.scale(c));
        }
        out
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GradedEndo) -> Result<GradedEndo> {
        self.check_same(inner)?;
        let mut out = Self::zero(&self.alphabet);
        out.truncated = self.truncated || inner.truncated;
        for (w, p) in &inner.action {
            out.set(w.clone(), self.apply_poly(p));
        }
        Ok(out)
    }

    /// Input-side projection `F ∘ π`: zero on words outside the selection.
    pub fn project(&self, grading: Grading, sel: GradeSel) -> GradedEndo {
        let mut out = self.clone();
        out.action.retain(|w, _| sel.admits(w.grade(grading)));
        out
    }

    /// Output-side projection `π ∘ F`.
    pub fn project_output(&self, grading: Grading, sel: GradeSel) -> GradedEndo {
        let mut out = Self::zero(&self.alphabet);
        out.truncated = self.truncated;
        for (w, p) in &self.action {
            out.set(w.clone(), p.filter(|x| sel.admits(x.grade(grading))));
        }
        out
    }

    /// Convolution `(F ⋆ G)(w) = Σ_{uv=w} F(u) * G(v)`.
    pub fn convolve(&self, other: &GradedEndo, product: Product) -> Result<GradedEndo> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.alphabet);
        out.truncated = self.truncated || other.truncated;
        for w in self.alphabet.basis() {
            let mut img = WordPoly::zero();
            for (u, v) in deconcatenate(&w) {
                let (Some(fu), Some(gv)) = (self.apply_ref(&u), other.apply_ref(&v)) else {
                    continue;
                };
                img.add_scaled(&self.alphabet.product_poly(fu, gv, product)?, &Q::one());
            }
            out.set(w, img);
        }
        Ok(out)
    }

    /// `X^{⋆k}` with `X^{⋆0} = ν`.
    pub fn conv_power(&self, k: usize, product: Product) -> Result<GradedEndo> {
        let mut acc = Self::nu(&self.alphabet);
        for _ in 0..k {
            acc = acc.convolve(self, product)?;
        }
        Ok(acc)
    }

    /// `Σ_k c_k X^{⋆k}`; needs `X(𝟙) = 0` so that terms beyond the maximal
    /// grade vanish.
    pub fn conv_series(&self, coeff: impl Fn(usize) -> Q, product: Product) -> Result<GradedEndo> {
        if self.action.contains_key(&Word::empty()) {
            return domain("convolution series needs X(1) = 0");
        }
        let mut out = Self::zero(&self.alphabet);
        let mut power = Self::nu(&self.alphabet);
        for k in 0..=self.max_grade() {
            if k > 0 {
                power = power.convolve(self, product)?;
            }
            let c = coeff(k);
            if !c.is_zero() {
                out = out.linear_comb(&Q::one(), &power, &c)?;
            }
        }
        Ok(out)
    }

    /// One line per basis word with a non-zero image: `w -> poly`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (w, p) in &self.action {
            s.push_str(&format!("{w} -> {p}\n"));
        }
        s
    }
}

impl fmt::Display for GradedEndo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// `Ŝ(a1..an) = (-1)^n Σ [u1][u2]..[uk]` over block factorizations of the
/// reversed word.
pub fn antipode_word(alphabet: &Alphabet, w: &Word) -> Result<WordPoly> {
    let r = w.reversed();
    // acc[k]: sum over block factorizations of r[..k].
    let mut acc: Vec<WordPoly> = vec![WordPoly::one()];
    for k in 1..=r.len() {
        let mut cur = WordPoly::zero();
        for j in 0..k {
            if acc[j].is_zero() {
                continue;
            }
            let block = alphabet.bracket_word(&r.slice(j, k))?;
            cur.add_scaled(&acc[j].concat(&block), &Q::one());
        }
        acc.push(cur);
    }
    Ok(acc.pop().unwrap().scale(&sign(w.len())))
}

pub(crate) fn sign(n: usize) -> Q {
    if n % 2 == 0 {
        Q::one()
    } else {
        -Q::one()
    }
}

/// Coefficient streams of the convolution power series used by the schemes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Series {
    /// `log(1 + x)`.
    Log,
    /// `cosh(log(1 + x))`.
    Coshlog,
    /// `sinh(log(1 + x))`.
    Sinhlog,
}

impl Series {
    /// Coefficient of `x^k`.
    pub fn coefficient(self, k: usize) -> Q {
        let half = crate::qf(1, 2);
        match (self, k) {
            (Series::Log, 0) => Q::zero(),
            (Series::Log, k) => sign(k + 1) / Q::from_integer((k as i64).into()),
            (Series::Coshlog, 0) => Q::one(),
            (Series::Coshlog, 1) => Q::zero(),
            (Series::Coshlog, k) => sign(k) * half,
            (Series::Sinhlog, 0) => Q::zero(),
            (Series::Sinhlog, 1) => Q::one(),
            (Series::Sinhlog, k) => sign(k + 1) * half,
        }
    }

    /// Applies the series to `id` via `X = 𝒥`, i.e. `F^⋆(id)`.
    pub fn of_identity(self, alphabet: &Arc<Alphabet>, product: Product) -> Result<GradedEndo> {
        GradedEndo::aug_ideal(alphabet).conv_series(|k| self.coefficient(k), product)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qf};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    fn p(s: &str) -> WordPoly {
        s.parse().unwrap()
    }

    fn alph(n: usize) -> Arc<Alphabet> {
        Arc::new(Alphabet::standard(2, &[], n).unwrap())
    }

    #[test]
    fn basic_maps() {
        let a = alph(3);
        let nu = GradedEndo::nu(&a);
        let j = GradedEndo::aug_ideal(&a);
        assert!(nu.apply(&w("w1w2")).is_zero());
        assert!(j.apply(&Word::empty()).is_zero());
        assert_eq!(j.apply(&w("w1w2")), p("w1w2"));
        assert_eq!(GradedEndo::sign_reversal(&a).apply(&w("w1w2")), p("w2w1"));
        assert_eq!(GradedEndo::sign_reversal(&a).apply(&w("w10w2")), p("-1*w20w1"));
        let qa = Arc::new(Alphabet::standard(1, &[q(2)], 3).unwrap());
        let s_hat = GradedEndo::antipode(&qa, Product::QuasiShuffle);
        assert_eq!(s_hat.apply(&w("w1")), p("-1*w1"));
        assert_eq!(s_hat.apply(&w("w1w1")), p("w1w1 + 0"));
        assert_eq!(s_hat.apply(&w("j1w1")), p("w1j1"));
        assert_eq!(s_hat.apply(&w("j1j1")), p("j1j1 + 2*0 + j1"));
    }

    #[test]
    fn convolution_examples() {
        let a = Arc::new(Alphabet::standard(1, &[q(2)], 3).unwrap());
        let j = GradedEndo::aug_ideal(&a);
        let j2 = j.conv_power(2, Product::QuasiShuffle).unwrap();
        let (al, be) = (q(3), q(5));
        let f = j.linear_comb(&al, &j2, &be).unwrap();
        // (αJ + βJ⋆J)(ab) = (α+β)ab + β ba + β[a,b]
        assert_eq!(f.apply(&w("w1j1")), p("8*w1j1 + 5*j1w1"));
        assert_eq!(f.apply(&w("j1j1")), p("13*j1j1 + 10*0 + 5*j1"));
        let id = GradedEndo::identity(&a);
        let nu = GradedEndo::nu(&a);
        assert_eq!(id.convolve(&nu, Product::QuasiShuffle).unwrap(), id);
        assert!(!j2.truncated());
    }

    #[test]
    fn series_coefficients() {
        assert_eq!(Series::Log.coefficient(2), qf(-1, 2));
        assert_eq!(Series::Log.coefficient(3), qf(1, 3));
        assert_eq!(
            (0..5).map(|k| Series::Coshlog.coefficient(k)).collect::<Vec<_>>(),
            vec![q(1), q(0), qf(1, 2), qf(-1, 2), qf(1, 2)]
        );
        assert_eq!(
            (0..5).map(|k| Series::Sinhlog.coefficient(k)).collect::<Vec<_>>(),
            vec![q(0), q(1), qf(-1, 2), qf(1, 2), qf(-1, 2)]
        );
    }

    #[test]
    fn sinhlog_is_antisymmetrizer() {
        let a = alph(4);
        let s = Series::Sinhlog.of_identity(&a, Product::Shuffle).unwrap();
        let half = qf(1, 2);
        let expected = GradedEndo::identity(&a)
            .sub(&GradedEndo::sign_reversal(&a))
            .unwrap()
            .scale(&half);
        assert_eq!(s, expected);
        let c = Series::Coshlog.of_identity(&a, Product::Shuffle).unwrap();
        let plus = GradedEndo::identity(&a)
            .add(&GradedEndo::sign_reversal(&a))
            .unwrap()
            .scale(&half);
        assert_eq!(c, plus);
    }

    #[test]
    fn log_leading_terms() {
        let a = alph(2);
        let l = Series::Log.of_identity(&a, Product::Shuffle).unwrap();
        assert_eq!(l.apply(&w("w1")), p("w1"));
        // J - J⋆J/2 on ab: ab - (ab + ba)/2
        assert_eq!(l.apply(&w("w1w2")), p("1/2*w1w2 - 1/2*w2w1"));
        assert!(l.apply(&Word::empty()).is_zero());
    }

    #[test]
    fn series_requires_augmented_argument() {
        let a = alph(2);
        assert!(GradedEndo::identity(&a).conv_series(|_| q(1), Product::Shuffle).is_err());
    }

    #[test]
    fn projections() {
        let a = alph(3);
        let id = GradedEndo::identity(&a);
        assert!(id.project(Grading::WordLength, GradeSel::Le(1)).apply(&w("w1w2")).is_zero());
        assert_eq!(id.project(Grading::WordLength, GradeSel::Eq(2)).apply(&w("w1w2")), p("w1w2"));
        assert_eq!(id.project(Grading::MeanSquare, GradeSel::Ge(3)).apply(&w("0w1")), p("0w1"));
    }

    #[test]
    fn truncation_flag() {
        let a = alph(2);
        let x = GradedEndo::from_fn(&a, |w| {
            if w.len() == 2 {
                WordPoly::word(w.concat(w))
            } else {
                WordPoly::zero()
            }
        });
        assert!(x.truncated());
        assert!(x.apply(&w("w1w1")).is_zero());
    }
}
