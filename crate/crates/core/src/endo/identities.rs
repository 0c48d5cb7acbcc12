//! Exact checks of the algebraic identities behind the efficiency results.

use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::graded::{GradeSel, GradedEndo};
use super::inner::{expect_product, expectation, inner_product, norm_sq, GramSpec};
use super::timepoly::TimePoly;
use crate::error::{domain, Result};
use crate::word::{Alphabet, Grading, Product, Word, WordPoly};
use crate::{qf, Q};

/// Outcome of one identity check.
#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

fn half() -> Q {
    qf(1, 2)
}

fn id_minus_s(a: &Arc<Alphabet>) -> GradedEndo {
    GradedEndo::identity(a).sub(&GradedEndo::sign_reversal(a)).unwrap().scale(&half())
}

fn id_plus_s(a: &Arc<Alphabet>) -> GradedEndo {
    GradedEndo::identity(a).add(&GradedEndo::sign_reversal(a)).unwrap().scale(&half())
}

fn wl_eq(f: &GradedEndo, n: usize) -> GradedEndo {
    f.project(Grading::WordLength, GradeSel::Eq(n))
}

fn need_grade(a: &Alphabet, n: usize) -> Result<()> {
    if a.max_grade() < n {
        return domain(format!("maximal grade {} is below the required {n}", a.max_grade()));
    }
    Ok(())
}

/// `id ⋆ Ŝ = Ŝ ⋆ id = ν` on every basis word; returns the failing words.
pub fn hopf_identity(a: &Arc<Alphabet>) -> Result<Vec<Word>> {
    let id = GradedEndo::identity(a);
    let s_hat = GradedEndo::antipode(a, Product::QuasiShuffle);
    let nu = GradedEndo::nu(a);
    let left = id.convolve(&s_hat, Product::QuasiShuffle)?;
    let right = s_hat.convolve(&id, Product::QuasiShuffle)?;
    Ok(a
        .basis()
        .into_iter()
        .filter(|w| left.apply(w) != nu.apply(w) || right.apply(w) != nu.apply(w))
        .collect())
}

/// Random endomorphism supported on inputs of word length `n`, with three
/// random basis words per image.
pub fn random_endo(a: &Arc<Alphabet>, n: usize, seed: u64) -> GradedEndo {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let basis = a.basis();
    GradedEndo::from_fn(a, |w| {
        if w.len() != n {
            return WordPoly::zero();
        }
        let mut p = WordPoly::zero();
        for _ in 0..3 {
            let x = basis[rng.random_range(0..basis.len())].clone();
            p.add_term(x, Q::from_integer(rng.random_range(-3i64..=3).into()));
        }
        p
    })
}

/// Items (i) and (ii): `E ∘ |S| = E` and `|S|(u * v) = |S|u * |S|v`.
pub fn reversal_items(a: &Arc<Alphabet>) -> Result<Vec<Check>> {
    let basis = a.basis();
    let bad_i = basis
        .iter()
        .filter(|w| expectation(&WordPoly::word(w.reversed())) != expectation(&WordPoly::word((*w).clone())))
        .count();
    let rev = GradedEndo::reversal(a);
    let mut bad_ii = 0;
    let mut pairs = 0;
    for u in &basis {
        for v in &basis {
            if u.len() + v.len() > a.max_grade() {
                continue;
            }
            pairs += 1;
            let lhs = rev.apply_poly(&a.quasi_shuffle(u, v)?);
            let rhs = a.quasi_shuffle(&u.reversed(), &v.reversed())?;
            if lhs != rhs {
                bad_ii += 1;
            }
        }
    }
    Ok(vec![
        Check::new("(i) E∘|S| = E", bad_i == 0, format!("{} words, {bad_i} failures", basis.len())),
        Check::new("(ii) |S|(u*v) = |S|u * |S|v", bad_ii == 0, format!("{pairs} pairs, {bad_ii} failures")),
    ])
}

/// Items (iii) to (vi) at word length `n` for one Gram.
pub fn inner_items(a: &Arc<Alphabet>, n: usize, gram: &GramSpec, seed: u64) -> Result<Vec<Check>> {
    need_grade(a, n)?;
    let rev = GradedEndo::reversal(a);
    let x = random_endo(a, n, seed.wrapping_mul(2).wrapping_add(1));
    let y = random_endo(a, n, seed.wrapping_mul(2).wrapping_add(2));
    let rx = rev.compose(&x)?;
    let ry = rev.compose(&y)?;
    let l3 = inner_product(&rx, &y, gram)?;
    let r3 = inner_product(&x, &ry, gram)?;
    let l4 = inner_product(&x, &y, gram)?;
    let r4 = inner_product(&rx, &ry, gram)?;
    let s = wl_eq(&GradedEndo::sign_reversal(a), n);
    let id = wl_eq(&GradedEndo::identity(a), n);
    let l5 = norm_sq(&s, gram)?;
    let r5 = norm_sq(&id, gram)?;
    let c6 = inner_product(&wl_eq(&id_minus_s(a), n), &wl_eq(&id_plus_s(a), n), gram)?;
    Ok(vec![
        Check::new("(iii) <|S|X, Y> = <X, |S|Y>", l3 == r3, format!("{l3}")),
        Check::new("(iv) <X, Y> = <|S|X, |S|Y>", l4 == r4, format!("{l4}")),
        Check::new("(v) |π S|² = |π id|²", l5 == r5, format!("{l5}")),
        Check::new("(vi) <π(id-S)/2, π(id+S)/2> = 0", c6.is_zero(), format!("{c6}")),
    ])
}

/// The three leading-order norms at word length `n + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadingGap {
    pub taylor: TimePoly,
    pub antisymmetric: TimePoly,
    pub symmetric: TimePoly,
}

impl LeadingGap {
    /// `taylor = antisymmetric + symmetric` exactly.
    pub fn holds(&self) -> bool {
        self.taylor == self.antisymmetric.add(&self.symmetric)
    }
}

/// `(‖π id‖², ‖π ½(id−S)‖², ‖π ½(id+S)‖²)` with `π = π_{wl=n+1}`.
pub fn leading_gap(a: &Arc<Alphabet>, n: usize, gram: &GramSpec) -> Result<LeadingGap> {
    need_grade(a, n + 1)?;
    Ok(LeadingGap {
        taylor: norm_sq(&wl_eq(&GradedEndo::identity(a), n + 1), gram)?,
        antisymmetric: norm_sq(&wl_eq(&id_minus_s(a), n + 1), gram)?,
        symmetric: norm_sq(&wl_eq(&id_plus_s(a), n + 1), gram)?,
    })
}

/// `⟨π ½(id−S), π Z⟩` for odd `n`, after checking `|S| ∘ Z = Z` on words
/// of length `n + 1`.
pub fn perturbation_cross_term(a: &Arc<Alphabet>, n: usize, z: &GradedEndo, gram: &GramSpec) -> Result<TimePoly> {
    if n % 2 == 0 {
        return domain("the perturbation cross term is defined for odd n");
    }
    need_grade(a, n + 1)?;
    let pz = wl_eq(z, n + 1);
    if GradedEndo::reversal(a).compose(&pz)? != pz {
        return domain("perturbation is not reversal invariant");
    }
    inner_product(&wl_eq(&id_minus_s(a), n + 1), &pz, gram)
}

/// The two perturbations used for the optimality check.
pub fn standard_perturbations(a: &Arc<Alphabet>, n: usize) -> Result<Vec<(String, GradedEndo)>> {
    let j = GradedEndo::aug_ideal(a).conv_power(n + 1, Product::Shuffle)?;
    let sym = GradedEndo::identity(a).add(&GradedEndo::reversal(a))?.scale(&half());
    Ok(vec![(format!("J^sh{}", n + 1), j), ("(id+|S|)/2".to_string(), sym)])
}

/// Remainder norms of the two Taylor truncations at leading order.
#[derive(Clone, Debug, PartialEq)]
pub struct WlMs {
    /// `⟨R^wl, R̂⟩` restricted to mean-square grade `n + 1`.
    pub cross: TimePoly,
    pub wl: TimePoly,
    pub ms: TimePoly,
    pub hat: TimePoly,
    /// Full cross term without the leading-grade restriction.
    pub cross_full: TimePoly,
}

impl WlMs {
    pub fn holds(&self, n: usize) -> bool {
        self.cross.is_zero()
            && self.ms.sub(&self.wl) == self.hat
            && self.hat.is_nonnegative()
            && self.cross_full.terms().all(|(k, _)| k as usize > n + 1)
    }
}

/// Compares `R^wl = π_{wl≥n+1}` with `R^ms = π_{ms≥n+1}` (minus the
/// `0^{n*}` row when `augmented` and `n` is odd).
pub fn wl_vs_ms(a: &Arc<Alphabet>, n: usize, gram: &GramSpec, augmented: bool) -> Result<WlMs> {
    need_grade(a, n + 1)?;
    let id = GradedEndo::identity(a);
    let r_wl = id.project(Grading::WordLength, GradeSel::Ge(n + 1));
    let mut r_ms = id.project(Grading::MeanSquare, GradeSel::Ge(n + 1));
    if augmented && n % 2 == 1 {
        let extra = Word::repeat(crate::word::Letter::Time, n.div_ceil(2));
        r_ms.set(extra, WordPoly::zero());
    }
    let hat = r_ms.sub(&r_wl)?;
    let lead = |f: &GradedEndo| f.project(Grading::MeanSquare, GradeSel::Eq(n + 1));
    Ok(WlMs {
        cross: inner_product(&lead(&r_wl), &lead(&hat), gram)?,
        wl: norm_sq(&lead(&r_wl), gram)?,
        ms: norm_sq(&lead(&r_ms), gram)?,
        hat: norm_sq(&lead(&hat), gram)?,
        cross_full: inner_product(&r_wl, &hat, gram)?,
    })
}

/// Over all pairs with `|u|, |v| <= max_len`: `E(u*v) = 0` iff the reduced
/// words differ, otherwise a single non-zero monomial of degree
/// `(gms(u) + gms(v)) / 2`. Returns (pairs checked, violations).
pub fn expectation_dichotomy(a: &Alphabet, max_len: usize) -> Result<(usize, Vec<(Word, Word)>)> {
    let words = a.words_up_to(max_len);
    let mut bad = Vec::new();
    let mut count = 0;
    for u in &words {
        for v in &words {
            count += 1;
            let e = expect_product(a, u, v)?;
            let ok = if u.reduce() != v.reduce() {
                e.is_zero()
            } else {
                let deg = (u.grade(Grading::MeanSquare) + v.grade(Grading::MeanSquare)) as u32;
                deg % 2 == 0 && matches!(e.as_monomial(), Some((k, c)) if 2 * k == deg && !c.is_zero())
            };
            if !ok {
                bad.push((u.clone(), v.clone()));
            }
        }
    }
    Ok((count, bad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn alph(n: usize) -> Arc<Alphabet> {
        Arc::new(Alphabet::standard(1, &[q(2)], n).unwrap())
    }

    #[test]
    fn hopf_small() {
        assert!(hopf_identity(&alph(3)).unwrap().is_empty());
    }

    #[test]
    fn gap_and_cross_terms_small() {
        let a = alph(2);
        let g = GramSpec::random(&a, 3);
        let gap = leading_gap(&a, 1, &g).unwrap();
        assert!(gap.holds());
        assert!(!gap.taylor.is_zero());
        let z = GramSpec::zero(&a);
        let zgap = leading_gap(&a, 1, &z).unwrap();
        assert!(zgap.taylor.is_zero() && zgap.antisymmetric.is_zero() && zgap.symmetric.is_zero());
        for (_, p) in standard_perturbations(&a, 1).unwrap() {
            assert!(perturbation_cross_term(&a, 1, &p, &g).unwrap().is_zero());
        }
        assert!(perturbation_cross_term(&a, 2, &GradedEndo::identity(&a), &g).is_err());
        // The identity is not reversal invariant.
        assert!(perturbation_cross_term(&a, 1, &GradedEndo::identity(&a), &g).is_err());
    }

    #[test]
    fn wl_ms_small() {
        let a = alph(2);
        let g = GramSpec::random(&a, 9);
        for aug in [false, true] {
            let r = wl_vs_ms(&a, 1, &g, aug).unwrap();
            assert!(r.holds(1), "{r:?}");
        }
    }

    #[test]
    fn dichotomy_small() {
        let (n, bad) = expectation_dichotomy(&alph(2), 2).unwrap();
        assert_eq!(n, 13 * 13);
        assert!(bad.is_empty());
    }

    #[test]
    fn symmetric_law_breaks_dichotomy() {
        let law = crate::word::JumpLaw::new(q(1), vec![(q(1), q(1)), (q(-1), q(1))]).unwrap();
        let a = Alphabet::new(0, vec![law], 2).unwrap();
        let (_, bad) = expectation_dichotomy(&a, 2).unwrap();
        assert!(!bad.is_empty());
    }
}
