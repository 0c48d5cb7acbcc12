use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::letter::{Letter, Word};
use super::poly::WordPoly;
use crate::error::{domain, Result};
use crate::{linalg, Q};

/// Finite-support jump-size law of a compound Poisson process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JumpLaw {
    intensity: Q,
    /// Distinct sizes with normalized weights, sorted by size.
    sizes: Vec<(Q, Q)>,
}

impl JumpLaw {
    /// Builds a law from `(size, weight)` pairs; weights are normalized and
    /// equal sizes merged.
    pub fn new(intensity: Q, sizes: Vec<(Q, Q)>) -> Result<Self> {
        if intensity <= Q::zero() {
            return domain("jump intensity must be positive");
        }
        if sizes.is_empty() {
            return domain("jump-size law needs at least one size");
        }
        let mut merged: BTreeMap<Q, Q> = BTreeMap::new();
        for (v, w) in sizes {
            if v.is_zero() {
                return domain("jump size 0 is not a jump");
            }
            if w <= Q::zero() {
                return domain("jump-size weights must be positive");
            }
            *merged.entry(v).or_insert_with(Q::zero) += w;
        }
        let total: Q = merged.values().sum();
        let sizes = merged.into_iter().map(|(v, w)| (v, w / &total)).collect();
        Ok(Self { intensity, sizes })
    }

    /// Standard Poisson process: every jump has size one.
    pub fn unit(intensity: Q) -> Result<Self> {
        Self::new(intensity, vec![(Q::one(), Q::one())])
    }

    pub fn intensity(&self) -> &Q {
        &self.intensity
    }

    pub fn sizes(&self) -> &[(Q, Q)] {
        &self.sizes
    }

    /// `E[v^m]` under the normalized size law.
    pub fn moment(&self, m: u32) -> Q {
        self.sizes
            .iter()
            .map(|(v, w)| w * num_traits::pow(v.clone(), m as usize))
            .sum()
    }

    /// `intensity * E[v^m]`, the compensator rate of the `m`-th power bracket.
    pub fn levy_moment(&self, m: u32) -> Q {
        &self.intensity * self.moment(m)
    }

    pub fn is_unit(&self) -> bool {
        self.sizes.len() == 1 && self.sizes[0].0.is_one()
    }
}

#[derive(Clone, Debug)]
struct JumpData {
    law: JumpLaw,
    /// Number of independent power-bracket letters.
    rank: u32,
    /// Row `p - rank - 1`: coefficients of `J^(p)` over `J^(1..=rank)`.
    collapse: Vec<Vec<Q>>,
}

/// Letters of a model: Time, `d` Wiener processes and jump processes with
/// their power-bracket letters, together with the maximal word length.
#[derive(Clone, Debug)]
pub struct Alphabet {
    wiener_count: u32,
    jumps: Vec<JumpData>,
    max_grade: usize,
    letters: Vec<Letter>,
}

impl Alphabet {
    pub fn new(wiener_count: u32, jumps: Vec<JumpLaw>, max_grade: usize) -> Result<Self> {
        if max_grade == 0 {
            return domain("max_grade must be at least 1");
        }
        let mut data = Vec::with_capacity(jumps.len());
        for law in jumps {
            let values: Vec<&Q> = law.sizes.iter().map(|(v, _)| v).collect();
            let rank = values.len() as u32;
            debug_assert_eq!(
                linalg::rank(
                    &(1..=rank)
                        .map(|q| values.iter().map(|v| num_traits::pow((*v).clone(), q as usize)).collect())
                        .collect::<Vec<_>>()
                ),
                rank as usize
            );
            let basis: Vec<Vec<Q>> = values
                .iter()
                .map(|v| (1..=rank).map(|q| num_traits::pow((*v).clone(), q as usize)).collect())
                .collect();
            // Enough rows for brackets of two stored letters.
            let mut collapse = Vec::new();
            for p in rank + 1..=2 * rank.max(1) + 2 * max_grade as u32 {
                let rhs: Vec<Q> = values.iter().map(|v| num_traits::pow((*v).clone(), p as usize)).collect();
                let c = linalg::solve(&basis, &rhs).expect("distinct nonzero sizes give a regular system");
                collapse.push(c);
            }
            data.push(JumpData { law, rank, collapse });
        }
        let mut letters = vec![Letter::Time];
        letters.extend((1..=wiener_count).map(Letter::Wiener));
        for (k, j) in data.iter().enumerate() {
            letters.extend((1..=j.rank).map(|p| Letter::jump_power(k as u32 + 1, p)));
        }
        Ok(Self { wiener_count, jumps: data, max_grade, letters })
    }

    /// `d` Wiener processes and unit-jump processes with the given intensities.
    pub fn standard(wiener_count: u32, intensities: &[Q], max_grade: usize) -> Result<Self> {
        let laws = intensities
            .iter()
            .map(|l| JumpLaw::unit(l.clone()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(wiener_count, laws, max_grade)
    }

    /// Same letters and laws with a different maximal grade.
    pub fn with_max_grade(&self, max_grade: usize) -> Result<Self> {
        Self::new(
            self.wiener_count,
            self.jumps.iter().map(|j| j.law.clone()).collect(),
            max_grade,
        )
    }

    pub fn wiener_count(&self) -> u32 {
        self.wiener_count
    }

    pub fn jump_count(&self) -> u32 {
        self.jumps.len() as u32
    }

    pub fn jump_law(&self, index: u32) -> Option<&JumpLaw> {
        self.jumps.get(index.checked_sub(1)? as usize).map(|j| &j.law)
    }

    pub fn jump_rank(&self, index: u32) -> Option<u32> {
        self.jumps.get(index.checked_sub(1)? as usize).map(|j| j.rank)
    }

    pub fn max_grade(&self) -> usize {
        self.max_grade
    }

    /// Letters in canonical order.
    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn contains(&self, a: Letter) -> bool {
        match a {
            Letter::Time => true,
            Letter::Wiener(i) => i >= 1 && i <= self.wiener_count,
            Letter::Jump { index, power } => self.jump_rank(index).is_some_and(|r| power >= 1 && power <= r),
        }
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        w.letters().iter().all(|&a| self.contains(a))
    }

    /// Intensity times the `m`-th size moment of jump process `index`.
    pub fn moment(&self, index: u32, m: u32) -> Result<Q> {
        match self.jump_law(index) {
            Some(l) => Ok(l.levy_moment(m)),
            None => domain(format!("unknown jump index {index}")),
        }
    }

    /// Expresses the compensated power bracket `J^(p)` in stored letters.
    pub fn collapse_power(&self, index: u32, p: u32) -> Result<WordPoly> {
        let Some(j) = self.jumps.get((index as usize).wrapping_sub(1)) else {
            return domain(format!("unknown jump index {index}"));
        };
        if p == 0 {
            return domain("power must be positive");
        }
        if p <= j.rank {
            return Ok(WordPoly::word(Word::letter(Letter::jump_power(index, p))));
        }
        let row = j
            .collapse
            .get((p - j.rank - 1) as usize)
            .ok_or_else(|| crate::Error::Domain(format!("power {p} beyond precomputed range")))?;
        Ok(row
            .iter()
            .enumerate()
            .map(|(k, c)| (Word::letter(Letter::jump_power(index, k as u32 + 1)), c.clone()))
            .collect())
    }

    /// Covariation bracket `[a, b]`, a polynomial of degree at most one.
    pub fn bracket(&self, a: Letter, b: Letter) -> Result<WordPoly> {
        for x in [a, b] {
            if !self.contains(x) {
                return domain(format!("letter {x} is not in the alphabet"));
            }
        }
        Ok(match (a, b) {
            (Letter::Wiener(i), Letter::Wiener(k)) if i == k => WordPoly::word(Word::letter(Letter::Time)),
            (Letter::Jump { index: i, power: p }, Letter::Jump { index: k, power: r }) if i == k => {
                let mut out = self.collapse_power(i, p + r)?;
                out.add_term(Word::letter(Letter::Time), self.moment(i, p + r)?);
                out
            }
            _ => WordPoly::zero(),
        })
    }

    /// Bracket for letters known to belong to the alphabet.
    pub(crate) fn bracket_unchecked(&self, a: Letter, b: Letter) -> WordPoly {
        self.bracket(a, b).expect("letters checked by caller")
    }

    /// Iterated bracket `[a1 a2 ... ak]` of a block of letters.
    pub fn bracket_word(&self, w: &Word) -> Result<WordPoly> {
        let mut it = w.letters().iter();
        let Some(&first) = it.next() else {
            return domain("bracket of the empty word");
        };
        if !self.contains(first) {
            return domain(format!("letter {first} is not in the alphabet"));
        }
        let mut acc = WordPoly::word(Word::letter(first));
        for &b in it {
            let mut next = WordPoly::zero();
            for (x, c) in acc.iter() {
                next.add_scaled(&self.bracket(x.letters()[0], b)?, c);
            }
            acc = next;
        }
        Ok(acc)
    }

    /// Canonical text describing letters, laws and maximal grade.
    pub fn descriptor(&self) -> String {
        let mut s = format!("d={};N={}", self.wiener_count, self.max_grade);
        for (k, j) in self.jumps.iter().enumerate() {
            s.push_str(&format!(";j{}:{}", k + 1, j.law.intensity));
            for (v, w) in &j.law.sizes {
                s.push_str(&format!(",{v}@{w}"));
            }
        }
        s
    }

    /// Every word of length `<= max_len`, in canonical order.
    pub fn words_up_to(&self, max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut layer = vec![Word::empty()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(layer.len() * self.letters.len());
            for w in &layer {
                for &a in &self.letters {
                    next.push(w.push(a));
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }

    /// The basis words of the truncated graded space.
    pub fn basis(&self) -> Vec<Word> {
        self.words_up_to(self.max_grade)
    }
}

impl PartialEq for Alphabet {
    fn eq(&self, other: &Self) -> bool {
        self.wiener_count == other.wiener_count
            && self.max_grade == other.max_grade
            && self.jumps.len() == other.jumps.len()
            && self.jumps.iter().zip(&other.jumps).all(|(a, b)| a.law == b.law)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, qf};

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn bracket_examples() {
        let a = Alphabet::standard(2, &[q(2)], 4).unwrap();
        assert!(a.bracket(Letter::Wiener(1), Letter::Wiener(2)).unwrap().is_zero());
        for x in a.letters() {
            assert!(a.bracket(Letter::Time, *x).unwrap().is_zero());
            assert!(a.bracket(*x, Letter::Time).unwrap().is_zero());
        }
        assert_eq!(
            a.bracket(Letter::Wiener(1), Letter::Wiener(1)).unwrap(),
            WordPoly::word(w("0"))
        );
        assert_eq!(
            a.bracket(Letter::jump(1), Letter::jump(1)).unwrap(),
            "2*0 + 1*j1".parse().unwrap()
        );
        assert!(a.bracket(Letter::Wiener(3), Letter::Time).is_err());
        assert!(a.bracket(Letter::jump_power(1, 2), Letter::Time).is_err());
    }

    #[test]
    fn collapse_unit_and_two_point() {
        let a = Alphabet::standard(0, &[q(3)], 3).unwrap();
        for p in 1..=6 {
            assert_eq!(a.collapse_power(1, p).unwrap(), WordPoly::word(w("j1")));
        }
        let law = JumpLaw::new(q(1), vec![(q(1), q(1)), (q(-1), q(1))]).unwrap();
        let b = Alphabet::new(0, vec![law], 3).unwrap();
        assert_eq!(b.jump_rank(1), Some(2));
        assert_eq!(b.collapse_power(1, 2).unwrap(), WordPoly::word(w("j1^2")));
        // v^3 = v on {+1, -1}.
        assert_eq!(b.collapse_power(1, 3).unwrap(), WordPoly::word(w("j1")));
        assert_eq!(b.collapse_power(1, 4).unwrap(), WordPoly::word(w("j1^2")));
        assert_eq!(b.moment(1, 2).unwrap(), q(1));
        assert_eq!(b.moment(1, 1).unwrap(), q(0));
    }

    #[test]
    fn collapse_single_size() {
        let law = JumpLaw::new(q(1), vec![(qf(1, 2), q(5))]).unwrap();
        let a = Alphabet::new(0, vec![law], 3).unwrap();
        assert_eq!(a.collapse_power(1, 3).unwrap(), WordPoly::term(w("j1"), qf(1, 4)));
    }

    #[test]
    fn law_validation() {
        assert!(JumpLaw::new(q(0), vec![(q(1), q(1))]).is_err());
        assert!(JumpLaw::new(q(1), vec![(q(0), q(1))]).is_err());
        assert!(JumpLaw::new(q(1), vec![(q(1), q(-1))]).is_err());
        let l = JumpLaw::new(q(2), vec![(q(1), q(1)), (q(1), q(3)), (q(2), q(4))]).unwrap();
        assert_eq!(l.sizes(), &[(q(1), qf(1, 2)), (q(2), qf(1, 2))]);
        assert_eq!(l.levy_moment(1), q(3));
    }

    #[test]
    fn basis_size() {
        let a = Alphabet::standard(1, &[q(2)], 4).unwrap();
        assert_eq!(a.letters().len(), 3);
        assert_eq!(a.basis().len(), 1 + 3 + 9 + 27 + 81);
    }

    #[test]
    fn iterated_bracket() {
        let a = Alphabet::standard(1, &[q(2)], 4).unwrap();
        assert!(a.bracket_word(&w("w1w1w1")).unwrap().is_zero());
        // [[N~, N~], N~] = [N, N~] = N = N~ + 2t.
        assert_eq!(a.bracket_word(&w("j1j1j1")).unwrap(), "2*0 + 1*j1".parse().unwrap());
    }
}
