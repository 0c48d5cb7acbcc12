use crate::error::{domain, Result};
use crate::word::{Alphabet, Letter, Word};
use crate::to_f64;

/// Floating-point view of one jump process.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpModel {
    pub intensity: f64,
    pub sizes: Vec<f64>,
    cumulative: Vec<f64>,
    /// Entry `q - 1`: compensator rate `intensity * E[v^q]` of letter `J^(q)`.
    pub compensators: Vec<f64>,
    pub rank: u32,
    offset: usize,
}

impl JumpModel {
    /// Draws a size from a uniform variate in `[0, 1)`.
    pub fn size_from_uniform(&self, u: f64) -> f64 {
        let k = self.cumulative.iter().position(|&c| u < c).unwrap_or(self.sizes.len() - 1);
        self.sizes[k]
    }

    pub fn compensator(&self, power: u32) -> f64 {
        self.compensators[power as usize - 1]
    }
}

/// Letter layout of a driver alphabet: slot 0 is Time, slots `1..=d` the
/// Wiener letters, then the power letters of each jump process.
#[derive(Clone, Debug, PartialEq)]
pub struct DriverModel {
    letters: Vec<Letter>,
    wiener_count: usize,
    jumps: Vec<JumpModel>,
    descriptor: String,
}

impl DriverModel {
    pub fn new(alphabet: &Alphabet) -> Self {
        let d = alphabet.wiener_count() as usize;
        let mut jumps = Vec::new();
        let mut offset = 1 + d;
        for j in 1..=alphabet.jump_count() {
            let law = alphabet.jump_law(j).expect("index in range");
            let rank = alphabet.jump_rank(j).expect("index in range");
            let sizes: Vec<f64> = law.sizes().iter().map(|(v, _)| to_f64(v)).collect();
            let mut acc = 0.0;
            let mut cumulative: Vec<f64> = law
                .sizes()
                .iter()
                .map(|(_, w)| {
                    acc += to_f64(w);
                    acc
                })
                .collect();
            if let Some(last) = cumulative.last_mut() {
                *last = 1.0;
            }
            let compensators = (1..=rank).map(|q| to_f64(&law.levy_moment(q))).collect();
            jumps.push(JumpModel {
                intensity: to_f64(law.intensity()),
                sizes,
                cumulative,
                compensators,
                rank,
                offset,
            });
            offset += rank as usize;
        }
        Self { letters: alphabet.letters().to_vec(), wiener_count: d, jumps, descriptor: alphabet.descriptor() }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn letter_count(&self) -> usize {
        self.letters.len()
    }

    pub fn wiener_count(&self) -> usize {
        self.wiener_count
    }

    pub fn jumps(&self) -> &[JumpModel] {
        &self.jumps
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    /// Dense slot of a letter.
    pub fn slot(&self, a: Letter) -> Option<usize> {
        match a {
            Letter::Time => Some(0),
            Letter::Wiener(i) => ((i as usize) >= 1 && (i as usize) <= self.wiener_count).then_some(i as usize),
            Letter::Jump { index, power } => {
                let j = self.jumps.get((index as usize).checked_sub(1)?)?;
                (power >= 1 && power <= j.rank).then(|| j.offset + power as usize - 1)
            }
        }
    }

    /// Whether a sample can provide `I_w`: words of length at most two,
    /// words over Time and jump letters, and powers of one Wiener letter.
    pub fn supports(&self, w: &Word) -> bool {
        if !w.letters().iter().all(|&a| self.slot(a).is_some()) {
            return false;
        }
        w.len() <= 2
            || w.letters().iter().all(|a| !matches!(a, Letter::Wiener(_)))
            || w.letters().iter().all(|&a| a == w.letters()[0])
    }

    pub fn check_supported<'a>(&self, words: impl IntoIterator<Item = &'a Word>) -> Result<()> {
        for w in words {
            if !self.supports(w) {
                return Err(crate::Error::UnsupportedWord(w.to_string()));
            }
        }
        Ok(())
    }

    pub(crate) fn require_same(&self, other: &DriverModel) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            domain("samples come from different driver models")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{q, word::JumpLaw};

    #[test]
    fn slots_and_support() {
        let law = JumpLaw::new(q(2), vec![(q(1), q(1)), (q(2), q(1))]).unwrap();
        let a = Alphabet::new(2, vec![JumpLaw::unit(q(3)).unwrap(), law], 3).unwrap();
        let m = DriverModel::new(&a);
        assert_eq!(m.letter_count(), 6);
        assert_eq!(m.slot(Letter::Time), Some(0));
        assert_eq!(m.slot(Letter::Wiener(2)), Some(2));
        assert_eq!(m.slot(Letter::jump(1)), Some(3));
        assert_eq!(m.slot(Letter::jump_power(2, 2)), Some(5));
        assert_eq!(m.slot(Letter::jump_power(1, 2)), None);
        assert_eq!(m.jumps()[1].compensator(2), 5.0);
        let w = |s: &str| s.parse::<Word>().unwrap();
        assert!(m.supports(&w("w1w2")));
        assert!(m.supports(&w("0j1j2^20")));
        assert!(m.supports(&w("w1w1w1w1")));
        assert!(!m.supports(&w("w1w10")));
        assert!(!m.supports(&w("w3")));
        assert!(m.check_supported([&w("w10w1")]).is_err());
        assert_eq!(m.jumps()[1].size_from_uniform(0.2), 1.0);
        assert_eq!(m.jumps()[1].size_from_uniform(0.7), 2.0);
    }
}
