use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A driving-process symbol. The derived order is the canonical one:
/// `Time < Wiener(i) < Jump(i, p)`, ties broken by index then power.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Time,
    Wiener(u32),
    Jump { index: u32, power: u32 },
}

impl Letter {
    pub fn jump(index: u32) -> Self {
        Letter::Jump { index, power: 1 }
    }

    pub fn jump_power(index: u32, power: u32) -> Self {
        Letter::Jump { index, power }
    }

    pub fn is_time(self) -> bool {
        matches!(self, Letter::Time)
    }

    /// Weight under the power-bracket grading (Time counts 2).
    pub fn power_grade(self) -> usize {
        match self {
            Letter::Time => 2,
            Letter::Wiener(_) => 1,
            Letter::Jump { power, .. } => power as usize,
        }
    }

    /// `Time` and `Jump(i, p)` collapse to their reduced forms.
    pub fn reduced(self) -> Option<Letter> {
        match self {
            Letter::Time => None,
            Letter::Wiener(i) => Some(Letter::Wiener(i)),
            Letter::Jump { index, .. } => Some(Letter::jump(index)),
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, n: u32) -> fmt::Result {
    if n < 10 {
        write!(f, "{n}")
    } else {
        write!(f, "{{{n}}}")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Letter::Time => f.write_str("0"),
            Letter::Wiener(i) => {
                f.write_str("w")?;
                write_num(f, i)
            }
            Letter::Jump { index, power } => {
                f.write_str("j")?;
                write_num(f, index)?;
                if power != 1 {
                    f.write_str("^")?;
                    write_num(f, power)?;
                }
                Ok(())
            }
        }
    }
}

/// Which additive size a word is measured by.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Grading {
    WordLength,
    MeanSquare,
}

impl FromStr for Grading {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wl" | "word-length" => Ok(Grading::WordLength),
            "ms" | "mean-square" => Ok(Grading::MeanSquare),
            _ => Err(Error::Parse(format!("unknown grading {s:?}"))),
        }
    }
}

/// A finite sequence of letters; the empty word renders as `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: impl Into<Vec<Letter>>) -> Self {
        Word(letters.into())
    }

    pub fn letter(a: Letter) -> Self {
        Word(vec![a])
    }

    pub fn repeat(a: Letter, k: usize) -> Self {
        Word(vec![a; k])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&self, a: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(a);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn time_count(&self) -> usize {
        self.0.iter().filter(|a| a.is_time()).count()
    }

    pub fn is_all_time(&self) -> bool {
        self.0.iter().all(|a| a.is_time())
    }

    pub fn grade(&self, g: Grading) -> usize {
        match g {
            Grading::WordLength => self.len(),
            Grading::MeanSquare => self.len() + self.time_count(),
        }
    }

    pub fn power_grade(&self) -> usize {
        self.0.iter().map(|a| a.power_grade()).sum()
    }

    /// Drops Time letters and maps every jump power letter to its base.
    pub fn reduce(&self) -> Word {
        Word(self.0.iter().filter_map(|a| a.reduced()).collect())
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word(self.0[from..to].to_vec())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<Letter> for Word {
    fn from(a: Letter) -> Self {
        Word::letter(a)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for a in &self.0 {
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

fn read_num(chars: &[char], pos: &mut usize) -> Result<u32> {
    let c = *chars
        .get(*pos)
        .ok_or_else(|| Error::Parse("expected a digit".into()))?;
    if c == '{' {
        let end = chars[*pos..]
            .iter()
            .position(|&x| x == '}')
            .ok_or_else(|| Error::Parse("unclosed brace".into()))?;
        let s: String = chars[*pos + 1..*pos + end].iter().collect();
        *pos += end + 1;
        s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
    } else if let Some(d) = c.to_digit(10) {
        *pos += 1;
        Ok(d)
    } else {
        Err(Error::Parse(format!("expected a digit, found {c:?}")))
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::empty());
        }
        if s.is_empty() {
            return Err(Error::Parse("empty word text".into()));
        }
        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let mut out = Vec::new();
        while pos < chars.len() {
            match chars[pos] {
                '0' => {
                    pos += 1;
                    out.push(Letter::Time);
                }
                'w' => {
                    pos += 1;
                    let i = read_num(&chars, &mut pos)?;
                    if i == 0 {
                        return Err(Error::Parse("Wiener index must be positive".into()));
                    }
                    out.push(Letter::Wiener(i));
                }
                'j' => {
                    pos += 1;
                    let index = read_num(&chars, &mut pos)?;
                    let mut power = 1;
                    if chars.get(pos) == Some(&'^') {
                        pos += 1;
                        power = read_num(&chars, &mut pos)?;
                    }
                    if index == 0 || power == 0 {
                        return Err(Error::Parse("jump index and power must be positive".into()));
                    }
                    out.push(Letter::Jump { index, power });
                }
                c => return Err(Error::Parse(format!("unexpected character {c:?} in {s:?}"))),
            }
        }
        Ok(Word(out))
    }
}

impl FromStr for Letter {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let w: Word = s.parse()?;
        match w.0.as_slice() {
            [a] => Ok(*a),
            _ => Err(Error::Parse(format!("{s:?} is not a single letter"))),
        }
    }
}
