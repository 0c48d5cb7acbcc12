use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_traits::One;

use super::expr::IntegralExpr;
use crate::endo::antipode_word;
use crate::error::{domain, Error, Result};
use crate::word::{Alphabet, Grading, Letter, Word, WordPoly};
use crate::{q, Q};

/// Which family a table belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SchemeKind {
    Taylor,
    Asri,
    Masri,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeKind::Taylor => "taylor",
            SchemeKind::Asri => "asri",
            SchemeKind::Masri => "masri",
        })
    }
}

impl FromStr for SchemeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "taylor" => Ok(SchemeKind::Taylor),
            "asri" => Ok(SchemeKind::Asri),
            "masri" => Ok(SchemeKind::Masri),
            _ => Err(Error::Parse(format!("unknown scheme kind {s:?}"))),
        }
    }
}

/// Executable scheme: rows `(operator word, integral expression)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemeTable {
    pub kind: SchemeKind,
    pub grading: Grading,
    pub order: usize,
    pub letters: Vec<Letter>,
    pub rows: Vec<(Word, IntegralExpr)>,
    pub required: BTreeSet<Word>,
}

impl SchemeTable {
    fn build(kind: SchemeKind, grading: Grading, order: usize, alphabet: &Alphabet, rows: Vec<(Word, IntegralExpr)>) -> Self {
        let required = rows.iter().flat_map(|(_, e)| e.factor_words()).collect();
        Self { kind, grading, order, letters: alphabet.letters().to_vec(), rows, required }
    }

    /// Table with no rows.
    pub fn empty(kind: SchemeKind, grading: Grading, order: usize) -> Self {
        Self { kind, grading, order, letters: Vec::new(), rows: Vec::new(), required: BTreeSet::new() }
    }

    pub fn row(&self, w: &Word) -> Option<&IntegralExpr> {
        self.rows.iter().find(|(x, _)| x == w).map(|(_, e)| e)
    }

    /// Short label such as `masri 2`.
    pub fn label(&self) -> String {
        match (self.kind, self.grading) {
            (SchemeKind::Taylor, Grading::WordLength) => format!("taylor-wl {}", self.order),
            (SchemeKind::Taylor, Grading::MeanSquare) => format!("taylor-ms {}", self.order),
            (k, _) => format!("{k} {}", self.order),
        }
    }

    /// Deterministic text form; parses back with [`str::parse`].
    pub fn serialize(&self) -> String {
        let mut s = String::from("# scheme table\n");
        s.push_str(&format!("kind {}\n", self.kind));
        s.push_str(&format!(
            "grading {}\n",
            match self.grading {
                Grading::WordLength => "wl",
                Grading::MeanSquare => "ms",
            }
        ));
        s.push_str(&format!("order {}\n", self.order));
        let letters: Vec<String> = self.letters.iter().map(ToString::to_string).collect();
        s.push_str(&format!("letters {}\n", letters.join(" ")).trim_end().to_string());
        s.push('\n');
        let req: Vec<String> = self.required.iter().map(ToString::to_string).collect();
        s.push_str(&format!("required {}", req.join(" ")).trim_end().to_string());
        s.push('\n');
        for (w, e) in &self.rows {
            s.push_str(&format!("row {w} : {e}\n"));
        }
        s
    }
}

impl FromStr for SchemeTable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut kind = None;
        let mut grading = None;
        let mut order = None;
        let mut letters = Vec::new();
        let mut required = BTreeSet::new();
        let mut rows = Vec::new();
        for line in s.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, rest) = line.split_once(' ').unwrap_or((line, ""));
            match key {
                "kind" => kind = Some(rest.trim().parse()?),
                "grading" => grading = Some(rest.trim().parse()?),
                "order" => {
                    order = Some(rest.trim().parse().map_err(|_| Error::Parse(format!("bad order {rest:?}")))?)
                }
                "letters" => {
                    letters = rest.split_whitespace().map(str::parse).collect::<Result<Vec<Letter>>>()?;
                }
                "required" => {
                    required = rest.split_whitespace().map(str::parse).collect::<Result<BTreeSet<Word>>>()?;
                }
                "row" => {
                    let (w, e) = rest
                        .split_once(" : ")
                        .ok_or_else(|| Error::Parse(format!("bad row {line:?}")))?;
                    rows.push((w.trim().parse()?, e.parse()?));
                }
                _ => return Err(Error::Parse(format!("unknown table line {line:?}"))),
            }
        }
        Ok(Self {
            kind: kind.ok_or_else(|| Error::Parse("missing kind".into()))?,
            grading: grading.ok_or_else(|| Error::Parse("missing grading".into()))?,
            order: order.ok_or_else(|| Error::Parse("missing order".into()))?,
            letters,
            rows,
            required,
        })
    }
}

fn taylor_rows(words: impl IntoIterator<Item = Word>) -> Vec<(Word, IntegralExpr)> {
    words.into_iter().map(|w| (w.clone(), IntegralExpr::integral(w))).collect()
}

/// Stochastic Taylor scheme truncated by word length.
pub fn taylor_wl(n: usize, alphabet: &Alphabet) -> SchemeTable {
    SchemeTable::build(SchemeKind::Taylor, Grading::WordLength, n, alphabet, taylor_rows(alphabet.words_up_to(n)))
}

/// Stochastic Taylor scheme truncated by mean-square grade, with the
/// `0^{n*}` row added for odd `n`.
pub fn taylor_ms(n: usize, alphabet: &Alphabet) -> SchemeTable {
    let mut words: Vec<Word> = alphabet
        .words_up_to(n)
        .into_iter()
        .filter(|w| w.grade(Grading::MeanSquare) <= n)
        .collect();
    if n % 2 == 1 {
        words.push(Word::repeat(Letter::Time, n.div_ceil(2)));
        words.sort();
    }
    SchemeTable::build(SchemeKind::Taylor, Grading::MeanSquare, n, alphabet, taylor_rows(words))
}

/// All compositions of `w` into `k` non-empty consecutive parts.
fn compositions(w: &Word, k: usize) -> Vec<Vec<Word>> {
    fn rec(w: &Word, start: usize, k: usize, cur: &mut Vec<Word>, out: &mut Vec<Vec<Word>>) {
        let n = w.len();
        if k == 1 {
            if start < n {
                cur.push(w.slice(start, n));
                out.push(cur.clone());
                cur.pop();
            }
            return;
        }
        for end in start + 1..=n.saturating_sub(k - 1) {
            cur.push(w.slice(start, end));
            rec(w, end, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(w, 0, k, &mut Vec::new(), &mut out);
    out
}

/// Leading-grade row of the direct antisymmetric sign reverse integrator:
/// `Σ_{k≥2} ((-1)^k/2) Σ_{u1..uk=w} Π I_{uj} + ½ I_{(S−Ŝ)(w)}`, or the
/// empty expression when `½(w + S(w))` vanishes.
fn asri_row(w: &Word, alphabet: &Alphabet) -> Result<IntegralExpr> {
    let n1 = w.len();
    let half = crate::qf(1, 2);
    let sign = |k: usize| if k % 2 == 0 { Q::one() } else { -Q::one() };
    let s_w = WordPoly::term(w.reversed(), sign(n1));
    let target = WordPoly::word(w.clone()).add(&s_w).scale(&half);
    if target.is_zero() {
        return Ok(IntegralExpr::zero());
    }
    let mut e = IntegralExpr::zero();
    for k in 2..=n1 {
        let c = sign(k) * &half;
        for parts in compositions(w, k) {
            e.add_term(parts, c.clone());
        }
    }
    let diff = s_w.sub(&antipode_word(alphabet, w)?);
    e.add_scaled(&IntegralExpr::from_word_poly(&diff), &half);
    let lin = e.linearize(alphabet)?;
    if lin != target {
        return domain(format!("row {w} linearizes to {lin}, expected {target}"));
    }
    Ok(e)
}

fn check_closed(n: usize, alphabet: &Alphabet) -> Result<()> {
    if n == 0 {
        return domain("scheme order must be at least 1");
    }
    if alphabet.max_grade() < n + 1 {
        return domain(format!(
            "alphabet is closed only to grade {}, order {n} needs {}",
            alphabet.max_grade(),
            n + 1
        ));
    }
    Ok(())
}

/// Direct antisymmetric sign reverse integrator of order `n`.
pub fn asri_direct(n: usize, alphabet: &Alphabet) -> Result<SchemeTable> {
    check_closed(n, alphabet)?;
    let mut rows = taylor_rows(alphabet.words_up_to(n));
    for w in alphabet.words_up_to(n + 1).into_iter().filter(|w| w.len() == n + 1) {
        rows.push((w.clone(), asri_row(&w, alphabet)?));
    }
    Ok(SchemeTable::build(SchemeKind::Asri, Grading::WordLength, n, alphabet, rows))
}

/// Expansion of `I_{a^k}` into products of shorter integrals through
/// `k·a^k = Σ_{i=1}^{k} (-1)^{i-1} [a^i] * a^{k-i}`.
pub fn reduce_repeated(a: Letter, k: usize, alphabet: &Alphabet) -> Result<IntegralExpr> {
    if k == 0 {
        return domain("k must be positive");
    }
    if !alphabet.contains(a) {
        return domain(format!("letter {a} is not in the alphabet"));
    }
    if k == 1 {
        return Ok(IntegralExpr::integral(Word::letter(a)));
    }
    let mut e = IntegralExpr::zero();
    for i in 1..=k {
        let bracket = alphabet.bracket_word(&Word::repeat(a, i))?;
        let lower = IntegralExpr::integral(Word::repeat(a, k - i));
        let c = if i % 2 == 1 { q(1) } else { q(-1) } / Q::from_integer((k as i64).into());
        e.add_scaled(&IntegralExpr::from_word_poly(&bracket).mul(&lower), &c);
    }
    let lin = e.linearize(alphabet)?;
    if lin != WordPoly::word(Word::repeat(a, k)) {
        return domain(format!("expansion of {a}^{k} linearizes to {lin}"));
    }
    Ok(e)
}

/// Modified integrator for even `n`: rows `a^{n+1}` restored through
/// [`reduce_repeated`].
pub fn asri_modified(n: usize, alphabet: &Alphabet) -> Result<SchemeTable> {
    if n % 2 == 1 {
        return domain("the modified integrator is defined for even n");
    }
    let base = asri_direct(n, alphabet)?;
    let mut rows = base.rows;
    for (w, e) in rows.iter_mut() {
        let l = w.letters();
        if l.len() == n + 1 && l.iter().all(|&x| x == l[0]) {
            *e = reduce_repeated(l[0], n + 1, alphabet)?;
        }
    }
    Ok(SchemeTable::build(SchemeKind::Masri, Grading::WordLength, n, alphabet, rows))
}
