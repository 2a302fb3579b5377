//! Words over a symmetric generating set.
//!
//! A [`Letter`] is a generator index together with a sign. Letters order as
//! `a < A < b < B < ...`, and [`Word`]s order shortlex (length first, then
//! lexicographic), which is the order used for every canonical representative
//! in the crate.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A signed generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    index: u16,
    inverse: bool,
}

impl Letter {
    pub const fn new(index: u16, inverse: bool) -> Self {
        Self { index, inverse }
    }

    pub const fn pos(index: u16) -> Self {
        Self::new(index, false)
    }

    pub const fn neg(index: u16) -> Self {
        Self::new(index, true)
    }

    pub fn index(self) -> usize {
        self.index as usize
    }

    pub fn is_inverse(self) -> bool {
        self.inverse
    }

    /// +1 or -1.
    pub fn sign(self) -> i64 {
        if self.inverse {
            -1
        } else {
            1
        }
    }

    pub fn inv(self) -> Self {
        Self {
            index: self.index,
            inverse: !self.inverse,
        }
    }

    /// Position of this letter in the ordered symmetric alphabet `a, A, b, B, ...`.
    pub fn slot(self) -> usize {
        2 * self.index as usize + self.inverse as usize
    }

    pub fn from_slot(slot: usize) -> Self {
        Self::new((slot / 2) as u16, slot % 2 == 1)
    }

    /// All `2 * rank` signed letters in slot order.
    pub fn all(rank: usize) -> impl Iterator<Item = Letter> + Clone {
        (0..2 * rank).map(Letter::from_slot)
    }
}

/// A finite sequence of letters. Words are values: every operation returns a
/// new word.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn from_letters(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn letter(l: Letter) -> Self {
        Self(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses the plain text syntax with the default alphabet `a, b, c, ...`.
    ///
    /// Lowercase letters are generators, uppercase their inverses; whitespace
    /// is ignored.
    pub fn parse(text: &str) -> Result<Self> {
        Alphabet::standard(26).parse_word(text)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Concatenation followed by free reduction.
    pub fn mul(&self, other: &Word) -> Word {
        let mut out = self.free_reduce().0;
        for &l in other.letters() {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn invert(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    /// The unique freely reduced word equal to `self` in the free group.
    pub fn free_reduce(&self) -> Word {
        let mut out = Vec::with_capacity(self.len());
        for &l in &self.0 {
            push_reduced(&mut out, l);
        }
        Word(out)
    }

    pub fn is_freely_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inv())
    }

    /// Splits a word into `(core, conjugator)` with `core` cyclically reduced
    /// and `conjugator * core * conjugator^-1` freely equal to `self`.
    pub fn cyclically_reduce(&self) -> (Word, Word) {
        let w = self.free_reduce().0;
        let mut lo = 0;
        let mut hi = w.len();
        while hi - lo >= 2 && w[lo] == w[hi - 1].inv() {
            lo += 1;
            hi -= 1;
        }
        (Word(w[lo..hi].to_vec()), Word(w[..lo].to_vec()))
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        self.is_freely_reduced()
            && match (self.0.first(), self.0.last()) {
                (Some(&f), Some(&l)) => self.len() == 1 || f != l.inv(),
                _ => true,
            }
    }

    /// `self^n` for any integer `n`, freely reduced. Powers of a conjugate are
    /// formed on the cyclic core so the result stays short.
    pub fn pow(&self, n: i64) -> Word {
        let (core, conj) = self.cyclically_reduce();
        let base = if n < 0 { core.invert() } else { core };
        let mut body = Vec::with_capacity(base.len() * n.unsigned_abs() as usize);
        for _ in 0..n.unsigned_abs() {
            body.extend_from_slice(base.letters());
        }
        conj.concat(&Word(body)).concat(&conj.invert()).free_reduce()
    }

    /// Cyclic rotation starting at position `k`.
    pub fn rotate(&self, k: usize) -> Word {
        if self.is_empty() {
            return Word::empty();
        }
        let k = k % self.len();
        let mut v = self.0[k..].to_vec();
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    pub fn subword(&self, start: usize, end: usize) -> Word {
        Word(self.0[start..end].to_vec())
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, rank: usize) -> Vec<i64> {
        let mut v = vec![0i64; rank];
        for l in &self.0 {
            if l.index() < rank {
                v[l.index()] += l.sign();
            }
        }
        v
    }

    pub fn max_generator(&self) -> Option<usize> {
        self.0.iter().map(|l| l.index()).max()
    }

    pub fn shortlex_cmp(&self, other: &Word) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }

    /// Smallest `p` such that the word is `u^(len/p)` for its prefix `u` of length `p`.
    pub fn primitive_period(&self) -> usize {
        let n = self.len();
        (1..=n)
            .find(|&p| n.is_multiple_of(p) && (p..n).all(|i| self.0[i] == self.0[i - p]))
            .unwrap_or(n)
    }
}

fn push_reduced(out: &mut Vec<Letter>, l: Letter) {
    if out.last() == Some(&l.inv()) {
        out.pop();
    } else {
        out.push(l);
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.shortlex_cmp(other)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&Alphabet::standard(26).format(self))
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Word::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Generator names. Lowercase is the generator, uppercase its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<char>,
}

impl Alphabet {
    /// `a, b, c, ...` up to `rank` generators (at most 26).
    pub fn standard(rank: usize) -> Self {
        Self {
            names: ('a'..='z').take(rank).collect(),
        }
    }

    pub fn from_names(names: Vec<char>) -> Result<Self> {
        for (i, &c) in names.iter().enumerate() {
            if !c.is_ascii_lowercase() {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("generator name {c:?} is not a lowercase ASCII letter"),
                });
            }
            if names[..i].contains(&c) {
                return Err(Error::Parse {
                    line: 0,
                    message: format!("generator {c:?} declared twice"),
                });
            }
        }
        Ok(Self { names })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[char] {
        &self.names
    }

    pub fn letter_char(&self, l: Letter) -> char {
        let c = self.names.get(l.index()).copied().unwrap_or('?');
        if l.is_inverse() {
            c.to_ascii_uppercase()
        } else {
            c
        }
    }

    pub fn parse_letter(&self, c: char) -> Option<Letter> {
        let lower = c.to_ascii_lowercase();
        let idx = self.names.iter().position(|&n| n == lower)?;
        Some(Letter::new(idx as u16, c.is_ascii_uppercase()))
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| {
                self.parse_letter(c).ok_or_else(|| Error::Parse {
                    line: 0,
                    message: format!("letter {c:?} is outside the alphabet"),
                })
            })
            .collect()
    }

    pub fn format(&self, w: &Word) -> String {
        w.letters().iter().map(|&l| self.letter_char(l)).collect()
    }
}
