//! Reduced words of the free group on `k` generators.
//!
//! A letter is a generator or a generator inverse. The string encoding
//! uses lowercase `a, b, c, ...` for generators and uppercase
//! `A, B, C, ...` for their inverses; the empty string is the identity.
//! Letters are ordered `a < A < b < B < ...`, and words are ordered
//! length first, then lexicographically — the order produced by
//! [`enumerate_words`].

use crate::error::{FrepError, Result};
use std::cmp::Ordering;
use std::fmt;

/// One letter: a generator (`a`, `b`, ...) or an inverse (`A`, `B`, ...).
///
/// Stored as a code `2 * generator + inverse_bit`, so the natural code
/// order is the word order `a < A < b < B < ...` and inversion is a
/// single bit flip.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter(pub(crate) u8);

impl Letter {
    /// Letter for 0-based generator `gen`, inverse if `inverse` is set.
    pub fn new(gen: usize, inverse: bool) -> Self {
        debug_assert!(gen < 26);
        Letter((2 * gen + usize::from(inverse)) as u8)
    }

    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn from_code(code: usize) -> Self {
        debug_assert!(code < 52);
        Letter(code as u8)
    }

    /// 0-based generator index.
    pub fn generator(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Self {
        Letter(self.0 ^ 1)
    }

    pub fn to_char(self) -> char {
        let base = if self.is_inverse() { b'A' } else { b'a' };
        (base + self.generator() as u8) as char
    }

    pub fn from_char(c: char) -> Result<Self> {
        match c {
            'a'..='z' => Ok(Letter::new(c as usize - 'a' as usize, false)),
            'A'..='Z' => Ok(Letter::new(c as usize - 'A' as usize, true)),
            _ => Err(FrepError::BadWordCharacter(c)),
        }
    }
}

impl fmt::Debug for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A reduced word: no adjacent letter is followed by its inverse.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    /// The identity word.
    pub fn identity() -> Self {
        Word { letters: Vec::new() }
    }

    /// Single-letter word.
    pub fn letter(l: Letter) -> Self {
        Word { letters: vec![l] }
    }

    /// Word for 0-based generator `gen` (or its inverse).
    pub fn generator(gen: usize, inverse: bool) -> Self {
        Word::letter(Letter::new(gen, inverse))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Builds a word from raw letters by free reduction.
    ///
    /// Cancellation is confluent, so the result does not depend on the
    /// order in which adjacent inverse pairs are removed; this
    /// implementation uses a single left-to-right stack pass. Letters
    /// must name generators below `k`.
    pub fn reduce(raw: &[Letter], k: usize) -> Result<Self> {
        check_k(k)?;
        let mut stack: Vec<Letter> = Vec::with_capacity(raw.len());
        for &l in raw {
            if l.generator() >= k {
                return Err(FrepError::GeneratorOutOfRange {
                    index: l.generator(),
                    k,
                });
            }
            if stack.last() == Some(&l.inverse()) {
                stack.pop();
            } else {
                stack.push(l);
            }
        }
        Ok(Word { letters: stack })
    }

    /// Parses the string encoding, reducing as needed.
    pub fn parse(s: &str, k: usize) -> Result<Self> {
        let letters: Vec<Letter> = s.chars().map(Letter::from_char).collect::<Result<_>>()?;
        Word::reduce(&letters, k)
    }

    /// Parses the string encoding, rejecting words that are not already
    /// reduced. This is the loader-side entry point for file formats.
    pub fn parse_reduced(s: &str, k: usize) -> Result<Self> {
        let w = Word::parse(s, k)?;
        if w.len() != s.chars().count() {
            return Err(FrepError::UnreducedWord(s.to_string()));
        }
        Ok(w)
    }

    /// Constructs a word from letters that are already known reduced.
    pub(crate) fn from_reduced(letters: Vec<Letter>) -> Self {
        debug_assert!(letters
            .windows(2)
            .all(|p| p[0] != p[1].inverse()));
        Word { letters }
    }

    /// Product of two reduced words, reduced.
    ///
    /// Cancellation can only happen across the junction, so it suffices
    /// to pop matched pairs at the boundary.
    pub fn multiply(&self, rhs: &Word) -> Word {
        let mut left = self.letters.clone();
        let mut start = 0;
        while let Some(&l) = left.last() {
            if start < rhs.letters.len() && rhs.letters[start] == l.inverse() {
                left.pop();
                start += 1;
            } else {
                break;
            }
        }
        left.extend_from_slice(&rhs.letters[start..]);
        Word { letters: left }
    }

    /// Inverse word: reverse the letters and flip each one.
    pub fn inverse(&self) -> Word {
        Word {
            letters: self.letters.iter().rev().map(|l| l.inverse()).collect(),
        }
    }

    /// Largest generator index used, if any.
    pub fn max_generator(&self) -> Option<usize> {
        self.letters.iter().map(|l| l.generator()).max()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{}\"", self)
    }
}

/// Length-first, then lexicographic by letter code.
impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn check_k(k: usize) -> Result<()> {
    if (2..=26).contains(&k) {
        Ok(())
    } else {
        Err(FrepError::BadGeneratorCount(k))
    }
}

/// Number of reduced words of length exactly `n` on `k` generators:
/// `1` for `n = 0`, else `2k (2k-1)^(n-1)`.
pub fn words_of_length(k: usize, n: usize) -> u64 {
    if n == 0 {
        1
    } else {
        2 * k as u64 * (2 * k as u64 - 1).pow(n as u32 - 1)
    }
}

/// All reduced words of length at most `max_len`, in length-first
/// lexicographic order (`a < A < b < B < ...`).
pub fn enumerate_words(k: usize, max_len: usize) -> Result<Vec<Word>> {
    check_k(k)?;
    let mut total = 0u64;
    for n in 0..=max_len {
        total += words_of_length(k, n);
    }
    let mut out = Vec::with_capacity(total as usize);
    out.push(Word::identity());
    let mut level_start = 0;
    for _ in 1..=max_len {
        let level_end = out.len();
        for i in level_start..level_end {
            let last = out[i].letters.last().copied();
            for code in 0..2 * k {
                let l = Letter::from_code(code);
                if last == Some(l.inverse()) {
                    continue;
                }
                let mut letters = out[i].letters.clone();
                letters.push(l);
                out.push(Word::from_reduced(letters));
            }
        }
        level_start = level_end;
    }
    Ok(out)
}
