//! Sparse group-algebra elements: finitely supported complex functions
//! on reduced words, with convolution, involution, and norms.

use crate::error::{FrepError, Result};
use crate::word::Word;
use crate::C64;
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::BTreeMap;
use std::fmt;

/// Finitely supported complex function on the free group on `k`
/// generators. Stored coefficients are always nonzero.
#[derive(Clone, PartialEq)]
pub struct GroupAlgebraElement {
    k: usize,
    terms: BTreeMap<Word, C64>,
}

impl GroupAlgebraElement {
    /// The zero element.
    pub fn zero(k: usize) -> Self {
        GroupAlgebraElement {
            k,
            terms: BTreeMap::new(),
        }
    }

    /// The unit: the point mass at the identity word.
    pub fn unit(k: usize) -> Self {
        GroupAlgebraElement::delta(k, Word::identity())
    }

    /// Point mass at `w` with coefficient one.
    pub fn delta(k: usize, w: Word) -> Self {
        GroupAlgebraElement::from_terms(k, [(w, C64::new(1.0, 0.0))])
    }

    /// Builds an element from (word, coefficient) pairs, summing repeated
    /// words and dropping exact-zero coefficients.
    pub fn from_terms<I>(k: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Word, C64)>,
    {
        let mut map = BTreeMap::new();
        for (w, c) in terms {
            let entry = map.entry(w).or_insert(C64::new(0.0, 0.0));
            *entry += c;
        }
        map.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        GroupAlgebraElement { k, terms: map }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coefficient(&self, w: &Word) -> C64 {
        self.terms.get(w).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    /// Support size.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterates terms in word order (length-first lexicographic).
    pub fn terms(&self) -> impl Iterator<Item = (&Word, C64)> {
        self.terms.iter().map(|(w, c)| (w, *c))
    }

    pub fn scale(&self, c: C64) -> Self {
        GroupAlgebraElement::from_terms(self.k, self.terms().map(|(w, x)| (w.clone(), c * x)))
    }

    pub fn add(&self, rhs: &Self) -> Result<Self> {
        self.check_k(rhs)?;
        Ok(GroupAlgebraElement::from_terms(
            self.k,
            self.terms()
                .chain(rhs.terms())
                .map(|(w, c)| (w.clone(), c)),
        ))
    }

    /// Convolution product: `(f*g)(w) = sum over uv = w of f(u) g(v)`.
    pub fn convolve(&self, rhs: &Self) -> Result<Self> {
        self.check_k(rhs)?;
        let mut out = BTreeMap::new();
        for (u, cu) in self.terms() {
            for (v, cv) in rhs.terms() {
                let w = u.multiply(v);
                let entry = out.entry(w).or_insert(C64::new(0.0, 0.0));
                *entry += cu * cv;
            }
        }
        out.retain(|_, c| c.re != 0.0 || c.im != 0.0);
        Ok(GroupAlgebraElement { k: self.k, terms: out })
    }

    /// Involution: `f*(w) = conj(f(w^-1))`.
    pub fn involution(&self) -> Self {
        GroupAlgebraElement::from_terms(
            self.k,
            self.terms().map(|(w, c)| (w.inverse(), c.conj())),
        )
    }

    /// Drops coefficients with absolute value at or below `threshold`.
    /// The default behavior everywhere else is exact (threshold zero);
    /// this exists to clean up solver noise.
    pub fn pruned(&self, threshold: f64) -> Self {
        GroupAlgebraElement {
            k: self.k,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() > threshold)
                .map(|(w, c)| (w.clone(), *c))
                .collect(),
        }
    }

    /// `(l1, l2, radius)`: the l1 and l2 coefficient norms and the
    /// largest word length in the support (0 for the zero element).
    pub fn norms(&self) -> (f64, f64, usize) {
        let l1 = self.terms().map(|(_, c)| c.norm()).sum();
        let l2 = self.terms().map(|(_, c)| c.norm_sqr()).sum::<f64>().sqrt();
        let radius = self.terms().map(|(w, _)| w.len()).max().unwrap_or(0);
        (l1, l2, radius)
    }

    pub fn l1_norm(&self) -> f64 {
        self.norms().0
    }

    pub fn radius(&self) -> usize {
        self.norms().2
    }

    fn check_k(&self, rhs: &Self) -> Result<()> {
        if self.k == rhs.k {
            Ok(())
        } else {
            Err(FrepError::GeneratorCountMismatch(self.k, rhs.k))
        }
    }
}

impl fmt::Debug for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupAlgebraElement(k={}; ", self.k)?;
        let mut first = true;
        for (w, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.4}{:+.4}i)·[{}]", c.re, c.im, w)?;
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, ")")
    }
}

/// A random reduced word of length exactly `len`: a non-backtracking
/// walk on the generating letters.
pub fn random_word<R: Rng>(k: usize, len: usize, rng: &mut R) -> Word {
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let l = loop {
            let code = rng.random_range(0..2 * k);
            let l = crate::word::Letter::from_code(code);
            if letters.last() != Some(&l.inverse()) {
                break l;
            }
        };
        letters.push(l);
    }
    Word::reduce(&letters, k).expect("non-backtracking walk is reduced")
}

/// A random element supported on at most `terms` distinct words of
/// length at most `radius`, with standard complex Gaussian coefficients.
pub fn random_element<R: Rng>(k: usize, radius: usize, terms: usize, rng: &mut R) -> GroupAlgebraElement {
    let mut pairs = Vec::with_capacity(terms);
    for _ in 0..terms {
        let len = rng.random_range(0..=radius);
        let w = random_word(k, len, rng);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        pairs.push((w, C64::new(re, im)));
    }
    GroupAlgebraElement::from_terms(k, pairs)
}
