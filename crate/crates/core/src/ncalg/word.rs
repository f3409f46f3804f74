use num_traits::One;
use std::cmp::Ordering;
use std::fmt;

use super::coeff::Coeff;
use super::system::GeneratorSystem;

/// A single letter: an indeterminate `t_i` (zero-based) or a non-unit basis element `b_k` of B.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    T(usize),
    B(usize),
}

/// A canonical word: no two adjacent B-letters and no unit B-letter.
///
/// Words are ordered by degree first, then lexicographically, which keeps basis listings stable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn t(i: usize) -> Self {
        Word(vec![Letter::T(i)])
    }

    /// Wraps letters that are already known to be canonical.
    pub(crate) fn from_canonical(letters: Vec<Letter>) -> Self {
        debug_assert!(letters
            .windows(2)
            .all(|w| !matches!(w, [Letter::B(_), Letter::B(_)])));
        Word(letters)
    }

    /// Wraps letters without checking; validation happens where the word is used.
    pub(crate) fn from_canonical_unchecked(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Word in indeterminates only.
    pub fn from_indices(indices: &[usize]) -> Self {
        Word(indices.iter().map(|&i| Letter::T(i)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of indeterminate letters.
    pub fn degree(&self) -> usize {
        self.0.iter().filter(|l| matches!(l, Letter::T(_))).count()
    }

    pub fn is_pure_b(&self) -> bool {
        self.degree() == 0
    }

    /// Indices of the indeterminate letters in order; only meaningful when B = C.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().filter_map(|l| match l {
            Letter::T(i) => Some(*i),
            Letter::B(_) => None,
        })
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Word {
        Word(self.0[range].to_vec())
    }

    /// All words in indeterminates `0..n` of exactly degree `d`, in lexicographic order.
    pub fn all_of_degree(n: usize, d: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        for _ in 0..d {
            out = out
                .into_iter()
                .flat_map(|w| {
                    (0..n).map(move |i| {
                        let mut v = w.0.clone();
                        v.push(Letter::T(i));
                        Word(v)
                    })
                })
                .collect();
        }
        out
    }

    /// All words in indeterminates of degree `lo..=hi`, graded.
    pub fn all_up_to(n: usize, lo: usize, hi: usize) -> Vec<Word> {
        (lo..=hi).flat_map(|d| Word::all_of_degree(n, d)).collect()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.len().cmp(&other.0.len()))
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, l) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            match l {
                Letter::T(i) => write!(f, "t{}", i + 1)?,
                Letter::B(b) => write!(f, "b{b}")?,
            }
        }
        Ok(())
    }
}

/// Product of two canonical words, merging B-letters at the junction.
pub fn mul_words(sys: &GeneratorSystem, a: &Word, b: &Word) -> Vec<(Word, Coeff)> {
    match (a.0.last(), b.0.first(), sys.b()) {
        (Some(Letter::B(k)), Some(Letter::B(l)), Some(alg)) => alg
            .product(*k, *l)
            .iter()
            .map(|(m, c)| {
                let mut v = a.0[..a.0.len() - 1].to_vec();
                if *m != alg.unit() {
                    v.push(Letter::B(*m));
                }
                v.extend_from_slice(&b.0[1..]);
                (Word(v), c.clone())
            })
            .collect(),
        _ => vec![(a.concat(b), Coeff::one())],
    }
}
