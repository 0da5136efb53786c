//! Involutive alphabets and words.
//!
//! An alphabet here is a finite set of edge labels closed under a
//! fixed-point-free involution `a <-> inv(a)`. Because the involution has no
//! fixed points there is no identity-labeled letter: every letter moves along
//! an edge and its partner moves back.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index of a letter within its [`Alphabet`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Letter(pub u16);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word is a sequence of letters, applied left to right.
pub type Word = Vec<Letter>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("duplicate letter name {0:?}")]
    DuplicateName(String),
    #[error("involution maps letter {0} out of range")]
    InvolutionRange(usize),
    #[error("involution is not self-inverse at letter {0:?}")]
    NotInvolutive(String),
    #[error("involution fixes letter {0:?}; identity labels are excluded")]
    FixedPoint(String),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("empty letter name")]
    EmptyName,
}

/// Finite involutive alphabet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    inv: Vec<Letter>,
    index: BTreeMap<String, Letter>,
}

impl Alphabet {
    /// Build from explicit names and an involution given as index pairs.
    pub fn new(names: Vec<String>, inv: Vec<usize>) -> Result<Self, AlphabetError> {
        let mut index = BTreeMap::new();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(AlphabetError::EmptyName);
            }
            if index.insert(n.clone(), Letter(i as u16)).is_some() {
                return Err(AlphabetError::DuplicateName(n.clone()));
            }
        }
        if inv.len() != names.len() {
            return Err(AlphabetError::InvolutionRange(inv.len()));
        }
        for (i, &j) in inv.iter().enumerate() {
            if j >= names.len() {
                return Err(AlphabetError::InvolutionRange(i));
            }
            if inv[j] != i {
                return Err(AlphabetError::NotInvolutive(names[i].clone()));
            }
            if j == i {
                return Err(AlphabetError::FixedPoint(names[i].clone()));
            }
        }
        Ok(Alphabet {
            names,
            inv: inv.into_iter().map(|j| Letter(j as u16)).collect(),
            index,
        })
    }

    /// Build from generator names; each generator `x` gets an inverse named `x'`.
    pub fn symmetric(generators: &[&str]) -> Self {
        let mut names = Vec::with_capacity(generators.len() * 2);
        let mut inv = Vec::with_capacity(generators.len() * 2);
        for (k, g) in generators.iter().enumerate() {
            names.push((*g).to_string());
            names.push(format!("{g}'"));
            inv.push(2 * k + 1);
            inv.push(2 * k);
        }
        Alphabet::new(names, inv).expect("generator alphabet is always well formed")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.names.len()).map(|i| Letter(i as u16))
    }

    pub fn inv(&self, a: Letter) -> Letter {
        self.inv[a.index()]
    }

    pub fn name(&self, a: Letter) -> &str {
        &self.names[a.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<Letter> {
        self.index.get(name).copied()
    }

    /// Parse a single token: either a declared name, or `x'` for the inverse of `x`.
    pub fn parse_letter(&self, token: &str) -> Result<Letter, AlphabetError> {
        if let Some(l) = self.lookup(token) {
            return Ok(l);
        }
        if let Some(base) = token.strip_suffix('\'') {
            if let Some(l) = self.lookup(base) {
                return Ok(self.inv(l));
            }
        }
        Err(AlphabetError::UnknownLetter(token.to_string()))
    }

    /// Parse a whitespace-separated word; the empty string is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<Word, AlphabetError> {
        text.split_whitespace().map(|t| self.parse_letter(t)).collect()
    }

    pub fn format_word(&self, w: &[Letter]) -> String {
        w.iter().map(|&a| self.name(a)).collect::<Vec<_>>().join(" ")
    }

    /// Formal inverse: reverse the word and invert each letter.
    pub fn invert_word(&self, w: &[Letter]) -> Word {
        w.iter().rev().map(|&a| self.inv(a)).collect()
    }

    /// Remove factors `a inv(a)` until none remain. The result is the unique
    /// freely reduced representative of the word.
    pub fn free_reduce(&self, w: &[Letter]) -> Word {
        let mut out: Word = Vec::with_capacity(w.len());
        for &a in w {
            if let Some(&last) = out.last() {
                if self.inv(last) == a {
                    out.pop();
                    continue;
                }
            }
            out.push(a);
        }
        out
    }

    pub fn is_reduced(&self, w: &[Letter]) -> bool {
        w.windows(2).all(|p| self.inv(p[0]) != p[1])
    }

    /// Merge two alphabets with disjoint name sets (letters of `self` keep
    /// their indices; letters of `other` are appended).
    pub fn disjoint_union(&self, other: &Alphabet) -> Result<Alphabet, AlphabetError> {
        let mut names = self.names.clone();
        let mut inv: Vec<usize> = self.inv.iter().map(|l| l.index()).collect();
        let offset = names.len();
        for n in &other.names {
            names.push(n.clone());
        }
        for l in &other.inv {
            inv.push(l.index() + offset);
        }
        Alphabet::new(names, inv)
    }

    /// Extend with extra generator pairs (used for loop padding).
    pub fn extended_with(&self, generators: &[&str]) -> Result<Alphabet, AlphabetError> {
        self.disjoint_union(&Alphabet::symmetric(generators))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

/// Serialization schema for alphabets in the JSON file formats: positive/inverse
/// structure is encoded by explicit name and involution arrays.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphabetSchema {
    pub letters: Vec<String>,
    pub inverse: Vec<usize>,
}

impl From<&Alphabet> for AlphabetSchema {
    fn from(a: &Alphabet) -> Self {
        AlphabetSchema {
            letters: a.names.clone(),
            inverse: a.inv.iter().map(|l| l.index()).collect(),
        }
    }
}

impl TryFrom<AlphabetSchema> for Alphabet {
    type Error = AlphabetError;
    fn try_from(s: AlphabetSchema) -> Result<Self, AlphabetError> {
        Alphabet::new(s.letters, s.inverse)
    }
}
