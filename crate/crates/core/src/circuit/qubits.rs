use std::fmt;

use serde::{Deserialize, Serialize};

/// Pauli axis of a rotation, gadget or generalized-CNOT operand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        }
    }

    pub fn parse(s: &str) -> Option<Axis> {
        match s {
            "X" | "x" => Some(Axis::X),
            "Y" | "y" => Some(Axis::Y),
            "Z" | "z" => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sorted set of qubit indices backed by a bitset.
///
/// Trailing zero words are always trimmed so that equal sets compare and
/// hash equal regardless of how they were built.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitSet {
    words: Vec<u64>,
}

impl QubitSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(q: usize) -> Self {
        let mut s = Self::new();
        s.insert(q);
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn contains(&self, q: usize) -> bool {
        self.words
            .get(q / 64)
            .is_some_and(|w| (w >> (q % 64)) & 1 == 1)
    }

    pub fn insert(&mut self, q: usize) {
        let w = q / 64;
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        self.words[w] |= 1 << (q % 64);
    }

    pub fn remove(&mut self, q: usize) {
        if let Some(w) = self.words.get_mut(q / 64) {
            *w &= !(1 << (q % 64));
        }
        self.trim();
    }

    pub fn toggle(&mut self, q: usize) {
        if self.contains(q) {
            self.remove(q);
        } else {
            self.insert(q);
        }
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn intersection_len(&self, other: &QubitSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn is_disjoint(&self, other: &QubitSet) -> bool {
        self.intersection_len(other) == 0
    }

    pub fn union(&self, other: &QubitSet) -> QubitSet {
        let n = self.words.len().max(other.words.len());
        let words = (0..n)
            .map(|i| self.words.get(i).unwrap_or(&0) | other.words.get(i).unwrap_or(&0))
            .collect();
        QubitSet { words }
    }

    pub fn intersection(&self, other: &QubitSet) -> QubitSet {
        let mut s = QubitSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        };
        s.trim();
        s
    }

    pub fn symmetric_difference(&self, other: &QubitSet) -> QubitSet {
        let n = self.words.len().max(other.words.len());
        let mut s = QubitSet {
            words: (0..n)
                .map(|i| self.words.get(i).unwrap_or(&0) ^ other.words.get(i).unwrap_or(&0))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn difference(&self, other: &QubitSet) -> QubitSet {
        let mut s = QubitSet {
            words: self
                .words
                .iter()
                .enumerate()
                .map(|(i, a)| a & !other.words.get(i).unwrap_or(&0))
                .collect(),
        };
        s.trim();
        s
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn last(&self) -> Option<usize> {
        let (i, w) = self.words.iter().enumerate().next_back()?;
        Some(i * 64 + 63 - w.leading_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl FromIterator<usize> for QubitSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = QubitSet::new();
        for q in iter {
            s.insert(q);
        }
        s
    }
}

impl<const K: usize> From<[usize; K]> for QubitSet {
    fn from(qs: [usize; K]) -> Self {
        qs.into_iter().collect()
    }
}

impl fmt::Debug for QubitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for QubitSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for QubitSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        Ok(v.into_iter().collect())
    }
}
