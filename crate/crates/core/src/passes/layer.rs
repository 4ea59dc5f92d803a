//! Linear reversible (CNOT-only) layers over GF(2).

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, QubitSet};
use crate::error::{Error, Result};

/// Invertible `A` over GF(2) acting as `|x⟩ → |Ax⟩`; row `i` lists the input
/// bits XORed into output bit `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnotLayer {
    n: usize,
    rows: Vec<QubitSet>,
}

impl CnotLayer {
    pub fn identity(n: usize) -> Self {
        CnotLayer {
            n,
            rows: (0..n).map(QubitSet::singleton).collect(),
        }
    }

    /// Layer of a CNOT word given in time order.
    pub fn from_word(n: usize, word: &[(usize, usize)]) -> Self {
        let mut l = Self::identity(n);
        for &(c, t) in word {
            l.push(c, t);
        }
        l
    }

    pub fn from_rows(rows: Vec<QubitSet>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.last().is_some_and(|m| m >= n)) {
            return Err(Error::InvalidArgument("CNOT layer row out of range".into()));
        }
        let l = CnotLayer { n, rows };
        if !l.is_invertible() {
            return Err(Error::InvalidArgument("CNOT layer is singular over GF(2)".into()));
        }
        Ok(l)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> &[QubitSet] {
        &self.rows
    }

    /// Appends `CNOT(control → target)` after the layer.
    pub fn push(&mut self, control: usize, target: usize) {
        assert!(control != target && control < self.n && target < self.n);
        let r = self.rows[control].clone();
        self.rows[target] = self.rows[target].symmetric_difference(&r);
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &CnotLayer) -> CnotLayer {
        assert_eq!(self.n, next.n);
        let rows = next
            .rows
            .iter()
            .map(|r| {
                r.iter()
                    .fold(QubitSet::new(), |acc, j| acc.symmetric_difference(&self.rows[j]))
            })
            .collect();
        CnotLayer { n: self.n, rows }
    }

    pub fn is_identity(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, r)| r.len() == 1 && r.contains(i))
    }

    pub fn is_invertible(&self) -> bool {
        let mut m = self.rows.clone();
        for j in 0..self.n {
            let Some(p) = (j..self.n).find(|&r| m[r].contains(j)) else {
                return false;
            };
            m.swap(j, p);
            for i in 0..self.n {
                if i != j && m[i].contains(j) {
                    let pj = m[j].clone();
                    m[i] = m[i].symmetric_difference(&pj);
                }
            }
        }
        true
    }

    /// A CNOT word (time order) realizing the layer, by Gaussian elimination.
    pub fn word(&self) -> Vec<(usize, usize)> {
        let mut m = self.rows.clone();
        let mut ops = Vec::new();
        let mut op = |m: &mut Vec<QubitSet>, c: usize, t: usize| {
            let rc = m[c].clone();
            m[t] = m[t].symmetric_difference(&rc);
            ops.push((c, t));
        };
        for j in 0..self.n {
            if !m[j].contains(j) {
                let p = (j + 1..self.n)
                    .find(|&r| m[r].contains(j))
                    .expect("invertible layer");
                op(&mut m, p, j);
            }
            for i in 0..self.n {
                if i != j && m[i].contains(j) {
                    op(&mut m, j, i);
                }
            }
        }
        // E_k ⋯ E_1 A = I  ⇒  A = E_1 ⋯ E_k, so E_k acts first
        ops.reverse();
        ops
    }

    pub fn inverse(&self) -> CnotLayer {
        let mut w = self.word();
        w.reverse();
        CnotLayer::from_word(self.n, &w)
    }

    pub fn apply_bits(&self, x: &[bool]) -> Vec<bool> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(false, |acc, j| acc ^ x[j]))
            .collect()
    }

    pub fn apply_index(&self, x: usize) -> usize {
        self.rows.iter().enumerate().fold(0, |acc, (i, r)| {
            let bit = r.iter().fold(0, |b, j| b ^ ((x >> j) & 1));
            acc | (bit << i)
        })
    }

    pub fn to_circuit(&self) -> Circuit {
        Circuit::with_gates(
            self.n,
            self.word().into_iter().map(|(c, t)| Gate::cx(c, t)).collect(),
        )
    }

    /// Rows as hex strings, bit `j` of row `i` set when `A[i][j] = 1`.
    pub fn hex_rows(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                let mut bytes = vec![0u8; self.n.div_ceil(8).max(1)];
                for j in r.iter() {
                    bytes[j / 8] |= 1 << (j % 8);
                }
                bytes.reverse();
                hex::encode(bytes)
            })
            .collect()
    }

    pub fn from_hex_rows(rows: &[String]) -> Result<Self> {
        let n = rows.len();
        let parsed = rows
            .iter()
            .map(|h| {
                let mut bytes = hex::decode(h)
                    .map_err(|e| Error::InvalidArgument(format!("bad layer row `{h}`: {e}")))?;
                bytes.reverse();
                Ok((0..bytes.len() * 8)
                    .filter(|j| bytes[j / 8] >> (j % 8) & 1 == 1)
                    .collect::<QubitSet>())
            })
            .collect::<Result<Vec<_>>>()?;
        let l = Self::from_rows(parsed)?;
        debug_assert_eq!(l.n, n);
        Ok(l)
    }
}
