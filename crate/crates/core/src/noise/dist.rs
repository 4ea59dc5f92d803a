use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Probability distribution over `width`-bit outcomes. `total_shots` is 0
/// for exact distributions.
#[derive(Debug, Clone, PartialEq)]
pub struct ShotDistribution {
    pub width: usize,
    pub probs: BTreeMap<u64, f64>,
    pub total_shots: u64,
}

impl ShotDistribution {
    /// Exact distribution from a dense probability vector indexed by outcome.
    pub fn from_dense(width: usize, probs: &[f64]) -> Self {
        ShotDistribution {
            width,
            probs: probs
                .iter()
                .enumerate()
                .filter(|(_, p)| **p > 0.0)
                .map(|(x, p)| (x as u64, *p))
                .collect(),
            total_shots: 0,
        }
    }

    pub fn from_counts(width: usize, counts: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let counts: Vec<_> = counts.into_iter().filter(|c| c.1 > 0).collect();
        let total: u64 = counts.iter().map(|c| c.1).sum();
        let mut probs = BTreeMap::new();
        for (x, k) in counts {
            *probs.entry(x).or_insert(0.0) += k as f64 / total as f64;
        }
        ShotDistribution {
            width,
            probs,
            total_shots: total,
        }
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    pub fn prob(&self, x: u64) -> f64 {
        self.probs.get(&x).copied().unwrap_or(0.0)
    }

    /// Big-endian bitstring of outcome `x`: bit `width − 1` first.
    pub fn bitstring(&self, x: u64) -> String {
        (0..self.width)
            .rev()
            .map(|b| if (x >> b) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

impl Serialize for ShotDistribution {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let probs: BTreeMap<String, f64> = self.probs.iter().map(|(x, p)| (self.bitstring(*x), *p)).collect();
        let mut st = s.serialize_struct("ShotDistribution", 3)?;
        st.serialize_field("width", &self.width)?;
        st.serialize_field("totalShots", &self.total_shots)?;
        st.serialize_field("probs", &probs)?;
        st.end()
    }
}

/// `1 − ½ Σ_x |p(x) − q(x)|`.
pub fn tvd_fidelity(ideal: &ShotDistribution, sampled: &ShotDistribution) -> Result<f64> {
    if ideal.width != sampled.width {
        return Err(Error::InvalidArgument(format!(
            "distribution widths differ: {} vs {}",
            ideal.width, sampled.width
        )));
    }
    let mut d = 0.0;
    for (x, p) in &ideal.probs {
        d += (p - sampled.prob(*x)).abs();
    }
    for (x, q) in &sampled.probs {
        if !ideal.probs.contains_key(x) {
            d += q.abs();
        }
    }
    Ok(1.0 - 0.5 * d)
}

/// `(F_comp − F_inp) / (1 − F_inp)`; `None` when `F_inp = 1`.
pub fn relative_error(f_comp: f64, f_inp: f64) -> Option<f64> {
    (f_inp != 1.0).then(|| (f_comp - f_inp) / (1.0 - f_inp))
}
