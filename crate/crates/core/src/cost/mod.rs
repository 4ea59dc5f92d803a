//! Nuclear norms, realization counting and the parallel-merge baseline.

mod baseline;
mod realize;

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadget::MultiQubitGate;

pub use baseline::{baseline_parallel_merge, input_norm, wrap_zz, zz_norm, BaselineCount};
pub use realize::{realize, star_norm, RealizationScheme, Realization};

/// `Σ|λ|` of the symmetric phase matrix of `g`.
pub fn nuclear_norm(g: &MultiQubitGate) -> f64 {
    match g.num_pairs() {
        0 => 0.0,
        // a lone pair has eigenvalues ±θ/2
        1 => g.pairs().next().map_or(0.0, |(_, t)| t.abs()),
        _ => {
            let (c, support) = g.compact();
            symmetric_nuclear_norm(c.phi_matrix(support.len()))
        }
    }
}

/// Nuclear norm of a symmetric real matrix.
pub fn nuclear_norm_matrix(phi: &DMatrix<f64>) -> Result<f64> {
    if !phi.is_square() || (phi - phi.transpose()).amax() > 1e-10 {
        return Err(Error::InvalidArgument("phase matrix is not symmetric".into()));
    }
    Ok(symmetric_nuclear_norm(phi.clone()))
}

fn symmetric_nuclear_norm(phi: DMatrix<f64>) -> f64 {
    if phi.nrows() == 0 {
        return 0.0;
    }
    SymmetricEigen::new(phi)
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .sum()
}

/// Count of multiqubit gates and their summed nuclear norm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CostVector {
    pub mq_count: usize,
    pub total_norm: f64,
}

/// How two cost vectors compare.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostOrder {
    /// Gate count first, norm to break ties.
    Lexicographic,
    /// `w·count + norm`.
    Weighted(f64),
}

/// Norm differences below this are ties.
pub const NORM_TOL: f64 = 1e-9;

impl CostOrder {
    pub fn compare(&self, a: &CostVector, b: &CostVector) -> Ordering {
        let norm = |x: f64, y: f64| {
            if (x - y).abs() <= NORM_TOL {
                Ordering::Equal
            } else {
                x.total_cmp(&y)
            }
        };
        match self {
            CostOrder::Lexicographic => a
                .mq_count
                .cmp(&b.mq_count)
                .then_with(|| norm(a.total_norm, b.total_norm)),
            CostOrder::Weighted(w) => norm(
                w * a.mq_count as f64 + a.total_norm,
                w * b.mq_count as f64 + b.total_norm,
            ),
        }
    }

    pub fn less(&self, a: &CostVector, b: &CostVector) -> bool {
        self.compare(a, b) == Ordering::Less
    }
}

impl std::fmt::Display for CostOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CostOrder::Lexicographic => write!(f, "lex"),
            CostOrder::Weighted(w) => write!(f, "weighted:{w}"),
        }
    }
}

impl std::str::FromStr for CostOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "lex" {
            return Ok(CostOrder::Lexicographic);
        }
        s.strip_prefix("weighted:")
            .and_then(|w| w.parse::<f64>().ok())
            .filter(|w| w.is_finite() && *w >= 0.0)
            .map(CostOrder::Weighted)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown cost order `{s}`")))
    }
}
