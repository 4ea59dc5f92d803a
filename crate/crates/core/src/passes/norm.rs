//! Nuclear-norm reduction by CNOT conjugation.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cost::{realize, CostOrder, CostVector, RealizationScheme, NORM_TOL};
use crate::error::Result;
use crate::gadget::{simplify, GadgetSequence};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatchingMode {
    Greedy,
    /// Optimal matching by dynamic programming; at most 12 qubits.
    Exhaustive,
}

pub const EXHAUSTIVE_MAX_QUBITS: usize = 12;

/// Realized cost of `seq` after conjugating every gadget with `C_{n,m}`.
#[derive(Debug, Clone)]
pub struct ConjugationCosts {
    pub current: CostVector,
    /// `costs[n][m]`; the diagonal holds the current cost.
    pub costs: Vec<Vec<CostVector>>,
}

pub fn conjugation_costs(seq: &GadgetSequence, scheme: RealizationScheme) -> Result<ConjugationCosts> {
    let n = seq.num_qubits;
    let current = realize(seq, scheme)?.cost();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|(a, b)| a != b)
        .collect();
    let values: Vec<CostVector> = pairs
        .par_iter()
        .map(|&(a, b)| Ok(realize(&seq.conjugated(a, b), scheme)?.cost()))
        .collect::<Result<_>>()?;
    let mut costs = vec![vec![current; n]; n];
    for ((a, b), v) in pairs.into_iter().zip(values) {
        costs[a][b] = v;
    }
    Ok(ConjugationCosts { current, costs })
}

/// Norm part of [`conjugation_costs`].
pub fn conjugation_cost_matrix(seq: &GadgetSequence, scheme: RealizationScheme) -> Result<DMatrix<f64>> {
    let c = conjugation_costs(seq, scheme)?;
    let n = seq.num_qubits;
    Ok(DMatrix::from_fn(n, n, |a, b| c.costs[a][b].total_norm))
}

/// Vertex-disjoint pairs, heaviest first; ties in `(n, m)` order.
pub fn greedy_matching(weights: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = weights.nrows();
    let mut cand: Vec<(usize, usize, f64)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .map(|(a, b)| (a, b, weights[(a, b)]))
        .filter(|(_, _, w)| *w > 0.0)
        .collect();
    cand.sort_by(|x, y| y.2.total_cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    let mut used = vec![false; n];
    let mut out = Vec::new();
    for (a, b, _) in cand {
        if !used[a] && !used[b] {
            used[a] = true;
            used[b] = true;
            out.push((a, b));
        }
    }
    out
}

/// Maximum-weight matching by exhaustive dynamic programming.
pub fn exhaustive_matching(weights: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let n = weights.nrows();
    assert!(n <= EXHAUSTIVE_MAX_QUBITS, "exhaustive matching is limited to {EXHAUSTIVE_MAX_QUBITS} qubits");
    let full = 1usize << n;
    let mut best = vec![0.0f64; full];
    let mut choice = vec![None::<(usize, usize)>; full];
    for mask in 1..full {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        best[mask] = best[rest];
        choice[mask] = None;
        for j in (i + 1)..n {
            if rest >> j & 1 == 1 && weights[(i, j)] > 0.0 {
                let v = weights[(i, j)] + best[rest & !(1 << j)];
                if v > best[mask] {
                    best[mask] = v;
                    choice[mask] = Some((i, j));
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut mask = full - 1;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        match choice[mask] {
            Some((a, b)) => {
                out.push((a, b));
                mask &= !(1 << a) & !(1 << b);
            }
            None => mask &= !(1 << i),
        }
    }
    out.sort();
    out
}

pub fn matching_weight(weights: &DMatrix<f64>, pairs: &[(usize, usize)]) -> f64 {
    pairs.iter().map(|&(a, b)| weights[(a, b)]).sum()
}

#[derive(Debug, Clone)]
pub struct NormStep {
    /// Canonical CNOTs `(control, target)`; vertex-disjoint, so they commute.
    pub cnots: Vec<(usize, usize)>,
    pub seq: GadgetSequence,
    pub cost: CostVector,
    pub improved: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NormOptions {
    pub scheme: RealizationScheme,
    pub order: CostOrder,
    pub matching: MatchingMode,
}

/// One round of `U = C·U*·C` rewrites over a matching of qubit pairs.
pub fn norm_reduction_step(seq: &GadgetSequence, opts: &NormOptions) -> Result<NormStep> {
    let n = seq.num_qubits;
    let costs = conjugation_costs(seq, opts.scheme)?;
    let cur = costs.current;
    let unchanged = NormStep {
        cnots: Vec::new(),
        seq: seq.clone(),
        cost: cur,
        improved: false,
    };
    if n < 2 {
        return Ok(unchanged);
    }
    // orientation and weight per unordered pair
    let mut weights = DMatrix::zeros(n, n);
    let mut orient = vec![vec![(0, 0); n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let (ab, ba) = (costs.costs[a][b], costs.costs[b][a]);
            let (pick, cost) = if ba.total_norm < ab.total_norm - NORM_TOL { ((b, a), ba) } else { ((a, b), ab) };
            let admissible = match opts.order {
                CostOrder::Lexicographic => cost.mq_count <= cur.mq_count,
                CostOrder::Weighted(_) => !opts.order.less(&cur, &cost),
            };
            let w = if admissible { (cur.total_norm - cost.total_norm).max(0.0) } else { 0.0 };
            weights[(a, b)] = w;
            weights[(b, a)] = w;
            orient[a][b] = pick;
            orient[b][a] = pick;
        }
    }
    let pairs = match opts.matching {
        MatchingMode::Exhaustive if n <= EXHAUSTIVE_MAX_QUBITS => exhaustive_matching(&weights),
        _ => greedy_matching(&weights),
    };
    let apply = |cnots: &[(usize, usize)]| -> Result<(GadgetSequence, CostVector)> {
        let mut s = seq.clone();
        for &(c, t) in cnots {
            s = s.conjugated(c, t);
        }
        let s = simplify(&s);
        let cost = realize(&s, opts.scheme)?.cost();
        Ok((s, cost))
    };
    if matching_weight(&weights, &pairs) > NORM_TOL {
        let cnots: Vec<_> = pairs.iter().map(|&(a, b)| orient[a][b]).collect();
        let (s, cost) = apply(&cnots)?;
        if opts.order.less(&cost, &cur) {
            return Ok(NormStep {
                cnots,
                seq: s,
                cost,
                improved: true,
            });
        }
    }
    // fall back to the single best conjugation under the cost order
    let mut best: Option<(usize, usize, CostVector)> = None;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let c = costs.costs[a][b];
            if best.is_none_or(|(_, _, bc)| opts.order.less(&c, &bc)) {
                best = Some((a, b, c));
            }
        }
    }
    if let Some((a, b, c)) = best {
        if opts.order.less(&c, &cur) {
            let (s, cost) = apply(&[(a, b)])?;
            if opts.order.less(&cost, &cur) {
                return Ok(NormStep {
                    cnots: vec![(a, b)],
                    seq: s,
                    cost,
                    improved: true,
                });
            }
        }
    }
    Ok(unchanged)
}
