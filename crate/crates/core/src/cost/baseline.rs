//! Straightforward merging of parallel entangling gates.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::gadget::MultiQubitGate;

use super::nuclear_norm;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BaselineCount {
    pub mq_count: usize,
    pub total_norm: f64,
}

/// `θ` of `exp(iθ ZZ)` brought into `(−π/4, π/4]` (the rest is local).
pub fn wrap_zz(theta: f64) -> f64 {
    let k = ((theta - 1e-12) / FRAC_PI_2 + 0.5).ceil() - 1.0;
    theta - k * FRAC_PI_2
}

pub fn zz_norm(theta: f64) -> f64 {
    wrap_zz(theta).abs()
}

fn pair_phase(g: &Gate) -> Result<Option<(usize, usize, f64)>> {
    Ok(match g {
        Gate::Cnot {
            control, target, ..
        } => Some((*control, *target, FRAC_PI_4)),
        Gate::Zz { theta, a, b } => Some((*a, *b, *theta)),
        Gate::Single { .. } | Gate::Barrier(_) => None,
        Gate::Gadget(p) if p.weight() <= 1 => None,
        Gate::Gadget(p) if p.weight() == 2 => {
            let s = p.support.to_vec();
            Some((s[0], s[1], p.angle()))
        }
        other => return Err(Error::UnsupportedGate(other.name().to_string())),
    })
}

/// Layers the entangling gates as early as their qubits allow (single-qubit
/// gates never delay them) and merges every layer into one multiqubit gate.
pub fn baseline_parallel_merge(c: &Circuit) -> Result<BaselineCount> {
    let mut last = vec![0usize; c.num_qubits];
    let mut layers: Vec<MultiQubitGate> = Vec::new();
    for g in &c.gates {
        let Some((a, b, t)) = pair_phase(g)? else {
            continue;
        };
        let l = last[a].max(last[b]);
        if l == layers.len() {
            layers.push(MultiQubitGate::new());
        }
        layers[l].add(a, b, wrap_zz(t));
        last[a] = l + 1;
        last[b] = l + 1;
    }
    Ok(BaselineCount {
        mq_count: layers.iter().filter(|g| !g.is_empty()).count(),
        total_norm: layers.iter().map(nuclear_norm).sum(),
    })
}

/// Summed per-gate norm of the entangling gates of `c`.
pub fn input_norm(c: &Circuit) -> Result<f64> {
    let mut total = 0.0;
    for g in &c.gates {
        if let Some((_, _, t)) = pair_phase(g)? {
            total += zz_norm(t);
        }
    }
    Ok(total)
}
