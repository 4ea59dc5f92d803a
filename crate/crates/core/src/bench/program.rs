//! Lossless JSON form of a compiled program.

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::circuit::Axis;
use crate::cost::RealizationScheme;
use crate::error::{Error, Result};
use crate::gadget::{GadgetSequence, PauliFrame, PhaseGadget};
use crate::passes::{CnotLayer, CompiledProgram};

pub const FORMAT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// An angle written with 17 significant digits, enough to reproduce the
/// double exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return Err(serde::ser::Error::custom("non-finite angle"));
        }
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(Angle)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LayerJson {
    /// Row `i` lists the input bits XORed into output bit `i`, as hex.
    pub matrix: Vec<String>,
    pub word: Vec<[usize; 2]>,
}

impl LayerJson {
    fn from_layer(l: &CnotLayer) -> Self {
        LayerJson {
            matrix: l.hex_rows(),
            word: l.word().into_iter().map(|(c, t)| [c, t]).collect(),
        }
    }

    fn to_layer(&self, n: usize) -> Result<CnotLayer> {
        let l = CnotLayer::from_hex_rows(&self.matrix)?;
        if l.num_qubits() != n {
            return Err(Error::InvalidArgument(format!("layer has {} rows, expected {n}", l.num_qubits())));
        }
        if self.word.iter().any(|&[c, t]| c >= n || t >= n || c == t) {
            return Err(Error::InvalidArgument("layer word has an invalid CNOT".into()));
        }
        let w: Vec<(usize, usize)> = self.word.iter().map(|&[c, t]| (c, t)).collect();
        if CnotLayer::from_word(n, &w) != l {
            return Err(Error::InvalidArgument("layer word does not match its matrix".into()));
        }
        Ok(l)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BodyJson {
    /// `exp(i Σ θ Z_n Z_m)` with entries `[n, m, θ]`.
    Mq { pairs: Vec<(usize, usize, Angle)> },
    /// `exp(iαπ/2 P_support)`.
    Gadget {
        axis: Axis,
        alpha: Angle,
        support: Vec<usize>,
    },
}

/// Program file. `body` holds the gadget sequence; `multiqubitGates` lists
/// the realized multiqubit gates in time order and must agree with it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProgramJson {
    pub version: String,
    pub num_qubits: usize,
    pub scheme: RealizationScheme,
    pub ancilla: Option<usize>,
    pub pre_layer: LayerJson,
    pub body: Vec<BodyJson>,
    pub frames: Vec<String>,
    pub post_layer: LayerJson,
    pub measurement_map: Vec<[usize; 2]>,
    pub multiqubit_gates: Vec<BodyJson>,
}

/// Largest per-entry difference tolerated between listed and recomputed
/// multiqubit gates.
pub const MQ_CONSISTENCY_TOL: f64 = 1e-12;

impl ProgramJson {
    pub fn from_program(p: &CompiledProgram) -> Result<Self> {
        let r = p.realize()?;
        Ok(ProgramJson {
            version: FORMAT_VERSION.to_string(),
            num_qubits: p.num_qubits,
            scheme: p.scheme,
            ancilla: p.ancilla(),
            pre_layer: LayerJson::from_layer(&p.pre),
            body: p
                .body
                .gadgets
                .iter()
                .map(|g| BodyJson::Gadget {
                    axis: g.axis,
                    alpha: Angle(g.alpha),
                    support: g.support.to_vec(),
                })
                .collect(),
            frames: p.body.frame.labels(p.num_qubits),
            post_layer: LayerJson::from_layer(&p.post),
            measurement_map: p.measurements.iter().map(|&(q, b)| [q, b]).collect(),
            multiqubit_gates: r
                .gates
                .iter()
                .map(|g| BodyJson::Mq {
                    pairs: g.pairs().map(|((a, b), t)| (a, b, Angle(t))).collect(),
                })
                .collect(),
        })
    }

    /// Rebuilds the program and checks every redundant field.
    pub fn to_program(&self) -> Result<CompiledProgram> {
        let n = self.num_qubits;
        let bad = |m: String| Err(Error::InvalidArgument(m));
        let expected_anc = (self.scheme == RealizationScheme::AncillaMerged).then_some(n);
        if self.ancilla != expected_anc {
            return bad(format!("ancilla {:?} inconsistent with scheme", self.ancilla));
        }
        let mut body = GadgetSequence::new(n);
        for e in &self.body {
            match e {
                BodyJson::Gadget { axis, alpha, support } => {
                    if support.iter().any(|&q| q >= n) {
                        return bad("gadget support out of range".into());
                    }
                    if !alpha.0.is_finite() {
                        return bad("non-finite gadget angle".into());
                    }
                    body.gadgets
                        .push(PhaseGadget::new(*axis, alpha.0, support.iter().copied()));
                }
                BodyJson::Mq { .. } => return bad("body entries must be gadgets".into()),
            }
        }
        if self.frames.len() != n {
            return bad(format!("frames lists {} labels, expected {n}", self.frames.len()));
        }
        body.frame = PauliFrame::from_labels(&self.frames)
            .ok_or_else(|| Error::InvalidArgument("bad Pauli frame label".into()))?;
        if self.measurement_map.iter().any(|&[q, _]| q >= n) {
            return bad("measurement of an unknown qubit".into());
        }
        let p = CompiledProgram {
            num_qubits: n,
            scheme: self.scheme,
            pre: self.pre_layer.to_layer(n)?,
            body,
            post: self.post_layer.to_layer(n)?,
            measurements: self.measurement_map.iter().map(|&[q, b]| (q, b)).collect(),
        };
        let realized = p.realize()?.gates;
        let consistent = realized.len() == self.multiqubit_gates.len()
            && realized.iter().zip(&self.multiqubit_gates).all(|(g, e)| match e {
                BodyJson::Mq { pairs } => {
                    let listed: Vec<_> = g.pairs().collect();
                    listed.len() == pairs.len()
                        && listed
                            .iter()
                            .zip(pairs)
                            .all(|(((a, b), t), (x, y, u))| {
                                (a, b) == (x, y) && (t - u.0).abs() <= MQ_CONSISTENCY_TOL
                            })
                }
                BodyJson::Gadget { .. } => false,
            });
        if !consistent {
            return bad("multiqubitGates disagree with the realized body".into());
        }
        Ok(p)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn program_to_json(p: &CompiledProgram) -> Result<String> {
    ProgramJson::from_program(p)?.to_json()
}

pub fn program_from_json(s: &str) -> Result<CompiledProgram> {
    ProgramJson::from_json(s)?.to_program()
}
