//! Declarative circuit descriptions: entangled inputs, optical elements,
//! then post-selection. Named schemes compile to a [`CircuitSpec`], and the
//! CLI reads the same structure from JSON.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeRegistry, Polarization};
use crate::linops::{self, beam_splitter, symmetric_multiport, ModeTransform};
use crate::measure::{project_beam_counts, project_vacuum};
use crate::oracle;
use crate::targets::{self, NamedState};

/// `(beam, polarization)`, written `["1", "H"]` in JSON.
pub type ModeRef = (String, Polarization);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSpec {
    pub beams: Vec<String>,
    /// EPR pairs `(|H_a V_b⟩ + |V_a H_b⟩)/√2`.
    #[serde(default)]
    pub pairs: Vec<[String; 2]>,
    /// Ideal spin-j inputs, for starting a scheme mid-pipeline.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spin_states: Vec<SpinInput>,
    #[serde(default)]
    pub elements: Vec<Element>,
    #[serde(default)]
    pub postselect: Vec<PostSelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinInput {
    pub n: u32,
    pub beams: [String; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Element {
    /// Two-mode splitter; the first mode is input/output port 0.
    Splitter { theta: f64, modes: [ModeRef; 2] },
    /// One splitter acting identically on the H and V modes of two beams.
    ParallelSplitter { theta: f64, beams: [String; 2] },
    /// Symmetric `n`-port on one polarization of `beams`.
    Multiport { n: usize, beams: Vec<String>, polarization: Polarization },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PostSelection {
    Vacuum { modes: Vec<ModeRef> },
    Coincidence { counts: Vec<(String, u32)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetSpec {
    Epr { beams: [String; 2] },
    SpinJ { n: u32, beams: [String; 2] },
    Telecloning { beams: [String; 4] },
}

impl TargetSpec {
    pub fn build(&self) -> Result<NamedState> {
        match self {
            TargetSpec::Epr { beams } => targets::epr_pair(&beams[0], &beams[1]),
            TargetSpec::SpinJ { n, beams } => targets::spin_j_state(*n, &beams[0], &beams[1]),
            TargetSpec::Telecloning { beams } => {
                targets::telecloning_state([&beams[0], &beams[1], &beams[2], &beams[3]])
            }
        }
    }

    fn beams(&self) -> Vec<&String> {
        match self {
            TargetSpec::Epr { beams } | TargetSpec::SpinJ { beams, .. } => beams.iter().collect(),
            TargetSpec::Telecloning { beams } => beams.iter().collect(),
        }
    }
}

/// Which propagation engine evaluates the element list.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Sparse,
    /// All elements folded into one unitary and pushed through the permanent oracle.
    Dense,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitOutcome {
    /// Conditional state after all post-selection (zero if any stage failed).
    pub state: FockState,
    pub stage_probabilities: Vec<f64>,
    pub success_probability: f64,
    pub fidelity: Option<f64>,
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Circuit { field: field.into(), message: message.into() }
}

impl CircuitSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: CircuitSpec = serde_json::from_str(text).map_err(|e| Error::Circuit {
            field: format!("line {} column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit specs always serialize")
    }

    pub fn registry(&self) -> Result<ModeRegistry> {
        ModeRegistry::with_beams(&self.beams)
    }

    /// Checks every reference resolves and no beam is fed two inputs.
    pub fn validate(&self) -> Result<()> {
        if self.beams.is_empty() {
            return Err(field_err("beams", "at least one beam must be declared"));
        }
        for (i, b) in self.beams.iter().enumerate() {
            if self.beams[..i].contains(b) {
                return Err(field_err(format!("beams[{i}]"), format!("beam `{b}` declared twice")));
            }
        }
        let declared = |field: String, b: &String| -> Result<()> {
            if self.beams.contains(b) {
                Ok(())
            } else {
                Err(field_err(field, format!("beam `{b}` is not declared")))
            }
        };

        let mut fed: Vec<&String> = Vec::new();
        let inputs = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| (format!("pairs[{i}]"), p))
            .chain(self.spin_states.iter().enumerate().map(|(i, s)| (format!("spin_states[{i}].beams"), &s.beams)));
        for (field, beams) in inputs {
            for (k, b) in beams.iter().enumerate() {
                declared(format!("{field}[{k}]"), b)?;
                if fed.contains(&b) {
                    return Err(field_err(format!("{field}[{k}]"), format!("beam `{b}` already carries an input")));
                }
                fed.push(b);
            }
        }
        for (i, s) in self.spin_states.iter().enumerate() {
            if s.n == 0 {
                return Err(field_err(format!("spin_states[{i}].n"), "must be at least 1"));
            }
        }

        for (i, el) in self.elements.iter().enumerate() {
            let at = |f: &str| format!("elements[{i}].{f}");
            match el {
                Element::Splitter { theta, modes } => {
                    if !theta.is_finite() {
                        return Err(field_err(at("theta"), "must be finite"));
                    }
                    for (k, (b, _)) in modes.iter().enumerate() {
                        declared(at(&format!("modes[{k}]")), b)?;
                    }
                    if modes[0] == modes[1] {
                        return Err(field_err(at("modes"), "the two modes must differ"));
                    }
                }
                Element::ParallelSplitter { theta, beams } => {
                    if !theta.is_finite() {
                        return Err(field_err(at("theta"), "must be finite"));
                    }
                    for (k, b) in beams.iter().enumerate() {
                        declared(at(&format!("beams[{k}]")), b)?;
                    }
                    if beams[0] == beams[1] {
                        return Err(field_err(at("beams"), "the two beams must differ"));
                    }
                }
                Element::Multiport { n, beams, .. } => {
                    if *n == 0 || *n != beams.len() {
                        return Err(field_err(at("n"), format!("{n}-port element given {} beams", beams.len())));
                    }
                    for (k, b) in beams.iter().enumerate() {
                        declared(at(&format!("beams[{k}]")), b)?;
                        if beams[..k].contains(b) {
                            return Err(field_err(at(&format!("beams[{k}]")), "beam repeated"));
                        }
                    }
                }
            }
        }

        for (i, ps) in self.postselect.iter().enumerate() {
            match ps {
                PostSelection::Vacuum { modes } => {
                    for (k, (b, _)) in modes.iter().enumerate() {
                        declared(format!("postselect[{i}].modes[{k}]"), b)?;
                    }
                }
                PostSelection::Coincidence { counts } => {
                    for (k, (b, _)) in counts.iter().enumerate() {
                        declared(format!("postselect[{i}].counts[{k}]"), b)?;
                    }
                }
            }
        }

        if let Some(t) = &self.target {
            for (k, b) in t.beams().into_iter().enumerate() {
                declared(format!("target.beams[{k}]"), b)?;
            }
            t.build().map_err(|e| field_err("target", e.to_string()))?;
        }
        Ok(())
    }

    /// Product of all declared inputs; undriven beams start in vacuum.
    pub fn initial_state(&self) -> Result<FockState> {
        let registry = Arc::new(self.registry()?);
        let mut state = FockState::vacuum(Arc::new(ModeRegistry::new()));
        for [a, b] in &self.pairs {
            state = state.tensor(&targets::epr_pair(a, b)?.state)?;
        }
        for s in &self.spin_states {
            state = state.tensor(&targets::spin_j_state(s.n, &s.beams[0], &s.beams[1])?.state)?;
        }
        state.align_to(registry)
    }

    /// Element list resolved into mode transforms on this circuit's registry.
    pub fn transforms(&self) -> Result<Vec<ModeTransform>> {
        let reg = self.registry()?;
        let mut out = Vec::new();
        for el in &self.elements {
            match el {
                Element::Splitter { theta, modes } => {
                    let idx = [reg.require(&modes[0].0, modes[0].1)?, reg.require(&modes[1].0, modes[1].1)?];
                    out.push(beam_splitter(*theta).on(&idx)?);
                }
                Element::ParallelSplitter { theta, beams } => {
                    for pol in Polarization::BOTH {
                        let idx = [reg.require(&beams[0], pol)?, reg.require(&beams[1], pol)?];
                        out.push(beam_splitter(*theta).on(&idx)?);
                    }
                }
                Element::Multiport { n, beams, polarization } => {
                    let idx = beams
                        .iter()
                        .map(|b| reg.require(b, *polarization))
                        .collect::<Result<Vec<_>>>()?;
                    out.push(symmetric_multiport(*n)?.on(&idx)?);
                }
            }
        }
        Ok(out)
    }

    pub fn evaluate(&self) -> Result<CircuitOutcome> {
        self.evaluate_with(Engine::Sparse)
    }

    pub fn evaluate_with(&self, engine: Engine) -> Result<CircuitOutcome> {
        self.validate()?;
        let mut state = self.initial_state()?;
        let transforms = self.transforms()?;
        match engine {
            Engine::Sparse => {
                for t in &transforms {
                    state = linops::apply(&state, t)?;
                }
            }
            Engine::Dense => {
                let m = state.registry().len();
                let mut u = DMatrix::<Complex64>::identity(m, m);
                for t in &transforms {
                    u = t.embed(m)? * u;
                }
                state = oracle::dense_apply(&state, &u)?;
            }
        }

        let registry = state.registry().clone();
        let mut stage_probabilities = Vec::with_capacity(self.postselect.len());
        for ps in &self.postselect {
            if state.is_zero() {
                stage_probabilities.push(0.0);
                continue;
            }
            let result = match ps {
                PostSelection::Vacuum { modes } => {
                    let idx = modes
                        .iter()
                        .map(|(b, p)| registry.require(b, *p))
                        .collect::<Result<Vec<_>>>()?;
                    project_vacuum(&state, &idx)?
                }
                PostSelection::Coincidence { counts } => {
                    let c: Vec<(&str, u32)> = counts.iter().map(|(b, n)| (b.as_str(), *n)).collect();
                    project_beam_counts(&state, &c)?
                }
            };
            stage_probabilities.push(result.probability);
            state = result.state;
        }
        let success_probability = stage_probabilities.iter().product();

        let fidelity = match (&self.target, state.is_zero()) {
            (Some(t), false) => Some(targets::fidelity_to(&t.build()?, &state)?),
            _ => None,
        };
        Ok(CircuitOutcome { state, stage_probabilities, success_probability, fidelity })
    }
}
