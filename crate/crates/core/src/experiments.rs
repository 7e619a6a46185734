//! The three entanglement-generation schemes, scripted end to end.
//!
//! Each scheme is compiled to a [`CircuitSpec`] and evaluated through the
//! same machinery as a user-supplied circuit file.

use std::f64::consts::FRAC_PI_4;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitOutcome, CircuitSpec, Element, PostSelection, SpinInput, TargetSpec};
use crate::error::{Error, Result};
use crate::fock::Polarization::{self, H, V};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub theta: Option<f64>,
    pub pairs: Option<u32>,
    pub chained: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub scheme: String,
    pub parameters: Parameters,
    pub success_probability: f64,
    /// Absent when post-selection never succeeds.
    pub fidelity: Option<f64>,
    pub stage_probabilities: Vec<f64>,
    pub wall_time_ms: f64,
}

impl ExperimentReport {
    pub fn from_outcome(scheme: &str, parameters: Parameters, outcome: &CircuitOutcome, started: Instant) -> Self {
        Self {
            scheme: scheme.to_string(),
            parameters,
            success_probability: outcome.success_probability,
            fidelity: outcome.fidelity,
            stage_probabilities: outcome.stage_probabilities.clone(),
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn heralded(&self) -> bool {
        self.success_probability > 0.0
    }
}

fn s(x: &str) -> String {
    x.to_string()
}

fn mode(beam: &str, pol: Polarization) -> (String, Polarization) {
    (beam.to_string(), pol)
}

fn beam_splitter_stage(theta: f64) -> Vec<Element> {
    // Port 0 of every splitter stays on beams 1/2; port 1 goes to the detected beams 3/4.
    [("1", "3", H), ("1", "3", V), ("2", "4", H), ("2", "4", V)]
        .into_iter()
        .map(|(kept, watched, pol)| Element::Splitter { theta, modes: [mode(kept, pol), mode(watched, pol)] })
        .collect()
}

fn herald_on_beams(beams: &[&str]) -> PostSelection {
    PostSelection::Vacuum {
        modes: beams.iter().flat_map(|b| [mode(b, H), mode(b, V)]).collect(),
    }
}

/// Two EPR pairs fused into the four-photon spin-1 state.
pub fn four_photon_circuit(theta: f64) -> CircuitSpec {
    CircuitSpec {
        beams: vec![s("1"), s("2"), s("3"), s("4")],
        pairs: vec![[s("1"), s("2")], [s("3"), s("4")]],
        spin_states: vec![],
        elements: beam_splitter_stage(theta),
        postselect: vec![herald_on_beams(&["3", "4"])],
        target: Some(TargetSpec::SpinJ { n: 2, beams: [s("1"), s("2")] }),
    }
}

/// Spin-1 state split into four beams, conditioned on one photon per beam.
///
/// Beam 1 exits on beams 1 and 5, beam 2 on beams 2 and 6. With `chained`
/// the spin-1 input is itself produced by [`four_photon_circuit`] at θ = π/4.
pub fn telecloning_circuit(chained: bool) -> CircuitSpec {
    let splitters = vec![
        Element::ParallelSplitter { theta: FRAC_PI_4, beams: [s("1"), s("5")] },
        Element::ParallelSplitter { theta: FRAC_PI_4, beams: [s("2"), s("6")] },
    ];
    let coincidence = PostSelection::Coincidence {
        counts: ["1", "5", "2", "6"].iter().map(|b| (s(b), 1)).collect(),
    };
    let target = Some(TargetSpec::Telecloning { beams: [s("1"), s("5"), s("2"), s("6")] });
    if chained {
        let mut elements = beam_splitter_stage(FRAC_PI_4);
        elements.extend(splitters);
        CircuitSpec {
            beams: ["1", "2", "3", "4", "5", "6"].iter().map(|b| s(b)).collect(),
            pairs: vec![[s("1"), s("2")], [s("3"), s("4")]],
            spin_states: vec![],
            elements,
            postselect: vec![herald_on_beams(&["3", "4"]), coincidence],
            target,
        }
    } else {
        CircuitSpec {
            beams: ["1", "2", "5", "6"].iter().map(|b| s(b)).collect(),
            pairs: vec![],
            spin_states: vec![SpinInput { n: 2, beams: [s("1"), s("2")] }],
            elements: splitters,
            postselect: vec![coincidence],
            target,
        }
    }
}

/// `n` EPR pairs on beams `(2i−1, 2i)` routed through four symmetric n-ports.
pub fn generalized_circuit(n: u32) -> Result<CircuitSpec> {
    if n == 0 {
        return Err(Error::InvalidArgument("the generalized scheme needs at least one pair".into()));
    }
    let beams: Vec<String> = (1..=2 * n).map(|b| b.to_string()).collect();
    let odd: Vec<String> = beams.iter().step_by(2).cloned().collect();
    let even: Vec<String> = beams.iter().skip(1).step_by(2).cloned().collect();
    let pairs = odd.iter().zip(&even).map(|(a, b)| [a.clone(), b.clone()]).collect();
    let n_ports = n as usize;
    let elements = [(&odd, H), (&odd, V), (&even, H), (&even, V)]
        .into_iter()
        .map(|(group, polarization)| Element::Multiport { n: n_ports, beams: group.clone(), polarization })
        .collect();
    // Output port 0 of each multiport (beams 1 and 2) is kept; ports 1..n−1 are watched.
    let watched: Vec<&str> = beams[2..].iter().map(String::as_str).collect();
    let postselect = if watched.is_empty() { vec![] } else { vec![herald_on_beams(&watched)] };
    Ok(CircuitSpec {
        beams: beams.clone(),
        pairs,
        spin_states: vec![],
        elements,
        postselect,
        target: Some(TargetSpec::SpinJ { n, beams: [s("1"), s("2")] }),
    })
}

pub fn four_photon_scheme(theta: f64) -> Result<ExperimentReport> {
    let started = Instant::now();
    let outcome = four_photon_circuit(theta).evaluate()?;
    let params = Parameters { theta: Some(theta), ..Default::default() };
    Ok(ExperimentReport::from_outcome("four-photon", params, &outcome, started))
}

pub fn telecloning_scheme(chained: bool) -> Result<ExperimentReport> {
    let started = Instant::now();
    let outcome = telecloning_circuit(chained).evaluate()?;
    let params = Parameters {
        theta: chained.then_some(FRAC_PI_4),
        chained: Some(chained),
        ..Default::default()
    };
    Ok(ExperimentReport::from_outcome("telecloning", params, &outcome, started))
}

pub fn generalized_scheme(n: u32) -> Result<ExperimentReport> {
    let started = Instant::now();
    let outcome = generalized_circuit(n)?.evaluate()?;
    let params = Parameters { pairs: Some(n), ..Default::default() };
    Ok(ExperimentReport::from_outcome("generalized", params, &outcome, started))
}

/// Heralding probability `(n+1)(n!)² / (2ⁿ n²ⁿ)` of the generalized scheme.
///
/// Only port-0 amplitudes (1/√n per photon) survive the herald, leaving
/// `2^{-n/2} n^{-n} (A+B)ⁿ|0⟩` with `‖(A+B)ⁿ|0⟩‖² = (n+1)(n!)²`.
pub fn generalized_success_closed_form(n: u32) -> f64 {
    let nf = n as f64;
    let fact: f64 = (1..=n).map(f64::from).product();
    (nf + 1.0) * fact * fact / (2f64.powi(n as i32) * nf.powi(2 * n as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub theta: f64,
    pub probability: f64,
    pub fidelity: Option<f64>,
}

/// Runs [`four_photon_scheme`] on `steps` uniformly spaced angles.
pub fn scan_theta(start: f64, end: f64, steps: usize) -> Result<Vec<ScanRow>> {
    if steps < 2 {
        return Err(Error::InvalidArgument(format!("a scan needs at least 2 steps, got {steps}")));
    }
    if !start.is_finite() || !end.is_finite() {
        return Err(Error::InvalidArgument("scan bounds must be finite".into()));
    }
    let step = (end - start) / (steps - 1) as f64;
    (0..steps)
        .into_par_iter()
        .map(|i| {
            let theta = if i == steps - 1 { end } else { start + step * i as f64 };
            let r = four_photon_scheme(theta)?;
            Ok(ScanRow { theta, probability: r.success_probability, fidelity: r.fidelity })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6};

    fn formula(theta: f64) -> f64 {
        3.0 * theta.sin().powi(4) * theta.cos().powi(4)
    }

    #[test]
    fn balanced_splitters_reach_three_sixteenths() {
        let r = four_photon_scheme(FRAC_PI_4).unwrap();
        assert!((r.success_probability - 0.1875).abs() < 1e-12);
        assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.stage_probabilities.len(), 1);
    }

    #[test]
    fn straight_through_never_heralds() {
        let r = four_photon_scheme(0.0).unwrap();
        assert_eq!(r.success_probability, 0.0);
        assert!(r.fidelity.is_none());
        assert!(!r.heralded());
    }

    #[test]
    fn thirty_degrees() {
        let r = four_photon_scheme(FRAC_PI_6).unwrap();
        assert!((r.success_probability - 27.0 / 256.0).abs() < 1e-12);
        assert!((r.fidelity.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probability_symmetric_about_pi_over_4() {
        for theta in [0.1, 0.3, 0.6, 0.75] {
            let a = four_photon_scheme(theta).unwrap().success_probability;
            let b = four_photon_scheme(FRAC_PI_2 - theta).unwrap().success_probability;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn telecloning_stages() {
        let ideal = telecloning_scheme(false).unwrap();
        assert!((ideal.success_probability - 0.25).abs() < 1e-12);
        assert!((ideal.fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(ideal.stage_probabilities.len(), 1);

        let chained = telecloning_scheme(true).unwrap();
        assert!((chained.success_probability - 3.0 / 64.0).abs() < 1e-12);
        assert_eq!(chained.stage_probabilities.len(), 2);
        assert!((chained.stage_probabilities[0] - 3.0 / 16.0).abs() < 1e-12);
        assert!((chained.stage_probabilities[1] - 0.25).abs() < 1e-12);
        assert!(chained.stage_probabilities.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn generalized_small_n() {
        let one = generalized_scheme(1).unwrap();
        assert_eq!(one.success_probability, 1.0);
        assert!((one.fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert!(one.stage_probabilities.is_empty());

        let two = generalized_scheme(2).unwrap();
        let fig1 = four_photon_circuit(FRAC_PI_4).evaluate().unwrap();
        assert!((two.success_probability - fig1.success_probability).abs() < 1e-12);

        let three = generalized_scheme(3).unwrap();
        assert!((three.success_probability - 2.0 / 81.0).abs() < 1e-12);
        assert!((three.fidelity.unwrap() - 1.0).abs() < 1e-12);
        assert!(generalized_scheme(0).is_err());
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(generalized_success_closed_form(1), 1.0);
        assert!((generalized_success_closed_form(2) - 3.0 / 16.0).abs() < 1e-15);
        assert!((generalized_success_closed_form(3) - 2.0 / 81.0).abs() < 1e-15);
        assert!((generalized_success_closed_form(4) - 2880.0 / 1_048_576.0).abs() < 1e-15);
    }

    #[test]
    fn scan_grid() {
        let rows = scan_theta(0.0, FRAC_PI_2, 3).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].probability.abs() < 1e-12 && rows[2].probability.abs() < 1e-12);
        assert!((rows[1].probability - 0.1875).abs() < 1e-12);
        assert!((rows[1].fidelity.unwrap() - 1.0).abs() < 1e-12);

        let rows = scan_theta(0.0, FRAC_PI_2, 101).unwrap();
        let worst = rows.iter().map(|r| (r.probability - formula(r.theta)).abs()).fold(0.0, f64::max);
        assert!(worst < 1e-12, "{worst}");
        assert!(rows.windows(2).all(|w| w[0].theta < w[1].theta));
        assert!(scan_theta(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let r = telecloning_scheme(true).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        let back: ExperimentReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let zero = four_photon_scheme(0.0).unwrap();
        let text = serde_json::to_string(&zero).unwrap();
        assert!(text.contains("\"fidelity\":null"));
    }
}
