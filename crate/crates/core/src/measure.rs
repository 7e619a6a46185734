//! Ideal photon-number-resolving post-selection.
//!
//! The Fock basis diagonalizes every photon-number observable, so projecting
//! onto a detector outcome is a filter over basis terms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::{FockState, Occupation};

/// Inputs whose squared norm is further than this from 1 are rejected.
pub const INPUT_NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    /// Normalized conditional state, or the zero state when `probability == 0`.
    pub state: FockState,
    pub probability: f64,
}

impl ProjectionResult {
    pub fn succeeded(&self) -> bool {
        !self.state.is_zero()
    }
}

fn check_normalized(state: &FockState) -> Result<()> {
    let n = state.norm_sqr();
    if (n - 1.0).abs() > INPUT_NORM_TOLERANCE {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

fn project_by(state: &FockState, keep: impl Fn(&Occupation) -> bool) -> ProjectionResult {
    let terms: BTreeMap<Occupation, _> = state
        .terms()
        .filter(|(o, _)| keep(o))
        .map(|(o, a)| (o.clone(), *a))
        .collect();
    let kept = FockState::from_map(state.registry().clone(), terms, state.tolerance());
    match kept.normalize() {
        Ok((s, p)) => ProjectionResult { state: s, probability: p },
        Err(_) => ProjectionResult { state: kept, probability: 0.0 },
    }
}

/// Conditions on no photons in any of `modes`.
pub fn project_vacuum(state: &FockState, modes: &[usize]) -> Result<ProjectionResult> {
    check_normalized(state)?;
    let m = state.registry().len();
    if let Some(&bad) = modes.iter().find(|&&i| i >= m) {
        return Err(Error::ModeOutOfRange { index: bad, modes: m });
    }
    Ok(project_by(state, |o| modes.iter().all(|&i| o.get(i) == 0)))
}

/// Conditions on an exact H+V photon count on each listed beam.
pub fn project_beam_counts(state: &FockState, constraints: &[(&str, u32)]) -> Result<ProjectionResult> {
    check_normalized(state)?;
    let resolved = constraints
        .iter()
        .map(|&(beam, n)| Ok((state.registry().beam_modes(beam)?, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(project_by(state, |o| {
        resolved
            .iter()
            .all(|(modes, n)| modes.iter().map(|&i| o.get(i)).sum::<u32>() == *n)
    }))
}

/// Joint photon-count distribution over `beams`, keyed by per-beam totals.
pub fn outcome_distribution(state: &FockState, beams: &[&str]) -> Result<BTreeMap<Vec<u32>, f64>> {
    check_normalized(state)?;
    let resolved = beams
        .iter()
        .map(|b| state.registry().beam_modes(b))
        .collect::<Result<Vec<_>>>()?;
    let mut dist = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let key: Vec<u32> = resolved
            .iter()
            .map(|modes| modes.iter().map(|&i| occ.get(i)).sum())
            .collect();
        *dist.entry(key).or_insert(0.0) += amp.norm_sqr();
    }
    Ok(dist)
}
