//! Multi-mode bosonic Fock states over polarization-labeled beams.
//!
//! A [`FockState`] is a sparse map from photon-occupation vectors to complex
//! amplitudes. Terms are kept in lexicographic order of their occupation so
//! that iteration, printing and serialization are reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Amplitudes with magnitude below this are dropped.
pub const DEFAULT_PRUNE_TOLERANCE: f64 = 1e-14;

/// Tolerance on `|<psi|psi> - 1|` for a state to count as normalized.
pub const NORMALIZED_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    pub const BOTH: [Polarization; 2] = [Polarization::H, Polarization::V];

    pub fn as_char(self) -> char {
        match self {
            Polarization::H => 'H',
            Polarization::V => 'V',
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mode {
    pub beam: String,
    pub polarization: Polarization,
}

/// Ordered set of `(beam, polarization)` modes; position is the dense mode index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModeRegistry {
    entries: Vec<Mode>,
}

impl ModeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry with an H and a V mode for each beam, in that order.
    pub fn with_beams<S: AsRef<str>>(beams: &[S]) -> Result<Self> {
        let mut reg = Self::new();
        for beam in beams {
            for pol in Polarization::BOTH {
                reg.push(beam.as_ref(), pol)?;
            }
        }
        Ok(reg)
    }

    pub fn push(&mut self, beam: &str, polarization: Polarization) -> Result<usize> {
        if self.index_of(beam, polarization).is_some() {
            return Err(Error::DuplicateMode {
                beam: beam.to_string(),
                polarization: polarization.as_char(),
            });
        }
        self.entries.push(Mode { beam: beam.to_string(), polarization });
        Ok(self.entries.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn modes(&self) -> &[Mode] {
        &self.entries
    }

    pub fn mode(&self, index: usize) -> Option<&Mode> {
        self.entries.get(index)
    }

    pub fn index_of(&self, beam: &str, polarization: Polarization) -> Option<usize> {
        self.entries
            .iter()
            .position(|m| m.beam == beam && m.polarization == polarization)
    }

    pub fn require(&self, beam: &str, polarization: Polarization) -> Result<usize> {
        self.index_of(beam, polarization).ok_or_else(|| Error::UnknownMode {
            beam: beam.to_string(),
            polarization: polarization.as_char(),
        })
    }

    pub fn has_beam(&self, beam: &str) -> bool {
        self.entries.iter().any(|m| m.beam == beam)
    }

    /// Mode indices belonging to `beam` (either polarization).
    pub fn beam_modes(&self, beam: &str) -> Result<Vec<usize>> {
        let idx: Vec<usize> = self
            .entries
            .iter()
            .enumerate()
            .filter(|(_, m)| m.beam == beam)
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            return Err(Error::UnknownBeam(beam.to_string()));
        }
        Ok(idx)
    }

    /// Distinct beam labels in first-appearance order.
    pub fn beams(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for m in &self.entries {
            if !out.contains(&m.beam.as_str()) {
                out.push(&m.beam);
            }
        }
        out
    }

    /// Concatenation; fails if any label appears in both.
    pub fn concat(&self, other: &ModeRegistry) -> Result<ModeRegistry> {
        let mut out = self.clone();
        for m in &other.entries {
            if out.index_of(&m.beam, m.polarization).is_some() {
                return Err(Error::OverlappingLabels {
                    beam: m.beam.clone(),
                    polarization: m.polarization.as_char(),
                });
            }
            out.entries.push(m.clone());
        }
        Ok(out)
    }
}

/// Photon counts per mode of a registry.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation {
    counts: Vec<u32>,
    total: u32,
}

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn vacuum(modes: usize) -> Self {
        Self { counts: vec![0; modes], total: 0 }
    }

    /// Builds an occupation from `(beam, polarization, count)` entries.
    pub fn from_labels(registry: &ModeRegistry, entries: &[(&str, Polarization, u32)]) -> Result<Self> {
        let mut counts = vec![0u32; registry.len()];
        for &(beam, pol, n) in entries {
            counts[registry.require(beam, pol)?] += n;
        }
        Ok(Self::new(counts))
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn total(&self) -> u32 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.counts[mode]
    }

    pub(crate) fn with_count(&self, mode: usize, n: u32) -> Self {
        let mut counts = self.counts.clone();
        counts[mode] = n;
        Self::new(counts)
    }

    pub(crate) fn concat(&self, other: &Occupation) -> Self {
        let mut counts = self.counts.clone();
        counts.extend_from_slice(&other.counts);
        Self { counts, total: self.total + other.total }
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "⟩")
    }
}

/// Sparse pure state of a set of bosonic modes.
///
/// Values are immutable once built; every operation returns a new state.
#[derive(Debug, Clone)]
pub struct FockState {
    registry: Arc<ModeRegistry>,
    terms: BTreeMap<Occupation, Complex64>,
    tolerance: f64,
}

impl FockState {
    pub fn vacuum(registry: Arc<ModeRegistry>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation::vacuum(registry.len()), Complex64::new(1.0, 0.0));
        Self { registry, terms, tolerance: DEFAULT_PRUNE_TOLERANCE }
    }

    /// The zero vector (not the vacuum).
    pub fn zero(registry: Arc<ModeRegistry>) -> Self {
        Self { registry, terms: BTreeMap::new(), tolerance: DEFAULT_PRUNE_TOLERANCE }
    }

    pub fn basis(registry: Arc<ModeRegistry>, occupation: Occupation) -> Result<Self> {
        Self::from_terms(registry, vec![(occupation, Complex64::new(1.0, 0.0))])
    }

    /// Sums duplicate occupations and prunes small amplitudes; never normalizes.
    pub fn from_terms<I>(registry: Arc<ModeRegistry>, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Complex64)>,
    {
        let mut map: BTreeMap<Occupation, Complex64> = BTreeMap::new();
        for (occ, amp) in terms {
            if occ.len() != registry.len() {
                return Err(Error::LengthMismatch { expected: registry.len(), found: occ.len() });
            }
            *map.entry(occ).or_default() += amp;
        }
        Ok(Self::from_map(registry, map, DEFAULT_PRUNE_TOLERANCE))
    }

    pub(crate) fn from_map(
        registry: Arc<ModeRegistry>,
        mut terms: BTreeMap<Occupation, Complex64>,
        tolerance: f64,
    ) -> Self {
        terms.retain(|_, a| a.norm() >= tolerance);
        Self { registry, terms, tolerance }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self.terms.retain(|_, a| a.norm() >= tolerance);
        self
    }

    pub fn registry(&self) -> &Arc<ModeRegistry> {
        &self.registry
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, occupation: &Occupation) -> Complex64 {
        self.terms.get(occupation).copied().unwrap_or_default()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() < NORMALIZED_TOLERANCE
    }

    /// Distinct total photon numbers present, ascending.
    pub fn photon_numbers(&self) -> Vec<u32> {
        let mut n: Vec<u32> = self.terms.keys().map(|o| o.total()).collect();
        n.sort_unstable();
        n.dedup();
        n
    }

    fn check_same_registry(&self, other: &FockState) -> Result<()> {
        if Arc::ptr_eq(&self.registry, &other.registry) || *self.registry == *other.registry {
            Ok(())
        } else {
            Err(Error::RegistryMismatch)
        }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &FockState) -> Result<Complex64> {
        self.check_same_registry(other)?;
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::new(0.0, 0.0);
        for (occ, a) in &small.terms {
            if let Some(b) = large.terms.get(occ) {
                acc += if conj_small { a.conj() * b } else { b.conj() * a };
            }
        }
        Ok(acc)
    }

    /// Returns the normalized state and the squared norm it was divided by.
    pub fn normalize(&self) -> Result<(FockState, f64)> {
        let weight = self.norm_sqr();
        if self.is_zero() || weight == 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = 1.0 / weight.sqrt();
        let terms = self.terms.iter().map(|(o, a)| (o.clone(), a * scale)).collect();
        Ok((Self::from_map(self.registry.clone(), terms, self.tolerance), weight))
    }

    pub fn scale(&self, factor: Complex64) -> FockState {
        let terms = self.terms.iter().map(|(o, a)| (o.clone(), a * factor)).collect();
        Self::from_map(self.registry.clone(), terms, self.tolerance)
    }

    pub fn add(&self, other: &FockState) -> Result<FockState> {
        self.check_same_registry(other)?;
        let mut terms = self.terms.clone();
        for (o, a) in &other.terms {
            *terms.entry(o.clone()).or_default() += a;
        }
        Ok(Self::from_map(self.registry.clone(), terms, self.tolerance))
    }

    /// Product state on the concatenated registry.
    pub fn tensor(&self, other: &FockState) -> Result<FockState> {
        let registry = Arc::new(self.registry.concat(&other.registry)?);
        let mut terms = BTreeMap::new();
        for (oa, a) in &self.terms {
            for (ob, b) in &other.terms {
                terms.insert(oa.concat(ob), a * b);
            }
        }
        Ok(Self::from_map(registry, terms, self.tolerance.min(other.tolerance)))
    }

    /// Applies `a†` on `mode`.
    pub fn create(&self, mode: usize) -> Result<FockState> {
        self.check_mode(mode)?;
        let terms = self
            .terms
            .iter()
            .map(|(o, a)| {
                let n = o.get(mode);
                (o.with_count(mode, n + 1), a * ((n + 1) as f64).sqrt())
            })
            .collect();
        Ok(Self::from_map(self.registry.clone(), terms, self.tolerance))
    }

    /// Applies `a` on `mode`.
    pub fn annihilate(&self, mode: usize) -> Result<FockState> {
        self.check_mode(mode)?;
        let terms = self
            .terms
            .iter()
            .filter(|(o, _)| o.get(mode) > 0)
            .map(|(o, a)| {
                let n = o.get(mode);
                (o.with_count(mode, n - 1), a * (n as f64).sqrt())
            })
            .collect();
        Ok(Self::from_map(self.registry.clone(), terms, self.tolerance))
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.registry.len() {
            return Err(Error::ModeOutOfRange { index: mode, modes: self.registry.len() });
        }
        Ok(())
    }

    /// Re-expresses the state on `target`, matching modes by label.
    ///
    /// Modes of `target` missing here are taken as empty. Modes missing from
    /// `target` must be empty in every term.
    pub fn align_to(&self, target: Arc<ModeRegistry>) -> Result<FockState> {
        let mut mapping = Vec::with_capacity(self.registry.len());
        for m in self.registry.modes() {
            mapping.push(target.index_of(&m.beam, m.polarization));
        }
        let mut terms = BTreeMap::new();
        for (occ, a) in &self.terms {
            let mut counts = vec![0u32; target.len()];
            for (i, &c) in occ.counts().iter().enumerate() {
                match mapping[i] {
                    Some(j) => counts[j] = c,
                    None if c == 0 => {}
                    None => {
                        let m = &self.registry.modes()[i];
                        return Err(Error::UnalignedMode {
                            beam: format!("{}{}", m.beam, m.polarization),
                        });
                    }
                }
            }
            *terms.entry(Occupation::new(counts)).or_default() += a;
        }
        Ok(Self::from_map(target, terms, self.tolerance))
    }
}

impl PartialEq for FockState {
    fn eq(&self, other: &Self) -> bool {
        *self.registry == *other.registry && self.terms == other.terms
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (o, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({:.6}{:+.6}i){}", a.re, a.im, o)?;
        }
        Ok(())
    }
}
