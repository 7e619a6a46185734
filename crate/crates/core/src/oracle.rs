//! Dense, permanent-based reference path for multi-photon evolution.
//!
//! Shares no expansion code with [`crate::linops`]: every output amplitude
//! is an independent transition amplitude `per(U_sub)/√(∏n_in!∏n_out!)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeRegistry, Occupation, Polarization};
use crate::linops::{self, ModeTransform};

pub const MAX_PERMANENT_SIZE: usize = 20;
pub const DEFAULT_BASIS_CEILING: usize = 2_000_000;

/// Ryser's formula with Gray-code column updates, `O(2^K · K)`.
pub fn permanent(a: &DMatrix<Complex64>) -> Result<Complex64> {
    let (n, cols) = a.shape();
    if n != cols {
        return Err(Error::NotSquare { rows: n, cols });
    }
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::InvalidArgument(format!("permanent of a {n}x{n} matrix exceeds the size limit")));
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let j = k.trailing_zeros() as usize;
        gray ^= 1 << j;
        if gray & (1 << j) != 0 {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s += a[(r, j)];
            }
        } else {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s -= a[(r, j)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones().is_multiple_of(2) {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(if n % 2 == 0 { total } else { -total })
}

/// All occupations of `photons` bosons in `modes` modes, lexicographic.
#[derive(Debug, Clone)]
pub struct DenseBasis {
    modes: usize,
    photons: u32,
    states: Vec<Occupation>,
    index: HashMap<Occupation, usize>,
}

/// `C(photons + modes - 1, modes - 1)`.
pub fn basis_size(modes: usize, photons: u32) -> u128 {
    if modes == 0 {
        return if photons == 0 { 1 } else { 0 };
    }
    let (n, k) = (photons as u128 + modes as u128 - 1, modes as u128 - 1);
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

impl DenseBasis {
    pub fn new(modes: usize, photons: u32, ceiling: usize) -> Result<Self> {
        let size = basis_size(modes, photons);
        if size > ceiling as u128 {
            return Err(Error::BasisTooLarge { size, limit: ceiling });
        }
        let mut states = Vec::with_capacity(size as usize);
        let mut buf = vec![0u32; modes];
        fn rec(slot: usize, rest: u32, buf: &mut Vec<u32>, out: &mut Vec<Occupation>) {
            if slot + 1 >= buf.len() {
                if !buf.is_empty() {
                    buf[slot] = rest;
                }
                if buf.is_empty() && rest > 0 {
                    return;
                }
                out.push(Occupation::new(buf.clone()));
                return;
            }
            for c in 0..=rest {
                buf[slot] = c;
                rec(slot + 1, rest - c, buf, out);
            }
        }
        rec(0, photons, &mut buf, &mut states);
        let index = states.iter().cloned().enumerate().map(|(i, o)| (o, i)).collect();
        Ok(Self { modes, photons, states, index })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> u32 {
        self.photons
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        self.index.get(occ).copied()
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Amplitude `⟨out| Û |in⟩` for the single-photon unitary `u` over all modes.
pub fn transition_amplitude(u: &DMatrix<Complex64>, input: &Occupation, output: &Occupation) -> Result<Complex64> {
    if input.total() != output.total() {
        return Err(Error::PhotonNumberMismatch { input: input.total(), output: output.total() });
    }
    if u.nrows() != input.len() || u.ncols() != input.len() || output.len() != input.len() {
        return Err(Error::LengthMismatch { expected: u.nrows(), found: input.len() });
    }
    let expand = |o: &Occupation| -> Vec<usize> {
        o.counts()
            .iter()
            .enumerate()
            .flat_map(|(m, &c)| std::iter::repeat_n(m, c as usize))
            .collect()
    };
    let cols = expand(input);
    let rows = expand(output);
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| u[(rows[r], cols[c])]);
    let norm: f64 = input.counts().iter().chain(output.counts()).map(|&c| factorial(c)).product();
    Ok(permanent(&sub)? / norm.sqrt())
}

pub fn dense_apply(state: &FockState, u: &DMatrix<Complex64>) -> Result<FockState> {
    dense_apply_with_ceiling(state, u, DEFAULT_BASIS_CEILING)
}

/// Evolves `state` basis-pair by basis-pair; refuses bases above `ceiling`.
pub fn dense_apply_with_ceiling(state: &FockState, u: &DMatrix<Complex64>, ceiling: usize) -> Result<FockState> {
    let m = state.registry().len();
    if u.nrows() != m || u.ncols() != m {
        return Err(Error::LengthMismatch { expected: m, found: u.nrows() });
    }
    let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for n in state.photon_numbers() {
        let basis = DenseBasis::new(m, n, ceiling)?;
        let inputs: Vec<(&Occupation, &Complex64)> = state.terms().filter(|(o, _)| o.total() == n).collect();
        let amps: Vec<Result<Complex64>> = basis
            .states()
            .par_iter()
            .map(|o| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, a) in &inputs {
                    acc += *a * transition_amplitude(u, i, o)?;
                }
                Ok(acc)
            })
            .collect();
        for (o, a) in basis.states().iter().zip(amps) {
            out.insert(o.clone(), a?);
        }
    }
    Ok(FockState::from_map(state.registry().clone(), out, state.tolerance()))
}

/// Largest amplitude difference over the union of both supports.
pub fn max_amplitude_deviation(a: &FockState, b: &FockState) -> Result<f64> {
    if a.registry() != b.registry() {
        return Err(Error::RegistryMismatch);
    }
    let mut worst: f64 = 0.0;
    for (o, _) in a.terms().chain(b.terms()) {
        worst = worst.max((a.amplitude(o) - b.amplitude(o)).norm());
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckConfig {
    pub trials: usize,
    pub max_modes: usize,
    pub max_photons: u32,
    pub seed: u64,
}

impl Default for CrosscheckConfig {
    fn default() -> Self {
        Self { trials: 100, max_modes: 6, max_photons: 4, seed: 42 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: usize,
    pub modes: usize,
    pub photons: u32,
    pub terms: usize,
    pub acted_modes: usize,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckSummary {
    pub config: CrosscheckConfig,
    pub trials: Vec<TrialOutcome>,
    pub max_deviation: f64,
}

impl CrosscheckSummary {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.max_deviation < tolerance
    }
}

/// Random normalized state with exactly `photons` photons on `modes` modes.
pub fn random_state<R: Rng + ?Sized>(modes: usize, photons: u32, max_terms: usize, rng: &mut R) -> FockState {
    let mut reg = ModeRegistry::new();
    for i in 0..modes {
        reg.push(&format!("m{i}"), Polarization::H).expect("fresh labels");
    }
    let reg = Arc::new(reg);
    let count = rng.random_range(1..=max_terms.max(1));
    let terms: Vec<(Occupation, Complex64)> = (0..count)
        .map(|_| {
            let mut counts = vec![0u32; modes];
            for _ in 0..photons {
                counts[rng.random_range(0..modes)] += 1;
            }
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            (Occupation::new(counts), Complex64::new(re, im))
        })
        .collect();
    let s = FockState::from_terms(reg.clone(), terms).expect("lengths match");
    s.normalize().map(|(n, _)| n).unwrap_or_else(|_| FockState::vacuum(reg))
}

fn run_trial(config: &CrosscheckConfig, trial: usize) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(trial as u64);
    let modes = rng.random_range(1..=config.max_modes);
    let photons = rng.random_range(0..=config.max_photons);
    let state = random_state(modes, photons, 4, &mut rng);

    let acted = rng.random_range(1..=modes);
    let mut order: Vec<usize> = (0..modes).collect();
    order.shuffle(&mut rng);
    order.truncate(acted);
    let t = ModeTransform::haar_random(acted, &mut rng).on(&order)?;

    let sparse = linops::apply(&state, &t)?;
    let dense = dense_apply(&state, &t.embed(modes)?)?;
    Ok(TrialOutcome {
        trial,
        modes,
        photons,
        terms: state.len(),
        acted_modes: acted,
        deviation: max_amplitude_deviation(&sparse, &dense)?,
    })
}

/// Randomized sparse-engine vs permanent-oracle comparison.
///
/// Each trial draws from its own ChaCha stream, so results do not depend on
/// how trials are scheduled across threads.
pub fn crosscheck(config: CrosscheckConfig) -> Result<CrosscheckSummary> {
    if config.trials == 0 || config.max_modes == 0 {
        return Err(Error::InvalidArgument("trials and max-modes must be positive".into()));
    }
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|i| run_trial(&config, i))
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = trials.iter().map(|t| t.deviation).fold(0.0, f64::max);
    Ok(CrosscheckSummary { config, trials, max_deviation })
}
