//! Dual-rail qubit view of one-photon-per-beam states, reduced density
//! matrices, and the 1→2 telecloning protocol.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, Polarization};
use crate::targets;

/// Tolerance on Hermiticity, unit trace and positivity of produced matrices.
pub const DENSITY_TOLERANCE: f64 = 1e-12;

/// Beams read as qubits, H ↦ |0⟩ and V ↦ |1⟩; the first beam is the most
/// significant bit of the basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitRegister {
    pub beams: Vec<String>,
}

impl QubitRegister {
    pub fn new<S: AsRef<str>>(beams: &[S]) -> Self {
        Self { beams: beams.iter().map(|b| b.as_ref().to_string()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitState {
    qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QubitState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("{len} amplitudes is not a qubit register")));
        }
        Ok(Self { qubits: len.trailing_zeros() as usize, amplitudes })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn kron(&self, other: &QubitState) -> QubitState {
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        QubitState { qubits: self.qubits + other.qubits, amplitudes }
    }

    pub fn density(&self) -> DensityMatrix {
        let v = nalgebra::DVector::from_column_slice(&self.amplitudes);
        DensityMatrix { qubits: self.qubits, matrix: &v * v.adjoint() }
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<DensityMatrix> {
        partial_trace(&self.density(), keep)
    }

    /// Applies a single-qubit gate to `qubit`.
    pub fn apply_single(&self, qubit: usize, gate: &[[Complex64; 2]; 2]) -> QubitState {
        let shift = self.qubits - 1 - qubit;
        let mut out = self.amplitudes.clone();
        for (i, slot) in out.iter_mut().enumerate() {
            let bit = (i >> shift) & 1;
            let i0 = i & !(1 << shift);
            let i1 = i0 | (1 << shift);
            *slot = gate[bit][0] * self.amplitudes[i0] + gate[bit][1] * self.amplitudes[i1];
        }
        QubitState { qubits: self.qubits, amplitudes: out }
    }
}

/// Relabels a one-photon-per-beam Fock state as a qubit vector.
pub fn to_qubits(state: &FockState, reg: &QubitRegister) -> Result<QubitState> {
    let registry = state.registry();
    let rails = reg
        .beams
        .iter()
        .map(|b| Ok((registry.require(b, Polarization::H)?, registry.require(b, Polarization::V)?)))
        .collect::<Result<Vec<_>>>()?;
    let k = rails.len();
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << k];
    for (occ, amp) in state.terms() {
        let mut index = 0usize;
        for (q, &(h, v)) in rails.iter().enumerate() {
            let bit = match (occ.get(h), occ.get(v)) {
                (1, 0) => 0,
                (0, 1) => 1,
                _ => {
                    return Err(Error::QubitEncoding(format!(
                        "{occ} does not hold exactly one photon on beam `{}`",
                        reg.beams[q]
                    )))
                }
            };
            index = (index << 1) | bit;
        }
        let on_rails: u32 = rails.iter().map(|&(h, v)| occ.get(h) + occ.get(v)).sum();
        if on_rails != occ.total() {
            return Err(Error::QubitEncoding(format!("{occ} has photons outside the register")));
        }
        amplitudes[index] += amp;
    }
    QubitState::new(amplitudes)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermiticity_residual(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian, unit trace and positive semidefinite within [`DENSITY_TOLERANCE`].
    pub fn check(&self) -> Result<()> {
        let h = self.hermiticity_residual();
        if h > DENSITY_TOLERANCE {
            return Err(Error::InvalidArgument(format!("density matrix not Hermitian ({h:e})")));
        }
        let t = (self.trace() - Complex64::new(1.0, 0.0)).norm();
        if t > DENSITY_TOLERANCE {
            return Err(Error::InvalidArgument(format!("density matrix trace off by {t:e}")));
        }
        let e = self.min_eigenvalue();
        if e < -DENSITY_TOLERANCE {
            return Err(Error::InvalidArgument(format!("density matrix has eigenvalue {e:e}")));
        }
        Ok(())
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn expectation(&self, psi: &QubitState) -> Result<f64> {
        if psi.qubits != self.qubits {
            return Err(Error::InvalidArgument("qubit count mismatch".into()));
        }
        let v = nalgebra::DVector::from_column_slice(&psi.amplitudes);
        Ok((v.adjoint() * &self.matrix * &v)[(0, 0)].re)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        (&self.matrix - &other.matrix).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Reduces `rho` to the qubits in `keep`, in the order given.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one qubit".into()));
    }
    let n = rho.qubits;
    for (i, &q) in keep.iter().enumerate() {
        if q >= n || keep[..i].contains(&q) {
            return Err(Error::InvalidArgument(format!("invalid qubit position {q}")));
        }
    }
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |value: usize, positions: &[usize]| -> usize {
        positions
            .iter()
            .enumerate()
            .filter(|(i, _)| (value >> (positions.len() - 1 - i)) & 1 == 1)
            .map(|(_, &q)| bit(q))
            .sum()
    };
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let mut out = DMatrix::zeros(dk, dk);
    for i in 0..dk {
        let fi = spread(i, keep);
        for j in 0..dk {
            let fj = spread(j, keep);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..dt {
                let ft = spread(t, &traced);
                acc += rho.matrix[(fi | ft, fj | ft)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityMatrix { qubits: keep.len(), matrix: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellState {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellState {
    pub const ALL: [BellState; 4] = [BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus, BellState::PsiMinus];

    /// Amplitudes on |00⟩, |01⟩, |10⟩, |11⟩.
    pub fn amplitudes(self) -> [f64; 4] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self {
            BellState::PhiPlus => [h, 0.0, 0.0, h],
            BellState::PhiMinus => [h, 0.0, 0.0, -h],
            BellState::PsiPlus => [0.0, h, h, 0.0],
            BellState::PsiMinus => [0.0, h, -h, 0.0],
        }
    }
}

/// Pauli pair applied to the two clones after each Bell outcome, in
/// [`BellState::ALL`] order. Obtained by exhaustive search over all 16 pairs
/// per outcome (see the `correction_table_is_the_unique_optimum` test); the
/// resource's clones are bit-flipped relative to the input's basis, so the
/// usual teleportation correction is composed with X.
pub const CORRECTIONS: [[Pauli; 2]; 4] = [
    [Pauli::X, Pauli::X],
    [Pauli::Y, Pauli::Y],
    [Pauli::I, Pauli::I],
    [Pauli::Z, Pauli::Z],
];

#[derive(Debug, Clone, PartialEq)]
pub struct CloneOutcome {
    pub bell: BellState,
    pub probability: f64,
    pub clone_fidelities: [f64; 2],
    pub clone_states: [DensityMatrix; 2],
}

/// Beam roles in the telecloning resource: port, ancilla, clone, clone.
pub const TELECLONING_BEAMS: [&str; 4] = ["1'", "2'", "3'", "4'"];

/// The telecloning state as a four-qubit vector in [`TELECLONING_BEAMS`] order.
pub fn telecloning_resource() -> Result<QubitState> {
    let t = targets::telecloning_state(TELECLONING_BEAMS)?;
    to_qubits(&t.state, &QubitRegister::new(&TELECLONING_BEAMS))
}

fn check_input(input: &QubitState) -> Result<()> {
    if input.qubits() != 1 {
        return Err(Error::InvalidArgument("input must be a single qubit".into()));
    }
    let n = input.norm_sqr();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

/// Bell-projects input+port of `input ⊗ resource`; returns the outcome
/// probability and the normalized (ancilla, clone, clone) state.
pub fn bell_project(input: &QubitState, resource: &QubitState, bell: BellState) -> Result<(f64, QubitState)> {
    if resource.qubits() != 4 {
        return Err(Error::InvalidArgument("telecloning resource must have four qubits".into()));
    }
    let full = input.kron(resource);
    let b = bell.amplitudes();
    let rest = 1usize << 3;
    let mut out = vec![Complex64::new(0.0, 0.0); rest];
    for (ab, coeff) in b.iter().enumerate() {
        if *coeff == 0.0 {
            continue;
        }
        for (r, slot) in out.iter_mut().enumerate() {
            *slot += full.amplitudes[(ab << 3) | r] * coeff;
        }
    }
    let p: f64 = out.iter().map(|a| a.norm_sqr()).sum();
    if p > 0.0 {
        let s = 1.0 / p.sqrt();
        out.iter_mut().for_each(|a| *a *= s);
    }
    Ok((p, QubitState::new(out)?))
}

/// Clone reduced states and fidelities after applying `correction`.
pub fn corrected_clones(
    input: &QubitState,
    projected: &QubitState,
    correction: [Pauli; 2],
) -> Result<([DensityMatrix; 2], [f64; 2])> {
    let fixed = projected
        .apply_single(1, &correction[0].matrix())
        .apply_single(2, &correction[1].matrix());
    let c1 = fixed.reduced(&[1])?;
    let c2 = fixed.reduced(&[2])?;
    let f = [c1.expectation(input)?, c2.expectation(input)?];
    Ok(([c1, c2], f))
}

/// Runs the 1→2 telecloning protocol on `resource` for every Bell outcome.
pub fn telecloning_protocol_on(resource: &QubitState, input: &QubitState) -> Result<Vec<CloneOutcome>> {
    check_input(input)?;
    BellState::ALL
        .iter()
        .zip(CORRECTIONS)
        .map(|(&bell, correction)| {
            let (probability, projected) = bell_project(input, resource, bell)?;
            let (clone_states, clone_fidelities) = corrected_clones(input, &projected, correction)?;
            Ok(CloneOutcome { bell, probability, clone_fidelities, clone_states })
        })
        .collect()
}

pub fn telecloning_protocol(input: &QubitState) -> Result<Vec<CloneOutcome>> {
    telecloning_protocol_on(&telecloning_resource()?, input)
}
