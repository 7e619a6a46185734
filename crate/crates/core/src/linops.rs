//! Passive linear-optical elements and their action on Fock states.
//!
//! A [`ModeTransform`] maps the creation operator of its `j`-th acted mode to
//! `Σ_k U[k][j] a_k†`. Applying it to a Fock state substitutes every acted
//! creation operator in each basis monomial and expands the product
//! multinomially.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fock::{FockState, Occupation, Polarization};

/// Maximum `|U†U - I|` entry accepted for a transform.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeTransform {
    matrix: DMatrix<Complex64>,
    modes: Vec<usize>,
}

pub fn unitarity_residual(m: &DMatrix<Complex64>) -> f64 {
    let prod = m.adjoint() * m;
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

impl ModeTransform {
    /// Validates shape, unitarity and acted-mode distinctness.
    pub fn new(matrix: DMatrix<Complex64>, modes: Vec<usize>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare { rows: matrix.nrows(), cols: matrix.ncols() });
        }
        if modes.len() != matrix.nrows() {
            return Err(Error::InvalidArgument(format!(
                "{} acted modes for a {}x{} matrix",
                modes.len(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let mut sorted = modes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("acted modes must be distinct".into()));
        }
        let residual = unitarity_residual(&matrix);
        if residual >= UNITARITY_TOLERANCE {
            return Err(Error::NotUnitary(residual));
        }
        Ok(Self { matrix, modes })
    }

    /// Transform acting on modes `0..K`.
    pub fn local(matrix: DMatrix<Complex64>) -> Result<Self> {
        let k = matrix.nrows();
        Self::new(matrix, (0..k).collect())
    }

    pub fn identity(k: usize) -> Self {
        Self { matrix: DMatrix::identity(k, k), modes: (0..k).collect() }
    }

    /// Same matrix, retargeted to `modes`.
    pub fn on(&self, modes: &[usize]) -> Result<Self> {
        Self::new(self.matrix.clone(), modes.to_vec())
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn modes(&self) -> &[usize] {
        &self.modes
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    /// Full `total × total` single-photon matrix, identity off the acted modes.
    pub fn embed(&self, total: usize) -> Result<DMatrix<Complex64>> {
        let mut full = DMatrix::identity(total, total);
        for &m in &self.modes {
            if m >= total {
                return Err(Error::ModeOutOfRange { index: m, modes: total });
            }
            full[(m, m)] = Complex64::new(0.0, 0.0);
        }
        for (j, &mj) in self.modes.iter().enumerate() {
            for (k, &mk) in self.modes.iter().enumerate() {
                full[(mk, mj)] = self.matrix[(k, j)];
            }
        }
        Ok(full)
    }

    /// `next ∘ self` over the union of both acted-mode sets.
    pub fn then(&self, next: &ModeTransform) -> Result<ModeTransform> {
        let mut union = self.modes.clone();
        for &m in &next.modes {
            if !union.contains(&m) {
                union.push(m);
            }
        }
        let lift = |t: &ModeTransform| {
            let n = union.len();
            let mut full = DMatrix::identity(n, n);
            let pos: Vec<usize> = t
                .modes
                .iter()
                .map(|m| union.iter().position(|u| u == m).unwrap())
                .collect();
            for &p in &pos {
                full[(p, p)] = Complex64::new(0.0, 0.0);
            }
            for (j, &pj) in pos.iter().enumerate() {
                for (k, &pk) in pos.iter().enumerate() {
                    full[(pk, pj)] = t.matrix[(k, j)];
                }
            }
            full
        };
        let product = lift(next) * lift(self);
        ModeTransform::new(product, union)
    }

    /// Haar-distributed `k × k` unitary on modes `0..k`.
    pub fn haar_random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        // Gram-Schmidt on a complex Ginibre matrix.
        let mut m = DMatrix::from_fn(k, k, |_, _| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im)
        });
        for j in 0..k {
            for i in 0..j {
                let proj: Complex64 = (0..k).map(|r| m[(r, i)].conj() * m[(r, j)]).sum();
                for r in 0..k {
                    let v = m[(r, i)];
                    m[(r, j)] -= proj * v;
                }
            }
            let norm = (0..k).map(|r| m[(r, j)].norm_sqr()).sum::<f64>().sqrt();
            for r in 0..k {
                m[(r, j)] /= norm;
            }
        }
        Self { matrix: m, modes: (0..k).collect() }
    }
}

/// Two-port splitter with the `[[cos θ, sin θ], [sin θ, -cos θ]]` convention.
pub fn beam_splitter(theta: f64) -> ModeTransform {
    let (s, c) = theta.sin_cos();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(c, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(-c, 0.0),
        ],
    );
    ModeTransform { matrix: m, modes: vec![0, 1] }
}

/// Symmetric `n`-port: the unitary discrete Fourier matrix.
pub fn symmetric_multiport(n: usize) -> Result<ModeTransform> {
    if n == 0 {
        return Err(Error::InvalidArgument("multiport needs at least one port".into()));
    }
    let scale = 1.0 / (n as f64).sqrt();
    let m = DMatrix::from_fn(n, n, |j, k| {
        let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
        Complex64::from_polar(scale, phase)
    });
    Ok(ModeTransform { matrix: m, modes: (0..n).collect() })
}

fn factorials(n: u32) -> Vec<f64> {
    let mut f = vec![1.0; n as usize + 1];
    for i in 1..=n as usize {
        f[i] = f[i - 1] * i as f64;
    }
    f
}

/// Calls `f` with every way of splitting `n` photons over `parts` slots.
fn for_each_composition(n: u32, parts: usize, f: &mut impl FnMut(&[u32])) {
    fn rec(rest: u32, slot: usize, buf: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        if slot + 1 == buf.len() {
            buf[slot] = rest;
            f(buf);
            return;
        }
        for c in 0..=rest {
            buf[slot] = c;
            rec(rest - c, slot + 1, buf, f);
        }
    }
    if parts == 0 {
        return;
    }
    let mut buf = vec![0u32; parts];
    rec(n, 0, &mut buf, f);
}

/// Output occupations and amplitudes of the local input pattern `input`.
fn expand_pattern(u: &DMatrix<Complex64>, input: &[u32], fact: &[f64]) -> Vec<(Vec<u32>, Complex64)> {
    let k = input.len();
    // Ordered maps keep floating-point summation order reproducible.
    let mut poly: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
    poly.insert(vec![0; k], Complex64::new(1.0, 0.0));

    for (j, &nj) in input.iter().enumerate() {
        if nj == 0 {
            continue;
        }
        // (Σ_k U[k][j] b_k†)^nj, multinomially.
        let mut factor: Vec<(Vec<u32>, Complex64)> = Vec::new();
        for_each_composition(nj, k, &mut |c| {
            let mut w = Complex64::new(fact[nj as usize], 0.0);
            for (row, &ck) in c.iter().enumerate() {
                if ck > 0 {
                    w *= u[(row, j)].powu(ck) / fact[ck as usize];
                }
            }
            if w != Complex64::new(0.0, 0.0) {
                factor.push((c.to_vec(), w));
            }
        });
        let mut next: BTreeMap<Vec<u32>, Complex64> = BTreeMap::new();
        for (mono, a) in &poly {
            for (c, w) in &factor {
                let key: Vec<u32> = mono.iter().zip(c).map(|(x, y)| x + y).collect();
                *next.entry(key).or_default() += a * w;
            }
        }
        poly = next;
    }

    let norm_in: f64 = input.iter().map(|&n| fact[n as usize]).product::<f64>().sqrt();
    poly.into_iter()
        .map(|(mono, a)| {
            let norm_out: f64 = mono.iter().map(|&n| fact[n as usize]).product::<f64>().sqrt();
            (mono, a * (norm_out / norm_in))
        })
        .collect()
}

/// Evolves `state` through `t`; modes outside `t.modes()` are untouched.
pub fn apply(state: &FockState, t: &ModeTransform) -> Result<FockState> {
    let total_modes = state.registry().len();
    if let Some(&bad) = t.modes.iter().find(|&&m| m >= total_modes) {
        return Err(Error::ModeOutOfRange { index: bad, modes: total_modes });
    }
    let max_n = state.photon_numbers().last().copied().unwrap_or(0);
    let fact = factorials(max_n);

    let mut cache: HashMap<Vec<u32>, Vec<(Vec<u32>, Complex64)>> = HashMap::new();
    let mut out: BTreeMap<Occupation, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let pattern: Vec<u32> = t.modes.iter().map(|&m| occ.get(m)).collect();
        let expansion = cache
            .entry(pattern)
            .or_insert_with_key(|p| expand_pattern(&t.matrix, p, &fact));
        for (local, coeff) in expansion.iter() {
            let mut counts = occ.counts().to_vec();
            for (k, &m) in t.modes.iter().enumerate() {
                counts[m] = local[k];
            }
            *out.entry(Occupation::new(counts)).or_default() += amp * coeff;
        }
    }
    Ok(FockState::from_map(state.registry().clone(), out, state.tolerance()))
}

/// Applies `t` once on the H modes and once on the V modes of `beams`.
pub fn apply_parallel_polarization(state: &FockState, t: &ModeTransform, beams: &[&str]) -> Result<FockState> {
    if beams.len() != t.dim() {
        return Err(Error::InvalidArgument(format!(
            "{} beams for a {}-port element",
            beams.len(),
            t.dim()
        )));
    }
    let mut out = state.clone();
    for pol in Polarization::BOTH {
        let modes = beams
            .iter()
            .map(|b| state.registry().require(b, pol))
            .collect::<Result<Vec<_>>>()?;
        out = apply(&out, &t.on(&modes)?)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::ModeRegistry;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
    use std::sync::Arc;

    fn reg(n: usize) -> Arc<ModeRegistry> {
        let mut r = ModeRegistry::new();
        for i in 0..n {
            r.push(&format!("m{i}"), Polarization::H).unwrap();
        }
        Arc::new(r)
    }

    fn ket(r: &Arc<ModeRegistry>, counts: &[u32]) -> FockState {
        FockState::basis(r.clone(), Occupation::new(counts.to_vec())).unwrap()
    }

    fn assert_matrix(t: &ModeTransform, expect: &[f64]) {
        let k = t.dim();
        for i in 0..k {
            for j in 0..k {
                let got = t.matrix()[(i, j)];
                assert!((got - Complex64::new(expect[i * k + j], 0.0)).norm() < 1e-15, "entry ({i},{j}) = {got}");
            }
        }
    }

    #[test]
    fn splitter_special_angles() {
        let h = FRAC_1_SQRT_2;
        assert_matrix(&beam_splitter(FRAC_PI_4), &[h, h, h, -h]);
        assert_matrix(&beam_splitter(0.0), &[1.0, 0.0, 0.0, -1.0]);
        assert_matrix(&beam_splitter(FRAC_PI_2), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn multiport_small_sizes() {
        assert_matrix(&symmetric_multiport(1).unwrap(), &[1.0]);
        // DFT formula at N=2 reduces to the balanced splitter.
        let dft2 = symmetric_multiport(2).unwrap();
        let bs = beam_splitter(FRAC_PI_4);
        assert!((dft2.matrix() - bs.matrix()).iter().all(|d| d.norm() < 1e-15));
        let dft3 = symmetric_multiport(3).unwrap();
        for k in 0..3 {
            assert!((dft3.matrix()[(0, k)] - Complex64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
            assert!((dft3.matrix()[(k, 0)] - Complex64::new(1.0 / 3f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        assert!(unitarity_residual(dft3.matrix()) < 1e-12);
        assert!(symmetric_multiport(0).is_err());
    }

    #[test]
    fn new_rejects_bad_transforms() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(ModeTransform::local(m), Err(Error::NotUnitary(_))));
        assert!(beam_splitter(0.3).on(&[1, 1]).is_err());
        let r = reg(2);
        let t = beam_splitter(0.3).on(&[1, 5]).unwrap();
        assert!(matches!(apply(&ket(&r, &[1, 0]), &t), Err(Error::ModeOutOfRange { index: 5, .. })));
    }

    #[test]
    fn vacuum_is_invariant() {
        let r = reg(3);
        let v = FockState::vacuum(r);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = apply(&v, &ModeTransform::haar_random(3, &mut rng)).unwrap();
        assert_eq!(out, v);
    }

    #[test]
    fn single_photon_follows_first_column() {
        let r = reg(2);
        let theta = 0.37;
        let out = apply(&ket(&r, &[1, 0]), &beam_splitter(theta)).unwrap();
        assert!((out.amplitude(&Occupation::new(vec![1, 0])).re - theta.cos()).abs() < 1e-15);
        assert!((out.amplitude(&Occupation::new(vec![0, 1])).re - theta.sin()).abs() < 1e-15);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn hong_ou_mandel() {
        // (c a0† + s a1†)(s a0† - c a1†)|0⟩ at c = s = 1/√2 is (a0†² - a1†²)/2 |0⟩.
        let r = reg(2);
        let out = apply(&ket(&r, &[1, 1]), &beam_splitter(FRAC_PI_4)).unwrap();
        assert!(out.amplitude(&Occupation::new(vec![1, 1])).norm() < 1e-14);
        assert!((out.amplitude(&Occupation::new(vec![2, 0])).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amplitude(&Occupation::new(vec![0, 2])).re + FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn parallel_splitter_splits_one_beam() {
        let r = Arc::new(ModeRegistry::with_beams(&["1", "2"]).unwrap());
        let h1 = Occupation::from_labels(&r, &[("1", Polarization::H, 1)]).unwrap();
        let s = FockState::basis(r.clone(), h1.clone()).unwrap();
        let out = apply_parallel_polarization(&s, &beam_splitter(FRAC_PI_4), &["1", "2"]).unwrap();
        let h2 = Occupation::from_labels(&r, &[("2", Polarization::H, 1)]).unwrap();
        assert!((out.amplitude(&h1).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amplitude(&h2).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn parallel_splitter_keeps_polarizations_apart() {
        let r = Arc::new(ModeRegistry::with_beams(&["1", "2"]).unwrap());
        let hv = Occupation::from_labels(&r, &[("1", Polarization::H, 1), ("1", Polarization::V, 1)]).unwrap();
        let s = FockState::basis(r.clone(), hv).unwrap();
        let out = apply_parallel_polarization(&s, &beam_splitter(0.4), &["1", "2"]).unwrap();
        let h = r.beam_modes("1").unwrap();
        for (occ, _) in out.terms() {
            let hs = occ.get(r.require("1", Polarization::H).unwrap()) + occ.get(r.require("2", Polarization::H).unwrap());
            let vs = occ.get(r.require("1", Polarization::V).unwrap()) + occ.get(r.require("2", Polarization::V).unwrap());
            assert_eq!((hs, vs), (1, 1), "cross-polarization term {occ}");
        }
        assert_eq!(out.len(), 4);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-14);
        assert_eq!(h.len(), 2);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let r = Arc::new(ModeRegistry::with_beams(&["1", "2"]).unwrap());
        let s = ket(&r, &[1, 0, 2, 1]).add(&ket(&r, &[0, 1, 1, 0])).unwrap();
        let out = apply_parallel_polarization(&s, &ModeTransform::identity(2), &["1", "2"]).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn haar_unitaries_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for k in 1..8 {
            let t = ModeTransform::haar_random(k, &mut rng);
            assert!(unitarity_residual(t.matrix()) < 1e-12);
        }
    }
}
