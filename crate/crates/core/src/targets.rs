//! Reference states the schemes are meant to produce, and state fidelity.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeRegistry, Occupation, Polarization};

use Polarization::{H, V};

#[derive(Debug, Clone, PartialEq)]
pub struct NamedState {
    pub name: String,
    pub state: FockState,
}

impl NamedState {
    pub fn registry(&self) -> &Arc<ModeRegistry> {
        self.state.registry()
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn distinct(beams: &[&str]) -> Result<()> {
    for (i, a) in beams.iter().enumerate() {
        if beams[i + 1..].contains(a) {
            return Err(Error::InvalidArgument(format!("beam `{a}` listed twice")));
        }
    }
    Ok(())
}

/// `(|H_a V_b⟩ + |V_a H_b⟩)/√2`.
pub fn epr_pair(beam_a: &str, beam_b: &str) -> Result<NamedState> {
    distinct(&[beam_a, beam_b])?;
    let reg = ModeRegistry::with_beams(&[beam_a, beam_b])?;
    let amp = real(std::f64::consts::FRAC_1_SQRT_2);
    let terms = vec![
        (Occupation::from_labels(&reg, &[(beam_a, H, 1), (beam_b, V, 1)])?, amp),
        (Occupation::from_labels(&reg, &[(beam_a, V, 1), (beam_b, H, 1)])?, amp),
    ];
    Ok(NamedState { name: "epr".into(), state: FockState::from_terms(Arc::new(reg), terms)? })
}

/// Two maximally entangled spin-N/2 systems carried by `n` photons per beam:
/// `Σ_m |m H, (n−m) V⟩₁ |(n−m) H, m V⟩₂ / √(n+1)`.
pub fn spin_j_state(n: u32, beam_1: &str, beam_2: &str) -> Result<NamedState> {
    if n == 0 {
        return Err(Error::InvalidArgument("spin-j state needs at least one photon pair".into()));
    }
    distinct(&[beam_1, beam_2])?;
    let reg = ModeRegistry::with_beams(&[beam_1, beam_2])?;
    let amp = real(1.0 / ((n + 1) as f64).sqrt());
    let terms = (0..=n)
        .map(|m| {
            let occ = Occupation::from_labels(
                &reg,
                &[(beam_1, H, m), (beam_1, V, n - m), (beam_2, H, n - m), (beam_2, V, m)],
            )?;
            Ok((occ, amp))
        })
        .collect::<Result<Vec<_>>>()?;
    let name = if n == 2 { "spin1-four-photon".into() } else { format!("spin-j(n={n})") };
    Ok(NamedState { name, state: FockState::from_terms(Arc::new(reg), terms)? })
}

/// The six-term four-beam telecloning state (one photon per beam).
pub fn telecloning_state(beams: [&str; 4]) -> Result<NamedState> {
    distinct(&beams)?;
    let [b1, b2, b3, b4] = beams;
    let reg = ModeRegistry::with_beams(&beams)?;
    let big = real(1.0 / 3f64.sqrt());
    let small = real(1.0 / (2.0 * 3f64.sqrt()));
    let pattern = |p: [Polarization; 4]| {
        Occupation::from_labels(&reg, &[(b1, p[0], 1), (b2, p[1], 1), (b3, p[2], 1), (b4, p[3], 1)])
    };
    let mut terms = vec![(pattern([H, H, V, V])?, big), (pattern([V, V, H, H])?, big)];
    for left in [[H, V], [V, H]] {
        for right in [[H, V], [V, H]] {
            terms.push((pattern([left[0], left[1], right[0], right[1]])?, small));
        }
    }
    Ok(NamedState { name: "telecloning".into(), state: FockState::from_terms(Arc::new(reg), terms)? })
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &FockState, b: &FockState) -> Result<f64> {
    Ok(a.inner_product(b)?.norm_sqr())
}

/// Fidelity after aligning `state` onto the target's registry by label.
pub fn fidelity_to(target: &NamedState, state: &FockState) -> Result<f64> {
    let aligned = state.align_to(target.registry().clone())?;
    fidelity(&target.state, &aligned)
}
