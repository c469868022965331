//! Adiabatic Bernstein–Vazirani on `n + 1` qubits.
//!
//! Basis index `(w << 1) | b`: the query register `w` occupies sites `1..=n`
//! and the answer qubit `b` is site `n + 1`. The problem Hamiltonian penalizes
//! `b ≠ f_a(w)`, so `|w⟩|f_a(w)⟩` spans its ground space.

use super::{check_s, dot2, qubit_ground};
use crate::error::{domain, Result};
use crate::qstate::{PauliAxis, PureState, C64};
use crate::vcm::AdditiveObservable;

pub(crate) fn apply(_n: usize, a: u64, s: f64, psi: &[C64], out: &mut [C64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let w = (i >> 1) as u64;
        let b = (i & 1) as u64;
        let penalty = if b == dot2(a, w) { 0.0 } else { s };
        *o = psi[i] * penalty + (psi[i] - psi[i ^ 1]) * (0.5 * (1.0 - s));
    }
}

fn check(n: usize, a: u64) -> Result<()> {
    if n == 0 || n > 62 || a >> n != 0 {
        return Err(domain(format!("invalid BV instance n = {n}, a = {a:#b}")));
    }
    Ok(())
}

/// `(1/√N) Σ_w |w⟩ ⊗ χ_{f_a(w)}(s)`: the ground state reached from `|+⟩^{⊗(n+1)}`.
pub fn bv_ground_state(n: usize, a: u64, s: f64) -> Result<PureState> {
    check(n, a)?;
    check_s(s)?;
    let blocks = [qubit_ground(0, s), qubit_ground(1, s)];
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    let mut amps = vec![0.0; 2 * dim];
    for w in 0..dim {
        let chi = blocks[dot2(a, w as u64) as usize];
        amps[2 * w] = norm * chi[0];
        amps[2 * w + 1] = norm * chi[1];
    }
    PureState::from_real(n + 1, &amps)
}

/// `(1/√N) Σ_w |w⟩ ⊗ |f_a(w)⟩`.
pub fn bv_state_s1(n: usize, a: u64) -> Result<PureState> {
    bv_ground_state(n, a, 1.0)
}

/// `⊗_l (|0⟩ + (-1)^{a_l}|1⟩)/√2 ⊗ |−⟩`: the post-measurement state for outcome −1.
pub fn bv_minus_state(n: usize, a: u64) -> Result<PureState> {
    check(n, a)?;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut sites: Vec<[C64; 2]> = (1..=n)
        .map(|l| {
            let sign = if super::bit(a, l, n) == 1 { -h } else { h };
            [C64::new(h, 0.0), C64::new(sign, 0.0)]
        })
        .collect();
    sites.push([C64::new(h, 0.0), C64::new(-h, 0.0)]);
    PureState::product(&sites)
}

/// `2` for `a = 0`, otherwise `1 + Σ_l a_l`.
pub fn bv_emax_formula(n: usize, a: u64) -> Result<f64> {
    check(n, a)?;
    Ok(if a == 0 { 2.0 } else { 1.0 + f64::from(a.count_ones()) })
}

/// `Σ_l a_l σ_x(l) + σ_x(n+1)`, unnormalized.
pub fn bv_reference_observable(n: usize, a: u64) -> Result<AdditiveObservable> {
    check(n, a)?;
    let mut w: Vec<f64> = (1..=n).map(|l| super::bit(a, l, n) as f64).collect();
    w.push(1.0);
    Ok(AdditiveObservable::on_axis(PauliAxis::X, &w))
}
