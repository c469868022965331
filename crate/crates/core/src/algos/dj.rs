//! Adiabatic Deutsch–Jozsa: `H_p = 1 - |β_f⟩⟨β_f|`, `H_d = 1 - |φ⟩⟨φ|`.
//!
//! `|β_f⟩ = [μ_f|0⟩₁ + (1-μ_f)|1⟩₁] ⊗ |+⟩^{⊗(n-1)}` with site 1 the most
//! significant qubit.

use super::{check_s, qubit_ground};
use crate::error::{domain, Result};
use crate::qstate::{PureState, C64};

/// `μ_f` for a truth table: 1 if constant, 0 if balanced.
pub fn mu_of(table: &[bool]) -> Result<u8> {
    let k = table.len();
    if k < 2 || !k.is_power_of_two() {
        return Err(domain("truth table length must be a power of two >= 2"));
    }
    let ones = table.iter().filter(|&&b| b).count();
    match ones {
        0 => Ok(1),
        x if x == k => Ok(1),
        x if 2 * x == k => Ok(0),
        _ => Err(domain("function is neither constant nor balanced")),
    }
}

fn beta_amp(n: usize, mu_f: u8, i: usize) -> f64 {
    let msb = (i >> (n - 1)) & 1;
    let c = if (msb == 0) == (mu_f == 1) { 1.0 } else { 0.0 };
    c / ((1usize << (n - 1)) as f64).sqrt()
}

pub(crate) fn apply(n: usize, mu_f: u8, s: f64, psi: &[C64], out: &mut [C64]) {
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    let phi_ov: C64 = psi.iter().sum::<C64>() * amp;
    let beta_ov: C64 = psi.iter().enumerate().map(|(i, p)| p * beta_amp(n, mu_f, i)).sum();
    for (i, (o, p)) in out.iter_mut().zip(psi).enumerate() {
        *o = p - phi_ov * ((1.0 - s) * amp) - beta_ov * (s * beta_amp(n, mu_f, i));
    }
}

pub fn beta_state(n: usize, mu_f: u8) -> Result<PureState> {
    ground_from(n, mu_f, [1.0, 0.0])
}

/// `(c_β, c_⊥)` of the ground state in the orthonormal pair `{β_f, β_f^⊥}`.
pub fn dj_coefficients(s: f64) -> Result<[f64; 2]> {
    check_s(s)?;
    Ok(qubit_ground(0, s))
}

fn ground_from(n: usize, mu_f: u8, c: [f64; 2]) -> Result<PureState> {
    if mu_f > 1 {
        return Err(domain(format!("mu_f must be 0 or 1, got {mu_f}")));
    }
    if n == 0 {
        return Err(domain("n must be positive"));
    }
    let (c0, c1) = if mu_f == 1 { (c[0], c[1]) } else { (c[1], c[0]) };
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut sites = vec![[C64::new(c0, 0.0), C64::new(c1, 0.0)]];
    sites.extend(std::iter::repeat_n([C64::new(h, 0.0), C64::new(h, 0.0)], n - 1));
    PureState::product(&sites)
}

pub fn dj_ground_state(n: usize, mu_f: u8, s: f64) -> Result<PureState> {
    ground_from(n, mu_f, dj_coefficients(s)?)
}
