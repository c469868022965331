//! Adiabatic Grover search: `H_p = 1 - |w*⟩⟨w*|`, `H_d = 1 - |φ⟩⟨φ|`.

use serde::{Deserialize, Serialize};

use super::check_s;
use crate::error::{domain, Result};
use crate::qstate::{PureState, C64};

pub(crate) fn apply(n: usize, w_star: u64, s: f64, psi: &[C64], out: &mut [C64]) {
    let dim = 1usize << n;
    let amp = 1.0 / (dim as f64).sqrt();
    let overlap: C64 = psi.iter().sum::<C64>() * amp;
    for (o, p) in out.iter_mut().zip(psi) {
        *o = p - overlap * ((1.0 - s) * amp);
    }
    out[w_star as usize] -= psi[w_star as usize] * s;
}

/// Closed-form ground state data `|ψ⁰(s)⟩ = a_s|w*⟩ + b_s|φ⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroverAnalytic {
    pub n: usize,
    pub s: f64,
    pub theta_s: f64,
    pub a_s: f64,
    pub b_s: f64,
    /// `ΔE(s)`, the gap above the ground state.
    pub gap: f64,
}

fn theta(n_dim: f64, s: f64) -> (f64, f64) {
    let gap = ((1.0 - 2.0 * s).powi(2) + 4.0 * s * (1.0 - s) / n_dim).sqrt();
    let sin = 2.0 * (1.0 - s) * (n_dim - 1.0).sqrt() / (gap * n_dim);
    let cos = -((2.0 * s - 1.0) + 2.0 * (1.0 - s) / n_dim) / gap;
    (sin.atan2(cos), gap)
}

impl GroverAnalytic {
    pub fn new(n: usize, s: f64) -> Result<Self> {
        check_s(s)?;
        if n == 0 || n > 62 {
            return Err(domain(format!("Grover size n = {n} out of range")));
        }
        let nd = (1u64 << n) as f64;
        let (theta_s, gap) = theta(nd, s);
        let (theta_0, _) = theta(nd, 0.0);
        let half = 0.5 * theta_s;
        let a_s = half.sin() - half.cos() * (0.5 * theta_0).tan();
        let b_s = half.cos() / (0.5 * theta_0).cos();
        Ok(GroverAnalytic { n, s, theta_s, a_s, b_s, gap })
    }

    /// `a² + b² + 2ab/√N`, which is 1 for a normalized state.
    pub fn norm_sqr(&self) -> f64 {
        let nd = (1u64 << self.n) as f64;
        self.a_s * self.a_s + self.b_s * self.b_s + 2.0 * self.a_s * self.b_s / nd.sqrt()
    }
}

pub fn grover_ground_state(n: usize, w_star: u64, s: f64) -> Result<PureState> {
    if w_star >> n != 0 {
        return Err(domain(format!("w* = {w_star} does not fit in {n} bits")));
    }
    let g = GroverAnalytic::new(n, s)?;
    let dim = 1usize << n;
    let mut amps = vec![g.b_s / (dim as f64).sqrt(); dim];
    amps[w_star as usize] += g.a_s;
    PureState::from_real(n, &amps)
}

/// `⟨ΔM_x²⟩` of the Grover ground state for `M_x = Σ_l σ_x(l)`.
pub fn grover_mx_variance_analytic(n: usize, s: f64) -> Result<f64> {
    let g = GroverAnalytic::new(n, s)?;
    let nf = n as f64;
    let rt = ((1u64 << n) as f64).sqrt();
    let (a, b) = (g.a_s, g.b_s);
    let b2 = b * b;
    Ok(b2 * (1.0 - b2) * nf * nf + a * a * nf + 2.0 * a * b * (1.0 - 2.0 * b2) * nf * nf / rt
        - 4.0 * a * a * b2 * nf * nf / (rt * rt))
}

/// Leading prefactor `b_s²(1 - b_s²)` of the `n²` term.
pub fn grover_mx_prefactor(n: usize, s: f64) -> Result<f64> {
    let b2 = GroverAnalytic::new(n, s)?.b_s.powi(2);
    Ok(b2 * (1.0 - b2))
}
