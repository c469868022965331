//! Adiabatic Simon algorithm on `2n - 1` qubits.
//!
//! Basis index `(w << (n-1)) | y`: register 1 (`w`, sites `1..=n`) and
//! register 2 (`y`, sites `n+1..=2n-1`). The problem Hamiltonian is the
//! Hamming distance between `y` and `g(w)`.

use serde::{Deserialize, Serialize};

use super::{check_s, qubit_ground};
use crate::error::{domain, Result};
use crate::qstate::{PauliAxis, PureState, C64};
use crate::vcm::AdditiveObservable;

/// Two-to-one oracle `g` with `g(w) = g(w ⊕ a)`.
///
/// The coset `{w, w ⊕ a}` is labeled by the member whose bit at the lowest
/// set bit of `a` (the pivot) is zero; deleting that bit gives `g(w)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonOracle {
    pub n: usize,
    pub a: u64,
    /// Pivot as a bit position counted from the least significant bit.
    pub pivot: u32,
}

impl SimonOracle {
    pub fn new(n: usize, a: u64) -> Result<Self> {
        if a == 0 {
            return Err(domain("Simon's problem requires a nonzero hidden string"));
        }
        if !(2..=62).contains(&n) || a >> n != 0 {
            return Err(domain(format!("invalid Simon instance n = {n}, a = {a:#b}")));
        }
        Ok(SimonOracle { n, a, pivot: a.trailing_zeros() })
    }

    pub fn g(&self, w: u64) -> u64 {
        let r = if (w >> self.pivot) & 1 == 0 { w } else { w ^ self.a };
        let low = r & ((1u64 << self.pivot) - 1);
        ((r >> (self.pivot + 1)) << self.pivot) | low
    }
}

pub fn simon_oracle(n: usize, a: u64) -> Result<SimonOracle> {
    SimonOracle::new(n, a)
}

pub(crate) fn apply(n: usize, oracle: &SimonOracle, s: f64, psi: &[C64], out: &mut [C64]) {
    let m = n - 1;
    let ymask = (1usize << m) - 1;
    for (i, o) in out.iter_mut().enumerate() {
        let w = (i >> m) as u64;
        let y = (i & ymask) as u64;
        let dist = f64::from((y ^ oracle.g(w)).count_ones());
        let mut acc = psi[i] * (s * dist);
        for j in 0..m {
            acc += (psi[i] - psi[i ^ (1 << j)]) * (0.5 * (1.0 - s));
        }
        *o = acc;
    }
}

/// `(1/√N) Σ_w |w⟩ ⊗ ⊗_j χ_{g_j(w)}(s)`, continuous from `|+⟩^{⊗(2n-1)}`.
pub fn simon_ground_state(n: usize, a: u64, s: f64) -> Result<PureState> {
    let oracle = SimonOracle::new(n, a)?;
    check_s(s)?;
    let m = n - 1;
    let blocks = [qubit_ground(0, s), qubit_ground(1, s)];
    let ny = 1usize << m;
    let norm = 1.0 / ((1u64 << n) as f64).sqrt();
    let mut amps = vec![0.0; (1usize << n) * ny];
    for w in 0..(1u64 << n) {
        let g = oracle.g(w);
        for y in 0..ny {
            let mut amp = norm;
            for j in 0..m {
                amp *= blocks[((g >> j) & 1) as usize][(y >> j) & 1];
            }
            amps[((w as usize) << m) | y] = amp;
        }
    }
    PureState::from_real(2 * n - 1, &amps)
}

/// `(1/√N) Σ_w |w⟩ ⊗ |g(w)⟩`.
pub fn simon_state_s1(n: usize, a: u64) -> Result<PureState> {
    simon_ground_state(n, a, 1.0)
}

/// `(|w*⟩ + |w* ⊕ a⟩)/√2 ⊗ |g(w*)⟩`.
pub fn simon_post_state(n: usize, a: u64, w_star: u64) -> Result<PureState> {
    let oracle = SimonOracle::new(n, a)?;
    if w_star >> n != 0 {
        return Err(domain(format!("w* = {w_star} does not fit in {n} bits")));
    }
    let m = n - 1;
    let g = oracle.g(w_star) as usize;
    let mut amps = vec![0.0; 1usize << (2 * n - 1)];
    amps[((w_star as usize) << m) | g] = 1.0;
    amps[(((w_star ^ a) as usize) << m) | g] = 1.0;
    PureState::from_real(2 * n - 1, &amps)
}

/// `2` when `a` has a single set bit, otherwise `Σ_l a_l`.
pub fn simon_emax_formula(n: usize, a: u64) -> Result<f64> {
    SimonOracle::new(n, a)?;
    Ok(if a.is_power_of_two() { 2.0 } else { f64::from(a.count_ones()) })
}

/// `Σ_l (-1)^{w*_l} a_l σ_z(l)` on register 1, zero on register 2.
pub fn simon_reference_observable(n: usize, a: u64, w_star: u64) -> Result<AdditiveObservable> {
    SimonOracle::new(n, a)?;
    let mut w: Vec<f64> = (1..=n)
        .map(|l| {
            let al = super::bit(a, l, n) as f64;
            if super::bit(w_star, l, n) == 1 { -al } else { al }
        })
        .collect();
    w.resize(2 * n - 1, 0.0);
    Ok(AdditiveObservable::on_axis(PauliAxis::Z, &w))
}
