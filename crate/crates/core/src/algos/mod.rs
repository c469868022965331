//! Adiabatic Grover, Deutsch–Jozsa, Bernstein–Vazirani and Simon families.
//!
//! Each family interpolates `H(s) = s·H_p + (1-s)·H_d`. Hamiltonians are
//! applied matrix-free; [`dense_hamiltonian`] exists only for exact
//! diagonalization cross-checks at small sizes.

pub mod bv;
pub mod dj;
pub mod gf2;
pub mod grover;
pub mod reconstruct;
pub mod simon;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::qstate::{PureState, C64, MAX_QUBITS};

/// Largest Hilbert-space dimension handed to the dense eigensolver.
pub const DENSE_DIM_CAP: usize = 1 << 12;

/// Value of bit `l` (1-based, `l = 1` most significant) of an `n`-bit string.
#[inline]
pub fn bit(x: u64, l: usize, n: usize) -> u64 {
    (x >> (n - l)) & 1
}

/// Bitwise inner product modulo 2.
#[inline]
pub fn dot2(x: u64, y: u64) -> u64 {
    u64::from((x & y).count_ones() % 2 == 1)
}

/// One problem instance of a gate-model-derived family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum InstanceSpec {
    Grover { n: usize, w_star: u64 },
    Dj { n: usize, mu_f: u8 },
    Bv { n: usize, a: u64 },
    Simon { n: usize, a: u64 },
}

impl InstanceSpec {
    pub fn validate(&self) -> Result<()> {
        let (n, x) = match *self {
            InstanceSpec::Grover { n, w_star } => (n, w_star),
            InstanceSpec::Dj { n, mu_f } => {
                if mu_f > 1 {
                    return Err(domain(format!("mu_f must be 0 or 1, got {mu_f}")));
                }
                (n, 0)
            }
            InstanceSpec::Bv { n, a } => (n, a),
            InstanceSpec::Simon { n, a } => {
                if a == 0 {
                    return Err(domain("Simon's problem requires a nonzero hidden string"));
                }
                if n < 2 {
                    return Err(domain("Simon instances need n >= 2"));
                }
                (n, a)
            }
        };
        if n == 0 || n > 63 {
            return Err(domain(format!("problem size n = {n} out of range")));
        }
        if x >> n != 0 {
            return Err(domain(format!("bit-string {x:#b} does not fit in {n} bits")));
        }
        if self.num_qubits() > MAX_QUBITS {
            return Err(Error::Capability(format!(
                "{} qubits exceed the dense cap of {MAX_QUBITS}",
                self.num_qubits()
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        match *self {
            InstanceSpec::Grover { n, .. }
            | InstanceSpec::Dj { n, .. }
            | InstanceSpec::Bv { n, .. }
            | InstanceSpec::Simon { n, .. } => n,
        }
    }

    /// Total register size: `n`, `n`, `n+1`, `2n-1`.
    pub fn num_qubits(&self) -> usize {
        match *self {
            InstanceSpec::Grover { n, .. } | InstanceSpec::Dj { n, .. } => n,
            InstanceSpec::Bv { n, .. } => n + 1,
            InstanceSpec::Simon { n, .. } => 2 * n - 1,
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            InstanceSpec::Grover { .. } => "grover",
            InstanceSpec::Dj { .. } => "dj",
            InstanceSpec::Bv { .. } => "bv",
            InstanceSpec::Simon { .. } => "simon",
        }
    }

    /// Instance label `ν` as an integer.
    pub fn label(&self) -> u64 {
        match *self {
            InstanceSpec::Grover { w_star, .. } => w_star,
            InstanceSpec::Dj { mu_f, .. } => u64::from(mu_f),
            InstanceSpec::Bv { a, .. } | InstanceSpec::Simon { a, .. } => a,
        }
    }

    /// Ground state of `H_d`, the state every run starts in.
    pub fn initial_state(&self) -> Result<PureState> {
        self.validate()?;
        PureState::uniform(self.num_qubits())
    }

    /// Upper bound on the operator norm of `H(s)` over `s ∈ [0, 1]`.
    pub fn norm_bound(&self) -> f64 {
        match *self {
            InstanceSpec::Simon { n, .. } => (n - 1) as f64,
            _ => 1.0,
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(domain(format!("annealing parameter s = {s} outside [0, 1]")));
    }
    Ok(())
}

/// `H(s)|ψ⟩` for raw amplitudes; the result is not normalized.
pub fn hamiltonian_apply_raw(spec: &InstanceSpec, s: f64, psi: &[C64], out: &mut [C64]) -> Result<()> {
    let dim = 1usize << spec.num_qubits();
    if psi.len() != dim || out.len() != dim {
        return Err(domain(format!(
            "state of dimension {} does not match a {}-qubit instance",
            psi.len(),
            spec.num_qubits()
        )));
    }
    match *spec {
        InstanceSpec::Grover { n, w_star } => grover::apply(n, w_star, s, psi, out),
        InstanceSpec::Dj { n, mu_f } => dj::apply(n, mu_f, s, psi, out),
        InstanceSpec::Bv { n, a } => bv::apply(n, a, s, psi, out),
        InstanceSpec::Simon { n, a } => simon::apply(n, &simon::SimonOracle::new(n, a)?, s, psi, out),
    }
    Ok(())
}

/// `H(s)|ψ⟩` (unnormalized image).
pub fn hamiltonian_apply(spec: &InstanceSpec, s: f64, state: &PureState) -> Result<Vec<C64>> {
    spec.validate()?;
    check_s(s)?;
    let mut out = vec![C64::new(0.0, 0.0); state.dim()];
    hamiltonian_apply_raw(spec, s, state.amplitudes(), &mut out)?;
    Ok(out)
}

/// `⟨ψ|H(s)|ψ⟩`.
pub fn energy(spec: &InstanceSpec, s: f64, state: &PureState) -> Result<f64> {
    let h = hamiltonian_apply(spec, s, state)?;
    Ok(state.amplitudes().iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum())
}

/// Rayleigh residual `‖(H - ⟨H⟩)ψ‖`.
pub fn eigen_residual(spec: &InstanceSpec, s: f64, state: &PureState) -> Result<f64> {
    let h = hamiltonian_apply(spec, s, state)?;
    let e: f64 = state.amplitudes().iter().zip(&h).map(|(a, b)| (a.conj() * b).re).sum();
    Ok(h.iter()
        .zip(state.amplitudes())
        .map(|(hb, a)| (hb - e * a).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// Dense real matrix of `H(s)`, built column by column from the matrix-free kernel.
pub fn dense_hamiltonian(spec: &InstanceSpec, s: f64) -> Result<DMatrix<f64>> {
    spec.validate()?;
    check_s(s)?;
    let dim = 1usize << spec.num_qubits();
    if dim > DENSE_DIM_CAP {
        return Err(Error::Capability(format!(
            "dense Hamiltonian of dimension {dim} exceeds the cap {DENSE_DIM_CAP}"
        )));
    }
    let mut m = DMatrix::zeros(dim, dim);
    let mut e = vec![C64::new(0.0, 0.0); dim];
    let mut col = vec![C64::new(0.0, 0.0); dim];
    for j in 0..dim {
        e[j] = C64::new(1.0, 0.0);
        hamiltonian_apply_raw(spec, s, &e, &mut col)?;
        for i in 0..dim {
            m[(i, j)] = col[i].re;
        }
        e[j] = C64::new(0.0, 0.0);
    }
    Ok(m)
}

/// Ground state of the two-level block `½[1 - σ·s·Z - (1-s)·X]`, `σ = (-1)^b`,
/// with non-negative components so it varies continuously in `s`.
pub(crate) fn qubit_ground(b: u64, s: f64) -> [f64; 2] {
    let sigma = if b == 0 { 1.0 } else { -1.0 };
    let a = 0.5 * (1.0 - sigma * s);
    let d = 0.5 * (1.0 + sigma * s);
    let off = -0.5 * (1.0 - s);
    let lam = 0.5 * (a + d) - (0.25 * (a - d) * (a - d) + off * off).sqrt();
    let v1 = [-off, a - lam];
    let v2 = [d - lam, -off];
    let pick = if v1[0].hypot(v1[1]) >= v2[0].hypot(v2[1]) { v1 } else { v2 };
    let norm = pick[0].hypot(pick[1]);
    [pick[0] / norm, pick[1] / norm]
}

/// Gap above the degenerate ground space of the BV and Simon Hamiltonians.
pub fn oracle_block_gap(s: f64) -> f64 {
    (s * s + (1.0 - s) * (1.0 - s)).sqrt()
}
