//! Variance-covariance matrix of local Pauli operators.
//!
//! For an `n`-qubit pure state the VCM is the `3n × 3n` Hermitian matrix
//! `V[lα, l'α'] = ⟨Δσ_α(l) Δσ_α'(l')⟩` with identity excluded. Its largest
//! eigenvalue is the largest variance any unit-norm additive observable
//! `Σ u[lα] σ_α(l)` can reach, and the eigenvector names that observable.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::hermitian_eigen;
use crate::qstate::{PauliAxis, PureState, C64};

/// Top-eigenspace spread below which `e_max` counts as degenerate.
pub const DEGENERACY_GAP: f64 = 1e-8;

/// Row/column index of `(l, α)`, sites 1-based.
pub fn vcm_index(l: usize, axis: PauliAxis) -> usize {
    3 * (l - 1) + axis.index()
}

#[derive(Debug, Clone)]
pub struct Vcm {
    pub n_sites: usize,
    pub matrix: DMatrix<C64>,
}

impl Vcm {
    pub fn dim(&self) -> usize {
        3 * self.n_sites
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }

    /// Largest `|V - V†|` entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eigen(self.matrix.clone())?.values)
    }

    /// Quadratic form `u† V u`.
    pub fn quadratic_form(&self, u: &AdditiveObservable) -> Result<C64> {
        if u.n_sites() != self.n_sites {
            return Err(domain("observable and VCM cover different numbers of sites"));
        }
        let v = u.as_vector();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..v.len() {
            for j in 0..v.len() {
                acc += v[i].conj() * self.matrix[(i, j)] * v[j];
            }
        }
        Ok(acc)
    }
}

/// Site-local coefficient table `u[l][α]` of `Â = Σ_l Σ_α u[l][α] σ_α(l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveObservable {
    pub coeffs: Vec<[C64; 3]>,
}

impl AdditiveObservable {
    pub fn new(coeffs: Vec<[C64; 3]>) -> Self {
        AdditiveObservable { coeffs }
    }

    /// `Σ_l w[l] σ_axis(l)`.
    pub fn on_axis(axis: PauliAxis, weights: &[f64]) -> Self {
        let coeffs = weights
            .iter()
            .map(|&w| {
                let mut c = [C64::new(0.0, 0.0); 3];
                c[axis.index()] = C64::new(w, 0.0);
                c
            })
            .collect();
        AdditiveObservable { coeffs }
    }

    /// `M_α = Σ_l σ_α(l)`.
    pub fn total(axis: PauliAxis, n_sites: usize) -> Self {
        Self::on_axis(axis, &vec![1.0; n_sites])
    }

    pub fn from_vector(v: &[C64]) -> Result<Self> {
        if !v.len().is_multiple_of(3) || v.is_empty() {
            return Err(domain(format!("coefficient vector length {} is not 3n", v.len())));
        }
        Ok(AdditiveObservable { coeffs: v.chunks(3).map(|c| [c[0], c[1], c[2]]).collect() })
    }

    pub fn as_vector(&self) -> Vec<C64> {
        self.coeffs.iter().flat_map(|c| c.iter().copied()).collect()
    }

    pub fn n_sites(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, l: usize, axis: PauliAxis) -> C64 {
        self.coeffs[l - 1][axis.index()]
    }

    /// `sqrt(Σ |u|²)`.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().flat_map(|c| c.iter()).map(|u| u.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        let coeffs = self.coeffs.iter().map(|c| c.map(|u| u / n)).collect();
        AdditiveObservable { coeffs }
    }

    /// `Â|ψ⟩`.
    pub fn apply(&self, state: &PureState) -> Result<Vec<C64>> {
        if self.n_sites() != state.num_qubits() {
            return Err(domain(format!(
                "{}-site observable applied to a {}-qubit state",
                self.n_sites(),
                state.num_qubits()
            )));
        }
        let mut out = vec![C64::new(0.0, 0.0); state.dim()];
        for (l, c) in self.coeffs.iter().enumerate() {
            for axis in PauliAxis::ALL {
                let u = c[axis.index()];
                if u == C64::new(0.0, 0.0) {
                    continue;
                }
                let image = state.apply_pauli(l + 1, axis)?;
                out.iter_mut().zip(image).for_each(|(o, x)| *o += u * x);
            }
        }
        Ok(out)
    }

    /// `⟨ψ|Â|ψ⟩`.
    pub fn expectation(&self, state: &PureState) -> Result<C64> {
        let image = self.apply(state)?;
        Ok(state.amplitudes().iter().zip(&image).map(|(a, b)| a.conj() * b).sum())
    }
}

/// `V[lα, l'α'] = ⟨σ_α(l) σ_α'(l')⟩ - ⟨σ_α(l)⟩⟨σ_α'(l')⟩`.
pub fn build_vcm(state: &PureState) -> Result<Vcm> {
    let n = state.num_qubits();
    let dim = 3 * n;
    let sites: Vec<(usize, PauliAxis)> = (1..=n)
        .flat_map(|l| PauliAxis::ALL.into_iter().map(move |a| (l, a)))
        .collect();
    let means = sites
        .iter()
        .map(|&(l, a)| state.pauli_expectation(l, a))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for i in 0..dim {
        let (l, a) = sites[i];
        matrix[(i, i)] = C64::new(1.0 - means[i] * means[i], 0.0);
        for j in (i + 1)..dim {
            let (l2, b) = sites[j];
            let v = state.pauli_correlation(l, a, l2, b)? - means[i] * means[j];
            matrix[(i, j)] = v;
            matrix[(j, i)] = v.conj();
        }
    }
    Ok(Vcm { n_sites: n, matrix })
}

/// Largest VCM eigenvalue with its eigenvector read as an observable.
#[derive(Debug, Clone)]
pub struct MaxEigenpair {
    pub e_max: f64,
    /// Unit-norm; global phase fixed so the largest-magnitude coefficient is real positive.
    pub observable: AdditiveObservable,
    /// `e_max` minus the next eigenvalue.
    pub gap: f64,
}

impl MaxEigenpair {
    pub fn is_degenerate(&self) -> bool {
        self.gap < DEGENERACY_GAP
    }
}

pub fn max_eigenpair(v: &Vcm) -> Result<MaxEigenpair> {
    let spec = hermitian_eigen(v.matrix.clone())?;
    let top = spec.values.len() - 1;
    let e_max = spec.values[top];
    let gap = if top == 0 { f64::INFINITY } else { e_max - spec.values[top - 1] };
    let mut u: Vec<C64> = spec.vector(top).iter().copied().collect();
    fix_phase(&mut u);
    Ok(MaxEigenpair { e_max, observable: AdditiveObservable::from_vector(&u)?, gap })
}

/// Rotates `u` so its largest-magnitude entry (first one on ties) is real positive.
pub(crate) fn fix_phase(u: &mut [C64]) {
    let biggest = u.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if biggest == 0.0 {
        return;
    }
    let pivot = u.iter().position(|c| c.norm() >= biggest * (1.0 - 1e-9)).unwrap_or(0);
    let phase = u[pivot].conj() / u[pivot].norm();
    u.iter_mut().for_each(|c| *c *= phase);
}

/// `⟨ψ|ΔÂ† ΔÂ|ψ⟩ = ‖(Â - ⟨Â⟩)ψ‖²`, computed on the state vector directly.
pub fn observable_variance(state: &PureState, a: &AdditiveObservable) -> Result<f64> {
    let image = a.apply(state)?;
    let mean: C64 = state.amplitudes().iter().zip(&image).map(|(x, y)| x.conj() * y).sum();
    Ok(image
        .iter()
        .zip(state.amplitudes())
        .map(|(y, x)| (y - mean * x).norm_sqr())
        .sum())
}

/// `|⟨Â⟩₁ - ⟨Â⟩₂|`.
pub fn mean_distance(s1: &PureState, s2: &PureState, a: &AdditiveObservable) -> Result<f64> {
    if s1.num_qubits() != s2.num_qubits() {
        return Err(domain("states have different sizes"));
    }
    Ok((a.expectation(s1)? - a.expectation(s2)?).norm())
}

/// Convenience: `e_max` of the state's VCM.
pub fn e_max(state: &PureState) -> Result<f64> {
    Ok(max_eigenpair(&build_vcm(state)?)?.e_max)
}
