//! Dense pure-state engine for small qubit registers.
//!
//! Sites are numbered `1..=n` and site 1 is the most significant bit of the
//! basis index, so `|w⟩ = |w_1 w_2 … w_n⟩` reads left to right like the
//! binary literal of `w`. All Pauli actions are bit-index kernels; no
//! `2^n × 2^n` operator is ever formed.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub type C64 = Complex64;

/// Largest register the dense engine accepts.
pub const MAX_QUBITS: usize = 24;

/// Normalization tolerance enforced by constructors.
pub const NORM_TOL: f64 = 1e-12;

const I: C64 = C64::new(0.0, 1.0);

/// Local Pauli basis (identity excluded).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Position within `ALL`.
    pub fn index(self) -> usize {
        match self {
            PauliAxis::X => 0,
            PauliAxis::Y => 1,
            PauliAxis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Image of basis index `w` under this Pauli on the bit selected by `mask`.
    #[inline]
    fn act(self, mask: usize, w: usize) -> (usize, C64) {
        let bit_set = w & mask != 0;
        match self {
            PauliAxis::X => (w ^ mask, C64::new(1.0, 0.0)),
            // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩
            PauliAxis::Y => (w ^ mask, if bit_set { -I } else { I }),
            PauliAxis::Z => (w, C64::new(if bit_set { -1.0 } else { 1.0 }, 0.0)),
        }
    }
}

/// Result of a projective measurement.
#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    /// `±1` for single-Pauli measurements, or the measured bit-string with the
    /// first listed site as its most significant bit.
    pub value: i64,
    /// Born probability of `value` in the pre-measurement state.
    pub probability: f64,
    pub post_state: PureState,
}

/// Normalized state vector over `2^num_qubits` computational basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amps: Vec<C64>,
}

fn check_size(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 {
        return Err(domain("a register needs at least one qubit"));
    }
    if num_qubits > MAX_QUBITS {
        return Err(Error::Capability(format!(
            "{num_qubits} qubits requested; the dense engine is capped at {MAX_QUBITS}"
        )));
    }
    Ok(())
}

impl PureState {
    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        check_size(num_qubits)?;
        if amps.len() != 1usize << num_qubits {
            return Err(domain(format!(
                "expected {} amplitudes for {num_qubits} qubits, got {}",
                1usize << num_qubits,
                amps.len()
            )));
        }
        let mut state = PureState { num_qubits, amps };
        state.normalize()?;
        Ok(state)
    }

    /// Real-amplitude convenience constructor.
    pub fn from_real(num_qubits: usize, amps: &[f64]) -> Result<Self> {
        Self::from_amplitudes(num_qubits, amps.iter().map(|&a| C64::new(a, 0.0)).collect())
    }

    /// Computational basis state `|w⟩`.
    pub fn basis(num_qubits: usize, w: u64) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        if w as u128 >= dim as u128 {
            return Err(domain(format!("basis index {w} out of range for {num_qubits} qubits")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[w as usize] = C64::new(1.0, 0.0);
        Ok(PureState { num_qubits, amps })
    }

    /// `⊗_l |+⟩_l`, the uniform superposition of all basis states.
    pub fn uniform(num_qubits: usize) -> Result<Self> {
        check_size(num_qubits)?;
        let dim = 1usize << num_qubits;
        let a = C64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(PureState { num_qubits, amps: vec![a; dim] })
    }

    /// Tensor product of single-qubit states, site 1 first.
    pub fn product(sites: &[[C64; 2]]) -> Result<Self> {
        check_size(sites.len())?;
        let mut amps = vec![C64::new(1.0, 0.0)];
        for site in sites {
            let norm = (site[0].norm_sqr() + site[1].norm_sqr()).sqrt();
            if norm == 0.0 {
                return Err(domain("zero single-qubit factor in product state"));
            }
            amps = amps
                .iter()
                .flat_map(|&a| [a * site[0] / norm, a * site[1] / norm])
                .collect();
        }
        Ok(PureState { num_qubits: sites.len(), amps })
    }

    /// `self ⊗ other`, with `self` on the leading sites.
    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        check_size(self.num_qubits + other.num_qubits)?;
        let amps = self
            .amps
            .iter()
            .flat_map(|&a| other.amps.iter().map(move |&b| a * b))
            .collect();
        Ok(PureState { num_qubits: self.num_qubits + other.num_qubits, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::Numeric(format!("cannot normalize a state of norm {norm}")));
        }
        let inv = norm.recip();
        self.amps.iter_mut().for_each(|a| *a *= inv);
        Ok(())
    }

    /// Bit mask of site `l` (1-based, site 1 = most significant bit).
    pub fn site_mask(&self, l: usize) -> Result<usize> {
        if l == 0 || l > self.num_qubits {
            return Err(domain(format!("site {l} out of range 1..={}", self.num_qubits)));
        }
        Ok(1usize << (self.num_qubits - l))
    }

    /// `σ_α(l)|ψ⟩`.
    pub fn apply_pauli(&self, l: usize, axis: PauliAxis) -> Result<Vec<C64>> {
        let mask = self.site_mask(l)?;
        let mut out = vec![C64::new(0.0, 0.0); self.dim()];
        for (w, &a) in self.amps.iter().enumerate() {
            let (t, ph) = axis.act(mask, w);
            out[t] = ph * a;
        }
        Ok(out)
    }

    /// `⟨ψ|σ_α(l)|ψ⟩`.
    pub fn pauli_expectation(&self, l: usize, axis: PauliAxis) -> Result<f64> {
        let mask = self.site_mask(l)?;
        let mut acc = C64::new(0.0, 0.0);
        for (w, &a) in self.amps.iter().enumerate() {
            let (t, ph) = axis.act(mask, w);
            acc += self.amps[t].conj() * ph * a;
        }
        Ok(acc.re)
    }

    /// `⟨ψ|σ_α(l) σ_β(l2)|ψ⟩`.
    pub fn pauli_correlation(&self, l: usize, a: PauliAxis, l2: usize, b: PauliAxis) -> Result<C64> {
        let m1 = self.site_mask(l)?;
        let m2 = self.site_mask(l2)?;
        let mut acc = C64::new(0.0, 0.0);
        for (w, &amp) in self.amps.iter().enumerate() {
            let (t1, ph1) = b.act(m2, w);
            let (t2, ph2) = a.act(m1, t1);
            acc += self.amps[t2].conj() * ph1 * ph2 * amp;
        }
        Ok(acc)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<C64> {
        if self.num_qubits != other.num_qubits {
            return Err(domain(format!(
                "inner product between {}- and {}-qubit states",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Projective measurement of `σ_x(l)`.
    pub fn measure_pauli_x<R: Rng + ?Sized>(&self, l: usize, rng: &mut R) -> Result<MeasurementOutcome> {
        let mask = self.site_mask(l)?;
        // (1 ± X)/2 mixes the pair (w, w ^ mask)
        let mut plus = vec![C64::new(0.0, 0.0); self.dim()];
        let mut minus = vec![C64::new(0.0, 0.0); self.dim()];
        for (w, &a) in self.amps.iter().enumerate() {
            let partner = self.amps[w ^ mask];
            plus[w] = 0.5 * (a + partner);
            minus[w] = 0.5 * (a - partner);
        }
        let p_plus: f64 = plus.iter().map(|a| a.norm_sqr()).sum();
        let p_plus = p_plus.clamp(0.0, 1.0);
        let draw: f64 = rng.random();
        // outcomes with rounding-level probability are never selected
        let take_plus = if p_plus > 1.0 - 1e-14 {
            true
        } else if p_plus < 1e-14 {
            false
        } else {
            draw < p_plus
        };
        let (value, probability, amps) = if take_plus {
            (1, p_plus, plus)
        } else {
            (-1, 1.0 - p_plus, minus)
        };
        let post_state = PureState::from_amplitudes(self.num_qubits, amps)?;
        Ok(MeasurementOutcome { value, probability, post_state })
    }

    /// Computational-basis measurement of the listed sites.
    pub fn measure_subsystem_z<R: Rng + ?Sized>(
        &self,
        sites: &[usize],
        rng: &mut R,
    ) -> Result<MeasurementOutcome> {
        let masks = sites
            .iter()
            .map(|&l| self.site_mask(l))
            .collect::<Result<Vec<_>>>()?;
        for (i, l) in sites.iter().enumerate() {
            if sites[..i].contains(l) {
                return Err(domain(format!("site {l} listed twice")));
            }
        }
        if sites.len() > 62 {
            return Err(domain("too many sites for a single outcome label"));
        }
        let label = |w: usize| -> usize {
            masks
                .iter()
                .fold(0usize, |acc, &m| (acc << 1) | usize::from(w & m != 0))
        };
        let mut probs = vec![0.0f64; 1usize << sites.len()];
        for (w, a) in self.amps.iter().enumerate() {
            probs[label(w)] += a.norm_sqr();
        }
        let draw: f64 = rng.random();
        let mut acc = 0.0;
        let mut outcome = probs.len() - 1;
        for (k, &p) in probs.iter().enumerate() {
            acc += p;
            if draw < acc && p > 0.0 {
                outcome = k;
                break;
            }
        }
        // Guard against draw landing past a rounding-deficient total.
        while probs[outcome] == 0.0 && outcome > 0 {
            outcome -= 1;
        }
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(w, &a)| if label(w) == outcome { a } else { C64::new(0.0, 0.0) })
            .collect();
        let post_state = PureState::from_amplitudes(self.num_qubits, amps)?;
        Ok(MeasurementOutcome { value: outcome as i64, probability: probs[outcome], post_state })
    }

    /// Relabels qubits: site `l` of `self` becomes site `perm[l-1]` of the result.
    pub fn permute_sites(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_qubits;
        let mut seen = vec![false; n + 1];
        if perm.len() != n
            || perm.iter().any(|&p| p == 0 || p > n || std::mem::replace(&mut seen[p], true))
        {
            return Err(domain("not a permutation of the sites"));
        }
        let mut amps = vec![C64::new(0.0, 0.0); self.dim()];
        for (w, &a) in self.amps.iter().enumerate() {
            let mut t = 0usize;
            for (i, &p) in perm.iter().enumerate() {
                if w & (1 << (n - 1 - i)) != 0 {
                    t |= 1 << (n - p);
                }
            }
            amps[t] = a;
        }
        Ok(PureState { num_qubits: n, amps })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn ghz_x(k: usize) -> PureState {
        // (|+…+⟩ + |-…-⟩)/√2 is the even-parity uniform superposition
        let amps = (0..1usize << k)
            .map(|w| c(if w.count_ones() % 2 == 0 { 1.0 } else { 0.0 }))
            .collect();
        PureState::from_amplitudes(k, amps).unwrap()
    }

    #[test]
    fn basis_ordering_site_one_is_msb() {
        let s = PureState::basis(2, 0b10).unwrap();
        assert_eq!(s.amplitudes(), &[c(0.0), c(0.0), c(1.0), c(0.0)]);
        // |10⟩ has site 1 in |1⟩
        assert_eq!(s.pauli_expectation(1, PauliAxis::Z).unwrap(), -1.0);
        assert_eq!(s.pauli_expectation(2, PauliAxis::Z).unwrap(), 1.0);
        assert_eq!(PureState::basis(1, 0).unwrap().amplitudes(), &[c(1.0), c(0.0)]);
        let b = PureState::basis(3, 5).unwrap();
        assert_abs_diff_eq!(b.inner(&b).unwrap().re, 1.0);
    }

    #[test]
    fn basis_out_of_range() {
        assert!(matches!(PureState::basis(2, 4), Err(Error::Domain(_))));
        assert!(matches!(PureState::uniform(MAX_QUBITS + 1), Err(Error::Capability(_))));
        assert!(matches!(PureState::uniform(0), Err(Error::Domain(_))));
    }

    #[test]
    fn uniform_superposition() {
        let s = PureState::uniform(1).unwrap();
        assert_abs_diff_eq!(s.amps[0].re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(PureState::uniform(2).unwrap().amps.iter().all(|a| (a.re - 0.5).abs() < 1e-15));
        let s = PureState::uniform(5).unwrap();
        for l in 1..=5 {
            assert_abs_diff_eq!(s.pauli_expectation(l, PauliAxis::X).unwrap(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectations_of_simple_states() {
        let zero = PureState::basis(1, 0).unwrap();
        assert_eq!(zero.pauli_expectation(1, PauliAxis::Z).unwrap(), 1.0);
        let plus = PureState::uniform(1).unwrap();
        assert_abs_diff_eq!(plus.pauli_expectation(1, PauliAxis::Z).unwrap(), 0.0);
        let y_plus = PureState::from_amplitudes(1, vec![c(1.0), I]).unwrap();
        assert_abs_diff_eq!(y_plus.pauli_expectation(1, PauliAxis::Y).unwrap(), 1.0, epsilon = 1e-15);
        assert!(zero.pauli_expectation(2, PauliAxis::X).is_err());
    }

    #[test]
    fn ghz_x_correlations() {
        let g = ghz_x(4);
        for l in 1..=4 {
            for a in PauliAxis::ALL {
                assert_abs_diff_eq!(g.pauli_expectation(l, a).unwrap(), 0.0, epsilon = 1e-12);
            }
        }
        for l in 1..=4 {
            for l2 in 1..=4 {
                for a in PauliAxis::ALL {
                    for b in PauliAxis::ALL {
                        let v = g.pauli_correlation(l, a, l2, b).unwrap();
                        let expect = if l == l2 {
                            if a == b { 1.0 } else { 0.0 }
                        } else if a == PauliAxis::X && b == PauliAxis::X {
                            1.0
                        } else {
                            0.0
                        };
                        assert_abs_diff_eq!(v.re, expect, epsilon = 1e-12);
                        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn same_site_product_is_pauli_algebra() {
        // σ_x σ_y = i σ_z
        let s = PureState::basis(2, 0).unwrap();
        let v = s.pauli_correlation(1, PauliAxis::X, 1, PauliAxis::Y).unwrap();
        assert_abs_diff_eq!(v.im, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn inner_products() {
        let phi = PureState::uniform(4).unwrap();
        let w = PureState::basis(4, 11).unwrap();
        assert_abs_diff_eq!(phi.inner(&w).unwrap().re, 0.25, epsilon = 1e-15);
        let z = PureState::basis(1, 0).unwrap();
        let o = PureState::basis(1, 1).unwrap();
        assert_eq!(z.inner(&o).unwrap(), c(0.0));
        assert!(z.inner(&phi).is_err());
    }

    #[test]
    fn measure_x_on_eigenstate_and_z_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = PureState::uniform(1).unwrap().tensor(&PureState::basis(2, 3).unwrap()).unwrap();
        for _ in 0..20 {
            let m = s.measure_pauli_x(1, &mut rng).unwrap();
            assert_eq!(m.value, 1);
            assert_abs_diff_eq!(m.probability, 1.0, epsilon = 1e-12);
        }
        let zero = PureState::basis(1, 0).unwrap();
        let m = zero.measure_pauli_x(1, &mut rng).unwrap();
        assert_abs_diff_eq!(m.probability, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(m.post_state.norm_sqr(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            m.post_state.pauli_expectation(1, PauliAxis::X).unwrap(),
            m.value as f64,
            epsilon = 1e-12
        );
    }

    #[test]
    fn measure_z_subsystem() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = PureState::basis(4, 0b1011).unwrap();
        let m = s.measure_subsystem_z(&[2, 4, 1], &mut rng).unwrap();
        assert_eq!(m.value, 0b011);
        assert_abs_diff_eq!(m.probability, 1.0);
        assert!(s.measure_subsystem_z(&[1, 1], &mut rng).is_err());

        let u = PureState::uniform(2).unwrap();
        let m = u.measure_subsystem_z(&[2], &mut rng).unwrap();
        assert_abs_diff_eq!(m.probability, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(
            m.post_state.pauli_expectation(2, PauliAxis::Z).unwrap(),
            if m.value == 0 { 1.0 } else { -1.0 },
            epsilon = 1e-12
        );
    }

    #[test]
    fn permutation_moves_bits() {
        let s = PureState::basis(3, 0b100).unwrap();
        let p = s.permute_sites(&[3, 1, 2]).unwrap();
        assert_eq!(p, PureState::basis(3, 0b001).unwrap());
        assert!(s.permute_sites(&[1, 1, 2]).is_err());
    }
}
