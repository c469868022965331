//! Column-basis model of the glued-trees adiabatic algorithm.
//!
//! Two binary trees of height `n` are glued leaf-to-leaf by a random cycle.
//! The Hamiltonian only couples uniform superpositions over columns, so all
//! production paths work in the `(2n+2)`-dimensional column basis.

use std::collections::HashSet;

use nalgebra::{DMatrix, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::exec::{self, Exec};
use crate::linalg::symmetric_eigen;
use crate::qstate::{PauliAxis, PureState, MAX_QUBITS};
use crate::vcm::AdditiveObservable;

/// Width of the band around a crossing where the energy labels are ambiguous.
pub const CROSSING_TOL: f64 = 1e-6;

const SQRT2: f64 = std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GluedTreesSpec {
    pub n: usize,
    pub alpha: f64,
    pub name_seed: u64,
}

impl GluedTreesSpec {
    pub fn new(n: usize, alpha: f64, name_seed: u64) -> Result<Self> {
        if n == 0 || n > 60 {
            return Err(domain(format!("tree height n = {n} out of range 1..=60")));
        }
        if !(alpha > 0.0 && alpha < 0.5) {
            return Err(domain(format!("alpha = {alpha} must lie in (0, 1/2)")));
        }
        Ok(GluedTreesSpec { n, alpha, name_seed })
    }

    /// Number of columns, `2n + 2`.
    pub fn dim(&self) -> usize {
        2 * self.n + 2
    }

    /// `M = 2^{n+2} - 2` vertices.
    pub fn num_vertices(&self) -> u64 {
        (1u64 << (self.n + 2)) - 2
    }

    /// `N_j`: `2^j` on the left tree, `2^{2n+1-j}` on the right.
    pub fn column_size(&self, j: usize) -> u64 {
        if j <= self.n {
            1u64 << j
        } else {
            1u64 << (2 * self.n + 1 - j)
        }
    }

    pub fn name_bits(&self) -> usize {
        2 * self.n
    }

    /// First crossing point `α/√2`.
    pub fn s_c(&self) -> f64 {
        self.alpha / SQRT2
    }

    /// Upper bound on `‖H(s)‖` over `s ∈ [0, 1]`.
    pub fn norm_bound(&self) -> f64 {
        self.alpha + 0.61
    }
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(domain(format!("annealing parameter s = {s} outside [0, 1]")));
    }
    Ok(())
}

/// `H(s) = -(1-s)α e₀e₀ᵀ - sα e_{2n+1}e_{2n+1}ᵀ - s(1-s) T`.
pub fn column_hamiltonian(spec: &GluedTreesSpec, s: f64) -> Result<DMatrix<f64>> {
    check_s(s)?;
    let d = spec.dim();
    let mut h = DMatrix::zeros(d, d);
    h[(0, 0)] = -(1.0 - s) * spec.alpha;
    h[(d - 1, d - 1)] = -s * spec.alpha;
    for j in 0..d - 1 {
        let t = if j == spec.n { SQRT2 } else { 1.0 };
        h[(j, j + 1)] = -s * (1.0 - s) * t;
        h[(j + 1, j)] = -s * (1.0 - s) * t;
    }
    Ok(h)
}

/// Matrix-free `H(s)·γ` in the column basis.
pub fn column_apply(spec: &GluedTreesSpec, s: f64, g: &[f64], out: &mut [f64]) {
    let d = spec.dim();
    let k = s * (1.0 - s);
    for j in 0..d {
        let mut acc = 0.0;
        if j > 0 {
            acc -= k * if j - 1 == spec.n { SQRT2 } else { 1.0 } * g[j - 1];
        }
        if j + 1 < d {
            acc -= k * if j == spec.n { SQRT2 } else { 1.0 } * g[j + 1];
        }
        out[j] = acc;
    }
    out[0] -= (1.0 - s) * spec.alpha * g[0];
    out[d - 1] -= s * spec.alpha * g[d - 1];
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub s: f64,
    pub e0: f64,
    pub e1: f64,
    pub gap: f64,
}

/// Lowest two column-basis eigenvalues at each grid point.
pub fn spectrum_sweep(spec: &GluedTreesSpec, grid: &[f64], exec: Exec) -> Result<Vec<SweepPoint>> {
    let spec = *spec;
    exec::try_map(exec, grid.to_vec(), move |s| {
        let eig = symmetric_eigen(column_hamiltonian(&spec, s)?)?;
        let (e0, e1) = (eig.values[0], eig.values[1]);
        Ok(SweepPoint { s, e0, e1, gap: (e1 - e0).max(0.0) })
    })
}

/// Grid points that are strict local minima of the gap.
pub fn gap_minima(points: &[SweepPoint]) -> Vec<SweepPoint> {
    points
        .windows(3)
        .filter(|w| w[1].gap < w[0].gap && w[1].gap < w[2].gap)
        .map(|w| w[1])
        .collect()
}

/// `det M` divided by a positive power of `x`, as a polynomial-type expression
/// in `x = e^q` with `α' = α/s`, `β' = α/(1-s)`.
pub fn det_m(x: f64, n: usize, alpha_p: f64, beta_p: f64) -> f64 {
    let n = n as i32;
    let t1 = (1.0 - alpha_p * x) * (x - beta_p) * x.powi(-2 * n + 3);
    let t2 = (x - alpha_p) * (1.0 - beta_p * x) * x.powi(-2 * n + 3);
    let t3 = (1.0 + SQRT2 * x) * (1.0 - SQRT2 * x) * (1.0 - alpha_p * x) * (1.0 - beta_p * x) * x.powi(-4 * n);
    let t4 = (x + SQRT2) * (x - SQRT2) * (x - alpha_p) * (x - beta_p) * x.powi(4);
    t1 + t2 + t3 + t4
}

/// One exponential-ansatz eigenpair, `γ_j = a x^j + b x^{-j}` on the left
/// tree and `c x^{2n+1-j} + d x^{-(2n+1-j)}` on the right.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSolution {
    pub s: f64,
    pub q: f64,
    pub x: f64,
    /// Eigenvalue of `H / [s(1-s)]`, `-(x + 1/x)`.
    pub e_rescaled: f64,
    /// Eigenvalue of `H(s)`.
    pub energy: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// `‖M·(a,b,c,d)‖` after row equilibration, with the coefficients scaled to unit norm.
    pub residual: f64,
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn linspace(lo: f64, hi: f64, k: usize) -> impl Iterator<Item = f64> {
    (0..k).map(move |i| lo + (hi - lo) * i as f64 / (k - 1) as f64)
}

/// Rescaled `M` with unknowns `(a·xⁿ, b, c·xⁿ, d)` so all entries stay `O(x)`.
fn scaled_m(x: f64, n: usize, alpha_p: f64, beta_p: f64) -> Matrix4<f64> {
    let xn = x.powi(-(n as i32));
    let xn1 = xn / x;
    Matrix4::new(
        (1.0 / x - alpha_p) * xn, x - alpha_p, 0.0, 0.0,
        0.0, 0.0, (1.0 / x - beta_p) * xn, x - beta_p,
        x, xn1, -SQRT2, -SQRT2 * xn,
        -SQRT2, -SQRT2 * xn, x, xn1,
    )
}

fn null_vector(m: &Matrix4<f64>) -> Result<([f64; 4], f64)> {
    let mut e = *m;
    for mut row in e.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row /= norm;
        }
    }
    let svd = e.svd(false, true);
    let vt = svd.v_t.ok_or_else(|| Error::Numeric("SVD did not return right singular vectors".into()))?;
    let k = svd.singular_values.imin();
    let v = vt.row(k);
    let res = (e * v.transpose()).norm();
    Ok(([v[0], v[1], v[2], v[3]], res))
}

/// All ansatz roots `x > 1` of `det M = 0` at `0 < s < α`, sorted so the
/// lowest energy (largest `x`) comes first.
pub fn ansatz_root(spec: &GluedTreesSpec, s: f64) -> Result<Vec<AnsatzSolution>> {
    if !(s > 0.0 && s < spec.alpha) {
        return Err(domain(format!("ansatz needs 0 < s < alpha = {}, got s = {s}", spec.alpha)));
    }
    let n = spec.n;
    let alpha_p = spec.alpha / s;
    let beta_p = spec.alpha / (1.0 - s);
    let f = |x: f64| det_m(x, n, alpha_p, beta_p);
    let lo = 1.0 + 1e-9;
    let hi = 1.5 * alpha_p.max(SQRT2);
    let width = 4.0 * 2f64.powf(-(n as f64) / 2.0);
    let mut grid: Vec<f64> = linspace(lo, hi, 100_001).collect();
    for centre in [SQRT2, alpha_p] {
        grid.extend(linspace((centre - width).max(lo), (centre + width).min(hi), 4001));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let mut roots = Vec::new();
    let mut prev = (grid[0], f(grid[0]));
    for &x in &grid[1..] {
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && (fx < 0.0) != (prev.1 < 0.0) {
            roots.push(bisect(f, prev.0, x));
        }
        prev = (x, fx);
    }
    if roots.is_empty() {
        return Err(Error::Numeric(format!(
            "no sign change of det M on [{lo}, {hi}] (n = {n}, s = {s}); windows of half-width {width:.3e} around √2 and α/s = {alpha_p}"
        )));
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
        .into_iter()
        .map(|x| {
            let (v, residual) = null_vector(&scaled_m(x, n, alpha_p, beta_p))?;
            let xn = x.powi(-(n as i32));
            let e_rescaled = -(x + 1.0 / x);
            Ok(AnsatzSolution {
                s,
                q: x.ln(),
                x,
                e_rescaled,
                energy: s * (1.0 - s) * e_rescaled,
                a: v[0] * xn,
                b: v[1],
                c: v[2] * xn,
                d: v[3],
                residual,
            })
        })
        .collect()
}

/// Column amplitudes `γ_j`, `j = 0..=2n+1`, normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnState {
    pub gammas: Vec<f64>,
}

impl ColumnState {
    /// Normalizes and fixes the sign so the largest-magnitude entry is positive.
    pub fn new(mut gammas: Vec<f64>) -> Result<Self> {
        let norm = gammas.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numeric("column state has zero or non-finite norm".into()));
        }
        let pivot = gammas.iter().map(|g| g.abs()).enumerate().fold((0, 0.0), |m, (i, g)| if g > m.1 { (i, g) } else { m }).0;
        let sign = if gammas[pivot] < 0.0 { -1.0 } else { 1.0 };
        gammas.iter_mut().for_each(|g| *g *= sign / norm);
        Ok(ColumnState { gammas })
    }

    pub fn overlap(&self, other: &ColumnState) -> f64 {
        self.gammas.iter().zip(&other.gammas).map(|(a, b)| a * b).sum()
    }

    /// Weight `γ_0²` on the entrance vertex.
    pub fn entrance_weight(&self) -> f64 {
        self.gammas[0] * self.gammas[0]
    }

    /// Reverses the column order, `j ↦ 2n+1-j`.
    pub fn mirrored(&self) -> ColumnState {
        ColumnState { gammas: self.gammas.iter().rev().copied().collect() }
    }
}

impl AnsatzSolution {
    pub fn column_state(&self, n: usize) -> Result<ColumnState> {
        let x = self.x;
        let xn = x.powi(n as i32);
        let (ap, cp) = (self.a * xn, self.c * xn);
        let g = (0..2 * n + 2)
            .map(|j| {
                if j <= n {
                    ap * x.powi(j as i32 - n as i32) + self.b * x.powi(-(j as i32))
                } else {
                    let k = (2 * n + 1 - j) as i32;
                    cp * x.powi(k - n as i32) + self.d * x.powi(-k)
                }
            })
            .collect();
        ColumnState::new(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Ground,
    FirstExcited,
}

impl Branch {
    fn index(self) -> usize {
        match self {
            Branch::Ground => 0,
            Branch::FirstExcited => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnMode {
    /// Dense eigenvector of the column Hamiltonian; any `s`.
    Numeric,
    /// Root-found exponential ansatz on `(0, α) ∪ (1-α, 1)` away from the crossings.
    Ansatz,
    /// Ansatz with energy-ordered labels accepted inside the crossing band.
    AnsatzAtCrossing,
}

pub fn column_state(spec: &GluedTreesSpec, s: f64, branch: Branch, mode: ColumnMode) -> Result<ColumnState> {
    check_s(s)?;
    match mode {
        ColumnMode::Numeric => {
            let eig = symmetric_eigen(column_hamiltonian(spec, s)?)?;
            ColumnState::new(eig.vector(branch.index()).iter().copied().collect())
        }
        ColumnMode::Ansatz | ColumnMode::AnsatzAtCrossing => {
            let sc = spec.s_c();
            let near = (s - sc).abs() < CROSSING_TOL || (s - (1.0 - sc)).abs() < CROSSING_TOL;
            if near && mode == ColumnMode::Ansatz {
                return Err(domain(format!(
                    "s = {s} is within {CROSSING_TOL} of a crossing; request AnsatzAtCrossing to accept energy-ordered labels"
                )));
            }
            let (s_eff, mirror) = if s < spec.alpha {
                (s, false)
            } else if s > 1.0 - spec.alpha {
                (1.0 - s, true)
            } else {
                return Err(domain(format!("ansatz covers (0, α) ∪ (1-α, 1); s = {s} is outside")));
            };
            let roots = ansatz_root(spec, s_eff)?;
            let sol = roots.get(branch.index()).ok_or_else(|| {
                Error::Numeric(format!("only {} ansatz root(s) found at s = {s}", roots.len()))
            })?;
            let st = sol.column_state(spec.n)?;
            Ok(if mirror { st.mirrored() } else { st })
        }
    }
}

/// Leading-order state away from the crossing, `γ_j ∝ (α/s)^{-j}` for `j ≤ n`.
pub fn leading_profile(spec: &GluedTreesSpec, s: f64) -> Result<ColumnState> {
    if !(s > 0.0 && s < spec.alpha) {
        return Err(domain(format!("leading profile needs 0 < s < alpha, got {s}")));
    }
    let r = s / spec.alpha;
    ColumnState::new((0..spec.dim()).map(|j| if j <= spec.n { r.powi(j as i32) } else { 0.0 }).collect())
}

/// Leading-order states at `s_c`: `Σ_{j≤n} 2^{-j/2} e_j ± ε Σ_j √(N_j/2) e_j`, `ε = 2^{-n/2}`.
/// `sign = +1` is the ground state.
pub fn crossing_profile(spec: &GluedTreesSpec, sign: f64) -> Result<ColumnState> {
    let eps = 2f64.powf(-(spec.n as f64) / 2.0);
    ColumnState::new(
        (0..spec.dim())
            .map(|j| {
                let base = if j <= spec.n { 2f64.powf(-(j as f64) / 2.0) } else { 0.0 };
                base + sign.signum() * eps * (spec.column_size(j) as f64 / 2.0).sqrt()
            })
            .collect(),
    )
}

/// `‖Hγ - ⟨H⟩γ‖` in the column basis.
pub fn column_residual(spec: &GluedTreesSpec, s: f64, st: &ColumnState) -> f64 {
    let mut h = vec![0.0; spec.dim()];
    column_apply(spec, s, &st.gammas, &mut h);
    let e: f64 = h.iter().zip(&st.gammas).map(|(a, b)| a * b).sum();
    h.iter().zip(&st.gammas).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
}

/// Random vertex names, stored as Hamming distances to the entrance name `w(0)`.
/// Vertices are listed in column order; entry 0 is `w(0)` itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NameSample {
    pub n: usize,
    pub distances: Vec<u8>,
}

fn draw_distinct<R: Rng>(rng: &mut R, bits: usize, count: u64, w0: u64, mut stop: impl FnMut(u64) -> bool) -> Result<bool> {
    let space = 1u64 << bits;
    let mut seen = HashSet::with_capacity(count as usize);
    seen.insert(w0);
    let max_draws = 100 * count + 1000;
    let mut draws = 0u64;
    while (seen.len() as u64) < count + 1 {
        draws += 1;
        if draws > max_draws {
            return Err(Error::Numeric(format!("could not draw {count} distinct names in {max_draws} attempts")));
        }
        let w = rng.random_range(0..space);
        if seen.insert(w) && stop(w) {
            return Ok(true);
        }
    }
    Ok(false)
}

impl NameSample {
    /// Draws `M` distinct `2n`-bit names from the spec's `name_seed`, in
    /// column order with `w(0)` first.
    pub fn draw_names(spec: &GluedTreesSpec) -> Result<Vec<u64>> {
        let bits = spec.name_bits();
        if bits > 62 {
            return Err(Error::Capability(format!("{bits}-bit names are not supported")));
        }
        let m = spec.num_vertices();
        if m > 1u64 << bits {
            return Err(domain(format!("{m} vertices cannot get distinct {bits}-bit names")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(spec.name_seed);
        let w0 = rng.random_range(0..1u64 << bits);
        let mut names = Vec::with_capacity(m as usize);
        names.push(w0);
        draw_distinct(&mut rng, bits, m - 1, w0, |w| {
            names.push(w);
            false
        })?;
        Ok(names)
    }

    pub fn draw(spec: &GluedTreesSpec) -> Result<Self> {
        let names = Self::draw_names(spec)?;
        let w0 = names[0];
        Ok(NameSample { n: spec.n, distances: names.iter().map(|w| (w ^ w0).count_ones() as u8).collect() })
    }

    /// `A_v = 2n - 2 d_H(w(v), w(0))`, the eigenvalue of `Â` on vertex `v`.
    pub fn a_value(&self, v: usize) -> f64 {
        2.0 * self.n as f64 - 2.0 * f64::from(self.distances[v])
    }

    /// Per-column means of `A` and `A²`.
    pub fn column_moments(&self, spec: &GluedTreesSpec) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(spec.dim());
        let mut start = 0usize;
        for j in 0..spec.dim() {
            let len = spec.column_size(j) as usize;
            let (s1, s2) = (start..start + len).fold((0.0, 0.0), |(a, b), v| {
                let x = self.a_value(v);
                (a + x, b + x * x)
            });
            out.push((s1 / len as f64, s2 / len as f64));
            start += len;
        }
        out
    }
}

/// Lifts a column state to the `2n`-qubit register: vertex `v` in column `j`
/// gets amplitude `γ_j/√N_j` on its name `|w(v)⟩`.
pub fn full_register_state(spec: &GluedTreesSpec, names: &[u64], state: &ColumnState) -> Result<PureState> {
    let bits = spec.name_bits();
    if names.len() as u64 != spec.num_vertices() || state.gammas.len() != spec.dim() {
        return Err(domain("names or column state do not match the glued-trees size"));
    }
    if bits > MAX_QUBITS {
        return Err(Error::Capability(format!("{bits} qubits exceed the dense cap {MAX_QUBITS}")));
    }
    let mut amps = vec![0.0; 1usize << bits];
    let mut v = 0usize;
    for (j, g) in state.gammas.iter().enumerate() {
        let len = spec.column_size(j) as usize;
        let amp = g / (len as f64).sqrt();
        for w in &names[v..v + len] {
            amps[*w as usize] = amp;
        }
        v += len;
    }
    PureState::from_real(bits, &amps)
}

/// `Σ_l (-1)^{w_l(0)} σ_z(l)` on the `2n`-qubit register.
pub fn entrance_observable(spec: &GluedTreesSpec, w0: u64) -> AdditiveObservable {
    let bits = spec.name_bits();
    let w: Vec<f64> = (1..=bits).map(|l| if (w0 >> (bits - l)) & 1 == 1 { -1.0 } else { 1.0 }).collect();
    AdditiveObservable::on_axis(PauliAxis::Z, &w)
}

/// Moments of `Â = Σ_l (-1)^{w_l(0)} σ_z(l)` in a column-superposed state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableStats {
    pub mean: f64,
    pub variance: f64,
    /// `⟨w(0)^⊥|Â|w(0)^⊥⟩`, the mean away from the entrance vertex (NaN if that weight is zero).
    pub perp_mean: f64,
    /// `γ_0²`.
    pub entrance_weight: f64,
}

pub fn observable_stats(spec: &GluedTreesSpec, names: &NameSample, state: &ColumnState) -> Result<ObservableStats> {
    if names.n != spec.n || state.gammas.len() != spec.dim() {
        return Err(domain("name sample or column state does not match the glued-trees size"));
    }
    let moments = names.column_moments(spec);
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    let mut perp = 0.0;
    for (j, (g, (a1, a2))) in state.gammas.iter().zip(&moments).enumerate() {
        let w = g * g;
        m1 += w * a1;
        m2 += w * a2;
        if j > 0 {
            perp += w * a1;
        }
    }
    let c2 = state.entrance_weight();
    let perp_mean = if c2 < 1.0 { perp / (1.0 - c2) } else { f64::NAN };
    Ok(ObservableStats { mean: m1, variance: (m2 - m1 * m1).max(0.0), perp_mean, entrance_weight: c2 })
}

/// Exceptional-instance count for `|k - n/2| > εn/2` against its analytic bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailReport {
    pub n: usize,
    pub epsilon: f64,
    pub exceptional: u128,
    pub exact_fraction: f64,
    pub bound: f64,
}

fn binomial_row(n: usize) -> Vec<u128> {
    let mut row = vec![1u128; n + 1];
    for k in 1..n {
        row[k] = row[k - 1] * (n - k + 1) as u128 / k as u128;
    }
    row
}

/// `h(ε) = (1+ε)ln(1+ε) + (1-ε)ln(1-ε)`.
pub fn entropy_h(eps: f64) -> f64 {
    (1.0 + eps) * (1.0 + eps).ln() + (1.0 - eps) * (1.0 - eps).ln()
}

pub fn binomial_tail(n: usize, eps: f64) -> Result<TailReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("epsilon = {eps} must lie in (0, 1)")));
    }
    if n == 0 || n > 100 {
        return Err(domain(format!("exact tail supports 1 <= n <= 100, got {n}")));
    }
    let row = binomial_row(n);
    let thresh = eps * n as f64;
    let exceptional: u128 = (0..=n)
        .filter(|&k| ((2 * k) as f64 - n as f64).abs() > thresh + 1e-9)
        .map(|k| row[k])
        .sum();
    let total = 2f64.powi(n as i32);
    let nf = n as f64;
    let bound = 2.0 / total
        + (2.0 * (1.0 - eps) * nf / (std::f64::consts::PI * (1.0 + eps))).sqrt()
            * (-entropy_h(eps) * nf / 2.0 + 1.0 / (12.0 * nf)).exp();
    Ok(TailReport { n, epsilon: eps, exceptional, exact_fraction: exceptional as f64 / total, bound })
}

/// `L = Σ_{k=1}^{K} C(2n, k)` names within distance `K` of `w(0)`.
pub fn ball_size(n: usize, k: usize) -> f64 {
    let row = binomial_row(2 * n);
    (1..=k.min(2 * n)).map(|i| row[i] as f64).sum()
}

/// `L·M/(N - L)`.
pub fn collision_union_bound(spec: &GluedTreesSpec, k: usize) -> f64 {
    let l = ball_size(spec.n, k);
    let big_n = 2f64.powi(spec.name_bits() as i32);
    l * spec.num_vertices() as f64 / (big_n - l)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionEstimate {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub hits: usize,
    pub estimate: f64,
    /// Binomial standard error of the estimate.
    pub stderr: f64,
    pub union_bound: f64,
}

/// Monte Carlo probability that a random name set has a name within Hamming
/// distance `1..=K` of `w(0)`. Trial `t` uses ChaCha stream `t` of `seed`.
pub fn collision_probability_mc(spec: &GluedTreesSpec, k: usize, trials: usize, seed: u64, exec: Exec) -> Result<CollisionEstimate> {
    if trials < 100 {
        return Err(domain(format!("need at least 100 trials, got {trials}")));
    }
    let bits = spec.name_bits();
    let m = spec.num_vertices();
    if bits > 62 || m > 1u64 << bits {
        return Err(domain(format!("cannot draw {m} distinct {bits}-bit names")));
    }
    let results = exec::try_map(exec, (0..trials as u64).collect(), |t| {
        if k == 0 {
            return Ok(false);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let w0 = rng.random_range(0..1u64 << bits);
        draw_distinct(&mut rng, bits, m - 1, w0, |w| (w ^ w0).count_ones() as usize <= k)
    })?;
    let hits = results.iter().filter(|&&h| h).count();
    let p = hits as f64 / trials as f64;
    Ok(CollisionEstimate {
        n: spec.n,
        k,
        trials,
        hits,
        estimate: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        union_bound: collision_union_bound(spec, k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec(n: usize, alpha: f64) -> GluedTreesSpec {
        GluedTreesSpec::new(n, alpha, 7).unwrap()
    }

    #[test]
    fn spec_invariants() {
        for n in 1..=12 {
            let g = spec(n, 0.3);
            let total: u64 = (0..g.dim()).map(|j| g.column_size(j)).sum();
            assert_eq!(total, g.num_vertices());
        }
        assert!(GluedTreesSpec::new(4, 0.5, 0).is_err());
        assert!(GluedTreesSpec::new(4, 0.0, 0).is_err());
    }

    #[test]
    fn endpoints_and_mirror_symmetry() {
        let g = spec(5, 0.4);
        let e = symmetric_eigen(column_hamiltonian(&g, 0.0).unwrap()).unwrap();
        assert_abs_diff_eq!(e.vector(0)[0].abs(), 1.0, epsilon = 1e-14);
        let e = symmetric_eigen(column_hamiltonian(&g, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(e.vector(0)[g.dim() - 1].abs(), 1.0, epsilon = 1e-14);
        let d = g.dim();
        for s in [0.1, 0.27, 0.5] {
            let h = column_hamiltonian(&g, s).unwrap();
            let hm = column_hamiltonian(&g, 1.0 - s).unwrap();
            for i in 0..d {
                for j in 0..d {
                    assert_abs_diff_eq!(h[(i, j)], hm[(d - 1 - i, d - 1 - j)], epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn matrix_free_matches_dense() {
        let g = spec(4, 0.35);
        let h = column_hamiltonian(&g, 0.3).unwrap();
        let v: Vec<f64> = (0..g.dim()).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut out = vec![0.0; g.dim()];
        column_apply(&g, 0.3, &v, &mut out);
        let dense = &h * nalgebra::DVector::from_vec(v);
        for (a, b) in out.iter().zip(dense.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn ansatz_energies_match_dense() {
        let g = spec(10, 0.4);
        let sc = g.s_c();
        for s in [sc / 2.0, sc, (sc + g.alpha) / 2.0] {
            let roots = ansatz_root(&g, s).unwrap();
            let eig = symmetric_eigen(column_hamiltonian(&g, s).unwrap()).unwrap();
            assert!(roots.len() >= 2);
            for (k, r) in roots.iter().take(2).enumerate() {
                assert_abs_diff_eq!(r.energy, eig.values[k], epsilon = 1e-8);
                assert_abs_diff_eq!(r.e_rescaled, -(r.x + 1.0 / r.x), epsilon = 1e-12);
                assert!(r.residual < 1e-8);
                let st = r.column_state(g.n).unwrap();
                assert!(column_residual(&g, s, &st) < 1e-6);
            }
        }
    }

    #[test]
    fn crossing_roots_split_by_half_epsilon() {
        let g = spec(16, 0.4);
        let roots = ansatz_root(&g, g.s_c()).unwrap();
        let eps = 2f64.powf(-8.0);
        assert_abs_diff_eq!(roots[0].x, SQRT2 + eps / 2.0, epsilon = 0.2 * eps);
        assert_abs_diff_eq!(roots[1].x, SQRT2 - eps / 2.0, epsilon = 0.2 * eps);
    }

    #[test]
    fn root_near_alpha_prime_for_large_n() {
        let g = spec(20, 0.4);
        let s = g.s_c() / 2.0;
        let roots = ansatz_root(&g, s).unwrap();
        assert!(roots.iter().any(|r| (r.x - g.alpha / s).abs() <= 1e-6));
    }

    #[test]
    fn ansatz_and_numeric_modes_agree() {
        let g = spec(10, 0.3);
        for s in [0.05, 0.15, 0.95] {
            let a = column_state(&g, s, Branch::Ground, ColumnMode::Ansatz).unwrap();
            let b = column_state(&g, s, Branch::Ground, ColumnMode::Numeric).unwrap();
            assert!(a.overlap(&b).abs() >= 1.0 - 10.0 * 2f64.powi(-10));
        }
        assert!(column_state(&g, g.s_c(), Branch::Ground, ColumnMode::Ansatz).is_err());
        assert!(column_state(&g, g.s_c(), Branch::Ground, ColumnMode::AnsatzAtCrossing).is_ok());
        assert!(column_state(&g, 0.5, Branch::Ground, ColumnMode::Ansatz).is_err());
    }

    #[test]
    fn leading_profiles() {
        let g = spec(12, 0.4);
        let s = g.s_c() / 2.0;
        let lead = leading_profile(&g, s).unwrap();
        let num = column_state(&g, s, Branch::Ground, ColumnMode::Numeric).unwrap();
        assert!(lead.overlap(&num).abs() > 1.0 - 1e-6);
        let plus = crossing_profile(&g, 1.0).unwrap();
        let num = column_state(&g, g.s_c(), Branch::Ground, ColumnMode::Numeric).unwrap();
        assert!(plus.overlap(&num).abs() > 0.99);
        let tiny = column_state(&g, 1e-6, Branch::Ground, ColumnMode::Numeric).unwrap();
        assert_abs_diff_eq!(tiny.entrance_weight(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn gap_minimum_near_crossings() {
        let g = spec(12, 0.4);
        let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let pts = spectrum_sweep(&g, &grid, Exec::Sequential).unwrap();
        let mins = gap_minima(&pts);
        let sc = g.s_c();
        assert!(mins.iter().any(|p| (p.s - sc).abs() <= 1e-3));
        assert!(mins.iter().any(|p| (p.s - (1.0 - sc)).abs() <= 1e-3));
        for (p, q) in pts.iter().zip(pts.iter().rev()) {
            assert_abs_diff_eq!(p.gap, q.gap, epsilon = 1e-10);
        }
    }

    #[test]
    fn entrance_state_stats() {
        let g = spec(5, 0.3);
        let names = NameSample::draw(&g).unwrap();
        assert_eq!(names.distances.len() as u64, g.num_vertices());
        let mut e0 = vec![0.0; g.dim()];
        e0[0] = 1.0;
        let st = observable_stats(&g, &names, &ColumnState::new(e0).unwrap()).unwrap();
        assert_abs_diff_eq!(st.mean, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(st.variance, 0.0, epsilon = 1e-12);
        assert_eq!(names, NameSample::draw(&g).unwrap());
    }

    #[test]
    fn full_register_matches_column_stats() {
        let g = spec(4, 0.3);
        let names = NameSample::draw_names(&g).unwrap();
        let st = column_state(&g, 0.15, Branch::Ground, ColumnMode::Numeric).unwrap();
        let psi = full_register_state(&g, &names, &st).unwrap();
        let a = entrance_observable(&g, names[0]);
        let stats = observable_stats(&g, &NameSample::draw(&g).unwrap(), &st).unwrap();
        assert_abs_diff_eq!(a.expectation(&psi).unwrap().re, stats.mean, epsilon = 1e-10);
        assert_abs_diff_eq!(crate::vcm::observable_variance(&psi, &a).unwrap(), stats.variance, epsilon = 1e-10);
    }

    #[test]
    fn tail_examples() {
        let t = binomial_tail(4, 0.5).unwrap();
        assert_eq!(t.exceptional, 2);
        assert_abs_diff_eq!(t.exact_fraction, 0.125);
        let t = binomial_tail(9, 0.999).unwrap();
        assert_abs_diff_eq!(t.exact_fraction, 2.0 / 512.0);
        assert!(binomial_tail(10, 1.0).is_err());
        for n in 10..=40 {
            for eps in [0.2, 0.5, 0.8] {
                let t = binomial_tail(n, eps).unwrap();
                assert!(t.exact_fraction <= t.bound);
            }
        }
    }

    #[test]
    fn collision_mc_against_bound() {
        let g = spec(6, 0.3);
        let zero = collision_probability_mc(&g, 0, 100, 1, Exec::Sequential).unwrap();
        assert_eq!(zero.hits, 0);
        let est = collision_probability_mc(&g, 1, 2000, 3, Exec::Parallel).unwrap();
        // exact hypergeometric probability of hitting the radius-1 ball
        let (big_n, l, m) = (2f64.powi(12), ball_size(6, 1), g.num_vertices() as f64);
        let miss: f64 = (0..(m as usize - 1)).map(|i| (big_n - 1.0 - l - i as f64) / (big_n - 1.0 - i as f64)).product();
        let exact = 1.0 - miss;
        assert!((est.estimate - exact).abs() < 4.0 * est.stderr.max(1e-3));
        assert!(exact <= est.union_bound);
        let seq = collision_probability_mc(&g, 1, 2000, 3, Exec::Sequential).unwrap();
        assert_eq!(seq.hits, est.hits);
    }
}
