//! Time-dependent Schrödinger evolution under `H(s(t))` (ħ = 1).

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algos::gf2::{simon_recover, Recovery};
use crate::algos::{bv, dense_hamiltonian, dot2, hamiltonian_apply_raw, simon, InstanceSpec, DENSE_DIM_CAP};
use crate::error::{domain, Error, Result};
use crate::exec::{self, Exec};
use crate::fit::median;
use crate::gluedtrees::{column_apply, column_hamiltonian, GluedTreesSpec};
use crate::linalg::symmetric_eigen;
use crate::qstate::{PureState, C64};

/// Energies closer than this are treated as one level.
pub const LEVEL_TOL: f64 = 1e-8;
/// Norm drift that aborts a run.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// `ṡ = c / n⁶` for the glued-trees run; gives `ṡ = 10⁻³` at `n = 8`.
pub const GLUED_RATE_CONSTANT: f64 = 262.144;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScheduleKind {
    Linear,
    /// `ds/dt = δ·ΔE(s)²` with the Grover gap for `N = 2^n`.
    LocalAdiabaticGrover { n: usize, delta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub kind: ScheduleKind,
    pub total_time: f64,
}

impl Schedule {
    pub fn linear(total_time: f64) -> Result<Self> {
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(domain(format!("total time {total_time} must be positive")));
        }
        Ok(Schedule { kind: ScheduleKind::Linear, total_time })
    }

    /// `s(t)`, clamped to `[0, 1]`.
    pub fn s_at(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.total_time);
        let s = match self.kind {
            ScheduleKind::Linear => t / self.total_time,
            ScheduleKind::LocalAdiabaticGrover { n, delta } => {
                let nd = 2f64.powi(n as i32);
                let r = (nd - 1.0).sqrt();
                0.5 + (delta * t * 2.0 * r / nd - r.atan()).tan() / (2.0 * r)
            }
        };
        if t >= self.total_time {
            1.0
        } else {
            s.clamp(0.0, 1.0)
        }
    }
}

/// Local-adiabatic Grover schedule in closed form:
/// `t(s) = N/(2δ√(N-1))·[atan(2√(N-1)(s-½)) + atan√(N-1)]`.
pub fn local_adiabatic_schedule_grover(n: usize, delta: f64) -> Result<Schedule> {
    if !(delta > 0.0) {
        return Err(domain(format!("adiabatic slack delta = {delta} must be positive")));
    }
    if n == 0 || n > 62 {
        return Err(domain(format!("Grover size n = {n} out of range")));
    }
    let nd = 2f64.powi(n as i32);
    let r = (nd - 1.0).sqrt();
    let total_time = nd / (delta * r) * r.atan();
    Ok(Schedule { kind: ScheduleKind::LocalAdiabaticGrover { n, delta }, total_time })
}

/// Linear schedule with `ṡ = c / n⁶`.
pub fn glued_constant_rate_schedule(n: usize, rate_constant: f64) -> Result<Schedule> {
    if !(rate_constant > 0.0) {
        return Err(domain("rate constant must be positive"));
    }
    Schedule::linear((n as f64).powi(6) / rate_constant)
}

/// Anything with a Hamiltonian path `H(s)` on a finite state space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "system", rename_all = "snake_case")]
pub enum System {
    Algo(InstanceSpec),
    Glued(GluedTreesSpec),
}

impl System {
    pub fn dim(&self) -> usize {
        match self {
            System::Algo(spec) => 1usize << spec.num_qubits(),
            System::Glued(g) => g.dim(),
        }
    }

    pub fn norm_bound(&self) -> f64 {
        match self {
            System::Algo(spec) => spec.norm_bound(),
            System::Glued(g) => g.norm_bound(),
        }
    }

    /// Starting state: `|+⟩^{⊗}` for the algorithm families, the entrance column for glued trees.
    pub fn initial_amplitudes(&self) -> Result<Vec<C64>> {
        match self {
            System::Algo(spec) => Ok(spec.initial_state()?.into_amplitudes()),
            System::Glued(g) => {
                let mut v = vec![C64::new(0.0, 0.0); g.dim()];
                v[0] = C64::new(1.0, 0.0);
                Ok(v)
            }
        }
    }

    fn apply(&self, s: f64, psi: &[C64], out: &mut [C64]) -> Result<()> {
        match self {
            System::Algo(spec) => hamiltonian_apply_raw(spec, s, psi, out),
            System::Glued(g) => {
                let re: Vec<f64> = psi.iter().map(|c| c.re).collect();
                let im: Vec<f64> = psi.iter().map(|c| c.im).collect();
                let mut hr = vec![0.0; re.len()];
                let mut hi = vec![0.0; im.len()];
                column_apply(g, s, &re, &mut hr);
                column_apply(g, s, &im, &mut hi);
                for (o, (r, i)) in out.iter_mut().zip(hr.into_iter().zip(hi)) {
                    *o = C64::new(r, i);
                }
                Ok(())
            }
        }
    }

    pub fn dense(&self, s: f64) -> Result<DMatrix<f64>> {
        match self {
            System::Algo(spec) => dense_hamiltonian(spec, s),
            System::Glued(g) => column_hamiltonian(g, s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub energy: f64,
    pub vector: Vec<f64>,
}

/// Lowest `k` eigenpairs of `H(s)`, energies ascending. Degenerate levels come
/// back as orthonormal vectors from the symmetric eigensolver.
pub fn instantaneous_eigenstates(system: &System, s: f64, k: usize) -> Result<Vec<Eigenpair>> {
    if system.dim() > DENSE_DIM_CAP {
        return Err(Error::Capability(format!(
            "dimension {} exceeds the dense cap {DENSE_DIM_CAP}",
            system.dim()
        )));
    }
    let eig = symmetric_eigen(system.dense(s)?)?;
    Ok((0..k.min(eig.values.len()))
        .map(|i| Eigenpair { energy: eig.values[i], vector: eig.vector(i).iter().copied().collect() })
        .collect())
}

/// Weights of `ψ` on the ground and first-excited levels (levels grouped by [`LEVEL_TOL`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelWeights {
    pub ground: f64,
    pub first_excited: f64,
    pub e0: f64,
    pub e1: f64,
}

pub fn level_weights(system: &System, s: f64, psi: &[C64]) -> Result<LevelWeights> {
    let eig = symmetric_eigen(system.dense(s)?)?;
    let levels = eig.levels(LEVEL_TOL);
    let weight = |level: &[usize]| -> f64 {
        level
            .iter()
            .map(|&k| eig.vectors.column(k).iter().zip(psi).map(|(v, p)| p * *v).sum::<C64>().norm_sqr())
            .sum()
    };
    let ground = weight(&levels[0]);
    let (first_excited, e1) = match levels.get(1) {
        Some(l) => (weight(l), eig.values[l[0]]),
        None => (0.0, f64::NAN),
    };
    Ok(LevelWeights { ground, first_excited, e0: eig.values[0], e1 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub s: f64,
    /// NaN when the dimension is beyond the dense cap.
    pub ground_overlap: f64,
    pub first_excited_overlap: f64,
    pub energy: f64,
    pub e0: f64,
    pub e1: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionTrace {
    pub rows: Vec<TraceRow>,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub final_amplitudes: Vec<C64>,
    pub trace: EvolutionTrace,
    pub steps: usize,
    pub dt: f64,
    /// Largest `|‖ψ‖ - 1|` seen at record points and at the end.
    pub norm_drift: f64,
}

impl Evolution {
    pub fn final_state(&self, num_qubits: usize) -> Result<PureState> {
        PureState::from_amplitudes(num_qubits, self.final_amplitudes.clone())
    }
}

/// `0.01 / ‖H‖` bound.
pub fn default_dt(system: &System) -> f64 {
    0.01 / system.norm_bound().max(1e-12)
}

fn record(system: &System, t: f64, s: f64, psi: &[C64], buf: &mut [C64]) -> Result<TraceRow> {
    system.apply(s, psi, buf)?;
    let energy: f64 = psi.iter().zip(buf.iter()).map(|(a, b)| (a.conj() * b).re).sum();
    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let lw = if system.dim() <= DENSE_DIM_CAP {
        level_weights(system, s, psi)?
    } else {
        LevelWeights { ground: f64::NAN, first_excited: f64::NAN, e0: f64::NAN, e1: f64::NAN }
    };
    Ok(TraceRow {
        t,
        s,
        ground_overlap: lw.ground,
        first_excited_overlap: lw.first_excited,
        energy,
        e0: lw.e0,
        e1: lw.e1,
        norm,
    })
}

/// Classical RK4 for `i dψ/dt = H(s(t)) ψ` starting from the system's initial
/// state. `record_points ≥ 2` trace rows are spread evenly over `[0, T]`.
pub fn evolve(system: &System, schedule: &Schedule, dt: Option<f64>, record_points: usize) -> Result<Evolution> {
    let psi0 = system.initial_amplitudes()?;
    evolve_from(system, schedule, psi0, dt, record_points)
}

pub fn evolve_from(
    system: &System,
    schedule: &Schedule,
    mut psi: Vec<C64>,
    dt: Option<f64>,
    record_points: usize,
) -> Result<Evolution> {
    if psi.len() != system.dim() {
        return Err(domain("initial state dimension does not match the system"));
    }
    let dt_req = dt.unwrap_or_else(|| default_dt(system));
    if !(dt_req > 0.0) {
        return Err(domain(format!("time step {dt_req} must be positive")));
    }
    if dt_req * system.norm_bound() > 0.1 + 1e-12 {
        return Err(domain(format!(
            "dt = {dt_req} violates dt·‖H‖ ≤ 0.1; use dt ≤ {}",
            0.1 / system.norm_bound()
        )));
    }
    let total = schedule.total_time;
    let steps = ((total / dt_req).ceil() as usize).max(1);
    let h = total / steps as f64;
    let dim = psi.len();
    let zero = C64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]);
    let mi = C64::new(0.0, -1.0);

    let marks: Vec<usize> = if record_points >= 2 {
        (0..record_points).map(|k| (k * steps + (record_points - 1) / 2) / (record_points - 1)).collect()
    } else {
        Vec::new()
    };
    let mut rows = Vec::with_capacity(marks.len());
    let mut next_mark = 0;
    let mut drift: f64 = 0.0;

    for step in 0..=steps {
        let t = if step == steps { total } else { step as f64 * h };
        while next_mark < marks.len() && marks[next_mark] == step {
            let row = record(system, t, schedule.s_at(t), &psi, &mut tmp)?;
            drift = drift.max((row.norm - 1.0).abs());
            rows.push(row);
            next_mark += 1;
        }
        if step == steps {
            break;
        }
        let (s0, sh, s1) = (schedule.s_at(t), schedule.s_at(t + 0.5 * h), schedule.s_at(t + h));
        system.apply(s0, &psi, &mut k1)?;
        k1.iter_mut().for_each(|c| *c *= mi);
        for i in 0..dim {
            tmp[i] = psi[i] + k1[i] * (0.5 * h);
        }
        system.apply(sh, &tmp, &mut k2)?;
        k2.iter_mut().for_each(|c| *c *= mi);
        for i in 0..dim {
            tmp[i] = psi[i] + k2[i] * (0.5 * h);
        }
        system.apply(sh, &tmp, &mut k3)?;
        k3.iter_mut().for_each(|c| *c *= mi);
        for i in 0..dim {
            tmp[i] = psi[i] + k3[i] * h;
        }
        system.apply(s1, &tmp, &mut k4)?;
        k4.iter_mut().for_each(|c| *c *= mi);
        for i in 0..dim {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    drift = drift.max((norm - 1.0).abs());
    if drift > MAX_NORM_DRIFT {
        return Err(Error::Numeric(format!(
            "norm drift {drift:.3e} exceeds {MAX_NORM_DRIFT:.0e}; retry with dt ≤ {:.3e}",
            h / 2.0
        )));
    }
    Ok(Evolution { final_amplitudes: psi, trace: EvolutionTrace { rows }, steps, dt: h, norm_drift: drift })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BvRunReport {
    pub n: usize,
    pub a: u64,
    pub runs: usize,
    pub minus_outcomes: usize,
    pub minus_frequency: f64,
    pub recovered: usize,
    /// Recoveries among runs with outcome −1 (NaN when there were none).
    pub conditional_recovery: f64,
    /// Exact probability that one run reads out `a`: `|⟨ψ⁻_a|ψ(T)⟩|²`.
    pub success_probability: f64,
    pub norm_drift: f64,
}

/// Evolves once (the dynamics are deterministic), then samples the
/// measurements with one seeded stream per run.
pub fn run_bv_end_to_end(n: usize, a: u64, schedule: &Schedule, seeds: &[u64], exec: Exec) -> Result<BvRunReport> {
    let spec = InstanceSpec::Bv { n, a };
    spec.validate()?;
    let evo = evolve(&System::Algo(spec), schedule, None, 0)?;
    let fin = evo.final_state(n + 1)?;
    let success_probability = fin.fidelity(&bv::bv_minus_state(n, a)?)?;
    let outcomes = exec::try_map(exec, seeds.to_vec(), |seed| -> Result<(bool, bool)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = fin.measure_pauli_x(n + 1, &mut rng)?;
        if m.value != -1 {
            return Ok((false, false));
        }
        let mut st = m.post_state;
        let mut read = 0u64;
        for l in 1..=n {
            let o = st.measure_pauli_x(l, &mut rng)?;
            read = (read << 1) | u64::from(o.value == -1);
            st = o.post_state;
        }
        Ok((true, read == a))
    })?;
    let minus = outcomes.iter().filter(|o| o.0).count();
    let recovered = outcomes.iter().filter(|o| o.1).count();
    Ok(BvRunReport {
        n,
        a,
        runs: seeds.len(),
        minus_outcomes: minus,
        minus_frequency: minus as f64 / seeds.len().max(1) as f64,
        recovered,
        conditional_recovery: if minus > 0 { recovered as f64 / minus as f64 } else { f64::NAN },
        success_probability,
        norm_drift: evo.norm_drift,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimonSeedResult {
    pub seed: u64,
    /// Runs until the hidden string was determined; `None` if the cap was hit
    /// or the samples became inconsistent.
    pub runs_to_recovery: Option<usize>,
    pub recovered: Option<u64>,
    pub samples: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimonRunReport {
    pub n: usize,
    pub a: u64,
    pub per_seed: Vec<SimonSeedResult>,
    /// Median over seeds; unrecovered seeds count as the run cap.
    pub median_runs: f64,
    pub all_recovered_correctly: bool,
    pub all_samples_orthogonal: bool,
    pub norm_drift: f64,
}

/// Runs per seed before giving up.
pub fn simon_run_cap(n: usize) -> usize {
    20 * n
}

pub fn run_simon_end_to_end(n: usize, a: u64, schedule: &Schedule, seeds: &[u64], exec: Exec) -> Result<SimonRunReport> {
    let spec = InstanceSpec::Simon { n, a };
    spec.validate()?;
    simon::SimonOracle::new(n, a)?;
    let evo = evolve(&System::Algo(spec), schedule, None, 0)?;
    let fin = evo.final_state(2 * n - 1)?;
    let reg2: Vec<usize> = (n + 1..=2 * n - 1).collect();
    let cap = simon_run_cap(n);
    let per_seed = exec::try_map(exec, seeds.to_vec(), |seed| -> Result<SimonSeedResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = Vec::new();
        for run in 1..=cap {
            let mut st = fin.measure_subsystem_z(&reg2, &mut rng)?.post_state;
            let mut x = 0u64;
            for l in 1..=n {
                let o = st.measure_pauli_x(l, &mut rng)?;
                x = (x << 1) | u64::from(o.value == -1);
                st = o.post_state;
            }
            samples.push(x);
            match simon_recover(&samples, n)? {
                Recovery::Found(found) => {
                    return Ok(SimonSeedResult { seed, runs_to_recovery: Some(run), recovered: Some(found), samples })
                }
                Recovery::OracleViolation => break,
                Recovery::Insufficient => {}
            }
        }
        Ok(SimonSeedResult { seed, runs_to_recovery: None, recovered: None, samples })
    })?;
    let runs: Vec<f64> = per_seed.iter().map(|r| r.runs_to_recovery.unwrap_or(cap) as f64).collect();
    Ok(SimonRunReport {
        n,
        a,
        median_runs: median(&runs),
        all_recovered_correctly: per_seed.iter().all(|r| r.recovered == Some(a)),
        all_samples_orthogonal: per_seed.iter().flat_map(|r| &r.samples).all(|&x| dot2(x, a) == 0),
        per_seed,
        norm_drift: evo.norm_drift,
    })
}
