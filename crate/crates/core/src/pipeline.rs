//! Run configuration and the sweep, scaling, `table1` and evolve pipelines.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algos::{bv, dj, grover, oracle_block_gap, simon, InstanceSpec};
use crate::error::{domain, Error, Result};
use crate::evolve::{self, Schedule, System, TraceRow, GLUED_RATE_CONSTANT};
use crate::exec::{self, Exec};
use crate::fit::{fit_exponent, ExponentFit, ScalingPoint, ScalingSeries, SeriesKind, Verdict};
use crate::gluedtrees::{
    column_hamiltonian, column_state, full_register_state, observable_stats, Branch, ColumnMode,
    GluedTreesSpec, NameSample,
};
use crate::linalg::symmetric_eigen;
use crate::qstate::{PauliAxis, PureState};
use crate::vcm::{build_vcm, max_eigenpair, observable_variance, AdditiveObservable};

/// Instance spaces up to this size are enumerated under [`InstanceSampling::Auto`].
pub const EXHAUSTIVE_LIMIT: u64 = 256;
/// Sample size used under [`InstanceSampling::Auto`] above the limit.
pub const AUTO_SAMPLE: usize = 64;
/// Largest name register for which the glued-trees VCM is evaluated.
pub const GLUED_VCM_QUBITS: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Grover,
    Dj,
    Bv,
    Simon,
    Glued,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Grover, Family::Dj, Family::Bv, Family::Simon, Family::Glued];

    pub fn label(self) -> &'static str {
        match self {
            Family::Grover => "grover",
            Family::Dj => "dj",
            Family::Bv => "bv",
            Family::Simon => "simon",
            Family::Glued => "glued",
        }
    }

    /// Default `n` range used when the config does not give one.
    pub fn default_range(self) -> (usize, usize) {
        match self {
            Family::Grover => (4, 12),
            Family::Dj => (2, 12),
            Family::Bv => (4, 10),
            Family::Simon => (3, 8),
            Family::Glued => (4, 16),
        }
    }

    fn min_n(self) -> usize {
        match self {
            Family::Simon | Family::Glued => 2,
            _ => 1,
        }
    }

    pub fn speedup_note(self) -> &'static str {
        match self {
            Family::Dj => "not achieved",
            _ => "achieved",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.label() == s)
            .ok_or_else(|| domain(format!("unknown family '{s}' (expected grover, dj, bv, simon or glued)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Grover,
    Dj,
    Bv,
    Simon,
    Glued,
    Scaling,
    Evolve,
    Table1,
}

impl Command {
    /// The family a sweep command runs on.
    pub fn sweep_family(self) -> Option<Family> {
        match self {
            Command::Grover => Some(Family::Grover),
            Command::Dj => Some(Family::Dj),
            Command::Bv => Some(Family::Bv),
            Command::Simon => Some(Family::Simon),
            Command::Glued => Some(Family::Glued),
            _ => None,
        }
    }
}

/// How instance labels are chosen for each `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum InstanceSampling {
    /// Exhaustive up to 256 labels, otherwise 64 uniform draws.
    Auto,
    All,
    Random { count: usize },
}

impl FromStr for InstanceSampling {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(InstanceSampling::Auto),
            "all" => Ok(InstanceSampling::All),
            _ => {
                let k = s
                    .strip_prefix("random:")
                    .ok_or_else(|| domain(format!("instances must be 'all', 'auto' or 'random:K', got '{s}'")))?;
                let count: usize = k.parse().map_err(|_| domain(format!("bad instance count '{k}'")))?;
                if count == 0 {
                    return Err(domain("random instance count must be positive"));
                }
                Ok(InstanceSampling::Random { count })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(domain(format!("format must be csv or json, got '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    /// Family for `scaling` and `evolve`.
    pub family: Option<Family>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub s_points: usize,
    pub instances: InstanceSampling,
    pub seed: Option<u64>,
    pub alpha: f64,
    /// Glued-trees annealing point for `scaling`; defaults to `s_c`.
    pub glued_s: Option<f64>,
    pub format: OutputFormat,
    pub workers: Option<usize>,
    /// Local-adiabatic slack for Grover evolution.
    pub delta: f64,
    /// Total time for linear-schedule evolution.
    pub total_time: f64,
    /// Instance label for `evolve`; drawn from the seed when absent.
    pub instance: Option<u64>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            family: None,
            n_min: None,
            n_max: None,
            s_points: 21,
            instances: InstanceSampling::Auto,
            seed: None,
            alpha: 0.4,
            glued_s: None,
            format: OutputFormat::Csv,
            workers: None,
            delta: 0.1,
            total_time: 20.0,
            instance: None,
        }
    }

    pub fn exec(&self) -> Exec {
        Exec::from_workers(self.workers)
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn n_range(&self, family: Family) -> (usize, usize) {
        let (lo, hi) = family.default_range();
        let lo = self.n_min.unwrap_or(lo);
        (lo, self.n_max.unwrap_or(hi.max(lo)))
    }

    fn family_required(&self) -> Result<Family> {
        self.family.ok_or_else(|| domain("this command needs --family"))
    }

    /// Families this config touches.
    pub fn families(&self) -> Result<Vec<Family>> {
        match self.command {
            Command::Table1 => Ok(Family::ALL.to_vec()),
            Command::Scaling | Command::Evolve => Ok(vec![self.family_required()?]),
            c => Ok(vec![c.sweep_family().expect("sweep command")]),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let InstanceSampling::Random { .. } = self.instances {
            if self.seed.is_none() {
                return Err(domain("random instance sampling requires an explicit --seed"));
            }
        }
        if self.s_points == 0 {
            return Err(domain("s-points must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(domain(format!("alpha = {} must lie in (0, 1/2)", self.alpha)));
        }
        if !(self.delta > 0.0) || !(self.total_time > 0.0) {
            return Err(domain("delta and total time must be positive"));
        }
        if let Some(s) = self.glued_s {
            if !(0.0..=1.0).contains(&s) {
                return Err(domain(format!("glued s = {s} outside [0, 1]")));
            }
        }
        for f in self.families()? {
            let (lo, hi) = self.n_range(f);
            if lo > hi {
                return Err(domain(format!("empty n-range {lo}..={hi}")));
            }
            if lo < f.min_n() {
                return Err(domain(format!("{f} needs n >= {}", f.min_n())));
            }
        }
        Ok(())
    }

    /// `s_points` evenly spaced values on `[0, 1]` (just `1/2` for a single point).
    pub fn s_grid(&self) -> Vec<f64> {
        s_grid(self.s_points)
    }
}

pub fn s_grid(points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![0.5];
    }
    (0..points).map(|i| i as f64 / (points - 1) as f64).collect()
}

fn family_tag(f: Family) -> u64 {
    f as u64 + 1
}

/// Per-`(family, n)` stream so changing one range does not reshuffle the others.
fn rng_for(seed: u64, family: Family, n: usize, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((family_tag(family) << 48) | ((n as u64) << 8) | purpose);
    rng
}

/// Instance labels for one `n`: `w*`, `μ_f`, `a`, or a name seed index.
pub fn instance_labels(cfg: &RunConfig, family: Family, n: usize) -> Vec<u64> {
    let (space, offset): (u64, u64) = match family {
        Family::Dj => (2, 0),
        Family::Simon => ((1u64 << n) - 1, 1),
        Family::Glued => (20, 0),
        _ => (1u64 << n, 0),
    };
    let want = match (cfg.instances, family) {
        (InstanceSampling::Random { count }, _) => Some(count),
        (InstanceSampling::Auto, Family::Glued) | (InstanceSampling::All, Family::Glued) => None,
        (InstanceSampling::Auto, _) if space > EXHAUSTIVE_LIMIT => Some(AUTO_SAMPLE),
        _ => None,
    };
    match want {
        // glued seeds are an open-ended space: take the first `count`
        Some(count) if family == Family::Glued => (0..count as u64).collect(),
        Some(count) if (count as u64) < space => {
            let mut rng = rng_for(cfg.seed_or_default(), family, n, 1);
            let mut v: Vec<u64> =
                sample(&mut rng, space as usize, count).into_iter().map(|i| i as u64 + offset).collect();
            v.sort_unstable();
            v
        }
        _ => (offset..offset + space).collect(),
    }
}

/// Name seed for glued instance `k`.
pub fn glued_name_seed(seed: u64, n: usize, k: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((n as u64) << 32) ^ k
}

/// `w*` for a Simon post-measurement state, drawn per `(n, a)`.
pub fn simon_w_star(seed: u64, n: usize, a: u64) -> u64 {
    let mut rng = rng_for(seed, Family::Simon, n, 2);
    rng.set_word_pos(u128::from(a) * 16);
    rng.random_range(0..1u64 << n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: Family,
    pub n: usize,
    pub instance: u64,
    pub s: f64,
    /// NaN when the register is too large for the VCM.
    pub e_max: f64,
    pub max_variance: f64,
    pub gap: f64,
    pub seed: u64,
}

/// Reference observable whose variance goes in the `max_variance` column.
fn reference_observable(family: Family, n: usize, label: u64) -> Result<AdditiveObservable> {
    match family {
        Family::Grover | Family::Dj => Ok(AdditiveObservable::total(PauliAxis::X, n)),
        Family::Bv => bv::bv_reference_observable(n, label),
        Family::Simon => simon::simon_reference_observable(n, label, 0),
        Family::Glued => Err(domain("glued-trees rows use the name observable")),
    }
}

fn algo_state(family: Family, n: usize, label: u64, s: f64) -> Result<PureState> {
    match family {
        Family::Grover => grover::grover_ground_state(n, label, s),
        Family::Dj => dj::dj_ground_state(n, label as u8, s),
        Family::Bv => bv::bv_ground_state(n, label, s),
        Family::Simon => simon::simon_ground_state(n, label, s),
        Family::Glued => Err(domain("not a qubit-register family")),
    }
}

fn algo_gap(family: Family, n: usize, s: f64) -> Result<f64> {
    Ok(match family {
        Family::Grover => grover::GroverAnalytic::new(n, s)?.gap,
        _ => oracle_block_gap(s),
    })
}

fn sweep_instance(cfg: &RunConfig, family: Family, n: usize, label: u64, grid: &[f64]) -> Result<Vec<SweepRow>> {
    let seed = cfg.seed_or_default();
    if family == Family::Glued {
        let spec = GluedTreesSpec::new(n, cfg.alpha, glued_name_seed(seed, n, label))?;
        let names = NameSample::draw_names(&spec)?;
        let dists = NameSample::draw(&spec)?;
        let small = spec.name_bits() <= GLUED_VCM_QUBITS;
        return grid
            .iter()
            .map(|&s| {
                let eig = symmetric_eigen(column_hamiltonian(&spec, s)?)?;
                let st = column_state(&spec, s, Branch::Ground, ColumnMode::Numeric)?;
                let stats = observable_stats(&spec, &dists, &st)?;
                let e_max = if small {
                    let psi = full_register_state(&spec, &names, &st)?;
                    max_eigenpair(&build_vcm(&psi)?)?.e_max
                } else {
                    f64::NAN
                };
                Ok(SweepRow { family, n, instance: label, s, e_max, max_variance: stats.variance, gap: eig.gap(), seed })
            })
            .collect();
    }
    let obs = reference_observable(family, n, label)?;
    grid.iter()
        .map(|&s| {
            let psi = algo_state(family, n, label, s)?;
            let e_max = max_eigenpair(&build_vcm(&psi)?)?.e_max;
            Ok(SweepRow {
                family,
                n,
                instance: label,
                s,
                e_max,
                max_variance: observable_variance(&psi, &obs)?,
                gap: algo_gap(family, n, s)?,
                seed,
            })
        })
        .collect()
}

/// One row per `(n, instance, s)`, sorted by `(n, instance, s)`.
pub fn cmd_sweep(cfg: &RunConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let family = cfg
        .command
        .sweep_family()
        .ok_or_else(|| domain("sweep needs one of the family commands"))?;
    let (lo, hi) = cfg.n_range(family);
    let grid = cfg.s_grid();
    let tasks: Vec<(usize, u64)> =
        (lo..=hi).flat_map(|n| instance_labels(cfg, family, n).into_iter().map(move |l| (n, l))).collect();
    let mut rows: Vec<SweepRow> = exec::try_map(cfg.exec(), tasks, |(n, l)| sweep_instance(cfg, family, n, l, &grid))?
        .into_iter()
        .flatten()
        .collect();
    rows.sort_by(|a, b| (a.n, a.instance).cmp(&(b.n, b.instance)).then(a.s.total_cmp(&b.s)));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub family: Family,
    /// Where along the path each state was taken, e.g. `s=0.5`.
    pub point: String,
    pub series: ScalingSeries,
    pub fit: ExponentFit,
    pub verdict: Verdict,
}

fn scaling_value(cfg: &RunConfig, family: Family, n: usize, label: u64) -> Result<f64> {
    let seed = cfg.seed_or_default();
    let emax = |psi: PureState| -> Result<f64> { Ok(max_eigenpair(&build_vcm(&psi)?)?.e_max) };
    match family {
        Family::Grover => emax(grover::grover_ground_state(n, label, 0.5)?),
        Family::Dj => {
            let mut best = f64::NEG_INFINITY;
            for s in cfg.s_grid() {
                best = best.max(emax(dj::dj_ground_state(n, label as u8, s)?)?);
            }
            Ok(best)
        }
        Family::Bv => emax(bv::bv_state_s1(n, label)?),
        Family::Simon => emax(simon::simon_post_state(n, label, simon_w_star(seed, n, label))?),
        Family::Glued => {
            let spec = GluedTreesSpec::new(n, cfg.alpha, glued_name_seed(seed, n, label))?;
            let s = cfg.glued_s.unwrap_or_else(|| spec.s_c());
            let st = column_state(&spec, s, Branch::Ground, ColumnMode::Numeric)?;
            Ok(observable_stats(&spec, &NameSample::draw(&spec)?, &st)?.variance)
        }
    }
}

fn scaling_point(cfg: &RunConfig, family: Family) -> String {
    match family {
        Family::Grover => "s=0.5".into(),
        Family::Dj => format!("max over {} s-points", cfg.s_points),
        Family::Bv => "s=1".into(),
        Family::Simon => "post-measurement".into(),
        Family::Glued => match cfg.glued_s {
            Some(s) => format!("s={s}"),
            None => "s=s_c".into(),
        },
    }
}

/// `e_max` series (variance of `Â` for glued trees) at the family's
/// p-maximizing point, fitted against `n`.
pub fn scaling_for(cfg: &RunConfig, family: Family) -> Result<ScalingReport> {
    let (lo, hi) = cfg.n_range(family);
    if lo > hi {
        return Err(domain(format!("empty n-range {lo}..={hi}")));
    }
    let kind = if family == Family::Glued { SeriesKind::Variance } else { SeriesKind::EMax };
    let tasks: Vec<(usize, u64)> =
        (lo..=hi).flat_map(|n| instance_labels(cfg, family, n).into_iter().map(move |l| (n, l))).collect();
    let values = exec::try_map(cfg.exec(), tasks.clone(), |(n, l)| scaling_value(cfg, family, n, l))?;
    let mut series = ScalingSeries::new(kind);
    for ((n, l), v) in tasks.into_iter().zip(values) {
        series.push(n, l.to_string(), v);
    }
    let fit = fit_exponent(&series)?;
    let verdict = Verdict::from_fit(&fit);
    Ok(ScalingReport { family, point: scaling_point(cfg, family), series, fit, verdict })
}

pub fn cmd_scaling(cfg: &RunConfig) -> Result<ScalingReport> {
    cfg.validate()?;
    scaling_for(cfg, cfg.family_required()?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub family: Family,
    pub speedup: String,
    pub point: Option<String>,
    pub p_e: Option<f64>,
    pub stderr: Option<f64>,
    pub ci95: Option<(f64, f64)>,
    pub verdict: Option<Verdict>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Report {
    pub rows: Vec<Table1Row>,
    pub fits: BTreeMap<String, ExponentFit>,
}

/// Runs every family; a failing family yields a row with `error` set.
pub fn cmd_table1(cfg: &RunConfig) -> Result<Table1Report> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut fits = BTreeMap::new();
    for family in Family::ALL {
        let base = Table1Row {
            family,
            speedup: family.speedup_note().to_string(),
            point: None,
            p_e: None,
            stderr: None,
            ci95: None,
            verdict: None,
            error: None,
        };
        match scaling_for(cfg, family) {
            Ok(rep) => {
                rows.push(Table1Row {
                    point: Some(rep.point.clone()),
                    p_e: Some(rep.fit.exponent),
                    stderr: Some(rep.fit.stderr),
                    ci95: Some(rep.fit.ci95),
                    verdict: Some(rep.verdict),
                    ..base
                });
                fits.insert(family.label().to_string(), rep.fit);
            }
            Err(e) => rows.push(Table1Row { error: Some(e.to_string()), ..base }),
        }
    }
    Ok(Table1Report { rows, fits })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveReport {
    pub family: Family,
    pub n: usize,
    pub instance: u64,
    pub schedule: Schedule,
    pub steps: usize,
    pub dt: f64,
    pub norm_drift: f64,
    pub rows: Vec<TraceRow>,
}

/// Evolves one instance at `n_min` and records `s_points` trace rows.
/// Grover uses the local-adiabatic schedule, glued trees the constant-rate
/// schedule, the other families a linear schedule of `total_time`.
pub fn cmd_evolve(cfg: &RunConfig) -> Result<EvolveReport> {
    cfg.validate()?;
    let family = cfg.family_required()?;
    let n = cfg.n_range(family).0;
    let instance = match cfg.instance {
        Some(v) => v,
        None => {
            let labels = instance_labels(&RunConfig { instances: InstanceSampling::All, ..cfg.clone() }, family, n);
            let mut rng = rng_for(cfg.seed_or_default(), family, n, 3);
            labels[rng.random_range(0..labels.len())]
        }
    };
    let (system, schedule) = match family {
        Family::Grover => (
            System::Algo(InstanceSpec::Grover { n, w_star: instance }),
            evolve::local_adiabatic_schedule_grover(n, cfg.delta)?,
        ),
        Family::Dj => (System::Algo(InstanceSpec::Dj { n, mu_f: instance as u8 }), Schedule::linear(cfg.total_time)?),
        Family::Bv => (System::Algo(InstanceSpec::Bv { n, a: instance }), Schedule::linear(cfg.total_time)?),
        Family::Simon => (System::Algo(InstanceSpec::Simon { n, a: instance }), Schedule::linear(cfg.total_time)?),
        Family::Glued => {
            let spec = GluedTreesSpec::new(n, cfg.alpha, glued_name_seed(cfg.seed_or_default(), n, instance))?;
            (System::Glued(spec), evolve::glued_constant_rate_schedule(n, GLUED_RATE_CONSTANT)?)
        }
    };
    if let System::Algo(spec) = system {
        spec.validate()?;
    }
    let evo = evolve::evolve(&system, &schedule, None, cfg.s_points.max(2))?;
    Ok(EvolveReport {
        family,
        n,
        instance,
        schedule,
        steps: evo.steps,
        dt: evo.dt,
        norm_drift: evo.norm_drift,
        rows: evo.trace.rows,
    })
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Artifact {
    Sweep(Vec<SweepRow>),
    Scaling(ScalingReport),
    Table1(Table1Report),
    Evolve(EvolveReport),
}

pub fn run(cfg: &RunConfig) -> Result<Artifact> {
    match cfg.command {
        Command::Scaling => Ok(Artifact::Scaling(cmd_scaling(cfg)?)),
        Command::Table1 => Ok(Artifact::Table1(cmd_table1(cfg)?)),
        Command::Evolve => Ok(Artifact::Evolve(cmd_evolve(cfg)?)),
        _ => Ok(Artifact::Sweep(cmd_sweep(cfg)?)),
    }
}

pub const SWEEP_HEADER: &str = "family,n,instance,s,e_max,max_variance,gap,seed";
pub const SCALING_HEADER: &str = "family,kind,n,median,instances,exceptional_fraction,exponent,stderr,ci_lo,ci_hi,verdict";
pub const TABLE1_HEADER: &str = "family,speedup,point,p_e,stderr,ci_lo,ci_hi,verdict,error";
pub const EVOLVE_HEADER: &str = "t,s,ground_overlap,first_excited_overlap,energy,e0,e1,norm";

/// 17 significant digits, lowercase scientific notation.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn opt_num(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn kind_label(k: SeriesKind) -> &'static str {
    match k {
        SeriesKind::EMax => "e_max",
        SeriesKind::Variance => "variance",
    }
}

pub fn write_csv<W: Write>(artifact: &Artifact, w: &mut W) -> Result<()> {
    match artifact {
        Artifact::Sweep(rows) => {
            writeln!(w, "{SWEEP_HEADER}")?;
            for r in rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    r.family,
                    r.n,
                    r.instance,
                    fmt_num(r.s),
                    fmt_num(r.e_max),
                    fmt_num(r.max_variance),
                    fmt_num(r.gap),
                    r.seed
                )?;
            }
        }
        Artifact::Scaling(rep) => {
            writeln!(w, "{SCALING_HEADER}")?;
            for p in &rep.fit.points {
                let ScalingPoint { n, median, instances, exceptional_fraction } = p;
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    rep.family,
                    kind_label(rep.series.kind),
                    n,
                    fmt_num(*median),
                    instances,
                    fmt_num(*exceptional_fraction),
                    fmt_num(rep.fit.exponent),
                    fmt_num(rep.fit.stderr),
                    fmt_num(rep.fit.ci95.0),
                    fmt_num(rep.fit.ci95.1),
                    rep.verdict.label()
                )?;
            }
        }
        Artifact::Table1(rep) => {
            writeln!(w, "{TABLE1_HEADER}")?;
            for r in &rep.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{}",
                    r.family,
                    csv_field(&r.speedup),
                    csv_field(r.point.as_deref().unwrap_or("")),
                    opt_num(r.p_e),
                    opt_num(r.stderr),
                    opt_num(r.ci95.map(|c| c.0)),
                    opt_num(r.ci95.map(|c| c.1)),
                    r.verdict.map(Verdict::label).unwrap_or(""),
                    csv_field(r.error.as_deref().unwrap_or(""))
                )?;
            }
        }
        Artifact::Evolve(rep) => {
            writeln!(w, "{EVOLVE_HEADER}")?;
            for r in &rep.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    fmt_num(r.t),
                    fmt_num(r.s),
                    fmt_num(r.ground_overlap),
                    fmt_num(r.first_excited_overlap),
                    fmt_num(r.energy),
                    fmt_num(r.e0),
                    fmt_num(r.e1),
                    fmt_num(r.norm)
                )?;
            }
        }
    }
    Ok(())
}

/// Top-level JSON document `{config, rows, fits}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonDocument<R, F> {
    pub config: RunConfig,
    pub rows: R,
    pub fits: F,
}

/// JSON has no NaN, so non-finite numbers are written as `null`.
pub fn write_json<W: Write>(cfg: &RunConfig, artifact: &Artifact, w: &mut W) -> Result<()> {
    let empty: BTreeMap<String, ExponentFit> = BTreeMap::new();
    match artifact {
        Artifact::Sweep(rows) => serde_json::to_writer_pretty(&mut *w, &JsonDocument { config: cfg.clone(), rows, fits: &empty })?,
        Artifact::Scaling(rep) => {
            let fits = BTreeMap::from([(rep.family.label().to_string(), rep)]);
            serde_json::to_writer_pretty(&mut *w, &JsonDocument { config: cfg.clone(), rows: &rep.series.rows, fits })?
        }
        Artifact::Table1(rep) => {
            serde_json::to_writer_pretty(&mut *w, &JsonDocument { config: cfg.clone(), rows: &rep.rows, fits: &rep.fits })?
        }
        Artifact::Evolve(rep) => serde_json::to_writer_pretty(&mut *w, &JsonDocument { config: cfg.clone(), rows: rep, fits: &empty })?,
    }
    writeln!(w)?;
    Ok(())
}

pub fn write_artifact<W: Write>(cfg: &RunConfig, artifact: &Artifact, w: &mut W) -> Result<()> {
    match cfg.format {
        OutputFormat::Csv => write_csv(artifact, w),
        OutputFormat::Json => write_json(cfg, artifact, w),
    }
}
