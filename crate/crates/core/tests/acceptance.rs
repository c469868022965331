//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use macrosup::algos::reconstruct::{check_target, ReconOutcome, ReconTarget};
use macrosup::algos::{bv, dense_hamiltonian, dj, grover, simon, InstanceSpec};
use macrosup::evolve::{
    evolve, local_adiabatic_schedule_grover, run_bv_end_to_end, run_simon_end_to_end, Schedule, System,
};
use macrosup::exec::Exec;
use macrosup::fit::{fit_exponent, ScalingSeries, SeriesKind, Verdict};
use macrosup::gluedtrees::{
    ansatz_root, binomial_tail, column_hamiltonian, column_state, gap_minima, observable_stats, spectrum_sweep,
    Branch, ColumnMode, GluedTreesSpec, NameSample,
};
use macrosup::linalg::symmetric_eigen;
use macrosup::pipeline::{cmd_table1, glued_name_seed, Command, Family, RunConfig};
use macrosup::qstate::{PauliAxis, PureState};
use macrosup::vcm::{build_vcm, e_max, max_eigenpair, observable_variance, AdditiveObservable};
use macrosup::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Duration, fn() -> Outcome);

fn grid21() -> Vec<f64> {
    (0..21).map(|i| i as f64 / 20.0).collect()
}

/// `ΔE(s)` for the marked-state block, written out independently.
fn grover_gap(n: usize, s: f64) -> f64 {
    let nn = 2f64.powi(n as i32);
    ((1.0 - 2.0 * s).powi(2) + 4.0 * s * (1.0 - s) / nn).sqrt()
}

fn c1_grover_fluctuation() -> Outcome {
    let mut failures = Vec::new();
    let mut worst_analytic = 0.0f64;
    for n in 4..=12usize {
        let big_n = 2f64.powi(n as i32);
        let mx = AdditiveObservable::total(PauliAxis::X, n);
        for s in [0.3, 0.5, 0.7] {
            let psi = grover::grover_ground_state(n, 3, s).map_err(|e| e.to_string())?;
            let v = observable_variance(&psi, &mx).map_err(|e| e.to_string())?;
            let a = grover::grover_mx_variance_analytic(n, s).map_err(|e| e.to_string())?;
            worst_analytic = worst_analytic.max((v - a).abs());
            let ratio = v / (n * n) as f64;
            let ok = if s == 0.5 { (ratio - 0.25).abs() <= 2.0 / big_n.sqrt() } else { ratio < 4.0 / big_n.sqrt() };
            if !ok {
                let pref = grover::grover_mx_prefactor(n, s).map_err(|e| e.to_string())?;
                failures.push(format!("n={n} s={s}: ratio {ratio:.4} (prefactor b²(1-b²) = {pref:.4})"));
            }
        }
    }
    if worst_analytic > 1e-9 {
        failures.push(format!("analytic vs statevector differ by {worst_analytic:.2e}"));
    }
    if failures.is_empty() {
        Ok(format!("analytic agreement {worst_analytic:.1e}"))
    } else {
        Err(failures.join("; "))
    }
}

fn c2_grover_gap() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=8 {
        for s in grid21() {
            let h = dense_hamiltonian(&InstanceSpec::Grover { n, w_star: (1 << n) - 1 }, s).map_err(|e| e.to_string())?;
            let ev = symmetric_eigen(h).map_err(|e| e.to_string())?;
            worst = worst.max((ev.values[1] - ev.values[0] - grover_gap(n, s)).abs());
        }
    }
    if worst <= 1e-9 {
        Ok(format!("max |gap - ΔE| = {worst:.1e}"))
    } else {
        Err(format!("max |gap - ΔE| = {worst:.1e}"))
    }
}

fn c3_dj() -> Outcome {
    let (mut worst, mut rank_fail) = (0.0f64, 0);
    for n in 2..=12 {
        for mu in 0..=1u8 {
            for s in grid21() {
                let psi = dj::dj_ground_state(n, mu, s).map_err(|e| e.to_string())?;
                worst = worst.max((e_max(&psi).map_err(|e| e.to_string())? - 2.0).abs());
                let half = 1usize << (n - 1);
                let m = DMatrix::from_fn(2, half, |r, c| psi.amplitudes()[r * half + c]);
                if m.singular_values().iter().filter(|&&x| x > 1e-10).count() != 1 {
                    rank_fail += 1;
                }
            }
        }
    }
    let detail = format!("max |e_max - 2| = {worst:.1e}, Schmidt rank failures {rank_fail}");
    if worst <= 1e-6 && rank_fail == 0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c4_bv() -> Outcome {
    let (mut worst, mut matched, mut degenerate, mut mismatched) = (0.0f64, 0, 0, Vec::new());
    for n in 2..=7usize {
        for a in 0..1u64 << n {
            let k = a.count_ones() as f64;
            let oracle = if a == 0 { 2.0 } else { 1.0 + k };
            let got = e_max(&bv::bv_state_s1(n, a).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            worst = worst.max((got - oracle).abs());
            match check_target(&ReconTarget::BvFinal { n, a }).map_err(|e| e.to_string())?.0 {
                ReconOutcome::Match => matched += 1,
                ReconOutcome::Indeterminate => degenerate += 1,
                ReconOutcome::Mismatch => mismatched.push(format!("n={n} a={a:b}")),
            }
        }
    }
    let detail = format!(
        "max |e_max - (1+k_a)| = {worst:.1e}; observable matched {matched}, degenerate {degenerate}, mismatched {}",
        mismatched.len()
    );
    if worst <= 1e-9 && mismatched.is_empty() {
        Ok(detail)
    } else {
        Err(format!("{detail} {mismatched:?}"))
    }
}

fn c5_simon() -> Outcome {
    let (mut worst, mut spread) = (0.0f64, 0.0f64);
    for n in 2..=5usize {
        for a in 1..1u64 << n {
            let k = a.count_ones() as f64;
            let oracle = if a.is_power_of_two() { 2.0 } else { k };
            let mut vals = Vec::new();
            for w in 0..1u64 << n {
                let psi = simon::simon_post_state(n, a, w).map_err(|e| e.to_string())?;
                let v = e_max(&psi).map_err(|e| e.to_string())?;
                worst = worst.max((v - oracle).abs());
                vals.push(v);
            }
            let (lo, hi) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
            spread = spread.max(hi - lo);
        }
    }
    let detail = format!("max |e_max - oracle| = {worst:.1e}, max spread over w* = {spread:.1e}");
    if worst <= 1e-9 && spread <= 1e-9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c6_table1() -> Outcome {
    let cfg = RunConfig { seed: Some(0), ..RunConfig::new(Command::Table1) };
    let rep = cmd_table1(&cfg).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for row in &rep.rows {
        let want = if row.family == Family::Dj { Verdict::P1 } else { Verdict::P2 };
        let label = row.verdict.map(Verdict::label).unwrap_or("error");
        parts.push(format!("{} p_e={:.3} -> {label}", row.family, row.p_e.unwrap_or(f64::NAN)));
        ok &= row.verdict == Some(want);
    }
    if ok {
        Ok(parts.join(", "))
    } else {
        Err(parts.join(", "))
    }
}

fn c7_glued_spectra() -> Outcome {
    let mut failures = Vec::new();
    let grid: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
    for alpha in [0.3, 0.4] {
        let sc = alpha / std::f64::consts::SQRT_2;
        for n in [10, 12] {
            let spec = GluedTreesSpec::new(n, alpha, 0).map_err(|e| e.to_string())?;
            let pts = spectrum_sweep(&spec, &grid, Exec::default()).map_err(|e| e.to_string())?;
            let mins = gap_minima(&pts);
            for target in [sc, 1.0 - sc] {
                if !mins.iter().any(|p| (p.s - target).abs() <= 1e-3) {
                    failures.push(format!("alpha={alpha} n={n}: no gap minimum near {target:.5}"));
                }
            }
        }
        let mut worst_rel = 0.0f64;
        for n in 10..=24 {
            let spec = GluedTreesSpec::new(n, alpha, 0).map_err(|e| e.to_string())?;
            let gap = spectrum_sweep(&spec, &[sc], Exec::Sequential).map_err(|e| e.to_string())?[0].gap;
            let pred = sc * (1.0 - sc) * 2f64.powf(-(n as f64) / 2.0) / 2.0;
            worst_rel = worst_rel.max((gap / pred - 1.0).abs());
        }
        if worst_rel > 0.25 {
            failures.push(format!("alpha={alpha}: gap at s_c off by {:.1}%", 100.0 * worst_rel));
        }
        let mut worst_q = 0.0f64;
        for n in 10..=20 {
            let spec = GluedTreesSpec::new(n, alpha, 0).map_err(|e| e.to_string())?;
            for s in [sc / 2.0, sc, (sc + alpha) / 2.0] {
                let roots = ansatz_root(&spec, s).map_err(|e| e.to_string())?;
                let ev = symmetric_eigen(column_hamiltonian(&spec, s).map_err(|e| e.to_string())?)
                    .map_err(|e| e.to_string())?;
                for (k, r) in roots.iter().take(2).enumerate() {
                    // q from the dense eigenvalue: -(x + 1/x) = E / [s(1-s)]
                    let e = -ev.values[k] / (s * (1.0 - s));
                    let x = (e + (e * e - 4.0).sqrt()) / 2.0;
                    worst_q = worst_q.max((r.q - x.ln()).abs());
                }
            }
        }
        if !(worst_q <= 1e-6) {
            failures.push(format!("alpha={alpha}: det M roots off by {worst_q:.1e} in q"));
        }
    }
    if failures.is_empty() {
        Ok("minima, gap law and det M roots within tolerance".into())
    } else {
        Err(failures.join("; "))
    }
}

fn c8_glued_fluctuation() -> Outcome {
    let alpha = 0.4;
    let mut series = ScalingSeries::new(SeriesKind::Variance);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 4..=16usize {
        for k in 0..20u64 {
            let spec = GluedTreesSpec::new(n, alpha, glued_name_seed(0, n, k)).map_err(|e| e.to_string())?;
            let st = column_state(&spec, spec.s_c() / 2.0, Branch::Ground, ColumnMode::Numeric)
                .map_err(|e| e.to_string())?;
            let names = NameSample::draw(&spec).map_err(|e| e.to_string())?;
            let var = observable_stats(&spec, &names, &st).map_err(|e| e.to_string())?.variance;
            let r = var / (n * n) as f64;
            lo = lo.min(r);
            hi = hi.max(r);
            series.push(n, k.to_string(), var);
        }
    }
    let fit = fit_exponent(&series).map_err(|e| e.to_string())?;
    let detail = format!("variance/n² in [{lo:.3}, {hi:.3}], slope {:.3} ± {:.3}", fit.exponent, fit.stderr);
    if lo >= 0.05 && hi <= 4.0 && (1.7..=2.2).contains(&fit.exponent) {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c9_tail() -> Outcome {
    let mut failures = Vec::new();
    for eps in [0.2, 0.5, 0.8] {
        let reports: Vec<_> =
            (10..=40).map(|n| binomial_tail(n, eps)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        if let Some(t) = reports.iter().find(|t| t.exact_fraction > t.bound) {
            failures.push(format!("eps={eps}: fraction above bound at n={}", t.n));
        }
        let rises = |f: &dyn Fn(&macrosup::gluedtrees::TailReport) -> f64| -> Vec<usize> {
            reports.windows(2).filter(|w| f(&w[1]) > f(&w[0])).map(|w| w[1].n).collect()
        };
        let bound_up = rises(&|t| t.bound);
        let frac_up = rises(&|t| t.exact_fraction);
        if !bound_up.is_empty() {
            failures.push(format!("eps={eps}: bound increases at n={bound_up:?}"));
        }
        if !frac_up.is_empty() {
            failures.push(format!("eps={eps}: exact fraction increases at {} values of n", frac_up.len()));
        }
    }
    if failures.is_empty() {
        Ok("fraction ≤ bound, both decreasing".into())
    } else {
        Err(failures.join("; "))
    }
}

fn c10_end_to_end() -> Outcome {
    let sched = Schedule::linear(40.0).map_err(|e| e.to_string())?;
    let seeds: Vec<u64> = (0..400).collect();
    let a = 0b1011;
    let bv = run_bv_end_to_end(4, a, &sched, &seeds, Exec::default()).map_err(|e| e.to_string())?;
    let simon = run_simon_end_to_end(4, 0b0110, &sched, &seeds[..100], Exec::default()).map_err(|e| e.to_string())?;
    let detail = format!(
        "BV -1 frequency {:.3}, conditional recovery {:.3}; Simon median runs {}, orthogonal {}, recovered {}",
        bv.minus_frequency,
        bv.conditional_recovery,
        simon.median_runs,
        simon.all_samples_orthogonal,
        simon.all_recovered_correctly
    );
    let ok = (0.45..=0.55).contains(&bv.minus_frequency)
        && bv.conditional_recovery == 1.0
        && simon.median_runs <= 16.0
        && simon.all_samples_orthogonal
        && simon.all_recovered_correctly;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c11_grover_schedule() -> Outcome {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 4..=10 {
        let t = local_adiabatic_schedule_grover(n, 0.1).map_err(|e| e.to_string())?.total_time;
        xs.push(2f64.powi(n as i32).sqrt().ln());
        ys.push(t.ln());
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    // the run itself must stay adiabatic
    let sys = System::Algo(InstanceSpec::Grover { n: 4, w_star: 6 });
    let evo = evolve(&sys, &local_adiabatic_schedule_grover(4, 0.1).map_err(|e| e.to_string())?, None, 2)
        .map_err(|e| e.to_string())?;
    let fidelity = evo.trace.rows.last().map(|r| r.ground_overlap).unwrap_or(0.0);
    let detail = format!("slope {slope:.3}, n=4 final ground overlap {fidelity:.4}");
    if (0.8..=1.2).contains(&slope) && fidelity > 0.9 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> PureState {
    let amps = (0..1 << n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    PureState::from_amplitudes(n, amps).unwrap()
}

fn c12_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut failures = Vec::new();
    for trial in 0..40 {
        let n = 1 + trial % 5;
        let psi = random_state(&mut rng, n);
        let v = build_vcm(&psi).map_err(|e| e.to_string())?;
        let top = max_eigenpair(&v).map_err(|e| e.to_string())?;
        if v.hermiticity_defect() > 1e-12 {
            failures.push("VCM not Hermitian".to_string());
        }
        let ev = v.eigenvalues().map_err(|e| e.to_string())?;
        if ev.iter().any(|&x| x < -1e-9) || top.e_max < 1.0 - 1e-9 || top.e_max > v.trace() + 1e-9 {
            failures.push(format!("trial {trial}: PSD/trace bounds"));
        }
        let coeffs: Vec<[C64; 3]> =
            (0..n).map(|_| [0; 3].map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0))).collect();
        let obs = AdditiveObservable::new(coeffs).normalized();
        if observable_variance(&psi, &obs).map_err(|e| e.to_string())? > top.e_max + 1e-9 {
            failures.push(format!("trial {trial}: Rayleigh bound"));
        }
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.rotate_left(trial % n);
        let pe = e_max(&psi.permute_sites(&perm).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if (pe - top.e_max).abs() > 1e-9 {
            failures.push(format!("trial {trial}: permutation changed e_max"));
        }
        let sites: Vec<[C64; 2]> = (0..n)
            .map(|_| {
                let (th, ph): (f64, f64) = (rng.random_range(0.0..std::f64::consts::PI), rng.random_range(0.0..std::f64::consts::TAU));
                [C64::new((th / 2.0).cos(), 0.0), C64::from_polar((th / 2.0).sin(), ph)]
            })
            .collect();
        let prod = e_max(&PureState::product(&sites).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        if (prod - 2.0).abs() > 1e-9 {
            failures.push(format!("trial {trial}: product state e_max {prod}"));
        }
    }
    let sys = System::Algo(InstanceSpec::Bv { n: 2, a: 3 });
    let sched = Schedule::linear(5.0).map_err(|e| e.to_string())?;
    let drift = evolve(&sys, &sched, None, 2).map_err(|e| e.to_string())?.norm_drift;
    if drift > 1e-8 {
        failures.push(format!("norm drift {drift:.1e}"));
    }
    let h = 0.1 / sys.norm_bound();
    let run = |dt: f64| evolve(&sys, &sched, Some(dt), 2).map(|e| e.final_amplitudes);
    let (c, f, r) = (run(h), run(h / 2.0), run(h / 4.0));
    let (c, f, r) = (c.map_err(|e| e.to_string())?, f.map_err(|e| e.to_string())?, r.map_err(|e| e.to_string())?);
    let dist = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let ratio = dist(&c, &r) / dist(&f, &r);
    if !(8.0..=32.0).contains(&ratio) {
        failures.push(format!("RK4 error ratio {ratio:.2}"));
    }
    if failures.is_empty() {
        Ok(format!("40 random states; drift {drift:.1e}; RK4 ratio {ratio:.1}"))
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("1 grover fluctuation", Duration::from_secs(10), c1_grover_fluctuation),
        ("2 grover gap", Duration::from_secs(30), c2_grover_gap),
        ("3 deutsch-jozsa", Duration::from_secs(60), c3_dj),
        ("4 bernstein-vazirani", Duration::from_secs(120), c4_bv),
        ("5 simon", Duration::from_secs(120), c5_simon),
        ("6 table 1 verdicts", Duration::from_secs(300), c6_table1),
        ("7 glued-trees spectra", Duration::from_secs(60), c7_glued_spectra),
        ("8 glued-trees fluctuation", Duration::from_secs(60), c8_glued_fluctuation),
        ("9 binomial tail", Duration::from_secs(1), c9_tail),
        ("10 end-to-end bv/simon", Duration::from_secs(300), c10_end_to_end),
        ("11 grover schedule", Duration::from_secs(60), c11_grover_schedule),
        ("12 property suites", Duration::from_secs(60), c12_properties),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(d) if took > budget => Err(format!("{d}; runtime {took:.1?} over {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(d) => println!("PASS criterion {name} ({took:.2?}): {d}"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {name} ({took:.2?}): {d}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 12 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
