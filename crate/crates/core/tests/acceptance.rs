//! Acceptance suite. Each test prints one `PASS`/`FAIL` line and then
//! asserts, so `cargo test --test acceptance -- --nocapture --test-threads 1`
//! gives a readable scorecard.

use std::fs;
use std::path::Path;

use leakwalk::dynamics::{first_extremum_step, run_walk, SwingDetector};
use leakwalk::harness::{parse_spec, run_sweep, write_artifacts};
use leakwalk::lattice::{LayerParity, WalkConfig};
use leakwalk::mesh::{amplitude_fidelity, compile_walk, decompose, haar_unitary, reconstruct};
use leakwalk::oracle::oracle_matches_dynamics;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ORACLE_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-10;
const MONOTONE_SLACK: f64 = 1e-12;
const MIRROR_TOL: f64 = 1e-12;
const FIDELITY_TOL: f64 = 1e-9;
const DILATION_TOL: f64 = 1e-9;

const PEAK_STEP_TOL: usize = 1;
const EARLY_VARIANCE_CAP: f64 = 3.0;
const EARLY_VARIANCE_HORIZON: usize = 23;
const PERIOD_TARGET: f64 = 15.0;
const PERIOD_TOL: f64 = 3.0;
const PERIOD_HORIZON: usize = 60;
const STEP_TOL: usize = 2;
const EXPERIMENT_HORIZON: usize = 20;
const LONG_HORIZON: usize = 100;
const LOSSLESS_PEAK: f64 = 8.0;
const TOTAL_LOSS_EARLY: usize = 50;
const LATE_PEAK_CENTER: usize = 75;
const LATE_PEAK_TOL: usize = 10;
const FLAT_WINDOW: usize = 10;
const FLAT_RANGE: (usize, usize) = (65, 90);

fn verdict(id: u32, name: &str, pass: bool, detail: String) {
    println!(
        "[{}] {id:02} {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {detail}");
}

fn walk(m: usize, r_sq: f64, steps: usize) -> leakwalk::Trajectory {
    run_walk(&WalkConfig::new(4, steps, m, r_sq).unwrap()).unwrap()
}

fn means(m: usize, r_sq: f64, steps: usize) -> Vec<f64> {
    walk(m, r_sq, steps).means().unwrap()
}

fn variances(m: usize, r_sq: f64, steps: usize) -> Vec<f64> {
    walk(m, r_sq, steps).variances().unwrap()
}

/// `|<x>_n - <x>_0|` for `n = 0..=steps`.
fn displacement(m: usize, r_sq: f64, steps: usize) -> Vec<f64> {
    let mu = means(m, r_sq, steps);
    mu.iter().map(|v| (v - mu[0]).abs()).collect()
}

fn argmax(xs: &[f64]) -> (usize, f64) {
    xs.iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        )
}

fn near(step: usize, target: usize, tol: usize) -> bool {
    step.abs_diff(target) <= tol
}

#[test]
fn c01_oracle_equivalence() {
    let mut checked = 0;
    let mut bad = Vec::new();
    for half in 2..=4 {
        for r_sq in [0.0, 0.2, 0.5, 0.8, 1.0] {
            for m in 1..=2 * half {
                let c = WalkConfig::new(half, 12, m, r_sq).unwrap();
                for n in 0..=12 {
                    checked += 1;
                    if !oracle_matches_dynamics(&c, n, ORACLE_TOL) {
                        bad.push((half, r_sq, m, n));
                    }
                }
            }
        }
    }
    verdict(
        1,
        "oracle equivalence",
        bad.is_empty(),
        format!("{checked} (M, r_sq, m, n) points, {} mismatches", bad.len()),
    );
}

#[test]
fn c02_lossless_conservation() {
    let mut worst_norm = 0.0f64;
    for m in 1..=8 {
        for s in walk(m, 0.0, LONG_HORIZON).survivals() {
            worst_norm = worst_norm.max((s - 1.0).abs());
        }
    }
    let mut worst_rise = f64::NEG_INFINITY;
    for r_sq in [0.0, 0.2, 0.5, 0.8, 1.0] {
        for m in 1..=8 {
            for parity in [LayerParity::Full, LayerParity::Offset] {
                let c = WalkConfig::new(4, LONG_HORIZON, m, r_sq)
                    .unwrap()
                    .with_first_layer(parity);
                let s = run_walk(&c).unwrap().survivals();
                for w in s.windows(2) {
                    worst_rise = worst_rise.max(w[1] - w[0]);
                }
            }
        }
    }
    verdict(
        2,
        "lossless conservation",
        worst_norm <= NORM_TOL && worst_rise <= MONOTONE_SLACK,
        format!("max |S-1| = {worst_norm:.2e}, max S(n+1)-S(n) = {worst_rise:.2e}"),
    );
}

#[test]
fn c03_first_peak_timing() {
    let weak = first_extremum_step(&means(2, 0.2, LONG_HORIZON));
    let strong = first_extremum_step(&means(2, 0.8, LONG_HORIZON));
    let pass = weak.is_some_and(|s| near(s, 18, PEAK_STEP_TOL))
        && strong.is_some_and(|s| near(s, 12, PEAK_STEP_TOL));
    verdict(
        3,
        "first-peak timing",
        pass,
        format!("r_sq 0.2 -> {weak:?} (want 18 +/- 1), r_sq 0.8 -> {strong:?} (want 12 +/- 1)"),
    );
}

#[test]
fn c04_early_variance_bound() {
    let worst: Vec<(usize, f64)> = [2, 7]
        .iter()
        .map(|&m| {
            let v = variances(m, 0.2, EARLY_VARIANCE_HORIZON);
            (m, v.iter().copied().fold(0.0, f64::max))
        })
        .collect();
    verdict(
        4,
        "early variance bound",
        worst.iter().all(|&(_, v)| v < EARLY_VARIANCE_CAP),
        format!("max variance for n <= {EARLY_VARIANCE_HORIZON}: {worst:.3?} (cap {EARLY_VARIANCE_CAP})"),
    );
}

#[test]
fn c05_internal_input_period() {
    let detector = SwingDetector::default();
    let periods: Vec<(usize, Option<f64>)> = [3, 6]
        .iter()
        .map(|&m| {
            (
                m,
                detector.mean_peak_spacing(&variances(m, 0.2, PERIOD_HORIZON)),
            )
        })
        .collect();
    let pass = periods
        .iter()
        .all(|(_, p)| p.is_some_and(|p| (p - PERIOD_TARGET).abs() <= PERIOD_TOL));
    verdict(
        5,
        "internal-input oscillation period",
        pass,
        format!("mean peak spacing {periods:.2?} (want {PERIOD_TARGET} +/- {PERIOD_TOL})"),
    );
}

#[test]
fn c06_strong_leak_displacement() {
    let d2 = displacement(2, 0.8, EXPERIMENT_HORIZON);
    let reach2 = d2[15 - STEP_TOL..=15 + STEP_TOL]
        .iter()
        .copied()
        .fold(0.0, f64::max);
    let (at7, d7) = argmax(&displacement(7, 0.8, EXPERIMENT_HORIZON));
    let pass = reach2 >= 3.5 && d7 >= 5.5 && near(at7, 16, STEP_TOL);
    verdict(
        6,
        "strong-leak displacement",
        pass,
        format!(
            "input 2 reaches {reach2:.3} in steps 13..=17 (want >= 3.5); \
             input 7 farthest {d7:.3} at step {at7} (want >= 5.5 at 16 +/- 2)"
        ),
    );
}

#[test]
fn c07_weak_leak_displacement() {
    let (at, d) = argmax(&displacement(2, 0.2, EXPERIMENT_HORIZON));
    verdict(
        7,
        "weak-leak displacement",
        d >= 5.5 && near(at, 19, STEP_TOL),
        format!("input 2 farthest {d:.3} at step {at} (want >= 5.5 at 19 +/- 2)"),
    );
}

#[test]
fn c08_input2_regime_comparison() {
    let (at8, d8) = argmax(&displacement(2, 0.8, EXPERIMENT_HORIZON));
    let (_, d0) = argmax(&displacement(2, 0.0, EXPERIMENT_HORIZON));
    let (_, d2) = argmax(&displacement(2, 0.2, EXPERIMENT_HORIZON));
    let pass = near(at8, 13, STEP_TOL) && (d8 - 5.0).abs() <= 0.5 && d8 < d0 && d8 < d2;
    verdict(
        8,
        "input-2 regime comparison",
        pass,
        format!(
            "r_sq 0.8 farthest {d8:.3} at step {at8} (want 5 +/- 0.5 at 13 +/- 2); \
             r_sq 0 -> {d0:.3}, r_sq 0.2 -> {d2:.3}"
        ),
    );
}

#[test]
fn c09_lossless_long_time_variance() {
    let (at, peak) = argmax(&variances(2, 0.0, LONG_HORIZON));
    verdict(
        9,
        "lossless long-time variance",
        peak > LOSSLESS_PEAK,
        format!("largest variance {peak:.3} at step {at} (want > {LOSSLESS_PEAK})"),
    );
}

#[test]
fn c10_total_loss_long_time() {
    let lossless = variances(2, 0.0, LONG_HORIZON);
    let total = variances(2, 1.0, LONG_HORIZON);
    let mut running = f64::NEG_INFINITY;
    let mut breaches = Vec::new();
    for n in 0..=TOTAL_LOSS_EARLY {
        running = running.max(lossless[n]);
        if total[n] > running + MONOTONE_SLACK {
            breaches.push(n);
        }
    }
    let (offset, late) = argmax(&total[TOTAL_LOSS_EARLY + 1..]);
    let late_at = TOTAL_LOSS_EARLY + 1 + offset;
    let pass = breaches.is_empty() && near(late_at, LATE_PEAK_CENTER, LATE_PEAK_TOL);
    verdict(
        10,
        "total-loss long-time behavior",
        pass,
        format!(
            "steps <= {TOTAL_LOSS_EARLY} above the lossless running max: {breaches:?}; \
             largest late variance {late:.3} at step {late_at} (want 75 +/- 10)"
        ),
    );
}

#[test]
fn c11_input7_weak_loss_flattening() {
    let weak = means(7, 0.2, LONG_HORIZON);
    let strong = means(7, 0.8, LONG_HORIZON);
    let range = |xs: &[f64]| {
        xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
            - xs.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let windows: Vec<(usize, f64, f64)> = (FLAT_RANGE.0..=FLAT_RANGE.1 - FLAT_WINDOW)
        .map(|s| {
            let w = s..=s + FLAT_WINDOW;
            (s, range(&weak[w.clone()]), range(&strong[w]))
        })
        .collect();
    let best = windows
        .iter()
        .copied()
        .min_by(|a, b| (a.1 / a.2).total_cmp(&(b.1 / b.2)))
        .unwrap();
    verdict(
        11,
        "input-7 weak-loss flattening",
        best.1 <= 0.5 * best.2,
        format!(
            "best window steps {}..={}: range {:.3} vs {:.3} (ratio {:.3}, want <= 0.5)",
            best.0,
            best.0 + FLAT_WINDOW,
            best.1,
            best.2,
            best.1 / best.2
        ),
    );
}

#[test]
fn c12_mirror_symmetry() {
    let mut worst = 0.0f64;
    for parity in [LayerParity::Full, LayerParity::Offset] {
        for m in 1..=8 {
            let c = WalkConfig::new(4, LONG_HORIZON, m, 0.0)
                .unwrap()
                .with_first_layer(parity);
            // With an even number of modes the mirror image keeps its parity.
            let mirror = c.clone().with_input_mode(9 - m).unwrap();
            let a = run_walk(&c).unwrap();
            let b = run_walk(&mirror).unwrap();
            for (x, y) in a.records.iter().zip(&b.records) {
                let px = &x.observables.as_ref().unwrap().distribution.probabilities;
                let py = &y.observables.as_ref().unwrap().distribution.probabilities;
                for (p, q) in px.iter().zip(py.iter().rev()) {
                    worst = worst.max((p - q).abs());
                }
            }
        }
    }
    verdict(
        12,
        "mirror symmetry",
        worst <= MIRROR_TOL,
        format!("max |p_k(m) - p_(9-k)(9-m)| = {worst:.2e}"),
    );
}

#[test]
fn c13_mesh_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut results = Vec::new();
    for d in [2, 4, 8, 20] {
        let u = haar_unitary(d, &mut rng);
        let p = decompose(&u).unwrap();
        let f = amplitude_fidelity(&u, &reconstruct(&p)).unwrap();
        results.push((d, p.mzis.len(), f));
    }
    let pass = results.iter().all(|&(_, _, f)| f >= 1.0 - FIDELITY_TOL)
        && results.iter().any(|&(d, n, _)| d == 20 && n == 190);
    let detail = results
        .iter()
        .map(|(d, n, f)| format!("d={d}: {n} MZIs, 1-F={:.1e}", 1.0 - f))
        .collect::<Vec<_>>()
        .join("; ");
    verdict(13, "mesh compiler round trip", pass, detail);
}

#[test]
fn c14_dilation_consistency() {
    let mut worst = 0.0f64;
    for r_sq in [0.2, 0.8] {
        for m in [2, 7] {
            let traj = walk(m, r_sq, 8);
            for n in 1..=8 {
                let c = WalkConfig::new(4, n, m, r_sq).unwrap();
                let u = reconstruct(&compile_walk(&c, n).unwrap());
                for (k, a) in traj.records[n].amplitudes.iter().enumerate() {
                    worst = worst.max((u[[k, m - 1]] - a).norm());
                }
            }
        }
    }
    verdict(
        14,
        "dilation consistency",
        worst <= DILATION_TOL,
        format!("max amplitude error through the compiled mesh = {worst:.2e}"),
    );
}

#[test]
fn c15_determinism() {
    let preset = Path::new(env!("CARGO_MANIFEST_DIR")).join("presets/simulation.json");
    let spec = parse_spec(&preset).unwrap();
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        for r in write_artifacts(&run_sweep(&spec).unwrap(), dir.path(), &spec.formats) {
            r.unwrap();
        }
    }
    let mut names: Vec<_> = fs::read_dir(dirs[0].path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    let differing: Vec<_> = names
        .iter()
        .filter(|n| fs::read(dirs[0].path().join(n)).ok() != fs::read(dirs[1].path().join(n)).ok())
        .collect();
    verdict(
        15,
        "determinism",
        names.len() == 16 && differing.is_empty(),
        format!("{} CSV artifacts, {} differ", names.len(), differing.len()),
    );
}
