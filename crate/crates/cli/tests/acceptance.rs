//! Acceptance suite. Prints one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p eddy-cli --test acceptance`. The process fails
//! when a criterion fails that is not listed in [`KNOWN_FAILURES`].

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::Instant;

use eddy_core::euler::Advection;
use eddy_core::euler::{euler_limit_experiment, euler_path, EulerExperiment, PathStep};
use eddy_core::fourier::{coupling_matrix, isotropy_sum, sigma_field, CouplingFamily, SpectralGrid};
use eddy_core::levy::{make_theta, sample_jumps, JumpRange};
use eddy_core::marcus::{corrector_operator, corrector_operator_in, corrector_vs_laplacian, marcus_map_error};
use eddy_core::rng::{seeded, PathKey};
use eddy_core::stats::{loglog_slope, sample_variance, strictly_decreasing};
use eddy_core::transport::{
    checkpoint_times, transport_limit_experiment, transport_paths, NoiseMode, TransportExperiment, TransportSolver,
};
use eddy_core::{eddy_viscosity, LevyMeasure, Mode, SpectralField};
use rand::Rng;

const SEED: u64 = 2024;
const THETA_EXPONENT: f64 = 0.1;

/// Criteria that fail at the prescribed sample size; see the README.
const KNOWN_FAILURES: &[usize] = &[4];

const ISOTROPY_TOL: f64 = 1e-10;
const JUMP_NORM_TOL: f64 = 1e-13;
const ENERGY_GROWTH_RATE: f64 = 1e-9;
const CORRECTOR_SLOPE: (f64, f64) = (0.5, 2.0);
const VARIANCE_SLOPE: (f64, f64) = (1.5, 2.5);
const HEAT_FINAL_RATIO: f64 = 1.0 / 3.0;
const ORACLE_TOL: f64 = 1e-11;

struct Outcome {
    pass: bool,
    detail: String,
}

fn m(a: i32, b: i32) -> Mode {
    Mode::new(a, b).unwrap()
}

fn two_mode() -> SpectralField {
    SpectralField::from_modes(2, &[(m(1, 0), 1.0), (m(1, 1), 1.0)]).unwrap()
}

fn three_mode() -> SpectralField {
    SpectralField::from_modes(2, &[(m(1, 0), 1.0), (m(0, 1), 1.0), (m(1, 1), 1.0)]).unwrap()
}

fn tests_at(cutoff: u32, modes: &[Mode]) -> Vec<SpectralField> {
    modes.iter().map(|&k| SpectralField::basis_function(k, cutoff)).collect()
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ")
}

fn isotropy() -> Outcome {
    let mut rng = seeded(SEED);
    let mut worst: f64 = 0.0;
    for n in [1, 2, 4, 8] {
        let theta = make_theta(n, THETA_EXPONENT).unwrap();
        for _ in 0..100 {
            let s = isotropy_sum(&theta, [rng.random(), rng.random()]).unwrap();
            worst = worst.max((s[0][0] - 0.5).abs()).max((s[1][1] - 0.5).abs());
            worst = worst.max(s[0][1].abs()).max(s[1][0].abs());
        }
    }
    Outcome { pass: worst <= ISOTROPY_TOL, detail: format!("max |S - I/2| = {worst:.2e}") }
}

fn energy() -> Outcome {
    let (n, n_gal, horizon, dt, eps) = (8, 16, 0.5, 0.01, 0.1);
    let nu = LevyMeasure::two_atom();
    let theta = make_theta(n, THETA_EXPONENT).unwrap();
    let family = CouplingFamily::new(n_gal);
    let drift = corrector_operator_in(&theta, &nu, &family, JumpRange::Below(eps)).unwrap();
    let adv = Advection::new(n_gal);
    let xi0 = three_mode().project(n_gal);
    let norm0 = xi0.norm();
    let (mut worst_jump, mut worst_growth, mut jumps): (f64, f64, usize) = (0.0, f64::NEG_INFINITY, 0);
    for path in 0..32 {
        let events = sample_jumps(&nu, &theta, horizon, eps, PathKey::new(SEED, n as u64, path)).unwrap();
        let times = checkpoint_times(horizon, 8);
        euler_path(&xi0, &events, &theta, &family, &drift, &adv, dt, &times, path as usize, |t, xi, step| {
            let norm = xi.norm();
            if let PathStep::Jump { norm_before } = step {
                jumps += 1;
                worst_jump = worst_jump.max((norm - norm_before).abs() / norm_before);
            }
            worst_growth = worst_growth.max(norm - norm0 * (1.0 + ENERGY_GROWTH_RATE * t));
        })
        .unwrap();
    }
    Outcome {
        pass: worst_jump <= JUMP_NORM_TOL && worst_growth <= 0.0,
        detail: format!(
            "{jumps} jumps, max relative jump drift {worst_jump:.2e}, max excess over bound {worst_growth:.2e}"
        ),
    }
}

fn corrector() -> Outcome {
    let nu = LevyMeasure::two_atom();
    let kappa = eddy_viscosity(&nu);
    let (mut xs, mut ds) = (vec![], vec![]);
    for n in [2, 4, 8, 16] {
        let theta = make_theta(n, THETA_EXPONENT).unwrap();
        let b = corrector_operator(&theta, &nu, n).unwrap();
        ds.push(corrector_vs_laplacian(&b, kappa, &SpectralField::basis_function(m(1, 1), n)).unwrap());
        xs.push(theta.linf());
    }
    let slope = loglog_slope(&xs, &ds);
    Outcome {
        pass: strictly_decreasing(&ds) && (CORRECTOR_SLOPE.0..=CORRECTOR_SLOPE.1).contains(&slope),
        detail: format!("D = [{}], slope {slope:.3}", fmt_list(&ds)),
    }
}

fn transport_config(samples: usize, tests: Vec<SpectralField>) -> TransportExperiment {
    TransportExperiment {
        n_list: vec![2, 4, 8, 16],
        a: THETA_EXPONENT,
        nu: LevyMeasure::two_atom(),
        horizon: 0.5,
        eps: 0.1,
        samples,
        xi0: two_mode(),
        test_functions: tests,
        checkpoints: 8,
        solver: TransportSolver::Characteristics { grid: 128 },
        noise: NoiseMode::Jumps,
        seed: SEED,
    }
}

fn martingale() -> Outcome {
    let cfg = transport_config(128, tests_at(1, &[m(1, 0)]));
    let (mut xs, mut vs) = (vec![], vec![]);
    for &n in &cfg.n_list {
        let paths = transport_paths(&cfg, n).unwrap();
        let finals: Vec<f64> = paths.iter().map(|p| p[cfg.checkpoints - 1][0]).collect();
        vs.push(sample_variance(&finals));
        xs.push(make_theta(n, cfg.a).unwrap().linf());
    }
    let slope = loglog_slope(&xs, &vs);
    Outcome {
        pass: strictly_decreasing(&vs) && (VARIANCE_SLOPE.0..=VARIANCE_SLOPE.1).contains(&slope),
        detail: format!("Var = [{}], slope {slope:.3}", fmt_list(&vs)),
    }
}

fn transport_heat() -> Outcome {
    let cfg = transport_config(64, tests_at(2, &[m(1, 0), m(0, 1), m(1, 1)]));
    assert_eq!(cfg.kappa(), 1.0 / 16.0);
    let rows = transport_limit_experiment(&cfg).unwrap();
    let d: Vec<f64> = rows.iter().map(|r| r.d).collect();
    let err: Vec<f64> = rows.iter().map(|r| r.stderr).collect();
    Outcome {
        pass: strictly_decreasing(&d) && d[d.len() - 1] <= d[0] * HEAT_FINAL_RATIO,
        detail: format!("D = [{}], stderr = [{}]", fmt_list(&d), fmt_list(&err)),
    }
}

fn euler_ns() -> Outcome {
    let cfg = EulerExperiment {
        n_list: vec![2, 4, 8],
        a: THETA_EXPONENT,
        nu: LevyMeasure::two_atom(),
        horizon: 0.5,
        dt: 0.01,
        eps: 0.1,
        samples: 32,
        n_gal: 16,
        xi0: three_mode(),
        test_functions: tests_at(2, &[m(1, 0), m(0, 1), m(1, 1)]),
        checkpoints: 8,
        noise: NoiseMode::Jumps,
        seed: SEED,
    };
    let rows = euler_limit_experiment(&cfg).unwrap();
    let d: Vec<f64> = rows.iter().map(|r| r.d).collect();
    let err: Vec<f64> = rows.iter().map(|r| r.stderr).collect();
    Outcome { pass: strictly_decreasing(&d), detail: format!("D = [{}], stderr = [{}]", fmt_list(&d), fmt_list(&err)) }
}

fn marcus_map() -> Outcome {
    let phi = SpectralField::from_modes(3, &[(m(1, 0), 0.8), (m(1, 1), -0.5), (m(-2, 1), 0.3)]).unwrap();
    let grid = SpectralGrid::new(128);
    let mut rng = seeded(SEED);
    let mut failures = 0;
    let mut worst_final: f64 = 0.0;
    for _ in 0..10 {
        let k = loop {
            if let Ok(k) = Mode::new(rng.random_range(-3..=3), rng.random_range(-3..=3)) {
                break k;
            }
        };
        let w = rng.random_range(-0.5..0.5);
        let e: Vec<f64> = [4, 8, 16].iter().map(|&n| marcus_map_error(k, w, &phi, n, &grid).unwrap()).collect();
        worst_final = worst_final.max(e[2]);
        if !strictly_decreasing(&e) {
            failures += 1;
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("{failures}/10 non-decreasing, worst error at n = 16: {worst_final:.2e}"),
    }
}

fn double_derivative() -> Outcome {
    // ‖e_k f‖ ≤ √2‖f‖ and |a_k·(l ± k)| = |a_k·l| ≤ |l| give the bound 2(2π)².
    let bound = 8.0 * PI * PI;
    let mut maxima = vec![];
    for n in [4u32, 8] {
        let r = 2 * n as i32;
        let mut worst: f64 = 0.0;
        for k1 in -r..=r {
            for k2 in -r..=r {
                let Ok(k) = Mode::new(k1, k2) else { continue };
                if k.norm_sq() > (r * r) as i64 {
                    continue;
                }
                let (inner, outer) = (coupling_matrix(k, n), coupling_matrix(k, 3 * n));
                for l in eddy_core::Basis::new(n).modes() {
                    let g = inner.apply(&SpectralField::basis_function(*l, n)).unwrap();
                    let h = outer.apply(&g.project(3 * n)).unwrap();
                    worst = worst.max(h.norm() / l.norm_sq() as f64);
                }
            }
        }
        maxima.push(worst);
    }
    Outcome {
        pass: maxima.iter().all(|&w| w <= bound),
        detail: format!("max ratio [{}] against 8π² = {bound:.3}", fmt_list(&maxima)),
    }
}

fn oracle() -> Outcome {
    let n = 8;
    let grid = SpectralGrid::new(64);
    let pts = grid.points();
    let mut rng = seeded(SEED);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let k = loop {
            if let Ok(k) = Mode::new(rng.random_range(-8..=8), rng.random_range(-8..=8)) {
                break k;
            }
        };
        let mut f = SpectralField::zeros(n);
        f.coeffs_mut().iter_mut().for_each(|c| *c = rng.random_range(-1.0..1.0));
        let sigma = sigma_field(k);
        let (d1, d2) = (grid.synthesize(&f.derivative(0)), grid.synthesize(&f.derivative(1)));
        let prod: Vec<f64> = pts
            .iter()
            .enumerate()
            .map(|(p, x)| {
                let s = sigma.eval(*x);
                s[0] * d1[p] + s[1] * d2[p]
            })
            .collect();
        let expected = grid.analyze(&prod, n);
        let got = coupling_matrix(k, n).apply(&f).unwrap();
        worst = worst.max(got.sub(&expected).unwrap().norm());
    }
    Outcome { pass: worst <= ORACLE_TOL, detail: format!("max L2 difference {worst:.2e}") }
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("transport.toml");
    fs::write(
        &config,
        "experiment = \"transport-limit\"\nseed = 11\nM = 8\n\n[theta]\na = 0.1\nn_list = [2, 4]\n\n[cutoffs]\ngrid = 32\n",
    )
    .unwrap();
    let out = dir.path().join("report");
    let eddy = env!("CARGO_BIN_EXE_eddy");
    let run = Command::new(eddy)
        .args(["transport-limit", "--workers", "1", "--config"])
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    let replay = |workers: &str| Command::new(eddy).args(["replay", "--workers", workers]).arg(&out).output().unwrap();
    let clean = replay("2");
    let csv = out.join("report.csv");
    let original = fs::read_to_string(&csv).unwrap();
    let mut lines: Vec<String> = original.lines().map(String::from).collect();
    let mut cells: Vec<String> = lines[2].split(',').map(String::from).collect();
    cells[2] = format!("{}1", cells[2]);
    lines[2] = cells.join(",");
    fs::write(&csv, lines.join("\n") + "\n").unwrap();
    let tampered = replay("1");
    let tampered_stdout = String::from_utf8_lossy(&tampered.stdout).to_string();
    let pass = run.status.code() == Some(0)
        && clean.status.success()
        && String::from_utf8_lossy(&clean.stdout).trim() == "match"
        && tampered.status.code() == Some(1)
        && tampered_stdout.starts_with("mismatch at row 2");
    Outcome {
        pass,
        detail: format!(
            "replay with another worker count: {}; edited D cell: {}",
            String::from_utf8_lossy(&clean.stdout).trim(),
            tampered_stdout.lines().next().unwrap_or("")
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("isotropy identity", isotropy),
        ("energy conservation", energy),
        ("corrector -> Laplacian", corrector),
        ("martingale vanishing", martingale),
        ("transport -> heat", transport_heat),
        ("Euler -> Navier-Stokes", euler_ns),
        ("Marcus-map convergence", marcus_map),
        ("double-derivative bound", double_derivative),
        ("oracle equivalence", oracle),
        ("determinism", determinism),
    ];
    let mut unexpected = vec![];
    for (i, (name, check)) in criteria.iter().enumerate() {
        let id = i + 1;
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(&id);
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        let note = if !outcome.pass && known { " [known]" } else { "" };
        println!("{status} {id:>2} {name}: {} ({secs:.1} s){note}", outcome.detail);
        if !outcome.pass && !known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
