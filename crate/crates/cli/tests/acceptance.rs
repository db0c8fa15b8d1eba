//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Positional arguments select criteria by number.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use atomchain::dynamics::{
    evolve_covariance, evolve_trajectory, fermion_parity, CovarianceMatrix,
};
use atomchain::exact::{
    build_dense_hamiltonian, eigensystem, evolve_state, ghz_target, neel_states, state_fidelity,
    total_z_action, StateVector,
};
use atomchain::fermion::{
    boundary_mode_energy, build_majorana_matrix, excitation_spectrum, ground_covariance,
};
use atomchain::model::{ChainConfig, CouplingFrame, Schedule, Segment};
use atomchain::protocols::{
    beam_splitter_profile, hadamard_path, linear_quench, staggered_phase,
    staggered_phase_protocol, suggested_duration, two_chain_phases, two_qubit_phase_model,
    wrap_phase, ZoneProfile,
};
use atomchain::Error;
use atomchain_cli::config::{
    ExperimentConfig, OracleCompareConfig, SweepTConfig, WidthSweepConfig,
};
use atomchain_cli::runners::{
    hadamard_fidelities, linear_fit, run_oracle_compare, run_sweep_t, run_width_sweep,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-8;

type Outcome = Result<String, String>;

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Outcome,
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn ground(frame: &CouplingFrame) -> Result<StateVector, Error> {
    let (_, mut v) = eigensystem(&build_dense_hamiltonian(frame)?, 1)?;
    Ok(v.remove(0))
}

fn oracle_bracket() -> Outcome {
    let cfg = OracleCompareConfig {
        count: 50,
        min_sites: 2,
        max_sites: 8,
        max_segments: 3,
        degenerate_fraction: 0.0,
    };
    let (_, s) = run_oracle_compare(&cfg, 2024, TOL).map_err(e)?;
    let evaluated = s["evaluated"].as_u64().unwrap_or(0);
    let margin = s["worst_margin"].as_f64().unwrap_or(f64::NAN);
    ensure(
        evaluated >= 50 && margin >= -1e-6,
        format!("{evaluated} schedules, worst margin {margin:.3e}"),
    )
}

fn spectrum_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2..=8);
        let jx = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
        let w = (0..n - 1)
            .map(|_| if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
            .collect();
        let f = CouplingFrame::new(jx, vec![0.0; n], w).map_err(e)?;
        let spec = excitation_spectrum(&build_majorana_matrix(&f).map_err(e)?).map_err(e)?;
        let levels = spec.many_body_levels();
        let (exact, _) = eigensystem(&build_dense_hamiltonian(&f).map_err(e)?, 1 << n).map_err(e)?;
        for (a, b) in levels.iter().zip(&exact) {
            worst = worst.max((a.0 - b).abs());
        }
    }
    ensure(worst <= 1e-9, format!("20 frames, max level error {worst:.2e}"))
}

fn gap_law() -> Outcome {
    let (n, w) = (200, 1.0);
    let mut parts = Vec::new();
    let mut ok = true;
    for ratio in [0.0, 0.5, 2.0] {
        let jx: f64 = ratio * w;
        let f = CouplingFrame::homogeneous(n, jx, w);
        let eps = excitation_spectrum(&build_majorana_matrix(&f).map_err(e)?).map_err(e)?.eps;
        let predicted = 2.0 * (w - jx).abs();
        let measured = if jx < w { eps[1] } else { eps[0] };
        let rel = (measured - predicted).abs() / predicted;
        ok &= rel <= 0.02;
        parts.push(format!("Jx/W={ratio}: {rel:.2e}"));
    }
    ensure(ok, format!("relative errors {}", parts.join(", ")))
}

fn boundary_scaling() -> Outcome {
    let (ns, logs): (Vec<f64>, Vec<f64>) = (10..=30)
        .map(|n| {
            boundary_mode_energy(&CouplingFrame::homogeneous(n, 0.5, 1.0))
                .map(|eps| (n as f64, eps.ln()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(e)?
        .into_iter()
        .unzip();
    let (_, slope, _) = linear_fit(&ns, &logs);
    let target = 0.5f64.ln();
    let rel = (slope - target).abs() / target.abs();
    ensure(rel <= 0.05, format!("slope {slope:.5} vs ln 0.5 = {target:.5} ({:.2}%)", 100.0 * rel))
}

fn ghz_transfer() -> Outcome {
    let (n, w) = (8, -1.0);
    let t = suggested_duration(n, w);
    let q = linear_quench(w, 5.0, 0.0, t, n).map_err(e)?;
    let plus = ghz_target(n, 1).map_err(e)?;
    let minus = ghz_target(n, -1).map_err(e)?;
    let mut psi = ground(&q.schedule.eval_frame(0.0).map_err(e)?).map_err(e)?;
    let samples = 40;
    let mut worst_minus = state_fidelity(&psi, &minus).map_err(e)?;
    for k in 1..=samples {
        let (a, b) = (t * (k - 1) as f64 / samples as f64, t * k as f64 / samples as f64);
        psi = evolve_state(&psi, &q.schedule, a, b, TOL).map_err(e)?;
        worst_minus = worst_minus.max(state_fidelity(&psi, &minus).map_err(e)?);
    }
    let f = state_fidelity(&psi, &plus).map_err(e)?;
    ensure(
        f >= 0.95 && worst_minus <= 1e-6,
        format!("T = {t:.1}, F = {f:.4}, max minus-cat overlap {worst_minus:.1e}"),
    )
}

fn n_squared_scaling() -> Outcome {
    let cfg: SweepTConfig = serde_json::from_value(serde_json::json!({
        "sizes": [16, 24, 32, 48],
        "target": 0.95,
    }))
    .map_err(e)?;
    let (tables, s) = run_sweep_t(&cfg, TOL).map_err(e)?;
    let slope1 = s["slope_t1"].as_f64().unwrap_or(f64::NAN);
    let slope2 = s["slope_t2"].as_f64().unwrap_or(f64::NAN);
    let t1: Vec<String> = tables[0]
        .column("t1")
        .unwrap_or_default()
        .iter()
        .filter_map(|c| c.as_f64())
        .map(|v| format!("{v:.1}"))
        .collect();
    let inside = |s: f64| (1.7..=2.3).contains(&s);
    ensure(
        inside(slope1) && inside(slope2),
        format!("slope from F1 {slope1:.3}, from F2 {slope2:.3}; T1 = [{}]", t1.join(", ")),
    )
}

fn width_sweep() -> Outcome {
    let cfg = WidthSweepConfig {
        widths: vec![0.1, 0.2, 0.4],
        sizes: (4..=20).collect(),
        ..serde_json::from_value(serde_json::json!({ "widths": [], "sizes": [] })).map_err(e)?
    };
    if cfg.speed != 0.01 {
        return Err(format!("default speed {} is not 0.01", cfg.speed));
    }
    let (_, s) = run_width_sweep(&cfg, TOL).map_err(e)?;
    let ordered = s["strictly_decreasing_in_width"].as_bool().unwrap_or(false);
    let r2 = s["log_fits"][0]["r2"].as_f64().unwrap_or(f64::NAN);
    ensure(
        ordered && r2 > 0.9,
        format!("strictly decreasing: {ordered}, R^2 at w = 0.1 lambda: {r2:.4}"),
    )
}

fn trajectory_invariants(g0: &CovarianceMatrix, s: &Schedule, samples: usize) -> Result<(bool, f64), String> {
    let total = s.total_duration();
    let times: Vec<f64> = (0..=samples).map(|k| total * k as f64 / samples as f64).collect();
    let traj = evolve_trajectory(g0, s, &times, TOL).map_err(e)?;
    let p0 = fermion_parity(g0).map_err(e)?;
    let d0 = g0.purity_defect();
    let mut parity_ok = true;
    let mut drift = 0.0f64;
    for g in &traj {
        parity_ok &= fermion_parity(g).map_err(e)? == p0;
        drift = drift.max((g.purity_defect() - d0).abs());
    }
    Ok((parity_ok, drift))
}

fn round_trip(g0: &CovarianceMatrix, s: &Schedule) -> Result<f64, String> {
    let total = s.total_duration();
    let g1 = evolve_covariance(g0, s, 0.0, total, TOL).map_err(e)?;
    let back = evolve_covariance(&g1, &s.time_reversed(), 0.0, total, TOL).map_err(e)?;
    Ok((&back.gamma - &g0.gamma).amax())
}

fn parity_purity_reversal() -> Outcome {
    let quench = linear_quench(-1.0, 5.0, 0.0, suggested_duration(16, 1.0), 16)
        .map_err(e)?
        .schedule;
    let zone = ZoneProfile::new(-1.0, 0.2, 0.05, 1.0, 2.0);
    let bs = beam_splitter_profile(&zone, 12, zone.traversal_time(12)).map_err(e)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, s) in [("quench", &quench), ("beam splitter", &bs)] {
        let start = s.eval_frame(0.0).map_err(e)?;
        let g0 = ground_covariance(&build_majorana_matrix(&start).map_err(e)?).map_err(e)?;
        let (parity, drift) = trajectory_invariants(&g0, s, 50)?;
        let err = round_trip(&g0, s)?;
        ok &= parity && drift <= 1e-8 && err <= 10.0 * TOL;
        parts.push(format!(
            "{name}: parity fixed {parity}, purity drift {drift:.1e}, round trip {err:.1e}"
        ));
    }
    ensure(ok, parts.join("; "))
}

fn superposition(a: &StateVector, b: &StateVector, alpha: Complex64, beta: Complex64) -> Result<StateVector, Error> {
    StateVector::normalized(a.amp.iter().zip(&b.amp).map(|(x, y)| alpha * x + beta * y).collect())
}

fn dfs_property() -> Outcome {
    let mut annihilation = 0.0f64;
    let mut storage = 0.0f64;
    let mut phase_err = 0.0f64;
    let (alpha, beta) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    for n in [2, 4, 6, 8] {
        let (q0, q1) = neel_states(n).map_err(e)?;
        for q in [&q0, &q1] {
            let z = total_z_action(q);
            annihilation = annihilation.max(z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt());
        }
        let psi = superposition(&q0, &q1, alpha, beta).map_err(e)?;
        let (jz, tau, w) = (0.3, 2.5, -1.0);
        let uniform = Schedule::new(
            ChainConfig::ferromagnetic(n).map_err(e)?,
            vec![Segment::Constant {
                duration: tau,
                frame: CouplingFrame::homogeneous(n, 0.0, w).with_uniform_jz(jz),
            }],
            false,
        );
        let out = evolve_state(&psi, &uniform, 0.0, tau, TOL).map_err(e)?;
        storage = storage.max((state_fidelity(&out, &psi).map_err(e)? - 1.0).abs());

        let stag = staggered_phase_protocol(jz, tau, n, w).map_err(e)?;
        let a = evolve_state(&q0, &stag, 0.0, tau, TOL).map_err(e)?;
        let b = evolve_state(&q1, &stag, 0.0, tau, TOL).map_err(e)?;
        let measured = q0.inner(&a).map_err(e)?.arg() - q1.inner(&b).map_err(e)?.arg();
        phase_err = phase_err.max(wrap_phase(measured - staggered_phase(jz, tau, n)).abs());
    }
    ensure(
        annihilation <= 1e-14 && storage <= 1e-8 && phase_err <= 1e-6,
        format!(
            "N in 2..8: |sum Z neel| {annihilation:.1e}, storage error {storage:.1e}, phase error {phase_err:.1e}"
        ),
    )
}

fn hadamard_gate() -> Outcome {
    let (n, w, jx) = (8, 1.0, 2.0);
    let refused = matches!(
        hadamard_path(n, w, jx, 0.2, [10.0; 4]),
        Err(Error::UnsafePath { .. })
    );
    let mut leg = 10.0;
    let mut best = (0.0, 0.0);
    for _ in 0..=6 {
        let (_, s) = hadamard_path(n, w, jx, 0.1, [leg; 4]).map_err(e)?;
        best = hadamard_fidelities(&s, TOL).map_err(e)?;
        if best.0 >= 0.99 && best.1 >= 0.99 {
            break;
        }
        leg *= 2.0;
    }
    ensure(
        best.0 >= 0.99 && best.1 >= 0.99 && refused,
        format!(
            "legs {leg}: F(+ -> 0) = {:.4}, F(- -> 1) = {:.4}; Jz_hold = 0.2 refused: {refused}",
            best.0, best.1
        ),
    )
}

fn two_qubit_phase() -> Outcome {
    let (w, w_prime) = (-1.0, 0.3);
    let mut table_err = 0.0f64;
    let mut chain_err = 0.0f64;
    for n in [2, 4, 6] {
        for tau2 in [0.5, 1.0, 2.0] {
            let model = two_qubit_phase_model(n, w_prime, tau2).map_err(e)?;
            let phi2 = n as f64 * w_prime * tau2 / 2.0;
            let expected = [0.0, phi2, phi2, 0.0];
            for (z, x) in model.truth_table.iter().zip(expected) {
                table_err = table_err.max((z - Complex64::from_polar(1.0, x)).norm());
            }
            let micro = two_chain_phases(n, w, w_prime, tau2, TOL).map_err(e)?;
            for (m, x) in micro.iter().zip(expected) {
                chain_err = chain_err.max(wrap_phase(m - x).abs());
            }
        }
    }
    ensure(
        table_err <= 1e-12 && chain_err <= 1e-6,
        format!("truth table error {table_err:.1e}, two-chain phase error {chain_err:.1e} over N in 2,4,6 and three tau2"),
    )
}

fn determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_atomchain");
    let dir = tempfile::tempdir().map_err(e)?;
    let configs = [
        (
            "oracle-compare",
            r#"{"schema": 1, "seed": 99, "experiment": {"kind": "oracle-compare", "count": 12, "max_sites": 6}}"#,
        ),
        (
            "quench",
            r#"{"schema": 1, "experiment": {"kind": "quench", "sites": 6, "duration": 8.0, "samples": 8}}"#,
        ),
    ];
    let mut compared = 0;
    for (kind, text) in configs {
        ExperimentConfig::from_json(text).map_err(e)?;
        let path = dir.path().join(format!("{kind}.json"));
        std::fs::write(&path, text).map_err(e)?;
        let mut bodies = Vec::new();
        for (run, workers) in [(0, "1"), (1, "4")] {
            let out = dir.path().join(format!("{kind}-{run}"));
            let status = Command::new(bin)
                .args([kind, "--config"])
                .arg(&path)
                .arg("--out")
                .arg(&out)
                .args(["--workers", workers])
                .output()
                .map_err(e)?;
            if !status.status.success() {
                return Err(format!("{kind} run failed: {}", String::from_utf8_lossy(&status.stderr)));
            }
            let mut files: Vec<_> = std::fs::read_dir(&out)
                .map_err(e)?
                .filter_map(|f| f.ok().map(|f| f.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "csv"))
                .collect();
            files.sort();
            let content: Vec<Vec<u8>> = files.iter().map(std::fs::read).collect::<Result<_, _>>().map_err(e)?;
            bodies.push(content);
        }
        if bodies[0] != bodies[1] || bodies[0].is_empty() {
            return Err(format!("{kind}: CSV output differs between reruns"));
        }
        compared += bodies[0].len();
    }
    Ok(format!("{compared} CSV files byte-identical across reruns with 1 and 4 workers"))
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "oracle bracket", budget: Some(Duration::from_secs(120)), check: oracle_bracket },
        Criterion { id: 2, name: "spectrum equivalence", budget: Some(Duration::from_secs(60)), check: spectrum_equivalence },
        Criterion { id: 3, name: "gap law", budget: None, check: gap_law },
        Criterion { id: 4, name: "boundary-mode scaling", budget: None, check: boundary_scaling },
        Criterion { id: 5, name: "GHZ transfer", budget: Some(Duration::from_secs(60)), check: ghz_transfer },
        Criterion { id: 6, name: "N^2 scaling", budget: Some(Duration::from_secs(600)), check: n_squared_scaling },
        Criterion { id: 7, name: "width sweep", budget: Some(Duration::from_secs(600)), check: width_sweep },
        Criterion { id: 8, name: "parity, purity and reversal", budget: None, check: parity_purity_reversal },
        Criterion { id: 9, name: "decoherence-free subspace", budget: None, check: dfs_property },
        Criterion { id: 10, name: "Hadamard gate", budget: Some(Duration::from_secs(120)), check: hadamard_gate },
        Criterion { id: 11, name: "two-qubit phase", budget: None, check: two_qubit_phase },
        Criterion { id: 12, name: "determinism", budget: None, check: determinism },
    ];
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();

    let mut failures = 0;
    for c in criteria.iter().filter(|c| selected.is_empty() || selected.contains(&c.id)) {
        let start = Instant::now();
        let mut outcome = (c.check)();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(budget)) = (&outcome, c.budget) {
            if elapsed > budget {
                outcome = Err(format!("{detail}; over the {}s budget", budget.as_secs()));
            }
        }
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} [{:>2}] {}: {detail} ({:.1}s)", c.id, c.name, elapsed.as_secs_f64());
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
