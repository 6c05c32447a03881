//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Run with `cargo test --release --test acceptance`.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use dispersive_cli::verify::{commutator_check, random_supported_matrix};
use dispersive_core::blocks::{
    evolve_blocks, solve_rho_ee, solve_rho_eg_with, solve_rho_ge_with, solve_rho_gg, PSD_TOL, TRACE_TOL,
};
use dispersive_core::fock::{coherent_state, fock_state, frobenius_distance, projector, trace};
use dispersive_core::oracle::{dense_propagate, rk4_integrate, IntegratorConfig};
use dispersive_core::phase_space::{husimi_q_point, mean_photon, wigner, PhaseSpaceGrid};
use dispersive_core::superops::decay_propagator;
use dispersive_core::{
    AtomFieldState, BlockKind, Complex64 as C64, DriveSpec, FieldMatrix, ModelParams, PrefactorRoute, Truncation,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const HERMITICITY_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Check = fn() -> Result<Outcome, String>;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn trunc(n: usize) -> Truncation {
    Truncation::new(n).unwrap()
}

/// f₀ = 0.1, ν = 1, χ = 0.2, γ = 0.05.
fn driven_params() -> (ModelParams, DriveSpec) {
    (ModelParams::new(1.0, 5.0, 0.2, 0.05).unwrap(), DriveSpec::Constant { f0: c(0.1, 0.0) })
}

fn half_half() -> (C64, C64) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    (c(h, 0.0), c(h, 0.0))
}

/// Worst trace drift, Hermiticity residual and most negative eigenvalue.
fn sanity(states: &[AtomFieldState]) -> (f64, f64, f64) {
    let mut worst = (0.0f64, 0.0f64, f64::INFINITY);
    for s in states {
        let d = s.diagnostics();
        worst.0 = worst.0.max((d.trace - 1.0).abs());
        worst.1 = worst.1.max(d.max_hermiticity());
        worst.2 = worst.2.min(d.min_eigenvalue);
    }
    worst
}

fn sane(w: (f64, f64, f64)) -> bool {
    w.0 <= TRACE_TOL && w.1 < HERMITICITY_TOL && w.2 >= -PSD_TOL
}

fn criterion_1() -> Result<Outcome, String> {
    let t = trunc(32);
    let mut worst: f64 = 0.0;
    for (chi, gamma) in [(0.2, 0.05), (1.0, 0.2), (-0.7, 0.0)] {
        let p = dispersive_core::superops::SuperopParams::new(chi, gamma).map_err(err)?;
        let check = commutator_check(p, t, 50, 7);
        worst = worst.max(check.max.max());
    }
    Ok(outcome(worst < 1e-10, format!("max residual {worst:.2e} over 3x50 matrices (tol 1e-10)")))
}

fn criterion_2() -> Result<Outcome, String> {
    let tr = trunc(16);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let rho = random_supported_matrix(&mut rng, tr, 16);
    let mut worst: f64 = 0.0;
    for gamma in [0.05, 0.2] {
        let p = ModelParams::new(0.0, 0.0, 0.2, gamma).map_err(err)?;
        for t in [1.0, 2.0, 5.0] {
            for (sign, kind) in [(1i8, BlockKind::Ee), (-1i8, BlockKind::Gg)] {
                let dense = dense_propagate(kind, &p, &DriveSpec::zero(), &rho, t).map_err(err)?;
                let closed = decay_propagator(p.superop(), t, sign, &rho);
                worst = worst.max(frobenius_distance(&dense, &closed).map_err(err)?);
            }
        }
    }
    Ok(outcome(worst < 1e-8, format!("max distance {worst:.2e} at n_max=16 (tol 1e-8)")))
}

fn criterion_3() -> Result<Outcome, String> {
    let gamma = 0.1;
    let p = ModelParams::new(1.0, 5.0, 0.2, gamma).map_err(err)?;
    let state0 = AtomFieldState::product(c(1.0, 0.0), c(0.0, 0.0), &coherent_state(c(1.0, 0.0), trunc(32)));
    let mut worst: f64 = 0.0;
    for k in 0..=30 {
        let t = 0.5 * k as f64; // γt up to 1.5
        let s = evolve_blocks(&p, &DriveSpec::zero(), &state0, t, PrefactorRoute::Literal).map_err(err)?;
        let expect = (-2.0 * gamma * t).exp();
        let n = mean_photon(&s.rho_ee) + mean_photon(&s.rho_gg);
        worst = worst.max((n - expect).abs() / expect);
    }
    Ok(outcome(worst < 1e-6, format!("max relative error {worst:.2e} over 31 times (tol 1e-6)")))
}

fn oracle(kind: BlockKind, p: &ModelParams, d: &DriveSpec, rho0: &FieldMatrix, t: f64) -> Result<FieldMatrix, String> {
    rk4_integrate(kind, p, d, rho0, t, IntegratorConfig::default()).map_err(err)
}

fn criterion_4() -> Result<Outcome, String> {
    let (p, d) = driven_params();
    let rho0 = projector(&coherent_state(c(1.0, 0.0), trunc(32)));
    let mut worst: f64 = 0.0;
    for t in [0.5, 1.0, 2.0] {
        let ee = solve_rho_ee(&p, &d, &rho0, t).map_err(err)?;
        let gg = solve_rho_gg(&p, &d, &rho0, t).map_err(err)?;
        worst = worst.max(frobenius_distance(&ee, &oracle(BlockKind::Ee, &p, &d, &rho0, t)?).map_err(err)?);
        worst = worst.max(frobenius_distance(&gg, &oracle(BlockKind::Gg, &p, &d, &rho0, t)?).map_err(err)?);
    }
    Ok(outcome(worst < 1e-6, format!("max distance {worst:.2e} (tol 1e-6)")))
}

fn criterion_5() -> Result<Outcome, String> {
    let (p, d) = driven_params();
    let rho0 = projector(&coherent_state(c(1.0, 0.0), trunc(32)));
    let (mut literal, mut magnus) = (0.0f64, 0.0f64);
    for t in [0.5, 1.0, 2.0] {
        let o_eg = oracle(BlockKind::Eg, &p, &d, &rho0, t)?;
        let o_ge = oracle(BlockKind::Ge, &p, &d, &rho0, t)?;
        for (route, acc) in [(PrefactorRoute::Literal, &mut literal), (PrefactorRoute::Magnus, &mut magnus)] {
            let eg = solve_rho_eg_with(&p, &d, &rho0, t, route).map_err(err)?;
            let ge = solve_rho_ge_with(&p, &d, &rho0, t, route).map_err(err)?;
            *acc = acc.max(frobenius_distance(&eg, &o_eg).map_err(err)?);
            *acc = acc.max(frobenius_distance(&ge, &o_ge).map_err(err)?);
        }
    }
    Ok(outcome(
        literal < 1e-5 || magnus < 1e-5,
        format!("max distance literal {literal:.2e}, magnus {magnus:.2e} (tol 1e-5)"),
    ))
}

fn criterion_6() -> Result<Outcome, String> {
    let chi = 0.2;
    let p = ModelParams::new(1.0, 5.0, chi, 0.0).map_err(err)?;
    let (ce, cg) = half_half();
    let state0 = AtomFieldState::product(ce, cg, &coherent_state(c(1.0, 0.0), trunc(32)));
    let mut worst: f64 = 0.0;
    let mut at_quarter = f64::NAN;
    for k in 1..=20 {
        let t = 0.1 * k as f64 * PI / (2.0 * chi);
        let s = evolve_blocks(&p, &DriveSpec::zero(), &state0, t, PrefactorRoute::Literal).map_err(err)?;
        let got = trace(&s.rho_eg).norm();
        let expect = 0.5 * (-(1.0 - (2.0 * chi * t).cos())).exp();
        worst = worst.max((got - expect).abs());
        if k == 10 {
            at_quarter = got;
        }
    }
    let pass = worst < 1e-8 && (at_quarter - 0.067668).abs() < 5e-7;
    Ok(outcome(pass, format!("max error {worst:.2e} over 20 times (tol 1e-8); chi*t=pi/2 gives {at_quarter:.6}")))
}

fn criterion_7() -> Result<Outcome, String> {
    let mut states = Vec::new();
    let (p, d) = driven_params();
    let (ce, cg) = half_half();
    let coh = coherent_state(c(1.0, 0.0), trunc(32));
    for (params, drive, state0, times) in [
        (p, d.clone(), AtomFieldState::product(ce, cg, &coh), vec![0.5, 1.0, 2.0]),
        (
            ModelParams::new(1.0, 5.0, 0.2, 0.1).map_err(err)?,
            DriveSpec::zero(),
            AtomFieldState::product(c(1.0, 0.0), c(0.0, 0.0), &coh),
            vec![5.0, 10.0, 15.0],
        ),
        (
            ModelParams::new(1.0, 5.0, 0.2, 0.0).map_err(err)?,
            DriveSpec::zero(),
            AtomFieldState::product(ce, cg, &coh),
            vec![PI / 0.4, PI / 0.2],
        ),
        (
            ModelParams::new(1.0, 5.0, 0.2, 0.1).map_err(err)?,
            DriveSpec::zero(),
            AtomFieldState::product(c(1.0, 0.0), c(0.0, 0.0), &fock_state(1, trunc(32)).map_err(err)?),
            vec![5.0],
        ),
    ] {
        for t in times {
            states.push(evolve_blocks(&params, &drive, &state0, t, PrefactorRoute::Literal).map_err(err)?);
        }
    }
    let w = sanity(&states);
    Ok(outcome(
        sane(w),
        format!(
            "{} states: trace drift {:.2e}, hermiticity {:.2e}, min eigenvalue {:.2e}",
            states.len(),
            w.0,
            w.1,
            w.2
        ),
    ))
}

fn criterion_8() -> Result<Outcome, String> {
    let t = trunc(32);
    let grid = PhaseSpaceGrid::new(-3.0, 3.0, -3.0, 3.0, 41, 41).map_err(err)?;
    let mut worst: f64 = 0.0;
    for a0 in [c(0.0, 0.0), c(1.5, 0.0), c(1.0, -1.1), c(-0.7, 0.4)] {
        let w = wigner(&projector(&coherent_state(a0, t)), &grid);
        for i_im in 0..41 {
            for i_re in 0..41 {
                let a = grid.point(i_re, i_im);
                let expect = 2.0 / PI * (-2.0 * (a - a0).norm_sqr()).exp();
                worst = worst.max((w.values[[i_im, i_re]] - expect).abs());
            }
        }
    }
    let vac = projector(&fock_state(0, t).map_err(err)?);
    let q = husimi_q_point(&vac, c(0.0, 0.0)).re;
    let q_err = (q - 1.0 / PI).abs();
    Ok(outcome(
        worst < 1e-6 && q_err < 1e-10,
        format!("Wigner max error {worst:.2e} on 41x41 (tol 1e-6); Q(vacuum, 0) error {q_err:.2e} (tol 1e-10)"),
    ))
}

fn criterion_9() -> Result<Outcome, String> {
    let (p, d) = driven_params();
    let rho0 = projector(&coherent_state(c(1.0, 0.0), trunc(32)));
    let run = |dt: f64| rk4_integrate(BlockKind::Eg, &p, &d, &rho0, 2.0, IntegratorConfig::with_dt(dt)).map_err(err);
    let (r1, r2, r3) = (run(0.2)?, run(0.1)?, run(0.05)?);
    let ratio = frobenius_distance(&r1, &r2).map_err(err)? / frobenius_distance(&r2, &r3).map_err(err)?;
    Ok(outcome((ratio - 16.0).abs() <= 2.0, format!("ratio {ratio:.3} for dt = 0.2, 0.1, 0.05 (want 16 +- 2)")))
}

fn example_scenario() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/driven_dispersive.json")
}

fn run_cli(out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_dispersive"))
        .arg("--scenario")
        .arg(example_scenario())
        .arg("--out")
        .arg(out)
        .arg("--quiet")
        .status()
        .map_err(err)?;
    if status.success() {
        Ok(())
    } else {
        Err(format!("dispersive exited with {status}"))
    }
}

fn criterion_10() -> Result<Outcome, String> {
    let (a, b) = (tempfile::tempdir().map_err(err)?, tempfile::tempdir().map_err(err)?);
    run_cli(a.path())?;
    run_cli(b.path())?;
    let csv_a = std::fs::read(a.path().join("observables.csv")).map_err(err)?;
    let csv_b = std::fs::read(b.path().join("observables.csv")).map_err(err)?;
    let identical = csv_a == csv_b;
    let rows = csv_a.iter().filter(|&&ch| ch == b'\n').count() - 1;
    let report: serde_json::Value =
        serde_json::from_slice(&std::fs::read(a.path().join("verification.json")).map_err(err)?).map_err(err)?;
    let all_pass = report["all_pass"].as_bool() == Some(true);
    Ok(outcome(
        identical && all_pass && rows == 21,
        format!("byte-identical CSV: {identical}; {rows} data rows; verification all_pass: {all_pass}"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 10] = [
        ("superoperator algebra", criterion_1),
        ("decay propagator vs dense exponential", criterion_2),
        ("photon-decay law", criterion_3),
        ("diagonal blocks vs oracle", criterion_4),
        ("coherence blocks vs oracle", criterion_5),
        ("dispersive cat-state coherence", criterion_6),
        ("state sanity", criterion_7),
        ("phase space", criterion_8),
        ("oracle order", criterion_9),
        ("CLI regression", criterion_10),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "{} criterion {:>2} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {}/{} passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
