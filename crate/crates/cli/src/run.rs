//! Propagate a resolved scenario and write its outputs.

use std::path::{Path, PathBuf};

use dispersive_core::blocks::{evolve_blocks, solve_rho_eg_with, solve_rho_ge_with};
use dispersive_core::oracle::{rk4_integrate_from, IntegratorConfig};
use dispersive_core::{AtomFieldState, BlockKind, Error as CoreError, FieldMatrix, PrefactorRoute};
use rayon::prelude::*;

use crate::error::CliError;
use crate::output;
use crate::scenario::{self, Method, Overrides, Resolved};
use crate::verify::{self, PrefactorCheck, RouteName, VerificationReport, COHERENCE_TOL};

/// Which propagator produced the written states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Analytic,
    Oracle,
}

/// Summary of a finished run.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub source: Source,
    pub files: Vec<PathBuf>,
    pub verification: Option<VerificationReport>,
}

/// Every time at which a state is needed: the output grid plus snapshot times,
/// sorted and deduplicated.
pub fn evaluation_times(r: &Resolved) -> Vec<f64> {
    let mut all = r.time_grid();
    all.extend(r.snapshot_times.iter().copied());
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

/// Position of `t` in the sorted `times` (which must contain it).
pub fn index_of(times: &[f64], t: f64) -> usize {
    times.binary_search_by(|x| x.total_cmp(&t)).expect("time present in evaluation grid")
}

fn numerical(t: f64) -> impl Fn(CoreError) -> CliError {
    move |source| CliError::Numerical { t, source }
}

/// Analytic states at each time; the first failure in time order wins.
pub fn analytic_states(
    r: &Resolved,
    times: &[f64],
    route: PrefactorRoute,
) -> Result<Vec<AtomFieldState>, (f64, CoreError)> {
    let results: Vec<_> = times
        .par_iter()
        .map(|&t| evolve_blocks(&r.params, &r.drive, &r.state0, t, route).map_err(|e| (t, e)))
        .collect();
    results.into_iter().collect()
}

/// Coherence blocks `(ρ_eg, ρ_ge)` with the given prefactor route.
pub fn coherence_states(
    r: &Resolved,
    times: &[f64],
    route: PrefactorRoute,
) -> Result<Vec<(FieldMatrix, FieldMatrix)>, (f64, CoreError)> {
    let results: Vec<_> = times
        .par_iter()
        .map(|&t| {
            let eg = solve_rho_eg_with(&r.params, &r.drive, &r.state0.rho_eg, t, route);
            let ge = solve_rho_ge_with(&r.params, &r.drive, &r.state0.rho_ge, t, route);
            match (eg, ge) {
                (Ok(eg), Ok(ge)) => Ok((eg, ge)),
                (Err(e), _) | (_, Err(e)) => Err((t, e)),
            }
        })
        .collect();
    results.into_iter().collect()
}

/// RK4 states at each time, marching every block forward through the sorted
/// `times`.
pub fn oracle_states(r: &Resolved, times: &[f64]) -> Result<Vec<AtomFieldState>, CliError> {
    let march = |kind: BlockKind| -> Result<Vec<FieldMatrix>, CliError> {
        let mut out = Vec::with_capacity(times.len());
        let mut rho = r.state0.block(kind).clone();
        let mut t_prev = 0.0;
        for &t in times {
            rho = rk4_integrate_from(kind, &r.params, &r.drive, &rho, t_prev, t, IntegratorConfig::default())
                .map_err(numerical(t))?;
            out.push(rho.clone());
            t_prev = t;
        }
        Ok(out)
    };
    let mut per_block: Vec<_> = BlockKind::ALL.par_iter().map(|&k| march(k)).collect::<Result<_, _>>()?;
    // BlockKind::ALL is [Ee, Eg, Ge, Gg]
    let gg = per_block.pop().expect("four blocks");
    let ge = per_block.pop().expect("four blocks");
    let eg = per_block.pop().expect("four blocks");
    let ee = per_block.pop().expect("four blocks");
    Ok(ee
        .into_iter()
        .zip(eg)
        .zip(ge)
        .zip(gg)
        .map(|(((rho_ee, rho_eg), rho_ge), rho_gg)| AtomFieldState { rho_ee, rho_eg, rho_ge, rho_gg })
        .collect())
}

fn refusal(t: f64, e: CoreError) -> CliError {
    match e {
        CoreError::OverflowGuard { .. } => CliError::OverflowRefusal { t, message: e.to_string() },
        other => CliError::Numerical { t, source: other },
    }
}

/// States at `times` from the requested method, plus the verification report
/// when both methods run.
pub fn propagate(
    r: &Resolved,
    times: &[f64],
) -> Result<(Vec<AtomFieldState>, Source, Option<VerificationReport>), CliError> {
    match r.method {
        Method::Analytic => {
            let states = analytic_states(r, times, PrefactorRoute::Literal).map_err(|(t, e)| refusal(t, e))?;
            Ok((states, Source::Analytic, None))
        }
        Method::Oracle => Ok((oracle_states(r, times)?, Source::Oracle, None)),
        Method::Both => {
            let oracle = oracle_states(r, times)?;
            let expected_trace = r.state0.total_trace().re;
            let commutators = verify::commutator_check(
                r.params.superop(),
                r.trunc,
                verify::COMMUTATOR_SAMPLES,
                verify::COMMUTATOR_SEED,
            );
            let analytic = analytic_states(r, times, PrefactorRoute::Literal);
            let magnus = coherence_states(r, times, PrefactorRoute::Magnus);
            match (analytic, magnus) {
                (Ok(mut analytic), Ok(magnus)) => {
                    let literal_pairs: Vec<_> = analytic.iter().map(|s| (s.rho_eg.clone(), s.rho_ge.clone())).collect();
                    let literal = verify::route_residual(&literal_pairs, &oracle);
                    let magnus_res = verify::route_residual(&magnus, &oracle);
                    // literal unless it misses the tolerance and the Magnus route does better
                    let route_applied =
                        if literal.max_distance > COHERENCE_TOL && magnus_res.max_distance < literal.max_distance {
                            RouteName::Magnus
                        } else {
                            RouteName::Literal
                        };
                    if route_applied == RouteName::Magnus {
                        for (s, (eg, ge)) in analytic.iter_mut().zip(magnus) {
                            s.rho_eg = eg;
                            s.rho_ge = ge;
                        }
                    }
                    let applied = match route_applied {
                        RouteName::Literal => literal,
                        RouteName::Magnus => magnus_res,
                    };
                    let report = VerificationReport {
                        n_max: r.trunc.n_max(),
                        times_compared: times.len(),
                        analytic_refused: None,
                        blocks: verify::block_checks(Some(&analytic), &oracle),
                        prefactor: PrefactorCheck {
                            literal: Some(literal),
                            magnus: Some(magnus_res),
                            route_applied: Some(route_applied),
                            tolerance: COHERENCE_TOL,
                            pass: applied.max_distance <= COHERENCE_TOL,
                        },
                        commutators,
                        state: verify::state_check(&analytic, expected_trace),
                        all_pass: false,
                    }
                    .finish();
                    Ok((analytic, Source::Analytic, Some(report)))
                }
                (Err((t, e)), _) | (_, Err((t, e))) => {
                    let refused = match e {
                        CoreError::OverflowGuard { .. } => format!("t={t}: {e}"),
                        other => return Err(CliError::Numerical { t, source: other }),
                    };
                    log::warn!("analytic path refused ({refused}); writing oracle results");
                    let report = VerificationReport {
                        n_max: r.trunc.n_max(),
                        times_compared: times.len(),
                        analytic_refused: Some(refused),
                        blocks: verify::block_checks(None, &oracle),
                        prefactor: PrefactorCheck {
                            literal: None,
                            magnus: None,
                            route_applied: None,
                            tolerance: COHERENCE_TOL,
                            pass: false,
                        },
                        commutators,
                        state: verify::state_check(&oracle, expected_trace),
                        all_pass: false,
                    }
                    .finish();
                    Ok((oracle, Source::Oracle, Some(report)))
                }
            }
        }
    }
}

/// Check every state's invariants, reporting the earliest failure.
pub fn validate_states(times: &[f64], states: &[AtomFieldState], expected_trace: f64) -> Result<(), CliError> {
    for (&t, s) in times.iter().zip(states) {
        if let Err(e) = s.validate(Some(expected_trace)) {
            return Err(match e {
                CoreError::InvariantViolation { invariant, magnitude } => {
                    CliError::Invariant { invariant: invariant.to_string(), t, magnitude }
                }
                other => CliError::Numerical { t, source: other },
            });
        }
    }
    Ok(())
}

/// Resolve, propagate and write everything for an already-parsed scenario.
pub fn run_resolved(r: &Resolved, out_dir: &Path) -> Result<RunSummary, CliError> {
    let times = evaluation_times(r);
    let (states, source, verification) = propagate(r, &times)?;
    validate_states(&times, &states, r.state0.total_trace().re)?;

    std::fs::create_dir_all(out_dir).map_err(|source| CliError::Write { path: out_dir.to_path_buf(), source })?;
    let mut files = Vec::new();

    let grid = r.time_grid();
    let grid_states: Vec<&AtomFieldState> = grid.iter().map(|&t| &states[index_of(&times, t)]).collect();
    files.push(output::write_observables(out_dir, &r.observables, &grid, &grid_states)?);

    for (k, &t) in r.snapshot_times.iter().enumerate() {
        let state = &states[index_of(&times, t)];
        files.push(output::write_blocks(out_dir, k, t, source, state)?);
        if let Some(ps) = &r.phase_space {
            files.extend(output::write_grids(out_dir, k, ps, state)?);
        }
    }

    if let Some(report) = &verification {
        files.push(output::write_json(&out_dir.join("verification.json"), report)?);
    }

    Ok(RunSummary { out_dir: out_dir.to_path_buf(), source, files, verification })
}

/// Parse `path`, apply `overrides`, propagate and write outputs to `out_dir`.
pub fn run_scenario(path: &Path, out_dir: &Path, overrides: Overrides) -> Result<RunSummary, CliError> {
    let resolved = scenario::load(path)?.resolve(overrides)?;
    run_resolved(&resolved, out_dir)
}
