//! File formats: observables CSV, block snapshots, phase-space grids.
//!
//! Floats in CSV files are written with 17 significant digits so they
//! round-trip exactly.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dispersive_core::phase_space::{
    atomic_inversion, coherence_magnitude, husimi_q, state_mean_photon, state_purity, wigner, PhaseSpaceGrid,
};
use dispersive_core::{AtomFieldState, FieldMatrix};
use serde::Serialize;

use crate::error::CliError;
use crate::run::Source;
use crate::scenario::{Observable, PhaseSpaceConfig};

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_text(path: &Path, text: &str) -> Result<PathBuf, CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source })?;
    Ok(path.to_path_buf())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<PathBuf, CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    write_text(path, &text)
}

pub fn observable(obs: Observable, state: &AtomFieldState) -> f64 {
    match obs {
        Observable::Inversion => atomic_inversion(state),
        Observable::MeanPhoton => state_mean_photon(state),
        Observable::Purity => state_purity(state),
        Observable::Coherence => coherence_magnitude(state),
        Observable::TraceCheck => state.total_trace().re,
    }
}

/// `observables.csv`: a `t` column, then one column per requested observable.
pub fn observables_csv(observables: &[Observable], times: &[f64], states: &[&AtomFieldState]) -> String {
    let mut out = String::from("t");
    for o in observables {
        out.push(',');
        out.push_str(o.column());
    }
    out.push('\n');
    for (&t, s) in times.iter().zip(states) {
        out.push_str(&fmt_f64(t));
        for &o in observables {
            out.push(',');
            out.push_str(&fmt_f64(observable(o, s)));
        }
        out.push('\n');
    }
    out
}

pub fn write_observables(
    dir: &Path,
    observables: &[Observable],
    times: &[f64],
    states: &[&AtomFieldState],
) -> Result<PathBuf, CliError> {
    write_text(&dir.join("observables.csv"), &observables_csv(observables, times, states))
}

type JsonMatrix = Vec<Vec<[f64; 2]>>;

fn json_matrix(m: &FieldMatrix) -> JsonMatrix {
    m.rows().into_iter().map(|row| row.iter().map(|c| [c.re, c.im]).collect()).collect()
}

/// Contents of `blocks_t{index}.json`.
#[derive(Debug, Serialize)]
pub struct BlockSnapshot {
    pub index: usize,
    pub t: f64,
    /// Blocks are stored in the rotating frame the solvers work in.
    pub frame: &'static str,
    pub source: Source,
    pub n_max: usize,
    pub rho_ee: JsonMatrix,
    pub rho_eg: JsonMatrix,
    pub rho_ge: JsonMatrix,
    pub rho_gg: JsonMatrix,
}

pub fn write_blocks(
    dir: &Path,
    index: usize,
    t: f64,
    source: Source,
    state: &AtomFieldState,
) -> Result<PathBuf, CliError> {
    let snap = BlockSnapshot {
        index,
        t,
        frame: "rotating",
        source,
        n_max: state.rho_ee.nrows() - 1,
        rho_ee: json_matrix(&state.rho_ee),
        rho_eg: json_matrix(&state.rho_eg),
        rho_ge: json_matrix(&state.rho_ge),
        rho_gg: json_matrix(&state.rho_gg),
    };
    let mut text = serde_json::to_string(&snap).expect("serializable snapshot");
    text.push('\n');
    write_text(&dir.join(format!("blocks_t{index}.json")), &text)
}

/// Long-format grid CSV: `re,im,<name>` rows, row-major by `(im, re)`.
pub fn grid_csv(grid: &PhaseSpaceGrid, name: &str) -> String {
    let mut out = format!("re,im,{name}\n");
    for i_im in 0..grid.n_im {
        for i_re in 0..grid.n_re {
            let p = grid.point(i_re, i_im);
            let _ = writeln!(out, "{},{},{}", fmt_f64(p.re), fmt_f64(p.im), fmt_f64(grid.values[[i_im, i_re]]));
        }
    }
    out
}

/// Q and/or W grids of the field state `ρ_ee + ρ_gg`.
pub fn write_grids(
    dir: &Path,
    index: usize,
    ps: &PhaseSpaceConfig,
    state: &AtomFieldState,
) -> Result<Vec<PathBuf>, CliError> {
    let b = &ps.bounds;
    let empty = PhaseSpaceGrid::new(b.re_min, b.re_max, b.im_min, b.im_max, ps.resolution.n_re, ps.resolution.n_im)
        .map_err(|e| CliError::invalid("phase_space", e.to_string()))?;
    let field = &state.rho_ee + &state.rho_gg;
    let mut files = Vec::new();
    if ps.which.wants_q() {
        let q = husimi_q(&field, &empty);
        files.push(write_text(&dir.join(format!("q_grid_t{index}.csv")), &grid_csv(&q, "q"))?);
    }
    if ps.which.wants_w() {
        let w = wigner(&field, &empty);
        files.push(write_text(&dir.join(format!("w_grid_t{index}.csv")), &grid_csv(&w, "w"))?);
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dispersive_core::fock::fock_state;
    use dispersive_core::{Complex64 as C64, Truncation};

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -2.5e10, 0.0] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(|c| c.is_ascii_digit()).count(), 17);
        }
    }

    #[test]
    fn csv_layout() {
        let trunc = Truncation::new(3).unwrap();
        let s = AtomFieldState::product(C64::new(1.0, 0.0), C64::new(0.0, 0.0), &fock_state(1, trunc).unwrap());
        let csv = observables_csv(&[Observable::MeanPhoton, Observable::Inversion], &[0.0, 1.0], &[&s, &s]);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "t,mean_photon,inversion");
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split(',').count(), 3);
    }

    #[test]
    fn grid_rows_are_im_major() {
        let mut g = PhaseSpaceGrid::new(-1.0, 1.0, 0.0, 1.0, 3, 2).unwrap();
        g.values[[1, 0]] = 7.0;
        let csv = grid_csv(&g, "w");
        let rows: Vec<_> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 6);
        assert!(rows[3].starts_with("-1.0000000000000000e0,1.0000000000000000e0,7.0"), "{}", rows[3]);
    }
}
