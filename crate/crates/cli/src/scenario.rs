//! Scenario file format and its validation into solver inputs.
//!
//! Complex numbers are `[re, im]` arrays; variants are externally tagged
//! objects such as `{"constant": {"f0": [0.1, 0.0]}}`.

use std::path::Path;

use dispersive_core::drive::SampledDrive;
use dispersive_core::fock::{coherent_state, fock_state, DEFAULT_N_MAX};
use dispersive_core::{AtomFieldState, Complex64 as C64, DriveSpec, ModelParams, Truncation};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Normalization slack allowed on the atomic amplitudes.
pub const ATOM_NORM_TOL: f64 = 1e-9;

pub type Cx = [f64; 2];

fn cx(z: Cx) -> C64 {
    C64::new(z[0], z[1])
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    pub params: Params,
    #[serde(default = "DriveConfig::zero")]
    pub drive: DriveConfig,
    pub initial: Initial,
    pub times: Times,
    #[serde(default)]
    pub observables: Vec<Observable>,
    #[serde(default)]
    pub phase_space: Option<PhaseSpaceConfig>,
    #[serde(default)]
    pub method: Method,
}

fn default_truncation() -> usize {
    DEFAULT_N_MAX
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    pub nu: f64,
    pub omega: f64,
    pub chi: f64,
    pub gamma: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSample {
    pub t: f64,
    pub f: Cx,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DriveConfig {
    Constant {
        f0: Cx,
    },
    Exponential {
        f0: Cx,
        kappa: Cx,
    },
    Sinusoid {
        f0: Cx,
        omega: f64,
        #[serde(default)]
        phase: f64,
    },
    PiecewiseLinear {
        samples: Vec<DriveSample>,
    },
}

impl DriveConfig {
    fn zero() -> Self {
        DriveConfig::Constant { f0: [0.0, 0.0] }
    }

    fn resolve(&self) -> Result<DriveSpec, CliError> {
        let finite = |name: &str, z: &Cx| {
            if z.iter().all(|v| v.is_finite()) {
                Ok(())
            } else {
                Err(CliError::invalid(format!("drive.{name}"), "must be finite"))
            }
        };
        Ok(match self {
            DriveConfig::Constant { f0 } => {
                finite("f0", f0)?;
                DriveSpec::Constant { f0: cx(*f0) }
            }
            DriveConfig::Exponential { f0, kappa } => {
                finite("f0", f0)?;
                finite("kappa", kappa)?;
                DriveSpec::Exponential { f0: cx(*f0), kappa: cx(*kappa) }
            }
            DriveConfig::Sinusoid { f0, omega, phase } => {
                finite("f0", f0)?;
                if !omega.is_finite() || !phase.is_finite() {
                    return Err(CliError::invalid("drive.sinusoid", "omega and phase must be finite"));
                }
                DriveSpec::Sinusoid { f0: cx(*f0), omega: *omega, phase: *phase }
            }
            DriveConfig::PiecewiseLinear { samples } => {
                let pts = samples.iter().map(|s| (s.t, cx(s.f))).collect();
                let sampled = SampledDrive::new(pts)
                    .map_err(|e| CliError::invalid("drive.piecewise_linear.samples", e.to_string()))?;
                DriveSpec::PiecewiseLinear(sampled)
            }
        })
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Initial {
    pub field: FieldInit,
    pub atom: AtomInit,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FieldInit {
    Coherent { re: f64, im: f64 },
    Fock { n: usize },
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AtomInit {
    pub c_e: Cx,
    pub c_g: Cx,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Times {
    pub t_max: f64,
    pub steps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Observable {
    Inversion,
    MeanPhoton,
    Purity,
    Coherence,
    TraceCheck,
}

impl Observable {
    pub fn column(&self) -> &'static str {
        match self {
            Observable::Inversion => "inversion",
            Observable::MeanPhoton => "mean_photon",
            Observable::Purity => "purity",
            Observable::Coherence => "coherence",
            Observable::TraceCheck => "trace_check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quasi {
    Q,
    W,
    Both,
}

impl Quasi {
    pub fn wants_q(&self) -> bool {
        matches!(self, Quasi::Q | Quasi::Both)
    }

    pub fn wants_w(&self) -> bool {
        matches!(self, Quasi::W | Quasi::Both)
    }
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

#[derive(Clone, Copy, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Resolution {
    pub n_re: usize,
    pub n_im: usize,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceConfig {
    pub which: Quasi,
    pub bounds: Bounds,
    pub resolution: Resolution,
    pub snapshot_times: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Analytic,
    Oracle,
    Both,
}

/// Command-line overrides applied on top of the file.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub method: Option<Method>,
}

/// A validated scenario in solver types.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub trunc: Truncation,
    pub params: ModelParams,
    pub drive: DriveSpec,
    pub state0: AtomFieldState,
    pub t_max: f64,
    pub steps: usize,
    pub observables: Vec<Observable>,
    pub phase_space: Option<PhaseSpaceConfig>,
    /// Times at which block snapshots (and grids) are written.
    pub snapshot_times: Vec<f64>,
    pub method: Method,
}

impl Resolved {
    /// `t_k = t_max·k/steps`, `k = 0..=steps`.
    pub fn time_grid(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.t_max * k as f64 / self.steps as f64).collect()
    }
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    Ok(serde_json::from_str(text)?)
}

pub fn load(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })?;
    parse(&text)
}

impl Scenario {
    pub fn resolve(&self, ov: Overrides) -> Result<Resolved, CliError> {
        let n_max = ov.truncation.unwrap_or(self.truncation);
        let trunc = Truncation::new(n_max).map_err(|e| CliError::invalid("truncation", e.to_string()))?;

        let p = &self.params;
        let params = ModelParams::new(p.nu, p.omega, p.chi, p.gamma).map_err(|e| match e {
            dispersive_core::Error::InvalidParameter { name, reason } => {
                CliError::invalid(format!("params.{name}"), reason)
            }
            other => CliError::invalid("params", other.to_string()),
        })?;

        let drive = self.drive.resolve()?;

        let t = &self.times;
        if !(t.t_max > 0.0) || !t.t_max.is_finite() {
            return Err(CliError::invalid("times.t_max", format!("must be finite and > 0, got {}", t.t_max)));
        }
        if t.steps < 1 {
            return Err(CliError::invalid("times.steps", "must be >= 1"));
        }
        if let DriveSpec::PiecewiseLinear(s) = &drive {
            if s.start() > 0.0 || s.end() < t.t_max {
                return Err(CliError::invalid(
                    "drive.piecewise_linear.samples",
                    format!("samples cover [{}, {}] but the run needs [0, {}]", s.start(), s.end(), t.t_max),
                ));
            }
        }

        let field = match self.initial.field {
            FieldInit::Coherent { re, im } => {
                if !re.is_finite() || !im.is_finite() {
                    return Err(CliError::invalid("initial.field.coherent", "amplitude must be finite"));
                }
                coherent_state(C64::new(re, im), trunc)
            }
            FieldInit::Fock { n } => {
                fock_state(n, trunc).map_err(|e| CliError::invalid("initial.field.fock.n", e.to_string()))?
            }
        };
        let (c_e, c_g) = (cx(self.initial.atom.c_e), cx(self.initial.atom.c_g));
        let norm = c_e.norm_sqr() + c_g.norm_sqr();
        if !((norm - 1.0).abs() <= ATOM_NORM_TOL) {
            return Err(CliError::invalid(
                "initial.atom",
                format!("|c_e|^2 + |c_g|^2 = {norm} differs from 1 by more than {ATOM_NORM_TOL:e}"),
            ));
        }
        let state0 = AtomFieldState::product(c_e, c_g, &field);

        let snapshot_times = match &self.phase_space {
            Some(ps) => {
                let b = &ps.bounds;
                if !(b.re_min < b.re_max) || !(b.im_min < b.im_max) {
                    return Err(CliError::invalid("phase_space.bounds", "need re_min < re_max and im_min < im_max"));
                }
                if ps.resolution.n_re < 2 || ps.resolution.n_im < 2 {
                    return Err(CliError::invalid("phase_space.resolution", "need at least 2 points per axis"));
                }
                if ps.snapshot_times.is_empty() {
                    return Err(CliError::invalid("phase_space.snapshot_times", "must not be empty"));
                }
                if let Some(bad) = ps.snapshot_times.iter().find(|&&s| !(0.0..=t.t_max).contains(&s)) {
                    return Err(CliError::invalid(
                        "phase_space.snapshot_times",
                        format!("{bad} lies outside [0, {}]", t.t_max),
                    ));
                }
                ps.snapshot_times.clone()
            }
            None => vec![t.t_max],
        };

        Ok(Resolved {
            trunc,
            params,
            drive,
            state0,
            t_max: t.t_max,
            steps: t.steps,
            observables: self.observables.clone(),
            phase_space: self.phase_space.clone(),
            snapshot_times,
            method: ov.method.unwrap_or(self.method),
        })
    }
}
