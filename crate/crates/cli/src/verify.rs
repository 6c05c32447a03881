//! Verification report: analytic blocks against the oracle, the prefactor
//! diagnostic, and superoperator identities on random matrices.

use dispersive_core::fock::{frobenius_distance, frobenius_norm, restrict_support, trace};
use dispersive_core::superops::{apply_j, apply_l, apply_lindblad, apply_r, apply_s, SuperopParams};
use dispersive_core::{AtomFieldState, Complex64 as C64, FieldMatrix, Truncation};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub const DIAGONAL_TOL: f64 = 1e-6;
pub const COHERENCE_TOL: f64 = 1e-5;
pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const COMMUTATOR_SAMPLES: usize = 50;
pub const COMMUTATOR_SUPPORT: usize = 16;
pub const COMMUTATOR_SEED: u64 = 0x5eed;
/// Oracle traces smaller than this are skipped by the trace-ratio diagnostic.
pub const TRACE_RATIO_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockCheck {
    /// `None` when the analytic path was refused.
    pub max_distance: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

impl BlockCheck {
    fn new(max_distance: Option<f64>, tolerance: f64) -> Self {
        Self { max_distance, tolerance, pass: max_distance.is_some_and(|d| d <= tolerance) }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BlockChecks {
    pub ee: BlockCheck,
    pub eg: BlockCheck,
    pub ge: BlockCheck,
    pub gg: BlockCheck,
}

impl BlockChecks {
    fn all_pass(&self) -> bool {
        self.ee.pass && self.eg.pass && self.ge.pass && self.gg.pass
    }
}

/// Residuals of one way of evaluating the coherence-block scalar.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RouteResidual {
    /// Largest Frobenius distance of `ρ_eg`, `ρ_ge` to the oracle.
    pub max_distance: f64,
    /// Largest `|tr ρ_analytic / tr ρ_oracle − 1|` over both coherence blocks.
    pub max_trace_ratio_deviation: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RouteName {
    Literal,
    Magnus,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrefactorCheck {
    pub literal: Option<RouteResidual>,
    pub magnus: Option<RouteResidual>,
    pub route_applied: Option<RouteName>,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CommutatorResiduals {
    /// `‖[J,L]ρ − 2Jρ‖`
    pub jl: f64,
    /// `‖[R,J]ρ‖`
    pub rj: f64,
    /// `‖[R,L]ρ‖`
    pub rl: f64,
    /// `‖[S(ε),𝓛]ρ − γS(ε)ρ‖`
    pub s_lindblad: f64,
}

impl CommutatorResiduals {
    pub fn max(&self) -> f64 {
        self.jl.max(self.rj).max(self.rl).max(self.s_lindblad)
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CommutatorCheck {
    pub samples: usize,
    pub support: usize,
    pub seed: u64,
    /// Worst residual of each identity over all samples.
    pub max: CommutatorResiduals,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StateCheck {
    pub max_trace_drift: f64,
    pub max_hermiticity: f64,
    pub min_eigenvalue: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub n_max: usize,
    pub times_compared: usize,
    /// Set when the analytic guard refused and the oracle result was used.
    pub analytic_refused: Option<String>,
    pub blocks: BlockChecks,
    pub prefactor: PrefactorCheck,
    pub commutators: CommutatorCheck,
    pub state: StateCheck,
    pub all_pass: bool,
}

/// `[J,L]ρ − 2Jρ`, `[R,J]ρ`, `[R,L]ρ`, `[S(ε),𝓛]ρ − γS(ε)ρ` for one matrix.
pub fn commutator_residuals(p: SuperopParams, eps: C64, rho: &FieldMatrix) -> CommutatorResiduals {
    let j = apply_j(rho);
    let l = apply_l(rho);
    let jl = apply_j(&l) - apply_l(&j) - &j * 2.0;
    let rj = apply_r(p, &j) - apply_j(&apply_r(p, rho));
    let rl = apply_r(p, &l) - apply_l(&apply_r(p, rho));
    let s = apply_s(eps, rho);
    let sl = apply_s(eps, &apply_lindblad(p, rho)) - apply_lindblad(p, &s) - s * p.gamma;
    CommutatorResiduals {
        jl: frobenius_norm(&jl),
        rj: frobenius_norm(&rj),
        rl: frobenius_norm(&rl),
        s_lindblad: frobenius_norm(&sl),
    }
}

/// Random complex matrix with entries in the unit square, supported on Fock
/// levels `0..=support`.
pub fn random_supported_matrix(rng: &mut impl Rng, trunc: Truncation, support: usize) -> FieldMatrix {
    let d = trunc.dim();
    let full = Array2::from_shape_fn((d, d), |_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    restrict_support(&full, support)
}

/// Worst residual of each identity over `samples` seeded random matrices with
/// random drive amplitudes.
pub fn commutator_check(p: SuperopParams, trunc: Truncation, samples: usize, seed: u64) -> CommutatorCheck {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let support = COMMUTATOR_SUPPORT.min(trunc.n_max());
    let mut worst = CommutatorResiduals { jl: 0.0, rj: 0.0, rl: 0.0, s_lindblad: 0.0 };
    for _ in 0..samples {
        let rho = random_supported_matrix(&mut rng, trunc, support);
        let eps = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let r = commutator_residuals(p, eps, &rho);
        worst.jl = worst.jl.max(r.jl);
        worst.rj = worst.rj.max(r.rj);
        worst.rl = worst.rl.max(r.rl);
        worst.s_lindblad = worst.s_lindblad.max(r.s_lindblad);
    }
    CommutatorCheck {
        samples,
        support,
        seed,
        max: worst,
        tolerance: COMMUTATOR_TOL,
        pass: worst.max() <= COMMUTATOR_TOL,
    }
}

fn max_distance(a: &[&FieldMatrix], b: &[&FieldMatrix]) -> f64 {
    a.iter().zip(b).map(|(x, y)| frobenius_distance(x, y).unwrap_or(f64::INFINITY)).fold(0.0, f64::max)
}

/// Distances and trace ratios of coherence blocks `(eg, ge)` against the oracle.
pub fn route_residual(analytic: &[(FieldMatrix, FieldMatrix)], oracle: &[AtomFieldState]) -> RouteResidual {
    let mut dist: f64 = 0.0;
    let mut ratio: f64 = 0.0;
    for ((eg, ge), o) in analytic.iter().zip(oracle) {
        for (a, b) in [(eg, &o.rho_eg), (ge, &o.rho_ge)] {
            dist = dist.max(frobenius_distance(a, b).unwrap_or(f64::INFINITY));
            let tb = trace(b);
            if tb.norm() > TRACE_RATIO_FLOOR {
                ratio = ratio.max((trace(a) / tb - 1.0).norm());
            }
        }
    }
    RouteResidual { max_distance: dist, max_trace_ratio_deviation: ratio }
}

pub fn block_checks(analytic: Option<&[AtomFieldState]>, oracle: &[AtomFieldState]) -> BlockChecks {
    let dist = |pick: fn(&AtomFieldState) -> &FieldMatrix| {
        analytic.map(|a| {
            let xs: Vec<_> = a.iter().map(pick).collect();
            let ys: Vec<_> = oracle.iter().map(pick).collect();
            max_distance(&xs, &ys)
        })
    };
    BlockChecks {
        ee: BlockCheck::new(dist(|s| &s.rho_ee), DIAGONAL_TOL),
        eg: BlockCheck::new(dist(|s| &s.rho_eg), COHERENCE_TOL),
        ge: BlockCheck::new(dist(|s| &s.rho_ge), COHERENCE_TOL),
        gg: BlockCheck::new(dist(|s| &s.rho_gg), DIAGONAL_TOL),
    }
}

pub fn state_check(states: &[AtomFieldState], expected_trace: f64) -> StateCheck {
    use dispersive_core::blocks::{HERMITICITY_TOL, PSD_TOL, TRACE_TOL};
    let mut c = StateCheck { max_trace_drift: 0.0, max_hermiticity: 0.0, min_eigenvalue: f64::INFINITY, pass: true };
    for s in states {
        let d = s.diagnostics();
        c.max_trace_drift = c.max_trace_drift.max((d.trace - expected_trace).abs());
        c.max_hermiticity = c.max_hermiticity.max(d.max_hermiticity());
        c.min_eigenvalue = c.min_eigenvalue.min(d.min_eigenvalue);
    }
    c.pass = c.max_trace_drift <= TRACE_TOL && c.max_hermiticity <= HERMITICITY_TOL && c.min_eigenvalue >= -PSD_TOL;
    c
}

impl VerificationReport {
    pub fn finish(mut self) -> Self {
        self.all_pass = self.analytic_refused.is_none()
            && self.blocks.all_pass()
            && self.prefactor.pass
            && self.commutators.pass
            && self.state.pass;
        self
    }
}
