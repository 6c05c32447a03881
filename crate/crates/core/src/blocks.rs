//! Closed-form propagation of the four density-matrix blocks.
//!
//! In the frame rotating with `ω/2 σ_z + χσ_ee + νa†a` the master equation
//! splits into one equation per atomic block:
//!
//! ```text
//! ρ̇_ee = [ R + S(f_ν) + 𝓛] ρ_ee        ρ̇_eg = [S(f_ν) + 𝓛 − iχL] ρ_eg
//! ρ̇_gg = [−R + S(f_ν) + 𝓛] ρ_gg        ρ̇_ge = [S(f_ν) + 𝓛 + iχL] ρ_ge
//! ```
//!
//! The diagonal blocks are a displacement followed by the decay propagator.
//! The coherence blocks go through the chain `ρ = e^{−(γ/2β)J} ρ⁽¹⁾`,
//! `ρ⁽²⁾ = e^{βta†a} ρ⁽¹⁾ e^{βta†a}`, after which left and right factors
//! decouple into products of nilpotent exponentials times a c-number.

use ndarray::{s, Array2};
use num_complex::Complex64 as C64;

use crate::drive::{
    coherence_integrals, magnus_scalar, modulated_integral, prefactor_integral_beta, DriveSpec,
    ModulatedIntegralRequest,
};
use crate::error::{Error, Result};
use crate::fock::{
    adjoint, displacement, exp_annihilation, exp_creation, frobenius_distance, hermiticity_residual, trace,
    FieldMatrix, FieldVector, Truncation,
};
pub use crate::model::ModelParams;
use crate::superops::{decay_propagator, exp_j};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Limit on `γ·t·n_max` for the coherence-block closed form.
pub const OVERFLOW_LIMIT: f64 = 60.0;

/// Value of `σ_ee = (1 − σ_z)/2` on `|e⟩` and `|g⟩` with `σ_z|e⟩ = +|e⟩`.
/// Taken literally this is the ground-state projector; it only affects the
/// atomic phase applied by [`to_lab_frame`].
pub const SIGMA_EE_ON_EXCITED: f64 = 0.0;
pub const SIGMA_EE_ON_GROUND: f64 = 1.0;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const PSD_TOL: f64 = 1e-8;

/// How the c-number produced by time ordering is evaluated in the coherence
/// block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PrefactorRoute {
    /// `e^{−∫(F₂G₁ + F₃G₄)}`.
    #[default]
    Literal,
    /// Second-order Magnus terms plus normal-ordering scalars.
    Magnus,
}

/// Full atom-field density operator as four field-space blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomFieldState {
    pub rho_ee: FieldMatrix,
    pub rho_eg: FieldMatrix,
    pub rho_ge: FieldMatrix,
    pub rho_gg: FieldMatrix,
}

/// Magnitudes of every invariant residual of a state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDiagnostics {
    pub trace: f64,
    pub hermiticity_ee: f64,
    pub hermiticity_gg: f64,
    pub adjoint_coupling: f64,
    pub min_eigenvalue: f64,
}

impl StateDiagnostics {
    pub fn max_hermiticity(&self) -> f64 {
        self.hermiticity_ee.max(self.hermiticity_gg).max(self.adjoint_coupling)
    }
}

impl AtomFieldState {
    /// `(c_e|e⟩ + c_g|g⟩) ⊗ |ψ⟩`.
    pub fn product(c_e: C64, c_g: C64, field: &FieldVector) -> Self {
        let proj = crate::fock::projector(field);
        Self {
            rho_ee: &proj * (c_e * c_e.conj()),
            rho_eg: &proj * (c_e * c_g.conj()),
            rho_ge: &proj * (c_g * c_e.conj()),
            rho_gg: &proj * (c_g * c_g.conj()),
        }
    }

    pub fn truncation(&self) -> Result<Truncation> {
        Truncation::of(&self.rho_ee)
    }

    pub fn block(&self, kind: crate::oracle::BlockKind) -> &FieldMatrix {
        use crate::oracle::BlockKind::*;
        match kind {
            Ee => &self.rho_ee,
            Eg => &self.rho_eg,
            Ge => &self.rho_ge,
            Gg => &self.rho_gg,
        }
    }

    pub fn total_trace(&self) -> C64 {
        trace(&self.rho_ee) + trace(&self.rho_gg)
    }

    /// The `2(n_max+1)`-dimensional matrix `[[ρ_ee, ρ_eg], [ρ_ge, ρ_gg]]`.
    pub fn assembled(&self) -> Array2<C64> {
        let d = self.rho_ee.nrows();
        let mut out = Array2::zeros((2 * d, 2 * d));
        out.slice_mut(s![..d, ..d]).assign(&self.rho_ee);
        out.slice_mut(s![..d, d..]).assign(&self.rho_eg);
        out.slice_mut(s![d.., ..d]).assign(&self.rho_ge);
        out.slice_mut(s![d.., d..]).assign(&self.rho_gg);
        out
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        let full = self.assembled();
        // symmetrize before the Hermitian solver; the asymmetry is reported separately
        let herm = (&full + &adjoint(&full)) * 0.5;
        let min_eigenvalue = crate::linalg::hermitian_eigenvalues(&herm).first().copied().unwrap_or(0.0);
        StateDiagnostics {
            trace: self.total_trace().re,
            hermiticity_ee: hermiticity_residual(&self.rho_ee),
            hermiticity_gg: hermiticity_residual(&self.rho_gg),
            adjoint_coupling: frobenius_distance(&self.rho_ge, &adjoint(&self.rho_eg)).unwrap_or(f64::INFINITY),
            min_eigenvalue,
        }
    }

    /// Check Hermiticity, adjoint coupling and positivity; when `expected_trace`
    /// is given, also the total trace.
    pub fn validate(&self, expected_trace: Option<f64>) -> Result<StateDiagnostics> {
        let d = self.diagnostics();
        let checks = [
            ("rho_ee hermitian", d.hermiticity_ee, HERMITICITY_TOL),
            ("rho_gg hermitian", d.hermiticity_gg, HERMITICITY_TOL),
            ("rho_ge = adjoint(rho_eg)", d.adjoint_coupling, HERMITICITY_TOL),
            ("positive semidefinite", (-d.min_eigenvalue).max(0.0), PSD_TOL),
        ];
        for (invariant, magnitude, tol) in checks {
            if !(magnitude <= tol) {
                return Err(Error::InvariantViolation { invariant, magnitude });
            }
        }
        if let Some(tr) = expected_trace {
            let drift = (d.trace - tr).abs();
            if !(drift <= TRACE_TOL) {
                return Err(Error::InvariantViolation { invariant: "trace preserved", magnitude: drift });
            }
        }
        Ok(d)
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter { name: "t", reason: format!("time must be finite and >= 0, got {t}") });
    }
    Ok(())
}

fn warn_overflow(g: C64, trunc: Truncation, which: &str) {
    if g.norm_sqr() > trunc.n_max() as f64 / 4.0 {
        log::warn!(
            "{which}: |G|^2 = {:.3} exceeds n_max/4 = {:.2}; displaced state may leave the truncation",
            g.norm_sqr(),
            trunc.n_max() as f64 / 4.0
        );
    }
}

/// `D(−iG) ρ D(−iG)† = D†(iG) ρ D(iG)`.
fn displace(rho: &FieldMatrix, g: C64, trunc: Truncation) -> FieldMatrix {
    if g == C64::new(0.0, 0.0) {
        return rho.clone();
    }
    let d = displacement(-I * g, trunc);
    d.dot(rho).dot(&adjoint(&d))
}

fn solve_diagonal(
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t: f64,
    sign: i8,
) -> Result<FieldMatrix> {
    check_time(t)?;
    let trunc = Truncation::of(rho0)?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    // g±(s) = f(s) e^{i(ν±χ)s + γs}
    let mu = C64::new(params.gamma, params.nu + f64::from(sign) * params.chi);
    let g = modulated_integral(&ModulatedIntegralRequest { spec: drive, mu, conjugate_f: false, t })?;
    warn_overflow(g, trunc, if sign > 0 { "rho_ee" } else { "rho_gg" });
    let displaced = displace(rho0, g, trunc);
    Ok(decay_propagator(params.superop(), t, sign, &displaced))
}

/// Excited-state block: `e^{(R+𝓛)t}[D†(iG₊) ρ₀ D(iG₊)]`, `G₊ = ∫₀ᵗ f e^{i(ν+χ)s+γs} ds`.
pub fn solve_rho_ee(params: &ModelParams, drive: &DriveSpec, rho0: &FieldMatrix, t: f64) -> Result<FieldMatrix> {
    solve_diagonal(params, drive, rho0, t, 1)
}

/// Ground-state block: as [`solve_rho_ee`] with `χ → −χ`.
pub fn solve_rho_gg(params: &ModelParams, drive: &DriveSpec, rho0: &FieldMatrix, t: f64) -> Result<FieldMatrix> {
    solve_diagonal(params, drive, rho0, t, -1)
}

/// Coherence block with generator `S(f_ν) + γJ − βL`.
fn solve_coherence(
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t: f64,
    beta: C64,
    route: PrefactorRoute,
) -> Result<FieldMatrix> {
    check_time(t)?;
    let trunc = Truncation::of(rho0)?;
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let gamma = params.gamma;
    let scale = gamma * t * trunc.n_max() as f64;
    if scale > OVERFLOW_LIMIT {
        return Err(Error::OverflowGuard { scale, limit: OVERFLOW_LIMIT });
    }

    if beta == C64::new(0.0, 0.0) {
        // γ = χ = 0: only the drive commutator is left
        let g = modulated_integral(&ModulatedIntegralRequest {
            spec: drive,
            mu: C64::new(0.0, params.nu),
            conjugate_f: false,
            t,
        })?;
        return Ok(displace(rho0, g, trunc));
    }

    // ρ⁽¹⁾(0) = e^{(γ/2β)J} ρ₀
    let c = gamma / (2.0 * beta);
    let rho1_0 = if gamma > 0.0 { exp_j(c, rho0) } else { rho0.clone() };

    let [g1, g2, g3, g4] = coherence_integrals(drive, params.nu, gamma, beta, t)?;
    warn_overflow(g1, trunc, "coherence G1");
    warn_overflow(g4, trunc, "coherence G4");
    let log_scalar = match route {
        PrefactorRoute::Literal => -prefactor_integral_beta(drive, params.nu, gamma, beta, t)?,
        PrefactorRoute::Magnus => magnus_scalar(drive, params.nu, gamma, beta, t)?,
    };

    // ρ⁽²⁾(t) = e^{−iG₁a†} e^{−iG₂a} ρ⁽¹⁾(0) e^{iG₃a†} e^{iG₄a}
    let left = exp_creation(-I * g1, trunc).dot(&exp_annihilation(-I * g2, trunc));
    let right = exp_creation(I * g3, trunc).dot(&exp_annihilation(I * g4, trunc));
    let rho2 = left.dot(&rho1_0).dot(&right);

    // ρ⁽¹⁾(t) = e^{−βta†a} ρ⁽²⁾ e^{−βta†a}, with the scalar folded into the same pass
    let rho1 =
        Array2::from_shape_fn(rho2.dim(), |(m, n)| (log_scalar - beta * t * (m + n) as f64).exp() * rho2[[m, n]]);

    Ok(if gamma > 0.0 { exp_j(-c, &rho1) } else { rho1 })
}

/// `ρ_eg(t)` with `β = γ + iχ` and the literal prefactor.
pub fn solve_rho_eg(params: &ModelParams, drive: &DriveSpec, rho0: &FieldMatrix, t: f64) -> Result<FieldMatrix> {
    solve_rho_eg_with(params, drive, rho0, t, PrefactorRoute::Literal)
}

pub fn solve_rho_eg_with(
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t: f64,
    route: PrefactorRoute,
) -> Result<FieldMatrix> {
    solve_coherence(params, drive, rho0, t, params.beta(), route)
}

/// `ρ_ge(t)`: the coherence solution with `β → β* = γ − iχ`.
pub fn solve_rho_ge(params: &ModelParams, drive: &DriveSpec, rho0: &FieldMatrix, t: f64) -> Result<FieldMatrix> {
    solve_rho_ge_with(params, drive, rho0, t, PrefactorRoute::Literal)
}

pub fn solve_rho_ge_with(
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t: f64,
    route: PrefactorRoute,
) -> Result<FieldMatrix> {
    solve_coherence(params, drive, rho0, t, params.beta().conj(), route)
}

/// Propagate all four blocks without validating the result.
pub fn evolve_blocks(
    params: &ModelParams,
    drive: &DriveSpec,
    state0: &AtomFieldState,
    t: f64,
    route: PrefactorRoute,
) -> Result<AtomFieldState> {
    let ((ee, gg), (eg, ge)) = rayon::join(
        || {
            rayon::join(
                || solve_rho_ee(params, drive, &state0.rho_ee, t),
                || solve_rho_gg(params, drive, &state0.rho_gg, t),
            )
        },
        || {
            rayon::join(
                || solve_rho_eg_with(params, drive, &state0.rho_eg, t, route),
                || solve_rho_ge_with(params, drive, &state0.rho_ge, t, route),
            )
        },
    );
    Ok(AtomFieldState { rho_ee: ee?, rho_eg: eg?, rho_ge: ge?, rho_gg: gg? })
}

/// Propagate all four blocks to `t` and re-validate the state invariants,
/// including trace preservation relative to `state0`.
pub fn evolve_state(
    params: &ModelParams,
    drive: &DriveSpec,
    state0: &AtomFieldState,
    t: f64,
) -> Result<AtomFieldState> {
    let out = evolve_blocks(params, drive, state0, t, PrefactorRoute::Literal)?;
    out.validate(Some(state0.total_trace().re))?;
    Ok(out)
}

fn phase_blocks(params: &ModelParams, state: &AtomFieldState, t: f64) -> AtomFieldState {
    let field = |rho: &FieldMatrix, atomic: C64| {
        Array2::from_shape_fn(rho.dim(), |(m, n)| {
            atomic * (-I * params.nu * t * (m as f64 - n as f64)).exp() * rho[[m, n]]
        })
    };
    let e_excited = 0.5 * params.omega + params.chi * SIGMA_EE_ON_EXCITED;
    let e_ground = -0.5 * params.omega + params.chi * SIGMA_EE_ON_GROUND;
    let atomic = (-I * (e_excited - e_ground) * t).exp();
    let one = C64::new(1.0, 0.0);
    AtomFieldState {
        rho_ee: field(&state.rho_ee, one),
        rho_eg: field(&state.rho_eg, atomic),
        rho_ge: field(&state.rho_ge, atomic.conj()),
        rho_gg: field(&state.rho_gg, one),
    }
}

/// Undo the rotating frame: `ϱ = e^{−iH₀t} ρ e^{iH₀t}` with
/// `H₀ = ω/2 σ_z + χσ_ee + νa†a`.
pub fn to_lab_frame(params: &ModelParams, state: &AtomFieldState, t: f64) -> AtomFieldState {
    phase_blocks(params, state, t)
}

/// Inverse of [`to_lab_frame`].
pub fn from_lab_frame(params: &ModelParams, state: &AtomFieldState, t: f64) -> AtomFieldState {
    phase_blocks(params, state, -t)
}
