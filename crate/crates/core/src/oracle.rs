//! Independent numerical reference for the block equations: explicit RK4 on
//! the matrix-valued right-hand side, and dense vectorized Liouvillians for
//! time-independent cases.

use ndarray::linalg::kron;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::drive::{eval_f_nu, DriveSpec};
use crate::error::{Error, Result};
use crate::fock::{annihilation_matrix, expm, frobenius_distance, identity, number_matrix, FieldMatrix, Truncation};
use crate::model::ModelParams;
use crate::superops::{apply_l, apply_lindblad, apply_r, apply_s};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest truncation for which a dense Liouvillian is built.
pub const LIOUVILLIAN_MAX_N: usize = 48;

/// Which density-matrix block, in the atomic basis `{e, g}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockKind {
    Ee,
    Gg,
    Eg,
    Ge,
}

impl BlockKind {
    pub const ALL: [BlockKind; 4] = [BlockKind::Ee, BlockKind::Eg, BlockKind::Ge, BlockKind::Gg];

    pub fn name(&self) -> &'static str {
        match self {
            BlockKind::Ee => "ee",
            BlockKind::Gg => "gg",
            BlockKind::Eg => "eg",
            BlockKind::Ge => "ge",
        }
    }

    /// Sign of `χ a†a` in the Hamiltonian acting from the left and from the
    /// right: `+1` for `|e⟩`, `−1` for `|g⟩`.
    fn sides(&self) -> (f64, f64) {
        match self {
            BlockKind::Ee => (1.0, 1.0),
            BlockKind::Gg => (-1.0, -1.0),
            BlockKind::Eg => (1.0, -1.0),
            BlockKind::Ge => (-1.0, 1.0),
        }
    }
}

/// Right-hand side of the block equation at time `t`:
/// `ee: R + S + 𝓛`, `gg: −R + S + 𝓛`, `eg: S + 𝓛 − iχL`, `ge: S + 𝓛 + iχL`.
pub fn apply_generator(
    kind: BlockKind,
    params: &ModelParams,
    drive: &DriveSpec,
    t: f64,
    rho: &FieldMatrix,
) -> Result<FieldMatrix> {
    let sp = params.superop();
    let f_nu = eval_f_nu(drive, params.nu, t)?;
    let mut out = apply_s(f_nu, rho) + apply_lindblad(sp, rho);
    match kind {
        BlockKind::Ee => out += &apply_r(sp, rho),
        BlockKind::Gg => out -= &apply_r(sp, rho),
        BlockKind::Eg => out -= &(apply_l(rho) * (I * params.chi)),
        BlockKind::Ge => out += &(apply_l(rho) * (I * params.chi)),
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct IntegratorConfig {
    /// Fixed step; `None` picks [`default_dt`].
    pub dt: Option<f64>,
    /// When set, the step is halved until two successive runs agree to this
    /// (Richardson-estimated) Frobenius error.
    pub tolerance: Option<f64>,
}

impl IntegratorConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self { dt: Some(dt), tolerance: None }
    }
}

/// `min(10⁻³, 1/(50·max(γ·n_max, |χ|·n_max, |f|·√(n_max+1))))`.
pub fn default_dt(params: &ModelParams, drive: &DriveSpec, trunc: Truncation, t_end: f64) -> f64 {
    let n = trunc.n_max() as f64;
    let scale = (params.gamma * n).max(params.chi.abs() * n).max(drive.peak_magnitude(t_end) * (n + 1.0).sqrt());
    if scale > 0.0 {
        (1.0 / (50.0 * scale)).min(1e-3)
    } else {
        1e-3
    }
}

fn rk4_fixed(
    kind: BlockKind,
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<FieldMatrix> {
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(rho0.clone());
    }
    let steps = (span / dt).ceil().max(1.0) as usize;
    let h = span / steps as f64;
    let mut rho = rho0.clone();
    for k in 0..steps {
        let t = t0 + h * k as f64;
        let k1 = apply_generator(kind, params, drive, t, &rho)?;
        let k2 = apply_generator(kind, params, drive, t + 0.5 * h, &(&rho + &(&k1 * (0.5 * h))))?;
        let k3 = apply_generator(kind, params, drive, t + 0.5 * h, &(&rho + &(&k2 * (0.5 * h))))?;
        let k4 = apply_generator(kind, params, drive, t + h, &(&rho + &(&k3 * h)))?;
        rho = rho + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        if rho.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { t: t + h });
        }
    }
    Ok(rho)
}

/// Integrate a block from `0` to `t_end`.
pub fn rk4_integrate(
    kind: BlockKind,
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t_end: f64,
    cfg: IntegratorConfig,
) -> Result<FieldMatrix> {
    rk4_integrate_from(kind, params, drive, rho0, 0.0, t_end, cfg)
}

/// Integrate a block from `t0` to `t1` with the drive clock running from `t0`.
pub fn rk4_integrate_from(
    kind: BlockKind,
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t0: f64,
    t1: f64,
    cfg: IntegratorConfig,
) -> Result<FieldMatrix> {
    if t1 < t0 {
        return Err(Error::InvalidParameter { name: "t_end", reason: format!("{t1} before start {t0}") });
    }
    let trunc = Truncation::of(rho0)?;
    let mut dt = cfg.dt.unwrap_or_else(|| default_dt(params, drive, trunc, t1));
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter { name: "dt", reason: format!("step must be positive, got {dt}") });
    }
    let mut rho = rk4_fixed(kind, params, drive, rho0, t0, t1, dt)?;
    if let Some(tol) = cfg.tolerance {
        for _ in 0..12 {
            dt *= 0.5;
            let finer = rk4_fixed(kind, params, drive, rho0, t0, t1, dt)?;
            let err = frobenius_distance(&finer, &rho)? / 15.0;
            rho = finer;
            if err <= tol {
                break;
            }
        }
    }
    Ok(rho)
}

/// Column-stacked `vec(ρ)`: index `m + n·dim`.
pub fn vectorize(rho: &FieldMatrix) -> Array1<C64> {
    rho.t().iter().copied().collect()
}

pub fn unvectorize(v: &Array1<C64>, trunc: Truncation) -> FieldMatrix {
    let d = trunc.dim();
    Array2::from_shape_fn((d, d), |(m, n)| v[m + n * d])
}

/// Dense matrix of the block generator at time `t`, acting on `vec(ρ)`.
///
/// Built from Kronecker products of the ladder matrices, independently of
/// the superoperator functions.
pub fn liouvillian_matrix(
    kind: BlockKind,
    params: &ModelParams,
    drive: &DriveSpec,
    t: f64,
    trunc: Truncation,
) -> Result<Array2<C64>> {
    if trunc.n_max() > LIOUVILLIAN_MAX_N {
        return Err(Error::LiouvillianTooLarge { n_max: trunc.n_max(), limit: LIOUVILLIAN_MAX_N });
    }
    let a = annihilation_matrix(trunc);
    let ad = a.t().mapv(|c| c.conj());
    let n = number_matrix(trunc);
    let eye = identity(trunc);
    let f_nu = eval_f_nu(drive, params.nu, t)?;
    let drive_h = &ad * f_nu + &a * f_nu.conj();
    let (left, right) = kind.sides();
    let h_left = &n * (left * params.chi) + &drive_h;
    let h_right = &n * (right * params.chi) + &drive_h;

    // vec(AρB) = (Bᵀ ⊗ A) vec(ρ)
    let mut out = kron(&eye, &h_left) * (-I) + kron(&h_right.t().to_owned(), &eye) * I;
    let a_conj = a.mapv(|c| c.conj());
    out = out + kron(&a_conj, &a) * (2.0 * params.gamma)
        - (kron(&eye, &n) + kron(&n.t().to_owned(), &eye)) * params.gamma;
    Ok(out)
}

/// `exp(𝓛 t) ρ` for a time-independent generator (the drive is frozen at its
/// `t = 0` value).
pub fn dense_propagate(
    kind: BlockKind,
    params: &ModelParams,
    drive: &DriveSpec,
    rho0: &FieldMatrix,
    t: f64,
) -> Result<FieldMatrix> {
    let trunc = Truncation::of(rho0)?;
    let l = liouvillian_matrix(kind, params, drive, 0.0, trunc)?;
    let prop = expm(&(l * t));
    Ok(unvectorize(&prop.dot(&vectorize(rho0)), trunc))
}
