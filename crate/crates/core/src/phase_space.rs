//! Scalar observables and phase-space quasiprobabilities.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::blocks::AtomFieldState;
use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, trace, FieldMatrix, Truncation};

/// Imaginary residue tolerated on a quasiprobability before it is discarded.
pub const REALITY_TOL: f64 = 1e-10;

pub fn mean_photon(rho: &FieldMatrix) -> f64 {
    rho.diag().iter().enumerate().map(|(n, v)| n as f64 * v.re).sum()
}

/// `tr ρ²`.
pub fn purity(rho: &FieldMatrix) -> f64 {
    // tr(ρρ) = Σ ρ_mn ρ_nm
    rho.indexed_iter().map(|((m, n), v)| (v * rho[[n, m]]).re).sum()
}

/// Photon number of the full state, `tr[a†a (ρ_ee + ρ_gg)]`.
pub fn state_mean_photon(state: &AtomFieldState) -> f64 {
    mean_photon(&state.rho_ee) + mean_photon(&state.rho_gg)
}

/// Purity of the full atom-field state.
pub fn state_purity(state: &AtomFieldState) -> f64 {
    purity(&state.assembled())
}

/// `tr ρ_ee − tr ρ_gg`.
pub fn atomic_inversion(state: &AtomFieldState) -> f64 {
    (trace(&state.rho_ee) - trace(&state.rho_gg)).re
}

/// `|tr ρ_eg|`.
pub fn coherence_magnitude(state: &AtomFieldState) -> f64 {
    trace(&state.rho_eg).norm()
}

/// Rectangular grid of phase-space points. `values[[i_im, i_re]]` holds the
/// value at `re_min + i_re·Δre + i(im_min + i_im·Δim)`, so row-major order is
/// by `(im, re)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseSpaceGrid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
    pub values: Array2<f64>,
}

impl PhaseSpaceGrid {
    /// An all-zero grid after checking bounds and counts.
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64, n_re: usize, n_im: usize) -> Result<Self> {
        if !(re_min < re_max) || !(im_min < im_max) {
            return Err(Error::InvalidParameter {
                name: "bounds",
                reason: format!(
                    "need re_min < re_max and im_min < im_max, got [{re_min}, {re_max}] x [{im_min}, {im_max}]"
                ),
            });
        }
        if n_re < 2 || n_im < 2 {
            return Err(Error::InvalidParameter {
                name: "resolution",
                reason: format!("need at least 2 points per axis, got {n_re} x {n_im}"),
            });
        }
        Ok(Self { re_min, re_max, im_min, im_max, n_re, n_im, values: Array2::zeros((n_im, n_re)) })
    }

    pub fn point(&self, i_re: usize, i_im: usize) -> C64 {
        let re = self.re_min + (self.re_max - self.re_min) * i_re as f64 / (self.n_re - 1) as f64;
        let im = self.im_min + (self.im_max - self.im_min) * i_im as f64 / (self.n_im - 1) as f64;
        C64::new(re, im)
    }

    fn filled<F>(&self, f: F) -> Self
    where
        F: Fn(C64) -> C64 + Sync,
    {
        let raw: Vec<C64> =
            (0..self.n_re * self.n_im).into_par_iter().map(|k| f(self.point(k % self.n_re, k / self.n_re))).collect();
        let worst = raw.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if worst > REALITY_TOL {
            log::warn!("quasiprobability has imaginary residue {worst:.3e}");
        }
        let values = Array2::from_shape_vec((self.n_im, self.n_re), raw.into_iter().map(|z| z.re).collect())
            .expect("grid shape");
        Self { values, ..self.clone() }
    }
}

/// Complex-valued `Q(β) = ⟨β|ρ|β⟩/π` at one point, before the real part is taken.
///
/// Exact for any `β`: `ρ` lives on the retained levels, so only those
/// amplitudes of `|β⟩` contribute.
pub fn husimi_q_point(rho: &FieldMatrix, beta: C64) -> C64 {
    let trunc = Truncation::of(rho).expect("square field matrix");
    let ket = coherent_amplitudes(beta, trunc);
    let bra = ket.mapv(|c| c.conj());
    bra.dot(&rho.dot(&ket)) / PI
}

pub fn husimi_q(rho: &FieldMatrix, grid: &PhaseSpaceGrid) -> PhaseSpaceGrid {
    grid.filled(|beta| husimi_q_point(rho, beta))
}

/// Matrix elements `⟨n|D(β)|m⟩` of the untruncated displacement for
/// `n, m < dim`, from the ladder relations `aD = D(a + β)` and
/// `a†D = D(a† + β*)`.
pub fn displacement_elements(beta: C64, dim: usize) -> Array2<C64> {
    let mut d = Array2::<C64>::zeros((dim, dim));
    d[[0, 0]] = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for m in 1..dim {
        d[[0, m]] = -beta.conj() * d[[0, m - 1]] / (m as f64).sqrt();
    }
    for n in 0..dim - 1 {
        let scale = 1.0 / ((n + 1) as f64).sqrt();
        d[[n + 1, 0]] = beta * d[[n, 0]] * scale;
        for m in 1..dim {
            d[[n + 1, m]] = ((m as f64).sqrt() * d[[n, m - 1]] + beta * d[[n, m]]) * scale;
        }
    }
    d
}

/// `W(α) = (2/π) tr[ρ D(α) P D†(α)]`, evaluated as `(2/π) tr[ρ D(2α) P]`.
pub fn wigner_point(rho: &FieldMatrix, alpha: C64) -> C64 {
    let dim = rho.nrows();
    let d = displacement_elements(2.0 * alpha, dim);
    let mut acc = C64::new(0.0, 0.0);
    for ((m, n), r) in rho.indexed_iter() {
        // (D(2α)P)_{nm} = (−1)^m ⟨n|D(2α)|m⟩
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        acc += r * d[[n, m]] * sign;
    }
    acc * (2.0 / PI)
}

pub fn wigner(rho: &FieldMatrix, grid: &PhaseSpaceGrid) -> PhaseSpaceGrid {
    grid.filled(|alpha| wigner_point(rho, alpha))
}
