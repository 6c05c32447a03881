//! Truncated Fock-space linear algebra.
//!
//! Every operator lives on the levels `|0⟩ .. |n_max⟩`. Ladder operators are
//! the usual truncations, so `[a, a†]` equals the identity everywhere except
//! the last diagonal entry, which picks up `-n_max`.

use ndarray::{Array1, Array2, Zip};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Dense complex matrix over the truncated Fock basis, indexed `(m, n)`.
pub type FieldMatrix = Array2<C64>;

/// Complex amplitudes over the truncated Fock basis.
pub type FieldVector = Array1<C64>;

/// Default highest retained Fock level.
pub const DEFAULT_N_MAX: usize = 32;

/// Squared-norm deficit above which a truncated state is reported as lossy.
pub const TRUNCATION_LOSS_WARN: f64 = 1e-10;

/// Highest retained Fock level. Matrices built from it are `(n_max+1)²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Truncation {
    n_max: usize,
}

impl Truncation {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::InvalidTruncation(n_max));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// Recover the truncation of a square field matrix.
    pub fn of(m: &FieldMatrix) -> Result<Self> {
        let (r, c) = m.dim();
        if r != c {
            return Err(Error::DimensionMismatch { left: r, right: c });
        }
        Self::new(r.saturating_sub(1))
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self { n_max: DEFAULT_N_MAX }
    }
}

pub fn identity(trunc: Truncation) -> FieldMatrix {
    Array2::eye(trunc.dim())
}

pub fn zeros(trunc: Truncation) -> FieldMatrix {
    Array2::zeros((trunc.dim(), trunc.dim()))
}

/// `a` with `a_{n-1, n} = √n`.
pub fn annihilation_matrix(trunc: Truncation) -> FieldMatrix {
    let mut a = zeros(trunc);
    for n in 1..trunc.dim() {
        a[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

pub fn creation_matrix(trunc: Truncation) -> FieldMatrix {
    adjoint(&annihilation_matrix(trunc))
}

/// `a†a`, diagonal with entries `0, 1, .., n_max`.
pub fn number_matrix(trunc: Truncation) -> FieldMatrix {
    Array2::from_diag(&Array1::from_iter((0..trunc.dim()).map(|n| C64::new(n as f64, 0.0))))
}

/// Fock-parity operator `(-1)^{a†a}`.
pub fn parity_matrix(trunc: Truncation) -> FieldMatrix {
    Array2::from_diag(&Array1::from_iter((0..trunc.dim()).map(|n| {
        if n % 2 == 0 {
            C64::new(1.0, 0.0)
        } else {
            C64::new(-1.0, 0.0)
        }
    })))
}

pub fn fock_state(n: usize, trunc: Truncation) -> Result<FieldVector> {
    if n > trunc.n_max() {
        return Err(Error::FockLevelOutOfRange { n, n_max: trunc.n_max() });
    }
    let mut v = Array1::zeros(trunc.dim());
    v[n] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Coherent state amplitudes `e^{-|α|²/2} αⁿ/√(n!)`, not renormalized.
///
/// Logs a warning when the retained squared norm falls short of one by more
/// than [`TRUNCATION_LOSS_WARN`].
pub fn coherent_state(alpha: C64, trunc: Truncation) -> FieldVector {
    let v = coherent_amplitudes(alpha, trunc);
    let loss = truncation_loss(&v);
    if loss > TRUNCATION_LOSS_WARN {
        log::warn!("coherent state alpha={alpha} loses {loss:.3e} of its norm at n_max={}", trunc.n_max());
    }
    v
}

/// The same amplitudes as [`coherent_state`] without the truncation check,
/// for use as a probe vector where only the retained levels matter.
pub fn coherent_amplitudes(alpha: C64, trunc: Truncation) -> FieldVector {
    let mut v = Array1::zeros(trunc.dim());
    let mut amp = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    v[0] = amp;
    for n in 1..trunc.dim() {
        amp = amp * alpha / (n as f64).sqrt();
        v[n] = amp;
    }
    v
}

/// `1 - ‖v‖²`.
pub fn truncation_loss(v: &FieldVector) -> f64 {
    1.0 - v.iter().map(|c| c.norm_sqr()).sum::<f64>()
}

/// `|ψ⟩⟨φ|`.
pub fn outer(ket: &FieldVector, bra: &FieldVector) -> FieldMatrix {
    Array2::from_shape_fn((ket.len(), bra.len()), |(m, n)| ket[m] * bra[n].conj())
}

pub fn projector(psi: &FieldVector) -> FieldMatrix {
    outer(psi, psi)
}

/// `|m⟩⟨n|`.
pub fn ket_bra(m: usize, n: usize, trunc: Truncation) -> Result<FieldMatrix> {
    Ok(outer(&fock_state(m, trunc)?, &fock_state(n, trunc)?))
}

pub fn adjoint(m: &FieldMatrix) -> FieldMatrix {
    m.t().mapv(|c| c.conj())
}

pub fn trace(m: &FieldMatrix) -> C64 {
    m.diag().sum()
}

/// Square root of the summed squared magnitudes of `m1 - m2`.
pub fn frobenius_distance(m1: &FieldMatrix, m2: &FieldMatrix) -> Result<f64> {
    if m1.dim() != m2.dim() {
        return Err(Error::DimensionMismatch { left: m1.nrows(), right: m2.nrows() });
    }
    let mut acc = 0.0;
    Zip::from(m1).and(m2).for_each(|x, y| acc += (x - y).norm_sqr());
    Ok(acc.sqrt())
}

pub fn frobenius_norm(m: &FieldMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖m - m†‖_F`.
pub fn hermiticity_residual(m: &FieldMatrix) -> f64 {
    frobenius_norm(&(m - &adjoint(m)))
}

pub fn commutator(x: &FieldMatrix, y: &FieldMatrix) -> FieldMatrix {
    x.dot(y) - y.dot(x)
}

/// Zero every entry with a row or column index above `n_keep`.
pub fn restrict_support(m: &FieldMatrix, n_keep: usize) -> FieldMatrix {
    let mut out = m.clone();
    out.indexed_iter_mut().for_each(|((r, c), v)| {
        if r > n_keep || c > n_keep {
            *v = C64::new(0.0, 0.0);
        }
    });
    out
}

fn one_norm(m: &FieldMatrix) -> f64 {
    m.columns().into_iter().map(|col| col.iter().map(|c| c.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Dense matrix exponential by scaling and squaring a Taylor polynomial.
///
/// The argument is scaled so its 1-norm is at most 1/4; an 18-term Taylor
/// series then leaves a truncation error far below double precision.
pub fn expm(m: &Array2<C64>) -> Array2<C64> {
    const TERMS: usize = 18;
    let n = m.nrows();
    let norm = one_norm(m);
    let squarings = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = m.mapv(|c| c / 2f64.powi(squarings));

    // Horner: I + X(I + X/2(I + X/3(...)))
    let eye = Array2::<C64>::eye(n);
    let mut acc = eye.clone();
    for k in (1..=TERMS).rev() {
        acc = &eye + &(scaled.dot(&acc) / k as f64);
    }
    for _ in 0..squarings {
        acc = acc.dot(&acc);
    }
    acc
}

/// Glauber displacement `D(α) = exp(αa† − α*a)` on the truncated space.
pub fn displacement(alpha: C64, trunc: Truncation) -> FieldMatrix {
    let a = annihilation_matrix(trunc);
    let ad = adjoint(&a);
    let generator = ad * alpha - a * alpha.conj();
    expm(&generator)
}

/// `exp(c a)` as an exact finite sum: `a` is nilpotent on the truncated space.
///
/// Entry `(m, n)` with `n ≥ m` is `c^{n-m}/(n-m)! · √(n!/m!)`.
pub fn exp_annihilation(c: C64, trunc: Truncation) -> FieldMatrix {
    let dim = trunc.dim();
    let mut out = zeros(trunc);
    for n in 0..dim {
        // walk down from the diagonal: k = n - m
        let mut coeff = C64::new(1.0, 0.0);
        out[[n, n]] = coeff;
        for k in 1..=n {
            let m = n - k;
            // c^k/k! √(n!/m!) from the k-1 term
            coeff = coeff * c / k as f64 * ((m + 1) as f64).sqrt();
            out[[m, n]] = coeff;
        }
    }
    out
}

/// `exp(c a†)`, the transpose of [`exp_annihilation`].
pub fn exp_creation(c: C64, trunc: Truncation) -> FieldMatrix {
    exp_annihilation(c, trunc).reversed_axes()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr(n: usize) -> Truncation {
        Truncation::new(n).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn truncation_rejects_zero() {
        assert!(Truncation::new(0).is_err());
        assert_eq!(Truncation::default().n_max(), 32);
    }

    #[test]
    fn annihilation_entries() {
        let a = annihilation_matrix(tr(2));
        assert_eq!(a[[0, 1]], c(1.0, 0.0));
        assert!((a[[1, 2]].re - std::f64::consts::SQRT_2).abs() < 1e-8);
        let nonzero = a.iter().filter(|v| v.norm() > 0.0).count();
        assert_eq!(nonzero, 2);
    }

    #[test]
    fn number_operator_is_diagonal() {
        let t = tr(5);
        let a = annihilation_matrix(t);
        let n = adjoint(&a).dot(&a);
        for ((r, col), v) in n.indexed_iter() {
            let expect = if r == col { r as f64 } else { 0.0 };
            // √n·√n rounds to within a couple of ulp of n
            assert!((v - c(expect, 0.0)).norm() <= 4.0 * f64::EPSILON * expect.max(1.0));
        }
        assert!(frobenius_distance(&n, &number_matrix(t)).unwrap() < 1e-14);
    }

    #[test]
    fn truncated_commutator_edge() {
        let t = tr(4);
        let a = annihilation_matrix(t);
        let comm = commutator(&a, &adjoint(&a));
        for ((r, col), v) in comm.indexed_iter() {
            let expect = match (r, col) {
                (4, 4) => -4.0,
                (r, col) if r == col => 1.0,
                _ => 0.0,
            };
            assert!((v - c(expect, 0.0)).norm() < 1e-14, "({r},{col}) = {v}");
        }
    }

    #[test]
    fn fock_states() {
        let t = tr(6);
        let v0 = fock_state(0, t).unwrap();
        assert_eq!(v0[0], c(1.0, 0.0));
        assert_eq!(v0.iter().filter(|x| x.norm() > 0.0).count(), 1);
        let v3 = fock_state(3, t).unwrap();
        let n = number_matrix(t);
        let mean = v3.mapv(|x| x.conj()).dot(&n.dot(&v3));
        assert_eq!(mean, c(3.0, 0.0));
        assert_eq!(v0.mapv(|x| x.conj()).dot(&v3), c(0.0, 0.0));
        assert!(matches!(fock_state(7, t), Err(Error::FockLevelOutOfRange { .. })));
    }

    #[test]
    fn coherent_state_values() {
        let t = tr(20);
        assert_eq!(coherent_state(c(0.0, 0.0), t), fock_state(0, t).unwrap());
        let v = coherent_state(c(1.0, 0.0), t);
        assert!((v[0].re - 0.60653066).abs() < 1e-8);
        // brute-force ⟨n⟩
        let mean: f64 = v.iter().enumerate().map(|(n, x)| n as f64 * x.norm_sqr()).sum();
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coherent_state_truncation_convergence() {
        let alpha = c(0.9, -0.6);
        let small = coherent_state(alpha, tr(24));
        let big = coherent_state(alpha, tr(48));
        for n in 0..25 {
            assert!((small[n] - big[n]).norm() < 1e-12);
        }
    }

    #[test]
    fn displacement_of_vacuum_is_coherent() {
        let t = tr(30);
        let alpha = c(0.7, 0.3);
        let d = displacement(alpha, t);
        let from_d = d.dot(&fock_state(0, t).unwrap());
        let direct = coherent_state(alpha, t);
        for n in 0..=15 {
            assert!((from_d[n] - direct[n]).norm() < 1e-10, "level {n}");
        }
    }

    #[test]
    fn displacement_identity_and_inverse() {
        let t = tr(30);
        let d0 = displacement(c(0.0, 0.0), t);
        assert!(frobenius_distance(&d0, &identity(t)).unwrap() < 1e-15);
        let alpha = c(0.7, 0.3);
        let prod = displacement(alpha, t).dot(&displacement(-alpha, t));
        let low = restrict_support(&(prod - identity(t)), 15);
        assert!(frobenius_norm(&low) < 1e-10);
    }

    #[test]
    fn displacement_unitary_on_low_levels() {
        let t = tr(32);
        let alpha = c(-0.8, 1.1);
        let d = displacement(alpha, t);
        let keep = 32 - (4.0 * alpha.norm_sqr()).ceil() as usize;
        let resid = restrict_support(&(adjoint(&d).dot(&d) - identity(t)), keep);
        assert!(frobenius_norm(&resid) < 1e-8);
    }

    #[test]
    fn nilpotent_exponentials_match_expm() {
        let t = tr(10);
        let z = c(0.4, -0.9);
        let a = annihilation_matrix(t);
        let e1 = expm(&(&a * z));
        assert!(frobenius_distance(&e1, &exp_annihilation(z, t)).unwrap() < 1e-12);
        let e2 = expm(&(&creation_matrix(t) * z));
        assert!(frobenius_distance(&e2, &exp_creation(z, t)).unwrap() < 1e-12);
    }

    #[test]
    fn matrix_utilities() {
        let t = tr(3);
        assert_eq!(trace(&identity(t)), c(4.0, 0.0));
        let m = Array2::from_shape_fn((4, 4), |(r, k)| c(r as f64, k as f64 * 0.5 - 1.0));
        assert_eq!(frobenius_distance(&m, &m).unwrap(), 0.0);
        assert_eq!(adjoint(&adjoint(&m)), m);
        let other = zeros(tr(4));
        assert!(matches!(frobenius_distance(&m, &other), Err(Error::DimensionMismatch { .. })));
    }
}
