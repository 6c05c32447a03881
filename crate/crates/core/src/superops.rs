//! Superoperators acting on field matrices.
//!
//! All maps take a matrix and return a matrix; nothing is vectorized here.
//! The decay factors `exp_R`, `exp_L_decay` and `exp_J` are exact in the
//! Fock basis because `R` and `L` are diagonal on `|m⟩⟨n|` and `J` only
//! shifts both indices down by one.

use ndarray::Array2;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{adjoint, annihilation_matrix, FieldMatrix, Truncation};

const I: C64 = C64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuperopParams {
    pub chi: f64,
    pub gamma: f64,
}

impl SuperopParams {
    pub fn new(chi: f64, gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                reason: format!("decay rate must be finite and non-negative, got {gamma}"),
            });
        }
        if !chi.is_finite() {
            return Err(Error::InvalidParameter { name: "chi", reason: "not finite".into() });
        }
        Ok(Self { chi, gamma })
    }
}

fn map_entries(rho: &FieldMatrix, f: impl Fn(usize, usize) -> C64) -> FieldMatrix {
    Array2::from_shape_fn(rho.dim(), |(m, n)| f(m, n) * rho[[m, n]])
}

/// `Lρ = a†aρ + ρa†a`.
pub fn apply_l(rho: &FieldMatrix) -> FieldMatrix {
    map_entries(rho, |m, n| C64::new((m + n) as f64, 0.0))
}

/// `Jρ = 2aρa†`.
pub fn apply_j(rho: &FieldMatrix) -> FieldMatrix {
    let dim = rho.nrows();
    Array2::from_shape_fn(rho.dim(), |(m, n)| {
        if m + 1 < dim && n + 1 < dim {
            rho[[m + 1, n + 1]] * (2.0 * (((m + 1) * (n + 1)) as f64).sqrt())
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// The damping dissipator `γ(J − L)ρ`.
pub fn apply_lindblad(p: SuperopParams, rho: &FieldMatrix) -> FieldMatrix {
    (apply_j(rho) - apply_l(rho)) * p.gamma
}

/// `Rρ = −iχ[a†a, ρ]`, entrywise `−iχ(m−n)ρ_{mn}`.
pub fn apply_r(p: SuperopParams, rho: &FieldMatrix) -> FieldMatrix {
    map_entries(rho, |m, n| -I * p.chi * (m as f64 - n as f64))
}

/// Drive commutator `S(ε)ρ = −i[εa† + ε*a, ρ]`.
pub fn apply_s(eps: C64, rho: &FieldMatrix) -> FieldMatrix {
    let a = annihilation_matrix(Truncation::of(rho).expect("square field matrix"));
    let h = adjoint(&a) * eps + a * eps.conj();
    (h.dot(rho) - rho.dot(&h)) * (-I)
}

/// `S₁ρ = −2i(fρa† − f*aρ)`, the commutator `[J, S(f)]`.
pub fn apply_s1(f: C64, rho: &FieldMatrix) -> FieldMatrix {
    let a = annihilation_matrix(Truncation::of(rho).expect("square field matrix"));
    (rho.dot(&adjoint(&a)) * f - a.dot(rho) * f.conj()) * (-2.0 * I)
}

/// `e^{Rt}`: `ρ_{mn} → e^{−iχt(m−n)}ρ_{mn}`.
pub fn exp_r(p: SuperopParams, t: f64, rho: &FieldMatrix) -> FieldMatrix {
    map_entries(rho, |m, n| (-I * p.chi * t * (m as f64 - n as f64)).exp())
}

/// `e^{−γtL}`: `ρ_{mn} → e^{−γt(m+n)}ρ_{mn}`.
pub fn exp_l_decay(p: SuperopParams, t: f64, rho: &FieldMatrix) -> FieldMatrix {
    map_entries(rho, |m, n| C64::new((-p.gamma * t * (m + n) as f64).exp(), 0.0))
}

/// `e^{cJ}` as the finite sum
/// `ρ_{mn} → Σ_k (2c)^k/k! √[(m+k)!/m!] √[(n+k)!/n!] ρ_{m+k,n+k}`.
pub fn exp_j(c: C64, rho: &FieldMatrix) -> FieldMatrix {
    let dim = rho.nrows();
    Array2::from_shape_fn(rho.dim(), |(m, n)| {
        let mut acc = rho[[m, n]];
        let mut coeff = C64::new(1.0, 0.0);
        let mut k = 1;
        while m + k < dim && n + k < dim {
            coeff = coeff * (2.0 * c) / k as f64 * (((m + k) * (n + k)) as f64).sqrt();
            acc += coeff * rho[[m + k, n + k]];
            k += 1;
        }
        acc
    })
}

/// Coefficient of `J` in `e^{γt(J−L)} = e^{−γtL} e^{cJ}`.
pub fn disentangling_coefficient(gamma: f64, t: f64) -> f64 {
    -0.5 * (-2.0 * gamma * t).exp_m1()
}

/// `e^{(±R + 𝓛)t}ρ`, applied as `e^{±Rt} e^{−γtL} e^{cJ}` with
/// `c = (1 − e^{−2γt})/2`.
pub fn decay_propagator(p: SuperopParams, t: f64, sign: i8, rho: &FieldMatrix) -> FieldMatrix {
    let c = disentangling_coefficient(p.gamma, t);
    let signed = SuperopParams { chi: f64::from(sign.signum()) * p.chi, ..p };
    let jumped = exp_j(C64::new(c, 0.0), rho);
    exp_r(signed, t, &exp_l_decay(p, t, &jumped))
}
