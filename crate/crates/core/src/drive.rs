//! Time-dependent amplification amplitude `f(t)` and the modulated integrals
//! `∫ f(s) e^{μs} ds` that the closed-form block solutions are built from.
//!
//! All integrals are definite and start at `s = 0`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::quad::{adaptive_simpson, exprel, exprel_linear, gauss_legendre, DEFAULT_MAX_DEPTH, DEFAULT_TOL};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Tabulated drive, linearly interpolated between strictly increasing times.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledDrive {
    times: Vec<f64>,
    values: Vec<C64>,
}

impl SampledDrive {
    pub fn new(samples: Vec<(f64, C64)>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::InvalidParameter { name: "samples", reason: "need at least two samples".into() });
        }
        if samples.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter {
                name: "samples",
                reason: "sample times must be strictly increasing".into(),
            });
        }
        if samples.iter().any(|(t, v)| !t.is_finite() || !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter { name: "samples", reason: "non-finite sample".into() });
        }
        let (times, values) = samples.into_iter().unzip();
        Ok(Self { times, values })
    }

    pub fn samples(&self) -> impl Iterator<Item = (f64, C64)> + '_ {
        self.times.iter().copied().zip(self.values.iter().copied())
    }

    pub fn start(&self) -> f64 {
        self.times[0]
    }

    pub fn end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    fn check(&self, t: f64) -> Result<()> {
        if t < self.start() || t > self.end() || t.is_nan() {
            return Err(Error::DriveOutOfDomain { t, start: self.start(), end: self.end() });
        }
        Ok(())
    }

    fn segment(&self, t: f64) -> usize {
        // last index i with times[i] <= t, clamped to a valid segment start
        let i = self.times.partition_point(|&x| x <= t);
        i.saturating_sub(1).min(self.times.len() - 2)
    }

    fn eval(&self, t: f64) -> Result<C64> {
        self.check(t)?;
        let i = self.segment(t);
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let w = (t - t0) / (t1 - t0);
        Ok(self.values[i] * (1.0 - w) + self.values[i + 1] * w)
    }
}

/// Parametric complex drive amplitude.
#[derive(Clone, Debug, PartialEq)]
pub enum DriveSpec {
    /// `f(t) = f₀`.
    Constant {
        f0: C64,
    },
    /// `f(t) = f₀ e^{κt}`.
    Exponential {
        f0: C64,
        kappa: C64,
    },
    /// `f(t) = f₀ cos(Ωt + φ)`.
    Sinusoid {
        f0: C64,
        omega: f64,
        phase: f64,
    },
    PiecewiseLinear(SampledDrive),
}

impl DriveSpec {
    pub fn zero() -> Self {
        DriveSpec::Constant { f0: C64::new(0.0, 0.0) }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DriveSpec::Constant { f0 } | DriveSpec::Exponential { f0, .. } | DriveSpec::Sinusoid { f0, .. } => {
                f0.norm() == 0.0
            }
            DriveSpec::PiecewiseLinear(s) => s.values.iter().all(|v| v.norm() == 0.0),
        }
    }

    /// The same drive with its clock advanced by `t0`, so `shifted.eval(s) = self.eval(t0 + s)`.
    pub fn shifted(&self, t0: f64) -> Result<Self> {
        Ok(match self {
            DriveSpec::Constant { f0 } => DriveSpec::Constant { f0: *f0 },
            DriveSpec::Exponential { f0, kappa } => {
                DriveSpec::Exponential { f0: *f0 * (*kappa * t0).exp(), kappa: *kappa }
            }
            DriveSpec::Sinusoid { f0, omega, phase } => {
                DriveSpec::Sinusoid { f0: *f0, omega: *omega, phase: phase + omega * t0 }
            }
            DriveSpec::PiecewiseLinear(s) => {
                DriveSpec::PiecewiseLinear(SampledDrive::new(s.samples().map(|(t, v)| (t - t0, v)).collect())?)
            }
        })
    }

    /// Largest `|f|` over `[0, t_end]`, sampled.
    pub fn peak_magnitude(&self, t_end: f64) -> f64 {
        match self {
            DriveSpec::Constant { f0 } | DriveSpec::Sinusoid { f0, .. } => f0.norm(),
            DriveSpec::Exponential { f0, kappa } => f0.norm() * (kappa.re * t_end).exp().max(1.0),
            DriveSpec::PiecewiseLinear(s) => s.values.iter().map(|v| v.norm()).fold(0.0, f64::max),
        }
    }
}

/// `f(t)`.
pub fn eval_f(spec: &DriveSpec, t: f64) -> Result<C64> {
    Ok(match spec {
        DriveSpec::Constant { f0 } => *f0,
        DriveSpec::Exponential { f0, kappa } => *f0 * (*kappa * t).exp(),
        DriveSpec::Sinusoid { f0, omega, phase } => *f0 * (omega * t + phase).cos(),
        DriveSpec::PiecewiseLinear(s) => s.eval(t)?,
    })
}

/// Rotating-frame amplitude `f_ν(t) = f(t) e^{iνt}`.
pub fn eval_f_nu(spec: &DriveSpec, nu: f64, t: f64) -> Result<C64> {
    Ok(eval_f(spec, t)? * (I * nu * t).exp())
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulatedIntegralRequest<'a> {
    pub spec: &'a DriveSpec,
    pub mu: C64,
    pub conjugate_f: bool,
    pub t: f64,
}

/// `∫₀ᵗ f̃(s) e^{μs} ds` with `f̃ = f` or `f*`.
pub fn modulated_integral(req: &ModulatedIntegralRequest<'_>) -> Result<C64> {
    if req.t < 0.0 {
        return Err(Error::InvalidParameter { name: "t", reason: format!("negative end time {}", req.t) });
    }
    modulated_integral_range(req.spec, req.mu, req.conjugate_f, 0.0, req.t)
}

/// `∫ₐᵇ f̃(s) e^{μs} ds`: closed form for constant, exponential and
/// piecewise-linear drives, adaptive Simpson for sinusoids.
pub fn modulated_integral_range(spec: &DriveSpec, mu: C64, conjugate_f: bool, a: f64, b: f64) -> Result<C64> {
    let cj = |z: C64| if conjugate_f { z.conj() } else { z };
    let h = b - a;
    match spec {
        DriveSpec::Constant { f0 } => Ok(cj(*f0) * (mu * a).exp() * h * exprel(mu * h)),
        DriveSpec::Exponential { f0, kappa } => {
            let lambda = cj(*kappa) + mu;
            Ok(cj(*f0) * (lambda * a).exp() * h * exprel(lambda * h))
        }
        DriveSpec::Sinusoid { .. } => modulated_integral_quadrature(spec, mu, conjugate_f, a, b),
        DriveSpec::PiecewiseLinear(s) => {
            if h == 0.0 {
                return Ok(C64::new(0.0, 0.0));
            }
            s.check(a)?;
            s.check(b)?;
            let mut acc = C64::new(0.0, 0.0);
            let mut lo = a;
            while lo < b {
                let i = s.segment(lo);
                let hi = s.times[i + 1].min(b);
                if hi > lo {
                    let (fl, fh) = (cj(s.eval(lo)?), cj(s.eval(hi)?));
                    let w = hi - lo;
                    let z = mu * w;
                    // ∫₀ʷ (fl + (fh − fl) u/w) e^{μ(lo+u)} du
                    acc += (mu * lo).exp() * w * (fl * exprel(z) + (fh - fl) * exprel_linear(z));
                }
                if i + 2 >= s.times.len() && hi < b {
                    break;
                }
                lo = hi;
            }
            Ok(acc)
        }
    }
}

/// Always-quadrature path, used for sinusoids and as the cross-check of the
/// closed forms.
pub fn modulated_integral_quadrature(spec: &DriveSpec, mu: C64, conjugate_f: bool, a: f64, b: f64) -> Result<C64> {
    let integrand = |s: f64| {
        let f = eval_f(spec, s).unwrap_or(C64::new(f64::NAN, 0.0));
        let f = if conjugate_f { f.conj() } else { f };
        f * (mu * s).exp()
    };
    if let DriveSpec::PiecewiseLinear(sd) = spec {
        sd.check(a)?;
        sd.check(b)?;
    }
    adaptive_simpson(integrand, a, b, DEFAULT_TOL, DEFAULT_MAX_DEPTH)
}

/// One factor `F(s) = coef · f̃(s) · e^{μs}` of the coherence-block chain.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Modulated {
    pub coef: C64,
    pub conjugate_f: bool,
    pub mu: C64,
}

impl Modulated {
    pub fn eval(&self, spec: &DriveSpec, s: f64) -> Result<C64> {
        let f = eval_f(spec, s)?;
        let f = if self.conjugate_f { f.conj() } else { f };
        Ok(self.coef * f * (self.mu * s).exp())
    }

    pub fn integral(&self, spec: &DriveSpec, a: f64, b: f64) -> Result<C64> {
        if self.coef == C64::new(0.0, 0.0) {
            return Ok(self.coef);
        }
        Ok(self.coef * modulated_integral_range(spec, self.mu, self.conjugate_f, a, b)?)
    }
}

/// The four factors `F₁..F₄` of the coherence-block equation for a given
/// `β`, with `f_ν = f e^{iνt}`:
/// `F₁ = f_ν e^{βt}`, `F₂ = f_ν* e^{−βt}(1−γ/β)`, `F₃ = f_ν e^{−βt}(1−γ/β)`,
/// `F₄ = f_ν* e^{βt}`.
pub fn coherence_factors(nu: f64, gamma: f64, beta: C64) -> Result<[Modulated; 4]> {
    if beta == C64::new(0.0, 0.0) {
        return Err(Error::VanishingBeta);
    }
    let damp = C64::new(1.0, 0.0) - gamma / beta;
    let inu = I * nu;
    Ok([
        Modulated { coef: C64::new(1.0, 0.0), conjugate_f: false, mu: inu + beta },
        Modulated { coef: damp, conjugate_f: true, mu: -inu - beta },
        Modulated { coef: damp, conjugate_f: false, mu: inu - beta },
        Modulated { coef: C64::new(1.0, 0.0), conjugate_f: true, mu: -inu + beta },
    ])
}

/// `G_j(t) = ∫₀ᵗ F_j ds` for `j = 1..4`.
pub fn coherence_integrals(spec: &DriveSpec, nu: f64, gamma: f64, beta: C64, t: f64) -> Result<[C64; 4]> {
    let fs = coherence_factors(nu, gamma, beta)?;
    let mut out = [C64::new(0.0, 0.0); 4];
    for (g, f) in out.iter_mut().zip(fs.iter()) {
        *g = f.integral(spec, 0.0, t)?;
    }
    Ok(out)
}

const PANEL_ORDER: usize = 12;

fn panel_edges(spec: &DriveSpec, t: f64, rate: f64) -> Vec<f64> {
    let scale = match spec {
        DriveSpec::Sinusoid { omega, .. } => rate.max(omega.abs()),
        DriveSpec::Exponential { kappa, .. } => rate.max(kappa.norm()),
        _ => rate,
    }
    .max(1.0);
    let n = ((t * scale * 2.0).ceil() as usize).max(4);
    let mut edges: Vec<f64> = (0..=n).map(|k| t * k as f64 / n as f64).collect();
    if let DriveSpec::PiecewiseLinear(s) = spec {
        edges.extend(s.times.iter().copied().filter(|&x| x > 0.0 && x < t));
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        edges.dedup();
    }
    edges
}

/// `∫₀ᵗ outer(s) · [∫₀ˢ inner(u) du] ds` by panelled Gauss–Legendre, with the
/// inner integral carried forward from panel to panel.
pub fn nested_integral(spec: &DriveSpec, outer: Modulated, inner: Modulated, t: f64) -> Result<C64> {
    if t == 0.0 || outer.coef == C64::new(0.0, 0.0) || inner.coef == C64::new(0.0, 0.0) {
        return Ok(C64::new(0.0, 0.0));
    }
    let rate = outer.mu.norm().max(inner.mu.norm());
    let edges = panel_edges(spec, t, rate);
    let rule = gauss_legendre(PANEL_ORDER);
    let mut inner_at_edge = C64::new(0.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for &(x, wt) in &rule {
            let s = mid + half * x;
            let g = inner_at_edge + inner.integral(spec, lo, s)?;
            acc += outer.eval(spec, s)? * g * (wt * half);
        }
        inner_at_edge += inner.integral(spec, lo, hi)?;
    }
    Ok(acc)
}

/// `Φ(t) = ∫₀ᵗ [F₂ G₁ + F₃ G₄] ds`, the exponent of the scalar prefactor
/// `e^{−Φ}` of the coherence block.
pub fn prefactor_integral(spec: &DriveSpec, params: &ModelParams, t: f64) -> Result<C64> {
    prefactor_integral_beta(spec, params.nu, params.gamma, params.beta(), t)
}

pub fn prefactor_integral_beta(spec: &DriveSpec, nu: f64, gamma: f64, beta: C64, t: f64) -> Result<C64> {
    let [f1, f2, f3, f4] = coherence_factors(nu, gamma, beta)?;
    Ok(nested_integral(spec, f2, f1, t)? + nested_integral(spec, f3, f4, t)?)
}

/// Log of the c-number produced by time ordering, built from the second-order
/// Magnus terms plus the normal-ordering (BCH) scalars of both exponential
/// products. Mathematically equal to `−Φ(t)`.
pub fn magnus_scalar(spec: &DriveSpec, nu: f64, gamma: f64, beta: C64, t: f64) -> Result<C64> {
    let [f1, f2, f3, f4] = coherence_factors(nu, gamma, beta)?;
    let [g1, g2, g3, g4] = coherence_integrals(spec, nu, gamma, beta, t)?;
    // left product: Ω₂ = ½∫∫_{s'<s} (F₁(s)F₂(s') − F₂(s)F₁(s'))
    let omega_left = 0.5 * (nested_integral(spec, f1, f2, t)? - nested_integral(spec, f2, f1, t)?);
    // right product is anti-time-ordered, so its Ω₂ flips sign
    let omega_right = -0.5 * (nested_integral(spec, f3, f4, t)? - nested_integral(spec, f4, f3, t)?);
    Ok(-0.5 * g1 * g2 + omega_left - 0.5 * g3 * g4 + omega_right)
}
