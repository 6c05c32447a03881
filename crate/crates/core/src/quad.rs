//! Scalar quadrature for smooth complex integrands.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
///
/// The interval is pre-split into eight panels so that an oscillatory
/// integrand cannot fool the first error estimate.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<C64>
where
    F: Fn(f64) -> C64,
{
    if a == b {
        return Ok(C64::new(0.0, 0.0));
    }
    const PANELS: usize = 8;
    let h = (b - a) / PANELS as f64;
    let mut total = C64::new(0.0, 0.0);
    let mut worst: Option<f64> = None;
    for k in 0..PANELS {
        let lo = a + h * k as f64;
        let hi = if k + 1 == PANELS { b } else { lo + h };
        let (flo, fmid, fhi) = (f(lo), f(0.5 * (lo + hi)), f(hi));
        let whole = simpson(lo, hi, flo, fmid, fhi);
        total += recurse(&f, lo, hi, flo, fmid, fhi, whole, tol / PANELS as f64, max_depth, &mut worst);
    }
    match worst {
        Some(estimate) => Err(Error::QuadratureNonConvergence { a, b, tol, estimate }),
        None => Ok(total),
    }
}

fn simpson(a: f64, b: f64, fa: C64, fm: C64, fb: C64) -> C64 {
    (fa + fm * 4.0 + fb) * ((b - a) / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn recurse<F>(
    f: &F,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: u32,
    worst: &mut Option<f64>,
) -> C64
where
    F: Fn(f64) -> C64,
{
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    // rounding floor so tiny panels on large integrands can terminate
    let floor = 64.0 * f64::EPSILON * (left + right).norm();
    if delta.norm() <= 15.0 * tol.max(floor) {
        return left + right + delta / 15.0;
    }
    if depth == 0 {
        let est = delta.norm() / 15.0;
        *worst = Some(worst.map_or(est, |w| w.max(est)));
        return left + right + delta / 15.0;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, worst)
        + recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, worst)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let n = order;
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `(e^z − 1)/z`, accurate near zero.
pub fn exprel(z: C64) -> C64 {
    if z.norm() < 0.5 {
        // Σ z^k/(k+1)!
        let mut term = C64::new(1.0, 0.0);
        let mut acc = term;
        for k in 1..30 {
            term = term * z / (k + 1) as f64;
            acc += term;
        }
        acc
    } else {
        (z.exp() - 1.0) / z
    }
}

/// `∫₀¹ v e^{zv} dv = (e^z(z − 1) + 1)/z²`, accurate near zero.
pub fn exprel_linear(z: C64) -> C64 {
    if z.norm() < 0.5 {
        // Σ z^k/(k!(k+2))
        let mut fact = C64::new(1.0, 0.0);
        let mut acc = C64::new(0.5, 0.0);
        for k in 1..30 {
            fact = fact * z / k as f64;
            acc += fact / (k + 2) as f64;
        }
        acc
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}
