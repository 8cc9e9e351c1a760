//! The `N`-dimensional Mehler kernel
//!
//! ```text
//! g(x,t,y) = (lambda / (2 pi sinh(lambda t)))^{N/2}
//!            exp[-lambda (cosh(lambda t)(|x|^2+|y|^2) - 2<x,y>) / (2 sinh(lambda t))]
//! ```
//!
//! together with its Hermite series and numerical certificates that it is
//! the Green function of `d_t u = (1/2) Lap u - (lambda^2 |x|^2 / 2) u`.

use std::f64::consts::PI;

use crate::error::{check_dim, domain, Result};
use crate::hyperbolic::{coth, csch, ln_sinh};
use crate::params::HarmonicParams;
use crate::quadrature::GaussHermite;
use crate::special_functions::{fill_hermite, HERMITE_UNIFORM_BOUND, MAX_AXIS_DEGREE};

/// Default per-axis truncation of the Hermite series.
pub const DEFAULT_TRUNCATION: usize = 80;

/// The kernel at a fixed time with all time-dependent constants precomputed.
///
/// The exponent is evaluated as
/// `-(lambda/2) [tanh(lambda t / 2)(|x|^2+|y|^2) + csch(lambda t)|x-y|^2]`,
/// which equals the printed form but has no cancellation, and the prefactor
/// goes through `ln sinh`, so `lambda t` may be as large as ~700 and beyond.
#[derive(Debug, Clone, Copy)]
pub struct MehlerKernel {
    dim: usize,
    lambda: f64,
    time: f64,
    log_prefactor: f64,
    diag_coef: f64,
    diff_coef: f64,
}

impl MehlerKernel {
    pub fn new(params: &HarmonicParams, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return domain(format!("kernel time must be positive, got {t}"));
        }
        let lambda = params.lambda;
        let u = lambda * t;
        let n = params.dim as f64;
        let log_prefactor = 0.5 * n * (lambda.ln() - (2.0 * PI).ln() - ln_sinh(u));
        let tanh_half = -(-u).exp_m1() / (1.0 + (-u).exp());
        Ok(Self {
            dim: params.dim,
            lambda,
            time: t,
            log_prefactor,
            diag_coef: 0.5 * lambda * tanh_half,
            diff_coef: 0.5 * lambda * csch(u),
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `ln g(x,t,y)` without dimension checks.
    pub fn ln_eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut norms = 0.0;
        let mut diff = 0.0;
        for (a, b) in x.iter().zip(y) {
            norms += a * a + b * b;
            diff += (a - b) * (a - b);
        }
        self.log_prefactor - self.diag_coef * norms - self.diff_coef * diff
    }

    pub fn ln_eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        check_dim(self.dim, y.len())?;
        Ok(self.ln_eval_unchecked(x, y))
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        Ok(self.ln_eval(x, y)?.exp())
    }

    pub(crate) fn eval_unchecked(&self, x: &[f64], y: &[f64]) -> f64 {
        self.ln_eval_unchecked(x, y).exp()
    }

    /// Natural length scale of the kernel in its integration variable.
    pub fn length_scale(&self) -> f64 {
        (1.0 / self.lambda).sqrt().min((2.0 * self.time).sqrt())
    }
}

/// `ln g(x,t,y)`.
pub fn log_mehler(x: &[f64], t: f64, y: &[f64], p: &HarmonicParams) -> Result<f64> {
    MehlerKernel::new(p, t)?.ln_eval(x, y)
}

/// Closed-form kernel `g(x,t,y)`.
pub fn mehler_closed(x: &[f64], t: f64, y: &[f64], p: &HarmonicParams) -> Result<f64> {
    Ok(log_mehler(x, t, y, p)?.exp())
}

/// A truncated Hermite series together with rigorous error allowances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    /// Bound on the neglected terms, from the uniform Hermite bound and the
    /// geometric decay `e^{-(m+1/2) lambda t}`. Decreasing in `M` and `t`.
    pub truncation_bound: f64,
    /// Allowance for floating-point rounding in the summation.
    pub rounding_bound: f64,
}

impl SeriesValue {
    /// `truncation_bound + rounding_bound`.
    pub fn error_bound(&self) -> f64 {
        self.truncation_bound + self.rounding_bound
    }
}

/// Per-axis truncation bound `B^2 sqrt(lambda) e^{-(M+3/2) u} / (1 - e^{-u})`.
pub(crate) fn axis_tail_bound(lambda: f64, u: f64, truncation: usize) -> f64 {
    HERMITE_UNIFORM_BOUND.powi(2) * lambda.sqrt() * (-(truncation as f64 + 1.5) * u).exp() / -(-u).exp_m1()
}

/// Truncated expansion `sum_{m_j <= M} e^{-(|m| + N/2) lambda t} prod_j h_{m_j}(x_j) h_{m_j}(y_j)`,
/// evaluated as a product of one-dimensional partial sums.
pub fn mehler_series(x: &[f64], t: f64, y: &[f64], p: &HarmonicParams, truncation: usize) -> Result<SeriesValue> {
    check_dim(p.dim, x.len())?;
    check_dim(p.dim, y.len())?;
    if !(t.is_finite() && t > 0.0) {
        return domain(format!("series time must be positive, got {t}"));
    }
    if truncation > MAX_AXIS_DEGREE {
        return domain(format!("truncation {truncation} exceeds {MAX_AXIS_DEGREE}"));
    }
    let lambda = p.lambda;
    let u = lambda * t;
    let root_l = lambda.sqrt();
    let mut hx = vec![0.0; truncation + 1];
    let mut hy = vec![0.0; truncation + 1];
    let tail = axis_tail_bound(lambda, u, truncation);

    let mut value = 1.0;
    let mut with_tail = 1.0;
    let mut abs_value = 1.0;
    let mut abs_sum_product = 1.0;
    for (&xj, &yj) in x.iter().zip(y) {
        fill_hermite(root_l * xj, &mut hx);
        fill_hermite(root_l * yj, &mut hy);
        let mut sum = 0.0;
        let mut abs_sum = 0.0;
        for m in 0..=truncation {
            // lambda^{1/4} squared from the two scaled factors
            let term = (-(m as f64 + 0.5) * u).exp() * root_l * hx[m] * hy[m];
            sum += term;
            abs_sum += term.abs();
        }
        value *= sum;
        abs_value *= sum.abs();
        with_tail *= sum.abs() + tail;
        abs_sum_product *= abs_sum;
    }
    let rounding = 16.0 * (truncation as f64 + 2.0) * p.dim as f64 * f64::EPSILON * abs_sum_product;
    Ok(SeriesValue {
        value,
        truncation_bound: with_tail - abs_value,
        rounding_bound: rounding,
    })
}

/// Gauss-Hermite length scale for integrals of `g(., s, z) g(z, t, .)` over `z`.
fn composition_scale(lambda: f64, s: f64, t: f64) -> f64 {
    (1.0 / lambda).sqrt().min((2.0 * s * t / (s + t)).sqrt())
}

/// Relative residual `|int g(x,s,z) g(z,t,y) dz - g(x,s+t,y)| / g(x,s+t,y)`,
/// the integral taken by tensor Gauss-Hermite quadrature.
pub fn semigroup_residual(x: &[f64], s: f64, t: f64, y: &[f64], p: &HarmonicParams, quad_order: usize) -> Result<f64> {
    let rule = GaussHermite::new(quad_order)?;
    let first = MehlerKernel::new(p, s)?;
    let second = MehlerKernel::new(p, t)?;
    let direct = MehlerKernel::new(p, s + t)?.ln_eval(x, y)?;
    check_dim(p.dim, y.len())?;
    // centre on the straight-line interpolant between the endpoints
    let center: Vec<f64> = x.iter().zip(y).map(|(a, b)| (t * a + s * b) / (s + t)).collect();
    let scale = composition_scale(p.lambda, s, t);
    let composed = rule.integrate_nd(&center, scale, |z| {
        (first.ln_eval_unchecked(x, z) + second.ln_eval_unchecked(z, y) - direct).exp()
    });
    Ok((composed - 1.0).abs())
}

/// Finite-difference residual `|d_t g - (1/2) Lap_x g + (lambda^2 |x|^2 / 2) g|`
/// with centered differences of step `h`.
pub fn pde_residual(x: &[f64], t: f64, y: &[f64], p: &HarmonicParams, h: f64) -> Result<f64> {
    if !(h > 0.0 && t > h) {
        return domain(format!("need 0 < h < t, got h = {h}, t = {t}"));
    }
    check_dim(p.dim, x.len())?;
    check_dim(p.dim, y.len())?;
    let g = |xx: &[f64], tt: f64| -> Result<f64> { mehler_closed(xx, tt, y, p) };
    let center = g(x, t)?;
    let dt = (g(x, t + h)? - g(x, t - h)?) / (2.0 * h);
    let mut laplacian = 0.0;
    let mut shifted = x.to_vec();
    for j in 0..x.len() {
        shifted[j] = x[j] + h;
        let plus = g(&shifted, t)?;
        shifted[j] = x[j] - h;
        let minus = g(&shifted, t)?;
        shifted[j] = x[j];
        laplacian += (plus - 2.0 * center + minus) / (h * h);
    }
    let norm2: f64 = x.iter().map(|v| v * v).sum();
    let potential = 0.5 * p.lambda * p.lambda * norm2;
    Ok((dt - 0.5 * laplacian + potential * center).abs())
}

/// `|int g(x,t,y) f(y) dy - f(x)|`, which tends to zero linearly as `t -> 0`.
pub fn delta_limit_error(
    x: &[f64],
    t: f64,
    p: &HarmonicParams,
    quad_order: usize,
    f: impl Fn(&[f64]) -> f64,
) -> Result<f64> {
    let rule = GaussHermite::new(quad_order)?;
    let kernel = MehlerKernel::new(p, t)?;
    check_dim(p.dim, x.len())?;
    let smoothed = rule.integrate_nd(x, kernel.length_scale(), |y| kernel.eval_unchecked(x, y) * f(y));
    Ok((smoothed - f(x)).abs())
}

/// The root `gamma = e^{-lambda t}` that turns the classical Mehler formula
/// into the oscillator kernel.
pub fn mehler_root(lambda: f64, t: f64) -> f64 {
    (-lambda * t).exp()
}

/// Relative residuals of the two matching conditions satisfied by
/// [`mehler_root`]:
/// `(1 + g^2)/(1 - g^2) = coth(lambda t)` and `g/(1 - g^2) = 1/(2 sinh(lambda t))`.
pub fn root_condition_residuals(lambda: f64, t: f64) -> [f64; 2] {
    let g = mehler_root(lambda, t);
    let u = lambda * t;
    let first = (1.0 + g * g) / (1.0 - g * g);
    let second = g / (1.0 - g * g);
    let coth_u = coth(u);
    let half_csch = 0.5 / u.sinh();
    [
        ((first - coth_u) / coth_u).abs(),
        ((second - half_csch) / half_csch).abs(),
    ]
}
