//! Positive forward/backward solutions `u`, `v` of the oscillator heat
//! equations whose product is the marginal density of a Markovian law.

use std::f64::consts::PI;

use crate::error::{check_dim, domain, Result};
use crate::hyperbolic::{coth, csch, ln_sinh};
use crate::quadrature::GaussHermite;

use super::{ProcessKind, ProcessSpec};

/// The `(u, v)` pair attached to one of the four Markovian specs.
#[derive(Debug, Clone)]
pub struct DualPair {
    spec: ProcessSpec,
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum()
}

/// `ln phi_0(x)` with `phi_0(x) = (lambda e^{lambda T}/pi)^{N/4} e^{-lambda |x|^2/2}`.
fn ln_ground_datum(lambda: f64, horizon: f64, x: &[f64]) -> f64 {
    let n = x.len() as f64;
    0.25 * n * (lambda.ln() + lambda * horizon - PI.ln()) - 0.5 * lambda * norm2(x)
}

/// Gaussian initial datum `phi_0` of the stationary system.
pub fn stationary_initial_datum(lambda: f64, horizon: f64, x: &[f64]) -> f64 {
    ln_ground_datum(lambda, horizon, x).exp()
}

impl DualPair {
    pub fn new(spec: &ProcessSpec) -> Result<Self> {
        if !spec.is_markovian() {
            return domain("the periodic family has no forward/backward pair");
        }
        Ok(Self { spec: spec.clone() })
    }

    pub fn spec(&self) -> &ProcessSpec {
        &self.spec
    }

    fn lambda(&self) -> f64 {
        self.spec.params.lambda
    }

    fn horizon(&self) -> f64 {
        self.spec.params.horizon
    }

    fn dim(&self) -> f64 {
        self.spec.params.dim as f64
    }

    fn check(&self, x: &[f64], t: f64, forward: bool) -> Result<()> {
        check_dim(self.spec.params.dim, x.len())?;
        self.spec.check_time(t)?;
        let singular_start = matches!(
            self.spec.kind,
            ProcessKind::PinnedAtOrigin | ProcessKind::BernsteinBridge { .. }
        );
        let singular_end = matches!(
            self.spec.kind,
            ProcessKind::PinnedAtOriginReversed | ProcessKind::BernsteinBridge { .. }
        );
        if forward && singular_start && t == 0.0 {
            return domain("u is a point mass at t = 0");
        }
        if !forward && singular_end && t == self.horizon() {
            return domain("v is a point mass at t = T");
        }
        Ok(())
    }

    /// `ln n_lambda` of the bridge.
    fn ln_bridge_norm(&self, endpoint: &[f64]) -> f64 {
        let (lambda, big_t) = (self.lambda(), self.horizon());
        0.25 * self.dim() * (lambda.ln() + ln_sinh(lambda * big_t) - (2.0 * PI).ln())
            + 0.25 * lambda * coth(lambda * big_t) * norm2(endpoint)
    }

    /// `ln(lambda e^{lambda T/2} / (2 pi sinh(lambda s)))^{N/2} - lambda coth(lambda s)|x|^2/2`.
    fn ln_pinned_side(&self, x: &[f64], s: f64) -> f64 {
        let lambda = self.lambda();
        0.5 * self.dim() * (lambda.ln() + 0.5 * lambda * self.horizon() - (2.0 * PI).ln() - ln_sinh(lambda * s))
            - 0.5 * lambda * coth(lambda * s) * norm2(x)
    }

    /// `ln(e^{lambda T})^{N/4} - lambda(|x|^2 + N s)/2`.
    fn ln_open_side(&self, x: &[f64], s: f64) -> f64 {
        let lambda = self.lambda();
        0.25 * self.dim() * lambda * self.horizon() - 0.5 * lambda * (norm2(x) + self.dim() * s)
    }

    pub fn ln_u(&self, x: &[f64], t: f64) -> Result<f64> {
        self.check(x, t, true)?;
        let lambda = self.lambda();
        Ok(match &self.spec.kind {
            ProcessKind::StationaryOu => ln_ground_datum(lambda, self.horizon(), x) - 0.5 * lambda * self.dim() * t,
            ProcessKind::PinnedAtOrigin => self.ln_pinned_side(x, t),
            ProcessKind::PinnedAtOriginReversed => self.ln_open_side(x, t),
            ProcessKind::BernsteinBridge { endpoint } => {
                self.ln_bridge_norm(endpoint)
                    - 0.5 * self.dim() * ln_sinh(lambda * t)
                    - 0.5 * lambda * coth(lambda * t) * norm2(x)
            }
            ProcessKind::PeriodicFamily { .. } => unreachable!("rejected in DualPair::new"),
        })
    }

    pub fn ln_v(&self, x: &[f64], t: f64) -> Result<f64> {
        self.check(x, t, false)?;
        let lambda = self.lambda();
        let rest = self.horizon() - t;
        Ok(match &self.spec.kind {
            ProcessKind::StationaryOu => ln_ground_datum(lambda, self.horizon(), x) - 0.5 * lambda * self.dim() * rest,
            ProcessKind::PinnedAtOrigin => self.ln_open_side(x, rest),
            ProcessKind::PinnedAtOriginReversed => self.ln_pinned_side(x, rest),
            ProcessKind::BernsteinBridge { endpoint } => {
                let alpha = lambda * coth(lambda * rest);
                let inner: f64 = endpoint.iter().zip(x).map(|(a, b)| a * b).sum();
                self.ln_bridge_norm(endpoint)
                    - 0.5 * alpha * norm2(endpoint)
                    - 0.5 * self.dim() * ln_sinh(lambda * rest)
                    - 0.5 * (alpha * norm2(x) - 2.0 * lambda * inner * csch(lambda * rest))
            }
            ProcessKind::PeriodicFamily { .. } => unreachable!("rejected in DualPair::new"),
        })
    }

    pub fn u(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.ln_u(x, t)?.exp())
    }

    pub fn v(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok(self.ln_v(x, t)?.exp())
    }

    /// `u(x,t) v(x,t)`, the marginal density of `Z_t` for interior `t`.
    pub fn density(&self, x: &[f64], t: f64) -> Result<f64> {
        Ok((self.ln_u(x, t)? + self.ln_v(x, t)?).exp())
    }

    /// Centre and length scale for quadrature of `u v` at time `t`.
    fn quadrature_frame(&self, t: f64) -> (Vec<f64>, f64) {
        let lambda = self.lambda();
        let big_t = self.horizon();
        let cap = 1.0 / lambda.sqrt();
        let origin = vec![0.0; self.spec.params.dim];
        match &self.spec.kind {
            ProcessKind::StationaryOu | ProcessKind::PeriodicFamily { .. } => (origin, cap),
            ProcessKind::PinnedAtOrigin => (origin, cap.min((2.0 * t).sqrt())),
            ProcessKind::PinnedAtOriginReversed => (origin, cap.min((2.0 * (big_t - t)).sqrt())),
            ProcessKind::BernsteinBridge { endpoint } => (
                endpoint.iter().map(|a| a * t / big_t).collect(),
                cap.min((2.0 * t * (big_t - t) / big_t).sqrt()),
            ),
        }
    }
}

/// `int u(x,t) v(x,t) dx` by tensor Gauss-Hermite quadrature; equal to 1
/// for every `t`.
pub fn normalization_integral(pair: &DualPair, t: f64, quad_order: usize) -> Result<f64> {
    let rule = GaussHermite::new(quad_order)?;
    let (center, scale) = pair.quadrature_frame(t);
    pair.check(&center, t, true)?;
    pair.check(&center, t, false)?;
    let mut failure = None;
    let total = rule.integrate_nd(&center, scale, |x| match pair.density(x, t) {
        Ok(d) => d,
        Err(e) => {
            failure.get_or_insert(e);
            0.0
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(total),
    }
}

/// Centered-difference residuals `[d_t u - Lap u/2 + V u, -d_t v - Lap v/2 + V v]`
/// with `V = lambda^2 |x|^2 / 2` and step `h`.
pub fn pde_residual_uv(pair: &DualPair, x: &[f64], t: f64, h: f64) -> Result<[f64; 2]> {
    if !(h > 0.0 && t - h > 0.0 && t + h < pair.horizon()) {
        return domain(format!("need h < t < T - h, got h = {h}, t = {t}"));
    }
    check_dim(pair.spec.params.dim, x.len())?;
    let potential = 0.5 * pair.lambda() * pair.lambda() * norm2(x);
    let residual = |f: &dyn Fn(&[f64], f64) -> Result<f64>, time_sign: f64| -> Result<f64> {
        let center = f(x, t)?;
        let dt = (f(x, t + h)? - f(x, t - h)?) / (2.0 * h);
        let mut laplacian = 0.0;
        let mut shifted = x.to_vec();
        for j in 0..x.len() {
            shifted[j] = x[j] + h;
            let plus = f(&shifted, t)?;
            shifted[j] = x[j] - h;
            let minus = f(&shifted, t)?;
            shifted[j] = x[j];
            laplacian += (plus - 2.0 * center + minus) / (h * h);
        }
        Ok((time_sign * dt - 0.5 * laplacian + potential * center).abs())
    };
    Ok([
        residual(&|y, s| pair.u(y, s), 1.0)?,
        residual(&|y, s| pair.v(y, s), -1.0)?,
    ])
}
