//! Closed-form finite-dimensional laws of the five Gaussian Bernstein
//! processes built on the harmonic oscillator.
//!
//! Every law is `N` independent copies of a scalar Gaussian process, so the
//! covariance of `(Z_{t_1}, ..., Z_{t_n})` is `C (x) I_N` where `C` is the
//! scalar Gram matrix of [`ProcessSpec::covariance_scalar`].

mod duality;

pub use duality::{normalization_integral, pde_residual_uv, stationary_initial_datum, DualPair};

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Result};
use crate::gaussian_linalg::{kron_with_identity, SymMatrix};
use crate::hyperbolic::{coth, csch, ln_sinh, sinh_quotient, sinhc};
use crate::params::{HarmonicParams, TimeGrid};

/// Which of the five laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    /// Stationary Ornstein-Uhlenbeck, covariance `e^{-lambda|t-s|}/(2 lambda)`.
    StationaryOu,
    /// Ornstein-Uhlenbeck started at the origin.
    PinnedAtOrigin,
    /// Ornstein-Uhlenbeck ending at the origin at `T` (time reversal of the above).
    PinnedAtOriginReversed,
    /// Bridge from the origin at `t = 0` to `endpoint` at `t = T`.
    BernsteinBridge { endpoint: Vec<f64> },
    /// Stationary non-Markovian family; `theta = 0` is the periodic OU process.
    PeriodicFamily { theta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessSpec {
    pub params: HarmonicParams,
    pub kind: ProcessKind,
}

/// Mean and per-component variance of `Z_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalLaw {
    pub mean: Vec<f64>,
    pub variance: f64,
}

/// Law of `(Z_{t_1}, ..., Z_{t_n})` flattened time-major: coordinate `k N + i`
/// is component `i` at time `t_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLaw {
    pub mean: Vec<f64>,
    pub covariance: SymMatrix,
    /// Coordinates fixed with probability one; their mean entry is the pinned
    /// value and their covariance row and column are zero.
    pub deterministic: Vec<usize>,
    pub dim: usize,
}

impl GaussianLaw {
    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    /// Coordinates that are not deterministic, ascending.
    pub fn free_coordinates(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|i| self.deterministic.binary_search(i).is_err())
            .collect()
    }

    /// Covariance restricted to the free coordinates.
    pub fn free_covariance(&self) -> SymMatrix {
        self.covariance.submatrix(&self.free_coordinates())
    }

    /// A law with zero covariance everywhere: every coordinate deterministic.
    pub fn point_mass(mean: Vec<f64>, dim: usize) -> Self {
        let n = mean.len();
        Self {
            covariance: SymMatrix::from_fn(n.max(1), |_, _| 0.0),
            deterministic: (0..n).collect(),
            mean,
            dim,
        }
    }
}

impl ProcessSpec {
    pub fn new(params: HarmonicParams, kind: ProcessKind) -> Result<Self> {
        match &kind {
            ProcessKind::BernsteinBridge { endpoint } => {
                check_dim(params.dim, endpoint.len())?;
                if endpoint.iter().any(|a| !a.is_finite()) {
                    return domain("bridge endpoint must be finite");
                }
            }
            ProcessKind::PeriodicFamily { theta } if !(theta.is_finite() && *theta >= 0.0) => {
                return domain(format!("theta must be nonnegative, got {theta}"));
            }
            _ => {}
        }
        Ok(Self { params, kind })
    }

    pub fn stationary(params: HarmonicParams) -> Self {
        Self {
            params,
            kind: ProcessKind::StationaryOu,
        }
    }

    pub fn pinned(params: HarmonicParams) -> Self {
        Self {
            params,
            kind: ProcessKind::PinnedAtOrigin,
        }
    }

    pub fn pinned_reversed(params: HarmonicParams) -> Self {
        Self {
            params,
            kind: ProcessKind::PinnedAtOriginReversed,
        }
    }

    pub fn bridge(params: HarmonicParams, endpoint: Vec<f64>) -> Result<Self> {
        Self::new(params, ProcessKind::BernsteinBridge { endpoint })
    }

    pub fn periodic(params: HarmonicParams, theta: f64) -> Result<Self> {
        Self::new(params, ProcessKind::PeriodicFamily { theta })
    }

    /// Short identifier used in reports.
    pub fn label(&self) -> &'static str {
        match self.kind {
            ProcessKind::StationaryOu => "stationary",
            ProcessKind::PinnedAtOrigin => "pinned",
            ProcessKind::PinnedAtOriginReversed => "pinned_reversed",
            ProcessKind::BernsteinBridge { .. } => "bridge",
            ProcessKind::PeriodicFamily { .. } => "periodic",
        }
    }

    /// True for the four laws whose endpoint measure factorizes.
    pub fn is_markovian(&self) -> bool {
        !matches!(self.kind, ProcessKind::PeriodicFamily { .. })
    }

    fn lambda(&self) -> f64 {
        self.params.lambda
    }

    fn horizon(&self) -> f64 {
        self.params.horizon
    }

    /// `(theta + 1) T` for the periodic family.
    fn period(&self) -> Option<f64> {
        match self.kind {
            ProcessKind::PeriodicFamily { theta } => Some((theta + 1.0) * self.horizon()),
            _ => None,
        }
    }

    fn check_time(&self, t: f64) -> Result<()> {
        if t.is_finite() && (0.0..=self.horizon()).contains(&t) {
            Ok(())
        } else {
            domain(format!("time {t} is outside [0, {}]", self.horizon()))
        }
    }

    /// Per-component covariance `E[(Z^i_s - m^i(s))(Z^i_t - m^i(t))]`.
    pub fn covariance_scalar(&self, s: f64, t: f64) -> Result<f64> {
        self.check_time(s)?;
        self.check_time(t)?;
        let lambda = self.lambda();
        let lo = s.min(t);
        let hi = s.max(t);
        Ok(match &self.kind {
            ProcessKind::StationaryOu => (-lambda * (hi - lo)).exp() / (2.0 * lambda),
            ProcessKind::PinnedAtOrigin => pinned_covariance(lambda, lo, hi),
            ProcessKind::PinnedAtOriginReversed => {
                let big_t = self.horizon();
                pinned_covariance(lambda, big_t - hi, big_t - lo)
            }
            ProcessKind::BernsteinBridge { .. } => bridge_covariance(lambda, self.horizon(), lo, hi),
            ProcessKind::PeriodicFamily { .. } => periodic_covariance(lambda, self.period().unwrap_or(0.0), hi - lo),
        })
    }

    /// Mean of `Z_t`; nonzero only for the bridge, where it is `a sinh(lambda t)/sinh(lambda T)`.
    pub fn mean_function(&self, t: f64) -> Result<Vec<f64>> {
        self.check_time(t)?;
        Ok(match &self.kind {
            ProcessKind::BernsteinBridge { endpoint } => {
                let w = bridge_mean_weight(self.lambda(), self.horizon(), t);
                endpoint.iter().map(|a| a * w).collect()
            }
            _ => vec![0.0; self.params.dim],
        })
    }

    /// Mean and per-component variance of `Z_t`.
    pub fn marginal_law(&self, t: f64) -> Result<MarginalLaw> {
        self.check_time(t)?;
        let lambda = self.lambda();
        let big_t = self.horizon();
        let variance = match &self.kind {
            ProcessKind::StationaryOu => 1.0 / (2.0 * lambda),
            // sinh(lambda t) e^{-lambda t} / lambda
            ProcessKind::PinnedAtOrigin => -(-2.0 * lambda * t).exp_m1() / (2.0 * lambda),
            ProcessKind::PinnedAtOriginReversed => -(-2.0 * lambda * (big_t - t)).exp_m1() / (2.0 * lambda),
            ProcessKind::BernsteinBridge { .. } => bridge_covariance(lambda, big_t, t, t),
            // sinh(lambda P) / (2 lambda (cosh(lambda P) - 1)) = coth(lambda P / 2) / (2 lambda)
            ProcessKind::PeriodicFamily { .. } => coth(0.5 * lambda * self.period().unwrap_or(0.0)) / (2.0 * lambda),
        };
        Ok(MarginalLaw {
            mean: self.mean_function(t)?,
            variance,
        })
    }

    /// Scalar Gram matrix `C_{kl} = covariance_scalar(t_k, t_l)`.
    pub fn covariance_matrix(&self, grid: &TimeGrid) -> Result<SymMatrix> {
        self.check_time(grid.first())?;
        self.check_time(grid.last())?;
        let t = grid.times();
        let mut err = None;
        let c = SymMatrix::from_fn(grid.len(), |k, l| match self.covariance_scalar(t[k], t[l]) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                f64::NAN
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(c),
        }
    }

    /// Checks that `grid` is a legal domain for the closed-form precision matrix.
    pub fn check_precision_grid(&self, grid: &TimeGrid) -> Result<()> {
        if grid.len() < 2 {
            return domain("precision matrices need at least two times");
        }
        self.check_time(grid.first())?;
        self.check_time(grid.last())?;
        let (first, last, big_t) = (grid.first(), grid.last(), self.horizon());
        match &self.kind {
            ProcessKind::PinnedAtOrigin if first <= 0.0 => domain("pinned process: grid must start after t = 0"),
            ProcessKind::PinnedAtOriginReversed if last >= big_t => {
                domain("reversed pinned process: grid must end before t = T")
            }
            ProcessKind::BernsteinBridge { .. } if first <= 0.0 || last >= big_t => {
                domain("bridge: grid must lie strictly inside (0, T)")
            }
            ProcessKind::PeriodicFamily { .. } if self.period().unwrap_or(0.0) - (last - first) <= 0.0 => {
                domain("periodic family at theta = 0: grid may not span the whole period")
            }
            _ => Ok(()),
        }
    }

    /// Closed-form scalar precision matrix `C^{-1}` on `grid`: tridiagonal
    /// for the Markovian laws, tridiagonal plus corners for the periodic
    /// family.
    pub fn precision_matrix(&self, grid: &TimeGrid) -> Result<SymMatrix> {
        self.check_precision_grid(grid)?;
        let lambda = self.lambda();
        let big_t = self.horizon();
        let t = grid.times();
        let n = t.len();
        let gap = |k: usize| t[k + 1] - t[k];
        // lambda sinh(lambda(a+b)) / (sinh(lambda a) sinh(lambda b))
        let interior = |a: f64, b: f64| lambda * sinh_quotient(lambda * (a + b), lambda * a, lambda * b);
        // lambda e^{lambda d} / sinh(lambda d), written as lambda (1 + coth(lambda d))
        let open_end = |d: f64| lambda * (1.0 + coth(lambda * d));

        let mut diag = vec![0.0; n];
        let mut off: Vec<f64> = (0..n - 1).map(|k| -lambda * csch(lambda * gap(k))).collect();
        let mut corner = 0.0;
        for (k, d) in diag.iter_mut().enumerate().take(n.saturating_sub(1)).skip(1) {
            *d = interior(gap(k - 1), gap(k));
        }
        match &self.kind {
            ProcessKind::StationaryOu => {
                diag[0] = open_end(gap(0));
                diag[n - 1] = open_end(gap(n - 2));
            }
            ProcessKind::PinnedAtOrigin => {
                diag[0] = interior(t[0], gap(0));
                diag[n - 1] = open_end(gap(n - 2));
            }
            ProcessKind::PinnedAtOriginReversed => {
                diag[0] = open_end(gap(0));
                diag[n - 1] = interior(gap(n - 2), big_t - t[n - 1]);
            }
            ProcessKind::BernsteinBridge { .. } => {
                diag[0] = interior(t[0], gap(0));
                diag[n - 1] = interior(gap(n - 2), big_t - t[n - 1]);
            }
            ProcessKind::PeriodicFamily { .. } => {
                let period = self.period().unwrap_or(0.0);
                let wrap = period - (t[n - 1] - t[0]);
                if n == 2 {
                    let d = gap(0);
                    diag[0] = interior(d, wrap);
                    diag[1] = diag[0];
                    off[0] -= lambda * csch(lambda * wrap);
                } else {
                    diag[0] = interior(gap(0), wrap);
                    diag[n - 1] = interior(gap(n - 2), wrap);
                    corner = -lambda * csch(lambda * wrap);
                }
            }
        }
        Ok(SymMatrix::from_fn(n, |i, j| {
            if i == j {
                diag[i]
            } else if i == j + 1 {
                off[j]
            } else if n > 2 && i == n - 1 && j == 0 {
                corner
            } else {
                0.0
            }
        }))
    }

    /// Checks that `grid` is a legal domain for [`fdd_law`](Self::fdd_law).
    pub fn check_law_grid(&self, grid: &TimeGrid) -> Result<()> {
        self.check_time(grid.first())?;
        self.check_time(grid.last())?;
        if let Some(period) = self.period() {
            if period - (grid.last() - grid.first()) <= 0.0 {
                return domain(
                    "periodic family at theta = 0: Z_0 = Z_T makes the covariance singular on \
                     a grid spanning [0, T]; use the explicit periodic sampler instead",
                );
            }
        }
        Ok(())
    }

    /// Times on `grid` where the process is deterministic, with the pinned value.
    fn pinned_value(&self, t: f64) -> Option<Vec<f64>> {
        let big_t = self.horizon();
        let origin = || vec![0.0; self.params.dim];
        match &self.kind {
            ProcessKind::PinnedAtOrigin if t == 0.0 => Some(origin()),
            ProcessKind::PinnedAtOriginReversed if t == big_t => Some(origin()),
            ProcessKind::BernsteinBridge { .. } if t == 0.0 => Some(origin()),
            ProcessKind::BernsteinBridge { endpoint } if t == big_t => Some(endpoint.clone()),
            _ => None,
        }
    }

    /// Law of `(Z_{t_1}, ..., Z_{t_n})` in `R^{nN}`.
    pub fn fdd_law(&self, grid: &TimeGrid) -> Result<GaussianLaw> {
        self.check_law_grid(grid)?;
        let dim = self.params.dim;
        let mut mean = Vec::with_capacity(grid.len() * dim);
        let mut deterministic = Vec::new();
        for (k, &t) in grid.times().iter().enumerate() {
            match self.pinned_value(t) {
                Some(value) => {
                    deterministic.extend(k * dim..(k + 1) * dim);
                    mean.extend(value);
                }
                None => mean.extend(self.mean_function(t)?),
            }
        }
        let scalar = self.covariance_matrix(grid)?;
        Ok(GaussianLaw {
            mean,
            covariance: kron_with_identity(&scalar, dim)?,
            deterministic,
            dim,
        })
    }
}

/// `e^{-lambda(t+s)} (e^{2 lambda (t ^ s)} - 1) / (2 lambda)` for `lo <= hi`.
fn pinned_covariance(lambda: f64, lo: f64, hi: f64) -> f64 {
    (-lambda * (hi - lo)).exp() * -(-2.0 * lambda * lo).exp_m1() / (2.0 * lambda)
}

/// `sinh(lambda(T - hi)) sinh(lambda lo) / (lambda sinh(lambda T))` for `lo <= hi`,
/// factored through `sinh(x)/x` so the `lambda -> 0` limit is exact.
fn bridge_covariance(lambda: f64, big_t: f64, lo: f64, hi: f64) -> f64 {
    let rest = big_t - hi;
    if lambda * big_t > 300.0 {
        if lo == 0.0 || rest == 0.0 {
            return 0.0;
        }
        return (ln_sinh(lambda * rest) + ln_sinh(lambda * lo) - ln_sinh(lambda * big_t)).exp() / lambda;
    }
    rest * lo / big_t * sinhc(lambda * rest) * sinhc(lambda * lo) / sinhc(lambda * big_t)
}

/// `sinh(lambda t) / sinh(lambda T)`.
fn bridge_mean_weight(lambda: f64, big_t: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if lambda * big_t > 300.0 {
        return (ln_sinh(lambda * t) - ln_sinh(lambda * big_t)).exp();
    }
    t / big_t * sinhc(lambda * t) / sinhc(lambda * big_t)
}

/// `cosh(lambda(tau - P/2)) / (2 lambda sinh(lambda P / 2))` with `P` the period
/// and `tau = |t - s|`.
pub fn periodic_covariance(lambda: f64, period: f64, tau: f64) -> f64 {
    if 0.5 * lambda * period < 300.0 {
        (lambda * (tau - 0.5 * period)).cosh() / (2.0 * lambda * (0.5 * lambda * period).sinh())
    } else {
        periodic_covariance_exp_form(lambda, period, tau)
    }
}

/// `(e^{-lambda tau} + e^{-lambda (P - tau)}) / (2 lambda (1 - e^{-lambda P}))`,
/// the exponential form of [`periodic_covariance`].
pub fn periodic_covariance_exp_form(lambda: f64, period: f64, tau: f64) -> f64 {
    ((-lambda * tau).exp() + (-lambda * (period - tau)).exp()) / (2.0 * lambda * -(-lambda * period).exp_m1())
}

/// `|bridge covariance(s, t) - (T - t v s)(t ^ s)/T|` at rate `lambda_small`.
pub fn brownian_bridge_limit_check(s: f64, t: f64, horizon: f64, lambda_small: f64) -> Result<f64> {
    let params = HarmonicParams::new(lambda_small, horizon, 1)?;
    let bridge = ProcessSpec::bridge(params, vec![0.0])?;
    let cov = bridge.covariance_scalar(s, t)?;
    let brownian = (horizon - s.max(t)) * s.min(t) / horizon;
    Ok((cov - brownian).abs())
}

/// `|Cov(s,t) Var(r) - Cov(s,r) Cov(r,t)|` for `s < r < t`; zero for Gauss-Markov laws.
pub fn markov_factorization_defect(spec: &ProcessSpec, s: f64, r: f64, t: f64) -> Result<f64> {
    if !(s < r && r < t) {
        return domain(format!("need s < r < t, got {s}, {r}, {t}"));
    }
    let lhs = spec.covariance_scalar(s, t)? * spec.covariance_scalar(r, r)?;
    let rhs = spec.covariance_scalar(s, r)? * spec.covariance_scalar(r, t)?;
    Ok((lhs - rhs).abs())
}
