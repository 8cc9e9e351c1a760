//! Shared model parameters and time grids.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Oscillator rate `lambda`, horizon `horizon` (the time `T`) and spatial
/// dimension `dim` (the `N` of `R^N`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicParams {
    pub lambda: f64,
    pub horizon: f64,
    pub dim: usize,
}

impl HarmonicParams {
    pub fn new(lambda: f64, horizon: f64, dim: usize) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return domain(format!("lambda must be positive and finite, got {lambda}"));
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return domain(format!("horizon T must be positive and finite, got {horizon}"));
        }
        if dim == 0 {
            return domain("dimension N must be at least 1");
        }
        Ok(Self { lambda, horizon, dim })
    }

    /// Same `T` and `N` with another rate.
    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.horizon, self.dim)
    }
}

/// Strictly increasing, finite, nonnegative observation times.
///
/// The upper limit depends on the horizon of the process it is used with,
/// so it is checked when a grid is paired with a process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return domain("time grid is empty");
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite() || **t < 0.0) {
            return domain(format!("time {t} is negative or not finite"));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return domain(format!("times must be strictly increasing ({} then {})", w[0], w[1]));
        }
        Ok(Self(times))
    }

    /// `count` equally spaced times from `start` to `end` inclusive.
    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        match count {
            0 => domain("grid count must be positive"),
            1 => Self::new(vec![start]),
            _ => {
                let step = (end - start) / (count - 1) as f64;
                let mut times: Vec<f64> = (0..count).map(|k| start + step * k as f64).collect();
                times[count - 1] = end;
                Self::new(times)
            }
        }
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.0[0]
    }

    pub fn last(&self) -> f64 {
        self.0[self.0.len() - 1]
    }
}
