//! Hermite functions, their `lambda`-scaled versions and tensor products.
//!
//! Everything is evaluated on the normalized functions
//! `h_m(x) = (sqrt(pi) 2^m m!)^{-1/2} e^{-x^2/2} H_m(x)` through the
//! three-term recurrence
//!
//! ```text
//! h_{m+1}(x) = x sqrt(2/(m+1)) h_m(x) - sqrt(m/(m+1)) h_{m-1}(x)
//! ```
//!
//! so neither `H_m` nor `m!` is ever formed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Result};

/// Largest per-axis degree accepted in a [`MultiIndex`] or a series truncation.
pub const MAX_AXIS_DEGREE: usize = 200;

/// Uniform bound on `|h_m(x)|` over all `m` and real `x`, used to bound
/// series tails. Confirmed by a dense sweep for `m <= 200` in the tests.
pub const HERMITE_UNIFORM_BOUND: f64 = 0.82;

/// `pi^{-1/4}`, the value of `h_0(0)`.
pub fn pi_quarter_inv() -> f64 {
    PI.powf(-0.25)
}

fn check_finite(x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        domain(format!("argument must be finite, got {x}"))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        domain(format!("lambda must be positive, got {lambda}"))
    }
}

/// Fills `out[m] = h_m(x)` for `m = 0..out.len()`. No argument checks.
pub(crate) fn fill_hermite(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = pi_quarter_inv() * (-0.5 * x * x).exp();
    if out.len() > 1 {
        out[1] = std::f64::consts::SQRT_2 * x * out[0];
    }
    for m in 1..out.len().saturating_sub(1) {
        let mf = m as f64;
        out[m + 1] = x * (2.0 / (mf + 1.0)).sqrt() * out[m] - (mf / (mf + 1.0)).sqrt() * out[m - 1];
    }
}

/// Normalized Hermite function `h_m(x)`.
pub fn hermite_function(m: usize, x: f64) -> Result<f64> {
    check_finite(x)?;
    let mut prev = 0.0;
    let mut cur = pi_quarter_inv() * (-0.5 * x * x).exp();
    for k in 0..m {
        let kf = k as f64;
        let next = x * (2.0 / (kf + 1.0)).sqrt() * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `h_0(x), ..., h_{max_order}(x)` in one recurrence pass.
pub fn hermite_functions_upto(max_order: usize, x: f64) -> Result<Vec<f64>> {
    check_finite(x)?;
    let mut out = vec![0.0; max_order + 1];
    fill_hermite(x, &mut out);
    Ok(out)
}

/// `h_{m,lambda}(x) = lambda^{1/4} h_m(sqrt(lambda) x)`.
pub fn scaled_hermite_function(m: usize, lambda: f64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(lambda.powf(0.25) * hermite_function(m, lambda.sqrt() * x)?)
}

/// `h_{0,lambda}(x), ..., h_{max_order,lambda}(x)`.
pub fn scaled_hermite_functions_upto(max_order: usize, lambda: f64, x: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    let scale = lambda.powf(0.25);
    let mut out = hermite_functions_upto(max_order, lambda.sqrt() * x)?;
    out.iter_mut().for_each(|v| *v *= scale);
    Ok(out)
}

/// A multi-index `m = (m_1, ..., m_N)` labelling one eigenfunction of the
/// `N`-dimensional oscillator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(entries: Vec<usize>) -> Result<Self> {
        if entries.is_empty() {
            return domain("multi-index must have at least one entry");
        }
        if let Some(m) = entries.iter().find(|&&m| m > MAX_AXIS_DEGREE) {
            return domain(format!("multi-index entry {m} exceeds the cap {MAX_AXIS_DEGREE}"));
        }
        Ok(Self(entries))
    }

    pub fn zero(dim: usize) -> Self {
        Self(vec![0; dim.max(1)])
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|m| = sum_j m_j`.
    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    /// Oscillator eigenvalue `lambda (|m| + N/2)`.
    pub fn eigenvalue(&self, lambda: f64) -> f64 {
        lambda * (self.total_degree() as f64 + 0.5 * self.dim() as f64)
    }
}

impl std::fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All multi-indices of dimension `dim` with every entry `<= axis_cap`,
/// ordered by total degree, then lexicographically.
pub fn multi_indices_by_degree(dim: usize, axis_cap: usize) -> Vec<MultiIndex> {
    let dim = dim.max(1);
    let mut out = Vec::new();
    for degree in 0..=dim * axis_cap {
        let mut current = vec![0usize; dim];
        push_compositions(degree, 0, axis_cap, &mut current, &mut out);
    }
    out
}

fn push_compositions(remaining: usize, axis: usize, cap: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
    let dim = current.len();
    if axis == dim - 1 {
        if remaining <= cap {
            current[axis] = remaining;
            out.push(MultiIndex(current.clone()));
        }
        return;
    }
    let rest_capacity = cap * (dim - axis - 1);
    let low = remaining.saturating_sub(rest_capacity);
    for v in (low..=remaining.min(cap)).rev() {
        current[axis] = v;
        push_compositions(remaining - v, axis + 1, cap, current, out);
    }
}

/// `prod_j h_{m_j,lambda}(x_j)`.
pub fn tensor_hermite(m: &MultiIndex, lambda: f64, x: &[f64]) -> Result<f64> {
    check_dim(m.dim(), x.len())?;
    m.entries().iter().zip(x).try_fold(
        1.0,
        |acc, (&mj, &xj)| Ok(acc * scaled_hermite_function(mj, lambda, xj)?),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ground_state_and_odd_orders() {
        assert_relative_eq!(hermite_function(0, 0.0).unwrap(), PI.powf(-0.25), max_relative = 1e-15);
        assert_eq!(hermite_function(1, 0.0).unwrap(), 0.0);
        assert_eq!(hermite_function(7, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn low_orders_match_closed_forms() {
        let x: f64 = 0.8;
        let g = PI.powf(-0.25) * (-0.5 * x * x).exp();
        assert_relative_eq!(
            hermite_function(1, x).unwrap(),
            g * 2.0_f64.sqrt() * x,
            max_relative = 1e-14
        );
        let h2 = g * (4.0 * x * x - 2.0) / (8.0_f64).sqrt();
        assert_relative_eq!(hermite_function(2, x).unwrap(), h2, max_relative = 1e-14);
    }

    #[test]
    fn non_finite_rejected() {
        assert!(hermite_function(3, f64::NAN).is_err());
        assert!(hermite_function(3, f64::INFINITY).is_err());
        assert!(scaled_hermite_function(3, 0.0, 1.0).is_err());
        assert!(scaled_hermite_function(3, -1.0, 1.0).is_err());
    }

    #[test]
    fn scaled_examples() {
        let c = PI.powf(-0.25);
        assert_relative_eq!(scaled_hermite_function(0, 1.0, 0.0).unwrap(), c, max_relative = 1e-15);
        assert_relative_eq!(
            scaled_hermite_function(0, 4.0, 0.0).unwrap(),
            2f64.sqrt() * c,
            max_relative = 1e-15
        );
        let direct = 2.5f64.powf(0.25) * hermite_function(3, 2.5f64.sqrt() * -0.7).unwrap();
        assert_eq!(scaled_hermite_function(3, 2.5, -0.7).unwrap(), direct);
    }

    #[test]
    fn upto_matches_single_evaluations() {
        let all = hermite_functions_upto(30, 1.7).unwrap();
        for (m, v) in all.iter().enumerate() {
            assert_eq!(*v, hermite_function(m, 1.7).unwrap());
        }
    }

    #[test]
    fn finite_for_high_orders() {
        for &x in &[0.0, 1.0, 10.0, 31.0, 45.0] {
            let v = hermite_functions_upto(500, x).unwrap();
            assert!(v.iter().all(|h| h.is_finite()));
        }
    }

    #[test]
    fn tensor_ground_state_and_zero_factor() {
        let lambda = 1.7;
        let m = MultiIndex::new(vec![0, 0]).unwrap();
        assert_relative_eq!(
            tensor_hermite(&m, lambda, &[0.0, 0.0]).unwrap(),
            (lambda / PI).sqrt(),
            max_relative = 1e-15
        );
        let odd = MultiIndex::new(vec![2, 1]).unwrap();
        assert_eq!(tensor_hermite(&odd, lambda, &[0.4, 0.0]).unwrap(), 0.0);
        assert!(tensor_hermite(&odd, lambda, &[0.4]).is_err());
    }

    #[test]
    fn multi_index_enumeration() {
        let all = multi_indices_by_degree(2, 2);
        assert_eq!(all.len(), 9);
        let degrees: Vec<usize> = all.iter().map(MultiIndex::total_degree).collect();
        assert!(degrees.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(all[0].entries(), &[0, 0]);
        assert_eq!(all[8].entries(), &[2, 2]);
        assert_eq!(multi_indices_by_degree(1, 5).len(), 6);
        assert_eq!(multi_indices_by_degree(3, 3).len(), 64);
        assert!(MultiIndex::new(vec![MAX_AXIS_DEGREE + 1]).is_err());
        assert!(MultiIndex::new(vec![]).is_err());
    }
}
