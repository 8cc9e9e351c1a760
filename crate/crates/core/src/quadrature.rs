//! Gauss-Hermite quadrature.
//!
//! Nodes are the zeros of `h_n`, found by Newton iteration on the normalized
//! Hermite-function recurrence. Alongside the classical weights `w_i` the rule
//! stores `w_i e^{x_i^2}`, so plain integrals over the real line can be taken
//! without the Gaussian weight.

use crate::error::{domain, Result};
use crate::special_functions::fill_hermite;

/// Default number of nodes per axis.
pub const DEFAULT_ORDER: usize = 128;

#[derive(Debug, Clone)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    unweighted: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return domain(format!("quadrature order must be at least 2, got {order}"));
        }
        if order > 600 {
            return domain(format!("quadrature order {order} is above the supported 600"));
        }
        let n = order;
        let nf = n as f64;
        let mut nodes = vec![0.0; n];
        let mut unweighted = vec![0.0; n];
        let mut h = vec![0.0; n + 1];
        let half = n.div_ceil(2);
        let mut z = 0.0_f64;
        let mut found: Vec<f64> = Vec::with_capacity(half);
        for i in 0..half {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * found[0],
                3 => 1.91 * z - 0.91 * found[1],
                _ => 2.0 * z - found[i - 2],
            };
            for _ in 0..100 {
                fill_hermite(z, &mut h);
                // h_n' = sqrt(2n) h_{n-1} - z h_n
                let derivative = (2.0 * nf).sqrt() * h[n - 1] - z * h[n];
                let step = h[n] / derivative;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            fill_hermite(z, &mut h);
            let derivative = (2.0 * nf).sqrt() * h[n - 1] - z * h[n];
            found.push(z);
            let w_tilde = 2.0 / (derivative * derivative);
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            unweighted[i] = w_tilde;
            unweighted[n - 1 - i] = w_tilde;
        }
        if n % 2 == 1 {
            nodes[half - 1] = 0.0;
        }
        // ascending order
        nodes.reverse();
        unweighted.reverse();
        let weights = nodes
            .iter()
            .zip(&unweighted)
            .map(|(x, wt)| wt * (-x * x).exp())
            .collect();
        Ok(Self {
            nodes,
            weights,
            unweighted,
        })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Classical weights `w_i` for `int e^{-x^2} f(x) dx`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `w_i e^{x_i^2}` for `int f(x) dx`.
    pub fn unweighted(&self) -> &[f64] {
        &self.unweighted
    }

    /// `int e^{-x^2} f(x) dx`.
    pub fn integrate_weighted(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `int f(x) dx` with nodes mapped to `center + scale * x_i`.
    pub fn integrate(&self, center: f64, scale: f64, f: impl Fn(f64) -> f64) -> f64 {
        scale
            * self
                .nodes
                .iter()
                .zip(&self.unweighted)
                .map(|(&x, &w)| w * f(center + scale * x))
                .sum::<f64>()
    }

    /// Tensor-product rule for `int_{R^dim} f(x) dx` with per-axis centers
    /// and a common scale.
    pub fn integrate_nd(&self, center: &[f64], scale: f64, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let dim = center.len();
        let n = self.order();
        let mut idx = vec![0usize; dim];
        let mut point: Vec<f64> = center.iter().map(|c| c + scale * self.nodes[0]).collect();
        let mut total = 0.0;
        loop {
            let w: f64 = idx.iter().map(|&i| self.unweighted[i]).product();
            total += w * f(&point);
            // odometer increment
            let mut axis = 0;
            loop {
                if axis == dim {
                    return total * scale.powi(dim as i32);
                }
                idx[axis] += 1;
                if idx[axis] < n {
                    point[axis] = center[axis] + scale * self.nodes[idx[axis]];
                    break;
                }
                idx[axis] = 0;
                point[axis] = center[axis] + scale * self.nodes[0];
                axis += 1;
            }
        }
    }
}
