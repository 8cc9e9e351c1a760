//! Eigenmode data, signed measures and the geometric mixture that produces
//! the stationary non-Markovian endpoint law.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Result};
use crate::hyperbolic::{csch, ln_sinh};
use crate::mehler_kernel::{axis_tail_bound, log_mehler, MehlerKernel};
use crate::params::HarmonicParams;
use crate::quadrature::GaussHermite;
use crate::special_functions::{fill_hermite, multi_indices_by_degree, tensor_hermite, MultiIndex, MAX_AXIS_DEGREE};

/// Parameters of the mixture `mu_{lambda, theta}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    pub params: HarmonicParams,
    pub theta: f64,
}

impl MixtureParams {
    pub fn new(params: HarmonicParams, theta: f64) -> Result<Self> {
        if !(theta.is_finite() && theta > 0.0) {
            return domain(format!("theta must be positive, got {theta}"));
        }
        Ok(Self { params, theta })
    }

    /// `(theta + 1) T`.
    pub fn period(&self) -> f64 {
        (self.theta + 1.0) * self.params.horizon
    }

    /// `ln (2(cosh(lambda P) - 1))^{N/2} = N ln(2 sinh(lambda P / 2))`.
    pub fn ln_prefactor(&self) -> f64 {
        ln_prefactor(self.params.lambda * self.period(), self.params.dim)
    }
}

fn ln_prefactor(u: f64, dim: usize) -> f64 {
    dim as f64 * (std::f64::consts::LN_2 + ln_sinh(0.5 * u))
}

/// `e^{(|m| + N/2) lambda T / 2} prod_j h_{m_j, lambda}(x_j)`, the common
/// initial and final datum of mode `m`.
pub fn eigenmode_datum(m: &MultiIndex, p: &HarmonicParams, x: &[f64]) -> Result<f64> {
    check_dim(p.dim, m.dim())?;
    let level = m.total_degree() as f64 + 0.5 * p.dim as f64;
    Ok((0.5 * level * p.lambda * p.horizon).exp() * tensor_hermite(m, p.lambda, x)?)
}

/// Largest per-axis degree whose signed measure is trusted at `quad_order`.
pub fn trusted_axis_degree(quad_order: usize) -> usize {
    6 * quad_order / 128
}

/// Largest `|m| lambda T` for which the mode mass survives cancellation:
/// quadrature terms of order one must cancel down to `e^{-|m| lambda T}`.
pub const CANCELLATION_LIMIT: f64 = 20.0;

/// Total mass of a signed mode measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassReport {
    pub index: MultiIndex,
    pub value: f64,
    pub quad_order: usize,
    /// Set when some `m_j` exceeds [`trusted_axis_degree`] or `|m| lambda T`
    /// exceeds [`CANCELLATION_LIMIT`].
    pub accuracy_warning: Option<String>,
}

/// Tensor rule on `R^dim` stored as flat node lists; flat index
/// `sum_j i_j order^j`.
struct TensorNodes {
    order: usize,
    dim: usize,
    points: Vec<Vec<f64>>,
}

impl TensorNodes {
    fn new(rule: &GaussHermite, dim: usize, scale: f64) -> Self {
        let order = rule.order();
        let total = order.pow(dim as u32);
        let points = (0..total)
            .map(|flat| {
                let mut rest = flat;
                (0..dim)
                    .map(|_| {
                        let i = rest % order;
                        rest /= order;
                        scale * rule.nodes()[i]
                    })
                    .collect()
            })
            .collect();
        Self { order, dim, points }
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    /// Replaces `values` by `sum_b table[a][b] values[.., b, ..]` along `axis`.
    fn apply_axis(&self, table: &[f64], values: &mut Vec<f64>, axis: usize) {
        let n = self.order;
        let stride = n.pow(axis as u32);
        let mut out = vec![0.0; values.len()];
        for outer in 0..values.len() / (stride * n) {
            for inner in 0..stride {
                let base = outer * stride * n + inner;
                for a in 0..n {
                    let row = &table[a * n..(a + 1) * n];
                    out[base + a * stride] = row.iter().enumerate().map(|(b, t)| t * values[base + b * stride]).sum();
                }
            }
        }
        *values = out;
    }

    /// `sum_{X,Y} f(X) g(Y) prod_j table[X_j][Y_j]`, contracted one axis at a time.
    fn pair_sum(&self, table: &[f64], f: &[f64], g: &[f64]) -> f64 {
        let mut h = g.to_vec();
        for axis in 0..self.dim {
            self.apply_axis(table, &mut h, axis);
        }
        f.iter().zip(&h).map(|(a, b)| a * b).sum()
    }
}

/// Per-axis table `w_a w_b s^2 k(s z_a, s z_b)` for a one-dimensional factor `k`.
fn axis_table(rule: &GaussHermite, scale: f64, k: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = rule.order();
    let (z, w) = (rule.nodes(), rule.unweighted());
    let mut table = vec![0.0; n * n];
    for a in 0..n {
        for b in 0..n {
            table[a * n + b] = w[a] * w[b] * scale * scale * k(scale * z[a], scale * z[b]);
        }
    }
    table
}

fn one_dim(p: &HarmonicParams) -> Result<HarmonicParams> {
    HarmonicParams::new(p.lambda, p.horizon, 1)
}

/// `int int phi_m(x) psi_m(y) g(x,T,y) dx dy` for each index in `indices`, by
/// tensor Gauss-Hermite quadrature in `R^{2N}`.
pub fn signed_measure_total_masses(
    indices: &[MultiIndex],
    p: &HarmonicParams,
    quad_order: usize,
) -> Result<Vec<MassReport>> {
    for m in indices {
        check_dim(p.dim, m.dim())?;
    }
    let rule = GaussHermite::new(quad_order)?;
    let lambda = p.lambda;
    let u = lambda * p.horizon;
    // flattest direction of the Gaussian part has curvature lambda (1 + tanh(u/2))
    let scale = (2.0 / (lambda * (1.0 + (0.5 * u).tanh()))).sqrt();
    let kernel = MehlerKernel::new(&one_dim(p)?, p.horizon)?;
    let table = axis_table(&rule, scale, |x, y| kernel.ln_eval_unchecked(&[x], &[y]).exp());
    let nodes = TensorNodes::new(&rule, p.dim, scale);
    let trusted = trusted_axis_degree(quad_order);
    indices
        .iter()
        .map(|m| {
            let datum: Vec<f64> = (0..nodes.len())
                .map(|i| eigenmode_datum(m, p, &nodes.points[i]))
                .collect::<Result<_>>()?;
            let value = nodes.pair_sum(&table, &datum, &datum);
            let worst = m.entries().iter().copied().max().unwrap_or(0);
            let mut notes = Vec::new();
            if worst > trusted {
                notes.push(format!(
                    "axis degree {worst} exceeds {trusted}, trusted at quadrature order {quad_order}"
                ));
            }
            let exponent = m.total_degree() as f64 * u;
            if exponent > CANCELLATION_LIMIT {
                notes.push(format!(
                    "|m| lambda T = {exponent:.1} exceeds {CANCELLATION_LIMIT}, result dominated by rounding"
                ));
            }
            let accuracy_warning = (!notes.is_empty()).then(|| notes.join("; "));
            Ok(MassReport {
                index: m.clone(),
                value,
                quad_order,
                accuracy_warning,
            })
        })
        .collect()
}

pub fn signed_measure_total_mass(m: &MultiIndex, p: &HarmonicParams, quad_order: usize) -> Result<MassReport> {
    Ok(signed_measure_total_masses(std::slice::from_ref(m), p, quad_order)?.remove(0))
}

/// `ln p_m = N ln(2 sinh(lambda P/2)) - (|m| + N/2) lambda P`.
pub fn ln_mixture_weight(m: &MultiIndex, mp: &MixtureParams) -> Result<f64> {
    check_dim(mp.params.dim, m.dim())?;
    let level = m.total_degree() as f64 + 0.5 * mp.params.dim as f64;
    Ok(mp.ln_prefactor() - level * mp.params.lambda * mp.period())
}

/// Weight `p_m = (2(cosh(lambda P) - 1))^{N/2} e^{-(|m| + N/2) lambda P}` of mode `m`.
pub fn mixture_weight(m: &MultiIndex, mp: &MixtureParams) -> Result<f64> {
    Ok(ln_mixture_weight(m, mp)?.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PartialWeightSum {
    pub value: f64,
    /// `N e^{-(M+1) lambda P} / (1 - e^{-lambda P})`.
    pub tail_bound: f64,
}

/// `sum_{m_j <= M} p_m`, smallest terms first.
pub fn weight_partial_sum(mp: &MixtureParams, axis_cap: usize) -> Result<PartialWeightSum> {
    if axis_cap > MAX_AXIS_DEGREE {
        return domain(format!("axis cap {axis_cap} exceeds {MAX_AXIS_DEGREE}"));
    }
    let mut weights = multi_indices_by_degree(mp.params.dim, axis_cap)
        .iter()
        .map(|m| mixture_weight(m, mp))
        .collect::<Result<Vec<_>>>()?;
    weights.sort_by(|a, b| a.total_cmp(b));
    let u = mp.params.lambda * mp.period();
    let tail_bound = mp.params.dim as f64 * (-(axis_cap as f64 + 1.0) * u).exp() / -(-u).exp_m1();
    Ok(PartialWeightSum {
        value: weights.iter().sum(),
        tail_bound,
    })
}

/// Sum of all weights through the geometric series:
/// `(2 sinh(lambda P/2))^N e^{-N lambda P/2} (1 - e^{-lambda P})^{-N}`.
pub fn weight_total_closed(mp: &MixtureParams) -> f64 {
    let u = mp.params.lambda * mp.period();
    let n = mp.params.dim as f64;
    (mp.ln_prefactor() - 0.5 * n * u - n * (-(-u).exp_m1()).ln()).exp()
}

/// `(2(cosh(lambda P) - 1))^{N/2} g(x,T,y) g(x,theta T,y)`.
pub fn mixture_density_closed(x: &[f64], y: &[f64], mp: &MixtureParams) -> Result<f64> {
    Ok(ln_mixture_density(x, y, mp)?.exp())
}

fn ln_mixture_density(x: &[f64], y: &[f64], mp: &MixtureParams) -> Result<f64> {
    let p = &mp.params;
    Ok(mp.ln_prefactor() + log_mehler(x, p.horizon, y, p)? + log_mehler(x, mp.theta * p.horizon, y, p)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MixtureSeries {
    pub value: f64,
    /// Bound on the omitted modes plus a rounding allowance.
    pub tail_bound: f64,
}

/// `sum_{m_j <= M} p_m phi_m(x) psi_m(y) g(x,T,y)`.
pub fn mixture_density_series(x: &[f64], y: &[f64], mp: &MixtureParams, axis_cap: usize) -> Result<MixtureSeries> {
    let p = &mp.params;
    check_dim(p.dim, x.len())?;
    check_dim(p.dim, y.len())?;
    if axis_cap > MAX_AXIS_DEGREE {
        return domain(format!("axis cap {axis_cap} exceeds {MAX_AXIS_DEGREE}"));
    }
    let lambda = p.lambda;
    let root_l = lambda.sqrt();
    let ln_g = log_mehler(x, p.horizon, y, p)?;
    // per-axis products h_{k,lambda}(x_j) h_{k,lambda}(y_j)
    let mut pairs = Vec::with_capacity(p.dim);
    let mut hx = vec![0.0; axis_cap + 1];
    let mut hy = vec![0.0; axis_cap + 1];
    for (&xj, &yj) in x.iter().zip(y) {
        fill_hermite(root_l * xj, &mut hx);
        fill_hermite(root_l * yj, &mut hy);
        pairs.push(hx.iter().zip(&hy).map(|(a, b)| root_l * a * b).collect::<Vec<f64>>());
    }
    let mut value = 0.0;
    let mut abs_total = 0.0;
    for m in multi_indices_by_degree(p.dim, axis_cap) {
        let level = m.total_degree() as f64 + 0.5 * p.dim as f64;
        let ln_scale = ln_mixture_weight(&m, mp)? + level * lambda * p.horizon + ln_g;
        let hermite: f64 = m.entries().iter().enumerate().map(|(j, &k)| pairs[j][k]).product();
        let term = ln_scale.exp() * hermite;
        value += term;
        abs_total += term.abs();
    }
    // omitted modes: per axis, geometric tail at rate lambda theta T
    let u = lambda * mp.theta * p.horizon;
    let tail = axis_tail_bound(lambda, u, axis_cap);
    let mut kept = 1.0;
    let mut with_tail = 1.0;
    for pair in &pairs {
        let s: f64 = pair
            .iter()
            .enumerate()
            .map(|(k, v)| (-(k as f64 + 0.5) * u).exp() * v)
            .sum();
        kept *= s.abs();
        with_tail *= s.abs() + tail;
    }
    let outer = (mp.ln_prefactor() + ln_g).exp();
    let count = (axis_cap + 1).pow(p.dim as u32) as f64;
    let rounding = 4.0 * count * f64::EPSILON * abs_total;
    Ok(MixtureSeries {
        value,
        tail_bound: outer * (with_tail - kept) + rounding,
    })
}

/// `(2 sinh(lambda P/2))^{-N}`, closed form of `int int g(x,T,y) g(x,theta T,y)`.
pub fn kernel_pair_trace_closed(mp: &MixtureParams) -> f64 {
    (-mp.ln_prefactor()).exp()
}

/// `int int g(x,T,y) g(x,theta T,y) dx dy` by tensor Gauss-Hermite quadrature.
pub fn kernel_pair_trace(mp: &MixtureParams, quad_order: usize) -> Result<f64> {
    let p = &mp.params;
    let rule = GaussHermite::new(quad_order)?;
    let (u1, u2) = (p.lambda * p.horizon, p.lambda * mp.theta * p.horizon);
    let flat = p.lambda * ((0.5 * u1).tanh() + (0.5 * u2).tanh());
    let scale = (2.0 / flat).sqrt();
    let p1 = one_dim(p)?;
    let first = MehlerKernel::new(&p1, p.horizon)?;
    let second = MehlerKernel::new(&p1, mp.theta * p.horizon)?;
    let table = axis_table(&rule, scale, |x, y| {
        (first.ln_eval_unchecked(&[x], &[y]) + second.ln_eval_unchecked(&[x], &[y])).exp()
    });
    let nodes = TensorNodes::new(&rule, p.dim, scale);
    let ones = vec![1.0; nodes.len()];
    Ok(nodes.pair_sum(&table, &ones, &ones))
}

/// `int int mixture_density_closed`, expected 1.
pub fn mixture_total_mass(mp: &MixtureParams, quad_order: usize) -> Result<f64> {
    Ok(mp.ln_prefactor().exp() * kernel_pair_trace(mp, quad_order)?)
}

/// Diagonal density `(2(cosh(lambda T) - 1))^{N/2} g(x,T,x)` of the limiting
/// measure at `theta = 0`.
pub fn limiting_diagonal_density(x: &[f64], p: &HarmonicParams) -> Result<f64> {
    Ok((ln_prefactor(p.lambda * p.horizon, p.dim) + log_mehler(x, p.horizon, x, p)?).exp())
}

/// `int limiting_diagonal_density(x) dx`, expected 1.
pub fn limiting_diagonal_mass(p: &HarmonicParams, quad_order: usize) -> Result<f64> {
    let rule = GaussHermite::new(quad_order)?;
    let scale = 1.0 / (p.lambda * (0.5 * p.lambda * p.horizon).tanh()).sqrt();
    let kernel = MehlerKernel::new(p, p.horizon)?;
    let ln_pre = ln_prefactor(p.lambda * p.horizon, p.dim);
    Ok(rule.integrate_nd(&vec![0.0; p.dim], scale, |x| {
        (ln_pre + kernel.ln_eval_unchecked(x, x)).exp()
    }))
}

/// Measured and predicted mixed second difference of `ln(mu(x,y) / g(x,T,y))`
/// over the rectangle `{x1, x2} x {y1, y2}`; a Markovian endpoint law gives 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovWitness {
    pub measured: f64,
    /// `lambda <x1 - x2, y1 - y2> / sinh(lambda theta T)`.
    pub predicted: f64,
}

pub fn non_markov_witness(mp: &MixtureParams, x: [&[f64]; 2], y: [&[f64]; 2]) -> Result<MarkovWitness> {
    let p = &mp.params;
    let f =
        |a: &[f64], b: &[f64]| -> Result<f64> { Ok(ln_mixture_density(a, b, mp)? - log_mehler(a, p.horizon, b, p)?) };
    let measured = f(x[0], y[0])? - f(x[0], y[1])? - f(x[1], y[0])? + f(x[1], y[1])?;
    let inner: f64 = x[0]
        .iter()
        .zip(x[1])
        .zip(y[0].iter().zip(y[1]))
        .map(|((a1, a2), (b1, b2))| (a1 - a2) * (b1 - b2))
        .sum();
    Ok(MarkovWitness {
        measured,
        predicted: p.lambda * inner * csch(p.lambda * mp.theta * p.horizon),
    })
}
