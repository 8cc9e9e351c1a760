//! Path generation and Monte Carlo moment estimation.
//!
//! Paths are drawn in fixed chunks of [`CHUNK_PATHS`]; chunk `c` uses a
//! ChaCha20 generator seeded with `seed` on stream `c`, so a batch is
//! reproducible bit-for-bit regardless of how many threads run it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian_linalg::{cholesky, SymMatrix};
use crate::params::{HarmonicParams, TimeGrid};
use crate::processes::{GaussianLaw, ProcessSpec};

/// Name of the generator, recorded with every batch.
pub const RNG_ALGORITHM: &str = "chacha20";

pub const CHUNK_PATHS: usize = 4096;

pub const DEFAULT_SUBSTEPS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerTag {
    Exact,
    OuRecursion,
    PeriodicExplicit,
}

impl SamplerTag {
    pub fn as_str(self) -> &'static str {
        match self {
            SamplerTag::Exact => "exact",
            SamplerTag::OuRecursion => "ou_recursion",
            SamplerTag::PeriodicExplicit => "periodic_explicit",
        }
    }
}

/// Where the recursive OU sampler starts at `t = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuStart {
    /// `X_0 ~ N(0, 1/(2 lambda))` per component.
    Stationary,
    Origin,
}

/// `count` paths on `grid`, stored path-major then time-major:
/// value `(p, k, i)` sits at `(p n + k) N + i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathBatch {
    pub spec: ProcessSpec,
    pub grid: TimeGrid,
    pub count: usize,
    pub seed: u64,
    pub sampler: SamplerTag,
    pub rng: &'static str,
    /// Mesh refinement per grid interval, periodic sampler only.
    pub substeps: Option<usize>,
    pub values: Vec<f64>,
}

impl PathBatch {
    pub fn dim(&self) -> usize {
        self.spec.params.dim
    }

    /// Length of one path, `n N`.
    pub fn path_len(&self) -> usize {
        self.grid.len() * self.dim()
    }

    pub fn path(&self, p: usize) -> &[f64] {
        let len = self.path_len();
        &self.values[p * len..(p + 1) * len]
    }

    pub fn value(&self, p: usize, k: usize, i: usize) -> f64 {
        self.values[(p * self.grid.len() + k) * self.dim() + i]
    }
}

/// Fills `out` (a whole number of paths of length `path_len`) chunk by chunk.
fn fill_chunked(out: &mut [f64], path_len: usize, seed: u64, draw: impl Fn(&mut ChaCha20Rng, &mut [f64]) + Sync) {
    out.par_chunks_mut(CHUNK_PATHS * path_len)
        .enumerate()
        .for_each(|(c, chunk)| {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            for path in chunk.chunks_exact_mut(path_len) {
                draw(&mut rng, path);
            }
        });
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return domain("path count must be positive");
    }
    Ok(())
}

/// `count` draws of `mean + L xi` flattened one after another; deterministic
/// coordinates copy the mean.
pub fn sample_law(law: &GaussianLaw, count: usize, seed: u64) -> Result<Vec<f64>> {
    check_count(count)?;
    let len = law.len();
    let free = law.free_coordinates();
    let factor = if free.is_empty() {
        None
    } else {
        Some(cholesky(&law.free_covariance(), 0.0)?)
    };
    let mut out = vec![0.0; count * len];
    fill_chunked(&mut out, len, seed, |rng, path| {
        path.copy_from_slice(&law.mean);
        if let Some(factor) = &factor {
            let xi: Vec<f64> = (0..free.len()).map(|_| rng.sample(StandardNormal)).collect();
            let mut correlated = vec![0.0; free.len()];
            factor.mul_vec(&xi, &mut correlated);
            for (&coord, z) in free.iter().zip(&correlated) {
                path[coord] += z;
            }
        }
    });
    Ok(out)
}

/// Exact sampling from the finite-dimensional law of `spec` on `grid`.
pub fn sample_exact(spec: &ProcessSpec, grid: &TimeGrid, count: usize, seed: u64) -> Result<PathBatch> {
    let law = spec.fdd_law(grid)?;
    Ok(PathBatch {
        spec: spec.clone(),
        grid: grid.clone(),
        count,
        seed,
        sampler: SamplerTag::Exact,
        rng: RNG_ALGORITHM,
        substeps: None,
        values: sample_law(&law, count, seed)?,
    })
}

/// `(e^{-lambda dt}, sqrt((1 - e^{-2 lambda dt}) / (2 lambda)))`: decay and
/// conditional standard deviation of one exact OU step.
pub fn ou_transition(lambda: f64, dt: f64) -> (f64, f64) {
    let decay = (-lambda * dt).exp();
    let var = -(-2.0 * lambda * dt).exp_m1() / (2.0 * lambda);
    (decay, var.sqrt())
}

/// Exact recursive simulation of `dX = -lambda X dt + dW` on `grid`, started
/// at `t = 0` from `initial`.
pub fn sample_ou_recursion(
    p: &HarmonicParams,
    grid: &TimeGrid,
    initial: OuStart,
    count: usize,
    seed: u64,
) -> Result<PathBatch> {
    check_count(count)?;
    let spec = match initial {
        OuStart::Stationary => ProcessSpec::stationary(*p),
        OuStart::Origin => ProcessSpec::pinned(*p),
    };
    spec.check_law_grid(grid)?;
    let dim = p.dim;
    let lambda = p.lambda;
    let mut previous = 0.0;
    let steps: Vec<(f64, f64)> = grid
        .times()
        .iter()
        .map(|&t| {
            let step = ou_transition(lambda, t - previous);
            previous = t;
            step
        })
        .collect();
    let start_sd = (0.5 / lambda).sqrt();
    let len = grid.len() * dim;
    let mut values = vec![0.0; count * len];
    fill_chunked(&mut values, len, seed, |rng, path| {
        let mut state: Vec<f64> = match initial {
            OuStart::Stationary => (0..dim)
                .map(|_| start_sd * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            OuStart::Origin => vec![0.0; dim],
        };
        for (k, &(decay, sd)) in steps.iter().enumerate() {
            for (i, x) in state.iter_mut().enumerate() {
                // a zero-length first step leaves the start untouched
                if sd > 0.0 {
                    *x = decay * *x + sd * rng.sample::<f64, _>(StandardNormal);
                }
                path[k * dim + i] = *x;
            }
        }
    });
    Ok(PathBatch {
        spec,
        grid: grid.clone(),
        count,
        seed,
        sampler: SamplerTag::OuRecursion,
        rng: RNG_ALGORITHM,
        substeps: None,
        values,
    })
}

/// Refined mesh for the periodic sampler: `{0} u grid u {T}` with every
/// interval cut into `substeps` equal pieces. Returns the mesh and the mesh
/// index of each grid time.
pub fn periodic_mesh(horizon: f64, grid: &TimeGrid, substeps: usize) -> (Vec<f64>, Vec<usize>) {
    let mut breaks = vec![0.0];
    breaks.extend(grid.times().iter().copied().filter(|&t| t > 0.0 && t < horizon));
    breaks.push(horizon);
    let mut mesh = vec![0.0];
    for w in breaks.windows(2) {
        for j in 1..=substeps {
            mesh.push(if j == substeps {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * j as f64 / substeps as f64
            });
        }
    }
    let index = grid
        .times()
        .iter()
        .map(|&t| mesh.iter().position(|&s| s == t).unwrap_or(0))
        .collect();
    (mesh, index)
}

/// Periodic OU paths `X_t = e^{-lambda t} Y_T / (1 - e^{-lambda T}) + Y_t` with
/// `Y_t = int_0^t e^{-lambda (t - s)} dW_s`, both integrals driven by one Wiener
/// increment stream and evaluated at the left point of each mesh cell.
pub fn sample_periodic_ou(
    p: &HarmonicParams,
    grid: &TimeGrid,
    count: usize,
    seed: u64,
    substeps: usize,
) -> Result<PathBatch> {
    check_count(count)?;
    if substeps == 0 {
        return domain("substeps must be at least 1");
    }
    let spec = ProcessSpec::periodic(*p, 0.0)?;
    if grid.first() < 0.0 || grid.last() > p.horizon {
        return domain(format!("grid must lie in [0, {}]", p.horizon));
    }
    let (mesh, index) = periodic_mesh(p.horizon, grid, substeps);
    let lambda = p.lambda;
    let cells: Vec<(f64, f64)> = mesh
        .windows(2)
        .map(|w| {
            let dt = w[1] - w[0];
            ((-lambda * dt).exp(), dt.sqrt())
        })
        .collect();
    let wrap = 1.0 / -(-lambda * p.horizon).exp_m1();
    let decay_to: Vec<f64> = grid.times().iter().map(|&t| (-lambda * t).exp()).collect();
    let dim = p.dim;
    let len = grid.len() * dim;
    let mut values = vec![0.0; count * len];
    fill_chunked(&mut values, len, seed, |rng, path| {
        let mut running = vec![0.0; mesh.len()];
        for i in 0..dim {
            running[0] = 0.0;
            for (j, &(decay, sd)) in cells.iter().enumerate() {
                let dw = sd * rng.sample::<f64, _>(StandardNormal);
                running[j + 1] = decay * (running[j] + dw);
            }
            let end = running[mesh.len() - 1];
            for (k, &m) in index.iter().enumerate() {
                path[k * dim + i] = decay_to[k] * end * wrap + running[m];
            }
        }
    });
    Ok(PathBatch {
        spec,
        grid: grid.clone(),
        count,
        seed,
        sampler: SamplerTag::PeriodicExplicit,
        rng: RNG_ALGORITHM,
        substeps: Some(substeps),
        values,
    })
}

/// Empirical first and second moments of a batch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub mean: Vec<f64>,
    /// Unbiased sample covariance.
    pub covariance: SymMatrix,
    /// Sample std of each coordinate over `sqrt(count)`.
    pub mean_std_errors: Vec<f64>,
    /// Sample std of the centred products `(x_a - m_a)(x_b - m_b)` over `sqrt(count)`.
    pub std_errors: SymMatrix,
    pub count: usize,
}

/// Two-pass moments of `count` vectors of length `len` stored back to back.
pub fn moments(values: &[f64], len: usize, count: usize) -> Result<MomentReport> {
    if count < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 paths, got {count}")));
    }
    crate::error::check_dim(len * count, values.len())?;
    let n = count as f64;
    let mut mean = vec![0.0; len];
    for row in values.chunks_exact(len) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);

    let pairs = len * (len + 1) / 2;
    let mut sum = vec![0.0; pairs];
    let mut sum_sq = vec![0.0; pairs];
    let mut centered = vec![0.0; len];
    for row in values.chunks_exact(len) {
        for ((c, v), m) in centered.iter_mut().zip(row).zip(&mean) {
            *c = v - m;
        }
        let mut idx = 0;
        for a in 0..len {
            for b in 0..=a {
                let prod = centered[a] * centered[b];
                sum[idx] += prod;
                sum_sq[idx] += prod * prod;
                idx += 1;
            }
        }
    }
    let mut cov = vec![0.0; pairs];
    let mut se = vec![0.0; pairs];
    for idx in 0..pairs {
        cov[idx] = sum[idx] / (n - 1.0);
        let avg = sum[idx] / n;
        let spread = ((sum_sq[idx] / n - avg * avg).max(0.0) * n / (n - 1.0)).sqrt();
        se[idx] = spread / n.sqrt();
    }
    let tri = |i: usize, j: usize| {
        let (a, b) = if i >= j { (i, j) } else { (j, i) };
        a * (a + 1) / 2 + b
    };
    let covariance = SymMatrix::from_fn(len, |i, j| cov[tri(i, j)]);
    let std_errors = SymMatrix::from_fn(len, |i, j| se[tri(i, j)]);
    let mean_std_errors = (0..len).map(|a| (covariance.get(a, a) / n).sqrt()).collect();
    Ok(MomentReport {
        mean,
        covariance,
        mean_std_errors,
        std_errors,
        count,
    })
}

pub fn empirical_covariance(batch: &PathBatch) -> Result<MomentReport> {
    moments(&batch.values, batch.path_len(), batch.count)
}

/// Ratio `|empirical - exact| / se`; zero-spread entries count as 0 when
/// the difference is at rounding level and infinity otherwise.
fn standardized(diff: f64, se: f64, scale: f64) -> f64 {
    if se > 0.0 {
        diff.abs() / se
    } else if diff.abs() <= 1e-12 * scale.max(1.0) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Largest `|C_emp - C| / se` over all entries; `allowance` is added to the
/// numerator's budget before dividing.
pub fn max_standardized_deviation(report: &MomentReport, reference: &SymMatrix, allowance: f64) -> Result<f64> {
    crate::error::check_dim(report.covariance.order(), reference.order())?;
    let len = reference.order();
    let mut worst = 0.0_f64;
    for i in 0..len {
        for j in 0..=i {
            let diff = ((report.covariance.get(i, j) - reference.get(i, j)).abs() - allowance).max(0.0);
            worst = worst.max(standardized(
                diff,
                report.std_errors.get(i, j),
                reference.get(i, j).abs(),
            ));
        }
    }
    Ok(worst)
}

/// Largest `|C_a - C_b| / sqrt(se_a^2 + se_b^2)` over all entries.
pub fn max_standardized_difference(a: &MomentReport, b: &MomentReport) -> Result<f64> {
    crate::error::check_dim(a.covariance.order(), b.covariance.order())?;
    let len = a.covariance.order();
    let mut worst = 0.0_f64;
    for i in 0..len {
        for j in 0..=i {
            let se = a.std_errors.get(i, j).hypot(b.std_errors.get(i, j));
            let diff = a.covariance.get(i, j) - b.covariance.get(i, j);
            worst = worst.max(standardized(diff, se, a.covariance.get(i, j).abs()));
        }
    }
    Ok(worst)
}
