//! Dense symmetric-matrix utilities: Cholesky, Gauss-Jordan inversion and
//! Kronecker expansion with an identity.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, domain, Error, Result};

/// Relative tolerance used when checking symmetry on construction.
pub const SYMMETRY_TOL: f64 = 1e-13;

/// Square symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from row-major data, checking squareness and symmetry.
    pub fn from_row_major(order: usize, data: Vec<f64>) -> Result<Self> {
        if order == 0 {
            return domain("matrix order must be positive");
        }
        check_dim(order * order, data.len())?;
        let scale = data.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        for i in 0..order {
            for j in 0..i {
                let (a, b) = (data[i * order + j], data[j * order + i]);
                if (a - b).abs() > SYMMETRY_TOL * scale {
                    return domain(format!("matrix is not symmetric at ({i},{j}): {a} vs {b}"));
                }
            }
        }
        Ok(Self { order, data })
    }

    /// Builds from the lower triangle of `f(i, j)`, mirroring it.
    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; order * order];
        for i in 0..order {
            for j in 0..=i {
                let v = f(i, j);
                data[i * order + j] = v;
                data[j * order + i] = v;
            }
        }
        Self { order, data }
    }

    pub fn identity(order: usize) -> Self {
        Self::from_fn(order, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |i, j| if i == j { values[i] } else { 0.0 })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Principal submatrix on `indices`.
    pub fn submatrix(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |i, j| self.get(indices[i], indices[j]))
    }

    /// Row-major product `self * other`.
    pub fn matmul(&self, other: &SymMatrix) -> Result<Vec<f64>> {
        check_dim(self.order, other.order)?;
        let n = self.order;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            order: self.order,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// `max_i sum_j |(A B - I)_{ij}|`, the induced infinity norm of `A B - I`.
pub fn identity_residual(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    let n = a.order();
    let prod = a.matmul(b)?;
    Ok((0..n)
        .map(|i| {
            (0..n)
                .map(|j| (prod[i * n + j] - if i == j { 1.0 } else { 0.0 }).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max))
}

/// Largest entrywise absolute difference.
pub fn max_abs_diff(a: &SymMatrix, b: &SymMatrix) -> Result<f64> {
    check_dim(a.order(), b.order())?;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Lower-triangular `L` with `L L^T = A + jitter I`.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    order: usize,
    lower: Vec<f64>,
    jitter: f64,
}

impl CholeskyFactor {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.order + j]
    }

    /// `L z`.
    pub fn mul_vec(&self, z: &[f64], out: &mut [f64]) {
        let n = self.order;
        for (i, o) in out.iter_mut().enumerate().take(n) {
            let row = &self.lower[i * n..i * n + i + 1];
            *o = row.iter().zip(z).map(|(l, v)| l * v).sum();
        }
    }

    /// `L L^T`.
    pub fn reconstruct(&self) -> SymMatrix {
        let n = self.order;
        SymMatrix::from_fn(n, |i, j| (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum())
    }
}

/// Cholesky factorization of `a + jitter I`. Fails on the first
/// non-positive pivot instead of escalating the jitter.
pub fn cholesky(a: &SymMatrix, jitter: f64) -> Result<CholeskyFactor> {
    if !(jitter >= 0.0 && jitter.is_finite()) {
        return domain(format!("jitter must be nonnegative, got {jitter}"));
    }
    let n = a.order();
    let mut lower = vec![0.0; n * n];
    for j in 0..n {
        let mut diag = a.get(j, j) + jitter;
        for k in 0..j {
            diag -= lower[j * n + k] * lower[j * n + k];
        }
        if diag.is_nan() || diag <= 0.0 {
            return Err(Error::NotPositiveDefinite { index: j, pivot: diag });
        }
        let d = diag.sqrt();
        lower[j * n + j] = d;
        for i in j + 1..n {
            let mut s = a.get(i, j);
            for k in 0..j {
                s -= lower[i * n + k] * lower[j * n + k];
            }
            lower[i * n + j] = s / d;
        }
    }
    Ok(CholeskyFactor {
        order: n,
        lower,
        jitter,
    })
}

/// Dense inverse by Gauss-Jordan elimination with partial pivoting. The
/// result is symmetrized.
pub fn invert_dense(a: &SymMatrix) -> Result<SymMatrix> {
    let n = a.order();
    let scale = a.max_abs();
    if scale == 0.0 {
        return Err(Error::Singular { column: 0 });
    }
    let mut m = a.as_slice().to_vec();
    let mut inv = SymMatrix::identity(n).data;
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r, &s| m[r * n + col].abs().total_cmp(&m[s * n + col].abs()))
            .unwrap_or(col);
        let pivot = m[pivot_row * n + col];
        if pivot.abs() <= f64::EPSILON * scale * n as f64 {
            return Err(Error::Singular { column: col });
        }
        if pivot_row != col {
            for j in 0..n {
                m.swap(pivot_row * n + j, col * n + j);
                inv.swap(pivot_row * n + j, col * n + j);
            }
        }
        let p_inv = 1.0 / pivot;
        for j in 0..n {
            m[col * n + j] *= p_inv;
            inv[col * n + j] *= p_inv;
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r * n + col];
            if factor == 0.0 {
                continue;
            }
            for j in 0..n {
                m[r * n + j] -= factor * m[col * n + j];
                inv[r * n + j] -= factor * inv[col * n + j];
            }
        }
    }
    Ok(SymMatrix::from_fn(n, |i, j| 0.5 * (inv[i * n + j] + inv[j * n + i])))
}

/// `C (x) I_N`: entry `((k,i),(l,j))` at `(k N + i, l N + j)` equals `C_{kl} delta_{ij}`.
pub fn kron_with_identity(c: &SymMatrix, dim: usize) -> Result<SymMatrix> {
    if dim == 0 {
        return domain("identity dimension must be positive");
    }
    let n = c.order();
    Ok(SymMatrix::from_fn(n * dim, |r, s| {
        if r % dim == s % dim {
            c.get(r / dim, s / dim)
        } else {
            0.0
        }
    }))
}
