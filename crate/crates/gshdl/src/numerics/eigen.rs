//! Symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! Plane rotations annihilate off-diagonal entries one at a time; the
//! accumulated rotation product is the eigenvector matrix. Foolproof for
//! real symmetric matrices and plenty fast at the dimensions used here
//! (patch-size squared times channels).

use crate::error::{Error, Result};

/// Dense symmetric matrix, row-major.
#[derive(Debug, Clone)]
pub struct SymMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl SymMatrix {
    /// Validates symmetry to within 1e-12 absolute and finiteness.
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::Dimension(format!(
                "matrix entry count {} does not match {n}x{n}",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("matrix contains non-finite entries".into()));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (entries[i * n + j] - entries[j * n + i]).abs() > 1e-12 {
                    return Err(Error::Data(format!(
                        "matrix asymmetric at ({i},{j}): {} vs {}",
                        entries[i * n + j],
                        entries[j * n + i]
                    )));
                }
            }
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Gram matrix X·Xᵀ of a d x m column collection (columns stored
    /// contiguously).
    pub fn gram_from_columns(dim: usize, columns: &[f64]) -> Result<Self> {
        if dim == 0 || columns.len() % dim != 0 {
            return Err(Error::Dimension("column data does not tile the dimension".into()));
        }
        let m = columns.len() / dim;
        let mut entries = vec![0.0; dim * dim];
        for c in 0..m {
            let col = &columns[c * dim..(c + 1) * dim];
            for i in 0..dim {
                let vi = col[i];
                if vi == 0.0 {
                    continue;
                }
                for j in i..dim {
                    entries[i * dim + j] += vi * col[j];
                }
            }
        }
        for i in 0..dim {
            for j in 0..i {
                entries[i * dim + j] = entries[j * dim + i];
            }
        }
        SymMatrix::new(dim, entries)
    }
}

/// Eigendecomposition result: eigenvalues descending, eigenvectors as
/// orthonormal columns of a row-major n x n matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<f64>,
    pub n: usize,
}

impl EigenDecomposition {
    /// Column `k` of the eigenvector matrix.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.eigenvectors[i * self.n + k]).collect()
    }
}

const JACOBI_SWEEPS_MAX: usize = 64;

/// Full eigendecomposition of a symmetric matrix, eigenvalues sorted
/// descending.
pub fn sym_eigen(m: &SymMatrix) -> Result<EigenDecomposition> {
    let n = m.n;
    let mut a = m.entries.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[i * n + j].abs();
            }
        }
        s
    };

    // Scale-aware stopping threshold.
    let scale: f64 = m.entries.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    let tol = 1e-15 * scale * (n * n) as f64;

    let mut converged = false;
    for _ in 0..JACOBI_SWEEPS_MAX {
        if off_norm(&a) <= tol {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = 0.5 * (aqq - app) / apq;
                let t = if theta.abs() > 1e150 {
                    // Avoid overflow in theta^2; limit of the formula below.
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for j in 0..n {
                    if j != p && j != q {
                        let ajp = a[j * n + p];
                        let ajq = a[j * n + q];
                        let np = ajp - s * (ajq + tau * ajp);
                        let nq = ajq + s * (ajp - tau * ajq);
                        a[j * n + p] = np;
                        a[p * n + j] = np;
                        a[j * n + q] = nq;
                        a[q * n + j] = nq;
                    }
                }
                for j in 0..n {
                    let vjp = v[j * n + p];
                    let vjq = v[j * n + q];
                    v[j * n + p] = vjp - s * (vjq + tau * vjp);
                    v[j * n + q] = vjq + s * (vjp - tau * vjq);
                }
            }
        }
    }
    if !converged && off_norm(&a) > tol * 10.0 {
        return Err(Error::Numerical("Jacobi sweeps did not converge".into()));
    }

    // Sort descending by eigenvalue, permuting the eigenvector columns.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].partial_cmp(&a[i * n + i]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[i * n + i]).collect();
    let mut eigenvectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[row * n + new_col] = v[row * n + old_col];
        }
    }

    Ok(EigenDecomposition { eigenvalues, eigenvectors, n })
}
