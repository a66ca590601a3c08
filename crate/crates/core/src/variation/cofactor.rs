//! Cofactors `c_ij = d det / d m_ij` and second cofactors
//! `c_ij,kl = d^2 det / (d m_ij d m_kl)` of symmetric matrices.

use crate::error::{Error, Result};
use crate::linalg;

pub const MAX_COFACTOR_SIZE: usize = 8;

#[derive(Clone, Debug)]
pub struct CofactorData {
    size: usize,
    matrix: Vec<f64>,
    cofactors: Vec<f64>,
    second: Vec<f64>,
}

fn submatrix(m: usize, a: &[f64], rows: &[usize], cols: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity((m - rows.len()) * (m - cols.len()));
    for i in (0..m).filter(|i| !rows.contains(i)) {
        for j in (0..m).filter(|j| !cols.contains(j)) {
            out.push(a[i * m + j]);
        }
    }
    out
}

fn sign(p: usize) -> f64 {
    if p % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Cofactor matrix only (row-major). For symmetric invertible `M` this is
/// `det(M) M^{-1}`.
pub fn cofactor_matrix(m: usize, a: &[f64]) -> Vec<f64> {
    match m {
        1 => vec![1.0],
        2 => vec![a[3], -a[2], -a[1], a[0]],
        _ => {
            let mut c = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    c[i * m + j] = sign(i + j) * linalg::det(m - 1, &submatrix(m, a, &[i], &[j]));
                }
            }
            c
        }
    }
}

/// `sum c_ij,kl X_ij Y_kl = det(Q)[tr(Q^-1 X) tr(Q^-1 Y) - tr(Q^-1 X Q^-1 Y)]`
/// for invertible `Q`.
pub fn det_second_derivative(m: usize, q: &[f64], x: &[f64], y: &[f64]) -> f64 {
    let inv = match linalg::inverse(m, q) {
        Some(inv) => inv,
        None => return f64::NAN,
    };
    let ix = linalg::matmul(m, &inv, x);
    let iy = linalg::matmul(m, &inv, y);
    let cross: f64 = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| ix[i * m + j] * iy[j * m + i]).sum();
    linalg::det(m, q) * (linalg::trace(m, &ix) * linalg::trace(m, &iy) - cross)
}

pub fn cofactor(matrix: &[f64], size: usize) -> Result<CofactorData> {
    let m = size;
    if m == 0 || m > MAX_COFACTOR_SIZE || matrix.len() != m * m {
        return Err(Error::InvalidParameter(format!("cofactor needs a square matrix of size 1..={MAX_COFACTOR_SIZE}")));
    }
    let scale = matrix.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    for i in 0..m {
        for j in 0..i {
            if (matrix[i * m + j] - matrix[j * m + i]).abs() > 1e-12 * scale {
                return Err(Error::NonSymmetric);
            }
        }
    }
    let cofactors = cofactor_matrix(m, matrix);
    let mut second = vec![0.0; m * m * m * m];
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    if i == k || j == l {
                        continue;
                    }
                    let eps = sign(i + j + k + l) * if k > i { 1.0 } else { -1.0 } * if l > j { 1.0 } else { -1.0 };
                    let minor = submatrix(m, matrix, &[i, k], &[j, l]);
                    second[((i * m + j) * m + k) * m + l] = eps * linalg::det(m - 2, &minor);
                }
            }
        }
    }
    Ok(CofactorData { size: m, matrix: matrix.to_vec(), cofactors, second })
}

impl CofactorData {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn cofactors(&self) -> &[f64] {
        &self.cofactors
    }

    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.cofactors[i * self.size + j]
    }

    pub fn c2(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let m = self.size;
        self.second[((i * m + j) * m + k) * m + l]
    }

    /// `max(1, max |m_ij|)^N`, the size of a typical determinant term.
    pub fn scale(&self) -> f64 {
        self.matrix.iter().fold(1.0f64, |acc, x| acc.max(x.abs())).powi(self.size as i32)
    }

    /// `|sum c_ij m_ij - N det M|`
    pub fn homog1_residual(&self) -> f64 {
        let m = self.size;
        let s: f64 = self.cofactors.iter().zip(&self.matrix).map(|(c, x)| c * x).sum();
        (s - m as f64 * linalg::det(m, &self.matrix)).abs()
    }

    /// `max_ij |sum_kl c_ij,kl m_kl - (N - 1) c_ij|`
    pub fn homog2_residual(&self) -> f64 {
        let m = self.size;
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                let mut s = 0.0;
                for k in 0..m {
                    for l in 0..m {
                        s += self.c2(i, j, k, l) * self.matrix[k * m + l];
                    }
                }
                worst = worst.max((s - (m as f64 - 1.0) * self.c(i, j)).abs());
            }
        }
        worst
    }
}
