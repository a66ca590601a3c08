//! Small dense symmetric-matrix helpers (row-major slices of size m*m).

use nalgebra::{DMatrix, SymmetricEigen};

pub fn to_dmatrix(m: usize, a: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, m, a)
}

pub fn det(m: usize, a: &[f64]) -> f64 {
    match m {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => to_dmatrix(m, a).determinant(),
    }
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn sym_eigenvalues(m: usize, a: &[f64]) -> Vec<f64> {
    match m {
        0 => Vec::new(),
        1 => vec![a[0]],
        2 => {
            let tr = 0.5 * (a[0] + a[3]);
            let d = 0.5 * (a[0] - a[3]);
            let off = 0.5 * (a[1] + a[2]);
            let r = d.hypot(off);
            vec![tr - r, tr + r]
        }
        _ => {
            let mut ev: Vec<f64> = SymmetricEigen::new(to_dmatrix(m, a)).eigenvalues.iter().copied().collect();
            ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
            ev
        }
    }
}

pub fn trace(m: usize, a: &[f64]) -> f64 {
    (0..m).map(|i| a[i * m + i]).sum()
}

/// Inverse of an invertible matrix; `None` when singular.
pub fn inverse(m: usize, a: &[f64]) -> Option<Vec<f64>> {
    match m {
        1 => (a[0] != 0.0).then(|| vec![1.0 / a[0]]),
        2 => {
            let d = det(2, a);
            (d != 0.0).then(|| vec![a[3] / d, -a[1] / d, -a[2] / d, a[0] / d])
        }
        _ => to_dmatrix(m, a).try_inverse().map(|inv| {
            let mut out = Vec::with_capacity(m * m);
            for i in 0..m {
                for j in 0..m {
                    out.push(inv[(i, j)]);
                }
            }
            out
        }),
    }
}

pub fn matmul(m: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; m * m];
    for i in 0..m {
        for k in 0..m {
            let aik = a[i * m + k];
            for j in 0..m {
                out[i * m + j] += aik * b[k * m + j];
            }
        }
    }
    out
}

/// Elementary symmetric polynomials e_0..e_m of the given values.
pub fn elementary_symmetric(values: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; values.len() + 1];
    e[0] = 1.0;
    for (k, &x) in values.iter().enumerate() {
        for j in (1..=k + 1).rev() {
            e[j] += x * e[j - 1];
        }
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms_match_nalgebra() {
        let a = [2.0, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 0.9];
        assert!((det(3, &a) - to_dmatrix(3, &a).determinant()).abs() < 1e-14);
        let ev = sym_eigenvalues(3, &a);
        assert!((ev.iter().product::<f64>() - det(3, &a)).abs() < 1e-13);
        let b = [2.0, 0.7, 0.7, -1.0];
        let ev2 = sym_eigenvalues(2, &b);
        assert!((ev2[0] * ev2[1] - det(2, &b)).abs() < 1e-14);
        assert!((ev2[0] + ev2[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn elementary_symmetric_of_three() {
        let e = elementary_symmetric(&[1.0, 2.0, 3.0]);
        assert_eq!(e, vec![1.0, 6.0, 11.0, 6.0]);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = [4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0];
        let inv = inverse(3, &a).unwrap();
        let id = matmul(3, &a, &inv);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((id[i * 3 + j] - want).abs() < 1e-14);
            }
        }
    }
}
