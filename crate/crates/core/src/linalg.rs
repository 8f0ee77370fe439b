//! Small dense symmetric linear algebra: Cholesky and cyclic Jacobi.

use crate::error::{Error, Result};

/// Row-major square matrix.
pub type Matrix = Vec<Vec<f64>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn transpose(a: &Matrix) -> Matrix {
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    (0..m).map(|j| (0..n).map(|i| a[i][j]).collect()).collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let k = b.len();
    let m = b.first().map_or(0, Vec::len);
    let mut c = vec![vec![0.0; m]; n];
    for i in 0..n {
        for l in 0..k {
            let x = a[i][l];
            for j in 0..m {
                c[i][j] += x * b[l][j];
            }
        }
    }
    c
}

pub fn matvec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// vᵀAv.
pub fn quadratic_form(a: &Matrix, v: &[f64]) -> f64 {
    matvec(a, v).iter().zip(v).map(|(x, y)| x * y).sum()
}

/// (A + Aᵀ)/2.
pub fn symmetrize(a: &Matrix) -> Matrix {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (a[i][j] + a[j][i])).collect())
        .collect()
}

/// Lower-triangular L with A = LLᵀ.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) {
                    return Err(Error::NotPositiveDefinite);
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_inverse(l: &Matrix) -> Matrix {
    let n = l.len();
    let mut inv = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in col..n {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (col..i).map(|k| l[i][k] * inv[k][col]).sum();
            inv[i][col] = (rhs - s) / l[i][i];
        }
    }
    inv
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i][j] * a[i][j];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching unit eigenvectors as the
/// columns of the second result.
pub fn jacobi_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let n = a.len();
    let mut a = symmetrize(a);
    let mut v = identity(n);
    let scale = a
        .iter()
        .flatten()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        .max(1.0);
    for _sweep in 0..100 {
        if off_diagonal_norm(&a) < 1e-12 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&i| v[r][i]).collect())
        .collect();
    (values, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cholesky_reconstructs() {
        let a = vec![
            vec![4.0, 2.0, 0.4],
            vec![2.0, 5.0, 1.0],
            vec![0.4, 1.0, 3.0],
        ];
        let l = cholesky(&a).unwrap();
        let back = matmul(&l, &transpose(&l));
        for i in 0..3 {
            for j in 0..3 {
                assert!((back[i][j] - a[i][j]).abs() < 1e-14);
            }
        }
        let li = lower_inverse(&l);
        let id = matmul(&li, &l);
        for i in 0..3 {
            for j in 0..3 {
                assert!((id[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
        assert_eq!(cholesky(&a), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn two_by_two_against_closed_form() {
        let (a, b, c) = (2.0, 0.7, -1.3);
        let (vals, _) = jacobi_eigen(&vec![vec![a, b], vec![b, c]]);
        let tr = a + c;
        let disc = ((a - c) * (a - c) + 4.0 * b * b).sqrt();
        assert!((vals[0] - (tr + disc) / 2.0).abs() < 1e-12);
        assert!((vals[1] - (tr - disc) / 2.0).abs() < 1e-12);
    }

    /// det(A − xI) for 3×3.
    fn char_poly3(a: &Matrix, x: f64) -> f64 {
        let m: Vec<Vec<f64>> = (0..3)
            .map(|i| {
                (0..3)
                    .map(|j| a[i][j] - if i == j { x } else { 0.0 })
                    .collect()
            })
            .collect();
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    fn sym(n: usize) -> impl Strategy<Value = Matrix> {
        prop::collection::vec(-5.0f64..5.0, n * n).prop_map(move |v| {
            let a: Matrix = (0..n).map(|i| v[i * n..(i + 1) * n].to_vec()).collect();
            symmetrize(&a)
        })
    }

    proptest! {
        #[test]
        fn eigenpairs_have_small_residual(a in sym(5)) {
            let (vals, vecs) = jacobi_eigen(&a);
            for k in 0..5 {
                let v: Vec<f64> = (0..5).map(|r| vecs[r][k]).collect();
                let av = matvec(&a, &v);
                let res: f64 = av.iter().zip(&v).map(|(x, y)| (x - vals[k] * y).powi(2)).sum::<f64>().sqrt();
                prop_assert!(res < 1e-9);
                let norm: f64 = v.iter().map(|x| x * x).sum();
                prop_assert!((norm - 1.0).abs() < 1e-12);
            }
            prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn three_by_three_roots_of_char_poly(a in sym(3)) {
            let (vals, _) = jacobi_eigen(&a);
            let scale = a.iter().flatten().map(|x| x.abs()).fold(1.0, f64::max);
            for v in vals {
                prop_assert!(char_poly3(&a, v).abs() < 1e-9 * scale.powi(3));
            }
        }
    }
}
