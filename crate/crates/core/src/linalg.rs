//! Small dense helpers for real antisymmetric and orthogonal matrices.

use nalgebra::DMatrix;

/// Pfaffian of a real antisymmetric matrix by Gaussian elimination with
/// partial pivoting (Parlett-Reid without the tridiagonal bookkeeping).
///
/// Returns 0 for odd dimension.
pub fn pfaffian(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "pfaffian needs a square matrix");
    if n % 2 == 1 {
        return 0.0;
    }
    let mut m = a.clone();
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        // pivot: largest entry in column k below the diagonal
        let (mut p, mut best) = (k + 1, m[(k + 1, k)].abs());
        for i in k + 2..n {
            if m[(i, k)].abs() > best {
                best = m[(i, k)].abs();
                p = i;
            }
        }
        if p != k + 1 {
            m.swap_rows(k + 1, p);
            m.swap_columns(k + 1, p);
            pf = -pf;
        }
        let piv = m[(k + 1, k)];
        if piv == 0.0 {
            return 0.0;
        }
        pf *= m[(k, k + 1)];
        if k + 2 < n {
            // eliminate column k and row k below/right of the pivot block
            for i in k + 2..n {
                let tau = m[(i, k)] / piv;
                if tau == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let v = m[(k + 1, j)];
                    m[(i, j)] -= tau * v;
                }
                for j in 0..n {
                    let v = m[(j, k + 1)];
                    m[(j, i)] -= tau * v;
                }
            }
        }
        k += 2;
    }
    pf
}

/// Largest entry of `|M M^T - s^2 I|`.
pub fn orthogonality_defect(m: &DMatrix<f64>, s: f64) -> f64 {
    let prod = m * m.transpose();
    let mut worst: f64 = 0.0;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { s * s } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).abs());
        }
    }
    worst
}

/// Largest entry of `|M + M^T|`.
pub fn antisymmetry_defect(m: &DMatrix<f64>) -> f64 {
    (m + m.transpose()).amax()
}

/// Orthonormalizes the rows of a row-major square matrix in place
/// (modified Gram-Schmidt, run twice for stability).
pub(crate) fn orthonormalize_rows(data: &mut [f64], dim: usize) {
    for _ in 0..2 {
        for i in 0..dim {
            let (head, tail) = data.split_at_mut(i * dim);
            let row = &mut tail[..dim];
            for j in 0..i {
                let prev = &head[j * dim..(j + 1) * dim];
                let dot: f64 = prev.iter().zip(row.iter()).map(|(a, b)| a * b).sum();
                row.iter_mut().zip(prev).for_each(|(r, p)| *r -= dot * p);
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            row.iter_mut().for_each(|r| *r /= norm);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(theta: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.0, theta, -theta, 0.0])
    }

    #[test]
    fn pfaffian_of_2x2_is_upper_entry() {
        assert_eq!(pfaffian(&block(3.0)), 3.0);
    }

    #[test]
    fn pfaffian_matches_explicit_4x4_formula() {
        // Pf = a12 a34 - a13 a24 + a14 a23
        let (a12, a13, a14, a23, a24, a34) = (1.3, -0.7, 2.1, 0.4, -1.9, 0.8);
        let m = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, a12, a13, a14, -a12, 0.0, a23, a24, -a13, -a23, 0.0, a34, -a14, -a24, -a34,
                0.0,
            ],
        );
        let expected = a12 * a34 - a13 * a24 + a14 * a23;
        assert!((pfaffian(&m) - expected).abs() < 1e-12);
        assert!((pfaffian(&m).powi(2) - m.determinant()).abs() < 1e-10);
    }

    #[test]
    fn pfaffian_squares_to_determinant() {
        let n = 8;
        let mut m = DMatrix::zeros(n, n);
        let mut x = 0.37_f64;
        for i in 0..n {
            for j in i + 1..n {
                x = (x * 9.7 + 0.13).fract();
                m[(i, j)] = x - 0.5;
                m[(j, i)] = 0.5 - x;
            }
        }
        let pf = pfaffian(&m);
        assert!((pf * pf - m.determinant()).abs() < 1e-10 * m.determinant().abs().max(1.0));
    }

    #[test]
    fn pfaffian_of_odd_or_singular_is_zero() {
        assert_eq!(pfaffian(&DMatrix::zeros(3, 3)), 0.0);
        assert_eq!(pfaffian(&DMatrix::zeros(4, 4)), 0.0);
    }

    #[test]
    fn gram_schmidt_restores_orthogonality() {
        let dim = 3;
        let mut data = vec![1.0, 0.1, 0.0, 0.0, 1.0, 0.2, 0.05, 0.0, 1.0];
        orthonormalize_rows(&mut data, dim);
        let m = DMatrix::from_row_slice(dim, dim, &data);
        assert!(orthogonality_defect(&m, 1.0) < 1e-14);
    }
}
