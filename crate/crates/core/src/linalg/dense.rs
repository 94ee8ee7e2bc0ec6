use nalgebra::SymmetricEigen;

use super::DenseMatrix;

/// Symmetric eigendecomposition with eigenvalues sorted non-increasing and
/// eigenvectors permuted to match.
pub fn symmetric_eigen_desc(m: DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DenseMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Thin SVD with singular values sorted non-increasing.
pub struct DescendingSvd {
    /// `m x r` left singular vectors, `r = min(m, n)`.
    pub u: DenseMatrix,
    pub singular_values: Vec<f64>,
    /// `n x r` right singular vectors (not transposed).
    pub v: DenseMatrix,
}

pub fn svd_desc(m: &DenseMatrix) -> DescendingSvd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd_desc(&m.transpose());
        return DescendingSvd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    if cols == 0 {
        return DescendingSvd {
            u: DenseMatrix::zeros(rows, 0),
            singular_values: Vec::new(),
            v: DenseMatrix::zeros(cols, 0),
        };
    }
    let (a, v) = one_sided_jacobi(m.clone());
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let singular_values: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let floor = singular_values[0] * f64::EPSILON * rows as f64;
    let mut u = DenseMatrix::zeros(rows, cols);
    let mut filled = 0;
    for (c, &j) in order.iter().enumerate() {
        if norms[j] > floor {
            u.set_column(c, &(a.column(j) / norms[j]));
            filled = c + 1;
        }
    }
    complete_orthonormal(&mut u, filled);
    DescendingSvd {
        u,
        singular_values,
        v: DenseMatrix::from_fn(cols, cols, |i, c| v[(i, order[c])]),
    }
}

/// Hestenes rotations until the columns of `a` are mutually orthogonal.
/// Returns the rotated `a` and the accumulated right factor. Keeps small
/// singular values to full relative accuracy, including at exact rank
/// deficiency.
fn one_sided_jacobi(mut a: DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    const MAX_SWEEPS: usize = 80;
    let (rows, cols) = a.shape();
    let mut v = DenseMatrix::identity(cols, cols);
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in p + 1..cols {
                let (alpha, beta, gamma) = {
                    let s = a.as_slice();
                    let (cp, cq) = (&s[p * rows..(p + 1) * rows], &s[q * rows..(q + 1) * rows]);
                    let mut acc = (0.0, 0.0, 0.0);
                    for (x, y) in cp.iter().zip(cq) {
                        acc.0 += x * x;
                        acc.1 += y * y;
                        acc.2 += x * y;
                    }
                    acc
                };
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(a.as_mut_slice(), rows, p, q, c, s);
                rotate(v.as_mut_slice(), cols, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }
    (a, v)
}

fn rotate(data: &mut [f64], rows: usize, p: usize, q: usize, c: f64, s: f64) {
    let (head, tail) = data.split_at_mut(q * rows);
    let cp = &mut head[p * rows..(p + 1) * rows];
    let cq = &mut tail[..rows];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}

/// Fills columns `filled..` of `u` with unit vectors orthogonal to all
/// earlier columns, drawn from the standard basis.
fn complete_orthonormal(u: &mut DenseMatrix, filled: usize) {
    let (rows, cols) = u.shape();
    let mut c = filled;
    for e in 0..rows {
        if c == cols {
            break;
        }
        let mut cand = DenseMatrix::zeros(rows, 1);
        cand[(e, 0)] = 1.0;
        for _ in 0..2 {
            for j in 0..c {
                let d = u.column(j).dot(&cand.column(0));
                cand.column_mut(0).axpy(-d, &u.column(j), 1.0);
            }
        }
        let norm = cand.norm();
        if norm > 0.5 {
            u.set_column(c, &(cand.column(0) / norm));
            c += 1;
        }
    }
}

/// Largest absolute entry of `q^T q - I`.
pub fn orthonormality_deviation(q: &DenseMatrix) -> f64 {
    let g = q.transpose() * q;
    let k = g.nrows();
    let mut dev: f64 = 0.0;
    for j in 0..k {
        for i in 0..k {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g[(i, j)] - target).abs());
        }
    }
    dev
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_descending() {
        let m = DenseMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 3.0]);
        let (vals, vecs) = symmetric_eigen_desc(m.clone());
        assert_eq!(vals.len(), 3);
        assert!((vals[0] - 5.0).abs() < 1e-14 && (vals[2] - 1.0).abs() < 1e-14);
        let recon = &vecs * DenseMatrix::from_diagonal(&vals.clone().into()) * vecs.transpose();
        assert!(max_abs_diff(&recon, &m) < 1e-13);
    }

    #[test]
    fn svd_sorted_and_reconstructs() {
        let m = DenseMatrix::from_row_slice(3, 2, &[1.0, 2.0, 0.0, 1.0, 4.0, -1.0]);
        let s = svd_desc(&m);
        assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let recon =
            &s.u * DenseMatrix::from_diagonal(&s.singular_values.clone().into()) * s.v.transpose();
        assert!(max_abs_diff(&recon, &m) < 1e-13);
    }

    #[test]
    fn svd_of_rank_one_block_is_exact() {
        let a = DenseMatrix::from_column_slice(4, 1, &[1.0, -2.0, 0.5, 3.0]);
        let b = DenseMatrix::from_row_slice(1, 3, &[0.3, 1.0, -0.7]);
        let m = &a * &b;
        let s = svd_desc(&m);
        assert!((s.singular_values[0] - a.norm() * b.norm()).abs() < 1e-14);
        assert!(s.singular_values[1] < 1e-15 && s.singular_values[2] < 1e-15);
        assert!(orthonormality_deviation(&s.u) < 1e-14);
        assert!(orthonormality_deviation(&s.v) < 1e-14);
        let wide = svd_desc(&m.transpose());
        assert!((wide.singular_values[0] - s.singular_values[0]).abs() < 1e-14);
        assert_eq!(wide.u.shape(), (3, 3));
        assert_eq!(wide.v.shape(), (4, 3));
    }
}
