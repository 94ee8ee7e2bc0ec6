use super::DenseMatrix;
use crate::error::{Error, Result};

/// A column is numerically deficient when `|r_jj|` falls below this fraction
/// of the largest `|r_ii|`.
pub const RANK_TOLERANCE: f64 = 1e-12;

/// Thin Householder factorization `m = q r` of an `n x k` block, `n >= k`.
///
/// `q` always has orthonormal columns, even when `m` is rank deficient; the
/// diagonal of `r` is non-negative.
#[derive(Debug, Clone)]
pub struct QrFactors {
    pub q: DenseMatrix,
    pub r: DenseMatrix,
}

impl QrFactors {
    /// Factors `m` without judging its rank.
    pub fn compute(m: &DenseMatrix) -> Result<Self> {
        let (n, k) = m.shape();
        if k == 0 || n < k {
            return Err(Error::shape(
                "thin_qr",
                format!("need n >= k >= 1, got {n}x{k}"),
            ));
        }
        let mut a = m.clone();
        // unit Householder vectors, stored densely per column (length n - j)
        let mut reflectors: Vec<Vec<f64>> = Vec::with_capacity(k);
        let mut r_diag = vec![0.0; k];

        #[allow(clippy::needless_range_loop)]
        for j in 0..k {
            let col = &a.as_slice()[j * n + j..(j + 1) * n];
            let alpha = col.iter().map(|v| v * v).sum::<f64>().sqrt();
            if alpha == 0.0 {
                reflectors.push(Vec::new());
                continue;
            }
            let beta = if col[0] >= 0.0 { -alpha } else { alpha };
            let mut v = col.to_vec();
            v[0] -= beta;
            let vnorm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if vnorm == 0.0 {
                r_diag[j] = beta;
                reflectors.push(Vec::new());
                continue;
            }
            v.iter_mut().for_each(|x| *x /= vnorm);
            for c in j..k {
                apply_reflector(&v, &mut a.as_mut_slice()[c * n + j..(c + 1) * n]);
            }
            r_diag[j] = beta;
            reflectors.push(v);
        }

        let mut r = DenseMatrix::zeros(k, k);
        for c in 0..k {
            for i in 0..c {
                r[(i, c)] = a[(i, c)];
            }
            r[(c, c)] = r_diag[c];
        }

        // q = H_0 H_1 ... H_{k-1} [I_k; 0]
        let mut q = DenseMatrix::zeros(n, k);
        for j in 0..k {
            q[(j, j)] = 1.0;
        }
        for j in (0..k).rev() {
            let v = &reflectors[j];
            if v.is_empty() {
                continue;
            }
            for c in j..k {
                apply_reflector(v, &mut q.as_mut_slice()[c * n + j..(c + 1) * n]);
            }
        }

        for j in 0..k {
            if r[(j, j)] < 0.0 {
                r.row_mut(j).neg_mut();
                q.column_mut(j).neg_mut();
            }
        }
        Ok(Self { q, r })
    }

    /// Columns whose diagonal entry is negligible relative to the largest.
    pub fn deficient_columns(&self) -> Vec<usize> {
        let k = self.r.ncols();
        let max = (0..k).map(|i| self.r[(i, i)].abs()).fold(0.0, f64::max);
        (0..k)
            .filter(|&i| max == 0.0 || self.r[(i, i)].abs() <= RANK_TOLERANCE * max)
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.r.ncols() - self.deficient_columns().len()
    }
}

fn apply_reflector(v: &[f64], x: &mut [f64]) {
    let dot: f64 = v.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    let s = 2.0 * dot;
    for (xi, vi) in x.iter_mut().zip(v) {
        *xi -= s * vi;
    }
}

/// Orthonormal basis of the column space of a full-rank `n x k` block.
///
/// Returns [`Error::RankDeficient`] when any `|r_jj|` is below
/// [`RANK_TOLERANCE`] times the largest; repair is left to the caller.
pub fn thin_qr(m: &DenseMatrix) -> Result<QrFactors> {
    let f = QrFactors::compute(m)?;
    let deficient = f.deficient_columns();
    if deficient.is_empty() {
        Ok(f)
    } else {
        Err(Error::RankDeficient {
            rank: m.ncols() - deficient.len(),
            cols: m.ncols(),
            deficient,
        })
    }
}
