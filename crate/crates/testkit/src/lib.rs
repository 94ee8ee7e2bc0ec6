//! Dense reference implementations for checking the sparse algorithms.
//!
//! Nothing here shares code with `lcca-core`: the symmetric eigensolver is
//! a cyclic Jacobi sweep, least squares goes through the normal equations,
//! and subspace distances are taken from explicit `n x n` projectors. Inputs
//! are plain coordinate triplets or dense matrices.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type Triplets = Vec<(usize, usize, f64)>;

pub fn dense(n_rows: usize, n_cols: usize, triplets: &[(usize, usize, f64)]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n_rows, n_cols);
    for &(i, j, v) in triplets {
        m[(i, j)] += v;
    }
    m
}

/// `a^T b` by explicit triple loop.
pub fn naive_tr_mul(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.ncols(), b.ncols());
    for i in 0..a.ncols() {
        for j in 0..b.ncols() {
            let mut s = 0.0;
            for r in 0..a.nrows() {
                s += a[(r, i)] * b[(r, j)];
            }
            out[(i, j)] = s;
        }
    }
    out
}

pub fn naive_mul(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    naive_tr_mul(&a.transpose(), b)
}

/// Eigenvalues (descending) and eigenvectors of a symmetric matrix by
/// cyclic Jacobi rotations.
pub fn jacobi_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut a = m.clone();
    let mut v = DMatrix::identity(n, n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum();
        if off <= 1e-32 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Singular values of `m`, descending, from the eigenvalues of `m^T m`.
pub fn singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let (vals, _) = jacobi_eigen(&naive_tr_mul(m, m));
    vals.into_iter().map(|v| v.max(0.0).sqrt()).collect()
}

/// `n x k` orthonormal basis of the top-`k` left singular subspace.
pub fn top_left_singular(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    let (vals, vecs) = jacobi_eigen(&naive_tr_mul(m, m));
    let mut out = naive_mul(m, &vecs.columns(0, k).into_owned());
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col /= vals[j].sqrt();
    }
    out
}

pub fn inverse_sqrt(g: &DMatrix<f64>) -> DMatrix<f64> {
    let (vals, vecs) = jacobi_eigen(g);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|v| 1.0 / v.sqrt()),
    ));
    naive_mul(&naive_mul(&vecs, &d), &vecs.transpose())
}

/// Brute-force CCA: whiten both Grams, then read singular values and
/// vectors of the whitened cross-covariance off the eigen-decomposition of
/// the symmetric `[0 C; C^T 0]`.
pub struct BruteCca {
    /// All `min(p1, p2)` canonical correlations, descending.
    pub d: Vec<f64>,
    /// `p1 x min(p1, p2)` loadings.
    pub x_loadings: DMatrix<f64>,
    pub y_loadings: DMatrix<f64>,
}

pub fn brute_cca(x: &DMatrix<f64>, y: &DMatrix<f64>) -> BruteCca {
    let (p1, p2) = (x.ncols(), y.ncols());
    let wx = inverse_sqrt(&naive_tr_mul(x, x));
    let wy = inverse_sqrt(&naive_tr_mul(y, y));
    let c = naive_mul(&naive_mul(&wx, &naive_tr_mul(x, y)), &wy);
    let mut aug = DMatrix::zeros(p1 + p2, p1 + p2);
    aug.view_mut((0, p1), (p1, p2)).copy_from(&c);
    aug.view_mut((p1, 0), (p2, p1)).copy_from(&c.transpose());
    let (vals, vecs) = jacobi_eigen(&aug);
    let k = p1.min(p2);
    let mut u = vecs.view((0, 0), (p1, k)).into_owned();
    let mut v = vecs.view((p1, 0), (p2, k)).into_owned();
    for j in 0..k {
        let nu = u.column(j).norm();
        let nv = v.column(j).norm();
        u.column_mut(j).scale_mut(1.0 / nu);
        v.column_mut(j).scale_mut(1.0 / nv);
    }
    BruteCca {
        d: vals[..k].to_vec(),
        x_loadings: naive_mul(&wx, &u),
        y_loadings: naive_mul(&wy, &v),
    }
}

/// `x (x^T x)^-1 x^T b` by Gaussian elimination with partial pivoting on the
/// normal equations.
pub fn normal_equations_fit(x: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let mut g = naive_tr_mul(x, x);
    let mut rhs = naive_tr_mul(x, b);
    let p = g.nrows();
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| g[(i, col)].abs().total_cmp(&g[(j, col)].abs()))
            .unwrap();
        g.swap_rows(col, pivot);
        rhs.swap_rows(col, pivot);
        for r in col + 1..p {
            let f = g[(r, col)] / g[(col, col)];
            for c in col..p {
                g[(r, c)] -= f * g[(col, c)];
            }
            for c in 0..rhs.ncols() {
                rhs[(r, c)] -= f * rhs[(col, c)];
            }
        }
    }
    let mut beta = DMatrix::zeros(p, rhs.ncols());
    for c in 0..rhs.ncols() {
        for r in (0..p).rev() {
            let mut s = rhs[(r, c)];
            for k in r + 1..p {
                s -= g[(r, k)] * beta[(k, c)];
            }
            beta[(r, c)] = s / g[(r, r)];
        }
    }
    naive_mul(x, &beta)
}

/// Orthogonal projector onto the column space of a full-rank `w`.
pub fn projector(w: &DMatrix<f64>) -> DMatrix<f64> {
    let g = naive_tr_mul(w, w);
    let w_white = naive_mul(w, &inverse_sqrt(&g));
    naive_mul(&w_white, &w_white.transpose())
}

/// `||P_w - P_z||_2` from explicit projectors.
pub fn projector_distance(w: &DMatrix<f64>, z: &DMatrix<f64>) -> f64 {
    let diff = projector(w) - projector(z);
    let (vals, _) = jacobi_eigen(&diff);
    vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Seeded generator for test instances.
pub struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed ^ 0x7e57_7e57),
        }
    }

    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn gaussian(&mut self, rows: usize, cols: usize) -> DMatrix<f64> {
        DMatrix::from_fn(rows, cols, |_, _| self.normal())
    }

    /// Random sparse matrix with Bernoulli(`density`) support, every row and
    /// column guaranteed at least one entry, and column `j` scaled by
    /// `(j + 1)^-decay`.
    pub fn sparse(&mut self, n: usize, p: usize, density: f64, decay: f64) -> Triplets {
        let mut t = Vec::new();
        let mut filled = vec![vec![false; p]; n];
        for (i, row) in filled.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                if self.uniform() < density {
                    *cell = true;
                    t.push((i, j, self.normal()));
                }
            }
        }
        for j in 0..p {
            if !filled.iter().any(|r| r[j]) {
                let i = self.below(n);
                filled[i][j] = true;
                t.push((i, j, self.normal()));
            }
        }
        for (i, row) in filled.iter_mut().enumerate() {
            if !row.iter().any(|&c| c) {
                let j = self.below(p);
                row[j] = true;
                t.push((i, j, self.normal()));
            }
        }
        for e in &mut t {
            e.2 *= ((e.1 + 1) as f64).powf(-decay);
        }
        t
    }

    /// `x = z a + noise`, `y = z b + noise` with a shared `n x k` latent
    /// `z`: a dense pair with `k` strong canonical correlations. `gaps`
    /// scales the latent columns so the correlations are well separated.
    pub fn latent_pair(
        &mut self,
        n: usize,
        p1: usize,
        p2: usize,
        gaps: &[f64],
        noise: f64,
    ) -> (Triplets, Triplets) {
        let k = gaps.len();
        let mut z = self.gaussian(n, k);
        for (j, g) in gaps.iter().enumerate() {
            z.column_mut(j).scale_mut(*g);
        }
        let a = self.gaussian(k, p1);
        let b = self.gaussian(k, p2);
        let mut x = naive_mul(&z, &a);
        let mut y = naive_mul(&z, &b);
        for v in x.iter_mut().chain(y.iter_mut()) {
            *v += noise * self.normal();
        }
        (to_triplets(&x), to_triplets(&y))
    }
}

/// Dense pair with prescribed canonical correlations and spectra.
///
/// `u` (`n x p1`) and `v` (`n x p2`) are orthonormal with `u^T v` zero except
/// `u_j^T v_j = d[j]`; then `x = u diag(x_scales)` and `y = v diag(y_scales)`,
/// each optionally rotated on both sides by random orthogonal matrices.
/// The canonical correlations of `(x, y)` are exactly `d` (plus zeros) and
/// the singular values of `x` are exactly `x_scales`. Without rotation the
/// `j`-th column of `u` is the left singular vector of `x` for
/// `x_scales[j]`.
pub struct PlantedPair<'a> {
    pub n: usize,
    pub d: &'a [f64],
    pub x_scales: &'a [f64],
    pub y_scales: &'a [f64],
    pub rotate: bool,
}

impl PlantedPair<'_> {
    pub fn build(&self, gen: &mut Gen) -> (DMatrix<f64>, DMatrix<f64>) {
        let (p1, p2) = (self.x_scales.len(), self.y_scales.len());
        assert!(self.d.len() <= p1.min(p2) && self.n >= p1 + p2);
        let q = gen.gaussian(self.n, p1 + p2).qr().q();
        let u = q.columns(0, p1).into_owned();
        let mut v = q.columns(p1, p2).into_owned();
        for (j, &d) in self.d.iter().enumerate() {
            let mixed = u.column(j) * d + v.column(j) * (1.0 - d * d).sqrt();
            v.set_column(j, &mixed);
        }
        let x = naive_mul(&u, &self.mixing(gen, self.x_scales));
        let y = naive_mul(&v, &self.mixing(gen, self.y_scales));
        (x, y)
    }

    fn mixing(&self, gen: &mut Gen, scales: &[f64]) -> DMatrix<f64> {
        let p = scales.len();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(scales));
        if !self.rotate {
            return diag;
        }
        let left = gen.gaussian(p, p).qr().q();
        let right = gen.gaussian(p, p).qr().q();
        naive_mul(&naive_mul(&left, &diag), &right)
    }
}

/// `count` values decreasing geometrically from `1` to `last`.
pub fn geometric(count: usize, last: f64) -> Vec<f64> {
    (0..count)
        .map(|j| last.powf(j as f64 / (count.max(2) - 1) as f64))
        .collect()
}

pub fn to_triplets(m: &DMatrix<f64>) -> Triplets {
    let mut t = Vec::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if m[(i, j)] != 0.0 {
                t.push((i, j, m[(i, j)]));
            }
        }
    }
    t
}
