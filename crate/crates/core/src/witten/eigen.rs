//! Smallest-magnitude eigenpairs of a sparse symmetric matrix S.
//!
//! Small problems go through a dense symmetric eigensolve. Large ones use
//! Chebyshev-filtered subspace iteration on A = S², which turns the interior
//! problem for S into an extremal one for A, followed by a Rayleigh–Ritz
//! step with S itself to recover signed eigenvalues.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::lattice::SparseOp;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid request: {0}")]
    BadRequest(String),
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e}, tolerance {tolerance:.3e})")]
    NotConverged { iterations: usize, residual: f64, tolerance: f64 },
    #[error("fiber module unusable: {0}")]
    Fiber(String),
    #[error("section rejected: {0}")]
    Section(String),
    #[error("ill-posed experiment: {0}")]
    IllPosed(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenOptions {
    /// Matrices of at most this dimension are solved densely.
    pub dense_limit: usize,
    /// Extra block vectors beyond the requested count.
    pub guard: usize,
    pub degree: usize,
    /// Residual tolerance relative to the upper spectral bound of S².
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions { dense_limit: 4000, guard: 8, degree: 60, tol: 1e-10, max_iter: 400, seed: 7 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Chebyshev,
}

#[derive(Clone, Debug)]
pub struct EigenPairs {
    /// Signed eigenvalues sorted by magnitude.
    pub values: Vec<f64>,
    /// Matching orthonormal eigenvectors as columns.
    pub vectors: DMatrix<f64>,
    /// Estimate of ‖S‖.
    pub norm: f64,
    pub method: Method,
    pub iterations: usize,
    /// Largest residual ‖S²x − θx‖ among the returned vectors.
    pub residual: f64,
}

/// The `k` eigenvalues of the symmetric `s` closest to zero.
pub fn smallest_magnitude(s: &SparseOp, k: usize, opts: &EigenOptions) -> Result<EigenPairs, SpectralError> {
    if k == 0 {
        return Err(SpectralError::BadRequest("at least one eigenvalue must be requested".into()));
    }
    let k = k.min(s.n);
    if s.n <= opts.dense_limit || k + opts.guard.max(k) >= s.n / 2 {
        Ok(dense(s, k))
    } else {
        chebyshev(s, k, opts)
    }
}

fn dense(s: &SparseOp, k: usize) -> EigenPairs {
    let eig = SymmetricEigen::new(s.to_dense());
    let mut order: Vec<usize> = (0..s.n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
    order.truncate(k);
    let norm = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    EigenPairs {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: DMatrix::from_fn(s.n, k, |r, c| eig.eigenvectors[(r, order[c])]),
        norm,
        method: Method::Dense,
        iterations: 0,
        residual: 0.0,
    }
}

fn apply_sq(s: &SparseOp, x: &DMatrix<f64>) -> DMatrix<f64> {
    s.apply_columns(&s.apply_columns(x))
}

/// Upper bound for the spectrum of S² from a short Lanczos run: the largest
/// Ritz value plus the last off-diagonal.
pub fn upper_bound(s: &SparseOp, steps: usize, rng: &mut ChaCha8Rng) -> f64 {
    let n = s.n;
    let mut v = DVector::from_fn(n, |_, _| rng.gen::<f64>() - 0.5);
    v /= v.norm();
    let mut prev = DVector::zeros(n);
    let (mut alphas, mut betas) = (Vec::new(), Vec::new());
    let mut beta = 0.0;
    for _ in 0..steps.min(n) {
        let sv = DVector::from_vec(s.apply(v.as_slice()));
        let mut w = DVector::from_vec(s.apply(sv.as_slice())) - &prev * beta;
        let alpha = w.dot(&v);
        w -= &v * alpha;
        beta = w.norm();
        alphas.push(alpha);
        betas.push(beta);
        if beta < 1e-14 * alpha.abs().max(1.0) {
            break;
        }
        prev = v;
        v = w / beta;
    }
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let top = SymmetricEigen::new(t).eigenvalues.iter().fold(0.0f64, |a, b| a.max(*b));
    (top + beta) * 1.01
}

/// Scaled Chebyshev filter damping [a, b] relative to the bottom end a0.
fn filter(s: &SparseOp, x: &DMatrix<f64>, degree: usize, a: f64, b: f64, a0: f64) -> DMatrix<f64> {
    let e = (b - a) / 2.0;
    let c = (b + a) / 2.0;
    let sigma1 = e / (a0 - c);
    let tau = 2.0 / sigma1;
    let mut sigma = sigma1;
    let mut prev = x.clone();
    let mut cur = (apply_sq(s, x) - x * c) * (sigma1 / e);
    for _ in 2..=degree {
        let next_sigma = 1.0 / (tau - sigma);
        let next = (apply_sq(s, &cur) - &cur * c) * (2.0 * next_sigma / e) - &prev * (sigma * next_sigma);
        prev = cur;
        cur = next;
        sigma = next_sigma;
    }
    cur
}

fn chebyshev(s: &SparseOp, k: usize, opts: &EigenOptions) -> Result<EigenPairs, SpectralError> {
    let n = s.n;
    let p = (k + opts.guard.max(k)).min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let b = upper_bound(s, 24, &mut rng);
    let tolerance = opts.tol * b;
    let q0 = DMatrix::from_fn(n, p, |_, _| rng.gen::<f64>() - 0.5).qr().q();
    let (mut x, mut theta, _) = ritz(&q0, &apply_sq(s, &q0));
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let a = theta[p - 1].max(theta[k.min(p) - 1] * 1.5).min(0.9 * b);
        let y = filter(s, &x, opts.degree, a, b, 0.0);
        let q = y.qr().q();
        let ax;
        (x, theta, ax) = ritz(&q, &apply_sq(s, &q));
        let cluster_end = cluster_end(&theta, k, b);
        residual = (0..cluster_end).map(|j| (ax.column(j) - x.column(j) * theta[j]).norm()).fold(0.0, f64::max);
        if residual <= tolerance {
            return Ok(signed_pairs(s, &x.columns(0, cluster_end).into_owned(), k, b.sqrt(), it, residual));
        }
    }
    Err(SpectralError::NotConverged { iterations: opts.max_iter, residual, tolerance })
}

/// Rayleigh–Ritz for A on span(q) given aq = A·q: Ritz vectors, ascending
/// Ritz values and A applied to the Ritz vectors.
fn ritz(q: &DMatrix<f64>, aq: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let h = q.transpose() * aq;
    let h = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let w = DMatrix::from_fn(order.len(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (q * &w, order.iter().map(|&i| eig.eigenvalues[i]).collect(), aq * w)
}

/// First index past the cluster containing the k-th Ritz value, so that a
/// degenerate ± pair of S is never split.
fn cluster_end(theta: &[f64], k: usize, b: f64) -> usize {
    let mut end = k.min(theta.len());
    while end < theta.len() && theta[end] - theta[end - 1] <= (1e-8 * b).max(1e-6 * theta[end].abs()) {
        end += 1;
    }
    end
}

fn signed_pairs(s: &SparseOp, x: &DMatrix<f64>, k: usize, norm: f64, iterations: usize, residual: f64) -> EigenPairs {
    let sx = s.apply_columns(x);
    let h = x.transpose() * &sx;
    let eig = SymmetricEigen::new((&h + h.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].abs().total_cmp(&eig.eigenvalues[b].abs()));
    order.truncate(k);
    let w = DMatrix::from_fn(x.ncols(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    EigenPairs {
        values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
        vectors: x * w,
        norm,
        method: Method::Chebyshev,
        iterations,
        residual,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::witten::lattice::{build_staggered, Axis, Profile};

    fn symmetric_test_matrix(n: usize) -> SparseOp {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, (i as f64 - n as f64 / 2.0) * 0.01));
            if i + 1 < n {
                t.push((i, i + 1, 0.3));
                t.push((i + 1, i, 0.3));
            }
        }
        SparseOp::from_triplets(n, t)
    }

    #[test]
    fn iterative_matches_dense() {
        let s = symmetric_test_matrix(600);
        let dense_opts = EigenOptions::default();
        let iter_opts = EigenOptions { dense_limit: 10, ..EigenOptions::default() };
        let a = smallest_magnitude(&s, 5, &dense_opts).unwrap();
        let b = smallest_magnitude(&s, 5, &iter_opts).unwrap();
        assert_eq!(b.method, Method::Chebyshev);
        let sorted = |v: &[f64]| {
            let mut v = v.to_vec();
            v.sort_by(f64::total_cmp);
            v
        };
        for (x, y) in sorted(&a.values).iter().zip(&sorted(&b.values)) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn iterative_staggered_kernel() {
        let st = build_staggered(&[Axis::open(8.0, 801, Some(Profile::Linear))], 1.0);
        let op = st.operator();
        let sym = op.left_diag(&st.grading);
        let opts = EigenOptions { dense_limit: 100, ..EigenOptions::default() };
        let r = smallest_magnitude(&sym, 3, &opts).unwrap();
        assert!(r.values[0].abs() < 1e-8);
        assert!((r.values[1].abs() - 2f64.sqrt()).abs() < 1e-2);
        assert!((r.values[1] + r.values[2]).abs() < 1e-8);
    }

    #[test]
    fn zero_request_is_rejected() {
        assert!(smallest_magnitude(&SparseOp::zero(3), 0, &EigenOptions::default()).is_err());
    }

    #[test]
    fn iteration_cap_is_reported() {
        let s = symmetric_test_matrix(400);
        let opts = EigenOptions { dense_limit: 10, max_iter: 1, degree: 2, ..EigenOptions::default() };
        assert!(matches!(smallest_magnitude(&s, 4, &opts), Err(SpectralError::NotConverged { .. })));
    }
}
