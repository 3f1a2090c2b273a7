//! Sparse exact rational matrices and the elimination routines the module
//! layer needs (span bases, ranks, kernels, restriction to subspaces).

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde_json::Value;

use crate::rational::{q_from_json, q_to_json, Q};

pub type SparseVec = BTreeMap<usize, Q>;

/// Row-major sparse matrix over Q. Rows hold no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<SparseVec>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i].insert(i, Q::one());
        }
        m
    }

    pub fn scalar(n: usize, c: &Q) -> Self {
        Self::identity(n).scale(c)
    }

    pub fn from_rows(cols: usize, data: Vec<SparseVec>) -> Self {
        let data = data.into_iter().map(|r| r.into_iter().filter(|(_, v)| !v.is_zero()).collect()).collect::<Vec<_>>();
        QMat { rows: data.len(), cols, data }
    }

    pub fn from_dense(rows: &[Vec<Q>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols);
                r.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(j, v)| (j, v.clone())).collect()
            })
            .collect();
        QMat { rows: rows.len(), cols, data }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let dense: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&x| crate::rational::q(x)).collect()).collect();
        Self::from_dense(&dense)
    }

    /// Matrix whose column j is `cols[j]`.
    pub fn from_columns(nrows: usize, cols: &[SparseVec]) -> Self {
        let mut m = Self::zeros(nrows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c {
                m.data[*i].insert(j, v.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.data[i].get(&j).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn to_f64_dense(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.cols]; self.rows];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                out[i][*j] = crate::rational::to_f64(v);
            }
        }
        out
    }

    pub fn scale(&self, c: &Q) -> QMat {
        if c.is_zero() {
            return QMat::zeros(self.rows, self.cols);
        }
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|r| r.iter().map(|(j, v)| (*j, v * c)).collect()).collect(),
        }
    }

    pub fn neg(&self) -> QMat {
        self.scale(&-Q::one())
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| vec_add(a, b, &Q::one())).collect();
        QMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| vec_add(a, b, &-Q::one())).collect();
        QMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let data = self
            .data
            .iter()
            .map(|r| {
                let mut acc = SparseVec::new();
                for (k, a) in r {
                    for (j, b) in &other.data[*k] {
                        let e = acc.entry(*j).or_insert_with(Q::zero);
                        *e += a * b;
                    }
                }
                acc.retain(|_, v| !v.is_zero());
                acc
            })
            .collect();
        QMat { rows: self.rows, cols: other.cols, data }
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = Q::zero();
            for (j, a) in r {
                if let Some(x) = v.get(j) {
                    acc += a * x;
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    pub fn transpose(&self) -> QMat {
        let mut t = QMat::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                t.data[*j].insert(i, v.clone());
            }
        }
        t
    }

    pub fn column(&self, j: usize) -> SparseVec {
        let mut c = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            if let Some(v) = r.get(&j) {
                c.insert(i, v.clone());
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![SparseVec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, v) in r {
                cols[*j].insert(i, v.clone());
            }
        }
        cols
    }

    pub fn trace(&self) -> Q {
        assert!(self.is_square());
        (0..self.rows).filter_map(|i| self.data[i].get(&i).cloned()).fold(Q::zero(), |a, b| a + b)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && self.data.iter().enumerate().all(|(i, r)| r.len() == 1 && r.get(&i).is_some_and(|v| v.is_one()))
    }

    /// self == c·I
    pub fn is_scalar(&self, c: &Q) -> bool {
        if !self.is_square() {
            return false;
        }
        if c.is_zero() {
            return self.is_zero();
        }
        self.data.iter().enumerate().all(|(i, r)| r.len() == 1 && r.get(&i) == Some(c))
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square() && self.add(&self.transpose()).is_zero()
    }

    /// Kronecker product A ⊗ B with index (i_a * rows_b + i_b).
    pub fn kron(&self, other: &QMat) -> QMat {
        let mut out = QMat::zeros(self.rows * other.rows, self.cols * other.cols);
        for (ia, ra) in self.data.iter().enumerate() {
            for (ja, a) in ra {
                for (ib, rb) in other.data.iter().enumerate() {
                    for (jb, b) in rb {
                        out.data[ia * other.rows + ib].insert(ja * other.cols + jb, a * b);
                    }
                }
            }
        }
        out
    }

    /// Block diagonal direct sum.
    pub fn direct_sum(&self, other: &QMat) -> QMat {
        let mut out = QMat::zeros(self.rows + other.rows, self.cols + other.cols);
        for (i, r) in self.data.iter().enumerate() {
            out.data[i] = r.clone();
        }
        for (i, r) in other.data.iter().enumerate() {
            out.data[self.rows + i] = r.iter().map(|(j, v)| (self.cols + j, v.clone())).collect();
        }
        out
    }

    /// Conjugation P⁻¹·self·P for a permutation-with-signs matrix given as
    /// (target index, sign) per basis vector.
    pub fn signed_permute(&self, perm: &[(usize, i32)]) -> QMat {
        let n = self.rows;
        assert_eq!(perm.len(), n);
        let mut out = QMat::zeros(n, n);
        for (i, r) in self.data.iter().enumerate() {
            let (pi, si) = perm[i];
            for (j, v) in r {
                let (pj, sj) = perm[*j];
                let s = si * sj;
                out.data[pi].insert(pj, if s > 0 { v.clone() } else { -v.clone() });
            }
        }
        out
    }

    pub fn rank(&self) -> usize {
        let mut span = SpanBasis::new();
        for r in &self.data {
            span.insert(r.clone());
        }
        span.dim()
    }

    /// Determinant by dense fraction-exact elimination.
    pub fn det(&self) -> Q {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let mut a = self.to_dense();
        let n = self.rows;
        let mut det = Q::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return Q::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -det;
            }
            det *= &a[c][c];
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] / &a[c][c];
                for k in c..n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
        det
    }

    /// Basis of {x : self·x = 0}.
    pub fn kernel(&self) -> Vec<SparseVec> {
        let mut span = SpanBasis::new();
        for r in &self.data {
            span.insert(r.clone());
        }
        span.complement_kernel(self.cols)
    }

    /// Row-major rational-pair wire format.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array((0..self.cols).map(|j| q_to_json(&self.get(i, j))).collect()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Option<QMat> {
        let rows = v.as_array()?;
        let dense: Option<Vec<Vec<Q>>> =
            rows.iter().map(|r| r.as_array().and_then(|r| r.iter().map(q_from_json).collect())).collect();
        let dense = dense?;
        if dense.iter().any(|r| r.len() != dense.first().map_or(0, |f| f.len())) {
            return None;
        }
        Some(QMat::from_dense(&dense))
    }
}

pub fn vec_add(a: &SparseVec, b: &SparseVec, cb: &Q) -> SparseVec {
    let mut out = a.clone();
    for (j, v) in b {
        let e = out.entry(*j).or_insert_with(Q::zero);
        *e += v * cb;
        if e.is_zero() {
            out.remove(j);
        }
    }
    out
}

pub fn vec_scale(a: &SparseVec, c: &Q) -> SparseVec {
    if c.is_zero() {
        return SparseVec::new();
    }
    a.iter().map(|(j, v)| (*j, v * c)).collect()
}

pub fn dot(a: &SparseVec, b: &SparseVec) -> Q {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter_map(|(j, v)| large.get(j).map(|w| v * w)).fold(Q::zero(), |x, y| x + y)
}

/// Incrementally maintained reduced echelon basis of a span. Each stored
/// vector has a pivot coordinate with value 1 where all other stored vectors
/// vanish.
#[derive(Clone, Debug, Default)]
pub struct SpanBasis {
    vecs: Vec<SparseVec>,
    pivots: Vec<usize>,
    pivot_of: BTreeMap<usize, usize>,
}

impl SpanBasis {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn dim(&self) -> usize {
        self.vecs.len()
    }

    pub fn vectors(&self) -> &[SparseVec] {
        &self.vecs
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Reduces `v` against the basis; the remainder is zero iff v is in the span.
    pub fn reduce(&self, v: &SparseVec) -> SparseVec {
        let mut r = v.clone();
        for (&p, &k) in &self.pivot_of {
            if let Some(c) = r.get(&p).cloned() {
                r = vec_add(&r, &self.vecs[k], &-c);
            }
        }
        r
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    /// Adds `v` to the span; returns whether the dimension grew.
    pub fn insert(&mut self, v: SparseVec) -> bool {
        let r = self.reduce(&v);
        let Some((&p, c)) = r.iter().next() else {
            return false;
        };
        let r = vec_scale(&r, &(Q::one() / c));
        // keep the basis fully reduced
        for k in 0..self.vecs.len() {
            if let Some(c) = self.vecs[k].get(&p).cloned() {
                self.vecs[k] = vec_add(&self.vecs[k], &r, &-c);
            }
        }
        self.pivot_of.insert(p, self.vecs.len());
        self.pivots.push(p);
        self.vecs.push(r);
        true
    }

    /// Coordinates of a vector of the span with respect to the stored basis.
    pub fn coordinates(&self, v: &SparseVec) -> Option<Vec<Q>> {
        if !self.contains(v) {
            return None;
        }
        Some(self.pivots.iter().map(|p| v.get(p).cloned().unwrap_or_else(Q::zero)).collect())
    }

    /// Treating the stored vectors as rows of a homogeneous system in `n`
    /// unknowns, returns a basis of the solution space.
    pub fn complement_kernel(&self, n: usize) -> Vec<SparseVec> {
        let mut out = Vec::new();
        for free in 0..n {
            if self.pivot_of.contains_key(&free) {
                continue;
            }
            let mut x = SparseVec::new();
            x.insert(free, Q::one());
            for (&p, &k) in &self.pivot_of {
                if let Some(c) = self.vecs[k].get(&free) {
                    x.insert(p, -c.clone());
                }
            }
            out.push(x);
        }
        out
    }
}

/// Basis (as columns of the returned matrix) of a subspace spanned by the
/// given vectors, plus a left inverse that reads off coordinates.
#[derive(Clone, Debug)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: SpanBasis,
}

impl Subspace {
    pub fn spanned_by(ambient: usize, vecs: impl IntoIterator<Item = SparseVec>) -> Self {
        let mut basis = SpanBasis::new();
        for v in vecs {
            basis.insert(v);
        }
        Subspace { ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn inclusion(&self) -> QMat {
        QMat::from_columns(self.ambient, self.basis.vectors())
    }

    /// Matrix of `op` restricted to the subspace, or `None` when the subspace
    /// is not invariant.
    pub fn restrict(&self, op: &QMat) -> Option<QMat> {
        let k = self.dim();
        let mut out = QMat::zeros(k, k);
        for (j, v) in self.basis.vectors().iter().enumerate() {
            let w = op.apply(v);
            let c = self.basis.coordinates(&w)?;
            for (i, x) in c.into_iter().enumerate() {
                out.set(i, j, x);
            }
        }
        Some(out)
    }
}

/// Gram–Schmidt over Q; returns mutually orthogonal vectors spanning the input.
pub fn orthogonalize(vecs: &[SparseVec]) -> Vec<SparseVec> {
    let mut out: Vec<(SparseVec, Q)> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for (u, uu) in &out {
            let c = dot(&w, u) / uu;
            if !c.is_zero() {
                w = vec_add(&w, u, &-c);
            }
        }
        if !w.is_empty() {
            let n = dot(&w, &w);
            out.push((w, n));
        }
    }
    out.into_iter().map(|(w, _)| w).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn rank_and_kernel() {
        let m = QMat::from_i64(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn kron_and_sum_shapes() {
        let a = QMat::from_i64(&[&[0, 1], &[1, 0]]);
        let b = QMat::from_i64(&[&[0, -1], &[1, 0]]);
        let k = a.kron(&b);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.mul(&k), QMat::scalar(4, &q(-1)));
        assert_eq!(a.direct_sum(&b).trace(), q(0));
    }

    #[test]
    fn restriction_to_invariant_subspace() {
        let p = QMat::from_i64(&[&[0, 1], &[1, 0]]);
        let mut v = SparseVec::new();
        v.insert(0, q(1));
        v.insert(1, q(1));
        let s = Subspace::spanned_by(2, [v]);
        assert_eq!(s.restrict(&p).unwrap(), QMat::identity(1));
        let mut w = SparseVec::new();
        w.insert(0, q(1));
        assert!(Subspace::spanned_by(2, [w]).restrict(&p).is_none());
    }

    #[test]
    fn json_roundtrip() {
        let m = QMat::from_i64(&[&[1, -2], &[0, 3]]).scale(&crate::rational::qf(1, 2));
        assert_eq!(QMat::from_json(&m.to_json()).unwrap(), m);
    }
}
