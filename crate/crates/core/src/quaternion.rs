//! Quaternions over Q with the convention ijk = 1 (so ij = −k, jk = −i,
//! ki = −j), 2×2 quaternion matrices, and their real-linear actions on the
//! 16 real coordinates of ℍ(2).

use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::qmat::{QMat, SparseVec};
use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quat(pub [Q; 4]);

/// Product table on the units 1, i, j, k: `UNIT_MUL[a][b] = (sign, c)`.
const UNIT_MUL: [[(i8, usize); 4]; 4] = [
    [(1, 0), (1, 1), (1, 2), (1, 3)],
    [(1, 1), (-1, 0), (-1, 3), (1, 2)],
    [(1, 2), (1, 3), (-1, 0), (-1, 1)],
    [(1, 3), (-1, 2), (1, 1), (-1, 0)],
];

impl Quat {
    pub fn zero() -> Self {
        Quat([Q::zero(), Q::zero(), Q::zero(), Q::zero()])
    }

    pub fn unit(k: usize) -> Self {
        let mut z = Self::zero();
        z.0[k] = Q::one();
        z
    }

    pub fn real(c: Q) -> Self {
        let mut z = Self::zero();
        z.0[0] = c;
        z
    }

    pub fn one() -> Self {
        Self::unit(0)
    }

    pub fn i() -> Self {
        Self::unit(1)
    }

    pub fn j() -> Self {
        Self::unit(2)
    }

    pub fn k() -> Self {
        Self::unit(3)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }

    pub fn conj(&self) -> Self {
        Quat([self.0[0].clone(), -self.0[1].clone(), -self.0[2].clone(), -self.0[3].clone()])
    }

    pub fn scale(&self, c: &Q) -> Self {
        Quat(self.0.clone().map(|x| x * c))
    }
}

impl Add for &Quat {
    type Output = Quat;
    fn add(self, o: &Quat) -> Quat {
        Quat(std::array::from_fn(|t| &self.0[t] + &o.0[t]))
    }
}

impl Sub for &Quat {
    type Output = Quat;
    fn sub(self, o: &Quat) -> Quat {
        Quat(std::array::from_fn(|t| &self.0[t] - &o.0[t]))
    }
}

impl Neg for &Quat {
    type Output = Quat;
    fn neg(self) -> Quat {
        Quat(self.0.clone().map(|x| -x))
    }
}

impl Mul for &Quat {
    type Output = Quat;
    fn mul(self, o: &Quat) -> Quat {
        let mut out = Quat::zero();
        for a in 0..4 {
            if self.0[a].is_zero() {
                continue;
            }
            for b in 0..4 {
                if o.0[b].is_zero() {
                    continue;
                }
                let (s, c) = UNIT_MUL[a][b];
                let p = &self.0[a] * &o.0[b];
                if s > 0 {
                    out.0[c] += p;
                } else {
                    out.0[c] -= p;
                }
            }
        }
        out
    }
}

/// Row-major 2×2 quaternion matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuatMat(pub [[Quat; 2]; 2]);

impl QuatMat {
    pub fn zero() -> Self {
        QuatMat([[Quat::zero(), Quat::zero()], [Quat::zero(), Quat::zero()]])
    }

    pub fn identity() -> Self {
        Self::diag(Quat::one(), Quat::one())
    }

    pub fn diag(a: Quat, d: Quat) -> Self {
        QuatMat([[a, Quat::zero()], [Quat::zero(), d]])
    }

    pub fn antidiag(b: Quat, c: Quat) -> Self {
        QuatMat([[Quat::zero(), b], [c, Quat::zero()]])
    }

    /// Elementary basis element for real coordinate `idx` (see `coords`).
    pub fn basis(idx: usize) -> Self {
        let mut m = Self::zero();
        m.0[idx / 8][(idx / 4) % 2] = Quat::unit(idx % 4);
        m
    }

    /// Real coordinates, index (2·row + col)·4 + component.
    pub fn coords(&self) -> Vec<Q> {
        let mut out = Vec::with_capacity(16);
        for r in 0..2 {
            for c in 0..2 {
                out.extend(self.0[r][c].0.iter().cloned());
            }
        }
        out
    }

    pub fn sparse_coords(&self) -> SparseVec {
        self.coords().into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn from_coords(c: &[Q]) -> Self {
        assert_eq!(c.len(), 16);
        let mut m = Self::zero();
        for idx in 0..16 {
            m.0[idx / 8][(idx / 4) % 2].0[idx % 4] = c[idx].clone();
        }
        m
    }

    pub fn from_sparse(v: &SparseVec) -> Self {
        let mut c = vec![Q::zero(); 16];
        for (i, x) in v {
            c[*i] = x.clone();
        }
        Self::from_coords(&c)
    }

    pub fn mul(&self, o: &QuatMat) -> QuatMat {
        let mut out = QuatMat::zero();
        for r in 0..2 {
            for c in 0..2 {
                out.0[r][c] = &(&self.0[r][0] * &o.0[0][c]) + &(&self.0[r][1] * &o.0[1][c]);
            }
        }
        out
    }

    pub fn add(&self, o: &QuatMat) -> QuatMat {
        QuatMat(std::array::from_fn(|r| std::array::from_fn(|c| &self.0[r][c] + &o.0[r][c])))
    }

    pub fn neg(&self) -> QuatMat {
        QuatMat(std::array::from_fn(|r| std::array::from_fn(|c| -&self.0[r][c])))
    }

    pub fn scale(&self, s: &Q) -> QuatMat {
        QuatMat(std::array::from_fn(|r| std::array::from_fn(|c| self.0[r][c].scale(s))))
    }

    /// Conjugate transpose B* = transpose of the entrywise quaternion conjugate.
    pub fn star(&self) -> QuatMat {
        QuatMat(std::array::from_fn(|r| std::array::from_fn(|c| self.0[c][r].conj())))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().flatten().all(|x| x.is_zero())
    }

    /// Real 16×16 matrix of A ↦ self·A.
    pub fn left_matrix(&self) -> QMat {
        Self::linear_map_matrix(|a| self.mul(a))
    }

    /// Real 16×16 matrix of A ↦ A·self.
    pub fn right_matrix(&self) -> QMat {
        Self::linear_map_matrix(|a| a.mul(self))
    }

    /// Matrix of a real-linear map ℍ(2) → ℍ(2) evaluated on the coordinate basis.
    pub fn linear_map_matrix(f: impl Fn(&QuatMat) -> QuatMat) -> QMat {
        let cols: Vec<SparseVec> = (0..16).map(|i| f(&QuatMat::basis(i)).sparse_coords()).collect();
        QMat::from_columns(16, &cols)
    }

    pub fn to_text(&self) -> String {
        let entry = |x: &Quat| {
            let names = ["", "i", "j", "k"];
            let mut parts = Vec::new();
            for (t, c) in x.0.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let coeff = crate::rational::fmt_q(c);
                parts.push(match (t, coeff.as_str()) {
                    (0, _) => coeff,
                    (_, "1") => names[t].to_string(),
                    (_, "-1") => format!("-{}", names[t]),
                    _ => format!("{coeff}{}", names[t]),
                });
            }
            if parts.is_empty() {
                "0".to_string()
            } else {
                parts.join("+").replace("+-", "-")
            }
        };
        format!(
            "[[{}, {}], [{}, {}]]",
            entry(&self.0[0][0]),
            entry(&self.0[0][1]),
            entry(&self.0[1][0]),
            entry(&self.0[1][1])
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn unit_relations_with_ijk_equal_one() {
        let (i, j, k) = (Quat::i(), Quat::j(), Quat::k());
        let m1 = Quat::real(q(-1));
        assert_eq!(&i * &i, m1);
        assert_eq!(&j * &j, m1);
        assert_eq!(&k * &k, m1);
        assert_eq!(&(&i * &j) * &k, Quat::one());
        assert_eq!(&i * &j, -&k);
        assert_eq!(&j * &k, -&i);
        assert_eq!(&k * &i, -&j);
    }

    #[test]
    fn associativity_on_units() {
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    let (x, y, z) = (Quat::unit(a), Quat::unit(b), Quat::unit(c));
                    assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
                }
            }
        }
    }

    #[test]
    fn coordinate_roundtrip_and_action_matrices() {
        let x = QuatMat::antidiag(Quat::i(), Quat::k());
        let y = QuatMat::diag(Quat::j(), Quat::real(q(2)));
        assert_eq!(QuatMat::from_coords(&x.coords()), x);
        let lx = x.left_matrix();
        let got = QuatMat::from_sparse(&lx.apply(&y.sparse_coords()));
        assert_eq!(got, x.mul(&y));
        let ry = y.right_matrix();
        assert_eq!(QuatMat::from_sparse(&ry.apply(&x.sparse_coords())), x.mul(&y));
    }

    #[test]
    fn star_reverses_products() {
        let x = QuatMat::antidiag(Quat::i(), Quat::k());
        let y = QuatMat::diag(Quat::j(), Quat::real(q(2)));
        assert_eq!(x.mul(&y).star(), y.star().mul(&x.star()));
    }
}
