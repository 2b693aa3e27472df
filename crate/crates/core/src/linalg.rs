//! Exact rational linear algebra on small dense matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::symbolic::{q, Q};

#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix { rows, cols, data: vec![Q::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>]) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut m = QMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = v.clone();
            }
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let qrows: Vec<Vec<Q>> = rows.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
        QMatrix::from_rows(&qrows)
    }

    /// Builds a matrix from column vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Q>]) -> Self {
        let mut m = QMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, v) in c.iter().enumerate() {
                m[(i, j)] = v.clone();
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

    pub fn row(&self, i: usize) -> Vec<Q> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<Q> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = &o[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn select_cols(&self, idx: &[usize]) -> QMatrix {
        let mut m = QMatrix::zeros(self.rows, idx.len());
        for i in 0..self.rows {
            for (jj, &j) in idx.iter().enumerate() {
                m[(i, jj)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_rows(&self, idx: &[usize]) -> QMatrix {
        let mut m = QMatrix::zeros(idx.len(), self.cols);
        for (ii, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                m[(ii, j)] = self[(i, j)].clone();
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m[(i, c)].is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = Q::one() / &m[(r, c)];
            for j in c..m.cols {
                let v = &m[(r, j)] * &inv;
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r || m[(i, c)].is_zero() {
                    continue;
                }
                let f = m[(i, c)].clone();
                for j in c..m.cols {
                    let v = &m[(r, j)] * &f;
                    m[(i, j)] -= v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one integer-primitive column per free
    /// variable, in increasing free-column order.
    pub fn kernel_basis(&self) -> Vec<Vec<Q>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::zero(); self.cols];
                v[f] = Q::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                primitive_integer(&v)
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = QMatrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Q::one();
        }
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = QMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Moore-Penrose inverse by rank factorization `M = C R`:
    /// `H = R^T (R R^T)^-1 (C^T C)^-1 C^T`. Satisfies `M H M = M`.
    pub fn generalized_inverse(&self) -> QMatrix {
        let (r, pivots) = self.rref();
        let k = pivots.len();
        if k == 0 {
            return QMatrix::zeros(self.cols, self.rows);
        }
        let c = self.select_cols(&pivots);
        let rr = r.select_rows(&(0..k).collect::<Vec<_>>());
        let rt = rr.transpose();
        let ct = c.transpose();
        let a = rr.mul(&rt).inverse().expect("full row rank");
        let b = ct.mul(&c).inverse().expect("full column rank");
        rt.mul(&a).mul(&b).mul(&ct)
    }

    /// Solves `self * x = b` if consistent; free variables are set to zero.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, self.cols)] = b[i].clone();
        }
        let (r, pivots) = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Q::zero(); self.cols];
        for (row, &p) in pivots.iter().enumerate() {
            x[p] = r[(row, self.cols)].clone();
        }
        Some(x)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Q;
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_q).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Serialized as a list of rows of exact rational strings.
impl Serialize for QMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(fmt_q).collect();
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

/// Scales a rational vector to coprime integers with a positive first
/// nonzero entry.
pub fn primitive_integer(v: &[Q]) -> Vec<Q> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return v.to_vec();
    }
    let sign = ints.iter().find(|x| !x.is_zero()).map(|x| x.signum()).unwrap_or_else(BigInt::one);
    ints.into_iter().map(|x| Q::from_integer(x / &g * &sign)).collect()
}

/// Rank of an integer matrix by fraction-free Bareiss elimination.
pub fn exact_rank(rows: &[Vec<i64>]) -> usize {
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    bareiss_rank(&mut m)
}

pub fn bareiss_rank(m: &mut [Vec<BigInt>]) -> usize {
    let nrows = m.len();
    let ncols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..ncols {
        if rank == nrows {
            break;
        }
        let Some(p) = (rank..nrows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][c].clone();
        for i in rank + 1..nrows {
            let f = m[i][c].clone();
            for j in c..ncols {
                let v = (&m[i][j] * &piv - &f * &m[rank][j]) / &prev;
                m[i][j] = v;
            }
            // Columns left of c are already zero below the pivot row.
        }
        prev = piv;
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbolic::q_frac;

    #[test]
    fn rank_and_kernel() {
        let m = QMatrix::from_i64(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        let kv = QMatrix::from_cols(3, &k);
        assert!(m.mul(&kv).is_zero());
        assert_eq!(exact_rank(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]), 2);
    }

    #[test]
    fn inverse_round_trip() {
        let m = QMatrix::from_i64(&[vec![2, 1], vec![1, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), QMatrix::identity(2));
        assert!(QMatrix::from_i64(&[vec![1, 2], vec![2, 4]]).inverse().is_none());
    }

    #[test]
    fn generalized_inverse_identity() {
        let m = QMatrix::from_i64(&[vec![1, -1, 0, 2], vec![0, 1, -1, 1], vec![1, 0, -1, 3]]);
        let h = m.generalized_inverse();
        assert_eq!(m.mul(&h).mul(&m), m);
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = QMatrix::from_i64(&[vec![1, 1], vec![1, -1]]);
        assert_eq!(m.solve(&[q(3), q(1)]), Some(vec![q(2), q(1)]));
        let s = QMatrix::from_i64(&[vec![1, 1], vec![2, 2]]);
        assert_eq!(s.solve(&[q(1), q(3)]), None);
    }

    #[test]
    fn primitive_scaling() {
        let v = primitive_integer(&[q_frac(-1, 2), q_frac(3, 4), q(0)]);
        assert_eq!(v, vec![q(2), q(-3), q(0)]);
    }
}
