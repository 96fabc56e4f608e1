//! Dense exact linear algebra over `Q`.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::rational::Q;

#[derive(Clone, PartialEq, Eq)]
pub struct QMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Q>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> QMatrix {
        QMatrix { rows, cols, data: vec![Q::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> QMatrix {
        let mut m = QMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Q::ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Q>]) -> QMatrix {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = QMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged rows");
            for (j, v) in row.iter().enumerate() {
                m[(i, j)] = *v;
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

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Q::is_zero)
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<Q>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> QMatrix {
        let mut t = QMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && *self == self.transpose()
    }

    pub fn scale(&self, s: Q) -> QMatrix {
        QMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| *v * s).collect() }
    }

    pub fn add(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        QMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn sub(&self, rhs: &QMatrix) -> QMatrix {
        self.add(&rhs.scale(-Q::ONE))
    }

    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = QMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| *a * *b).sum()).collect()
    }

    /// `[self, rhs] = self·rhs − rhs·self`.
    pub fn commutator(&self, rhs: &QMatrix) -> QMatrix {
        self.mul(rhs).sub(&rhs.mul(self))
    }

    pub fn trace(&self) -> Q {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `vᵀ·self·w`.
    pub fn bilinear(&self, v: &[Q], w: &[Q]) -> Q {
        let mut acc = Q::ZERO;
        for (i, vi) in v.iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (j, wj) in w.iter().enumerate() {
                if !wj.is_zero() {
                    acc += *vi * self[(i, j)] * *wj;
                }
            }
        }
        acc
    }

    /// Row echelon form in place; returns pivot columns.
    fn echelon(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                self[(r, j)] *= inv;
            }
            for i in 0..self.rows {
                if i != r {
                    let f = self[(i, c)];
                    if !f.is_zero() {
                        for j in c..self.cols {
                            let v = self[(r, j)];
                            if !v.is_zero() {
                                self[(i, j)] -= f * v;
                            }
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().echelon().len()
    }

    pub fn det(&self) -> Q {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Q::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[(i, c)].is_zero()) else {
                return Q::ZERO;
            };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pivot = m[(c, c)];
            det *= pivot;
            let inv = pivot.recip();
            for i in c + 1..n {
                let f = m[(i, c)] * inv;
                if !f.is_zero() {
                    for j in c..n {
                        let v = m[(c, j)];
                        if !v.is_zero() {
                            m[(i, j)] -= f * v;
                        }
                    }
                }
            }
        }
        det
    }

    /// Basis of `{x : self·x = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Q>> {
        let mut m = self.clone();
        let pivots = m.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Q::ZERO; self.cols];
                v[f] = Q::ONE;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -m[(r, f)];
                }
                v
            })
            .collect()
    }

    /// Solve `self·x = b` when the solution exists and is unique.
    pub fn solve(&self, b: &[Q]) -> Option<Vec<Q>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = QMatrix::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, self.cols)] = b[i];
        }
        let pivots = aug.echelon();
        if pivots.len() != self.cols || pivots.contains(&self.cols) {
            return None;
        }
        Some((0..self.cols).map(|i| aug[(i, self.cols)]).collect())
    }

    /// Inertia `(positive, negative, zero)` of a symmetric matrix, by
    /// congruence diagonalization.
    pub fn inertia(&self) -> (usize, usize, usize) {
        assert!(self.is_symmetric(), "inertia of non-symmetric matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut diag = Vec::with_capacity(n);
        let mut k = 0;
        while k < n {
            if m[(k, k)].is_zero() {
                // Bring a nonzero diagonal entry forward, or create one
                // from an off-diagonal pair.
                if let Some(p) = (k + 1..n).find(|&i| !m[(i, i)].is_zero()) {
                    m.swap_sym(k, p);
                } else if let Some(p) = (k + 1..n).find(|&i| !m[(k, i)].is_zero()) {
                    // Row/col k += row/col p gives m[k][k] = 2 m[k][p].
                    for j in 0..n {
                        let v = m[(p, j)];
                        m[(k, j)] += v;
                    }
                    for i in 0..n {
                        let v = m[(i, p)];
                        m[(i, k)] += v;
                    }
                } else {
                    diag.push(Q::ZERO);
                    k += 1;
                    continue;
                }
            }
            let pivot = m[(k, k)];
            for i in k + 1..n {
                let f = m[(i, k)] / pivot;
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let v = m[(k, j)];
                    m[(i, j)] -= f * v;
                }
                for j in k..n {
                    let v = m[(j, k)];
                    m[(j, i)] -= f * v;
                }
            }
            diag.push(pivot);
            k += 1;
        }
        let pos = diag.iter().filter(|d| d.signum() > 0).count();
        let neg = diag.iter().filter(|d| d.signum() < 0).count();
        (pos, neg, n - pos - neg)
    }

    fn swap_sym(&mut self, a: usize, b: usize) {
        self.swap_rows(a, b);
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].to_f64())
    }
}

impl Index<(usize, usize)> for QMatrix {
    type Output = Q;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Q {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for QMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Q {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(Q::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i128) -> Q {
        Q::int(n)
    }

    #[test]
    fn det_and_rank() {
        let m = QMatrix::from_rows(&[vec![q(2), q(1)], vec![q(4), q(3)]]);
        assert_eq!(m.det(), q(2));
        let s = QMatrix::from_rows(&[vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert_eq!(s.det(), Q::ZERO);
        assert_eq!(s.rank(), 1);
    }

    #[test]
    fn nullspace_spans_kernel() {
        let m = QMatrix::from_rows(&[vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]]);
        let ns = m.nullspace();
        assert_eq!(ns.len(), 1);
        assert!(m.mul_vec(&ns[0]).iter().all(Q::is_zero));
    }

    #[test]
    fn solve_unique() {
        let m = QMatrix::from_rows(&[vec![q(1), q(2)], vec![q(3), q(4)]]);
        let x = m.solve(&[q(5), q(6)]).unwrap();
        assert_eq!(m.mul_vec(&x), vec![q(5), q(6)]);
        let s = QMatrix::from_rows(&[vec![q(1), q(2)], vec![q(2), q(4)]]);
        assert!(s.solve(&[q(1), q(0)]).is_none());
    }

    #[test]
    fn inertia_of_hyperbolic_pair() {
        let m = QMatrix::from_rows(&[vec![q(0), q(1)], vec![q(1), q(0)]]);
        assert_eq!(m.inertia(), (1, 1, 0));
        let d = QMatrix::from_rows(&[vec![q(-2), q(0), q(0)], vec![q(0), q(3), q(0)], vec![q(0), q(0), q(0)]]);
        assert_eq!(d.inertia(), (1, 1, 1));
    }
}
