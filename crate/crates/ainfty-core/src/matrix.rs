//! Exact dense linear algebra with deterministic (first nonzero) pivoting.
//!
//! Small helper used by the splitting constructors and the propagator:
//! reduced row echelon form, rank, kernel and column-space bases, solving,
//! and inversion, all over the exact scalar field so results are pivot-order
//! reproducible.

use alloc::vec::Vec;

use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: alloc::vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zero(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &Scalar {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        self.data[r * self.cols + c] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let mut v = out.get(r, c).clone();
                    v += &(a * b);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Row-reduces in place with first-nonzero pivoting; returns the pivot
    /// columns in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(p) = (row..self.rows).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            if p != row {
                for c in 0..self.cols {
                    let a = self.get(row, c).clone();
                    let b = self.get(p, c).clone();
                    self.set(row, c, b);
                    self.set(p, c, a);
                }
            }
            let inv = self.get(row, col).inv().expect("pivot nonzero");
            for c in 0..self.cols {
                let v = self.get(row, c) * &inv;
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r != row && !self.get(r, col).is_zero() {
                    let factor = self.get(r, col).clone();
                    for c in 0..self.cols {
                        let v = self.get(r, c).clone() - (&factor * self.get(row, c));
                        self.set(r, c, v);
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the null space (as column vectors), deterministic: one
    /// vector per free column in increasing order.
    pub fn kernel_basis(&self) -> Vec<Vec<Scalar>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let mut is_pivot = alloc::vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot[free] {
                continue;
            }
            let mut v = alloc::vec![Scalar::zero(); self.cols];
            v[free] = Scalar::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -m.get(r, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Pivot columns of the matrix: a deterministic basis of the column
    /// space, reported as column indices.
    pub fn pivot_columns(&self) -> Vec<usize> {
        let mut m = self.clone();
        m.rref()
    }

    /// Solves `self * x = b` for one solution (free variables set to zero).
    pub fn solve(&self, b: &[Scalar]) -> Option<Vec<Scalar>> {
        assert_eq!(b.len(), self.rows);
        let mut aug = Matrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, self.cols, b[r].clone());
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return None; // inconsistent
        }
        let mut x = alloc::vec![Scalar::zero(); self.cols];
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = aug.get(r, self.cols).clone();
        }
        Some(x)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Matrix::zero(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c).clone());
            }
            aug.set(r, n + r, Scalar::one());
        }
        let pivots = aug.rref();
        if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
            return None;
        }
        let mut out = Matrix::zero(n, n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, aug.get(r, n + c).clone());
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: i64, b: i64, c: i64, d: i64) -> Matrix {
        let mut m = Matrix::zero(2, 2);
        m.set(0, 0, Scalar::from_int(a));
        m.set(0, 1, Scalar::from_int(b));
        m.set(1, 0, Scalar::from_int(c));
        m.set(1, 1, Scalar::from_int(d));
        m
    }

    #[test]
    fn rank_kernel_inverse() {
        let m = m2(1, 2, 2, 4);
        assert_eq!(m.rank(), 1);
        let k = m.kernel_basis();
        assert_eq!(k.len(), 1);
        assert_eq!(k[0][0], Scalar::from_int(-2));
        assert_eq!(k[0][1], Scalar::from_int(1));
        assert!(m.inverse().is_none());

        let inv = m2(2, 1, 1, 1).inverse().unwrap();
        assert_eq!(inv, m2(1, -1, -1, 2));
    }

    #[test]
    fn solve_consistent_and_not() {
        let m = m2(1, 1, 0, 1);
        let x = m.solve(&[Scalar::from_int(3), Scalar::from_int(1)]).unwrap();
        assert_eq!(x, alloc::vec![Scalar::from_int(2), Scalar::from_int(1)]);
        let sing = m2(1, 1, 1, 1);
        assert!(sing.solve(&[Scalar::from_int(0), Scalar::from_int(1)]).is_none());
    }
}
