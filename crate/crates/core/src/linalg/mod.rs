//! Dense exact matrices and the lattice of subspaces of GF(p)ⁿ.

mod subspace;

pub use subspace::{CoSubspace, LatticeElement, Subspace};

use crate::arith::Field;
use std::ops::{Index, IndexMut};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field mismatch between operands")]
    FieldMismatch,
    #[error("rows have inconsistent lengths")]
    Ragged,
}

/// Row-major dense matrix over one ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matrix<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Clone> Matrix<E> {
    pub fn filled(rows: usize, cols: usize, value: E) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<E>], cols: usize) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(LinalgError::Ragged);
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[E] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<E>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn map<F: Clone>(&self, f: impl FnMut(&E) -> F) -> Matrix<F> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Rows `r0..r1`, columns `c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        Matrix::from_fn(r1 - r0, c1 - c0, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn entries(&self) -> &[E] {
        &self.data
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn truncate_rows(&mut self, rows: usize) {
        self.rows = rows;
        self.data.truncate(rows * self.cols);
    }
}

impl<E> Index<(usize, usize)> for Matrix<E> {
    type Output = E;
    fn index(&self, (i, j): (usize, usize)) -> &E {
        &self.data[i * self.cols + j]
    }
}

impl<E> IndexMut<(usize, usize)> for Matrix<E> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut E {
        &mut self.data[i * self.cols + j]
    }
}

pub fn zeros<F: Field>(field: &F, rows: usize, cols: usize) -> Matrix<F::Elem> {
    Matrix::filled(rows, cols, field.zero())
}

pub fn identity<F: Field>(field: &F, n: usize) -> Matrix<F::Elem> {
    Matrix::from_fn(n, n, |i, j| if i == j { field.one() } else { field.zero() })
}

pub fn is_zero_matrix<F: Field>(field: &F, m: &Matrix<F::Elem>) -> bool {
    m.entries().iter().all(|e| field.is_zero(e))
}

pub fn mul<F: Field>(
    field: &F,
    a: &Matrix<F::Elem>,
    b: &Matrix<F::Elem>,
) -> Result<Matrix<F::Elem>, LinalgError> {
    if a.cols != b.rows {
        return Err(LinalgError::DimensionMismatch {
            expected: a.cols,
            got: b.rows,
        });
    }
    let mut out = zeros(field, a.rows, b.cols);
    for i in 0..a.rows {
        for k in 0..a.cols {
            let aik = &a[(i, k)];
            if field.is_zero(aik) {
                continue;
            }
            for j in 0..b.cols {
                let t = field.mul(aik, &b[(k, j)]);
                out[(i, j)] = field.add(&out[(i, j)], &t);
            }
        }
    }
    Ok(out)
}

/// Row vector times matrix.
pub fn vec_mul<F: Field>(field: &F, v: &[F::Elem], m: &Matrix<F::Elem>) -> Vec<F::Elem> {
    debug_assert_eq!(v.len(), m.rows);
    (0..m.cols)
        .map(|j| {
            v.iter().enumerate().fold(field.zero(), |acc, (k, vk)| {
                field.add(&acc, &field.mul(vk, &m[(k, j)]))
            })
        })
        .collect()
}

/// Stacks the rows of `a` on top of the rows of `b`.
pub fn vstack<E: Clone>(a: &Matrix<E>, b: &Matrix<E>) -> Result<Matrix<E>, LinalgError> {
    if a.cols != b.cols {
        return Err(LinalgError::DimensionMismatch {
            expected: a.cols,
            got: b.cols,
        });
    }
    let mut data = a.data.clone();
    data.extend_from_slice(&b.data);
    Ok(Matrix {
        rows: a.rows + b.rows,
        cols: a.cols,
        data,
    })
}

/// Output of Gauss–Jordan elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref<E> {
    /// The full reduced row-echelon form (zero rows kept at the bottom).
    pub matrix: Matrix<E>,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

pub fn rref<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Rref<F::Elem> {
    let mut a = m.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols {
        if r == a.rows {
            break;
        }
        let Some(piv) = (r..a.rows).find(|&i| !field.is_zero(&a[(i, c)])) else {
            continue;
        };
        a.swap_rows(r, piv);
        let inv = field.inv(&a[(r, c)]).expect("pivot is nonzero");
        for j in c..a.cols {
            a[(r, j)] = field.mul(&a[(r, j)], &inv);
        }
        for i in 0..a.rows {
            if i == r || field.is_zero(&a[(i, c)]) {
                continue;
            }
            let factor = a[(i, c)].clone();
            for j in c..a.cols {
                let t = field.mul(&factor, &a[(r, j)]);
                a[(i, j)] = field.sub(&a[(i, j)], &t);
            }
        }
        pivots.push(c);
        r += 1;
    }
    Rref {
        matrix: a,
        rank: r,
        pivots,
    }
}

/// The nonzero rows of the reduced row-echelon form, with pivot columns.
pub fn rref_basis<F: Field>(field: &F, m: &Matrix<F::Elem>) -> (Matrix<F::Elem>, Vec<usize>) {
    let mut r = rref(field, m);
    r.matrix.truncate_rows(r.rank);
    (r.matrix, r.pivots)
}

pub fn rank<F: Field>(field: &F, m: &Matrix<F::Elem>) -> usize {
    rref(field, m).rank
}

/// Basis (as rows, in RREF) of `{y : M y = 0}`.
pub fn kernel_basis<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let r = rref(field, m);
    let n = m.cols;
    let free: Vec<usize> = (0..n).filter(|c| !r.pivots.contains(c)).collect();
    let mut rows = Vec::with_capacity(free.len());
    for &f in &free {
        let mut v = vec![field.zero(); n];
        v[f] = field.one();
        for (i, &pc) in r.pivots.iter().enumerate() {
            v[pc] = field.neg(&r.matrix[(i, f)]);
        }
        rows.push(v);
    }
    let k = Matrix::from_rows(&rows, n).expect("rows have length n");
    rref_basis(field, &k).0
}

/// Basis of `{x : xᵀ M = 0}`.
pub fn left_kernel_basis<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    kernel_basis(field, &m.transpose())
}

/// Inverse of a square matrix, `None` when singular.
pub fn inverse<F: Field>(field: &F, m: &Matrix<F::Elem>) -> Option<Matrix<F::Elem>> {
    let n = m.rows;
    if m.cols != n {
        return None;
    }
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            m[(i, j)].clone()
        } else if j - n == i {
            field.one()
        } else {
            field.zero()
        }
    });
    let r = rref(field, &aug);
    if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
        return None;
    }
    Some(r.matrix.block(0, n, n, 2 * n))
}

/// Rows of `basis` followed by unit vectors completing them to a basis of
/// the ambient space, lowest index first.
pub fn complete_basis<F: Field>(field: &F, basis: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    let n = basis.cols;
    let mut rows = basis.row_vecs();
    let mut current = rank(field, basis);
    for i in 0..n {
        if current == n {
            break;
        }
        let mut e = vec![field.zero(); n];
        e[i] = field.one();
        rows.push(e);
        let cand = Matrix::from_rows(&rows, n).unwrap();
        let rk = rank(field, &cand);
        if rk > current {
            current = rk;
        } else {
            rows.pop();
        }
    }
    Matrix::from_rows(&rows, n).unwrap()
}
