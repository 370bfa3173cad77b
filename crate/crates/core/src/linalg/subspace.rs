use super::{kernel_basis, rref_basis, vec_mul, vstack, LinalgError, Matrix};
use crate::arith::{Field, Gfp};
use std::fmt;
use std::hash::Hash;

/// A subspace of GF(p)ⁿ stored by the nonzero rows of its reduced
/// row-echelon basis. The stored form is canonical, so derived equality is
/// equality of subspaces.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    field: Gfp,
    n: usize,
    basis: Matrix<u64>,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(n={}, p={}, {:?})", self.n, self.field.p(), self.basis.row_vecs())
    }
}

impl Subspace {
    /// Span of the rows of `m`.
    pub fn span(field: Gfp, m: &Matrix<u64>) -> Self {
        let reduced = m.map(|&x| x % field.p());
        let (basis, pivots) = rref_basis(&field, &reduced);
        Subspace {
            field,
            n: m.cols(),
            basis,
            pivots,
        }
    }

    pub fn from_vectors(field: Gfp, n: usize, vectors: &[Vec<u64>]) -> Result<Self, LinalgError> {
        Ok(Self::span(field, &Matrix::from_rows(vectors, n)?))
    }

    pub fn zero(field: Gfp, n: usize) -> Self {
        Self::span(field, &Matrix::filled(0, n, 0))
    }

    pub fn full(field: Gfp, n: usize) -> Self {
        Self::span(field, &super::identity(&field, n))
    }

    /// Span of the unit vectors with the given indices.
    pub fn coordinate(field: Gfp, n: usize, indices: &[usize]) -> Self {
        let rows: Vec<Vec<u64>> = indices
            .iter()
            .map(|&i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        Self::span(field, &Matrix::from_rows(&rows, n).unwrap())
    }

    pub fn field(&self) -> Gfp {
        self.field
    }

    pub fn ambient(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn basis(&self) -> &Matrix<u64> {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<u64>> {
        self.basis.row_vecs()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.n
    }

    fn check_compatible(&self, other: &Subspace) -> Result<(), LinalgError> {
        if self.field != other.field {
            return Err(LinalgError::FieldMismatch);
        }
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    pub fn contains_vector(&self, v: &[u64]) -> bool {
        // Reduce v against the RREF basis using pivot columns.
        let f = &self.field;
        let mut w: Vec<u64> = v.iter().map(|&x| x % f.p()).collect();
        for (i, &pc) in self.pivots.iter().enumerate() {
            let c = w[pc];
            if c == 0 {
                continue;
            }
            for (j, wj) in w.iter_mut().enumerate() {
                *wj = f.sub(wj, &f.mul(&c, &self.basis[(i, j)]));
            }
        }
        w.iter().all(|&x| x == 0)
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subspace) -> bool {
        other.dim() <= self.dim() && other.basis.row_vecs().iter().all(|v| self.contains_vector(v))
    }

    pub fn join(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compatible(other)?;
        Ok(Self::span(self.field, &vstack(&self.basis, &other.basis)?))
    }

    pub fn meet(&self, other: &Subspace) -> Result<Subspace, LinalgError> {
        self.check_compatible(other)?;
        let ann = self.annihilator().join(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    pub fn with_vector(&self, v: &[u64]) -> Subspace {
        let extra = Matrix::from_rows(&[v.to_vec()], self.n).expect("vector has ambient length");
        Self::span(self.field, &vstack(&self.basis, &extra).unwrap())
    }

    /// `{c : c·x = 0 for all x in self}`, as a subspace of covectors.
    pub fn annihilator(&self) -> Subspace {
        let k = kernel_basis(&self.field, &self.basis);
        Subspace {
            field: self.field,
            n: self.n,
            pivots: super::rref(&self.field, &k).pivots,
            basis: k,
        }
    }

    /// Image under `x ↦ xᵀ M` for an `n × k` matrix `M`.
    pub fn image(&self, m: &Matrix<u64>) -> Subspace {
        let rows: Vec<Vec<u64>> = self
            .basis
            .row_vecs()
            .iter()
            .map(|r| vec_mul(&self.field, r, m))
            .collect();
        Self::span(self.field, &Matrix::from_rows(&rows, m.cols()).unwrap())
    }
}

/// An element of 𝓜, the subspace lattice under reverse inclusion, stored by
/// its annihilator so that the 𝓜 order is inclusion of annihilators.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoSubspace {
    ann: Subspace,
}

impl fmt::Debug for CoSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CoSubspace(ann={:?})", self.ann.basis_vectors())
    }
}

impl CoSubspace {
    pub fn from_primal(y: &Subspace) -> Self {
        CoSubspace { ann: y.annihilator() }
    }

    pub fn from_annihilator(ann: Subspace) -> Self {
        CoSubspace { ann }
    }

    pub fn primal(&self) -> Subspace {
        self.ann.annihilator()
    }

    pub fn annihilator(&self) -> &Subspace {
        &self.ann
    }

    /// Dimension of the underlying primal subspace.
    pub fn primal_dim(&self) -> usize {
        self.ann.ambient() - self.ann.dim()
    }
}

/// Common interface of 𝓛 (subspaces) and 𝓜 (co-subspaces).
///
/// Every lattice is realized as the inclusion lattice of some subspace
/// representation, so chains, frames and F-coordinates can be written once.
pub trait LatticeElement: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync {
    fn repr(&self) -> &Subspace;
    fn from_repr(repr: Subspace) -> Self;

    fn rank(&self) -> usize {
        self.repr().dim()
    }

    /// `self ⪯ other` in this lattice's order.
    fn precedes(&self, other: &Self) -> bool {
        other.repr().contains(self.repr())
    }

    fn bottom(field: Gfp, n: usize) -> Self {
        Self::from_repr(Subspace::zero(field, n))
    }

    fn top(field: Gfp, n: usize) -> Self {
        Self::from_repr(Subspace::full(field, n))
    }
}

impl LatticeElement for Subspace {
    fn repr(&self) -> &Subspace {
        self
    }
    fn from_repr(repr: Subspace) -> Self {
        repr
    }
}

impl LatticeElement for CoSubspace {
    fn repr(&self) -> &Subspace {
        &self.ann
    }
    fn from_repr(repr: Subspace) -> Self {
        CoSubspace { ann: repr }
    }
}
