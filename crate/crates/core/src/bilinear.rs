//! The symbolic matrix `A = Σ A_i x_i`, restricted ranks of the bilinear
//! forms `A_i(x, y) = xᵀ A_i y`, orthogonal complements and blow-ups.

use crate::arith::{Field, Gfp};
use crate::linalg::{self, kernel_basis, CoSubspace, LinalgError, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BilinearError {
    #[error("a symbolic matrix needs at least one summand")]
    Empty,
    #[error("summand {index} is {rows}x{cols}, expected {n}x{n}")]
    Shape {
        index: usize,
        rows: usize,
        cols: usize,
        n: usize,
    },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `A = A₁x₁ + ⋯ + A_m x_m` with every `A_i` an `n × n` matrix over GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicMatrix {
    field: Gfp,
    n: usize,
    mats: Vec<Matrix<u64>>,
}

impl SymbolicMatrix {
    pub fn new(field: Gfp, mats: Vec<Matrix<u64>>) -> Result<Self, BilinearError> {
        let n = mats.first().ok_or(BilinearError::Empty)?.rows();
        for (index, a) in mats.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(BilinearError::Shape {
                    index,
                    rows: a.rows(),
                    cols: a.cols(),
                    n,
                });
            }
        }
        let mats = mats.into_iter().map(|a| a.map(|&x| x % field.p())).collect();
        Ok(SymbolicMatrix { field, n, mats })
    }

    /// Builds from signed integer entries, reducing mod p.
    pub fn from_i64(field: Gfp, mats: &[Vec<Vec<i64>>]) -> Result<Self, BilinearError> {
        let mut out = Vec::with_capacity(mats.len());
        for a in mats {
            let cols = a.first().map_or(0, |r| r.len());
            let rows: Vec<Vec<u64>> = a
                .iter()
                .map(|r| r.iter().map(|&v| field.reduce_i64(v)).collect())
                .collect();
            out.push(Matrix::from_rows(&rows, cols)?);
        }
        Self::new(field, out)
    }

    pub fn field(&self) -> Gfp {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[Matrix<u64>] {
        &self.mats
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(|a| linalg::is_zero_matrix(&self.field, a))
    }

    /// `A_i(X, Y) = {0}` for every summand.
    pub fn annihilates(&self, x: &Subspace, y: &Subspace) -> Result<bool, BilinearError> {
        for a in &self.mats {
            if restricted_rank(&self.field, a, x, y)? != 0 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn vanishing_pair(&self, x: Subspace, y: Subspace) -> Result<Option<VanishingPair>, BilinearError> {
        if self.annihilates(&x, &y)? {
            Ok(Some(VanishingPair::new(self.n, x, y)))
        } else {
            Ok(None)
        }
    }

    /// The `d`-blow-up `Σ A_i ⊗ X_i` as the `m·d²` summands `A_i ⊗ E_jk`,
    /// ordered by `(i, j, k)`.
    pub fn blowup(&self, d: usize) -> SymbolicMatrix {
        assert!(d >= 1, "blow-up size must be positive");
        let mut mats = Vec::with_capacity(self.m() * d * d);
        for a in &self.mats {
            for j in 0..d {
                for k in 0..d {
                    let unit = Matrix::from_fn(d, d, |r, c| u64::from(r == j && c == k));
                    mats.push(kronecker(&self.field, a, &unit));
                }
            }
        }
        SymbolicMatrix {
            field: self.field,
            n: self.n * d,
            mats,
        }
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kronecker<F: Field>(field: &F, a: &Matrix<F::Elem>, b: &Matrix<F::Elem>) -> Matrix<F::Elem> {
    Matrix::from_fn(a.rows() * b.rows(), a.cols() * b.cols(), |r, c| {
        field.mul(
            &a[(r / b.rows(), c / b.cols())],
            &b[(r % b.rows(), c % b.cols())],
        )
    })
}

/// A pair `(X, Y)` of subspaces annihilating every summand, with its
/// objective value `2n − dim X − dim Y`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VanishingPair {
    pub x: Subspace,
    pub y: Subspace,
    pub value: usize,
}

impl VanishingPair {
    fn new(n: usize, x: Subspace, y: Subspace) -> Self {
        let value = 2 * n - x.dim() - y.dim();
        VanishingPair { x, y, value }
    }

    /// `Y` as an element of 𝓜.
    pub fn y_co(&self) -> CoSubspace {
        CoSubspace::from_primal(&self.y)
    }
}

fn check_ambient(a: &Matrix<u64>, s: &Subspace) -> Result<(), LinalgError> {
    if s.ambient() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            got: s.ambient(),
        });
    }
    Ok(())
}

/// `rank A_i|_{X×Y}`, the rank of `B_X A_i B_Yᵀ`.
pub fn restricted_rank(field: &Gfp, a: &Matrix<u64>, x: &Subspace, y: &Subspace) -> Result<usize, LinalgError> {
    check_ambient(a, x)?;
    check_ambient(a, y)?;
    if x.is_zero() || y.is_zero() {
        return Ok(0);
    }
    let bxa = linalg::mul(field, x.basis(), a)?;
    let m = linalg::mul(field, &bxa, &y.basis().transpose())?;
    Ok(linalg::rank(field, &m))
}

/// `X^⊥ = {y : A_i(x, y) = 0 for all x ∈ X}`.
pub fn orth_right(field: &Gfp, a: &Matrix<u64>, x: &Subspace) -> Result<Subspace, LinalgError> {
    check_ambient(a, x)?;
    let bxa = linalg::mul(field, x.basis(), a)?;
    Ok(Subspace::span(*field, &kernel_basis(field, &bxa)))
}

/// `Y^⊥ = {x : A_i(x, y) = 0 for all y ∈ Y}`.
pub fn orth_left(field: &Gfp, a: &Matrix<u64>, y: &Subspace) -> Result<Subspace, LinalgError> {
    check_ambient(a, y)?;
    let bya = linalg::mul(field, y.basis(), &a.transpose())?;
    Ok(Subspace::span(*field, &kernel_basis(field, &bya)))
}

/// Left kernel `U₀` of `A_i`.
pub fn left_kernel(field: &Gfp, a: &Matrix<u64>) -> Subspace {
    orth_left(field, a, &Subspace::full(*field, a.rows())).expect("ambient matches")
}

/// Right kernel `V₀` of `A_i`.
pub fn right_kernel(field: &Gfp, a: &Matrix<u64>) -> Subspace {
    orth_right(field, a, &Subspace::full(*field, a.rows())).expect("ambient matches")
}

/// Evaluates `R(X,Y)`, `dim Y − dim Y∩X^⊥` and `dim X − dim X∩Y^⊥` and
/// reports whether all three agree.
pub fn check_rank_identity(field: &Gfp, a: &Matrix<u64>, x: &Subspace, y: &Subspace) -> Result<bool, LinalgError> {
    let r = restricted_rank(field, a, x, y)?;
    let via_y = y.dim() - y.meet(&orth_right(field, a, x)?)?.dim();
    let via_x = x.dim() - x.meet(&orth_left(field, a, y)?)?.dim();
    Ok(r == via_y && r == via_x)
}
