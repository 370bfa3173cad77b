//! nc-singularity of integer symbolic matrices by p-adic descent: solve the
//! rank problem for the leading matrix mod p, rescale rows and columns by
//! powers of p, and stop once the accumulated valuation passes a bound.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{padic_leading_digit, BigRational, Gfp, Prime};
use crate::bilinear::{BilinearError, SymbolicMatrix, VanishingPair};
use crate::linalg::{LinalgError, Matrix};
use crate::sppa::{mvsp_to_fr, sppa_run, FrCertificate, SolverConfig, SppaError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ValDetError {
    #[error("a symbolic matrix needs at least one summand")]
    Empty,
    #[error("summand {index} is not {n}x{n}")]
    Shape { index: usize, n: usize },
    #[error("entry ({row}, {col}) of summand {index} is not divisible by p; the rank certificate is invalid")]
    Integrality { index: usize, row: usize, col: usize },
    #[error("certificate has r + s = {sum}, which does not exceed n = {n}")]
    NotSingular { sum: usize, n: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Bilinear(#[from] BilinearError),
    #[error(transparent)]
    Solver(#[from] SppaError),
}

/// `A = Σ A_i x_i` with integer `n × n` summands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntSymbolicMatrix {
    n: usize,
    mats: Vec<Matrix<BigInt>>,
}

impl IntSymbolicMatrix {
    pub fn new(mats: Vec<Matrix<BigInt>>) -> Result<Self, ValDetError> {
        let n = mats.first().ok_or(ValDetError::Empty)?.rows();
        for (index, a) in mats.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(ValDetError::Shape { index, n });
            }
        }
        Ok(IntSymbolicMatrix { n, mats })
    }

    pub fn from_i64(mats: &[Vec<Vec<i64>>]) -> Result<Self, ValDetError> {
        let mut out = Vec::with_capacity(mats.len());
        for a in mats {
            let rows: Vec<Vec<BigInt>> = a.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            out.push(Matrix::from_rows(&rows, a.first().map_or(0, Vec::len))?);
        }
        Self::new(out)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.mats.len()
    }

    pub fn mats(&self) -> &[Matrix<BigInt>] {
        &self.mats
    }

    /// `max |entry|`.
    pub fn max_abs(&self) -> BigInt {
        self.mats
            .iter()
            .flat_map(|a| a.entries().iter().map(|v| v.abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn max_bits(&self) -> u64 {
        self.max_abs().bits()
    }

    /// Reduction mod `q` as a symbolic matrix over GF(q).
    pub fn reduce(&self, field: Gfp) -> SymbolicMatrix {
        let mats = self.mats.iter().map(|a| a.map(|v| field.reduce_bigint(v))).collect();
        SymbolicMatrix::new(field, mats).expect("shape already checked")
    }
}

/// Entrywise order-0 p-adic digit, i.e. reduction mod p.
pub fn leading_matrix(a: &IntSymbolicMatrix, p: Prime) -> SymbolicMatrix {
    let field = Gfp::from_prime(p);
    let mats = a
        .mats
        .iter()
        .map(|m| m.map(|v| padic_leading_digit(&BigRational::from_integer(v.clone()), p).expect("integers have nonnegative valuation")))
        .collect();
    SymbolicMatrix::new(field, mats).expect("shape already checked")
}

/// `B = t + 1` where `t` is the least integer with `p^{2t} ≥ n^{3n} D^{2n}`,
/// the exact form of `⌈n(1.5 log_p n + log_p D)⌉ + 1`.
pub fn stopping_bound(n: usize, d: &BigInt, p: Prime) -> u64 {
    let d = if d.is_zero() { BigInt::one() } else { d.abs() };
    let n_big = BigInt::from(n);
    let target = num_traits::pow(n_big, 3 * n) * num_traits::pow(d, 2 * n);
    let p2 = BigInt::from(p.get()) * BigInt::from(p.get());
    let mut t = 0u64;
    let mut acc = BigInt::one();
    while acc < target {
        acc *= &p2;
        t += 1;
    }
    t + 1
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepRecord {
    pub r: usize,
    pub s: usize,
    pub increment: u64,
    pub objective: u64,
    pub max_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValDetState {
    pub a: IntSymbolicMatrix,
    pub p: Prime,
    pub objective: u64,
    pub bound: u64,
    pub iterations: usize,
    pub transcript: Vec<StepRecord>,
}

impl ValDetState {
    pub fn new(a: IntSymbolicMatrix, p: Prime) -> Self {
        let bound = stopping_bound(a.n(), &a.max_abs(), p);
        ValDetState {
            a,
            p,
            objective: 0,
            bound,
            iterations: 0,
            transcript: Vec::new(),
        }
    }
}

fn int_mul(a: &Matrix<BigInt>, b: &Matrix<BigInt>) -> Matrix<BigInt> {
    Matrix::from_fn(a.rows(), b.cols(), |i, j| (0..a.cols()).map(|k| &a[(i, k)] * &b[(k, j)]).sum())
}

/// `A_i ← diag(p⁻¹ on rows < r) · S A_i T · diag(p on columns ≥ s)` with
/// `S`, `T` lifted to entries in `[0, p)`. Returns the increment `r + s − n`.
pub fn valdet_step(state: &mut ValDetState, cert: &FrCertificate) -> Result<u64, ValDetError> {
    let n = state.a.n();
    let (r, s) = (cert.r, cert.c);
    if r + s <= n {
        return Err(ValDetError::NotSingular { sum: r + s, n });
    }
    let p = BigInt::from(state.p.get());
    let lift = |m: &Matrix<u64>| m.map(|&v| BigInt::from(v));
    let (sl, tl) = (lift(&cert.s), lift(&cert.t));
    let mut next = Vec::with_capacity(state.a.m());
    for (index, a) in state.a.mats.iter().enumerate() {
        let mut m = int_mul(&int_mul(&sl, a), &tl);
        for row in 0..n {
            for col in 0..n {
                let v = &mut m[(row, col)];
                match (row < r, col < s) {
                    (true, true) => {
                        let (q, rem) = v.div_rem(&p);
                        if !rem.is_zero() {
                            return Err(ValDetError::Integrality { index, row, col });
                        }
                        *v = q;
                    }
                    (false, false) => *v *= &p,
                    _ => {}
                }
            }
        }
        next.push(m);
    }
    let inc = (r + s - n) as u64;
    state.a = IntSymbolicMatrix { n, mats: next };
    state.objective += inc;
    state.iterations += 1;
    state.transcript.push(StepRecord {
        r,
        s,
        increment: inc,
        objective: state.objective,
        max_bits: state.a.max_bits(),
    });
    Ok(inc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Regular,
    Singular,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Regular => "regular",
            Verdict::Singular => "singular",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct NcRegularityVerdict {
    pub verdict: Verdict,
    /// `v_p Det′ A` on a regular verdict; the last objective otherwise.
    pub objective: u64,
    pub state: ValDetState,
    /// Leading matrix at termination.
    pub leading: SymbolicMatrix,
    /// Optimal vanishing pair of the final leading matrix, when solved.
    pub final_pair: Option<VanishingPair>,
}

/// Runs the descent with a caller-supplied GF(p) solver returning a
/// certified optimal vanishing pair, or `None` when it cannot certify.
pub fn valdet_run_with(
    a: &IntSymbolicMatrix,
    p: Prime,
    mut solver: impl FnMut(&SymbolicMatrix) -> Result<Option<VanishingPair>, ValDetError>,
) -> Result<NcRegularityVerdict, ValDetError> {
    let n = a.n();
    let mut state = ValDetState::new(a.clone(), p);
    loop {
        let leading = leading_matrix(&state.a, p);
        let Some(pair) = solver(&leading)? else {
            return Ok(NcRegularityVerdict {
                verdict: Verdict::Inconclusive,
                objective: state.objective,
                state,
                leading,
                final_pair: None,
            });
        };
        if pair.value == n {
            return Ok(NcRegularityVerdict {
                verdict: Verdict::Regular,
                objective: state.objective,
                state,
                leading,
                final_pair: Some(pair),
            });
        }
        let inc = (n - pair.value) as u64;
        if state.objective + inc > state.bound {
            return Ok(NcRegularityVerdict {
                verdict: Verdict::Singular,
                objective: state.objective,
                state,
                leading,
                final_pair: Some(pair),
            });
        }
        let cert = mvsp_to_fr(&pair, &leading)?;
        valdet_step(&mut state, &cert)?;
    }
}

/// Runs the descent with the certified splitting proximal point solver.
pub fn valdet_run(a: &IntSymbolicMatrix, p: Prime, cfg: &SolverConfig) -> Result<NcRegularityVerdict, ValDetError> {
    valdet_run_with(a, p, |lead| {
        let s = sppa_run(lead, cfg)?;
        Ok(s.certified.then_some(s.best_feasible))
    })
}
