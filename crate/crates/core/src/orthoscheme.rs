//! Points of the orthoscheme complexes K(𝓛), K(𝓜) and K(𝓛×𝓜): convex
//! combinations of chains, F-coordinates in a frame, the recover map, the
//! product zipper and Lovász extension values.

use num_traits::{One, Signed, Zero};

use crate::arith::BigRational;
use crate::bilinear::{restricted_rank, SymbolicMatrix};
use crate::frames::Frame;
use crate::linalg::{CoSubspace, LatticeElement, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OrthoschemeError {
    #[error("invalid chain point: {0}")]
    InvalidPoint(&'static str),
    #[error("support element is not in the frame")]
    NotInFrame,
    #[error("coordinates belong to different frames")]
    FrameMismatch,
    #[error("coordinate outside [0, 1]")]
    OutOfRange,
}

/// `Σ λ_i p_i` with `p_1 ≺ p_2 ≺ ⋯` a strict chain and `λ_i > 0`, `Σ λ_i = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChainPoint<E> {
    support: Vec<E>,
    coeffs: Vec<BigRational>,
}

impl<E: LatticeElement> ChainPoint<E> {
    /// Drops zero coefficients, then validates.
    pub fn new(support: Vec<E>, coeffs: Vec<BigRational>) -> Result<Self, OrthoschemeError> {
        if support.len() != coeffs.len() {
            return Err(OrthoschemeError::InvalidPoint("length mismatch"));
        }
        let (support, coeffs): (Vec<E>, Vec<BigRational>) =
            support.into_iter().zip(coeffs).filter(|(_, c)| !c.is_zero()).unzip();
        if support.is_empty() {
            return Err(OrthoschemeError::InvalidPoint("empty support"));
        }
        if coeffs.iter().any(|c| c.is_negative()) {
            return Err(OrthoschemeError::InvalidPoint("negative coefficient"));
        }
        if coeffs.iter().sum::<BigRational>() != BigRational::one() {
            return Err(OrthoschemeError::InvalidPoint("coefficients do not sum to 1"));
        }
        for w in support.windows(2) {
            if w[0].rank() >= w[1].rank() || !w[0].precedes(&w[1]) {
                return Err(OrthoschemeError::InvalidPoint("support is not a strict chain"));
            }
        }
        Ok(ChainPoint { support, coeffs })
    }

    pub fn vertex(e: E) -> Self {
        ChainPoint {
            support: vec![e],
            coeffs: vec![BigRational::one()],
        }
    }

    pub fn support(&self) -> &[E] {
        &self.support
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn ambient(&self) -> usize {
        self.support[0].repr().ambient()
    }

    /// `f̄(x) = Σ λ_i f(p_i)`.
    pub fn lovasz(&self, f: impl Fn(&E) -> BigRational) -> BigRational {
        self.support.iter().zip(&self.coeffs).map(|(p, c)| c * f(p)).sum()
    }

    /// Coordinates along any maximal chain through the support:
    /// `u_k = Σ {λ_i : rank p_i ≥ k}` for `k = 1..n`.
    pub fn chain_coordinates(&self) -> Vec<BigRational> {
        (1..=self.ambient())
            .map(|k| {
                self.support
                    .iter()
                    .zip(&self.coeffs)
                    .filter(|(p, _)| p.rank() >= k)
                    .map(|(_, c)| c.clone())
                    .sum()
            })
            .collect()
    }

    /// `d(𝟎, x)²`.
    pub fn dist0_sq(&self) -> BigRational {
        self.chain_coordinates().iter().map(|u| u * u).sum()
    }

    /// Largest denominator bit length among the coefficients.
    pub fn max_denominator_bits(&self) -> u64 {
        self.coeffs.iter().map(crate::arith::denominator_bits).max().unwrap_or(0)
    }
}

/// A point of the cube `[0,1]ⁿ` isometric to K(frame).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FCoordinates {
    pub values: Vec<BigRational>,
    pub frame_key: u64,
}

/// `Σ λ_i 1_{S_i}` where `S_i` is the atom set of the i-th support element.
pub fn f_coordinates<E: LatticeElement>(z: &ChainPoint<E>, frame: &Frame<E>) -> Result<FCoordinates, OrthoschemeError> {
    let mut values = vec![BigRational::zero(); frame.n()];
    for (p, c) in z.support.iter().zip(&z.coeffs) {
        let s = frame.locate(p).ok_or(OrthoschemeError::NotInFrame)?;
        for i in s {
            values[i] += c;
        }
    }
    Ok(FCoordinates {
        values,
        frame_key: frame.key(),
    })
}

/// Inverse of `f_coordinates`: sorts coordinates decreasingly (ties by atom
/// index) and forms `(1−x_{i₁})𝟎 + Σ_k (x_{i_k}−x_{i_{k+1}})(a_{i₁}∨⋯∨a_{i_k})`.
pub fn recover<E: LatticeElement>(c: &FCoordinates, frame: &Frame<E>) -> Result<ChainPoint<E>, OrthoschemeError> {
    if c.frame_key != frame.key() || c.values.len() != frame.n() {
        return Err(OrthoschemeError::FrameMismatch);
    }
    recover_values(&c.values, frame)
}

pub(crate) fn recover_values<E: LatticeElement>(
    values: &[BigRational],
    frame: &Frame<E>,
) -> Result<ChainPoint<E>, OrthoschemeError> {
    let (zero, one) = (BigRational::zero(), BigRational::one());
    if values.iter().any(|v| v < &zero || v > &one) {
        return Err(OrthoschemeError::OutOfRange);
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].cmp(&values[a]));
    let mut support = Vec::new();
    let mut coeffs = Vec::new();
    let first = order.first().map_or(zero.clone(), |&i| values[i].clone());
    if first != one {
        support.push(frame.join(&[]));
        coeffs.push(&one - &first);
    }
    for k in 0..order.len() {
        let next = order.get(k + 1).map_or(zero.clone(), |&i| values[i].clone());
        let w = &values[order[k]] - next;
        if !w.is_zero() {
            support.push(frame.join(&order[..=k]));
            coeffs.push(w);
        }
    }
    ChainPoint::new(support, coeffs)
}

/// Squared distance between two points of one frame cube.
pub fn distance_in_frame(a: &FCoordinates, b: &FCoordinates) -> Result<BigRational, OrthoschemeError> {
    if a.frame_key != b.frame_key || a.values.len() != b.values.len() {
        return Err(OrthoschemeError::FrameMismatch);
    }
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// A point of K(𝓛) × K(𝓜).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductPoint {
    pub x: ChainPoint<Subspace>,
    pub y: ChainPoint<CoSubspace>,
}

impl ProductPoint {
    pub fn new(x: ChainPoint<Subspace>, y: ChainPoint<CoSubspace>) -> Result<Self, OrthoschemeError> {
        if x.ambient() != y.ambient() {
            return Err(OrthoschemeError::InvalidPoint("ambient dimensions differ"));
        }
        Ok(ProductPoint { x, y })
    }

    pub fn max_denominator_bits(&self) -> u64 {
        self.x.max_denominator_bits().max(self.y.max_denominator_bits())
    }
}

/// A point of K(𝓛×𝓜) as a chain of pairs, listed from the top down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZippedPoint {
    pub terms: Vec<(BigRational, Subspace, CoSubspace)>,
}

/// Greedy merge from the top of both chains.
pub fn zip(z: &ProductPoint) -> ZippedPoint {
    let mut i = z.x.support.len();
    let mut j = z.y.support.len();
    let mut mu = z.x.coeffs[i - 1].clone();
    let mut nu = z.y.coeffs[j - 1].clone();
    let mut terms = Vec::new();
    loop {
        let w = if mu < nu { mu.clone() } else { nu.clone() };
        terms.push((w.clone(), z.x.support[i - 1].clone(), z.y.support[j - 1].clone()));
        mu -= &w;
        nu -= &w;
        if mu.is_zero() {
            i -= 1;
            if i > 0 {
                mu = z.x.coeffs[i - 1].clone();
            }
        }
        if nu.is_zero() {
            j -= 1;
            if j > 0 {
                nu = z.y.coeffs[j - 1].clone();
            }
        }
        if i == 0 || j == 0 {
            break;
        }
    }
    ZippedPoint { terms }
}

/// Componentwise projection, `Σ λ_i (p_i, q_i) ↦ (Σ λ_i p_i, Σ λ_i q_i)`.
pub fn unzip(z: &ZippedPoint) -> Result<ProductPoint, OrthoschemeError> {
    fn collect<E: LatticeElement>(items: impl Iterator<Item = (BigRational, E)>) -> Result<ChainPoint<E>, OrthoschemeError> {
        let mut support: Vec<E> = Vec::new();
        let mut coeffs: Vec<BigRational> = Vec::new();
        for (w, e) in items {
            if support.last() == Some(&e) {
                *coeffs.last_mut().unwrap() += w;
            } else {
                support.push(e);
                coeffs.push(w);
            }
        }
        support.reverse();
        coeffs.reverse();
        ChainPoint::new(support, coeffs)
    }
    let x = collect(z.terms.iter().map(|(w, p, _)| (w.clone(), p.clone())))?;
    let y = collect(z.terms.iter().map(|(w, _, q)| (w.clone(), q.clone())))?;
    ProductPoint::new(x, y)
}

/// `g(X, Y) = −dim X − dim Y + penalty · Σ_i R_i(X, Y)`.
pub fn g_vertex(a: &SymbolicMatrix, x: &Subspace, y: &CoSubspace, penalty: u64) -> BigRational {
    let field = a.field();
    let yp = y.primal();
    let r: usize = a
        .mats()
        .iter()
        .map(|m| restricted_rank(&field, m, x, &yp).expect("same ambient"))
        .sum();
    let v = penalty as i128 * r as i128 - x.dim() as i128 - yp.dim() as i128;
    BigRational::from_integer(v.into())
}

/// Lovász extension of `g` at a product point, evaluated on the zipped
/// support.
pub fn g_eval(a: &SymbolicMatrix, z: &ProductPoint, penalty: u64) -> BigRational {
    zip(z)
        .terms
        .iter()
        .map(|(w, p, q)| w * g_vertex(a, p, q, penalty))
        .sum()
}

/// `g̃ = ḡ + perturbation · (d(𝟎,x)² + d(𝟎,y)²)`.
pub fn g_tilde_eval(a: &SymbolicMatrix, z: &ProductPoint, penalty: u64, perturbation: &BigRational) -> BigRational {
    g_eval(a, z, penalty) + perturbation * (z.x.dist0_sq() + z.y.dist0_sq())
}
