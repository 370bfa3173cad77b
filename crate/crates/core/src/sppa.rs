//! Splitting proximal point iteration on K(𝓛) × K(𝓜) for the penalized
//! vanishing-subspace objective, with sandwich certification.

use num_traits::{One, Zero};

use crate::arith::{BigRational, Gfp};
use crate::bilinear::{SymbolicMatrix, VanishingPair};
use crate::frames::{maximal_chain, orthogonal_frame, FrameError};
use crate::linalg::{self, CoSubspace, LatticeElement, Matrix, Subspace};
use crate::oracle::{blowup_lower_bound, RankWitness};
use crate::orthoscheme::{f_coordinates, g_eval, g_tilde_eval, recover_values, ChainPoint, OrthoschemeError, ProductPoint};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SppaError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("pair is not vanishing")]
    Infeasible,
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Point(#[from] OrthoschemeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Strong-convexity constant in the step schedule `λ_k = 1/(ε(k+1))`.
    pub epsilon_sc: BigRational,
    /// Weight of `d(𝟎,x)² + d(𝟎,y)²` in the perturbed objective.
    pub perturbation: BigRational,
    pub penalty: u64,
    pub max_cycles: usize,
    /// Largest blow-up size tried for the lower bound.
    pub certify_dmax: usize,
    pub trials: usize,
    pub seed: u64,
    /// Stop as soon as the upper and lower bounds meet.
    pub stop_on_certify: bool,
}

impl SolverConfig {
    pub fn defaults(n: usize) -> Self {
        let n = n.max(1);
        SolverConfig {
            epsilon_sc: BigRational::new(1.into(), (2 * n).into()),
            perturbation: BigRational::new(1.into(), (8 * n).into()),
            penalty: 2 * n as u64 + 1,
            max_cycles: 200,
            certify_dmax: (n - 1).max(1),
            trials: 24,
            seed: 0,
            stop_on_certify: true,
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), SppaError> {
        let zero = BigRational::zero();
        if self.epsilon_sc <= zero || self.perturbation <= zero {
            return Err(SppaError::InvalidConfig("epsilon_sc and perturbation must be positive"));
        }
        if self.penalty < 2 * n as u64 + 1 {
            return Err(SppaError::InvalidConfig("penalty must be at least 2n+1"));
        }
        if self.certify_dmax == 0 || self.trials == 0 {
            return Err(SppaError::InvalidConfig("certify_dmax and trials must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceEntry {
    pub cycle: usize,
    pub lambda: BigRational,
    pub g: BigRational,
    pub g_tilde: BigRational,
    pub best_value: usize,
    pub max_denominator_bits: u64,
    pub support_sizes: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct SolverState {
    pub z: ProductPoint,
    /// Completed cycles.
    pub cycle: usize,
    pub best_feasible: VanishingPair,
    pub lower_bound: usize,
    pub witness: RankWitness,
    pub certified: bool,
    /// Cycle at which the bounds first met.
    pub certified_at: Option<usize>,
    pub trace: Vec<TraceEntry>,
}

/// Which lattice a chain point lives in. The dimension term is `−Σ u_i` on
/// 𝓛 and `Σ u_i − n` on 𝓜.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    L,
    M,
}

fn clamp01(v: BigRational) -> BigRational {
    if v < BigRational::zero() {
        BigRational::zero()
    } else if v > BigRational::one() {
        BigRational::one()
    } else {
        v
    }
}

/// The closed-form coordinate update of the dimension resolvent.
pub fn dim_update(u: &BigRational, side: Side, lambda: &BigRational, eps: &BigRational) -> BigRational {
    let shifted = match side {
        Side::L => u + lambda,
        Side::M => u - lambda,
    };
    let two = BigRational::from_integer(2.into());
    clamp01(shifted / (BigRational::one() + two * eps * lambda))
}

/// Resolvent of `∓dim̄ + ε d(𝟎,·)²` with step `λ`, computed along a maximal
/// chain through the support.
pub fn resolvent_dim<E: LatticeElement>(
    z: &ChainPoint<E>,
    side: Side,
    lambda: &BigRational,
    eps: &BigRational,
) -> Result<ChainPoint<E>, SppaError> {
    let sample = z.support()[0].repr();
    let chain = maximal_chain(z.support(), sample.field(), sample.ambient())?;
    let u: Vec<BigRational> = z.chain_coordinates().iter().map(|v| dim_update(v, side, lambda, eps)).collect();
    let n = u.len();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(BigRational::one() - u.first().cloned().unwrap_or_else(BigRational::zero));
    for k in 0..n {
        let next = u.get(k + 1).cloned().unwrap_or_else(BigRational::zero);
        coeffs.push(&u[k] - next);
    }
    Ok(ChainPoint::new(chain, coeffs)?)
}

/// `max{0, x−y} + ((x−x⁰)² + (y−y⁰)²)/(2λ)`.
pub fn p2_objective(x: &BigRational, y: &BigRational, x0: &BigRational, y0: &BigRational, lambda: &BigRational) -> BigRational {
    let hinge = if x > y { x - y } else { BigRational::zero() };
    let two = BigRational::from_integer(2.into());
    hinge + ((x - x0) * (x - x0) + (y - y0) * (y - y0)) / (two * lambda)
}

/// Exact minimizer over `[0,1]²` of `p2_objective`, by evaluating the
/// inactive, active and ridge candidates together with box-edge points.
pub fn solve_p2_coordinate(x0: &BigRational, y0: &BigRational, lambda: &BigRational) -> (BigRational, BigRational) {
    let (zero, one) = (BigRational::zero(), BigRational::one());
    let two = BigRational::from_integer(2.into());
    let xs = [clamp01(x0.clone()), clamp01(x0 - lambda), zero.clone(), one.clone()];
    let ys = [clamp01(y0.clone()), clamp01(y0 + lambda), zero, one];
    let ridge = clamp01((x0 + y0) / two);
    let mut cands: Vec<(BigRational, BigRational)> = Vec::with_capacity(17);
    for x in &xs {
        for y in &ys {
            cands.push((x.clone(), y.clone()));
        }
        cands.push((x.clone(), x.clone()));
    }
    cands.push((ridge.clone(), ridge));
    cands
        .into_iter()
        .map(|(x, y)| (p2_objective(&x, &y, x0, y0, lambda), x, y))
        .min()
        .map(|(_, x, y)| (x, y))
        .expect("candidates are nonempty")
}

/// Resolvent of `R̄_i` with step `λ′` computed inside an orthogonal frame
/// containing both supports.
pub fn resolvent_penalty(field: Gfp, a: &Matrix<u64>, z: &ProductPoint, lambda: &BigRational) -> Result<ProductPoint, SppaError> {
    let of = orthogonal_frame(field, a, z.x.support(), z.y.support())?;
    if of.k == 0 {
        return Ok(z.clone());
    }
    let mut fx = f_coordinates(&z.x, &of.e)?.values;
    let mut fy = f_coordinates(&z.y, &of.f)?.values;
    let mut moved = false;
    for i in 0..of.k {
        if fx[i] <= fy[i] {
            continue;
        }
        let (x, y) = solve_p2_coordinate(&fx[i], &fy[i], lambda);
        fx[i] = x;
        fy[i] = y;
        moved = true;
    }
    if !moved {
        return Ok(z.clone());
    }
    Ok(ProductPoint::new(recover_values(&fx, &of.e)?, recover_values(&fy, &of.f)?)?)
}

/// Vanishing pairs among `support(x) × support(y)`.
pub fn extract_candidates(z: &ProductPoint, a: &SymbolicMatrix) -> Vec<VanishingPair> {
    let mut out = Vec::new();
    for x in z.x.support() {
        for y in z.y.support() {
            if let Some(pair) = a.vanishing_pair(x.clone(), y.primal()).expect("same ambient") {
                out.push(pair);
            }
        }
    }
    out
}

/// The rank certificate of a vanishing pair: invertible `S`, `T` with the
/// upper-left `r × s` block of every `S A_i T` zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrCertificate {
    pub s: Matrix<u64>,
    pub t: Matrix<u64>,
    pub r: usize,
    pub c: usize,
}

impl FrCertificate {
    pub fn value(&self) -> usize {
        2 * self.s.rows() - self.r - self.c
    }

    pub fn verify(&self, a: &SymbolicMatrix) -> bool {
        let field = a.field();
        let n = a.n();
        if self.s.rows() != n || self.t.rows() != n || self.r > n || self.c > n {
            return false;
        }
        if linalg::inverse(&field, &self.s).is_none() || linalg::inverse(&field, &self.t).is_none() {
            return false;
        }
        a.mats().iter().all(|m| {
            let sat = linalg::mul(&field, &linalg::mul(&field, &self.s, m).unwrap(), &self.t).unwrap();
            (0..self.r).all(|i| (0..self.c).all(|j| sat[(i, j)] == 0))
        })
    }
}

pub fn mvsp_to_fr(pair: &VanishingPair, a: &SymbolicMatrix) -> Result<FrCertificate, SppaError> {
    let field = a.field();
    let s = linalg::complete_basis(&field, pair.x.basis());
    let t = linalg::complete_basis(&field, pair.y.basis()).transpose();
    let cert = FrCertificate {
        s,
        t,
        r: pair.x.dim(),
        c: pair.y.dim(),
    };
    if cert.verify(a) {
        Ok(cert)
    } else {
        Err(SppaError::Infeasible)
    }
}

fn trace_entry(a: &SymbolicMatrix, cfg: &SolverConfig, z: &ProductPoint, cycle: usize, lambda: BigRational, best: usize) -> TraceEntry {
    TraceEntry {
        cycle,
        lambda,
        g: g_eval(a, z, cfg.penalty),
        g_tilde: g_tilde_eval(a, z, cfg.penalty, &cfg.perturbation),
        best_value: best,
        max_denominator_bits: z.max_denominator_bits(),
        support_sizes: (z.x.support().len(), z.y.support().len()),
    }
}

fn update_best(best: &mut VanishingPair, z: &ProductPoint, a: &SymbolicMatrix) {
    for cand in extract_candidates(z, a) {
        if cand.value < best.value {
            *best = cand;
        }
    }
}

/// One full cycle: the `m` penalty resolvents, then the two dimension
/// resolvents.
pub fn sppa_cycle(a: &SymbolicMatrix, cfg: &SolverConfig, z: &ProductPoint, lambda: &BigRational) -> Result<ProductPoint, SppaError> {
    let step = BigRational::from_integer(cfg.penalty.into()) * lambda;
    let mut z = z.clone();
    for m in a.mats() {
        z = resolvent_penalty(a.field(), m, &z, &step)?;
    }
    let x = resolvent_dim(&z.x, Side::L, lambda, &cfg.perturbation)?;
    let y = resolvent_dim(&z.y, Side::M, lambda, &cfg.perturbation)?;
    Ok(ProductPoint::new(x, y)?)
}

/// Starts at `(𝟎_𝓛, 𝟎_𝓜)` and cycles until the best vanishing pair meets
/// the blow-up lower bound or `max_cycles` cycles have run.
pub fn sppa_run(a: &SymbolicMatrix, cfg: &SolverConfig) -> Result<SolverState, SppaError> {
    let n = a.n();
    let field = a.field();
    cfg.validate(n)?;
    let witness = blowup_lower_bound(a, cfg.certify_dmax, cfg.trials, cfg.seed);
    let lower_bound = witness.bound;

    let mut z = ProductPoint::new(
        ChainPoint::vertex(Subspace::zero(field, n)),
        ChainPoint::vertex(CoSubspace::bottom(field, n)),
    )?;
    let mut best = a
        .vanishing_pair(Subspace::zero(field, n), Subspace::full(field, n))
        .expect("same ambient")
        .expect("({0}, full) vanishes");
    update_best(&mut best, &z, a);
    let mut trace = vec![trace_entry(a, cfg, &z, 0, BigRational::zero(), best.value)];
    let mut certified_at = (best.value == lower_bound).then_some(0);

    let mut cycle = 0;
    while cycle < cfg.max_cycles && !(cfg.stop_on_certify && certified_at.is_some()) {
        let lambda = BigRational::one() / (&cfg.epsilon_sc * BigRational::from_integer((cycle + 1).into()));
        z = sppa_cycle(a, cfg, &z, &lambda)?;
        cycle += 1;
        update_best(&mut best, &z, a);
        trace.push(trace_entry(a, cfg, &z, cycle, lambda, best.value));
        if certified_at.is_none() && best.value == lower_bound {
            certified_at = Some(cycle);
        }
    }
    Ok(SolverState {
        z,
        cycle,
        best_feasible: best,
        lower_bound,
        witness,
        certified: certified_at.is_some(),
        certified_at,
        trace,
    })
}
