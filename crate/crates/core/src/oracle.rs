//! Ground truth for small instances: exhaustive vanishing-pair search over
//! all subspaces, and rank lower bounds from random blow-up substitutions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{gfpe_context, Field, GfpeField, Gfp};
use crate::bilinear::{orth_right, SymbolicMatrix, VanishingPair};
use crate::linalg::{self, Matrix, Subspace};

/// Largest catalog `enumerate_subspaces` will build.
pub const CATALOG_LIMIT: u128 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("GF({p})^{n} has {count} subspaces, over the limit of {CATALOG_LIMIT}; use the blow-up oracle instead")]
    TooLarge { p: u64, n: usize, count: u128 },
    #[error("blow-up size must be at least 1")]
    ZeroBlowup,
}

/// Number of `k`-dimensional subspaces of GF(q)ⁿ. Saturates at `u128::MAX`.
pub fn gaussian_binomial(n: usize, k: usize, q: u64) -> u128 {
    if k > n {
        return 0;
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        let a = q.checked_pow((n - i) as u32).and_then(|v| v.checked_sub(1));
        let b = q.checked_pow((i + 1) as u32).map(|v| v - 1);
        match (a.and_then(|a| num.checked_mul(a)), b.and_then(|b| den.checked_mul(b))) {
            (Some(x), Some(y)) => {
                let g = gcd(x, y);
                num = x / g;
                den = y / g;
            }
            _ => return u128::MAX,
        }
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Every subspace of GF(p)ⁿ, grouped by dimension.
#[derive(Debug, Clone)]
pub struct SubspaceCatalog {
    pub field: Gfp,
    pub n: usize,
    pub by_dim: Vec<Vec<Subspace>>,
}

impl SubspaceCatalog {
    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &Subspace> {
        self.by_dim.iter().flatten()
    }
}

/// Enumerates subspaces by reduced row-echelon pattern: a pivot set plus
/// arbitrary entries in the free positions.
pub fn enumerate_subspaces(field: Gfp, n: usize) -> Result<SubspaceCatalog, OracleError> {
    let p = field.p();
    let count = (0..=n).fold(0u128, |acc, k| acc.saturating_add(gaussian_binomial(n, k, p)));
    if count > CATALOG_LIMIT {
        return Err(OracleError::TooLarge { p, n, count });
    }
    let mut by_dim = vec![Vec::new(); n + 1];
    for (k, bucket) in by_dim.iter_mut().enumerate() {
        for pivots in combinations(n, k) {
            let free: Vec<(usize, usize)> = pivots
                .iter()
                .enumerate()
                .flat_map(|(r, &pc)| ((pc + 1)..n).filter(|c| !pivots.contains(c)).map(move |c| (r, c)))
                .collect();
            let total = (p as u128).pow(free.len() as u32);
            for idx in 0..total {
                let mut rows = vec![vec![0u64; n]; k];
                for (r, &pc) in pivots.iter().enumerate() {
                    rows[r][pc] = 1;
                }
                let mut rest = idx;
                for &(r, c) in &free {
                    rows[r][c] = (rest % p as u128) as u64;
                    rest /= p as u128;
                }
                bucket.push(Subspace::from_vectors(field, n, &rows).expect("rows have length n"));
            }
        }
    }
    Ok(SubspaceCatalog { field, n, by_dim })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn tie_key(pair: &VanishingPair) -> (usize, Vec<Vec<u64>>, Vec<Vec<u64>>) {
    (pair.value, pair.x.basis_vectors(), pair.y.basis_vectors())
}

/// All feasible pairs of maximum `dim X + dim Y`, by literal scan of the
/// catalog squared.
pub fn all_optimal_pairs(a: &SymbolicMatrix) -> Result<Vec<VanishingPair>, OracleError> {
    let cat = enumerate_subspaces(a.field(), a.n())?;
    let mut best: Vec<VanishingPair> = Vec::new();
    for x in cat.iter() {
        for y in cat.iter() {
            if best.first().is_some_and(|b| x.dim() + y.dim() < 2 * a.n() - b.value) {
                continue;
            }
            if let Some(pair) = a.vanishing_pair(x.clone(), y.clone()).expect("same ambient") {
                match best.first().map(|b| b.value) {
                    Some(v) if pair.value > v => {}
                    Some(v) if pair.value == v => best.push(pair),
                    _ => best = vec![pair],
                }
            }
        }
    }
    best.sort_by_key(tie_key);
    Ok(best)
}

/// An optimal vanishing pair (lexicographically smallest canonical bases
/// among optima) and the nc-rank `2n − max(dim X + dim Y)`.
pub fn brute_force_mvsp(a: &SymbolicMatrix) -> Result<(VanishingPair, usize), OracleError> {
    let best = all_optimal_pairs(a)?.into_iter().next().expect("({0}, full) is always feasible");
    let v = best.value;
    Ok((best, v))
}

/// Same optimum as `brute_force_mvsp`, scanning only `X`: the largest `Y`
/// with `A_i(X, Y) = 0` is `∩_i X^⊥_i`.
pub fn brute_force_mvsp_by_x(a: &SymbolicMatrix) -> Result<(VanishingPair, usize), OracleError> {
    let field = a.field();
    let cat = enumerate_subspaces(field, a.n())?;
    let best = cat
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|x| {
            let mut y = Subspace::full(field, a.n());
            for m in a.mats() {
                y = y.meet(&orth_right(&field, m, x).expect("same ambient")).expect("same ambient");
            }
            a.vanishing_pair((*x).clone(), y).expect("same ambient").expect("feasible by construction")
        })
        .min_by_key(tie_key)
        .expect("catalog is nonempty");
    let v = best.value;
    Ok((best, v))
}

/// The best random substitution found for one blow-up size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankWitness {
    pub d: usize,
    /// Extension degree `e` of GF(p^e).
    pub degree: usize,
    /// Low coefficients of the monic modulus of GF(p^e).
    pub modulus: Vec<u64>,
    /// Values of the `m·d²` variables, ordered by `(i, j, k)`.
    pub substitution: Vec<Vec<u64>>,
    pub rank: usize,
    /// `⌈rank / d⌉`.
    pub bound: usize,
    pub trials: usize,
    pub seed: u64,
}

/// Smallest `e` with `p^e > 2nd`.
pub fn extension_degree(p: u64, n: usize, d: usize) -> usize {
    let target = 2 * n as u128 * d as u128;
    let mut e = 1;
    let mut q = p as u128;
    while q <= target {
        q *= p as u128;
        e += 1;
    }
    e
}

fn substituted(a: &SymbolicMatrix, k: &GfpeField, d: usize, vals: &[Vec<u64>]) -> Matrix<Vec<u64>> {
    let n = a.n();
    let mut out = linalg::zeros(k, n * d, n * d);
    for (i, m) in a.mats().iter().enumerate() {
        for r in 0..n {
            for c in 0..n {
                let coeff = m[(r, c)];
                if coeff == 0 {
                    continue;
                }
                let coeff = k.embed(coeff);
                for j in 0..d {
                    for l in 0..d {
                        let v = &vals[i * d * d + j * d + l];
                        let cell = &mut out[(r * d + j, c * d + l)];
                        *cell = k.add(cell, &k.mul(&coeff, v));
                    }
                }
            }
        }
    }
    out
}

/// Max rank of `A^{d}` over `trials` uniform substitutions from GF(p^e).
pub fn blowup_rank_bound(a: &SymbolicMatrix, d: usize, trials: usize, seed: u64) -> Result<RankWitness, OracleError> {
    if d == 0 {
        return Err(OracleError::ZeroBlowup);
    }
    let e = extension_degree(a.field().p(), a.n(), d);
    let k = gfpe_context(a.field().prime(), e, 0).expect("small extension");
    let vars = a.m() * d * d;
    let best = (0..trials.max(1))
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((d as u64) << 32) | t as u64);
            let vals: Vec<Vec<u64>> = (0..vars).map(|_| k.random(&mut rng)).collect();
            let rank = linalg::rank(&k, &substituted(a, &k, d, &vals));
            (rank, std::cmp::Reverse(t), vals)
        })
        .max_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)))
        .expect("at least one trial");
    Ok(RankWitness {
        d,
        degree: e,
        modulus: k.modulus()[..e].to_vec(),
        substitution: best.2,
        rank: best.0,
        bound: best.0.div_ceil(d),
        trials: trials.max(1),
        seed,
    })
}

/// Best bound over `d = 1..=dmax`, stopping early once the bound reaches `n`.
pub fn blowup_lower_bound(a: &SymbolicMatrix, dmax: usize, trials: usize, seed: u64) -> RankWitness {
    let mut best: Option<RankWitness> = None;
    for d in 1..=dmax.max(1) {
        let w = blowup_rank_bound(a, d, trials, seed).expect("d >= 1");
        let done = w.bound == a.n();
        if best.as_ref().is_none_or(|b| w.bound > b.bound) {
            best = Some(w);
        }
        if done {
            break;
        }
    }
    best.expect("dmax >= 1")
}
