use super::{ArithError, Field, Gfp, Prime};
use rand::Rng;

/// GF(p^e) as GF(p)[x] modulo a monic irreducible polynomial of degree e.
///
/// Elements are coefficient vectors of length `e`, lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GfpeField {
    base: Gfp,
    /// Low coefficients of the monic modulus: `x^e + Σ modulus[i] x^i`.
    modulus: Vec<u64>,
    order: u128,
}

/// Finds the first irreducible monic polynomial of degree `e`, scanning
/// candidates in lexicographic coefficient order starting from `seed`.
pub fn gfpe_context(p: Prime, e: usize, seed: u64) -> Result<GfpeField, ArithError> {
    if e == 0 {
        return Err(ArithError::ZeroDegree);
    }
    let base = Gfp::from_prime(p);
    let order = (p.get() as u128)
        .checked_pow(e as u32)
        .ok_or(ArithError::FieldTooLarge { p: p.get(), e })?;
    let start = seed as u128 % order;
    for offset in 0..order {
        let idx = (start + offset) % order;
        let low = digits(idx, p.get(), e);
        let mut poly = low.clone();
        poly.push(1);
        if is_irreducible(&base, &poly) {
            return Ok(GfpeField {
                base,
                modulus: low,
                order,
            });
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Base-p digits of `idx`, most significant first, so that increasing `idx`
/// walks the coefficient vectors (c₀, …, c_{e-1}) lexicographically.
fn digits(mut idx: u128, p: u64, e: usize) -> Vec<u64> {
    let mut out = vec![0; e];
    for slot in out.iter_mut().rev() {
        *slot = (idx % p as u128) as u64;
        idx /= p as u128;
    }
    out
}

fn trim(poly: &mut Vec<u64>) {
    while poly.len() > 1 && *poly.last().unwrap() == 0 {
        poly.pop();
    }
}

fn poly_rem(f: &Gfp, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = f.inv(&m[dm]).expect("nonzero leading coefficient");
    while r.len() > dm && !(r.len() == 1 && r[0] == 0) {
        let dr = r.len() - 1;
        let c = f.mul(&r[dr], &lead_inv);
        if c != 0 {
            for (i, mi) in m.iter().enumerate() {
                let pos = dr - dm + i;
                r[pos] = f.sub(&r[pos], &f.mul(&c, mi));
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// No monic factor of degree 1..=deg/2.
fn is_irreducible(f: &Gfp, poly: &[u64]) -> bool {
    let deg = poly.len() - 1;
    let p = f.p();
    for d in 1..=deg / 2 {
        let count = (p as u128).pow(d as u32);
        for idx in 0..count {
            let mut g = digits(idx, p, d);
            g.push(1);
            let r = poly_rem(f, poly, &g);
            if r.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl GfpeField {
    pub fn base(&self) -> Gfp {
        self.base
    }

    pub fn degree(&self) -> usize {
        self.modulus.len()
    }

    /// Number of elements, p^e.
    pub fn order(&self) -> u128 {
        self.order
    }

    /// The monic modulus, lowest coefficient first.
    pub fn modulus(&self) -> Vec<u64> {
        let mut m = self.modulus.clone();
        m.push(1);
        m
    }

    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0; self.degree()];
        v[0] = a % self.base.p();
        v
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.degree())
            .map(|_| rng.gen_range(0..self.base.p()))
            .collect()
    }

    fn pow(&self, a: &[u64], mut exp: u128) -> Vec<u64> {
        let mut acc = self.one();
        let mut base = a.to_vec();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }
}

impl Field for GfpeField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let e = self.degree();
        let f = &self.base;
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, x) in a.iter().enumerate() {
            if *x == 0 {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = f.add(&prod[i + j], &f.mul(x, y));
            }
        }
        // x^e = -Σ modulus[i] x^i
        for top in (e..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for (i, mi) in self.modulus.iter().enumerate() {
                let pos = top - e + i;
                prod[pos] = f.sub(&prod[pos], &f.mul(&c, mi));
            }
        }
        prod.truncate(e);
        prod
    }
    fn inv(&self, a: &Vec<u64>) -> Option<Vec<u64>> {
        if a.iter().all(|&c| c == 0) {
            None
        } else {
            Some(self.pow(a, self.order - 2))
        }
    }
    fn is_zero(&self, a: &Vec<u64>) -> bool {
        a.iter().all(|&c| c == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prime(p: u64) -> Prime {
        Prime::new(p).unwrap()
    }

    /// Exhaustive check: no root and, for degree ≤ 3, that is irreducibility.
    fn has_root(p: u64, poly: &[u64]) -> bool {
        let f = Gfp::new(p).unwrap();
        (0..p).any(|x| {
            let mut acc = 0;
            for c in poly.iter().rev() {
                acc = f.add(&f.mul(&acc, &x), c);
            }
            acc == 0
        })
    }

    #[test]
    fn degree_one_is_the_prime_field() {
        let k = gfpe_context(prime(2), 1, 0).unwrap();
        assert_eq!(k.order(), 2);
        assert_eq!(k.mul(&vec![1], &vec![1]), vec![1]);
        assert_eq!(k.add(&vec![1], &vec![1]), vec![0]);
    }

    #[test]
    fn cubic_over_gf2_is_one_of_the_two_irreducibles() {
        for seed in 0..8 {
            let k = gfpe_context(prime(2), 3, seed).unwrap();
            let m = k.modulus();
            assert!(m == vec![1, 1, 0, 1] || m == vec![1, 0, 1, 1], "{m:?}");
            assert!(!has_root(2, &m));
        }
    }

    #[test]
    fn quadratic_over_gf3_has_no_root() {
        for seed in 0..9 {
            let k = gfpe_context(prime(3), 2, seed).unwrap();
            let m = k.modulus();
            assert_eq!(m.len(), 3);
            assert!(!has_root(3, &m));
        }
    }

    #[test]
    fn zero_degree_rejected() {
        assert_eq!(gfpe_context(prime(2), 0, 0), Err(ArithError::ZeroDegree));
    }

    #[test]
    fn field_axioms_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, e) in [(2u64, 4usize), (3, 3), (5, 2), (2, 5)] {
            let k = gfpe_context(prime(p), e, 1).unwrap();
            for _ in 0..200 {
                let (a, b, c) = (k.random(&mut rng), k.random(&mut rng), k.random(&mut rng));
                assert_eq!(k.mul(&a, &k.mul(&b, &c)), k.mul(&k.mul(&a, &b), &c));
                assert_eq!(k.mul(&a, &b), k.mul(&b, &a));
                assert_eq!(k.mul(&a, &k.add(&b, &c)), k.add(&k.mul(&a, &b), &k.mul(&a, &c)));
                if let Some(ai) = k.inv(&a) {
                    assert_eq!(k.mul(&a, &ai), k.one());
                } else {
                    assert!(k.is_zero(&a));
                }
            }
        }
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        let k = gfpe_context(prime(2), 4, 3).unwrap();
        for idx in 1..16u128 {
            let a = digits(idx, 2, 4);
            let ai = k.inv(&a).unwrap();
            assert_eq!(k.mul(&a, &ai), k.one());
        }
    }
}
