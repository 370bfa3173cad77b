//! Frames of the subspace lattice: common frames of two chains, the
//! rank-preserving retraction onto a frame, and orthogonal frames adapted to
//! a bilinear form.
//!
//! Every algorithm works on the subspace representation of a lattice
//! element (`LatticeElement::repr`), so the same code serves 𝓛 and 𝓜. For
//! 𝓜 the atoms are covectors spanning one-dimensional annihilators.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet};
use std::hash::{Hash, Hasher};

use crate::arith::Gfp;
use crate::bilinear::{left_kernel, orth_left};
use crate::linalg::{self, CoSubspace, LatticeElement, LinalgError, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("input is not a chain")]
    NotAChain,
    #[error("frame atoms are linearly dependent")]
    DependentAtoms,
    #[error("element is not a join of frame atoms")]
    NotInFrame,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The Boolean sublattice generated by `n` independent atoms, together with
/// the atom subsets of registered elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame<E> {
    field: Gfp,
    n: usize,
    atoms: Vec<Vec<u64>>,
    membership: BTreeMap<E, BTreeSet<usize>>,
}

impl<E: LatticeElement> Frame<E> {
    pub fn from_atoms(field: Gfp, n: usize, atoms: Vec<Vec<u64>>) -> Result<Self, FrameError> {
        let m = Matrix::from_rows(&atoms, n)?;
        if atoms.len() != n || linalg::rank(&field, &m) != n {
            return Err(FrameError::DependentAtoms);
        }
        Ok(Frame {
            field,
            n,
            atoms,
            membership: BTreeMap::new(),
        })
    }

    /// Atoms are the unit vectors.
    pub fn standard(field: Gfp, n: usize) -> Self {
        let atoms = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
        Self::from_atoms(field, n, atoms).expect("unit vectors are independent")
    }

    pub fn field(&self) -> Gfp {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn atoms(&self) -> &[Vec<u64>] {
        &self.atoms
    }

    /// Join of the atoms with the given indices.
    pub fn join<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> E {
        let vs: Vec<Vec<u64>> = indices.into_iter().map(|&i| self.atoms[i].clone()).collect();
        E::from_repr(Subspace::from_vectors(self.field, self.n, &vs).expect("atoms have length n"))
    }

    /// The atoms below `e`, provided they join to `e`.
    pub fn locate(&self, e: &E) -> Option<BTreeSet<usize>> {
        if let Some(s) = self.membership.get(e) {
            return Some(s.clone());
        }
        let r = e.repr();
        if r.ambient() != self.n {
            return None;
        }
        let s: BTreeSet<usize> = (0..self.n).filter(|&i| r.contains_vector(&self.atoms[i])).collect();
        (s.len() == r.dim()).then_some(s)
    }

    pub fn register(&mut self, e: &E) -> Result<BTreeSet<usize>, FrameError> {
        let s = self.locate(e).ok_or(FrameError::NotInFrame)?;
        self.membership.insert(e.clone(), s.clone());
        Ok(s)
    }

    pub fn membership(&self, e: &E) -> Option<&BTreeSet<usize>> {
        self.membership.get(e)
    }

    pub fn registered(&self) -> impl Iterator<Item = (&E, &BTreeSet<usize>)> {
        self.membership.iter()
    }

    /// Atoms reordered so that new atom `i` is old atom `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let mut inverse = vec![0; self.n];
        for (new, &old) in order.iter().enumerate() {
            inverse[old] = new;
        }
        Frame {
            field: self.field,
            n: self.n,
            atoms: order.iter().map(|&i| self.atoms[i].clone()).collect(),
            membership: self
                .membership
                .iter()
                .map(|(e, s)| (e.clone(), s.iter().map(|&i| inverse[i]).collect()))
                .collect(),
        }
    }

    /// A fingerprint of the side and the ordered atoms.
    pub fn key(&self) -> u64 {
        let mut h = DefaultHasher::new();
        std::any::type_name::<E>().hash(&mut h);
        self.field.p().hash(&mut h);
        self.atoms.hash(&mut h);
        h.finish()
    }

    /// Checks that the atoms are independent and every registered element
    /// is the join of its recorded atoms.
    pub fn check(&self) -> bool {
        let m = Matrix::from_rows(&self.atoms, self.n).expect("atoms have length n");
        linalg::rank(&self.field, &m) == self.n
            && self.membership.iter().all(|(e, s)| &self.join(s) == e)
    }
}

/// Sorts `chain` by rank, drops repeats and checks that it is totally
/// ordered.
pub fn normalize_chain<E: LatticeElement>(chain: &[E]) -> Result<Vec<E>, FrameError> {
    let mut c: Vec<E> = chain.to_vec();
    c.sort_by_key(|e| e.rank());
    c.dedup();
    for w in c.windows(2) {
        if w[0].rank() == w[1].rank() || !w[0].precedes(&w[1]) {
            return Err(FrameError::NotAChain);
        }
    }
    Ok(c)
}

/// Extends a chain to a maximal chain from 𝟎 to 𝟏. Each gap is filled by
/// adjoining the reduced row-echelon basis rows of its upper end in order.
pub fn maximal_chain<E: LatticeElement>(chain: &[E], field: Gfp, n: usize) -> Result<Vec<E>, FrameError> {
    let c = normalize_chain(chain)?;
    for e in &c {
        if e.repr().ambient() != n || e.repr().field() != field {
            return Err(FrameError::Linalg(LinalgError::DimensionMismatch {
                expected: n,
                got: e.repr().ambient(),
            }));
        }
    }
    let mut cur = Subspace::zero(field, n);
    let mut out = vec![E::from_repr(cur.clone())];
    let full = Subspace::full(field, n);
    for target in c.iter().map(|e| e.repr()).chain(std::iter::once(&full)) {
        for v in target.basis_vectors() {
            if cur.dim() == target.dim() {
                break;
            }
            if !cur.contains_vector(&v) {
                cur = cur.with_vector(&v);
                out.push(E::from_repr(cur.clone()));
            }
        }
    }
    Ok(out)
}

/// Atoms of a frame containing two maximal chains of subspaces that share
/// their top element.
fn frame_atoms(c: &[Subspace], d: &[Subspace]) -> Vec<Vec<u64>> {
    let t = c.len() - 1;
    if t == 0 {
        return Vec::new();
    }
    let below = &c[t - 1];
    let mut d_below: Vec<Subspace> = d.iter().map(|q| q.meet(below).expect("same ambient")).collect();
    d_below.dedup();
    let mut atoms = frame_atoms(&c[..t], &d_below);
    let j = d.iter().position(|q| !below.contains(q)).expect("top of d is not below c[t-1]");
    let atom = d[j]
        .basis_vectors()
        .into_iter()
        .find(|v| !below.contains_vector(v))
        .expect("d[j] leaves c[t-1]");
    atoms.push(atom);
    atoms
}

/// A frame containing both chains, with every element of both maximal
/// extensions registered.
pub fn common_frame<E: LatticeElement>(c: &[E], d: &[E], field: Gfp, n: usize) -> Result<Frame<E>, FrameError> {
    let cm = maximal_chain(c, field, n)?;
    let dm = maximal_chain(d, field, n)?;
    let cr: Vec<Subspace> = cm.iter().map(|e| e.repr().clone()).collect();
    let dr: Vec<Subspace> = dm.iter().map(|e| e.repr().clone()).collect();
    let mut frame = Frame::from_atoms(field, n, frame_atoms(&cr, &dr))?;
    for e in cm.iter().chain(&dm) {
        frame.register(e)?;
    }
    Ok(frame)
}

/// `φ(p) = ∨{a_i : p ∧ (a₁∨⋯∨a_i) strictly contains p ∧ (a₁∨⋯∨a_{i−1})}`.
pub fn retraction<E: LatticeElement>(p: &E, frame: &Frame<E>) -> E {
    let field = frame.field();
    let n = frame.n();
    let r = p.repr();
    let mut prefix = Subspace::zero(field, n);
    let mut prev = 0;
    let mut chosen = Vec::new();
    for (i, a) in frame.atoms().iter().enumerate() {
        prefix = prefix.with_vector(a);
        let d = r.meet(&prefix).expect("same ambient").dim();
        if d > prev {
            chosen.push(i);
        }
        prev = d;
    }
    frame.join(&chosen)
}

/// Frames `⟨e₁…e_n⟩` of 𝓛 and `⟨f₁…f_n⟩` of 𝓜 adapted to one bilinear form
/// of rank `k`: `e_{k+1}∨⋯∨e_n` is the left kernel, `f₁∨⋯∨f_k` the right
/// kernel and `f_i = e_i^⊥` for `i ≤ k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthogonalFrame {
    pub e: Frame<Subspace>,
    pub f: Frame<CoSubspace>,
    pub k: usize,
}

/// Builds an orthogonal frame for `a` containing the maximal extensions of
/// the chain `x` in 𝓛 and the chain `y` in 𝓜. Registers `X` and `Y^⊥` in
/// the e-frame and `X^⊥` and `Y` in the f-frame.
pub fn orthogonal_frame(
    field: Gfp,
    a: &Matrix<u64>,
    x: &[Subspace],
    y: &[CoSubspace],
) -> Result<OrthogonalFrame, FrameError> {
    let n = a.rows();
    let k = linalg::rank(&field, a);
    let xm = maximal_chain(x, field, n)?;
    let ym = maximal_chain(y, field, n)?;
    let y_perp: Vec<Subspace> = ym
        .iter()
        .map(|q| orth_left(&field, a, &q.primal()))
        .collect::<Result<_, _>>()?;

    let e = common_frame(&xm, &y_perp, field, n)?;
    let u0 = left_kernel(&field, a);
    let in_u0 = e.locate(&u0).ok_or(FrameError::NotInFrame)?;
    let order: Vec<usize> = (0..n)
        .filter(|i| !in_u0.contains(i))
        .chain(in_u0.iter().copied())
        .collect();
    let e = e.permuted(&order);

    let mut f_atoms: Vec<Option<Vec<u64>>> = vec![None; n];
    let mut extra = Vec::new();
    for (slot, atom) in f_atoms.iter_mut().zip(e.atoms()).take(k) {
        *slot = Some(linalg::vec_mul(&field, atom, a));
    }
    let mut assigned = Vec::new();
    let mut cur = Subspace::zero(field, n);
    for w in ym.windows(2) {
        let (lo, hi) = (w[0].annihilator(), w[1].annihilator());
        let t_lo = e.locate(&orth_left(&field, a, &w[0].primal())?).ok_or(FrameError::NotInFrame)?;
        let t_hi = e.locate(&orth_left(&field, a, &w[1].primal())?).ok_or(FrameError::NotInFrame)?;
        let fresh: Vec<usize> = t_hi.difference(&t_lo).copied().filter(|&j| j < k).collect();
        let atom = match fresh.as_slice() {
            [j] => f_atoms[*j].clone().expect("assigned above"),
            [] => {
                let v = hi
                    .basis_vectors()
                    .into_iter()
                    .find(|v| !lo.contains_vector(v))
                    .expect("strict step");
                extra.push(v.clone());
                v
            }
            _ => return Err(FrameError::NotInFrame),
        };
        assigned.push(atom.clone());
        cur = cur.with_vector(&atom);
        if &cur != hi {
            return Err(FrameError::NotInFrame);
        }
    }
    for (slot, v) in f_atoms.iter_mut().skip(k).zip(extra) {
        *slot = Some(v);
    }
    let f_atoms: Vec<Vec<u64>> = f_atoms.into_iter().collect::<Option<_>>().ok_or(FrameError::DependentAtoms)?;
    let mut f = Frame::from_atoms(field, n, f_atoms)?;

    let mut e = e;
    for xi in &xm {
        e.register(xi)?;
        let xp = CoSubspace::from_annihilator(xi.image(a));
        f.register(&xp)?;
    }
    for (yi, ypi) in ym.iter().zip(&y_perp) {
        e.register(ypi)?;
        f.register(yi)?;
    }
    Ok(OrthogonalFrame { e, f, k })
}

impl OrthogonalFrame {
    /// Verifies the five defining conditions by direct linear algebra.
    pub fn check(&self, a: &Matrix<u64>) -> bool {
        let field = self.e.field();
        let n = self.e.n();
        let k = self.k;
        if !self.e.check() || !self.f.check() || k != linalg::rank(&field, a) {
            return false;
        }
        let tail: Vec<usize> = (k..n).collect();
        let head: Vec<usize> = (0..k).collect();
        let u0 = left_kernel(&field, a);
        let v0_ann = Subspace::full(field, n).image(a);
        if self.e.join(&tail) != u0 || self.f.join(&head).annihilator() != &v0_ann {
            return false;
        }
        (0..k).all(|i| {
            let ei = Subspace::from_vectors(field, n, &[self.e.atoms()[i].clone()]).unwrap();
            let fi = Subspace::from_vectors(field, n, &[self.f.atoms()[i].clone()]).unwrap();
            ei.image(a) == fi
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bilinear::restricted_rank;
    use proptest::prelude::*;

    fn gf(p: u64) -> Gfp {
        Gfp::new(p).unwrap()
    }

    fn flag(field: Gfp, n: usize, order: &[usize]) -> Vec<Subspace> {
        (0..=n).map(|i| Subspace::coordinate(field, n, &order[..i])).collect()
    }

    #[test]
    fn common_frame_of_equal_standard_flags() {
        let f = gf(2);
        let c = flag(f, 3, &[0, 1, 2]);
        let fr = common_frame(&c, &c, f, 3).unwrap();
        let mut atoms = fr.atoms().to_vec();
        atoms.sort();
        let mut std = Frame::<Subspace>::standard(f, 3).atoms().to_vec();
        std.sort();
        assert_eq!(atoms, std);
        assert!(fr.check());
    }

    #[test]
    fn common_frame_of_transverse_flags() {
        let f = gf(2);
        let c = flag(f, 2, &[0, 1]);
        let d = flag(f, 2, &[1, 0]);
        let fr = common_frame(&c, &d, f, 2).unwrap();
        let mut atoms = fr.atoms().to_vec();
        atoms.sort();
        assert_eq!(atoms, vec![vec![0, 1], vec![1, 0]]);
        for e in c.iter().chain(&d) {
            assert_eq!(&fr.join(fr.membership(e).unwrap()), e);
        }
    }

    #[test]
    fn non_chain_rejected() {
        let f = gf(2);
        let c = vec![Subspace::coordinate(f, 2, &[0]), Subspace::coordinate(f, 2, &[1])];
        assert_eq!(normalize_chain(&c), Err(FrameError::NotAChain));
        assert!(common_frame(&c, &c, f, 2).is_err());
    }

    #[test]
    fn maximal_chain_fills_gaps() {
        let f = gf(3);
        let c = vec![Subspace::from_vectors(f, 3, &[vec![1, 1, 1]]).unwrap()];
        let m = maximal_chain(&c, f, 3).unwrap();
        assert_eq!(m.len(), 4);
        assert!(m.contains(&c[0]));
        for (i, e) in m.iter().enumerate() {
            assert_eq!(e.dim(), i);
        }
    }

    #[test]
    fn retraction_fixes_frame_elements_and_ends() {
        let f = gf(2);
        let fr = Frame::<Subspace>::standard(f, 3);
        let p = Subspace::coordinate(f, 3, &[0, 2]);
        assert_eq!(retraction(&p, &fr), p);
        assert_eq!(retraction(&Subspace::zero(f, 3), &fr), Subspace::zero(f, 3));
        assert_eq!(retraction(&Subspace::full(f, 3), &fr), Subspace::full(f, 3));
        let q = Subspace::from_vectors(f, 3, &[vec![1, 1, 0]]).unwrap();
        assert_eq!(retraction(&q, &fr).dim(), 1);
    }

    #[test]
    fn orthogonal_frame_identity() {
        let f = gf(2);
        let a = linalg::identity(&f, 3);
        let x = flag(f, 3, &[0, 1, 2]);
        let y: Vec<CoSubspace> = x.iter().map(|s| CoSubspace::from_primal(&s.annihilator())).collect();
        let of = orthogonal_frame(f, &a, &x, &y).unwrap();
        assert_eq!(of.k, 3);
        assert!(of.check(&a));
    }

    #[test]
    fn orthogonal_frame_zero_form() {
        let f = gf(3);
        let a = linalg::zeros(&f, 2, 2);
        let x = flag(f, 2, &[1, 0]);
        let y = vec![CoSubspace::from_primal(&Subspace::full(f, 2))];
        let of = orthogonal_frame(f, &a, &x, &y).unwrap();
        assert_eq!(of.k, 0);
        assert!(of.check(&a));
    }

    #[test]
    fn orthogonal_frame_rank_one_diagonal() {
        let f = gf(2);
        let a = Matrix::from_rows(&[vec![1, 0], vec![0, 0]], 2).unwrap();
        let x = vec![Subspace::from_vectors(f, 2, &[vec![1, 1]]).unwrap()];
        let y = vec![CoSubspace::from_primal(&Subspace::coordinate(f, 2, &[0]))];
        let of = orthogonal_frame(f, &a, &x, &y).unwrap();
        assert_eq!(of.k, 1);
        assert!(of.check(&a));
        let u0 = Subspace::coordinate(f, 2, &[1]);
        assert_eq!(of.e.join(&[1]), u0);
    }

    pub(crate) fn arb_flag(p: u64, n: usize) -> impl Strategy<Value = Vec<Subspace>> {
        proptest::collection::vec(0..p, n * n).prop_map(move |d| {
            let rows: Vec<Vec<u64>> = (0..n).map(|i| d[i * n..(i + 1) * n].to_vec()).collect();
            let f = gf(p);
            let mut out = vec![Subspace::zero(f, n)];
            let mut cur = Subspace::zero(f, n);
            for r in rows {
                cur = cur.with_vector(&r);
                out.push(cur.clone());
            }
            out.dedup();
            out
        })
    }

    fn arb_mat(p: u64, n: usize) -> impl Strategy<Value = Matrix<u64>> {
        proptest::collection::vec(0..p, n * n).prop_map(move |d| Matrix::from_fn(n, n, |i, j| d[i * n + j]))
    }

    proptest! {
        #[test]
        fn common_frame_registers_both_chains(c in arb_flag(3, 3), d in arb_flag(3, 3)) {
            let f = gf(3);
            let fr = common_frame(&c, &d, f, 3).unwrap();
            prop_assert!(fr.check());
            for e in c.iter().chain(&d) {
                prop_assert_eq!(&fr.join(&fr.locate(e).unwrap()), e);
            }
        }

        #[test]
        fn retraction_preserves_rank_and_order(c in arb_flag(2, 3), d in arb_flag(2, 3), idx in 0usize..4, extra in proptest::collection::vec(0u64..2, 3)) {
            let f = gf(2);
            let fr = common_frame(&c, &d, f, 3).unwrap();
            let p = d[idx.min(d.len() - 1)].clone();
            let q = p.with_vector(&extra);
            let (rp, rq) = (retraction(&p, &fr), retraction(&q, &fr));
            prop_assert_eq!(rp.dim(), p.dim());
            prop_assert_eq!(rq.dim(), q.dim());
            prop_assert!(rq.contains(&rp));
        }

        #[test]
        fn orthogonal_frame_conditions_and_penalty_formula(a in arb_mat(3, 3), x in arb_flag(3, 3), yp in arb_flag(3, 3)) {
            let f = gf(3);
            let y: Vec<CoSubspace> = yp.iter().map(CoSubspace::from_primal).collect();
            let of = orthogonal_frame(f, &a, &x, &y).unwrap();
            prop_assert!(of.check(&a));
            for xi in &x {
                for yi in &y {
                    let sx = of.e.membership(xi).unwrap();
                    let sy = of.f.membership(yi).unwrap();
                    let formula = sx.difference(sy).filter(|&&i| i < of.k).count();
                    prop_assert_eq!(restricted_rank(&f, &a, xi, &yi.primal()).unwrap(), formula);
                }
            }
        }
    }
}
