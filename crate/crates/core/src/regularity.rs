//! Centralizers and the regular, strongly regular and n-strongly regular loci.
//!
//! All notions are invariant under scaling, so tests normalize x to unit Frobenius norm
//! before any rank cut; the absolute floor of the rank tolerance is then meaningful.

use crate::algebra::{Algebra, AlgebraContext};
use crate::error::{GzError, Result};
use crate::invariants::{kw_jacobian, partial_jacobian};
use crate::linalg::{frobenius, null_space, numerical_rank, to_complex, CMat, RankDecision, RankTol, C64};

/// Tolerance below which a rank decision is considered too close to call.
pub const MARGIN_BAND: f64 = 10.0;

/// Orthonormal columns in the basis coordinates of some algebra.
#[derive(Clone, Debug)]
pub struct Subspace {
    basis: CMat,
    /// (family tag, n) of the ambient algebra.
    ambient: (crate::algebra::Family, usize),
    /// Margin of the rank cut that produced it.
    pub margin: f64,
}

impl Subspace {
    pub fn new(alg: &Algebra, basis: CMat, margin: f64) -> Subspace {
        Subspace { basis, ambient: (alg.family(), alg.n()), margin }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn same_ambient(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.ambient_dim() == other.ambient_dim()
    }

    /// Spectral-norm distance between the orthogonal projectors.
    pub fn distance(&self, other: &Subspace) -> Result<f64> {
        if !self.same_ambient(other) {
            return Err(GzError::AmbientMismatch);
        }
        Ok(crate::linalg::projector_distance(&self.basis, &other.basis))
    }

    /// Elements of the ambient algebra spanning the subspace.
    pub fn matrices(&self, alg: &Algebra) -> Vec<CMat> {
        (0..self.dim()).map(|k| alg.from_coords(&self.basis.column(k).into_owned())).collect()
    }
}

/// A boolean together with the closest rank decision that produced it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    /// Smallest multiplicative distance of a singular value from its cutoff.
    pub margin: f64,
}

impl Verdict {
    pub fn in_band(&self) -> bool {
        self.margin < MARGIN_BAND
    }
}

fn normalized(x: &CMat) -> CMat {
    let f = frobenius(x);
    if f > 0.0 {
        x * C64::new(1.0 / f, 0.0)
    } else {
        x.clone()
    }
}

/// z_g(y): kernel of ad(y) on the algebra containing y.
pub fn centralizer(alg: &Algebra, y: &CMat, tol: RankTol) -> Subspace {
    let (k, dec) = null_space(&alg.ad_matrix(y), tol);
    Subspace::new(alg, k, dec.margin)
}

/// z_{g_i}(x_i) expressed in top-level coordinates, x normalized first.
pub fn chain_centralizer(ctx: &AlgebraContext, x: &CMat, i: usize, tol: RankTol) -> Result<Subspace> {
    ctx.check_member(x)?;
    let xn = normalized(x);
    chain_centralizer_raw(ctx, &xn, i, tol)
}

fn chain_centralizer_raw(ctx: &AlgebraContext, x: &CMat, i: usize, tol: RankTol) -> Result<Subspace> {
    let lvl = ctx.level(i)?;
    let xi = ctx.project(x, i)?;
    let local = centralizer(lvl.algebra(), &xi, tol);
    let lifted = to_complex(lvl.lift()) * local.basis();
    Ok(Subspace::new(ctx.top(), lifted, local.margin))
}

/// A ∩ B through the kernel of the stacked complement projectors.
pub fn intersect(a: &Subspace, b: &Subspace, tol: RankTol) -> Result<Subspace> {
    if !a.same_ambient(b) {
        return Err(GzError::AmbientMismatch);
    }
    let d = a.ambient_dim();
    let id = CMat::identity(d, d);
    let pa = &id - a.basis() * a.basis().adjoint();
    let pb = &id - b.basis() * b.basis().adjoint();
    let mut stacked = CMat::zeros(2 * d, d);
    stacked.view_mut((0, 0), (d, d)).copy_from(&pa);
    stacked.view_mut((d, 0), (d, d)).copy_from(&pb);
    // singular values lie in [0, √2]; cut relative to 1 so that A = B = g still reports g
    let cut = RankTol { rel: tol.rel, abs: tol.rel.max(tol.abs) };
    let (k, dec) = null_space(&stacked, cut);
    Ok(Subspace { basis: k, ambient: a.ambient, margin: dec.margin.min(a.margin).min(b.margin) })
}

pub fn is_regular(alg: &Algebra, y: &CMat, tol: RankTol) -> bool {
    regular(alg, y, tol).holds
}

pub fn regular(alg: &Algebra, y: &CMat, tol: RankTol) -> Verdict {
    let z = centralizer(alg, &normalized(y), tol);
    Verdict { holds: z.dim() == alg.rank(), margin: z.margin }
}

/// Rank of the given rows after scaling each nonzero row to unit length.
fn row_normalized_rank(mut m: CMat, tol: RankTol) -> RankDecision {
    for mut row in m.row_iter_mut() {
        let nrm = row.norm();
        if nrm > tol.abs {
            row /= C64::new(nrm, 0.0);
        }
    }
    numerical_rank(&m, tol)
}

/// Strong regularity by the rank of the full Jacobian of Φ.
pub fn sreg_rank(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<Verdict> {
    ctx.check_member(x)?;
    let j = kw_jacobian(ctx, &normalized(x))?;
    let dec = row_normalized_rank(j, tol);
    Ok(Verdict { holds: dec.rank == ctx.gz_count(), margin: dec.margin })
}

pub fn is_sreg_rank(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<bool> {
    Ok(sreg_rank(ctx, x, tol)?.holds)
}

/// Strong regularity by trivial consecutive centralizer intersections.
pub fn sreg_chain(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<Verdict> {
    ctx.check_member(x)?;
    let xn = normalized(x);
    let first = ctx.first_index();
    let n = ctx.n();
    if first == n {
        return Ok(Verdict { holds: true, margin: f64::INFINITY });
    }
    let mut holds = true;
    let mut margin = f64::INFINITY;
    let mut below = chain_centralizer_raw(ctx, &xn, first, tol)?;
    for i in first..n {
        let above = chain_centralizer_raw(ctx, &xn, i + 1, tol)?;
        let cap = intersect(&below, &above, tol)?;
        margin = margin.min(cap.margin);
        if cap.dim() > 0 {
            holds = false;
        }
        below = above;
    }
    Ok(Verdict { holds, margin })
}

pub fn is_sreg_chain(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<bool> {
    Ok(sreg_chain(ctx, x, tol)?.holds)
}

/// z_k(x_k) ∩ z_g(x) in top-level coordinates.
pub fn top_intersection(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<Subspace> {
    ctx.check_member(x)?;
    let n = ctx.n();
    if n < 3 {
        return Err(GzError::SizeTooSmall(n, 3));
    }
    let xn = normalized(x);
    let zk = chain_centralizer_raw(ctx, &xn, n - 1, tol)?;
    let zg = chain_centralizer_raw(ctx, &xn, n, tol)?;
    intersect(&zk, &zg, tol)
}

pub fn nsreg(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<Verdict> {
    let cap = top_intersection(ctx, x, tol)?;
    Ok(Verdict { holds: cap.dim() == 0, margin: cap.margin })
}

pub fn is_nsreg(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<bool> {
    Ok(nsreg(ctx, x, tol)?.holds)
}

/// Independence of the gradients of the top two blocks of GZ functions.
pub fn omega(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<Verdict> {
    ctx.check_member(x)?;
    let n = ctx.n();
    if n < 3 {
        return Err(GzError::SizeTooSmall(n, 3));
    }
    let j = partial_jacobian(ctx, &normalized(x))?;
    let want = j.nrows();
    let dec = row_normalized_rank(j, tol);
    Ok(Verdict { holds: dec.rank == want, margin: dec.margin })
}

pub fn omega_test(ctx: &AlgebraContext, x: &CMat, tol: RankTol) -> Result<bool> {
    Ok(omega(ctx, x, tol)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Family, Root};
    use crate::invariants::gz_gradient;
    use crate::linalg::{commutator, matrix_exp, max_abs, range_basis, CVec};
    use crate::sampling::{random_element, rng_from_seed};

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn so(n: usize) -> AlgebraContext {
        AlgebraContext::new(Family::Orthogonal, n).unwrap()
    }

    fn tol() -> RankTol {
        RankTol::default()
    }

    fn regular_nilpotent_b(g: &Algebra) -> CMat {
        g.simple_roots().unwrap().iter().map(|r| g.root_vector(*r).unwrap()).sum()
    }

    #[test]
    fn centralizer_examples() {
        let g5 = Algebra::new(Family::Orthogonal, 5).unwrap();
        let h = g5.cartan_element(&[c(1.3), c(-0.45)]).unwrap();
        assert_eq!(centralizer(&g5, &h, tol()).dim(), 2);
        let g4 = Algebra::new(Family::Orthogonal, 4).unwrap();
        assert_eq!(centralizer(&g4, &CMat::zeros(4, 4), tol()).dim(), 6);
        let e = regular_nilpotent_b(&g5);
        assert_eq!(centralizer(&g5, &e, tol()).dim(), 2);
        assert!(is_regular(&g5, &e, tol()));
        assert!(is_regular(&g5, &h, tol()));
        assert!(!is_regular(&g4, &CMat::zeros(4, 4), tol()));
    }

    #[test]
    fn centralizer_is_orthonormal_and_commutes() {
        let mut rng = rng_from_seed(2);
        let g = Algebra::new(Family::Orthogonal, 7).unwrap();
        let x = random_element(&g, &mut rng, 1.0);
        let z = centralizer(&g, &x, tol());
        let gram = z.basis().adjoint() * z.basis();
        assert!((gram - CMat::identity(z.dim(), z.dim())).norm() < 1e-12);
        for m in z.matrices(&g) {
            assert!(max_abs(&commutator(&m, &x)) < 1e-10);
        }
    }

    #[test]
    fn intersection_examples() {
        let g = Algebra::new(Family::Orthogonal, 4).unwrap();
        let e = |k: usize| {
            let mut v = CVec::zeros(6);
            v[k] = c(1.0);
            v
        };
        let a = Subspace::new(&g, CMat::from_columns(&[e(0), e(1)]), f64::INFINITY);
        let b = Subspace::new(&g, CMat::from_columns(&[e(2), e(3)]), f64::INFINITY);
        assert_eq!(intersect(&a, &a, tol()).unwrap().dim(), 2);
        assert!(intersect(&a, &a, tol()).unwrap().distance(&a).unwrap() < 1e-12);
        assert_eq!(intersect(&a, &b, tol()).unwrap().dim(), 0);
        let full = Subspace::new(&g, CMat::identity(6, 6), f64::INFINITY);
        assert_eq!(intersect(&full, &full, tol()).unwrap().dim(), 6);
        let g5 = Algebra::new(Family::Orthogonal, 5).unwrap();
        let other = Subspace::new(&g5, CMat::zeros(10, 0), f64::INFINITY);
        assert_eq!(intersect(&a, &other, tol()).unwrap_err(), GzError::AmbientMismatch);
    }

    #[test]
    fn so3_chain_intersection_is_trivial_for_generic_x() {
        let ctx = so(3);
        let mut rng = rng_from_seed(4);
        for _ in 0..20 {
            let x = random_element(ctx.top(), &mut rng, 1.0);
            let z2 = chain_centralizer(&ctx, &x, 2, tol()).unwrap();
            let z3 = chain_centralizer(&ctx, &x, 3, tol()).unwrap();
            assert_eq!(intersect(&z2, &z3, tol()).unwrap().dim(), 0);
        }
    }

    #[test]
    fn zero_is_nowhere_regular() {
        for n in 3..=7 {
            let ctx = so(n);
            let x = CMat::zeros(n, n);
            assert!(!is_sreg_rank(&ctx, &x, tol()).unwrap());
            assert!(!is_sreg_chain(&ctx, &x, tol()).unwrap());
            assert!(!is_nsreg(&ctx, &x, tol()).unwrap());
            assert!(!omega_test(&ctx, &x, tol()).unwrap());
        }
    }

    #[test]
    fn generic_elements_are_strongly_regular_both_ways() {
        let mut rng = rng_from_seed(9);
        for n in 3..=7 {
            let ctx = so(n);
            for _ in 0..10 {
                let x = random_element(ctx.top(), &mut rng, 1.0);
                assert!(is_sreg_rank(&ctx, &x, tol()).unwrap());
                assert!(is_sreg_chain(&ctx, &x, tol()).unwrap());
                assert!(is_nsreg(&ctx, &x, tol()).unwrap());
                assert!(omega_test(&ctx, &x, tol()).unwrap());
            }
        }
    }

    #[test]
    fn diagonal_elements_fail_both_criteria() {
        for n in 4..=7 {
            let ctx = so(n);
            let eps: Vec<C64> = (0..ctx.rank()).map(|k| c(1.0 + k as f64 * 0.7)).collect();
            let x = ctx.top().cartan_element(&eps).unwrap();
            assert!(!is_sreg_rank(&ctx, &x, tol()).unwrap());
            assert!(!is_sreg_chain(&ctx, &x, tol()).unwrap());
        }
    }

    #[test]
    fn so5_nilpotent_with_both_tests() {
        let ctx = so(5);
        let e = regular_nilpotent_b(ctx.top());
        let a = sreg_rank(&ctx, &e, tol()).unwrap();
        let b = sreg_chain(&ctx, &e, tol()).unwrap();
        assert_eq!(a.holds, b.holds);
        assert!(!a.in_band() && !b.in_band());
    }

    #[test]
    fn regular_centralizer_is_spanned_by_top_gradients() {
        let mut rng = rng_from_seed(12);
        for n in 3..=7 {
            let ctx = so(n);
            let x = random_element(ctx.top(), &mut rng, 1.0);
            let z = chain_centralizer(&ctx, &x, n, tol()).unwrap();
            let grads: Vec<CVec> = (1..=ctx.rank())
                .map(|j| ctx.top().coords(&gz_gradient(&ctx, &x, n, j).unwrap()))
                .collect();
            let (span, _) = range_basis(&CMat::from_columns(&grads), tol());
            let s = Subspace::new(ctx.top(), span, f64::INFINITY);
            assert!(z.distance(&s).unwrap() < 1e-8);
            assert!(z.dim() >= ctx.rank());
        }
    }

    #[test]
    fn nsreg_implies_regular_pair() {
        let mut rng = rng_from_seed(13);
        for n in 3..=7 {
            let ctx = so(n);
            for _ in 0..5 {
                let x = random_element(ctx.top(), &mut rng, 1.0);
                if is_nsreg(&ctx, &x, tol()).unwrap() {
                    assert!(is_regular(ctx.top(), &x, tol()));
                    let xk = ctx.project(&x, n - 1).unwrap();
                    assert!(is_regular(ctx.level(n - 1).unwrap().algebra(), &xk, tol()));
                }
            }
        }
    }

    #[test]
    fn identity_component_of_the_k_centralizer() {
        // nsreg: the stabilizer algebra in k is trivial, so no one-parameter subgroup of K fixes x
        let ctx = so(5);
        let mut rng = rng_from_seed(14);
        let x = random_element(ctx.top(), &mut rng, 1.0);
        assert_eq!(top_intersection(&ctx, &x, tol()).unwrap().dim(), 0);
        // a nilradical element: the highest root vector lies in k and fixes it
        let g = ctx.top();
        let y = g.root_vector(Root::diff(1, 2)).unwrap() + g.root_vector(Root::short(1)).unwrap();
        let cap = top_intersection(&ctx, &y, tol()).unwrap();
        assert!(cap.dim() > 0);
        for m in cap.matrices(g) {
            let k = matrix_exp(&(m * c(0.8)));
            let moved = &k * &y * k.clone().try_inverse().unwrap();
            assert!(max_abs(&(moved - &y)) < 1e-10);
        }
    }
}
