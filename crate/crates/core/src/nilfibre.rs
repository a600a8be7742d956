//! Regular nilpotents, standard θ-stable nilradicals, the obstruction to strong
//! regularity on the nilfibre, and the linear components of the slice nullcone.

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, AlgebraContext, Family, OrthogonalType, Root};
use crate::error::{GzError, Result};
use crate::invariants::partial_kw;
use crate::linalg::{commutator, frobenius, max_abs, max_abs_vec, range_basis, to_complex, CMat, CVec, RankTol, C64};
use crate::regularity::Subspace;
use crate::sampling::{gaussian_vector, random_group_element, rng_from_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NilradicalLabel {
    Plus,
    Minus,
}

/// A standard θ-stable nilradical n = Ad(w)·n_+ together with its θ-parts.
#[derive(Clone, Debug)]
pub struct NilradicalRep {
    pub label: NilradicalLabel,
    pub nilradical: Subspace,
    /// n ∩ k
    pub compact: Subspace,
    /// n^{−θ}
    pub anti: Subspace,
    /// Diagonal Cartan subalgebra of the defining Borel.
    pub cartan: Subspace,
    /// w with n = Ad(w)·n_+ (identity for n_+).
    pub weyl_representative: DMatrix<f64>,
}

impl NilradicalRep {
    pub fn matrices(&self, alg: &Algebra) -> Vec<CMat> {
        self.nilradical.matrices(alg)
    }

    /// Random element with Gaussian coefficients on the orthonormal basis.
    pub fn random_element<R: Rng + ?Sized>(&self, alg: &Algebra, rng: &mut R, scale: f64) -> CMat {
        let c = gaussian_vector(rng, self.nilradical.dim(), scale);
        alg.from_coords(&(self.nilradical.basis() * c))
    }

    /// ‖θ(n) − n‖ as a projector distance.
    pub fn theta_residual(&self, ctx: &AlgebraContext) -> Result<f64> {
        let alg = ctx.top();
        let inv = ctx.involution()?;
        let images: Vec<CMat> = self.matrices(alg).iter().map(|y| inv.apply(y)).collect();
        span(alg, &images)?.distance(&self.nilradical)
    }
}

fn orthogonal_context(ctx: &AlgebraContext, lo: usize) -> Result<OrthogonalType> {
    if ctx.family() != Family::Orthogonal {
        return Err(GzError::NotOrthogonal);
    }
    if ctx.n() < lo {
        return Err(GzError::SizeTooSmall(ctx.n(), lo));
    }
    Ok(ctx.top().orthogonal_type().expect("orthogonal"))
}

/// Orthonormal span of some members of `alg`, in its basis coordinates.
pub fn span(alg: &Algebra, mats: &[CMat]) -> Result<Subspace> {
    if mats.is_empty() {
        return Ok(Subspace::new(alg, CMat::zeros(alg.dim(), 0), f64::INFINITY));
    }
    let cols: Vec<CVec> = mats.iter().map(|m| alg.coords(m)).collect();
    let (b, dec) = range_basis(&CMat::from_columns(&cols), RankTol::default());
    Ok(Subspace::new(alg, b, dec.margin))
}

fn conjugate(w: &DMatrix<f64>, y: &CMat) -> CMat {
    let wc = to_complex(w);
    &wc * y * wc.transpose()
}

/// The regular nilpotent from the dual-regularity construction: regular in g, with
/// regular projection to k and Φ_n(e) = 0.
pub fn regular_nilpotent(ctx: &AlgebraContext) -> Result<CMat> {
    let ty = orthogonal_context(ctx, 4)?;
    let alg = ctx.top();
    let l = (ctx.n() / 2) as i32;
    let mut e = CMat::zeros(ctx.n(), ctx.n());
    match ty {
        OrthogonalType::B => {
            for r in alg.simple_roots()? {
                e += alg.root_vector(r)?;
            }
            e += alg.root_vector(Root::sum(l - 1, l))?;
        }
        OrthogonalType::D => {
            for i in 1..l - 1 {
                e += alg.root_vector(Root::diff(i, i + 1))?;
            }
            let a = alg.root_vector(Root::diff(l - 1, l))?;
            e += (&a + ctx.theta(&a)?) * C64::new(0.5, 0.0);
        }
    }
    Ok(e)
}

/// The Weyl representative exchanging e_l ↔ e_{−l} and negating e_0 (type B).
pub fn simple_reflection_representative(alg: &Algebra) -> Result<DMatrix<f64>> {
    if alg.orthogonal_type() != Some(OrthogonalType::B) {
        return Err(GzError::Invalid(format!("no type B reflection representative for so({})", alg.n())));
    }
    let n = alg.n();
    let l = n / 2;
    let mut w = DMatrix::<f64>::identity(n, n);
    w[(l - 1, l - 1)] = 0.0;
    w[(l + 1, l + 1)] = 0.0;
    w[(l - 1, l + 1)] = 1.0;
    w[(l + 1, l - 1)] = 1.0;
    w[(l, l)] = -1.0;
    Ok(w)
}

fn nilradical_rep(ctx: &AlgebraContext, label: NilradicalLabel, w: DMatrix<f64>) -> Result<NilradicalRep> {
    let alg = ctx.top();
    let inv = ctx.involution()?;
    let n_mats: Vec<CMat> = alg
        .positive_roots()?
        .into_iter()
        .map(|r| alg.root_vector(r).map(|y| conjugate(&w, &y)))
        .collect::<Result<_>>()?;
    let half = C64::new(0.5, 0.0);
    let fixed: Vec<CMat> = n_mats.iter().map(|y| (y + inv.apply(y)) * half).collect();
    let anti: Vec<CMat> = n_mats.iter().map(|y| (y - inv.apply(y)) * half).collect();
    let cartan: Vec<CMat> = (0..alg.rank())
        .map(|k| {
            let mut eps = vec![C64::new(0.0, 0.0); alg.rank()];
            eps[k] = C64::new(1.0, 0.0);
            alg.cartan_element(&eps)
        })
        .collect::<Result<_>>()?;
    Ok(NilradicalRep {
        label,
        nilradical: span(alg, &n_mats)?,
        compact: span(alg, &fixed)?,
        anti: span(alg, &anti)?,
        cartan: span(alg, &cartan)?,
        weyl_representative: w,
    })
}

/// [n_+] for type D, [n_+, n_−] for type B. n = 3 is accepted for contrast experiments.
pub fn standard_nilradicals(ctx: &AlgebraContext) -> Result<Vec<NilradicalRep>> {
    let ty = orthogonal_context(ctx, 3)?;
    let n = ctx.n();
    let mut out = vec![nilradical_rep(ctx, NilradicalLabel::Plus, DMatrix::identity(n, n))?];
    if ty == OrthogonalType::B {
        let w = simple_reflection_representative(ctx.top())?;
        out.push(nilradical_rep(ctx, NilradicalLabel::Minus, w)?);
    }
    Ok(out)
}

/// Ad(k)·y with y random in a randomly chosen standard nilradical and k = exp of a
/// random element of k (coordinates 0.5·N_C(0,1)); rescaled to unit Frobenius norm.
pub fn sample_partial_nilfibre(ctx: &AlgebraContext, seed: u64) -> Result<CMat> {
    let reps = standard_nilradicals(ctx)?;
    let mut rng = rng_from_seed(seed);
    let rep = &reps[rng.random_range(0..reps.len())];
    let y = rep.random_element(ctx.top(), &mut rng, 1.0);
    let k = random_group_element(ctx, ctx.n() - 1, &mut rng, 0.5)?;
    let kinv = k.clone().try_inverse().ok_or_else(|| GzError::Numerical("singular group element".into()))?;
    let x = &k * y * kinv;
    let top = ctx.top();
    let x = top.from_coords(&top.coords(&x));
    let x = &x * C64::new(1.0 / frobenius(&x), 0.0);
    let res = partial_kw(ctx, &x)?.max_abs();
    if res > 1e-9 {
        return Err(GzError::Numerical(format!("partial KW residual {res:.3e} on a nilfibre sample")));
    }
    Ok(x)
}

/// Nonzero y ∈ z_k(n ∩ k) ∩ z_g(n): the highest-root vector moved by the Weyl
/// representative, or for so(4) its θ-symmetrization.
pub fn obstruction_witness(ctx: &AlgebraContext, rep: &NilradicalRep) -> Result<CMat> {
    orthogonal_context(ctx, 4)?;
    let alg = ctx.top();
    let top_root = alg.root_vector(Root::sum(1, 2))?;
    let y = if ctx.n() == 4 { &top_root + ctx.theta(&top_root)? } else { top_root };
    Ok(conjugate(&rep.weyl_representative, &y))
}

/// Residuals certifying a witness: (max ‖[y, n]‖, max ‖[y, n∩k]‖, ‖θ(y) − y‖), all ∞-norms.
pub fn witness_residuals(ctx: &AlgebraContext, rep: &NilradicalRep, y: &CMat) -> Result<(f64, f64, f64)> {
    let alg = ctx.top();
    let worst = |s: &Subspace| s.matrices(alg).iter().map(|b| max_abs(&commutator(y, b))).fold(0.0, f64::max);
    let theta = max_abs(&(ctx.theta(y)? - y));
    Ok((worst(&rep.nilradical), worst(&rep.compact), theta))
}

/// Upper or lower choice for one coordinate of a nullcone component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    U,
    L,
}

#[derive(Clone, Debug)]
pub struct NullconeComponent {
    pub sides: Vec<Side>,
    pub subspace: Subspace,
    /// Integer diagonal element of h ∩ k grading the component positively.
    pub grading: CMat,
}

impl NullconeComponent {
    pub fn label(&self) -> String {
        self.sides.iter().map(|s| if *s == Side::U { 'U' } else { 'L' }).collect()
    }
}

/// The 2^{r_{n−1}} linear components of the H∩K-nullcone in g^{−θ}.
pub fn nullcone_components(ctx: &AlgebraContext) -> Result<Vec<NullconeComponent>> {
    let ty = orthogonal_context(ctx, 4)?;
    let alg = ctx.top();
    let l = (ctx.n() / 2) as i32;
    let r = ctx.level(ctx.n() - 1)?.algebra().rank();
    let mut out = Vec::with_capacity(1 << r);
    for mask in 0..(1usize << r) {
        let sides: Vec<Side> = (0..r).map(|j| if mask >> (r - 1 - j) & 1 == 0 { Side::U } else { Side::L }).collect();
        let mut gens = Vec::with_capacity(r);
        let mut eps = vec![C64::new(0.0, 0.0); alg.rank()];
        for (j, side) in sides.iter().enumerate() {
            let i = j as i32 + 1;
            let magnitude = (r - j) as f64;
            let (root, sign) = match (ty, side) {
                (OrthogonalType::B, Side::U) => (Root::short(i), 1.0),
                (OrthogonalType::B, Side::L) => (Root::neg_short(i), -1.0),
                (OrthogonalType::D, Side::U) => (Root::diff(i, l), 1.0),
                (OrthogonalType::D, Side::L) => (Root::diff(l, i), -1.0),
            };
            let f = alg.root_vector(root)?;
            gens.push(match ty {
                OrthogonalType::B => f,
                OrthogonalType::D => &f - ctx.theta(&f)?,
            });
            eps[j] = C64::new(sign * magnitude, 0.0);
        }
        out.push(NullconeComponent { sides, subspace: span(alg, &gens)?, grading: alg.cartan_element(&eps)? });
    }
    Ok(out)
}

/// θ-anti-fixed part of the sum of positive ad(x) eigenspaces, for a real diagonal x.
pub fn positive_anti_part(ctx: &AlgebraContext, x: &CMat) -> Result<Subspace> {
    let alg = ctx.top();
    let inv = ctx.involution()?;
    let mut gens = Vec::new();
    for (b, &(p, q)) in alg.basis().iter().zip(alg.basis_positions()) {
        // basis vectors are ad(diag) eigenvectors with eigenvalue x_p − x_q
        if (x[(p, p)] - x[(q, q)]).re > 0.5 {
            gens.push(b - inv.apply(b));
        }
    }
    span(alg, &gens)
}

/// max over the component basis and the Cartan of k of the part of ad(h)·v leaving C.
pub fn cartan_stability_residual(ctx: &AlgebraContext, comp: &NullconeComponent) -> Result<f64> {
    let alg = ctx.top();
    let b = comp.subspace.basis();
    let proj = b * b.adjoint();
    let l = ctx.n() / 2;
    let mut worst: f64 = 0.0;
    let compact_rank = if ctx.n() % 2 == 1 { l } else { l - 1 };
    for k in 0..compact_rank {
        let mut eps = vec![C64::new(0.0, 0.0); alg.rank()];
        eps[k] = C64::new(1.0, 0.0);
        let h = alg.cartan_element(&eps)?;
        for v in comp.subspace.matrices(alg) {
            let w = alg.coords(&commutator(&h, &v));
            worst = worst.max(max_abs_vec((&w - &proj * &w).as_slice()));
        }
    }
    Ok(worst)
}

/// ‖Φ_n(λx + y)‖∞ along the given λ.
pub fn degeneration_profile(ctx: &AlgebraContext, x: &CMat, y: &CMat, lambdas: &[f64]) -> Result<Vec<f64>> {
    lambdas
        .iter()
        .map(|&lam| Ok(partial_kw(ctx, &(x * C64::new(lam, 0.0) + y))?.max_abs()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularity::{centralizer, is_nsreg, is_regular, is_sreg_rank};

    fn so(n: usize) -> AlgebraContext {
        AlgebraContext::new(Family::Orthogonal, n).unwrap()
    }

    #[test]
    fn regular_nilpotents_are_dually_regular() {
        for n in 4..=9 {
            let ctx = so(n);
            let e = regular_nilpotent(&ctx).unwrap();
            ctx.check_member(&e).unwrap();
            let mut p = CMat::identity(n, n);
            for _ in 0..n {
                p = &p * &e;
            }
            assert_eq!(max_abs(&p), 0.0);
            assert!(partial_kw(&ctx, &e).unwrap().max_abs() < 1e-14, "n = {n}");
            let tol = RankTol::default();
            assert!(is_regular(ctx.top(), &e, tol), "n = {n}");
            let ek = ctx.project(&e, n - 1).unwrap();
            let k = ctx.level(n - 1).unwrap().algebra();
            assert!(is_regular(k, &ek, tol), "n = {n}");
            assert_eq!(centralizer(ctx.top(), &e, tol).dim(), ctx.rank());
            assert_eq!(centralizer(k, &ek, tol).dim(), k.rank());
        }
    }

    #[test]
    fn nilradical_counts_and_dimensions() {
        assert_eq!(standard_nilradicals(&so(6)).unwrap().len(), 1);
        let b = standard_nilradicals(&so(5)).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b[0].anti.distance(&b[1].anti).unwrap() > 0.1);
        for n in 4..=8 {
            let ctx = so(n);
            let r = ctx.level(n - 1).unwrap().algebra().rank();
            for rep in standard_nilradicals(&ctx).unwrap() {
                assert_eq!(rep.anti.dim(), r);
                assert_eq!(rep.compact.dim() + rep.anti.dim(), rep.nilradical.dim());
                assert!(rep.theta_residual(&ctx).unwrap() < 1e-12);
                for y in rep.matrices(ctx.top()) {
                    assert!(partial_kw(&ctx, &y).unwrap().max_abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn compact_part_is_a_borel_nilradical_of_k() {
        // dim (n ∩ k) = number of positive roots of k
        for n in 4..=8 {
            let ctx = so(n);
            let k = ctx.level(n - 1).unwrap().algebra();
            let want = k.positive_roots().unwrap().len();
            for rep in standard_nilradicals(&ctx).unwrap() {
                assert_eq!(rep.compact.dim(), want);
            }
        }
    }

    #[test]
    fn witnesses_centralize_their_nilradicals() {
        for n in 4..=8 {
            let ctx = so(n);
            for rep in standard_nilradicals(&ctx).unwrap() {
                let y = obstruction_witness(&ctx, &rep).unwrap();
                assert!(frobenius(&y) > 0.5);
                let (a, b, c) = witness_residuals(&ctx, &rep, &y).unwrap();
                assert!(a < 1e-12 && b < 1e-12 && c < 1e-12, "n = {n}");
            }
        }
    }

    #[test]
    fn partial_nilfibre_samples_are_not_nsreg() {
        for n in 4..=7 {
            let ctx = so(n);
            for seed in 0..20 {
                let x = sample_partial_nilfibre(&ctx, seed).unwrap();
                assert!(!is_nsreg(&ctx, &x, RankTol::default()).unwrap(), "n = {n}, seed = {seed}");
            }
        }
    }

    #[test]
    fn so3_nilfibre_has_sreg_points() {
        let ctx = so(3);
        let x = sample_partial_nilfibre(&ctx, 5).unwrap();
        assert!(is_sreg_rank(&ctx, &x, RankTol::default()).unwrap());
    }

    #[test]
    fn nullcone_components_are_graded_nilradical_parts() {
        for (n, count) in [(5, 4), (6, 4), (7, 8), (8, 8)] {
            let ctx = so(n);
            let comps = nullcone_components(&ctx).unwrap();
            assert_eq!(comps.len(), count);
            let r = ctx.level(n - 1).unwrap().algebra().rank();
            let plus = &standard_nilradicals(&ctx).unwrap()[0];
            for c in &comps {
                assert_eq!(c.subspace.dim(), r);
                let graded = positive_anti_part(&ctx, &c.grading).unwrap();
                assert!(graded.distance(&c.subspace).unwrap() < 1e-12, "{}", c.label());
                assert!(cartan_stability_residual(&ctx, c).unwrap() < 1e-12);
                // inside g^{−θ}
                for v in c.subspace.matrices(ctx.top()) {
                    assert!(max_abs(&(ctx.theta(&v).unwrap() + &v)) < 1e-12);
                }
            }
            assert!(comps[0].subspace.distance(&plus.anti).unwrap() < 1e-12);
        }
    }

    #[test]
    fn degeneration_tends_to_zero() {
        let ctx = so(6);
        let rep = &standard_nilradicals(&ctx).unwrap()[0];
        let mut rng = rng_from_seed(2);
        let y = rep.random_element(ctx.top(), &mut rng, 1.0);
        let x = ctx
            .top()
            .cartan_element(&[C64::new(1.0, 0.0), C64::new(-2.0, 0.0), C64::new(0.0, 0.0)])
            .unwrap();
        let prof = degeneration_profile(&ctx, &x, &y, &[1.0, 0.1, 0.01]).unwrap();
        assert!(prof[0] > prof[1] && prof[1] > prof[2] && prof[2] < 1e-3);
    }

    #[test]
    fn rejects_gl_and_small_n() {
        let gl = AlgebraContext::new(Family::GeneralLinear, 4).unwrap();
        assert_eq!(regular_nilpotent(&gl).unwrap_err(), GzError::NotOrthogonal);
        assert!(obstruction_witness(&so(3), &standard_nilradicals(&so(3)).unwrap()[0]).is_err());
    }
}
