//! GZ functions, the KW map, spectra and gradients.
//!
//! At an orthogonal level g_i the generators are Tr(y^2), …, Tr(y^{2r_i}), except that for
//! even i the last one is replaced by Pfaff(y) := Pf(S_i y). At a gl level they are
//! Tr(y), …, Tr(y^i). The GZ function f_{i,j} is the generator ψ_{i,j} applied to x_i.

use nalgebra::DMatrix;

use crate::algebra::{Algebra, AlgebraContext, Family};
use crate::error::{GzError, Result};
use crate::linalg::{
    eigenvalues, elementary_from_power_sums, monic_roots, spectral_norm, to_complex, trace, CMat,
    CVec, C64, ZERO,
};
use crate::pfaffian::{pfaffian_cofactors, pfaffian_skew};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotKind {
    /// Tr(y^p)
    Trace(u32),
    Pfaffian,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GzSlot {
    pub level: usize,
    pub j: usize,
    pub kind: SlotKind,
}

impl GzSlot {
    /// Homogeneous degree of the generator.
    pub fn degree(&self) -> u32 {
        match self.kind {
            SlotKind::Trace(p) => p,
            SlotKind::Pfaffian => self.level as u32 / 2,
        }
    }
}

/// Generators (j, kind) of the invariant ring of a single algebra.
pub fn level_slots(alg: &Algebra) -> Vec<(usize, SlotKind)> {
    let i = alg.n();
    match alg.family() {
        Family::GeneralLinear => (1..=i).map(|j| (j, SlotKind::Trace(j as u32))).collect(),
        Family::Orthogonal => {
            let r = alg.rank();
            (1..=r)
                .map(|j| {
                    if i.is_multiple_of(2) && j == r {
                        (j, SlotKind::Pfaffian)
                    } else {
                        (j, SlotKind::Trace(2 * j as u32))
                    }
                })
                .collect()
        }
    }
}

/// All GZ slots of the chain in (i, j) order.
pub fn slots(ctx: &AlgebraContext) -> Vec<GzSlot> {
    ctx.levels()
        .iter()
        .flat_map(|lvl| {
            level_slots(lvl.algebra())
                .into_iter()
                .map(move |(j, kind)| GzSlot { level: lvl.index(), j, kind })
        })
        .collect()
}

/// Values of the GZ functions with their (i, j) labels.
#[derive(Clone, Debug, PartialEq)]
pub struct GzValues {
    pub index: Vec<(usize, usize)>,
    pub values: Vec<C64>,
}

impl GzValues {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> Option<C64> {
        self.index.iter().position(|&s| s == (i, j)).map(|k| self.values[k])
    }

    /// Values at level i, in j order.
    pub fn level(&self, i: usize) -> Vec<C64> {
        self.index
            .iter()
            .zip(&self.values)
            .filter(|((li, _), _)| *li == i)
            .map(|(_, v)| *v)
            .collect()
    }

    pub fn max_abs_diff(&self, other: &GzValues) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |a, (x, y)| a.max((x - y).norm()))
    }

    pub fn max_abs(&self) -> f64 {
        crate::linalg::max_abs_vec(&self.values)
    }
}

fn check_level_member(alg: &Algebra, y: &CMat) -> Result<()> {
    alg.check_member(y)
}

/// Pfaff(y) = Pf(S y) for y ∈ so(2l).
pub fn pfaffian(alg: &Algebra, y: &CMat) -> Result<C64> {
    if alg.family() != Family::Orthogonal {
        return Err(GzError::NotOrthogonal);
    }
    if alg.n() % 2 == 1 {
        return Err(GzError::OddSize(alg.n()));
    }
    check_level_member(alg, y)?;
    Ok(pfaffian_unchecked(alg, y))
}

fn pfaffian_unchecked(alg: &Algebra, y: &CMat) -> C64 {
    let s = to_complex(alg.form().expect("orthogonal"));
    pfaffian_skew(&(s * y))
}

/// Every generator of the algebra at y, in j order.
pub fn psi_all(alg: &Algebra, y: &CMat) -> Vec<C64> {
    let slots = level_slots(alg);
    let step = if alg.family() == Family::Orthogonal { y * y } else { y.clone() };
    let mut power = step.clone();
    let mut out = Vec::with_capacity(slots.len());
    for (k, (_, kind)) in slots.iter().enumerate() {
        if k > 0 {
            power = &power * &step;
        }
        out.push(match kind {
            SlotKind::Trace(_) => trace(&power),
            SlotKind::Pfaffian => pfaffian_unchecked(alg, y),
        });
    }
    out
}

/// The generator ψ_{i,j} of the algebra `alg` at y.
pub fn psi(alg: &Algebra, y: &CMat, j: usize) -> Result<C64> {
    check_level_member(alg, y)?;
    let slots = level_slots(alg);
    if j == 0 || j > slots.len() {
        return Err(GzError::GzIndex(alg.n(), j));
    }
    Ok(psi_all(alg, y)[j - 1])
}

pub fn gz_value(ctx: &AlgebraContext, x: &CMat, i: usize, j: usize) -> Result<C64> {
    ctx.check_member(x)?;
    let lvl = ctx.level(i).map_err(|_| GzError::GzIndex(i, j))?;
    let xi = ctx.project(x, i)?;
    psi(lvl.algebra(), &xi, j).map_err(|e| match e {
        GzError::GzIndex(..) => GzError::GzIndex(i, j),
        other => other,
    })
}

fn values_for_levels(ctx: &AlgebraContext, x: &CMat, levels: &[usize]) -> Result<GzValues> {
    ctx.check_member(x)?;
    let mut index = Vec::new();
    let mut values = Vec::new();
    for &i in levels {
        let lvl = ctx.level(i)?;
        let xi = ctx.project(x, i)?;
        for (j, v) in psi_all(lvl.algebra(), &xi).into_iter().enumerate() {
            index.push((i, j + 1));
            values.push(v);
        }
    }
    Ok(GzValues { index, values })
}

/// Φ(x), all GZ functions of the chain.
pub fn kw_map(ctx: &AlgebraContext, x: &CMat) -> Result<GzValues> {
    let levels: Vec<usize> = ctx.levels().iter().map(|l| l.index()).collect();
    values_for_levels(ctx, x, &levels)
}

/// Φ_n(x), the top two blocks.
pub fn partial_kw(ctx: &AlgebraContext, x: &CMat) -> Result<GzValues> {
    let n = ctx.n();
    if n <= ctx.first_index() {
        return Err(GzError::SizeTooSmall(n, ctx.first_index() + 1));
    }
    values_for_levels(ctx, x, &[n - 1, n])
}

/// Trace-form gradient of ψ_{·,j} at y, as an element of the same algebra.
pub fn psi_gradient(alg: &Algebra, y: &CMat, j: usize) -> Result<CMat> {
    let slots = level_slots(alg);
    let (_, kind) = *slots.get(j.wrapping_sub(1)).ok_or(GzError::GzIndex(alg.n(), j))?;
    let m = alg.n();
    Ok(match (alg.family(), kind) {
        (_, SlotKind::Trace(p)) => {
            if p == 1 {
                CMat::identity(m, m)
            } else {
                let mut g = y.clone();
                for _ in 1..p - 1 {
                    g = &g * y;
                }
                g * C64::new(p as f64, 0.0)
            }
        }
        (_, SlotKind::Pfaffian) => {
            let s = to_complex(alg.form().expect("orthogonal"));
            let c = pfaffian_cofactors(&(&s * y));
            c * s * C64::new(-0.5, 0.0)
        }
    })
}

/// ∇f_{i,j}(x) for the trace form on g.
pub fn gz_gradient(ctx: &AlgebraContext, x: &CMat, i: usize, j: usize) -> Result<CMat> {
    ctx.check_member(x)?;
    let lvl = ctx.level(i).map_err(|_| GzError::GzIndex(i, j))?;
    let xi = ctx.project(x, i)?;
    let g = psi_gradient(lvl.algebra(), &xi, j).map_err(|_| GzError::GzIndex(i, j))?;
    ctx.embed(i, &g)
}

/// Rows are the gradients of all GZ functions, in top-level basis coordinates.
pub fn kw_jacobian(ctx: &AlgebraContext, x: &CMat) -> Result<CMat> {
    ctx.check_member(x)?;
    jacobian_rows(ctx, x, None)
}

/// Gradient rows restricted to the top two blocks.
pub fn partial_jacobian(ctx: &AlgebraContext, x: &CMat) -> Result<CMat> {
    ctx.check_member(x)?;
    let n = ctx.n();
    jacobian_rows(ctx, x, Some(&[n - 1, n]))
}

fn jacobian_rows(ctx: &AlgebraContext, x: &CMat, only: Option<&[usize]>) -> Result<CMat> {
    let top = ctx.top();
    let mut rows: Vec<CVec> = Vec::new();
    for lvl in ctx.levels() {
        if let Some(o) = only {
            if !o.contains(&lvl.index()) {
                continue;
            }
        }
        let xi = ctx.project(x, lvl.index())?;
        let lift = to_complex(lvl.lift());
        for (j, _) in level_slots(lvl.algebra()) {
            let g = psi_gradient(lvl.algebra(), &xi, j)?;
            rows.push(&lift * lvl.algebra().coords(&g));
        }
    }
    let mut j = CMat::zeros(rows.len(), top.dim());
    for (k, r) in rows.iter().enumerate() {
        j.set_row(k, &r.transpose());
    }
    Ok(j)
}

/// Directional derivatives df_s[B_k]; equals kw_jacobian times the trace Gram matrix.
pub fn derivative_matrix(ctx: &AlgebraContext, x: &CMat) -> Result<CMat> {
    Ok(kw_jacobian(ctx, x)? * to_complex(ctx.top().trace_gram()))
}

/// Central finite-difference gradient of f_{i,j} in basis coordinates.
pub fn finite_difference_gradient(
    ctx: &AlgebraContext,
    x: &CMat,
    i: usize,
    j: usize,
    h: f64,
) -> Result<CVec> {
    let top = ctx.top();
    let d = top.dim();
    let mut deriv = CVec::zeros(d);
    for (k, b) in top.basis().iter().enumerate() {
        let step = b * C64::new(h, 0.0);
        let fp = gz_value(ctx, &(x + &step), i, j)?;
        let fm = gz_value(ctx, &(x - &step), i, j)?;
        deriv[k] = (fp - fm) / (2.0 * h);
    }
    let gram: DMatrix<f64> = top.trace_gram().clone();
    let lu = to_complex(&gram).lu();
    lu.solve(&deriv).ok_or_else(|| GzError::Numerical("singular trace form".into()))
}

/// Coefficients e_1..e_r of q(μ) = Π(μ − λ_k²), where ±λ_k are the eigenvalues of y ∈ so(i).
/// Computed from the generators, so they are constant on fibres of Φ.
pub fn squared_char_coefficients(alg: &Algebra, y: &CMat) -> Result<Vec<C64>> {
    if alg.family() != Family::Orthogonal {
        return Err(GzError::NotOrthogonal);
    }
    Ok(squared_coefficients_from_values(alg.n(), &psi_all(alg, y)))
}

/// Same as [`squared_char_coefficients`], starting from the generator values of so(i).
pub fn squared_coefficients_from_values(i: usize, psi: &[C64]) -> Vec<C64> {
    let r = i / 2;
    let even = i.is_multiple_of(2);
    let traces = if even { r - 1 } else { r };
    let p: Vec<C64> = psi[..traces].iter().map(|t| t * 0.5).collect();
    let mut e = elementary_from_power_sums(&p);
    if even {
        e.push(psi[r - 1] * psi[r - 1]);
    }
    e
}

/// σ(y) with the type B convention, as the 2r numbers ±√μ_k; zeros appear only when
/// they are genuine multiple eigenvalues.
pub fn invariant_spectrum(alg: &Algebra, y: &CMat) -> Result<Vec<C64>> {
    let e = squared_char_coefficients(alg, y)?;
    Ok(spectrum_from_coefficients(&e))
}

pub fn spectrum_from_coefficients(e: &[C64]) -> Vec<C64> {
    let c: Vec<C64> = e
        .iter()
        .enumerate()
        .map(|(k, v)| if k % 2 == 0 { -v } else { *v })
        .collect();
    monic_roots(&c)
        .into_iter()
        .flat_map(|mu| {
            let s = mu.sqrt();
            [s, -s]
        })
        .collect()
}

/// Algebraic multiplicity of 0 as an eigenvalue of y ∈ so(i), read off the trailing
/// coefficients of the characteristic polynomial. A coefficient e_k counts as zero when
/// |e_k| ≤ tol·C(r,k)·‖y‖₂^{2k}.
pub fn zero_multiplicity(alg: &Algebra, y: &CMat, tol: f64) -> Result<usize> {
    let e = squared_char_coefficients(alg, y)?;
    let rho2 = spectral_norm(y).powi(2);
    let r = e.len();
    let mut binom = 1.0;
    let mut bounds = Vec::with_capacity(r);
    for k in 1..=r {
        binom = binom * (r + 1 - k) as f64 / k as f64;
        bounds.push(tol * binom * rho2.powi(k as i32));
    }
    let mut mult_mu = 0;
    for k in (1..=r).rev() {
        if e[k - 1].norm() <= bounds[k - 1] {
            mult_mu += 1;
        } else {
            break;
        }
    }
    Ok(2 * mult_mu + alg.n() % 2)
}

/// Clustered eigenvalues of an element of a single algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// (eigenvalue, multiplicity)
    pub eigenvalues: Vec<(C64, usize)>,
    /// A lone zero eigenvalue of an odd-size orthogonal element was dropped.
    pub zero_suppressed: bool,
    /// Clusters were close enough that the grouping may be unreliable.
    pub ill_conditioned: bool,
}

impl Spectrum {
    pub fn total_multiplicity(&self) -> usize {
        self.eigenvalues.iter().map(|(_, m)| m).sum()
    }

    /// Expanded multiset.
    pub fn flatten(&self) -> Vec<C64> {
        self.eigenvalues
            .iter()
            .flat_map(|(v, m)| std::iter::repeat_n(*v, *m))
            .collect()
    }
}

/// Eigenvalues of y ∈ g_i clustered at `tol_rel`·max(1, ‖y‖₂).
pub fn spectrum(alg: &Algebra, y: &CMat, tol_rel: f64) -> Result<Spectrum> {
    check_level_member(alg, y)?;
    let tol = tol_rel * spectral_norm(y).max(1.0);
    let mut raw = eigenvalues(y);
    let mut ill = false;
    if alg.family() == Family::Orthogonal {
        ill |= pair_signs(&mut raw, tol);
    }
    let mut clusters: Vec<(C64, usize)> = Vec::new();
    raw.sort_by(|a, b| {
        (b.norm(), b.re, b.im).partial_cmp(&(a.norm(), a.re, a.im)).unwrap_or(std::cmp::Ordering::Equal)
    });
    for v in raw {
        match clusters.iter_mut().find(|(c, _)| (c - v).norm() <= tol) {
            Some((c, m)) => {
                *c = (*c * *m as f64 + v) / (*m + 1) as f64;
                *m += 1;
            }
            None => clusters.push((v, 1)),
        }
    }
    for (c, _) in clusters.iter_mut() {
        if c.norm() <= tol {
            *c = ZERO;
        }
    }
    for a in 0..clusters.len() {
        for b in a + 1..clusters.len() {
            if (clusters[a].0 - clusters[b].0).norm() < 1e3 * tol {
                ill = true;
            }
        }
    }
    let mut zero_suppressed = false;
    if alg.family() == Family::Orthogonal && alg.n() % 2 == 1 {
        if let Some(k) = clusters.iter().position(|(c, m)| *c == ZERO && *m == 1) {
            clusters.remove(k);
            zero_suppressed = true;
        }
    }
    Ok(Spectrum { eigenvalues: clusters, zero_suppressed, ill_conditioned: ill })
}

/// Greedily pairs λ with the nearest −μ and symmetrizes each pair. Returns true if a
/// pair was further apart than `tol`.
fn pair_signs(ev: &mut [C64], tol: f64) -> bool {
    let n = ev.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| ev[b].norm().partial_cmp(&ev[a].norm()).unwrap_or(std::cmp::Ordering::Equal));
    let mut used = vec![false; n];
    let mut bad = false;
    for &a in &order {
        if used[a] {
            continue;
        }
        let partner = order
            .iter()
            .copied()
            .filter(|&b| b != a && !used[b])
            .min_by(|&b, &c| {
                (ev[a] + ev[b]).norm().partial_cmp(&(ev[a] + ev[c]).norm()).unwrap_or(std::cmp::Ordering::Equal)
            });
        used[a] = true;
        if let Some(b) = partner {
            used[b] = true;
            if (ev[a] + ev[b]).norm() > tol {
                bad = true;
            }
            let v = (ev[a] - ev[b]) * 0.5;
            ev[a] = v;
            ev[b] = -v;
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, multiset_distance, projector_distance, range_basis, RankTol};
    use crate::sampling::{random_element, random_group_element, rng_from_seed};

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn so(n: usize) -> AlgebraContext {
        AlgebraContext::new(Family::Orthogonal, n).unwrap()
    }

    #[test]
    fn so2_pfaffian_convention() {
        let g = Algebra::new(Family::Orthogonal, 2).unwrap();
        let y = g.cartan_element(&[c(1.7)]).unwrap();
        assert_eq!(pfaffian(&g, &y).unwrap(), c(-1.7));
        assert_eq!(pfaffian(&g, &CMat::zeros(2, 2)).unwrap(), ZERO);
        let g3 = Algebra::new(Family::Orthogonal, 3).unwrap();
        assert_eq!(pfaffian(&g3, &CMat::zeros(3, 3)), Err(GzError::OddSize(3)));
    }

    #[test]
    fn pfaffian_squares_to_product_of_eigenvalues() {
        let g = Algebra::new(Family::Orthogonal, 6).unwrap();
        let mut rng = rng_from_seed(21);
        for _ in 0..100 {
            let y = random_element(&g, &mut rng, 1.0);
            let pf = pfaffian(&g, &y).unwrap();
            // eigenvalue oracle: product of all eigenvalues = (−1)^l Π λ_k²
            let prod: C64 = eigenvalues(&y).iter().product();
            let want = -prod; // l = 3
            assert!((pf * pf - want).norm() < 1e-9 * want.norm().max(1e-300));
        }
    }

    #[test]
    fn pfaffian_is_adjoint_invariant() {
        let ctx = so(6);
        let mut rng = rng_from_seed(8);
        for _ in 0..20 {
            let y = random_element(ctx.top(), &mut rng, 1.0);
            let k = random_group_element(&ctx, 6, &mut rng, 0.3).unwrap();
            let kinv = k.clone().try_inverse().unwrap();
            let z = &k * &y * kinv;
            let a = pfaffian(ctx.top(), &y).unwrap();
            let b = pfaffian(ctx.top(), &z).unwrap();
            assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
        }
    }

    #[test]
    fn kw_map_shapes_and_zero() {
        for n in 2..=8 {
            let ctx = so(n);
            let phi = kw_map(&ctx, &CMat::zeros(n, n)).unwrap();
            let want: usize = (2..=n).map(|i| i / 2).sum();
            assert_eq!(phi.len(), want);
            assert!(phi.values.iter().all(|v| *v == ZERO));
            assert_eq!(phi.index[0], (2, 1));
        }
        let gl = AlgebraContext::new(Family::GeneralLinear, 3).unwrap();
        let phi = kw_map(&gl, &CMat::identity(3, 3)).unwrap();
        assert_eq!(phi.index, vec![(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]);
        assert_eq!(phi.get(3, 3), Some(c(3.0)));
    }

    #[test]
    fn top_level_functions_are_adjoint_invariant() {
        let ctx = so(6);
        let mut rng = rng_from_seed(5);
        for _ in 0..50 {
            let x = random_element(ctx.top(), &mut rng, 0.7);
            let g = random_group_element(&ctx, 6, &mut rng, 0.3).unwrap();
            let y = &g * &x * g.clone().try_inverse().unwrap();
            for j in 1..=3 {
                let a = gz_value(&ctx, &x, 6, j).unwrap();
                let b = gz_value(&ctx, &y, 6, j).unwrap();
                assert!((a - b).norm() < 1e-9 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn homogeneity() {
        let ctx = so(7);
        let mut rng = rng_from_seed(6);
        let x = random_element(ctx.top(), &mut rng, 1.0);
        let x2 = &x * c(2.0);
        for s in slots(&ctx) {
            let a = gz_value(&ctx, &x, s.level, s.j).unwrap();
            let b = gz_value(&ctx, &x2, s.level, s.j).unwrap();
            let want = a * 2f64.powi(s.degree() as i32);
            assert!((b - want).norm() < 1e-10 * want.norm().max(1.0), "{s:?}");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let ctx = so(6);
        let mut rng = rng_from_seed(31);
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let x = random_element(ctx.top(), &mut rng, 0.6);
            for s in slots(&ctx) {
                let g = gz_gradient(&ctx, &x, s.level, s.j).unwrap();
                assert!(ctx.top().membership_residual(&g).unwrap() < 1e-12 * max_abs(&g).max(1.0));
                let exact = ctx.top().coords(&g);
                let fd = finite_difference_gradient(&ctx, &x, s.level, s.j, 1e-6).unwrap();
                let rel = (&exact - &fd).norm() / exact.norm().max(1e-12);
                worst = worst.max(rel);
            }
        }
        assert!(worst < 1e-6, "worst relative error {worst:e}");
    }

    #[test]
    fn gl_gradients_match_finite_differences() {
        let ctx = AlgebraContext::new(Family::GeneralLinear, 3).unwrap();
        let mut rng = rng_from_seed(32);
        let x = random_element(ctx.top(), &mut rng, 0.8);
        for s in slots(&ctx) {
            let exact = ctx.top().coords(&gz_gradient(&ctx, &x, s.level, s.j).unwrap());
            let fd = finite_difference_gradient(&ctx, &x, s.level, s.j, 1e-6).unwrap();
            assert!((&exact - &fd).norm() < 1e-6 * exact.norm().max(1.0));
        }
    }

    #[test]
    fn zero_has_vanishing_trace_gradients() {
        let ctx = so(5);
        let x = CMat::zeros(5, 5);
        for s in slots(&ctx) {
            let g = gz_gradient(&ctx, &x, s.level, s.j).unwrap();
            if matches!(s.kind, SlotKind::Trace(_)) {
                assert_eq!(g.norm(), 0.0);
            }
        }
        assert_eq!(kw_jacobian(&ctx, &x).unwrap().nrows(), ctx.gz_count());
    }

    #[test]
    fn top_gradients_span_the_cartan_at_regular_diagonal() {
        let ctx = so(5);
        let g = ctx.top();
        let x = g.cartan_element(&[c(1.3), c(0.4)]).unwrap();
        let j = partial_jacobian(&ctx, &x).unwrap();
        let top_rows = j.rows(2, 2).transpose();
        let (span, dec) = range_basis(&top_rows, RankTol::default());
        assert_eq!(dec.rank, 2);
        let h: Vec<CVec> = (0..2)
            .map(|k| {
                let mut e = vec![c(0.0); 2];
                e[k] = c(1.0);
                g.coords(&g.cartan_element(&e).unwrap())
            })
            .collect();
        let (hspan, _) = range_basis(&CMat::from_columns(&h), RankTol::default());
        assert!(projector_distance(&span, &hspan) < 1e-8);
    }

    #[test]
    fn jacobian_row_count() {
        for n in 3..=8 {
            let ctx = so(n);
            let r = ctx.rank();
            assert_eq!(ctx.gz_count(), (ctx.dim() - r) / 2 + r);
        }
    }

    #[test]
    fn spectrum_conventions() {
        let so3 = Algebra::new(Family::Orthogonal, 3).unwrap();
        let y = so3.cartan_element(&[c(2.0)]).unwrap();
        let s = spectrum(&so3, &y, 1e-8).unwrap();
        assert!(s.zero_suppressed);
        assert!(multiset_distance(&s.flatten(), &[c(2.0), c(-2.0)]) < 1e-12);

        let so4 = Algebra::new(Family::Orthogonal, 4).unwrap();
        let y = so4.cartan_element(&[c(2.0), c(0.5)]).unwrap();
        let s = spectrum(&so4, &y, 1e-8).unwrap();
        assert!(multiset_distance(&s.flatten(), &[c(2.0), c(0.5), c(-0.5), c(-2.0)]) < 1e-12);

        // regular nilpotent of so(5): sum of simple root vectors
        let so5 = Algebra::new(Family::Orthogonal, 5).unwrap();
        let e: CMat = so5.simple_roots().unwrap().iter().map(|r| so5.root_vector(*r).unwrap()).sum();
        let s = spectrum(&so5, &e, 1e-8).unwrap();
        assert_eq!(s.eigenvalues, vec![(ZERO, 5)]);
        assert!(!s.zero_suppressed);
    }

    #[test]
    fn invariant_spectrum_agrees_with_eigensolver() {
        let mut rng = rng_from_seed(17);
        for n in 2..=9 {
            let g = Algebra::new(Family::Orthogonal, n).unwrap();
            for _ in 0..10 {
                let y = random_element(&g, &mut rng, 1.0);
                let a = invariant_spectrum(&g, &y).unwrap();
                let b = spectrum(&g, &y, 1e-8).unwrap().flatten();
                assert!(multiset_distance(&a, &b) < 1e-6, "n = {n}");
            }
        }
    }

    #[test]
    fn zero_multiplicity_from_coefficients() {
        let g = Algebra::new(Family::Orthogonal, 6).unwrap();
        let y = g.cartan_element(&[c(1.0), c(0.0), c(0.0)]).unwrap();
        assert_eq!(zero_multiplicity(&g, &y, 1e-7).unwrap(), 4);
        let y = g.cartan_element(&[c(1.0), c(2.0), c(0.0)]).unwrap();
        assert_eq!(zero_multiplicity(&g, &y, 1e-7).unwrap(), 2);
        let g5 = Algebra::new(Family::Orthogonal, 5).unwrap();
        let y = g5.cartan_element(&[c(1.0), c(2.0)]).unwrap();
        assert_eq!(zero_multiplicity(&g5, &y, 1e-7).unwrap(), 1);
        assert_eq!(zero_multiplicity(&g5, &CMat::zeros(5, 5), 1e-7).unwrap(), 5);
    }
}
