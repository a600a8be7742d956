//! Dense complex linear algebra helpers shared by every module.

use nalgebra::{Complex, DMatrix, DVector};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Relative-plus-absolute cutoff for numerical ranks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankTol {
    pub rel: f64,
    pub abs: f64,
}

impl Default for RankTol {
    fn default() -> Self {
        RankTol { rel: 1e-9, abs: 1e-12 }
    }
}

/// Outcome of one rank cut, kept so callers can judge how close the decision was.
#[derive(Clone, Debug)]
pub struct RankDecision {
    pub rank: usize,
    pub singular_values: Vec<f64>,
    pub threshold: f64,
    /// Multiplicative distance of the nearest singular value to the threshold (1 = on it).
    pub margin: f64,
}

impl RankDecision {
    fn from_singular_values(mut sv: Vec<f64>, tol: RankTol) -> Self {
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
        let s1 = sv.first().copied().unwrap_or(0.0);
        let threshold = (tol.rel * s1).max(tol.abs);
        let rank = sv.iter().filter(|&&s| s > threshold).count();
        let mut margin = f64::INFINITY;
        if rank > 0 {
            margin = margin.min(sv[rank - 1] / threshold);
        }
        if rank < sv.len() && sv[rank] > 0.0 {
            margin = margin.min(threshold / sv[rank]);
        }
        RankDecision { rank, singular_values: sv, threshold, margin }
    }
}

pub fn to_complex(m: &DMatrix<f64>) -> CMat {
    m.map(|v| C64::new(v, 0.0))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &[C64]) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn spectral_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |a: f64, &b| a.max(b))
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// Frobenius inner product with the first argument conjugated.
pub fn inner(a: &CMat, b: &CMat) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn numerical_rank(m: &CMat, tol: RankTol) -> RankDecision {
    if m.is_empty() {
        return RankDecision::from_singular_values(Vec::new(), tol);
    }
    let sv = m.clone().svd(false, false).singular_values;
    RankDecision::from_singular_values(sv.iter().copied().collect(), tol)
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn null_space(m: &CMat, tol: RankTol) -> (CMat, RankDecision) {
    let cols = m.ncols();
    if cols == 0 {
        return (CMat::zeros(0, 0), RankDecision::from_singular_values(Vec::new(), tol));
    }
    // Pad to at least square so the SVD returns a full right factor.
    let work = if m.nrows() < cols {
        let mut p = CMat::zeros(cols, cols);
        p.view_mut((0, 0), (m.nrows(), cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let decision = RankDecision::from_singular_values(sv.clone(), tol);
    let mut kernel = Vec::new();
    for (k, &s) in sv.iter().enumerate() {
        if s <= decision.threshold {
            kernel.push(v_t.row(k).adjoint());
        }
    }
    let basis = if kernel.is_empty() {
        CMat::zeros(cols, 0)
    } else {
        CMat::from_columns(&kernel)
    };
    (basis, decision)
}

/// Orthonormal basis of the column span of `m`.
pub fn range_basis(m: &CMat, tol: RankTol) -> (CMat, RankDecision) {
    if m.ncols() == 0 {
        return (CMat::zeros(m.nrows(), 0), RankDecision::from_singular_values(Vec::new(), tol));
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let decision = RankDecision::from_singular_values(sv.clone(), tol);
    let keep: Vec<CVec> = sv
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > decision.threshold)
        .map(|(k, _)| u.column(k).into_owned())
        .collect();
    let basis = if keep.is_empty() {
        CMat::zeros(m.nrows(), 0)
    } else {
        CMat::from_columns(&keep)
    };
    (basis, decision)
}

/// Spectral-norm distance between the orthogonal projectors onto two column spans.
pub fn projector_distance(a: &CMat, b: &CMat) -> f64 {
    let pa = a * a.adjoint();
    let pb = b * b.adjoint();
    spectral_norm(&(pa - pb))
}

pub fn matrix_exp(m: &CMat) -> CMat {
    m.clone().exp()
}

/// Eigenvalues of a square complex matrix (no particular order).
pub fn eigenvalues(m: &CMat) -> Vec<C64> {
    let n = m.nrows();
    if n == 0 {
        return Vec::new();
    }
    if m.iter().all(|z| *z == ZERO) {
        return vec![ZERO; n];
    }
    if let Some(ev) = m.clone().try_schur(f64::EPSILON, 5000).and_then(|s| s.eigenvalues()) {
        return ev.iter().copied().collect();
    }
    // Unshifted structure (e.g. an exact shift matrix) can stall the QR sweep; a fixed
    // unitary change of basis breaks it.
    for k in 1..=3 {
        let v = CVec::from_iterator(n, (0..n).map(|j| C64::new(1.0 + (j * k) as f64, (j + k) as f64 * 0.5)));
        let p = CMat::identity(n, n) - (&v * v.adjoint()) * C64::new(2.0 / v.norm_squared(), 0.0);
        let t = &p * m * &p;
        if let Some(ev) = t.try_schur(f64::EPSILON, 5000).and_then(|s| s.eigenvalues()) {
            return ev.iter().copied().collect();
        }
    }
    panic!("complex Schur decomposition failed to converge")
}

/// Roots of the monic polynomial x^d + c[0] x^{d-1} + ... + c[d-1].
pub fn monic_roots(c: &[C64]) -> Vec<C64> {
    let d = c.len();
    if c.iter().all(|z| *z == ZERO) {
        return vec![ZERO; d];
    }
    let mut comp = CMat::zeros(d, d);
    for k in 0..d {
        comp[(0, k)] = -c[k];
    }
    for k in 1..d {
        comp[(k, k - 1)] = ONE;
    }
    eigenvalues(&comp)
}

/// Elementary symmetric polynomials e_1..e_d from power sums p_1..p_d (Newton identities).
pub fn elementary_from_power_sums(p: &[C64]) -> Vec<C64> {
    let d = p.len();
    let mut e = vec![ONE];
    for k in 1..=d {
        let mut acc = ZERO;
        for j in 1..=k {
            let term = e[k - j] * p[j - 1];
            if j % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        e.push(acc / k as f64);
    }
    e.remove(0);
    e
}

/// Greedy minimum-distance matching between two equal-size multisets; returns the worst pair gap.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = None;
        for (k, y) in b.iter().enumerate() {
            if used[k] {
                continue;
            }
            let d = (x - y).norm();
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((k, d));
            }
        }
        let (k, d) = best.expect("equal lengths");
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}
