//! The strata g(0) and g_Θ, and the component count of generic fibres.
//!
//! Level spectra are taken from the characteristic polynomial in μ = λ², built from the
//! GZ values. That polynomial has the type B singleton zero divided out already, and
//! the resulting spectra are exactly constant on fibres of Φ.

use crate::algebra::{AlgebraContext, Family};
use crate::error::{GzError, Result};
use crate::invariants::{invariant_spectrum, zero_multiplicity};
use crate::linalg::{spectral_norm, CMat, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralTol {
    /// Disjointness cutoff, relative to max(1, ‖x‖₂).
    pub rel: f64,
}

impl Default for SpectralTol {
    fn default() -> Self {
        SpectralTol { rel: 1e-7 }
    }
}

impl SpectralTol {
    pub fn absolute(&self, x: &CMat) -> f64 {
        self.rel * spectral_norm(x).max(1.0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LevelSpectrum {
    pub level: usize,
    /// σ(x_i) with multiplicity, type B convention applied.
    pub spectrum: Vec<C64>,
    /// Raw algebraic multiplicity of the eigenvalue 0 of x_i.
    pub zero_multiplicity: usize,
}

/// Disjointness of two consecutive spectra.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StratumVerdict {
    pub member: bool,
    pub margin: f64,
    /// Margin within a factor 10 of the cutoff.
    pub boundary: bool,
}

impl StratumVerdict {
    fn from_margin(margin: f64, tol: f64) -> StratumVerdict {
        StratumVerdict {
            member: margin > tol,
            margin,
            boundary: margin > tol / 10.0 && margin < tol * 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StratumReport {
    pub n: usize,
    pub levels: Vec<LevelSpectrum>,
    /// margins[k] compares levels first+k and first+k+1.
    pub margins: Vec<f64>,
    pub tol_spec: f64,
    pub in_g_zero: StratumVerdict,
    pub in_g_theta: bool,
    pub boundary: bool,
    /// Even levels 4 ≤ i ≤ n−1 with zero multiplicity at least 4.
    pub m_levels: Vec<usize>,
}

impl StratumReport {
    pub fn min_margin(&self) -> f64 {
        self.margins.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn set_distance(a: &[C64], b: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for x in a {
        for y in b {
            best = best.min((x - y).norm());
        }
    }
    best
}

fn level_spectra(ctx: &AlgebraContext, x: &CMat, tol: SpectralTol) -> Result<Vec<LevelSpectrum>> {
    if ctx.family() != Family::Orthogonal {
        return Err(GzError::NotOrthogonal);
    }
    ctx.check_member(x)?;
    ctx.levels()
        .iter()
        .map(|lvl| {
            let xi = ctx.project(x, lvl.index())?;
            Ok(LevelSpectrum {
                level: lvl.index(),
                spectrum: invariant_spectrum(lvl.algebra(), &xi)?,
                zero_multiplicity: zero_multiplicity(lvl.algebra(), &xi, tol.rel)?,
            })
        })
        .collect()
}

/// σ(x_k) ∩ σ(x) = ∅ with margin.
pub fn in_g_zero(ctx: &AlgebraContext, x: &CMat, tol: SpectralTol) -> Result<StratumVerdict> {
    let n = ctx.n();
    if n < 3 {
        return Err(GzError::SizeTooSmall(n, 3));
    }
    let spectra = level_spectra(ctx, x, tol)?;
    let k = spectra.len();
    let margin = set_distance(&spectra[k - 2].spectrum, &spectra[k - 1].spectrum);
    Ok(StratumVerdict::from_margin(margin, tol.absolute(x)))
}

pub fn in_g_theta(ctx: &AlgebraContext, x: &CMat, tol: SpectralTol) -> Result<StratumReport> {
    let n = ctx.n();
    if n < 3 {
        return Err(GzError::SizeTooSmall(n, 3));
    }
    let levels = level_spectra(ctx, x, tol)?;
    let t = tol.absolute(x);
    let margins: Vec<f64> =
        levels.windows(2).map(|w| set_distance(&w[0].spectrum, &w[1].spectrum)).collect();
    let k = margins.len();
    let in_g_zero = StratumVerdict::from_margin(margins[k - 1], t);
    let in_g_theta = margins.iter().all(|&m| m > t);
    let boundary = margins.iter().any(|&m| m > t / 10.0 && m < 10.0 * t);
    let m_levels = levels
        .iter()
        .filter(|l| l.level % 2 == 0 && l.level >= 4 && l.level < n && l.zero_multiplicity >= 4)
        .map(|l| l.level)
        .collect();
    Ok(StratumReport { n, levels, margins, tol_spec: t, in_g_zero, in_g_theta, boundary, m_levels })
}

/// Number of irreducible components 2^m of the fibre through x ∈ g_Θ.
pub fn count_components(ctx: &AlgebraContext, x: &CMat, tol: SpectralTol) -> Result<u64> {
    if ctx.n() <= 3 {
        return Err(GzError::SizeTooSmall(ctx.n(), 4));
    }
    let report = in_g_theta(ctx, x, tol)?;
    if !report.in_g_theta {
        return Err(GzError::NotInGTheta(report.min_margin()));
    }
    Ok(1u64 << report.m_levels.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_element, rng_from_seed};

    fn c(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn so(n: usize) -> AlgebraContext {
        AlgebraContext::new(Family::Orthogonal, n).unwrap()
    }

    #[test]
    fn so4_diagonal_against_eigenvalues() {
        let ctx = so(4);
        let x = ctx.top().cartan_element(&[c(2.0), c(1.0)]).unwrap();
        // x_3 = diag[2, 0, -2]: spectrum {2, -2}, shared with x
        let v = in_g_zero(&ctx, &x, SpectralTol::default()).unwrap();
        assert!(!v.member);
        assert!(v.margin < 1e-12);
        let y = ctx.top().cartan_element(&[c(1.0), c(2.0)]).unwrap();
        // x_3 = diag[1, 0, -1]: {1, -1} also meets σ(y)
        assert!(!in_g_zero(&ctx, &y, SpectralTol::default()).unwrap().member);
    }

    #[test]
    fn subalgebra_elements_are_outside_g_zero() {
        let mut rng = rng_from_seed(1);
        for n in 4..=7 {
            let ctx = so(n);
            let xk = random_element(ctx.level(n - 1).unwrap().algebra(), &mut rng, 1.0);
            let x = ctx.embed(n - 1, &xk).unwrap();
            assert!(!in_g_zero(&ctx, &x, SpectralTol::default()).unwrap().member, "n = {n}");
        }
    }

    #[test]
    fn zero_is_outside_g_theta() {
        for n in 4..=7 {
            let ctx = so(n);
            let r = in_g_theta(&ctx, &CMat::zeros(n, n), SpectralTol::default()).unwrap();
            assert!(!r.in_g_theta);
            assert!(count_components(&ctx, &CMat::zeros(n, n), SpectralTol::default()).is_err());
        }
    }

    #[test]
    fn generic_elements_lie_in_g_theta_with_one_component() {
        let mut rng = rng_from_seed(2);
        for n in 4..=8 {
            let ctx = so(n);
            let x = random_element(ctx.top(), &mut rng, 1.0);
            let r = in_g_theta(&ctx, &x, SpectralTol::default()).unwrap();
            assert!(r.in_g_theta);
            assert!(r.in_g_zero.member);
            assert_eq!(r.margins.len(), n - 2);
            assert_eq!(count_components(&ctx, &x, SpectralTol::default()).unwrap(), 1);
        }
    }
}
