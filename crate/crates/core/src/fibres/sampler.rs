use crate::algebra::AlgebraContext;
use crate::error::{GzError, Result};
use crate::linalg::{commutator, matrix_exp, CMat, CVec, RankTol, C64};
use crate::regularity::chain_centralizer;
use crate::sampling::{gaussian_vector, rng_from_seed, sub_seed};
use crate::strata::{in_g_theta, SpectralTol};

/// Ψ(s_2, …, s_{n−1}) = Ad(exp s_2)⋯Ad(exp s_{n−1})·x for s_i ∈ z_{g_i}(x_i).
#[derive(Clone, Debug)]
pub struct FibreSampler {
    base: CMat,
    /// (level, orthonormal centralizer basis in top coordinates)
    bases: Vec<(usize, CMat)>,
    seed: u64,
}

impl FibreSampler {
    /// Requires x ∈ g_Θ, which makes every x_i regular.
    pub fn new(ctx: &AlgebraContext, x: &CMat, seed: u64, rank: RankTol, spec: SpectralTol) -> Result<FibreSampler> {
        let report = in_g_theta(ctx, x, spec)?;
        if !report.in_g_theta {
            return Err(GzError::NotInGTheta(report.min_margin()));
        }
        let mut bases = Vec::new();
        for i in ctx.first_index()..ctx.n() {
            let z = chain_centralizer(ctx, x, i, rank)?;
            let r = ctx.level(i)?.algebra().rank();
            if z.dim() != r {
                return Err(GzError::Numerical(format!(
                    "centralizer at level {i} has dimension {} instead of {r}",
                    z.dim()
                )));
            }
            bases.push((i, z.basis().clone()));
        }
        Ok(FibreSampler { base: x.clone(), bases, seed })
    }

    pub fn base(&self) -> &CMat {
        &self.base
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Dimension of each centralizer, level by level.
    pub fn dims(&self) -> Vec<(usize, usize)> {
        self.bases.iter().map(|(i, b)| (*i, b.ncols())).collect()
    }

    /// Total dimension Σ r_i of the parameter space.
    pub fn parameter_dim(&self) -> usize {
        self.bases.iter().map(|(_, b)| b.ncols()).sum()
    }

    fn element(&self, ctx: &AlgebraContext, level: usize, s: &CVec) -> CMat {
        let (_, b) = &self.bases[level];
        ctx.top().from_coords(&(b * s))
    }

    /// The k-th seeded draw with parameter coordinates of standard deviation `scale`.
    pub fn draw(&self, ctx: &AlgebraContext, k: u64, scale: f64) -> Result<CMat> {
        let mut rng = rng_from_seed(sub_seed(self.seed, k));
        let s: Vec<CVec> = self.bases.iter().map(|(_, b)| gaussian_vector(&mut rng, b.ncols(), scale)).collect();
        sample_fibre_point(ctx, self, &s)
    }

    /// Differential of Ψ at 0: columns [S, x] for the centralizer basis elements S.
    pub fn differential(&self, ctx: &AlgebraContext) -> CMat {
        let mut cols = Vec::new();
        for (k, (_, b)) in self.bases.iter().enumerate() {
            for c in 0..b.ncols() {
                let mut e = CVec::zeros(b.ncols());
                e[c] = C64::new(1.0, 0.0);
                let s = self.element(ctx, k, &e);
                cols.push(ctx.top().coords(&commutator(&s, &self.base)));
            }
        }
        CMat::from_columns(&cols)
    }

    /// Central finite-difference version of [`FibreSampler::differential`].
    pub fn differential_fd(&self, ctx: &AlgebraContext, h: f64) -> Result<CMat> {
        let mut cols = Vec::new();
        for (k, (_, b)) in self.bases.iter().enumerate() {
            for c in 0..b.ncols() {
                let mut plus: Vec<CVec> = self.bases.iter().map(|(_, bb)| CVec::zeros(bb.ncols())).collect();
                let mut minus = plus.clone();
                plus[k][c] = C64::new(h, 0.0);
                minus[k][c] = C64::new(-h, 0.0);
                let d = (sample_fibre_point(ctx, self, &plus)? - sample_fibre_point(ctx, self, &minus)?)
                    / C64::new(2.0 * h, 0.0);
                cols.push(ctx.top().coords(&d));
            }
        }
        Ok(CMat::from_columns(&cols))
    }
}

pub fn sample_fibre_point(ctx: &AlgebraContext, sampler: &FibreSampler, s: &[CVec]) -> Result<CMat> {
    if s.len() != sampler.bases.len() {
        return Err(GzError::Invalid(format!(
            "expected {} parameter blocks, got {}",
            sampler.bases.len(),
            s.len()
        )));
    }
    let mut y = sampler.base.clone();
    for k in (0..s.len()).rev() {
        if s[k].len() != sampler.bases[k].1.ncols() {
            return Err(GzError::Invalid(format!("parameter block {k} has the wrong length")));
        }
        let a = sampler.element(ctx, k, &s[k]);
        let g = matrix_exp(&a);
        let ginv = matrix_exp(&(-a));
        y = &g * y * ginv;
    }
    let top = ctx.top();
    Ok(top.from_coords(&top.coords(&y)))
}
