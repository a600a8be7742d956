use crate::algebra::AlgebraContext;
use crate::error::{GzError, Result};
use crate::invariants::{derivative_matrix, kw_map, psi_all, slots};
use crate::linalg::{max_abs_vec, CMat, CVec, C64, ONE};
use crate::sampling::{gaussian_vector, rng_from_seed, sub_seed};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub restarts: usize,
    pub max_iter: usize,
    /// Success when ‖Φ(x) − c‖∞ < tol_rel·max(1, ‖c‖∞).
    pub tol_rel: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { restarts: 20, max_iter: 200, tol_rel: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub target: Vec<C64>,
    pub x: CMat,
    pub residual: f64,
    pub iterations: usize,
    /// Restarts used before the successful run (0 = first start).
    pub restarts: usize,
    pub success: bool,
}

/// Target c whose level-i block is ψ_i of the diagonal element with ε-values `spectra[i]`.
pub fn target_from_spectra(ctx: &AlgebraContext, spectra: &[Vec<C64>]) -> Result<Vec<C64>> {
    if spectra.len() != ctx.levels().len() {
        return Err(GzError::Invalid("one ε-vector per chain level expected".into()));
    }
    let mut c = Vec::with_capacity(ctx.gz_count());
    for (lvl, eps) in ctx.levels().iter().zip(spectra) {
        let h = lvl.algebra().cartan_element(eps)?;
        c.extend(psi_all(lvl.algebra(), &h));
    }
    Ok(c)
}

struct Problem<'a> {
    ctx: &'a AlgebraContext,
    target: &'a [C64],
    /// Affine chart ℓ(z) = 1, used for the homogeneous target c = 0.
    chart: Option<CVec>,
}

impl Problem<'_> {
    fn residual(&self, z: &CVec) -> Result<(CVec, f64)> {
        let x = self.ctx.top().from_coords(z);
        let phi = kw_map(self.ctx, &x)?;
        let m = self.target.len();
        let extra = usize::from(self.chart.is_some());
        let mut f = CVec::zeros(m + extra);
        for k in 0..m {
            f[k] = phi.values[k] - self.target[k];
        }
        let phi_res = max_abs_vec(f.as_slice());
        if let Some(l) = &self.chart {
            f[m] = l.dot(z) - ONE;
        }
        Ok((f, phi_res))
    }

    fn jacobian(&self, z: &CVec) -> Result<CMat> {
        let x = self.ctx.top().from_coords(z);
        let j = derivative_matrix(self.ctx, &x)?;
        Ok(match &self.chart {
            None => j,
            Some(l) => {
                let mut full = CMat::zeros(j.nrows() + 1, j.ncols());
                full.view_mut((0, 0), (j.nrows(), j.ncols())).copy_from(&j);
                full.set_row(j.nrows(), &l.transpose());
                full
            }
        })
    }
}

/// Natural length scale of a target: max |c_s|^{1/deg s}.
fn target_scale(ctx: &AlgebraContext, c: &[C64]) -> f64 {
    slots(ctx)
        .iter()
        .zip(c)
        .map(|(s, v)| v.norm().powf(1.0 / s.degree() as f64))
        .fold(0.0, f64::max)
}

/// Gauss-Newton with Armijo backtracking for Φ(x) = c, restarting from random points.
pub fn solve_fibre(ctx: &AlgebraContext, c: &[C64], seed: u64, opts: SolverOptions) -> Result<SolveReport> {
    if c.len() != ctx.gz_count() {
        return Err(GzError::TargetLength { expected: ctx.gz_count(), got: c.len() });
    }
    let tol = opts.tol_rel * max_abs_vec(c).max(1.0);
    let d = ctx.dim();
    let homogeneous = c.iter().all(|v| v.norm() == 0.0);
    let rho = target_scale(ctx, c);
    let width = if homogeneous || rho == 0.0 { 1.0 } else { rho } / (ctx.n() as f64).sqrt();
    let mut best = f64::INFINITY;
    for attempt in 0..=opts.restarts {
        let mut rng = rng_from_seed(sub_seed(seed, attempt as u64));
        let mut z = gaussian_vector(&mut rng, d, width);
        let chart = if homogeneous {
            let l = gaussian_vector(&mut rng, d, 1.0);
            // start on the chart
            let s = l.dot(&z);
            if s.norm() > 1e-8 {
                z /= s;
            }
            Some(l)
        } else {
            None
        };
        let prob = Problem { ctx, target: c, chart };
        let (report, res) = newton(&prob, z, tol, opts.max_iter)?;
        best = best.min(res);
        if let Some((x, iterations)) = report {
            return Ok(SolveReport {
                target: c.to_vec(),
                x,
                residual: res,
                iterations,
                restarts: attempt,
                success: true,
            });
        }
    }
    Err(GzError::NoConvergence { restarts: opts.restarts, best_residual: best })
}

type NewtonOutcome = (Option<(CMat, usize)>, f64);

fn newton(prob: &Problem<'_>, mut z: CVec, tol: f64, max_iter: usize) -> Result<NewtonOutcome> {
    let (mut f, mut res) = prob.residual(&z)?;
    let mut fnorm = f.norm();
    let mut polish = 0;
    for it in 0..max_iter {
        let done = res < tol && (polish >= 3 || fnorm == 0.0);
        if done {
            return Ok((Some((prob.ctx.top().from_coords(&z), it)), res));
        }
        let j = prob.jacobian(&z)?;
        let svd = j.svd(true, true);
        let smax = svd.singular_values.iter().fold(0.0f64, |a, &b| a.max(b));
        let step = svd
            .solve(&f, 1e-13 * smax.max(1e-300))
            .map_err(|e| GzError::Numerical(e.to_string()))?;
        let mut t = 1.0;
        let mut accepted = None;
        while t >= 1e-12 {
            let trial = &z - &step * C64::new(t, 0.0);
            let (ft, rt) = prob.residual(&trial)?;
            let nt = ft.norm();
            if nt.is_finite() && nt <= (1.0 - 1e-4 * t) * fnorm {
                accepted = Some((trial, ft, rt, nt));
                break;
            }
            t *= 0.5;
        }
        match accepted {
            Some((zt, ft, rt, nt)) => {
                z = zt;
                f = ft;
                res = rt;
                fnorm = nt;
                if res < tol {
                    polish += 1;
                }
            }
            None => {
                // stagnation: either already converged to rounding level or stuck
                if res < tol {
                    return Ok((Some((prob.ctx.top().from_coords(&z), it)), res));
                }
                return Ok((None, res));
            }
        }
    }
    if res < tol {
        return Ok((Some((prob.ctx.top().from_coords(&z), max_iter)), res));
    }
    Ok((None, res))
}
