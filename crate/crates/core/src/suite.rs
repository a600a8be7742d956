//! Seeded property sweeps, one per acceptance criterion, shared by the CLI and the
//! acceptance test target.
//!
//! Every sample draws from its own stream `sub_seed(stream, k)`, so results do not
//! depend on the thread count. Timings are never part of a report.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{AlgebraContext, Family};
use crate::error::{GzError, Result};
use crate::fibres::{gz_flow, hessenberg_section, is_unit_hessenberg, solve_fibre, target_from_spectra, FibreSampler, SolverOptions};
use crate::invariants::{kw_map, partial_kw, pfaffian, slots};
use crate::linalg::{eigenvalues, frobenius, max_abs, max_abs_vec, numerical_rank, CMat, RankTol, C64};
use crate::nilfibre::{
    nullcone_components, cartan_stability_residual, obstruction_witness, positive_anti_part, regular_nilpotent,
    sample_partial_nilfibre, standard_nilradicals, witness_residuals, NilradicalRep,
};
use crate::regularity::{centralizer, is_regular, nsreg, omega, sreg_chain, sreg_rank, Verdict};
use crate::sampling::{
    annulus_point, complex_gaussian, gaussian_vector, random_element, random_group_element, rng_from_seed,
    separated_spectra, sub_seed, GzRng,
};
use crate::strata::{count_components, in_g_theta, in_g_zero, SpectralTol};

/// One pass/fail check inside a criterion.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    pub samples: usize,
    pub failures: usize,
    /// Samples excluded because a rank or spectral decision fell in the margin band.
    pub in_band: usize,
    pub worst: Option<f64>,
    pub limit: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Check {
    fn count(label: impl Into<String>, samples: usize, failures: usize) -> Check {
        Check {
            label: label.into(),
            passed: failures == 0,
            samples,
            failures,
            in_band: 0,
            worst: None,
            limit: None,
            note: None,
        }
    }

    /// Passes when `worst < limit` (NaN fails).
    fn bound(label: impl Into<String>, samples: usize, worst: f64, limit: f64) -> Check {
        let ok = worst < limit;
        Check {
            label: label.into(),
            passed: ok,
            samples,
            failures: usize::from(!ok),
            in_band: 0,
            worst: worst.is_finite().then_some(worst),
            limit: Some(limit),
            note: None,
        }
    }

    fn banded(mut self, in_band: usize) -> Check {
        self.in_band = in_band;
        self
    }

    fn noted(mut self, note: Option<String>) -> Check {
        self.note = note;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionReport {
    fn new(c: Criterion, checks: Vec<Check>) -> CriterionReport {
        CriterionReport { id: c.id(), name: c.name().to_string(), passed: checks.iter().all(|k| k.passed), checks }
    }

    /// One line: id, name, verdict and the failing checks if any.
    pub fn summary_line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let samples: usize = self.checks.iter().map(|c| c.samples).sum();
        let mut line = format!("criterion {:>2} {:<22} {verdict} ({} checks, {samples} samples)", self.id, self.name, self.checks.len());
        for c in self.checks.iter().filter(|c| !c.passed) {
            line.push_str(&format!("; failed: {} [{} / {}]", c.label, c.failures, c.samples));
            if let (Some(w), Some(l)) = (c.worst, c.limit) {
                line.push_str(&format!(" worst {w:.3e} limit {l:.1e}"));
            }
        }
        line
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

impl SuiteReport {
    pub fn new(seed: u64, criteria: Vec<CriterionReport>) -> SuiteReport {
        SuiteReport { seed, passed: criteria.iter().all(|c| c.passed), criteria }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    SregEquivalence,
    OmegaEquivalence,
    StrataInclusion,
    Surjectivity,
    FibreParametrization,
    Flows,
    ComponentCount,
    Nilfibre,
    Nullcone,
    Hessenberg,
    Identities,
}

impl Criterion {
    pub const ALL: [Criterion; 11] = [
        Criterion::SregEquivalence,
        Criterion::OmegaEquivalence,
        Criterion::StrataInclusion,
        Criterion::Surjectivity,
        Criterion::FibreParametrization,
        Criterion::Flows,
        Criterion::ComponentCount,
        Criterion::Nilfibre,
        Criterion::Nullcone,
        Criterion::Hessenberg,
        Criterion::Identities,
    ];

    pub fn id(self) -> u8 {
        Criterion::ALL.iter().position(|&c| c == self).expect("listed") as u8 + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Criterion::SregEquivalence => "sreg-equivalence",
            Criterion::OmegaEquivalence => "omega-equivalence",
            Criterion::StrataInclusion => "strata-inclusion",
            Criterion::Surjectivity => "surjectivity",
            Criterion::FibreParametrization => "fibre-parametrization",
            Criterion::Flows => "flows",
            Criterion::ComponentCount => "component-count",
            Criterion::Nilfibre => "nilfibre",
            Criterion::Nullcone => "nullcone",
            Criterion::Hessenberg => "hessenberg",
            Criterion::Identities => "identities",
        }
    }

    pub fn from_name(s: &str) -> Option<Criterion> {
        Criterion::ALL.iter().copied().find(|c| c.name() == s || c.id().to_string() == s)
    }

    /// Sizes swept by default.
    pub fn default_sizes(self) -> Vec<usize> {
        match self {
            Criterion::SregEquivalence
            | Criterion::OmegaEquivalence
            | Criterion::StrataInclusion
            | Criterion::FibreParametrization
            | Criterion::Flows
            | Criterion::Nilfibre => (4..=7).collect(),
            Criterion::Surjectivity => vec![4, 5, 6],
            Criterion::ComponentCount | Criterion::Nullcone => vec![5, 6, 7],
            Criterion::Hessenberg => (2..=5).collect(),
            Criterion::Identities => (3..=12).collect(),
        }
    }

    /// Sizes for which the criterion is meaningful.
    fn admits(self, n: usize) -> bool {
        match self {
            Criterion::ComponentCount | Criterion::Nullcone => (5..=9).contains(&n),
            Criterion::Hessenberg => (2..=5).contains(&n),
            Criterion::Identities => (3..=12).contains(&n),
            _ => (4..=9).contains(&n),
        }
    }

    /// Samples per size by default.
    pub fn default_samples(self) -> usize {
        match self {
            Criterion::SregEquivalence | Criterion::OmegaEquivalence => 500,
            Criterion::StrataInclusion => 300,
            Criterion::Surjectivity | Criterion::Hessenberg | Criterion::Identities => 100,
            Criterion::FibreParametrization | Criterion::Nilfibre => 200,
            Criterion::Flows => 3,
            Criterion::ComponentCount => 3,
            Criterion::Nullcone => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Replaces every criterion's default sizes (inadmissible sizes are dropped).
    pub sizes: Option<Vec<usize>>,
    /// Replaces the per-size sample count.
    pub samples: Option<usize>,
    pub rank: RankTol,
    pub spec: SpectralTol,
    pub solver: SolverOptions,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 1,
            sizes: None,
            samples: None,
            rank: RankTol::default(),
            spec: SpectralTol::default(),
            solver: SolverOptions::default(),
        }
    }
}

impl SuiteConfig {
    fn sizes(&self, c: Criterion) -> Vec<usize> {
        match &self.sizes {
            Some(s) => s.iter().copied().filter(|&n| c.admits(n)).collect(),
            None => c.default_sizes(),
        }
    }

    fn samples(&self, c: Criterion) -> usize {
        self.samples.unwrap_or_else(|| c.default_samples())
    }

    fn stream(&self, c: Criterion, n: usize) -> u64 {
        sub_seed(sub_seed(self.seed, c.id() as u64), n as u64)
    }
}

pub fn run(c: Criterion, cfg: &SuiteConfig) -> CriterionReport {
    let checks = match c {
        Criterion::SregEquivalence => sreg_equivalence(cfg),
        Criterion::OmegaEquivalence => omega_equivalence(cfg),
        Criterion::StrataInclusion => strata_inclusion(cfg),
        Criterion::Surjectivity => surjectivity(cfg),
        Criterion::FibreParametrization => fibre_parametrization(cfg),
        Criterion::Flows => flows(cfg),
        Criterion::ComponentCount => component_count(cfg),
        Criterion::Nilfibre => nilfibre(cfg),
        Criterion::Nullcone => nullcone(cfg),
        Criterion::Hessenberg => hessenberg(cfg),
        Criterion::Identities => identities(cfg),
    };
    let checks = checks.unwrap_or_else(|e| vec![Check::count("setup", 1, 1).noted(Some(e.to_string()))]);
    CriterionReport::new(c, checks)
}

pub fn run_all(criteria: &[Criterion], cfg: &SuiteConfig) -> SuiteReport {
    SuiteReport::new(cfg.seed, criteria.iter().map(|&c| run(c, cfg)).collect())
}

fn so(n: usize) -> Result<AlgebraContext> {
    AlgebraContext::new(Family::Orthogonal, n)
}

/// First error message among failed samples.
fn first_error<T>(results: &[Result<T>]) -> Option<String> {
    results.iter().find_map(|r| r.as_ref().err().map(|e| e.to_string()))
}

fn round_to_algebra(ctx: &AlgebraContext, x: &CMat) -> CMat {
    let top = ctx.top();
    top.from_coords(&top.coords(x))
}

fn conjugate(g: &CMat, x: &CMat) -> Result<CMat> {
    let ginv = g.clone().try_inverse().ok_or_else(|| GzError::Numerical("singular group element".into()))?;
    Ok(g * x * ginv)
}

/// Names of the sample families drawn by [`MixedSampler`], in rotation order.
pub const SAMPLE_FAMILIES: [&str; 8] = [
    "generic",
    "diagonal",
    "nilradical",
    "partial-nilfibre",
    "compact",
    "sparse-integer",
    "scaled",
    "conjugated-nilpotent",
];

/// Rotating mix of generic and structured elements of so(n).
pub struct MixedSampler {
    ctx: AlgebraContext,
    reps: Vec<NilradicalRep>,
    nilpotent: CMat,
}

impl MixedSampler {
    pub fn new(ctx: AlgebraContext) -> Result<MixedSampler> {
        let reps = standard_nilradicals(&ctx)?;
        let nilpotent = regular_nilpotent(&ctx)?;
        Ok(MixedSampler { ctx, reps, nilpotent })
    }

    pub fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    /// The k-th sample and its family index.
    pub fn draw(&self, stream: u64, k: u64) -> Result<(usize, CMat)> {
        let ctx = &self.ctx;
        let top = ctx.top();
        let seed = sub_seed(stream, k);
        let mut rng = rng_from_seed(seed);
        let family = (k % SAMPLE_FAMILIES.len() as u64) as usize;
        let x = match family {
            0 => random_element(top, &mut rng, 1.0),
            1 => {
                let eps: Vec<C64> = (0..top.rank()).map(|_| complex_gaussian(&mut rng)).collect();
                top.cartan_element(&eps)?
            }
            2 => {
                let rep = &self.reps[rng.random_range(0..self.reps.len())];
                rep.random_element(top, &mut rng, 1.0)
            }
            3 => sample_partial_nilfibre(ctx, seed)?,
            4 => {
                let k = ctx.level(ctx.n() - 1)?.algebra();
                ctx.embed(ctx.n() - 1, &random_element(k, &mut rng, 1.0))?
            }
            5 => {
                let c = (0..top.dim()).map(|_| {
                    if rng.random_bool(0.3) {
                        C64::new(rng.random_range(-2i32..=2) as f64, 0.0)
                    } else {
                        C64::new(0.0, 0.0)
                    }
                });
                top.from_coords(&nalgebra::DVector::from_iterator(top.dim(), c))
            }
            6 => {
                let s = if rng.random_bool(0.5) { 1e-3 } else { 1e3 };
                random_element(top, &mut rng, s)
            }
            _ => {
                let g = random_group_element(ctx, ctx.n(), &mut rng, 0.5)?;
                round_to_algebra(ctx, &conjugate(&g, &self.nilpotent)?)
            }
        };
        Ok((family, x))
    }
}

/// Compares two verdicts per sample; disagreements count only outside the margin band.
fn equivalence_checks(
    label: &str,
    samples: usize,
    verdicts: &[Result<(Verdict, Verdict)>],
) -> Vec<Check> {
    let mut band = 0;
    let mut disagree = 0;
    let mut holds = 0;
    let mut errors = 0;
    for v in verdicts {
        match v {
            Ok((a, b)) => {
                if a.in_band() || b.in_band() {
                    band += 1;
                } else if a.holds != b.holds {
                    disagree += 1;
                } else if a.holds {
                    holds += 1;
                }
            }
            Err(_) => errors += 1,
        }
    }
    let band_limit = samples / 100;
    vec![
        Check::count(format!("{label}: disagreements outside band"), samples, disagree + errors)
            .banded(band)
            .noted(first_error(verdicts)),
        Check {
            passed: band <= band_limit,
            failures: band.saturating_sub(band_limit),
            limit: Some(band_limit as f64),
            worst: Some(band as f64),
            ..Check::count(format!("{label}: samples in band (at most 1%)"), samples, 0)
        },
        Check {
            note: Some(format!("{holds} agreeing positive verdicts")),
            ..Check::count(format!("{label}: both verdicts occur"), samples, usize::from(holds == 0 || holds + band + disagree == samples))
        },
    ]
}

fn sreg_equivalence(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::SregEquivalence;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let sampler = MixedSampler::new(so(n)?)?;
        let stream = cfg.stream(c, n);
        let count = cfg.samples(c);
        let verdicts: Vec<Result<(Verdict, Verdict)>> = (0..count as u64)
            .into_par_iter()
            .map(|k| {
                let (_, x) = sampler.draw(stream, k)?;
                let ctx = sampler.context();
                Ok((sreg_rank(ctx, &x, cfg.rank)?, sreg_chain(ctx, &x, cfg.rank)?))
            })
            .collect();
        out.extend(equivalence_checks(&format!("so({n})"), count, &verdicts));
    }
    Ok(out)
}

fn omega_equivalence(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::OmegaEquivalence;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let sampler = MixedSampler::new(so(n)?)?;
        let stream = cfg.stream(c, n);
        let count = cfg.samples(c);
        let verdicts: Vec<Result<(Verdict, Verdict)>> = (0..count as u64)
            .into_par_iter()
            .map(|k| {
                let (_, x) = sampler.draw(stream, k)?;
                let ctx = sampler.context();
                Ok((nsreg(ctx, &x, cfg.rank)?, omega(ctx, &x, cfg.rank)?))
            })
            .collect();
        out.extend(equivalence_checks(&format!("so({n})"), count, &verdicts));
    }
    Ok(out)
}

/// An element of g_Θ with the given levels regular nilpotent, found by the solver.
pub fn g_theta_witness(ctx: &AlgebraContext, nilpotent: &[usize], seed: u64, opts: SolverOptions) -> Result<CMat> {
    let mut rng = rng_from_seed(seed);
    let spectra = separated_spectra(ctx, nilpotent, 0.1, &mut rng)?;
    let c = target_from_spectra(ctx, &spectra)?;
    Ok(solve_fibre(ctx, &c, sub_seed(seed, 1), opts)?.x)
}

/// An element of g(0) whose projection to k is nilpotent, found by the solver.
pub fn g_zero_witness(ctx: &AlgebraContext, seed: u64, opts: SolverOptions) -> Result<CMat> {
    let mut rng = rng_from_seed(seed);
    let n = ctx.n();
    let spectra: Vec<Vec<C64>> = ctx
        .levels()
        .iter()
        .map(|lvl| {
            let r = lvl.algebra().rank();
            if lvl.index() == n - 1 {
                vec![C64::new(0.0, 0.0); r]
            } else {
                (0..r).map(|_| annulus_point(&mut rng, 0.5, 1.5)).collect()
            }
        })
        .collect();
    let c = target_from_spectra(ctx, &spectra)?;
    Ok(solve_fibre(ctx, &c, sub_seed(seed, 1), opts)?.x)
}

fn random_nilpotent_levels(n: usize, rng: &mut GzRng) -> Vec<usize> {
    (4..n).filter(|i| i % 2 == 0).filter(|_| rng.random_bool(0.5)).collect()
}

/// Outcome of one constructed stratum member: None when construction missed the stratum.
type MemberOutcome = Option<Verdict>;

fn strata_inclusion(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::StrataInclusion;
    let sizes = cfg.sizes(c);
    if sizes.is_empty() {
        return Ok(Vec::new());
    }
    let want = cfg.samples(c);
    let ctxs: Vec<AlgebraContext> = sizes.iter().map(|&n| so(n)).collect::<Result<_>>()?;
    let stream = cfg.stream(c, 0);
    let mut out = Vec::new();
    for (label, theta) in [("g(0) in nsreg", false), ("g_Theta in sreg", true)] {
        let stream = sub_seed(stream, u64::from(theta));
        // over-generate so that construction misses can be replaced
        let attempts = 2 * want;
        let outcomes: Vec<Result<MemberOutcome>> = (0..attempts as u64)
            .into_par_iter()
            .map(|k| {
                let ctx = &ctxs[k as usize % ctxs.len()];
                let seed = sub_seed(stream, k);
                let mut rng = rng_from_seed(seed);
                let x = if k % 2 == 0 {
                    random_element(ctx.top(), &mut rng, 1.0)
                } else if theta {
                    let levels = random_nilpotent_levels(ctx.n(), &mut rng);
                    g_theta_witness(ctx, &levels, seed, cfg.solver)?
                } else {
                    g_zero_witness(ctx, seed, cfg.solver)?
                };
                if theta {
                    let rep = in_g_theta(ctx, &x, cfg.spec)?;
                    if !rep.in_g_theta || rep.boundary {
                        return Ok(None);
                    }
                    Ok(Some(sreg_rank(ctx, &x, cfg.rank)?))
                } else {
                    let v = in_g_zero(ctx, &x, cfg.spec)?;
                    if !v.member || v.boundary {
                        return Ok(None);
                    }
                    Ok(Some(nsreg(ctx, &x, cfg.rank)?))
                }
            })
            .collect();
        let members: Vec<&Verdict> =
            outcomes.iter().filter_map(|o| o.as_ref().ok().and_then(|v| v.as_ref())).take(want).collect();
        let errors = outcomes.iter().filter(|o| o.is_err()).count();
        let band = members.iter().filter(|v| v.in_band()).count();
        let fails = members.iter().filter(|v| !v.in_band() && !v.holds).count();
        out.push(Check::count(format!("{label}: members constructed"), want, want - members.len()).noted(first_error(&outcomes)));
        out.push(Check::count(format!("{label}: implication"), members.len(), fails).banded(band));
        out.push(Check {
            note: Some(format!("{errors} solver or construction errors out of {attempts} attempts")),
            ..Check::count(format!("{label}: construction errors (informational)"), attempts, 0)
        });
    }
    Ok(out)
}

fn surjectivity(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::Surjectivity;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let ctx = so(n)?;
        let stream = cfg.stream(c, n);
        let count = cfg.samples(c);
        let targets: Vec<Vec<C64>> = (0..count as u64)
            .map(|k| gaussian_vector(&mut rng_from_seed(sub_seed(stream, k)), ctx.gz_count(), 1.0).as_slice().to_vec())
            .collect();
        let solve = |k: usize, opts: SolverOptions| -> bool {
            solve_fibre(&ctx, &targets[k], sub_seed(stream, count as u64 + k as u64), opts)
                .map(|r| r.success && r.residual < opts.tol_rel * max_abs_vec(&targets[k]).max(1.0))
                .unwrap_or(false)
        };
        let first: Vec<bool> = (0..count).into_par_iter().map(|k| solve(k, cfg.solver)).collect();
        let failed: Vec<usize> = (0..count).filter(|&k| !first[k]).collect();
        let big = SolverOptions { restarts: 5 * cfg.solver.restarts, ..cfg.solver };
        let unresolved = failed.par_iter().filter(|&&k| !solve(k, big)).count();
        let limit = count / 100;
        out.push(Check {
            passed: failed.len() <= limit,
            worst: Some(failed.len() as f64),
            limit: Some(limit as f64),
            ..Check::count(format!("so({n}): first-pass failures (at most 1%)"), count, failed.len())
        });
        out.push(Check::count(format!("so({n}): unresolved after 5x restarts"), failed.len(), unresolved));
    }
    Ok(out)
}

fn generic_theta_point(ctx: &AlgebraContext, seed: u64, spec: SpectralTol, scale: f64) -> Result<CMat> {
    for attempt in 0..100 {
        let mut rng = rng_from_seed(sub_seed(seed, attempt));
        let x = random_element(ctx.top(), &mut rng, scale);
        let rep = in_g_theta(ctx, &x, spec)?;
        if rep.in_g_theta && !rep.boundary {
            return Ok(x);
        }
    }
    Err(GzError::Numerical("no generic g_Theta point found".into()))
}

fn fibre_parametrization(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const BASES: u64 = 4;
    let c = Criterion::FibreParametrization;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let ctx = so(n)?;
        let stream = cfg.stream(c, n);
        let count = cfg.samples(c) as u64;
        let expected: usize = (2..n).map(|i| ctx.level(i).map(|l| l.algebra().rank()).unwrap_or(0)).sum();
        let mut rank_fail = 0;
        let mut fd_worst: f64 = 0.0;
        let mut samplers = Vec::new();
        for b in 0..BASES {
            let x = generic_theta_point(&ctx, sub_seed(stream, b), cfg.spec, 1.0)?;
            let smp = FibreSampler::new(&ctx, &x, sub_seed(stream, 100 + b), cfg.rank, cfg.spec)?;
            let d = smp.differential(&ctx);
            if smp.parameter_dim() != expected || numerical_rank(&d, cfg.rank).rank != expected {
                rank_fail += 1;
            }
            fd_worst = fd_worst.max(max_abs(&(smp.differential_fd(&ctx, 1e-6)? - d)));
            samplers.push((smp, kw_map(&ctx, &x)?));
        }
        let draws: Vec<Result<(f64, Verdict)>> = (0..count)
            .into_par_iter()
            .map(|k| {
                let (smp, phi) = &samplers[(k % BASES) as usize];
                let y = smp.draw(&ctx, k / BASES, 0.5)?;
                let d = kw_map(&ctx, &y)?.max_abs_diff(phi) / phi.max_abs().max(1.0);
                Ok((d, sreg_rank(&ctx, &y, cfg.rank)?))
            })
            .collect();
        let ok: Vec<&(f64, Verdict)> = draws.iter().filter_map(|r| r.as_ref().ok()).collect();
        let errors = draws.len() - ok.len();
        let worst = ok.iter().map(|(d, _)| *d).fold(0.0, f64::max);
        let band = ok.iter().filter(|(_, v)| v.in_band()).count();
        let not_sreg = ok.iter().filter(|(_, v)| !v.in_band() && !v.holds).count();
        let worst = if errors > 0 { f64::NAN } else { worst };
        out.push(Check::bound(format!("so({n}): relative drift of Phi"), count as usize, worst, 1e-8).noted(first_error(&draws)));
        out.push(Check::count(format!("so({n}): rank of dPsi(0) = {expected}"), BASES as usize, rank_fail));
        out.push(Check::bound(format!("so({n}): dPsi(0) against finite differences"), BASES as usize, fd_worst, 1e-6));
        out.push(Check::count(format!("so({n}): draws strongly regular"), ok.len(), not_sreg).banded(band));
    }
    Ok(out)
}

/// Frobenius norm of flow base points.
pub const FLOW_NORM: f64 = 0.4;

fn flows(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    const TIMES: [f64; 3] = [0.1, 1.0, 10.0];
    let c = Criterion::Flows;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let ctx = so(n)?;
        let stream = cfg.stream(c, n);
        let slot_list = slots(&ctx);
        // Flows of a degree-d function at s·x equal s times the flow at x run for time
        // s^{d−1}·t, so a fixed small norm keeps exp(t∇f) well conditioned up to t = 10.
        let bases: Vec<CMat> = (0..cfg.samples(c) as u64)
            .map(|b| {
                let x = random_element(ctx.top(), &mut rng_from_seed(sub_seed(stream, b)), 1.0);
                &x * C64::new(FLOW_NORM / frobenius(&x), 0.0)
            })
            .collect();
        type Row = (f64, f64, f64);
        let rows: Vec<Result<Row>> = bases
            .par_iter()
            .map(|x| {
                let phi = kw_map(&ctx, x)?;
                let mut drift: f64 = 0.0;
                let mut fixed: f64 = 0.0;
                for s in &slot_list {
                    for t in TIMES {
                        let y = gz_flow(&ctx, x, (s.level, s.j), t)?;
                        drift = drift.max(kw_map(&ctx, &y)?.max_abs_diff(&phi));
                        if s.level == n {
                            fixed = fixed.max(max_abs(&(&y - x)));
                        }
                    }
                }
                let mut swap: f64 = 0.0;
                for (a, sa) in slot_list.iter().enumerate() {
                    for sb in &slot_list[a + 1..] {
                        let (ia, ib) = ((sa.level, sa.j), (sb.level, sb.j));
                        let ab = gz_flow(&ctx, &gz_flow(&ctx, x, ia, 1.0)?, ib, 1.0)?;
                        let ba = gz_flow(&ctx, &gz_flow(&ctx, x, ib, 1.0)?, ia, 1.0)?;
                        swap = swap.max(max_abs(&(ab - ba)));
                    }
                }
                Ok((drift, swap, fixed))
            })
            .collect();
        let worst = |f: fn(&Row) -> f64| {
            rows.iter().map(|r| r.as_ref().map(f).unwrap_or(f64::NAN)).fold(0.0, |a: f64, b| if b.is_nan() { b } else { a.max(b) })
        };
        let m = bases.len();
        out.push(Check::bound(format!("so({n}): conservation for t in 0.1, 1, 10"), m, worst(|r| r.0), 1e-8).noted(first_error(&rows)));
        out.push(Check::bound(format!("so({n}): order swap at t = 1"), m, worst(|r| r.1), 1e-7));
        out.push(Check::bound(format!("so({n}): top-level flows fix x"), m, worst(|r| r.2), 1e-10));
    }
    Ok(out)
}

fn subsets(levels: &[usize]) -> Vec<Vec<usize>> {
    (0..1usize << levels.len())
        .map(|mask| levels.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &l)| l).collect())
        .collect()
}

fn component_count(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::ComponentCount;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let ctx = so(n)?;
        let stream = cfg.stream(c, n);
        let r = ctx.level(n - 1)?.algebra().rank();
        let even: Vec<usize> = (4..n).filter(|i| i % 2 == 0).collect();
        let jobs: Vec<(Vec<usize>, u64)> = subsets(&even)
            .into_iter()
            .flat_map(|s| (0..cfg.samples(c) as u64).map(move |k| (s.clone(), k)))
            .collect();
        let results: Vec<Result<(usize, u64)>> = jobs
            .par_iter()
            .enumerate()
            .map(|(idx, (levels, _))| {
                let x = g_theta_witness(&ctx, levels, sub_seed(stream, idx as u64), cfg.solver)?;
                Ok((levels.len(), count_components(&ctx, &x, cfg.spec)?))
            })
            .collect();
        let wrong = results.iter().filter(|res| !matches!(res, Ok((m, got)) if *got == 1u64 << m)).count();
        let mut over_bound = results.iter().filter(|res| matches!(res, Ok((_, got)) if *got > 1u64 << (r - 1))).count();
        // the bound also holds on generic members
        for k in 0..20 {
            let x = generic_theta_point(&ctx, sub_seed(stream, 1000 + k), cfg.spec, 1.0)?;
            if count_components(&ctx, &x, cfg.spec)? > 1u64 << (r - 1) {
                over_bound += 1;
            }
        }
        let covered: Vec<usize> = results.iter().filter_map(|r| r.as_ref().ok()).map(|(m, _)| *m).collect();
        let missing = (0..r).filter(|m| !covered.contains(m)).count();
        out.push(Check::count(format!("so({n}): witnesses return 2^m"), jobs.len(), wrong).noted(first_error(&results)));
        out.push(Check::count(format!("so({n}): every m in 0..={} witnessed", r - 1), r, missing));
        out.push(Check::count(format!("so({n}): m <= r_(n-1) - 1"), jobs.len() + 20, over_bound));
    }
    Ok(out)
}

fn nilfibre(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::Nilfibre;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let ctx = so(n)?;
        let stream = cfg.stream(c, n);
        let count = cfg.samples(c);

        // dual regularity of the constructed regular nilpotent
        let e = regular_nilpotent(&ctx)?;
        let k = ctx.level(n - 1)?.algebra();
        let ek = ctx.project(&e, n - 1)?;
        let dual = is_regular(ctx.top(), &e, cfg.rank)
            && is_regular(k, &ek, cfg.rank)
            && centralizer(ctx.top(), &e, cfg.rank).dim() == ctx.rank()
            && centralizer(k, &ek, cfg.rank).dim() == k.rank();
        out.push(Check::bound(format!("so({n}): partial KW of the regular nilpotent"), 1, partial_kw(&ctx, &e)?.max_abs(), 1e-14));
        out.push(Check::count(format!("so({n}): e and e_k regular"), 1, usize::from(!dual)));

        let samples: Vec<Result<(f64, Verdict)>> = (0..count as u64)
            .into_par_iter()
            .map(|j| {
                let x = sample_partial_nilfibre(&ctx, sub_seed(stream, j))?;
                Ok((partial_kw(&ctx, &x)?.max_abs(), nsreg(&ctx, &x, cfg.rank)?))
            })
            .collect();
        let ok: Vec<&(f64, Verdict)> = samples.iter().filter_map(|r| r.as_ref().ok()).collect();
        let nsreg_found = ok.iter().filter(|(_, v)| v.holds).count() + (samples.len() - ok.len());
        let worst = ok.iter().map(|(d, _)| *d).fold(0.0, f64::max);
        out.push(Check::bound(format!("so({n}): partial KW on nilfibre samples"), count, worst, 1e-9).noted(first_error(&samples)));
        out.push(Check::count(format!("so({n}): nilfibre samples not nsreg"), count, nsreg_found));

        let reps = standard_nilradicals(&ctx)?;
        let mut wres: f64 = 0.0;
        for rep in &reps {
            let y = obstruction_witness(&ctx, rep)?;
            let (a, b, t) = witness_residuals(&ctx, rep, &y)?;
            wres = wres.max(a).max(b).max(t);
            if max_abs(&y) == 0.0 {
                wres = f64::INFINITY;
            }
        }
        out.push(Check::bound(format!("so({n}): obstruction witness centralizes n and n∩k"), reps.len(), wres, 1e-12));

        // every chain projection of an element of n_± is nilpotent, so these lie in Φ^{-1}(0)
        let full: Vec<Result<(f64, Verdict)>> = (0..count as u64)
            .into_par_iter()
            .map(|j| {
                let mut rng = rng_from_seed(sub_seed(stream, 10_000 + j));
                let rep = &reps[j as usize % reps.len()];
                let x = rep.random_element(ctx.top(), &mut rng, 1.0);
                Ok((kw_map(&ctx, &x)?.max_abs(), sreg_rank(&ctx, &x, cfg.rank)?))
            })
            .collect();
        let ok: Vec<&(f64, Verdict)> = full.iter().filter_map(|r| r.as_ref().ok()).collect();
        let sreg_found = ok.iter().filter(|(_, v)| v.holds).count() + (full.len() - ok.len());
        let worst = ok.iter().map(|(d, _)| *d).fold(0.0, f64::max);
        out.push(Check::bound(format!("so({n}): Phi on n_± samples"), count, worst, 1e-12));
        out.push(Check::count(format!("so({n}): full nilfibre samples not sreg"), count, sreg_found));

        // degeneration of λx + y for x ∈ (h∩k)_reg
        let l = ctx.rank();
        let r_k = k.rank();
        let eps: Vec<C64> = (0..l).map(|j| C64::new(if j < r_k { (j + 1) as f64 } else { 0.0 }, 0.0)).collect();
        let x = ctx.top().cartan_element(&eps)?;
        let mut rng = rng_from_seed(sub_seed(stream, 20_000));
        let y = reps[0].random_element(ctx.top(), &mut rng, 1.0);
        let prof = crate::nilfibre::degeneration_profile(&ctx, &x, &y, &[1.0, 0.1, 0.01])?;
        let decreasing = prof.windows(2).all(|w| w[1] < w[0]);
        out.push(Check::count(format!("so({n}): partial KW of λx + y decreases to 0"), 3, usize::from(!decreasing || prof[2] > 1e-3 * prof[0])));
    }

    // so(3) ≅ sl(2): here the nilfibre does contain strongly regular points
    let ctx = so(3)?;
    let stream = cfg.stream(c, 3);
    let count = cfg.samples(c);
    let found = (0..count as u64)
        .into_par_iter()
        .filter(|&j| {
            sample_partial_nilfibre(&ctx, sub_seed(stream, j))
                .and_then(|x| crate::regularity::is_sreg_rank(&ctx, &x, cfg.rank))
                .unwrap_or(false)
        })
        .count();
    out.push(Check {
        note: Some(format!("{found} of {count} so(3) nilfibre samples strongly regular")),
        ..Check::count("so(3): contrast finds sreg nilfibre points", count, usize::from(found == 0))
    });
    Ok(out)
}

fn nullcone(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::Nullcone;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let ctx = so(n)?;
        let r = ctx.level(n - 1)?.algebra().rank();
        let comps = nullcone_components(&ctx)?;
        let reps = standard_nilradicals(&ctx)?;
        out.push(Check::count(format!("so({n}): 2^{r} components"), 1, usize::from(comps.len() != 1 << r)));
        let all_u = comps.first().map(|c| c.subspace.distance(&reps[0].anti)).transpose()?.unwrap_or(f64::INFINITY);
        out.push(Check::bound(format!("so({n}): all-U component equals n_+^(-theta)"), 1, all_u, 1e-12));
        let bad_dim = reps.iter().filter(|rep| rep.anti.dim() != r).count();
        out.push(Check::count(format!("so({n}): dim n^(-theta) = {r}"), reps.len(), bad_dim));
        let mut graded: f64 = 0.0;
        let mut stable: f64 = 0.0;
        let mut dims = 0;
        for comp in &comps {
            graded = graded.max(positive_anti_part(&ctx, &comp.grading)?.distance(&comp.subspace)?);
            stable = stable.max(cartan_stability_residual(&ctx, comp)?);
            dims += usize::from(comp.subspace.dim() != r);
        }
        out.push(Check::bound(format!("so({n}): components graded by their integer x"), comps.len(), graded, 1e-12));
        out.push(Check::bound(format!("so({n}): components H∩K-stable"), comps.len(), stable, 1e-12));
        out.push(Check::count(format!("so({n}): components have dimension {r}"), comps.len(), dims));
    }
    Ok(out)
}

fn hessenberg(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::Hessenberg;
    let mut out = Vec::new();
    for n in cfg.sizes(c) {
        let ctx = AlgebraContext::new(Family::GeneralLinear, n)?;
        let stream = cfg.stream(c, n);
        let count = cfg.samples(c);
        let res: Vec<Result<f64>> = (0..count as u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = rng_from_seed(sub_seed(stream, k));
                let target = gaussian_vector(&mut rng, ctx.gz_count(), 1.0);
                let h = hessenberg_section(&ctx, target.as_slice())?;
                if !is_unit_hessenberg(&h) {
                    return Ok(f64::INFINITY);
                }
                let got = kw_map(&ctx, &h)?.values;
                let diff: Vec<C64> = got.iter().zip(target.iter()).map(|(a, b)| a - b).collect();
                Ok(max_abs_vec(&diff) / max_abs_vec(target.as_slice()).max(1.0))
            })
            .collect();
        let worst = res.iter().map(|r| *r.as_ref().unwrap_or(&f64::NAN)).fold(0.0, |a: f64, b| if b.is_nan() { b } else { a.max(b) });
        out.push(Check::bound(format!("gl({n}): Phi after the Hessenberg section"), count, worst, 1e-9).noted(first_error(&res)));
    }
    Ok(out)
}

fn identities(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let c = Criterion::Identities;
    let mut bad = 0;
    let sizes = cfg.sizes(c);
    for &n in &sizes {
        let ctx = so(n)?;
        let g = ctx.top();
        let k = ctx.level(n - 1)?.algebra();
        let inner: usize = (2..n).map(|i| ctx.level(i).map(|l| l.algebra().rank()).unwrap_or(0)).sum();
        let bg = g.positive_roots()?.len();
        let bk = k.positive_roots()?.len();
        let ok = 2 * inner == g.dim() - g.rank() && bg + bk == g.dim() - g.rank() - k.rank() && bg + bk == k.dim();
        bad += usize::from(!ok);
    }
    let mut out = vec![Check::count("dimension identities", sizes.len(), bad)];
    // Pf(S y)^2 against the eigenvalue product, even levels
    let stream = cfg.stream(c, 0);
    for n in sizes.iter().copied().filter(|n| n % 2 == 0 && *n <= 10) {
        let ctx = so(n)?;
        let count = cfg.samples(c);
        let errs: Vec<Result<f64>> = (0..count as u64)
            .into_par_iter()
            .map(|k| {
                let y = random_element(ctx.top(), &mut rng_from_seed(sub_seed(sub_seed(stream, n as u64), k)), 1.0);
                let pf = pfaffian(ctx.top(), &y)?;
                // det y = Π λ(−λ) = (−1)^l Π λ²
                let det: C64 = eigenvalues(&y).iter().product();
                let prod_sq = if (n / 2) % 2 == 0 { det } else { -det };
                Ok((pf * pf - prod_sq).norm() / prod_sq.norm().max(f64::MIN_POSITIVE))
            })
            .collect();
        let worst = errs.iter().map(|r| *r.as_ref().unwrap_or(&f64::NAN)).fold(0.0, |a: f64, b| if b.is_nan() { b } else { a.max(b) });
        out.push(Check::bound(format!("so({n}): Pf(S y)^2 = prod of squared eigenvalues"), count, worst, 1e-9).noted(first_error(&errs)));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig { samples: Some(8), ..SuiteConfig::default() }
    }

    #[test]
    fn names_round_trip() {
        for c in Criterion::ALL {
            assert_eq!(Criterion::from_name(c.name()), Some(c));
            assert_eq!(Criterion::from_name(&c.id().to_string()), Some(c));
        }
        assert_eq!(Criterion::from_name("nope"), None);
    }

    #[test]
    fn mixed_sampler_is_deterministic_and_in_the_algebra() {
        let s = MixedSampler::new(so(6).unwrap()).unwrap();
        for k in 0..16 {
            let (f, a) = s.draw(9, k).unwrap();
            let (_, b) = s.draw(9, k).unwrap();
            assert_eq!(f, (k % 8) as usize);
            assert_eq!(a, b);
            s.context().check_member(&a).unwrap();
        }
    }

    #[test]
    fn small_runs_are_reproducible() {
        let cfg = SuiteConfig { sizes: Some(vec![5]), ..small() };
        let a = run(Criterion::SregEquivalence, &cfg);
        let b = run(Criterion::SregEquivalence, &cfg);
        assert_eq!(a, b);
        assert!(a.passed, "{}", a.summary_line());
    }

    #[test]
    fn inadmissible_sizes_are_dropped() {
        let cfg = SuiteConfig { sizes: Some(vec![3]), ..small() };
        let r = run(Criterion::Nullcone, &cfg);
        assert!(r.checks.is_empty() && r.passed);
    }
}
