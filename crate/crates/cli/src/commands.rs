use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use gz_core::fibres::{gz_flow, solve_fibre, FibreSampler, SolverOptions};
use gz_core::invariants::{kw_map, level_slots, partial_kw, slots, SlotKind};
use gz_core::io::{matrix_hash, parse_member, GzValuesJson, MatrixJson, StratumReportJson, VerdictRecord};
use gz_core::linalg::{frobenius, RankTol};
use gz_core::nilfibre::{
    nullcone_components, obstruction_witness, regular_nilpotent, sample_partial_nilfibre, standard_nilradicals,
    witness_residuals, NilradicalLabel,
};
use gz_core::regularity::{nsreg, sreg_chain, sreg_rank};
use gz_core::sampling::{complex_gaussian, random_element, rng_from_seed, sub_seed};
use gz_core::strata::{in_g_theta, SpectralTol};
use gz_core::suite::{self, Criterion, CriterionReport, MixedSampler, SuiteConfig, SAMPLE_FAMILIES};
use gz_core::{AlgebraContext, Family, GzError, CMat};
use rayon::prelude::*;
use serde::Serialize;

use crate::{Algebra, Command, Common};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] GzError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(GzError::NoConvergence { .. } | GzError::Numerical(_)) => 1,
            _ => 2,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Sizes the global pool from GZ_NUM_THREADS when set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("GZ_NUM_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| config(format!("GZ_NUM_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| config(format!("thread pool: {e}")))
}

impl Common {
    fn validate(&self) -> Result<()> {
        for (name, v) in [("--tol-rank", self.tol_rank), ("--tol-spec", self.tol_spec), ("--tol-solve", self.tol_solve)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }

    fn rank(&self) -> RankTol {
        RankTol { rel: self.tol_rank, ..RankTol::default() }
    }

    fn spec(&self) -> SpectralTol {
        SpectralTol { rel: self.tol_spec }
    }
}

fn context(alg: &Algebra) -> Result<AlgebraContext> {
    Ok(AlgebraContext::new(alg.family, alg.n)?)
}

fn read_text(path: &Path) -> Result<String> {
    let io_err = |source| CliError::Io { path: path.to_path_buf(), source };
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io_err)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(io_err)
    }
}

fn read_member(path: &Path) -> Result<(AlgebraContext, CMat)> {
    Ok(parse_member(&read_text(path)?)?)
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io { path: p.to_path_buf(), source }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

pub fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Build { alg, element, scale, nilpotent, common } => {
            common.validate()?;
            build(&alg, element.as_deref(), scale, &nilpotent, &common)?;
        }
        Command::Eval { input, common } => {
            common.validate()?;
            let (ctx, x) = read_member(&input)?;
            emit(common.out.as_deref(), &GzValuesJson::from(&kw_map(&ctx, &x)?))?;
        }
        Command::Classify { input, common } => {
            common.validate()?;
            let (ctx, x) = read_member(&input)?;
            let rep = in_g_theta(&ctx, &x, common.spec())?;
            emit(common.out.as_deref(), &StratumReportJson::from(&rep))?;
        }
        Command::Sreg { input, n, samples, common } => {
            common.validate()?;
            sreg(input.as_deref(), n, samples, &common)?;
        }
        Command::Solve { alg, target, restarts, max_iter, common } => {
            common.validate()?;
            solve(&alg, &target, restarts, max_iter, &common)?;
        }
        Command::FibreSample { input, count, scale, common } => {
            common.validate()?;
            fibre_sample(&input, count, scale, &common)?;
        }
        Command::Flow { input, index, t, common } => {
            common.validate()?;
            if !t.is_finite() {
                return Err(config("--t must be finite"));
            }
            let &[i, j] = index.as_slice() else {
                return Err(config("--index takes exactly two values i,j"));
            };
            let (ctx, x) = read_member(&input)?;
            let y = gz_flow(&ctx, &x, (i, j), t)?;
            emit(common.out.as_deref(), &MatrixJson::from_matrix(ctx.family(), &y))?;
        }
        Command::Nilfibre { n, samples, report, common } => {
            common.validate()?;
            let out = report.or(common.out.clone());
            emit(out.as_deref(), &nilfibre(n, samples, &common)?)?;
        }
        Command::Suite { all: _, only, n, samples, report, timings, common } => {
            common.validate()?;
            return run_suite(&only, n, samples, report.or(common.out.clone()), timings, &common);
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct LevelInfo {
    level: usize,
    dim: usize,
    rank: usize,
    generators: Vec<SlotInfo>,
}

#[derive(Serialize)]
struct SlotInfo {
    j: usize,
    kind: &'static str,
    degree: u32,
}

#[derive(Serialize)]
struct ContextInfo {
    family: Family,
    n: usize,
    dim: usize,
    rank: usize,
    gz_count: usize,
    levels: Vec<LevelInfo>,
}

fn build(alg: &Algebra, element: Option<&str>, scale: f64, nilpotent: &[usize], common: &Common) -> Result<()> {
    let ctx = context(alg)?;
    let top = ctx.top();
    let out = common.out.as_deref();
    let Some(element) = element else {
        let all = slots(&ctx);
        let levels = ctx
            .levels()
            .iter()
            .map(|lvl| LevelInfo {
                level: lvl.index(),
                dim: lvl.algebra().dim(),
                rank: lvl.algebra().rank(),
                generators: level_slots(lvl.algebra())
                    .into_iter()
                    .map(|(j, kind)| {
                        let slot = all.iter().find(|s| s.level == lvl.index() && s.j == j).expect("slot listed");
                        SlotInfo {
                            j,
                            kind: if kind == SlotKind::Pfaffian { "pfaffian" } else { "trace" },
                            degree: slot.degree(),
                        }
                    })
                    .collect(),
            })
            .collect();
        let info = ContextInfo {
            family: ctx.family(),
            n: ctx.n(),
            dim: ctx.dim(),
            rank: ctx.rank(),
            gz_count: ctx.gz_count(),
            levels,
        };
        return emit(out, &info);
    };
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(config("--scale must be finite and non-negative"));
    }
    let mut rng = rng_from_seed(common.seed);
    let x = match element {
        "zero" => CMat::zeros(ctx.n(), ctx.n()),
        "random" => random_element(top, &mut rng, scale),
        "cartan" => {
            let eps: Vec<_> = (0..top.rank()).map(|_| complex_gaussian(&mut rng) * scale).collect();
            top.cartan_element(&eps)?
        }
        "regular-nilpotent" => regular_nilpotent(&ctx)?,
        "nilfibre" => sample_partial_nilfibre(&ctx, common.seed)?,
        "witness" => {
            let opts = SolverOptions { tol_rel: common.tol_solve, ..SolverOptions::default() };
            suite::g_theta_witness(&ctx, nilpotent, common.seed, opts)?
        }
        other => return Err(config(format!("unknown element kind {other:?}"))),
    };
    emit(out, &MatrixJson::from_matrix(ctx.family(), &x))
}

#[derive(Serialize)]
struct BatchRecord {
    k: u64,
    sample_family: &'static str,
    #[serde(flatten)]
    verdict: VerdictRecord,
}

#[derive(Serialize)]
struct SregBatch {
    n: usize,
    seed: u64,
    samples: usize,
    agree: usize,
    records: Vec<BatchRecord>,
}

fn sreg(input: Option<&Path>, n: Option<usize>, samples: usize, common: &Common) -> Result<()> {
    let tol = common.rank();
    let out = common.out.as_deref();
    if let Some(path) = input {
        if n.is_some() {
            return Err(config("--n is only used in batch mode"));
        }
        let (ctx, x) = read_member(path)?;
        let rec = VerdictRecord::new(&x, sreg_rank(&ctx, &x, tol)?, sreg_chain(&ctx, &x, tol)?);
        return emit(out, &rec);
    }
    let n = n.ok_or_else(|| config("either --in or --n is required"))?;
    let sampler = MixedSampler::new(AlgebraContext::new(Family::Orthogonal, n)?)?;
    let stream = sub_seed(common.seed, n as u64);
    let records = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let (fam, x) = sampler.draw(stream, k)?;
            let ctx = sampler.context();
            let verdict = VerdictRecord::new(&x, sreg_rank(ctx, &x, tol)?, sreg_chain(ctx, &x, tol)?);
            Ok(BatchRecord { k, sample_family: SAMPLE_FAMILIES[fam], verdict })
        })
        .collect::<std::result::Result<Vec<_>, GzError>>()?;
    let agree = records.iter().filter(|r| r.verdict.sreg_rank == r.verdict.sreg_chain).count();
    emit(out, &SregBatch { n, seed: common.seed, samples, agree, records })
}

#[derive(Serialize)]
struct SolveJson {
    success: bool,
    residual: f64,
    iterations: usize,
    restarts: usize,
    target: GzValuesJson,
    x: MatrixJson,
}

fn solve(alg: &Algebra, target: &Path, restarts: usize, max_iter: usize, common: &Common) -> Result<()> {
    let ctx = context(alg)?;
    let tj: GzValuesJson =
        serde_json::from_str(&read_text(target)?).map_err(|e| GzError::Parse(e.to_string()))?;
    let c = tj.values()?;
    let expected: Vec<[usize; 2]> = slots(&ctx).iter().map(|s| [s.level, s.j]).collect();
    if c.len() != expected.len() {
        return Err(GzError::TargetLength { expected: expected.len(), got: c.len() }.into());
    }
    if tj.index != expected {
        return Err(config(format!("target index must list the GZ slots in order: {expected:?}")));
    }
    if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(config("target values must be finite"));
    }
    if restarts == 0 || max_iter == 0 {
        return Err(config("--restarts and --max-iter must be positive"));
    }
    let opts = SolverOptions { restarts, max_iter, tol_rel: common.tol_solve };
    let rep = solve_fibre(&ctx, &c, common.seed, opts)?;
    let json = SolveJson {
        success: rep.success,
        residual: rep.residual,
        iterations: rep.iterations,
        restarts: rep.restarts,
        target: tj,
        x: MatrixJson::from_matrix(ctx.family(), &rep.x),
    };
    emit(common.out.as_deref(), &json)
}

#[derive(Serialize)]
struct FibreSampleJson {
    base_hash: String,
    seed: u64,
    parameter_dim: usize,
    centralizer_dims: Vec<[usize; 2]>,
    max_drift: f64,
    samples: Vec<MatrixJson>,
}

fn fibre_sample(input: &Path, count: usize, scale: f64, common: &Common) -> Result<()> {
    if !(scale.is_finite() && scale >= 0.0) {
        return Err(config("--scale must be finite and non-negative"));
    }
    let (ctx, x) = read_member(input)?;
    let sampler = FibreSampler::new(&ctx, &x, common.seed, common.rank(), common.spec())?;
    let base = kw_map(&ctx, &x)?;
    let points = (0..count as u64)
        .into_par_iter()
        .map(|k| sampler.draw(&ctx, k, scale))
        .collect::<std::result::Result<Vec<_>, GzError>>()?;
    let mut max_drift = 0.0f64;
    for p in &points {
        max_drift = max_drift.max(kw_map(&ctx, p)?.max_abs_diff(&base));
    }
    let json = FibreSampleJson {
        base_hash: matrix_hash(&x),
        seed: common.seed,
        parameter_dim: sampler.parameter_dim(),
        centralizer_dims: sampler.dims().into_iter().map(|(a, b)| [a, b]).collect(),
        max_drift,
        samples: points.iter().map(|p| MatrixJson::from_matrix(ctx.family(), p)).collect(),
    };
    emit(common.out.as_deref(), &json)
}

#[derive(Serialize)]
struct WitnessJson {
    label: NilradicalLabel,
    nilradical_dim: usize,
    compact_dim: usize,
    anti_dim: usize,
    witness: MatrixJson,
    /// ‖[y, n]‖, ‖[y, n∩k]‖, ‖θ(y) − y‖
    residuals: [f64; 3],
}

#[derive(Serialize)]
struct NilfibreJson {
    n: usize,
    seed: u64,
    regular_nilpotent: MatrixJson,
    regular_nilpotent_partial_kw: f64,
    nilradicals: Vec<WitnessJson>,
    nullcone_components: Vec<String>,
    samples: usize,
    nsreg: usize,
    sreg: usize,
    records: Vec<VerdictRecord>,
}

fn nilfibre(n: usize, samples: usize, common: &Common) -> Result<NilfibreJson> {
    let ctx = AlgebraContext::new(Family::Orthogonal, n)?;
    if n < 4 {
        return Err(GzError::SizeTooSmall(n, 4).into());
    }
    let e = regular_nilpotent(&ctx)?;
    let nilradicals = standard_nilradicals(&ctx)?
        .iter()
        .map(|rep| {
            let y = obstruction_witness(&ctx, rep)?;
            let (a, b, c) = witness_residuals(&ctx, rep, &y)?;
            Ok(WitnessJson {
                label: rep.label,
                nilradical_dim: rep.nilradical.dim(),
                compact_dim: rep.compact.dim(),
                anti_dim: rep.anti.dim(),
                witness: MatrixJson::from_matrix(Family::Orthogonal, &y),
                residuals: [a, b, c],
            })
        })
        .collect::<std::result::Result<Vec<_>, GzError>>()?;
    let nullcone = if n >= 5 {
        nullcone_components(&ctx)?.iter().map(|c| c.label()).collect()
    } else {
        Vec::new()
    };
    let tol = common.rank();
    let verdicts = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let x = sample_partial_nilfibre(&ctx, sub_seed(common.seed, k))?;
            let ns = nsreg(&ctx, &x, tol)?;
            Ok((ns.holds, VerdictRecord::new(&x, sreg_rank(&ctx, &x, tol)?, sreg_chain(&ctx, &x, tol)?)))
        })
        .collect::<std::result::Result<Vec<_>, GzError>>()?;
    Ok(NilfibreJson {
        n,
        seed: common.seed,
        regular_nilpotent_partial_kw: partial_kw(&ctx, &e)?.max_abs() / frobenius(&e).max(1.0),
        regular_nilpotent: MatrixJson::from_matrix(Family::Orthogonal, &e),
        nilradicals,
        nullcone_components: nullcone,
        samples,
        nsreg: verdicts.iter().filter(|v| v.0).count(),
        sreg: verdicts.iter().filter(|v| v.1.sreg_rank).count(),
        records: verdicts.into_iter().map(|v| v.1).collect(),
    })
}

#[derive(Serialize)]
struct TimedCriterion {
    #[serde(flatten)]
    report: CriterionReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

#[derive(Serialize)]
struct SuiteJson {
    seed: u64,
    passed: bool,
    criteria: Vec<TimedCriterion>,
}

fn run_suite(
    only: &[String],
    sizes: Vec<usize>,
    samples: Option<usize>,
    out: Option<PathBuf>,
    timings: bool,
    common: &Common,
) -> Result<ExitCode> {
    let criteria: Vec<Criterion> = if only.is_empty() {
        Criterion::ALL.to_vec()
    } else {
        only.iter()
            .map(|s| Criterion::from_name(s).ok_or_else(|| config(format!("unknown suite {s:?}"))))
            .collect::<Result<_>>()?
    };
    if let Some(&bad) = sizes.iter().find(|&&n| n < 2) {
        return Err(GzError::SizeTooSmall(bad, 2).into());
    }
    if samples == Some(0) {
        return Err(config("--samples must be positive"));
    }
    let cfg = SuiteConfig {
        seed: common.seed,
        sizes: (!sizes.is_empty()).then_some(sizes),
        samples,
        rank: common.rank(),
        spec: common.spec(),
        solver: SolverOptions { tol_rel: common.tol_solve, ..SolverOptions::default() },
    };
    let mut reports = Vec::with_capacity(criteria.len());
    for c in criteria {
        let start = Instant::now();
        let report = suite::run(c, &cfg);
        let secs = start.elapsed().as_secs_f64();
        eprintln!("{}  [{secs:.2}s]", report.summary_line());
        reports.push(TimedCriterion { report, seconds: timings.then_some(secs) });
    }
    let passed = reports.iter().all(|r| r.report.passed);
    emit(out.as_deref(), &SuiteJson { seed: cfg.seed, passed, criteria: reports })?;
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
