//! The four commands. Each returns the process exit code.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use serde::Serialize;

use crate::analysis::{analyze, CoarseAnalysis, ConvergenceReport};
use crate::cli::args::{
    load_prolongation, CoarseDescriptor, Format, RunConfig, StartKind, VariantKind,
};
use crate::corpus::{check_hierarchy, verify_corpus, CheckResult};
use crate::linalg::{mtx, spsd_certify, DenseMatrix, SpsdOperator, TolerancePolicy};
use crate::model::{build_hierarchy, generate_problem, seeded_vector, Problem, TwoGridHierarchy};
use crate::solver::{iterate, CoarseSolverSpec, EpsilonPerturbedSolver, PerturbDirection, Variant};

/// Exit code of `analyze` when the exact method does not converge.
pub const EXIT_NOT_CONVERGENT: i32 = 2;

/// Loads the problem, applies the environment tolerance policy and assembles the hierarchy.
pub fn load(cfg: &RunConfig) -> anyhow::Result<(String, Problem, TwoGridHierarchy)> {
    let Some((label, spec)) = &cfg.problem else {
        bail!("give exactly one of --problem and --matrix");
    };
    let mut problem = generate_problem(spec, cfg.seed, None)?;
    let n = problem.a.dim();
    let tol = TolerancePolicy::from_env(n)?;
    if tol != *problem.a.tolerance() {
        problem.a = spsd_certify(problem.a.matrix(), &tol)?;
    }
    problem.p = load_prolongation(&cfg.prolongation, n)?;
    let smoother = cfg.smoother.resolve(n);
    let h = build_hierarchy(&problem.a, &problem.p, &smoother, &tol)?;
    Ok((label.clone(), problem, h))
}

fn load_bc(path: &Path, tol: &TolerancePolicy) -> anyhow::Result<SpsdOperator> {
    let bc = mtx::read_mtx(path)?;
    spsd_certify(&bc, tol).with_context(|| format!("{}: B_c", path.display()))
}

/// Builds the convergence report for the configured problem.
pub fn cmd_analyze(cfg: &RunConfig) -> anyhow::Result<ConvergenceReport> {
    let (label, _, h) = load(cfg)?;
    let coarse = match &cfg.coarse {
        CoarseDescriptor::Exact => CoarseAnalysis::Exact,
        CoarseDescriptor::Bc(path) => CoarseAnalysis::Linear(load_bc(path, h.tolerance())?),
        CoarseDescriptor::Eps(eps) => CoarseAnalysis::Epsilon(*eps),
    };
    Ok(analyze(&h, &coarse, &label, cfg.seed)?)
}

pub fn render_report(report: &ConvergenceReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => ConvergenceReport::to_csv(std::slice::from_ref(report)),
    }
}

fn emit(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            use std::io::Write;
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn run_analyze(cfg: &RunConfig) -> anyhow::Result<i32> {
    let report = cmd_analyze(cfg)?;
    emit(cfg.output.as_deref(), &render_report(&report, cfg.format))?;
    if report.flags.equiv_cond_ok {
        Ok(0)
    } else {
        log::warn!("the null-space condition fails: the exact two-grid method does not converge");
        Ok(EXIT_NOT_CONVERGENT)
    }
}

/// Path of the summary JSON written next to a trace CSV.
pub fn summary_path(output: &Path) -> PathBuf {
    output.with_extension("summary.json")
}

fn run_solve(cfg: &RunConfig) -> anyhow::Result<i32> {
    let (_, problem, h) = load(cfg)?;
    let n = h.n();
    let mut variant = match cfg.variant {
        VariantKind::Tg => Variant::Tg,
        VariantKind::Stg => Variant::Stg,
        VariantKind::Itg => Variant::Itg(match &cfg.coarse {
            CoarseDescriptor::Exact => CoarseSolverSpec::Exact,
            CoarseDescriptor::Bc(path) => CoarseSolverSpec::LinearSpsd(load_bc(path, h.tolerance())?),
            CoarseDescriptor::Eps(eps) => {
                let solver = EpsilonPerturbedSolver::new(h.ac(), *eps, PerturbDirection::Random, cfg.seed);
                CoarseSolverSpec::general(Box::new(solver), *eps, true)?
            }
        }),
    };
    let u0 = match cfg.start {
        StartKind::Random => seeded_vector(n, cfg.seed.wrapping_add(1)),
        StartKind::Zero => vec![0.0; n],
        StartKind::Reference => match &problem.u_ref {
            Some(u) => u.clone(),
            None => bail!("--start reference needs a generated right-hand side"),
        },
    };
    let trace = iterate(&h, &problem.f, &u0, problem.u_ref.as_deref(), cfg.sweeps, &mut variant)?;
    let summary = json(&trace.summary(cfg.seed))?;
    match &cfg.output {
        Some(path) => {
            emit(Some(path), &trace.to_csv())?;
            emit(Some(&summary_path(path)), &summary)?;
        }
        None => match cfg.format {
            Format::Json => emit(None, &summary)?,
            Format::Csv => emit(None, &trace.to_csv())?,
        },
    }
    Ok(0)
}

fn json<T: Serialize>(value: &T) -> anyhow::Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    seed: u64,
    perturb_identity: f64,
    passed: usize,
    failed: usize,
    checks: &'a [CheckResult],
}

/// Runs the invariant suite on the configured problem (if any) followed by the corpus.
pub fn cmd_verify(cfg: &RunConfig) -> anyhow::Result<Vec<CheckResult>> {
    let mut checks = Vec::new();
    if cfg.problem.is_some() {
        let (label, problem, h) = load(cfg)?;
        checks.extend(check_hierarchy(&label, &h, &problem, false, cfg.perturb_identity, cfg.seed)?);
    }
    checks.extend(verify_corpus(cfg.perturb_identity, cfg.seed));
    Ok(checks)
}

fn run_verify(cfg: &RunConfig) -> anyhow::Result<i32> {
    let checks = cmd_verify(cfg)?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    let text = match cfg.format {
        Format::Json => json(&VerifyReport {
            seed: cfg.seed,
            perturb_identity: cfg.perturb_identity,
            passed: checks.len() - failed,
            failed,
            checks: &checks,
        })?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for c in &checks {
                w.serialize(c)?;
            }
            String::from_utf8(w.into_inner()?)?
        }
    };
    emit(cfg.output.as_deref(), &text)?;
    eprintln!("{} checks, {} failed", checks.len(), failed);
    Ok(i32::from(failed > 0))
}

/// Writes `A.mtx`, `P.mtx` and `f.mtx` into the output directory.
pub fn cmd_generate(cfg: &RunConfig) -> anyhow::Result<Vec<PathBuf>> {
    let Some(dir) = &cfg.output else {
        bail!("generate needs --output DIR");
    };
    let (_, problem, h) = load(cfg)?;
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let f = DenseMatrix::from_columns(problem.f.len(), &[&problem.f])?;
    let mut written = Vec::new();
    for (name, m) in [("A.mtx", h.a().matrix()), ("P.mtx", h.p()), ("f.mtx", &f)] {
        let path = dir.join(name);
        mtx::write_mtx(&path, m)?;
        written.push(path);
    }
    Ok(written)
}

fn run_generate(cfg: &RunConfig) -> anyhow::Result<i32> {
    for path in cmd_generate(cfg)? {
        println!("{}", path.display());
    }
    Ok(0)
}

pub fn run(cfg: &RunConfig) -> anyhow::Result<i32> {
    use crate::cli::args::CommandKind;
    match cfg.command {
        CommandKind::Analyze => run_analyze(cfg),
        CommandKind::Solve => run_solve(cfg),
        CommandKind::Verify => run_verify(cfg),
        CommandKind::Generate => run_generate(cfg),
    }
}
