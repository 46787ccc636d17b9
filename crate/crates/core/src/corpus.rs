//! The built-in verification corpus and the per-case invariant checks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{
    check_conditions, exact_factor, inexact_linear_analysis, seminorm_oracle, Iteration,
};
use crate::linalg::{spsd_certify, sub_vec, DenseMatrix, TolerancePolicy};
use crate::model::{
    aggregation_prolongation, build_hierarchy, generate_problem, jacobi_omega_limit, Problem,
    ProblemSpec, SmootherSpec, TwoGridHierarchy,
};
use crate::solver::{seminorm, tg_sweep};

/// Smoother choice resolved against `A` when the case is built.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmootherChoice {
    Jacobi(f64),
    /// Jacobi at half of `2 / lambda_max(D^{-1} A)`.
    JacobiHalfLimit,
    GaussSeidel,
    Zero,
}

impl SmootherChoice {
    fn label(&self) -> String {
        match self {
            Self::Jacobi(w) => format!("jacobi:{w:.4}"),
            Self::JacobiHalfLimit => "jacobi:half-limit".to_string(),
            Self::GaussSeidel => "gs".to_string(),
            Self::Zero => "zero".to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusCase {
    pub name: String,
    pub problem: ProblemSpec,
    pub smoother: SmootherChoice,
    pub aggregate: usize,
    /// Replaces aggregation when set.
    pub prolongation: Option<DenseMatrix>,
}

impl CorpusCase {
    fn new(label: &str, problem: ProblemSpec, smoother: SmootherChoice, aggregate: usize) -> Self {
        Self {
            name: format!("{label}/{}/agg{aggregate}", smoother.label()),
            problem,
            smoother,
            aggregate,
            prolongation: None,
        }
    }

    /// A zero smoother with an incomplete coarse space: the method cannot contract.
    pub fn expects_failure(&self) -> bool {
        self.smoother == SmootherChoice::Zero
    }

    pub fn build(&self, seed: u64) -> anyhow::Result<(Problem, TwoGridHierarchy)> {
        let mut problem = generate_problem(&self.problem, seed, None)?;
        let n = problem.a.dim();
        problem.p = match &self.prolongation {
            Some(p) => p.clone(),
            None => aggregation_prolongation(n, self.aggregate)?,
        };
        let spec = match self.smoother {
            SmootherChoice::Jacobi(w) => SmootherSpec::jacobi(w),
            SmootherChoice::JacobiHalfLimit => {
                SmootherSpec::jacobi(0.5 * jacobi_omega_limit(&problem.a)?)
            }
            SmootherChoice::GaussSeidel => SmootherSpec::GaussSeidel,
            SmootherChoice::Zero => SmootherSpec::zero(n),
        };
        let tol = TolerancePolicy::for_dim(n);
        let h = build_hierarchy(&problem.a, &problem.p, &spec, &tol)?;
        Ok((problem, h))
    }
}

/// Two disjoint 6-cycles.
pub fn two_cycles() -> ProblemSpec {
    let mut edges = Vec::new();
    for base in [0, 6] {
        for i in 0..6 {
            edges.push((base + i, base + (i + 1) % 6, 1.0));
        }
    }
    ProblemSpec::GraphLaplacian { n: 12, edges }
}

/// A 2 x 6 ladder with unit rungs and rails of weight 2.
pub fn ladder() -> ProblemSpec {
    let mut edges = Vec::new();
    for i in 0..6 {
        edges.push((i, i + 6, 1.0));
        if i + 1 < 6 {
            edges.push((i, i + 1, 2.0));
            edges.push((i + 6, i + 7, 2.0));
        }
    }
    ProblemSpec::GraphLaplacian { n: 12, edges }
}

/// A wheel on 10 nodes (hub 0) with a weighted rim.
pub fn wheel() -> ProblemSpec {
    let mut edges = Vec::new();
    for i in 1..10 {
        edges.push((0, i, 0.5));
        let next = if i == 9 { 1 } else { i + 1 };
        edges.push((i, next, 1.0 + 0.25 * (i % 3) as f64));
    }
    ProblemSpec::GraphLaplacian { n: 10, edges }
}

/// The random rank-deficient SPSD problems: `n ∈ {10, 12, 16, 20, 24}`, two seeds each, rank `3n/5`.
pub fn random_problems() -> Vec<ProblemSpec> {
    let mut out = Vec::new();
    for (i, n) in [10, 12, 16, 20, 24].into_iter().enumerate() {
        for j in 0..2 {
            out.push(ProblemSpec::RandomSpsd {
                n,
                rank: 3 * n / 5,
                seed: 100 + 10 * i as u64 + j,
            });
        }
    }
    out
}

/// The full corpus: Neumann 1D/2D, three graphs and ten random problems under
/// Jacobi, Gauss-Seidel and aggregation by 2 and 4, plus one zero-smoother case.
pub fn corpus() -> Vec<CorpusCase> {
    let structured = [SmootherChoice::Jacobi(0.5), SmootherChoice::Jacobi(2.0 / 3.0), SmootherChoice::GaussSeidel];
    let random = [SmootherChoice::JacobiHalfLimit, SmootherChoice::GaussSeidel];
    let mut problems: Vec<(String, ProblemSpec, &[SmootherChoice])> = Vec::new();
    for n in [8, 16, 32] {
        problems.push((format!("neumann1d:{n}"), ProblemSpec::NeumannLaplacian1D { n }, &structured));
    }
    problems.push(("neumann2d:8x8".into(), ProblemSpec::NeumannLaplacian2D { nx: 8, ny: 8 }, &structured));
    problems.push(("graph:two-cycles".into(), two_cycles(), &structured));
    problems.push(("graph:ladder".into(), ladder(), &structured));
    problems.push(("graph:wheel".into(), wheel(), &structured));
    for spec in random_problems() {
        let ProblemSpec::RandomSpsd { n, rank, seed } = spec else { unreachable!() };
        problems.push((format!("random:{n}:{rank}:{seed}"), spec, &random));
    }

    let mut cases = Vec::new();
    for (label, spec, smoothers) in &problems {
        for &sm in *smoothers {
            for agg in [2, 4] {
                cases.push(CorpusCase::new(label, spec.clone(), sm, agg));
            }
        }
    }
    cases.push(trivial_case());
    cases.push(CorpusCase::new(
        "neumann1d:8",
        ProblemSpec::NeumannLaplacian1D { n: 8 },
        SmootherChoice::Zero,
        2,
    ));
    cases
}

/// Two nodes joined by one edge, with `P` spanning `R(A)`: here `s = r` and the factor is 0.
pub fn trivial_case() -> CorpusCase {
    CorpusCase {
        name: "trivial:path2/jacobi:0.5000/range".to_string(),
        problem: ProblemSpec::GraphLaplacian {
            n: 2,
            edges: vec![(0, 1, 1.0)],
        },
        smoother: SmootherChoice::Jacobi(0.5),
        aggregate: 2,
        prolongation: Some(DenseMatrix::from_columns(2, &[[1.0, -1.0]]).expect("2x1")),
    }
}

/// One invariant evaluated on one case. `slack = threshold - measured`; negative means failure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub case: String,
    pub check: String,
    pub passed: bool,
    pub measured: f64,
    pub threshold: f64,
    pub slack: f64,
}

impl CheckResult {
    fn at_most(case: &str, check: &str, measured: f64, threshold: f64) -> Self {
        Self {
            case: case.to_string(),
            check: check.to_string(),
            passed: measured <= threshold,
            measured,
            threshold,
            slack: threshold - measured,
        }
    }

    fn flag(case: &str, check: &str, ok: bool) -> Self {
        let measured = if ok { 0.0 } else { 1.0 };
        Self::at_most(case, check, measured, 0.0)
    }

    fn error(case: &str, err: impl std::fmt::Display) -> Self {
        Self {
            case: case.to_string(),
            check: format!("build: {err}"),
            passed: false,
            measured: f64::NAN,
            threshold: 0.0,
            slack: f64::NAN,
        }
    }
}

pub const IDENTITY_TOL: f64 = 1e-10;
pub const SQUARING_TOL: f64 = 1e-9;
pub const SWEEP_TOL: f64 = 1e-8;

/// Runs the invariant suite on one hierarchy. `perturb_identity` is added to the
/// identity-based factor before comparison, to exercise the harness itself.
pub fn check_hierarchy(
    name: &str,
    h: &TwoGridHierarchy,
    problem: &Problem,
    expects_failure: bool,
    perturb_identity: f64,
    seed: u64,
) -> anyhow::Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let cond = check_conditions(h)?;
    let ex = exact_factor(h)?;
    let fi = ex.factor_identity + perturb_identity;

    if expects_failure {
        out.push(CheckResult::flag(name, "equiv_cond_fails", !cond.equiv_cond_ok));
        out.push(CheckResult::at_most(name, "factor_is_one", 1.0 - IDENTITY_TOL - fi, 0.0));
        return Ok(out);
    }

    out.push(CheckResult::flag(name, "smoother_ok", cond.smoother_ok));
    if cond.suff_cond_ok {
        out.push(CheckResult::flag(name, "suff_implies_equiv", cond.equiv_cond_ok));
    }
    out.push(CheckResult::at_most(name, "identity_vs_oracle", (fi - ex.factor_oracle).abs(), IDENTITY_TOL));
    out.push(CheckResult::at_most(name, "identity_vs_ftg", (fi - ex.factor_ftg).abs(), IDENTITY_TOL));
    out.push(CheckResult::at_most(name, "lower_bound", ex.lower_bound - fi, IDENTITY_TOL));
    out.push(CheckResult::at_most(name, "upper_bound", fi - ex.upper_bound, IDENTITY_TOL));

    if h.s() == h.r() {
        out.push(CheckResult::at_most(name, "degenerate_factor_zero", fi.abs(), 0.0));
    }

    let tg = seminorm_oracle(h, Iteration::Tg)?;
    let stg = seminorm_oracle(h, Iteration::Stg)?;
    out.push(CheckResult::at_most(name, "squaring_law", (stg - tg * tg).abs(), SQUARING_TOL));

    if cond.equiv_cond_ok {
        let nullity = h.n() - h.r();
        out.push(CheckResult::at_most(
            name,
            "nullity_ftg",
            ex.nullity_ftg.abs_diff(nullity) as f64,
            0.0,
        ));
    }

    for (label, scale) in [("bc=ac", 1.0), ("bc=2ac", 2.0)] {
        let bc = spsd_certify(&h.ac().matrix().scale(scale), h.tolerance())?;
        let it = inexact_linear_analysis(h, &bc)?;
        out.push(CheckResult::at_most(name, &format!("itg_lower[{label}]"), it.lower_l - it.factor_exact_itg, IDENTITY_TOL));
        out.push(CheckResult::at_most(name, &format!("itg_upper[{label}]"), it.factor_exact_itg - it.upper_u, IDENTITY_TOL));
        out.push(CheckResult::at_most(name, &format!("itg_oracle[{label}]"), (it.factor_exact_itg - it.factor_oracle).abs(), IDENTITY_TOL));
    }

    if let Some(u_ref) = &problem.u_ref {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..10 {
            let u0 = random_vector(h.n(), &mut rng);
            let e0 = seminorm(h.a(), &sub_vec(u_ref, &u0));
            let u1 = tg_sweep(h, &u0, &problem.f)?;
            let e1 = seminorm(h.a(), &sub_vec(u_ref, &u1));
            if e0 > 0.0 {
                worst = worst.max(e1 / e0);
            }
        }
        out.push(CheckResult::at_most(name, "sweep_ratio", worst - fi, SWEEP_TOL));
    }
    Ok(out)
}

fn random_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    use rand::Rng;
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Runs [`check_hierarchy`] on every corpus case in parallel; output order follows the corpus.
pub fn verify_corpus(perturb_identity: f64, seed: u64) -> Vec<CheckResult> {
    let cases = corpus();
    let results: Vec<Vec<CheckResult>> = cases
        .par_iter()
        .map(|case| match case.build(seed) {
            Ok((problem, h)) => check_hierarchy(&case.name, &h, &problem, case.expects_failure(), perturb_identity, seed)
                .unwrap_or_else(|e| vec![CheckResult::error(&case.name, e)]),
            Err(e) => vec![CheckResult::error(&case.name, e)],
        })
        .collect();
    results.into_iter().flatten().collect()
}
