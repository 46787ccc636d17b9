//! Command-line flags, TOML configuration and their resolution into a [`RunConfig`].

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::linalg::{mtx, DenseMatrix};
use crate::model::{parse_edge_list, ProblemSpec, SmootherSpec};

#[derive(Debug, Parser)]
#[command(name = "twogrid", version, about = "Two-grid methods and convergence analysis for singular SPSD systems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Solve,
    Verify,
    Generate,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the convergence factor, its bounds and the convergence conditions.
    Analyze(RunArgs),
    /// Iterate a two-grid method and record per-sweep errors.
    Solve(RunArgs),
    /// Check every invariant on the built-in corpus (and the configured problem, if any).
    Verify(RunArgs),
    /// Write A, P and f as MatrixMarket files.
    Generate(RunArgs),
}

impl Command {
    pub fn kind(&self) -> CommandKind {
        match self {
            Self::Analyze(_) => CommandKind::Analyze,
            Self::Solve(_) => CommandKind::Solve,
            Self::Verify(_) => CommandKind::Verify,
            Self::Generate(_) => CommandKind::Generate,
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Self::Analyze(a) | Self::Solve(a) | Self::Verify(a) | Self::Generate(a) => a,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by every command. Each one overrides the same key in `--config`.
#[derive(Clone, Debug, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    /// TOML file with any of the keys below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// neumann1d:N | neumann2d:NXxNY | graph:FILE | random:N:RANK:SEED
    #[arg(long, conflicts_with = "matrix")]
    pub problem: Option<String>,
    /// MatrixMarket file for A.
    #[arg(long)]
    pub matrix: Option<PathBuf>,
    /// MatrixMarket vector for f (requires --matrix).
    #[arg(long, requires = "matrix")]
    pub rhs: Option<PathBuf>,
    /// aggregate:K | FILE (MatrixMarket P) [default: aggregate:2]
    #[arg(long)]
    pub prolongation: Option<String>,
    /// jacobi:OMEGA | gs | zero | FILE (MatrixMarket M) [default: gs]
    #[arg(long)]
    pub smoother: Option<String>,
    /// exact | bc:FILE | eps:EPS [default: exact]
    #[arg(long)]
    pub coarse: Option<String>,
    /// Solve only: tg | stg | itg [default: itg, which equals tg for exact coarse solves]
    #[arg(long)]
    pub variant: Option<String>,
    /// Solve only: random | zero | reference [default: random]
    #[arg(long)]
    pub start: Option<String>,
    /// [default: 50]
    #[arg(long)]
    pub sweeps: Option<usize>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file (analyze, solve, verify) or directory (generate); stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Verify only: offset added to the identity-based factor before comparison.
    #[arg(long)]
    pub perturb_identity: Option<f64>,
}

impl RunArgs {
    /// Fills unset flags from `--config`; relative paths in the file resolve against its directory.
    pub fn merged(&self) -> anyhow::Result<RunArgs> {
        let Some(path) = &self.config else {
            return Ok(self.clone());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let mut file: RunArgs =
            toml::from_str(&text).with_context(|| format!("invalid config {}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut file.matrix, &mut file.rhs, &mut file.output].into_iter().flatten() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        let cli = self.clone();
        let (problem, matrix) = if cli.problem.is_some() || cli.matrix.is_some() {
            (cli.problem, cli.matrix)
        } else {
            (file.problem, file.matrix)
        };
        Ok(RunArgs {
            config: cli.config,
            problem,
            matrix,
            rhs: cli.rhs.or(file.rhs),
            prolongation: cli.prolongation.or(file.prolongation),
            smoother: cli.smoother.or(file.smoother),
            coarse: cli.coarse.or(file.coarse),
            variant: cli.variant.or(file.variant),
            start: cli.start.or(file.start),
            sweeps: cli.sweeps.or(file.sweeps),
            seed: cli.seed.or(file.seed),
            output: cli.output.or(file.output),
            format: cli.format.or(file.format),
            perturb_identity: cli.perturb_identity.or(file.perturb_identity),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProlongationSource {
    Aggregate(usize),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoarseDescriptor {
    Exact,
    Bc(PathBuf),
    Eps(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantKind {
    Tg,
    Stg,
    Itg,
}

/// Initial guess for `solve`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartKind {
    /// Seeded from `seed + 1`.
    Random,
    Zero,
    /// The reference solution itself.
    Reference,
}

fn parse_start(desc: &str) -> anyhow::Result<StartKind> {
    Ok(match desc {
        "random" => StartKind::Random,
        "zero" => StartKind::Zero,
        "reference" => StartKind::Reference,
        _ => bail!("unknown start '{desc}': expected random, zero or reference"),
    })
}

/// A fully resolved invocation.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: CommandKind,
    /// `None` only for `verify` without a configured problem.
    pub problem: Option<(String, ProblemSpec)>,
    pub smoother: SmootherSource,
    pub prolongation: ProlongationSource,
    pub coarse: CoarseDescriptor,
    pub variant: VariantKind,
    pub start: StartKind,
    pub sweeps: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub perturb_identity: f64,
}

/// A smoother descriptor; files are read when the config is resolved.
#[derive(Clone, Debug, PartialEq)]
pub enum SmootherSource {
    Spec(SmootherSpec),
    /// `zero`, sized once `n` is known.
    Zero,
}

impl SmootherSource {
    pub fn resolve(&self, n: usize) -> SmootherSpec {
        match self {
            Self::Spec(s) => s.clone(),
            Self::Zero => SmootherSpec::zero(n),
        }
    }
}

pub fn parse_problem(desc: &str) -> anyhow::Result<ProblemSpec> {
    if let Some(path) = desc.strip_prefix("graph:") {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read edge list {path}"))?;
        let (n, edges) = parse_edge_list(&text).with_context(|| path.to_string())?;
        return Ok(ProblemSpec::GraphLaplacian { n, edges });
    }
    let parts: Vec<&str> = desc.split(':').collect();
    let int = |s: &str, what: &str| -> anyhow::Result<usize> {
        s.parse()
            .with_context(|| format!("problem '{desc}': bad {what} '{s}'"))
    };
    Ok(match parts.as_slice() {
        ["neumann1d", n] => ProblemSpec::NeumannLaplacian1D { n: int(n, "size")? },
        ["neumann2d", dims] => {
            let Some((nx, ny)) = dims.split_once(['x', 'X']) else {
                bail!("problem '{desc}': expected neumann2d:NXxNY");
            };
            ProblemSpec::NeumannLaplacian2D {
                nx: int(nx, "nx")?,
                ny: int(ny, "ny")?,
            }
        }
        ["random", n, rank, seed] => ProblemSpec::RandomSpsd {
            n: int(n, "size")?,
            rank: int(rank, "rank")?,
            seed: seed
                .parse()
                .with_context(|| format!("problem '{desc}': bad seed '{seed}'"))?,
        },
        _ => bail!(
            "unknown problem '{desc}': expected neumann1d:N, neumann2d:NXxNY, graph:FILE or random:N:RANK:SEED"
        ),
    })
}

pub fn parse_smoother(desc: &str) -> anyhow::Result<SmootherSource> {
    if let Some(w) = desc.strip_prefix("jacobi:") {
        let omega: f64 = w
            .parse()
            .with_context(|| format!("smoother '{desc}': bad weight '{w}'"))?;
        return Ok(SmootherSource::Spec(SmootherSpec::jacobi(omega)));
    }
    Ok(match desc {
        "gs" => SmootherSource::Spec(SmootherSpec::GaussSeidel),
        "zero" => SmootherSource::Zero,
        path => SmootherSource::Spec(SmootherSpec::Custom {
            m: mtx::read_mtx(Path::new(path))?,
        }),
    })
}

pub fn parse_prolongation(desc: &str) -> anyhow::Result<ProlongationSource> {
    match desc.strip_prefix("aggregate:") {
        Some(k) => Ok(ProlongationSource::Aggregate(
            k.parse()
                .with_context(|| format!("prolongation '{desc}': bad aggregate size '{k}'"))?,
        )),
        None => Ok(ProlongationSource::File(PathBuf::from(desc))),
    }
}

pub fn parse_coarse(desc: &str) -> anyhow::Result<CoarseDescriptor> {
    if desc == "exact" {
        return Ok(CoarseDescriptor::Exact);
    }
    if let Some(path) = desc.strip_prefix("bc:") {
        return Ok(CoarseDescriptor::Bc(PathBuf::from(path)));
    }
    if let Some(e) = desc.strip_prefix("eps:") {
        let eps: f64 = e
            .parse()
            .with_context(|| format!("coarse '{desc}': bad accuracy '{e}'"))?;
        return Ok(CoarseDescriptor::Eps(eps));
    }
    bail!("unknown coarse solver '{desc}': expected exact, bc:FILE or eps:EPS")
}

fn parse_variant(desc: &str) -> anyhow::Result<VariantKind> {
    Ok(match desc {
        "tg" => VariantKind::Tg,
        "stg" => VariantKind::Stg,
        "itg" => VariantKind::Itg,
        _ => bail!("unknown variant '{desc}': expected tg, stg or itg"),
    })
}

impl RunConfig {
    pub fn from_command(cmd: &Command) -> anyhow::Result<Self> {
        let args = cmd.args().merged()?;
        let command = cmd.kind();
        let problem = match (&args.problem, &args.matrix) {
            (Some(_), Some(_)) => bail!("give exactly one of --problem and --matrix"),
            (Some(desc), None) => Some((desc.clone(), parse_problem(desc)?)),
            (None, Some(path)) => Some((
                path.display().to_string(),
                ProblemSpec::FromFile {
                    matrix: path.clone(),
                    rhs: args.rhs.clone(),
                },
            )),
            (None, None) if command == CommandKind::Verify => None,
            (None, None) => bail!("give exactly one of --problem and --matrix"),
        };
        Ok(Self {
            command,
            problem,
            smoother: parse_smoother(args.smoother.as_deref().unwrap_or("gs"))?,
            prolongation: parse_prolongation(args.prolongation.as_deref().unwrap_or("aggregate:2"))?,
            coarse: parse_coarse(args.coarse.as_deref().unwrap_or("exact"))?,
            variant: parse_variant(args.variant.as_deref().unwrap_or("itg"))?,
            start: parse_start(args.start.as_deref().unwrap_or("random"))?,
            sweeps: args.sweeps.unwrap_or(50),
            seed: args.seed.unwrap_or(0),
            output: args.output.clone(),
            format: args.format.unwrap_or_default(),
            perturb_identity: args.perturb_identity.unwrap_or(0.0),
        })
    }
}

/// Reads `P` or builds an aggregation of size `k`.
pub fn load_prolongation(src: &ProlongationSource, n: usize) -> anyhow::Result<DenseMatrix> {
    match src {
        ProlongationSource::Aggregate(k) => Ok(crate::model::aggregation_prolongation(n, *k)?),
        ProlongationSource::File(path) => mtx::read_mtx(path),
    }
}
