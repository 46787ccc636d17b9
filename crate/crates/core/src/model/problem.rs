//! SPSD test problems and consistent right-hand sides.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{mtx, spsd_certify, DenseMatrix, SpsdOperator, TolerancePolicy};
use crate::model::hierarchy::aggregation_prolongation;

/// `(i, j, weight)` with 0-based endpoints.
pub type Edge = (usize, usize, f64);

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    NeumannLaplacian1D { n: usize },
    NeumannLaplacian2D { nx: usize, ny: usize },
    /// Weighted undirected graph on `n` nodes, 0-based edge endpoints.
    GraphLaplacian { n: usize, edges: Vec<Edge> },
    /// `A = G^T G` with `G` a seeded `rank x n` uniform[-1, 1] matrix.
    RandomSpsd { n: usize, rank: usize, seed: u64 },
    /// `A` from a MatrixMarket file; with `rhs` set, `f` is read instead of generated.
    FromFile { matrix: PathBuf, rhs: Option<PathBuf> },
}

/// A generated problem: `A`, default pairwise-aggregation `P`, and `f = A u_ref`.
#[derive(Clone, Debug)]
pub struct Problem {
    pub a: SpsdOperator,
    pub p: DenseMatrix,
    pub f: Vec<f64>,
    /// `None` when `f` was read from a file.
    pub u_ref: Option<Vec<f64>>,
    pub seed: u64,
}

pub fn neumann_1d(n: usize) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::InvalidProblem(format!("1D Laplacian needs n >= 2, got {n}")));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    graph_laplacian(n, &edges)
}

/// 5-point Neumann Laplacian on an `nx x ny` grid, index `i + nx j`.
pub fn neumann_2d(nx: usize, ny: usize) -> Result<DenseMatrix> {
    if nx == 0 || ny == 0 || nx * ny < 2 {
        return Err(Error::InvalidProblem(format!(
            "2D Laplacian needs at least two grid points, got {nx}x{ny}"
        )));
    }
    let mut edges = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let k = i + nx * j;
            if i + 1 < nx {
                edges.push((k, k + 1, 1.0));
            }
            if j + 1 < ny {
                edges.push((k, k + nx, 1.0));
            }
        }
    }
    graph_laplacian(nx * ny, &edges)
}

/// `L = D - W`. Self-loops contribute nothing.
pub fn graph_laplacian(n: usize, edges: &[(usize, usize, f64)]) -> Result<DenseMatrix> {
    if n < 2 {
        return Err(Error::InvalidProblem(format!("graph needs n >= 2 nodes, got {n}")));
    }
    let mut l = DenseMatrix::zeros(n, n);
    for &(i, j, w) in edges {
        if i >= n || j >= n {
            return Err(Error::InvalidProblem(format!(
                "edge ({i}, {j}) references a node outside 0..{n}"
            )));
        }
        if !w.is_finite() || w < 0.0 {
            return Err(Error::NegativeWeight { i, j, weight: w });
        }
        if i == j {
            continue;
        }
        l[(i, i)] += w;
        l[(j, j)] += w;
        l[(i, j)] -= w;
        l[(j, i)] -= w;
    }
    Ok(l)
}

pub fn random_spsd(n: usize, rank: usize, seed: u64) -> Result<DenseMatrix> {
    if n < 2 || rank == 0 || rank > n {
        return Err(Error::InvalidProblem(format!(
            "random SPSD needs n >= 2 and 1 <= rank <= n, got n = {n}, rank = {rank}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..rank * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let g = DenseMatrix::new(rank, n, data)?;
    Ok(g.tr_matmul(&g).symmetrized())
}

/// Parses an edge list: one `i j [weight]` per line, 0-based, `#` comments.
/// An optional leading `n <count>` line fixes the node count; otherwise it is
/// one more than the largest index.
pub fn parse_edge_list(text: &str) -> anyhow::Result<(usize, Vec<Edge>)> {
    use anyhow::{bail, Context};
    let mut declared = None;
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        if t[0] == "n" {
            if t.len() != 2 || !edges.is_empty() || declared.is_some() {
                bail!("line {lineno}: 'n <count>' must appear once, before any edge");
            }
            declared = Some(t[1].parse::<usize>().with_context(|| format!("line {lineno}: bad node count"))?);
            continue;
        }
        if t.len() != 2 && t.len() != 3 {
            bail!("line {lineno}: expected 'i j [weight]', got '{line}'");
        }
        let i = t[0].parse::<usize>().with_context(|| format!("line {lineno}: bad node '{}'", t[0]))?;
        let j = t[1].parse::<usize>().with_context(|| format!("line {lineno}: bad node '{}'", t[1]))?;
        let w = match t.get(2) {
            Some(s) => s.parse::<f64>().with_context(|| format!("line {lineno}: bad weight '{s}'"))?,
            None => 1.0,
        };
        edges.push((i, j, w));
    }
    let inferred = edges.iter().map(|&(i, j, _)| i.max(j) + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(inferred);
    Ok((n, edges))
}

fn read_vector(path: &Path) -> anyhow::Result<Vec<f64>> {
    let m = mtx::read_mtx(path)?;
    if m.cols() != 1 && m.rows() != 1 {
        anyhow::bail!("{}: expected a vector, got a {}x{} matrix", path.display(), m.rows(), m.cols());
    }
    Ok(m.as_slice().to_vec())
}

/// Uniform[-1, 1] vector from `seed`.
pub fn seeded_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Builds `A`, the pairwise-aggregation `P` and a consistent `f = A u_ref` with `u_ref` drawn from `seed`.
pub fn generate_problem(
    spec: &ProblemSpec,
    seed: u64,
    tol: Option<&TolerancePolicy>,
) -> anyhow::Result<Problem> {
    let (matrix, rhs) = match spec {
        ProblemSpec::NeumannLaplacian1D { n } => (neumann_1d(*n)?, None),
        ProblemSpec::NeumannLaplacian2D { nx, ny } => (neumann_2d(*nx, *ny)?, None),
        ProblemSpec::GraphLaplacian { n, edges } => (graph_laplacian(*n, edges)?, None),
        ProblemSpec::RandomSpsd { n, rank, seed } => (random_spsd(*n, *rank, *seed)?, None),
        ProblemSpec::FromFile { matrix, rhs } => {
            let a = mtx::read_mtx(matrix)?;
            let f = rhs.as_deref().map(read_vector).transpose()?;
            (a, f)
        }
    };
    let n = matrix.rows();
    let policy = tol.copied().unwrap_or_else(|| TolerancePolicy::for_dim(n));
    let a = spsd_certify(&matrix, &policy)?;
    let p = aggregation_prolongation(n, 2)?;
    let (f, u_ref) = match rhs {
        Some(f) => {
            if f.len() != n {
                return Err(Error::LengthMismatch {
                    context: "right-hand side",
                    expected: n,
                    got: f.len(),
                }
                .into());
            }
            (f, None)
        }
        None => {
            let u = seeded_vector(n, seed);
            (a.matrix().matvec(&u), Some(u))
        }
    };
    Ok(Problem {
        a,
        p,
        f,
        u_ref,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dot;

    #[test]
    fn neumann_stencil() {
        let a = neumann_1d(4).unwrap();
        assert_eq!(a.row(0), &[1.0, -1.0, 0.0, 0.0]);
        assert_eq!(a.row(1), &[-1.0, 2.0, -1.0, 0.0]);
        assert_eq!(a.row(3), &[0.0, 0.0, -1.0, 1.0]);
        let prob = generate_problem(&ProblemSpec::NeumannLaplacian1D { n: 4 }, 0, None).unwrap();
        assert_eq!(prob.a.rank(), 3);
    }

    #[test]
    fn path_graph() {
        let l = graph_laplacian(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let expect = DenseMatrix::from_rows(&[[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]).unwrap();
        assert_eq!(l, expect);
        assert!(matches!(
            graph_laplacian(3, &[(0, 1, -1.0)]),
            Err(Error::NegativeWeight { .. })
        ));
    }

    #[test]
    fn neumann_2d_row_sums_vanish() {
        let a = neumann_2d(3, 2).unwrap();
        for i in 0..6 {
            assert_eq!(a.row(i).iter().sum::<f64>(), 0.0);
        }
        assert_eq!(a[(0, 0)], 2.0);
        assert_eq!(a[(1, 1)], 3.0);
    }

    #[test]
    fn random_rank() {
        let spec = ProblemSpec::RandomSpsd { n: 10, rank: 6, seed: 7 };
        let prob = generate_problem(&spec, 0, None).unwrap();
        assert_eq!(prob.a.rank(), 6);
        assert!(random_spsd(5, 6, 0).is_err());
        assert!(neumann_1d(1).is_err());
    }

    #[test]
    fn rhs_is_consistent_and_reproducible() {
        let spec = ProblemSpec::NeumannLaplacian2D { nx: 4, ny: 4 };
        let p1 = generate_problem(&spec, 3, None).unwrap();
        let p2 = generate_problem(&spec, 3, None).unwrap();
        assert_eq!(p1.f, p2.f);
        let z = p1.a.range_null_bases().1.unwrap();
        assert!(dot(&z.column(0), &p1.f).abs() < 1e-13);
        assert_eq!(p1.p.shape(), (16, 8));
    }

    #[test]
    fn edge_list_parsing() {
        let (n, e) = parse_edge_list("# two triangles\nn 7\n0 1\n1 2 2.5\n").unwrap();
        assert_eq!(n, 7);
        assert_eq!(e, vec![(0, 1, 1.0), (1, 2, 2.5)]);
        let (n, _) = parse_edge_list("0 4\n").unwrap();
        assert_eq!(n, 5);
        assert!(parse_edge_list("0 x\n").unwrap_err().to_string().contains("line 1"));
    }
}
