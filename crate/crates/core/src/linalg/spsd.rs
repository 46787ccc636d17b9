//! Certified SPSD operators: eigendecomposition, numerical rank, square root and
//! Moore-Penrose inverse, all cut by one rank threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::eigen::{sym_eig, SymEigen};
use crate::linalg::matrix::DenseMatrix;

/// Thresholds shared by every module, so that `r`, `s` and every nullity decision
/// are made with the same cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Eigenvalues at or below `rank_rel_tol * lambda_max` count as zero.
    pub rank_rel_tol: f64,
    /// Negative eigenvalues down to `-psd_slack * lambda_max` are roundoff, not indefiniteness.
    pub psd_slack: f64,
    /// Tolerance for identity, projector and oracle comparisons.
    pub match_tol: f64,
}

impl TolerancePolicy {
    pub const DEFAULT_PSD_SLACK: f64 = 1e-10;
    pub const DEFAULT_MATCH_TOL: f64 = 1e-10;

    pub fn new(rank_rel_tol: f64, psd_slack: f64, match_tol: f64) -> Result<Self> {
        for (name, value) in [
            ("rank_rel_tol", rank_rel_tol),
            ("psd_slack", psd_slack),
            ("match_tol", match_tol),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(Self {
            rank_rel_tol,
            psd_slack,
            match_tol,
        })
    }

    /// Default policy for an `n x n` problem: `rank_rel_tol = 32 n eps`.
    pub fn for_dim(n: usize) -> Self {
        Self {
            rank_rel_tol: 32.0 * n.max(1) as f64 * f64::EPSILON,
            psd_slack: Self::DEFAULT_PSD_SLACK,
            match_tol: Self::DEFAULT_MATCH_TOL,
        }
    }

    /// [`for_dim`](Self::for_dim) with `RANK_REL_TOL` and `MATCH_TOL` environment overrides.
    pub fn from_env(n: usize) -> Result<Self> {
        let base = Self::for_dim(n);
        let read = |key: &'static str, default: f64| -> Result<f64> {
            match std::env::var(key) {
                Ok(v) => v.trim().parse::<f64>().map_err(|_| Error::InvalidTolerance {
                    name: key,
                    value: f64::NAN,
                }),
                Err(_) => Ok(default),
            }
        };
        Self::new(
            read("RANK_REL_TOL", base.rank_rel_tol)?,
            base.psd_slack,
            read("MATCH_TOL", base.match_tol)?,
        )
    }

    /// Number of entries of an ascending spectrum above the rank cut relative to `scale`.
    pub fn count_above(&self, ascending: &[f64], scale: f64) -> usize {
        if scale <= 0.0 {
            return 0;
        }
        let cut = self.rank_rel_tol * scale;
        ascending.iter().filter(|&&l| l > cut).count()
    }
}

/// A symmetric positive semidefinite matrix together with its spectral data.
#[derive(Clone, Debug)]
pub struct SpsdOperator {
    matrix: DenseMatrix,
    eig: SymEigen,
    rank: usize,
    sqrt: DenseMatrix,
    pinv: DenseMatrix,
    tol: TolerancePolicy,
}

impl SpsdOperator {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn eig(&self) -> &SymEigen {
        &self.eig
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn nullity(&self) -> usize {
        self.dim() - self.rank
    }

    /// `S^{1/2}`.
    pub fn sqrt(&self) -> &DenseMatrix {
        &self.sqrt
    }

    /// `S^+`.
    pub fn pinv(&self) -> &DenseMatrix {
        &self.pinv
    }

    pub fn tolerance(&self) -> &TolerancePolicy {
        &self.tol
    }

    pub fn lambda_max(&self) -> f64 {
        self.eig.lambda_max()
    }

    fn cut(&self) -> f64 {
        self.tol.rank_rel_tol * self.lambda_max()
    }

    /// `(S^+)^{1/2}`, the square root of the pseudoinverse.
    pub fn pinv_sqrt(&self) -> DenseMatrix {
        let cut = self.cut();
        self.eig
            .apply_fn(|l| if l > cut { 1.0 / l.sqrt() } else { 0.0 })
    }

    /// `S S^+`, the orthogonal projector onto `R(S)`.
    pub fn range_projector(&self) -> DenseMatrix {
        let cut = self.cut();
        self.eig.apply_fn(|l| if l > cut { 1.0 } else { 0.0 })
    }

    /// Orthonormal bases of `R(S)` (r columns) and `N(S)` (n - r columns, `None` if S is nonsingular).
    pub fn range_null_bases(&self) -> (DenseMatrix, Option<DenseMatrix>) {
        let n = self.dim();
        let k = self.nullity();
        let v = &self.eig.eigenvectors;
        let range = v.columns_range(k, n).expect("rank >= 1 for a certified operator");
        (range, v.columns_range(0, k))
    }

    /// Eigenvalue gap straddling the rank cut: `lambda_{n-r+1} - lambda_{n-r}` (0 below if S is nonsingular).
    pub fn rank_gap(&self) -> f64 {
        let k = self.nullity();
        let above = self.eig.eigenvalues[k];
        let below = if k == 0 { 0.0 } else { self.eig.eigenvalues[k - 1] };
        above - below
    }
}

/// Certifies `s` as SPSD and precomputes its rank, square root and pseudoinverse.
///
/// Eigenvalues in `[-psd_slack * lambda_max, 0)` are treated as zero. Eigenvalues at
/// or below the rank cut are dropped from both the square root and the pseudoinverse,
/// so that `N(S^{1/2}) = N(S) = N(S^+)` hold for the thresholded rank.
pub fn spsd_certify(s: &DenseMatrix, tol: &TolerancePolicy) -> Result<SpsdOperator> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let scale = s.max_abs();
    let asym = s.asymmetry();
    if asym > tol.match_tol * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    let matrix = s.symmetrized();
    let eig = sym_eig(&matrix)?;
    let lmax = eig.lambda_max();
    if lmax <= 0.0 {
        if eig.lambda_min() < 0.0 {
            return Err(Error::NotSpsd {
                min_eigenvalue: eig.lambda_min(),
                threshold: 0.0,
            });
        }
        return Err(Error::ZeroMatrix);
    }
    let floor = -tol.psd_slack * lmax;
    if eig.lambda_min() < floor {
        return Err(Error::NotSpsd {
            min_eigenvalue: eig.lambda_min(),
            threshold: floor,
        });
    }
    let cut = tol.rank_rel_tol * lmax;
    let rank = tol.count_above(&eig.eigenvalues, lmax);
    let sqrt = eig.apply_fn(|l| if l > cut { l.sqrt() } else { 0.0 });
    let pinv = eig.apply_fn(|l| if l > cut { 1.0 / l } else { 0.0 });
    Ok(SpsdOperator {
        matrix,
        eig,
        rank,
        sqrt,
        pinv,
        tol: *tol,
    })
}

/// Rank of a certified operator under its tolerance policy.
pub fn numerical_rank(s: &SpsdOperator) -> usize {
    s.rank()
}

/// Orthonormal bases of the range and null space; see [`SpsdOperator::range_null_bases`].
pub fn range_null_bases(s: &SpsdOperator) -> (DenseMatrix, Option<DenseMatrix>) {
    s.range_null_bases()
}

/// A thresholded nullity together with the margin around the cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NullityDecision {
    pub dim: usize,
    /// Largest relative singular value declared zero (0 if none).
    pub largest_dropped: f64,
    /// Smallest relative singular value kept (`None` if everything was dropped).
    pub smallest_kept: Option<f64>,
}

/// `dim N(K)` for an arbitrary matrix, from the Gram matrix `K^T K`.
pub fn nullity(k: &DenseMatrix, tol: &TolerancePolicy) -> Result<NullityDecision> {
    let gram = k.tr_matmul(k);
    let eig = sym_eig(&gram)?;
    let lmax = eig.lambda_max().max(0.0);
    let n = k.cols();
    if lmax == 0.0 {
        return Ok(NullityDecision {
            dim: n,
            largest_dropped: 0.0,
            smallest_kept: None,
        });
    }
    let kept = tol.count_above(&eig.eigenvalues, lmax);
    let dim = n - kept;
    let rel = |l: f64| (l.max(0.0) / lmax).sqrt();
    Ok(NullityDecision {
        dim,
        largest_dropped: if dim == 0 { 0.0 } else { rel(eig.eigenvalues[dim - 1]) },
        smallest_kept: (kept > 0).then(|| rel(eig.eigenvalues[dim])),
    })
}

/// `dim(N(K1) ∩ N(K2))`: the nullity of `K1` stacked over `K2`.
///
/// Each block is scaled to unit max-norm before stacking so that neither side
/// dominates the shared rank cut.
pub fn null_intersection_dim(
    k1: &DenseMatrix,
    k2: &DenseMatrix,
    tol: &TolerancePolicy,
) -> Result<NullityDecision> {
    if k1.cols() != k2.cols() {
        return Err(Error::ShapeMismatch {
            context: "null_intersection_dim",
            expected: (k2.rows(), k1.cols()),
            got: k2.shape(),
        });
    }
    let normalize = |k: &DenseMatrix| {
        let m = k.max_abs();
        if m > 0.0 {
            k.scale(1.0 / m)
        } else {
            k.clone()
        }
    };
    nullity(&normalize(k1).vstack(&normalize(k2)), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(n: usize) -> TolerancePolicy {
        TolerancePolicy::for_dim(n)
    }

    fn neumann(n: usize) -> DenseMatrix {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i)] += 1.0;
            a[(i + 1, i + 1)] += 1.0;
            a[(i, i + 1)] -= 1.0;
            a[(i + 1, i)] -= 1.0;
        }
        a
    }

    #[test]
    fn diagonal_pseudoinverse() {
        let s = spsd_certify(&DenseMatrix::from_diag(&[2.0, 0.0]), &tol(2)).unwrap();
        assert_eq!(s.rank(), 1);
        let sq = s.sqrt();
        assert!((sq[(0, 0)] - 2f64.sqrt()).abs() < 1e-15 && sq[(1, 1)] == 0.0);
        assert!((s.pinv()[(0, 0)] - 0.5).abs() < 1e-15 && s.pinv()[(1, 1)] == 0.0);
        let (range, null) = s.range_null_bases();
        assert_eq!(range.column(0).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![1.0, 0.0]);
        assert_eq!(null.unwrap().column(0).iter().map(|x| x.abs()).collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn identity_is_its_own_root_and_inverse() {
        let s = spsd_certify(&DenseMatrix::identity(4), &tol(4)).unwrap();
        assert_eq!(s.rank(), 4);
        assert!(s.sqrt().sub(&DenseMatrix::identity(4)).max_abs() < 1e-15);
        assert!(s.pinv().sub(&DenseMatrix::identity(4)).max_abs() < 1e-15);
        assert!(s.range_null_bases().1.is_none());
    }

    #[test]
    fn neumann_null_space_is_constant() {
        let a = neumann(6);
        let ones = vec![1.0; 6];
        assert!(a.matvec(&ones).iter().all(|&x| x == 0.0));
        let s = spsd_certify(&a, &tol(6)).unwrap();
        assert_eq!(numerical_rank(&s), 5);

        let s4 = spsd_certify(&neumann(4), &tol(4)).unwrap();
        let null = s4.range_null_bases().1.unwrap();
        assert_eq!(null.cols(), 1);
        let z = null.column(0);
        let sign = z[0].signum();
        for x in z {
            assert!((sign * x - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn rank_counts_and_zero_rejected() {
        let s = spsd_certify(&DenseMatrix::from_diag(&[1.0, 1.0, 0.0]), &tol(3)).unwrap();
        assert_eq!(s.rank(), 2);
        assert_eq!(
            spsd_certify(&DenseMatrix::zeros(3, 3), &tol(3)).unwrap_err(),
            Error::ZeroMatrix
        );
    }

    #[test]
    fn rejects_indefinite_and_asymmetric() {
        let e = spsd_certify(&DenseMatrix::from_diag(&[1.0, -0.5]), &tol(2)).unwrap_err();
        assert!(matches!(e, Error::NotSpsd { .. }));
        let m = DenseMatrix::from_rows(&[[1.0, 0.5], [0.0, 1.0]]).unwrap();
        assert!(matches!(spsd_certify(&m, &tol(2)), Err(Error::NotSymmetric { .. })));
        // roundoff-level negativity is clamped
        let ok = spsd_certify(&DenseMatrix::from_diag(&[1.0, -1e-14]), &tol(2)).unwrap();
        assert_eq!(ok.rank(), 1);
    }

    #[test]
    fn intersection_dims() {
        let t = tol(2);
        let k1 = DenseMatrix::from_rows(&[[1.0, 0.0]]).unwrap();
        let k2 = DenseMatrix::from_rows(&[[0.0, 1.0]]).unwrap();
        assert_eq!(null_intersection_dim(&k1, &k2, &t).unwrap().dim, 0);
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(null_intersection_dim(&z, &z, &t).unwrap().dim, 2);
        let bad = DenseMatrix::zeros(1, 3);
        assert!(null_intersection_dim(&k1, &bad, &t).is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(TolerancePolicy::new(0.0, 0.1, 0.1).is_err());
        assert!(TolerancePolicy::new(0.1, 1.0, 0.1).is_err());
        assert!(TolerancePolicy::new(1e-12, 1e-10, 1e-10).is_ok());
        let t = TolerancePolicy::for_dim(10);
        assert!((t.rank_rel_tol - 320.0 * f64::EPSILON).abs() < 1e-30);
    }
}
