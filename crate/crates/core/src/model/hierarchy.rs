//! Two-grid hierarchy assembly.
//!
//! Besides `A_c`, `Mbar`, `Mtilde` and `Pi_A`, the hierarchy caches the
//! `A^{1/2}`-conjugated forms every analysis routine works with:
//! `K = A^{1/2} M A^{1/2}`, `Hbar = A^{1/2} Mbar A^{1/2}`,
//! `Htilde = A^{1/2} Mtilde A^{1/2}` and `Pi = A^{1/2} P A_c^+ P^T A^{1/2}`.

use crate::error::{Error, Result};
use crate::linalg::{spsd_certify, sym_eig, DenseMatrix, SpsdOperator, SymEigen, TolerancePolicy};
use crate::model::smoother::{build_smoother, mbar, mtilde, SmootherSpec};

#[derive(Clone, Debug)]
pub struct TwoGridHierarchy {
    a: SpsdOperator,
    m: DenseMatrix,
    p: DenseMatrix,
    ac: SpsdOperator,
    mbar: DenseMatrix,
    mtilde: DenseMatrix,
    pi_a: DenseMatrix,
    pi: DenseMatrix,
    k: DenseMatrix,
    hbar: DenseMatrix,
    htilde: DenseMatrix,
    htilde_eig: SymEigen,
    smoother: SmootherSpec,
    tol: TolerancePolicy,
}

impl TwoGridHierarchy {
    pub fn a(&self) -> &SpsdOperator {
        &self.a
    }

    /// The smoother `M`.
    pub fn m(&self) -> &DenseMatrix {
        &self.m
    }

    /// The prolongation `P`, `n x n_c`.
    pub fn p(&self) -> &DenseMatrix {
        &self.p
    }

    /// `A_c = P^T A P`.
    pub fn ac(&self) -> &SpsdOperator {
        &self.ac
    }

    pub fn mbar(&self) -> &DenseMatrix {
        &self.mbar
    }

    pub fn mtilde(&self) -> &DenseMatrix {
        &self.mtilde
    }

    /// `Pi_A = P A_c^+ P^T A`.
    pub fn pi_a(&self) -> &DenseMatrix {
        &self.pi_a
    }

    /// `Pi = A^{1/2} P A_c^+ P^T A^{1/2}`, an orthogonal projector.
    pub fn pi(&self) -> &DenseMatrix {
        &self.pi
    }

    /// `K = A^{1/2} M A^{1/2}`.
    pub fn k(&self) -> &DenseMatrix {
        &self.k
    }

    /// `A^{1/2} Mbar A^{1/2}`.
    pub fn hbar(&self) -> &DenseMatrix {
        &self.hbar
    }

    /// `A^{1/2} Mtilde A^{1/2}`.
    pub fn htilde(&self) -> &DenseMatrix {
        &self.htilde
    }

    pub fn htilde_eig(&self) -> &SymEigen {
        &self.htilde_eig
    }

    pub fn smoother(&self) -> &SmootherSpec {
        &self.smoother
    }

    pub fn tolerance(&self) -> &TolerancePolicy {
        &self.tol
    }

    pub fn n(&self) -> usize {
        self.a.dim()
    }

    pub fn nc(&self) -> usize {
        self.p.cols()
    }

    /// `r = rank(A)`.
    pub fn r(&self) -> usize {
        self.a.rank()
    }

    /// `s = rank(A_c)`.
    pub fn s(&self) -> usize {
        self.ac.rank()
    }

    /// `A^{1/2} P`.
    pub fn sqrt_a_p(&self) -> DenseMatrix {
        self.a.sqrt().matmul(&self.p)
    }
}

/// Assembles the hierarchy for `(A, P, M)` and checks its standing assumptions:
/// `n_c < n`, `A_c != 0`, `A^{1/2} Mbar A^{1/2} >= 0` and `s <= r`.
pub fn build_hierarchy(
    a: &SpsdOperator,
    p: &DenseMatrix,
    spec: &SmootherSpec,
    tol: &TolerancePolicy,
) -> Result<TwoGridHierarchy> {
    let n = a.dim();
    if p.rows() != n {
        return Err(Error::ShapeMismatch {
            context: "prolongation",
            expected: (n, p.cols()),
            got: p.shape(),
        });
    }
    let nc = p.cols();
    if nc >= n {
        return Err(Error::CoarseNotSmaller { n, nc });
    }
    let m = build_smoother(spec, a)?;

    let ac_raw = p.sandwich(a.matrix()).symmetrized();
    let ac_lmax = sym_eig(&ac_raw)?.lambda_max();
    let ptp_lmax = sym_eig(&p.tr_matmul(p))?.lambda_max();
    if ac_lmax <= tol.rank_rel_tol * a.lambda_max() * ptp_lmax {
        return Err(Error::ZeroCoarseMatrix { lambda_max: ac_lmax });
    }
    let ac = spsd_certify(&ac_raw, tol)?;
    if ac.rank() > a.rank() {
        return Err(Error::RankInconsistent {
            r: a.rank(),
            s: ac.rank(),
        });
    }

    let mbar_m = mbar(&m, a)?;
    let mtilde_m = mtilde(&m, a)?;
    let sa = a.sqrt();
    let hbar = sa.sandwich(&mbar_m).symmetrized();
    let hbar_min = sym_eig(&hbar)?.lambda_min();
    if hbar_min < -tol.psd_slack {
        return Err(Error::SmootherAssumption {
            min_eigenvalue: hbar_min,
        });
    }
    let htilde = sa.sandwich(&mtilde_m).symmetrized();
    let htilde_eig = sym_eig(&htilde)?;
    let k = sa.matmul(&m).matmul(sa);

    let y = sa.matmul(p);
    let pi = y.transpose().sandwich(ac.pinv()).symmetrized();
    let pi_a = p.matmul(ac.pinv()).matmul(&p.transpose()).matmul(a.matrix());

    Ok(TwoGridHierarchy {
        a: a.clone(),
        m,
        p: p.clone(),
        ac,
        mbar: mbar_m,
        mtilde: mtilde_m,
        pi_a,
        pi,
        k,
        hbar,
        htilde,
        htilde_eig,
        smoother: spec.clone(),
        tol: *tol,
    })
}

/// Unsmoothed aggregation: column `j` is the indicator of indices `j k .. min((j+1) k, n)`.
pub fn aggregation_prolongation(n: usize, k: usize) -> Result<DenseMatrix> {
    if k < 2 || n < 2 {
        return Err(Error::InvalidProblem(format!(
            "aggregation needs n >= 2 and aggregate size k >= 2, got n = {n}, k = {k}"
        )));
    }
    let nc = n.div_ceil(k);
    let mut p = DenseMatrix::zeros(n, nc);
    for i in 0..n {
        p[(i, i / k)] = 1.0;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> TolerancePolicy {
        TolerancePolicy::for_dim(8)
    }

    fn neumann(n: usize) -> SpsdOperator {
        let mut a = DenseMatrix::zeros(n, n);
        for i in 0..n - 1 {
            a[(i, i)] += 1.0;
            a[(i + 1, i + 1)] += 1.0;
            a[(i, i + 1)] -= 1.0;
            a[(i + 1, i)] -= 1.0;
        }
        spsd_certify(&a, &TolerancePolicy::for_dim(n)).unwrap()
    }

    #[test]
    fn diagonal_galerkin_product() {
        let a = spsd_certify(&DenseMatrix::from_diag(&[2.0, 1.0, 0.0]), &tol()).unwrap();
        let p = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]).unwrap();
        let m = SmootherSpec::Custom {
            m: DenseMatrix::identity(3).scale(0.5),
        };
        let h = build_hierarchy(&a, &p, &m, &tol()).unwrap();
        assert_eq!(h.ac().matrix(), &DenseMatrix::from_diag(&[2.0, 1.0]));
        assert_eq!((h.r(), h.s()), (2, 2));
    }

    #[test]
    fn zero_column_prolongation_is_accepted() {
        let a = spsd_certify(&DenseMatrix::from_diag(&[2.0, 1.0, 1.0]), &tol()).unwrap();
        let p = DenseMatrix::from_rows(&[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0]]).unwrap();
        let h = build_hierarchy(&a, &p, &SmootherSpec::GaussSeidel, &tol()).unwrap();
        assert_eq!((h.nc(), h.s()), (2, 1));
    }

    #[test]
    fn neumann_pairwise_ranks() {
        let a = neumann(8);
        let p = aggregation_prolongation(8, 2).unwrap();
        let h = build_hierarchy(&a, &p, &SmootherSpec::jacobi(2.0 / 3.0), &tol()).unwrap();
        assert_eq!((h.r(), h.s()), (7, 3));
        let pi = h.pi();
        assert!(pi.matmul(pi).sub(pi).max_abs() < 1e-12);
        assert!((pi.trace() - 3.0).abs() < 1e-12);
        let pa = h.pi_a();
        assert!(pa.matmul(pa).sub(pa).max_abs() < 1e-12);
    }

    #[test]
    fn assumption_failures() {
        let a = neumann(4);
        let p = aggregation_prolongation(4, 2).unwrap();
        let t = TolerancePolicy::for_dim(4);
        let e = build_hierarchy(&a, &p, &SmootherSpec::jacobi(3.0), &t).unwrap_err();
        assert!(matches!(e, Error::SmootherAssumption { .. }));

        let square = DenseMatrix::identity(4);
        assert_eq!(
            build_hierarchy(&a, &square, &SmootherSpec::GaussSeidel, &t).unwrap_err(),
            Error::CoarseNotSmaller { n: 4, nc: 4 }
        );

        // constant vector spans N(A): A_c vanishes
        let ones = DenseMatrix::new(4, 1, vec![1.0; 4]).unwrap();
        assert!(matches!(
            build_hierarchy(&a, &ones, &SmootherSpec::GaussSeidel, &t),
            Err(Error::ZeroCoarseMatrix { .. })
        ));
    }

    #[test]
    fn aggregation_shapes() {
        let p = aggregation_prolongation(5, 2).unwrap();
        assert_eq!(p.shape(), (5, 3));
        assert_eq!(p.column(2), vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(aggregation_prolongation(5, 1).is_err());
    }
}
