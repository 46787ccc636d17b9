use crate::error::{Error, Result};
use crate::linalg::{sym_eig, DenseMatrix, SpsdOperator};

/// How the smoother `M` is built from `A`.
#[derive(Clone, Debug, PartialEq)]
pub enum SmootherSpec {
    /// `M = omega D^{-1}`.
    WeightedJacobi { omega: f64 },
    /// `M = (D + L)^{-1}` with `A = D + L + L^T`.
    GaussSeidel,
    /// A user-supplied `n x n` matrix.
    Custom { m: DenseMatrix },
}

impl SmootherSpec {
    pub fn jacobi(omega: f64) -> Self {
        Self::WeightedJacobi { omega }
    }

    /// The zero smoother (no relaxation).
    pub fn zero(n: usize) -> Self {
        Self::Custom {
            m: DenseMatrix::zeros(n, n),
        }
    }

    /// Short label used in reports, e.g. `jacobi:0.5`, `gs`, `custom`.
    pub fn label(&self) -> String {
        match self {
            Self::WeightedJacobi { omega } => format!("jacobi:{omega}"),
            Self::GaussSeidel => "gs".to_string(),
            Self::Custom { m } if m.max_abs() == 0.0 => "zero".to_string(),
            Self::Custom { .. } => "custom".to_string(),
        }
    }
}

fn positive_diagonal(a: &DenseMatrix) -> Result<Vec<f64>> {
    let d = a.diagonal();
    // an SPSD matrix has d_i >= 0, and d_i = 0 forces a zero row and column
    if let Some(index) = d.iter().position(|&x| x <= 0.0) {
        return Err(Error::ZeroDiagonal { index });
    }
    Ok(d)
}

/// Upper end of the admissible Jacobi range, `2 / lambda_max(D^{-1} A)`.
///
/// Computed on the symmetric similar form `D^{-1/2} A D^{-1/2}`.
pub fn jacobi_omega_limit(a: &SpsdOperator) -> Result<f64> {
    let d = positive_diagonal(a.matrix())?;
    let n = d.len();
    let inv_sqrt: Vec<f64> = d.iter().map(|x| 1.0 / x.sqrt()).collect();
    let mut s = a.matrix().clone();
    for i in 0..n {
        for j in 0..n {
            s[(i, j)] *= inv_sqrt[i] * inv_sqrt[j];
        }
    }
    Ok(2.0 / sym_eig(&s)?.lambda_max())
}

/// Explicit inverse of the lower triangle `D + L` of `a`, by forward substitution per column.
fn lower_triangular_inverse(a: &DenseMatrix) -> DenseMatrix {
    let n = a.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = 1.0 / a[(j, j)];
        for i in (j + 1)..n {
            let mut acc = 0.0;
            for k in j..i {
                acc += a[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -acc / a[(i, i)];
        }
    }
    inv
}

/// Assembles the smoother matrix `M`.
///
/// Jacobi weights at or above [`jacobi_omega_limit`] are accepted with a warning;
/// the hierarchy's `A^{1/2} Mbar A^{1/2} >= 0` check is the binding test.
pub fn build_smoother(spec: &SmootherSpec, a: &SpsdOperator) -> Result<DenseMatrix> {
    let n = a.dim();
    match spec {
        SmootherSpec::WeightedJacobi { omega } => {
            if !omega.is_finite() || *omega <= 0.0 {
                return Err(Error::InvalidOmega { omega: *omega });
            }
            let d = positive_diagonal(a.matrix())?;
            let limit = jacobi_omega_limit(a)?;
            if *omega >= limit {
                log::warn!(
                    "Jacobi weight {omega} is outside (0, {limit:.6}); ||I - MA||_A <= 1 may fail"
                );
            }
            let inv: Vec<f64> = d.iter().map(|x| omega / x).collect();
            Ok(DenseMatrix::from_diag(&inv))
        }
        SmootherSpec::GaussSeidel => {
            positive_diagonal(a.matrix())?;
            Ok(lower_triangular_inverse(a.matrix()))
        }
        SmootherSpec::Custom { m } => {
            if m.shape() != (n, n) {
                return Err(Error::ShapeMismatch {
                    context: "custom smoother",
                    expected: (n, n),
                    got: m.shape(),
                });
            }
            Ok(m.clone())
        }
    }
}

fn check_square_pair(m: &DenseMatrix, a: &SpsdOperator, context: &'static str) -> Result<()> {
    let n = a.dim();
    if m.shape() != (n, n) {
        return Err(Error::ShapeMismatch {
            context,
            expected: (n, n),
            got: m.shape(),
        });
    }
    Ok(())
}

/// `Mbar = M + M^T - M^T A M`.
pub fn mbar(m: &DenseMatrix, a: &SpsdOperator) -> Result<DenseMatrix> {
    check_square_pair(m, a, "mbar")?;
    let mt = m.transpose();
    Ok(m.add(&mt).sub(&m.sandwich(a.matrix())).symmetrized())
}

/// `Mtilde = M + M^T - M A M^T`.
pub fn mtilde(m: &DenseMatrix, a: &SpsdOperator) -> Result<DenseMatrix> {
    check_square_pair(m, a, "mtilde")?;
    let mt = m.transpose();
    Ok(m.add(&mt).sub(&mt.sandwich(a.matrix())).symmetrized())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{spsd_certify, TolerancePolicy};

    fn certify(m: &DenseMatrix) -> SpsdOperator {
        spsd_certify(m, &TolerancePolicy::for_dim(m.rows())).unwrap()
    }

    #[test]
    fn jacobi_on_unit_diagonal() {
        let a = certify(&DenseMatrix::from_rows(&[[1.0, -0.5], [-0.5, 1.0]]).unwrap());
        let m = build_smoother(&SmootherSpec::jacobi(0.5), &a).unwrap();
        assert_eq!(m, DenseMatrix::identity(2).scale(0.5));
        // lambda_max(A) = 1.5
        assert!((jacobi_omega_limit(&a).unwrap() - 2.0 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn gauss_seidel_two_by_two() {
        let a = certify(&DenseMatrix::from_rows(&[[2.0, -1.0], [-1.0, 2.0]]).unwrap());
        let m = build_smoother(&SmootherSpec::GaussSeidel, &a).unwrap();
        let expect = DenseMatrix::from_rows(&[[0.5, 0.0], [0.25, 0.5]]).unwrap();
        assert!(m.sub(&expect).max_abs() < 1e-16);
    }

    #[test]
    fn gauss_seidel_inverts_lower_triangle() {
        let a = DenseMatrix::from_rows(&[
            [4.0, -1.0, 0.5, 0.0],
            [-1.0, 3.0, -1.0, 0.2],
            [0.5, -1.0, 5.0, -2.0],
            [0.0, 0.2, -2.0, 3.0],
        ])
        .unwrap();
        let m = build_smoother(&SmootherSpec::GaussSeidel, &certify(&a)).unwrap();
        let mut lower = a.clone();
        for i in 0..4 {
            for j in (i + 1)..4 {
                lower[(i, j)] = 0.0;
            }
        }
        assert!(lower.matmul(&m).sub(&DenseMatrix::identity(4)).max_abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_diagonal_and_bad_omega() {
        let a = certify(&DenseMatrix::from_diag(&[1.0, 0.0]));
        assert_eq!(
            build_smoother(&SmootherSpec::GaussSeidel, &a).unwrap_err(),
            Error::ZeroDiagonal { index: 1 }
        );
        let b = certify(&DenseMatrix::identity(2));
        assert!(matches!(
            build_smoother(&SmootherSpec::jacobi(0.0), &b),
            Err(Error::InvalidOmega { .. })
        ));
        let wrong = SmootherSpec::Custom {
            m: DenseMatrix::zeros(3, 3),
        };
        assert!(matches!(build_smoother(&wrong, &b), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn mbar_special_cases() {
        let a = certify(&DenseMatrix::from_rows(&[[1.0, -0.5], [-0.5, 1.0]]).unwrap());
        let i = DenseMatrix::identity(2);
        let expect = i.scale(2.0).sub(a.matrix());
        assert!(mbar(&i, &a).unwrap().sub(&expect).max_abs() < 1e-15);
        let z = DenseMatrix::zeros(2, 2);
        assert_eq!(mbar(&z, &a).unwrap(), z);
        assert_eq!(mtilde(&z, &a).unwrap(), z);

        // Jacobi on unit diagonal: 2 omega I - omega^2 A
        let w = 0.7;
        let m = i.scale(w);
        let expect = i.scale(2.0 * w).sub(&a.matrix().scale(w * w));
        assert!(mbar(&m, &a).unwrap().sub(&expect).max_abs() < 1e-15);
        assert_eq!(mbar(&m, &a).unwrap(), mtilde(&m, &a).unwrap());
    }
}
