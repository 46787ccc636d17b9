//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Each sweep visits every off-diagonal pair `(p, q)` in row order and applies
//! the plane rotation that annihilates `a_pq`. The rotation is computed in the
//! Rutishauser form (`t = sgn(theta) / (|theta| + sqrt(theta^2 + 1))`), which
//! keeps the angle below pi/4 and gives quadratic convergence once the
//! off-diagonal mass is small. The visiting order is fixed, so identical input
//! produces bitwise identical output.

use crate::error::{Error, Result};
use crate::linalg::matrix::DenseMatrix;

const MAX_SWEEPS: usize = 100;
/// Sweeps stop once `off(S) <= STOP_REL * ||S||_F`.
const STOP_REL: f64 = 4.0 * f64::EPSILON;
/// Accepted residual if the sweep budget runs out.
const ACCEPT_REL: f64 = 1e-13;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors as columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SymEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

impl SymEigen {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `V diag(f(lambda)) V^T`.
    pub fn apply_fn(&self, f: impl Fn(f64) -> f64) -> DenseMatrix {
        let d: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        DenseMatrix::congruence_diag(&self.eigenvectors, &d).symmetrized()
    }
}

fn off_norm(a: &[f64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a symmetric matrix.
///
/// The input is symmetrized via `(S + S^T) / 2` before rotating; callers that
/// need to reject asymmetric input check [`DenseMatrix::asymmetry`] first.
pub fn sym_eig(s: &DenseMatrix) -> Result<SymEigen> {
    if !s.is_square() {
        return Err(Error::NotSquare {
            rows: s.rows(),
            cols: s.cols(),
        });
    }
    let n = s.rows();
    let mut a = s.symmetrized().as_slice().to_vec();
    let mut v = DenseMatrix::identity(n).as_slice().to_vec();

    let fro = s.frobenius_norm();
    let mut converged = fro == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged && sweeps < MAX_SWEEPS {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
        converged = off_norm(&a, n) <= STOP_REL * fro;
    }
    let residual = off_norm(&a, n);
    if !converged && residual > ACCEPT_REL * fro {
        return Err(Error::EigenNoConvergence { residual, sweeps });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| a[i * n + i]).collect();
    let vm = DenseMatrix::new(n, n, v).expect("finite rotations");
    Ok(SymEigen {
        eigenvalues,
        eigenvectors: vm.select_columns(&order),
    })
}

#[inline]
fn rotate(a: &mut [f64], v: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let new_kp = c * akp - s * akq;
        let new_kq = s * akp + c * akq;
        a[k * n + p] = new_kp;
        a[p * n + k] = new_kp;
        a[k * n + q] = new_kq;
        a[q * n + k] = new_kq;
    }
    a[p * n + p] = app - t * apq;
    a[q * n + q] = aqq + t * apq;
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;

    for k in 0..n {
        let vkp = v[k * n + p];
        let vkq = v[k * n + q];
        v[k * n + p] = c * vkp - s * vkq;
        v[k * n + q] = s * vkp + c * vkq;
    }
}
