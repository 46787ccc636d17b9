//! Inexact two-grid analysis: spectral equivalence of `B_c` and `A_c`, the
//! alpha/beta constants, `F_ITG`, and the two-sided and epsilon bounds.

use serde::Serialize;

use crate::analysis::exact::{
    check_coarse_shape, coarse_form, delta_tg, lambda, seminorm_oracle, sigma_tg, smoother_floor,
    sqrt_complement, sqrt_complement_cut, unit_scale_nullity, Iteration,
};
use crate::error::{Error, Result};
use crate::linalg::{null_intersection_dim, sym_eig, DenseMatrix, SpsdOperator, TolerancePolicy};
use crate::model::TwoGridHierarchy;

/// Best spectral-equivalence constants between `A_c` and `B_c` on their common range.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectralEquivalence {
    pub s: usize,
    /// `lambda_{n_c-s+1}` and `lambda_max` of `B_c^{+/2} A_c B_c^{+/2}`.
    pub alpha1: f64,
    pub alpha2: f64,
    /// Best `c1, c2` in `c1 A_c <= B_c <= c2 A_c`, from `A_c^{+/2} B_c A_c^{+/2}`.
    pub c1: f64,
    pub c2: f64,
    /// Best `d1, d2` in `d1 A_c^+ <= B_c^+ <= d2 A_c^+`, from `A_c^{1/2} B_c^+ A_c^{1/2}`.
    pub d1: f64,
    pub d2: f64,
}

/// Rejects `B_c` unless `R(B_c) = R(A_c)`: equal ranks and a shared null space of full dimension.
pub fn check_range(ac: &SpsdOperator, bc: &SpsdOperator, tol: &TolerancePolicy) -> Result<()> {
    let nc = ac.dim();
    let shared = null_intersection_dim(ac.matrix(), bc.matrix(), tol)?.dim;
    if bc.rank() != ac.rank() || shared != nc - ac.rank() {
        return Err(Error::RangeMismatch {
            rank_bc: bc.rank(),
            rank_ac: ac.rank(),
            shared_null: shared,
            expected_null: nc - ac.rank(),
        });
    }
    Ok(())
}

fn range_constants(x: &DenseMatrix, nc: usize, s: usize) -> Result<(f64, f64)> {
    let eigs = sym_eig(&x.symmetrized())?.eigenvalues;
    Ok((lambda(&eigs, nc - s + 1)?, lambda(&eigs, nc)?))
}

pub fn spectral_equivalence(
    ac: &SpsdOperator,
    bc: &SpsdOperator,
    tol: &TolerancePolicy,
) -> Result<SpectralEquivalence> {
    if ac.dim() != bc.dim() {
        return Err(Error::ShapeMismatch {
            context: "spectral equivalence",
            expected: ac.matrix().shape(),
            got: bc.matrix().shape(),
        });
    }
    check_range(ac, bc, tol)?;
    let (nc, s) = (ac.dim(), ac.rank());
    let (alpha1, alpha2) = range_constants(&bc.pinv_sqrt().sandwich(ac.matrix()), nc, s)?;
    let (c1, c2) = range_constants(&ac.pinv_sqrt().sandwich(bc.matrix()), nc, s)?;
    let (d1, d2) = range_constants(&ac.sqrt().sandwich(bc.pinv()), nc, s)?;
    Ok(SpectralEquivalence {
        s,
        alpha1,
        alpha2,
        c1,
        c2,
        d1,
        d2,
    })
}

fn damped(a: f64) -> f64 {
    (2.0 - a) * a
}

/// `(beta1, beta2)` from `alpha1 <= alpha2 < 2`.
pub fn beta(alpha1: f64, alpha2: f64) -> (f64, f64) {
    if alpha2 <= 1.0 {
        (damped(alpha1), damped(alpha2))
    } else if alpha1 <= 1.0 {
        (damped(alpha1).min(damped(alpha2)), 1.0)
    } else {
        (damped(alpha2), damped(alpha1))
    }
}

/// The scalars the inexact bounds are built from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInputs {
    pub sigma_tg: f64,
    pub delta_tg: f64,
    /// `lambda_{n-r+1}(Mtilde A)`.
    pub smoother_floor: f64,
}

impl BoundInputs {
    pub fn from_hierarchy(h: &TwoGridHierarchy) -> Result<Self> {
        Ok(Self {
            sigma_tg: sigma_tg(h)?.0,
            delta_tg: delta_tg(h)?.delta_tg,
            smoother_floor: smoother_floor(h)?,
        })
    }

    /// `L(beta2) = sqrt(1 - min{mu + beta2 (1 - delta), sigma})`.
    pub fn lower(&self, beta2: f64) -> f64 {
        let inner = self.smoother_floor + beta2 * (1.0 - self.delta_tg);
        sqrt_complement(inner.min(self.sigma_tg))
    }

    /// `U(beta1) = sqrt(1 - max{mu, beta1 sigma, sigma - (1 - beta1)(1 - delta)})`.
    pub fn upper(&self, beta1: f64) -> f64 {
        let sigma = self.sigma_tg;
        let a = self.smoother_floor;
        let b = beta1 * sigma;
        let c = sigma - (1.0 - beta1) * (1.0 - self.delta_tg);
        sqrt_complement(a.max(b).max(c))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InexactFactorReport {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub delta_tg: f64,
    pub delta_guard_ok: bool,
    pub sigma_tg: f64,
    pub lower_l: f64,
    pub upper_u: f64,
    /// `sqrt(1 - lambda_{n-r+1}(F_ITG))`.
    pub factor_exact_itg: f64,
    pub factor_oracle: f64,
    pub nullity_fitg: usize,
}

/// `Btilde_c^+ = 2 B_c^+ - B_c^+ A_c B_c^+`.
pub fn btilde_pinv(ac: &SpsdOperator, bc: &SpsdOperator) -> DenseMatrix {
    let bp = bc.pinv();
    bp.scale(2.0).sub(&bp.sandwich(ac.matrix())).symmetrized()
}

/// `F_ITG = Hbar + (I - K^T) A^{1/2} P Btilde_c^+ P^T A^{1/2} (I - K)`.
pub fn f_itg(h: &TwoGridHierarchy, bc: &SpsdOperator) -> DenseMatrix {
    let y = h.sqrt_a_p();
    let c = y.transpose().sandwich(&btilde_pinv(h.ac(), bc));
    coarse_form(h, &c)
}

/// Full analysis of the inexact method with the linear coarse solver `B_c^+`.
///
/// Requires `R(B_c) = R(A_c)` and `alpha2 < 2`; otherwise reports the range
/// defect or the minimal scaling of `B_c` instead of computing bounds.
pub fn inexact_linear_analysis(
    h: &TwoGridHierarchy,
    bc: &SpsdOperator,
) -> Result<InexactFactorReport> {
    check_coarse_shape(h, bc)?;
    let eq = spectral_equivalence(h.ac(), bc, h.tolerance())?;
    if eq.alpha2 >= 2.0 {
        return Err(Error::AlphaTooLarge {
            alpha2: eq.alpha2,
            min_scale: eq.alpha2 / 2.0,
        });
    }
    let (beta1, beta2) = beta(eq.alpha1, eq.alpha2);
    let delta = delta_tg(h)?;
    let inputs = BoundInputs {
        sigma_tg: sigma_tg(h)?.0,
        delta_tg: delta.delta_tg,
        smoother_floor: smoother_floor(h)?,
    };

    let f_eigs = sym_eig(&f_itg(h, bc))?.eigenvalues;
    let factor_exact_itg =
        sqrt_complement_cut(lambda(&f_eigs, h.n() - h.r() + 1)?, h.tolerance().rank_rel_tol);
    Ok(InexactFactorReport {
        alpha1: eq.alpha1,
        alpha2: eq.alpha2,
        beta1,
        beta2,
        delta_tg: delta.delta_tg,
        delta_guard_ok: delta.guard_ok,
        sigma_tg: inputs.sigma_tg,
        lower_l: inputs.lower(beta2),
        upper_u: inputs.upper(beta1),
        factor_exact_itg,
        factor_oracle: seminorm_oracle(h, Iteration::Itg(bc))?,
        nullity_fitg: unit_scale_nullity(&f_eigs, h),
    })
}

/// `U(1 - eps^2)`: the contraction bound for any coarse solver with `A_c`-relative error at most `eps`.
pub fn general_epsilon_bound(h: &TwoGridHierarchy, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidEpsilon { eps });
    }
    Ok(BoundInputs::from_hierarchy(h)?.upper(1.0 - eps * eps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_branches() {
        assert_eq!(beta(0.5, 0.5), (0.75, 0.75));
        assert_eq!(beta(1.0, 1.0), (1.0, 1.0));
        let (b1, b2) = beta(0.5, 1.5);
        assert_eq!((b1, b2), (0.75, 1.0));
        assert_eq!(beta(1.2, 1.5), (damped(1.5), damped(1.2)));
    }

    #[test]
    fn beta_is_continuous_at_one() {
        let eps = 1e-12;
        let close = |x: (f64, f64), y: (f64, f64)| (x.0 - y.0).abs() < 1e-11 && (x.1 - y.1).abs() < 1e-11;
        for &a1 in &[0.3, 0.9, 1.0] {
            assert!(close(beta(a1, 1.0), beta(a1, 1.0 + eps)));
        }
        for &a2 in &[1.0 + eps, 1.4, 1.9] {
            assert!(close(beta(1.0, a2), beta(1.0 + eps, a2.max(1.0 + eps))));
        }
    }

    #[test]
    fn upper_and_lower_at_beta_one() {
        let b = BoundInputs {
            sigma_tg: 0.4,
            delta_tg: 0.7,
            smoother_floor: 0.1,
        };
        assert_eq!(b.upper(1.0), (0.6f64).sqrt());
        assert_eq!(b.lower(1.0), (0.6f64).sqrt());
        assert!(b.lower(0.8) <= b.upper(0.8));
    }
}
