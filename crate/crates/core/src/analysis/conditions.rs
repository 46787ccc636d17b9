use serde::Serialize;

use crate::error::Result;
use crate::linalg::{null_intersection_dim, nullity, sym_eig, NullityDecision};
use crate::model::TwoGridHierarchy;

/// Outcome of the smoother assumption and the two convergence conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    /// `||I - MA||_A <= 1`, i.e. `A^{1/2} Mbar A^{1/2} >= 0`.
    pub smoother_ok: bool,
    pub smoother_min_eigenvalue: f64,
    /// `N(A^{1/2} Mbar A^{1/2}) ∩ N(P^T (I - AM) A^{1/2}) = N(A)`.
    pub equiv_cond_ok: bool,
    /// `Mbar >= 0` and `N(Mbar) ∩ R(A) = {0}`.
    pub suff_cond_ok: bool,
    pub intersection_dim: usize,
    pub nullity_a: usize,
    pub mbar_min_eigenvalue: f64,
    /// `dim(N(Mbar) ∩ R(A))`.
    pub mbar_range_intersection_dim: usize,
    pub equiv_margin: NullityDecision,
    pub suff_margin: NullityDecision,
}

/// Evaluates the conditions. Failures are reported, never raised.
pub fn check_conditions(h: &TwoGridHierarchy) -> Result<ConditionReport> {
    let tol = h.tolerance();
    let a = h.a();
    let sa = a.sqrt();

    let smoother_min = sym_eig(h.hbar())?.lambda_min();
    let smoother_ok = smoother_min >= -tol.psd_slack;

    // P^T (I - AM) A^{1/2} = P^T A^{1/2} (I - K)
    let k2 = h.p().tr_matmul(sa).matmul(&h.k().identity_minus());
    let equiv = null_intersection_dim(h.hbar(), &k2, tol)?;
    let nullity_a = a.nullity();

    let mbar_eig = sym_eig(h.mbar())?;
    let scale = mbar_eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()));
    let mbar_min = mbar_eig.lambda_min();
    let mbar_psd = mbar_min >= -tol.psd_slack * scale.max(f64::MIN_POSITIVE);
    let suff = match a.range_null_bases().1 {
        Some(z) => null_intersection_dim(h.mbar(), &z.transpose(), tol)?,
        None => nullity(h.mbar(), tol)?,
    };

    Ok(ConditionReport {
        smoother_ok,
        smoother_min_eigenvalue: smoother_min,
        equiv_cond_ok: equiv.dim == nullity_a,
        suff_cond_ok: mbar_psd && suff.dim == 0,
        intersection_dim: equiv.dim,
        nullity_a,
        mbar_min_eigenvalue: mbar_min,
        mbar_range_intersection_dim: suff.dim,
        equiv_margin: equiv,
        suff_margin: suff,
    })
}
