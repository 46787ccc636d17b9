//! Exact two-grid convergence: the `sigma_TG` identity, the `F_TG` form, the
//! brute-force seminorm oracle and the two-sided smoother bounds.
//!
//! Every eigenvalue is taken on a symmetric matrix:
//! `Mtilde A (I - Pi_A)` through `(I - Pi) Htilde (I - Pi)`, `Mtilde A` through
//! `Htilde` and `Mtilde A Pi_A` through `Pi Htilde Pi`. Indices are 1-based and
//! ascending, as in `lambda_i`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig, DenseMatrix, SpsdOperator};
use crate::model::TwoGridHierarchy;

/// `lambda_i` of an ascending spectrum, 1-based.
pub(crate) fn lambda(eigs: &[f64], i: usize) -> Result<f64> {
    if i == 0 || i > eigs.len() {
        return Err(Error::InvalidProblem(format!(
            "eigenvalue index {i} outside 1..={}; rank thresholds are inconsistent",
            eigs.len()
        )));
    }
    Ok(eigs[i - 1])
}

/// `sqrt(1 - x)` clamped to `[0, 1]`.
pub(crate) fn sqrt_complement(x: f64) -> f64 {
    (1.0 - x).clamp(0.0, 1.0).sqrt()
}

/// [`sqrt_complement`] for an eigenvalue of an `F` form, whose spectrum lies in `[0, 1]`:
/// a complement at or below `tol` is roundoff and maps to 0.
pub(crate) fn sqrt_complement_cut(x: f64, tol: f64) -> f64 {
    if 1.0 - x <= tol {
        0.0
    } else {
        sqrt_complement(x)
    }
}

/// The smallest eigenvalue of `Mtilde A` on `R(A)`: `lambda_{n-r+1}(Htilde)`.
pub fn smoother_floor(h: &TwoGridHierarchy) -> Result<f64> {
    lambda(&h.htilde_eig().eigenvalues, h.n() - h.r() + 1)
}

/// `F_TG = Hbar + (I - K^T) Pi (I - K)`.
pub fn f_tg(h: &TwoGridHierarchy) -> DenseMatrix {
    coarse_form(h, h.pi())
}

/// `Hbar + (I - K^T) C (I - K)` for a symmetric `n x n` coarse term `C`.
pub(crate) fn coarse_form(h: &TwoGridHierarchy, c: &DenseMatrix) -> DenseMatrix {
    let i_k = h.k().identity_minus();
    h.hbar().add(&i_k.sandwich(c)).symmetrized()
}

/// Nullity of an SPSD matrix whose spectrum lies in `[0, 1]`, cut at `rank_rel_tol`.
pub(crate) fn unit_scale_nullity(eigs: &[f64], h: &TwoGridHierarchy) -> usize {
    let kept = h.tolerance().count_above(eigs, 1.0);
    eigs.len() - kept
}

/// `sigma_TG = lambda_{n-r+s+1}((I - Pi) Htilde (I - Pi))`, together with the
/// gap `lambda_{n-r+s+1} - lambda_{n-r+s}`. `s = r` gives `(1, None)`.
pub fn sigma_tg(h: &TwoGridHierarchy) -> Result<(f64, Option<f64>)> {
    let (n, r, s) = (h.n(), h.r(), h.s());
    if s == r {
        return Ok((1.0, None));
    }
    let i_pi = h.pi().identity_minus();
    let x = i_pi.sandwich(h.htilde()).symmetrized();
    let eigs = sym_eig(&x)?.eigenvalues;
    let idx = n - r + s + 1;
    let sigma = lambda(&eigs, idx)?;
    let gap = sigma - lambda(&eigs, idx - 1)?;
    Ok((sigma, Some(gap)))
}

/// The convergence factor of the exact two-grid method, computed three ways.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExactFactorReport {
    pub sigma_tg: f64,
    /// `sqrt(1 - sigma_TG)`.
    pub factor_identity: f64,
    /// `sqrt(1 - lambda_{n-r+1}(F_TG))`.
    pub factor_ftg: f64,
    /// Largest singular value of the conjugated propagator on `R(A)`.
    pub factor_oracle: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// Eigenvalue gap below the `sigma_TG` index (`None` when `s = r`).
    pub eigengap_at_index: Option<f64>,
    pub nullity_ftg: usize,
    /// `s = r`, where the factor is exactly 0.
    pub degenerate: bool,
    /// Set when the method does not contract (`factor >= 1 - match_tol`).
    pub warning: bool,
}

pub fn exact_factor(h: &TwoGridHierarchy) -> Result<ExactFactorReport> {
    let (n, r) = (h.n(), h.r());
    let degenerate = h.s() == r;
    let (sigma, gap) = sigma_tg(h)?;
    let factor_identity = if degenerate { 0.0 } else { sqrt_complement(sigma) };

    let f_eigs = sym_eig(&f_tg(h))?.eigenvalues;
    let factor_ftg = sqrt_complement_cut(lambda(&f_eigs, n - r + 1)?, h.tolerance().rank_rel_tol);
    let nullity_ftg = unit_scale_nullity(&f_eigs, h);

    let factor_oracle = seminorm_oracle(h, Iteration::Tg)?;
    let (lower_bound, upper_bound) = exact_two_sided(h)?;
    Ok(ExactFactorReport {
        sigma_tg: sigma,
        factor_identity,
        factor_ftg,
        factor_oracle,
        lower_bound,
        upper_bound,
        eigengap_at_index: gap,
        nullity_ftg,
        degenerate,
        warning: factor_identity >= 1.0 - h.tolerance().match_tol,
    })
}

/// `sqrt(1 - lambda_{n-r+s+1}(Mtilde A)) <= ||E_TG||_A <= sqrt(1 - lambda_{n-r+1}(Mtilde A))`.
///
/// For `s = r` the lower index leaves the spectrum and the lower bound is 0.
pub fn exact_two_sided(h: &TwoGridHierarchy) -> Result<(f64, f64)> {
    let (n, r, s) = (h.n(), h.r(), h.s());
    let mu = &h.htilde_eig().eigenvalues;
    let upper = sqrt_complement(lambda(mu, n - r + 1)?);
    let lower = if s == r {
        0.0
    } else {
        sqrt_complement(lambda(mu, n - r + s + 1)?)
    };
    Ok((lower, upper))
}

/// `delta_TG` and the outcome of its guard `N(Htilde) ∩ R(A^{1/2} P) = {0}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DeltaReport {
    pub delta_tg: f64,
    /// `rank(Pi Htilde Pi) = s`.
    pub guard_ok: bool,
    pub rank: usize,
}

pub fn delta_tg(h: &TwoGridHierarchy) -> Result<DeltaReport> {
    let (n, s) = (h.n(), h.s());
    let x = h.pi().sandwich(h.htilde()).symmetrized();
    let eigs = sym_eig(&x)?.eigenvalues;
    let scale = h.htilde_eig().lambda_max();
    let rank = h.tolerance().count_above(&eigs, scale);
    let guard_ok = rank == s;
    let delta = if guard_ok { lambda(&eigs, n - s + 1)? } else { 0.0 };
    Ok(DeltaReport {
        delta_tg: delta,
        guard_ok,
        rank,
    })
}

pub(crate) fn check_coarse_shape(h: &TwoGridHierarchy, bc: &SpsdOperator) -> Result<()> {
    let nc = h.nc();
    if bc.dim() != nc {
        return Err(Error::ShapeMismatch {
            context: "coarse solver B_c",
            expected: (nc, nc),
            got: bc.matrix().shape(),
        });
    }
    Ok(())
}

/// Which iteration the seminorm oracle measures.
#[derive(Clone, Copy, Debug)]
pub enum Iteration<'a> {
    Tg,
    /// Two-grid with an extra `M^T` post-smoothing step.
    Stg,
    /// Inexact two-grid with coarse solver `B_c^+`.
    Itg(&'a SpsdOperator),
}

/// `||E||_A` as the largest singular value of `G V_r`, where `G` is the
/// `A^{1/2}`-conjugated error propagator and `V_r` spans `R(A)`.
///
/// Shares no index arithmetic with [`exact_factor`].
pub fn seminorm_oracle(h: &TwoGridHierarchy, iteration: Iteration<'_>) -> Result<f64> {
    let i_k = h.k().identity_minus();
    let g = match iteration {
        Iteration::Tg => h.pi().identity_minus().matmul(&i_k),
        Iteration::Stg => i_k
            .transpose()
            .matmul(&h.pi().identity_minus())
            .matmul(&i_k),
        Iteration::Itg(bc) => {
            check_coarse_shape(h, bc)?;
            let y = h.sqrt_a_p();
            let coarse = y.transpose().sandwich(bc.pinv());
            coarse.identity_minus().matmul(&i_k)
        }
    };
    let (vr, _) = h.a().range_null_bases();
    let w = g.matmul(&vr);
    let gram = w.tr_matmul(&w);
    Ok(sym_eig(&gram)?.lambda_max().max(0.0).sqrt())
}
