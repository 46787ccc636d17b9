//! Single sweeps of the exact, symmetrized and inexact two-grid methods.

use crate::error::{Error, Result};
use crate::linalg::{add_vec, norm2, sub_vec, SpsdOperator};
use crate::model::TwoGridHierarchy;

/// A black-box coarse solver `r_c -> e_c_hat`.
pub trait CoarseSolve {
    fn solve(&mut self, r_c: &[f64]) -> Vec<f64>;
}

impl<F: FnMut(&[f64]) -> Vec<f64>> CoarseSolve for F {
    fn solve(&mut self, r_c: &[f64]) -> Vec<f64> {
        self(r_c)
    }
}

/// The coarse-grid correction of the inexact method.
pub enum CoarseSolverSpec {
    /// `A_c^+`.
    Exact,
    /// `B_c^+` for an SPSD approximation `B_c`.
    LinearSpsd(SpsdOperator),
    General {
        solver: Box<dyn CoarseSolve>,
        /// Claimed bound on `||e_c - e_c_hat||_{A_c} / ||e_c||_{A_c}`.
        declared_eps: f64,
        /// Recompute `e_c = A_c^+ r_c` each call to measure the achieved accuracy.
        verify: bool,
    },
}

impl CoarseSolverSpec {
    pub fn general(solver: Box<dyn CoarseSolve>, declared_eps: f64, verify: bool) -> Result<Self> {
        if !(0.0..1.0).contains(&declared_eps) {
            return Err(Error::InvalidEpsilon { eps: declared_eps });
        }
        Ok(Self::General {
            solver,
            declared_eps,
            verify,
        })
    }

    pub fn label(&self) -> String {
        match self {
            Self::Exact => "exact".to_string(),
            Self::LinearSpsd(_) => "bc".to_string(),
            Self::General { declared_eps, .. } => format!("eps:{declared_eps}"),
        }
    }
}

impl std::fmt::Debug for CoarseSolverSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.label())
    }
}

/// Result of one inexact sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepOutcome {
    pub u: Vec<f64>,
    /// `||e_c - e_c_hat||_{A_c} / ||e_c||_{A_c}` when measured.
    pub achieved_eps: Option<f64>,
    /// The measured accuracy exceeded the declared one, or reached 1.
    pub violation: bool,
}

/// `||x||_S = ||S^{1/2} x||_2` for SPSD `S`; accurate to `eps ||x||` even when `x` has a large null component.
pub fn seminorm(s: &SpsdOperator, x: &[f64]) -> f64 {
    norm2(&s.sqrt().matvec(x))
}

fn check_lengths(h: &TwoGridHierarchy, u0: &[f64], f: &[f64]) -> Result<()> {
    let n = h.n();
    for (context, len) in [("initial guess", u0.len()), ("right-hand side", f.len())] {
        if len != n {
            return Err(Error::LengthMismatch {
                context,
                expected: n,
                got: len,
            });
        }
    }
    Ok(())
}

/// Rejects `f` with a component in `N(A)` above `match_tol * ||f||`.
pub fn check_consistent(h: &TwoGridHierarchy, f: &[f64]) -> Result<()> {
    let Some(z) = h.a().range_null_bases().1 else {
        return Ok(());
    };
    let residual = norm2(&z.tr_matvec(f));
    let tolerance = h.tolerance().match_tol * norm2(f);
    if residual > tolerance {
        return Err(Error::InconsistentRhs {
            residual,
            tolerance,
        });
    }
    Ok(())
}

fn residual(h: &TwoGridHierarchy, u: &[f64], f: &[f64]) -> Vec<f64> {
    sub_vec(f, &h.a().matrix().matvec(u))
}

/// Pre-smoothing and restriction: `(u1, r_c)`.
fn smooth_and_restrict(h: &TwoGridHierarchy, u0: &[f64], f: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let u1 = add_vec(u0, &h.m().matvec(&residual(h, u0, f)));
    let r_c = h.p().tr_matvec(&residual(h, &u1, f));
    (u1, r_c)
}

fn prolongate(h: &TwoGridHierarchy, u1: &[f64], e_c: &[f64]) -> Vec<f64> {
    add_vec(u1, &h.p().matvec(e_c))
}

fn tg_unchecked(h: &TwoGridHierarchy, u0: &[f64], f: &[f64]) -> Vec<f64> {
    let (u1, r_c) = smooth_and_restrict(h, u0, f);
    let e_c = h.ac().pinv().matvec(&r_c);
    prolongate(h, &u1, &e_c)
}

/// One exact two-grid sweep.
pub fn tg_sweep(h: &TwoGridHierarchy, u0: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    check_lengths(h, u0, f)?;
    check_consistent(h, f)?;
    Ok(tg_unchecked(h, u0, f))
}

fn post_smooth(h: &TwoGridHierarchy, u: Vec<f64>, f: &[f64]) -> Vec<f64> {
    add_vec(&u, &h.m().tr_matvec(&residual(h, &u, f)))
}

/// One exact two-grid sweep followed by `M^T` post-smoothing.
pub fn stg_sweep(h: &TwoGridHierarchy, u0: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    check_lengths(h, u0, f)?;
    check_consistent(h, f)?;
    Ok(post_smooth(h, tg_unchecked(h, u0, f), f))
}

/// One inexact two-grid sweep.
pub fn itg_sweep(
    h: &TwoGridHierarchy,
    u0: &[f64],
    f: &[f64],
    coarse: &mut CoarseSolverSpec,
) -> Result<SweepOutcome> {
    check_lengths(h, u0, f)?;
    check_consistent(h, f)?;
    itg_unchecked(h, u0, f, coarse)
}

fn itg_unchecked(
    h: &TwoGridHierarchy,
    u0: &[f64],
    f: &[f64],
    coarse: &mut CoarseSolverSpec,
) -> Result<SweepOutcome> {
    let exact = |u| SweepOutcome {
        u,
        achieved_eps: None,
        violation: false,
    };
    match coarse {
        CoarseSolverSpec::Exact => Ok(exact(tg_unchecked(h, u0, f))),
        CoarseSolverSpec::LinearSpsd(bc) => {
            if bc.dim() != h.nc() {
                return Err(Error::ShapeMismatch {
                    context: "coarse solver B_c",
                    expected: (h.nc(), h.nc()),
                    got: bc.matrix().shape(),
                });
            }
            let (u1, r_c) = smooth_and_restrict(h, u0, f);
            let e_hat = bc.pinv().matvec(&r_c);
            Ok(exact(prolongate(h, &u1, &e_hat)))
        }
        CoarseSolverSpec::General {
            solver,
            declared_eps,
            verify,
        } => {
            let (u1, r_c) = smooth_and_restrict(h, u0, f);
            let e_hat = solver.solve(&r_c);
            if e_hat.len() != h.nc() {
                return Err(Error::LengthMismatch {
                    context: "general coarse solver output",
                    expected: h.nc(),
                    got: e_hat.len(),
                });
            }
            let achieved_eps = verify.then(|| {
                let e_c = h.ac().pinv().matvec(&r_c);
                relative_coarse_error(h.ac(), &e_c, &e_hat)
            });
            let violation = achieved_eps
                .is_some_and(|eps| eps >= 1.0 || eps > *declared_eps * (1.0 + 1e-9) + 1e-12);
            Ok(SweepOutcome {
                u: prolongate(h, &u1, &e_hat),
                achieved_eps,
                violation,
            })
        }
    }
}

/// `||e_c - e_hat||_{A_c} / ||e_c||_{A_c}`; 0 when both vanish, infinite when only `e_c` does.
pub fn relative_coarse_error(ac: &SpsdOperator, e_c: &[f64], e_hat: &[f64]) -> f64 {
    let num = seminorm(ac, &sub_vec(e_c, e_hat));
    let den = seminorm(ac, e_c);
    if den > 0.0 {
        num / den
    } else if num == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Variant of the two-grid method for [`iterate`](crate::solver::iterate).
#[derive(Debug)]
#[allow(clippy::large_enum_variant)]
pub enum Variant {
    Tg,
    Stg,
    Itg(CoarseSolverSpec),
}

impl Variant {
    pub fn label(&self) -> String {
        match self {
            Self::Tg => "tg".to_string(),
            Self::Stg => "stg".to_string(),
            Self::Itg(c) => format!("itg:{}", c.label()),
        }
    }

    pub(crate) fn step(
        &mut self,
        h: &TwoGridHierarchy,
        u: &[f64],
        f: &[f64],
    ) -> Result<SweepOutcome> {
        match self {
            Self::Tg => Ok(SweepOutcome {
                u: tg_unchecked(h, u, f),
                achieved_eps: None,
                violation: false,
            }),
            Self::Stg => Ok(SweepOutcome {
                u: post_smooth(h, tg_unchecked(h, u, f), f),
                achieved_eps: None,
                violation: false,
            }),
            Self::Itg(c) => itg_unchecked(h, u, f, c),
        }
    }
}

/// Runs pre-smoothing and restriction only, exposing `r_c` for inspection.
pub fn restricted_residual(h: &TwoGridHierarchy, u0: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    check_lengths(h, u0, f)?;
    Ok(smooth_and_restrict(h, u0, f).1)
}
