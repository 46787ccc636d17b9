//! Repeated sweeps with error, residual and contraction tracking.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{norm2, sub_vec};
use crate::model::TwoGridHierarchy;
use crate::solver::sweep::{check_consistent, seminorm, Variant};

/// Growth factor over [`DIVERGENCE_WINDOW`] sweeps that aborts an iteration.
/// Growth that starts below the stagnation floor is roundoff and is ignored.
pub const DIVERGENCE_GROWTH: f64 = 10.0;
pub const DIVERGENCE_WINDOW: usize = 5;
/// Ratios are only formed while the error exceeds this multiple of `eps_machine * error_0`.
pub const STAGNATION_FLOOR: f64 = 1e3 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IterationTrace {
    pub variant: String,
    pub sweeps: usize,
    /// `||u_ref - u_k||_A` for `k = 0..=sweeps`; absent without a reference solution.
    pub errors_a: Option<Vec<f64>>,
    /// `||f - A u_k||_2` for `k = 0..=sweeps`.
    pub residuals: Vec<f64>,
    /// `errors_a[k+1] / errors_a[k]` while `errors_a[k]` is above the stagnation floor.
    pub ratios: Vec<Option<f64>>,
    /// Geometric mean of the last `max(5, sweeps / 4)` available ratios.
    pub observed_factor: Option<f64>,
    pub max_ratio: Option<f64>,
    /// The observed factor is within `match_tol` of 1.
    pub stagnated: bool,
    /// `||A u - f|| / ||f||` at the final iterate.
    pub final_relative_residual: f64,
    /// Set once the error reaches the floor: whether the final residual is below `100 match_tol`.
    pub final_consistent: Option<bool>,
    pub coarse_violations: usize,
    pub max_achieved_eps: Option<f64>,
}

fn tail_geometric_mean(ratios: &[Option<f64>], sweeps: usize) -> Option<f64> {
    let valid: Vec<f64> = ratios.iter().flatten().copied().collect();
    if valid.is_empty() {
        return None;
    }
    let window = DIVERGENCE_WINDOW.max(sweeps / 4).min(valid.len());
    let tail = &valid[valid.len() - window..];
    if tail.contains(&0.0) {
        return Some(0.0);
    }
    let log_mean = tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64;
    Some(log_mean.exp())
}

/// Runs `sweeps` sweeps of `variant` from `u0`.
///
/// With `u_ref`, errors are measured in the A-seminorm and contraction factors
/// are reported; without it only residuals are tracked.
pub fn iterate(
    h: &TwoGridHierarchy,
    f: &[f64],
    u0: &[f64],
    u_ref: Option<&[f64]>,
    sweeps: usize,
    variant: &mut Variant,
) -> Result<IterationTrace> {
    if sweeps == 0 {
        return Err(Error::NoSweeps);
    }
    let n = h.n();
    for (context, len) in [
        ("initial guess", u0.len()),
        ("right-hand side", f.len()),
        ("reference solution", u_ref.map_or(n, <[f64]>::len)),
    ] {
        if len != n {
            return Err(Error::LengthMismatch {
                context,
                expected: n,
                got: len,
            });
        }
    }
    check_consistent(h, f)?;

    let a = h.a();
    let measure = |u: &[f64]| {
        let res = norm2(&sub_vec(f, &a.matrix().matvec(u)));
        let err = u_ref.map(|r| seminorm(a, &sub_vec(r, u)));
        (err, res)
    };

    let mut u = u0.to_vec();
    let (e0, r0) = measure(&u);
    let mut errors: Vec<f64> = e0.into_iter().collect();
    let mut residuals = vec![r0];
    let mut violations = 0;
    let mut max_eps: Option<f64> = None;
    for k in 1..=sweeps {
        let out = variant.step(h, &u, f)?;
        u = out.u;
        violations += usize::from(out.violation);
        if let Some(e) = out.achieved_eps {
            max_eps = Some(max_eps.map_or(e, |m| m.max(e)));
        }
        let (e, r) = measure(&u);
        errors.extend(e);
        residuals.push(r);

        let track = if u_ref.is_some() { &errors } else { &residuals };
        if k >= DIVERGENCE_WINDOW {
            let before = track[k - DIVERGENCE_WINDOW];
            let growth = track[k] / before;
            if before > STAGNATION_FLOOR * track[0] && growth > DIVERGENCE_GROWTH {
                return Err(Error::Diverged { sweep: k, growth });
            }
        }
    }

    let f_norm = norm2(f);
    let final_relative_residual = if f_norm > 0.0 {
        residuals[sweeps] / f_norm
    } else {
        residuals[sweeps]
    };
    let consistency_tol = 100.0 * h.tolerance().match_tol;

    let (errors_a, ratios, observed, max_ratio, final_consistent) = if u_ref.is_some() {
        let floor = STAGNATION_FLOOR * errors[0];
        let ratios: Vec<Option<f64>> = (0..sweeps)
            .map(|k| (errors[k] > floor).then(|| errors[k + 1] / errors[k]))
            .collect();
        let observed = tail_geometric_mean(&ratios, sweeps);
        let max_ratio = ratios.iter().flatten().copied().reduce(f64::max);
        let reached = errors[sweeps] <= floor;
        let consistent = reached.then_some(final_relative_residual <= consistency_tol);
        (Some(errors), ratios, observed, max_ratio, consistent)
    } else {
        (None, vec![None; sweeps], None, None, None)
    };

    Ok(IterationTrace {
        variant: variant.label(),
        sweeps,
        errors_a,
        residuals,
        ratios,
        observed_factor: observed,
        max_ratio,
        stagnated: observed.is_some_and(|q| q >= 1.0 - h.tolerance().match_tol),
        final_relative_residual,
        final_consistent,
        coarse_violations: violations,
        max_achieved_eps: max_eps,
    })
}

/// Summary fields written next to the per-sweep CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceSummary {
    pub seed: u64,
    pub variant: String,
    pub sweeps: usize,
    pub observed_factor: Option<f64>,
    pub max_ratio: Option<f64>,
    pub stagnated: bool,
    pub final_relative_residual: f64,
    pub final_consistent: Option<bool>,
    pub violations: usize,
    pub max_achieved_eps: Option<f64>,
}

impl IterationTrace {
    pub fn summary(&self, seed: u64) -> TraceSummary {
        TraceSummary {
            seed,
            variant: self.variant.clone(),
            sweeps: self.sweeps,
            observed_factor: self.observed_factor,
            max_ratio: self.max_ratio,
            stagnated: self.stagnated,
            final_relative_residual: self.final_relative_residual,
            final_consistent: self.final_consistent,
            violations: self.coarse_violations,
            max_achieved_eps: self.max_achieved_eps,
        }
    }

    /// Columns `sweep, error_A, residual_2, ratio`; row `k` holds the ratio into sweep `k`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["sweep", "error_A", "residual_2", "ratio"])
            .expect("in-memory write");
        let fmt = |x: Option<f64>| x.map(|v| format!("{v:?}")).unwrap_or_default();
        for k in 0..=self.sweeps {
            let err = self.errors_a.as_ref().map(|e| e[k]);
            let ratio = if k == 0 { None } else { self.ratios[k - 1] };
            w.write_record([
                k.to_string(),
                fmt(err),
                format!("{:?}", self.residuals[k]),
                fmt(ratio),
            ])
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}
