//! The serialized convergence report.
//!
//! JSON field names and CSV column order are part of the output format; new
//! fields go at the end.

use serde::Serialize;

use crate::analysis::conditions::{check_conditions, ConditionReport};
use crate::analysis::exact::{delta_tg, exact_factor};
use crate::analysis::inexact::{general_epsilon_bound, inexact_linear_analysis};
use crate::error::Result;
use crate::linalg::SpsdOperator;
use crate::model::TwoGridHierarchy;

/// The coarse solver being analyzed alongside the exact method.
#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum CoarseAnalysis {
    Exact,
    Linear(SpsdOperator),
    /// A general solver with `A_c`-relative accuracy `eps`.
    Epsilon(f64),
}

impl CoarseAnalysis {
    pub fn label(&self) -> String {
        match self {
            Self::Exact => "exact".to_string(),
            Self::Linear(_) => "bc".to_string(),
            Self::Epsilon(eps) => format!("eps:{eps}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Flags {
    pub smoother_ok: bool,
    pub equiv_cond_ok: bool,
    pub suff_cond_ok: bool,
    pub delta_guard_ok: bool,
    /// `s = r`.
    pub degenerate: bool,
    /// The exact method does not contract.
    pub warning: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub seed: u64,
    pub problem: String,
    pub smoother: String,
    pub coarse: String,
    pub n: usize,
    pub nc: usize,
    pub r: usize,
    pub s: usize,
    pub sigma_tg: f64,
    pub factor_identity: f64,
    pub factor_oracle: f64,
    pub factor_ftg: f64,
    pub lower: f64,
    pub upper: f64,
    pub alpha1: Option<f64>,
    pub alpha2: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub delta_tg: f64,
    pub lower_l: Option<f64>,
    pub upper_u: Option<f64>,
    pub factor_exact_itg: Option<f64>,
    pub factor_itg_oracle: Option<f64>,
    pub eps: Option<f64>,
    pub eps_bound: Option<f64>,
    pub eigengap_at_index: Option<f64>,
    pub nullity_ftg: usize,
    pub nullity_fitg: Option<usize>,
    pub flags: Flags,
    pub conditions: ConditionReport,
}

/// Runs the condition checks, the exact analysis and, if requested, the inexact analysis.
pub fn analyze(
    h: &TwoGridHierarchy,
    coarse: &CoarseAnalysis,
    problem: &str,
    seed: u64,
) -> Result<ConvergenceReport> {
    let cond = check_conditions(h)?;
    let exact = exact_factor(h)?;
    let delta = delta_tg(h)?;
    let mut report = ConvergenceReport {
        seed,
        problem: problem.to_string(),
        smoother: h.smoother().label(),
        coarse: coarse.label(),
        n: h.n(),
        nc: h.nc(),
        r: h.r(),
        s: h.s(),
        sigma_tg: exact.sigma_tg,
        factor_identity: exact.factor_identity,
        factor_oracle: exact.factor_oracle,
        factor_ftg: exact.factor_ftg,
        lower: exact.lower_bound,
        upper: exact.upper_bound,
        alpha1: None,
        alpha2: None,
        beta1: None,
        beta2: None,
        delta_tg: delta.delta_tg,
        lower_l: None,
        upper_u: None,
        factor_exact_itg: None,
        factor_itg_oracle: None,
        eps: None,
        eps_bound: None,
        eigengap_at_index: exact.eigengap_at_index,
        nullity_ftg: exact.nullity_ftg,
        nullity_fitg: None,
        flags: Flags {
            smoother_ok: cond.smoother_ok,
            equiv_cond_ok: cond.equiv_cond_ok,
            suff_cond_ok: cond.suff_cond_ok,
            delta_guard_ok: delta.guard_ok,
            degenerate: exact.degenerate,
            warning: exact.warning || !cond.equiv_cond_ok,
        },
        conditions: cond,
    };
    match coarse {
        CoarseAnalysis::Exact => {}
        CoarseAnalysis::Linear(bc) => {
            let inexact = inexact_linear_analysis(h, bc)?;
            report.alpha1 = Some(inexact.alpha1);
            report.alpha2 = Some(inexact.alpha2);
            report.beta1 = Some(inexact.beta1);
            report.beta2 = Some(inexact.beta2);
            report.lower_l = Some(inexact.lower_l);
            report.upper_u = Some(inexact.upper_u);
            report.factor_exact_itg = Some(inexact.factor_exact_itg);
            report.factor_itg_oracle = Some(inexact.factor_oracle);
            report.nullity_fitg = Some(inexact.nullity_fitg);
        }
        CoarseAnalysis::Epsilon(eps) => {
            report.eps = Some(*eps);
            report.eps_bound = Some(general_epsilon_bound(h, *eps)?);
        }
    }
    Ok(report)
}

const CSV_COLUMNS: [&str; 24] = [
    "seed",
    "problem",
    "smoother",
    "coarse",
    "n",
    "nc",
    "r",
    "s",
    "sigma_tg",
    "factor_identity",
    "factor_oracle",
    "factor_ftg",
    "lower",
    "upper",
    "alpha1",
    "alpha2",
    "beta1",
    "beta2",
    "delta_tg",
    "lower_l",
    "upper_u",
    "factor_exact_itg",
    "equiv_cond_ok",
    "warning",
];

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:?}")).unwrap_or_default()
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report fields serialize");
        s.push('\n');
        s
    }

    pub fn csv_header() -> &'static [&'static str] {
        &CSV_COLUMNS
    }

    /// One CSV row in [`csv_header`](Self::csv_header) order.
    pub fn csv_record(&self) -> Vec<String> {
        vec![
            self.seed.to_string(),
            self.problem.clone(),
            self.smoother.clone(),
            self.coarse.clone(),
            self.n.to_string(),
            self.nc.to_string(),
            self.r.to_string(),
            self.s.to_string(),
            format!("{:?}", self.sigma_tg),
            format!("{:?}", self.factor_identity),
            format!("{:?}", self.factor_oracle),
            format!("{:?}", self.factor_ftg),
            format!("{:?}", self.lower),
            format!("{:?}", self.upper),
            opt(self.alpha1),
            opt(self.alpha2),
            opt(self.beta1),
            opt(self.beta2),
            format!("{:?}", self.delta_tg),
            opt(self.lower_l),
            opt(self.upper_u),
            opt(self.factor_exact_itg),
            self.flags.equiv_cond_ok.to_string(),
            self.flags.warning.to_string(),
        ]
    }

    /// Header plus one row per report.
    pub fn to_csv(reports: &[ConvergenceReport]) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(Self::csv_header()).expect("in-memory write");
        for r in reports {
            w.write_record(r.csv_record()).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}
