use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::indexes::{DecompositionReport, IndexSeries};
use crate::monotonicity::{MelserDiagnostic, MonotonicityReport};
use crate::regression::RegressionResult;

use super::args::FormatArg;
use super::reproduce::ReproduceSummary;

/// Output of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: String,
    pub config: serde_json::Value,
    pub body: ReportBody,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportBody {
    Index {
        series: IndexSeries,
        regression: Option<RegressionResult>,
    },
    Fit {
        regression: RegressionResult,
    },
    Decomposition {
        decomposition: DecompositionReport,
    },
    Monotonicity {
        report: MonotonicityReport,
        melser: Option<MelserDiagnostic>,
    },
    Reproduce {
        summary: ReproduceSummary,
    },
}

impl Report {
    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `None` when the body has no rendering in `format`.
    pub fn render(&self, format: FormatArg) -> Option<String> {
        match format {
            FormatArg::Json => self.to_json().ok(),
            FormatArg::Table => Some(self.to_table()),
            FormatArg::Plot => match &self.body {
                ReportBody::Index { series, .. } => Some(series.to_plot_csv()),
                _ => None,
            },
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        match &self.body {
            ReportBody::Index { series, regression } => {
                let _ = writeln!(
                    out,
                    "{:?} index, base {} = {}",
                    series.method, series.base_period, series.base_value
                );
                for (p, v) in &series.levels {
                    let _ = writeln!(out, "{p:>10}  {v:>14.4}");
                }
                if let Some(r) = regression {
                    out.push('\n');
                    out.push_str(&regression_table(r));
                }
            }
            ReportBody::Fit { regression } => out.push_str(&regression_table(regression)),
            ReportBody::Decomposition { decomposition: d } => {
                let _ = writeln!(out, "periods         {} -> {}", d.period0, d.period1);
                let _ = writeln!(out, "geomean_ratio   {:.10}", d.geomean_ratio);
                let _ = writeln!(out, "theta           {:.10}", d.theta);
                let _ = writeln!(out, "product         {:.10}", d.product);
                let _ = writeln!(out, "exp_delta       {:.10}", d.exp_delta);
                let _ = writeln!(out, "identity_gap    {:.3e}", d.identity_gap);
            }
            ReportBody::Monotonicity { report, melser } => {
                let _ = writeln!(
                    out,
                    "method {} (base {}): {} trials, {} violations",
                    report.method,
                    report.base_period,
                    report.trials,
                    report.violations.len()
                );
                for v in &report.violations {
                    let _ = writeln!(
                        out,
                        "  VIOLATION {}: period {} {:.4} -> {:.4}",
                        v.description, v.period, v.level_before, v.level_after
                    );
                }
                if let Some(m) = melser {
                    let _ = writeln!(
                        out,
                        "period/{} correlation {:.6} (t = {:.4}, p = {:.3e}, n = {})",
                        m.characteristic, m.correlation, m.t_statistic, m.p_value, m.observations
                    );
                }
                let _ = writeln!(
                    out,
                    "{}",
                    if report.is_compliant() {
                        "COMPLIANT"
                    } else {
                        "NOT COMPLIANT"
                    }
                );
            }
            ReportBody::Reproduce { summary } => out.push_str(&summary.to_text()),
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

/// Coefficient table in the usual regression-output layout.
pub fn regression_table(r: &RegressionResult) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<14}{:>16}{:>16}{:>10}{:>14}",
        "", "Coefficients", "Standard Error", "t Stat", "P-value"
    );
    for j in 0..r.coefficients.len() {
        let _ = writeln!(
            out,
            "{:<14}{:>16.6}{:>16.4e}{:>10.2}{:>14.4e}",
            r.column_names[j],
            r.coefficients[j],
            r.standard_errors[j],
            r.t_statistics[j],
            r.p_values[j]
        );
    }
    let _ = writeln!(
        out,
        "n = {}, df = {}, R² = {:.4}, adj. R² = {:.4}, σ² = {:.6}",
        r.observations, r.degrees_of_freedom, r.r_squared, r.adjusted_r_squared, r.sigma2
    );
    out
}

/// `term,coefficient,standard_error,t_stat,p_value` rows.
pub fn regression_csv(r: &RegressionResult) -> String {
    let mut out = String::from("term,coefficient,standard_error,t_stat,p_value\n");
    for j in 0..r.coefficients.len() {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.column_names[j],
            r.coefficients[j],
            r.standard_errors[j],
            r.t_statistics[j],
            r.p_values[j]
        );
    }
    out
}
