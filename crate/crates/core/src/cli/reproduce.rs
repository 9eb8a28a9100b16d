//! End-to-end rebuild of the bundled Renoir example with tolerance checks.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::domain::{normalize_price, Dataset};
use crate::error::Result;
use crate::indexes::{decompose_index, hpm_timedummy_index, npgm_index, IndexMethod, IndexSeries};
use crate::monotonicity::{
    default_grid, melser_diagnostic, random_perturbation_audit, search_violations,
};
use crate::regression::{fit, ModelSpec, RegressionResult, Regressor};
use crate::renoir::{self, PublishedRow};

use super::report::regression_csv;

pub const UNITARY_PRICE_TOL: f64 = 0.005;
pub const COEFFICIENT_TOL: f64 = 0.002;
pub const AREA_COEFFICIENT_TOL: f64 = 5e-6;
pub const STANDARD_ERROR_REL_TOL: f64 = 0.01;
pub const T_STAT_TOL: f64 = 0.02;
pub const P_VALUE_TOL: f64 = 0.0005;
pub const MIN_R_SQUARED: f64 = 0.70;
/// `100 exp(δ)` from the published dummies.
pub const HPM_LEVEL_B: f64 = 291.1;
pub const HPM_LEVEL_C: f64 = 282.6;
pub const HPM_LEVEL_TOL: f64 = 0.5;
pub const IDENTITY_TOL: f64 = 1e-8;
pub const RANDOM_AUDIT_TRIALS: usize = 1000;
pub const RANDOM_AUDIT_SEED: u64 = 7;
pub const SIGNIFICANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReproduceSummary {
    pub checks: Vec<Check>,
    pub files: Vec<String>,
    pub all_passed: bool,
}

impl ReproduceSummary {
    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<44} actual {:<24} expected {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.actual,
                c.expected
            );
        }
        let failed = self.failed().count();
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.checks.len() - failed,
            self.checks.len()
        );
        out
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn abs(&mut self, name: impl Into<String>, actual: f64, expected: f64, tol: f64) {
        self.0.push(Check {
            name: name.into(),
            expected: format!("{expected} ± {tol}"),
            actual,
            passed: (actual - expected).abs() <= tol,
        });
    }

    fn rel(&mut self, name: impl Into<String>, actual: f64, expected: f64, tol: f64) {
        self.0.push(Check {
            name: name.into(),
            expected: format!("{expected} ± {}%", tol * 100.0),
            actual,
            passed: ((actual - expected) / expected).abs() <= tol,
        });
    }

    fn holds(
        &mut self,
        name: impl Into<String>,
        actual: f64,
        expected: impl Into<String>,
        passed: bool,
    ) {
        self.0.push(Check {
            name: name.into(),
            expected: expected.into(),
            actual,
            passed,
        });
    }

    fn fit_table(&mut self, table: &str, fit: &RegressionResult, published: &[PublishedRow]) {
        for row in published {
            let Some(j) = fit.position(row.term) else {
                self.holds(
                    format!("{table}.{}.present", row.term),
                    f64::NAN,
                    "column present",
                    false,
                );
                continue;
            };
            let coef_tol = if row.term == "area" {
                AREA_COEFFICIENT_TOL
            } else {
                COEFFICIENT_TOL
            };
            let prefix = format!("{table}.{}", row.term);
            self.abs(
                format!("{prefix}.coefficient"),
                fit.coefficients[j],
                row.coefficient,
                coef_tol,
            );
            self.rel(
                format!("{prefix}.standard_error"),
                fit.standard_errors[j],
                row.standard_error,
                STANDARD_ERROR_REL_TOL,
            );
            self.abs(
                format!("{prefix}.t_stat"),
                fit.t_statistics[j],
                row.t_stat,
                T_STAT_TOL,
            );
            self.abs(
                format!("{prefix}.p_value"),
                fit.p_values[j],
                row.p_value,
                P_VALUE_TOL,
            );
        }
        self.holds(
            format!("{table}.r_squared"),
            fit.r_squared,
            format!("> {MIN_R_SQUARED}"),
            fit.r_squared > MIN_R_SQUARED,
        );
    }
}

fn series_pair(ab: &IndexSeries, ac: &IndexSeries) -> String {
    let mut out = String::from("period,level\n");
    for (p, v) in ab.levels.iter().chain(ac.levels.iter().skip(1)) {
        let _ = writeln!(out, "{p},{v}");
    }
    out
}

/// Rebuilds every table and figure from `ab` (datasets A and B), writes them
/// to `out_dir` and checks them against the published values.
pub fn reproduce(ab: &Dataset, out_dir: &Path) -> Result<ReproduceSummary> {
    std::fs::create_dir_all(out_dir)?;
    let ac = renoir::derive_dataset_c(ab)?;
    let spec = ModelSpec::area_and_ratio("A");
    let mut checks = Checks::default();
    let mut files = Vec::new();
    let mut write = |name: &str, contents: String| -> Result<()> {
        std::fs::write(out_dir.join(name), contents)?;
        files.push(name.to_string());
        Ok(())
    };

    // Sales with unitary prices.
    let mut table1 = String::from("id,dataset,price_usd,area_cm2,hw_ratio,price_per_cm2\n");
    for (i, obs) in ab.observations().iter().enumerate() {
        let p = normalize_price(obs)?.value();
        let _ = writeln!(
            table1,
            "{},{},{},{},{},{}",
            obs.id, obs.period, obs.price, obs.area, obs.aspect_ratio, p
        );
        if let Some(&printed) = renoir::PUBLISHED_UNITARY_PRICES.get(i) {
            checks.abs(
                format!("table1.obs{}.price_per_cm2", obs.id),
                p,
                printed,
                UNITARY_PRICE_TOL,
            );
        }
    }
    write("table1_unitary_prices.csv", table1)?;

    let fit_ab = fit(ab, &spec)?;
    let fit_ac = fit(&ac, &spec)?;
    checks.fit_table("table2", &fit_ab, &renoir::PUBLISHED_FIT_AB);
    checks.fit_table("table3", &fit_ac, &renoir::PUBLISHED_FIT_AC);
    write("table2_hpm_a_b.csv", regression_csv(&fit_ab))?;
    write("table3_hpm_a_c.csv", regression_csv(&fit_ac))?;

    // Index series.
    let npgm_ab = npgm_index(ab, "A", 100.0)?;
    let npgm_ac = npgm_index(&ac, "A", 100.0)?;
    let hpm_ab = hpm_timedummy_index(ab, &spec, 100.0)?.series;
    let hpm_ac = hpm_timedummy_index(&ac, &spec, 100.0)?.series;
    let (nb, nc) = (npgm_ab.levels["B"], npgm_ac.levels["C"]);
    let (hb, hc) = (hpm_ab.levels["B"], hpm_ac.levels["C"]);
    checks.holds("figure1.npgm.I_CA_minus_I_BA", nc - nb, "> 0", nc > nb);
    checks.holds("figure2.hpm.I_CA_minus_I_BA", hc - hb, "< 0", hc < hb);
    checks.abs("figure2.hpm.I_BA", hb, HPM_LEVEL_B, HPM_LEVEL_TOL);
    checks.abs("figure2.hpm.I_CA", hc, HPM_LEVEL_C, HPM_LEVEL_TOL);
    write("figure1_npgm_index.csv", series_pair(&npgm_ab, &npgm_ac))?;
    write("figure2_hpm_index.csv", series_pair(&hpm_ab, &hpm_ac))?;

    // Decomposition and constrained-model equivalence.
    for (label, ds, p1) in [("A_B", ab, "B"), ("A_C", &ac, "C")] {
        let d = decompose_index(ds, &spec, "A", p1)?;
        checks.holds(
            format!("decomposition.{label}.identity_gap"),
            d.identity_gap,
            format!("<= {IDENTITY_TOL}"),
            d.identity_gap <= IDENTITY_TOL,
        );
        let npgm = npgm_index(ds, "A", 100.0)?.levels[p1];
        let pinned = hpm_timedummy_index(ds, &ModelSpec::unitary_price("A"), 100.0)?
            .series
            .levels[p1];
        let gap = (npgm - pinned).abs() / pinned;
        checks.holds(
            format!("constrained_hpm.{label}.gap"),
            gap,
            format!("<= {IDENTITY_TOL}"),
            gap <= IDENTITY_TOL,
        );
    }

    // Monotonicity audits.
    let hpm = IndexMethod::HpmTimeDummy { spec: spec.clone() };
    let grid = default_grid();
    let npgm_grid = search_violations(ab, &IndexMethod::Npgm, "A", &grid)?;
    checks.holds(
        "monotonicity.npgm.grid_violations",
        npgm_grid.violations.len() as f64,
        "0",
        npgm_grid.is_compliant(),
    );
    let npgm_random = random_perturbation_audit(
        ab,
        &IndexMethod::Npgm,
        "A",
        RANDOM_AUDIT_TRIALS,
        RANDOM_AUDIT_SEED,
    )?;
    checks.holds(
        "monotonicity.npgm.random_violations",
        npgm_random.violations.len() as f64,
        "0",
        npgm_random.is_compliant(),
    );
    let hpm_grid = search_violations(ab, &hpm, "A", &grid)?;
    let at_shock = hpm_grid.violations.iter().any(|v| {
        v.description
            == format!(
                "obs {} price x{}",
                renoir::SHOCKED_OBSERVATION,
                renoir::SHOCK_MULTIPLIER
            )
    });
    checks.holds(
        "monotonicity.hpm.obs29_x1.5",
        f64::from(u8::from(at_shock)),
        "violation",
        at_shock,
    );
    for id in ["25", "28"] {
        let n = hpm_grid
            .violations
            .iter()
            .filter(|v| v.perturbation.increments.get(id).is_some_and(|&x| x > 0.0))
            .count();
        checks.holds(
            format!("monotonicity.hpm.obs{id}_violations"),
            n as f64,
            ">= 1",
            n >= 1,
        );
    }

    // Area by dataset and the period/area association.
    let mut fig3 = String::from("dataset,area_cm2\n");
    for obs in ab.observations() {
        let _ = writeln!(fig3, "{},{}", obs.period, obs.area);
    }
    write("figure3_area_by_dataset.csv", fig3)?;
    let melser = melser_diagnostic(ab, &Regressor::Area, "A", "B")?;
    checks.holds(
        "figure3.area_correlation",
        melser.correlation,
        "> 0",
        melser.correlation > 0.0,
    );
    checks.holds(
        "figure3.area_t_test_p_value",
        melser.p_value,
        format!("< {SIGNIFICANCE}"),
        melser.p_value < SIGNIFICANCE,
    );

    let checks = checks.0;
    let all_passed = checks.iter().all(|c| c.passed);
    let mut summary = ReproduceSummary {
        checks,
        files,
        all_passed,
    };
    summary.files.push("summary.txt".into());
    std::fs::write(out_dir.join("summary.txt"), summary.to_text())?;
    Ok(summary)
}
