//! Monotonicity-axiom audits.
//!
//! An index method is monotone if raising some prices, with characteristics
//! held fixed, never lowers the index level of the periods whose prices rose.
//! The auditors here recompute the whole index on perturbed copies of a
//! dataset and record every level that falls.

use std::collections::HashMap;

use indexmap::IndexMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Dataset;
use crate::error::{Error, Result};
use crate::indexes::{IndexMethod, IndexSeries};
use crate::regression::{student_t_two_sided_p, Regressor};

/// Relative drop below which a level change is treated as rounding noise.
pub const VIOLATION_SLACK: f64 = 1e-12;

/// Non-negative price increments keyed by observation id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub increments: IndexMap<String, f64>,
}

impl Perturbation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_increment(mut self, id: impl Into<String>, increment: f64) -> Self {
        self.increments.insert(id.into(), increment);
        self
    }

    /// Increment that multiplies one observation's price by `factor`.
    pub fn scaling(ds: &Dataset, id: &str, factor: f64) -> Result<Self> {
        let obs = ds
            .get(id)
            .ok_or_else(|| Error::UnknownObservation(id.to_string()))?;
        if !(factor.is_finite() && factor >= 1.0) {
            return Err(Error::InvalidPerturbation(format!(
                "price multiplier must be at least 1, got {factor}"
            )));
        }
        Ok(Self::new().with_increment(id, obs.price * (factor - 1.0)))
    }

    pub fn is_zero(&self) -> bool {
        self.increments.values().all(|&v| v == 0.0)
    }

    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .increments
            .iter()
            .filter(|(_, v)| **v > 0.0)
            .map(|(id, v)| format!("{id}+{v}"))
            .collect();
        if parts.is_empty() {
            "none".to_string()
        } else {
            parts.join(" ")
        }
    }

    fn validate(&self, ds: &Dataset, base_period: &str) -> Result<()> {
        for (id, &inc) in &self.increments {
            let obs = ds
                .get(id)
                .ok_or_else(|| Error::UnknownObservation(id.clone()))?;
            if !(inc.is_finite() && inc >= 0.0) {
                return Err(Error::InvalidPerturbation(format!(
                    "increment for {id} must be finite and non-negative, got {inc}"
                )));
            }
            if inc > 0.0 && obs.period == base_period {
                return Err(Error::InvalidPerturbation(format!(
                    "observation {id} belongs to base period {base_period}"
                )));
            }
        }
        Ok(())
    }

    /// Periods holding at least one strictly positive increment.
    fn touched_periods<'a>(&self, ds: &'a Dataset) -> Vec<&'a str> {
        let mut out = Vec::new();
        for (id, &inc) in &self.increments {
            if inc > 0.0 {
                if let Some(obs) = ds.get(id) {
                    if !out.contains(&obs.period.as_str()) {
                        out.push(obs.period.as_str());
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, ds: &Dataset) -> Result<Dataset> {
        let mut prices = HashMap::new();
        for (id, &inc) in &self.increments {
            let obs = ds
                .get(id)
                .ok_or_else(|| Error::UnknownObservation(id.clone()))?;
            prices.insert(id.as_str(), obs.price + inc);
        }
        ds.with_prices(&prices)
    }
}

/// Outcome for one non-base period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodCheck {
    pub period: String,
    pub level_before: f64,
    pub level_after: f64,
    /// Whether the perturbation raised any price in this period.
    pub perturbed: bool,
    pub compliant: bool,
}

fn is_drop(before: f64, after: f64) -> bool {
    after < before && (before - after) / before > VIOLATION_SLACK
}

fn compare(
    ds: &Dataset,
    before: &IndexSeries,
    after: &IndexSeries,
    pert: &Perturbation,
) -> Vec<PeriodCheck> {
    let touched = pert.touched_periods(ds);
    before
        .levels
        .iter()
        .filter(|(p, _)| **p != before.base_period)
        .map(|(p, &level_before)| {
            let level_after = after.levels[p];
            let perturbed = touched.contains(&p.as_str());
            PeriodCheck {
                period: p.clone(),
                level_before,
                level_after,
                perturbed,
                compliant: !perturbed || !is_drop(level_before, level_after),
            }
        })
        .collect()
}

/// Recomputes the index after `pert` and compares every non-base level.
pub fn check_monotonicity(
    ds: &Dataset,
    method: &IndexMethod,
    base_period: &str,
    pert: &Perturbation,
) -> Result<Vec<PeriodCheck>> {
    let before = method.compute(ds, base_period, 100.0)?;
    check_against(ds, method, &before, pert)
}

fn check_against(
    ds: &Dataset,
    method: &IndexMethod,
    before: &IndexSeries,
    pert: &Perturbation,
) -> Result<Vec<PeriodCheck>> {
    pert.validate(ds, &before.base_period)?;
    let after = method.compute(&pert.apply(ds)?, &before.base_period, before.base_value)?;
    Ok(compare(ds, before, &after, pert))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub description: String,
    pub perturbation: Perturbation,
    pub period: String,
    pub level_before: f64,
    pub level_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub method: String,
    pub base_period: String,
    pub trials: usize,
    pub violations: Vec<Violation>,
    pub melser_statistic: Option<f64>,
}

impl MonotonicityReport {
    pub fn is_compliant(&self) -> bool {
        self.violations.is_empty()
    }

    /// Ids whose single-observation perturbations produced a violation.
    pub fn violating_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = Vec::new();
        for v in &self.violations {
            for (id, &inc) in &v.perturbation.increments {
                if inc > 0.0 && !ids.contains(&id.as_str()) {
                    ids.push(id);
                }
            }
        }
        ids
    }
}

fn violations_of(
    checks: Vec<PeriodCheck>,
    description: &str,
    pert: &Perturbation,
) -> Vec<Violation> {
    checks
        .into_iter()
        .filter(|c| !c.compliant)
        .map(|c| Violation {
            description: description.to_string(),
            perturbation: pert.clone(),
            period: c.period,
            level_before: c.level_before,
            level_after: c.level_after,
        })
        .collect()
}

fn run_trials(
    ds: &Dataset,
    method: &IndexMethod,
    base_period: &str,
    trials: Vec<(String, Perturbation)>,
) -> Result<MonotonicityReport> {
    let before = method.compute(ds, base_period, 100.0)?;
    let count = trials.len();
    // Indexed parallel collect keeps trial order.
    let found: Vec<Vec<Violation>> = trials
        .par_iter()
        .map(|(description, pert)| {
            check_against(ds, method, &before, pert).map(|c| violations_of(c, description, pert))
        })
        .collect::<Result<_>>()?;
    Ok(MonotonicityReport {
        method: method.name().to_string(),
        base_period: base_period.to_string(),
        trials: count,
        violations: found.into_iter().flatten().collect(),
        melser_statistic: None,
    })
}

/// Single-perturbation audit packaged as a report.
pub fn audit_perturbation(
    ds: &Dataset,
    method: &IndexMethod,
    base_period: &str,
    pert: &Perturbation,
) -> Result<MonotonicityReport> {
    run_trials(
        ds,
        method,
        base_period,
        vec![(pert.describe(), pert.clone())],
    )
}

/// Multipliers `1.1, 1.2, …, 3.0`.
pub fn default_grid() -> Vec<f64> {
    (11..=30).map(|k| f64::from(k) / 10.0).collect()
}

/// Scales each non-base observation's price by each grid multiplier in turn.
/// Trials run in observation order, then grid order.
pub fn search_violations(
    ds: &Dataset,
    method: &IndexMethod,
    base_period: &str,
    multiplier_grid: &[f64],
) -> Result<MonotonicityReport> {
    if multiplier_grid.is_empty() {
        return Err(Error::InvalidArgument("multiplier grid is empty".into()));
    }
    if let Some(m) = multiplier_grid
        .iter()
        .find(|m| !(m.is_finite() && **m > 1.0))
    {
        return Err(Error::InvalidArgument(format!(
            "grid multipliers must exceed 1, got {m}"
        )));
    }
    ds.require_period(base_period)?;
    let mut trials = Vec::new();
    for obs in ds.observations().iter().filter(|o| o.period != base_period) {
        for &m in multiplier_grid {
            let pert = Perturbation::scaling(ds, &obs.id, m)?;
            trials.push((format!("obs {} price x{m}", obs.id), pert));
        }
    }
    run_trials(ds, method, base_period, trials)
}

/// Draws `trials` random perturbations of the non-base observations. Each
/// increment is 0 with probability ½, otherwise uniform on `(0, price)`.
pub fn random_perturbation_audit(
    ds: &Dataset,
    method: &IndexMethod,
    base_period: &str,
    trials: usize,
    seed: u64,
) -> Result<MonotonicityReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "at least one trial is required".into(),
        ));
    }
    ds.require_period(base_period)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let movable: Vec<_> = ds
        .observations()
        .iter()
        .filter(|o| o.period != base_period)
        .collect();
    let mut drawn = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut pert = Perturbation::new();
        for obs in &movable {
            if rng.random_bool(0.5) {
                let u = loop {
                    let u: f64 = rng.random();
                    if u > 0.0 {
                        break u;
                    }
                };
                pert.increments.insert(obs.id.clone(), u * obs.price);
            }
        }
        drawn.push((format!("random trial {trial} (seed {seed})"), pert));
    }
    run_trials(ds, method, base_period, drawn)
}

/// Association between period membership and one characteristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MelserDiagnostic {
    pub characteristic: String,
    pub period0: String,
    pub period1: String,
    /// Point-biserial correlation of the characteristic with `1{period1}`.
    pub correlation: f64,
    /// Equal-variance two-sample t statistic, `r √(n−2) / √(1−r²)`.
    pub t_statistic: f64,
    pub p_value: f64,
    pub observations: usize,
}

pub fn melser_diagnostic(
    ds: &Dataset,
    characteristic: &Regressor,
    period0: &str,
    period1: &str,
) -> Result<MelserDiagnostic> {
    ds.require_period(period0)?;
    ds.require_period(period1)?;
    if period0 == period1 {
        return Err(Error::InvalidArgument(
            "diagnostic needs two distinct periods".into(),
        ));
    }
    let mut pairs = Vec::new();
    for obs in ds.observations() {
        let d = if obs.period == period0 {
            0.0
        } else if obs.period == period1 {
            1.0
        } else {
            continue;
        };
        pairs.push((d, characteristic.value(obs)?));
    }
    let n = pairs.len();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "diagnostic needs at least 3 observations, got {n}"
        )));
    }
    let nf = n as f64;
    let (md, mx) = pairs
        .iter()
        .fold((0.0, 0.0), |(a, b), (d, x)| (a + d / nf, b + x / nf));
    let (mut sdd, mut sxx, mut sdx) = (0.0, 0.0, 0.0);
    for (d, x) in &pairs {
        sdd += (d - md).powi(2);
        sxx += (x - mx).powi(2);
        sdx += (d - md) * (x - mx);
    }
    if sxx <= f64::EPSILON * f64::EPSILON * mx * mx * nf || sxx == 0.0 {
        return Err(Error::ZeroVariance(characteristic.name().to_string()));
    }
    let correlation = (sdx / (sdd * sxx).sqrt()).clamp(-1.0, 1.0);
    let df = n - 2;
    let t_statistic = if correlation.abs() >= 1.0 {
        correlation.signum() * f64::INFINITY
    } else {
        correlation * (df as f64 / (1.0 - correlation * correlation)).sqrt()
    };
    let p_value = student_t_two_sided_p(t_statistic, u32::try_from(df).unwrap_or(u32::MAX));
    Ok(MelserDiagnostic {
        characteristic: characteristic.name().to_string(),
        period0: period0.to_string(),
        period1: period1.to_string(),
        correlation,
        t_statistic,
        p_value,
        observations: n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{validate_dataset, SaleObservation};
    use crate::regression::ModelSpec;
    use crate::renoir;

    fn hpm() -> IndexMethod {
        IndexMethod::HpmTimeDummy {
            spec: ModelSpec::area_and_ratio("A"),
        }
    }

    #[test]
    fn zero_perturbation_keeps_levels() {
        let ds = renoir::table1();
        let zero = Perturbation::new().with_increment("20", 0.0);
        for method in [IndexMethod::Npgm, hpm()] {
            let checks = check_monotonicity(&ds, &method, "A", &zero).unwrap();
            assert_eq!(checks.len(), 1);
            assert_eq!(checks[0].level_before, checks[0].level_after);
            assert!(checks[0].compliant);
        }
    }

    #[test]
    fn obs29_contrast() {
        let ds = renoir::table1();
        let pert = Perturbation::scaling(&ds, "29", 1.5).unwrap();
        let npgm = check_monotonicity(&ds, &IndexMethod::Npgm, "A", &pert).unwrap();
        assert!(npgm[0].compliant && npgm[0].level_after > npgm[0].level_before);
        let h = check_monotonicity(&ds, &hpm(), "A", &pert).unwrap();
        assert!(!h[0].compliant && h[0].level_after < h[0].level_before);
        assert!((h[0].level_after - 282.6).abs() < 0.5);
    }

    #[test]
    fn perturbation_errors() {
        let ds = renoir::table1();
        let unknown = Perturbation::new().with_increment("nope", 1.0);
        assert!(matches!(
            check_monotonicity(&ds, &IndexMethod::Npgm, "A", &unknown),
            Err(Error::UnknownObservation(_))
        ));
        let negative = Perturbation::new().with_increment("20", -1.0);
        assert!(check_monotonicity(&ds, &IndexMethod::Npgm, "A", &negative).is_err());
        let base = Perturbation::new().with_increment("3", 5.0);
        assert!(check_monotonicity(&ds, &IndexMethod::Npgm, "A", &base).is_err());
    }

    #[test]
    fn grid_search_finds_obs29() {
        let ds = renoir::table1();
        let rep = search_violations(&ds, &hpm(), "A", &[1.5]).unwrap();
        assert_eq!(rep.trials, 15);
        assert!(rep.violating_ids().contains(&"29"));
        let none = search_violations(&ds, &IndexMethod::Npgm, "A", &[1.5, 2.0]).unwrap();
        assert!(none.is_compliant());
    }

    #[test]
    fn grid_validation() {
        let ds = renoir::table1();
        assert!(search_violations(&ds, &hpm(), "A", &[]).is_err());
        assert!(search_violations(&ds, &hpm(), "A", &[1.0]).is_err());
        assert_eq!(default_grid().len(), 20);
        assert_eq!(default_grid()[4], 1.5);
        assert_eq!(*default_grid().last().unwrap(), 3.0);
    }

    #[test]
    fn random_audit_is_deterministic() {
        let ds = renoir::table1();
        let a = random_perturbation_audit(&ds, &hpm(), "A", 50, 11).unwrap();
        let b = random_perturbation_audit(&ds, &hpm(), "A", 50, 11).unwrap();
        assert_eq!(a, b);
        assert!(random_perturbation_audit(&ds, &hpm(), "A", 0, 11).is_err());
    }

    #[test]
    fn random_violations_replay() {
        let ds = renoir::table1();
        let rep = random_perturbation_audit(&ds, &hpm(), "A", 200, 3).unwrap();
        assert!(!rep.violations.is_empty());
        for v in &rep.violations {
            let checks = check_monotonicity(&ds, &hpm(), "A", &v.perturbation).unwrap();
            let c = checks.iter().find(|c| c.period == v.period).unwrap();
            assert!(!c.compliant);
            assert_eq!(c.level_after, v.level_after);
        }
    }

    #[test]
    fn melser_edge_cases() {
        let recs: Vec<_> = [("1", "A"), ("2", "A"), ("3", "B"), ("4", "B"), ("5", "B")]
            .iter()
            .map(|(id, p)| {
                let d = if *p == "B" { 1.0 } else { 0.0 };
                SaleObservation::new(*id, *p, 10.0, 5.0, 1.0)
                    .with_extra("shifted_dummy", d + 7.0)
                    .with_extra(
                        "flat_split",
                        if *id == "1" || *id == "3" { 1.0 } else { 2.0 },
                    )
            })
            .collect();
        let ds = validate_dataset(recs, None).unwrap();
        let one =
            melser_diagnostic(&ds, &Regressor::Extra("shifted_dummy".into()), "A", "B").unwrap();
        assert!((one.correlation - 1.0).abs() < 1e-12);
        assert!(one.p_value < 1e-15);
        // Constant area: zero variance.
        assert!(matches!(
            melser_diagnostic(&ds, &Regressor::Area, "A", "B"),
            Err(Error::ZeroVariance(_))
        ));
    }

    #[test]
    fn melser_independent_characteristic() {
        // Same multiset of values in both periods.
        let vals = [1.0, 2.0, 3.0];
        let mut recs = Vec::new();
        for (p, offset) in [("A", 0), ("B", 10)] {
            for (i, v) in vals.iter().enumerate() {
                recs.push(SaleObservation::new(
                    (offset + i).to_string(),
                    p,
                    5.0,
                    *v,
                    1.0,
                ));
            }
        }
        let ds = validate_dataset(recs, None).unwrap();
        let m = melser_diagnostic(&ds, &Regressor::Area, "A", "B").unwrap();
        assert!(m.correlation.abs() < 1e-15);
        assert!((m.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn melser_table1_area() {
        let m = melser_diagnostic(&renoir::table1(), &Regressor::Area, "A", "B").unwrap();
        // Pearson correlation of the 0/1 dataset indicator with the bundled areas,
        // computed independently: 0.63440...
        assert!(
            (m.correlation - 0.634_400_86).abs() < 1e-6,
            "{}",
            m.correlation
        );
        assert!(m.p_value < 0.05);
    }
}
