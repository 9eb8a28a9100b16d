//! Price index construction.
//!
//! Two methods are provided: the normalized-price geometric mean (NPGM),
//! where a period's level is the geometric mean of its prices per cm², and the
//! hedonic time-dummy index, where a period's level is `exp(δ)` of its fitted
//! dummy. [`decompose_index`] checks the exact OLS identity
//! `exp(δ) = (geometric-mean price ratio) × θ` that links them.

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::domain::{normalize_price, Dataset, SaleObservation};
use crate::error::{Error, Result};
use crate::regression::{self, dummy_name, ModelSpec, RegressionResult};

pub const DEFAULT_BASE_VALUE: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MethodKind {
    Npgm,
    HpmTimeDummy,
}

/// How an index is computed from a dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndexMethod {
    Npgm,
    /// Time-dummy index of a hedonic model. The dummy reference is always the
    /// index base period; any reference stored in the spec is replaced.
    HpmTimeDummy {
        spec: ModelSpec,
    },
}

impl IndexMethod {
    pub fn kind(&self) -> MethodKind {
        match self {
            IndexMethod::Npgm => MethodKind::Npgm,
            IndexMethod::HpmTimeDummy { .. } => MethodKind::HpmTimeDummy,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IndexMethod::Npgm => "npgm",
            IndexMethod::HpmTimeDummy { .. } => "hpm",
        }
    }

    pub fn compute(&self, ds: &Dataset, base_period: &str, base_value: f64) -> Result<IndexSeries> {
        match self {
            IndexMethod::Npgm => npgm_index(ds, base_period, base_value),
            IndexMethod::HpmTimeDummy { spec } => {
                hpm_timedummy_index(ds, &spec.with_reference(base_period), base_value)
                    .map(|h| h.series)
            }
        }
    }
}

/// Per-period index levels relative to a base period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexSeries {
    pub method: MethodKind,
    pub base_period: String,
    pub base_value: f64,
    /// Levels in dataset period order.
    pub levels: IndexMap<String, f64>,
}

impl IndexSeries {
    pub fn level(&self, period: &str) -> Option<f64> {
        self.levels.get(period).copied()
    }

    /// `period,level` rows with a header line.
    pub fn to_plot_csv(&self) -> String {
        let mut out = String::from("period,level\n");
        for (p, v) in &self.levels {
            out.push_str(&format!("{p},{v}\n"));
        }
        out
    }
}

fn check_base_value(base_value: f64) -> Result<()> {
    if base_value.is_finite() && base_value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "base value must be finite and positive, got {base_value}"
        )))
    }
}

fn mean_log_unitary<'a>(
    observations: impl IntoIterator<Item = &'a SaleObservation>,
) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for obs in observations {
        sum += normalize_price(obs)?.ln();
        n += 1;
    }
    if n == 0 {
        return Err(Error::InvalidArgument(
            "geometric mean of an empty period".into(),
        ));
    }
    Ok(sum / n as f64)
}

/// Geometric mean of the unitary prices of one period's observations.
pub fn npgm_level<'a>(observations: impl IntoIterator<Item = &'a SaleObservation>) -> Result<f64> {
    mean_log_unitary(observations).map(f64::exp)
}

pub fn npgm_index(ds: &Dataset, base_period: &str, base_value: f64) -> Result<IndexSeries> {
    ds.require_periods(2)?;
    ds.require_period(base_period)?;
    check_base_value(base_value)?;
    let base_log = mean_log_unitary(ds.in_period(base_period))?;
    let mut levels = IndexMap::new();
    for p in ds.periods() {
        let level = if p == base_period {
            base_value
        } else {
            base_value * (mean_log_unitary(ds.in_period(p))? - base_log).exp()
        };
        levels.insert(p.clone(), level);
    }
    Ok(IndexSeries {
        method: MethodKind::Npgm,
        base_period: base_period.to_string(),
        base_value,
        levels,
    })
}

/// Time-dummy index together with the regression it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HedonicIndex {
    pub series: IndexSeries,
    pub regression: RegressionResult,
}

/// Index from the time dummies of `spec`, based at the spec's reference period.
pub fn hpm_timedummy_index(
    ds: &Dataset,
    spec: &ModelSpec,
    base_value: f64,
) -> Result<HedonicIndex> {
    let reference = spec
        .time_dummy_reference
        .as_deref()
        .ok_or_else(|| Error::InvalidModel("time dummies are not enabled".into()))?;
    ds.require_periods(2)?;
    check_base_value(base_value)?;
    let regression = regression::fit(ds, spec)?;
    let mut levels = IndexMap::new();
    for p in ds.periods() {
        let level = if p == reference {
            base_value
        } else {
            let delta = regression
                .coefficient(&dummy_name(p))
                .expect("design has a dummy for every non-reference period");
            base_value * delta.exp()
        };
        levels.insert(p.clone(), level);
    }
    Ok(HedonicIndex {
        series: IndexSeries {
            method: MethodKind::HpmTimeDummy,
            base_period: reference.to_string(),
            base_value,
            levels,
        },
        regression,
    })
}

fn characteristic_mean(ds: &Dataset, period: &str, r: &regression::Regressor) -> Result<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for obs in ds.in_period(period) {
        sum += r.value(obs)?;
        n += 1;
    }
    if n == 0 {
        return Err(Error::EmptyPeriod(period.to_string()));
    }
    Ok(sum / n as f64)
}

/// `θ = exp[Σ_k β_k (φ_k⁰ − φ_k¹)]` where `φ_k^t` is the mean of characteristic
/// `k` in period `t`. Pinned terms contribute with their fixed coefficient.
pub fn theta_factor(
    result: &RegressionResult,
    ds: &Dataset,
    period0: &str,
    period1: &str,
    spec: &ModelSpec,
) -> Result<f64> {
    ds.require_period(period0)?;
    ds.require_period(period1)?;
    let mut exponent = 0.0;
    for r in &spec.regressors {
        let beta = result
            .coefficient(r.name())
            .ok_or_else(|| Error::InvalidModel(format!("regression has no coefficient for {r}")))?;
        exponent +=
            beta * (characteristic_mean(ds, period0, r)? - characteristic_mean(ds, period1, r)?);
    }
    for pin in &spec.pinned {
        let r = &pin.regressor;
        exponent += pin.coefficient
            * (characteristic_mean(ds, period0, r)? - characteristic_mean(ds, period1, r)?);
    }
    Ok(exponent.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub period0: String,
    pub period1: String,
    /// Geometric mean of raw prices in period 1 over period 0.
    pub geomean_ratio: f64,
    pub theta: f64,
    pub product: f64,
    pub exp_delta: f64,
    /// `|product − exp_delta| / exp_delta`.
    pub identity_gap: f64,
}

/// Fits `spec` on the two periods alone (reference `period0`) and splits
/// `exp(δ)` into the raw geometric-mean ratio and θ.
pub fn decompose_index(
    ds: &Dataset,
    spec: &ModelSpec,
    period0: &str,
    period1: &str,
) -> Result<DecompositionReport> {
    if period0 == period1 {
        return Err(Error::InvalidArgument(
            "decomposition needs two distinct periods".into(),
        ));
    }
    if !spec.include_intercept {
        return Err(Error::InvalidModel(
            "decomposition requires a model with an intercept".into(),
        ));
    }
    let pair = ds.restrict_to(&[period0, period1])?;
    let spec = spec.with_reference(period0);
    let result = regression::fit(&pair, &spec)?;
    let delta = result
        .coefficient(&dummy_name(period1))
        .expect("two-period design has one dummy");
    let exp_delta = delta.exp();

    let mean_log_price = |p: &str| {
        let (sum, n) = pair
            .in_period(p)
            .fold((0.0, 0usize), |(s, n), o| (s + o.price.ln(), n + 1));
        sum / n as f64
    };
    let geomean_ratio = (mean_log_price(period1) - mean_log_price(period0)).exp();
    let theta = theta_factor(&result, &pair, period0, period1, &spec)?;
    let product = geomean_ratio * theta;
    Ok(DecompositionReport {
        period0: period0.to_string(),
        period1: period1.to_string(),
        geomean_ratio,
        theta,
        product,
        exp_delta,
        identity_gap: (product - exp_delta).abs() / exp_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::validate_dataset;
    use crate::regression::Regressor;
    use crate::renoir;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn singleton_and_pair_levels() {
        let one = SaleObservation::new("1", "A", 1412.16, 1.0, 1.0);
        assert!((npgm_level([&one]).unwrap() - 1412.16).abs() < 1e-9);
        let a = SaleObservation::new("1", "A", 2.0, 1.0, 1.0);
        let b = SaleObservation::new("2", "A", 80.0, 10.0, 1.0);
        assert!((npgm_level([&a, &b]).unwrap() - 4.0).abs() < 1e-12);
        assert!(npgm_level(std::iter::empty()).is_err());
    }

    #[test]
    fn table1_dataset_a_level() {
        // exp(mean(ln(P/A))) over the 14 dataset-A rows, evaluated separately
        // at high precision: 912.3939...
        let ds = renoir::table1();
        let level = npgm_level(ds.in_period("A")).unwrap();
        assert!((level - 912.0).abs() <= 1.0, "{level}");
    }

    #[test]
    fn npgm_ab_and_ac() {
        let ab = npgm_index(&renoir::table1(), "A", 100.0).unwrap();
        let ac = npgm_index(&renoir::dataset_ac(), "A", 100.0).unwrap();
        assert_eq!(ab.level("A"), Some(100.0));
        let b = ab.level("B").unwrap();
        let c = ac.level("C").unwrap();
        assert!((b - 175.0).abs() <= 1.0, "{b}");
        assert!((c - 180.0).abs() <= 1.0, "{c}");
        assert!(c > b);
    }

    #[test]
    fn base_value_homogeneity() {
        let ds = renoir::table1();
        let hundred = npgm_index(&ds, "A", 100.0).unwrap();
        let one = npgm_index(&ds, "A", 1.0).unwrap();
        for (p, v) in &hundred.levels {
            assert!(rel(one.levels[p] * 100.0, *v) < 1e-14);
        }
    }

    #[test]
    fn npgm_errors() {
        let ds = renoir::table1();
        assert!(matches!(
            npgm_index(&ds, "Z", 100.0),
            Err(Error::UnknownPeriod(_))
        ));
        assert!(npgm_index(&ds, "A", 0.0).is_err());
        let single = ds.restrict_to(&["A"]).unwrap();
        assert!(matches!(
            npgm_index(&single, "A", 100.0),
            Err(Error::TooFewPeriods { .. })
        ));
    }

    #[test]
    fn hpm_levels_from_table_coefficients() {
        let ab =
            hpm_timedummy_index(&renoir::table1(), &ModelSpec::area_and_ratio("A"), 100.0).unwrap();
        let ac = hpm_timedummy_index(
            &renoir::dataset_ac(),
            &ModelSpec::area_and_ratio("A"),
            100.0,
        )
        .unwrap();
        let b = ab.series.level("B").unwrap();
        let c = ac.series.level("C").unwrap();
        assert!((b - 291.1).abs() <= 0.5, "{b}");
        assert!((c - 282.6).abs() <= 0.5, "{c}");
        assert!(c < b);
        assert_eq!(ab.series.level("A"), Some(100.0));
    }

    #[test]
    fn hpm_requires_dummies() {
        let mut spec = ModelSpec::area_and_ratio("A");
        spec.time_dummy_reference = None;
        assert!(hpm_timedummy_index(&renoir::table1(), &spec, 100.0).is_err());
    }

    #[test]
    fn pinned_log_area_model_equals_npgm() {
        for ds in [renoir::table1(), renoir::dataset_ac()] {
            let p1 = ds.periods()[1].clone();
            let npgm = npgm_index(&ds, "A", 100.0).unwrap();
            let hpm = hpm_timedummy_index(&ds, &ModelSpec::unitary_price("A"), 100.0).unwrap();
            assert!(rel(npgm.levels[&p1], hpm.series.levels[&p1]) < 1e-8);
        }
    }

    #[test]
    fn theta_is_one_for_equal_means() {
        let recs = vec![
            SaleObservation::new("1", "A", 10.0, 5.0, 1.0),
            SaleObservation::new("2", "A", 30.0, 7.0, 2.0),
            SaleObservation::new("3", "A", 20.0, 6.0, 3.0),
            SaleObservation::new("4", "B", 40.0, 7.0, 1.0),
            SaleObservation::new("5", "B", 35.0, 5.0, 3.0),
            SaleObservation::new("6", "B", 60.0, 6.0, 2.0),
        ];
        let ds = validate_dataset(recs, None).unwrap();
        let spec = ModelSpec::area_and_ratio("A");
        let res = regression::fit(&ds, &spec).unwrap();
        assert!((theta_factor(&res, &ds, "A", "B", &spec).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn theta_matches_direct_evaluation() {
        // θ from the bundled means and the published A∪B coefficients.
        let ds = renoir::table1();
        let mean = |p: &str, f: fn(&SaleObservation) -> f64| {
            let v: Vec<f64> = ds.in_period(p).map(f).collect();
            v.iter().sum::<f64>() / v.len() as f64
        };
        let direct = (0.000411 * (mean("A", |o| o.area) - mean("B", |o| o.area))
            + 1.051534 * (mean("A", |o| o.aspect_ratio) - mean("B", |o| o.aspect_ratio)))
        .exp();
        let spec = ModelSpec::area_and_ratio("A");
        let res = regression::fit(&ds, &spec).unwrap();
        let theta = theta_factor(&res, &ds, "A", "B", &spec).unwrap();
        // The printed coefficients are rounded, so the match is approximate.
        assert!(rel(theta, direct) < 2e-3, "{theta} vs {direct}");
        assert!(theta < 1.0);
    }

    #[test]
    fn theta_without_regressors() {
        let ds = renoir::table1();
        let spec = ModelSpec::dummies_only("A");
        let res = regression::fit(&ds, &spec).unwrap();
        assert_eq!(theta_factor(&res, &ds, "A", "B", &spec).unwrap(), 1.0);
        assert!(theta_factor(&res, &ds, "A", "Q", &spec).is_err());
    }

    #[test]
    fn decomposition_identity_on_table1() {
        let spec = ModelSpec::area_and_ratio("A");
        let ab = decompose_index(&renoir::table1(), &spec, "A", "B").unwrap();
        assert!(ab.identity_gap <= 1e-8, "{ab:?}");
        let ac = decompose_index(&renoir::dataset_ac(), &spec, "A", "C").unwrap();
        assert!(ac.identity_gap <= 1e-8, "{ac:?}");

        let plain =
            decompose_index(&renoir::table1(), &ModelSpec::dummies_only("A"), "A", "B").unwrap();
        assert_eq!(plain.theta, 1.0);
        assert!(rel(plain.geomean_ratio, plain.exp_delta) < 1e-12);
    }

    #[test]
    fn decomposition_with_extra_regressor() {
        let ds = renoir::table1();
        let recs: Vec<_> = ds
            .observations()
            .iter()
            .map(|o| o.clone().with_extra("log_ratio", o.aspect_ratio.ln()))
            .collect();
        let ds = validate_dataset(recs, None).unwrap();
        let spec = ModelSpec::new(
            vec![Regressor::LogArea, Regressor::Extra("log_ratio".into())],
            "A",
        );
        assert!(decompose_index(&ds, &spec, "A", "B").unwrap().identity_gap <= 1e-8);
    }

    #[test]
    fn method_compute_rebases_reference() {
        let ds = renoir::table1();
        let method = IndexMethod::HpmTimeDummy {
            spec: ModelSpec::area_and_ratio("B"),
        };
        let s = method.compute(&ds, "A", 100.0).unwrap();
        assert_eq!(s.base_period, "A");
        assert_eq!(s.level("A"), Some(100.0));
    }

    #[test]
    fn plot_csv_rows() {
        let s = npgm_index(&renoir::table1(), "A", 100.0).unwrap();
        let csv = s.to_plot_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "period,level");
        assert_eq!(lines[1], "A,100");
        assert!(lines[2].starts_with("B,17"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn two_period_dataset() -> impl Strategy<Value = Dataset> {
            prop::collection::vec(
                (1e3f64..1e8, 50.0f64..9000.0, 0.3f64..1.6, any::<bool>()),
                4..20,
            )
            .prop_map(|rows| {
                let recs = rows
                    .iter()
                    .enumerate()
                    .map(|(i, &(p, a, r, second))| {
                        // First two rows pin both periods non-empty.
                        let period = match i {
                            0 => "A",
                            1 => "B",
                            _ if second => "B",
                            _ => "A",
                        };
                        SaleObservation::new(i.to_string(), period, p, a, r)
                    })
                    .collect();
                validate_dataset(recs, Some(&["A".to_string(), "B".to_string()])).unwrap()
            })
        }

        proptest! {
            #[test]
            fn npgm_is_monotone(ds in two_period_dataset(), bumps in prop::collection::vec(0.0f64..2.0, 20)) {
                let before = npgm_index(&ds, "A", 100.0).unwrap().levels["B"];
                let prices: std::collections::HashMap<&str, f64> = ds
                    .in_period("B")
                    .zip(&bumps)
                    .map(|(o, b)| (o.id.as_str(), o.price * (1.0 + b)))
                    .collect();
                let after = npgm_index(&ds.with_prices(&prices).unwrap(), "A", 100.0).unwrap().levels["B"];
                prop_assert!(after >= before);
            }

            #[test]
            fn npgm_ignores_order(ds in two_period_dataset()) {
                let mut recs = ds.observations().to_vec();
                recs.reverse();
                let rev = validate_dataset(recs, Some(ds.periods())).unwrap();
                let a = npgm_index(&ds, "A", 100.0).unwrap().levels["B"];
                let b = npgm_index(&rev, "A", 100.0).unwrap().levels["B"];
                prop_assert!(rel(a, b) < 1e-12);
            }

            #[test]
            fn doubling_period_prices_doubles_level(ds in two_period_dataset()) {
                let before = npgm_index(&ds, "A", 100.0).unwrap();
                let prices: std::collections::HashMap<&str, f64> =
                    ds.in_period("B").map(|o| (o.id.as_str(), 2.0 * o.price)).collect();
                let after = npgm_index(&ds.with_prices(&prices).unwrap(), "A", 100.0).unwrap();
                prop_assert_eq!(after.levels["A"], 100.0);
                prop_assert!(rel(after.levels["B"], 2.0 * before.levels["B"]) < 1e-12);
            }
        }
    }
}
