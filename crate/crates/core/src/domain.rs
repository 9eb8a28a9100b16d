//! Sale records, validation and period partitioning.
//!
//! A [`Dataset`] can only be obtained through [`validate_dataset`], so every
//! other module may rely on positive prices, areas and aspect ratios, unique
//! ids and non-empty periods.

use std::collections::{BTreeMap, HashMap, HashSet};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, RecordIssue, Result};

/// One auction sale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaleObservation {
    pub id: String,
    /// Opaque period label, e.g. `"A"` or `"1990"`.
    pub period: String,
    /// Sale price (currency units).
    pub price: f64,
    /// Surface area in cm².
    pub area: f64,
    /// Height divided by width.
    pub aspect_ratio: f64,
    /// Additional named characteristics usable as hedonic regressors.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl SaleObservation {
    pub fn new(
        id: impl Into<String>,
        period: impl Into<String>,
        price: f64,
        area: f64,
        aspect_ratio: f64,
    ) -> Self {
        Self {
            id: id.into(),
            period: period.into(),
            price,
            area,
            aspect_ratio,
            extra: BTreeMap::new(),
        }
    }

    pub fn with_extra(mut self, name: impl Into<String>, value: f64) -> Self {
        self.extra.insert(name.into(), value);
        self
    }

    fn issues(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (field, value) in [
            ("price", self.price),
            ("area", self.area),
            ("aspect_ratio", self.aspect_ratio),
        ] {
            if !(value.is_finite() && value > 0.0) {
                out.push(format!("{field} must be finite and positive, got {value}"));
            }
        }
        for (name, value) in &self.extra {
            if !value.is_finite() {
                out.push(format!("characteristic {name} must be finite, got {value}"));
            }
        }
        if self.id.is_empty() {
            out.push("empty id".to_string());
        }
        if self.period.is_empty() {
            out.push("empty period label".to_string());
        }
        out
    }
}

/// Price per unit of area (currency per cm²).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct UnitaryPrice(f64);

impl UnitaryPrice {
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn ln(self) -> f64 {
        self.0.ln()
    }
}

/// `price / area` of a single sale.
pub fn normalize_price(obs: &SaleObservation) -> Result<UnitaryPrice> {
    let valid = |v: f64| v.is_finite() && v > 0.0;
    if !valid(obs.price) || !valid(obs.area) {
        return Err(Error::InvalidRecords(vec![RecordIssue {
            id: Some(obs.id.clone()),
            row: None,
            message: format!(
                "cannot normalize price {} by area {}: both must be finite and positive",
                obs.price, obs.area
            ),
        }]));
    }
    Ok(UnitaryPrice(obs.price / obs.area))
}

/// Validated, period-ordered collection of sales.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dataset {
    observations: Vec<SaleObservation>,
    periods: Vec<String>,
}

/// Validates raw records into a [`Dataset`].
///
/// Periods are listed in order of first appearance unless `period_order` is
/// given, in which case it must name every period present exactly once and
/// nothing else. All record problems are collected before failing.
pub fn validate_dataset(
    records: Vec<SaleObservation>,
    period_order: Option<&[String]>,
) -> Result<Dataset> {
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut issues = Vec::new();
    let mut seen: HashSet<&str> = HashSet::new();
    for rec in &records {
        for message in rec.issues() {
            issues.push(RecordIssue {
                id: Some(rec.id.clone()),
                row: None,
                message,
            });
        }
        if !seen.insert(rec.id.as_str()) {
            issues.push(RecordIssue {
                id: Some(rec.id.clone()),
                row: None,
                message: format!("duplicate id {:?}", rec.id),
            });
        }
    }

    let mut appearance: Vec<String> = Vec::new();
    for rec in &records {
        if !appearance.contains(&rec.period) {
            appearance.push(rec.period.clone());
        }
    }

    let periods = match period_order {
        None => appearance,
        Some(order) => {
            let mut listed = HashSet::new();
            for label in order {
                if !listed.insert(label.as_str()) {
                    issues.push(RecordIssue {
                        id: None,
                        row: None,
                        message: format!("period {label:?} listed twice in period order"),
                    });
                } else if !appearance.contains(label) {
                    issues.push(RecordIssue {
                        id: None,
                        row: None,
                        message: format!("period {label:?} in period order has no observations"),
                    });
                }
            }
            for label in &appearance {
                if !listed.contains(label.as_str()) {
                    issues.push(RecordIssue {
                        id: None,
                        row: None,
                        message: format!("period {label:?} missing from period order"),
                    });
                }
            }
            order.to_vec()
        }
    };

    if !issues.is_empty() {
        return Err(Error::InvalidRecords(issues));
    }
    Ok(Dataset {
        observations: records,
        periods,
    })
}

impl Dataset {
    pub fn observations(&self) -> &[SaleObservation] {
        &self.observations
    }

    pub fn periods(&self) -> &[String] {
        &self.periods
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn has_period(&self, label: &str) -> bool {
        self.periods.iter().any(|p| p == label)
    }

    pub fn require_period(&self, label: &str) -> Result<()> {
        if self.has_period(label) {
            Ok(())
        } else {
            Err(Error::UnknownPeriod(label.to_string()))
        }
    }

    pub fn require_periods(&self, required: usize) -> Result<()> {
        if self.periods.len() < required {
            return Err(Error::TooFewPeriods {
                required,
                found: self.periods.len(),
            });
        }
        Ok(())
    }

    pub fn get(&self, id: &str) -> Option<&SaleObservation> {
        self.observations.iter().find(|o| o.id == id)
    }

    /// Observations of one period, in dataset order.
    pub fn in_period<'a>(&'a self, label: &'a str) -> impl Iterator<Item = &'a SaleObservation> {
        self.observations.iter().filter(move |o| o.period == label)
    }

    /// Groups observations by period, keyed in period order.
    pub fn partition_by_period(&self) -> IndexMap<&str, Vec<&SaleObservation>> {
        let mut parts: IndexMap<&str, Vec<&SaleObservation>> = self
            .periods
            .iter()
            .map(|p| (p.as_str(), Vec::new()))
            .collect();
        for obs in &self.observations {
            parts
                .get_mut(obs.period.as_str())
                .expect("validated dataset has every period listed")
                .push(obs);
        }
        parts
    }

    /// Names of all extra characteristics defined on every observation.
    pub fn common_extra_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.observations[0].extra.keys().cloned().collect();
        names.retain(|n| self.observations.iter().all(|o| o.extra.contains_key(n)));
        names
    }

    /// Keeps only the listed periods, in the given order.
    pub fn restrict_to(&self, periods: &[&str]) -> Result<Dataset> {
        for p in periods {
            self.require_period(p)?;
        }
        let records = self
            .observations
            .iter()
            .filter(|o| periods.contains(&o.period.as_str()))
            .cloned()
            .collect();
        let order: Vec<String> = periods.iter().map(|p| p.to_string()).collect();
        validate_dataset(records, Some(&order))
    }

    /// Copy with the prices of some observations replaced.
    pub fn with_prices(&self, new_prices: &HashMap<&str, f64>) -> Result<Dataset> {
        for id in new_prices.keys() {
            if self.get(id).is_none() {
                return Err(Error::UnknownObservation(id.to_string()));
            }
        }
        let records = self
            .observations
            .iter()
            .map(|o| {
                let mut o = o.clone();
                if let Some(&p) = new_prices.get(o.id.as_str()) {
                    o.price = p;
                }
                o
            })
            .collect();
        validate_dataset(records, Some(&self.periods))
    }

    /// Copy with one observation's price multiplied by `factor`.
    pub fn with_scaled_price(&self, id: &str, factor: f64) -> Result<Dataset> {
        let obs = self
            .get(id)
            .ok_or_else(|| Error::UnknownObservation(id.to_string()))?;
        let prices = HashMap::from([(id, obs.price * factor)]);
        self.with_prices(&prices)
    }

    /// Copy with a period label renamed.
    pub fn relabel_period(&self, from: &str, to: &str) -> Result<Dataset> {
        self.require_period(from)?;
        if from != to && self.has_period(to) {
            return Err(Error::InvalidArgument(format!(
                "period {to:?} already exists"
            )));
        }
        let rename = |p: &String| if p == from { to.to_string() } else { p.clone() };
        let records = self
            .observations
            .iter()
            .map(|o| SaleObservation {
                period: rename(&o.period),
                ..o.clone()
            })
            .collect();
        let order: Vec<String> = self.periods.iter().map(rename).collect();
        validate_dataset(records, Some(&order))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renoir;

    fn obs(id: &str, period: &str, price: f64) -> SaleObservation {
        SaleObservation::new(id, period, price, 10.0, 1.0)
    }

    #[test]
    fn normalize_table1_rows() {
        let first = SaleObservation::new("1", "A", 105_771.0, 74.90, 1.129);
        assert!((normalize_price(&first).unwrap().value() - 1412.16).abs() <= 0.005);
        let unit = SaleObservation::new("x", "A", 100.0, 100.0, 1.0);
        assert_eq!(normalize_price(&unit).unwrap().value(), 1.0);
        let last_a = SaleObservation::new("14", "A", 2_295_088.0, 942.50, 1.121);
        assert!((normalize_price(&last_a).unwrap().value() - 2435.11).abs() <= 0.005);
    }

    #[test]
    fn normalize_rejects_bad_values() {
        for (price, area) in [
            (0.0, 1.0),
            (1.0, -2.0),
            (f64::NAN, 1.0),
            (1.0, f64::INFINITY),
        ] {
            let o = SaleObservation::new("bad", "A", price, area, 1.0);
            assert!(normalize_price(&o).is_err());
        }
    }

    #[test]
    fn empty_dataset_rejected() {
        let err = validate_dataset(vec![], None).unwrap_err();
        assert_eq!(err.to_string(), "empty dataset");
    }

    #[test]
    fn duplicate_id_named() {
        let err = validate_dataset(vec![obs("1", "A", 1.0), obs("1", "B", 2.0)], None).unwrap_err();
        assert!(err.to_string().contains("duplicate id \"1\""), "{err}");
    }

    #[test]
    fn all_issues_reported() {
        let recs = vec![
            SaleObservation::new("1", "A", -1.0, 10.0, 1.0),
            SaleObservation::new("2", "A", 1.0, 0.0, 0.0),
        ];
        match validate_dataset(recs, None).unwrap_err() {
            Error::InvalidRecords(issues) => assert_eq!(issues.len(), 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn explicit_period_order() {
        let recs = vec![obs("1", "B", 1.0), obs("2", "A", 1.0)];
        let ds = validate_dataset(recs.clone(), None).unwrap();
        assert_eq!(ds.periods(), ["B", "A"]);
        let order = vec!["A".to_string(), "B".to_string()];
        let ds = validate_dataset(recs.clone(), Some(&order)).unwrap();
        assert_eq!(ds.periods(), ["A", "B"]);
        let bad = vec!["A".to_string(), "C".to_string()];
        assert!(validate_dataset(recs, Some(&bad)).is_err());
    }

    #[test]
    fn table1_partitions() {
        let ds = renoir::table1();
        assert_eq!(ds.periods(), ["A", "B"]);
        let parts = ds.partition_by_period();
        assert_eq!(parts["A"].len(), 14);
        assert_eq!(parts["B"].len(), 15);

        let ac = renoir::dataset_ac();
        let parts = ac.partition_by_period();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), ["A", "C"]);
        assert_eq!(parts["A"].len(), 14);
        assert_eq!(parts["C"].len(), 15);
        assert_eq!(ac.get("29").unwrap().price, 146_841_502.0 * 1.5);
    }

    #[test]
    fn single_period_partition() {
        let ds = validate_dataset(vec![obs("1", "A", 1.0), obs("2", "A", 3.0)], None).unwrap();
        assert_eq!(ds.partition_by_period().len(), 1);
        assert!(matches!(
            ds.require_periods(2),
            Err(Error::TooFewPeriods {
                required: 2,
                found: 1
            })
        ));
    }

    #[test]
    fn validation_is_idempotent() {
        let ds = renoir::table1();
        let again = validate_dataset(ds.observations().to_vec(), Some(ds.periods())).unwrap();
        assert_eq!(ds, again);
    }

    #[test]
    fn restrict_and_scale() {
        let ds = renoir::table1();
        let a = ds.restrict_to(&["A"]).unwrap();
        assert_eq!(a.len(), 14);
        assert!(ds.restrict_to(&["Z"]).is_err());
        assert!(matches!(
            ds.with_scaled_price("99", 2.0),
            Err(Error::UnknownObservation(_))
        ));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn unitary_price_times_area_recovers_price(price in 1e-3f64..1e9, area in 1e-2f64..1e5) {
                let o = SaleObservation::new("p", "A", price, area, 1.0);
                let back = normalize_price(&o).unwrap().value() * area;
                prop_assert!((back - price).abs() <= price * f64::EPSILON);
            }

            #[test]
            fn partition_sizes_survive_reordering(seed in any::<u64>()) {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let ds = renoir::table1();
                let mut recs = ds.observations().to_vec();
                recs.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
                let shuffled = validate_dataset(recs, Some(ds.periods())).unwrap();
                let sizes = |d: &Dataset| d.partition_by_period().values().map(Vec::len).collect::<Vec<_>>();
                prop_assert_eq!(sizes(&ds), sizes(&shuffled));
            }
        }
    }
}
