//! Bundled example: 29 Renoir auction sales from 1989–1990 in two datasets.
//!
//! Dataset A holds the smaller canvases, dataset B the larger ones. Dataset C
//! is B with the price of observation 29 raised by half. Published regression
//! results for A∪B and A∪C are kept here for reproduction checks.

use crate::cli::schema::{read_csv, InputSchema};
use crate::domain::Dataset;
use crate::error::Result;

/// The fixture file, verbatim.
pub const TABLE1_CSV: &str = include_str!("../data/renoir_1989_1990.csv");

pub const FIXTURE_NAME: &str = "renoir_1989_1990.csv";

/// Observation whose price is raised to build dataset C.
pub const SHOCKED_OBSERVATION: &str = "29";
pub const SHOCK_MULTIPLIER: f64 = 1.5;

/// Published price per cm² for each row, in fixture order.
pub const PUBLISHED_UNITARY_PRICES: [f64; 29] = [
    1_412.16, 576.52, 655.55, 452.93, 347.14, 601.37, 2_094.49, 924.07, 1_306.24, 286.54, 1_378.55,
    1_276.46, 1_768.65, 2_435.11, 358.82, 1_237.41, 591.26, 795.28, 1_636.24, 644.87, 4_302.84,
    946.38, 2_788.21, 1_752.74, 505.84, 2_564.44, 3_258.22, 3_628.84, 16_513.89,
];

/// One printed row of a regression table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PublishedRow {
    /// Design column name.
    pub term: &'static str,
    pub coefficient: f64,
    pub standard_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
}

const fn row(
    term: &'static str,
    coefficient: f64,
    standard_error: f64,
    t_stat: f64,
    p_value: f64,
) -> PublishedRow {
    PublishedRow {
        term,
        coefficient,
        standard_error,
        t_stat,
        p_value,
    }
}

/// `ln P ~ 1 + area + hw_ratio + dummy` on A∪B.
pub const PUBLISHED_FIT_AB: [PublishedRow; 4] = [
    row("intercept", 11.619049, 0.7046, 16.49, 6.053e-15),
    row("area", 0.000411, 9.3484e-05, 4.39, 0.00018),
    row("hw_ratio", 1.051534, 0.6297, 1.67, 0.10740),
    row("dummy_B", 1.068575, 0.4522, 2.36, 0.02622),
];

/// Same model on A∪C.
pub const PUBLISHED_FIT_AC: [PublishedRow; 4] = [
    row("intercept", 11.624505, 0.7321, 15.88, 1.44e-14),
    row("area", 0.000429, 9.71e-05, 4.42, 0.00017),
    row("hw_ratio", 1.034313, 0.6543, 1.58, 0.12647),
    row("dummy_C", 1.038821, 0.4699, 2.21, 0.03642),
];

/// Datasets A and B.
pub fn table1() -> Dataset {
    read_csv(TABLE1_CSV.as_bytes(), &InputSchema::default(), FIXTURE_NAME)
        .expect("bundled fixture is valid")
}

/// Datasets A and C.
pub fn dataset_ac() -> Dataset {
    derive_dataset_c(&table1()).expect("bundled fixture has observation 29 in B")
}

/// Relabels period B as C and applies the observation-29 price shock.
pub fn derive_dataset_c(ab: &Dataset) -> Result<Dataset> {
    ab.relabel_period("B", "C")?
        .with_scaled_price(SHOCKED_OBSERVATION, SHOCK_MULTIPLIER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::normalize_price;

    #[test]
    fn fixture_shape() {
        let ds = table1();
        assert_eq!(ds.len(), 29);
        assert_eq!(ds.observations()[28].price, 146_841_502.0);
        assert_eq!(ds.observations()[24].area, 8_804.25);
    }

    #[test]
    fn printed_unitary_prices() {
        for (obs, printed) in table1().observations().iter().zip(PUBLISHED_UNITARY_PRICES) {
            let p = normalize_price(obs).unwrap().value();
            assert!(
                (p - printed).abs() <= 0.005,
                "obs {}: {p} vs {printed}",
                obs.id
            );
        }
    }
}
