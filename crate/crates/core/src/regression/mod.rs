//! Ordinary least squares for hedonic log-price models.
//!
//! The response is always the natural log of price. Design columns are laid
//! out as `[intercept, regressors..., dummy per non-reference period...]`.
//! Coefficients are solved with Householder QR and the covariance matrix is
//! formed from `R⁻¹`, never from an explicit inverse of `XᵀX`.

mod qr;
pub mod tdist;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::domain::{Dataset, SaleObservation};
use crate::error::{Error, Result};
use qr::HouseholderQr;

pub use tdist::{regularized_incomplete_beta, student_t_two_sided_p};

/// Relative threshold on `|R_jj| / max |R_ii|` below which a column counts
/// as linearly dependent.
pub const RANK_TOLERANCE: f64 = 1e-10;

pub const INTERCEPT: &str = "intercept";

/// A characteristic extracted from each observation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regressor {
    Area,
    AspectRatio,
    LogArea,
    Extra(String),
}

impl Regressor {
    /// Column label used in designs and reports.
    pub fn name(&self) -> &str {
        match self {
            Regressor::Area => "area",
            Regressor::AspectRatio => "hw_ratio",
            Regressor::LogArea => "log_area",
            Regressor::Extra(name) => name,
        }
    }

    pub fn value(&self, obs: &SaleObservation) -> Result<f64> {
        match self {
            Regressor::Area => Ok(obs.area),
            Regressor::AspectRatio => Ok(obs.aspect_ratio),
            Regressor::LogArea => positive_ln(obs.area, "area"),
            Regressor::Extra(name) => {
                obs.extra
                    .get(name)
                    .copied()
                    .ok_or_else(|| Error::UnknownCharacteristic {
                        name: name.clone(),
                        available: available_names(obs),
                    })
            }
        }
    }
}

fn available_names(obs: &SaleObservation) -> Vec<String> {
    let mut names: Vec<String> = ["area", "aspect_ratio", "log_area"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend(obs.extra.keys().cloned());
    names
}

impl fmt::Display for Regressor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Regressor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "" => return Err(Error::InvalidModel("empty regressor name".into())),
            "area" | "area_cm2" => Regressor::Area,
            "aspect_ratio" | "hw_ratio" => Regressor::AspectRatio,
            "log_area" => Regressor::LogArea,
            other => Regressor::Extra(other.to_string()),
        })
    }
}

fn positive_ln(v: f64, what: &str) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v.ln())
    } else {
        Err(Error::InvalidModel(format!(
            "log of non-positive {what} {v}"
        )))
    }
}

/// A regressor whose coefficient is fixed rather than estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinnedTerm {
    pub regressor: Regressor,
    pub coefficient: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Response {
    #[default]
    LogPrice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(default)]
    pub response: Response,
    pub regressors: Vec<Regressor>,
    /// Terms moved to the response side with a fixed coefficient.
    #[serde(default)]
    pub pinned: Vec<PinnedTerm>,
    pub include_intercept: bool,
    /// Reference period for time dummies; `None` fits no dummies.
    pub time_dummy_reference: Option<String>,
}

impl ModelSpec {
    pub fn new(regressors: Vec<Regressor>, reference: impl Into<String>) -> Self {
        Self {
            response: Response::LogPrice,
            regressors,
            pinned: Vec::new(),
            include_intercept: true,
            time_dummy_reference: Some(reference.into()),
        }
    }

    /// `ln P = α + β₁ area + β₂ (height/width) + Σ δ τ`.
    pub fn area_and_ratio(reference: impl Into<String>) -> Self {
        Self::new(vec![Regressor::Area, Regressor::AspectRatio], reference)
    }

    /// Intercept and time dummies only.
    pub fn dummies_only(reference: impl Into<String>) -> Self {
        Self::new(Vec::new(), reference)
    }

    /// `ln P = α + 1·ln A + Σ δ τ`, i.e. a time-dummy model on unitary prices.
    pub fn unitary_price(reference: impl Into<String>) -> Self {
        let mut spec = Self::dummies_only(reference);
        spec.pinned.push(PinnedTerm {
            regressor: Regressor::LogArea,
            coefficient: 1.0,
        });
        spec
    }

    pub fn with_reference(&self, reference: impl Into<String>) -> Self {
        Self {
            time_dummy_reference: Some(reference.into()),
            ..self.clone()
        }
    }

    pub fn validate(&self, ds: &Dataset) -> Result<()> {
        if let Some(reference) = &self.time_dummy_reference {
            ds.require_period(reference)?;
        }
        let mut names: Vec<&str> = Vec::new();
        for r in self
            .regressors
            .iter()
            .chain(self.pinned.iter().map(|p| &p.regressor))
        {
            if names.contains(&r.name()) {
                return Err(Error::InvalidModel(format!("regressor {r} listed twice")));
            }
            names.push(r.name());
        }
        for p in &self.pinned {
            if !p.coefficient.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "pinned coefficient for {} is not finite",
                    p.regressor
                )));
            }
        }
        Ok(())
    }

    fn dummy_periods<'a>(&self, ds: &'a Dataset) -> Vec<&'a str> {
        match &self.time_dummy_reference {
            None => Vec::new(),
            Some(reference) => ds
                .periods()
                .iter()
                .map(String::as_str)
                .filter(|p| *p != reference)
                .collect(),
        }
    }
}

pub fn dummy_name(period: &str) -> String {
    format!("dummy_{period}")
}

/// Design matrix and response of a least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSystem {
    /// Row-major `rows x cols`.
    matrix: Vec<f64>,
    rows: usize,
    cols: usize,
    response: Vec<f64>,
    column_names: Vec<String>,
}

impl DesignSystem {
    /// Builds a system from rows of the design matrix.
    pub fn from_rows(
        rows: &[Vec<f64>],
        response: Vec<f64>,
        column_names: Vec<String>,
    ) -> Result<Self> {
        let cols = column_names.len();
        if rows.len() != response.len() {
            return Err(Error::InvalidModel(format!(
                "{} design rows but {} responses",
                rows.len(),
                response.len()
            )));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::InvalidModel(format!(
                "design row {bad} has {} entries, expected {cols}",
                rows[bad].len()
            )));
        }
        if rows
            .iter()
            .flatten()
            .chain(&response)
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidModel("non-finite value in design".into()));
        }
        Ok(Self {
            matrix: rows.iter().flatten().copied().collect(),
            rows: rows.len(),
            cols,
            response,
            column_names,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.matrix[row * self.cols + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.matrix[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn column_names(&self) -> &[String] {
        &self.column_names
    }

    pub fn fitted(&self, coefficients: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(coefficients)
                    .map(|(x, b)| x * b)
                    .sum()
            })
            .collect()
    }

    fn has_intercept(&self) -> bool {
        self.column_names.first().is_some_and(|n| n == INTERCEPT)
    }

    fn factor(&self) -> Result<HouseholderQr> {
        if self.rows < self.cols {
            return Err(Error::Underdetermined {
                observations: self.rows,
                columns: self.cols,
            });
        }
        let qr = HouseholderQr::new(&self.matrix, self.rows, self.cols);
        let largest = qr.r_diag().iter().fold(0.0f64, |m, d| m.max(d.abs()));
        if let Some(j) = qr
            .r_diag()
            .iter()
            .position(|d| largest == 0.0 || d.abs() < RANK_TOLERANCE * largest)
        {
            return Err(Error::RankDeficient {
                column: self.column_names[j].clone(),
            });
        }
        Ok(qr)
    }
}

/// Builds the log-price design for `spec` on `ds`.
pub fn build_design(ds: &Dataset, spec: &ModelSpec) -> Result<DesignSystem> {
    spec.validate(ds)?;
    let dummies = spec.dummy_periods(ds);

    let mut names = Vec::new();
    if spec.include_intercept {
        names.push(INTERCEPT.to_string());
    }
    names.extend(spec.regressors.iter().map(|r| r.name().to_string()));
    names.extend(dummies.iter().map(|p| dummy_name(p)));

    let mut rows = Vec::with_capacity(ds.len());
    let mut response = Vec::with_capacity(ds.len());
    for obs in ds.observations() {
        let mut row = Vec::with_capacity(names.len());
        if spec.include_intercept {
            row.push(1.0);
        }
        for r in &spec.regressors {
            row.push(r.value(obs)?);
        }
        row.extend(
            dummies
                .iter()
                .map(|p| if obs.period == *p { 1.0 } else { 0.0 }),
        );
        rows.push(row);

        let mut y = positive_ln(obs.price, "price")?;
        for pin in &spec.pinned {
            y -= pin.coefficient * pin.regressor.value(obs)?;
        }
        response.push(y);
    }
    DesignSystem::from_rows(&rows, response, names)
}

/// Least-squares coefficients via Householder QR.
pub fn solve_least_squares(sys: &DesignSystem) -> Result<Vec<f64>> {
    Ok(sys.factor()?.solve(&sys.response))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub column_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub t_statistics: Vec<f64>,
    pub p_values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub sigma2: f64,
    /// Row-major `K x K`.
    pub covariance: Vec<Vec<f64>>,
    pub r_squared: f64,
    pub adjusted_r_squared: f64,
    pub degrees_of_freedom: usize,
    pub observations: usize,
}

impl RegressionResult {
    pub fn position(&self, name: &str) -> Option<usize> {
        self.column_names.iter().position(|n| n == name)
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.position(name).map(|i| self.coefficients[i])
    }
}

/// Inferential statistics for `coefficients` on `sys`.
pub fn regression_statistics(sys: &DesignSystem, coefficients: &[f64]) -> Result<RegressionResult> {
    let (n, k) = (sys.rows, sys.cols);
    if coefficients.len() != k {
        return Err(Error::InvalidModel(format!(
            "{} coefficients for {k} columns",
            coefficients.len()
        )));
    }
    if n <= k {
        return Err(Error::NoResidualDegreesOfFreedom {
            observations: n,
            columns: k,
        });
    }
    let qr = sys.factor()?;
    let df = n - k;

    let residuals: Vec<f64> = sys
        .response
        .iter()
        .zip(sys.fitted(coefficients))
        .map(|(y, f)| y - f)
        .collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let sigma2 = rss / df as f64;

    let gram_inv = qr.gram_inverse();
    let covariance: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| sigma2 * gram_inv[i * k + j]).collect())
        .collect();
    let standard_errors: Vec<f64> = (0..k).map(|i| covariance[i][i].sqrt()).collect();

    let t_statistics: Vec<f64> = coefficients
        .iter()
        .zip(&standard_errors)
        .map(|(&b, &se)| {
            if se > 0.0 {
                b / se
            } else if b == 0.0 {
                0.0
            } else {
                b.signum() * f64::INFINITY
            }
        })
        .collect();
    let df_u32 = u32::try_from(df).unwrap_or(u32::MAX);
    let p_values = t_statistics
        .iter()
        .map(|&t| student_t_two_sided_p(t, df_u32))
        .collect();

    let mean_y = sys.response.iter().sum::<f64>() / n as f64;
    let tss: f64 = sys.response.iter().map(|y| (y - mean_y).powi(2)).sum();
    let (r_squared, adjusted_r_squared) = if tss > 0.0 {
        let r2 = 1.0 - rss / tss;
        let adj = if sys.has_intercept() {
            1.0 - (1.0 - r2) * (n - 1) as f64 / df as f64
        } else {
            1.0 - (1.0 - r2) * n as f64 / df as f64
        };
        (r2, adj)
    } else {
        (1.0, 1.0)
    };

    Ok(RegressionResult {
        column_names: sys.column_names.clone(),
        coefficients: coefficients.to_vec(),
        standard_errors,
        t_statistics,
        p_values,
        residuals,
        sigma2,
        covariance,
        r_squared,
        adjusted_r_squared,
        degrees_of_freedom: df,
        observations: n,
    })
}

/// Builds, solves and summarizes `spec` on `ds`.
pub fn fit(ds: &Dataset, spec: &ModelSpec) -> Result<RegressionResult> {
    let sys = build_design(ds, spec)?;
    let coefficients = solve_least_squares(&sys)?;
    regression_statistics(&sys, &coefficients)
}
