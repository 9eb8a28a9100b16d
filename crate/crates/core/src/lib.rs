//! Price indexes for heterogeneous assets sold at auction.
//!
//! Two index methods are implemented over the same [`domain::Dataset`]:
//!
//! - the normalized-price geometric mean ([`indexes::npgm_index`]): each
//!   period's level is the geometric mean of price per cm²;
//! - the hedonic time-dummy index ([`indexes::hpm_timedummy_index`]): each
//!   period's level is `exp(δ)` from an OLS fit of log price on
//!   characteristics and period dummies.
//!
//! [`monotonicity`] audits either method by raising prices and checking that
//! no index level falls. [`renoir`] bundles a 29-sale example on which the
//! time-dummy index fails that audit while the geometric-mean index passes.
//!
//! ```
//! use artindex::{indexes, regression::ModelSpec, renoir};
//!
//! let ab = renoir::table1();
//! let npgm = indexes::npgm_index(&ab, "A", 100.0).unwrap();
//! let hpm = indexes::hpm_timedummy_index(&ab, &ModelSpec::area_and_ratio("A"), 100.0).unwrap();
//! assert!(npgm.levels["B"] < hpm.series.levels["B"]);
//! ```

pub mod cli;
pub mod domain;
pub mod error;
pub mod indexes;
pub mod monotonicity;
pub mod regression;
pub mod renoir;

pub use domain::{normalize_price, validate_dataset, Dataset, SaleObservation, UnitaryPrice};
pub use error::{Error, Result};
pub use indexes::{IndexMethod, IndexSeries};
pub use regression::{ModelSpec, RegressionResult, Regressor};
