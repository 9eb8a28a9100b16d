//! OLS fit of log price on area, aspect ratio and a period dummy.
//!
//! cargo run --example hedonic_fit

use artindex::cli::report::regression_table;
use artindex::regression::{fit, ModelSpec, Regressor};
use artindex::renoir;

fn main() -> artindex::Result<()> {
    let spec = ModelSpec::area_and_ratio("A");
    println!(
        "A ∪ B\n{}",
        regression_table(&fit(&renoir::table1(), &spec)?)
    );
    println!(
        "A ∪ C\n{}",
        regression_table(&fit(&renoir::dataset_ac(), &spec)?)
    );

    // log area instead of area
    let alt = ModelSpec::new(vec![Regressor::LogArea, Regressor::AspectRatio], "A");
    println!(
        "log-area variant\n{}",
        regression_table(&fit(&renoir::table1(), &alt)?)
    );
    Ok(())
}
