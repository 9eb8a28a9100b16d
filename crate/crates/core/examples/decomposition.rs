//! exp(δ) = (ratio of geometric-mean prices) × θ, and the pinned-log-area model.
//!
//! cargo run --example decomposition

use artindex::indexes::{decompose_index, hpm_timedummy_index, npgm_index};
use artindex::regression::ModelSpec;
use artindex::renoir;

fn main() -> artindex::Result<()> {
    let spec = ModelSpec::area_and_ratio("A");
    for (ds, p1) in [(renoir::table1(), "B"), (renoir::dataset_ac(), "C")] {
        let d = decompose_index(&ds, &spec, "A", p1)?;
        println!(
            "A→{p1}: geomean ratio {:.4} × θ {:.4} = {:.4}; exp(δ) = {:.4} (gap {:.1e})",
            d.geomean_ratio, d.theta, d.product, d.exp_delta, d.identity_gap
        );

        // With the ln(area) coefficient fixed at 1 the dummy index is the NPGM index.
        let pinned = hpm_timedummy_index(&ds, &ModelSpec::unitary_price("A"), 100.0)?;
        let npgm = npgm_index(&ds, "A", 100.0)?;
        println!(
            "      pinned model {:.6}, geometric mean {:.6}",
            pinned.series.levels[p1], npgm.levels[p1]
        );
    }
    Ok(())
}
