//! Raise prices and see which index falls.
//!
//! cargo run --release --example monotonicity_audit

use artindex::indexes::IndexMethod;
use artindex::monotonicity::{
    check_monotonicity, default_grid, random_perturbation_audit, search_violations, Perturbation,
};
use artindex::regression::ModelSpec;
use artindex::renoir;

fn main() -> artindex::Result<()> {
    let ds = renoir::table1();
    let hpm = IndexMethod::HpmTimeDummy {
        spec: ModelSpec::area_and_ratio("A"),
    };

    let shock = Perturbation::scaling(&ds, "29", 1.5)?;
    for m in [&IndexMethod::Npgm, &hpm] {
        for c in check_monotonicity(&ds, m, "A", &shock)? {
            println!(
                "{:<5} obs 29 ×1.5: {} {:.3} → {:.3} {}",
                m.name(),
                c.period,
                c.level_before,
                c.level_after,
                if c.compliant { "ok" } else { "VIOLATION" }
            );
        }
    }

    let grid = search_violations(&ds, &hpm, "A", &default_grid())?;
    println!(
        "hpm grid: {} of {} trials violate, ids {:?}",
        grid.violations.len(),
        grid.trials,
        grid.violating_ids()
    );

    let random = random_perturbation_audit(&ds, &IndexMethod::Npgm, "A", 1000, 7)?;
    println!(
        "npgm random: {} violations in {} trials",
        random.violations.len(),
        random.trials
    );
    Ok(())
}
