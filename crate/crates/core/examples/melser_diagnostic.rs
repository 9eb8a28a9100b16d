//! Is period membership correlated with painting size?
//!
//! cargo run --example melser_diagnostic

use artindex::monotonicity::melser_diagnostic;
use artindex::regression::Regressor;
use artindex::renoir;

fn main() -> artindex::Result<()> {
    let ds = renoir::table1();
    for r in [Regressor::Area, Regressor::AspectRatio] {
        let m = melser_diagnostic(&ds, &r, "A", "B")?;
        println!(
            "{:<8} r = {:+.4}  t = {:+.3}  p = {:.3e}  (n = {})",
            m.characteristic, m.correlation, m.t_statistic, m.p_value, m.observations
        );
    }
    Ok(())
}
