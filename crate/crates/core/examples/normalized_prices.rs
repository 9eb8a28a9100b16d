//! Price per cm² for every bundled sale, and the geometric-mean index built from it.
//!
//! cargo run --example normalized_prices

use artindex::{indexes, normalize_price, renoir};

fn main() -> artindex::Result<()> {
    let ds = renoir::table1();
    println!(
        "{:>3} {:>2} {:>12} {:>9} {:>10}",
        "id", "ds", "price", "area", "price/cm²"
    );
    for obs in ds.observations() {
        let p = normalize_price(obs)?;
        println!(
            "{:>3} {:>2} {:>12.0} {:>9.2} {:>10.2}",
            obs.id,
            obs.period,
            obs.price,
            obs.area,
            p.value()
        );
    }
    for (period, sales) in ds.partition_by_period() {
        println!(
            "geometric mean {period}: {:.3}",
            indexes::npgm_level(sales)?
        );
    }
    let series = indexes::npgm_index(&ds, "A", 100.0)?;
    println!("index: {:?}", series.levels);
    Ok(())
}
