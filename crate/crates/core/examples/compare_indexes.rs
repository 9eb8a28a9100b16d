//! The two index methods disagree on which of B and C is dearer.
//!
//! cargo run --example compare_indexes

use artindex::indexes::IndexMethod;
use artindex::regression::ModelSpec;
use artindex::renoir;

fn main() -> artindex::Result<()> {
    let methods = [
        IndexMethod::Npgm,
        IndexMethod::HpmTimeDummy {
            spec: ModelSpec::area_and_ratio("A"),
        },
    ];
    let (ab, ac) = (renoir::table1(), renoir::dataset_ac());
    for m in &methods {
        let b = m.compute(&ab, "A", 100.0)?.levels["B"];
        let c = m.compute(&ac, "A", 100.0)?.levels["C"];
        let verdict = if c > b { "C above B" } else { "C below B" };
        println!("{:<5} I_BA = {b:8.3}  I_CA = {c:8.3}  {verdict}", m.name());
    }
    println!("C is B with sale 29 sold for 50% more");
    Ok(())
}
