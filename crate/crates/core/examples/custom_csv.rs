//! Load a non-default CSV layout: semicolons, decimal commas, height/width columns.
//!
//! cargo run --example custom_csv

use artindex::cli::schema::{read_csv, InputSchema, SizeColumns};
use artindex::indexes::npgm_index;

const SALES: &str = "\
lot;season;hammer;height;width
1;spring;1 200;40,5;32
2;spring;860;22;30
3;autumn;2 400;55;46
4;autumn;1 900;41;33,5
";

fn main() -> artindex::Result<()> {
    let schema = InputSchema {
        id: "lot".into(),
        period: "season".into(),
        price: "hammer".into(),
        size: SizeColumns::Dimensions {
            height: "height".into(),
            width: "width".into(),
        },
        aspect_ratio: None,
        delimiter: ';',
        decimal_separator: ',',
        ..InputSchema::default()
    };
    let ds = read_csv(SALES.as_bytes(), &schema, "inline")?;
    for o in ds.observations() {
        println!(
            "{} {} area {:.1} ratio {:.3}",
            o.id, o.period, o.area, o.aspect_ratio
        );
    }
    print!("{}", npgm_index(&ds, "spring", 100.0)?.to_plot_csv());
    Ok(())
}
