//! Rebuild every table and figure file for the bundled sales and list the checks.
//!
//! cargo run --release --example reproduce_example [OUT_DIR]

use std::path::PathBuf;

use artindex::cli::reproduce::reproduce;
use artindex::renoir;

fn main() -> artindex::Result<()> {
    let out: PathBuf = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("artindex-reproduce"));
    let summary = reproduce(&renoir::table1(), &out)?;
    print!("{}", summary.to_text());
    println!("files in {}: {}", out.display(), summary.files.join(", "));
    Ok(())
}
