//! Drive the command-line front end without spawning a process.
//!
//! cargo run --example cli_in_process

use artindex::cli::run;

fn main() {
    for args in [
        &["artindex", "index", "--method", "hpm", "--format", "plot"][..],
        &[
            "artindex",
            "monotonicity",
            "--method",
            "hpm",
            "--mode",
            "single",
            "--obs",
            "29",
            "--multiplier",
            "1.5",
        ],
    ] {
        let exec = run(args);
        println!(
            "$ {}\n{}{}exit {}\n",
            args.join(" "),
            exec.stdout,
            exec.stderr,
            exec.exit_code
        );
    }
}
