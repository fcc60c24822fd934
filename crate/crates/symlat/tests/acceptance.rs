//! Runs the twelve verification gates in order and prints one verdict line
//! per gate. The process exits nonzero if any gate fails, so `cargo test`
//! reports the suite as failed. Timing goes to stderr to keep stdout
//! deterministic.
//!
//! Arguments (after `--`) select individual gates by number, e.g.
//! `cargo test --test acceptance -- 3 7` runs only gates 3 and 7.

use std::time::Instant;

use symlat::acceptance::run_all_selected;

fn main() {
    let selected: Vec<u32> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .collect();
    let start = Instant::now();
    let rows = run_all_selected(&selected);
    let mut failures = 0u32;
    for row in &rows {
        println!("{}", row.render());
        if !row.pass {
            failures += 1;
        }
    }
    eprintln!(
        "acceptance: {}/{} gates passed in {:.1} s",
        rows.len() as u32 - failures,
        rows.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
