//! Sweep the family columns for sporadic points.
//!
//! Equivalent to the `scan` subcommand:
//!
//!     hyperdescent scan --i 2 --j 2 --p-max 200 --height 1000
//!
//! Across the columns scanned here, exactly six sporadic x-values are
//! known; the sweep should flag those primes and no others.
//!
//!     cargo run --release --example conjecture_scan

use hyperdescent::report::{conjecture_scan, tabulated_sporadics, Verdict};

fn main() {
    let (p_max, height) = (200, 1000);
    let mut flagged: Vec<(u32, u32, u64)> = Vec::new();
    for (i, j) in [(0u32, 1u32), (0, 2), (1, 1), (2, 1), (2, 2), (2, 3)] {
        let report = conjecture_scan(i, j, p_max, height).unwrap();
        let hits: Vec<u64> = report
            .rows
            .iter()
            .filter(|r| r.verdict == Verdict::SporadicFound)
            .map(|r| r.p)
            .collect();
        for row in report.rows.iter().filter(|r| r.verdict == Verdict::SporadicFound) {
            println!("(i, j) = ({i}, {j}), p = {:>3}: {}", row.p, row.detail);
        }
        if hits.is_empty() {
            println!("(i, j) = ({i}, {j}): nothing besides (0, 0) and inf below height {height}");
        }
        flagged.extend(hits.into_iter().map(|p| (i, j, p)));
    }

    let expected: Vec<(u32, u32, u64)> = tabulated_sporadics()
        .into_iter()
        .map(|(i, j, p, _, _)| (i, j, p))
        .collect();
    assert_eq!(flagged, expected, "sweep must flag exactly the known sporadics");
    println!("\nflagged set matches the tabulated sporadic points exactly");
}
