//! End-to-end verification of the four congruence-class claims over a
//! prime range, with per-prime certificates.
//!
//! Equivalent to the `verify` subcommand of the binary:
//!
//!     hyperdescent verify --case thm2 --p-max 60 --height 500
//!
//!     cargo run --release --example verify_theorem

use hyperdescent::report::{
    emit_report, verify_theorem, FamilyCase, ReportFormat, RunCase, RunConfig,
};

fn main() {
    for (case, p_min, p_max) in [
        (FamilyCase::I0J2, 3, 60),
        (FamilyCase::I2J2, 3, 60),
        (FamilyCase::I2J1, 13, 200),
        (FamilyCase::I2J3, 5, 120),
    ] {
        let config = RunConfig {
            case: RunCase::Family(case),
            p_min,
            p_max,
            height: 500,
            jobs: 0,
            out: None,
            format: ReportFormat::Text,
            include_timestamp: false,
        };
        let report = verify_theorem(&config).unwrap();
        print!("{}", emit_report(&report, ReportFormat::Text));

        // every confirmed or sporadic-found row re-derives from scratch
        let rechecked = report.recheck().unwrap();
        println!("recheck: {rechecked} rows re-derived\n");
    }
}
