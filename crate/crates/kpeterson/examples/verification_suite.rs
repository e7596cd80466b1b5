//! Run the full identity-verification battery programmatically at desk
//! scale and print the per-case report.

use kpeterson::config::RunConfig;
use kpeterson::report::run_suite;

fn main() {
    let config = RunConfig {
        n: 3,
        deg: 4,
        max_length: 4,
        jobs: 4,
        ..RunConfig::default()
    };
    let report = run_suite("all", &config).unwrap();
    report.print_lines();
    assert!(report.all_pass);
}
