//! Driving the verification checks programmatically: parse a config,
//! run a check, and emit the same CSV report the `supersde` binary
//! writes.
//!
//!     cargo run --example config_and_report

use supersde::checks::{run_check, Check};
use supersde::config::RunConfig;
use supersde::report::to_csv;

fn main() {
    let cfg = RunConfig::parse_str(
        "\
# key = value, same format the binary reads via --config
m = 1.0
h = 0.0009765625     # 2^-10
T_support = 1.0
n_paths = 50000
seed = 7
V.name = cosine
V.lambda = 0.5
F.name = cos
quad_tol = 1e-6
",
    )
    .unwrap();

    // Exact algebra self-test (fuzzed identities, zero tolerance) and the
    // fermionic determinant check are fast enough for any run.
    let mut rows = run_check(Check::AlgebraSelftest, &cfg).unwrap();
    rows.extend(run_check(Check::Wick, &cfg).unwrap());

    for r in &rows {
        println!(
            "{} [{}] {}: {:.6} vs {:.6} (tol {:.1e})",
            if r.pass { "PASS" } else { "FAIL" },
            r.check_id,
            r.quantity,
            r.value,
            r.reference,
            r.tolerance
        );
    }

    println!("\nCSV as written by the binary:\n{}", to_csv(&rows));
}
