//! Runs the finite-difference cross-checks and prints the convergence tables.

use miura_reciprocal::numerics::{csv, numeric_check, NumericConfig};

fn main() {
    let out = numeric_check(&NumericConfig::default()).expect("numeric check runs");
    print!("{}", csv(&out.tables));
    for m in &out.report.metrics {
        let verdict = if m.passed() { "ok" } else { "FAIL" };
        println!("[{verdict}] {} = {:.4e}", m.label, m.value);
    }
    println!("steps: {}", out.report.steps);
}
