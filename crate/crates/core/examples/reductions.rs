//! The two n = 1 specializations: Dym/Qiao/potential KdV and CH/AKNS.

use miura_reciprocal::reductions::{reduce_case1, reduce_case2};

fn main() {
    for r in [reduce_case1().unwrap(), reduce_case2().unwrap()] {
        println!("{}:", r.label);
        for e in &r.residuals {
            let note = if e.expect_zero { "" } else { " (control, expected nonzero)" };
            println!("  [{}] {}{note}", if e.passed() { "ok" } else { "FAIL" }, e.label);
        }
    }
}
