//! Checks that the Miura map takes mCBS solutions to CBS solutions.

use miura_reciprocal::transforms::verify_miura;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let r = verify_miura(n).expect("miura");
    for e in &r.residuals {
        println!("[{}] {}", if e.passed() { "ok" } else { "FAIL" }, e.label);
    }
    println!("{}", if r.passed() { "passed" } else { "FAILED" });
}
