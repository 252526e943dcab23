//! Checks zero-curvature compatibility of both Lax pairs and sweeps every
//! single-sign mutation of their coefficients.

use miura_reciprocal::suite::verify_lax;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    for which in 0..2 {
        let r = verify_lax(n, which, true).unwrap();
        println!("{}:", r.label);
        for e in &r.residuals {
            println!("  [{}] {} -> {}", if e.passed() { "ok" } else { "FAIL" }, e.label, e.remainder_text);
        }
    }
}
