//! Verifies the composite Miura-reciprocal dictionary and prints every entry.

use miura_reciprocal::transforms::verify_composite_dictionary;

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let r = verify_composite_dictionary(n).expect("composite dictionary");
    for e in &r.residuals {
        let tag = if e.passed() { "ok" } else { "FAIL" };
        let want = if e.expect_zero { "" } else { " (expected nonzero)" };
        println!("[{tag}] {}{want}: {}", e.label, e.remainder_text);
    }
    for a in &r.assumptions {
        println!("assumption: {a}");
    }
    println!("{} steps, {}", r.steps, if r.passed() { "passed" } else { "FAILED" });
}
