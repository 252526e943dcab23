//! Runs the randomized engine checks for a seed given on the command line.

use miura_reciprocal::soundness::run_soundness;

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let t = std::time::Instant::now();
    let tally = run_soundness(seed, 1000, 200);
    println!("{tally:?} in {:?}", t.elapsed());
}
