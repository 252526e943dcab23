//! Derives the reciprocal chain-rule maps from the conserved one-forms and
//! pushes both hierarchies onto the z-space systems.

use miura_reciprocal::transforms::{
    ch_reciprocal_map, describe_derivations, mch_reciprocal_map, verify_reciprocal_ch, verify_reciprocal_mch,
};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let (map, z) = ch_reciprocal_map(n).unwrap();
    println!("CH side:");
    for d in describe_derivations(&map, &z, &["X", "Y", "T"]) {
        println!("  {d}");
    }
    for f in ["P", "Om1", "Del", "U"] {
        if let Some(e) = map.field_image(f) {
            println!("  {f} -> {}", z.print(e));
        }
    }
    let (map, z, _) = mch_reciprocal_map(n).unwrap();
    println!("mCH side:");
    for d in describe_derivations(&map, &z, &["x", "y", "t"]) {
        println!("  {d}");
    }
    for f in ["u", "om1", "del"] {
        if let Some(e) = map.field_image(f) {
            println!("  {f} -> {}", z.print(e));
        }
    }
    for r in [verify_reciprocal_ch(n).unwrap(), verify_reciprocal_mch(n).unwrap()] {
        println!("{}:", r.label);
        for e in &r.residuals {
            let unit = e.unit_factor.as_deref().unwrap_or("-");
            println!("  [{}] {} (unit {unit})", if e.passed() { "ok" } else { "FAIL" }, e.label);
        }
    }
}
