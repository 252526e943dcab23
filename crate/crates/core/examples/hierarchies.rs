//! Builds the CH(2+1) and mCH(2+1) systems for n = 1..3, prints their
//! equations and checks that the text format round-trips.

use miura_reciprocal::systems::{build_ch_system, build_mch_system, EquationSystem};

fn main() {
    for n in 1..=3 {
        for sys in [build_ch_system(n).unwrap(), build_mch_system(n).unwrap()] {
            println!("{} ({} equations)", sys.name, sys.len());
            for eq in &sys.equations {
                println!("  {}: {} = 0", eq.label, sys.catalog.print(&eq.expr));
            }
            let back = EquationSystem::from_text(&sys.to_text()).unwrap();
            assert_eq!(back.to_text(), sys.to_text());
        }
    }
    println!("\n{}", build_mch_system(1).unwrap().to_text());
}
