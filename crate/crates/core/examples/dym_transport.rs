//! Integrates Dym from U = 2 + sin X, transports the final profile to the
//! Qiao variable and writes both as JSON.

use std::f64::consts::PI;

use miura_reciprocal::numerics::dym::{integrate_dym, DymConfig};
use miura_reciprocal::numerics::grid::{Grid1D, GridField};
use miura_reciprocal::numerics::transport::{inverse_transport, transport, Interpolation};

fn main() {
    let grid = Grid1D::periodic(0.0, 2.0 * PI, 128);
    let u0 = GridField::sample(&grid, 0.0, |x| 2.0 + x.sin());
    let run = integrate_dym(&u0, &[0.01], &DymConfig::default()).unwrap();
    let big_u = &run.snapshots[0];
    let t = transport(big_u, Interpolation::Lagrange8, false).unwrap();
    let back = inverse_transport(&t, &grid, Interpolation::Lagrange8).unwrap();
    let err = back.values.iter().zip(&big_u.values).fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
    println!("{} RK4 steps, round-trip error {err:.2e}", run.steps);
    let dir = std::env::temp_dir();
    std::fs::write(dir.join("dym_U.json"), big_u.to_json()).unwrap();
    std::fs::write(dir.join("qiao_u.json"), t.u.to_json()).unwrap();
    println!("wrote {}", dir.join("dym_U.json").display());
}
