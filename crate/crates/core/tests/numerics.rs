use std::f64::consts::PI;

use miura_reciprocal::numerics::convergence::{log_slope, Convergence, LadderPoint};
use miura_reciprocal::numerics::dym::{integrate_dym, DymConfig};
use miura_reciprocal::numerics::fd::{derivative, fd_residual, FdInputs};
use miura_reciprocal::numerics::grid::{Grid1D, GridField};
use miura_reciprocal::numerics::soliton::{miura_soliton_check, SolitonConfig};
use miura_reciprocal::numerics::transport::{interpolate_periodic, transport, Interpolation};
use miura_reciprocal::numerics::*;

fn stencil_error(n: usize, order: usize) -> f64 {
    let g = Grid1D::periodic(0.0, 2.0 * PI, n);
    let f: Vec<f64> = g.coords().iter().map(|x| x.sin()).collect();
    let d = derivative(&f, g.h, order, true);
    let exact = |x: f64| match order % 4 {
        1 => x.cos(),
        2 => -x.sin(),
        3 => -x.cos(),
        _ => x.sin(),
    };
    g.coords().iter().zip(&d).map(|(x, v)| (v - exact(*x)).abs()).fold(0.0, f64::max)
}

#[test]
fn stencils_are_second_order() {
    for order in 1..=4 {
        let (a, b) = (stencil_error(64, order), stencil_error(128, order));
        let ratio = a / b;
        assert!((3.6..4.4).contains(&ratio), "order {order}: ratio {ratio}");
    }
}

#[test]
fn constant_state_residual_vanishes() {
    let (c, e) = dym_u_residual(2);
    let g = Grid1D::periodic(0.0, 2.0 * PI, 32);
    let u = GridField::constant(&g, 3.0);
    let ut = GridField::constant(&g, 0.0);
    let mut inp = FdInputs::default();
    inp.fields.insert("U", &u);
    inp.jets.insert("U_T".into(), &ut);
    let r = fd_residual(&c, &e, "X", &inp).unwrap();
    assert!(r.linf(g.interior(0)) < 1e-12);
}

#[test]
fn manufactured_dym_converges() {
    let pts: Vec<LadderPoint> = [64, 128, 256]
        .iter()
        .map(|n| {
            let f = manufactured_dym(*n, 2).unwrap();
            LadderPoint { points: *n, h: f.grid.h, linf: f.linf(0..*n), l2: f.l2(0..*n) }
        })
        .collect();
    let c = Convergence::new("m", pts);
    assert!((1.7..=2.3).contains(&c.slope), "slope {}", c.slope);
}

#[test]
fn dym_guards() {
    let g = Grid1D::periodic(0.0, 2.0 * PI, 32);
    let bad = GridField::sample(&g, 0.0, |x| x.sin());
    assert!(matches!(integrate_dym(&bad, &[0.01], &DymConfig::default()), Err(NumericError::Floor { .. })));
    let cfg = DymConfig { cfl: 0.0, ..DymConfig::default() };
    let ok = GridField::constant(&g, 1.0);
    assert!(matches!(integrate_dym(&ok, &[0.01], &cfg), Err(NumericError::Config(_))));
    let compact = GridField::constant(&Grid1D::compact(0.0, 1.0, 32), 1.0);
    assert!(integrate_dym(&compact, &[0.01], &DymConfig::default()).is_err());
}

#[test]
fn dym_conserves_mass() {
    let g = Grid1D::periodic(0.0, 2.0 * PI, 64);
    let u0 = GridField::sample(&g, 0.0, |x| 4.0 + 0.5 * x.sin());
    let run = integrate_dym(&u0, &[0.005, 0.01], &DymConfig::default()).unwrap();
    assert_eq!(run.snapshots.len(), 2);
    let m0: f64 = u0.values.iter().sum();
    let m1: f64 = run.snapshots[1].values.iter().sum();
    assert!(((m1 - m0) / m0).abs() < 1e-12);
    assert!(run.snapshots[1].values != u0.values);
}

#[test]
fn steep_profile_is_not_monotone() {
    let g = Grid1D::periodic(0.0, 2.0 * PI, 128);
    let u = GridField::sample(&g, 0.0, |x| 2.0 + 1.9 * (3.0 * x).sin());
    assert!(matches!(
        transport(&u, Interpolation::Lagrange8, false),
        Err(NumericError::NotMonotone { .. })
    ));
}

#[test]
fn periodic_interpolation() {
    let n = 64;
    let l = 2.0 * PI;
    let nodes: Vec<f64> = (0..n).map(|i| l * i as f64 / n as f64 + 0.1 * (l * i as f64 / n as f64).sin()).collect();
    let vals: Vec<f64> = nodes.iter().map(|x| x.cos()).collect();
    let targets: Vec<f64> = (0..50).map(|j| -1.0 + 0.17 * j as f64).collect();
    for (method, tol) in [(Interpolation::Lagrange8, 1e-9), (Interpolation::MonotoneCubic, 1e-3)] {
        let out = interpolate_periodic(&nodes, &vals, l, &targets, method);
        let err = targets.iter().zip(&out).map(|(t, v)| (t.cos() - v).abs()).fold(0.0, f64::max);
        assert!(err < tol, "{method:?}: {err}");
    }
}

#[test]
fn transport_converges_and_mutation_plateaus() {
    let cfg = NumericConfig::default();
    let ladder = [128, 256, 512];
    let norm = |drop: bool| -> Vec<f64> {
        ladder
            .iter()
            .map(|n| {
                let r = transport_check(*n, &cfg, Interpolation::Lagrange8, drop).unwrap();
                r.residual.linf(0..*n)
            })
            .collect()
    };
    let hs: Vec<f64> = ladder.iter().map(|n| 2.0 * PI / *n as f64).collect();
    let good = log_slope(&hs, &norm(false));
    let bad = norm(true);
    assert!(good >= 1.7, "slope {good}");
    assert!(log_slope(&hs, &bad) < 0.5 && bad[2] > 1e-2);
}

#[test]
fn miura_soliton_converges() {
    let cfg = SolitonConfig::default();
    let ok = miura_soliton_check(&cfg, &[256, 512, 1024], false).unwrap();
    assert!(ok.slope >= 1.7, "slope {}", ok.slope);
    let bad = miura_soliton_check(&cfg, &[256, 512, 1024], true).unwrap();
    assert!(bad.slope < 0.5 && bad.finest().linf > 1e-2);
}

#[test]
fn config_validation() {
    let mut cfg = NumericConfig { ladder: vec![256], ..NumericConfig::default() };
    assert!(cfg.validate().is_err());
    cfg.ladder = vec![8, 16];
    assert!(cfg.validate().is_err());
    cfg.ladder = vec![64, 128];
    cfg.dym.cfl = -1.0;
    assert!(numeric_check(&cfg).is_err());
}

#[test]
fn field_json_and_csv() {
    let g = Grid1D::periodic(0.0, 1.0, 16);
    let f = GridField::sample(&g, 0.5, |x| x * x);
    let back: GridField = serde_json::from_str(&f.to_json()).unwrap();
    assert_eq!(back, f);
    let c = Convergence::new("t", vec![
        LadderPoint { points: 16, h: 0.1, linf: 0.01, l2: 0.01 },
        LadderPoint { points: 32, h: 0.05, linf: 0.0025, l2: 0.0025 },
    ]);
    assert!((c.slope - 2.0).abs() < 1e-12);
    assert!(csv(&[c]).starts_with("check,points,h,linf,l2\n"));
}
