use miura_reciprocal::jet::{ChainRuleMap, Expr, Reducer, DEFAULT_BUDGET};
use miura_reciprocal::report::TaskReport;
use miura_reciprocal::systems::z_catalog;
use miura_reciprocal::transforms::*;

fn assert_passed(r: &TaskReport) {
    assert!(r.passed(), "{}: {:?}", r.label, r.failures());
    assert!(!r.residuals.is_empty());
}

fn units_are_powers_of(r: &TaskReport, base: &str) {
    for e in &r.residuals {
        if let Some(u) = &e.unit_factor {
            assert!(u == "identity" || u.contains(base), "{}: unit {u}", e.label);
        }
    }
}

#[test]
fn reciprocal_ch_pushes_to_x_form() {
    for n in 1..=3 {
        let r = verify_reciprocal_ch(n).unwrap();
        assert_passed(&r);
        units_are_powers_of(&r, "X_z0");
        // n Ω-equations and the last one land on X-forms
        assert_eq!(r.residuals.iter().filter(|e| e.label.contains("-> X-form")).count(), n);
    }
}

#[test]
fn reciprocal_mch_pushes_to_mcbs() {
    for n in 1..=3 {
        let r = verify_reciprocal_mch(n).unwrap();
        assert_passed(&r);
        units_are_powers_of(&r, "x_z0");
    }
}

#[test]
fn mutated_dictionary_is_caught() {
    let r = verify_reciprocal_mch_with(1, Some(("om1", "2*x_z1"))).unwrap();
    assert!(!r.passed());
    assert!(r.residuals.iter().any(|e| !e.reduced_to_zero));
}

#[test]
fn flipped_one_form_is_not_closed() {
    let (_, dst) = ch_reciprocal_map(1).unwrap();
    for var in ["Y", "T"] {
        let form = ch_one_form(1).unwrap().flip(var);
        match derive_chain_rule(&form, &dst, &ch_extra_defs(1)) {
            Err(TransformError::NotClosed(..)) => {}
            other => panic!("flip {var}: expected NotClosed, got {:?}", other.map(|_| ())),
        }
    }
    let form = mch_one_form(1).unwrap().flip("y");
    let (entries, _, _) = form.closedness().unwrap();
    assert!(entries.iter().any(|e| !e.reduced_to_zero));
}

#[test]
fn derived_dictionary() {
    let (map, dst) = ch_reciprocal_map(1).unwrap();
    assert_eq!(dst.print(map.field_image("P").unwrap()), dst.print(&dst.e("1/X_z0")));
    let (map, dst, _) = mch_reciprocal_map(2).unwrap();
    let del = map.field_image("del").unwrap();
    assert!(dst.normalize(&(del - &dst.e("-x_z3/x_z0"))).is_zero());
    let u = map.field_image("u").unwrap();
    assert!(dst.normalize(&(u - &dst.e("1/x_z0"))).is_zero());
    let d = describe_derivations(&map, &dst, &["x", "y", "t"]);
    assert_eq!(d.len(), 3);
}

#[test]
fn degenerate_miura_image_rejected() {
    let c = z_catalog(1, &["x"], &["x_z0"]);
    assert!(matches!(miura_of(&c, 1, &c.e("3")), Err(TransformError::Degenerate(_))));
    assert!(miura_of(&c, 1, &c.e("x_z1^2 + x")).is_ok());
}

#[test]
fn miura_and_composite() {
    for n in 1..=2 {
        assert_passed(&verify_miura(n).unwrap());
        let r = verify_composite_dictionary(n).unwrap();
        assert_passed(&r);
        // the sign and denominator variants stay nonzero
        assert!(r.residuals.iter().any(|e| !e.expect_zero && !e.reduced_to_zero));
    }
}

/// Forward CH map followed by the inverse map returns each jet modulo the system.
#[test]
fn inverse_map_round_trip() {
    let n = 1;
    let (fwd, z) = ch_reciprocal_map(n).unwrap();
    let form = ch_one_form(n).unwrap();
    let c = &form.source.catalog;
    let rs = form.source.orientation().unwrap();
    let inv = ChainRuleMap::new()
        .jet("X_z0", c.e("1/P"))
        .jet("X_z1", c.e("Om1/2"))
        .jet("X_z2", c.e("-Del/P"))
        .derivation("z0", vec![(c.e("1/P"), "X")])
        .derivation("z1", vec![(Expr::one(), "Y"), (c.e("Om1/2"), "X")])
        .derivation("z2", vec![(Expr::one(), "T"), (c.e("-Del/P"), "X")]);
    for jet in ["P", "P_X", "P_XX", "P_Y", "P_T", "Om1", "Om1_X", "Del", "U"] {
        let e = c.j(jet);
        let there = fwd.apply(c, &z, &e).unwrap();
        let back = inv.apply(&z, c, &there).unwrap();
        let mut red = Reducer::new(c, &rs, DEFAULT_BUDGET);
        let diff = red.reduce(&(&back - &e)).unwrap();
        assert!(diff.is_zero(), "{jet}: {}", c.print(&diff));
    }
}
