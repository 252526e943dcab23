use miura_reciprocal::jet::ChainRuleMap;
use miura_reciprocal::reductions::*;
use miura_reciprocal::systems::build_cbs_family;

#[test]
fn case1_y_independent() {
    let r = reduce_case1().unwrap();
    assert!(r.passed(), "{:?}", r.failures());
    let has = |s: &str| r.residuals.iter().any(|e| e.label.contains(s) && e.reduced_to_zero);
    assert!(has("Dym"));
    assert!(has("Qiao"));
    assert!(has("k1 = 2k2 satisfies"));
    let control = r.residuals.iter().find(|e| e.label.contains("k1 = k2 violates")).unwrap();
    assert!(!control.reduced_to_zero && !control.expect_zero);
}

#[test]
fn case2_t_equals_x() {
    let r = reduce_case2().unwrap();
    assert!(r.passed(), "{:?}", r.failures());
    assert!(r.residuals.iter().any(|e| e.label.starts_with("AKNS") && e.reduced_to_zero));
    assert!(r.residuals.iter().any(|e| e.label.starts_with("modified AKNS") && e.reduced_to_zero));
    let ch = r.residuals.iter().find(|e| e.label == "CH modulo the reduced system").unwrap();
    assert_eq!(ch.unit_factor.as_deref(), Some("2*P"));
}

#[test]
fn akns_coefficient_mutation_detected() {
    let (za, explicit) = akns_residual();
    let fam = build_cbs_family(1).unwrap();
    let c = &fam.cbs.catalog;
    let zc = miura_reciprocal::jet::parse_catalog("var z0 z1\nfield M(z0,z1)\n").unwrap();
    let drop = ChainRuleMap::new().derivation("z2", vec![]);
    let reduced = drop.apply(c, &zc, &fam.cbs.equations[0].expr).unwrap();
    let reduced = za.parse(&zc.print(&reduced)).unwrap();
    assert!(za.normalize(&(&reduced - &explicit)).is_zero());
    let mutated = za.e("M_z0z0z0z1 + 4*M_z1*M_z0z0 + 4*M_z0*M_z0z1");
    assert!(!za.normalize(&(&reduced - &mutated)).is_zero());
}
