use miura_reciprocal::jet::*;

fn ch_catalog() -> Catalog {
    parse_catalog(
        "var X Y T\n\
         field lam(Y,T)\n\
         field Om1(X,Y,T)\n\
         field P(X,Y,T)\n\
         field U(X,Y,T)\n\
         field Phi(X,Y,T)\n\
         ext s : s^2 = lam\n\
         ext I : I^2 = -1\n\
         nonzero P U lam\n",
    )
    .unwrap()
}

#[test]
fn parses_declared_expressions() {
    let c = ch_catalog();
    let e = c.parse("U_T - 2*P*P_T").unwrap();
    assert_eq!(e.num().len(), 2);
    let f = c.parse("Om1_XXX - Om1_X").unwrap();
    assert_eq!(f.num().len(), 2);
    assert!(f.den().is_one());
}

#[test]
fn dangling_underscore_is_a_syntax_error_at_offset_two() {
    let c = ch_catalog();
    match c.parse("P_") {
        Err(JetError::Syntax { pos, .. }) => assert_eq!(pos, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn undeclared_and_bad_derivatives_are_rejected() {
    let c = ch_catalog();
    assert!(matches!(c.parse("Q + 1"), Err(JetError::Undeclared(_))));
    assert!(matches!(c.parse("lam_X"), Err(JetError::BadDerivative { .. })));
    assert!(matches!(c.parse("s_X"), Err(JetError::BadDerivative { .. })));
}

#[test]
fn derivative_examples() {
    let c = ch_catalog();
    assert_eq!(c.dn(&c.e("P^2"), "X"), c.e("2*P*P_X"));
    assert!(c.dn(&c.e("lam"), "X").is_zero());
    assert_eq!(c.dn(&c.e("lam^3"), "T"), c.e("3*lam^2*lam_T"));
}

#[test]
fn quotient_rule_in_z_space() {
    let c = parse_catalog("var z0 z1 z2\nfield X(z0,z1,z2)\n").unwrap();
    assert_eq!(c.dn(&c.e("1/X_z0"), "z0"), c.e("-X_z0z0/X_z0^2"));
}

#[test]
fn normalize_examples() {
    let c = ch_catalog();
    assert!(c.e("(U*U_X)/U - U_X").is_zero());
    assert!(c.e("s^2*Phi - lam*Phi").is_zero());
    assert!(c.e("I^2 + 1").is_zero());
    let a = c.e("(s + 1)/(s - 1)");
    assert!(!a.den().vars().iter().any(|v| c.is_extension(v.field)));
    assert!(c.e("(s+1)/(s-1) - (lam + 2*s + 1)/(lam - 1)").is_zero());
}

#[test]
fn square_root_derivative() {
    let c = ch_catalog();
    let ds = c.dn(&c.sym("s"), "Y");
    assert_eq!(ds, c.e("s*lam_Y/(2*lam)"));
    // d(s^2) = lam_Y after reduction
    assert_eq!(c.dn(&c.e("s*s"), "Y"), c.e("lam_Y"));
}

#[test]
fn print_parse_fixed_point() {
    let c = ch_catalog();
    for t in [
        "U_T - 2*P*P_T",
        "(P_X + 3/2*Om1)/(P^2 - U)",
        "-s*I*Phi_XY/lam + 7",
        "(1 - P_X/P)^3",
    ] {
        let e = c.e(t);
        let p = c.print(&e);
        assert_eq!(c.e(&p), e, "{t} -> {p}");
        assert_eq!(c.print(&c.e(&p)), p);
    }
}

#[test]
fn catalog_text_round_trip() {
    let c = ch_catalog();
    let t = write_catalog(&c);
    let c2 = parse_catalog(&t).unwrap();
    assert_eq!(write_catalog(&c2), t);
}

#[test]
fn spectral_rule_reduction() {
    let c = ch_catalog();
    let rk = Ranking::orderly(&c);
    let rule = RewriteRule::from_residual(&c, &c.e("lam_T - lam^2*lam_Y"), c.jet("lam_T").unwrap(), "spec").unwrap();
    let rs = RewriteSystem::new(rk).with(&c, rule).unwrap();
    let r = reduce_modulo(&c, &c.e("lam_T*lam"), &rs, 100).unwrap();
    assert_eq!(r, c.e("lam^3*lam_Y"));
    let z = reduce_modulo(&c, &c.e("lam_T - lam^2*lam_Y"), &rs, 100).unwrap();
    assert!(z.is_zero());
    let un = c.e("U_X*P + Om1");
    assert_eq!(reduce_modulo(&c, &un, &rs, 100).unwrap(), un);
}

#[test]
fn prolonged_rule_reduction() {
    let c = ch_catalog();
    let rk = Ranking::orderly(&c).with_field_order(&c, &["Om1", "P"]);
    let rule = RewriteRule::from_residual(&c, &c.e("P_Y + (P*Om1_X + P_X*Om1)/2"), c.jet("P_Y").unwrap(), "py").unwrap();
    let rs = RewriteSystem::new(rk).with(&c, rule).unwrap();
    let r = reduce_modulo(&c, &c.e("P_Y"), &rs, 100).unwrap();
    assert_eq!(r, c.e("-(P*Om1)_X/2".replace("(P*Om1)_X", "(P*Om1_X + P_X*Om1)").as_str()));
    let pxy = reduce_modulo(&c, &c.e("P_XY"), &rs, 100).unwrap();
    assert_eq!(pxy, c.dn(&r, "X"));
}

#[test]
fn non_decreasing_rule_is_refused() {
    let c = ch_catalog();
    let rs = RewriteSystem::new(Ranking::orderly(&c));
    let bad = RewriteRule::new(c.jet("P_X").unwrap(), c.e("P_XX"), "bad");
    assert!(matches!(rs.with(&c, bad), Err(JetError::Unorientable { .. })));
}

#[test]
fn budget_exhaustion_is_reported() {
    let c = ch_catalog();
    let rk = Ranking::orderly(&c);
    let rule = RewriteRule::new(c.jet("P_X").unwrap(), c.e("P*U"), "r");
    let rs = RewriteSystem::new(rk).with(&c, rule).unwrap();
    let r = reduce_modulo(&c, &c.e("P_XXXXXXXX"), &rs, 3);
    assert!(matches!(r, Err(JetError::BudgetExhausted(3))));
}

#[test]
fn substitution_examples() {
    let c = ch_catalog();
    let r = substitute(&c, &c.e("U_T"), &[("U", c.e("P^2"))]).unwrap();
    assert_eq!(r, c.e("2*P*P_T"));
    let e = c.e("U_XX*U + P");
    assert_eq!(substitute(&c, &e, &[("U", c.e("U"))]).unwrap(), e);
}

#[test]
fn substitution_conflict_is_flagged() {
    let c = ch_catalog();
    let rule = RewriteRule::new(c.jet("U_T").unwrap(), c.e("U_X"), "r");
    let rs = RewriteSystem::new(Ranking::orderly(&c)).with(&c, rule).unwrap();
    let r = substitute_checked(&c, &c.e("U_T"), &[("U", c.e("P^2"))], &rs);
    assert!(matches!(r, Err(JetError::SubstitutionConflict(_))));
}
