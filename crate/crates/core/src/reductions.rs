//! The two n=1 specializations: Y-independence (Dym, Qiao, potential KdV
//! and mKdV) and the identification T=X (CH, modified CH, AKNS, modified AKNS).

use crate::jet::{parse_catalog, substitute, Catalog, ChainRuleMap, Expr, JetError, RewriteRule, RewriteSystem};
use crate::report::{ResidualEntry, TaskReport};
use crate::systems::{
    build_cbs_family, build_ch_system, build_mch_system, build_mcbs_family, EquationSystem, SystemError,
};

#[derive(Debug, thiserror::Error)]
pub enum ReductionError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    System(#[from] SystemError),
}

fn cat(text: &str) -> Catalog {
    parse_catalog(text).expect("static catalog")
}

/// Pushes every residual of `sys` into `dst` with `map`, by label.
fn push_all(sys: &EquationSystem, dst: &Catalog, map: &ChainRuleMap) -> Result<Vec<(String, Expr)>, JetError> {
    let mut a = map.applier(&sys.catalog, dst, None);
    sys.equations
        .iter()
        .map(|e| Ok((e.label.clone(), a.apply(&e.expr)?)))
        .collect()
}

fn get<'a>(v: &'a [(String, Expr)], label: &str) -> &'a Expr {
    &v.iter().find(|(l, _)| l == label).expect("label").1
}

fn entry(report: &mut TaskReport, c: &Catalog, label: &str, e: &Expr) {
    report.push(ResidualEntry::from_remainder(label, c, &c.normalize(e)));
}

/// Y-independent reduction of the first members.
pub fn reduce_case1() -> Result<TaskReport, ReductionError> {
    let mut r = TaskReport::new("verify-reductions", Some(1)).labelled("case 1: no Y dependence");
    r.hypothesis("CH(2+1) n=1 with d/dY = 0");
    r.hypothesis("mCH(2+1) n=1 with d/dy = 0");
    r.assume("additive integration constant of v1 from om1_x = u*v1_x fixed to zero");
    r.assume("positive branch P = sqrt(U) > 0");

    // CH side
    let ch = build_ch_system(1)?;
    let c = cat("var X T\nconst k1\nfield Om1(X,T)\nfield P(X,T)\nfield Del(X,T)\nfield U(X,T)\nnonzero P U\n");
    let map = ChainRuleMap::new().derivation("Y", vec![]);
    let pushed = push_all(&ch, &c, &map)?;
    let py = get(&pushed, "P_Y");
    entry(&mut r, &c, "d/dY = 0 leaves (P*Om1)_X = 0", &(py - &(&c.dn(&c.e("P*Om1"), "X") * &Expr::frac(1, 2))));
    let om = c.e("k1/P");
    entry(&mut r, &c, "Om1 = k1/P solves (P*Om1)_X = 0", &substitute(&c, py, &[("Om1", om.clone())])?);
    let last = substitute(&c, get(&pushed, "P_T"), &[("Om1", om.clone())])?;
    let inv_p = c.e("1/P");
    let dym = &c.e("2*P*P_T") - &(&(&c.dd(&inv_p, &["X", "X", "X"]) - &c.dn(&inv_p, "X")) * &c.e("k1"));
    entry(&mut r, &c, "Dym: U_T = k1[(1/P)_XXX - (1/P)_X], U = P^2", &(&last - &dym));
    let dym2 = substitute(&c, &dym, &[("k1", Expr::int(2))])?;
    let explicit = &c.e("2*P*P_T") - &(&c.dd(&c.e("2/P"), &["X", "X", "X"]) - &c.dn(&c.e("2/P"), "X"));
    entry(&mut r, &c, "Dym with k1 = 2 in explicit form", &(&dym2 - &explicit));

    // mCH side
    let mch = build_mch_system(1)?;
    let m = cat("var x t\nconst k2\nfield v1(x,t)\nfield om1(x,t)\nfield u(x,t)\nfield del(x,t)\nnonzero u\n");
    let map = ChainRuleMap::new().derivation("y", vec![]);
    let pushed = push_all(&mch, &m, &map)?;
    let uy = get(&pushed, "u_y");
    entry(&mut r, &m, "d/dy = 0 leaves (u*om1)_x = 0", &(uy - &m.dn(&m.e("u*om1"), "x")));
    let w = m.e("k2/u");
    let v = m.e("k2/(2*u^2)");
    entry(&mut r, &m, "om1 = k2/u solves (u*om1)_x = 0", &substitute(&m, uy, &[("om1", w.clone())])?);
    let flux = substitute(&m, get(&pushed, "om1"), &[("om1", w.clone()), ("v1", v.clone())])?;
    entry(&mut r, &m, "v1 = k2/(2u^2) from om1_x = u*v1_x", &flux);
    let last = substitute(&m, get(&pushed, "u_t"), &[("v1", v.clone())])?;
    let b = m.e("1/(2*u^2)");
    let qiao = &m.j("u_t") - &(&m.dn(&(&m.dd(&b, &["x", "x"]) - &b), "x") * &m.e("k2"));
    entry(&mut r, &m, "Qiao: u_t = k2[(1/(2u^2))_xx - 1/(2u^2)]_x", &(&last - &qiao));
    let qiao1 = substitute(&m, &qiao, &[("k2", Expr::one())])?;
    let explicit = &(&m.j("u_t") - &m.dd(&b, &["x", "x", "x"])) + &m.dn(&b, "x");
    entry(&mut r, &m, "Qiao with k2 = 1 in explicit form", &(&qiao1 - &explicit));

    // k1 = 2 k2 from the composite dictionary
    let pc = cat("var X T\nconst k1 k2\nfield Om1(X,T)\nfield P(X,T)\nfield om1(X,T)\nfield u(X,T)\nnonzero P u\n");
    let mut rs = RewriteSystem::new(crate::systems::RankSpec::orderly().block(&["om1", "u"]).build(&pc));
    rs.push(&pc, RewriteRule::new(pc.jet("u")?, pc.e("P^2/(P - P_X)"), "1/u = (1/P)_X + 1/P"))?;
    r.hypothesis("1/u = (1/P)_X + 1/P");
    r.hypothesis("om1 = (Om1_X + Om1)/2");
    let rel = substitute(
        &pc,
        &pc.e("om1 - (Om1_X + Om1)/2"),
        &[("om1", pc.e("k2/u")), ("Om1", pc.e("k1/P"))],
    )?;
    let forced = &rel - &pc.e("(2*k2 - k1)/(2*u)");
    let (rem, _) = reduce(&pc, &rs, &forced)?;
    entry(&mut r, &pc, "k2/u - (Om1_X + Om1)/2 = (2k2 - k1)/(2u)", &rem);
    let with = substitute(&pc, &rel, &[("k1", pc.e("2*k2"))])?;
    let (rem, _) = reduce(&pc, &rs, &with)?;
    entry(&mut r, &pc, "k1 = 2k2 satisfies the dictionary", &rem);
    let without = substitute(&pc, &rel, &[("k1", pc.e("k2"))])?;
    let (rem, _) = reduce(&pc, &rs, &without)?;
    r.push(ResidualEntry::from_remainder("control: k1 = k2 violates the dictionary", &pc, &rem).expect_nonzero());

    // X_1 = X_0 and x_1 = x_0
    let x1 = substitute(&c, &c.e("Om1/2 - 1/P"), &[("Om1", om)])?;
    r.push(ResidualEntry::from_remainder("X_1 - X_0 = (k1 - 2)/(2P)", &c, &c.normalize(&(&x1 - &c.e("(k1 - 2)/(2*P)")))));
    entry(&mut r, &c, "X_1 = X_0 when k1 = 2", &substitute(&c, &x1, &[("k1", Expr::int(2))])?);
    let xx1 = substitute(&m, &m.e("om1 - 1/u"), &[("om1", w)])?;
    entry(&mut r, &m, "x_1 = x_0 when k2 = 1", &substitute(&m, &xx1, &[("k2", Expr::one())])?);

    // z1 identified with z0
    let fam = build_cbs_family(1)?;
    let zk = cat("var z0 z2\nfield M(z0,z2)\n");
    let to0 = ChainRuleMap::new().derivation("z1", vec![(Expr::one(), "z0")]);
    let cbs = to0.apply(&fam.cbs.catalog, &zk, &fam.cbs.equations[0].expr)?;
    let pkdv = zk.dn(&zk.e("M_z2 + M_z0z0z0 + 6*M_z0^2"), "z0");
    entry(&mut r, &zk, "potential KdV: (M_2 + M_000 + 6M_0^2)_0", &(&cbs - &pkdv));
    let mf = build_mcbs_family(1)?;
    let zm = cat("var z0 z2\nfield x(z0,z2)\nnonzero x_z0\n");
    let mcbs = to0.apply(&mf.x_form.catalog, &zm, &mf.x_form.equations[0].expr)?;
    let pmkdv = zm.e("x_z2 + x_z0z0z0 - x_z0^3/2");
    entry(
        &mut r,
        &zm,
        "potential mKdV: mCBS = ((x_2 + x_000 - x_0^3/2)/x_0)_0",
        &(&mcbs - &zm.dn(&(&pmkdv / &zm.j("x_z0")), "z0")),
    );
    r.assume("potential mKdV obtained after one z0-integration with zero integration function; unit 1/x_0");
    Ok(r)
}

fn reduce(c: &Catalog, rs: &RewriteSystem, e: &Expr) -> Result<(Expr, usize), JetError> {
    let mut red = crate::jet::Reducer::new(c, rs, crate::jet::DEFAULT_BUDGET);
    let out = red.reduce(e)?;
    Ok((out, red.steps()))
}

/// Reduction with T = X (and t = x).
pub fn reduce_case2() -> Result<TaskReport, ReductionError> {
    let mut r = TaskReport::new("verify-reductions", Some(1)).labelled("case 2: T = X");
    r.hypothesis("CH(2+1) n=1 with T identified with X");
    r.hypothesis("mCH(2+1) n=1 with t identified with x");
    r.assume("integration constants of Del = P and U = Om1_XX - Om1 fixed to zero");
    r.assume("integration constants of del = u and u = v1_xx - v1 fixed to zero");

    let ch = build_ch_system(1)?;
    let c = cat("var X Y\nfield Om1(X,Y)\nfield P(X,Y)\nfield Del(X,Y)\nfield U(X,Y)\nnonzero P U\n");
    let map = ChainRuleMap::new().derivation("T", vec![(Expr::one(), "X")]);
    let pushed = push_all(&ch, &c, &map)?;
    entry(&mut r, &c, "Del = P", &substitute(&c, get(&pushed, "Del_X"), &[("Del", c.e("P"))])?);
    let u_def = c.e("P^2 - (Om1_XX - Om1)");
    entry(&mut r, &c, "U = Om1_XX - Om1 integrates the last equation", &(get(&pushed, "P_T") - &c.dn(&u_def, "X")));
    let chq = c.e("U_Y + U*Om1_X + Om1*U_X/2");
    let chp = substitute(&c, &chq, &[("U", c.e("P^2"))])?;
    let py = get(&pushed, "P_Y");
    entry(&mut r, &c, "CH: U_Y + U*Om1_X + Om1*U_X/2 = 2P * (P_Y + (P*Om1)_X/2)", &(&chp - &(&c.e("2*P") * py)));
    let mut rs = RewriteSystem::new(crate::jet::Ranking::orderly(&c));
    rs.push(&c, RewriteRule::from_residual(&c, py, c.jet("P_Y")?, "P_Y")?)?;
    let (rem, s) = reduce(&c, &rs, &chp)?;
    r.steps += s;
    r.push(ResidualEntry::from_remainder("CH modulo the reduced system", &c, &rem).with_unit("2*P"));

    let mch = build_mch_system(1)?;
    let m = cat("var x y\nfield v1(x,y)\nfield om1(x,y)\nfield u(x,y)\nfield del(x,y)\nnonzero u\n");
    let map = ChainRuleMap::new().derivation("t", vec![(Expr::one(), "x")]);
    let pushed = push_all(&mch, &m, &map)?;
    entry(&mut r, &m, "del = u", &substitute(&m, get(&pushed, "del_x"), &[("del", m.e("u"))])?);
    entry(
        &mut r,
        &m,
        "u = v1_xx - v1 integrates the last equation",
        &(get(&pushed, "u_t") - &m.dn(&m.e("u - (v1_xx - v1)"), "x")),
    );
    entry(&mut r, &m, "modified CH: u_y + (u*om1)_x", &(get(&pushed, "u_y") - &m.e("u_y + (u*om1_x + u_x*om1)")));
    entry(&mut r, &m, "modified CH: om1_x - u*v1_x", &(get(&pushed, "om1") - &m.e("om1_x - u*v1_x")));

    // X_2 = x_2 = -1
    entry(&mut r, &c, "X_2 = -Del/P = -1", &(&substitute(&c, &c.e("-Del/P"), &[("Del", c.e("P"))])? + &Expr::one()));
    entry(&mut r, &m, "x_2 = -del/u = -1", &(&substitute(&m, &m.e("-del/u"), &[("del", m.e("u"))])? + &Expr::one()));
    let fam = build_cbs_family(1)?;
    let za = cat("var z0 z1\nfield X(z0,z1)\nfield M(z0,z1)\nnonzero X_z0\n");
    let drop = ChainRuleMap::new().derivation("z2", vec![]).jet("X_z2", Expr::int(-1));
    let m1 = drop.apply(&fam.m_defs.catalog, &za, &fam.m_defs.catalog.e("-X_z2/(4*X_z0)"))?;
    entry(&mut r, &za, "M_1 = -X_2/(4X_0) = 1/(4X_0)", &(&m1 - &za.e("1/(4*X_z0)")));
    let dm1 = drop.apply(&fam.m_defs.catalog, &za, &fam.m_defs.catalog.dn(&fam.m_defs.catalog.e("-X_z2/(4*X_z0)"), "z2"))?;
    entry(&mut r, &za, "M_1 does not depend on z2", &dm1);
    let akns = drop.apply(&fam.cbs.catalog, &za, &fam.cbs.equations[0].expr)?;
    let explicit = za.e("M_z0z0z0z1 + 4*M_z1*M_z0z0 + 8*M_z0*M_z0z1");
    entry(&mut r, &za, "AKNS: M_0001 + 4M_1M_00 + 8M_0M_01", &(&akns - &explicit));
    let mf = build_mcbs_family(1)?;
    let zb = cat("var z0 z1\nfield x(z0,z1)\nnonzero x_z0\n");
    let dropx = ChainRuleMap::new().derivation("z2", vec![]).jet("x_z2", Expr::int(-1));
    let makns = dropx.apply(&mf.x_form.catalog, &zb, &mf.x_form.equations[0].expr)?;
    let explicit = &zb.dn(&zb.e("(x_z0z0z1 - 1)/x_z0"), "z0") - &zb.dn(&zb.e("x_z0^2/2"), "z1");
    entry(&mut r, &zb, "modified AKNS: ((x_100 - 1)/x_0)_0 = (x_0^2/2)_1", &(&makns - &explicit));
    Ok(r)
}

/// Explicit AKNS residual over `(z0, z1)` for external use.
pub fn akns_residual() -> (Catalog, Expr) {
    let za = cat("var z0 z1\nfield M(z0,z1)\n");
    let e = za.e("M_z0z0z0z1 + 4*M_z1*M_z0z0 + 8*M_z0*M_z0z1");
    (za, e)
}
