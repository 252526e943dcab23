//! Equation systems and Lax pairs of the two hierarchies.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::jet::{
    parse_catalog, write_catalog, Catalog, Expr, JetError, JetVar, Q, RankKind, Ranking, Reducer,
    RewriteRule, RewriteSystem, DEFAULT_BUDGET,
};
use crate::report::{ResidualEntry, TaskReport};

/// A labelled residual, optionally with the jet it is solved for.
#[derive(Clone, Debug)]
pub struct Equation {
    pub label: String,
    pub expr: Expr,
    pub lead: Option<JetVar>,
}

impl Equation {
    pub fn new(label: impl Into<String>, expr: Expr, lead: Option<JetVar>) -> Self {
        Equation {
            label: label.into(),
            expr,
            lead,
        }
    }
}

/// How to build the ranking of a system's catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSpec {
    pub kind: RankKind,
    pub order: Vec<String>,
    pub blocks: Vec<Vec<String>>,
}

impl RankSpec {
    pub fn orderly() -> Self {
        RankSpec {
            kind: RankKind::Orderly,
            order: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn lex() -> Self {
        RankSpec {
            kind: RankKind::Lex,
            ..RankSpec::orderly()
        }
    }

    pub fn block(mut self, names: &[&str]) -> Self {
        self.blocks.push(names.iter().map(|s| s.to_string()).collect());
        self
    }

    pub fn build(&self, cat: &Catalog) -> Ranking {
        let r = match self.kind {
            RankKind::Orderly => Ranking::orderly(cat),
            RankKind::Lex => Ranking::lex(cat),
        };
        let order: Vec<&str> = self.order.iter().map(|s| s.as_str()).collect();
        let r = if order.is_empty() {
            r
        } else {
            r.with_field_order(cat, &order)
        };
        let blocks: Vec<Vec<&str>> = self
            .blocks
            .iter()
            .map(|b| b.iter().map(|s| s.as_str()).collect())
            .collect();
        let blocks: Vec<&[&str]> = blocks.iter().map(|b| b.as_slice()).collect();
        r.with_blocks(cat, &blocks)
    }
}

#[derive(Clone, Debug)]
pub struct EquationSystem {
    pub name: String,
    pub catalog: Catalog,
    pub rank: RankSpec,
    pub equations: Vec<Equation>,
    /// Definitional relations used for reduction but not counted as residuals.
    pub definitions: Vec<Equation>,
    pub assumptions: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum SystemError {
    #[error("component count must be at least 1, got {0}")]
    BadN(usize),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error("lax pair and system use different catalogs")]
    CatalogMismatch,
    #[error("Ψ enters nonlinearly in {0}")]
    NonlinearPsi(String),
}

impl EquationSystem {
    pub fn new(name: &str, catalog: Catalog, rank: RankSpec) -> Self {
        EquationSystem {
            name: name.to_string(),
            catalog,
            rank,
            equations: Vec::new(),
            definitions: Vec::new(),
            assumptions: Vec::new(),
        }
    }

    pub fn ranking(&self) -> Ranking {
        self.rank.build(&self.catalog)
    }

    pub fn push(&mut self, label: &str, expr: Expr, lead: Option<&str>) {
        let lead = lead.map(|l| self.catalog.jet(l).expect("lead jet"));
        self.equations.push(Equation::new(label, expr, lead));
    }

    pub fn define(&mut self, label: &str, expr: Expr, lead: &str) {
        let lead = self.catalog.jet(lead).expect("lead jet");
        self.definitions.push(Equation::new(label, expr, Some(lead)));
    }

    pub fn len(&self) -> usize {
        self.equations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn residual(&self, label: &str) -> Option<&Expr> {
        self.equations
            .iter()
            .find(|e| e.label == label)
            .map(|e| &e.expr)
    }

    /// Rules obtained by solving each residual (then each definition) for its lead.
    pub fn orientation(&self) -> Result<RewriteSystem, JetError> {
        let mut rs = RewriteSystem::new(self.ranking());
        for eq in self.equations.iter().chain(self.definitions.iter()) {
            if let Some(lead) = eq.lead {
                let rule = RewriteRule::from_residual(&self.catalog, &eq.expr, lead, eq.label.clone())?;
                rs.push(&self.catalog, rule)?;
            }
        }
        Ok(rs)
    }

    /// Plain-text form: catalog declarations followed by ranking and equations.
    pub fn to_text(&self) -> String {
        let c = &self.catalog;
        let mut out = format!("# system {}\n", self.name);
        out.push_str(&write_catalog(c));
        out.push_str(match self.rank.kind {
            RankKind::Orderly => "rank orderly\n",
            RankKind::Lex => "rank lex\n",
        });
        if !self.rank.order.is_empty() {
            out.push_str(&format!("order {}\n", self.rank.order.join(" ")));
        }
        for b in &self.rank.blocks {
            out.push_str(&format!("block {}\n", b.join(" ")));
        }
        for (kw, list) in [("eq", &self.equations), ("def", &self.definitions)] {
            for e in list.iter() {
                out.push_str(&format!("{kw} {}: {}\n", e.label, c.print(&e.expr)));
                if let Some(l) = e.lead {
                    out.push_str(&format!("lead {}: {}\n", e.label, c.jet_name(&l)));
                }
            }
        }
        for a in &self.assumptions {
            out.push_str(&format!("assume {a}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, SystemError> {
        let mut decl = String::new();
        let mut rest = Vec::new();
        let mut name = String::from("system");
        for (i, line) in text.lines().enumerate() {
            let t = line.trim();
            if let Some(n) = t.strip_prefix("# system ") {
                name = n.trim().to_string();
                continue;
            }
            let kw = t.split_whitespace().next().unwrap_or("");
            match kw {
                "var" | "field" | "const" | "ext" | "nonzero" => {
                    decl.push_str(line);
                    decl.push('\n');
                }
                "" => {}
                _ if t.starts_with('#') => {}
                _ => rest.push((i + 1, t.to_string())),
            }
        }
        let cat = parse_catalog(&decl)?;
        let mut sys = EquationSystem::new(&name, cat, RankSpec::orderly());
        let mut leads: HashMap<String, String> = HashMap::new();
        let mut pending: Vec<(bool, String, Expr)> = Vec::new();
        for (line, t) in rest {
            let (kw, body) = t.split_once(char::is_whitespace).unwrap_or((t.as_str(), ""));
            let body = body.trim();
            let bad = |msg: &str| SystemError::Format {
                line,
                msg: msg.to_string(),
            };
            match kw {
                "rank" => {
                    sys.rank.kind = match body {
                        "orderly" => RankKind::Orderly,
                        "lex" => RankKind::Lex,
                        _ => return Err(bad("rank must be orderly or lex")),
                    }
                }
                "order" => sys.rank.order = body.split_whitespace().map(String::from).collect(),
                "block" => sys
                    .rank
                    .blocks
                    .push(body.split_whitespace().map(String::from).collect()),
                "eq" | "def" => {
                    let (label, e) = body.split_once(':').ok_or_else(|| bad("expected `label: expr`"))?;
                    let expr = sys.catalog.parse(e.trim())?;
                    pending.push((kw == "def", label.trim().to_string(), expr));
                }
                "lead" => {
                    let (label, j) = body.split_once(':').ok_or_else(|| bad("expected `label: jet`"))?;
                    leads.insert(label.trim().to_string(), j.trim().to_string());
                }
                "assume" => sys.assumptions.push(body.to_string()),
                _ => return Err(bad(&format!("unknown keyword `{kw}`"))),
            }
        }
        for (is_def, label, expr) in pending {
            let lead = match leads.get(&label) {
                Some(j) => Some(sys.catalog.jet(j)?),
                None => None,
            };
            let eq = Equation::new(label, expr, lead);
            if is_def {
                sys.definitions.push(eq);
            } else {
                sys.equations.push(eq);
            }
        }
        Ok(sys)
    }
}

fn check_n(n: usize) -> Result<(), SystemError> {
    if n == 0 {
        Err(SystemError::BadN(n))
    } else {
        Ok(())
    }
}

/// Catalog for the CH(2+1) side in (X, Y, T).
pub fn ch_catalog(n: usize) -> Catalog {
    let mut t = String::from("var X Y T\nfield lam(Y,T)\n");
    for i in 1..=n {
        t.push_str(&format!("field Om{i}(X,Y,T)\n"));
    }
    t.push_str("field P(X,Y,T)\nfield Del(X,Y,T)\nfield U(X,Y,T)\nfield Phi(X,Y,T)\nnonzero P U lam\n");
    parse_catalog(&t).expect("static catalog")
}

/// Catalog for the mCH(2+1) side in (x, y, t).
pub fn mch_catalog(n: usize) -> Catalog {
    let mut t = String::from("var x y t\nfield lam(y,t)\n");
    for i in 1..=n {
        t.push_str(&format!("field v{i}(x,y,t)\n"));
    }
    for i in 1..=n {
        t.push_str(&format!("field om{i}(x,y,t)\n"));
    }
    t.push_str(
        "field u(x,y,t)\nfield del(x,y,t)\nfield phi(x,y,t)\nfield phih(x,y,t)\n\
         ext s : s^2 = lam\next I : I^2 = -1\nnonzero u lam\n",
    );
    parse_catalog(&t).expect("static catalog")
}

/// Catalog over z0..z(n+1) with the given fields depending on every z.
pub fn z_catalog(n: usize, fields: &[&str], nonzero: &[&str]) -> Catalog {
    let zs: Vec<String> = (0..n + 2).map(|k| format!("z{k}")).collect();
    let mut t = format!("var {}\n", zs.join(" "));
    for f in fields {
        t.push_str(&format!("field {f}({})\n", zs.join(",")));
    }
    if !nonzero.is_empty() {
        t.push_str(&format!("nonzero {}\n", nonzero.join(" ")));
    }
    parse_catalog(&t).expect("static catalog")
}

/// Name of the jet of `field` by the listed z indices, e.g. `zj("X", &[0, 0, 1])` is `X_z0z0z1`.
pub fn zj(field: &str, idx: &[usize]) -> String {
    if idx.is_empty() {
        return field.to_string();
    }
    let mut s = format!("{field}_");
    for k in idx {
        s.push_str(&format!("z{k}"));
    }
    s
}

/// The CH(2+1) hierarchy in auxiliary-field form.
pub fn build_ch_system(n: usize) -> Result<EquationSystem, SystemError> {
    check_n(n)?;
    let c = ch_catalog(n);
    let rank = RankSpec::orderly().block(&["Phi"]);
    let mut sys = EquationSystem::new(&format!("CH(2+1) n={n}"), c.clone(), rank);
    let p = c.sym("P");
    let half = Expr::frac(1, 2);
    let py = &c.j("P_Y") + &(&half * &c.dn(&(&p * &c.sym("Om1")), "X"));
    sys.push("P_Y", py, Some("P_Y"));
    for i in 1..n {
        let k = c.e(&format!("Om{i}_XXX - Om{i}_X"));
        let j = &p * &c.dn(&(&p * &c.sym(&format!("Om{}", i + 1))), "X");
        sys.push(&format!("Om{i}"), &k + &j, Some(&format!("Om{i}_XXX")));
    }
    let last = c.e(&format!("2*P*P_T - (Om{n}_XXX - Om{n}_X)"));
    sys.push("P_T", last, Some(&format!("Om{n}_XXX")));
    sys.push("Del_X", c.e("P_T - Del_X"), Some("Del_X"));
    sys.define("U", c.e("U - P^2"), "U");
    Ok(sys)
}

/// The mCH(2+1) hierarchy in auxiliary-field form.
pub fn build_mch_system(n: usize) -> Result<EquationSystem, SystemError> {
    check_n(n)?;
    let c = mch_catalog(n);
    let rank = RankSpec::orderly().block(&["phi", "phih"]);
    let mut sys = EquationSystem::new(&format!("mCH(2+1) n={n}"), c.clone(), rank);
    let u = c.sym("u");
    let uy = &c.j("u_y") + &c.dn(&(&u * &c.sym("om1")), "x");
    sys.push("u_y", uy, Some("u_y"));
    for i in 1..n {
        let k = c.e(&format!("v{i}_xxx - v{i}_x"));
        let j = c.dn(&(&u * &c.sym(&format!("om{}", i + 1))), "x");
        sys.push(&format!("v{i}"), &k + &j, Some(&format!("v{i}_xxx")));
    }
    for i in 1..=n {
        sys.push(
            &format!("om{i}"),
            c.e(&format!("om{i}_x - u*v{i}_x")),
            Some(&format!("om{i}_x")),
        );
    }
    sys.push("del_x", c.e("u_t - del_x"), Some("del_x"));
    sys.push("u_t", c.e(&format!("u_t - (v{n}_xxx - v{n}_x)")), Some(&format!("v{n}_xxx")));
    sys.assumptions
        .push(format!("om{n}_x = u*v{n}_x imposed for the last component"));
    Ok(sys)
}

/// `W = X_00/X_0 + X_0` over a z catalog containing `X`.
pub fn w_of_x(c: &Catalog) -> Expr {
    &(&c.j("X_z0z0") / &c.j("X_z0")) + &c.j("X_z0")
}

/// Residual of `-(X_{i+1}/X_0)_0 - (W_0 - W²/2)_i`.
pub fn cbs_x_form(c: &Catalog, i: usize) -> Expr {
    let w = w_of_x(c);
    let ratio = &c.j(&zj("X", &[i + 1])) / &c.j("X_z0");
    let inner = &c.dn(&w, "z0") - &(&(&w * &w) * &Expr::frac(1, 2));
    let lhs = -c.dn(&ratio, "z0");
    &lhs - &c.dn(&inner, &format!("z{i}"))
}

/// Residual of `(x_{i+1}/x_0 + x_{i00}/x_0)_0 - (x_0²/2)_i`.
pub fn mcbs_form(c: &Catalog, i: usize) -> Expr {
    &c.dn(&mcbs_m(c, i), "z0") - &c.dn(&(&c.j("x_z0").pow(2) * &Expr::frac(1, 2)), &format!("z{i}"))
}

/// `m_i = x_{i+1}/x_0 + x_{i00}/x_0`.
pub fn mcbs_m(c: &Catalog, i: usize) -> Expr {
    let x0 = c.j("x_z0");
    &(&c.j(&zj("x", &[i + 1])) / &x0) + &(&c.j(&zj("x", &[0, 0, i])) / &x0)
}

/// CBS residual `M_{0,i+1} + M_{000i} + 4M_iM_00 + 8M_0M_{0i}` for a potential `M`.
pub fn cbs_residual(c: &Catalog, m: &dyn Fn(&[usize]) -> Expr, i: usize) -> Expr {
    let t1 = m(&[0, i + 1]);
    let t2 = m(&[0, 0, 0, i]);
    let t3 = &(&m(&[i]) * &m(&[0, 0])) * &Expr::int(4);
    let t4 = &(&m(&[0]) * &m(&[0, i])) * &Expr::int(8);
    let _ = c;
    &(&(&t1 + &t2) + &t3) + &t4
}

/// The three linked CBS systems over z-space.
#[derive(Clone, Debug)]
pub struct CbsFamily {
    pub x_form: EquationSystem,
    pub m_defs: EquationSystem,
    pub cbs: EquationSystem,
}

pub fn build_cbs_family(n: usize) -> Result<CbsFamily, SystemError> {
    check_n(n)?;
    let c = z_catalog(n, &["X", "M"], &["X_z0"]);
    let rank = RankSpec::orderly().block(&["M"]);
    let mut x_form = EquationSystem::new(&format!("CBS X-form n={n}"), c.clone(), rank.clone());
    for i in 1..=n {
        x_form.push(&format!("X{i}"), cbs_x_form(&c, i), Some(&zj("X", &[0, 0, 0, i])));
    }
    let mut m_defs = EquationSystem::new(&format!("CBS potential n={n}"), c.clone(), rank.clone());
    let w = w_of_x(&c);
    let m0 = &(&c.dn(&w, "z0") - &(&(&w * &w) * &Expr::frac(1, 2))) * &Expr::frac(1, 4);
    m_defs.push("M_0", &c.j("M_z0") - &m0, Some("M_z0"));
    for i in 1..=n {
        let mi = &(&c.j(&zj("X", &[i + 1])) / &c.j("X_z0")) * &Expr::frac(-1, 4);
        m_defs.push(&format!("M_{i}"), &c.j(&zj("M", &[i])) - &mi, Some(&zj("M", &[i])));
    }
    let mut cbs = EquationSystem::new(&format!("CBS n={n}"), c.clone(), rank);
    for i in 1..=n {
        let mj = |idx: &[usize]| c.j(&zj("M", idx));
        cbs.push(&format!("CBS{i}"), cbs_residual(&c, &mj, i), None);
    }
    Ok(CbsFamily { x_form, m_defs, cbs })
}

/// The mCBS system and the definitions of its potential `m`.
#[derive(Clone, Debug)]
pub struct McbsFamily {
    pub x_form: EquationSystem,
    pub m_defs: EquationSystem,
}

pub fn build_mcbs_family(n: usize) -> Result<McbsFamily, SystemError> {
    check_n(n)?;
    let c = z_catalog(n, &["x", "m"], &["x_z0"]);
    let rank = RankSpec::orderly().block(&["m"]);
    let mut x_form = EquationSystem::new(&format!("mCBS n={n}"), c.clone(), rank.clone());
    for i in 1..=n {
        x_form.push(&format!("x{i}"), mcbs_form(&c, i), Some(&zj("x", &[0, 0, 0, i])));
    }
    let mut m_defs = EquationSystem::new(&format!("mCBS potential n={n}"), c.clone(), rank);
    m_defs.push(
        "m_0",
        &c.j("m_z0") - &(&c.j("x_z0").pow(2) * &Expr::frac(1, 2)),
        Some("m_z0"),
    );
    for i in 1..=n {
        m_defs.push(
            &format!("m_{i}"),
            &c.j(&zj("m", &[i])) - &mcbs_m(&c, i),
            Some(&zj("m", &[i])),
        );
    }
    Ok(McbsFamily { x_form, m_defs })
}

/// Value of a residual at a constant state: base fields take the listed
/// values (others zero) and every derivative vanishes.
pub fn eval_constant_state(c: &Catalog, e: &Expr, values: &[(&str, Q)]) -> Option<Q> {
    let mut map = HashMap::new();
    for v in e.vars() {
        let val = if v.is_base() {
            let name = &c.symbol(v.field).name;
            values
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, q)| q.clone())
                .unwrap_or_else(|| Q::from_integer(0.into()))
        } else {
            Q::from_integer(0.into())
        };
        map.insert(v, val);
    }
    e.eval_rational(&map)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LaxKind {
    Scalar,
    Matrix2,
}

/// One signed term of a Lax coefficient.
#[derive(Clone, Debug)]
pub struct Summand {
    pub label: String,
    pub expr: Expr,
}

/// `Ψ_α = Σ spatial`, `Ψ_β = Σ temporal` for one unknown Ψ.
#[derive(Clone, Debug)]
pub struct LaxComponent {
    pub psi: String,
    pub spatial_lhs: JetVar,
    pub spatial: Vec<Summand>,
    pub temporal_lhs: JetVar,
    pub temporal: Vec<Summand>,
}

#[derive(Clone, Debug)]
pub struct LaxPair {
    pub name: String,
    pub kind: LaxKind,
    pub catalog: Catalog,
    pub components: Vec<LaxComponent>,
    pub spectral: Vec<Equation>,
}

impl LaxPair {
    fn sum(terms: &[Summand]) -> Expr {
        let mut acc = Expr::zero();
        for t in terms {
            acc = &acc + &t.expr;
        }
        acc
    }

    pub fn spatial_rhs(&self, k: usize) -> Expr {
        Self::sum(&self.components[k].spatial)
    }

    pub fn temporal_rhs(&self, k: usize) -> Expr {
        Self::sum(&self.components[k].temporal)
    }

    /// Labels of every summand, as `(component, part, index)` addresses.
    pub fn summand_addresses(&self) -> Vec<(usize, bool, usize, String)> {
        let mut out = Vec::new();
        for (k, comp) in self.components.iter().enumerate() {
            for (i, s) in comp.spatial.iter().enumerate() {
                out.push((k, true, i, format!("{}: {}", comp.psi, s.label)));
            }
            for (i, s) in comp.temporal.iter().enumerate() {
                out.push((k, false, i, format!("{}: {}", comp.psi, s.label)));
            }
        }
        out
    }

    /// Copy with the sign of one summand flipped.
    pub fn flip(&self, comp: usize, spatial: bool, idx: usize) -> LaxPair {
        let mut m = self.clone();
        let list = if spatial {
            &mut m.components[comp].spatial
        } else {
            &mut m.components[comp].temporal
        };
        list[idx].expr = -&list[idx].expr;
        m
    }

    pub fn rules(&self) -> Result<Vec<RewriteRule>, JetError> {
        let c = &self.catalog;
        let mut out = Vec::new();
        for eq in &self.spectral {
            out.push(RewriteRule::from_residual(c, &eq.expr, eq.lead.unwrap(), eq.label.clone())?);
        }
        for (k, comp) in self.components.iter().enumerate() {
            out.push(RewriteRule::new(
                comp.spatial_lhs,
                c.normalize(&self.spatial_rhs(k)),
                format!("{} spatial", comp.psi),
            ));
            out.push(RewriteRule::new(
                comp.temporal_lhs,
                c.normalize(&self.temporal_rhs(k)),
                format!("{} temporal", comp.psi),
            ));
        }
        Ok(out)
    }
}

fn summand(label: impl Into<String>, expr: Expr) -> Summand {
    Summand {
        label: label.into(),
        expr,
    }
}

fn spectral_equation(c: &Catalog, n: usize, time: &str, side: &str) -> Equation {
    let lead = format!("lam_{time}");
    let e = c.e(&format!("lam_{time} - lam^{n}*lam_{side}"));
    Equation::new("spectral", e, Some(c.jet(&lead).unwrap()))
}

/// Scalar spectral problem of CH(2+1):
/// `Φ_XX = -¼(λU - 1)Φ`, `Φ_T = λⁿΦ_Y + (λ/2)CΦ_X - (λ/4)C_XΦ`.
pub fn build_ch_lax(n: usize) -> Result<LaxPair, SystemError> {
    check_n(n)?;
    let c = ch_catalog(n);
    let spatial = vec![
        summand("-lam*U*Phi/4", c.e("-lam*U*Phi/4")),
        summand("+Phi/4", c.e("Phi/4")),
    ];
    let mut temporal = vec![summand("lam^n*Phi_Y", c.e(&format!("lam^{n}*Phi_Y")))];
    for i in 1..=n {
        let p = n - i;
        temporal.push(summand(
            format!("lam/2*lam^{p}*Om{i}*Phi_X"),
            c.e(&format!("lam^{}*Om{i}*Phi_X/2", p + 1)),
        ));
    }
    for i in 1..=n {
        let p = n - i;
        temporal.push(summand(
            format!("-lam/4*lam^{p}*Om{i}_X*Phi"),
            c.e(&format!("-lam^{}*Om{i}_X*Phi/4", p + 1)),
        ));
    }
    let comp = LaxComponent {
        psi: "Phi".into(),
        spatial_lhs: c.jet("Phi_XX")?,
        spatial,
        temporal_lhs: c.jet("Phi_T")?,
        temporal,
    };
    let spectral = vec![spectral_equation(&c, n, "T", "Y")];
    Ok(LaxPair {
        name: format!("CH scalar Lax n={n}"),
        kind: LaxKind::Scalar,
        catalog: c,
        components: vec![comp],
        spectral,
    })
}

/// Matrix spectral problem of mCH(2+1) for `(φ, φ̂)`.
pub fn build_mch_lax(n: usize) -> Result<LaxPair, SystemError> {
    check_n(n)?;
    let c = mch_catalog(n);
    let mut comps = Vec::new();
    for (psi, other, sign_diag, sign_b) in [("phi", "phih", -1i64, -1i64), ("phih", "phi", 1, 1)] {
        let spatial = vec![
            summand(
                format!("{}{psi}/2", if sign_diag < 0 { "-" } else { "+" }),
                &c.sym(psi) * &Expr::frac(sign_diag, 2),
            ),
            summand(format!("I*s*u*{other}/2"), c.e(&format!("I*s*u*{other}/2"))),
        ];
        let mut temporal = vec![summand(
            format!("lam^n*{psi}_y"),
            c.e(&format!("lam^{n}*{psi}_y")),
        )];
        for i in 1..=n {
            let p = n - i;
            temporal.push(summand(
                format!("lam*lam^{p}*om{i}*{psi}_x"),
                c.e(&format!("lam^{}*om{i}*{psi}_x", p + 1)),
            ));
        }
        for i in 1..=n {
            let p = n - i;
            temporal.push(summand(
                format!("I*s/2*lam^{p}*v{i}_xx*{other}"),
                c.e(&format!("I*s*lam^{p}*v{i}_xx*{other}/2")),
            ));
        }
        for i in 1..=n {
            let p = n - i;
            let sg = if sign_b < 0 { "-" } else { "" };
            temporal.push(summand(
                format!("{}I*s/2*lam^{p}*v{i}_x*{other}", if sign_b < 0 { "-" } else { "+" }),
                c.e(&format!("{sg}I*s*lam^{p}*v{i}_x*{other}/2")),
            ));
        }
        comps.push(LaxComponent {
            psi: psi.into(),
            spatial_lhs: c.jet(&format!("{psi}_x"))?,
            spatial,
            temporal_lhs: c.jet(&format!("{psi}_t"))?,
            temporal,
        });
    }
    let spectral = vec![spectral_equation(&c, n, "t", "y")];
    Ok(LaxPair {
        name: format!("mCH matrix Lax n={n}"),
        kind: LaxKind::Matrix2,
        catalog: c,
        components: comps,
        spectral,
    })
}

/// Cross-differentiates the linear problem and splits the obstruction by
/// Ψ-jet and by powers of the algebraic generators; every coefficient is
/// reduced modulo the hierarchy and the spectral conditions.
pub fn check_lax_compatibility(lax: &LaxPair, sys: &EquationSystem) -> Result<TaskReport, SystemError> {
    if write_catalog(&lax.catalog) != write_catalog(&sys.catalog) {
        return Err(SystemError::CatalogMismatch);
    }
    let c = &sys.catalog;
    let mut rs = sys.orientation()?;
    for r in lax.rules()? {
        rs.push(c, r)?;
    }
    let psi_fields: Vec<_> = lax
        .components
        .iter()
        .map(|k| c.field_id(&k.psi).unwrap())
        .collect();
    let results: Vec<Result<(Vec<ResidualEntry>, usize), SystemError>> = lax
        .components
        .par_iter()
        .enumerate()
        .map(|(k, comp)| {
            let target = join_jets(&comp.spatial_lhs, &comp.temporal_lhs);
            let (a, b) = rayon::join(
                || route(c, &rs, &lax.spatial_rhs(k), &comp.spatial_lhs, &target),
                || route(c, &rs, &lax.temporal_rhs(k), &comp.temporal_lhs, &target),
            );
            let (a, sa) = a?;
            let (b, sb) = b?;
            let diff = c.normalize(&(&a - &b));
            let entries = split_psi_coefficients(c, &diff, &psi_fields, &comp.psi, lax.kind)?;
            Ok((entries, sa + sb))
        })
        .collect();
    let mut report = TaskReport::new("verify-lax", Some(lax_n(lax)));
    report.hypotheses_used.push(sys.name.clone());
    report.hypotheses_used.push(format!("{} spectral conditions", lax.name));
    report.assumptions.extend(sys.assumptions.iter().cloned());
    for r in results {
        let (entries, steps) = r?;
        report.steps += steps;
        report.residuals.extend(entries);
    }
    report.label = lax.name.clone();
    Ok(report)
}

fn lax_n(lax: &LaxPair) -> usize {
    lax.catalog
        .symbols()
        .iter()
        .filter(|s| s.name.starts_with("Om") || s.name.starts_with("om"))
        .count()
}

fn join_jets(a: &JetVar, b: &JetVar) -> JetVar {
    let mut j = *a;
    for k in 0..j.orders.len() {
        j.orders[k] = a.orders[k].max(b.orders[k]);
    }
    j
}

/// Differentiates `rhs` (the value of `from`) up to the jet `to`, reducing after each step.
fn route(c: &Catalog, rs: &RewriteSystem, rhs: &Expr, from: &JetVar, to: &JetVar) -> Result<(Expr, usize), JetError> {
    let mut red = Reducer::new(c, rs, DEFAULT_BUDGET);
    let mut e = red.reduce(rhs)?;
    let deps = c.symbol(from.field).deps.clone();
    for (slot, v) in deps.iter().enumerate() {
        for _ in from.orders[slot]..to.orders[slot] {
            e = red.reduce(&c.d(&e, *v))?;
        }
    }
    Ok((e, red.steps()))
}

fn split_psi_coefficients(
    c: &Catalog,
    diff: &Expr,
    psi: &[crate::jet::FieldId],
    label: &str,
    kind: LaxKind,
) -> Result<Vec<ResidualEntry>, SystemError> {
    let gens: Vec<JetVar> = c
        .symbols()
        .iter()
        .enumerate()
        .filter(|(_, s)| matches!(s.kind, crate::jet::SymbolKind::Extension { .. }))
        .map(|(i, _)| JetVar::base(crate::jet::FieldId(i as u16)))
        .collect();
    let mut psi_jets: Vec<JetVar> = diff
        .num()
        .vars()
        .into_iter()
        .filter(|v| psi.contains(&v.field))
        .collect();
    psi_jets.sort();
    // coefficients that must be reported even when they vanish identically
    let mut basis: Vec<(Option<JetVar>, Vec<u32>)> = Vec::new();
    for f in psi {
        let mut jets = vec![JetVar::base(*f)];
        if kind == LaxKind::Scalar {
            if let Some(j) = c.jet_derivative(&JetVar::base(*f), c.symbol(*f).deps[0]) {
                jets.push(j);
            }
        }
        for j in jets {
            for mask in 0..(1u32 << gens.len()) {
                if kind == LaxKind::Scalar && mask != 0 {
                    continue;
                }
                let g = (0..gens.len()).map(|k| (mask >> k) & 1).collect();
                basis.push((Some(j), g));
            }
        }
    }
    let mut buckets: std::collections::BTreeMap<(Option<JetVar>, Vec<u32>), Vec<(crate::jet::Monomial, Q)>> =
        Default::default();
    for (m, q) in diff.num().terms() {
        let mut jet = None;
        let mut gdeg = vec![0u32; gens.len()];
        let mut rest = Vec::new();
        for &(v, e) in m.pairs() {
            if psi.contains(&v.field) {
                if jet.is_some() || e > 1 {
                    return Err(SystemError::NonlinearPsi(label.to_string()));
                }
                jet = Some(v);
            } else if let Some(g) = gens.iter().position(|g| *g == v) {
                gdeg[g] = e;
            } else {
                rest.push((v, e));
            }
        }
        buckets
            .entry((jet, gdeg))
            .or_default()
            .push((crate::jet::Monomial::from_pairs(rest), q.clone()));
    }
    let mut out = Vec::new();
    let mut keys: Vec<(Option<JetVar>, Vec<u32>)> = buckets.keys().cloned().collect();
    for key in &basis {
        if !keys.contains(key) {
            keys.push(key.clone());
        }
    }
    keys.sort();
    for key in keys {
        let terms = buckets.remove(&key).unwrap_or_default();
        let coeff = Expr::new(crate::jet::Poly::from_terms(terms), diff.den().clone());
        let coeff = c.normalize(&coeff);
        let mut name = format!("{label}: coeff of ");
        name.push_str(&match key.0 {
            Some(j) => c.jet_name(&j),
            None => "1".into(),
        });
        for (g, d) in gens.iter().zip(key.1.iter()) {
            if *d > 0 {
                name.push_str(&format!(" {}^{}", c.jet_name(g), d));
            }
        }
        out.push(ResidualEntry::from_remainder(name, c, &coeff));
    }
    Ok(out)
}

/// Runs the compatibility check on every single-sign mutation; returns the
/// labels of mutations that went undetected.
pub fn undetected_mutations(lax: &LaxPair, sys: &EquationSystem) -> Result<Vec<String>, SystemError> {
    let addrs = lax.summand_addresses();
    let missed: Vec<Result<Option<String>, SystemError>> = addrs
        .par_iter()
        .map(|(k, sp, i, label)| {
            let m = lax.flip(*k, *sp, *i);
            let r = check_lax_compatibility(&m, sys)?;
            Ok(if r.residuals.iter().all(|e| e.reduced_to_zero) {
                Some(label.clone())
            } else {
                None
            })
        })
        .collect();
    let mut out = Vec::new();
    for m in missed {
        if let Some(l) = m? {
            out.push(l);
        }
    }
    Ok(out)
}
