//! Variable spaces and symbol catalogs.

use std::collections::{BTreeSet, HashMap};

use num_traits::One;

use super::error::JetError;
use super::expr::Expr;
use super::poly::{Monomial, Poly, Q};
use super::var::{FieldId, JetVar, VarId, MAX_DEPS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymbolKind {
    Field,
    Constant,
    /// Algebraic generator `g` with `g² = square`.
    Extension { square: Poly },
}

#[derive(Clone, Debug)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
    pub deps: Vec<VarId>,
}

/// Independent variables plus every symbol an expression may mention.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    vars: Vec<String>,
    symbols: Vec<Symbol>,
    by_name: HashMap<String, FieldId>,
    nonzero: BTreeSet<JetVar>,
}

impl Catalog {
    pub fn new() -> Self {
        Catalog::default()
    }

    pub fn with_vars(names: &[&str]) -> Self {
        let mut c = Catalog::new();
        for n in names {
            c.add_var(n).expect("fresh variable");
        }
        c
    }

    pub fn add_var(&mut self, name: &str) -> Result<VarId, JetError> {
        if self.vars.iter().any(|v| v == name) {
            return Err(JetError::Catalog(format!("variable {name} declared twice")));
        }
        self.vars.push(name.to_string());
        Ok(VarId(self.vars.len() as u16 - 1))
    }

    fn add_symbol(&mut self, name: &str, kind: SymbolKind, deps: Vec<VarId>) -> Result<FieldId, JetError> {
        if self.by_name.contains_key(name) || self.vars.iter().any(|v| v == name) {
            return Err(JetError::Catalog(format!("symbol {name} declared twice")));
        }
        if deps.len() > MAX_DEPS {
            return Err(JetError::Catalog(format!("{name} depends on too many variables")));
        }
        let id = FieldId(self.symbols.len() as u16);
        self.symbols.push(Symbol {
            name: name.to_string(),
            kind,
            deps,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn add_field(&mut self, name: &str, deps: &[&str]) -> Result<FieldId, JetError> {
        let mut ids = Vec::with_capacity(deps.len());
        for d in deps {
            let v = self
                .var_id(d)
                .ok_or_else(|| JetError::Undeclared(d.to_string()))?;
            if ids.contains(&v) {
                return Err(JetError::Catalog(format!("{name} lists {d} twice")));
            }
            ids.push(v);
        }
        self.add_symbol(name, SymbolKind::Field, ids)
    }

    pub fn add_const(&mut self, name: &str) -> Result<FieldId, JetError> {
        self.add_symbol(name, SymbolKind::Constant, Vec::new())
    }

    /// Declares `name` with `name² = square`. The square must be polynomial
    /// in symbols already declared.
    pub fn add_ext(&mut self, name: &str, square: &str) -> Result<FieldId, JetError> {
        let sq = self.parse(square)?;
        if !sq.is_polynomial() {
            return Err(JetError::Catalog(format!("square of {name} must be polynomial")));
        }
        let mut deps: Vec<VarId> = Vec::new();
        for jv in sq.vars() {
            for d in &self.symbols[jv.field.0 as usize].deps {
                if !deps.contains(d) {
                    deps.push(*d);
                }
            }
        }
        deps.sort();
        self.add_symbol(
            name,
            SymbolKind::Extension {
                square: sq.num().clone(),
            },
            deps,
        )
    }

    /// Marks a jet variable as invertible for division bookkeeping.
    pub fn declare_nonzero(&mut self, jet: &str) -> Result<(), JetError> {
        let jv = self.jet(jet)?;
        self.nonzero.insert(jv);
        Ok(())
    }

    pub fn nonzero_set(&self) -> &BTreeSet<JetVar> {
        &self.nonzero
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v == name).map(|i| VarId(i as u16))
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.vars[v.0 as usize]
    }

    /// Looks up an independent variable, panicking on unknown names.
    pub fn v(&self, name: &str) -> VarId {
        self.var_id(name)
            .unwrap_or_else(|| panic!("unknown variable {name}"))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn symbol(&self, f: FieldId) -> &Symbol {
        &self.symbols[f.0 as usize]
    }

    pub fn field_id(&self, name: &str) -> Option<FieldId> {
        self.by_name.get(name).copied()
    }

    pub fn is_extension(&self, f: FieldId) -> bool {
        matches!(self.symbol(f).kind, SymbolKind::Extension { .. })
    }

    /// Position of `v` in the dependency list of `f`.
    pub fn slot(&self, f: FieldId, v: VarId) -> Option<usize> {
        self.symbol(f).deps.iter().position(|d| *d == v)
    }

    /// The undifferentiated symbol as an expression; panics on unknown names.
    pub fn sym(&self, name: &str) -> Expr {
        let f = self
            .field_id(name)
            .unwrap_or_else(|| panic!("unknown symbol {name}"));
        Expr::var(JetVar::base(f))
    }

    /// Parses a single jet variable such as `U_XXY`.
    pub fn jet(&self, text: &str) -> Result<JetVar, JetError> {
        super::parse::parse_jet(self, text)
    }

    /// Jet variable as an expression; panics on malformed names.
    pub fn j(&self, text: &str) -> Expr {
        Expr::var(self.jet(text).unwrap_or_else(|e| panic!("{e}")))
    }

    pub fn parse(&self, text: &str) -> Result<Expr, JetError> {
        super::parse::parse_expr(self, text)
    }

    /// Parses, panicking on error. For builders with literal input.
    pub fn e(&self, text: &str) -> Expr {
        self.parse(text).unwrap_or_else(|e| panic!("{text}: {e}"))
    }

    pub fn print(&self, e: &Expr) -> String {
        super::parse::print_expr(self, e)
    }

    pub fn jet_name(&self, jv: &JetVar) -> String {
        super::parse::jet_name(self, jv)
    }

    /// `jv` differentiated once by `v`, or `None` when it does not depend on `v`.
    pub fn jet_derivative(&self, jv: &JetVar, v: VarId) -> Option<JetVar> {
        let sym = self.symbol(jv.field);
        if sym.kind != SymbolKind::Field {
            return None;
        }
        self.slot(jv.field, v).map(|k| jv.bumped(k))
    }

    /// Orders of `jv` keyed by global variable id.
    pub fn orders_by_var(&self, jv: &JetVar) -> Vec<(VarId, u8)> {
        self.symbol(jv.field)
            .deps
            .iter()
            .enumerate()
            .filter(|(k, _)| jv.orders[*k] > 0)
            .map(|(k, v)| (*v, jv.orders[k]))
            .collect()
    }

    /// Total derivative of an extension generator `g`: `g·D(R)/(2R)`.
    fn ext_derivative(&self, g: FieldId, v: VarId) -> Expr {
        let SymbolKind::Extension { square } = &self.symbol(g).kind else {
            unreachable!()
        };
        let dr = self.d_poly(square, v);
        if dr.is_zero() {
            return Expr::zero();
        }
        let r = Expr::from_poly(square.clone());
        &(&Expr::var(JetVar::base(g)) * &dr) / &(&r * &Expr::int(2))
    }

    /// Total derivative of a polynomial, as an expression (extensions may divide).
    fn d_poly(&self, p: &Poly, v: VarId) -> Expr {
        let mut terms: Vec<(Monomial, Q)> = Vec::new();
        let mut ext_part = Expr::zero();
        for (m, c) in p.terms() {
            for (idx, &(jv, e)) in m.pairs().iter().enumerate() {
                let sym = self.symbol(jv.field);
                match &sym.kind {
                    SymbolKind::Constant => {}
                    SymbolKind::Field => {
                        let Some(k) = self.slot(jv.field, v) else { continue };
                        let mut pairs: Vec<(JetVar, u32)> = m.pairs().to_vec();
                        if e == 1 {
                            pairs.remove(idx);
                        } else {
                            pairs[idx].1 = e - 1;
                        }
                        pairs.push((jv.bumped(k), 1));
                        terms.push((Monomial::from_pairs(pairs), c * super::poly::q(e as i64)));
                    }
                    SymbolKind::Extension { .. } => {
                        let dg = self.ext_derivative(jv.field, v);
                        if dg.is_zero() {
                            continue;
                        }
                        let rest = Monomial::from_pairs(
                            m.pairs()
                                .iter()
                                .map(|&(w, f)| if w == jv { (w, f - 1) } else { (w, f) })
                                .collect(),
                        );
                        let coef = Expr::monomial(rest, c * super::poly::q(e as i64));
                        ext_part = &ext_part + &(&coef * &dg);
                    }
                }
            }
        }
        &Expr::from_poly(Poly::from_terms(terms)) + &ext_part
    }

    /// Total derivative by `v`, normalized.
    pub fn d(&self, e: &Expr, v: VarId) -> Expr {
        let dn = self.d_poly(e.num(), v);
        if e.den().is_one() {
            return self.normalize(&dn);
        }
        let dd = self.d_poly(e.den(), v);
        let den = Expr::from_poly(e.den().clone());
        let num = Expr::from_poly(e.num().clone());
        let r = if dd.is_zero() {
            &dn / &den
        } else {
            &(&(&dn * &den) - &(&num * &dd)) / &(&den * &den)
        };
        self.normalize(&r)
    }

    /// Total derivative by a variable name.
    pub fn dn(&self, e: &Expr, var: &str) -> Expr {
        self.d(e, self.v(var))
    }

    /// Repeated total derivative, e.g. `dd(e, &["X", "X", "Y"])`.
    pub fn dd(&self, e: &Expr, vars: &[&str]) -> Expr {
        let mut r = e.clone();
        for v in vars {
            r = self.dn(&r, v);
        }
        r
    }

    /// Canonical form: generator powers reduced, denominators rationalized.
    pub fn normalize(&self, e: &Expr) -> Expr {
        let gens: Vec<(FieldId, &Poly)> = self
            .symbols
            .iter()
            .enumerate()
            .filter_map(|(i, s)| match &s.kind {
                SymbolKind::Extension { square } => Some((FieldId(i as u16), square)),
                _ => None,
            })
            .collect();
        if gens.is_empty() {
            return e.clone();
        }
        let touches = e
            .vars()
            .iter()
            .any(|jv| gens.iter().any(|(g, _)| *g == jv.field));
        if !touches {
            return e.clone();
        }
        let mut num = e.num().clone();
        let mut den = e.den().clone();
        for (g, sq) in &gens {
            num = reduce_generator(&num, *g, sq);
            den = reduce_generator(&den, *g, sq);
        }
        for (g, _) in &gens {
            let gv = JetVar::base(*g);
            if !den.contains_var(&gv) {
                continue;
            }
            let cs = den.coeffs_in(&gv);
            let a = cs[0].clone();
            let b = cs.get(1).cloned().unwrap_or_else(Poly::zero);
            let conj = Poly::from_coeffs_in(&gv, &[a, -&b]);
            num = &num * &conj;
            den = &den * &conj;
            for (h, sq2) in &gens {
                num = reduce_generator(&num, *h, sq2);
                den = reduce_generator(&den, *h, sq2);
            }
            debug_assert!(!den.contains_var(&gv));
        }
        Expr::new(num, den)
    }

    /// True when `e` vanishes identically.
    pub fn is_zero(&self, e: &Expr) -> bool {
        self.normalize(e).is_zero()
    }

    /// Denominator factors not covered by the declared nonzero set.
    pub fn undeclared_divisor(&self, e: &Expr) -> Option<Poly> {
        let den = e.den();
        if den.is_constant() {
            return None;
        }
        let mc = den.monomial_content();
        let rest = den.div_monomial(&mc);
        let mut leftover: Vec<(JetVar, u32)> = Vec::new();
        for &(jv, k) in mc.pairs() {
            if !self.nonzero.contains(&jv) {
                leftover.push((jv, k));
            }
        }
        let lm = Poly::term(Monomial::from_pairs(leftover), Q::one());
        let r = &rest * &lm;
        if r.is_constant() {
            None
        } else {
            Some(r)
        }
    }
}

/// Rewrites `g^k` with `k ≥ 2` using `g² = sq`.
fn reduce_generator(p: &Poly, g: FieldId, sq: &Poly) -> Poly {
    let gv = JetVar::base(g);
    if p.degree_in(&gv) < 2 {
        return p.clone();
    }
    let cs = p.coeffs_in(&gv);
    let mut even = Poly::zero();
    let mut odd = Poly::zero();
    let mut sq_pow = Poly::one();
    for (k, c) in cs.iter().enumerate() {
        if k >= 2 && k % 2 == 0 {
            sq_pow = &sq_pow * sq;
        }
        if c.is_zero() {
            continue;
        }
        let t = c * &sq_pow;
        if k % 2 == 0 {
            even = &even + &t;
        } else {
            odd = &odd + &t;
        }
    }
    &even + &(&odd * &Poly::var(gv))
}
