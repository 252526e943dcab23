//! Rankings, oriented rules and reduction to normal form.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};

use super::catalog::{Catalog, SymbolKind};
use super::error::JetError;
use super::expr::Expr;
use super::poly::{Monomial, Poly, Q};
use super::var::{FieldId, JetVar, MAX_DEPS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RankKind {
    /// Total order first, then field position, then multi-index.
    Orderly,
    /// Multi-index first, then field position.
    Lex,
}

/// Total order on jet variables.
///
/// Fields may be grouped in blocks; a later block dominates every earlier one.
/// Multi-indices compare lexicographically with the last declared variable
/// most significant. Constants and generators rank below every field.
#[derive(Clone, Debug)]
pub struct Ranking {
    kind: RankKind,
    block: Vec<u16>,
    pos: Vec<u16>,
    /// Per field: global variable index of each dependency slot.
    slot_var: Vec<Vec<u16>>,
    is_field: Vec<bool>,
    nvars: usize,
}

type Key = [u16; 3 + 2 * MAX_DEPS];

impl Ranking {
    pub fn orderly(cat: &Catalog) -> Self {
        Ranking::build(cat, RankKind::Orderly)
    }

    pub fn lex(cat: &Catalog) -> Self {
        Ranking::build(cat, RankKind::Lex)
    }

    fn build(cat: &Catalog, kind: RankKind) -> Self {
        let n = cat.symbols().len();
        Ranking {
            kind,
            block: vec![0; n],
            pos: (0..n as u16).collect(),
            slot_var: cat
                .symbols()
                .iter()
                .map(|s| s.deps.iter().map(|v| v.0).collect())
                .collect(),
            is_field: cat
                .symbols()
                .iter()
                .map(|s| s.kind == SymbolKind::Field)
                .collect(),
            nvars: cat.vars().len(),
        }
    }

    /// Field positions in increasing rank; unlisted fields keep catalog order below them.
    pub fn with_field_order(mut self, cat: &Catalog, names: &[&str]) -> Self {
        let base = self.pos.len() as u16;
        for (k, name) in names.iter().enumerate() {
            let f = cat.field_id(name).unwrap_or_else(|| panic!("unknown field {name}"));
            self.pos[f.0 as usize] = base + k as u16;
        }
        self
    }

    /// Elimination blocks, lowest first.
    pub fn with_blocks(mut self, cat: &Catalog, blocks: &[&[&str]]) -> Self {
        for (b, names) in blocks.iter().enumerate() {
            for name in names.iter() {
                let f = cat.field_id(name).unwrap_or_else(|| panic!("unknown field {name}"));
                self.block[f.0 as usize] = b as u16 + 1;
            }
        }
        self
    }

    pub fn kind(&self) -> RankKind {
        self.kind
    }

    fn key(&self, jv: &JetVar) -> Key {
        let f = jv.field.0 as usize;
        let mut k: Key = [0; 3 + 2 * MAX_DEPS];
        if !self.is_field[f] {
            k[1] = self.pos[f];
            return k;
        }
        let mut glob = [0u16; 2 * MAX_DEPS];
        for (slot, v) in self.slot_var[f].iter().enumerate() {
            glob[*v as usize] = jv.orders[slot] as u16;
        }
        let nv = self.nvars.min(2 * MAX_DEPS);
        k[0] = 1 + self.block[f];
        match self.kind {
            RankKind::Orderly => {
                k[1] = jv.total_order() as u16;
                k[2] = self.pos[f];
                for i in 0..nv {
                    k[3 + i] = glob[nv - 1 - i];
                }
            }
            RankKind::Lex => {
                for i in 0..nv {
                    k[1 + i] = glob[nv - 1 - i];
                }
                k[1 + nv] = self.pos[f];
            }
        }
        k
    }

    pub fn cmp(&self, a: &JetVar, b: &JetVar) -> Ordering {
        self.key(a).cmp(&self.key(b)).then_with(|| a.cmp(b))
    }

    /// Highest ranked jet variable of `e`, if any.
    pub fn leader(&self, e: &Expr) -> Option<JetVar> {
        e.vars().into_iter().max_by(|a, b| self.cmp(a, b))
    }
}

/// `lhs → rhs`, with `lhs` a jet variable.
#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub lhs: JetVar,
    pub rhs: Expr,
    pub label: String,
}

impl RewriteRule {
    pub fn new(lhs: JetVar, rhs: Expr, label: impl Into<String>) -> Self {
        RewriteRule {
            lhs,
            rhs,
            label: label.into(),
        }
    }

    /// Solves `residual = 0` for `lead`, which must occur linearly.
    pub fn from_residual(
        cat: &Catalog,
        residual: &Expr,
        lead: JetVar,
        label: impl Into<String>,
    ) -> Result<Self, JetError> {
        let name = cat.jet_name(&lead);
        if residual.den().contains_var(&lead) {
            return Err(JetError::NotSolvable {
                lead: name,
                reason: "occurs in a denominator".into(),
            });
        }
        let cs = residual.num().coeffs_in(&lead);
        if cs.len() != 2 {
            return Err(JetError::NotSolvable {
                lead: name,
                reason: if cs.len() < 2 {
                    "does not occur".into()
                } else {
                    "occurs nonlinearly".into()
                },
            });
        }
        let rhs = cat.normalize(&-(&Expr::from_poly(cs[0].clone()) / &Expr::from_poly(cs[1].clone())));
        Ok(RewriteRule::new(lead, rhs, label))
    }

    /// `lhs − rhs` as an expression.
    pub fn residual(&self) -> Expr {
        &Expr::var(self.lhs) - &self.rhs
    }
}

/// Ordered list of rules under a ranking.
#[derive(Clone, Debug)]
pub struct RewriteSystem {
    pub rules: Vec<RewriteRule>,
    pub ranking: Ranking,
    by_field: HashMap<FieldId, Vec<usize>>,
}

impl RewriteSystem {
    pub fn new(ranking: Ranking) -> Self {
        RewriteSystem {
            rules: Vec::new(),
            ranking,
            by_field: HashMap::new(),
        }
    }

    /// Adds a rule after checking that it strictly decreases the ranking.
    pub fn push(&mut self, cat: &Catalog, rule: RewriteRule) -> Result<(), JetError> {
        for v in rule.rhs.vars() {
            if self.ranking.cmp(&v, &rule.lhs) != Ordering::Less {
                return Err(JetError::Unorientable {
                    lhs: cat.jet_name(&rule.lhs),
                    offender: cat.jet_name(&v),
                });
            }
        }
        self.by_field
            .entry(rule.lhs.field)
            .or_default()
            .push(self.rules.len());
        self.rules.push(rule);
        Ok(())
    }

    pub fn with(mut self, cat: &Catalog, rule: RewriteRule) -> Result<Self, JetError> {
        self.push(cat, rule)?;
        Ok(self)
    }

    pub fn extend(&mut self, cat: &Catalog, other: &RewriteSystem) -> Result<(), JetError> {
        for r in &other.rules {
            self.push(cat, r.clone())?;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn exact(&self, v: &JetVar) -> Option<usize> {
        self.by_field
            .get(&v.field)?
            .iter()
            .copied()
            .find(|&i| self.rules[i].lhs == *v)
    }

    fn dividing(&self, v: &JetVar) -> Option<usize> {
        self.by_field
            .get(&v.field)?
            .iter()
            .copied()
            .find(|&i| v.is_derivative_of(&self.rules[i].lhs))
    }

    /// True when no rule applies to any jet variable of `e`.
    pub fn is_normal(&self, e: &Expr) -> bool {
        e.vars().iter().all(|v| self.dividing(v).is_none())
    }
}

pub const DEFAULT_BUDGET: usize = 200_000;

/// Memoizing normal-form engine for one rewrite system.
pub struct Reducer<'a> {
    cat: &'a Catalog,
    rs: &'a RewriteSystem,
    memo: HashMap<JetVar, Option<Expr>>,
    active: HashSet<JetVar>,
    steps: usize,
    budget: usize,
}

impl<'a> Reducer<'a> {
    pub fn new(cat: &'a Catalog, rs: &'a RewriteSystem, budget: usize) -> Self {
        Reducer {
            cat,
            rs,
            memo: HashMap::new(),
            active: HashSet::new(),
            steps: 0,
            budget,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn reduce(&mut self, e: &Expr) -> Result<Expr, JetError> {
        let mut map = HashMap::new();
        for v in e.vars() {
            if let Some(nf) = self.nf_var(v)? {
                map.insert(v, nf);
            }
        }
        if map.is_empty() {
            return Ok(self.cat.normalize(e));
        }
        Ok(substitute_jets(self.cat, e, &map))
    }

    /// Normal form of a single jet variable, `None` when irreducible.
    fn nf_var(&mut self, v: JetVar) -> Result<Option<Expr>, JetError> {
        if let Some(r) = self.memo.get(&v) {
            return Ok(r.clone());
        }
        let result = if let Some(i) = self.rs.exact(&v) {
            self.tick(v)?;
            let rhs = self.rs.rules[i].rhs.clone();
            let r = self.reduce(&rhs)?;
            self.active.remove(&v);
            Some(r)
        } else if let Some(i) = self.rs.dividing(&v) {
            self.tick(v)?;
            let lhs = self.rs.rules[i].lhs;
            let slot = (0..MAX_DEPS)
                .rev()
                .find(|&k| v.orders[k] > lhs.orders[k])
                .expect("proper derivative");
            let mut prev = v;
            prev.orders[slot] -= 1;
            let var = self.cat.symbol(v.field).deps[slot];
            let base = match self.nf_var(prev)? {
                Some(e) => e,
                None => Expr::var(prev),
            };
            let d = self.cat.d(&base, var);
            let r = self.reduce(&d)?;
            self.active.remove(&v);
            Some(r)
        } else {
            None
        };
        self.memo.insert(v, result.clone());
        Ok(result)
    }

    fn tick(&mut self, v: JetVar) -> Result<(), JetError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(JetError::BudgetExhausted(self.budget));
        }
        if !self.active.insert(v) {
            return Err(JetError::Unorientable {
                lhs: self.cat.jet_name(&v),
                offender: "cyclic reduction".into(),
            });
        }
        Ok(())
    }
}

/// Reduces `e` modulo `rs` and all prolongations of its rules.
pub fn reduce_modulo(cat: &Catalog, e: &Expr, rs: &RewriteSystem, max_steps: usize) -> Result<Expr, JetError> {
    Reducer::new(cat, rs, max_steps).reduce(e)
}

/// Replaces jet variables by expressions in one pass, then normalizes.
pub fn substitute_jets(cat: &Catalog, e: &Expr, map: &HashMap<JetVar, Expr>) -> Expr {
    let mut sub = Substituter::new(map);
    let n = sub.poly(e.num());
    if e.den().is_one() {
        return cat.normalize(&n);
    }
    let d = sub.poly(e.den());
    cat.normalize(&(&n / &d))
}

struct Substituter<'m> {
    map: &'m HashMap<JetVar, Expr>,
    powers: HashMap<(JetVar, u32), Expr>,
}

impl<'m> Substituter<'m> {
    fn new(map: &'m HashMap<JetVar, Expr>) -> Self {
        Substituter {
            map,
            powers: HashMap::new(),
        }
    }

    fn power(&mut self, v: JetVar, e: u32) -> Expr {
        if let Some(p) = self.powers.get(&(v, e)) {
            return p.clone();
        }
        let p = if e == 1 {
            self.map[&v].clone()
        } else {
            let half = self.power(v, e / 2);
            let sq = &half * &half;
            if e % 2 == 1 {
                &sq * &self.map[&v]
            } else {
                sq
            }
        };
        self.powers.insert((v, e), p.clone());
        p
    }

    fn poly(&mut self, p: &Poly) -> Expr {
        let all_monomial_dens = p.terms().iter().all(|(m, _)| {
            m.pairs().iter().all(|(v, _)| match self.map.get(v) {
                Some(r) => r.den().is_monomial(),
                None => true,
            })
        });
        if all_monomial_dens {
            return self.poly_monomial_dens(p);
        }
        let mut parts: Vec<Expr> = Vec::with_capacity(p.len());
        for (m, c) in p.terms() {
            let mut keep = Vec::new();
            let mut t = Expr::one();
            for &(v, e) in m.pairs() {
                if self.map.contains_key(&v) {
                    t = &t * &self.power(v, e);
                } else {
                    keep.push((v, e));
                }
            }
            let t = &t * &Expr::monomial(Monomial::from_pairs(keep), c.clone());
            parts.push(t);
        }
        sum_balanced(parts)
    }

    /// Fast path: every replacement has a monomial denominator, so the
    /// common denominator is a monomial lcm.
    fn poly_monomial_dens(&mut self, p: &Poly) -> Expr {
        let mut items: Vec<(Poly, Monomial)> = Vec::with_capacity(p.len());
        let mut lcm = Monomial::one();
        for (m, c) in p.terms() {
            let mut keep = Vec::new();
            let mut num = Poly::constant(c.clone());
            let mut den = Monomial::one();
            for &(v, e) in m.pairs() {
                if self.map.contains_key(&v) {
                    let r = self.power(v, e);
                    num = &num * r.num();
                    let (dm, dc) = r.den().lead().cloned().expect("nonzero denominator");
                    num = num.scale(&(Q::one() / dc));
                    den = den.mul(&dm);
                } else {
                    keep.push((v, e));
                }
            }
            let num = num.mul_monomial(&Monomial::from_pairs(keep));
            lcm = monomial_lcm(&lcm, &den);
            items.push((num, den));
        }
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (num, den) in items {
            let f = lcm.div(&den).expect("lcm divisible");
            for (m, c) in num.terms() {
                let mm = m.mul(&f);
                match acc.get_mut(&mm) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(mm, c.clone());
                    }
                }
            }
        }
        let num = Poly::from_terms(acc.into_iter().filter(|(_, c)| !c.is_zero()));
        Expr::new(num, Poly::term(lcm, Q::one()))
    }
}

fn monomial_lcm(a: &Monomial, b: &Monomial) -> Monomial {
    let g = a.gcd(b);
    a.mul(b).div(&g).expect("gcd divides")
}

/// Sums with a balanced tree to keep intermediate denominators small.
pub fn sum_balanced(mut parts: Vec<Expr>) -> Expr {
    if parts.is_empty() {
        return Expr::zero();
    }
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len() / 2 + 1);
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(&a + &b),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop().unwrap()
}
