//! Field dictionaries combined with chain-rule derivations.

use std::collections::HashMap;

use super::catalog::{Catalog, SymbolKind};
use super::error::JetError;
use super::expr::Expr;
use super::rewrite::{substitute_jets, Reducer, RewriteSystem};
use super::var::{JetVar, VarId};

/// Sends expressions over one catalog to expressions over another.
///
/// Each source field either has an explicit image or maps to the symbol of
/// the same name. Each source variable acts as a derivation
/// `Σ cₖ ∂/∂wₖ` on the target; unlisted variables act as the same-named
/// target variable. Images of derivatives are obtained by applying these
/// derivations to the image of the field.
#[derive(Clone, Debug, Default)]
pub struct ChainRuleMap {
    fields: HashMap<String, Expr>,
    jets: HashMap<String, Expr>,
    derivations: HashMap<String, Vec<(Expr, String)>>,
}

impl ChainRuleMap {
    pub fn new() -> Self {
        ChainRuleMap::default()
    }

    pub fn field(mut self, name: &str, image: Expr) -> Self {
        self.fields.insert(name.to_string(), image);
        self
    }

    pub fn set_field(&mut self, name: &str, image: Expr) {
        self.fields.insert(name.to_string(), image);
    }

    /// Explicit image of one source jet, by its printed name (e.g. `X_z0`).
    /// Jets above it are reached by applying derivations.
    pub fn jet(mut self, name: &str, image: Expr) -> Self {
        self.jets.insert(name.to_string(), image);
        self
    }

    /// Adds every entry of `other`; entries of `other` win on collision.
    pub fn merge(mut self, other: &ChainRuleMap) -> Self {
        self.fields.extend(other.fields.iter().map(|(k, v)| (k.clone(), v.clone())));
        self.jets.extend(other.jets.iter().map(|(k, v)| (k.clone(), v.clone())));
        self.derivations
            .extend(other.derivations.iter().map(|(k, v)| (k.clone(), v.clone())));
        self
    }

    /// `∂_src → Σ coeff·∂_dst`; an empty list sends the derivative to zero.
    pub fn derivation(mut self, src: &str, terms: Vec<(Expr, &str)>) -> Self {
        self.derivations.insert(
            src.to_string(),
            terms.into_iter().map(|(c, v)| (c, v.to_string())).collect(),
        );
        self
    }

    pub fn field_image(&self, name: &str) -> Option<&Expr> {
        self.fields.get(name)
    }

    pub fn derivation_of(&self, src: &str) -> Option<&[(Expr, String)]> {
        self.derivations.get(src).map(|v| v.as_slice())
    }

    pub fn apply(&self, src: &Catalog, dst: &Catalog, e: &Expr) -> Result<Expr, JetError> {
        self.applier(src, dst, None).apply(e)
    }

    /// Stateful applier; `rules` (over `dst`) are applied after every step.
    pub fn applier<'a>(
        &'a self,
        src: &'a Catalog,
        dst: &'a Catalog,
        rules: Option<&'a RewriteSystem>,
    ) -> MapApplier<'a> {
        MapApplier {
            map: self,
            src,
            dst,
            reducer: rules.map(|rs| Reducer::new(dst, rs, super::rewrite::DEFAULT_BUDGET)),
            memo: HashMap::new(),
        }
    }
}

pub struct MapApplier<'a> {
    map: &'a ChainRuleMap,
    src: &'a Catalog,
    dst: &'a Catalog,
    reducer: Option<Reducer<'a>>,
    memo: HashMap<JetVar, Expr>,
}

impl<'a> MapApplier<'a> {
    pub fn apply(&mut self, e: &Expr) -> Result<Expr, JetError> {
        let mut images = HashMap::new();
        for v in e.vars() {
            let img = self.image(v)?;
            images.insert(v, img);
        }
        let r = substitute_jets(self.dst, e, &images);
        self.finish(r)
    }

    pub fn steps(&self) -> usize {
        self.reducer.as_ref().map(|r| r.steps()).unwrap_or(0)
    }

    fn finish(&mut self, e: Expr) -> Result<Expr, JetError> {
        match &mut self.reducer {
            Some(r) => r.reduce(&e),
            None => Ok(e),
        }
    }

    fn image(&mut self, v: JetVar) -> Result<Expr, JetError> {
        if let Some(e) = self.memo.get(&v) {
            return Ok(e.clone());
        }
        let sym = self.src.symbol(v.field);
        let explicit = if self.map.jets.is_empty() {
            None
        } else {
            self.map.jets.get(&self.src.jet_name(&v)).cloned()
        };
        let img = if let Some(e) = explicit {
            self.dst.normalize(&e)
        } else if v.is_base() {
            match self.map.fields.get(&sym.name) {
                Some(e) => self.dst.normalize(e),
                None => {
                    let f = self
                        .dst
                        .field_id(&sym.name)
                        .ok_or_else(|| JetError::Undeclared(sym.name.clone()))?;
                    Expr::var(JetVar::base(f))
                }
            }
        } else {
            let slot = (0..v.orders.len())
                .rev()
                .find(|&k| v.orders[k] > 0)
                .unwrap();
            let mut prev = v;
            prev.orders[slot] -= 1;
            let base = self.image(prev)?;
            let var = sym.deps[slot];
            self.derive(&base, var)?
        };
        let img = if matches!(sym.kind, SymbolKind::Field) {
            self.finish(img)?
        } else {
            img
        };
        self.memo.insert(v, img.clone());
        Ok(img)
    }

    /// Applies the derivation attached to the source variable `var`.
    pub fn derive(&mut self, e: &Expr, var: VarId) -> Result<Expr, JetError> {
        let name = self.src.var_name(var);
        let terms: Vec<(Expr, VarId)> = match self.map.derivations.get(name) {
            Some(ts) => ts
                .iter()
                .map(|(c, w)| {
                    self.dst
                        .var_id(w)
                        .map(|id| (c.clone(), id))
                        .ok_or_else(|| JetError::Undeclared(w.clone()))
                })
                .collect::<Result<_, _>>()?,
            None => vec![(
                Expr::one(),
                self.dst
                    .var_id(name)
                    .ok_or_else(|| JetError::Undeclared(name.to_string()))?,
            )],
        };
        let mut acc = Expr::zero();
        for (c, w) in terms {
            let d = self.dst.d(e, w);
            if d.is_zero() {
                continue;
            }
            acc = &acc + &(&c * &d);
        }
        Ok(self.dst.normalize(&acc))
    }
}

/// Replaces undifferentiated fields (and through them all their derivatives)
/// inside a single catalog.
pub fn substitute(cat: &Catalog, e: &Expr, subs: &[(&str, Expr)]) -> Result<Expr, JetError> {
    let mut m = ChainRuleMap::new();
    for (name, img) in subs {
        if cat.field_id(name).is_none() {
            return Err(JetError::Undeclared(name.to_string()));
        }
        m.set_field(name, img.clone());
    }
    m.apply(cat, cat, e)
}

/// As [`substitute`], refusing fields that head a rule of `rs`.
pub fn substitute_checked(
    cat: &Catalog,
    e: &Expr,
    subs: &[(&str, Expr)],
    rs: &RewriteSystem,
) -> Result<Expr, JetError> {
    for (name, _) in subs {
        if let Some(f) = cat.field_id(name) {
            if rs.rules.iter().any(|r| r.lhs.field == f) {
                return Err(JetError::SubstitutionConflict(name.to_string()));
            }
        }
    }
    substitute(cat, e, subs)
}
