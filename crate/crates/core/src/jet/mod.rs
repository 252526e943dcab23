//! Exact differential-rational kernel.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod gcd;
pub mod map;
pub mod parse;
pub mod poly;
pub mod rewrite;
pub mod var;

pub use catalog::{Catalog, Symbol, SymbolKind};
pub use error::JetError;
pub use expr::Expr;
pub use map::{substitute, substitute_checked, ChainRuleMap, MapApplier};
pub use parse::{parse_catalog, print_poly, write_catalog};
pub use poly::{q, q_frac, Monomial, Poly, Q};
pub use rewrite::{
    reduce_modulo, substitute_jets, RankKind, Ranking, Reducer, RewriteRule, RewriteSystem,
    DEFAULT_BUDGET,
};
pub use var::{FieldId, JetVar, VarId, MAX_DEPS};
