use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JetError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("undeclared symbol `{0}`")]
    Undeclared(String),
    #[error("`{field}` does not depend on `{var}`")]
    BadDerivative { field: String, var: String },
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("rule for `{lhs}` is not decreasing: rhs contains `{offender}`")]
    Unorientable { lhs: String, offender: String },
    #[error("cannot solve for `{lead}`: {reason}")]
    NotSolvable { lead: String, reason: String },
    #[error("step budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("substituted field `{0}` is also a rewrite-rule head")]
    SubstitutionConflict(String),
}
