//! Expression grammar, printer and the plain-text catalog format.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::catalog::{Catalog, SymbolKind};
use super::error::JetError;
use super::expr::Expr;
use super::poly::{Monomial, Poly, Q};
use super::var::JetVar;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(text: &'a str) -> Result<Vec<(Tok, usize)>, JetError> {
        let mut lx = Lexer {
            src: text.as_bytes(),
            pos: 0,
        };
        let mut out = Vec::new();
        while let Some(t) = lx.next()? {
            out.push(t);
        }
        Ok(out)
    }

    fn next(&mut self) -> Result<Option<(Tok, usize)>, JetError> {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos >= self.src.len() {
            return Ok(None);
        }
        let start = self.pos;
        let c = self.src[self.pos];
        if c.is_ascii_digit() {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return Ok(Some((Tok::Num(s.parse().unwrap()), start)));
        }
        if c.is_ascii_alphabetic() {
            self.pos += 1;
            self.alnum();
            if self.pos < self.src.len() && self.src[self.pos] == b'_' {
                self.pos += 1;
                let suffix = self.pos;
                self.alnum();
                if self.pos == suffix {
                    return Err(JetError::Syntax {
                        pos: self.pos,
                        msg: "expected derivative variables after `_`".into(),
                    });
                }
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            return Ok(Some((Tok::Ident(s.to_string()), start)));
        }
        if b"+-*/^()".contains(&c) {
            self.pos += 1;
            return Ok(Some((Tok::Op(c as char), start)));
        }
        Err(JetError::Syntax {
            pos: start,
            msg: format!("unexpected character `{}`", c as char),
        })
    }

    fn alnum(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
    }
}

struct Parser<'c> {
    cat: &'c Catalog,
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
}

impl<'c> Parser<'c> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|t| &t.0)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map(|t| t.1).unwrap_or(self.end)
    }

    fn err<T>(&self, msg: &str) -> Result<T, JetError> {
        Err(JetError::Syntax {
            pos: self.pos(),
            msg: msg.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, JetError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = &acc + &self.term()?;
            } else if self.eat('-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, JetError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.unary()?;
            } else if self.peek() == Some(&Tok::Op('/')) {
                let at = self.pos();
                self.i += 1;
                let d = self.unary()?;
                let d = self.cat.normalize(&d);
                if d.is_zero() {
                    return Err(JetError::Syntax {
                        pos: at,
                        msg: "division by zero".into(),
                    });
                }
                acc = &acc / &d;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, JetError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, JetError> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let paren = self.eat('(');
        let neg = self.eat('-');
        let k = match self.peek() {
            Some(Tok::Num(n)) => {
                let n: i32 = n
                    .try_into()
                    .map_err(|_| JetError::Syntax {
                        pos: self.pos(),
                        msg: "exponent too large".into(),
                    })?;
                self.i += 1;
                if neg {
                    -n
                } else {
                    n
                }
            }
            _ => return self.err("expected integer exponent"),
        };
        if paren && !self.eat(')') {
            return self.err("expected `)`");
        }
        if k < 0 && self.cat.normalize(&base).is_zero() {
            return self.err("negative power of zero");
        }
        Ok(base.pow(k))
    }

    fn atom(&mut self) -> Result<Expr, JetError> {
        let at = self.pos();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.i += 1;
                Ok(Expr::constant(Q::from_integer(n)))
            }
            Some(Tok::Ident(name)) => {
                self.i += 1;
                let jv = resolve_jet(self.cat, &name).map_err(|e| match e {
                    JetError::Syntax { pos, msg } => JetError::Syntax { pos: pos + at, msg },
                    other => other,
                })?;
                Ok(Expr::var(jv))
            }
            Some(Tok::Op('(')) => {
                self.i += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected `)`");
                }
                Ok(e)
            }
            Some(Tok::Op(c)) => self.err(&format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Splits `Name_suffix` and matches the suffix greedily against the field's variables.
fn resolve_jet(cat: &Catalog, ident: &str) -> Result<JetVar, JetError> {
    let (name, suffix) = match ident.find('_') {
        Some(k) => (&ident[..k], Some(&ident[k + 1..])),
        None => (ident, None),
    };
    let f = cat
        .field_id(name)
        .ok_or_else(|| JetError::Undeclared(name.to_string()))?;
    let mut jv = JetVar::base(f);
    let Some(mut rest) = suffix else {
        return Ok(jv);
    };
    let sym = cat.symbol(f);
    if sym.kind != SymbolKind::Field {
        return Err(JetError::BadDerivative {
            field: name.to_string(),
            var: rest.to_string(),
        });
    }
    while !rest.is_empty() {
        let best = sym
            .deps
            .iter()
            .enumerate()
            .filter(|(_, v)| rest.starts_with(cat.var_name(**v)))
            .max_by_key(|(_, v)| cat.var_name(**v).len());
        match best {
            Some((k, v)) => {
                if jv.orders[k] == u8::MAX {
                    return Err(JetError::Catalog("derivative order overflow".into()));
                }
                jv.orders[k] += 1;
                rest = &rest[cat.var_name(*v).len()..];
            }
            None => {
                let var = cat
                    .vars()
                    .iter()
                    .filter(|v| rest.starts_with(v.as_str()))
                    .max_by_key(|v| v.len())
                    .cloned()
                    .unwrap_or_else(|| rest.to_string());
                return Err(JetError::BadDerivative {
                    field: name.to_string(),
                    var,
                });
            }
        }
    }
    Ok(jv)
}

pub(crate) fn parse_jet(cat: &Catalog, text: &str) -> Result<JetVar, JetError> {
    let t = text.trim();
    let toks = Lexer::tokens(t)?;
    match toks.as_slice() {
        [(Tok::Ident(s), _)] => resolve_jet(cat, s),
        _ => Err(JetError::Syntax {
            pos: 0,
            msg: format!("`{t}` is not a jet variable"),
        }),
    }
}

pub(crate) fn parse_expr(cat: &Catalog, text: &str) -> Result<Expr, JetError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser {
        cat,
        toks,
        i: 0,
        end: text.len(),
    };
    let e = p.expr()?;
    if p.i < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(cat.normalize(&e))
}

pub(crate) fn jet_name(cat: &Catalog, jv: &JetVar) -> String {
    let sym = cat.symbol(jv.field);
    let mut s = sym.name.clone();
    if jv.is_base() {
        return s;
    }
    s.push('_');
    for (k, v) in sym.deps.iter().enumerate() {
        for _ in 0..jv.orders[k] {
            s.push_str(cat.var_name(*v));
        }
    }
    s
}

fn print_monomial(cat: &Catalog, m: &Monomial) -> String {
    m.pairs()
        .iter()
        .map(|(v, e)| {
            if *e == 1 {
                jet_name(cat, v)
            } else {
                format!("{}^{}", jet_name(cat, v), e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

fn print_q(c: &Q) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn print_poly(cat: &Catalog, p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (m, c)) in p.terms().iter().enumerate() {
        let neg = c.is_negative();
        let a = c.abs();
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if m.is_one() {
            out.push_str(&print_q(&a));
        } else if a.is_one() {
            out.push_str(&print_monomial(cat, m));
        } else {
            out.push_str(&print_q(&a));
            out.push('*');
            out.push_str(&print_monomial(cat, m));
        }
    }
    out
}

pub(crate) fn print_expr(cat: &Catalog, e: &Expr) -> String {
    let n = print_poly(cat, e.num());
    if e.den().is_one() {
        return n;
    }
    let d = print_poly(cat, e.den());
    let n = if e.num().len() > 1 || n.starts_with('-') {
        format!("({n})")
    } else {
        n
    };
    let d = if e.den().len() > 1 || !e.den().is_monomial() || d.contains('*') || d.contains('/') {
        format!("({d})")
    } else {
        d
    };
    format!("{n}/{d}")
}

/// Reads a catalog from the plain-text format:
///
/// ```text
/// var X Y T
/// field U(X,Y,T)
/// const k1
/// ext s : s^2 = lam
/// nonzero P U lam
/// ```
pub fn parse_catalog(text: &str) -> Result<Catalog, JetError> {
    let mut cat = Catalog::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match kw {
            "var" => {
                for v in rest.split_whitespace() {
                    cat.add_var(v)?;
                }
            }
            "field" => {
                let (name, deps) = match rest.split_once('(') {
                    Some((n, d)) => (
                        n.trim(),
                        d.trim_end_matches(')')
                            .split(',')
                            .map(str::trim)
                            .filter(|s| !s.is_empty())
                            .collect::<Vec<_>>(),
                    ),
                    None => (rest, Vec::new()),
                };
                cat.add_field(name, &deps)?;
            }
            "const" => {
                for c in rest.split_whitespace() {
                    cat.add_const(c)?;
                }
            }
            "ext" => {
                let (name, rel) = rest
                    .split_once(':')
                    .ok_or_else(|| JetError::Catalog(format!("malformed ext line `{line}`")))?;
                let (_, rhs) = rel
                    .split_once('=')
                    .ok_or_else(|| JetError::Catalog(format!("malformed ext line `{line}`")))?;
                cat.add_ext(name.trim(), rhs.trim())?;
            }
            "nonzero" => {
                for j in rest.split_whitespace() {
                    cat.declare_nonzero(j)?;
                }
            }
            _ => return Err(JetError::Catalog(format!("unknown declaration `{kw}`"))),
        }
    }
    Ok(cat)
}

/// Inverse of [`parse_catalog`].
pub fn write_catalog(cat: &Catalog) -> String {
    let mut out = String::new();
    out.push_str("var");
    for v in cat.vars() {
        out.push(' ');
        out.push_str(v);
    }
    out.push('\n');
    for s in cat.symbols() {
        match &s.kind {
            SymbolKind::Field => {
                let deps: Vec<&str> = s.deps.iter().map(|v| cat.var_name(*v)).collect();
                out.push_str(&format!("field {}({})\n", s.name, deps.join(",")));
            }
            SymbolKind::Constant => out.push_str(&format!("const {}\n", s.name)),
            SymbolKind::Extension { square } => {
                out.push_str(&format!("ext {0} : {0}^2 = {1}\n", s.name, print_poly(cat, square)))
            }
        }
    }
    if !cat.nonzero_set().is_empty() {
        out.push_str("nonzero");
        for jv in cat.nonzero_set() {
            out.push(' ');
            out.push_str(&jet_name(cat, jv));
        }
        out.push('\n');
    }
    out
}
