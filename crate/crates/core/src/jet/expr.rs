//! Rational functions in jet variables.

use std::collections::{BTreeSet, HashMap};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::{Monomial, Poly, Q};
use super::var::JetVar;

/// A reduced fraction `num / den` with monic denominator.
///
/// Arithmetic here is purely polynomial; reduction of algebraic generators
/// (square roots, the imaginary unit) is done by the catalog.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Expr {
    num: Poly,
    den: Poly,
}

impl Default for Expr {
    fn default() -> Self {
        Expr::zero()
    }
}

impl Expr {
    pub fn zero() -> Self {
        Expr {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        Expr::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        Expr {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn int(n: i64) -> Self {
        Expr::constant(super::poly::q(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Expr::constant(super::poly::q_frac(n, d))
    }

    pub fn var(v: JetVar) -> Self {
        Expr::from_poly(Poly::var(v))
    }

    pub fn from_poly(p: Poly) -> Self {
        Expr {
            num: p,
            den: Poly::one(),
        }
    }

    /// Builds `num / den` in lowest terms. Panics when `den` is zero.
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "division by zero polynomial");
        if num.is_zero() {
            return Expr::zero();
        }
        if let Some(c) = den.constant_value() {
            return Expr {
                num: num.scale(&(Q::one() / c)),
                den: Poly::one(),
            };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_one() {
            (num, den)
        } else {
            (
                num.div_exact(&g).expect("gcd divides numerator"),
                den.div_exact(&g).expect("gcd divides denominator"),
            )
        };
        Expr::from_coprime(num, den)
    }

    /// Normalizes the leading coefficient of a fraction already in lowest terms.
    pub fn from_coprime(num: Poly, den: Poly) -> Self {
        let lc = den.lead_coeff();
        if lc.is_one() {
            Expr { num, den }
        } else {
            let inv = Q::one() / lc;
            Expr {
                num: num.scale(&inv),
                den: den.scale(&inv),
            }
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn into_parts(self) -> (Poly, Poly) {
        (self.num, self.den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.den.is_one() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        let mut s = self.num.vars();
        s.extend(self.den.vars());
        s
    }

    pub fn contains_var(&self, v: &JetVar) -> bool {
        self.num.contains_var(v) || self.den.contains_var(v)
    }

    pub fn scale(&self, c: &Q) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            num: self.num.scale(c),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Expr {
        assert!(!self.is_zero(), "inverse of zero");
        Expr::from_coprime(self.den.clone(), self.num.clone())
    }

    pub fn pow(&self, k: i32) -> Expr {
        if k < 0 {
            return self.inv().pow(-k);
        }
        let k = k as u32;
        Expr {
            num: self.num.pow(k),
            den: self.den.pow(k),
        }
    }

    /// Partial derivative with respect to the indeterminate `v`.
    pub fn partial(&self, v: &JetVar) -> Expr {
        let dn = self.num.partial(v);
        if self.den.is_one() {
            return Expr::from_poly(dn);
        }
        let dd = self.den.partial(v);
        if dd.is_zero() {
            return Expr::new(dn, self.den.clone());
        }
        let top = &(&dn * &self.den) - &(&self.num * &dd);
        Expr::new(top, self.den.pow(2))
    }

    pub fn eval_f64(&self, mut val: impl FnMut(JetVar) -> f64) -> f64 {
        self.num.eval_f64(&mut val) / self.den.eval_f64(&mut val)
    }

    /// Exact value at a point; `None` when the denominator vanishes.
    pub fn eval_rational(&self, vals: &HashMap<JetVar, Q>) -> Option<Q> {
        let n = self.num.eval_partial(vals).constant_value()?;
        let d = self.den.eval_partial(vals).constant_value()?;
        if d.is_zero() {
            None
        } else {
            Some(n / d)
        }
    }

    pub fn checked_div(&self, rhs: &Expr) -> Option<Expr> {
        if rhs.is_zero() {
            None
        } else {
            Some(self * &rhs.inv())
        }
    }

    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Expr>) -> Expr {
        let mut acc = Expr::zero();
        for e in items {
            acc = &acc + e;
        }
        acc
    }

    /// Splits the numerator by powers of the monomial variable `v`
    /// (common denominator kept).
    pub fn coeffs_in(&self, v: &JetVar) -> Vec<Expr> {
        self.num
            .coeffs_in(v)
            .into_iter()
            .map(|c| Expr::new(c, self.den.clone()))
            .collect()
    }

    pub fn monomial(m: Monomial, c: Q) -> Expr {
        Expr::from_poly(Poly::term(m, c))
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            let num = &self.num + &rhs.num;
            if self.den.is_one() {
                return Expr::from_poly(num);
            }
            return Expr::new(num, self.den.clone());
        }
        if self.den.is_one() {
            let num = &(&self.num * &rhs.den) + &rhs.num;
            return Expr::from_coprime(num, rhs.den.clone());
        }
        if rhs.den.is_one() {
            let num = &self.num + &(&rhs.num * &self.den);
            return Expr::from_coprime(num, self.den.clone());
        }
        let g = gcd(&self.den, &rhs.den);
        if g.is_one() {
            let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
            return Expr::from_coprime(num, &self.den * &rhs.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = rhs.den.div_exact(&g).expect("gcd divides");
        let num = &(&self.num * &d1) + &(&rhs.num * &b1);
        if num.is_zero() {
            return Expr::zero();
        }
        let h = gcd(&num, &g);
        let (num, g) = if h.is_one() {
            (num, g)
        } else {
            (num.div_exact(&h).unwrap(), g.div_exact(&h).unwrap())
        };
        Expr::from_coprime(num, &(&b1 * &d1) * &g)
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        self + &(-rhs)
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        if self.is_zero() || rhs.is_zero() {
            return Expr::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return Expr::from_poly(&self.num * &rhs.num);
        }
        let g1 = gcd(&self.num, &rhs.den);
        let g2 = gcd(&rhs.num, &self.den);
        let a = self.num.div_exact(&g1).unwrap();
        let d = rhs.den.div_exact(&g1).unwrap();
        let c = rhs.num.div_exact(&g2).unwrap();
        let b = self.den.div_exact(&g2).unwrap();
        Expr::from_coprime(&a * &c, &b * &d)
    }
}

impl Div for &Expr {
    type Output = Expr;
    fn div(self, rhs: &Expr) -> Expr {
        self * &rhs.inv()
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for Expr {
            type Output = Expr;
            fn $m(self, rhs: Expr) -> Expr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Expr> for Expr {
            type Output = Expr;
            fn $m(self, rhs: &Expr) -> Expr {
                (&self).$m(rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -&self
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Self {
        Expr::from_poly(p)
    }
}

impl From<i64> for Expr {
    fn from(n: i64) -> Self {
        Expr::int(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::var::FieldId;

    fn x(i: u16) -> Expr {
        Expr::var(JetVar::base(FieldId(i)))
    }

    #[test]
    fn fractions_cancel() {
        let a = &x(0) / &(&x(0) + &x(1));
        let b = &x(1) / &(&x(0) + &x(1));
        assert!((&a + &b).is_one());
        let c = &(&x(0) * &x(0) - &x(1) * &x(1)) / &(&x(0) - &x(1));
        assert_eq!(c, &x(0) + &x(1));
    }

    #[test]
    fn quotient_rule() {
        let v0 = JetVar::base(FieldId(0));
        let e = &Expr::one() / &x(0);
        assert_eq!(e.partial(&v0), -(&Expr::one() / &(&x(0) * &x(0))));
    }
}
