//! Sparse multivariate polynomials over ℚ in jet variables.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::var::JetVar;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn q_frac(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Power product of jet variables, sorted ascending by variable, exponents > 0.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial(SmallVec<[(JetVar, u32); 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: JetVar, e: u32) -> Self {
        if e == 0 {
            return Monomial::one();
        }
        let mut s = SmallVec::new();
        s.push((v, e));
        Monomial(s)
    }

    pub fn from_pairs(mut pairs: Vec<(JetVar, u32)>) -> Self {
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: SmallVec<[(JetVar, u32); 4]> = SmallVec::new();
        for (v, e) in pairs {
            if e == 0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pairs(&self) -> &[(JetVar, u32)] {
        &self.0
    }

    pub fn degree_in(&self, v: &JetVar) -> u32 {
        self.0
            .binary_search_by(|p| p.0.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|p| p.1).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in self.0.iter() {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                if f > e {
                    return None;
                }
                if e > f {
                    out.push((v, e - f));
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Componentwise minimum of exponents.
    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1.min(b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial(out)
    }

    pub fn without(&self, v: &JetVar) -> Monomial {
        Monomial(self.0.iter().copied().filter(|p| &p.0 != v).collect())
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|&(v, e)| (v, e * k)).collect())
    }
}

/// Lexicographic order where the largest jet variable is most significant.
pub fn mono_cmp(a: &Monomial, b: &Monomial) -> Ordering {
    let (a, b) = (&a.0, &b.0);
    let (mut i, mut j) = (a.len(), b.len());
    loop {
        match (i, j) {
            (0, 0) => return Ordering::Equal,
            (0, _) => return Ordering::Less,
            (_, 0) => return Ordering::Greater,
            _ => {}
        }
        let (va, ea) = a[i - 1];
        let (vb, eb) = b[j - 1];
        match va.cmp(&vb) {
            Ordering::Greater => return Ordering::Greater,
            Ordering::Less => return Ordering::Less,
            Ordering::Equal => match ea.cmp(&eb) {
                Ordering::Equal => {
                    i -= 1;
                    j -= 1;
                }
                o => return o,
            },
        }
    }
}

/// Polynomial with terms sorted descending under [`mono_cmp`] and nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    terms: Vec<(Monomial, Q)>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn var(v: JetVar) -> Self {
        Poly {
            terms: vec![(Monomial::var(v, 1), Q::one())],
        }
    }

    pub fn term(m: Monomial, c: Q) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    /// Builds a polynomial from arbitrary (possibly repeated) terms.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Q)>) -> Self {
        let mut acc: HashMap<Monomial, Q> = HashMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(x) => *x += c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| mono_cmp(&b.0, &a.0));
        Poly { terms }
    }

    /// Caller guarantees descending order and nonzero coefficients.
    fn from_sorted(terms: Vec<(Monomial, Q)>) -> Self {
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Q)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 if self.terms[0].0.is_one() => Some(self.terms[0].1.clone()),
            _ => None,
        }
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn lead(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn lead_coeff(&self) -> Q {
        self.terms.first().map(|t| t.1.clone()).unwrap_or_else(Q::zero)
    }

    pub fn vars(&self) -> BTreeSet<JetVar> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in m.pairs() {
                s.insert(*v);
            }
        }
        s
    }

    pub fn contains_var(&self, v: &JetVar) -> bool {
        self.terms.iter().any(|(m, _)| m.degree_in(v) > 0)
    }

    pub fn degree_in(&self, v: &JetVar) -> u32 {
        self.terms.iter().map(|(m, _)| m.degree_in(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.iter().map(|(m, _)| m.total_degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_sorted(self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect())
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> Poly {
        if mono.is_one() {
            return self.clone();
        }
        // multiplication by a monomial preserves a monomial order
        Poly::from_sorted(self.terms.iter().map(|(m, k)| (m.mul(mono), k.clone())).collect())
    }

    pub fn mul_term(&self, mono: &Monomial, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly::from_sorted(self.terms.iter().map(|(m, k)| (m.mul(mono), k * c)).collect())
    }

    fn merge(&self, other: &Poly, sign: bool) -> Poly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match mono_cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let c = if sign { -b[j].1.clone() } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if sign { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if sign { -t.1.clone() } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Poly::from_sorted(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        if k == 0 {
            return Poly::one();
        }
        if self.is_monomial() {
            let (m, c) = &self.terms[0];
            return Poly::term(m.pow(k), num_traits::pow(c.clone(), k as usize));
        }
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Coefficients with respect to `v`: `self = Σ c[k] v^k`.
    pub fn coeffs_in(&self, v: &JetVar) -> Vec<Poly> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Q)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let k = m.degree_in(v) as usize;
            buckets[k].push((m.without(v), c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut t| {
                // removing a variable can reorder terms
                t.sort_by(|a, b| mono_cmp(&b.0, &a.0));
                Poly::from_sorted(t)
            })
            .collect()
    }

    pub fn from_coeffs_in(v: &JetVar, coeffs: &[Poly]) -> Poly {
        let mut terms = Vec::new();
        for (k, c) in coeffs.iter().enumerate() {
            let mv = Monomial::var(*v, k as u32);
            for (m, q) in c.terms() {
                terms.push((m.mul(&mv), q.clone()));
            }
        }
        Poly::from_terms(terms)
    }

    /// Partial derivative with respect to the indeterminate `v`.
    pub fn partial(&self, v: &JetVar) -> Poly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.degree_in(v);
            if e == 0 {
                continue;
            }
            let rest = m.without(v).mul(&Monomial::var(*v, e - 1));
            terms.push((rest, c * q(e as i64)));
        }
        Poly::from_terms(terms)
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if let Some(c) = d.constant_value() {
            return Some(self.scale(&(Q::one() / c)));
        }
        if d.is_monomial() {
            let (dm, dc) = &d.terms[0];
            let inv = Q::one() / dc;
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                out.push((m.div(dm)?, c * &inv));
            }
            return Some(Poly::from_sorted(out));
        }
        let (dm, dc) = d.terms[0].clone();
        let inv = Q::one() / dc;
        let mut r = self.clone();
        let mut quot = Vec::new();
        while let Some((lm, lc)) = r.terms.first().cloned() {
            let m = lm.div(&dm)?;
            let c = lc * &inv;
            r = r.merge(&d.mul_term(&m, &c), true);
            quot.push((m, c));
        }
        Some(Poly::from_sorted(quot))
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some(first) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.0.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn div_monomial(&self, mono: &Monomial) -> Poly {
        if mono.is_one() {
            return self.clone();
        }
        Poly::from_sorted(
            self.terms
                .iter()
                .map(|(m, c)| (m.div(mono).expect("monomial divides"), c.clone()))
                .collect(),
        )
    }

    pub fn map_coeffs(&self, f: impl Fn(&Q) -> Q) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Evaluation of a subset of variables, others kept symbolic.
    pub fn eval_partial(&self, vals: &HashMap<JetVar, Q>) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in m.pairs() {
                match vals.get(&v) {
                    Some(x) => coeff *= num_traits::pow(x.clone(), e as usize),
                    None => rest.push((v, e)),
                }
            }
            (Monomial::from_pairs(rest), coeff)
        }))
    }

    pub fn eval_f64(&self, val: &mut impl FnMut(JetVar) -> f64) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.terms {
            let mut t = c.to_f64().unwrap_or(f64::NAN);
            for &(v, e) in m.pairs() {
                t *= val(v).powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Multiplies through by the lcm of the coefficient denominators and
    /// divides by the gcd of the numerators, with positive leading coefficient.
    pub fn primitive_integer(&self) -> Poly {
        use num_integer::Integer;
        if self.is_zero() {
            return Poly::zero();
        }
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            l = l.lcm(c.denom());
        }
        let mut g = BigInt::zero();
        for (_, c) in &self.terms {
            let n = c.numer() * (&l / c.denom());
            g = g.gcd(&n);
        }
        let mut factor = BigRational::new(l, g);
        if self.terms[0].1.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let lc = self.terms[0].1.clone();
        if lc.is_one() {
            return self.clone();
        }
        self.scale(&(Q::one() / lc))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.merge(rhs, false)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.merge(rhs, true)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_sorted(self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        if rhs.is_monomial() {
            let (m, c) = &rhs.terms[0];
            return self.mul_term(m, c);
        }
        if self.is_monomial() {
            let (m, c) = &self.terms[0];
            return rhs.mul_term(m, c);
        }
        let mut acc: HashMap<Monomial, Q> = HashMap::with_capacity(self.len() * rhs.len());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                let m = ma.mul(mb);
                let c = ca * cb;
                match acc.get_mut(&m) {
                    Some(x) => *x += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let mut terms: Vec<(Monomial, Q)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| mono_cmp(&b.0, &a.0));
        Poly::from_sorted(terms)
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::var::FieldId;

    fn v(i: u16) -> JetVar {
        JetVar::base(FieldId(i))
    }

    #[test]
    fn exact_division_and_failure() {
        let a = &Poly::var(v(0)) + &Poly::var(v(1));
        let b = &Poly::var(v(0)) - &Poly::var(v(2));
        let p = &a * &b;
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!(p.div_exact(&b), Some(a.clone()));
        let c = &Poly::var(v(1)) + &Poly::one();
        assert_eq!(p.div_exact(&c), None);
    }

    #[test]
    fn coefficient_split_round_trips() {
        let x = Poly::var(v(0));
        let y = Poly::var(v(1));
        let p = &(&x.pow(3) * &y) + &(&x * &y.pow(2)) - Poly::constant(q(7));
        let cs = p.coeffs_in(&v(0));
        assert_eq!(cs.len(), 4);
        assert_eq!(Poly::from_coeffs_in(&v(0), &cs), p);
    }

    #[test]
    fn monomial_order_is_multiplicative() {
        let a = Monomial::from_pairs(vec![(v(1), 2)]);
        let b = Monomial::from_pairs(vec![(v(0), 5)]);
        assert_eq!(mono_cmp(&a, &b), Ordering::Greater);
        let c = Monomial::from_pairs(vec![(v(0), 1), (v(2), 1)]);
        assert_eq!(mono_cmp(&a.mul(&c), &b.mul(&c)), Ordering::Greater);
    }
}
