//! Multivariate polynomial gcd over ℚ.
//!
//! Results are monic under the lex monomial order. Cheap structural cases are
//! handled first; a modular coprimality test catches the common case of
//! coprime inputs, and a primitive pseudo-remainder sequence handles the rest.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::{Poly, Q};
use super::var::JetVar;

const PRIME: u64 = 2_147_483_647;

pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a = a.div_monomial(&ma);
    let b = b.div_monomial(&mb);
    let core = gcd_no_monomial(&a, &b);
    core.mul_monomial(&mg).monic()
}

/// Gcd of inputs that have no monomial content.
fn gcd_no_monomial(a: &Poly, b: &Poly) -> Poly {
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.monic();
    }
    let va = a.vars();
    let vb = b.vars();
    // A variable that only one side carries must cancel from the gcd, so the
    // gcd divides every coefficient in that variable.
    if let Some(v) = va.difference(&vb).next() {
        return gcd_with_coeffs(a, v, b);
    }
    if let Some(v) = vb.difference(&va).next() {
        return gcd_with_coeffs(b, v, a);
    }
    let x = choose_main_var(a, b, &va);
    if coprime_mod_p(a, b, &x, &va) {
        let ca = content_in(a, &x);
        let cb = content_in(b, &x);
        return gcd(&ca, &cb);
    }
    prs_gcd(a, b, &x)
}

fn gcd_with_coeffs(p: &Poly, v: &JetVar, other: &Poly) -> Poly {
    let mut g = other.monic();
    let mut cs = p.coeffs_in(v);
    cs.retain(|c| !c.is_zero());
    cs.sort_by_key(|c| c.len());
    for c in cs {
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn choose_main_var(a: &Poly, b: &Poly, vars: &BTreeSet<JetVar>) -> JetVar {
    *vars
        .iter()
        .min_by_key(|v| (a.degree_in(v).max(b.degree_in(v)), a.degree_in(v) + b.degree_in(v)))
        .expect("non-constant polynomial has a variable")
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
pub fn content_in(p: &Poly, x: &JetVar) -> Poly {
    let mut cs: Vec<Poly> = p.coeffs_in(x).into_iter().filter(|c| !c.is_zero()).collect();
    cs.sort_by_key(|c| c.len());
    let mut g = Poly::zero();
    for c in cs {
        g = gcd(&g, &c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part(p: &Poly, x: &JetVar) -> (Poly, Poly) {
    let c = content_in(p, x);
    let pp = p.div_exact(&c).expect("content divides");
    (c, pp)
}

fn prs_gcd(a: &Poly, b: &Poly, x: &JetVar) -> Poly {
    let (ca, mut pa) = primitive_part(a, x);
    let (cb, mut pb) = primitive_part(b, x);
    let c = gcd(&ca, &cb);
    if pa.degree_in(x) < pb.degree_in(x) {
        std::mem::swap(&mut pa, &mut pb);
    }
    loop {
        let r = pseudo_rem(&pa, &pb, x);
        if r.is_zero() {
            return (&c * &pb).monic();
        }
        if r.degree_in(x) == 0 {
            return c.monic();
        }
        pa = pb;
        pb = primitive_part(&r, x).1.primitive_integer();
    }
}

/// Pseudo-remainder of `a` by `b` in `x`.
pub fn pseudo_rem(a: &Poly, b: &Poly, x: &JetVar) -> Poly {
    let mut r: Vec<Poly> = a.coeffs_in(x);
    let bc: Vec<Poly> = b.coeffs_in(x);
    let db = bc.len() - 1;
    let lb = bc[db].clone();
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        if lr.is_zero() {
            r.pop();
            continue;
        }
        let shift = dr - db;
        for c in r.iter_mut() {
            *c = &*c * &lb;
        }
        for (k, bk) in bc.iter().enumerate() {
            let t = bk * &lr;
            r[k + shift] = &r[k + shift] - &t;
        }
        debug_assert!(r[dr].is_zero());
        r.pop();
        while matches!(r.last(), Some(c) if c.is_zero()) {
            r.pop();
        }
    }
    Poly::from_coeffs_in(x, &r)
}

fn q_mod_p(c: &Q) -> Option<u64> {
    let p = num_bigint::BigInt::from(PRIME);
    let n = c.numer().mod_floor(&p).to_u64()?;
    let d = c.denom().mod_floor(&p).to_u64()?;
    if d == 0 {
        return None;
    }
    Some(mulm(n, inv_mod(d)))
}

fn mulm(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulm(r, b);
        }
        b = mulm(b, b);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

/// Image of `p` in 𝔽ₚ[x] after substituting `point` for the other variables.
fn univariate_image(p: &Poly, x: &JetVar, point: &dyn Fn(&JetVar) -> u64) -> Option<Vec<u64>> {
    let deg = p.degree_in(x) as usize;
    let mut out = vec![0u64; deg + 1];
    for (m, c) in p.terms() {
        let mut t = q_mod_p(c)?;
        let mut k = 0usize;
        for &(v, e) in m.pairs() {
            if &v == x {
                k = e as usize;
            } else {
                t = mulm(t, pow_mod(point(&v), e as u64));
            }
        }
        out[k] = (out[k] + t) % PRIME;
    }
    Some(out)
}

fn trim(p: &mut Vec<u64>) {
    while matches!(p.last(), Some(0)) {
        p.pop();
    }
}

fn uni_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a mod b
        let lb_inv = inv_mod(*b.last().unwrap());
        while a.len() >= b.len() {
            let la = *a.last().unwrap();
            let f = mulm(la, lb_inv);
            let shift = a.len() - b.len();
            for (k, &bk) in b.iter().enumerate() {
                let s = mulm(f, bk);
                a[k + shift] = (a[k + shift] + PRIME - s) % PRIME;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True when `a` and `b` certainly have no common factor involving `x`.
fn coprime_mod_p(a: &Poly, b: &Poly, x: &JetVar, vars: &BTreeSet<JetVar>) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ (a.len() as u64) << 8 ^ b.len() as u64);
    let vals: Vec<(JetVar, u64)> = vars
        .iter()
        .filter(|v| *v != x)
        .map(|v| (*v, rng.gen_range(2..PRIME - 1)))
        .collect();
    let point = |v: &JetVar| {
        vals.iter()
            .find(|(w, _)| w == v)
            .map(|(_, c)| *c)
            .unwrap_or(0)
    };
    let (Some(ia), Some(ib)) = (univariate_image(a, x, &point), univariate_image(b, x, &point)) else {
        return false;
    };
    let da = a.degree_in(x) as usize;
    let db = b.degree_in(x) as usize;
    if ia.len() != da + 1 || ib.len() != db + 1 || ia[da] == 0 || ib[db] == 0 {
        return false;
    }
    uni_gcd_degree(ia, ib) == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::poly::q;
    use crate::jet::var::FieldId;

    fn v(i: u16) -> Poly {
        Poly::var(JetVar::base(FieldId(i)))
    }

    #[test]
    fn recovers_planted_factor() {
        let g = &(&v(0) * &v(1)) + &(&v(2) - &Poly::constant(q(3)));
        let a = &g * &(&v(0) + &v(2).pow(2));
        let b = &g * &(&v(1) - &v(0));
        assert_eq!(gcd(&a, &b), g.monic());
    }

    #[test]
    fn coprime_inputs() {
        let a = &v(0).pow(2) + &v(1);
        let b = &v(0) - &v(1);
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn monomial_content_is_kept() {
        let a = &(&v(0).pow(3) * &v(1)) + &v(0).pow(2);
        let b = &v(0).pow(4) * &v(2);
        assert_eq!(gcd(&a, &b), v(0).pow(2));
    }

    #[test]
    fn content_only_common_factor() {
        let c = &v(3) + &Poly::one();
        let a = &c * &(&v(0) + &v(1));
        let b = &c * &(&v(0) - &v(1));
        assert_eq!(gcd(&a, &b), c.monic());
    }
}
