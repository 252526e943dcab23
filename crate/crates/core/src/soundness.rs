//! Randomized checks of the expression engine: Leibniz rule, commuting
//! derivatives, print/parse round trip, and the zero test against
//! evaluation at random rational points.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jet::{parse_catalog, Catalog, Expr, JetVar, Q};
use crate::report::{Metric, ResidualEntry, TaskReport};

pub fn soundness_catalog() -> Catalog {
    parse_catalog("var X Y T\nconst k\nfield P(X,Y,T)\nfield U(X,Y,T)\nfield V(X,Y)\nnonzero P U\n").expect("catalog")
}

const LEAVES: &[&str] = &["P", "U", "V", "k", "P_X", "P_Y", "U_T", "V_XY", "P_XX", "U_XY"];

fn leaf(c: &Catalog, rng: &mut impl Rng) -> Expr {
    if rng.gen_bool(0.2) {
        Expr::int(rng.gen_range(-3..=3))
    } else {
        c.j(LEAVES[rng.gen_range(0..LEAVES.len())])
    }
}

/// Random rational expression of bounded depth; divisors are never zero.
pub fn random_expr(c: &Catalog, rng: &mut impl Rng, depth: u32) -> Expr {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(c, rng);
    }
    let a = random_expr(c, rng, depth - 1);
    let b = random_expr(c, rng, depth - 1);
    match rng.gen_range(0..5) {
        0 => &a + &b,
        1 => &a - &b,
        2 | 3 => &a * &b,
        _ if !b.is_zero() => &a / &b,
        _ => &a * &b,
    }
}

/// An expression that is zero by construction but not syntactically.
pub fn random_zero(c: &Catalog, rng: &mut impl Rng, depth: u32) -> Expr {
    let a = random_expr(c, rng, depth);
    let b = random_expr(c, rng, depth);
    let sq = &(&a + &b) * &(&a + &b);
    let expanded = &(&(&a * &a) + &(&(&a * &b) * &Expr::int(2))) + &(&b * &b);
    &sq - &expanded
}

/// `D(ab) - D(a)b - aD(b)` over every independent variable.
pub fn leibniz_defect(c: &Catalog, a: &Expr, b: &Expr) -> Expr {
    let mut acc = Expr::zero();
    for v in ["X", "Y", "T"] {
        let lhs = c.dn(&(a * b), v);
        let rhs = &(&c.dn(a, v) * b) + &(a * &c.dn(b, v));
        acc = &acc + &(&lhs - &rhs);
    }
    acc
}

/// `D_X D_Y a - D_Y D_X a` plus the same for `(X,T)`.
pub fn commutator_defect(c: &Catalog, a: &Expr) -> Expr {
    let xy = &c.dd(a, &["X", "Y"]) - &c.dd(a, &["Y", "X"]);
    let xt = &c.dd(a, &["X", "T"]) - &c.dd(a, &["T", "X"]);
    &xy + &xt
}

pub fn round_trips(c: &Catalog, a: &Expr) -> bool {
    c.parse(&c.print(a)).map(|b| &b - a).is_ok_and(|d| d.is_zero())
}

/// Whether `e` vanishes at `points` random rational points (points that hit
/// a pole are redrawn, up to a limit).
pub fn numerically_zero(e: &Expr, rng: &mut impl Rng, points: usize) -> bool {
    let vars: Vec<JetVar> = e.vars().into_iter().collect();
    let mut seen = 0;
    let mut tries = 0;
    while seen < points && tries < 10 * points {
        tries += 1;
        let vals: HashMap<JetVar, Q> = vars
            .iter()
            .map(|v| (*v, Q::new(rng.gen_range(-40i64..=40).into(), rng.gen_range(1i64..=9).into())))
            .collect();
        match e.eval_rational(&vals) {
            Some(q) if q != Q::from_integer(0.into()) => return false,
            Some(_) => seen += 1,
            None => {}
        }
    }
    true
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SoundnessTally {
    pub leibniz_failures: usize,
    pub commutation_failures: usize,
    pub round_trip_failures: usize,
    pub zero_test_disagreements: usize,
    pub cases: usize,
    pub zero_cases: usize,
}

pub fn run_soundness(seed: u64, cases: usize, zero_cases: usize) -> SoundnessTally {
    let c = soundness_catalog();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = SoundnessTally { cases, zero_cases, ..Default::default() };
    for _ in 0..cases {
        let a = random_expr(&c, &mut rng, 3);
        let b = random_expr(&c, &mut rng, 3);
        t.leibniz_failures += !leibniz_defect(&c, &a, &b).is_zero() as usize;
        t.commutation_failures += !commutator_defect(&c, &a).is_zero() as usize;
        t.round_trip_failures += !round_trips(&c, &a) as usize;
    }
    for k in 0..zero_cases {
        let e = if k % 2 == 0 { random_zero(&c, &mut rng, 2) } else { random_expr(&c, &mut rng, 3) };
        let symbolic = c.is_zero(&e);
        let numeric = numerically_zero(&e, &mut rng, 20);
        t.zero_test_disagreements += (symbolic != numeric) as usize;
    }
    t
}

/// Report form of [`run_soundness`].
pub fn soundness_report(seed: u64, cases: usize, zero_cases: usize) -> TaskReport {
    let t = run_soundness(seed, cases, zero_cases);
    let mut r = TaskReport::new("engine-soundness", None);
    r.hypothesis(format!("seed {seed}"));
    let entry = |label: &str, fails: usize, total: usize| {
        let mut e = ResidualEntry::zero(format!("{label} ({total} cases)"));
        if fails > 0 {
            e.reduced_to_zero = false;
            e.remainder_text = format!("{fails} failures");
        }
        e
    };
    r.push(entry("Leibniz rule", t.leibniz_failures, cases));
    r.push(entry("commuting total derivatives", t.commutation_failures, cases));
    r.push(entry("print/parse round trip", t.round_trip_failures, cases));
    r.push(entry("zero test agrees with 20-point evaluation", t.zero_test_disagreements, zero_cases));
    r.metrics.push(Metric::new("cases", cases as f64, Some(1.0), None));
    r.steps = cases + zero_cases;
    r
}
