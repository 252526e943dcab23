use miura_reciprocal::jet::{Catalog, Expr};
use miura_reciprocal::soundness::{commutator_defect, leibniz_defect, numerically_zero, round_trips, soundness_catalog};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LEAVES: &[&str] = &["P", "U", "V", "k", "P_X", "P_Y", "U_T", "V_XY", "P_XX", "U_XY", "P_XYT"];

#[derive(Clone, Debug)]
enum Tree {
    Jet(usize),
    Int(i64),
    Add(Box<Tree>, Box<Tree>),
    Sub(Box<Tree>, Box<Tree>),
    Mul(Box<Tree>, Box<Tree>),
    Div(Box<Tree>, Box<Tree>),
}

fn tree() -> impl Strategy<Value = Tree> {
    let leaf = prop_oneof![
        3 => (0..LEAVES.len()).prop_map(Tree::Jet),
        1 => (-3i64..=3).prop_map(Tree::Int),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Add(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Sub(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Tree::Mul(Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Tree::Div(Box::new(a), Box::new(b))),
        ]
    })
}

fn build(c: &Catalog, t: &Tree) -> Expr {
    match t {
        Tree::Jet(i) => c.j(LEAVES[*i]),
        Tree::Int(k) => Expr::int(*k),
        Tree::Add(a, b) => &build(c, a) + &build(c, b),
        Tree::Sub(a, b) => &build(c, a) - &build(c, b),
        Tree::Mul(a, b) => &build(c, a) * &build(c, b),
        Tree::Div(a, b) => {
            let d = build(c, b);
            if d.is_zero() {
                build(c, a)
            } else {
                &build(c, a) / &d
            }
        }
    }
}

fn cat() -> Catalog {
    soundness_catalog()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn leibniz_rule(a in tree(), b in tree()) {
        let c = cat();
        let d = leibniz_defect(&c, &build(&c, &a), &build(&c, &b));
        prop_assert!(d.is_zero(), "{}", c.print(&d));
    }

    #[test]
    fn total_derivatives_commute(a in tree()) {
        let c = cat();
        let d = commutator_defect(&c, &build(&c, &a));
        prop_assert!(d.is_zero(), "{}", c.print(&d));
    }

    #[test]
    fn print_parse_round_trip(a in tree()) {
        let c = cat();
        let e = build(&c, &a);
        prop_assert!(round_trips(&c, &e), "{}", c.print(&e));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// The exact zero test agrees with evaluation at 20 random rational points.
    #[test]
    fn zero_test_agrees_with_evaluation(a in tree(), b in tree(), make_zero in any::<bool>(), seed in any::<u64>()) {
        let c = cat();
        let (x, y) = (build(&c, &a), build(&c, &b));
        let e = if make_zero {
            let s = &x + &y;
            &(&s * &s) - &(&(&(&x * &x) + &(&(&x * &y) * &Expr::int(2))) + &(&y * &y))
        } else {
            &(&x * &y) - &y
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(c.is_zero(&e), numerically_zero(&e, &mut rng, 20), "{}", c.print(&e));
        if make_zero {
            prop_assert!(c.is_zero(&e));
        }
    }
}

#[test]
fn seeded_batch_is_clean() {
    let t = miura_reciprocal::soundness::run_soundness(42, 200, 40);
    assert_eq!(t.leibniz_failures + t.commutation_failures + t.round_trip_failures + t.zero_test_disagreements, 0);
}
