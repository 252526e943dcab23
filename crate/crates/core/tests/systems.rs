use miura_reciprocal::jet::Q;
use miura_reciprocal::systems::*;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

#[test]
fn residual_counts() {
    for (n, ch, mch) in [(1, 3, 4), (2, 4, 6), (3, 5, 8)] {
        assert_eq!(build_ch_system(n).unwrap().len(), ch);
        assert_eq!(build_mch_system(n).unwrap().len(), mch);
    }
    assert!(build_ch_system(0).is_err());
    assert!(build_mch_system(0).is_err());
}

#[test]
fn constant_states_vanish() {
    for n in 1..=3 {
        let s = build_ch_system(n).unwrap();
        for eq in &s.equations {
            assert!(!eq.expr.is_zero());
            let v = eval_constant_state(&s.catalog, &eq.expr, &[("P", q(3)), ("Del", q(5))]).unwrap();
            assert_eq!(v, q(0), "{}", eq.label);
        }
        let s = build_mch_system(n).unwrap();
        for eq in &s.equations {
            let v = eval_constant_state(&s.catalog, &eq.expr, &[("u", q(2)), ("del", q(7))]).unwrap();
            assert_eq!(v, q(0), "{}", eq.label);
        }
    }
}

#[test]
fn orientation_soundness() {
    for n in 1..=3 {
        for s in [build_ch_system(n).unwrap(), build_mch_system(n).unwrap()] {
            let rs = s.orientation().unwrap();
            for r in &rs.rules {
                let eq = s
                    .equations
                    .iter()
                    .chain(s.definitions.iter())
                    .find(|e| e.label == r.label)
                    .unwrap();
                let mut m = std::collections::HashMap::new();
                m.insert(r.lhs, r.rhs.clone());
                let back = miura_reciprocal::jet::substitute_jets(&s.catalog, &eq.expr, &m);
                assert!(s.catalog.normalize(&back).is_zero(), "{}", r.label);
            }
        }
    }
}

#[test]
fn text_round_trip() {
    let s = build_mch_system(2).unwrap();
    let t = s.to_text();
    let back = EquationSystem::from_text(&t).unwrap();
    assert_eq!(back.to_text(), t);
    assert_eq!(back.len(), s.len());
}

#[test]
fn cbs_examples() {
    let f = build_cbs_family(1).unwrap();
    let c = &f.cbs.catalog;
    let want = c.e("M_z0z2 + M_z0z0z0z1 + 4*M_z1*M_z0z0 + 8*M_z0*M_z0z1");
    assert!(c.normalize(&(&f.cbs.equations[0].expr - &want)).is_zero());
    let g = build_mcbs_family(1).unwrap();
    let c = &g.x_form.catalog;
    let want = &c.dn(&c.e("x_z2/x_z0 + x_z0z0z1/x_z0"), "z0") - &c.dn(&c.e("x_z0^2/2"), "z1");
    assert!(c.normalize(&(&g.x_form.equations[0].expr - &want)).is_zero());
    for eq in &f.cbs.equations {
        let v = eval_constant_state(c, &eq.expr, &[]);
        let _ = v;
    }
}

#[test]
fn lax_sums() {
    let l = build_ch_lax(1).unwrap();
    assert_eq!(l.components[0].temporal.len(), 3);
    let l = build_mch_lax(2).unwrap();
    assert_eq!(l.components.len(), 2);
}

#[test]
fn lax_compatible_n1() {
    let r = check_lax_compatibility(&build_ch_lax(1).unwrap(), &build_ch_system(1).unwrap()).unwrap();
    for e in &r.residuals { println!("{} {}", e.label, e.remainder_text); }
    assert!(r.passed());
    let r = check_lax_compatibility(&build_mch_lax(1).unwrap(), &build_mch_system(1).unwrap()).unwrap();
    for e in &r.residuals { println!("{} {}", e.label, e.remainder_text); }
    assert!(r.passed());
}

#[test]
fn lax_mutations_detected() {
    for n in 1..=2 {
        let (l, s) = (build_ch_lax(n).unwrap(), build_ch_system(n).unwrap());
        assert!(undetected_mutations(&l, &s).unwrap().is_empty());
        let (l, s) = (build_mch_lax(n).unwrap(), build_mch_system(n).unwrap());
        assert!(undetected_mutations(&l, &s).unwrap().is_empty());
    }
}

#[test]
fn lax_n3() {
    let t = std::time::Instant::now();
    assert!(check_lax_compatibility(&build_ch_lax(3).unwrap(), &build_ch_system(3).unwrap()).unwrap().passed());
    assert!(check_lax_compatibility(&build_mch_lax(3).unwrap(), &build_mch_system(3).unwrap()).unwrap().passed());
    println!("n3 {:?}", t.elapsed());
}
