//! One PASS/FAIL line per acceptance criterion.

use std::time::{Duration, Instant};

use miura_reciprocal::jet::Q;
use miura_reciprocal::numerics::{numeric_check, NumericConfig};
use miura_reciprocal::reductions::{reduce_case1, reduce_case2};
use miura_reciprocal::report::TaskReport;
use miura_reciprocal::soundness::run_soundness;
use miura_reciprocal::suite::verify_lax;
use miura_reciprocal::systems::{build_ch_system, build_mch_system, eval_constant_state};
use miura_reciprocal::transforms::{
    verify_composite_dictionary, verify_miura, verify_reciprocal_ch, verify_reciprocal_mch,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn passed(r: &TaskReport) -> Result<(), String> {
    ensure(r.passed(), format!("{} n={:?}: {:?}", r.label, r.n, r.failures()))
}

fn has(r: &TaskReport, needle: &str) -> Result<(), String> {
    ensure(
        r.residuals.iter().any(|e| e.label.contains(needle) && e.reduced_to_zero && e.expect_zero),
        format!("{}: no zero entry `{needle}`", r.label),
    )
}

fn within(t: Duration, secs: f64, what: &str) -> Result<(), String> {
    ensure(t.as_secs_f64() < secs, format!("{what} took {:.1} s (limit {secs} s)", t.as_secs_f64()))
}

fn c1() -> Check {
    let start = Instant::now();
    let q = |k: i64| Q::from_integer(k.into());
    for (n, nch, nmch) in [(1, 3, 4), (2, 4, 6), (3, 5, 8)] {
        let ch = build_ch_system(n).map_err(|e| e.to_string())?;
        let mch = build_mch_system(n).map_err(|e| e.to_string())?;
        ensure(ch.len() == nch && mch.len() == nmch, format!("n={n}: counts {} / {}", ch.len(), mch.len()))?;
        for (s, st) in [(&ch, [("P", q(3)), ("Del", q(5))]), (&mch, [("u", q(2)), ("del", q(7))])] {
            for eq in &s.equations {
                let v = eval_constant_state(&s.catalog, &eq.expr, &st);
                ensure(v == Some(q(0)), format!("{} {}: constant state gives {v:?}", s.name, eq.label))?;
            }
        }
    }
    within(start.elapsed(), 1.0, "construction")?;
    Ok(format!("counts 3/4/5 and 4/6/8, constant states zero, {:.3} s", start.elapsed().as_secs_f64()))
}

fn c2() -> Check {
    let mut t3 = Duration::ZERO;
    for n in 1..=3 {
        let start = Instant::now();
        for (r, base) in [
            (verify_reciprocal_ch(n).map_err(|e| e.to_string())?, "X_z0"),
            (verify_reciprocal_mch(n).map_err(|e| e.to_string())?, "x_z0"),
        ] {
            passed(&r)?;
            for e in &r.residuals {
                if let Some(u) = &e.unit_factor {
                    ensure(u == "identity" || u.contains(base), format!("{}: unit {u}", e.label))?;
                }
            }
        }
        if n == 3 {
            t3 = start.elapsed();
        }
    }
    within(t3, 60.0, "n=3")?;
    Ok(format!("n=1..3 pushed to targets up to powers of X_0/x_0, n=3 in {:.2} s", t3.as_secs_f64()))
}

fn c3() -> Check {
    for n in 1..=3 {
        let r = verify_miura(n).map_err(|e| e.to_string())?;
        passed(&r)?;
        for i in 1..=n {
            has(&r, &format!("CBS i={i} modulo mCBS"))?;
        }
    }
    Ok("CBS reduces to zero modulo mCBS via 4M = x_0 - m, n=1..3".into())
}

fn c4() -> Check {
    for n in [2, 3] {
        let r = verify_composite_dictionary(n).map_err(|e| e.to_string())?;
        passed(&r)?;
        for tag in [
            "u from P",
            "intermediate flows",
            "last flow",
            "first flow",
            "integrated form closed",
            "field relation",
            "derivation 1",
            "derivation 2",
            "derivation 3",
        ] {
            has(&r, tag)?;
        }
    }
    Ok("dictionary identities and the three stepwise derivations zero for n=2,3".into())
}

fn c5() -> Check {
    let mut t3 = Duration::ZERO;
    let mut coeffs = 0;
    for n in 1..=3 {
        let start = Instant::now();
        for which in 0..2 {
            let r = verify_lax(n, which, true).map_err(|e| e.to_string())?;
            passed(&r)?;
            has(&r, "single-sign mutations detected")?;
            coeffs += r.residuals.len() - 1;
        }
        if n == 3 {
            t3 = start.elapsed();
        }
    }
    within(t3, 120.0, "n=3")?;
    Ok(format!("{coeffs} coefficients zero, every sign mutation detected, n=3 in {:.2} s", t3.as_secs_f64()))
}

fn c6() -> Check {
    let r1 = reduce_case1().map_err(|e| e.to_string())?;
    passed(&r1)?;
    for tag in ["Dym with k1 = 2 in explicit form", "Qiao with k2 = 1 in explicit form", "potential KdV", "potential mKdV", "k1 = 2k2 satisfies"] {
        has(&r1, tag)?;
    }
    let r2 = reduce_case2().map_err(|e| e.to_string())?;
    passed(&r2)?;
    for tag in ["CH modulo the reduced system", "modified CH", "AKNS", "modified AKNS"] {
        has(&r2, tag)?;
    }
    Ok("Dym, Qiao, pKdV, pmKdV, k1=2k2; CH, modified CH, AKNS, modified AKNS".into())
}

fn c7() -> Check {
    let start = Instant::now();
    let out = numeric_check(&NumericConfig::default()).map_err(|e| e.to_string())?;
    passed(&out.report)?;
    within(start.elapsed(), 300.0, "numeric suite")?;
    let slope = |label: &str| {
        out.tables.iter().find(|t| t.label == label).map(|t| t.slope).unwrap_or(f64::NAN)
    };
    Ok(format!(
        "manufactured Dym {:.2}, Dym->Qiao {:.2}, mutation {:.2}, Miura soliton {:.2}, {:.1} s",
        slope("manufactured Dym residual"),
        slope("Dym to Qiao transport"),
        slope("transport without the P_X term (mutation)"),
        slope("Miura soliton"),
        start.elapsed().as_secs_f64()
    ))
}

fn c8() -> Check {
    let t = run_soundness(2024, 1000, 200);
    let bad = t.leibniz_failures + t.commutation_failures + t.round_trip_failures;
    ensure(bad == 0, format!("{bad} property failures"))?;
    ensure(t.zero_test_disagreements == 0, format!("{} zero-test disagreements", t.zero_test_disagreements))?;
    Ok("1000 Leibniz/commutation/round-trip cases, 200 zero tests agree".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("hierarchy construction", c1),
        ("reciprocal links", c2),
        ("Miura link", c3),
        ("composite dictionary", c4),
        ("Lax compatibility", c5),
        ("reductions", c6),
        ("numerics", c7),
        ("engine soundness", c8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("criterion {} ({name}): PASS - {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL - {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
