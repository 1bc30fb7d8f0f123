//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::time::Instant;

use gammacoh::arith::factorize;
use gammacoh::cohomology::{
    b_gamma_cohomology, gamma2_cohomology, gamma_cohomology, steinberg_check, uct_check,
};
use gammacoh::divided::{
    closed_form_ranks, predict_h1_torsion_total, series_identity_holds, sl2_free_rank_series,
    verify_delta_presentation,
};
use gammacoh::presentation::schreier_presentation;
use gammacoh::sl2::enumerate_group;
use gammacoh::AbelianGroup;
use gammacoh_cli::{run, Status, VerificationReport};

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn g(s: &str) -> AbelianGroup {
    s.parse().unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn z2(k: usize) -> AbelianGroup {
    AbelianGroup::from_cyclic_orders(0, std::iter::repeat_n(2.into(), k))
}

fn group_orders() -> Outcome {
    let mut orders = Vec::new();
    for m in 2..=12u64 {
        let formula: u64 = factorize(m)
            .into_iter()
            .map(|(p, a)| p.pow(3 * (a - 1)) * p * (p * p - 1))
            .product();
        let found = enumerate_group(m).map_err(|e| e.to_string())?.len() as u64;
        ensure(found == formula, || {
            format!("m={m}: enumerated {found}, formula {formula}")
        })?;
        orders.push(found);
    }
    ensure(orders[..5] == [6, 24, 48, 120, 144], || {
        format!("orders {orders:?}")
    })
}

fn prime_ranks() -> Outcome {
    for (p, r) in [(3u64, 3usize), (5, 11), (7, 29)] {
        let ab = schreier_presentation(p)
            .map_err(|e| e.to_string())?
            .abelianization();
        ensure(ab == AbelianGroup::free(r), || {
            format!("Gamma({p}) abelianizes to {ab}")
        })?;
    }
    Ok(())
}

fn verify_cli(args: &[&str]) -> Result<(i32, VerificationReport), String> {
    let mut argv = vec!["gammacoh", "verify", "--format", "json"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut out, &mut err);
    let text = String::from_utf8(out).map_err(|e| e.to_string())?;
    let report = VerificationReport::parse(gammacoh_cli::Format::Json, &text)
        .map_err(|e| format!("{e}; stderr: {}", String::from_utf8_lossy(&err)))?;
    Ok((code, report))
}

fn composite_ranks() -> Outcome {
    for (m, r) in [(4u64, 5usize), (6, 13)] {
        let ab = schreier_presentation(m)
            .map_err(|e| e.to_string())?
            .abelianization();
        ensure(ab == AbelianGroup::free(r), || {
            format!("Gamma({m}) abelianizes to {ab}")
        })?;
        let cf = closed_form_ranks(m).map_err(|e| e.to_string())?;
        ensure(cf.routes.iter().all(|x| x.rank as usize == r), || {
            format!("routes for m={m}: {:?}", cf.routes)
        })?;
    }
    let (_, report) = verify_cli(&["--suite", "orders-and-ranks", "--m-max", "6"])?;
    let printed: Vec<_> = report
        .cells
        .iter()
        .filter(|c| c.check == "printed composite rank")
        .collect();
    ensure(
        printed.iter().any(|c| {
            c.m == Some(6) && c.p == Some(3) && c.status == Status::PaperDiscrepancyFlagged
        }),
        || "printed composite formula not flagged at m=6".into(),
    )?;
    ensure(
        printed
            .iter()
            .all(|c| (c.status == Status::Match) == (c.predicted == c.computed)),
        || "printed formula cells inconsistent".into(),
    )
}

fn torsion_grid() -> Outcome {
    for m in 2..=6u64 {
        for n in 1..=8u64 {
            let h = gamma_cohomology(m, n as usize).map_err(|e| e.to_string())?;
            let predicted =
                predict_h1_torsion_total(m, n, &[2, 3, 5, 7]).map_err(|e| e.to_string())?;
            let torsion = h.h(1).torsion();
            ensure(torsion == predicted, || {
                format!("(m,n)=({m},{n}): computed {torsion}, predicted {predicted}")
            })?;
        }
    }
    let h = gamma_cohomology(2, 2).map_err(|e| e.to_string())?.h(1);
    ensure(h == g("Z^3 + Z/2 + Z/4 + Z/4"), || {
        format!("H^1(Gamma(2); M_2) = {h}")
    })
}

fn rational_ranks() -> Outcome {
    for p in [3u64, 5] {
        for n in 1..=6u64 {
            let rank = gamma_cohomology(p, n as usize)
                .map_err(|e| e.to_string())?
                .h(1)
                .free_rank() as u64;
            let expected = (n + 1) * p * (p * p - 1) / 12;
            ensure(rank == expected, || {
                format!("(p,n)=({p},{n}): rank {rank}, expected {expected}")
            })?;
        }
    }
    for m in 3..=6u64 {
        let r = schreier_presentation(m)
            .map_err(|e| e.to_string())?
            .abelianization()
            .free_rank() as i64;
        for n in 0..=8usize {
            let h = gamma_cohomology(m, n).map_err(|e| e.to_string())?;
            let lhs = h.h(1).free_rank() as i64 - h.h(0).free_rank() as i64;
            ensure(lhs == (r - 1) * (n as i64 + 1), || {
                format!("Euler identity fails at (m,n)=({m},{n})")
            })?;
        }
    }
    Ok(())
}

fn gamma2_forms() -> Outcome {
    for n in 0..=10usize {
        let r = gamma2_cohomology(n, 6).map_err(|e| e.to_string())?;
        if n % 2 == 0 {
            for i in 1..=3 {
                ensure(r.h(2 * i) == z2(n + 1), || {
                    format!("H^{}(Gamma(2); M_{n}) = {}", 2 * i, r.h(2 * i))
                })?;
            }
        } else {
            ensure(r.h(1) == z2(n + 1) && r.h(2) == z2(2 * n + 2), || {
                format!("odd n={n}: {:?}", r.groups)
            })?;
        }
    }
    Ok(())
}

fn b_gamma() -> Outcome {
    let a = b_gamma_cohomology(2, 0).map_err(|e| e.to_string())?;
    ensure(
        (a.h(0), a.h(1), a.h(2)) == (g("Z"), g("Z^3"), g("Z^2")),
        || format!("part (a): {:?}", a.groups),
    )?;
    for n in 1..=8usize {
        let b = b_gamma_cohomology(2, n).map_err(|e| e.to_string())?;
        let base = gamma_cohomology(2, n).map_err(|e| e.to_string())?;
        let expected = if n % 2 == 0 {
            (base.h(0), base.h(1), base.h(1))
        } else {
            (AbelianGroup::trivial(), z2(n + 1), z2(2 * n + 2))
        };
        ensure((b.h(0), b.h(1), b.h(2)) == expected, || {
            format!("m=2, n={n}: {:?}", b.groups)
        })?;
    }
    for m in 3..=5u64 {
        for n in 0..=6usize {
            let b = b_gamma_cohomology(m, n).map_err(|e| e.to_string())?;
            let base = gamma_cohomology(m, n).map_err(|e| e.to_string())?;
            let expected = (base.h(0), base.h(1).direct_sum(&base.h(0)), base.h(1));
            ensure((b.h(0), b.h(1), b.h(2)) == expected, || {
                format!("part (d) at (m,n)=({m},{n})")
            })?;
        }
    }
    Ok(())
}

fn universal_coefficients() -> Outcome {
    for m in 2..=6u64 {
        for n in 1..=8usize {
            for p in [2u64, 3, 5] {
                for a in 1..=2 {
                    let ok = uct_check(m, n, p, a).map_err(|e| e.to_string())?;
                    ensure(ok, || format!("(m,n,p,a)=({m},{n},{p},{a})"))?;
                }
            }
        }
    }
    Ok(())
}

fn steinberg() -> Outcome {
    for (m, p, a, b) in [
        (2u64, 2u64, 1u32, 2u32),
        (4, 2, 2, 3),
        (3, 3, 1, 2),
        (6, 3, 1, 2),
        (6, 2, 1, 2),
    ] {
        for n in 0..=6 {
            let ok = steinberg_check(m, p, a, b, n).map_err(|e| e.to_string())?;
            ensure(ok, || format!("(m,p,a,b,n)=({m},{p},{a},{b},{n})"))?;
        }
    }
    Ok(())
}

fn divided_powers() -> Outcome {
    for p in [2u64, 3, 5] {
        for a in 1..=2 {
            let ok = verify_delta_presentation(p, a, 16).map_err(|e| e.to_string())?;
            ensure(ok, || format!("(p,a)=({p},{a})"))?;
        }
    }
    Ok(())
}

fn series() -> Outcome {
    let f = sl2_free_rank_series(40);
    // f_k = c_k + f_{k-8} + f_{k-12} - f_{k-20}, with c = t^4 + t^8 - t^16 + t^20.
    let mut rec = vec![0i64; 41];
    for k in 0..=40 {
        let c = match k {
            4 | 8 | 20 => 1,
            16 => -1,
            _ => 0,
        };
        let back = |d: usize| if k >= d { rec[k - d] } else { 0 };
        rec[k] = c + back(8) + back(12) - back(20);
    }
    ensure(f == rec, || {
        format!("expansion {f:?} vs recurrence {rec:?}")
    })?;
    ensure(series_identity_holds(40), || "denominator identity".into())?;
    ensure((f[4], f[10], f[20]) == (1, 0, 3), || {
        format!("spot values {} {} {}", f[4], f[10], f[20])
    })
}

fn discrepancy_handling() -> Outcome {
    let (code, report) = verify_cli(&[])?;
    ensure(code == 0, || format!("verify exited {code}"))?;
    ensure(report.summary.mismatched == 0, || {
        format!("{} mismatches", report.summary.mismatched)
    })?;
    let flagged = |check: &str| {
        report
            .cells
            .iter()
            .any(|c| c.check == check && c.status == Status::PaperDiscrepancyFlagged)
    };
    ensure(flagged("stated rational rank"), || {
        "m=2 rational rank not flagged".into()
    })?;
    ensure(flagged("printed composite rank"), || {
        "composite rank formula not flagged".into()
    })?;
    ensure(
        report
            .cells
            .iter()
            .filter(|c| c.status == Status::PaperDiscrepancyFlagged)
            .all(|c| c.check == "stated rational rank" || c.check == "printed composite rank"),
        || "unexpected flagged cell".into(),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("group orders", group_orders),
        ("ranks of Gamma(p)", prime_ranks),
        ("composite ranks", composite_ranks),
        ("H^1 torsion grid", torsion_grid),
        ("rational ranks", rational_ranks),
        ("Gamma(2) closed forms", gamma2_forms),
        ("B_Gamma(m) cohomology", b_gamma),
        ("universal coefficients", universal_coefficients),
        ("Steinberg invariants", steinberg),
        ("divided-power presentation", divided_powers),
        ("free-rank series", series),
        ("flagged discrepancies", discrepancy_handling),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = f();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:>2} {name:<28} PASS ({secs:.2}s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} {name:<28} FAIL ({secs:.2}s): {e}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
