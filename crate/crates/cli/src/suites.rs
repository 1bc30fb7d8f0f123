//! Verification suites. Each suite expands into independent tasks, each
//! producing a few cells; tasks run on the rayon pool and are collected in
//! their construction order.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use gammacoh::cohomology::{
    b_gamma_cohomology, b_gamma_model_cohomology, euler_defect, gamma2_closed_form,
    gamma2_double_complex, h1_torsion_from_coboundaries, presentation_cohomology, steinberg_check,
    CohomologyResult,
};
use gammacoh::divided::{
    closed_form_ranks, delta_presentation_report, divided_product_identity,
    predict_h1_torsion_total, series_identity_holds, sl2_free_rank_series,
};
use gammacoh::presentation::{b_gamma_model_over, sl2_presentation};
use gammacoh::sl2::{enumerate_group, group_order};
use gammacoh::symmpow::invariant_submodule;
use gammacoh::AbelianGroup;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::cache::PresentationStore;
use crate::config::{Range, Suite};
use crate::error::CliError;
use crate::report::{Cell, CellValue, Expectation};

/// `(m, p, a, b)` for the Steinberg comparison.
pub const STEINBERG_TUPLES: [(u64, u64, u32, u32); 5] = [
    (2, 2, 1, 2),
    (4, 2, 2, 3),
    (3, 3, 1, 2),
    (6, 3, 1, 2),
    (6, 2, 1, 2),
];
pub const UCT_PRIMES: [u64; 3] = [2, 3, 5];
pub const DELTA_CASES: [(u64, u32); 6] = [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1), (5, 2)];
pub const DELTA_MAX_DEGREE: u64 = 16;
pub const SERIES_MAX_DEGREE: usize = 40;
/// Largest `n` for which the series is compared with `H¹(SL(2,Z); M_n)`.
pub const SERIES_ORACLE_N: u64 = 12;

type Loc = (Option<u64>, Option<u64>, Option<u64>);

/// Shared read-mostly state: presentations and integral `H⁰, H¹` of `Γ(m)`.
pub struct Context {
    pub store: PresentationStore,
    memo: Mutex<BTreeMap<(u64, u64), Arc<CohomologyResult>>>,
}

impl Context {
    pub fn new(store: PresentationStore) -> Context {
        Context {
            store,
            memo: Mutex::default(),
        }
    }

    pub fn gamma(&self, m: u64, n: u64) -> Result<Arc<CohomologyResult>, CliError> {
        if let Some(r) = self.memo.lock().expect("memo poisoned").get(&(m, n)) {
            return Ok(r.clone());
        }
        let pres = self.store.get(m)?;
        let mut r = presentation_cohomology(&pres, n as usize, 0)?;
        r.m = Some(m);
        let r = Arc::new(r);
        self.memo
            .lock()
            .expect("memo poisoned")
            .insert((m, n), r.clone());
        Ok(r)
    }
}

struct Task<'a> {
    suite: Suite,
    loc: Loc,
    label: String,
    run: Box<dyn Fn() -> Result<Vec<Cell>, CliError> + Send + Sync + 'a>,
}

struct Builder<'a> {
    suite: Suite,
    tasks: Vec<Task<'a>>,
}

impl<'a> Builder<'a> {
    fn push(
        &mut self,
        loc: Loc,
        label: impl Into<String>,
        run: impl Fn(&mut Cells) -> Result<(), CliError> + Send + Sync + 'a,
    ) {
        let suite = self.suite;
        self.tasks.push(Task {
            suite,
            loc,
            label: label.into(),
            run: Box::new(move || {
                let mut cells = Cells {
                    suite,
                    loc,
                    out: Vec::new(),
                };
                run(&mut cells)?;
                Ok(cells.out)
            }),
        });
    }
}

struct Cells {
    suite: Suite,
    loc: Loc,
    out: Vec<Cell>,
}

impl Cells {
    fn add(
        &mut self,
        check: impl Into<String>,
        predicted: impl Into<CellValue>,
        computed: impl Into<CellValue>,
    ) {
        self.add_at(self.loc, check, predicted, computed, Expectation::Exact);
    }

    fn add_at(
        &mut self,
        loc: Loc,
        check: impl Into<String>,
        predicted: impl Into<CellValue>,
        computed: impl Into<CellValue>,
        expectation: Expectation,
    ) {
        self.out.push(Cell::new(
            self.suite.name(),
            loc,
            check,
            predicted.into(),
            computed.into(),
            expectation,
        ));
    }

    fn int(&mut self, check: impl Into<String>, predicted: i64, computed: i64) {
        self.add(
            check,
            CellValue::Integer(predicted),
            CellValue::Integer(computed),
        );
    }

    fn flag(&mut self, check: impl Into<String>, holds: bool) {
        self.add(check, CellValue::Flag(true), CellValue::Flag(holds));
    }
}

/// Grid bounds for one verify run.
#[derive(Clone, Debug)]
pub struct Grid {
    pub m: Range,
    pub n: Range,
    pub k_max: usize,
    pub primes: Vec<u64>,
}

fn loc(m: u64, n: u64) -> Loc {
    (Some(m), Some(n), None)
}

fn free(r: usize) -> CellValue {
    CellValue::Group(AbelianGroup::free(r))
}

fn orders_and_ranks<'a>(b: &mut Builder<'a>, ctx: &'a Context, grid: &Grid) {
    for m in grid.m.iter() {
        b.push((Some(m), None, None), "group order", move |c| {
            c.int(
                "order of SL(2,Z/m)",
                group_order(m) as i64,
                enumerate_group(m)?.len() as i64,
            );
            Ok(())
        });
        if m < 3 {
            continue;
        }
        b.push((Some(m), None, None), "rank of Gamma(m)", move |c| {
            let ab = ctx.store.get(m)?.abelianization();
            let cf = closed_form_ranks(m)?;
            c.add("abelianization", free(cf.rank as usize), ab.clone());
            for r in &cf.routes {
                let at = (Some(m), None, Some(r.prime));
                let computed = CellValue::Integer(ab.free_rank() as i64);
                c.add_at(
                    at,
                    "Schreier rank",
                    CellValue::Integer(r.rank as i64),
                    computed.clone(),
                    Expectation::Exact,
                );
                if let Some(printed) = r.printed {
                    c.add_at(
                        at,
                        "printed composite rank",
                        CellValue::Integer(printed as i64),
                        computed,
                        Expectation::Documented,
                    );
                }
            }
            Ok(())
        });
    }
}

fn h1_torsion<'a>(b: &mut Builder<'a>, ctx: &'a Context, grid: &Grid) {
    for m in grid.m.iter() {
        for n in grid.n.lo.max(1)..=grid.n.hi {
            let primes = grid.primes.clone();
            b.push(loc(m, n), "H^1 torsion", move |c| {
                let h1 = ctx.gamma(m, n)?.h(1).torsion();
                let predicted = predict_h1_torsion_total(m, n, &primes)?;
                c.add("H^1 torsion", predicted, h1.clone());
                let gens = ctx.store.get(m)?;
                c.add(
                    "torsion of coker d0",
                    h1,
                    h1_torsion_from_coboundaries(gens.generator_values(), n as usize),
                );
                Ok(())
            });
        }
    }
}

fn h1_rank<'a>(b: &mut Builder<'a>, ctx: &'a Context, grid: &Grid) {
    for m in grid.m.iter() {
        for n in grid.n.iter() {
            b.push(loc(m, n), "H^1 rank", move |c| {
                let h = ctx.gamma(m, n)?;
                let rank = h.h(1).free_rank() as i64;
                let h0 = if n == 0 { 1 } else { 0 };
                c.add("H^0", free(h0), h.h(0));
                if m == 2 {
                    let stated = if n == 0 { 2 } else { 0 };
                    c.add_at(
                        loc(m, n),
                        "stated rational rank",
                        CellValue::Integer(stated),
                        CellValue::Integer(rank),
                        Expectation::Documented,
                    );
                    let derived = match n {
                        0 => 2,
                        n if n % 2 == 0 => n as i64 + 1,
                        _ => 0,
                    };
                    c.int("rational rank from F2", derived, rank);
                } else {
                    let cf = closed_form_ranks(m)?;
                    c.int("rational rank", cf.h1_rank(n) as i64, rank);
                    c.int(
                        "Euler identity",
                        (cf.rank as i64 - 1) * (n as i64 + 1),
                        euler_defect(&h),
                    );
                }
                Ok(())
            });
        }
    }
}

fn gamma2_forms<'a>(b: &mut Builder<'a>, ctx: &'a Context, grid: &Grid) {
    let k_max = grid.k_max;
    for n in grid.n.iter() {
        b.push(
            (Some(2), Some(n), None),
            "Gamma(2) closed forms",
            move |c| {
                let hs = gamma2_double_complex(n as usize, k_max)?.cohomology()?;
                for (k, h) in hs.iter().take(k_max + 1).enumerate() {
                    c.add(
                        format!("H^{k} double complex"),
                        gamma2_closed_form(n as usize, k),
                        h.clone(),
                    );
                }
                let fox = ctx.gamma(2, n)?;
                for (k, h) in hs.iter().take(k_max.min(1) + 1).enumerate() {
                    c.add(format!("H^{k} Fox complex"), h.clone(), fox.h(k));
                }
                Ok(())
            },
        );
    }
}

fn bgamma_theorem<'a>(b: &mut Builder<'a>, ctx: &'a Context, grid: &Grid) {
    for m in grid.m.iter() {
        for n in grid.n.iter() {
            b.push(loc(m, n), "B_Gamma cohomology", move |c| {
                let (computed, predicted) = if m == 2 {
                    let g = ctx.gamma(2, n)?;
                    let nu = n as usize;
                    let predicted = match n {
                        0 => vec![
                            AbelianGroup::free(1),
                            AbelianGroup::free(3),
                            AbelianGroup::free(2),
                        ],
                        n if n % 2 == 0 => vec![g.h(0), g.h(1), g.h(1)],
                        _ => vec![
                            AbelianGroup::trivial(),
                            gamma2_closed_form(nu, 1),
                            gamma2_closed_form(nu, 2),
                        ],
                    };
                    (b_gamma_cohomology(2, nu)?, predicted)
                } else {
                    let g = ctx.gamma(m, n)?;
                    let model = b_gamma_model_over((*ctx.store.get(m)?).clone())?;
                    let predicted = vec![g.h(0), g.h(1).direct_sum(&g.h(0)), g.h(1)];
                    (b_gamma_model_cohomology(&model, m, n as usize)?, predicted)
                };
                for (k, p) in predicted.into_iter().enumerate() {
                    c.add(format!("H^{k}"), p, computed.h(k));
                }
                Ok(())
            });
        }
    }
}

fn uct<'a>(b: &mut Builder<'a>, ctx: &'a Context, grid: &Grid) {
    for m in grid.m.iter() {
        for n in grid.n.lo.max(1)..=grid.n.hi {
            b.push(loc(m, n), "universal coefficients", move |c| {
                let h = ctx.gamma(m, n)?;
                let gens = ctx.store.get(m)?;
                c.add("H^0", AbelianGroup::trivial(), h.h(0));
                for p in UCT_PRIMES {
                    for a in 1..=2u32 {
                        let q = p.pow(a);
                        let lhs =
                            invariant_submodule(gens.generator_values(), n as usize, q)?.group;
                        let rhs = h.h(1).torsion_subgroup(&BigInt::from(q));
                        c.add_at(
                            (Some(m), Some(n), Some(p)),
                            format!("invariants mod p^{a}"),
                            rhs,
                            lhs,
                            Expectation::Exact,
                        );
                    }
                }
                Ok(())
            });
        }
    }
}

fn steinberg<'a>(b: &mut Builder<'a>, grid: &Grid) {
    for (m, p, a, bb) in STEINBERG_TUPLES {
        if m > grid.m.hi {
            continue;
        }
        for n in grid.n.iter() {
            b.push(
                (Some(m), Some(n), Some(p)),
                "Steinberg invariants",
                move |c| {
                    c.flag(
                        format!("invariants a={a} b={bb}"),
                        steinberg_check(m, p, a, bb, n as usize)?,
                    );
                    Ok(())
                },
            );
        }
    }
}

fn delta_presentation(b: &mut Builder<'_>) {
    for (p, a) in DELTA_CASES {
        b.push((None, None, Some(p)), "divided powers", move |c| {
            for d in delta_presentation_report(p, a, DELTA_MAX_DEGREE)? {
                let at = (None, Some(d.degree), Some(p));
                c.add_at(
                    at,
                    format!("xi quotient a={a}"),
                    d.expected.clone(),
                    d.presented.clone(),
                    Expectation::Exact,
                );
                c.add_at(
                    at,
                    format!("leading generator a={a}"),
                    CellValue::Flag(true),
                    CellValue::Flag(d.generator_is_unit),
                    Expectation::Exact,
                );
            }
            let products = (0..=DELTA_MAX_DEGREE)
                .all(|i| (0..=DELTA_MAX_DEGREE - i).all(|j| divided_product_identity(i, j)));
            c.flag(format!("product rule a={a}"), products);
            Ok(())
        });
    }
}

fn series<'a>(b: &mut Builder<'a>, grid: &Grid) {
    b.push((None, None, None), "free-rank series", |c| {
        let f = sl2_free_rank_series(SERIES_MAX_DEGREE);
        c.flag(
            format!("denominator identity through t^{SERIES_MAX_DEGREE}"),
            series_identity_holds(SERIES_MAX_DEGREE),
        );
        for (k, v) in [(4usize, 1i64), (10, 0), (20, 3)] {
            c.int(format!("coefficient of t^{k}"), v, f[k]);
        }
        Ok(())
    });
    for n in grid.n.lo..=grid.n.hi.min(SERIES_ORACLE_N) {
        b.push((None, Some(n), None), "SL(2,Z) free rank", move |c| {
            let f = sl2_free_rank_series(2 * n as usize);
            let h = presentation_cohomology(&sl2_presentation(), n as usize, 0)?;
            c.int(
                "series vs H^1(SL(2,Z)) free rank",
                f[2 * n as usize],
                h.h(1).free_rank() as i64,
            );
            Ok(())
        });
    }
}

fn build<'a>(suite: Suite, ctx: &'a Context, grid: &Grid) -> Vec<Task<'a>> {
    let mut b = Builder {
        suite,
        tasks: Vec::new(),
    };
    match suite {
        Suite::OrdersAndRanks => orders_and_ranks(&mut b, ctx, grid),
        Suite::H1Torsion => h1_torsion(&mut b, ctx, grid),
        Suite::H1Rank => h1_rank(&mut b, ctx, grid),
        Suite::Gamma2Forms => gamma2_forms(&mut b, ctx, grid),
        Suite::BgammaTheorem => bgamma_theorem(&mut b, ctx, grid),
        Suite::Uct => uct(&mut b, ctx, grid),
        Suite::Steinberg => steinberg(&mut b, grid),
        Suite::DeltaPresentation => delta_presentation(&mut b),
        Suite::Series => series(&mut b, grid),
    }
    b.tasks
}

fn execute(task: &Task<'_>, timings: bool) -> Vec<Cell> {
    let start = Instant::now();
    let mut cells = (task.run)().unwrap_or_else(|e| {
        vec![Cell::new(
            task.suite.name(),
            task.loc,
            format!("{} failed: {e}", task.label),
            CellValue::Flag(true),
            CellValue::Flag(false),
            Expectation::Exact,
        )]
    });
    if timings {
        let us = start.elapsed().as_micros() as u64;
        for c in &mut cells {
            c.wall_us = Some(us);
        }
    }
    cells
}

/// Runs `suites` over `grid` on the current rayon pool.
pub fn run_suites(ctx: &Context, suites: &[Suite], grid: &Grid, timings: bool) -> Vec<Cell> {
    let tasks: Vec<Task<'_>> = suites.iter().flat_map(|&s| build(s, ctx, grid)).collect();
    let results: Vec<Vec<Cell>> = tasks.par_iter().map(|t| execute(t, timings)).collect();
    results.into_iter().flatten().collect()
}
