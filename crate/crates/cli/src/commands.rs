use gammacoh::cohomology::{
    b_gamma_cohomology, b_gamma_model_cohomology, gamma2_double_complex, presentation_cohomology,
    CochainComplexSpec,
};
use gammacoh::divided::{
    closed_form_ranks, predict_h1_torsion, predict_h1_torsion_total, sl2_free_rank_series,
};
use gammacoh::presentation::b_gamma_model_over;
use gammacoh::sl2::{enumerate_group, group_order};
use gammacoh::AbelianGroup;
use num_bigint::BigInt;
use rayon::prelude::*;

use crate::cache::PresentationStore;
use crate::config::{Command, GroupKind, PredictMode, RunConfig};
use crate::error::CliError;
use crate::report::{CellValue, Row, Table, VerificationReport};
use crate::suites::{run_suites, Context, Grid};

/// Applies universal coefficients to a complete list `H⁰, …, H^top`.
fn reduce_mod(groups: &[AbelianGroup], q: u64) -> Vec<AbelianGroup> {
    let q = BigInt::from(q);
    (0..groups.len())
        .map(|k| {
            let g = groups[k].tensor_mod(&q);
            match groups.get(k + 1) {
                Some(next) => g.direct_sum(&next.tor_mod(&q)),
                None => g,
            }
        })
        .collect()
}

fn gamma_groups(
    store: &PresentationStore,
    m: u64,
    n: usize,
    modulus: u64,
    degree_max: usize,
) -> Result<Vec<AbelianGroup>, CliError> {
    let mut groups = if m == 2 {
        // One extra differential so the top requested degree is exact.
        let spec = gamma2_double_complex(n, degree_max + 1)?;
        CochainComplexSpec::new(spec.differentials().to_vec(), modulus)?.cohomology()?
    } else {
        let r = presentation_cohomology(&*store.get(m)?, n, modulus)?;
        vec![r.h(0), r.h(1)]
    };
    groups.resize(degree_max + 1, AbelianGroup::trivial());
    Ok(groups)
}

fn bgamma_groups(
    store: &PresentationStore,
    m: u64,
    n: usize,
    modulus: u64,
    degree_max: usize,
) -> Result<Vec<AbelianGroup>, CliError> {
    let r = if m == 2 {
        b_gamma_cohomology(2, n)?
    } else {
        b_gamma_model_cohomology(&b_gamma_model_over((*store.get(m)?).clone())?, m, n)?
    };
    let integral: Vec<AbelianGroup> = (0..=2).map(|k| r.h(k)).collect();
    let mut groups = if modulus == 0 {
        integral
    } else {
        reduce_mod(&integral, modulus)
    };
    groups.resize(degree_max + 1, AbelianGroup::trivial());
    Ok(groups)
}

fn cohomology_rows(
    label: &str,
    m: u64,
    n: u64,
    modulus: u64,
    groups: Vec<AbelianGroup>,
) -> Vec<Row> {
    groups
        .into_iter()
        .enumerate()
        .map(|(k, g)| Row {
            group: label.into(),
            m: Some(m),
            n: Some(n),
            p: None,
            modulus,
            quantity: format!("H^{k}"),
            value: CellValue::Group(g),
        })
        .collect()
}

pub fn cmd_compute(config: &RunConfig, store: &PresentationStore) -> Result<Table, CliError> {
    let Command::Compute { group, degree_max } = &config.command else {
        return Err(CliError::Config("not a compute configuration".into()));
    };
    let q = config.modulus;
    if *group == GroupKind::Sl2mod {
        let rows = config
            .m_range
            .iter()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|&m| -> Result<Vec<Row>, CliError> {
                let row = |quantity: &str, v: u64| Row {
                    group: "sl2mod".into(),
                    m: Some(m),
                    n: None,
                    p: None,
                    modulus: 0,
                    quantity: quantity.into(),
                    value: CellValue::Integer(v as i64),
                };
                Ok(vec![
                    row("order", enumerate_group(m)?.len() as u64),
                    row("order formula", group_order(m)),
                ])
            })
            .collect::<Result<Vec<_>, _>>()?;
        return Ok(Table {
            rows: rows.concat(),
        });
    }
    let cells: Vec<(u64, u64)> = config
        .m_range
        .iter()
        .flat_map(|m| config.n_range.iter().map(move |n| (m, n)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(m, n)| -> Result<Vec<Row>, CliError> {
            let nu = n as usize;
            Ok(match group {
                GroupKind::Gamma => cohomology_rows(
                    "gamma",
                    m,
                    n,
                    q,
                    gamma_groups(store, m, nu, q, degree_max.unwrap_or(1))?,
                ),
                GroupKind::Bgamma => cohomology_rows(
                    "bgamma",
                    m,
                    n,
                    q,
                    bgamma_groups(store, m, nu, q, degree_max.unwrap_or(2))?,
                ),
                GroupKind::Sl2mod => unreachable!(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Table {
        rows: rows.concat(),
    })
}

pub fn cmd_verify(
    config: &RunConfig,
    store: PresentationStore,
) -> Result<VerificationReport, CliError> {
    let Command::Verify {
        suites,
        k_max,
        timings,
    } = &config.command
    else {
        return Err(CliError::Config("not a verify configuration".into()));
    };
    let grid = Grid {
        m: config.m_range,
        n: config.n_range,
        k_max: *k_max,
        primes: config.primes.clone(),
    };
    let ctx = Context::new(store);
    Ok(VerificationReport::new(run_suites(
        &ctx, suites, &grid, *timings,
    )))
}

pub fn cmd_predict(config: &RunConfig) -> Result<Table, CliError> {
    let Command::Predict { mode } = &config.command else {
        return Err(CliError::Config("not a predict configuration".into()));
    };
    let mut rows = Vec::new();
    match *mode {
        PredictMode::Series { max } => {
            for (k, c) in sl2_free_rank_series(max).into_iter().enumerate() {
                rows.push(Row {
                    group: "sl2".into(),
                    m: None,
                    n: None,
                    p: None,
                    modulus: 0,
                    quantity: format!("t^{k}"),
                    value: CellValue::Integer(c),
                });
            }
        }
        PredictMode::Rank => {
            for m in config.m_range.iter() {
                let cf = closed_form_ranks(m)?;
                for n in config.n_range.iter() {
                    rows.push(Row {
                        group: "gamma".into(),
                        m: Some(m),
                        n: Some(n),
                        p: None,
                        modulus: 0,
                        quantity: "H^1 rational rank".into(),
                        value: CellValue::Integer(cf.h1_rank(n) as i64),
                    });
                }
            }
        }
        PredictMode::Torsion { p } => {
            for m in config.m_range.iter() {
                for n in config.n_range.iter() {
                    let value = match p {
                        Some(p) => predict_h1_torsion(m, n, p)?.to_group(),
                        None => predict_h1_torsion_total(m, n, &config.primes)?,
                    };
                    rows.push(Row {
                        group: "gamma".into(),
                        m: Some(m),
                        n: Some(n),
                        p,
                        modulus: 0,
                        quantity: "H^1 torsion".into(),
                        value: CellValue::Group(value),
                    });
                }
            }
        }
    }
    Ok(Table { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn universal_coefficients_on_lists() {
        let g = |s: &str| s.parse::<AbelianGroup>().unwrap();
        let out = reduce_mod(&[g("Z"), g("Z^2 + Z/4"), g("Z/2")], 2);
        assert_eq!(
            out,
            vec![g("Z/2 + Z/2"), g("Z/2 + Z/2 + Z/2 + Z/2"), g("Z/2")]
        );
    }
}
