//! Command-line arguments and the validated run configuration.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

/// Environment variable that overrides the presentation cache directory.
pub const CACHE_DIR_ENV: &str = "GAMMACOH_CACHE_DIR";

/// Largest `m` for the cohomology suites of `verify` without `--large`.
pub const DEFAULT_M_MAX: u64 = 6;

#[derive(Parser, Debug)]
#[command(
    name = "gammacoh",
    version,
    about = "Cohomology of congruence subgroups of SL(2,Z)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Subcommand, Debug)]
pub enum CliCommand {
    /// Compute cohomology tables.
    Compute(ComputeArgs),
    /// Compare predicted and computed values over a grid.
    Verify(VerifyArgs),
    /// Evaluate the closed-form predictors only.
    Predict(PredictArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Directory for cached presentations (overrides GAMMACOH_CACHE_DIR).
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    pub group: GroupKind,
    #[arg(long)]
    pub m: u64,
    #[arg(long)]
    pub m_max: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub n: u64,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Highest cohomological degree to report.
    #[arg(long)]
    pub degree_max: Option<usize>,
    /// Coefficients in `M_n ⊗ Z/q`; 0 means integral.
    #[arg(long, default_value_t = 0)]
    pub modulus: u64,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Suites to run; all of them when omitted.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub suite: Vec<Suite>,
    #[arg(long, default_value_t = DEFAULT_M_MAX)]
    pub m_max: u64,
    #[arg(long, default_value_t = 8)]
    pub n_max: u64,
    #[arg(long, default_value_t = 6)]
    pub k_max: usize,
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 7])]
    pub primes: Vec<u64>,
    /// Record wall-clock time per cell.
    #[arg(long)]
    pub timings: bool,
    /// Allow cohomology grids beyond m = 6.
    #[arg(long)]
    pub large: bool,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args, Debug, Clone)]
pub struct PredictArgs {
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub m_max: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    /// Restrict the torsion prediction to one prime.
    #[arg(long)]
    pub p: Option<u64>,
    #[arg(long, value_delimiter = ',', default_values_t = [2u64, 3, 5, 7])]
    pub primes: Vec<u64>,
    /// Coefficients of the free-rank series of `H¹(SL(2,Z); M_n)`.
    #[arg(long, conflicts_with = "rank")]
    pub series: bool,
    /// Rank of `H¹(Γ(m); M_n ⊗ Q)`.
    #[arg(long)]
    pub rank: bool,
    #[arg(long, default_value_t = 20)]
    pub max: usize,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GroupKind {
    Gamma,
    Bgamma,
    Sl2mod,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    OrdersAndRanks,
    H1Torsion,
    H1Rank,
    Gamma2Forms,
    BgammaTheorem,
    Uct,
    Steinberg,
    DeltaPresentation,
    Series,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::OrdersAndRanks,
        Suite::H1Torsion,
        Suite::H1Rank,
        Suite::Gamma2Forms,
        Suite::BgammaTheorem,
        Suite::Uct,
        Suite::Steinberg,
        Suite::DeltaPresentation,
        Suite::Series,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::OrdersAndRanks => "orders-and-ranks",
            Suite::H1Torsion => "h1-torsion",
            Suite::H1Rank => "h1-rank",
            Suite::Gamma2Forms => "gamma2-forms",
            Suite::BgammaTheorem => "bgamma-theorem",
            Suite::Uct => "uct",
            Suite::Steinberg => "steinberg",
            Suite::DeltaPresentation => "delta-presentation",
            Suite::Series => "series",
        }
    }

    /// Suites whose cost grows with the index of `Γ(m)`.
    fn heavy(self) -> bool {
        matches!(
            self,
            Suite::H1Torsion | Suite::H1Rank | Suite::BgammaTheorem | Suite::Uct
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredictMode {
    Torsion { p: Option<u64> },
    Rank,
    Series { max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Compute {
        group: GroupKind,
        degree_max: Option<usize>,
    },
    Verify {
        suites: Vec<Suite>,
        k_max: usize,
        timings: bool,
    },
    Predict {
        mode: PredictMode,
    },
}

/// Inclusive range `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Range {
    pub lo: u64,
    pub hi: u64,
}

impl Range {
    pub fn new(lo: u64, hi: u64, what: &str) -> Result<Range, CliError> {
        if lo > hi {
            return Err(CliError::Config(format!("empty {what} range {lo}..={hi}")));
        }
        Ok(Range { lo, hi })
    }

    pub fn iter(self) -> impl Iterator<Item = u64> {
        self.lo..=self.hi
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub command: Command,
    pub m_range: Range,
    pub n_range: Range,
    pub primes: Vec<u64>,
    pub modulus: u64,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
}

fn cache_dir(common: &CommonArgs) -> Option<PathBuf> {
    common.cache_dir.clone().or_else(|| {
        std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
    })
}

fn check_primes(primes: &[u64]) -> Result<(), CliError> {
    if primes.is_empty() {
        return Err(CliError::Config("empty prime list".into()));
    }
    match primes.iter().find(|&&p| !gammacoh::arith::is_prime(p)) {
        Some(p) => Err(CliError::Config(format!("{p} is not prime"))),
        None => Ok(()),
    }
}

fn check_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    if jobs == Some(0) {
        return Err(CliError::Config("--jobs must be positive".into()));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_cli(cli: &Cli) -> Result<RunConfig, CliError> {
        match &cli.command {
            CliCommand::Compute(a) => Self::compute(a),
            CliCommand::Verify(a) => Self::verify(a),
            CliCommand::Predict(a) => Self::predict(a),
        }
    }

    fn compute(a: &ComputeArgs) -> Result<RunConfig, CliError> {
        check_jobs(a.common.jobs)?;
        if a.m < 2 {
            return Err(CliError::Config("--m must be at least 2".into()));
        }
        if a.modulus == 1 {
            return Err(CliError::Config("--modulus must be 0 or at least 2".into()));
        }
        Ok(RunConfig {
            command: Command::Compute {
                group: a.group,
                degree_max: a.degree_max,
            },
            m_range: Range::new(a.m, a.m_max.unwrap_or(a.m), "m")?,
            n_range: Range::new(a.n, a.n_max.unwrap_or(a.n), "n")?,
            primes: Vec::new(),
            modulus: a.modulus,
            format: a.common.format,
            cache_dir: cache_dir(&a.common),
            jobs: a.common.jobs,
        })
    }

    fn verify(a: &VerifyArgs) -> Result<RunConfig, CliError> {
        check_jobs(a.common.jobs)?;
        check_primes(&a.primes)?;
        let mut suites = if a.suite.is_empty() {
            Suite::ALL.to_vec()
        } else {
            a.suite.clone()
        };
        suites.sort();
        suites.dedup();
        if a.m_max > DEFAULT_M_MAX && !a.large {
            if let Some(s) = suites.iter().find(|s| s.heavy()) {
                return Err(CliError::Config(format!(
                    "suite {} with --m-max {} above {DEFAULT_M_MAX} requires --large",
                    s.name(),
                    a.m_max
                )));
            }
        }
        Ok(RunConfig {
            command: Command::Verify {
                suites,
                k_max: a.k_max,
                timings: a.timings,
            },
            m_range: Range::new(2, a.m_max, "m")?,
            n_range: Range::new(0, a.n_max, "n")?,
            primes: a.primes.clone(),
            modulus: 0,
            format: a.common.format,
            cache_dir: cache_dir(&a.common),
            jobs: a.common.jobs,
        })
    }

    fn predict(a: &PredictArgs) -> Result<RunConfig, CliError> {
        check_jobs(a.common.jobs)?;
        check_primes(&a.primes)?;
        let mode = if a.series {
            PredictMode::Series { max: a.max }
        } else if a.rank {
            PredictMode::Rank
        } else {
            if let Some(p) = a.p {
                check_primes(&[p])?;
            }
            PredictMode::Torsion { p: a.p }
        };
        let (m_range, n_range) = match mode {
            PredictMode::Series { max } => {
                (Range { lo: 1, hi: 1 }, Range::new(0, max as u64, "n")?)
            }
            _ => {
                let m =
                    a.m.ok_or_else(|| CliError::Config("--m is required".into()))?;
                let n =
                    a.n.ok_or_else(|| CliError::Config("--n is required".into()))?;
                let min_m = if mode == PredictMode::Rank { 3 } else { 2 };
                if m < min_m {
                    return Err(CliError::Config(format!("--m must be at least {min_m}")));
                }
                let min_n = if mode == PredictMode::Rank { 0 } else { 1 };
                if n < min_n {
                    return Err(CliError::Config(format!("--n must be at least {min_n}")));
                }
                (
                    Range::new(m, a.m_max.unwrap_or(m), "m")?,
                    Range::new(n, a.n_max.unwrap_or(n), "n")?,
                )
            }
        };
        Ok(RunConfig {
            command: Command::Predict { mode },
            m_range,
            n_range,
            primes: a.primes.clone(),
            modulus: 0,
            format: a.common.format,
            cache_dir: cache_dir(&a.common),
            jobs: a.common.jobs,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<RunConfig, CliError> {
        let cli = Cli::try_parse_from(std::iter::once("gammacoh").chain(args.iter().copied()))
            .map_err(|e| CliError::Config(e.to_string()))?;
        RunConfig::from_cli(&cli)
    }

    #[test]
    fn compute_defaults() {
        let c = parse(&["compute", "--group", "gamma", "--m", "3"]).unwrap();
        assert_eq!(c.m_range, Range { lo: 3, hi: 3 });
        assert_eq!(c.n_range, Range { lo: 0, hi: 0 });
        assert_eq!(c.format, Format::Text);
    }

    #[test]
    fn rejects_bad_ranges() {
        assert!(parse(&["compute", "--group", "gamma", "--m", "5", "--m-max", "3"]).is_err());
        assert!(parse(&["compute", "--group", "gamma", "--m", "1"]).is_err());
        assert!(parse(&["verify", "--m-max", "1"]).is_err());
        assert!(parse(&["verify", "--primes", "4"]).is_err());
        assert!(parse(&["verify", "--jobs", "0"]).is_err());
        assert!(parse(&["predict", "--m", "2"]).is_err());
        assert!(parse(&["compute", "--group", "gamma", "--m", "3", "--format", "xml"]).is_err());
    }

    #[test]
    fn large_grids_need_a_flag() {
        assert!(parse(&["verify", "--m-max", "8"]).is_err());
        assert!(parse(&["verify", "--m-max", "8", "--large"]).is_ok());
        assert!(parse(&["verify", "--suite", "orders-and-ranks", "--m-max", "8"]).is_ok());
    }

    #[test]
    fn suites_are_sorted_and_deduplicated() {
        let c = parse(&["verify", "--suite", "uct,h1-torsion,uct"]).unwrap();
        match c.command {
            Command::Verify { suites, .. } => {
                assert_eq!(suites, vec![Suite::H1Torsion, Suite::Uct])
            }
            _ => unreachable!(),
        }
    }
}
