//! Command-line surface and its validated form.

use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use primepow::analytic::{TruncationPolicy, DEFAULT_EPSILON};
use primepow::sigma::ClosedFormMode;

#[derive(Debug, Parser)]
#[command(name = "primepow", version, about = "Sums of two prime k-th powers: exact counts, singular constants and generating functions")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Output file (stdout when omitted).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub workers: Option<usize>,

    /// Truncation threshold for the generating-function series.
    #[arg(long, global = true, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,

    /// Closed-form table for powers of two (sigma defaults to paper, everything else to corrected).
    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,

    /// Also write two-column `x y` data for plotting.
    #[arg(long, global = true)]
    pub plot_data: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    Corrected,
}

impl From<ModeArg> for ClosedFormMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => ClosedFormMode::Paper,
            ModeArg::Corrected => ClosedFormMode::Corrected,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare the three evaluations of Σ_k(q) over a (q, k) grid.
    Sigma {
        #[arg(long)]
        q_max: u64,
        #[arg(long)]
        k_max: u64,
        /// Restrict to odd moduli.
        #[arg(long)]
        odd_only: bool,
    },
    /// Main-term ratio G_{q,k}(N)·φ(q) / (Σ_k(q)·G_{1,k}(N)) along a grid of N.
    Ratio {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        grid: String,
    },
    /// Representation table ψ_{2,k}(n) for n ≤ N, or the growth of G_{1,k} along a grid.
    Count {
        #[arg(long)]
        k: u32,
        #[arg(long = "N", alias = "n")]
        n: Option<u64>,
        /// Only list n divisible by q.
        #[arg(long, default_value_t = 1)]
        q: u64,
        #[arg(long, conflicts_with = "n")]
        grid: Option<String>,
    },
    /// Check F_{q,k} = S1 + S2 at deterministic sample points.
    Decompose {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: u32,
        #[arg(long = "N", alias = "n")]
        n: u64,
        #[arg(long, default_value_t = 20)]
        samples: u64,
    },
    /// Recover G_{q,k}(N) from the circle integral by uniform quadrature.
    Quadrature {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: u32,
        #[arg(long = "N", alias = "n")]
        n: u64,
        /// Quadrature nodes (default: max exponent + N + 1).
        #[arg(long)]
        points: Option<u64>,
    },
    /// Ψ_k(e^{-1/N}) / N^{1/k} along a grid, against both candidate constants.
    Probe {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        grid: String,
    },
    /// Mean squares J1(X), J2(X, h) of the twisted partial sums ψ_k(x, χ).
    Jintegrals {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        k: u32,
        /// Character exponents on the generators, comma separated (default: first χ with χ^k ≠ χ0).
        #[arg(long)]
        chi: Option<String>,
        #[arg(long)]
        grid: String,
        /// h as a fraction of X.
        #[arg(long, default_value_t = 1.0)]
        h_frac: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

/// Validated subcommand parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Task {
    Sigma { q_max: u64, k_max: u64, odd_only: bool },
    Ratio { q: u64, k: u32, grid: Vec<u64> },
    Count { k: u32, n: u64, q: u64 },
    Growth { k: u32, grid: Vec<u64> },
    Decompose { q: u64, k: u32, n: u64, samples: u64 },
    Quadrature { q: u64, k: u32, n: u64, points: Option<u64> },
    Probe { k: u32, grid: Vec<u64> },
    Jintegrals { q: u64, k: u32, chi: Option<Vec<u32>>, grid: Vec<u64>, h_frac: f64 },
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Sigma { .. } => "sigma",
            Task::Ratio { .. } => "ratio",
            Task::Count { .. } | Task::Growth { .. } => "count",
            Task::Decompose { .. } => "decompose",
            Task::Quadrature { .. } => "quadrature",
            Task::Probe { .. } => "probe",
            Task::Jintegrals { .. } => "jintegrals",
        }
    }
}

/// Everything a run needs. Computation is deterministic: there is no seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub mode: ClosedFormMode,
    pub policy: TruncationPolicy,
    pub workers: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub plot_data: Option<PathBuf>,
}

/// Parses `1e4,1e5,1000` into a strictly ascending list of integers.
pub fn parse_grid(s: &str) -> Result<Vec<u64>, ConfigError> {
    let mut out = Vec::new();
    for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let v: f64 = tok
            .parse()
            .map_err(|_| ConfigError(format!("grid value {tok:?} is not a number")))?;
        if !(v.is_finite() && v >= 1.0 && v.fract() == 0.0 && v <= 9.007_199_254_740_992e15) {
            return err(format!("grid value {tok:?} is not a positive integer"));
        }
        out.push(v as u64);
    }
    if out.is_empty() {
        return err("grid must not be empty");
    }
    if out.windows(2).any(|w| w[0] >= w[1]) {
        return err("grid must be strictly ascending");
    }
    Ok(out)
}

fn parse_exponents(s: &str) -> Result<Vec<u32>, ConfigError> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse()
                .map_err(|_| ConfigError(format!("character exponent {t:?} is not a non-negative integer")))
        })
        .collect()
}

fn positive(name: &str, v: u64) -> Result<(), ConfigError> {
    if v == 0 {
        return err(format!("--{name} must be at least 1"));
    }
    Ok(())
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, ConfigError> {
        let c = cli.common;
        let policy = TruncationPolicy::new(c.epsilon).map_err(|e| ConfigError(e.to_string()))?;
        let workers = match c.workers {
            Some(0) => return err("--workers must be at least 1"),
            Some(w) => w,
            None => std::thread::available_parallelism().map_or(1, |n| n.get()),
        };
        let task = match cli.command {
            Command::Sigma { q_max, k_max, odd_only } => {
                positive("q-max", q_max)?;
                positive("k-max", k_max)?;
                Task::Sigma { q_max, k_max, odd_only }
            }
            Command::Ratio { q, k, grid } => {
                if q < 2 {
                    return err("--q must be at least 2");
                }
                positive("k", k as u64)?;
                Task::Ratio { q, k, grid: parse_grid(&grid)? }
            }
            Command::Count { k, n, q, grid } => {
                positive("k", k as u64)?;
                positive("q", q)?;
                match (n, grid) {
                    (Some(n), None) => Task::Count { k, n, q },
                    (None, Some(g)) => Task::Growth { k, grid: parse_grid(&g)? },
                    _ => return err("count needs exactly one of --N or --grid"),
                }
            }
            Command::Decompose { q, k, n, samples } => {
                positive("q", q)?;
                positive("k", k as u64)?;
                positive("samples", samples)?;
                if n < 4 {
                    return err("--N must be at least 4");
                }
                Task::Decompose { q, k, n, samples }
            }
            Command::Quadrature { q, k, n, points } => {
                positive("q", q)?;
                positive("k", k as u64)?;
                positive("N", n)?;
                Task::Quadrature { q, k, n, points }
            }
            Command::Probe { k, grid } => {
                positive("k", k as u64)?;
                Task::Probe { k, grid: parse_grid(&grid)? }
            }
            Command::Jintegrals { q, k, chi, grid, h_frac } => {
                positive("q", q)?;
                positive("k", k as u64)?;
                if !(0.0..=1.0).contains(&h_frac) {
                    return err("--h-frac must lie in [0, 1]");
                }
                let chi = chi.as_deref().map(parse_exponents).transpose()?;
                Task::Jintegrals { q, k, chi, grid: parse_grid(&grid)?, h_frac }
            }
        };
        let default_mode = match task {
            Task::Sigma { .. } => ClosedFormMode::Paper,
            _ => ClosedFormMode::Corrected,
        };
        Ok(Self {
            task,
            mode: c.mode.map_or(default_mode, Into::into),
            policy,
            workers,
            format: c.format,
            out: c.out,
            plot_data: c.plot_data,
        })
    }
}
