//! Flags, the optional TOML config, and their merge (flags win).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use sone_index::config::ExperimentConfig;
use sone_index::index::Estimator;
use sone_index::{Error, Exec, Result};

#[derive(Parser, Debug)]
#[command(
    name = "sone-index",
    version,
    about = "Transversal index experiments on S¹-spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Analytic (Monte-Carlo) and geometric index with a verdict.
    Index(Common),
    /// Kernel tables against exact oracles, plus the Gaussian bound report.
    Heat(Common),
    /// Path statistics: quadratic variation, zero mean, exit time.
    Sample(SampleArgs),
    /// Projector checks and the I_m table.
    Fourier(FourierArgs),
    /// Index run on every catalog space (or the `--suite` selection).
    Suite(Common),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Index(_) => "index",
            Command::Heat(_) => "heat",
            Command::Sample(_) => "sample",
            Command::Fourier(_) => "fourier",
            Command::Suite(_) => "suite",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Index(c) | Command::Heat(c) | Command::Suite(c) => c,
            Command::Sample(s) => &s.common,
            Command::Fourier(f) => &f.common,
        }
    }
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// TOML file with `ExperimentConfig` fields; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub space: Option<String>,
    /// Twist degree: `k` on spheres, Chern number on the torus.
    #[arg(long, allow_hyphen_values = true)]
    pub twist: Option<i64>,
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub paths: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Path step (default t/200).
    #[arg(long)]
    pub h: Option<f64>,
    /// Circle quadrature nodes K for Fourier projections.
    #[arg(long)]
    pub k: Option<usize>,
    /// Isotropy or lens order.
    #[arg(long)]
    pub q: Option<u32>,
    /// Base sphere radius.
    #[arg(long)]
    pub radius: Option<f64>,
    /// `start:end:count`.
    #[arg(long = "t-grid", value_parser = parse_grid)]
    pub t_grid: Option<(f64, f64, usize)>,
    /// Base quadrature order of the index integral.
    #[arg(long)]
    pub order: Option<usize>,
    /// Worker threads; 1 runs sequentially. Default: the global pool.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Use the truncated supertrace expansion of this order.
    #[arg(long)]
    pub truncated: Option<usize>,
    #[arg(long)]
    pub antithetic: bool,
    /// Output directory (default `$SONE_INDEX_OUT`, else `./out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated catalog names for `suite`.
    #[arg(long)]
    pub suite: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Radius of the exit-time ball.
    #[arg(long, default_value_t = 0.1)]
    pub exit_radius: f64,
    /// Paths written to `paths.csv`.
    #[arg(long, default_value_t = 4)]
    pub dump: usize,
}

#[derive(Args, Debug, Clone)]
pub struct FourierArgs {
    #[command(flatten)]
    pub common: Common,
    /// Modes `-M..=M` in the I_m table.
    #[arg(long, default_value_t = 6)]
    pub max_mode: i64,
}

pub fn parse_grid(s: &str) -> std::result::Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, n] = parts[..] else {
        return Err(format!("expected start:end:count, got `{s}`"));
    };
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    let n = n
        .trim()
        .parse::<usize>()
        .map_err(|e| format!("`{n}`: {e}"))?;
    Ok((num(a)?, num(b)?, n))
}

/// Config file (if any) with the flags applied on top.
pub fn resolve(c: &Common) -> Result<ExperimentConfig> {
    let mut cfg = match &c.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
            toml::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?
        }
        None => ExperimentConfig::default(),
    };
    macro_rules! set {
        ($field:ident, $value:expr) => {
            if let Some(v) = $value {
                cfg.$field = v;
            }
        };
    }
    set!(space, c.space.clone());
    set!(twist, c.twist);
    set!(t, c.t);
    set!(paths, c.paths);
    set!(fourier_nodes, c.k);
    set!(order, c.order);
    if c.seed.is_some() {
        cfg.seed = c.seed;
    }
    if c.h.is_some() {
        cfg.h = c.h;
    }
    if c.t_grid.is_some() {
        cfg.t_grid = c.t_grid;
    }
    if let Some(q) = c.q {
        cfg.params.q = q;
    }
    if let Some(r) = c.radius {
        cfg.params.radius = r;
    }
    if let Some(n) = c.threads {
        cfg.exec = if n == 1 {
            Exec::Sequential
        } else {
            Exec::Threads(n)
        };
    }
    if let Some(order) = c.truncated {
        cfg.estimator = Estimator::Truncated { order };
    }
    cfg.antithetic |= c.antithetic;
    if let Some(out) = &c.out {
        cfg.out = Some(out.display().to_string());
    }
    if c.suite.is_some() {
        cfg.suite = c.suite.clone();
    }
    Ok(cfg)
}

/// `--out`, then the config, then `SONE_INDEX_OUT`, then `./out`.
pub fn output_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out
        .clone()
        .or_else(|| std::env::var("SONE_INDEX_OUT").ok())
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("out"))
}
