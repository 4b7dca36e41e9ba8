use besselforge::specfun::GridSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::str::FromStr;

#[derive(Debug, Parser)]
#[command(name = "besselforge", version, about = "Jacobi and Bessel kernel experiments with CSV/JSON output")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one kernel on a square lattice.
    KernelEval(KernelEvalArgs),
    /// Distances between the degree-n objects and their limits, swept over n.
    Converge(ConvergeArgs),
    /// Tail masses beyond R and near-zero masses below delta, with the sup over n.
    Tails(TailsArgs),
    /// Projection DPP samples and their empirical intensity.
    Sample(SampleArgs),
    /// Hellinger integrals, Kakutani partial sums and the divergence verdict.
    Hellinger(HellingerArgs),
    /// Monte Carlo double orbital averages over a sweep of matrix sizes.
    Orbital(OrbitalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Worker threads; the result does not depend on it.
    #[arg(long, env = "BESSELFORGE_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct KernelEvalArgs {
    /// cd_u, hat, rescaled, bessel_tw or modified_bessel
    #[arg(long, default_value = "rescaled")]
    pub family: String,
    #[arg(long)]
    pub n: Option<NList>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value = "0.2:5:25")]
    pub lattice: Lattice,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[arg(long, default_value = "16,32,64,128")]
    pub n: NList,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    #[arg(long, default_value = "0.2:5:25")]
    pub lattice: Lattice,
    /// Half-line grid for the projector distances.
    #[arg(long, default_value = "1e-8:60:8:16")]
    pub grid: GridSpec,
    /// Window `lo:hi` for the local trace-norm distance.
    #[arg(long, default_value = "0.2:5")]
    pub window: Window,
    /// Skip the projector distances and report only the lattice sup.
    #[arg(long)]
    pub kernel_only: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TailsArgs {
    #[arg(long, default_value = "8,16,32,64,128")]
    pub n: NList,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    /// Tail cutoffs R.
    #[arg(long, default_value = "1,4,16,64,256,1024")]
    pub r: FList,
    /// Near-zero cutoffs delta.
    #[arg(long, default_value = "1,0.1,0.01,0.001")]
    pub delta: FList,
    /// `x_max` is the upper integration cutoff for tails, `x_min` the lower one near zero.
    #[arg(long, default_value = "1e-8:1e12:8:16")]
    pub grid: GridSpec,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Rank of the projection kernel.
    #[arg(long, default_value = "8")]
    pub n: NList,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
    pub s: f64,
    /// Atoms are the nodes of this grid.
    #[arg(long, default_value = "1e-5:1e5:5:8")]
    pub grid: GridSpec,
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Geometric histogram bins `lo:hi:count`.
    #[arg(long, default_value = "1e-5:1e5:40")]
    pub bins: Lattice,
    /// Also write every sampled point as `sample_id,point`.
    #[arg(long)]
    pub points_out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct HellingerArgs {
    /// Largest n of the scan.
    #[arg(long, default_value = "10000")]
    pub n: NList,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s2: f64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct OrbitalArgs {
    #[arg(long, default_value = "16,32")]
    pub n: NList,
    /// Corner size.
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Values of tr(zeta* zeta) tr(z* z) / n^2.
    #[arg(long, default_value = "0.001,0.003,0.01,0.03,0.1,0.3,1")]
    pub sweep: FList,
    /// Monte Carlo trials per sweep point.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Bound on |1 - average| that defines the reported delta.
    #[arg(long, default_value_t = 0.1)]
    pub tolerance: f64,
    #[command(flatten)]
    pub common: Common,
}

/// Comma-separated positive integers; the empty string is the empty list.
#[derive(Debug, Clone, PartialEq)]
pub struct NList(pub Vec<usize>);

impl FromStr for NList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        split(s)
            .map(|t| t.parse::<usize>().map_err(|_| format!("{t:?} is not a nonnegative integer")))
            .collect::<Result<_, _>>()
            .map(NList)
    }
}

impl NList {
    pub fn single(&self, flag: &str) -> Result<usize, String> {
        match self.0.as_slice() {
            [n] => Ok(*n),
            _ => Err(format!("--{flag} takes exactly one value here, got {:?}", self.0)),
        }
    }
}

/// Comma-separated reals.
#[derive(Debug, Clone, PartialEq)]
pub struct FList(pub Vec<f64>);

impl FromStr for FList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        split(s)
            .map(|t| t.parse::<f64>().map_err(|_| format!("{t:?} is not a number")))
            .collect::<Result<_, _>>()
            .map(FList)
    }
}

fn split(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty())
}

/// `lo:hi:count`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl FromStr for Lattice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts.as_slice() else {
            return Err(format!("expected lo:hi:count, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|_| format!("bad lower end in {s:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad upper end in {s:?}"))?;
        let count: usize = count.parse().map_err(|_| format!("bad count in {s:?}"))?;
        if !(lo < hi) || count < 2 {
            return Err(format!("need lo < hi and count >= 2 in {s:?}"));
        }
        Ok(Self { lo, hi, count })
    }
}

/// `lo:hi`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Window {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo: f64 = lo.parse().map_err(|_| format!("bad lower end in {s:?}"))?;
        let hi: f64 = hi.parse().map_err(|_| format!("bad upper end in {s:?}"))?;
        if !(lo < hi) {
            return Err(format!("need lo < hi in {s:?}"));
        }
        Ok(Self { lo, hi })
    }
}
