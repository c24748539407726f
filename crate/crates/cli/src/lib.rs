//! `driftlab` command-line driver.
//!
//! Exit codes: 0 on success, 1 on a data or analysis error, 2 on a usage
//! error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

mod data_cmds;
mod drift_cmds;
pub mod report;
mod sim_cmds;

use report::{digest_file, Format, Inputs, Report};

/// File name looked up under `$DRIFTLAB_DATA` or `./data/`.
pub const DATASET_FILE: &str = "garments_worker_productivity.csv";
pub const DATA_ENV: &str = "DRIFTLAB_DATA";

#[derive(Debug, Parser)]
#[command(name = "driftlab", version, about = "Covariate-drift analysis of the garment productivity data")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Significance level.
    #[arg(long, global = true, default_value_t = 0.05)]
    pub alpha: f64,
    /// Directory for the report and its CSV tables.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Dataset loading and schema checks.
    #[command(subcommand)]
    Ingest(IngestCmd),
    /// Exploratory summaries.
    #[command(subcommand)]
    Eda(EdaCmd),
    /// Maximum-likelihood exploratory factor analysis.
    Efa(EfaArgs),
    /// Expanding-window drift tests.
    #[command(subcommand)]
    Drift(DriftCmd),
    /// Ordinary least squares with full inference.
    Regress(RegressArgs),
    /// Synthetic series and dynamical systems.
    #[command(subcommand)]
    Simulate(SimCmd),
}

#[derive(Debug, Clone, Args)]
pub struct DataArg {
    /// Dataset CSV; defaults to $DRIFTLAB_DATA or ./data/.
    #[arg(long)]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum IngestCmd {
    /// Load, type-check and summarize the dataset.
    Validate(DataArg),
}

#[derive(Debug, Subcommand)]
pub enum EdaCmd {
    /// Pairwise correlation matrix.
    Corr {
        #[command(flatten)]
        data: DataArg,
        /// Comma-separated columns; the ten factor covariates by default.
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
    },
    /// Distribution summary and histogram of one column.
    Dist {
        #[command(flatten)]
        data: DataArg,
        #[arg(long, default_value = "actual_productivity")]
        column: String,
    },
    /// Correlation edges above a threshold.
    Web {
        #[command(flatten)]
        data: DataArg,
        #[arg(long, value_delimiter = ',')]
        columns: Vec<String>,
        #[arg(long, default_value_t = 0.3)]
        threshold: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct EfaArgs {
    #[command(flatten)]
    pub data: DataArg,
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<String>,
    /// Number of factors; the Kaiser count by default.
    #[arg(long)]
    pub factors: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum DriftCmd {
    /// Covariance stability and mean trend.
    H1(H1Args),
    /// Correlation and mutual-information shift.
    H2(H2Args),
    /// Nonspecificity of expanding-window histograms.
    Poss(PossArgs),
}

#[derive(Debug, Clone, Args)]
pub struct H1Args {
    /// Use these dataset columns instead of the synthetic decay panel.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "targeted_productivity,actual_productivity")]
    pub columns: Vec<String>,
    /// Consecutive segments for the covariance test (dataset mode).
    #[arg(long, default_value_t = 4)]
    pub splits: usize,
    /// Time points of the synthetic panel.
    #[arg(long, default_value_t = 10)]
    pub times: usize,
    /// Observations per time point of the synthetic panel.
    #[arg(long, default_value_t = 100)]
    pub obs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct H2Args {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "targeted_productivity")]
    pub x: String,
    #[arg(long, default_value = "actual_productivity")]
    pub y: String,
    /// Rows in the first window.
    #[arg(long, default_value_t = 20)]
    pub min_rows: usize,
    #[arg(long, default_value_t = 20)]
    pub n_before: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub rho_before: f64,
    #[arg(long, default_value_t = 40)]
    pub n_after: usize,
    #[arg(long, default_value_t = 0.9, allow_hyphen_values = true)]
    pub rho_after: f64,
}

#[derive(Debug, Clone, Args)]
pub struct PossArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value = "actual_productivity")]
    pub column: String,
    #[arg(long, default_value_t = 10)]
    pub windows: usize,
    /// Histogram bins; Sturges' rule on the full series by default.
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long, default_value_t = 10)]
    pub times: usize,
    #[arg(long, default_value_t = 100)]
    pub obs: usize,
}

#[derive(Debug, Clone, Args)]
pub struct RegressArgs {
    #[command(flatten)]
    pub data: DataArg,
    #[arg(long)]
    pub y: String,
    /// Regressor column; repeat for several. `t` is the row index unless
    /// the dataset has such a column.
    #[arg(long, required = true)]
    pub x: Vec<String>,
    #[arg(long)]
    pub no_intercept: bool,
}

#[derive(Debug, Subcommand)]
pub enum SimCmd {
    /// Exponential decay: recursion and RK4 solution.
    Decay {
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        y0: f64,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
    },
    /// Bivariate normal series with a correlation change.
    Corr {
        #[arg(long, default_value_t = 20)]
        n_before: usize,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rho_before: f64,
        #[arg(long, default_value_t = 40)]
        n_after: usize,
        #[arg(long, default_value_t = 0.9, allow_hyphen_values = true)]
        rho_after: f64,
    },
    /// Hebbian weight evolution with decay.
    Hebb {
        #[arg(long, default_value_t = 2)]
        nodes: usize,
        #[arg(long, default_value_t = 0.5)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1.0)]
        decay: f64,
        /// Amplitude of the activity product.
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
    },
    /// Stochastic delay equation.
    Dde {
        #[arg(long, value_enum, default_value_t = DriftKind::Feedback)]
        drift: DriftKind,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        rate: f64,
        #[arg(long, default_value_t = 1.0)]
        capacity: f64,
        #[arg(long, default_value_t = 1.0)]
        delay: f64,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        /// Constant pre-history value.
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        history: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 20.0)]
        horizon: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DriftKind {
    Decay,
    Feedback,
    Logistic,
}

/// Failure of a subcommand after argument parsing.
#[derive(Debug)]
pub struct CliError(pub String);

impl From<driftlab::Error> for CliError {
    fn from(e: driftlab::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError(format!("io: {e}"))
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Explicit path, then `$DRIFTLAB_DATA` (file or directory), then `./data/`.
pub fn resolve_data(explicit: Option<&Path>) -> CliResult<PathBuf> {
    if let Some(p) = explicit {
        return Ok(p.to_path_buf());
    }
    let mut tried = Vec::new();
    if let Some(env) = std::env::var_os(DATA_ENV) {
        let p = PathBuf::from(env);
        let candidate = if p.is_dir() { p.join(DATASET_FILE) } else { p };
        if candidate.is_file() {
            return Ok(candidate);
        }
        tried.push(candidate);
    }
    let local = Path::new("data").join(DATASET_FILE);
    if local.is_file() {
        return Ok(local);
    }
    tried.push(local);
    let list: Vec<String> = tried.iter().map(|p| p.display().to_string()).collect();
    Err(CliError(format!("dataset not found (tried {}); pass --data or set {DATA_ENV}", list.join(", "))))
}

/// Arguments with the output directory removed, so reports written to
/// different places stay byte-identical.
fn recorded_args(args: &[OsString]) -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        let s = a.to_string_lossy().into_owned();
        if skip {
            skip = false;
            continue;
        }
        if s == "--out" {
            skip = true;
            continue;
        }
        if s.starts_with("--out=") {
            continue;
        }
        out.push(s);
    }
    out
}

pub(crate) struct Ctx {
    pub global: Global,
    pub inputs: Inputs,
}

impl Ctx {
    pub fn report(&self, command: &str) -> Report {
        Report::new(command, self.inputs.clone())
    }

    /// Records the digest of a file that feeds the analysis.
    pub fn input(&mut self, path: &Path) -> CliResult<()> {
        let d = digest_file(path).map_err(|e| CliError(format!("io: {}: {e}", path.display())))?;
        self.inputs.files.push(d);
        Ok(())
    }
}

fn dispatch(cli: Cli, args: &[OsString]) -> CliResult<Report> {
    let mut ctx = Ctx {
        inputs: Inputs { files: Vec::new(), args: recorded_args(args), seed: cli.global.seed, alpha: cli.global.alpha },
        global: cli.global,
    };
    if !(ctx.global.alpha > 0.0 && ctx.global.alpha < 1.0) {
        return Err(CliError(format!("invalid-parameter: alpha must lie in (0, 1), got {}", ctx.global.alpha)));
    }
    match cli.command {
        Command::Ingest(IngestCmd::Validate(d)) => data_cmds::validate(&mut ctx, &d),
        Command::Eda(EdaCmd::Corr { data, columns }) => data_cmds::corr(&mut ctx, &data, &columns),
        Command::Eda(EdaCmd::Dist { data, column }) => data_cmds::dist(&mut ctx, &data, &column),
        Command::Eda(EdaCmd::Web { data, columns, threshold }) => data_cmds::web(&mut ctx, &data, &columns, threshold),
        Command::Efa(a) => data_cmds::efa(&mut ctx, &a),
        Command::Regress(a) => data_cmds::regress(&mut ctx, &a),
        Command::Drift(DriftCmd::H1(a)) => drift_cmds::h1(&mut ctx, &a),
        Command::Drift(DriftCmd::H2(a)) => drift_cmds::h2(&mut ctx, &a),
        Command::Drift(DriftCmd::Poss(a)) => drift_cmds::poss(&mut ctx, &a),
        Command::Simulate(s) => sim_cmds::simulate(&mut ctx, s),
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (out, format) = (cli.global.out.clone(), cli.global.format);
    let report = match dispatch(cli, &args) {
        Ok(r) => r,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            return 1;
        }
    };
    match out {
        Some(dir) => match report.write(&dir, format) {
            Ok(paths) => {
                print!("{}", report.summary);
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
                for p in paths {
                    println!("wrote {}", p.display());
                }
                0
            }
            Err(e) => {
                eprintln!("error: io: {}: {e}", dir.display());
                1
            }
        },
        None => {
            print!("{}", report.render(format));
            0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn out_flag_is_not_recorded() {
        let args: Vec<OsString> = ["driftlab", "--out", "/tmp/x", "simulate", "decay", "--out=/y", "--seed", "3"]
            .iter()
            .map(OsString::from)
            .collect();
        assert_eq!(recorded_args(&args), vec!["simulate", "decay", "--seed", "3"]);
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["driftlab", "frobnicate"]), 2);
        assert_eq!(run(["driftlab", "simulate", "decay", "--bogus"]), 2);
        assert_eq!(run(["driftlab", "--alpha", "2", "simulate", "decay"]), 1);
    }
}
