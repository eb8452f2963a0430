//! `spcluster` command-line driver.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spcluster::coarsen::SweepOrder;
use spcluster::dataio::{make_two_circles, make_two_moons, write_csv};
use spcluster::graph::Weighting;
use spcluster::pipeline::{
    bench_sweep, run_pipeline, scaling_probe, write_bench_csv, write_scaling_csv, DataSource,
    EigenSelection, Mode, PipelineError, RunConfig, ScaleFamily, Solver,
};

#[derive(Parser)]
#[command(
    name = "spcluster",
    version,
    about = "Spectral clustering on a reduced graph"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline once and print the JSON report.
    Cluster {
        #[command(flatten)]
        run: RunArgs,
        /// Write one predicted label per line.
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Sweep reduction ratios over one shared kNN graph; CSV output.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "1,5,10,50")]
        ratios: Vec<f64>,
        /// CSV destination (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Coarsening time against dataset size on a synthetic family.
    Scale {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "10000,20000,40000,80000")]
        sizes: Vec<usize>,
        #[arg(long, value_enum, default_value = "moons")]
        family: Shape,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Accuracy of predicted labels against ground truth (one label per line).
    Eval {
        #[arg(long)]
        truth: PathBuf,
        #[arg(long)]
        pred: PathBuf,
    },
    /// Write a synthetic dataset as CSV with labels in the last column.
    Gen {
        #[arg(long, value_enum)]
        shape: Shape,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 0.05)]
        noise: f64,
        #[arg(long, default_value_t = 0.5)]
        radius_ratio: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Shape {
    Moons,
    Circles,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Libsvm,
    Idx,
}

/// Flags that override fields of the (optional) JSON config.
#[derive(Args)]
struct RunArgs {
    /// JSON RunConfig; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset file (CSV, LibSVM, or IDX images).
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// CSV label column: first, last, an index, or a header name.
    #[arg(long)]
    label_column: Option<String>,
    /// IDX label file.
    #[arg(long)]
    idx_labels: Option<PathBuf>,
    /// Generate the dataset instead of loading it.
    #[arg(long, value_enum, conflicts_with = "data")]
    synthetic: Option<Shape>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    radius_ratio: Option<f64>,
    #[arg(long)]
    data_seed: Option<u64>,

    #[arg(long, short = 'k')]
    k_clusters: Option<usize>,
    #[arg(long)]
    k_neighbors: Option<usize>,
    /// binary | gaussian | gaussian:auto | gaussian:<sigma>
    #[arg(long)]
    weighting: Option<Weighting>,
    /// Target reduction ratio N / P.
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    test_vectors: Option<usize>,
    #[arg(long)]
    sweeps: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    max_agg_size: Option<usize>,
    #[arg(long)]
    max_levels: Option<usize>,
    /// Forward then backward Gauss-Seidel sweeps.
    #[arg(long)]
    symmetric_sweeps: bool,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_iters: Option<usize>,
    /// coarsened | standard_sc | kmeans_raw
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    seed: Option<u64>,
    /// Keep eigenvectors of zero eigenvalues.
    #[arg(long, conflicts_with = "skip_zero")]
    include_trivial: bool,
    /// Always drop eigenvectors of zero eigenvalues.
    #[arg(long)]
    skip_zero: bool,
    #[arg(long, value_enum)]
    solver: Option<SolverArg>,
    #[arg(long)]
    dense_limit: Option<usize>,
    #[arg(long)]
    row_normalize: bool,
    /// Min-max scale every feature to [0, 1].
    #[arg(long)]
    minmax: bool,
    #[arg(long)]
    repeats: Option<usize>,
    /// Report destination (stdout when absent).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Auto,
    Dense,
    Lanczos,
}

fn infer_format(path: &Path) -> Format {
    let name = path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default();
    if name.ends_with(".csv") {
        Format::Csv
    } else if name.contains("ubyte") || name.ends_with(".idx") {
        Format::Idx
    } else {
        Format::Libsvm
    }
}

impl RunArgs {
    fn into_config(self) -> Result<RunConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(path) = self.data {
            cfg.source = match self.format.unwrap_or_else(|| infer_format(&path)) {
                Format::Csv => DataSource::Csv {
                    path,
                    label_column: self.label_column,
                },
                Format::Libsvm => DataSource::Libsvm { path },
                Format::Idx => DataSource::Idx {
                    images: path,
                    labels: self.idx_labels,
                },
            };
        } else if let Some(shape) = self.synthetic {
            let seed = self.data_seed.unwrap_or(0);
            let n = self.n.unwrap_or(1000);
            cfg.source = match shape {
                Shape::Moons => DataSource::TwoMoons {
                    n,
                    noise: self.noise.unwrap_or(0.05),
                    seed,
                },
                Shape::Circles => DataSource::TwoCircles {
                    n,
                    radius_ratio: self.radius_ratio.unwrap_or(0.5),
                    noise: self.noise.unwrap_or(0.03),
                    seed,
                },
            };
        }
        macro_rules! set {
            ($flag:expr, $field:expr) => {
                if let Some(v) = $flag {
                    $field = v;
                }
            };
        }
        set!(self.k_clusters, cfg.k_clusters);
        set!(self.k_neighbors, cfg.knn.k_neighbors);
        set!(self.weighting, cfg.knn.weighting);
        set!(self.ratio, cfg.target_ratio);
        set!(self.test_vectors, cfg.coarsen.test_vectors);
        set!(self.sweeps, cfg.coarsen.sweeps);
        set!(self.threshold, cfg.coarsen.threshold);
        set!(self.max_agg_size, cfg.coarsen.max_agg_size);
        set!(self.max_levels, cfg.coarsen.max_levels);
        set!(self.restarts, cfg.kmeans.restarts);
        set!(self.max_iters, cfg.kmeans.max_iters);
        set!(self.mode, cfg.mode);
        set!(self.seed, cfg.seed);
        set!(self.dense_limit, cfg.dense_limit);
        set!(self.repeats, cfg.repeats);
        if let Some(s) = self.solver {
            cfg.solver = match s {
                SolverArg::Auto => Solver::Auto,
                SolverArg::Dense => Solver::Dense,
                SolverArg::Lanczos => Solver::Lanczos,
            };
        }
        if self.symmetric_sweeps {
            cfg.coarsen.sweep_order = SweepOrder::Symmetric;
        }
        if self.include_trivial {
            cfg.eigen = EigenSelection::IncludeTrivial;
        }
        if self.skip_zero {
            cfg.eigen = EigenSelection::SkipZero;
        }
        cfg.row_normalize |= self.row_normalize;
        cfg.minmax |= self.minmax;
        if self.output.is_some() {
            cfg.output = self.output;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Data(String),
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e.exit_code() {
            2 => Self::Config(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

/// Writes to `path`, or stdout when absent.
fn emit(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut f = fs::File::create(p).map_err(|e| io_err(p, e))?;
            write(&mut f).map_err(|e| io_err(p, e))
        }
        None => write(&mut io::stdout().lock()).map_err(|e| CliError::Data(e.to_string())),
    }
}

fn read_labels(path: &Path) -> Result<Vec<usize>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<usize>().map_err(|e| {
                CliError::Data(format!("{}:{}: `{}`: {e}", path.display(), i + 1, l.trim()))
            })
        })
        .collect()
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Command::Cluster { run, labels_out } => {
            let cfg = run.into_config()?;
            let (res, report) = run_pipeline(&cfg)?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            let json = report.to_json();
            emit(cfg.output.as_deref(), |w| writeln!(w, "{json}"))?;
            if let Some(p) = labels_out {
                emit(Some(&p), |w| {
                    res.labels.iter().try_for_each(|l| writeln!(w, "{l}"))
                })?;
            }
        }
        Command::Bench { run, ratios, out } => {
            let cfg = run.into_config()?;
            let rows = bench_sweep(&cfg, &ratios)?;
            emit(out.as_deref(), |w| {
                write_bench_csv(&rows, w).map_err(io::Error::other)
            })?;
        }
        Command::Scale {
            run,
            sizes,
            family,
            out,
        } => {
            let noise = run.noise;
            let radius_ratio = run.radius_ratio;
            let cfg = run.into_config()?;
            let family = match family {
                Shape::Moons => ScaleFamily::TwoMoons {
                    noise: noise.unwrap_or(0.05),
                },
                Shape::Circles => ScaleFamily::TwoCircles {
                    radius_ratio: radius_ratio.unwrap_or(0.5),
                    noise: noise.unwrap_or(0.03),
                },
            };
            let rows = scaling_probe(&sizes, family, &cfg)?;
            emit(out.as_deref(), |w| {
                write_scaling_csv(&rows, w).map_err(io::Error::other)
            })?;
        }
        Command::Eval { truth, pred } => {
            let t = read_labels(&truth)?;
            let p = read_labels(&pred)?;
            let rep = spcluster::accuracy(&t, &p).map_err(|e| CliError::Data(e.to_string()))?;
            let json = serde_json::to_string_pretty(&rep).expect("report serializes");
            emit(None, |w| writeln!(w, "{json}"))?;
        }
        Command::Gen {
            shape,
            n,
            noise,
            radius_ratio,
            seed,
            out,
        } => {
            let ds = match shape {
                Shape::Moons => make_two_moons(n, noise, seed),
                Shape::Circles => make_two_circles(n, radius_ratio, noise, seed),
            }
            .map_err(|e| CliError::Config(e.to_string()))?;
            write_csv(&ds, &out).map_err(|e| CliError::Data(e.to_string()))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
