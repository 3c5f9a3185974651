use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{AlphaSource, DataKind, Reference, RunConfig, ScheduleKindName};

const AFTER_HELP: &str = "\
Configuration is read from the TOML file given with --config; flags override it.
The resolved configuration is written next to every output.

Environment:
  ANNEAL_ENDPOINT  URL of the remote annealing service used by --backend remote
                   when no --endpoint is given.

Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.";

#[derive(Debug, Parser)]
#[command(name = "dqa", version, about = "Boltzmann sampling by simulated diabatic annealing", after_help = AFTER_HELP)]
pub struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sweep the anneal time and tabulate β from every estimator.
    Beta(BetaArgs),
    /// Sample an Ising problem and report its effective β.
    Sample(SampleArgs),
    /// Measure the calibration factor α of a backend.
    Calibrate(CalibrateArgs),
    /// Train an RBM and record its validation history.
    Train(TrainArgs),
    /// Write a synthetic dataset as PBM images.
    GenData(GenDataArgs),
}

#[derive(Debug, Args, Default)]
pub struct ScheduleArgs {
    #[arg(long = "schedule", value_enum)]
    pub kind: Option<ScheduleKindName>,
    /// t,A,B table; implies --schedule file.
    #[arg(long = "schedule-file")]
    pub path: Option<PathBuf>,
    /// Table values are frequencies; multiply by 2π.
    #[arg(long)]
    pub angular: bool,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Pick the anneal time whose integral β equals this value.
    #[arg(long)]
    pub solve_beta: Option<f64>,
}

impl ScheduleArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let s = &mut cfg.schedule;
        if let Some(path) = &self.path {
            s.kind = ScheduleKindName::File;
            s.path = Some(path.clone());
        }
        set(&mut s.kind, self.kind);
        s.angular |= self.angular;
        set(&mut s.a, self.a);
        set(&mut s.b, self.b);
        if self.tau.is_some() {
            s.tau = self.tau;
            s.solve_beta = None;
        }
        if self.solve_beta.is_some() {
            s.solve_beta = self.solve_beta;
        }
    }
}

#[derive(Debug, Args, Default)]
pub struct BackendArgs {
    /// dqa, exact, mock, pcd or remote.
    #[arg(long)]
    pub backend: Option<String>,
    #[arg(long)]
    pub steps_per_unit_time: Option<usize>,
    /// Inverse temperature of the exact backend.
    #[arg(long)]
    pub backend_beta: Option<f64>,
    /// Temperature error of the mock backend.
    #[arg(long)]
    pub alpha_true: Option<f64>,
    /// Sweeps between retained PCD samples.
    #[arg(long)]
    pub k: Option<usize>,
    /// Remote service URL; defaults to ANNEAL_ENDPOINT.
    #[arg(long)]
    pub endpoint: Option<String>,
}

impl BackendArgs {
    fn apply(&self, cfg: &mut RunConfig) {
        let b = &mut cfg.backend;
        set(&mut b.name, self.backend.clone());
        set(&mut b.steps_per_unit_time, self.steps_per_unit_time);
        set(&mut b.beta, self.backend_beta);
        set(&mut b.alpha_true, self.alpha_true);
        set(&mut b.k, self.k);
        if self.endpoint.is_some() {
            b.endpoint = self.endpoint.clone();
        }
    }
}

#[derive(Debug, Args)]
pub struct BetaArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    /// Ising problem JSON; a single spin in field --field otherwise.
    #[arg(long)]
    pub problem: Option<PathBuf>,
    #[arg(long)]
    pub field: Option<f64>,
    #[arg(long)]
    pub tau_start: Option<f64>,
    #[arg(long)]
    pub tau_stop: Option<f64>,
    #[arg(long)]
    pub tau_count: Option<usize>,
    /// Comma-separated Trotter step counts, one column each.
    #[arg(long, value_delimiter = ',')]
    pub trotter_steps: Option<Vec<usize>>,
    /// Samples per row for the empirical column; 0 omits it.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long)]
    pub problem: Option<PathBuf>,
    #[arg(long)]
    pub count: Option<usize>,
    /// Divide the problem by α before sampling: a number or a calibration record.
    #[arg(long)]
    pub rescale: Option<String>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long)]
    pub problem: Option<PathBuf>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum)]
    pub reference: Option<Reference>,
    #[arg(long)]
    pub min_count: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub schedule: ScheduleArgs,
    #[command(flatten)]
    pub backend: BackendArgs,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub samples_per_epoch: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub beta_target: Option<f64>,
    /// Weight divisor for annealer backends: a number or a calibration record.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub validation_repeats: Option<usize>,
    #[arg(long, value_enum)]
    pub data: Option<DataKind>,
    #[arg(long)]
    pub rows: Option<usize>,
    #[arg(long)]
    pub cols: Option<usize>,
    /// PBM file or directory; implies --data pbm.
    #[arg(long)]
    pub data_path: Option<PathBuf>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(value_enum)]
    pub kind: GenKind,
    pub rows: usize,
    pub cols: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum GenKind {
    Bas,
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

impl Cli {
    pub fn apply_globals(&self, cfg: &mut RunConfig) {
        set(&mut cfg.seed, self.seed);
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
    }
}

impl BetaArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        self.schedule.apply(cfg);
        self.backend.apply(cfg);
        let b = &mut cfg.beta;
        if self.problem.is_some() {
            b.problem = self.problem.clone();
        }
        set(&mut b.field, self.field);
        set(&mut b.tau_start, self.tau_start);
        set(&mut b.tau_stop, self.tau_stop);
        set(&mut b.tau_count, self.tau_count);
        set(&mut b.trotter_steps, self.trotter_steps.clone());
        set(&mut b.samples, self.samples);
        set(&mut b.out, self.out.clone());
        set(&mut cfg.thermometry.min_count, self.min_count);
    }
}

impl SampleArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        self.schedule.apply(cfg);
        self.backend.apply(cfg);
        let s = &mut cfg.sample;
        if self.problem.is_some() {
            s.problem = self.problem.clone();
        }
        set(&mut s.count, self.count);
        if let Some(r) = &self.rescale {
            s.rescale = Some(AlphaSource::parse(r));
        }
        set(&mut s.out, self.out.clone());
        set(&mut cfg.thermometry.min_count, self.min_count);
    }
}

impl CalibrateArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        self.schedule.apply(cfg);
        self.backend.apply(cfg);
        let c = &mut cfg.calibrate;
        if self.problem.is_some() {
            c.problem = self.problem.clone();
        }
        set(&mut c.count, self.count);
        set(&mut c.out, self.out.clone());
        set(&mut cfg.thermometry.reference, self.reference);
        set(&mut cfg.thermometry.min_count, self.min_count);
    }
}

impl TrainArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        self.schedule.apply(cfg);
        self.backend.apply(cfg);
        let t = &mut cfg.train;
        set(&mut t.epochs, self.epochs);
        set(&mut t.samples_per_epoch, self.samples_per_epoch);
        set(&mut t.learning_rate, self.learning_rate);
        set(&mut t.beta_target, self.beta_target);
        set(&mut t.alpha, self.alpha.as_deref().map(AlphaSource::parse));
        set(&mut t.hidden, self.hidden);
        set(&mut t.validation_repeats, self.validation_repeats);
        set(&mut t.out, self.out.clone());
        let d = &mut cfg.data;
        if let Some(path) = &self.data_path {
            d.kind = DataKind::Pbm;
            d.path = Some(path.clone());
        }
        set(&mut d.kind, self.data);
        set(&mut d.rows, self.rows);
        set(&mut d.cols, self.cols);
        set(&mut d.validation_fraction, self.validation_fraction);
    }
}
