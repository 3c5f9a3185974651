//! Run configuration: a TOML file, then command-line overrides.
//!
//! Every key is optional. A complete file with the defaults:
//!
//! ```toml
//! seed = 0
//! # threads = 4
//!
//! [schedule]
//! kind = "constant"        # constant | linear | file
//! a = 1.0                  # constant controls
//! b = 1.0
//! a0 = 1.0                 # linear controls, A: a0 -> a1, B: b0 -> b1
//! a1 = 0.0
//! b0 = 0.0
//! b1 = 1.0
//! # path = "schedule.csv"  # t,A,B table for kind = "file"
//! angular = false          # multiply tabulated A and B by 2π
//! a_scale = 1.0            # per-column factors applied to the table
//! b_scale = 1.0
//! # tau = 0.785            # anneal time
//! # solve_beta = 1.0       # choose the shortest tau giving this beta_integral
//! tau_range = [0.01, 20.0]
//!
//! [backend]
//! name = "dqa"             # dqa | exact | mock | pcd | remote
//! steps_per_unit_time = 1000
//! beta = 1.0               # exact
//! alpha_true = 6.0         # mock
//! k = 100                  # pcd sweeps between samples
//! # endpoint = "http://..."  # remote; falls back to ANNEAL_ENDPOINT
//!
//! [thermometry]
//! min_count = 20
//! reference = "integral"   # integral | unitary
//!
//! [beta]
//! field = 0.1              # single-spin problem unless `problem` is given
//! tau_start = 0.1
//! tau_stop = 3.0
//! tau_count = 30
//! trotter_steps = []
//! samples = 0
//! out = "beta.csv"
//!
//! [sample]
//! count = 10000
//! # rescale = 6.0          # or the path of a calibration record
//! out = "samples.json"
//!
//! [calibrate]
//! count = 100000
//! out = "calibration.json"
//!
//! [train]
//! epochs = 20
//! samples_per_epoch = 3000
//! learning_rate = 0.05
//! beta_target = 1.0
//! alpha = 1.0              # or the path of a calibration record
//! hidden = 6
//! validation_repeats = 10
//! out = "train"
//!
//! [data]
//! kind = "bas"             # bas | pbm
//! rows = 3
//! cols = 3
//! # path = "images/"       # pbm file or directory
//! validation_fraction = 0.3  # 0 validates on the training set
//! ```

use std::path::{Path, PathBuf};

use dqa_core::schedule::{load_schedule, ScheduleFamily};
use dqa_core::thermometry::CalibrationRecord;
use dqa_core::{solve_tau_for_beta, Schedule};
use serde::{Deserialize, Serialize};

use crate::error::{usage, CliResult, OrUsage};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    pub schedule: ScheduleConfig,
    pub backend: BackendConfig,
    pub thermometry: ThermometryConfig,
    pub beta: BetaSweepConfig,
    pub sample: SampleConfig,
    pub calibrate: CalibrateConfig,
    pub train: TrainSection,
    pub data: DataConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            threads: None,
            schedule: ScheduleConfig::default(),
            backend: BackendConfig::default(),
            thermometry: ThermometryConfig::default(),
            beta: BetaSweepConfig::default(),
            sample: SampleConfig::default(),
            calibrate: CalibrateConfig::default(),
            train: TrainSection::default(),
            data: DataConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleKindName {
    Constant,
    Linear,
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: ScheduleKindName,
    pub a: f64,
    pub b: f64,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub angular: bool,
    pub a_scale: f64,
    pub b_scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve_beta: Option<f64>,
    pub tau_range: [f64; 2],
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self {
            kind: ScheduleKindName::Constant,
            a: 1.0,
            b: 1.0,
            a0: 1.0,
            a1: 0.0,
            b0: 0.0,
            b1: 1.0,
            path: None,
            angular: false,
            a_scale: 1.0,
            b_scale: 1.0,
            tau: None,
            solve_beta: None,
            tau_range: [0.01, 20.0],
        }
    }
}

impl ScheduleConfig {
    /// The schedule family over τ, plus the native τ of a tabulated shape.
    pub fn family(&self) -> CliResult<(ScheduleFamily, Option<f64>)> {
        Ok(match self.kind {
            ScheduleKindName::Constant => (ScheduleFamily::Constant { a: self.a, b: self.b }, None),
            ScheduleKindName::Linear => {
                (ScheduleFamily::Linear { a0: self.a0, a1: self.a1, b0: self.b0, b1: self.b1 }, None)
            }
            ScheduleKindName::File => {
                let path = self.path.as_ref().ok_or_else(|| usage("schedule kind 'file' needs a path"))?;
                let shape = load_schedule(path, self.angular)
                    .and_then(|s| s.scaled(self.a_scale, self.b_scale))
                    .or_usage(&format!("schedule file {}", path.display()))?;
                let tau = shape.tau();
                (ScheduleFamily::Stretched { shape }, Some(tau))
            }
        })
    }

    /// Build the schedule, solving for τ when `solve_beta` is set; the
    /// chosen τ is written back so the snapshot records it.
    pub fn resolve(&mut self) -> CliResult<Schedule> {
        let (family, native_tau) = self.family()?;
        let tau = if let Some(target) = self.solve_beta {
            let [lo, hi] = self.tau_range;
            if !(lo > 0.0 && hi > lo) {
                return Err(usage(format!("tau_range [{lo}, {hi}] must be positive and increasing")));
            }
            solve_tau_for_beta(|t| family.at(t), target, (lo, hi)).or_usage("solving for the anneal time")?
        } else if let Some(tau) = self.tau.or(native_tau) {
            tau
        } else {
            return Err(usage("the schedule needs a tau or a solve_beta target"));
        };
        self.tau = Some(tau);
        family.at(tau).or_usage("schedule")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub name: String,
    pub steps_per_unit_time: usize,
    pub beta: f64,
    pub alpha_true: f64,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub endpoint: Option<String>,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self {
            name: "dqa".into(),
            steps_per_unit_time: dqa_core::dynamics::DEFAULT_STEPS_PER_UNIT_TIME,
            beta: 1.0,
            alpha_true: 6.0,
            k: 100,
            endpoint: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Reference {
    Integral,
    Unitary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThermometryConfig {
    pub min_count: u64,
    pub reference: Reference,
}

impl Default for ThermometryConfig {
    fn default() -> Self {
        Self { min_count: dqa_core::thermometry::DEFAULT_MIN_COUNT, reference: Reference::Integral }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BetaSweepConfig {
    pub field: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<PathBuf>,
    pub tau_start: f64,
    pub tau_stop: f64,
    pub tau_count: usize,
    pub trotter_steps: Vec<usize>,
    pub samples: usize,
    pub out: PathBuf,
}

impl Default for BetaSweepConfig {
    fn default() -> Self {
        Self {
            field: 0.1,
            problem: None,
            tau_start: 0.1,
            tau_stop: 3.0,
            tau_count: 30,
            trotter_steps: Vec::new(),
            samples: 0,
            out: "beta.csv".into(),
        }
    }
}

/// A calibration factor given directly or read from a calibration record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSource {
    Value(f64),
    File(PathBuf),
}

impl AlphaSource {
    pub fn parse(text: &str) -> Self {
        text.parse().map(AlphaSource::Value).unwrap_or_else(|_| AlphaSource::File(text.into()))
    }

    pub fn resolve(&self) -> CliResult<f64> {
        let alpha = match self {
            AlphaSource::Value(a) => *a,
            AlphaSource::File(path) => {
                CalibrationRecord::load(path).or_usage(&format!("calibration record {}", path.display()))?.alpha
            }
        };
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(usage(format!("alpha must be positive, got {alpha}")));
        }
        Ok(alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<PathBuf>,
    pub count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rescale: Option<AlphaSource>,
    pub out: PathBuf,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self { problem: None, count: 10_000, rescale: None, out: "samples.json".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrateConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<PathBuf>,
    pub count: usize,
    pub out: PathBuf,
}

impl Default for CalibrateConfig {
    fn default() -> Self {
        Self { problem: None, count: 100_000, out: "calibration.json".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub epochs: usize,
    pub samples_per_epoch: usize,
    pub learning_rate: f64,
    pub beta_target: f64,
    pub alpha: AlphaSource,
    pub hidden: usize,
    pub validation_repeats: usize,
    pub out: PathBuf,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            epochs: 20,
            samples_per_epoch: 3000,
            learning_rate: 0.05,
            beta_target: 1.0,
            alpha: AlphaSource::Value(1.0),
            hidden: 6,
            validation_repeats: 10,
            out: "train".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DataKind {
    Bas,
    Pbm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub kind: DataKind,
    pub rows: usize,
    pub cols: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub validation_fraction: f64,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self { kind: DataKind::Bas, rows: 3, cols: 3, path: None, validation_fraction: 0.3 }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).or_usage(&format!("config file {}", path.display()))?;
        toml::from_str(&text).or_usage(&format!("config file {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes to TOML")
    }

    /// Write the resolved configuration to `path`.
    pub fn snapshot(&self, path: &Path) -> CliResult<()> {
        std::fs::write(path, self.to_toml()).map_err(|e| dqa_core::Error::Io { path: path.into(), source: e }.into())
    }
}
