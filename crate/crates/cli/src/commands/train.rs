use std::fmt::Write as _;

use dqa_core::datasets::{bars_and_stripes, load_pbm_images, split, BinaryDataset};
use dqa_core::rbm::{save_checkpoint, train, TrainConfig, TrainHistory};
use dqa_core::rng::derive_seed;
use dqa_core::Rbm;

use super::{build_sampler, check_backend, needs_schedule, write_text};
use crate::config::{DataKind, RunConfig};
use crate::error::{usage, CliError, CliResult, OrUsage};

const INIT_STREAM: u64 = 1;
const SPLIT_STREAM: u64 = 2;

pub const CHECKPOINT_FILE: &str = "checkpoint.json";
pub const HISTORY_FILE: &str = "history.csv";
pub const TIMING_FILE: &str = "timing.csv";
pub const CONFIG_FILE: &str = "config.resolved.toml";

fn load_data(cfg: &RunConfig) -> CliResult<BinaryDataset> {
    let d = &cfg.data;
    match d.kind {
        DataKind::Bas => bars_and_stripes(d.rows, d.cols).or_usage("bars-and-stripes dataset"),
        DataKind::Pbm => {
            let path = d.path.as_ref().ok_or_else(|| usage("data kind 'pbm' needs a path"))?;
            load_pbm_images(path).or_usage(&format!("dataset {}", path.display()))
        }
    }
}

fn history_csv(history: &TrainHistory) -> String {
    let mut csv = format!("epoch,validation_error,mean_gradient_magnitude\n0,{},\n", history.initial_validation_error);
    for r in &history.records {
        writeln!(csv, "{},{},{}", r.epoch, r.validation_error, r.mean_gradient_magnitude).expect("writing to a String");
    }
    csv
}

fn timing_csv(history: &TrainHistory, samples_per_epoch: usize) -> String {
    let mut csv = String::from("epoch,wall_time_sampling,wall_time_total,sampling_seconds_per_sample\n");
    for r in &history.records {
        let per_sample = r.wall_time_sampling / samples_per_epoch.max(1) as f64;
        writeln!(csv, "{},{},{},{}", r.epoch, r.wall_time_sampling, r.wall_time_total, per_sample)
            .expect("writing to a String");
    }
    csv
}

/// Train an RBM on the configured dataset and write its checkpoint,
/// per-epoch history, timings and resolved configuration.
pub fn cmd_train(mut cfg: RunConfig) -> CliResult<()> {
    check_backend(&cfg)?;
    let alpha = cfg.train.alpha.resolve()?;
    let data = load_data(&cfg)?;
    let (training, validation) = if cfg.data.validation_fraction == 0.0 {
        (data.clone(), data)
    } else {
        split(&data, cfg.data.validation_fraction, derive_seed(cfg.seed, SPLIT_STREAM)).or_usage("validation split")?
    };
    let t = &cfg.train;
    let config = TrainConfig {
        epochs: t.epochs,
        samples_per_epoch: t.samples_per_epoch,
        gibbs_steps: cfg.backend.k,
        learning_rate: t.learning_rate,
        beta_target: t.beta_target,
        alpha,
        seed: cfg.seed,
        backend: cfg.backend.name.clone(),
        validation_repeats: t.validation_repeats,
    };
    config.validate().or_usage("training configuration")?;
    let rbm =
        Rbm::random(training.n_units(), t.hidden, None, derive_seed(cfg.seed, INIT_STREAM)).or_usage("model shape")?;
    let schedule = needs_schedule(&cfg).then(|| cfg.schedule.resolve()).transpose()?;
    let mut sampler = build_sampler(&cfg, schedule.as_ref(), alpha)?;

    let (rbm, history, failure) = match train(rbm, &training, &config, sampler.as_mut(), &validation) {
        Ok((rbm, history)) => (rbm, history, None),
        Err(abort) => (abort.rbm, abort.history, Some(abort.error)),
    };
    let dir = cfg.train.out.clone();
    write_text(&dir.join(HISTORY_FILE), &history_csv(&history))?;
    write_text(&dir.join(TIMING_FILE), &timing_csv(&history, config.samples_per_epoch))?;
    save_checkpoint(&rbm, &config, &history, dir.join(CHECKPOINT_FILE))?;
    cfg.snapshot(&dir.join(CONFIG_FILE))?;
    match failure {
        Some(error) => Err(CliError::Runtime(error)),
        None => Ok(()),
    }
}
