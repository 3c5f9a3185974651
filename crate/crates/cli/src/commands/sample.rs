use dqa_core::beta_integral;
use dqa_core::sampling::SampleTarget;
use dqa_core::thermometry::rescale_couplings;
use serde::Serialize;

use super::{
    build_sampler, check_backend, load_problem, measure_beta, needs_schedule, sibling, write_json, BetaReport,
};
use crate::config::RunConfig;
use crate::error::{usage, CliResult};

#[derive(Serialize)]
struct SampleReport {
    backend: String,
    count: u64,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta_integral: Option<f64>,
    rescale_alpha: f64,
    beta: BetaReport,
}

/// Sample a problem, write the samples and a thermometry sidecar.
pub fn cmd_sample(mut cfg: RunConfig) -> CliResult<()> {
    check_backend(&cfg)?;
    if cfg.backend.name == "pcd" {
        return Err(usage("the pcd backend samples RBMs only; use `train`"));
    }
    let problem = load_problem(cfg.sample.problem.as_deref())?;
    let alpha = cfg.sample.rescale.as_ref().map(|r| r.resolve()).transpose()?.unwrap_or(1.0);
    let schedule = needs_schedule(&cfg).then(|| cfg.schedule.resolve()).transpose()?;
    let programmed = rescale_couplings(&problem, alpha)?;
    let mut sampler = build_sampler(&cfg, schedule.as_ref(), alpha)?;
    let samples = sampler.sample(SampleTarget::Ising(&programmed), cfg.sample.count, cfg.seed)?;
    let beta = measure_beta(&samples, &problem, cfg.thermometry.min_count)?;
    let report = SampleReport {
        backend: cfg.backend.name.clone(),
        count: samples.total(),
        seed: cfg.seed,
        tau: schedule.as_ref().map(|s| s.tau()),
        beta_integral: schedule.as_ref().map(beta_integral).transpose()?.map(|b| b.beta),
        rescale_alpha: alpha,
        beta,
    };
    let out = cfg.sample.out.clone();
    write_json(&out, &samples)?;
    write_json(&sibling(&out, "beta.json"), &report)?;
    cfg.snapshot(&sibling(&out, "config.toml"))
}
