use dqa_core::beta_integral;
use dqa_core::dynamics::{beta_unitary, MAX_QUBITS};
use dqa_core::sampling::SampleTarget;
use dqa_core::thermometry::compute_alpha;

use super::{build_sampler, check_backend, load_problem, measure_beta, sibling};
use crate::config::{Reference, RunConfig};
use crate::error::{usage, CliResult};

/// Sample a problem, compare its measured β with the schedule's reference
/// β and store the ratio.
pub fn cmd_calibrate(mut cfg: RunConfig) -> CliResult<()> {
    check_backend(&cfg)?;
    if cfg.backend.name == "pcd" {
        return Err(usage("the pcd backend samples RBMs only and cannot be calibrated"));
    }
    let problem = load_problem(cfg.calibrate.problem.as_deref())?;
    let reference = cfg.thermometry.reference;
    if reference == Reference::Unitary && problem.n() > MAX_QUBITS {
        return Err(usage(format!(
            "the unitary reference simulates at most {MAX_QUBITS} qubits; the problem has {}",
            problem.n()
        )));
    }
    let schedule = cfg.schedule.resolve()?;
    let mut sampler = build_sampler(&cfg, Some(&schedule), 1.0)?;
    let samples = sampler.sample(SampleTarget::Ising(&problem), cfg.calibrate.count, cfg.seed)?;
    let empirical = measure_beta(&samples, &problem, cfg.thermometry.min_count)?.estimate;
    let beta_reference = match reference {
        Reference::Integral => beta_integral(&schedule)?,
        Reference::Unitary => beta_unitary(&problem, &schedule, cfg.backend.steps_per_unit_time)?,
    };
    let record = compute_alpha(empirical, beta_reference)?;
    let out = cfg.calibrate.out.clone();
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| dqa_core::Error::Io { path: dir.into(), source: e })?;
    }
    record.save(&out)?;
    cfg.snapshot(&sibling(&out, "config.toml"))
}
