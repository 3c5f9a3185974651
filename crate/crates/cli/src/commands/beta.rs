use std::fmt::Write as _;

use dqa_core::dynamics::{beta_of_state, beta_unitary, evolve_trotter};
use dqa_core::rng::derive_seed;
use dqa_core::sampling::SampleTarget;
use dqa_core::{beta_integral, IsingProblem};
use rayon::prelude::*;

use super::{build_sampler, check_backend, load_problem, measure_beta, sibling, write_text};
use crate::config::RunConfig;
use crate::error::{usage, CliResult};

/// Tabulate every β estimator over an evenly spaced sweep of anneal times.
pub fn cmd_beta(mut cfg: RunConfig) -> CliResult<()> {
    check_backend(&cfg)?;
    let sweep = cfg.beta.clone();
    if sweep.tau_count == 0 || !(sweep.tau_start > 0.0 && sweep.tau_stop >= sweep.tau_start) {
        return Err(usage("the tau sweep needs 0 < tau_start <= tau_stop and tau_count >= 1"));
    }
    if sweep.samples > 0 && cfg.backend.name == "pcd" {
        return Err(usage("the empirical column needs an annealer backend, not pcd"));
    }
    let problem = match &sweep.problem {
        Some(path) => load_problem(Some(path))?,
        None => IsingProblem::single_field(sweep.field).map_err(|e| usage(format!("field: {e}")))?,
    };
    let (family, _) = cfg.schedule.family()?;
    cfg.schedule.tau = None;
    cfg.schedule.solve_beta = None;

    let taus: Vec<f64> = (0..sweep.tau_count)
        .map(|i| match sweep.tau_count {
            1 => sweep.tau_start,
            n => sweep.tau_start + (sweep.tau_stop - sweep.tau_start) * i as f64 / (n - 1) as f64,
        })
        .collect();
    let spu = cfg.backend.steps_per_unit_time;
    let rows: Vec<Vec<f64>> = taus
        .par_iter()
        .enumerate()
        .map(|(i, &tau)| -> CliResult<Vec<f64>> {
            let schedule = family.at(tau)?;
            let mut row = vec![tau, beta_integral(&schedule)?.beta, beta_unitary(&problem, &schedule, spu)?.beta];
            for &n in &sweep.trotter_steps {
                let state = evolve_trotter(&problem, &schedule, n)?;
                row.push(beta_of_state(&problem, &state)?.beta);
            }
            if sweep.samples > 0 {
                let mut sampler = build_sampler(&cfg, Some(&schedule), 1.0)?;
                let samples =
                    sampler.sample(SampleTarget::Ising(&problem), sweep.samples, derive_seed(cfg.seed, i as u64))?;
                row.push(measure_beta(&samples, &problem, cfg.thermometry.min_count)?.estimate.beta);
            }
            Ok(row)
        })
        .collect::<CliResult<_>>()?;

    let mut header = vec!["tau".to_string(), "beta_integral".into(), "beta_unitary".into()];
    header.extend(sweep.trotter_steps.iter().map(|n| format!("beta_trotter_{n}")));
    if sweep.samples > 0 {
        header.push("beta_empirical".into());
    }
    let mut csv = header.join(",") + "\n";
    for row in rows {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        writeln!(csv, "{}", cells.join(",")).expect("writing to a String");
    }
    write_text(&sweep.out, &csv)?;
    cfg.snapshot(&sibling(&sweep.out, "config.toml"))
}
