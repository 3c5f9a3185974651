//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Pass criterion numbers as arguments to run a subset.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use dqa_core::beta::beta_integral;
use dqa_core::dynamics::{beta_unitary_two_level, evolve_continuous, evolve_trotter, Coupling, Field};
use dqa_core::rbm::{exact_gradient, exact_log_likelihood};
use dqa_core::sampling::{burn_in, exact_boltzmann, gibbs_rbm_sample, total_variation, PcdChain, SampleRecord};
use dqa_core::schedule::ScheduleFamily;
use dqa_core::{rng, IsingProblem, Rbm, SampleSet, Schedule};
use ndarray::Array2;
use rand::Rng as _;
use serde_json::Value;

const DQA: &str = env!("CARGO_BIN_EXE_dqa");

type Check = Result<(bool, String), String>;

struct Context {
    dir: tempfile::TempDir,
    c3_files: Option<Vec<(PathBuf, Vec<u8>)>>,
    c8_files: Option<Vec<(PathBuf, Vec<u8>)>>,
}

impl Context {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

fn dqa(args: &[&str]) -> Result<(), String> {
    let out = Command::new(DQA).args(args).output().map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!("dqa {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()))
    }
}

fn read_json(path: &Path) -> Result<Value, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn number(v: &Value, pointer: &str) -> Result<f64, String> {
    v.pointer(pointer).and_then(Value::as_f64).ok_or_else(|| format!("missing {pointer}"))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

fn write_problem(path: &Path, problem: &IsingProblem) -> Result<(), String> {
    std::fs::write(path, serde_json::to_string(problem).unwrap()).map_err(|e| e.to_string())
}

fn c1(_: &mut Context) -> Check {
    let at_half_pi = beta_integral(&Schedule::constant(1.0, 1.0, std::f64::consts::FRAC_PI_2).unwrap()).unwrap().beta;
    let mut worst = (at_half_pi - 2.0).abs();
    for a in [0.25, 0.5, 1.0, 2.0, 3.0] {
        for b in [0.5, 1.0, 2.0] {
            for tau in [0.1, 0.5, 1.0, 2.0, 5.0] {
                let got = beta_integral(&Schedule::constant(a, b, tau).unwrap()).unwrap().beta;
                let want = 2.0 * b * (a * tau).sin().powi(2) / a;
                worst = worst.max((got - want).abs());
            }
        }
    }
    Ok((worst <= 1e-8, format!("beta(pi/2) = {at_half_pi:.12}, max grid error {worst:.2e}")))
}

fn c2(_: &mut Context) -> Check {
    let mut worst: f64 = 0.0;
    let mut worst_product: f64 = 0.0;
    for family in [ScheduleFamily::Constant { a: 1.0, b: 1.0 }, ScheduleFamily::standard_ramp()] {
        for k in 0..10 {
            let tau = 0.1 + 1.3 * k as f64 / 9.0;
            let schedule = family.at(tau).unwrap();
            let bi = beta_integral(&schedule).unwrap().beta;
            let h = (0.15 / bi).min(1.0);
            worst_product = worst_product.max(bi * 2.0 * h);
            let problem = IsingProblem::single_field(h).unwrap();
            let bu = beta_unitary_two_level(&problem, &schedule, 2000).map_err(|e| e.to_string())?.beta;
            worst = worst.max((bu - bi).abs() / bi);
        }
    }
    Ok((
        worst <= 0.10 && worst_product <= 0.3 + 1e-12,
        format!("max relative deviation {worst:.4}, max beta*dE {worst_product:.3}"),
    ))
}

fn random_ising(n: usize, seed: u64) -> IsingProblem {
    let mut r = rng::seeded(seed);
    let mut couplings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            couplings.push(Coupling { i, j, value: r.random_range(-0.2..0.2) });
        }
    }
    IsingProblem::new(n, couplings, vec![]).unwrap()
}

const C3_ARGS: [&str; 8] = ["--count", "1000000", "--solve-beta", "1", "--seed", "0", "--backend", "dqa"];

fn run_c3(ctx: &Context) -> Result<Vec<PathBuf>, String> {
    let dir = ctx.path("c3");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let problem = dir.join("problem.json");
    write_problem(&problem, &random_ising(8, 0))?;
    let out = dir.join("samples.json");
    let mut args = vec!["sample", "--problem", problem.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend(C3_ARGS);
    dqa(&args)?;
    Ok(vec![out.clone(), out.with_extension("beta.json"), out.with_extension("config.toml")])
}

fn snapshot(files: &[PathBuf]) -> Result<Vec<(PathBuf, Vec<u8>)>, String> {
    files
        .iter()
        .map(|p| std::fs::read(p).map(|b| (p.clone(), b)).map_err(|e| format!("{}: {e}", p.display())))
        .collect()
}

fn c3(ctx: &mut Context) -> Check {
    let files = run_c3(ctx)?;
    let report = read_json(&files[1])?;
    let beta = number(&report, "/beta/estimate/beta")?;
    let reference = number(&report, "/beta_integral")?;
    let r2 = number(&report, "/beta/fit/r_squared")?;
    let rel = (beta - reference).abs() / reference;
    ctx.c3_files = Some(snapshot(&files)?);
    Ok((rel <= 0.15 && r2 >= 0.95, format!("beta {beta:.4} vs integral {reference:.4} (rel {rel:.4}), R^2 {r2:.4}")))
}

fn random_rbm(nv: usize, nh: usize, seed: u64) -> Rbm {
    let mut r = rng::seeded(seed);
    Rbm::from_weights(Array2::from_shape_fn((nv, nh), |_| r.random_range(-1.0..1.0))).unwrap()
}

fn c4(_: &mut Context) -> Check {
    let mut tvs = Vec::new();
    for seed in 0..5u64 {
        let rbm = random_rbm(4, 3, 100 + seed);
        let exact = exact_boltzmann(&rbm.to_ising(), 1.0).unwrap();
        let mut chain = PcdChain::new(4, 3, rng::derive_seed(seed, 0));
        burn_in(&rbm, 1.0, 10_000, &mut chain, rng::derive_seed(seed, 1)).unwrap();
        let samples = gibbs_rbm_sample(&rbm, 1.0, 1_000_000, 1, &mut chain, rng::derive_seed(seed, 2)).unwrap();
        tvs.push(total_variation(&samples.dense_frequencies().unwrap(), &exact.probabilities));
    }
    let m = median(tvs.clone());
    Ok((m <= 0.02, format!("median TV {m:.5} over {tvs:.5?}")))
}

fn c5(_: &mut Context) -> Check {
    let step = 1e-5;
    let items = [0usize, 3, 5, 10, 15, 15];
    let data = SampleSet::from_records(
        4,
        items.iter().map(|&x| SampleRecord { spins: dqa_core::dynamics::spins_of(x, 4), count: 1 }).collect(),
    )
    .unwrap();
    let size = data.total() as f64;
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let rbm = random_rbm(4, 3, seed);
        let g = exact_gradient(&rbm, &data, 1.0).unwrap();
        for i in 0..4 {
            for j in 0..3 {
                let mut e = Array2::zeros((4, 3));
                e[[i, j]] = 1.0;
                let mut up = rbm.clone();
                up.apply_update(&e, step).unwrap();
                let mut down = rbm.clone();
                down.apply_update(&e, -step).unwrap();
                let fd = (exact_log_likelihood(&up, &data, 1.0).unwrap()
                    - exact_log_likelihood(&down, &data, 1.0).unwrap())
                    / (2.0 * step * size);
                worst = worst.max((fd - g[[i, j]]).abs() / g[[i, j]].abs().max(1e-3));
            }
        }
    }
    Ok((worst <= 1e-4, format!("max relative entry error {worst:.2e}")))
}

fn c6(_: &mut Context) -> Check {
    let problem = IsingProblem::new(
        3,
        vec![Coupling { i: 0, j: 1, value: 0.8 }, Coupling { i: 1, j: 2, value: -0.5 }],
        vec![Field { i: 0, h: 0.3 }, Field { i: 2, h: -0.2 }],
    )
    .unwrap();
    let tau = 1.0;
    let schedule = Schedule::constant(1.0, 1.0, tau).unwrap();
    let reference = evolve_continuous(&problem, &schedule, 20_000).unwrap();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in [8usize, 16, 32, 64, 128] {
        let err = evolve_trotter(&problem, &schedule, n).unwrap().distance(&reference);
        xs.push((tau / n as f64).ln());
        ys.push(err.ln());
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let order = sxy / sxx;
    Ok(((1.7..=2.3).contains(&order), format!("measured order {order:.3}")))
}

fn c7(ctx: &mut Context) -> Check {
    let dir = ctx.path("c7");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let problem = dir.join("two_level.json");
    write_problem(&problem, &IsingProblem::single_field(0.1).unwrap())?;
    let tau = std::f64::consts::FRAC_PI_4.to_string();
    let cal = dir.join("calibration.json");
    let common = ["--problem", problem.to_str().unwrap(), "--backend", "mock", "--alpha-true", "6", "--tau", &tau];
    let mut args = vec!["calibrate", "--count", "1000000", "--out", cal.to_str().unwrap()];
    args.extend(common);
    dqa(&args)?;
    let alpha = number(&read_json(&cal)?, "/alpha")?;
    let beta_target = beta_integral(&Schedule::constant(1.0, 1.0, std::f64::consts::FRAC_PI_4).unwrap()).unwrap().beta;

    let sample_beta = |name: &str, rescale: Option<&str>| -> Result<f64, String> {
        let out = dir.join(name);
        let mut args = vec!["sample", "--count", "1000000", "--seed", "1", "--out", out.to_str().unwrap()];
        args.extend(common);
        if let Some(r) = rescale {
            args.extend(["--rescale", r]);
        }
        dqa(&args)?;
        number(&read_json(&out.with_extension("beta.json"))?, "/beta/estimate/beta")
    };
    let rescaled = sample_beta("rescaled.json", Some(cal.to_str().unwrap()))?;
    let raw = sample_beta("raw.json", None)?;
    let alpha_err = (alpha - 6.0).abs() / 6.0;
    let rescaled_err = (rescaled - beta_target).abs() / beta_target;
    let raw_err = (raw - beta_target).abs() / beta_target;
    Ok((
        alpha_err <= 0.05 && rescaled_err <= 0.05 && raw_err >= 5.0 * 0.05,
        format!(
            "alpha {alpha:.4} (rel {alpha_err:.4}); rescaled beta {rescaled:.4} (rel {rescaled_err:.4}); unrescaled beta {raw:.4} (rel {raw_err:.3})"
        ),
    ))
}

fn train_dir(ctx: &Context, backend: &str, seed: u64) -> PathBuf {
    ctx.path(&format!("c8/{backend}-{seed}"))
}

fn run_train(ctx: &Context, backend: &str, seed: u64) -> Result<Vec<PathBuf>, String> {
    let out = train_dir(ctx, backend, seed);
    let seed = seed.to_string();
    dqa(&[
        "train",
        "--backend",
        backend,
        "--seed",
        &seed,
        "--epochs",
        "20",
        "--samples-per-epoch",
        "3000",
        "--learning-rate",
        "0.05",
        "--hidden",
        "6",
        "--data",
        "bas",
        "--rows",
        "3",
        "--cols",
        "3",
        "--k",
        "100",
        "--steps-per-unit-time",
        "250",
        "--validation-fraction",
        "0",
        "--validation-repeats",
        "10",
        "--solve-beta",
        "1",
        "--out",
        out.to_str().unwrap(),
    ])?;
    Ok(["history.csv", "checkpoint.json", "config.resolved.toml"].iter().map(|f| out.join(f)).collect())
}

/// Validation errors at epoch 0 and at the last epoch.
fn history_ends(path: &Path) -> Result<(f64, f64), String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    let errors: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).and_then(|x| x.parse().ok()).ok_or_else(|| format!("bad row {l}")))
        .collect::<Result<_, _>>()?;
    match (errors.first(), errors.last()) {
        (Some(&a), Some(&b)) if errors.len() == 21 => Ok((a, b)),
        _ => Err(format!("{}: expected 21 rows, found {}", path.display(), errors.len())),
    }
}

fn c8(ctx: &mut Context) -> Check {
    let mut finals = [Vec::new(), Vec::new()];
    let mut drops = [Vec::new(), Vec::new()];
    for seed in 0..5u64 {
        for (b, backend) in ["dqa", "pcd"].iter().enumerate() {
            let files = run_train(ctx, backend, seed)?;
            let (initial, last) = history_ends(&files[0])?;
            finals[b].push(last);
            drops[b].push(initial - last);
        }
    }
    ctx.c8_files = Some(snapshot(&c8_seed0_files(ctx))?);
    let [dqa_final, pcd_final] = finals.map(median);
    let [dqa_drop, pcd_drop] = drops.map(median);
    Ok((
        dqa_final <= pcd_final + 0.02 && dqa_drop >= 0.05 && pcd_drop >= 0.05,
        format!(
            "median final error dqa {dqa_final:.4} vs pcd {pcd_final:.4}; median decrease from epoch 0 dqa {dqa_drop:.4}, pcd {pcd_drop:.4} (need >= 0.05)"
        ),
    ))
}

fn c8_seed0_files(ctx: &Context) -> Vec<PathBuf> {
    ["dqa", "pcd"]
        .iter()
        .flat_map(|b| {
            let dir = train_dir(ctx, b, 0);
            ["history.csv", "checkpoint.json", "config.resolved.toml"].map(|f| dir.join(f))
        })
        .collect()
}

/// File bytes with wall-clock fields removed from JSON checkpoints.
fn comparable(path: &Path, bytes: &[u8]) -> Vec<u8> {
    if path.file_name().is_some_and(|n| n == "checkpoint.json") {
        let mut v: Value = serde_json::from_slice(bytes).unwrap_or(Value::Null);
        strip_wall_times(&mut v);
        serde_json::to_vec(&v).unwrap()
    } else {
        bytes.to_vec()
    }
}

fn strip_wall_times(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !k.starts_with("wall_time"));
            map.values_mut().for_each(strip_wall_times);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_wall_times),
        _ => {}
    }
}

fn c9(ctx: &mut Context) -> Check {
    if ctx.c3_files.is_none() {
        ctx.c3_files = Some(snapshot(&run_c3(ctx)?)?);
    }
    if ctx.c8_files.is_none() {
        for b in ["dqa", "pcd"] {
            run_train(ctx, b, 0)?;
        }
        ctx.c8_files = Some(snapshot(&c8_seed0_files(ctx))?);
    }
    run_c3(ctx)?;
    for b in ["dqa", "pcd"] {
        run_train(ctx, b, 0)?;
    }
    let mut differing = Vec::new();
    let before = ctx.c3_files.iter().chain(&ctx.c8_files).flatten();
    let mut compared = 0;
    for (path, bytes) in before {
        let now = std::fs::read(path).map_err(|e| e.to_string())?;
        compared += 1;
        if comparable(path, &now) != comparable(path, bytes) {
            differing.push(path.strip_prefix(ctx.dir.path()).unwrap_or(path).display().to_string());
        }
    }
    let detail = if differing.is_empty() {
        format!("{compared} result files identical on rerun")
    } else {
        format!("differing files: {}", differing.join(", "))
    };
    Ok((differing.is_empty(), detail))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn(&mut Context) -> Check); 9] = [
        (1, "closed-form beta", Duration::from_secs(1), c1),
        (2, "small-beta*E validity", Duration::from_secs(10), c2),
        (3, "Born-sampling thermometry loop", Duration::from_secs(300), c3),
        (4, "Gibbs stationarity", Duration::from_secs(120), c4),
        (5, "gradient oracle", Duration::from_secs(30), c5),
        (6, "Trotter order", Duration::from_secs(30), c6),
        (7, "calibration closure", Duration::from_secs(120), c7),
        (8, "training comparison", Duration::from_secs(1800), c8),
        (9, "determinism", Duration::MAX, c9),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut ctx = Context { dir: tempfile::tempdir().expect("temporary directory"), c3_files: None, c8_files: None };
    let mut failures = 0;
    for (id, name, limit, check) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let started = Instant::now();
        let outcome = check(&mut ctx);
        let elapsed = started.elapsed();
        let (pass, detail) = match outcome {
            Ok((_, detail)) if elapsed > limit => (false, format!("{detail}; over the {limit:?} budget")),
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        failures += usize::from(!pass);
        println!(
            "{} criterion {id} {name}: {detail} [{:.1}s]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criterion/criteria failed");
        std::process::exit(1);
    }
}
