use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use iotsense::consensus::{
    admm_central, admm_decentralized, quadratic_objective, ConsensusConfig, ConsensusResult, Estimate,
    LeastSquaresObjective, LocalObjective, Topology,
};
use iotsense::io::{load_mask, load_matrix, save_mask, save_matrix};
use iotsense::kernel::linear::best_line_sweep;
use iotsense::kernel::{gram, krr_train, KernelSpec};
use iotsense::lowrank::{masked_rpca, pca_denoise, rpca, RecoveryProblem, RecoveryResult, SolverConfig, SPARSITY_THRESHOLD};
use iotsense::metrics::{anomaly_f1, relative_error};
use iotsense::report::RunReport;
use iotsense::scenario::{
    circle_annulus, consensus_targets, fusion_experiment, generate_traffic, least_squares_agents, FusionScenario,
    ScenarioSpec,
};
use iotsense::{Mask, Matrix};

use crate::{
    Command, Common, ConsensusArgs, DenoiseArgs, FuseArgs, GenerateArgs, KernelArgs, KernelKind, ObjectiveKind,
    RecoveryArgs, SolverFlags,
};

pub enum Status {
    Done,
    NotConverged,
}

pub fn run(command: Command) -> Result<Status> {
    match command {
        Command::Generate(args) => generate(args),
        Command::PcaDenoise(args) => denoise(args),
        Command::Rpca(args) => recover(args, false),
        Command::Complete(args) => recover(args, true),
        Command::Fuse(args) => fuse(args),
        Command::Kernel(args) => kernel(args),
        Command::Consensus(args) => consensus(args),
    }
}

const OBSERVED: &str = "observed.csv";
const MASK: &str = "mask.csv";
const TRUTH_X: &str = "truth_x.csv";
const TRUTH_A: &str = "truth_a.csv";
const SCENARIO: &str = "scenario.json";

fn generate(args: GenerateArgs) -> Result<Status> {
    let spec = ScenarioSpec {
        rows: args.rows,
        cols: args.cols,
        rank: args.rank,
        anomaly_frac: args.anomaly_frac,
        noise_sigma: args.noise,
        missing_frac: args.missing_frac,
        anomaly_scale: args.anomaly_scale,
        seed: args.seed,
    };
    let data = generate_traffic(&spec)?;
    let dir = &args.output;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    save_matrix(dir.join(OBSERVED), &data.observed, Some(&data.mask), args.header)?;
    save_mask(dir.join(MASK), &data.mask)?;
    save_matrix(dir.join(TRUTH_X), &data.ground_truth_x, None, args.header)?;
    save_matrix(dir.join(TRUTH_A), &data.ground_truth_a, None, args.header)?;
    fs::write(dir.join(SCENARIO), serde_json::to_string_pretty(&spec)?)?;
    println!(
        "wrote {}x{} dataset (rank {}, {} anomalies, {} observed) to {}",
        spec.rows,
        spec.cols,
        spec.rank,
        spec.anomaly_count(),
        data.mask.len(),
        dir.display()
    );
    Ok(Status::Done)
}

struct Input {
    observed: Matrix,
    mask: Mask,
    truth_x: Option<Matrix>,
    truth_a: Option<Matrix>,
}

/// Reads a matrix file, or a `generate` directory with optional truth files.
fn load_input(path: &Path, explicit_mask: Option<&PathBuf>, header: bool) -> Result<Input> {
    if !path.exists() {
        bail!("input {} does not exist", path.display());
    }
    let (file, dir) = if path.is_dir() {
        (path.join(OBSERVED), Some(path))
    } else {
        (path.to_path_buf(), None)
    };
    let (observed, implicit) = load_matrix(&file, header).with_context(|| format!("reading {}", file.display()))?;
    let mask = match explicit_mask {
        Some(m) => load_mask(m).with_context(|| format!("reading {}", m.display()))?,
        None => implicit,
    };
    if mask.shape() != observed.shape() {
        bail!("mask is {:?} but the matrix is {:?}", mask.shape(), observed.shape());
    }
    let truth = |name: &str| -> Result<Option<Matrix>> {
        match dir.map(|d| d.join(name)).filter(|p| p.exists()) {
            Some(p) => Ok(Some(load_matrix(&p, header).with_context(|| format!("reading {}", p.display()))?.0)),
            None => Ok(None),
        }
    };
    Ok(Input {
        observed,
        mask,
        truth_x: truth(TRUTH_X)?,
        truth_a: truth(TRUTH_A)?,
    })
}

fn emit(report: &RunReport, output: Option<&PathBuf>) -> Result<()> {
    let text = report.to_json()?;
    match output {
        Some(path) => fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn finish(report: &RunReport, common: &Common) -> Result<Status> {
    emit(report, common.output.as_ref())?;
    Ok(if common.strict && !report.converged {
        Status::NotConverged
    } else {
        Status::Done
    })
}

fn denoise(args: DenoiseArgs) -> Result<Status> {
    let input = load_input(&args.input, None, args.common.header)?;
    if !input.mask.is_full() {
        bail!("pca-denoise needs a fully observed matrix");
    }
    let start = Instant::now();
    let x = pca_denoise(&input.observed, args.tau)?;
    let mut report = RunReport::new("pca-denoise", Some(args.common.seed))
        .param("input", &args.input)
        .param("tau", args.tau);
    report.metrics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report.metrics.relative_error = input.truth_x.as_ref().map(|t| relative_error(&x, t)).transpose()?;
    report.metrics.extra.insert("rank".into(), x.numerical_rank(1e-8)? as f64);
    if let Some(path) = &args.save_x {
        save_matrix(path, &x, None, args.common.header)?;
    }
    finish(&report, &args.common)
}

fn solver_config(flags: &SolverFlags) -> SolverConfig {
    SolverConfig {
        mu0: flags.mu0,
        rho: flags.rho,
        mu_max: flags.mu_max,
        tol: flags.tol,
        max_iters: flags.max_iters,
    }
}

fn recover(args: RecoveryArgs, masked: bool) -> Result<Status> {
    let command = if masked { "complete" } else { "rpca" };
    let input = load_input(&args.input, args.mask.as_ref(), args.common.header)?;
    if !masked && !input.mask.is_full() {
        bail!(
            "input has {} unobserved entries; use `complete` for partially observed data",
            input.mask.rows() * input.mask.cols() - input.mask.len()
        );
    }
    let config = solver_config(&args.solver);
    let mut problem = RecoveryProblem::new(input.observed.clone()).with_config(config);
    if let Some(lambda) = args.solver.lambda {
        problem = problem.with_lambda(lambda);
    }
    if masked {
        problem = problem.with_mask(input.mask.clone());
    }
    let start = Instant::now();
    let r = if masked { masked_rpca(&problem)? } else { rpca(&problem)? };
    let wall = start.elapsed().as_secs_f64() * 1e3;

    let mut report = recovery_report(command, &args, &r);
    report.metrics.wall_time_ms = wall;
    report.metrics.relative_error = input.truth_x.as_ref().map(|t| relative_error(&r.x, t)).transpose()?;
    if let Some(truth_a) = &input.truth_a {
        // anomalies on unobserved entries cannot be recovered
        let visible = iotsense::project_mask(truth_a, &input.mask)?;
        report.metrics.anomaly_f1 = Some(anomaly_f1(&r.a, &visible, SPARSITY_THRESHOLD)?);
    }
    if let Some(path) = &args.save_x {
        save_matrix(path, &r.x, None, args.common.header)?;
    }
    if let Some(path) = &args.save_a {
        save_matrix(path, &r.a, None, args.common.header)?;
    }
    finish(&report, &args.common)
}

fn recovery_report(command: &str, args: &RecoveryArgs, r: &RecoveryResult) -> RunReport {
    let s = &args.solver;
    let mut report = RunReport::new(command, Some(args.common.seed))
        .param("input", &args.input)
        .param("mask", &args.mask)
        .param("lambda", r.lambda)
        .param("mu0", s.mu0)
        .param("rho", s.rho)
        .param("mu_max", s.mu_max)
        .param("tol", s.tol)
        .param("max_iters", s.max_iters);
    report.converged = r.converged;
    report.metrics.iterations = Some(r.iterations);
    report.metrics.residual = Some(r.final_residual);
    report.metrics.extra.insert("rank_estimate".into(), r.rank_estimate as f64);
    report.metrics.extra.insert("sparsity_estimate".into(), r.sparsity_estimate as f64);
    report.metrics.extra.insert("objective".into(), r.objective().unwrap_or(f64::NAN));
    report.histories.insert("residual".into(), r.residual_history.clone());
    report
}

fn fuse(args: FuseArgs) -> Result<Status> {
    let sc = FusionScenario {
        rho: args.rho,
        shift: [args.shift0, args.shift1],
        train_size: args.train,
        trials: args.trials,
        seed: args.common.seed,
    };
    let start = Instant::now();
    let o = fusion_experiment(&sc)?;
    let mut report = RunReport::new("fuse", Some(sc.seed))
        .param("rho", sc.rho)
        .param("shift", sc.shift)
        .param("train", sc.train_size)
        .param("trials", sc.trials);
    report.metrics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    for (k, v) in [
        ("auc_copula", o.auc_copula),
        ("auc_product", o.auc_product),
        ("accuracy_copula", o.accuracy_copula),
        ("accuracy_product", o.accuracy_product),
        ("fitted_rho_h0", o.fitted_rho_h0),
        ("fitted_rho_h1", o.fitted_rho_h1),
    ] {
        report.metrics.extra.insert(k.into(), v);
    }
    finish(&report, &args.common)
}

fn kernel(args: KernelArgs) -> Result<Status> {
    let (points, labels) = circle_annulus(args.per_class, args.common.seed);
    let spec = match args.kernel {
        KernelKind::Linear => KernelSpec::Linear,
        KernelKind::Polynomial => KernelSpec::polynomial(args.degree, args.offset)?,
        KernelKind::Gaussian => match args.bandwidth {
            Some(b) => KernelSpec::gaussian(b)?,
            None => KernelSpec::gaussian_median(&points)?,
        },
    };
    let start = Instant::now();
    let model = krr_train(&spec, &points, &labels, args.ridge)?;
    let accuracy = model.accuracy(&points, &labels)?;
    let g = gram(&spec, &points)?;
    let (line_accuracy, _) = best_line_sweep(&points, &labels, 100, 100)?;
    let mut report = RunReport::new("kernel", Some(args.common.seed))
        .param("kernel", spec)
        .param("ridge", args.ridge)
        .param("per_class", args.per_class);
    report.metrics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    report.metrics.extra.insert("training_accuracy".into(), accuracy);
    report.metrics.extra.insert("best_line_accuracy".into(), line_accuracy);
    report.metrics.extra.insert("gram_min_eigenvalue".into(), g.min_eigenvalue());
    report.metrics.extra.insert("gram_trace".into(), g.trace());
    report
        .metrics
        .extra
        .insert("used_fallback".into(), f64::from(u8::from(model.used_fallback)));
    finish(&report, &args.common)
}

fn consensus(args: ConsensusArgs) -> Result<Status> {
    let topology = match &args.topology {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(Topology::from_edge_list(&text, None).with_context(|| format!("parsing {}", path.display()))?)
        }
        None => None,
    };
    let agents = topology.as_ref().map_or(args.agents, Topology::agent_count);
    if agents == 0 || args.dim == 0 {
        bail!("consensus needs at least one agent and a positive dimension");
    }
    let objectives: Vec<Box<dyn LocalObjective>> = match args.objective {
        ObjectiveKind::Quadratic => consensus_targets(agents, args.dim, args.common.seed)
            .iter()
            .map(|a| Ok(Box::new(quadratic_objective(a, 1.0)?) as Box<dyn LocalObjective>))
            .collect::<Result<_>>()?,
        ObjectiveKind::LeastSquares => least_squares_agents(agents, args.dim, 2 * args.dim + 3, args.common.seed)?
            .into_iter()
            .map(|(b, y)| Ok(Box::new(LeastSquaresObjective::new(b, y)?) as Box<dyn LocalObjective>))
            .collect::<Result<_>>()?,
    };
    let cfg = ConsensusConfig {
        mu: args.mu,
        max_rounds: args.max_rounds,
        tol: args.tol,
    };
    let start = Instant::now();
    let r = match &topology {
        Some(t) => admm_decentralized(&objectives, t, args.dim, &cfg)?,
        None => admm_central(&objectives, args.dim, &cfg)?,
    };
    let mut report = RunReport::new("consensus", Some(args.common.seed))
        .param("topology", &args.topology)
        .param("agents", agents)
        .param("objective", args.objective.to_possible_value().map(|v| v.get_name().to_string()))
        .param("dim", args.dim)
        .param("mu", args.mu)
        .param("max_rounds", args.max_rounds)
        .param("tol", args.tol);
    report.metrics.wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    fill_consensus(&mut report, &r);
    finish(&report, &args.common)
}

fn fill_consensus(report: &mut RunReport, r: &ConsensusResult) {
    report.converged = r.converged;
    report.metrics.iterations = Some(r.rounds);
    report.metrics.residual = r.primal_residual_history.last().copied();
    if let Some(dual) = r.dual_residual_history.last() {
        report.metrics.extra.insert("final_dual_residual".into(), *dual);
    }
    report.histories.insert("primal_residual".into(), r.primal_residual_history.clone());
    report.histories.insert("dual_residual".into(), r.dual_residual_history.clone());
    match &r.z {
        Estimate::Central(z) => {
            report.histories.insert("z".into(), z.clone());
        }
        Estimate::PerAgent(zs) => {
            let spread = (0..zs[0].len())
                .map(|k| {
                    let (lo, hi) = zs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), z| {
                        (lo.min(z[k]), hi.max(z[k]))
                    });
                    hi - lo
                })
                .fold(0.0, f64::max);
            report.metrics.extra.insert("max_disagreement".into(), spread);
            for (i, z) in zs.iter().enumerate() {
                report.histories.insert(format!("z_agent_{i}"), z.clone());
            }
        }
    }
}
