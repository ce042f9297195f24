//! Wires configurations to problems and solvers, writing one trajectory CSV
//! per solver plus a combined `summary.json`.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use submax::greedy::{continuous_greedy, GreedyConfig};
use submax::mirror::EuclideanMap;
use submax::mirror_prox::{mirror_prox, MirrorProxConfig, StepSchedule};
use submax::objective::Objective;
use submax::report::SolveReport;

use crate::config::{ExperimentConfig, ProblemKind, ScheduleKind, SolverKind};
use crate::movierec::{build_movierec_dro, parse_movielens, synthetic_ratings};
use crate::output::{summary_entry, write_summary, write_trajectory_csv};
use crate::summarization::gen_summarization;

const SYNTHETIC_USER_POOL: usize = 60;

/// Runs the configured experiment. With `dry_run` the config is validated
/// and echoed but nothing executes and nothing is written.
pub fn run_experiment(config: &ExperimentConfig, dry_run: bool) -> Result<Vec<PathBuf>> {
    config.validate()?;
    if dry_run {
        return Ok(Vec::new());
    }
    let out_dir = Path::new(&config.output_dir);
    fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create output dir {}", out_dir.display()))?;

    let reports = match config.problem {
        ProblemKind::Summarization => run_summarization(config)?,
        ProblemKind::Movierec => run_movierec(config)?,
    };

    let mut written = Vec::new();
    let mut entries = Vec::new();
    for report in &reports {
        let csv_path = out_dir.join(format!("{}_{}.csv", problem_slug(config), report.solver));
        write_trajectory_csv(&csv_path, report)?;
        entries.push(summary_entry(report, config.seed, &csv_path));
        written.push(csv_path);
    }
    written.push(write_summary(out_dir, entries)?);
    Ok(written)
}

fn problem_slug(config: &ExperimentConfig) -> &'static str {
    match config.problem {
        ProblemKind::Summarization => "summarization",
        ProblemKind::Movierec => "movierec",
    }
}

fn wants(config: &ExperimentConfig, solver: SolverKind) -> bool {
    config.solver == solver || config.solver == SolverKind::Both
}

fn run_summarization(config: &ExperimentConfig) -> Result<Vec<SolveReport<f64>>> {
    let k = config.k.unwrap_or(50);
    let budget = config.budget.unwrap_or(5.0);
    let instance = gen_summarization(k, config.seed, budget)?;
    let region = instance.region();
    let objective = instance.objective();

    let mut reports = Vec::new();
    if wants(config, SolverKind::ContinuousGreedy) {
        let mut cfg = GreedyConfig::new(config.iterations);
        cfg.record_trajectory = true;
        reports.push(continuous_greedy(&objective, &region, &cfg)?);
    }
    if wants(config, SolverKind::MirrorProx) {
        let schedule = match config.schedule {
            ScheduleKind::Fixed => {
                StepSchedule::Fixed(1.0 / (2.0 * (config.iterations as f64).sqrt()))
            }
            ScheduleKind::Theory => {
                let with_modulus = objective
                    .clone()
                    .with_estimated_modulus(&region, 2000, config.seed ^ 0x4c5f);
                let h = with_modulus
                    .modulus()
                    .expect("estimation yields a constant term");
                StepSchedule::Theory(h)
            }
        };
        let mut cfg = MirrorProxConfig::new(config.iterations, schedule);
        cfg.record_trajectory = true;
        reports.push(mirror_prox(&objective, &region, &EuclideanMap, &cfg)?);
    }
    Ok(reports)
}

fn run_movierec(config: &ExperimentConfig) -> Result<Vec<SolveReport<f64>>> {
    let n = config.n_samples.unwrap_or(10);
    let m_cap = config.m_cap.unwrap_or(50);
    let theta = config.theta.unwrap_or(0.2);
    let eps = config.eps.unwrap_or(0.01);
    let delta = config.delta.unwrap_or(1e-4);
    let budget = config.budget.unwrap_or(5.0) as usize;
    let batch = config.sample_batch.unwrap_or(10);

    let ratings = match &config.ratings_path {
        Some(path) => parse_movielens(Path::new(path))?,
        None => synthetic_ratings(SYNTHETIC_USER_POOL.max(n), m_cap.max(8), config.seed ^ 0x77),
    };
    let instance =
        build_movierec_dro(&ratings, n, theta, eps, config.seed, m_cap, budget, batch)?;
    let region = instance.region();

    let mut reports = Vec::new();
    if wants(config, SolverKind::ContinuousGreedy) {
        reports.push(submax::dro::dro_continuous_greedy(
            &instance.dro,
            &region,
            config.iterations,
            delta,
        )?);
    }
    if wants(config, SolverKind::MirrorProx) {
        reports.push(submax::dro::dro_mirror_prox(
            &instance.dro,
            &region,
            config.iterations,
            delta,
            &EuclideanMap,
        )?);
    }
    Ok(reports)
}
