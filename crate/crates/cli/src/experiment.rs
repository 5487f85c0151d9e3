//! Experiment execution: seeded repetitions, normalized hypervolume scoring,
//! and artifact output (`runs.jsonl`, `summary.csv`, front SVGs).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use imcmoead::algorithm::{self, AlgoConfig, GenerationStats, ReplacementRule};
use imcmoead::metrics::{hypervolume, HvResult};
use imcmoead::problem::{nondominated_indices, Solution};
use imcmoead::problems::{reference_front, ProblemRegistry, ProblemSpec, DEFAULT_FRONT_RESOLUTION};

use crate::baseline::random_search;
use crate::plot::emit_front_plot;
use crate::summary::{summarize, SummaryTable};

fn default_repetitions() -> usize {
    30
}

fn default_hv_samples() -> u64 {
    1_000_000
}

/// Experiment file: problems by name, one or more algorithm configurations,
/// seeded repetitions. The first algorithm listed anchors the rank-sum
/// verdicts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub problems: Vec<String>,
    pub algorithms: Vec<AlgorithmSpec>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_hv_samples")]
    pub hv_samples: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgorithmKind {
    #[default]
    Imcmoead,
    RandomSearch,
}

/// One algorithm configuration; optional fields fall back to the driver
/// defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgorithmSpec {
    pub id: String,
    #[serde(default)]
    pub kind: AlgorithmKind,
    pub population_size: usize,
    pub max_evaluations: usize,
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default)]
    pub group_size: Option<usize>,
    #[serde(default = "default_eq_tol")]
    pub eq_tol: f64,
    #[serde(default)]
    pub mutation_probability: Option<f64>,
    #[serde(default = "default_eta")]
    pub mutation_eta: f64,
    #[serde(default)]
    pub neighborhood_size: Option<usize>,
    #[serde(default)]
    pub replacement: ReplacementRule,
}

fn default_clusters() -> usize {
    10
}

fn default_eq_tol() -> f64 {
    imcmoead::problem::DEFAULT_EQ_TOL
}

fn default_eta() -> f64 {
    20.0
}

impl AlgorithmSpec {
    fn to_algo_config(&self, seed: u64) -> AlgoConfig {
        AlgoConfig {
            population_size: self.population_size,
            clusters: self.clusters,
            group_size: self.group_size,
            max_evaluations: self.max_evaluations,
            eq_tol: self.eq_tol,
            mutation_probability: self.mutation_probability,
            mutation_eta: self.mutation_eta,
            neighborhood_size: self.neighborhood_size,
            replacement: self.replacement,
            kmeans_max_iters: 50,
            seed,
        }
    }
}

/// One completed run. `hv` holds the normalized hypervolume computed against
/// the experiment-wide normalization front for the problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub problem: String,
    pub config_id: String,
    pub seed: u64,
    /// Decision vectors of the final feasible nondominated front.
    pub front_x: Vec<Vec<f64>>,
    /// Objective vectors of the final feasible nondominated front.
    pub front_f: Vec<Vec<f64>>,
    pub hv: Option<HvResult>,
    pub wall_time_ms: f64,
    pub generations: Vec<GenerationStats>,
}

/// A run either produced a record or is logged as failed; failures never
/// abort the experiment.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum RunOutcome {
    Ok(RunRecord),
    Failed {
        problem: String,
        config_id: String,
        seed: u64,
        error: String,
    },
}

impl RunOutcome {
    pub fn record(&self) -> Option<&RunRecord> {
        match self {
            RunOutcome::Ok(r) => Some(r),
            RunOutcome::Failed { .. } => None,
        }
    }
}

/// Componentwise minimum and maximum over a nonempty point set.
pub fn objective_bounds(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let m = points[0].len();
    let mut ideal = vec![f64::INFINITY; m];
    let mut nadir = vec![f64::NEG_INFINITY; m];
    for p in points {
        for j in 0..m {
            ideal[j] = ideal[j].min(p[j]);
            nadir[j] = nadir[j].max(p[j]);
        }
    }
    (ideal, nadir)
}

/// Maps points into `[0, 1]` per coordinate given ideal and nadir; degenerate
/// coordinates pass through shifted only.
pub fn normalize_points(points: &[Vec<f64>], ideal: &[f64], nadir: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|p| {
            p.iter()
                .zip(ideal.iter().zip(nadir))
                .map(|(&v, (&lo, &hi))| {
                    let span = if hi > lo { hi - lo } else { 1.0 };
                    (v - lo) / span
                })
                .collect()
        })
        .collect()
}

/// Runs `repetitions x problems x algorithms` seeded runs (seed = base seed +
/// repetition, shared across configurations for paired comparisons), then
/// scores each run's front by hypervolume in the objective space normalized
/// by the union of the problem's reference front and every observed front,
/// with the reference point at 1.1 per coordinate.
pub fn run_experiment(
    registry: &ProblemRegistry,
    config: &ExperimentConfig,
    snapshots_dir: Option<&Path>,
) -> anyhow::Result<Vec<RunOutcome>> {
    if config.problems.is_empty() || config.algorithms.is_empty() {
        anyhow::bail!("experiment needs at least one problem and one algorithm");
    }
    if config.repetitions == 0 {
        anyhow::bail!("repetitions must be at least 1");
    }
    let problems: Vec<_> = config
        .problems
        .iter()
        .map(|name| registry.get(name))
        .collect::<Result<Vec<_>, _>>()?;

    if let Some(dir) = snapshots_dir {
        fs::create_dir_all(dir)?;
    }

    // deterministic run order: problem, then algorithm, then repetition
    struct RunSpec<'a> {
        problem: &'a ProblemSpec,
        algorithm: &'a AlgorithmSpec,
        seed: u64,
    }
    let mut specs = Vec::new();
    for problem in &problems {
        for algorithm in &config.algorithms {
            for rep in 0..config.repetitions {
                specs.push(RunSpec {
                    problem,
                    algorithm,
                    seed: config.seed + rep as u64,
                });
            }
        }
    }

    let mut outcomes: Vec<RunOutcome> = specs
        .par_iter()
        .map(|spec| execute_run(spec.problem, spec.algorithm, spec.seed, snapshots_dir))
        .collect();

    score_outcomes(registry, config, &mut outcomes);
    Ok(outcomes)
}

fn execute_run(
    problem: &ProblemSpec,
    algorithm: &AlgorithmSpec,
    seed: u64,
    snapshots_dir: Option<&Path>,
) -> RunOutcome {
    let started = Instant::now();
    let result: Result<(Vec<Solution>, Vec<GenerationStats>), imcmoead::Error> =
        match algorithm.kind {
            AlgorithmKind::Imcmoead => {
                let algo_config = algorithm.to_algo_config(seed);
                let run_result = match snapshots_dir {
                    None => algorithm::run(problem, &algo_config),
                    Some(dir) => {
                        let path = dir.join(format!(
                            "{}__{}__{}.csv",
                            sanitize(&problem.name),
                            sanitize(&algorithm.id),
                            seed
                        ));
                        run_with_snapshots(problem, &algo_config, &path)
                    }
                };
                run_result.map(|(population, generations)| {
                    let front: Vec<Solution> = population
                        .feasible_nondominated()
                        .into_iter()
                        .cloned()
                        .collect();
                    (front, generations)
                })
            }
            AlgorithmKind::RandomSearch => random_search(
                problem,
                algorithm.population_size,
                algorithm.max_evaluations,
                algorithm.eq_tol,
                seed,
            ),
        };
    let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok((front, generations)) => RunOutcome::Ok(RunRecord {
            problem: problem.name.clone(),
            config_id: algorithm.id.clone(),
            seed,
            front_x: front.iter().map(|s| s.x.clone()).collect(),
            front_f: front.iter().map(|s| s.f.clone()).collect(),
            hv: None,
            wall_time_ms,
            generations,
        }),
        Err(error) => RunOutcome::Failed {
            problem: problem.name.clone(),
            config_id: algorithm.id.clone(),
            seed,
            error: error.to_string(),
        },
    }
}

fn run_with_snapshots(
    problem: &ProblemSpec,
    config: &AlgoConfig,
    path: &Path,
) -> Result<(imcmoead::Population, Vec<GenerationStats>), imcmoead::Error> {
    let mut rows = String::from("generation,member,feasible,cv,objectives\n");
    let result = algorithm::run_with_observer(problem, config, |population, stats| {
        for (i, s) in population.members.iter().enumerate() {
            let objectives = s
                .f
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";");
            rows.push_str(&format!(
                "{},{},{},{},{}\n",
                stats.generation, i, s.feasible, s.cv, objectives
            ));
        }
    });
    if let Err(e) = fs::write(path, rows) {
        warn!("failed to write snapshot {}: {e}", path.display());
    }
    result
}

// Fills `hv` on every successful record, per problem.
fn score_outcomes(
    registry: &ProblemRegistry,
    config: &ExperimentConfig,
    outcomes: &mut [RunOutcome],
) {
    let mut by_problem: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, outcome) in outcomes.iter().enumerate() {
        if let RunOutcome::Ok(record) = outcome {
            by_problem.entry(record.problem.clone()).or_default().push(i);
        }
    }

    for (problem_name, indices) in by_problem {
        let front = registry.get(&problem_name).ok().and_then(|spec| {
            match reference_front(&spec, default_eq_tol(), DEFAULT_FRONT_RESOLUTION) {
                Ok(front) => Some(front),
                Err(e) => {
                    warn!("no reference front for {problem_name}: {e}; normalizing by observed fronts only");
                    None
                }
            }
        });

        // normalization set: reference front united with all observed fronts
        let mut pool: Vec<Vec<f64>> = front.unwrap_or_default();
        for &i in &indices {
            if let RunOutcome::Ok(record) = &outcomes[i] {
                pool.extend(record.front_f.iter().cloned());
            }
        }
        let pool: Vec<Vec<f64>> = nondominated_indices(&pool)
            .into_iter()
            .map(|i| pool[i].clone())
            .collect();

        for (offset, &i) in indices.iter().enumerate() {
            let RunOutcome::Ok(record) = &mut outcomes[i] else {
                continue;
            };
            let hv = if pool.is_empty() || record.front_f.is_empty() {
                zero_hv(record.front_f.first().map_or(2, |p| p.len()))
            } else {
                let (ideal, nadir) = objective_bounds(&pool);
                let normalized = normalize_points(&record.front_f, &ideal, &nadir);
                let m = ideal.len();
                let mut rng = ChaCha8Rng::seed_from_u64(
                    config
                        .seed
                        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
                        .wrapping_add(offset as u64),
                );
                hypervolume(&normalized, &vec![1.1; m], config.hv_samples, &mut rng)
            };
            record.hv = Some(hv);
        }
    }
}

fn zero_hv(m: usize) -> HvResult {
    HvResult {
        value: 0.0,
        method: imcmoead::metrics::HvMethod::Exact,
        samples: None,
        std_error: None,
        reference: vec![1.1; m],
    }
}

/// Lowercases and maps anything outside `[a-z0-9.-]` to `-`.
pub fn sanitize(name: &str) -> String {
    name.to_lowercase()
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

/// Writes `runs.jsonl`, `summary.csv`, and one front SVG per
/// (problem, configuration) pair, plotting that pair's best-hypervolume run.
pub fn write_outputs(
    dir: &Path,
    registry: &ProblemRegistry,
    outcomes: &[RunOutcome],
    table: &SummaryTable,
) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;

    let mut jsonl = fs::File::create(dir.join("runs.jsonl")).context("create runs.jsonl")?;
    for outcome in outcomes {
        serde_json::to_writer(&mut jsonl, outcome)?;
        jsonl.write_all(b"\n")?;
    }

    fs::write(dir.join("summary.csv"), table.to_csv()).context("write summary.csv")?;
    write_plots(dir, registry, outcomes)?;
    Ok(())
}

/// Emits the best-hypervolume run's front per (problem, configuration).
pub fn write_plots(
    dir: &Path,
    registry: &ProblemRegistry,
    outcomes: &[RunOutcome],
) -> anyhow::Result<()> {
    let mut best: BTreeMap<(String, String), &RunRecord> = BTreeMap::new();
    for outcome in outcomes {
        if let RunOutcome::Ok(record) = outcome {
            let key = (record.problem.clone(), record.config_id.clone());
            let value = record.hv.as_ref().map_or(0.0, |h| h.value);
            let better = best
                .get(&key)
                .is_none_or(|cur| cur.hv.as_ref().map_or(0.0, |h| h.value) < value);
            if better {
                best.insert(key, record);
            }
        }
    }
    for ((problem_name, config_id), record) in best {
        let reference = registry.get(&problem_name).ok().and_then(|spec| {
            reference_front(&spec, default_eq_tol(), 10_000).ok()
        });
        let svg = emit_front_plot(&record.front_f, reference.as_deref());
        let path = dir.join(format!(
            "front_{}_{}.svg",
            sanitize(&problem_name),
            sanitize(&config_id)
        ));
        fs::write(path, svg)?;
    }
    Ok(())
}

/// Reads back a `runs.jsonl` produced by [`write_outputs`].
pub fn read_outcomes(path: &Path) -> anyhow::Result<Vec<RunOutcome>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("read {}", path.display()))?;
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| serde_json::from_str(line).context("parse runs.jsonl line"))
        .collect()
}

/// Convenience: run, summarize, and write all artifacts. Returns the number
/// of failed runs.
pub fn run_and_write(
    registry: &ProblemRegistry,
    config: &ExperimentConfig,
    out_dir: &Path,
    snapshots: bool,
) -> anyhow::Result<usize> {
    let snapshots_dir = snapshots.then(|| out_dir.join("snapshots"));
    let outcomes = run_experiment(registry, config, snapshots_dir.as_deref())?;
    let records: Vec<&RunRecord> = outcomes.iter().filter_map(|o| o.record()).collect();
    let table = summarize(&records);
    write_outputs(out_dir, registry, &outcomes, &table)?;
    Ok(outcomes.len() - records.len())
}
