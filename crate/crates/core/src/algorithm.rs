//! The optimization driver: initialization, per-generation clustering and
//! inverse-model reproduction, and constraint-aware global replacement.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cluster::{kmeans_objective_space, tournament_select};
use crate::error::{Error, Result};
use crate::invmodel::{polynomial_mutation, random_grouping, SubpopModel};
use crate::problem::{Evaluator, Population, Problem, ReferencePoint, Solution};
use crate::scalarize::{best_weight_index, tchebycheff, ScalarizationContext};
use crate::weights::WeightLattice;

/// Which survivor rule the replacement pass applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReplacementRule {
    /// Feasibility first: a feasible solution always beats an infeasible one,
    /// two infeasible compare by violation, two feasible by Tchebycheff.
    #[default]
    FeasibilityScenarios,
    /// The offspring must be no worse on both Tchebycheff value and
    /// violation simultaneously. Kept for comparison; it refuses feasible
    /// offspring with a worse scalarization than an infeasible incumbent.
    Conjunctive,
}

/// Driver settings. `group_size` and `mutation_probability` default per
/// problem: groups of 3 (2 when the problem has two variables) and `1/d`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgoConfig {
    /// Population (and weight-vector) count `N`.
    pub population_size: usize,
    /// k-means cluster count `K`.
    pub clusters: usize,
    /// Max decision variables per inverse-model group `L`.
    pub group_size: Option<usize>,
    /// Function-evaluation budget.
    pub max_evaluations: usize,
    /// Equality-constraint tolerance.
    pub eq_tol: f64,
    /// Per-coordinate mutation probability; `None` means `1/d`.
    pub mutation_probability: Option<f64>,
    /// Polynomial-mutation distribution index.
    pub mutation_eta: f64,
    /// Neighborhood size `T`; `None` means `max(2, round(0.1 N))`.
    pub neighborhood_size: Option<usize>,
    pub replacement: ReplacementRule,
    /// Lloyd iteration cap per generation.
    pub kmeans_max_iters: usize,
    pub seed: u64,
}

impl AlgoConfig {
    pub fn new(population_size: usize, max_evaluations: usize, seed: u64) -> Self {
        Self {
            population_size,
            clusters: 10,
            group_size: None,
            max_evaluations,
            eq_tol: crate::problem::DEFAULT_EQ_TOL,
            mutation_probability: None,
            mutation_eta: 20.0,
            neighborhood_size: None,
            replacement: ReplacementRule::default(),
            kmeans_max_iters: 50,
            seed,
        }
    }

    fn group_size_for(&self, variables: usize) -> usize {
        self.group_size
            .unwrap_or(if variables == 2 { 2 } else { 3 })
            .max(1)
    }

    fn mutation_probability_for(&self, variables: usize) -> f64 {
        self.mutation_probability
            .unwrap_or(1.0 / variables as f64)
            .clamp(0.0, 1.0)
    }
}

/// Per-generation progress counters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: usize,
    pub feasible: usize,
    pub best_cv: f64,
    pub mean_cv: f64,
    /// Function evaluations consumed so far.
    pub evaluations: u64,
    /// Hypervolume of the feasible nondominated front; left empty by the
    /// driver and filled by harnesses that track it.
    pub hypervolume: Option<f64>,
}

impl GenerationStats {
    fn measure(generation: usize, population: &Population, evaluations: u64) -> Self {
        let n = population.len() as f64;
        let best_cv = population
            .members
            .iter()
            .map(|s| s.cv)
            .fold(f64::INFINITY, f64::min);
        let mean_cv = population.members.iter().map(|s| s.cv).sum::<f64>() / n;
        Self {
            generation,
            feasible: population.feasible_count(),
            best_cv,
            mean_cv,
            evaluations,
            hypervolume: None,
        }
    }
}

fn offspring_wins(
    offspring: &Solution,
    incumbent: &Solution,
    lambda: &[f64],
    z: &[f64],
    rule: ReplacementRule,
) -> bool {
    match rule {
        ReplacementRule::FeasibilityScenarios => {
            match (offspring.feasible, incumbent.feasible) {
                (false, true) => false,
                (true, false) => true,
                (false, false) => offspring.cv < incumbent.cv,
                (true, true) => {
                    tchebycheff(&offspring.f, lambda, z) < tchebycheff(&incumbent.f, lambda, z)
                }
            }
        }
        ReplacementRule::Conjunctive => {
            tchebycheff(&offspring.f, lambda, z) <= tchebycheff(&incumbent.f, lambda, z)
                && offspring.cv <= incumbent.cv
        }
    }
}

/// Survivor of an offspring/incumbent comparison on one subproblem. All ties
/// keep the incumbent.
pub fn replace_with_constraints<'a>(
    offspring: &'a Solution,
    incumbent: &'a Solution,
    lambda: &[f64],
    z: &[f64],
    rule: ReplacementRule,
) -> &'a Solution {
    if offspring_wins(offspring, incumbent, lambda, z, rule) {
        offspring
    } else {
        incumbent
    }
}

/// Assigns the offspring to its best-matching weight vector and lets it
/// challenge every incumbent in that weight's neighborhood, in ascending
/// slot order. Returns the number of slots replaced.
pub fn global_replacement_pass(
    offspring: &Solution,
    population: &mut Population,
    lattice: &WeightLattice,
    z: &ReferencePoint,
    rule: ReplacementRule,
) -> usize {
    let ctx = ScalarizationContext::new(lattice, z);
    let best = best_weight_index(&offspring.f, &ctx);
    let mut slots = lattice.neighborhoods[best].clone();
    slots.sort_unstable();
    let mut replaced = 0;
    for j in slots {
        if offspring_wins(offspring, &population.members[j], &lattice.weights[j], &z.z, rule) {
            population.members[j] = offspring.clone();
            replaced += 1;
        }
    }
    replaced
}

/// Runs the optimizer to budget exhaustion, returning the final population
/// and per-generation statistics.
pub fn run(problem: &dyn Problem, config: &AlgoConfig) -> Result<(Population, Vec<GenerationStats>)> {
    run_with_observer(problem, config, |_, _| {})
}

/// As [`run`], invoking `observer` with the population after initialization
/// and after each generation's replacement pass.
pub fn run_with_observer<F>(
    problem: &dyn Problem,
    config: &AlgoConfig,
    mut observer: F,
) -> Result<(Population, Vec<GenerationStats>)>
where
    F: FnMut(&Population, &GenerationStats),
{
    let n = config.population_size;
    if n == 0 {
        return Err(Error::Config("population size must be positive".into()));
    }
    if config.clusters == 0 {
        return Err(Error::Config("cluster count must be positive".into()));
    }
    if config.max_evaluations < n {
        return Err(Error::BudgetTooSmall {
            budget: config.max_evaluations,
            population: n,
        });
    }
    let d = problem.variables();
    let m = problem.objectives();
    let group_size = config.group_size_for(d);
    let pm = config.mutation_probability_for(d);
    let (lower, upper) = (problem.lower(), problem.upper());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let evaluator = Evaluator::new(problem, config.eq_tol);
    let lattice = WeightLattice::for_population(m, n, config.neighborhood_size)?;

    // uniform initialization in the box
    let mut members = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = lower
            .iter()
            .zip(upper)
            .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
            .collect();
        members.push(evaluator.evaluate(&x)?);
    }
    let mut population = Population { members };
    let mut z = ReferencePoint::from_objectives(population.members.iter().map(|s| s.f.as_slice()));

    let mut stats = vec![GenerationStats::measure(0, &population, evaluator.evaluations())];
    observer(&population, &stats[0]);

    let mut generation = 0;
    while evaluator.evaluations() < config.max_evaluations as u64 {
        generation += 1;
        let remaining = config.max_evaluations as u64 - evaluator.evaluations();
        let quota = (remaining as usize).min(n);

        let partition =
            kmeans_objective_space(&population, config.clusters, config.kmeans_max_iters, &mut rng);

        // reproduce cluster by cluster until the generation quota is met
        let mut offspring: Vec<Solution> = Vec::with_capacity(quota);
        for cluster in 0..partition.k {
            if offspring.len() == quota {
                break;
            }
            let member_indices = partition.members_of(cluster);
            if member_indices.is_empty() {
                continue;
            }
            let want = member_indices.len().min(quota - offspring.len());
            let parents: Vec<Solution> = member_indices
                .iter()
                .map(|&i| population.members[i].clone())
                .collect();

            let raw: Vec<Vec<f64>> = if parents.len() >= 2 {
                let training = tournament_select(&parents, parents.len(), &mut rng);
                let plan = random_grouping(m, d, group_size, &mut rng);
                match SubpopModel::fit(&training, plan) {
                    Ok(model) => model.sample(problem, want, &mut rng),
                    // degenerate model: fall back to mutating parent copies
                    Err(_) => (0..want)
                        .map(|i| parents[i % parents.len()].x.clone())
                        .collect(),
                }
            } else {
                (0..want).map(|_| parents[0].x.clone()).collect()
            };

            for x in raw {
                let mutated = polynomial_mutation(&x, lower, upper, pm, config.mutation_eta, &mut rng);
                offspring.push(evaluator.evaluate(&mutated)?);
            }
        }

        z.update(offspring.iter().map(|s| s.f.as_slice()));
        for child in &offspring {
            global_replacement_pass(child, &mut population, &lattice, &z, config.replacement);
        }

        let generation_stats =
            GenerationStats::measure(generation, &population, evaluator.evaluations());
        observer(&population, &generation_stats);
        stats.push(generation_stats);
    }

    Ok((population, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::Evaluation;
    use crate::weights::build_neighborhoods;

    fn solution(f: Vec<f64>, cv: f64) -> Solution {
        Solution {
            x: vec![0.0],
            g: vec![],
            h: vec![],
            feasible: cv == 0.0,
            cv,
            f,
        }
    }

    struct Convex1d;

    impl Problem for Convex1d {
        fn name(&self) -> &str {
            "convex-1d"
        }
        fn objectives(&self) -> usize {
            2
        }
        fn variables(&self) -> usize {
            1
        }
        fn inequality_count(&self) -> usize {
            0
        }
        fn equality_count(&self) -> usize {
            0
        }
        fn lower(&self) -> &[f64] {
            &[-1.0]
        }
        fn upper(&self) -> &[f64] {
            &[2.0]
        }
        fn evaluate(&self, x: &[f64]) -> Evaluation {
            Evaluation::unconstrained(vec![x[0] * x[0], (x[0] - 1.0) * (x[0] - 1.0)])
        }
    }

    struct NeverFeasible;

    impl Problem for NeverFeasible {
        fn name(&self) -> &str {
            "never-feasible"
        }
        fn objectives(&self) -> usize {
            2
        }
        fn variables(&self) -> usize {
            2
        }
        fn inequality_count(&self) -> usize {
            1
        }
        fn equality_count(&self) -> usize {
            0
        }
        fn lower(&self) -> &[f64] {
            &[0.0, 0.0]
        }
        fn upper(&self) -> &[f64] {
            &[1.0, 1.0]
        }
        fn evaluate(&self, x: &[f64]) -> Evaluation {
            Evaluation {
                objectives: vec![x[0], 1.0 - x[0]],
                // violation shrinks toward the x2 = 0 edge but never reaches 0
                inequality: vec![1.0 + x[1]],
                equality: vec![],
            }
        }
    }

    const RULE: ReplacementRule = ReplacementRule::FeasibilityScenarios;

    #[test]
    fn feasible_incumbent_survives_infeasible_offspring() {
        let o = solution(vec![0.0, 0.0], 0.5);
        let x = solution(vec![9.0, 9.0], 0.0);
        let s = replace_with_constraints(&o, &x, &[0.5, 0.5], &[0.0, 0.0], RULE);
        assert_eq!(s.cv, 0.0);
    }

    #[test]
    fn feasible_offspring_replaces_infeasible_incumbent() {
        let o = solution(vec![9.0, 9.0], 0.0);
        let x = solution(vec![0.0, 0.0], 0.5);
        let s = replace_with_constraints(&o, &x, &[0.5, 0.5], &[0.0, 0.0], RULE);
        assert_eq!(s.cv, 0.0);
        assert_eq!(s.f, vec![9.0, 9.0]);
    }

    #[test]
    fn lower_violation_survives_between_infeasible() {
        let o = solution(vec![1.0, 1.0], 0.1);
        let x = solution(vec![1.0, 1.0], 0.5);
        let s = replace_with_constraints(&o, &x, &[0.5, 0.5], &[0.0, 0.0], RULE);
        assert_eq!(s.cv, 0.1);
    }

    #[test]
    fn better_scalarization_survives_between_feasible() {
        // TCH(o) = 0.3 < TCH(x) = 0.4 under lambda = (1, 0), z = 0
        let o = solution(vec![0.3, 0.0], 0.0);
        let x = solution(vec![0.4, 0.0], 0.0);
        let s = replace_with_constraints(&o, &x, &[1.0, 0.0], &[0.0, 0.0], RULE);
        assert_eq!(s.f, vec![0.3, 0.0]);
    }

    #[test]
    fn ties_keep_the_incumbent() {
        let o = solution(vec![0.4, 0.0], 0.0);
        let mut x = solution(vec![0.4, 0.0], 0.0);
        x.x = vec![7.0]; // marker
        let s = replace_with_constraints(&o, &x, &[1.0, 0.0], &[0.0, 0.0], RULE);
        assert_eq!(s.x, vec![7.0]);
        let o = solution(vec![1.0, 1.0], 0.2);
        let mut x = solution(vec![2.0, 2.0], 0.2);
        x.x = vec![7.0];
        let s = replace_with_constraints(&o, &x, &[1.0, 0.0], &[0.0, 0.0], RULE);
        assert_eq!(s.x, vec![7.0]);
    }

    #[test]
    fn conjunctive_rule_blocks_mixed_feasibility_rescue() {
        // feasible offspring with worse TCH cannot displace an infeasible
        // incumbent under the conjunctive rule, but does under the scenarios
        let o = solution(vec![0.9, 0.0], 0.0);
        let x = solution(vec![0.1, 0.0], 0.7);
        let survivor = replace_with_constraints(
            &o,
            &x,
            &[1.0, 0.0],
            &[0.0, 0.0],
            ReplacementRule::Conjunctive,
        );
        assert_eq!(survivor.cv, 0.7);
        let survivor = replace_with_constraints(&o, &x, &[1.0, 0.0], &[0.0, 0.0], RULE);
        assert_eq!(survivor.cv, 0.0);
    }

    fn tiny_lattice() -> WeightLattice {
        let weights = vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]];
        let neighborhoods = build_neighborhoods(&weights, 2);
        WeightLattice {
            weights,
            divisions: 2,
            neighborhood_size: 2,
            neighborhoods,
        }
    }

    #[test]
    fn replacement_pass_dominated_offspring_changes_nothing() {
        let lattice = tiny_lattice();
        let z = ReferencePoint { z: vec![0.0, 0.0] };
        let mut population = Population {
            members: vec![
                solution(vec![0.1, 0.1], 0.0),
                solution(vec![0.1, 0.1], 0.0),
                solution(vec![0.1, 0.1], 0.0),
            ],
        };
        let offspring = solution(vec![5.0, 5.0], 1.0);
        let replaced = global_replacement_pass(&offspring, &mut population, &lattice, &z, RULE);
        assert_eq!(replaced, 0);
    }

    #[test]
    fn replacement_pass_feasible_offspring_sweeps_infeasible_neighborhood() {
        let lattice = tiny_lattice();
        let z = ReferencePoint { z: vec![0.0, 0.0] };
        let mut population = Population {
            members: vec![
                solution(vec![0.1, 0.1], 3.0),
                solution(vec![0.1, 0.1], 3.0),
                solution(vec![0.1, 0.1], 3.0),
            ],
        };
        let offspring = solution(vec![0.5, 0.5], 0.0);
        let replaced = global_replacement_pass(&offspring, &mut population, &lattice, &z, RULE);
        assert_eq!(replaced, lattice.neighborhood_size);
    }

    #[test]
    fn replacement_pass_hand_traced_single_improvement() {
        // offspring (0.2, 0.9): TCH against the three weights is 0.2, 0.45,
        // 0.9, so it lands on weight 0 with B(0) = {0, 1}. Incumbent 0 is
        // better (0.1 < 0.2), incumbent 1 is worse (0.5 > 0.45).
        let lattice = tiny_lattice();
        let z = ReferencePoint { z: vec![0.0, 0.0] };
        let mut population = Population {
            members: vec![
                solution(vec![0.1, 2.0], 0.0),
                solution(vec![1.0, 1.0], 0.0),
                solution(vec![2.0, 0.1], 0.0),
            ],
        };
        let offspring = solution(vec![0.2, 0.9], 0.0);
        let replaced = global_replacement_pass(&offspring, &mut population, &lattice, &z, RULE);
        assert_eq!(replaced, 1);
        assert_eq!(population.members[1].f, vec![0.2, 0.9]);
        assert_eq!(population.members[0].f, vec![0.1, 2.0]);
    }

    #[test]
    fn run_rejects_budget_below_population() {
        let err = run(&Convex1d, &AlgoConfig::new(40, 39, 0)).unwrap_err();
        assert!(matches!(err, Error::BudgetTooSmall { .. }));
    }

    #[test]
    fn run_is_deterministic_under_seed() {
        let config = AlgoConfig::new(20, 400, 77);
        let (pop_a, stats_a) = run(&Convex1d, &config).unwrap();
        let (pop_b, stats_b) = run(&Convex1d, &config).unwrap();
        assert_eq!(stats_a, stats_b);
        for (a, b) in pop_a.members.iter().zip(&pop_b.members) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn run_population_size_and_budget_is_exact() {
        let config = AlgoConfig::new(16, 250, 3);
        let (population, stats) = run(&Convex1d, &config).unwrap();
        assert_eq!(population.len(), 16);
        assert_eq!(stats.last().unwrap().evaluations, 250);
        // every generation produces N offspring except the truncated last one
        for (i, pair) in stats.windows(2).enumerate() {
            let produced = pair[1].evaluations - pair[0].evaluations;
            if i + 2 < stats.len() {
                assert_eq!(produced, 16);
            } else {
                assert!((1..=16).contains(&produced));
            }
        }
    }

    #[test]
    fn run_mean_cv_never_increases_on_infeasible_problem() {
        let config = AlgoConfig::new(12, 240, 5);
        let (_, stats) = run(&NeverFeasible, &config).unwrap();
        for pair in stats.windows(2) {
            assert!(
                pair[1].mean_cv <= pair[0].mean_cv + 1e-12,
                "mean CV rose: {} -> {}",
                pair[0].mean_cv,
                pair[1].mean_cv
            );
        }
        assert_eq!(stats.last().unwrap().feasible, 0);
    }

    #[test]
    fn run_reference_point_never_increases() {
        let config = AlgoConfig::new(12, 240, 5);
        let mut previous: Option<Vec<f64>> = None;
        let mut minima: Vec<f64> = vec![f64::INFINITY; 2];
        run_with_observer(&Convex1d, &config, |population, _| {
            for s in &population.members {
                for (m, &v) in minima.iter_mut().zip(&s.f) {
                    *m = m.min(v);
                }
            }
            if let Some(prev) = &previous {
                for (p, now) in prev.iter().zip(&minima) {
                    assert!(now <= p);
                }
            }
            previous = Some(minima.clone());
        })
        .unwrap();
    }

    struct HalfFeasible;

    impl Problem for HalfFeasible {
        fn name(&self) -> &str {
            "half-feasible"
        }
        fn objectives(&self) -> usize {
            2
        }
        fn variables(&self) -> usize {
            1
        }
        fn inequality_count(&self) -> usize {
            1
        }
        fn equality_count(&self) -> usize {
            0
        }
        fn lower(&self) -> &[f64] {
            &[0.0]
        }
        fn upper(&self) -> &[f64] {
            &[1.0]
        }
        fn evaluate(&self, x: &[f64]) -> Evaluation {
            Evaluation {
                objectives: vec![x[0], 1.0 - x[0]],
                inequality: vec![0.3 - x[0]],
                equality: vec![],
            }
        }
    }

    #[test]
    fn run_feasible_slots_never_revert() {
        let config = AlgoConfig::new(12, 360, 9);
        let mut was_feasible = [false; 12];
        let mut saw_infeasible = false;
        run_with_observer(&HalfFeasible, &config, |population, _| {
            for (i, s) in population.members.iter().enumerate() {
                if was_feasible[i] {
                    assert!(s.feasible, "slot {i} reverted to infeasible");
                }
                saw_infeasible |= !s.feasible;
                was_feasible[i] = s.feasible;
            }
        })
        .unwrap();
        assert!(saw_infeasible, "test never exercised infeasible slots");
    }
}
