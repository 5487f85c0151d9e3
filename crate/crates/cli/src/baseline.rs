//! Plain random-search baseline: uniform sampling of the budget with a
//! feasible nondominated archive.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use imcmoead::algorithm::GenerationStats;
use imcmoead::problem::{nondominated_indices, Evaluator, Problem, Solution};
use imcmoead::Result;

/// Evaluates `max_evaluations` uniform points and returns the feasible
/// nondominated solutions, deterministically thinned to at most
/// `population_size`, plus per-batch statistics.
pub fn random_search(
    problem: &dyn Problem,
    population_size: usize,
    max_evaluations: usize,
    eq_tol: f64,
    seed: u64,
) -> Result<(Vec<Solution>, Vec<GenerationStats>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let evaluator = Evaluator::new(problem, eq_tol);
    let (lower, upper) = (problem.lower(), problem.upper());

    let mut archive: Vec<Solution> = Vec::new();
    let mut stats = Vec::new();
    let mut generation = 0;
    while evaluator.evaluations() < max_evaluations as u64 {
        let batch = (max_evaluations as u64 - evaluator.evaluations()).min(population_size as u64);
        let mut feasible_in_batch = 0;
        let mut best_cv = f64::INFINITY;
        let mut cv_sum = 0.0;
        for _ in 0..batch {
            let x: Vec<f64> = lower
                .iter()
                .zip(upper)
                .map(|(&lo, &hi)| rng.gen_range(lo..=hi))
                .collect();
            let solution = evaluator.evaluate(&x)?;
            best_cv = best_cv.min(solution.cv);
            cv_sum += solution.cv;
            if solution.feasible {
                feasible_in_batch += 1;
                archive.push(solution);
            }
        }
        // keep the archive nondominated as it grows
        let objectives: Vec<Vec<f64>> = archive.iter().map(|s| s.f.clone()).collect();
        archive = nondominated_indices(&objectives)
            .into_iter()
            .map(|i| archive[i].clone())
            .collect();
        stats.push(GenerationStats {
            generation,
            feasible: feasible_in_batch,
            best_cv,
            mean_cv: cv_sum / batch as f64,
            evaluations: evaluator.evaluations(),
            hypervolume: None,
        });
        generation += 1;
    }

    // thin to the population size, keeping the spread along the sorted front
    if archive.len() > population_size {
        archive.sort_by(|a, b| a.f.partial_cmp(&b.f).unwrap_or(std::cmp::Ordering::Equal));
        let kept: Vec<Solution> = (0..population_size)
            .map(|i| {
                let idx = i * (archive.len() - 1) / (population_size - 1).max(1);
                archive[idx].clone()
            })
            .collect();
        archive = kept;
    }
    Ok((archive, stats))
}
