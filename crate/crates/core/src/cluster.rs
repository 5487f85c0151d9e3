//! Objective-space k-means partitioning and feasibility-first binary
//! tournament selection.

use log::warn;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::problem::{dominates, Population, Solution};

/// Cluster assignment of a population in objective space.
#[derive(Debug, Clone)]
pub struct Partition {
    /// Population index -> cluster id in `[0, k)`.
    pub assignments: Vec<usize>,
    /// Mean objective vector of each cluster at convergence.
    pub centroids: Vec<Vec<f64>>,
    pub k: usize,
}

impl Partition {
    /// Population indices in cluster `cluster`, ascending.
    pub fn members_of(&self, cluster: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|&(_, &c)| c == cluster)
            .map(|(i, _)| i)
            .collect()
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Lloyd's algorithm on the population's objective vectors with k-means++
/// seeding. Stops at an assignment fixpoint or after `max_iters`. A `k`
/// larger than the population is reduced with a warning.
pub fn kmeans_objective_space<R: Rng>(
    population: &Population,
    k: usize,
    max_iters: usize,
    rng: &mut R,
) -> Partition {
    assert!(k >= 1, "k must be at least 1");
    assert!(!population.is_empty(), "population must be nonempty");
    let points: Vec<&[f64]> = population.members.iter().map(|s| s.f.as_slice()).collect();
    let k = if k > points.len() {
        warn!(
            "k-means: reducing k from {} to population size {}",
            k,
            points.len()
        );
        points.len()
    } else {
        k
    };
    let (partition, _) = lloyd(&points, k, max_iters, rng);
    partition
}

// Returns the partition and the within-cluster SSE after each Lloyd
// iteration (used by tests to check monotonicity).
fn lloyd<R: Rng>(
    points: &[&[f64]],
    k: usize,
    max_iters: usize,
    rng: &mut R,
) -> (Partition, Vec<f64>) {
    let dim = points[0].len();
    let mut centroids = kmeanspp_init(points, k, rng);
    let mut assignments = vec![0usize; points.len()];
    let mut sse_history = Vec::new();

    for _ in 0..max_iters.max(1) {
        // assignment step; ties go to the lower cluster index
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_distance(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            if assignments[i] != best {
                assignments[i] = best;
                changed = true;
            }
        }

        repair_empty_clusters(points, k, &mut assignments);

        // update step; a cluster left empty (possible when duplicates starve
        // the repair of donors) keeps its previous centroid
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (i, p) in points.iter().enumerate() {
            counts[assignments[i]] += 1;
            for (acc, &v) in sums[assignments[i]].iter_mut().zip(*p) {
                *acc += v;
            }
        }
        for (c, (sum, &count)) in sums.iter().zip(&counts).enumerate() {
            if count > 0 {
                for (dst, &v) in centroids[c].iter_mut().zip(sum) {
                    *dst = v / count as f64;
                }
            }
        }

        let sse: f64 = points
            .iter()
            .enumerate()
            .map(|(i, p)| squared_distance(p, &centroids[assignments[i]]))
            .sum();
        sse_history.push(sse);

        if !changed {
            break;
        }
    }

    (
        Partition {
            assignments,
            centroids,
            k,
        },
        sse_history,
    )
}

fn kmeanspp_init<R: Rng>(points: &[&[f64]], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())].to_vec());
    let mut min_d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let next = match WeightedIndex::new(&min_d2) {
            Ok(weighted) => weighted.sample(rng),
            // all remaining distances zero (duplicate points): fall back to uniform
            Err(_) => rng.gen_range(0..points.len()),
        };
        centroids.push(points[next].to_vec());
        for (d2, p) in min_d2.iter_mut().zip(points) {
            *d2 = d2.min(squared_distance(p, centroids.last().unwrap()));
        }
    }
    centroids
}

// Every cluster must own at least one point: each empty cluster steals the
// point farthest from its current centroid, drawn only from clusters that
// would not become empty themselves.
fn repair_empty_clusters(points: &[&[f64]], k: usize, assignments: &mut [usize]) {
    let mut counts = vec![0usize; k];
    for &a in assignments.iter() {
        counts[a] += 1;
    }
    for empty in 0..k {
        while counts[empty] == 0 {
            let mut centroids = vec![vec![0.0; points[0].len()]; k];
            let mut totals = vec![0usize; k];
            for (i, p) in points.iter().enumerate() {
                totals[assignments[i]] += 1;
                for (acc, &v) in centroids[assignments[i]].iter_mut().zip(*p) {
                    *acc += v;
                }
            }
            for (c, &t) in centroids.iter_mut().zip(&totals) {
                if t > 0 {
                    for v in c.iter_mut() {
                        *v /= t as f64;
                    }
                }
            }
            let mut farthest = None;
            let mut farthest_d = -1.0;
            for (i, p) in points.iter().enumerate() {
                if counts[assignments[i]] < 2 {
                    continue;
                }
                let d = squared_distance(p, &centroids[assignments[i]]);
                if d > farthest_d {
                    farthest_d = d;
                    farthest = Some(i);
                }
            }
            match farthest {
                Some(i) => {
                    counts[assignments[i]] -= 1;
                    counts[empty] += 1;
                    assignments[i] = empty;
                }
                None => break, // fewer distinct donors than empty clusters
            }
        }
    }
}

/// Winners of `count` independent binary tournaments over `subpop`, pairs
/// sampled uniformly with replacement. Feasible beats infeasible; two
/// infeasible compare by lower violation; two feasible compare by Pareto
/// dominance with mutual nondominance settled by a fair coin.
pub fn tournament_select<R: Rng>(
    subpop: &[Solution],
    count: usize,
    rng: &mut R,
) -> Vec<Solution> {
    assert!(!subpop.is_empty(), "tournament over empty subpopulation");
    (0..count)
        .map(|_| {
            let a = &subpop[rng.gen_range(0..subpop.len())];
            let b = &subpop[rng.gen_range(0..subpop.len())];
            tournament_winner(a, b, rng).clone()
        })
        .collect()
}

fn tournament_winner<'a, R: Rng>(a: &'a Solution, b: &'a Solution, rng: &mut R) -> &'a Solution {
    match (a.feasible, b.feasible) {
        (true, false) => a,
        (false, true) => b,
        (false, false) => {
            if a.cv <= b.cv {
                a
            } else {
                b
            }
        }
        (true, true) => {
            if dominates(&a.f, &b.f) {
                a
            } else if dominates(&b.f, &a.f) {
                b
            } else if rng.gen_bool(0.5) {
                a
            } else {
                b
            }
        }
    }
}
