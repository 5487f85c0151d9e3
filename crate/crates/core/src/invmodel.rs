//! Inverse models: univariate Gaussian processes mapping one objective
//! coordinate to one decision coordinate, plus random variable grouping,
//! objective-space sampling, and polynomial mutation.
//!
//! A multivariate inverse mapping from objective space to decision space is
//! decomposed into univariate regressors `f_j -> x_i`, one per decision
//! variable, with additive Gaussian noise supplying local randomness.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::problem::{Problem, Solution};

/// Squared-exponential Gaussian-process regressor on scalar inputs.
///
/// Hyperparameters come from closed-form heuristics rather than marginal
/// likelihood optimization: lengthscale from the median pairwise input
/// distance, signal from the target standard deviation, noise at 1% of the
/// signal. The prior mean is the target mean, so constant targets reproduce
/// exactly and far-field predictions revert to the training average.
#[derive(Debug, Clone)]
pub struct UnivariateGp {
    train_in: Vec<f64>,
    lengthscale: f64,
    signal_sd: f64,
    noise_sd: f64,
    prior_mean: f64,
    // lower-triangular Cholesky factor of K + sigma_n^2 I, row-major
    chol: Vec<f64>,
    // (K + sigma_n^2 I)^-1 (y - prior_mean)
    alpha: Vec<f64>,
}

impl UnivariateGp {
    /// Fits with the heuristic hyperparameters.
    pub fn fit(train_in: &[f64], train_out: &[f64]) -> Result<Self> {
        if train_in.len() < 2 {
            return Err(Error::DegenerateModel(train_in.len()));
        }
        let lengthscale = median_pairwise_distance(train_in);
        let signal_sd = {
            let sd = population_sd(train_out);
            if sd > 0.0 {
                sd
            } else {
                1.0
            }
        };
        let noise_sd = 0.01 * signal_sd + 1e-6;
        Self::fit_with(train_in, train_out, lengthscale, signal_sd, noise_sd)
    }

    /// Fits with explicit hyperparameters. `noise_sd` must be positive; the
    /// kernel matrix must be numerically nonsingular at that noise level.
    pub fn fit_with(
        train_in: &[f64],
        train_out: &[f64],
        lengthscale: f64,
        signal_sd: f64,
        noise_sd: f64,
    ) -> Result<Self> {
        let n = train_in.len();
        if n < 2 {
            return Err(Error::DegenerateModel(n));
        }
        assert_eq!(n, train_out.len());
        assert!(lengthscale > 0.0 && signal_sd > 0.0 && noise_sd > 0.0);

        let prior_mean = train_out.iter().sum::<f64>() / n as f64;
        let kernel = |a: f64, b: f64| {
            let d = a - b;
            signal_sd * signal_sd * (-d * d / (2.0 * lengthscale * lengthscale)).exp()
        };

        let mut matrix = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let v = kernel(train_in[i], train_in[j]);
                matrix[i * n + j] = v;
                matrix[j * n + i] = v;
            }
        }

        // escalate the diagonal jitter until the factorization succeeds;
        // duplicate inputs otherwise make the matrix singular
        let mut chol = None;
        let mut jitter = noise_sd * noise_sd;
        for _ in 0..8 {
            let mut attempt = matrix.clone();
            for i in 0..n {
                attempt[i * n + i] += jitter;
            }
            if cholesky_in_place(n, &mut attempt) {
                chol = Some(attempt);
                break;
            }
            jitter *= 10.0;
        }
        let chol = chol.ok_or(Error::Factorization(n))?;

        let mut alpha: Vec<f64> = train_out.iter().map(|&y| y - prior_mean).collect();
        cholesky_solve(n, &chol, &mut alpha);

        Ok(Self {
            train_in: train_in.to_vec(),
            lengthscale,
            signal_sd,
            noise_sd,
            prior_mean,
            chol,
            alpha,
        })
    }

    pub fn noise_sd(&self) -> f64 {
        self.noise_sd
    }

    /// Predictive mean and observation variance (latent variance plus noise)
    /// at `query`. Variance is clamped at zero against roundoff.
    pub fn predict(&self, query: f64) -> (f64, f64) {
        let n = self.train_in.len();
        let kernel = |a: f64, b: f64| {
            let d = a - b;
            self.signal_sd * self.signal_sd
                * (-d * d / (2.0 * self.lengthscale * self.lengthscale)).exp()
        };
        let k_star: Vec<f64> = self.train_in.iter().map(|&t| kernel(query, t)).collect();
        let mean = self.prior_mean
            + k_star
                .iter()
                .zip(&self.alpha)
                .map(|(k, a)| k * a)
                .sum::<f64>();
        let mut v = k_star.clone();
        cholesky_solve(n, &self.chol, &mut v);
        let reduction: f64 = k_star.iter().zip(&v).map(|(k, vi)| k * vi).sum();
        let variance =
            (self.signal_sd * self.signal_sd + self.noise_sd * self.noise_sd - reduction).max(0.0);
        (mean, variance)
    }

    /// Draws `mean + eps * sd` with `eps` standard normal: one realization of
    /// the noisy inverse mapping.
    pub fn sample<R: Rng>(&self, query: f64, rng: &mut R) -> f64 {
        let (mean, variance) = self.predict(query);
        let eps: f64 = rng.sample(StandardNormal);
        mean + eps * variance.sqrt()
    }
}

fn population_sd(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

// Median of all pairwise absolute distances; falls back to the largest
// distance and then to 1.0 when everything coincides.
fn median_pairwise_distance(values: &[f64]) -> f64 {
    let mut distances = Vec::with_capacity(values.len() * (values.len() - 1) / 2);
    for i in 0..values.len() {
        for j in (i + 1)..values.len() {
            distances.push((values[i] - values[j]).abs());
        }
    }
    distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = distances.len() / 2;
    let median = if distances.len() % 2 == 1 {
        distances[mid]
    } else {
        0.5 * (distances[mid - 1] + distances[mid])
    };
    if median > 0.0 {
        median
    } else if *distances.last().unwrap() > 0.0 {
        *distances.last().unwrap()
    } else {
        1.0
    }
}

// In-place lower Cholesky of a symmetric matrix in row-major order.
// Returns false when a pivot is not strictly positive.
fn cholesky_in_place(n: usize, a: &mut [f64]) -> bool {
    for j in 0..n {
        let mut diag = a[j * n + j];
        for k in 0..j {
            diag -= a[j * n + k] * a[j * n + k];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return false;
        }
        let diag = diag.sqrt();
        a[j * n + j] = diag;
        for i in (j + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / diag;
        }
    }
    // zero the upper triangle so the factor is self-contained
    for i in 0..n {
        for j in (i + 1)..n {
            a[i * n + j] = 0.0;
        }
    }
    true
}

// Solves (L L^T) x = b in place given the lower factor L.
fn cholesky_solve(n: usize, l: &[f64], b: &mut [f64]) {
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[i * n + k] * b[k];
        }
        b[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in (i + 1)..n {
            v -= l[k * n + i] * b[k];
        }
        b[i] = v / l[i * n + i];
    }
}

/// One group: decision variables regressed against a shared objective
/// coordinate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub objective: usize,
    pub variables: Vec<usize>,
}

/// Disjoint groups covering every decision variable exactly once, each with
/// at most `L` variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingPlan {
    pub groups: Vec<Group>,
}

impl GroupingPlan {
    pub fn max_group_size(&self) -> usize {
        self.groups.iter().map(|g| g.variables.len()).max().unwrap_or(0)
    }
}

/// Shuffles the decision indices, chops them into consecutive chunks of at
/// most `group_size`, and pairs each chunk with a uniformly random objective.
pub fn random_grouping<R: Rng>(
    objectives: usize,
    variables: usize,
    group_size: usize,
    rng: &mut R,
) -> GroupingPlan {
    assert!(group_size >= 1);
    let mut indices: Vec<usize> = (0..variables).collect();
    for i in (1..indices.len()).rev() {
        indices.swap(i, rng.gen_range(0..=i));
    }
    let groups = indices
        .chunks(group_size)
        .map(|chunk| Group {
            objective: rng.gen_range(0..objectives),
            variables: chunk.to_vec(),
        })
        .collect();
    GroupingPlan { groups }
}

/// Inverse model of one subpopulation: a grouping plan, one GP per covered
/// decision variable, and the training range of each group's objective.
pub struct SubpopModel {
    plan: GroupingPlan,
    // gps[g][v] regresses plan.groups[g].variables[v] on the group objective
    gps: Vec<Vec<UnivariateGp>>,
    ranges: Vec<(f64, f64)>,
}

impl SubpopModel {
    /// Fits one GP per (objective, variable) pair of the plan. Requires at
    /// least two training solutions.
    pub fn fit(training: &[Solution], plan: GroupingPlan) -> Result<Self> {
        if training.len() < 2 {
            return Err(Error::DegenerateModel(training.len()));
        }
        let mut gps = Vec::with_capacity(plan.groups.len());
        let mut ranges = Vec::with_capacity(plan.groups.len());
        for group in &plan.groups {
            let inputs: Vec<f64> = training.iter().map(|s| s.f[group.objective]).collect();
            let lo = inputs.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = inputs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            ranges.push((lo, hi));
            let mut group_gps = Vec::with_capacity(group.variables.len());
            for &var in &group.variables {
                let outputs: Vec<f64> = training.iter().map(|s| s.x[var]).collect();
                group_gps.push(UnivariateGp::fit(&inputs, &outputs)?);
            }
            gps.push(group_gps);
        }
        Ok(Self { plan, gps, ranges })
    }

    /// Draws `count` decision vectors: per group, one objective query uniform
    /// over the training range extended by 10% on both sides, mapped through
    /// each variable's GP, then clipped to the box.
    pub fn sample<R: Rng>(&self, problem: &dyn Problem, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
        let d = problem.variables();
        let (lower, upper) = (problem.lower(), problem.upper());
        (0..count)
            .map(|_| {
                let mut x = vec![0.0; d];
                for ((group, group_gps), &(lo, hi)) in
                    self.plan.groups.iter().zip(&self.gps).zip(&self.ranges)
                {
                    let span = hi - lo;
                    let (qlo, qhi) = (lo - 0.1 * span, hi + 0.1 * span);
                    let query = if qhi > qlo {
                        rng.gen_range(qlo..qhi)
                    } else {
                        qlo
                    };
                    for (&var, gp) in group.variables.iter().zip(group_gps) {
                        x[var] = gp.sample(query, rng);
                    }
                }
                clip_to_bounds(&mut x, lower, upper);
                x
            })
            .collect()
    }
}

/// Clips each coordinate into its box.
pub fn clip_to_bounds(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, &lo), &hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(lo, hi);
    }
}

/// Fits inverse models on `training` per `plan` and samples `count` offspring
/// decision vectors, clipped to the problem's box.
pub fn reproduce_subpop<R: Rng>(
    training: &[Solution],
    plan: GroupingPlan,
    problem: &dyn Problem,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Vec<f64>>> {
    let model = SubpopModel::fit(training, plan)?;
    Ok(model.sample(problem, count, rng))
}

/// Bounded polynomial mutation: each coordinate mutates with probability
/// `pm` using distribution index `eta`; the perturbation scales with the
/// distance to the bound on the drawn side, so results stay in the box.
pub fn polynomial_mutation<R: Rng>(
    x: &[f64],
    lower: &[f64],
    upper: &[f64],
    pm: f64,
    eta: f64,
    rng: &mut R,
) -> Vec<f64> {
    debug_assert!((0.0..=1.0).contains(&pm));
    debug_assert!(eta > 0.0);
    x.iter()
        .enumerate()
        .map(|(i, &v)| {
            if rng.gen_range(0.0..1.0) >= pm {
                return v;
            }
            let u: f64 = rng.gen_range(0.0..1.0);
            let mutated = if u < 0.5 {
                v + mutation_delta(u, eta) * (v - lower[i])
            } else {
                v + mutation_delta(u, eta) * (upper[i] - v)
            };
            mutated.clamp(lower[i], upper[i])
        })
        .collect()
}

// delta in [-1, 0] for u < 0.5 and [0, 1] for u >= 0.5, zero at u = 0.5
fn mutation_delta(u: f64, eta: f64) -> f64 {
    if u < 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0)) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(1.0 / (eta + 1.0))
    }
}
