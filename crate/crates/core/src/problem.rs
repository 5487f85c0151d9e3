//! Domain types for constrained multi-objective problems.
//!
//! A problem minimizes `m` objectives subject to inequality constraints
//! `g_j(x) <= 0` and equality constraints `h_j(x) = 0` over a box in `R^d`.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relaxation for equality constraints: `|h_j| <= EQ_TOL` counts as
/// satisfied.
pub const DEFAULT_EQ_TOL: f64 = 1e-4;

/// Raw output of one problem evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// Objective values, length `m`.
    pub objectives: Vec<f64>,
    /// Inequality constraint values `g` (feasible when `<= 0`), length `ng`.
    pub inequality: Vec<f64>,
    /// Equality constraint values `h` (feasible when `= 0`), length `nh`.
    pub equality: Vec<f64>,
}

impl Evaluation {
    pub fn unconstrained(objectives: Vec<f64>) -> Self {
        Self {
            objectives,
            inequality: Vec::new(),
            equality: Vec::new(),
        }
    }
}

/// A constrained multi-objective problem over a real box.
///
/// `evaluate` must be deterministic and safe to call from multiple threads;
/// the returned vectors must have lengths `objectives()`, `inequality_count()`
/// and `equality_count()` exactly.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;
    /// Number of objectives `m` (>= 2).
    fn objectives(&self) -> usize;
    /// Number of decision variables `d` (>= 1).
    fn variables(&self) -> usize;
    /// Number of inequality constraints `ng`.
    fn inequality_count(&self) -> usize;
    /// Number of equality constraints `nh`.
    fn equality_count(&self) -> usize;
    /// Lower box bounds, length `d`.
    fn lower(&self) -> &[f64];
    /// Upper box bounds, length `d`.
    fn upper(&self) -> &[f64];
    fn evaluate(&self, x: &[f64]) -> Evaluation;
}

/// Aggregate constraint violation: `sum(max(g_j, 0)) + sum(max(|h_j| - eq_tol, 0))`.
///
/// Zero iff all inequalities hold and every equality is within `eq_tol`.
pub fn constraint_violation(g: &[f64], h: &[f64], eq_tol: f64) -> f64 {
    debug_assert!(eq_tol >= 0.0);
    let ineq: f64 = g.iter().map(|&v| v.max(0.0)).sum();
    let eq: f64 = h.iter().map(|&v| (v.abs() - eq_tol).max(0.0)).sum();
    ineq + eq
}

/// A fully evaluated candidate solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    /// Decision vector, within the problem's box.
    pub x: Vec<f64>,
    /// Objective vector.
    pub f: Vec<f64>,
    /// Inequality constraint values.
    pub g: Vec<f64>,
    /// Equality constraint values.
    pub h: Vec<f64>,
    /// Cached aggregate constraint violation.
    pub cv: f64,
    /// `cv == 0`.
    pub feasible: bool,
}

/// The population, indexed in weight-vector order: member `j` is associated
/// with weight `lambda_j`.
#[derive(Debug, Clone)]
pub struct Population {
    pub members: Vec<Solution>,
}

impl Population {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn feasible_count(&self) -> usize {
        self.members.iter().filter(|s| s.feasible).count()
    }

    /// Objective vectors of the feasible, mutually nondominated members.
    pub fn feasible_nondominated(&self) -> Vec<&Solution> {
        let feasible: Vec<&Solution> = self.members.iter().filter(|s| s.feasible).collect();
        let objs: Vec<Vec<f64>> = feasible.iter().map(|s| s.f.clone()).collect();
        nondominated_indices(&objs)
            .into_iter()
            .map(|i| feasible[i])
            .collect()
    }
}

/// Running ideal-point estimate: componentwise minimum of every objective
/// vector observed so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePoint {
    pub z: Vec<f64>,
}

impl ReferencePoint {
    /// Ideal point of an initial set of objective vectors.
    pub fn from_objectives<'a, I>(objectives: I) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = objectives.into_iter();
        let first = iter.next().expect("at least one objective vector");
        let mut z = first.to_vec();
        for f in iter {
            for (zj, &fj) in z.iter_mut().zip(f) {
                *zj = zj.min(fj);
            }
        }
        Self { z }
    }

    /// Componentwise `z <- min(z, f)` over a batch of offspring objectives.
    pub fn update<'a, I>(&mut self, objectives: I)
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        for f in objectives {
            debug_assert_eq!(f.len(), self.z.len());
            for (zj, &fj) in self.z.iter_mut().zip(f) {
                *zj = zj.min(fj);
            }
        }
    }
}

/// Wraps a problem with the equality tolerance and an atomic evaluation tally.
pub struct Evaluator<'a> {
    problem: &'a dyn Problem,
    eq_tol: f64,
    count: AtomicU64,
}

impl<'a> Evaluator<'a> {
    pub fn new(problem: &'a dyn Problem, eq_tol: f64) -> Self {
        Self {
            problem,
            eq_tol,
            count: AtomicU64::new(0),
        }
    }

    pub fn problem(&self) -> &dyn Problem {
        self.problem
    }

    pub fn eq_tol(&self) -> f64 {
        self.eq_tol
    }

    /// Function evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    /// Evaluates `x`, rejecting out-of-bounds inputs: callers must clip first.
    pub fn evaluate(&self, x: &[f64]) -> Result<Solution> {
        let (lower, upper) = (self.problem.lower(), self.problem.upper());
        for (i, &v) in x.iter().enumerate() {
            if v < lower[i] || v > upper[i] || !v.is_finite() {
                return Err(Error::OutOfBounds {
                    index: i,
                    value: v,
                    lower: lower[i],
                    upper: upper[i],
                });
            }
        }
        let eval = self.problem.evaluate(x);
        debug_assert_eq!(eval.objectives.len(), self.problem.objectives());
        debug_assert_eq!(eval.inequality.len(), self.problem.inequality_count());
        debug_assert_eq!(eval.equality.len(), self.problem.equality_count());
        self.count.fetch_add(1, Ordering::Relaxed);
        let cv = constraint_violation(&eval.inequality, &eval.equality, self.eq_tol);
        Ok(Solution {
            x: x.to_vec(),
            f: eval.objectives,
            g: eval.inequality,
            h: eval.equality,
            cv,
            feasible: cv == 0.0,
        })
    }
}

/// Pareto dominance for minimization: `a` dominates `b` when it is no worse
/// everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    let mut strictly_better = false;
    for (&ai, &bi) in a.iter().zip(b) {
        if ai > bi {
            return false;
        }
        if ai < bi {
            strictly_better = true;
        }
    }
    strictly_better
}

/// Indices of the mutually nondominated points, duplicates collapsed to the
/// first occurrence. Uses a sort-and-sweep for two objectives and the
/// quadratic filter otherwise.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    if points.is_empty() {
        return Vec::new();
    }
    if points[0].len() == 2 {
        return nondominated_indices_2d(points);
    }
    let mut keep = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i != j && (dominates(q, p) || (q == p && j < i)) {
                continue 'outer;
            }
        }
        keep.push(i);
    }
    keep
}

fn nondominated_indices_2d(points: &[Vec<f64>]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a][0]
            .partial_cmp(&points[b][0])
            .unwrap()
            .then(points[a][1].partial_cmp(&points[b][1]).unwrap())
            .then(a.cmp(&b))
    });
    let mut keep = Vec::new();
    let mut best_f2 = f64::INFINITY;
    let mut last: Option<(f64, f64)> = None;
    for &i in &order {
        let (f1, f2) = (points[i][0], points[i][1]);
        if last == Some((f1, f2)) {
            continue; // exact duplicate
        }
        // Sorted by f1 then f2, so i is dominated iff some earlier point had
        // f2 <= ours (with strict improvement guaranteed by the dedup above
        // unless f1 ties, where equal f2 was already removed).
        if f2 < best_f2 {
            keep.push(i);
            best_f2 = f2;
            last = Some((f1, f2));
        }
    }
    keep.sort_unstable();
    keep
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Toy;

    impl Problem for Toy {
        fn name(&self) -> &str {
            "toy"
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
            &[0.0]
        }
        fn upper(&self) -> &[f64] {
            &[1.0]
        }
        fn evaluate(&self, x: &[f64]) -> Evaluation {
            Evaluation::unconstrained(vec![x[0], 1.0 - x[0]])
        }
    }

    struct OneIneq;

    impl Problem for OneIneq {
        fn name(&self) -> &str {
            "one-ineq"
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
            &[5.0]
        }
        fn evaluate(&self, x: &[f64]) -> Evaluation {
            Evaluation {
                objectives: vec![x[0], -x[0]],
                inequality: vec![x[0] - 1.0],
                equality: vec![],
            }
        }
    }

    #[test]
    fn cv_single_positive_term() {
        assert_eq!(constraint_violation(&[-0.2, 0.3], &[], 1e-4), 0.3);
    }

    #[test]
    fn cv_equality_within_tolerance() {
        assert_eq!(constraint_violation(&[], &[5e-5], 1e-4), 0.0);
    }

    #[test]
    fn cv_mixed_sum() {
        let cv = constraint_violation(&[0.1, 0.2], &[-0.001], 1e-4);
        assert!((cv - 0.3009).abs() < 1e-12, "cv = {cv}");
    }

    #[test]
    fn cv_zero_iff_all_satisfied() {
        assert_eq!(constraint_violation(&[0.0, -1.0], &[1e-4], 1e-4), 0.0);
        assert!(constraint_violation(&[1e-12], &[], 1e-4) > 0.0);
    }

    #[test]
    fn evaluate_unconstrained_toy() {
        let p = Toy;
        let ev = Evaluator::new(&p, 1e-4);
        let s = ev.evaluate(&[0.3]).unwrap();
        assert_eq!(s.f, vec![0.3, 0.7]);
        assert_eq!(s.cv, 0.0);
        assert!(s.feasible);
        assert_eq!(ev.evaluations(), 1);
    }

    #[test]
    fn evaluate_constraint_violation_cached() {
        let p = OneIneq;
        let ev = Evaluator::new(&p, 1e-4);
        let s = ev.evaluate(&[2.0]).unwrap();
        assert_eq!(s.g, vec![1.0]);
        assert_eq!(s.cv, 1.0);
        assert!(!s.feasible);
    }

    #[test]
    fn evaluate_rejects_out_of_bounds() {
        let p = Toy;
        let ev = Evaluator::new(&p, 1e-4);
        assert!(matches!(
            ev.evaluate(&[1.5]),
            Err(Error::OutOfBounds { index: 0, .. })
        ));
        assert_eq!(ev.evaluations(), 0);
    }

    #[test]
    fn reference_point_componentwise_min() {
        let mut z = ReferencePoint { z: vec![1.0, 2.0] };
        z.update([[0.5, 3.0].as_slice()]);
        assert_eq!(z.z, vec![0.5, 2.0]);
    }

    #[test]
    fn reference_point_no_improvement() {
        let mut z = ReferencePoint { z: vec![0.0, 0.0] };
        z.update([[1.0, 1.0].as_slice(), [2.0, 2.0].as_slice()]);
        assert_eq!(z.z, vec![0.0, 0.0]);
    }

    #[test]
    fn reference_point_min_over_batch() {
        let mut z = ReferencePoint { z: vec![5.0, 5.0] };
        z.update([[3.0, 9.0].as_slice(), [9.0, 3.0].as_slice()]);
        assert_eq!(z.z, vec![3.0, 3.0]);
    }

    #[test]
    fn reference_point_update_idempotent() {
        let offspring = [[3.0, 9.0], [9.0, 3.0]];
        let mut z = ReferencePoint { z: vec![5.0, 5.0] };
        z.update(offspring.iter().map(|f| f.as_slice()));
        let once = z.clone();
        z.update(offspring.iter().map(|f| f.as_slice()));
        assert_eq!(z, once);
    }

    #[test]
    fn dominance_basic() {
        assert!(dominates(&[1.0, 2.0], &[2.0, 2.0]));
        assert!(!dominates(&[1.0, 2.0], &[1.0, 2.0]));
        assert!(!dominates(&[1.0, 3.0], &[2.0, 2.0]));
    }

    #[test]
    fn nondominated_filter_2d_matches_quadratic() {
        let pts = vec![
            vec![1.0, 5.0],
            vec![2.0, 4.0],
            vec![2.0, 4.0],
            vec![3.0, 4.5],
            vec![0.5, 6.0],
            vec![4.0, 1.0],
        ];
        let fast = nondominated_indices(&pts);
        // reference: quadratic filter over the same points
        let mut slow = Vec::new();
        'outer: for (i, p) in pts.iter().enumerate() {
            for (j, q) in pts.iter().enumerate() {
                if i != j && (dominates(q, p) || (q == p && j < i)) {
                    continue 'outer;
                }
            }
            slow.push(i);
        }
        assert_eq!(fast, slow);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn cv_nonnegative_and_monotone(
                g in proptest::collection::vec(-1.0f64..1.0, 0..4),
                h in proptest::collection::vec(-1.0f64..1.0, 0..4),
                bump in 0.0f64..0.5,
            ) {
                let base = constraint_violation(&g, &h, 1e-4);
                prop_assert!(base >= 0.0);
                for i in 0..g.len() {
                    let mut g2 = g.clone();
                    g2[i] += bump;
                    prop_assert!(constraint_violation(&g2, &h, 1e-4) >= base);
                }
                for i in 0..h.len() {
                    let mut h2 = h.clone();
                    h2[i] = h2[i].signum() * (h2[i].abs() + bump);
                    prop_assert!(constraint_violation(&g, &h2, 1e-4) >= base);
                }
            }

            #[test]
            fn reference_point_nonincreasing(
                start in proptest::collection::vec(-5.0f64..5.0, 2..4),
                batch in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 2..4), 1..6),
            ) {
                let m = start.len();
                let batch: Vec<Vec<f64>> = batch.into_iter().map(|mut v| { v.resize(m, 0.0); v }).collect();
                let mut z = ReferencePoint { z: start.clone() };
                z.update(batch.iter().map(|f| f.as_slice()));
                for (zj, sj) in z.z.iter().zip(&start) {
                    prop_assert!(zj <= sj);
                }
            }
        }
    }
}
