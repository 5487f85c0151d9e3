//! Built-in constrained benchmark problems, a name registry, and
//! reference-front oracles (analytic samplers or brute-force grids).

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::problem::{constraint_violation, nondominated_indices, Evaluation, Problem};

pub type EvalFn = Arc<dyn Fn(&[f64]) -> Evaluation + Send + Sync>;
pub type FrontSampler = Arc<dyn Fn(usize) -> Vec<Vec<f64>> + Send + Sync>;

/// A problem definition assembled from closed-form expressions, optionally
/// carrying an analytic Pareto-front sampler.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub objectives: usize,
    pub variables: usize,
    pub inequality_count: usize,
    pub equality_count: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub eval: EvalFn,
    pub front_sampler: Option<FrontSampler>,
}

impl std::fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("objectives", &self.objectives)
            .field("variables", &self.variables)
            .field("inequality_count", &self.inequality_count)
            .field("equality_count", &self.equality_count)
            .finish()
    }
}

impl Problem for ProblemSpec {
    fn name(&self) -> &str {
        &self.name
    }
    fn objectives(&self) -> usize {
        self.objectives
    }
    fn variables(&self) -> usize {
        self.variables
    }
    fn inequality_count(&self) -> usize {
        self.inequality_count
    }
    fn equality_count(&self) -> usize {
        self.equality_count
    }
    fn lower(&self) -> &[f64] {
        &self.lower
    }
    fn upper(&self) -> &[f64] {
        &self.upper
    }
    fn evaluate(&self, x: &[f64]) -> Evaluation {
        (self.eval)(x)
    }
}

/// Problems addressable by name. Lookup is case-insensitive.
#[derive(Debug, Clone, Default)]
pub struct ProblemRegistry {
    problems: BTreeMap<String, Arc<ProblemSpec>>,
}

impl ProblemRegistry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Registry preloaded with the built-in suite.
    pub fn with_builtins() -> Self {
        let mut registry = Self::default();
        for spec in builtin_suite() {
            registry.register(spec);
        }
        registry
    }

    pub fn register(&mut self, spec: ProblemSpec) {
        self.problems
            .insert(spec.name.to_uppercase(), Arc::new(spec));
    }

    pub fn get(&self, name: &str) -> Result<Arc<ProblemSpec>> {
        self.problems
            .get(&name.to_uppercase())
            .cloned()
            .ok_or_else(|| Error::UnknownProblem(name.to_string()))
    }

    pub fn names(&self) -> Vec<String> {
        self.problems.keys().cloned().collect()
    }
}

/// The built-in constrained benchmark suite: four classic bi-objective
/// problems, a ratio problem with two linear constraints, an unconstrained
/// sanity problem, and an equality-constrained stress problem.
pub fn builtin_suite() -> Vec<ProblemSpec> {
    vec![bnh(), srn(), tnk(), osy(), constr_ring(), sphere2(), eq_line()]
}

fn bnh() -> ProblemSpec {
    ProblemSpec {
        name: "BNH".into(),
        objectives: 2,
        variables: 2,
        inequality_count: 2,
        equality_count: 0,
        lower: vec![0.0, 0.0],
        upper: vec![5.0, 3.0],
        eval: Arc::new(|x| {
            let (x1, x2) = (x[0], x[1]);
            Evaluation {
                objectives: vec![
                    4.0 * x1 * x1 + 4.0 * x2 * x2,
                    (x1 - 5.0).powi(2) + (x2 - 5.0).powi(2),
                ],
                inequality: vec![
                    (x1 - 5.0).powi(2) + x2 * x2 - 25.0,
                    7.7 - (x1 - 8.0).powi(2) - (x2 + 3.0).powi(2),
                ],
                equality: vec![],
            }
        }),
        front_sampler: None,
    }
}

fn srn() -> ProblemSpec {
    ProblemSpec {
        name: "SRN".into(),
        objectives: 2,
        variables: 2,
        inequality_count: 2,
        equality_count: 0,
        lower: vec![-20.0, -20.0],
        upper: vec![20.0, 20.0],
        eval: Arc::new(|x| {
            let (x1, x2) = (x[0], x[1]);
            Evaluation {
                objectives: vec![
                    2.0 + (x1 - 2.0).powi(2) + (x2 - 1.0).powi(2),
                    9.0 * x1 - (x2 - 1.0).powi(2),
                ],
                inequality: vec![x1 * x1 + x2 * x2 - 225.0, x1 - 3.0 * x2 + 10.0],
                equality: vec![],
            }
        }),
        front_sampler: None,
    }
}

fn tnk() -> ProblemSpec {
    ProblemSpec {
        name: "TNK".into(),
        objectives: 2,
        variables: 2,
        inequality_count: 2,
        equality_count: 0,
        lower: vec![0.0, 0.0],
        upper: vec![std::f64::consts::PI, std::f64::consts::PI],
        eval: Arc::new(|x| {
            let (x1, x2) = (x[0], x[1]);
            // atan2 keeps the sinusoidal ring total at x2 = 0
            let ring = x1 * x1 + x2 * x2 - 1.0 - 0.1 * (16.0 * x1.atan2(x2)).cos();
            Evaluation {
                objectives: vec![x1, x2],
                inequality: vec![-ring, (x1 - 0.5).powi(2) + (x2 - 0.5).powi(2) - 0.5],
                equality: vec![],
            }
        }),
        front_sampler: None,
    }
}

fn osy() -> ProblemSpec {
    ProblemSpec {
        name: "OSY".into(),
        objectives: 2,
        variables: 6,
        inequality_count: 6,
        equality_count: 0,
        lower: vec![0.0, 0.0, 1.0, 0.0, 1.0, 0.0],
        upper: vec![10.0, 10.0, 5.0, 6.0, 5.0, 10.0],
        eval: Arc::new(|x| {
            let f1 = -(25.0 * (x[0] - 2.0).powi(2)
                + (x[1] - 2.0).powi(2)
                + (x[2] - 1.0).powi(2)
                + (x[3] - 4.0).powi(2)
                + (x[4] - 1.0).powi(2));
            let f2 = x.iter().map(|v| v * v).sum();
            Evaluation {
                objectives: vec![f1, f2],
                inequality: vec![
                    -(x[0] + x[1] - 2.0),
                    -(6.0 - x[0] - x[1]),
                    -(2.0 - x[1] + x[0]),
                    -(2.0 - x[0] + 3.0 * x[1]),
                    -(4.0 - (x[2] - 3.0).powi(2) - x[3]),
                    -((x[4] - 3.0).powi(2) + x[5] - 4.0),
                ],
                equality: vec![],
            }
        }),
        front_sampler: None,
    }
}

fn constr_ring() -> ProblemSpec {
    ProblemSpec {
        name: "CONSTR-RING".into(),
        objectives: 2,
        variables: 2,
        inequality_count: 2,
        equality_count: 0,
        lower: vec![0.1, 0.0],
        upper: vec![1.0, 5.0],
        eval: Arc::new(|x| {
            let (x1, x2) = (x[0], x[1]);
            Evaluation {
                objectives: vec![x1, (1.0 + x2) / x1],
                inequality: vec![6.0 - x2 - 9.0 * x1, 1.0 + x2 - 9.0 * x1],
                equality: vec![],
            }
        }),
        front_sampler: None,
    }
}

fn sphere2() -> ProblemSpec {
    ProblemSpec {
        name: "SPHERE-2".into(),
        objectives: 2,
        variables: 1,
        inequality_count: 0,
        equality_count: 0,
        lower: vec![-1.0],
        upper: vec![2.0],
        eval: Arc::new(|x| {
            Evaluation::unconstrained(vec![x[0] * x[0], (x[0] - 1.0) * (x[0] - 1.0)])
        }),
        front_sampler: Some(Arc::new(|resolution| {
            // optimal set is x in [0, 1]
            let n = resolution.max(2);
            (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    vec![t * t, (1.0 - t) * (1.0 - t)]
                })
                .collect()
        })),
    }
}

fn eq_line() -> ProblemSpec {
    ProblemSpec {
        name: "EQ-LINE".into(),
        objectives: 2,
        variables: 2,
        inequality_count: 0,
        equality_count: 1,
        lower: vec![0.0, 0.0],
        upper: vec![1.0, 1.0],
        eval: Arc::new(|x| Evaluation {
            objectives: vec![x[0], x[1] * x[1]],
            inequality: vec![],
            equality: vec![x[0] + x[1] - 1.0],
        }),
        front_sampler: Some(Arc::new(|resolution| {
            // substituting x2 = 1 - x1 gives (t, (1 - t)^2)
            let n = resolution.max(2);
            (0..n)
                .map(|i| {
                    let t = i as f64 / (n - 1) as f64;
                    vec![t, (1.0 - t) * (1.0 - t)]
                })
                .collect()
        })),
    }
}

/// Default total grid budget for brute-force reference fronts.
pub const DEFAULT_FRONT_RESOLUTION: usize = 1_000_000;

/// Dense feasible nondominated front, via the analytic sampler when the
/// problem has one and a brute-force grid of about `resolution` points
/// otherwise (supported for up to three decision variables).
pub fn reference_front(
    spec: &ProblemSpec,
    eq_tol: f64,
    resolution: usize,
) -> Result<Vec<Vec<f64>>> {
    let candidates: Vec<Vec<f64>> = match &spec.front_sampler {
        Some(sampler) => sampler(resolution),
        None => {
            if spec.variables > 3 {
                return Err(Error::UnsupportedOracle {
                    name: spec.name.clone(),
                    reason: format!(
                        "no analytic sampler and {} variables is too many for a grid",
                        spec.variables
                    ),
                });
            }
            brute_force_objectives(spec, eq_tol, resolution)
        }
    };
    let mut front: Vec<Vec<f64>> = nondominated_indices(&candidates)
        .into_iter()
        .map(|i| candidates[i].clone())
        .collect();
    front.sort_by(|a, b| {
        a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(front)
}

fn brute_force_objectives(spec: &ProblemSpec, eq_tol: f64, resolution: usize) -> Vec<Vec<f64>> {
    let d = spec.variables;
    let per_dim = ((resolution as f64).powf(1.0 / d as f64).floor() as usize).max(2);
    let mut feasible = Vec::new();
    let mut index = vec![0usize; d];
    let mut x = vec![0.0; d];
    loop {
        for i in 0..d {
            let t = index[i] as f64 / (per_dim - 1) as f64;
            x[i] = spec.lower[i] + t * (spec.upper[i] - spec.lower[i]);
        }
        let eval = spec.evaluate(&x);
        if constraint_violation(&eval.inequality, &eval.equality, eq_tol) == 0.0 {
            feasible.push(eval.objectives);
        }
        // odometer increment
        let mut carry = 0;
        loop {
            index[carry] += 1;
            if index[carry] < per_dim {
                break;
            }
            index[carry] = 0;
            carry += 1;
            if carry == d {
                return feasible;
            }
        }
    }
}
