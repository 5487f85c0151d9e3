//! Library-level harness checks: summary table shape across configurations
//! and the plotted front's closeness to the reference curve.

use imcmoead::metrics::Verdict;
use imcmoead::problems::{reference_front, ProblemRegistry};
use imcmoead_cli::experiment::{normalize_points, objective_bounds};
use imcmoead_cli::{
    run_experiment, summarize, AlgorithmKind, AlgorithmSpec, ExperimentConfig, RunRecord,
};

fn algo(id: &str, population_size: usize, max_evaluations: usize) -> AlgorithmSpec {
    AlgorithmSpec {
        id: id.into(),
        kind: AlgorithmKind::Imcmoead,
        population_size,
        max_evaluations,
        clusters: 10,
        group_size: None,
        eq_tol: 1e-4,
        mutation_probability: None,
        mutation_eta: 20.0,
        neighborhood_size: None,
        replacement: Default::default(),
    }
}

#[test]
fn two_configs_ten_reps_yield_one_verdict_cell() {
    let registry = ProblemRegistry::with_builtins();
    let mut cheap = algo("cheap", 16, 320);
    cheap.clusters = 4;
    let mut rich = algo("rich", 16, 960);
    rich.clusters = 4;
    let config = ExperimentConfig {
        problems: vec!["SPHERE-2".into()],
        algorithms: vec![cheap, rich],
        repetitions: 10,
        seed: 90,
        hv_samples: 10_000,
    };
    let outcomes = run_experiment(&registry, &config, None).unwrap();
    let records: Vec<&RunRecord> = outcomes.iter().filter_map(|o| o.record()).collect();
    assert_eq!(records.len(), 20);
    let table = summarize(&records);
    assert_eq!(table.rows.len(), 2);
    assert_eq!(table.baseline.as_deref(), Some("cheap"));
    let verdicts: Vec<Option<Verdict>> = table.rows.iter().map(|r| r.verdict).collect();
    assert_eq!(verdicts[0], None); // baseline anchors the comparison
    assert!(verdicts[1].is_some());
    assert_eq!(table.totals.len(), 1);
    let t = &table.totals[0];
    assert_eq!(t.wins + t.ties + t.losses, 1);
}

#[test]
fn converged_front_lies_on_the_reference_curve() {
    let registry = ProblemRegistry::with_builtins();
    let config = ExperimentConfig {
        problems: vec!["SPHERE-2".into()],
        algorithms: vec![algo("main", 40, 5000)],
        repetitions: 1,
        seed: 5,
        hv_samples: 10_000,
    };
    let outcomes = run_experiment(&registry, &config, None).unwrap();
    let record = outcomes[0].record().unwrap();
    assert!(!record.front_f.is_empty());

    let spec = registry.get("SPHERE-2").unwrap();
    let reference = reference_front(&spec, 1e-4, 4000).unwrap();
    let (ideal, nadir) = objective_bounds(&reference);
    let reference_norm = normalize_points(&reference, &ideal, &nadir);
    let front_norm = normalize_points(&record.front_f, &ideal, &nadir);

    for p in &front_norm {
        let nearest = reference_norm
            .iter()
            .map(|q| {
                p.iter()
                    .zip(q)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(
            nearest <= 0.05,
            "front point {p:?} is {nearest:.4} from the reference curve"
        );
    }
}
