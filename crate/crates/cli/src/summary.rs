//! Mean/std hypervolume tables with rank-sum verdicts against the first
//! configuration.

use std::collections::BTreeMap;

use imcmoead::metrics::{wilcoxon_rank_sum, Verdict};

use crate::experiment::RunRecord;

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub problem: String,
    pub config_id: String,
    pub runs: usize,
    pub mean_hv: f64,
    pub std_hv: f64,
    /// `mean (std)` in scientific notation.
    pub formatted: String,
    /// Rank-sum verdict against the baseline configuration; `None` on the
    /// baseline itself or when too few runs exist.
    pub verdict: Option<Verdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigTotals {
    pub config_id: String,
    pub wins: usize,
    pub ties: usize,
    pub losses: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SummaryTable {
    pub rows: Vec<SummaryRow>,
    /// Win/tie/loss totals per non-baseline configuration.
    pub totals: Vec<ConfigTotals>,
    pub baseline: Option<String>,
}

impl SummaryTable {
    /// Renders the table; byte-stable for identical inputs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("problem,config,runs,mean_hv,std_hv,hv,verdict\n");
        for row in &self.rows {
            let verdict = row.verdict.map(|v| v.to_string()).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                row.problem,
                row.config_id,
                row.runs,
                row.mean_hv,
                row.std_hv,
                quote(&row.formatted),
                verdict
            ));
        }
        for totals in &self.totals {
            out.push_str(&format!(
                "w/t/l,{},,,,,{}/{}/{}\n",
                totals.config_id, totals.wins, totals.ties, totals.losses
            ));
        }
        out
    }
}

fn quote(field: &str) -> String {
    format!("\"{field}\"")
}

/// Scientific notation with an explicit exponent sign, e.g. `5.0000e-1` and
/// `0.00e+0`.
pub fn format_scientific(value: f64, decimals: usize) -> String {
    let s = format!("{value:.decimals$e}");
    match s.find('e') {
        Some(pos) if !matches!(s.as_bytes().get(pos + 1), Some(b'-')) => {
            format!("{}+{}", &s[..=pos], &s[pos + 1..])
        }
        _ => s,
    }
}

fn mean_and_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() > 1 {
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt()
    } else {
        0.0
    };
    (mean, std)
}

/// Per (problem, configuration): mean and std of the hypervolumes, formatted
/// `mean (std)`, plus rank-sum verdicts against the first configuration seen
/// and win/tie/loss totals.
pub fn summarize(records: &[&RunRecord]) -> SummaryTable {
    if records.is_empty() {
        return SummaryTable::default();
    }

    // first-seen orders keep the table deterministic
    let mut problem_order: Vec<String> = Vec::new();
    let mut config_order: Vec<String> = Vec::new();
    let mut cells: BTreeMap<(String, String), Vec<f64>> = BTreeMap::new();
    for record in records {
        if !problem_order.contains(&record.problem) {
            problem_order.push(record.problem.clone());
        }
        if !config_order.contains(&record.config_id) {
            config_order.push(record.config_id.clone());
        }
        cells
            .entry((record.problem.clone(), record.config_id.clone()))
            .or_default()
            .push(record.hv.as_ref().map_or(0.0, |h| h.value));
    }
    let baseline = config_order[0].clone();

    let mut rows = Vec::new();
    let mut totals: BTreeMap<String, ConfigTotals> = config_order
        .iter()
        .skip(1)
        .map(|id| {
            (
                id.clone(),
                ConfigTotals {
                    config_id: id.clone(),
                    wins: 0,
                    ties: 0,
                    losses: 0,
                },
            )
        })
        .collect();

    for problem in &problem_order {
        let baseline_values = cells.get(&(problem.clone(), baseline.clone()));
        for config in &config_order {
            let Some(values) = cells.get(&(problem.clone(), config.clone())) else {
                continue;
            };
            let (mean, std) = mean_and_std(values);
            let verdict = if config == &baseline {
                None
            } else {
                baseline_values.and_then(|base| {
                    wilcoxon_rank_sum(values, base, SIGNIFICANCE_LEVEL)
                        .ok()
                        .map(|(_, verdict)| verdict)
                })
            };
            if let Some(v) = verdict {
                if let Some(t) = totals.get_mut(config) {
                    match v {
                        Verdict::Better => t.wins += 1,
                        Verdict::Similar => t.ties += 1,
                        Verdict::Worse => t.losses += 1,
                    }
                }
            }
            rows.push(SummaryRow {
                problem: problem.clone(),
                config_id: config.clone(),
                runs: values.len(),
                mean_hv: mean,
                std_hv: std,
                formatted: format!(
                    "{} ({})",
                    format_scientific(mean, 4),
                    format_scientific(std, 2)
                ),
                verdict,
            });
        }
    }

    SummaryTable {
        rows,
        totals: config_order
            .iter()
            .skip(1)
            .filter_map(|id| totals.remove(id))
            .collect(),
        baseline: Some(baseline),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(problem: &str, config: &str, seed: u64, hv: f64) -> RunRecord {
        RunRecord {
            problem: problem.into(),
            config_id: config.into(),
            seed,
            front_x: vec![],
            front_f: vec![],
            hv: Some(imcmoead::metrics::HvResult {
                value: hv,
                method: imcmoead::metrics::HvMethod::Exact,
                samples: None,
                std_error: None,
                reference: vec![1.1, 1.1],
            }),
            wall_time_ms: 0.0,
            generations: vec![],
        }
    }

    #[test]
    fn scientific_format_matches_convention() {
        assert_eq!(format_scientific(0.5, 4), "5.0000e-1");
        assert_eq!(format_scientific(0.0, 2), "0.00e+0");
        assert_eq!(format_scientific(1.0, 4), "1.0000e+0");
        assert_eq!(format_scientific(195.24, 4), "1.9524e+2");
    }

    #[test]
    fn constant_samples_format_as_expected() {
        let records: Vec<RunRecord> = (0..3).map(|i| record("P", "a", i, 0.5)).collect();
        let refs: Vec<&RunRecord> = records.iter().collect();
        let table = summarize(&refs);
        assert_eq!(table.rows[0].formatted, "5.0000e-1 (0.00e+0)");
    }

    #[test]
    fn identical_configs_get_similar_verdicts() {
        let mut records = Vec::new();
        for seed in 0..5 {
            records.push(record("P", "base", seed, 0.4 + seed as f64 * 0.01));
            records.push(record("P", "other", seed, 0.4 + seed as f64 * 0.01));
        }
        let refs: Vec<&RunRecord> = records.iter().collect();
        let table = summarize(&refs);
        let other = table
            .rows
            .iter()
            .find(|r| r.config_id == "other")
            .unwrap();
        assert_eq!(other.verdict, Some(Verdict::Similar));
        assert_eq!(table.totals[0].ties, 1);
    }

    #[test]
    fn totals_sum_to_problem_count() {
        let mut records = Vec::new();
        for problem in ["P1", "P2", "P3"] {
            for seed in 0..4 {
                records.push(record(problem, "base", seed, 0.5));
                records.push(record(problem, "other", seed, 0.5 + 0.1 * seed as f64));
            }
        }
        let refs: Vec<&RunRecord> = records.iter().collect();
        let table = summarize(&refs);
        let totals = &table.totals[0];
        assert_eq!(totals.wins + totals.ties + totals.losses, 3);
    }

    #[test]
    fn means_match_recomputation() {
        let values = [0.21, 0.47, 0.33, 0.9];
        let records: Vec<RunRecord> = values
            .iter()
            .enumerate()
            .map(|(i, &hv)| record("P", "a", i as u64, hv))
            .collect();
        let refs: Vec<&RunRecord> = records.iter().collect();
        let table = summarize(&refs);
        let (mean, std) = mean_and_std(&values);
        assert!((table.rows[0].mean_hv - mean).abs() < 1e-12);
        assert!((table.rows[0].std_hv - std).abs() < 1e-12);
    }

    #[test]
    fn csv_is_stable() {
        let records: Vec<RunRecord> = (0..3).map(|i| record("P", "a", i, 0.5)).collect();
        let refs: Vec<&RunRecord> = records.iter().collect();
        let a = summarize(&refs).to_csv();
        let b = summarize(&refs).to_csv();
        assert_eq!(a, b);
        assert!(a.starts_with("problem,config,runs,"));
    }
}
