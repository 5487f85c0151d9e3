//! Hypervolume (exact for two or three objectives, Monte Carlo above) and the
//! two-sided Wilcoxon rank-sum test.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a hypervolume value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HvMethod {
    Exact,
    MonteCarlo,
}

/// Hypervolume of a point set against a reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HvResult {
    pub value: f64,
    pub method: HvMethod,
    /// Sample count (Monte Carlo only).
    pub samples: Option<u64>,
    /// Binomial standard error of `value` (Monte Carlo only).
    pub std_error: Option<f64>,
    pub reference: Vec<f64>,
}

// Points not componentwise <= the reference contribute nothing and are
// discarded up front.
fn dominated_by_reference<'a>(points: &'a [Vec<f64>], reference: &[f64]) -> Vec<&'a [f64]> {
    points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(a, r)| a <= r))
        .map(|p| p.as_slice())
        .collect()
}

/// Exact Lebesgue measure of the union of boxes `[point, reference]` for two
/// or three objectives.
pub fn hypervolume_exact(points: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    match reference.len() {
        2 => Ok(hv2d(&dominated_by_reference(points, reference), reference)),
        3 => Ok(hv3d(&dominated_by_reference(points, reference), reference)),
        m => Err(Error::Hypervolume(format!(
            "exact computation supports 2 or 3 objectives, got {m}"
        ))),
    }
}

// Sort by f1 ascending and sweep the staircase: each kept point contributes
// a slab up to the next kept point's f1.
fn hv2d(points: &[&[f64]], reference: &[f64]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a[0].partial_cmp(&b[0]).unwrap().then(a[1].partial_cmp(&b[1]).unwrap()));
    let mut staircase: Vec<&[f64]> = Vec::with_capacity(sorted.len());
    let mut best_f2 = f64::INFINITY;
    for p in sorted {
        if p[1] < best_f2 {
            staircase.push(p);
            best_f2 = p[1];
        }
    }
    let mut area = 0.0;
    for (i, p) in staircase.iter().enumerate() {
        let next_f1 = staircase.get(i + 1).map_or(reference[0], |q| q[0]);
        area += (next_f1 - p[0]) * (reference[1] - p[1]);
    }
    area
}

// Sweep slabs of the sorted third coordinate, accumulating the 2D measure of
// everything at or below the slab floor.
fn hv3d(points: &[&[f64]], reference: &[f64]) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a[2].partial_cmp(&b[2]).unwrap());
    let ref2d = [reference[0], reference[1]];
    let mut volume = 0.0;
    let mut active: Vec<&[f64]> = Vec::with_capacity(sorted.len());
    let mut i = 0;
    while i < sorted.len() {
        let level = sorted[i][2];
        while i < sorted.len() && sorted[i][2] == level {
            active.push(&sorted[i][..2]);
            i += 1;
        }
        let next_level = sorted.get(i).map_or(reference[2], |p| p[2]);
        volume += hv2d(&active, &ref2d) * (next_level - level);
    }
    volume
}

/// Monte Carlo hypervolume: uniform samples over the box spanned by the
/// pointwise ideal and the reference, counting samples dominated by at least
/// one point.
pub fn hypervolume_mc<R: Rng>(
    points: &[Vec<f64>],
    reference: &[f64],
    samples: u64,
    rng: &mut R,
) -> HvResult {
    assert!(samples >= 1);
    let usable = dominated_by_reference(points, reference);
    if usable.is_empty() {
        return HvResult {
            value: 0.0,
            method: HvMethod::MonteCarlo,
            samples: Some(samples),
            std_error: Some(0.0),
            reference: reference.to_vec(),
        };
    }
    let m = reference.len();
    let mut ideal = vec![f64::INFINITY; m];
    for p in &usable {
        for (lo, &v) in ideal.iter_mut().zip(*p) {
            *lo = lo.min(v);
        }
    }
    let box_volume: f64 = ideal
        .iter()
        .zip(reference)
        .map(|(&lo, &hi)| (hi - lo).max(0.0))
        .product();
    if box_volume == 0.0 {
        return HvResult {
            value: 0.0,
            method: HvMethod::MonteCarlo,
            samples: Some(samples),
            std_error: Some(0.0),
            reference: reference.to_vec(),
        };
    }
    let mut dominated: u64 = 0;
    let mut draw = vec![0.0; m];
    for _ in 0..samples {
        for (v, (&lo, &hi)) in draw.iter_mut().zip(ideal.iter().zip(reference)) {
            *v = rng.gen_range(lo..hi);
        }
        if usable
            .iter()
            .any(|p| p.iter().zip(&draw).all(|(a, b)| a <= b))
        {
            dominated += 1;
        }
    }
    let fraction = dominated as f64 / samples as f64;
    HvResult {
        value: box_volume * fraction,
        method: HvMethod::MonteCarlo,
        samples: Some(samples),
        std_error: Some(box_volume * (fraction * (1.0 - fraction) / samples as f64).sqrt()),
        reference: reference.to_vec(),
    }
}

/// Exact hypervolume for up to three objectives, Monte Carlo with
/// `mc_samples` draws above that.
pub fn hypervolume<R: Rng>(
    points: &[Vec<f64>],
    reference: &[f64],
    mc_samples: u64,
    rng: &mut R,
) -> HvResult {
    if reference.len() <= 3 {
        let value = hypervolume_exact(points, reference).expect("m <= 3");
        HvResult {
            value,
            method: HvMethod::Exact,
            samples: None,
            std_error: None,
            reference: reference.to_vec(),
        }
    } else {
        hypervolume_mc(points, reference, mc_samples, rng)
    }
}

/// Significance verdict: larger samples are better (hypervolume convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// `a` significantly larger than `b`.
    Better,
    /// `a` significantly smaller than `b`.
    Worse,
    /// No significant difference.
    Similar,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Better => "+",
            Verdict::Worse => "-",
            Verdict::Similar => "≈",
        })
    }
}

/// Two-sided Wilcoxon rank-sum test with average ranks for ties: exact
/// enumeration of rank splits for up to 12 combined samples, otherwise the
/// tie-corrected normal approximation. Requires three samples per group.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64) -> Result<(f64, Verdict)> {
    let (n1, n2) = (a.len(), b.len());
    if n1 < 3 || n2 < 3 {
        return Err(Error::TooFewSamples(n1, n2));
    }
    let n = n1 + n2;

    let mut tagged: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    tagged.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());

    // average ranks over tie groups, recording tie sizes for the correction
    let mut ranks = vec![0.0; n];
    let mut tie_sizes: Vec<usize> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i + 1;
        while j < n && tagged[j].0 == tagged[i].0 {
            j += 1;
        }
        let avg = (i + j + 1) as f64 / 2.0;
        for r in ranks.iter_mut().take(j).skip(i) {
            *r = avg;
        }
        if j - i > 1 {
            tie_sizes.push(j - i);
        }
        i = j;
    }

    let w: f64 = ranks
        .iter()
        .zip(&tagged)
        .filter(|(_, (_, in_a))| *in_a)
        .map(|(r, _)| *r)
        .sum();

    let p = if n <= 12 {
        exact_two_sided_p(&ranks, n1, w)
    } else {
        let mean = n1 as f64 * (n + 1) as f64 / 2.0;
        let tie_term: f64 = tie_sizes
            .iter()
            .map(|&t| (t * t * t - t) as f64)
            .sum::<f64>()
            / (n as f64 * (n as f64 - 1.0));
        let variance = n1 as f64 * n2 as f64 / 12.0 * ((n + 1) as f64 - tie_term);
        if variance <= 0.0 {
            1.0
        } else {
            let z = (w - mean) / variance.sqrt();
            libm::erfc(z.abs() / std::f64::consts::SQRT_2)
        }
    };
    let p = p.clamp(f64::MIN_POSITIVE, 1.0);

    let verdict = if p >= alpha {
        Verdict::Similar
    } else if median(a) > median(b) {
        Verdict::Better
    } else {
        Verdict::Worse
    };
    Ok((p, verdict))
}

// Permutation distribution of the rank sum: enumerate every size-n1 subset of
// the tied ranks and count splits at least as extreme on either side.
fn exact_two_sided_p(ranks: &[f64], n1: usize, observed: f64) -> f64 {
    let n = ranks.len();
    let mut le: u64 = 0;
    let mut ge: u64 = 0;
    let mut total: u64 = 0;
    let eps = 1e-9;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        total += 1;
        let sum: f64 = (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| ranks[i]).sum();
        if sum <= observed + eps {
            le += 1;
        }
        if sum >= observed - eps {
            ge += 1;
        }
    }
    let one_sided = le.min(ge) as f64 / total as f64;
    (2.0 * one_sided).min(1.0)
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}
