//! Das-Dennis simplex-lattice weight vectors and T-nearest neighborhoods.

use crate::error::{Error, Result};

/// Weight vectors on the unit simplex plus the `T`-neighborhood of each.
#[derive(Debug, Clone)]
pub struct WeightLattice {
    /// `N` weight vectors, each summing to 1 with components in `{0, 1/H, .., 1}`.
    pub weights: Vec<Vec<f64>>,
    /// Divisions per axis used to generate the lattice.
    pub divisions: usize,
    /// Neighborhood size `T`.
    pub neighborhood_size: usize,
    /// `B(i)`: indices of the `T` weights closest to weight `i`, self included,
    /// ordered nearest first with distance ties broken by lower index.
    pub neighborhoods: Vec<Vec<usize>>,
}

impl WeightLattice {
    /// Builds a lattice of exactly `population_size` weights (truncating the
    /// smallest sufficient Das-Dennis lattice) and its neighborhoods.
    ///
    /// `t` defaults to `max(2, round(0.1 * N))`, clamped to `N`.
    pub fn for_population(
        objectives: usize,
        population_size: usize,
        t: Option<usize>,
    ) -> Result<Self> {
        let (divisions, weights) =
            nearest_weights_for_population_size(objectives, population_size)?;
        let t = t
            .unwrap_or_else(|| default_neighborhood_size(weights.len()))
            .clamp(1, weights.len());
        let neighborhoods = build_neighborhoods(&weights, t);
        Ok(Self {
            weights,
            divisions,
            neighborhood_size: t,
            neighborhoods,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Dumps the lattice for inspection: one row per weight vector followed
    /// by its neighborhood.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,weights,neighborhood\n");
        for (i, (w, b)) in self.weights.iter().zip(&self.neighborhoods).enumerate() {
            let weights = w
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";");
            let neighborhood = b
                .iter()
                .map(|j| j.to_string())
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!("{i},{weights},{neighborhood}\n"));
        }
        out
    }
}

/// `T = 0.1 * N`, floored at 2 so replacement always has a neighborhood to
/// work with, and clamped to `N`.
pub fn default_neighborhood_size(n: usize) -> usize {
    ((0.1 * n as f64).round() as usize).max(2).min(n)
}

/// All weight vectors with components in `{0, 1/H, ..., 1}` summing to 1,
/// in lexicographic order. Exactly `C(H + m - 1, m - 1)` vectors.
pub fn das_dennis(objectives: usize, divisions: usize) -> Result<Vec<Vec<f64>>> {
    if objectives < 2 {
        return Err(Error::Config(format!(
            "das-dennis needs at least 2 objectives, got {objectives}"
        )));
    }
    if divisions < 1 {
        return Err(Error::Config("das-dennis needs at least 1 division".into()));
    }
    let mut out = Vec::with_capacity(binomial(divisions + objectives - 1, objectives - 1) as usize);
    let mut counts = vec![0usize; objectives];
    fill_compositions(divisions, objectives, 0, divisions, &mut counts, &mut out);
    Ok(out)
}

// Enumerates integer compositions of `divisions` into `m` parts, first
// coordinate ascending, emitting each as counts / divisions.
fn fill_compositions(
    divisions: usize,
    m: usize,
    depth: usize,
    remaining: usize,
    counts: &mut [usize],
    out: &mut Vec<Vec<f64>>,
) {
    if depth == m - 1 {
        counts[depth] = remaining;
        out.push(
            counts
                .iter()
                .map(|&c| c as f64 / divisions as f64)
                .collect(),
        );
        return;
    }
    for c in 0..=remaining {
        counts[depth] = c;
        fill_compositions(divisions, m, depth + 1, remaining - c, counts, out);
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// Smallest `H` whose lattice reaches `n_target` vectors, truncated to exactly
/// `n_target` by dropping trailing lattice points in lexicographic order.
pub fn nearest_weights_for_population_size(
    objectives: usize,
    n_target: usize,
) -> Result<(usize, Vec<Vec<f64>>)> {
    if n_target < objectives {
        return Err(Error::Config(format!(
            "population size {n_target} below objective count {objectives}"
        )));
    }
    let mut divisions = 1;
    while binomial(divisions + objectives - 1, objectives - 1) < n_target as u128 {
        divisions += 1;
    }
    let mut weights = das_dennis(objectives, divisions)?;
    weights.truncate(n_target);
    Ok((divisions, weights))
}

/// `B(i)`: the `t` weights closest to weight `i` in Euclidean distance, self
/// included, ties broken by lower index.
pub fn build_neighborhoods(weights: &[Vec<f64>], t: usize) -> Vec<Vec<usize>> {
    assert!(t >= 1 && t <= weights.len());
    let mut neighborhoods = Vec::with_capacity(weights.len());
    for a in weights {
        let mut by_distance: Vec<(f64, usize)> = weights
            .iter()
            .enumerate()
            .map(|(j, b)| {
                let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                (d2, j)
            })
            .collect();
        by_distance.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap().then(p.1.cmp(&q.1)));
        neighborhoods.push(by_distance.iter().take(t).map(|&(_, j)| j).collect());
    }
    neighborhoods
}
