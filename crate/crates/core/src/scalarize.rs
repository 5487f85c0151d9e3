//! Tchebycheff decomposition and best-weight matching for global replacement.

use crate::problem::ReferencePoint;
use crate::weights::WeightLattice;

/// Floor applied to weight components inside the Tchebycheff value only, so
/// boundary weights with zero components do not ignore whole objectives. The
/// stored lattice is never clamped.
pub const WEIGHT_FLOOR: f64 = 1e-6;

/// `max_j( max(lambda_j, 1e-6) * |f_j - z_j| )`.
pub fn tchebycheff(f: &[f64], lambda: &[f64], z: &[f64]) -> f64 {
    debug_assert_eq!(f.len(), lambda.len());
    debug_assert_eq!(f.len(), z.len());
    let mut worst = 0.0f64;
    for ((&fj, &lj), &zj) in f.iter().zip(lambda).zip(z) {
        let term = lj.max(WEIGHT_FLOOR) * (fj - zj).abs();
        if term > worst {
            worst = term;
        }
    }
    worst
}

/// Borrowed view pairing a weight lattice with the current reference point.
#[derive(Debug, Clone, Copy)]
pub struct ScalarizationContext<'a> {
    pub lattice: &'a WeightLattice,
    pub z: &'a ReferencePoint,
}

impl<'a> ScalarizationContext<'a> {
    pub fn new(lattice: &'a WeightLattice, z: &'a ReferencePoint) -> Self {
        debug_assert_eq!(lattice.weights[0].len(), z.z.len());
        Self { lattice, z }
    }
}

/// Index of the weight vector minimizing the Tchebycheff value of `f`,
/// ties broken by lowest index.
pub fn best_weight_index(f: &[f64], ctx: &ScalarizationContext) -> usize {
    let mut best = 0;
    let mut best_value = f64::INFINITY;
    for (k, lambda) in ctx.lattice.weights.iter().enumerate() {
        let value = tchebycheff(f, lambda, &ctx.z.z);
        if value < best_value {
            best_value = value;
            best = k;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::build_neighborhoods;

    fn lattice_from(weights: Vec<Vec<f64>>) -> WeightLattice {
        let neighborhoods = build_neighborhoods(&weights, 1);
        WeightLattice {
            divisions: 0,
            neighborhood_size: 1,
            neighborhoods,
            weights,
        }
    }

    #[test]
    fn tchebycheff_max_of_terms() {
        assert_eq!(tchebycheff(&[1.0, 3.0], &[0.5, 0.5], &[0.0, 0.0]), 1.5);
    }

    #[test]
    fn tchebycheff_zero_at_reference() {
        assert_eq!(tchebycheff(&[2.0, 2.0], &[0.3, 0.7], &[2.0, 2.0]), 0.0);
    }

    #[test]
    fn tchebycheff_clamps_zero_weights() {
        let v = tchebycheff(&[2.0, 5.0], &[1.0, 0.0], &[0.0, 0.0]);
        assert_eq!(v, 2.0); // clamped second term is 5e-6
    }

    #[test]
    fn best_index_by_enumeration() {
        let lattice = lattice_from(vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]]);
        let z = ReferencePoint { z: vec![0.0, 0.0] };
        let ctx = ScalarizationContext::new(&lattice, &z);
        // TCH values: 0.1, 0.45, 0.9
        assert_eq!(best_weight_index(&[0.1, 0.9], &ctx), 0);
    }

    #[test]
    fn best_index_tie_goes_lowest() {
        let lattice = lattice_from(vec![vec![1.0, 0.0], vec![0.5, 0.5], vec![0.0, 1.0]]);
        let z = ReferencePoint { z: vec![0.4, 0.4] };
        let ctx = ScalarizationContext::new(&lattice, &z);
        assert_eq!(best_weight_index(&[0.4, 0.4], &ctx), 0);
    }

    #[test]
    fn best_index_single_weight() {
        let lattice = lattice_from(vec![vec![0.5, 0.5]]);
        let z = ReferencePoint { z: vec![0.0, 0.0] };
        let ctx = ScalarizationContext::new(&lattice, &z);
        assert_eq!(best_weight_index(&[3.0, 4.0], &ctx), 0);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn translation_invariance(
                f in proptest::collection::vec(-10.0f64..10.0, 2..4),
                shift in -5.0f64..5.0,
            ) {
                let m = f.len();
                let lambda = vec![1.0 / m as f64; m];
                let z = vec![0.0; m];
                let f2: Vec<f64> = f.iter().map(|v| v + shift).collect();
                let z2 = vec![shift; m];
                let a = tchebycheff(&f, &lambda, &z);
                let b = tchebycheff(&f2, &lambda, &z2);
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }

            #[test]
            fn monotone_in_deviation(
                f in proptest::collection::vec(0.1f64..10.0, 2..4),
                grow in 1.0f64..3.0,
                idx in 0usize..4,
            ) {
                let m = f.len();
                let lambda = vec![1.0 / m as f64; m];
                let z = vec![0.0; m];
                let mut f2 = f.clone();
                let i = idx % m;
                f2[i] *= grow;
                prop_assert!(tchebycheff(&f2, &lambda, &z) >= tchebycheff(&f, &lambda, &z));
            }

            #[test]
            fn argmin_scale_invariance(
                f in proptest::collection::vec(0.0f64..5.0, 2),
                scale in 0.1f64..10.0,
            ) {
                let lattice = lattice_from(vec![
                    vec![1.0, 0.0],
                    vec![0.75, 0.25],
                    vec![0.5, 0.5],
                    vec![0.25, 0.75],
                    vec![0.0, 1.0],
                ]);
                let z = ReferencePoint { z: vec![0.0, 0.0] };
                let ctx = ScalarizationContext::new(&lattice, &z);
                // skip near-exact ties where rounding could legitimately flip
                // the argmin under rescaling
                let mut values: Vec<f64> = lattice
                    .weights
                    .iter()
                    .map(|l| tchebycheff(&f, l, &z.z))
                    .collect();
                values.sort_by(|a, b| a.partial_cmp(b).unwrap());
                prop_assume!(values[1] - values[0] > 1e-9 * (1.0 + values[0]));
                let scaled: Vec<f64> = f.iter().map(|v| v * scale).collect();
                // scaling all objectives scales every TCH value by the same
                // positive constant, so the argmin is unchanged
                prop_assert_eq!(best_weight_index(&f, &ctx), best_weight_index(&scaled, &ctx));
            }
        }
    }
}
