//! Exact (subset-enumeration) and sampled (random-permutation) Shapley
//! values under background-mean imputation.

use rand::seq::SliceRandom;

use crate::explain::{background_mean, ExplainError, PredictModel};
use crate::rng::keyed_rng;

/// Exact enumeration evaluates all 2^d coalitions; beyond this width the
/// sampled estimator is the tool.
pub const EXACT_FEATURE_LIMIT: usize = 12;

/// Per-feature attributions for one instance.
#[derive(Debug, Clone)]
pub struct ShapValues {
    pub phi: Vec<f64>,
    /// Prediction on the all-background baseline row.
    pub base_value: f64,
    /// Prediction on the instance itself.
    pub prediction: f64,
}

fn check_instance(model: &dyn PredictModel, instance: &[f64]) -> Result<(), ExplainError> {
    if instance.len() != model.n_features() {
        return Err(ExplainError::WidthMismatch {
            expected: model.n_features(),
            got: instance.len(),
        });
    }
    Ok(())
}

/// Exact Shapley values by coalition enumeration.
///
/// phi_i = sum over S not containing i of |S|!(d-|S|-1)!/d! *
/// (v(S + i) - v(S)), with v(S) the prediction when features outside S
/// are replaced by the background mean. Efficiency (sum phi = f(x) - base)
/// holds to rounding.
pub fn shapley_exact(
    model: &dyn PredictModel,
    instance: &[f64],
    background: &[Vec<f64>],
) -> Result<ShapValues, ExplainError> {
    check_instance(model, instance)?;
    let d = instance.len();
    if d > EXACT_FEATURE_LIMIT {
        return Err(ExplainError::TooManyFeatures {
            got: d,
            max: EXACT_FEATURE_LIMIT,
        });
    }
    let baseline = background_mean(background, d)?;

    // v(mask) for every coalition.
    let mut coalition_value = vec![0.0; 1 << d];
    let mut row = vec![0.0; d];
    for (mask, slot) in coalition_value.iter_mut().enumerate() {
        for i in 0..d {
            row[i] = if mask & (1 << i) != 0 {
                instance[i]
            } else {
                baseline[i]
            };
        }
        *slot = model.predict_row(&row);
    }

    // Permutation weights by coalition size; d <= 12 keeps every factorial
    // exact in f64.
    let factorial = |n: usize| -> f64 { (1..=n).map(|v| v as f64).product() };
    let weight: Vec<f64> = (0..d)
        .map(|s| factorial(s) * factorial(d - s - 1) / factorial(d))
        .collect();

    let mut phi = vec![0.0; d];
    for mask in 0..(1usize << d) {
        let size = mask.count_ones() as usize;
        for i in 0..d {
            if mask & (1 << i) == 0 {
                phi[i] += weight[size] * (coalition_value[mask | (1 << i)] - coalition_value[mask]);
            }
        }
    }

    Ok(ShapValues {
        phi,
        base_value: coalition_value[0],
        prediction: coalition_value[(1 << d) - 1],
    })
}

/// Monte Carlo Shapley values: average marginal contributions over
/// `n_permutations` uniformly sampled feature orderings. Deterministic
/// given the seed; each permutation costs d + 1 model evaluations.
pub fn shapley_sampled(
    model: &dyn PredictModel,
    instance: &[f64],
    background: &[Vec<f64>],
    n_permutations: usize,
    seed: u64,
) -> Result<ShapValues, ExplainError> {
    check_instance(model, instance)?;
    if n_permutations == 0 {
        return Err(ExplainError::NoPermutations);
    }
    let d = instance.len();
    let baseline = background_mean(background, d)?;
    let base_value = model.predict_row(&baseline);
    let prediction = model.predict_row(instance);

    let mut rng = keyed_rng(seed, 0);
    let mut order: Vec<usize> = (0..d).collect();
    let mut phi = vec![0.0; d];
    let mut row = baseline.clone();
    for _ in 0..n_permutations {
        order.shuffle(&mut rng);
        row.copy_from_slice(&baseline);
        let mut previous = base_value;
        for &i in &order {
            row[i] = instance[i];
            let current = model.predict_row(&row);
            phi[i] += current - previous;
            previous = current;
        }
    }
    for p in phi.iter_mut() {
        *p /= n_permutations as f64;
    }

    Ok(ShapValues {
        phi,
        base_value,
        prediction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::FnModel;

    fn zero_background(d: usize) -> Vec<Vec<f64>> {
        vec![vec![0.0; d], vec![0.0; d]]
    }

    #[test]
    fn additive_model_attributes_its_terms() {
        let model = FnModel::new(2, |x| x[0] + x[1]);
        let shap = shapley_exact(&model, &[3.0, 5.0], &zero_background(2)).unwrap();
        assert!((shap.phi[0] - 3.0).abs() < 1e-12);
        assert!((shap.phi[1] - 5.0).abs() < 1e-12);
        assert_eq!(shap.base_value, 0.0);
    }

    #[test]
    fn constant_model_gets_zero_everywhere() {
        let model = FnModel::new(3, |_| 42.0);
        let shap = shapley_exact(&model, &[1.0, 2.0, 3.0], &zero_background(3)).unwrap();
        assert!(shap.phi.iter().all(|p| p.abs() < 1e-12));
        let sampled =
            shapley_sampled(&model, &[1.0, 2.0, 3.0], &zero_background(3), 50, 1).unwrap();
        assert!(sampled.phi.iter().all(|p| *p == 0.0));
    }

    #[test]
    fn symmetric_features_share_credit() {
        let model = FnModel::new(2, |x| x[0] * x[1]);
        let shap = shapley_exact(&model, &[4.0, 4.0], &zero_background(2)).unwrap();
        assert!((shap.phi[0] - shap.phi[1]).abs() < 1e-12);
    }

    #[test]
    fn efficiency_holds_exactly() {
        // Awkward non-additive model over 5 features.
        let model = FnModel::new(5, |x| {
            x[0] * x[1] - 2.0 * x[2].max(x[3]) + (x[4] * 0.3).sin() * 10.0
        });
        let background = vec![
            vec![1.0, 0.5, -1.0, 2.0, 0.0],
            vec![0.0, 1.5, 1.0, -2.0, 3.0],
            vec![2.0, -0.5, 0.0, 0.0, 1.0],
        ];
        let instance = [1.5, 2.5, -0.5, 1.0, 2.0];
        let shap = shapley_exact(&model, &instance, &background).unwrap();
        let total: f64 = shap.phi.iter().sum();
        assert!(
            (total - (shap.prediction - shap.base_value)).abs() < 1e-9,
            "sum {total} vs {}",
            shap.prediction - shap.base_value
        );
    }

    #[test]
    fn dummy_feature_gets_nothing() {
        let model = FnModel::new(3, |x| 3.0 * x[0] - x[2] * x[2]);
        let background = vec![vec![1.0, 7.0, 2.0], vec![-1.0, 3.0, 0.0]];
        let shap = shapley_exact(&model, &[2.0, 99.0, 1.0], &background).unwrap();
        assert_eq!(shap.phi[1], 0.0);
    }

    #[test]
    fn sampled_tracks_exact_on_a_small_model() {
        let model = FnModel::new(5, |x| {
            2.0 * x[0] + x[1] * x[2] - 0.5 * x[3] + x[4] * x[0]
        });
        let background = vec![
            vec![0.5, 1.0, -1.0, 2.0, 0.0],
            vec![1.5, -1.0, 1.0, 0.0, 1.0],
        ];
        let instance = [2.0, 1.0, 3.0, -1.0, 0.5];
        let exact = shapley_exact(&model, &instance, &background).unwrap();
        let sampled = shapley_sampled(&model, &instance, &background, 2000, 7).unwrap();
        let scale = exact.phi.iter().map(|p| p.abs()).fold(0.0, f64::max);
        for (e, s) in exact.phi.iter().zip(&sampled.phi) {
            assert!(
                (e - s).abs() < 0.05 * scale,
                "exact {e} vs sampled {s} (scale {scale})"
            );
        }
    }

    #[test]
    fn sampled_is_deterministic_per_seed() {
        let model = FnModel::new(4, |x| x.iter().product());
        let background = vec![vec![1.0; 4], vec![2.0; 4]];
        let instance = [1.0, 2.0, 3.0, 4.0];
        let a = shapley_sampled(&model, &instance, &background, 100, 5).unwrap();
        let b = shapley_sampled(&model, &instance, &background, 100, 5).unwrap();
        let c = shapley_sampled(&model, &instance, &background, 100, 6).unwrap();
        assert_eq!(a.phi, b.phi);
        assert_ne!(a.phi, c.phi);
    }

    #[test]
    fn sampled_estimator_is_unbiased() {
        // Mean over many independent seeds must approach the exact value
        // within three standard errors.
        let model = FnModel::new(3, |x| x[0] * x[1] + 2.0 * x[2] - x[0] * x[2]);
        let background = vec![vec![0.0, 1.0, -1.0], vec![2.0, -1.0, 1.0]];
        let instance = [1.0, 2.0, 3.0];
        let exact = shapley_exact(&model, &instance, &background).unwrap();

        let n_seeds = 64;
        let estimates: Vec<Vec<f64>> = (0..n_seeds)
            .map(|seed| {
                shapley_sampled(&model, &instance, &background, 40, seed)
                    .unwrap()
                    .phi
            })
            .collect();
        for feature in 0..3 {
            let mean: f64 =
                estimates.iter().map(|e| e[feature]).sum::<f64>() / n_seeds as f64;
            let var: f64 = estimates
                .iter()
                .map(|e| (e[feature] - mean).powi(2))
                .sum::<f64>()
                / (n_seeds - 1) as f64;
            let standard_error = (var / n_seeds as f64).sqrt();
            let deviation = (mean - exact.phi[feature]).abs();
            assert!(
                deviation <= 3.0 * standard_error.max(1e-12),
                "feature {feature}: |{mean} - {}| > 3 * {standard_error}",
                exact.phi[feature]
            );
        }
    }

    #[test]
    fn exact_bound_is_enforced() {
        let model = FnModel::new(13, |x| x.iter().sum());
        let instance = vec![1.0; 13];
        let background = vec![vec![0.0; 13]];
        assert_eq!(
            shapley_exact(&model, &instance, &background).unwrap_err(),
            ExplainError::TooManyFeatures { got: 13, max: 12 }
        );
    }

    #[test]
    fn empty_background_rejected() {
        let model = FnModel::new(2, |x| x[0]);
        assert_eq!(
            shapley_exact(&model, &[1.0, 2.0], &[]).unwrap_err(),
            ExplainError::EmptyBackground
        );
    }
}
