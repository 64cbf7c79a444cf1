//! Gradient boosting for squared error: trees fit sequentially to the
//! current residuals, each contribution scaled by the learning rate, on
//! top of a constant base prediction at the target mean.

use crate::mlmodels::tree::{RegressionTree, TreeConfig};

/// Depth of the stage trees unless overridden.
pub const DEFAULT_GB_DEPTH: usize = 3;

#[derive(Debug, Clone)]
pub(crate) struct Boosted {
    base: f64,
    learning_rate: f64,
    trees: Vec<RegressionTree>,
}

impl Boosted {
    pub fn fit(
        x: &[Vec<f64>],
        y: &[f64],
        n_estimators: usize,
        learning_rate: f64,
        max_depth: Option<usize>,
    ) -> Self {
        let n = x.len();
        let base = y.iter().sum::<f64>() / n as f64;
        let config = TreeConfig {
            max_depth,
            min_leaf: 1,
        };
        let indices: Vec<usize> = (0..n).collect();
        let mut residuals: Vec<f64> = y.iter().map(|v| v - base).collect();
        let mut trees = Vec::with_capacity(n_estimators);
        for _ in 0..n_estimators {
            let tree = RegressionTree::fit(x, &residuals, &indices, &config);
            for (r, row) in residuals.iter_mut().zip(x) {
                *r -= learning_rate * tree.predict(row);
            }
            trees.push(tree);
        }
        Self {
            base,
            learning_rate,
            trees,
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.predict_at_stage(row, self.trees.len())
    }

    /// Prediction using only the first `stages` trees.
    pub fn predict_at_stage(&self, row: &[f64], stages: usize) -> f64 {
        let stages = stages.min(self.trees.len());
        self.base
            + self.learning_rate
                * self.trees[..stages]
                    .iter()
                    .map(|t| t.predict(row))
                    .sum::<f64>()
    }

    pub fn n_stages(&self) -> usize {
        self.trees.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64, ((i * 3) % 5) as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * r[0] * 0.3 + 2.0 * r[1]).collect();
        (x, y)
    }

    fn training_rmse(model: &Boosted, x: &[Vec<f64>], y: &[f64], stages: usize) -> f64 {
        let mse = x
            .iter()
            .zip(y)
            .map(|(row, target)| {
                let e = model.predict_at_stage(row, stages) - target;
                e * e
            })
            .sum::<f64>()
            / x.len() as f64;
        mse.sqrt()
    }

    #[test]
    fn one_full_depth_stage_beats_the_mean_baseline() {
        let (x, y) = xy();
        let model = Boosted::fit(&x, &y, 1, 1.0, None);
        let baseline = training_rmse(&model, &x, &y, 0);
        let boosted = training_rmse(&model, &x, &y, 1);
        assert!(
            boosted < baseline,
            "one stage {boosted} should beat the mean-only {baseline}"
        );
        // A single unlimited tree with unit rate memorizes distinct rows.
        assert!(boosted < 1e-9);
    }

    #[test]
    fn training_rmse_is_monotone_in_stages() {
        let (x, y) = xy();
        let model = Boosted::fit(&x, &y, 40, 0.1, Some(DEFAULT_GB_DEPTH));
        let mut previous = f64::INFINITY;
        for stage in 0..=model.n_stages() {
            let rmse = training_rmse(&model, &x, &y, stage);
            assert!(
                rmse <= previous + 1e-12,
                "stage {stage}: {rmse} > {previous}"
            );
            previous = rmse;
        }
    }

    #[test]
    fn base_prediction_is_the_target_mean() {
        let (x, y) = xy();
        let model = Boosted::fit(&x, &y, 0, 0.1, Some(3));
        let mean = y.iter().sum::<f64>() / y.len() as f64;
        assert_eq!(model.predict(&x[0]), mean);
    }
}
