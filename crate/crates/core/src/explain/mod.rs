//! Shapley-value attribution of one-step predictions.
//!
//! A feature's value is its average marginal contribution over orderings
//! of the feature set. Features absent from a coalition are imputed with
//! the background mean (a single synthetic baseline), so the base value is
//! the model's prediction on that baseline and exact attributions satisfy
//! efficiency to machine precision. Exact enumeration is bounded to small
//! feature counts and doubles as the oracle for the permutation-sampling
//! estimator used at full scale.

mod report;
mod shapley;

use thiserror::Error;

use crate::mlmodels::TrainedRegressor;

pub use report::{
    dependence_export, importance_summary, AttributionConfig, AttributionReport, ModelAttribution,
};
pub use shapley::{shapley_exact, shapley_sampled, ShapValues, EXACT_FEATURE_LIMIT};

#[derive(Debug, Error, PartialEq)]
pub enum ExplainError {
    #[error("explain: {got} features exceed the exact enumeration bound of {max}")]
    TooManyFeatures { got: usize, max: usize },
    #[error("explain: background set is empty")]
    EmptyBackground,
    #[error("explain: row width {got} does not match the model's {expected} features")]
    WidthMismatch { expected: usize, got: usize },
    #[error("explain: models disagree on the feature schema ({0} vs {1} features)")]
    SchemaMismatch(usize, usize),
    #[error("explain: unknown feature {0:?}")]
    UnknownFeature(String),
    #[error("explain: sampling needs at least one permutation")]
    NoPermutations,
}

/// Anything that maps a feature row to a prediction. Attribution treats
/// the model as a black box; `Sync` lets per-instance work fan out across
/// threads.
pub trait PredictModel: Sync {
    fn n_features(&self) -> usize;
    fn predict_row(&self, row: &[f64]) -> f64;
}

impl PredictModel for TrainedRegressor {
    fn n_features(&self) -> usize {
        TrainedRegressor::n_features(self)
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        self.predict(row)
            .expect("attribution validates the feature width up front")
    }
}

/// Adapter turning a closure into a model, mostly for tests and oracles.
pub struct FnModel<F: Fn(&[f64]) -> f64 + Sync> {
    width: usize,
    f: F,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnModel<F> {
    pub fn new(width: usize, f: F) -> Self {
        Self { width, f }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> PredictModel for FnModel<F> {
    fn n_features(&self) -> usize {
        self.width
    }

    fn predict_row(&self, row: &[f64]) -> f64 {
        (self.f)(row)
    }
}

pub(crate) fn background_mean(
    background: &[Vec<f64>],
    width: usize,
) -> Result<Vec<f64>, ExplainError> {
    if background.is_empty() {
        return Err(ExplainError::EmptyBackground);
    }
    for row in background {
        if row.len() != width {
            return Err(ExplainError::WidthMismatch {
                expected: width,
                got: row.len(),
            });
        }
    }
    let mut mean = vec![0.0; width];
    for row in background {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= background.len() as f64;
    }
    Ok(mean)
}
