//! Cross-validated grid search with contiguous, unshuffled folds.
//!
//! Folds keep the temporal order of the rows: shuffling would let a fold
//! validate on days interleaved with its own training data.

use rayon::prelude::*;

use crate::mlmodels::{fit_regressor, Hyperparams, MlError, RegressorKind};

/// Candidate hyperparameter sets for one regressor kind plus the fold
/// count.
#[derive(Debug, Clone)]
pub struct HyperGrid {
    pub candidates: Vec<Hyperparams>,
    pub folds: usize,
}

impl HyperGrid {
    pub fn new(candidates: Vec<Hyperparams>) -> Self {
        Self {
            candidates,
            folds: 5,
        }
    }

    pub fn with_folds(candidates: Vec<Hyperparams>, folds: usize) -> Self {
        Self { candidates, folds }
    }
}

fn rmse(pred: &[f64], actual: &[f64]) -> f64 {
    let mse = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum::<f64>()
        / pred.len() as f64;
    mse.sqrt()
}

/// Mean validation RMSE of `candidate` over contiguous k-fold splits.
fn candidate_score(
    kind: RegressorKind,
    x: &[Vec<f64>],
    y: &[f64],
    candidate: &Hyperparams,
    folds: usize,
    seed: u64,
) -> Result<f64, MlError> {
    let n = x.len();
    let mut total = 0.0;
    for fold in 0..folds {
        let lo = fold * n / folds;
        let hi = (fold + 1) * n / folds;
        let train_idx: Vec<usize> = (0..lo).chain(hi..n).collect();
        let x_train: Vec<Vec<f64>> = train_idx.iter().map(|&i| x[i].clone()).collect();
        let y_train: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
        let model = fit_regressor(kind, &x_train, &y_train, candidate, seed)?;
        let pred: Vec<f64> = x[lo..hi]
            .iter()
            .map(|row| model.predict(row))
            .collect::<Result<_, _>>()?;
        total += rmse(&pred, &y[lo..hi]);
    }
    Ok(total / folds as f64)
}

/// The candidate with the lowest mean fold RMSE; ties keep the earliest
/// candidate in list order.
pub fn grid_search(
    kind: RegressorKind,
    x: &[Vec<f64>],
    y: &[f64],
    grid: &HyperGrid,
    seed: u64,
) -> Result<Hyperparams, MlError> {
    if grid.candidates.is_empty() {
        return Err(MlError::EmptyGrid);
    }
    if x.len() < grid.folds || grid.folds < 2 {
        return Err(MlError::TooFewRows {
            rows: x.len(),
            folds: grid.folds,
        });
    }
    let scores: Vec<f64> = grid
        .candidates
        .par_iter()
        .map(|candidate| candidate_score(kind, x, y, candidate, grid.folds, seed))
        .collect::<Result<_, _>>()?;
    let mut best = 0;
    for (i, score) in scores.iter().enumerate().skip(1) {
        if *score < scores[best] {
            best = i;
        }
    }
    Ok(grid.candidates[best].clone())
}
