//! The four one-step regressors, hyperparameter grid search and the
//! recurrent multi-step forecaster.
//!
//! All models minimize squared error and train on standardized design
//! rows; everything is deterministic given (data, hyperparameters, seed).

mod boosting;
mod forest;
mod grid;
mod knn;
mod krr;
mod recurrent;
mod tree;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use boosting::Boosted;
use forest::Forest;
use knn::KnnModel;
use krr::KrrModel;

pub use boosting::DEFAULT_GB_DEPTH;
pub use grid::{grid_search, HyperGrid};
pub use recurrent::{recurrent_forecast, StepModel};

#[derive(Debug, Error, PartialEq)]
pub enum MlError {
    #[error("mlmodels: empty training set")]
    EmptyTrainingSet,
    #[error("mlmodels: kernel matrix is singular; increase alpha")]
    SingularKernel,
    #[error("mlmodels: feature width {got} does not match the model's {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("mlmodels: hyperparameters are for {got:?}, expected {expected:?}")]
    HyperparamMismatch {
        expected: RegressorKind,
        got: RegressorKind,
    },
    #[error("mlmodels: invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("mlmodels: empty hyperparameter grid")]
    EmptyGrid,
    #[error("mlmodels: {rows} training rows cannot form {folds} folds")]
    TooFewRows { rows: usize, folds: usize },
    #[error("mlmodels: insufficient history at anchor {anchor}: day {missing} is outside the panel")]
    InsufficientHistory {
        anchor: NaiveDate,
        missing: NaiveDate,
    },
    #[error("mlmodels: horizon {horizon} exceeds the exogenous lag {exog_lag}; later steps would need future exogenous data")]
    HorizonExceedsExogLag { horizon: usize, exog_lag: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegressorKind {
    RandomForest,
    GradientBoosting,
    Knn,
    KernelRidge,
}

impl RegressorKind {
    pub const ALL: [RegressorKind; 4] = [
        RegressorKind::RandomForest,
        RegressorKind::GradientBoosting,
        RegressorKind::Knn,
        RegressorKind::KernelRidge,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegressorKind::RandomForest => "rf",
            RegressorKind::GradientBoosting => "gb",
            RegressorKind::Knn => "knn",
            RegressorKind::KernelRidge => "krr",
        }
    }
}

impl std::fmt::Display for RegressorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Hyperparameters for one regressor kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Hyperparams {
    RandomForest {
        /// None grows trees until the leaves are pure.
        max_depth: Option<usize>,
        n_estimators: usize,
        #[serde(default = "default_true")]
        bootstrap: bool,
    },
    GradientBoosting {
        learning_rate: f64,
        n_estimators: usize,
        #[serde(default = "default_gb_depth")]
        max_depth: Option<usize>,
    },
    Knn {
        k: usize,
    },
    KernelRidge {
        alpha: f64,
        gamma: f64,
    },
}

fn default_true() -> bool {
    true
}

fn default_gb_depth() -> Option<usize> {
    Some(DEFAULT_GB_DEPTH)
}

impl Hyperparams {
    pub fn random_forest(max_depth: Option<usize>, n_estimators: usize) -> Self {
        Self::RandomForest {
            max_depth,
            n_estimators,
            bootstrap: true,
        }
    }

    pub fn gradient_boosting(learning_rate: f64, n_estimators: usize) -> Self {
        Self::GradientBoosting {
            learning_rate,
            n_estimators,
            max_depth: Some(DEFAULT_GB_DEPTH),
        }
    }

    pub fn knn(k: usize) -> Self {
        Self::Knn { k }
    }

    pub fn kernel_ridge(alpha: f64, gamma: f64) -> Self {
        Self::KernelRidge { alpha, gamma }
    }

    pub fn kind(&self) -> RegressorKind {
        match self {
            Self::RandomForest { .. } => RegressorKind::RandomForest,
            Self::GradientBoosting { .. } => RegressorKind::GradientBoosting,
            Self::Knn { .. } => RegressorKind::Knn,
            Self::KernelRidge { .. } => RegressorKind::KernelRidge,
        }
    }
}

#[derive(Debug, Clone)]
enum ModelState {
    Forest(Forest),
    Boosted(Boosted),
    Knn(KnnModel),
    Krr(KrrModel),
}

/// A fitted one-step regressor. Immutable and shareable across threads.
#[derive(Debug, Clone)]
pub struct TrainedRegressor {
    kind: RegressorKind,
    hyperparams: Hyperparams,
    n_features: usize,
    seed: u64,
    state: ModelState,
}

/// Metadata describing a trained model, serializable for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ModelMetadata {
    pub kind: RegressorKind,
    pub hyperparams: Hyperparams,
    pub seed: u64,
    pub n_features: usize,
    pub train_range: String,
}

pub fn fit_regressor(
    kind: RegressorKind,
    x: &[Vec<f64>],
    y: &[f64],
    hyperparams: &Hyperparams,
    seed: u64,
) -> Result<TrainedRegressor, MlError> {
    if x.is_empty() {
        return Err(MlError::EmptyTrainingSet);
    }
    assert_eq!(x.len(), y.len(), "feature and target row counts differ");
    if hyperparams.kind() != kind {
        return Err(MlError::HyperparamMismatch {
            expected: kind,
            got: hyperparams.kind(),
        });
    }
    let n_features = x[0].len();
    assert!(
        x.iter().all(|r| r.len() == n_features),
        "ragged feature rows"
    );

    let state = match *hyperparams {
        Hyperparams::RandomForest {
            max_depth,
            n_estimators,
            bootstrap,
        } => {
            if n_estimators == 0 {
                return Err(MlError::InvalidHyperparams("n_estimators must be >= 1".into()));
            }
            ModelState::Forest(Forest::fit(x, y, n_estimators, max_depth, bootstrap, seed))
        }
        Hyperparams::GradientBoosting {
            learning_rate,
            n_estimators,
            max_depth,
        } => {
            if !learning_rate.is_finite() || learning_rate <= 0.0 {
                return Err(MlError::InvalidHyperparams(
                    "learning_rate must be positive".into(),
                ));
            }
            ModelState::Boosted(Boosted::fit(x, y, n_estimators, learning_rate, max_depth))
        }
        Hyperparams::Knn { k } => {
            if k == 0 || k > x.len() {
                return Err(MlError::InvalidHyperparams(format!(
                    "k must be in 1..={}, got {k}",
                    x.len()
                )));
            }
            ModelState::Knn(KnnModel::fit(x, y, k))
        }
        Hyperparams::KernelRidge { alpha, gamma } => {
            if alpha < 0.0 || gamma <= 0.0 {
                return Err(MlError::InvalidHyperparams(
                    "alpha must be >= 0 and gamma > 0".into(),
                ));
            }
            ModelState::Krr(KrrModel::fit(x, y, alpha, gamma)?)
        }
    };

    Ok(TrainedRegressor {
        kind,
        hyperparams: hyperparams.clone(),
        n_features,
        seed,
        state,
    })
}

impl TrainedRegressor {
    pub fn predict(&self, row: &[f64]) -> Result<f64, MlError> {
        if row.len() != self.n_features {
            return Err(MlError::WidthMismatch {
                expected: self.n_features,
                got: row.len(),
            });
        }
        Ok(match &self.state {
            ModelState::Forest(m) => m.predict(row),
            ModelState::Boosted(m) => m.predict(row),
            ModelState::Knn(m) => m.predict(row),
            ModelState::Krr(m) => m.predict(row),
        })
    }

    pub fn kind(&self) -> RegressorKind {
        self.kind
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyperparams
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn metadata(&self, train_range: impl Into<String>) -> ModelMetadata {
        ModelMetadata {
            kind: self.kind,
            hyperparams: self.hyperparams.clone(),
            seed: self.seed,
            n_features: self.n_features,
            train_range: train_range.into(),
        }
    }

    /// Per-tree outputs for forests; None for other kinds.
    pub fn per_tree_predictions(&self, row: &[f64]) -> Option<Vec<f64>> {
        match &self.state {
            ModelState::Forest(m) => Some(m.per_tree(row)),
            _ => None,
        }
    }

    /// Boosted prediction truncated to the first `stages` trees; None for
    /// other kinds.
    pub fn predict_at_stage(&self, row: &[f64], stages: usize) -> Option<f64> {
        match &self.state {
            ModelState::Boosted(m) => Some(m.predict_at_stage(row, stages)),
            _ => None,
        }
    }

    /// Number of boosting stages; None for other kinds.
    pub fn n_stages(&self) -> Option<usize> {
        match &self.state {
            ModelState::Boosted(m) => Some(m.n_stages()),
            _ => None,
        }
    }
}
