//! Sigmoidal population-growth models fit to short cumulative-case
//! windows.
//!
//! Each model has a closed-form solution whose three (four for Richards)
//! parameters are seeded by a three-point inversion and refined by a
//! Nelder-Mead simplex minimizing the sum of squared errors against the
//! window.

mod curve;
mod fit;
mod neldermead;
mod threepoint;

use thiserror::Error;

pub use curve::{evaluate_curve, ode_rhs, GrowthModelKind, GrowthParams};
pub use fit::{fit_population_model, forecast_population, FitConfig, GrowthModelFit};
pub use neldermead::{minimize, NelderMeadConfig, NelderMeadResult};
pub use threepoint::{estimate_initial, fallback_params};

#[derive(Debug, Error, PartialEq)]
pub enum PopModelError {
    #[error("popmodels: window has {got} days, the configured training window is {expected}")]
    WrongWindowLength { expected: usize, got: usize },
    #[error("popmodels: cumulative window decreases at offset {index}")]
    DecreasingWindow { index: usize },
    #[error("popmodels: window is degenerate for three-point estimation (flat or non-monotone samples)")]
    DegenerateWindow,
    #[error("popmodels: parameters outside the model domain: {0}")]
    ParamDomain(String),
    #[error("popmodels: optimizer diverged (non-finite objective)")]
    OptimizerDiverged,
    #[error("popmodels: Richards has no three-point estimator; it starts from the fitted logistic parameters")]
    RichardsThreePoint,
}
