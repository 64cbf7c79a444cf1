//! Forecasting toolkit for daily epidemic case counts.
//!
//! The crate fuses four open-data feeds (confirmed cases, weekly vaccine
//! doses, origin-destination mobility and station weather) into per-region
//! daily panels, fits two model families on them — closed-form population
//! growth curves (Gompertz, Logistic, Richards, Bertalanffy) and
//! from-scratch ML regressors (random forest, gradient boosting, k-NN,
//! kernel ridge) — produces recurrent 14-day forecasts, ensembles the
//! families, and attributes ML predictions with Shapley values.

pub mod calendar;
pub mod ensemble;
pub mod explain;
pub mod features;
pub mod ingest;
pub mod mlmodels;
pub mod popmodels;
pub mod regions;
pub mod rng;

pub use calendar::Calendar;
pub use ensemble::{ForecastSet, MemberForecast, ModelFamily, ModelSubset};
pub use features::{DesignMatrix, DesignOptions, ScalerParams, Scenario};
pub use ingest::{RegionPanel, Split, SplitBoundaries};
pub use mlmodels::{Hyperparams, RegressorKind, TrainedRegressor};
pub use popmodels::{GrowthModelFit, GrowthModelKind, GrowthParams};
pub use regions::{RegionCode, RegionKind, RegionRegistry};
