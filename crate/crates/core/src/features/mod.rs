//! Preprocessing of the exogenous feeds and construction of the lagged
//! design matrices the ML regressors consume.

mod design;
mod mobility;
mod scaler;
mod smoothing;
pub mod spline;
mod vaccination;

use chrono::NaiveDate;
use thiserror::Error;

use crate::regions::RegionCode;

pub use design::{build_design_matrix, DesignMatrix, DesignOptions, Scenario};
pub use mobility::{
    assign_mobility_days, mobility_flux, regional_flux_by_day, MobilityDailySeries,
    MobilitySource,
};
pub use scaler::{standardize, ColumnScaler, ScalerParams};
pub use smoothing::rolling_average;
pub use vaccination::{daily_vaccination, DailyVaxSeries, VaxProvenance};

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("features: vaccination needs at least 3 weekly anchors before the cutoff, got {0}")]
    InsufficientAnchors(usize),
    #[error("features: mobility observation missing for {0} (required by the day-assignment rule)")]
    MissingObservation(NaiveDate),
    #[error("features: no mobility flux data for {region} on {day}")]
    NoFluxData { region: RegionCode, day: NaiveDate },
    #[error("features: cannot smooth an empty series")]
    EmptySeries,
    #[error("features: column {0:?} is constant on the fit rows")]
    ConstantColumn(String),
    #[error("features: need at least {min} leading days before the first target row, panel has {len}")]
    InsufficientHistory { len: usize, min: usize },
    #[error("features: no fit rows supplied to the scaler")]
    EmptyFitRows,
    #[error("features: spline needs at least two knots")]
    TooFewKnots,
}
