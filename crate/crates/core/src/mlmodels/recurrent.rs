//! Recurrent multi-step forecasting.
//!
//! Step 1 predicts from the observed lags at the anchor day n; every later
//! step shifts the previous prediction into lag_1, so at step k lags
//! 1..k-1 hold predictions and lags k..14 hold observations. Exogenous
//! inputs for the day predicted at step k come from day n - exog_lag + k,
//! which never passes the anchor while the horizon stays within the lag.

use chrono::{Datelike, NaiveDate};

use crate::features::{DesignOptions, ScalerParams, Scenario};
use crate::ingest::RegionPanel;
use crate::mlmodels::{MlError, TrainedRegressor};

/// A one-step predictor over standardized feature rows. Implemented by
/// [`TrainedRegressor`]; test probes implement it to observe their inputs.
pub trait StepModel {
    fn n_features(&self) -> usize;
    fn predict_step(&self, scaled_row: &[f64]) -> f64;
}

impl StepModel for TrainedRegressor {
    fn n_features(&self) -> usize {
        TrainedRegressor::n_features(self)
    }

    fn predict_step(&self, scaled_row: &[f64]) -> f64 {
        self.predict(scaled_row)
            .expect("recurrent_forecast checks the feature width up front")
    }
}

/// Forecast `horizon` daily case counts after `anchor`, feeding each
/// prediction back into the lag window. Returns raw (inverse-transformed)
/// counts clamped at zero.
pub fn recurrent_forecast(
    model: &dyn StepModel,
    panel: &RegionPanel,
    anchor: NaiveDate,
    horizon: usize,
    scenario: Scenario,
    scaler: &ScalerParams,
    opts: &DesignOptions,
) -> Result<Vec<f64>, MlError> {
    if horizon > opts.exog_lag {
        return Err(MlError::HorizonExceedsExogLag {
            horizon,
            exog_lag: opts.exog_lag,
        });
    }
    let missing = |d: NaiveDate| MlError::InsufficientHistory { anchor, missing: d };
    let anchor_idx = panel
        .calendar
        .index_of(anchor)
        .ok_or_else(|| missing(anchor))?;
    if anchor_idx + 1 < opts.n_lags {
        return Err(missing(anchor - chrono::Duration::days(opts.n_lags as i64 - 1)));
    }
    if anchor_idx + 1 < opts.exog_lag {
        return Err(missing(anchor - chrono::Duration::days(opts.exog_lag as i64 - 1)));
    }

    // lags[j] is the value for lag_{j+1}: newest first.
    let mut lags: Vec<f64> = (0..opts.n_lags)
        .map(|j| panel.cases[anchor_idx - j])
        .collect();

    let width = scaler.n_columns();
    if model.n_features() != width {
        return Err(MlError::WidthMismatch {
            expected: model.n_features(),
            got: width,
        });
    }

    let mut out = Vec::with_capacity(horizon);
    let mut row = Vec::with_capacity(width);
    for k in 1..=horizon {
        row.clear();
        row.extend_from_slice(&lags);
        let exog_idx = anchor_idx + k - opts.exog_lag;
        if scenario.uses_vaccination() {
            row.push(panel.vax_dose1[exog_idx]);
            row.push(panel.vax_dose2[exog_idx]);
        }
        if scenario.uses_mobility() {
            row.push(panel.mobility[exog_idx]);
        }
        if scenario.uses_climate() {
            row.push(panel.temperature[exog_idx]);
            row.push(panel.precipitation[exog_idx]);
        }
        if opts.include_weekday {
            let target_day = anchor + chrono::Duration::days(k as i64);
            row.push(target_day.weekday().number_from_monday() as f64);
        }
        if row.len() != width {
            return Err(MlError::WidthMismatch {
                expected: width,
                got: row.len(),
            });
        }
        let scaled = scaler.transform_row(&row);
        let z = model.predict_step(&scaled);
        let raw = scaler.inverse_target(z).max(0.0);
        out.push(raw);
        lags.rotate_right(1);
        lags[0] = raw;
    }
    Ok(out)
}
