//! Trailing rolling average with an expanding warm-up.

use crate::features::FeatureError;

/// Smooth `series` with a trailing `window`-day mean. Day `d` averages
/// days `d-window+1..=d`; the first `window-1` days fall back to the mean
/// of everything available so far.
pub fn rolling_average(series: &[f64], window: usize) -> Result<Vec<f64>, FeatureError> {
    if series.is_empty() {
        return Err(FeatureError::EmptySeries);
    }
    assert!(window > 0, "rolling window must be positive");
    let mut out = Vec::with_capacity(series.len());
    let mut running = 0.0;
    for (i, value) in series.iter().enumerate() {
        running += value;
        if i >= window {
            running -= series[i - window];
        }
        let span = (i + 1).min(window);
        out.push(running / span as f64);
    }
    Ok(out)
}
