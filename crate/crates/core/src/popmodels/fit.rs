//! Least-squares fitting of the growth curves and daily-case forecasting.

use chrono::NaiveDate;
use serde::Serialize;

use crate::popmodels::curve::{evaluate_curve, evaluate_unchecked, GrowthModelKind, GrowthParams};
use crate::popmodels::neldermead::{minimize, NelderMeadConfig};
use crate::popmodels::threepoint::{estimate_initial, fallback_params};
use crate::popmodels::PopModelError;

#[derive(Debug, Clone)]
pub struct FitConfig {
    /// Days of cumulative cases the model trains on.
    pub window_len: usize,
    pub optimizer: NelderMeadConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            window_len: 30,
            optimizer: NelderMeadConfig::default(),
        }
    }
}

/// A fitted curve with its training window and diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct GrowthModelFit {
    pub kind: GrowthModelKind,
    #[serde(flatten)]
    pub params: GrowthParams,
    pub sse: f64,
    pub window_start: NaiveDate,
    pub window_end: NaiveDate,
    pub converged: bool,
}

impl GrowthModelFit {
    /// Days spanned by the window minus one: the time coordinate of the
    /// last trained day.
    fn final_t(&self) -> f64 {
        (self.window_end - self.window_start).num_days() as f64
    }
}

fn sse_objective(kind: GrowthModelKind, window: &[f64]) -> impl Fn(&[f64]) -> f64 + '_ {
    move |x: &[f64]| {
        window
            .iter()
            .enumerate()
            .map(|(t, value)| {
                let p = evaluate_unchecked(kind, x, t as f64);
                let r = p - value;
                r * r
            })
            .sum()
    }
}

/// Fit `kind` to a cumulative window by simplex search from the
/// three-point initial estimate. Richards starts from the fitted logistic
/// parameters with unit shape.
pub fn fit_population_model(
    kind: GrowthModelKind,
    window: &[f64],
    window_start: NaiveDate,
    config: &FitConfig,
) -> Result<GrowthModelFit, PopModelError> {
    if window.len() != config.window_len {
        return Err(PopModelError::WrongWindowLength {
            expected: config.window_len,
            got: window.len(),
        });
    }
    if let Some(i) = window.windows(2).position(|w| w[1] < w[0]) {
        return Err(PopModelError::DecreasingWindow { index: i + 1 });
    }

    let initial = match kind {
        GrowthModelKind::Richards => {
            let logistic =
                fit_population_model(GrowthModelKind::Logistic, window, window_start, config)?;
            GrowthParams::with_shape(logistic.params.a, logistic.params.b, logistic.params.c, 1.0)
        }
        _ => match estimate_initial(kind, window) {
            Ok(params) => params,
            Err(PopModelError::DegenerateWindow) => fallback_params(kind, window[0]),
            Err(other) => return Err(other),
        },
    };

    let objective = sse_objective(kind, window);
    let result = minimize(&objective, &initial.to_vec(kind), &config.optimizer)?;

    let window_end = window_start + chrono::Duration::days(window.len() as i64 - 1);
    Ok(GrowthModelFit {
        kind,
        params: GrowthParams::from_slice(kind, &result.x),
        sse: result.fx,
        window_start,
        window_end,
        converged: result.converged,
    })
}

/// Daily new cases for the `horizon` days after the window: differences
/// of the cumulative curve, clamped at zero.
pub fn forecast_population(
    fit: &GrowthModelFit,
    horizon: usize,
) -> Result<Vec<f64>, PopModelError> {
    let t_end = fit.final_t();
    let mut previous = evaluate_curve(fit.kind, &fit.params, t_end)?;
    let mut out = Vec::with_capacity(horizon);
    for k in 1..=horizon {
        let current = evaluate_curve(fit.kind, &fit.params, t_end + k as f64)?;
        out.push((current - previous).max(0.0));
        previous = current;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn day0() -> NaiveDate {
        "2021-03-01".parse().unwrap()
    }

    fn sample(kind: GrowthModelKind, params: &GrowthParams, len: usize) -> Vec<f64> {
        (0..len)
            .map(|t| evaluate_curve(kind, params, t as f64).unwrap())
            .collect()
    }

    fn rel_rmse(kind: GrowthModelKind, fit: &GrowthModelFit, window: &[f64]) -> f64 {
        let mse: f64 = window
            .iter()
            .enumerate()
            .map(|(t, v)| {
                let p = evaluate_curve(kind, &fit.params, t as f64).unwrap();
                ((p - v) / v).powi(2)
            })
            .sum::<f64>()
            / window.len() as f64;
        mse.sqrt()
    }

    #[test]
    fn refits_noiseless_gompertz() {
        let truth = GrowthParams::new(1.2, 0.15, -2.5);
        let window = sample(GrowthModelKind::Gompertz, &truth, 30);
        let fit = fit_population_model(
            GrowthModelKind::Gompertz,
            &window,
            day0(),
            &FitConfig::default(),
        )
        .unwrap();
        assert!(rel_rmse(GrowthModelKind::Gompertz, &fit, &window) < 1e-3);
        assert!(fit.converged);
        assert_eq!(fit.window_end, day0() + chrono::Duration::days(29));
    }

    #[test]
    fn richards_never_worse_than_logistic_on_logistic_data() {
        let truth = GrowthParams::new(0.35, 7e-5, 2e-3);
        let window = sample(GrowthModelKind::Logistic, &truth, 30);
        let cfg = FitConfig::default();
        let logistic =
            fit_population_model(GrowthModelKind::Logistic, &window, day0(), &cfg).unwrap();
        let richards =
            fit_population_model(GrowthModelKind::Richards, &window, day0(), &cfg).unwrap();
        assert!(
            richards.sse <= logistic.sse + 1e-6,
            "richards {} vs logistic {}",
            richards.sse,
            logistic.sse
        );
    }

    #[test]
    fn wrong_window_length_rejected() {
        let window = vec![1.0; 29];
        assert_eq!(
            fit_population_model(
                GrowthModelKind::Gompertz,
                &window,
                day0(),
                &FitConfig::default()
            )
            .unwrap_err(),
            PopModelError::WrongWindowLength {
                expected: 30,
                got: 29
            }
        );
    }

    #[test]
    fn decreasing_window_rejected() {
        let mut window: Vec<f64> = (1..=30).map(f64::from).collect();
        window[17] = 0.5;
        assert!(matches!(
            fit_population_model(
                GrowthModelKind::Gompertz,
                &window,
                day0(),
                &FitConfig::default()
            )
            .unwrap_err(),
            PopModelError::DecreasingWindow { .. }
        ));
    }

    #[test]
    fn flat_window_fits_via_fallback() {
        let window = vec![500.0; 30];
        let fit = fit_population_model(
            GrowthModelKind::Logistic,
            &window,
            day0(),
            &FitConfig::default(),
        )
        .unwrap();
        // The optimizer should hug the constant level closely.
        let p = evaluate_curve(GrowthModelKind::Logistic, &fit.params, 15.0).unwrap();
        assert!((p - 500.0).abs() / 500.0 < 0.05, "mid-window {p}");
    }

    #[test]
    fn forecast_of_constant_curve_is_zero() {
        let fit = GrowthModelFit {
            kind: GrowthModelKind::Gompertz,
            params: GrowthParams::new(0.0, 1.0, 0.0),
            sse: 0.0,
            window_start: day0(),
            window_end: day0() + chrono::Duration::days(29),
            converged: true,
        };
        let forecast = forecast_population(&fit, 14).unwrap();
        assert_eq!(forecast, vec![0.0; 14]);
    }

    #[test]
    fn saturated_logistic_forecasts_vanish() {
        // Asymptote 1000, effectively reached long before the window end.
        let fit = GrowthModelFit {
            kind: GrowthModelKind::Logistic,
            params: GrowthParams::new(1.0, 0.001, 100.0),
            sse: 0.0,
            window_start: day0(),
            window_end: day0() + chrono::Duration::days(29),
            converged: true,
        };
        let forecast = forecast_population(&fit, 14).unwrap();
        assert!(forecast.iter().all(|v| *v < 1e-3), "{forecast:?}");
    }

    #[test]
    fn rising_gompertz_forecast_matches_true_increments() {
        let truth = GrowthParams::new(1.2, 0.15, -2.5);
        let window = sample(GrowthModelKind::Gompertz, &truth, 30);
        let fit = fit_population_model(
            GrowthModelKind::Gompertz,
            &window,
            day0(),
            &FitConfig::default(),
        )
        .unwrap();
        let forecast = forecast_population(&fit, 14).unwrap();
        for (k, predicted) in forecast.iter().enumerate() {
            let t = 29.0 + (k + 1) as f64;
            let expected = evaluate_curve(GrowthModelKind::Gompertz, &truth, t).unwrap()
                - evaluate_curve(GrowthModelKind::Gompertz, &truth, t - 1.0).unwrap();
            let rel = (predicted - expected).abs() / expected.abs().max(1e-12);
            assert!(rel < 0.01, "step {}: {predicted} vs {expected}", k + 1);
        }
    }

    #[test]
    fn forecast_sums_telescope_to_the_curve_difference() {
        let truth = GrowthParams::new(1.2, 0.15, -2.5);
        let window = sample(GrowthModelKind::Gompertz, &truth, 30);
        let fit = fit_population_model(
            GrowthModelKind::Gompertz,
            &window,
            day0(),
            &FitConfig::default(),
        )
        .unwrap();
        let forecast = forecast_population(&fit, 14).unwrap();
        // The fitted curve rises, so clamping is inert and the series
        // telescopes.
        let total: f64 = forecast.iter().sum();
        let expected = evaluate_curve(fit.kind, &fit.params, 29.0 + 14.0).unwrap()
            - evaluate_curve(fit.kind, &fit.params, 29.0).unwrap();
        assert!((total - expected).abs() < 1e-9 * expected.max(1.0));
    }

    #[test]
    fn fit_serializes_with_flattened_params() {
        let fit = GrowthModelFit {
            kind: GrowthModelKind::Richards,
            params: GrowthParams::with_shape(0.4, 1e-4, 3e-3, 1.7),
            sse: 12.5,
            window_start: day0(),
            window_end: day0() + chrono::Duration::days(29),
            converged: true,
        };
        let json = serde_json::to_value(&fit).unwrap();
        assert_eq!(json["kind"], "richards");
        assert_eq!(json["a"], 0.4);
        assert_eq!(json["s"], 1.7);
        assert_eq!(json["converged"], true);
        // The shape parameter is omitted for three-parameter models.
        let fit3 = GrowthModelFit {
            kind: GrowthModelKind::Gompertz,
            params: GrowthParams::new(1.0, 0.5, -2.0),
            ..fit
        };
        let json3 = serde_json::to_value(&fit3).unwrap();
        assert!(json3.get("s").is_none());
    }
}
