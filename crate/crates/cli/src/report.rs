//! Report files. Everything is written atomically (temp file + rename) so
//! an interrupted run never leaves a truncated report behind.

use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::Serialize;

use epiforge_core::ensemble::FamilyMpe;
use epiforge_core::explain::AttributionReport;
use epiforge_core::ForecastSet;

use crate::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut file = std::fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.flush().map_err(io)?;
    drop(file);
    std::fs::rename(&tmp, path).map_err(io)
}

/// One `metrics.json` cell: an aggregation applied to a model subset
/// under one scenario, scored over a reporting split.
#[derive(Debug, Clone, Serialize)]
pub struct MetricCell {
    pub split: String,
    pub scenario: u8,
    pub aggregation: String,
    pub subset: String,
    pub mape: f64,
    pub rmse: f64,
    pub per_timestep_mpe: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MetricsReport {
    pub region: String,
    pub seed: u64,
    pub horizon: usize,
    pub cells: Vec<MetricCell>,
}

pub fn write_metrics_json(path: &Path, report: &MetricsReport) -> Result<(), CliError> {
    let mut json = serde_json::to_string_pretty(report)
        .map_err(|e| CliError::Io(format!("metrics serialization: {e}")))?;
    json.push('\n');
    write_atomic(path, json.as_bytes())
}

/// `forecasts.csv`: one row per (anchor, model, step).
pub fn write_forecasts_csv(
    path: &Path,
    sets: &[(u8, &ForecastSet)],
) -> Result<(), CliError> {
    let mut out = String::from("anchor,model,step,value\n");
    for (_scenario, set) in sets {
        for member in &set.members {
            for (step0, value) in member.values.iter().enumerate() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    set.anchor,
                    member.id,
                    step0 + 1,
                    value
                ));
            }
        }
    }
    write_atomic(path, out.as_bytes())
}

/// `mpe_timestep.csv`: per-family signed error curves by split and
/// scenario (`-` for the scenario-independent population family).
pub fn write_mpe_csv(
    path: &Path,
    rows: &[(String, String, FamilyMpe)],
) -> Result<(), CliError> {
    let mut out = String::from("split,scenario,family,step,mpe,std\n");
    for (split, scenario, curve) in rows {
        for (step0, (mpe, std)) in curve.mean.iter().zip(&curve.std).enumerate() {
            out.push_str(&format!(
                "{split},{scenario},{},{},{mpe},{std}\n",
                curve.family,
                step0 + 1
            ));
        }
    }
    write_atomic(path, out.as_bytes())
}

/// `importance.csv` from an attribution report.
pub fn write_importance_csv(path: &Path, report: &AttributionReport) -> Result<(), CliError> {
    let mut out = String::from("feature,mean_abs_shap,std_across_models\n");
    for (i, feature) in report.feature_names.iter().enumerate() {
        out.push_str(&format!(
            "{feature},{},{}\n",
            report.mean_abs_across_models[i], report.std_across_models[i]
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// `dependence_<feature>.csv`: raw feature value vs Shapley value.
pub fn write_dependence_csv(path: &Path, pairs: &[(f64, f64)]) -> Result<(), CliError> {
    let mut out = String::from("raw_value,shap_value\n");
    for (raw, shap) in pairs {
        out.push_str(&format!("{raw},{shap}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Trained-model descriptions for `models.json`.
pub fn write_models_json<T: Serialize>(path: &Path, metadata: &T) -> Result<(), CliError> {
    let mut json = serde_json::to_string_pretty(metadata)
        .map_err(|e| CliError::Io(format!("model metadata serialization: {e}")))?;
    json.push('\n');
    write_atomic(path, json.as_bytes())
}

/// Actual daily cases over a forecast window, for evaluation and charts.
pub fn actuals_for_anchor(
    cases: &[f64],
    calendar_index: impl Fn(NaiveDate) -> Option<usize>,
    anchor: NaiveDate,
    horizon: usize,
) -> Option<Vec<f64>> {
    let start = calendar_index(anchor + chrono::Duration::days(1))?;
    let end = calendar_index(anchor + chrono::Duration::days(horizon as i64))?;
    Some(cases[start..=end].to_vec())
}
