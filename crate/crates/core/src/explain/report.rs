//! Dataset-level attribution summaries: mean absolute importance per
//! feature, cross-model spread, and per-feature dependence pairs.

use rayon::prelude::*;
use serde::Serialize;

use crate::explain::shapley::shapley_sampled;
use crate::explain::{ExplainError, PredictModel};

#[derive(Debug, Clone)]
pub struct AttributionConfig {
    pub n_permutations: usize,
    pub seed: u64,
}

impl Default for AttributionConfig {
    fn default() -> Self {
        Self {
            n_permutations: 200,
            seed: 0,
        }
    }
}

/// One model's attribution over a dataset.
#[derive(Debug, Clone, Serialize)]
pub struct ModelAttribution {
    pub model_id: String,
    pub base_value: f64,
    /// Row-major per-instance Shapley values.
    pub per_instance: Vec<Vec<f64>>,
    /// Mean |phi| per feature across the dataset.
    pub mean_abs: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AttributionReport {
    pub feature_names: Vec<String>,
    pub per_model: Vec<ModelAttribution>,
    /// Cross-model mean of the per-feature mean |phi|.
    pub mean_abs_across_models: Vec<f64>,
    /// Population standard deviation across models.
    pub std_across_models: Vec<f64>,
    /// When set, importances are scaled so the largest equals one.
    pub normalized: bool,
}

fn attribution_for_model(
    model: &dyn PredictModel,
    rows: &[Vec<f64>],
    background: &[Vec<f64>],
    config: &AttributionConfig,
) -> Result<(f64, Vec<Vec<f64>>), ExplainError> {
    // Seeds are partitioned per instance, so identical models get
    // identical estimates and row order does not matter.
    let per_instance: Vec<Vec<f64>> = rows
        .par_iter()
        .enumerate()
        .map(|(idx, row)| {
            shapley_sampled(
                model,
                row,
                background,
                config.n_permutations,
                config.seed ^ (idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
            )
            .map(|s| s.phi)
        })
        .collect::<Result<_, _>>()?;
    let base = if rows.is_empty() {
        0.0
    } else {
        shapley_sampled(model, &rows[0], background, 1, config.seed)?.base_value
    };
    Ok((base, per_instance))
}

/// Attribution summary across models sharing one feature schema.
pub fn importance_summary(
    models: &[(String, &dyn PredictModel)],
    rows: &[Vec<f64>],
    background: &[Vec<f64>],
    feature_names: &[String],
    config: &AttributionConfig,
    normalize: bool,
) -> Result<AttributionReport, ExplainError> {
    let d = feature_names.len();
    for (_, model) in models {
        if model.n_features() != d {
            return Err(ExplainError::SchemaMismatch(d, model.n_features()));
        }
    }

    let mut per_model = Vec::with_capacity(models.len());
    for (id, model) in models {
        let (base_value, per_instance) = attribution_for_model(*model, rows, background, config)?;
        let mut mean_abs = vec![0.0; d];
        for phi in &per_instance {
            for (m, p) in mean_abs.iter_mut().zip(phi) {
                *m += p.abs();
            }
        }
        for m in mean_abs.iter_mut() {
            *m /= rows.len().max(1) as f64;
        }
        per_model.push(ModelAttribution {
            model_id: id.clone(),
            base_value,
            per_instance,
            mean_abs,
        });
    }

    let n_models = per_model.len() as f64;
    let mut mean_across = vec![0.0; d];
    let mut std_across = vec![0.0; d];
    for feature in 0..d {
        let mean =
            per_model.iter().map(|m| m.mean_abs[feature]).sum::<f64>() / n_models;
        let var = per_model
            .iter()
            .map(|m| (m.mean_abs[feature] - mean).powi(2))
            .sum::<f64>()
            / n_models;
        mean_across[feature] = mean;
        std_across[feature] = var.sqrt();
    }

    if normalize {
        let peak = mean_across.iter().copied().fold(0.0, f64::max);
        if peak > 0.0 {
            for v in mean_across.iter_mut() {
                *v /= peak;
            }
            for v in std_across.iter_mut() {
                *v /= peak;
            }
            for model in per_model.iter_mut() {
                for v in model.mean_abs.iter_mut() {
                    *v /= peak;
                }
            }
        }
    }

    Ok(AttributionReport {
        feature_names: feature_names.to_vec(),
        per_model,
        mean_abs_across_models: mean_across,
        std_across_models: std_across,
        normalized: normalize,
    })
}

/// (feature value, Shapley value) pairs for one feature over a dataset,
/// ready for a dependence scatter export.
pub fn dependence_export(
    model: &dyn PredictModel,
    rows: &[Vec<f64>],
    background: &[Vec<f64>],
    feature_names: &[String],
    feature: &str,
    config: &AttributionConfig,
) -> Result<Vec<(f64, f64)>, ExplainError> {
    let index = feature_names
        .iter()
        .position(|n| n == feature)
        .ok_or_else(|| ExplainError::UnknownFeature(feature.to_string()))?;
    let (_base, per_instance) = attribution_for_model(model, rows, background, config)?;
    Ok(rows
        .iter()
        .zip(&per_instance)
        .map(|(row, phi)| (row[index], phi[index]))
        .collect())
}
