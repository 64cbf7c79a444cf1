//! Forecast metrics and aggregation across model families.
//!
//! A single 14-day forecast is scored by the mean of its per-step errors;
//! metrics over a test period average those per-forecast scores across
//! anchors. Aggregation combines member forecasts element-wise with mean,
//! median, or validation-RMSE-inverse weights.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EnsembleError {
    #[error("ensemble: series lengths differ ({pred} predictions vs {actual} actuals)")]
    LengthMismatch { pred: usize, actual: usize },
    #[error("ensemble: actual value at step {0} is zero; percentage error undefined")]
    ZeroActual(usize),
    #[error("ensemble: no members in the requested subset")]
    EmptySubset,
    #[error("ensemble: no weight supplied for model {0:?}")]
    MissingWeight(String),
    #[error("ensemble: validation RMSE for model {0:?} is zero; inverse weighting undefined")]
    ZeroRmse(String),
    #[error("ensemble: duplicate model id {0:?} in forecast set")]
    DuplicateModelId(String),
    #[error("ensemble: member forecasts have differing horizons")]
    HorizonMismatch,
    #[error("ensemble: no forecast sets supplied")]
    EmptyForecasts,
    #[error("ensemble: no actuals recorded for anchor {0}")]
    MissingActuals(NaiveDate),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Ml,
    Pop,
}

impl std::fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelFamily::Ml => "ml",
            ModelFamily::Pop => "pop",
        })
    }
}

/// Which members participate in an aggregate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelSubset {
    Ml,
    Pop,
    All,
}

impl ModelSubset {
    pub const ALL: [ModelSubset; 3] = [ModelSubset::Ml, ModelSubset::Pop, ModelSubset::All];

    pub fn admits(self, family: ModelFamily) -> bool {
        match self {
            ModelSubset::Ml => family == ModelFamily::Ml,
            ModelSubset::Pop => family == ModelFamily::Pop,
            ModelSubset::All => true,
        }
    }
}

impl std::fmt::Display for ModelSubset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelSubset::Ml => "ml",
            ModelSubset::Pop => "pop",
            ModelSubset::All => "all",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregation {
    Mean,
    Median,
    Wavg,
}

impl Aggregation {
    pub const ALL: [Aggregation; 3] = [Aggregation::Mean, Aggregation::Median, Aggregation::Wavg];
}

impl std::fmt::Display for Aggregation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Aggregation::Mean => "mean",
            Aggregation::Median => "median",
            Aggregation::Wavg => "wavg",
        })
    }
}

/// One model's daily forecast within a set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MemberForecast {
    pub id: String,
    pub family: ModelFamily,
    pub values: Vec<f64>,
}

/// All member forecasts launched from one anchor date.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForecastSet {
    pub anchor: NaiveDate,
    pub members: Vec<MemberForecast>,
}

impl ForecastSet {
    pub fn new(anchor: NaiveDate, members: Vec<MemberForecast>) -> Result<Self, EnsembleError> {
        let mut seen = std::collections::BTreeSet::new();
        for m in &members {
            if !seen.insert(m.id.as_str()) {
                return Err(EnsembleError::DuplicateModelId(m.id.clone()));
            }
        }
        if let Some(first) = members.first() {
            if members.iter().any(|m| m.values.len() != first.values.len()) {
                return Err(EnsembleError::HorizonMismatch);
            }
        }
        Ok(Self { anchor, members })
    }

    pub fn horizon(&self) -> usize {
        self.members.first().map_or(0, |m| m.values.len())
    }
}

fn check_lengths(pred: &[f64], actual: &[f64]) -> Result<(), EnsembleError> {
    if pred.len() != actual.len() {
        return Err(EnsembleError::LengthMismatch {
            pred: pred.len(),
            actual: actual.len(),
        });
    }
    Ok(())
}

/// Mean absolute percentage error as a fraction (0.10 = 10%).
pub fn mape(pred: &[f64], actual: &[f64]) -> Result<f64, EnsembleError> {
    check_lengths(pred, actual)?;
    let mut total = 0.0;
    for (step, (p, a)) in pred.iter().zip(actual).enumerate() {
        if *a == 0.0 {
            return Err(EnsembleError::ZeroActual(step + 1));
        }
        total += ((p - a) / a).abs();
    }
    Ok(total / pred.len() as f64)
}

/// Root mean squared error, in cases.
pub fn rmse(pred: &[f64], actual: &[f64]) -> Result<f64, EnsembleError> {
    check_lengths(pred, actual)?;
    let mse = pred
        .iter()
        .zip(actual)
        .map(|(p, a)| (p - a) * (p - a))
        .sum::<f64>()
        / pred.len() as f64;
    Ok(mse.sqrt())
}

/// Non-negative per-model weights normalized to sum one.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleWeights {
    weights: BTreeMap<String, f64>,
}

impl EnsembleWeights {
    pub fn new(raw: BTreeMap<String, f64>) -> Self {
        let total: f64 = raw.values().sum();
        assert!(
            total > 0.0 && raw.values().all(|w| *w >= 0.0),
            "weights must be non-negative with a positive sum"
        );
        Self {
            weights: raw.into_iter().map(|(k, w)| (k, w / total)).collect(),
        }
    }

    pub fn get(&self, id: &str) -> Option<f64> {
        self.weights.get(id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.weights.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Inverse-RMSE weights: the better a model validated, the more it counts.
pub fn wavg_weights(
    validation_rmse: &BTreeMap<String, f64>,
) -> Result<EnsembleWeights, EnsembleError> {
    let mut raw = BTreeMap::new();
    for (id, r) in validation_rmse {
        if *r <= 0.0 {
            return Err(EnsembleError::ZeroRmse(id.clone()));
        }
        raw.insert(id.clone(), 1.0 / r);
    }
    if raw.is_empty() {
        return Err(EnsembleError::EmptySubset);
    }
    Ok(EnsembleWeights::new(raw))
}

/// Element-wise aggregate of the subset's member forecasts.
pub fn aggregate(
    set: &ForecastSet,
    method: Aggregation,
    subset: ModelSubset,
    weights: Option<&EnsembleWeights>,
) -> Result<Vec<f64>, EnsembleError> {
    let members: Vec<&MemberForecast> = set
        .members
        .iter()
        .filter(|m| subset.admits(m.family))
        .collect();
    if members.is_empty() {
        return Err(EnsembleError::EmptySubset);
    }
    let horizon = members[0].values.len();

    match method {
        Aggregation::Mean => Ok((0..horizon)
            .map(|k| members.iter().map(|m| m.values[k]).sum::<f64>() / members.len() as f64)
            .collect()),
        Aggregation::Median => Ok((0..horizon)
            .map(|k| {
                let mut column: Vec<f64> = members.iter().map(|m| m.values[k]).collect();
                column.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let n = column.len();
                if n % 2 == 1 {
                    column[n / 2]
                } else {
                    0.5 * (column[n / 2 - 1] + column[n / 2])
                }
            })
            .collect()),
        Aggregation::Wavg => {
            let weights = weights.ok_or_else(|| {
                EnsembleError::MissingWeight("no weights supplied for wavg".to_string())
            })?;
            let mut member_weights = Vec::with_capacity(members.len());
            for m in &members {
                let w = weights
                    .get(&m.id)
                    .ok_or_else(|| EnsembleError::MissingWeight(m.id.clone()))?;
                member_weights.push(w);
            }
            // Renormalize within the subset so every subset row uses a
            // proper convex combination.
            let total: f64 = member_weights.iter().sum();
            if total <= 0.0 {
                return Err(EnsembleError::EmptySubset);
            }
            Ok((0..horizon)
                .map(|k| {
                    members
                        .iter()
                        .zip(&member_weights)
                        .map(|(m, w)| m.values[k] * w)
                        .sum::<f64>()
                        / total
                })
                .collect())
        }
    }
}

/// Per-family mean and standard deviation of the signed relative error at
/// each forecast step, averaged over anchors.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyMpe {
    pub family: ModelFamily,
    pub mean: Vec<f64>,
    /// Population standard deviation across the family's models.
    pub std: Vec<f64>,
}

/// Signed mean percentage error per timestep, grouped by model family.
pub fn mpe_per_timestep(
    sets: &[ForecastSet],
    actuals: &BTreeMap<NaiveDate, Vec<f64>>,
) -> Result<Vec<FamilyMpe>, EnsembleError> {
    if sets.is_empty() {
        return Err(EnsembleError::EmptyForecasts);
    }
    let horizon = sets[0].horizon();

    // Per model: per-step sums of relative error over anchors.
    let mut per_model: BTreeMap<(ModelFamily, String), (Vec<f64>, usize)> = BTreeMap::new();
    for set in sets {
        if set.horizon() != horizon {
            return Err(EnsembleError::HorizonMismatch);
        }
        let actual = actuals
            .get(&set.anchor)
            .ok_or(EnsembleError::MissingActuals(set.anchor))?;
        check_lengths(&vec![0.0; horizon], actual)?;
        for m in &set.members {
            let entry = per_model
                .entry((m.family, m.id.clone()))
                .or_insert_with(|| (vec![0.0; horizon], 0));
            for (k, (p, a)) in m.values.iter().zip(actual).enumerate() {
                if *a == 0.0 {
                    return Err(EnsembleError::ZeroActual(k + 1));
                }
                entry.0[k] += (p - a) / a;
            }
            entry.1 += 1;
        }
    }

    let mut families: BTreeMap<ModelFamily, Vec<Vec<f64>>> = BTreeMap::new();
    for ((family, _id), (sums, count)) in per_model {
        let curve: Vec<f64> = sums.iter().map(|s| s / count as f64).collect();
        families.entry(family).or_default().push(curve);
    }

    Ok(families
        .into_iter()
        .map(|(family, curves)| {
            let n = curves.len() as f64;
            let mean: Vec<f64> = (0..horizon)
                .map(|k| curves.iter().map(|c| c[k]).sum::<f64>() / n)
                .collect();
            let std: Vec<f64> = (0..horizon)
                .map(|k| {
                    let m = mean[k];
                    (curves.iter().map(|c| (c[k] - m) * (c[k] - m)).sum::<f64>() / n).sqrt()
                })
                .collect();
            FamilyMpe { family, mean, std }
        })
        .collect())
}
