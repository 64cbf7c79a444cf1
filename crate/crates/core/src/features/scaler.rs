//! Zero-mean, unit-variance standardization fit on the training rows.

use serde::{Deserialize, Serialize};

use crate::features::design::DesignMatrix;
use crate::features::FeatureError;

/// Guard against treating numerically-constant columns as scalable.
const MIN_STD: f64 = 1e-12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnScaler {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

impl ColumnScaler {
    fn identity(name: &str) -> Self {
        Self {
            name: name.to_string(),
            mean: 0.0,
            std: 1.0,
        }
    }

    pub fn transform(&self, x: f64) -> f64 {
        (x - self.mean) / self.std
    }

    pub fn inverse(&self, z: f64) -> f64 {
        z * self.std + self.mean
    }
}

/// Per-column mean and population standard deviation, fit on one row
/// subset and applicable to any later row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<ColumnScaler>,
    pub target: ColumnScaler,
    /// Which rows the parameters were fit on, e.g. `train[2021-01-15..2021-09-01] n=230`.
    pub fit_range: String,
}

impl ScalerParams {
    /// A no-op scaler over the named columns, handy for probing model
    /// inputs in raw space.
    pub fn identity(column_names: &[String]) -> Self {
        Self {
            columns: column_names
                .iter()
                .map(|n| ColumnScaler::identity(n))
                .collect(),
            target: ColumnScaler::identity("target"),
            fit_range: "identity".to_string(),
        }
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn transform_row(&self, raw: &[f64]) -> Vec<f64> {
        assert_eq!(raw.len(), self.columns.len(), "row width mismatch");
        raw.iter()
            .zip(&self.columns)
            .map(|(x, c)| c.transform(*x))
            .collect()
    }

    pub fn inverse_row(&self, scaled: &[f64]) -> Vec<f64> {
        assert_eq!(scaled.len(), self.columns.len(), "row width mismatch");
        scaled
            .iter()
            .zip(&self.columns)
            .map(|(z, c)| c.inverse(*z))
            .collect()
    }

    pub fn transform_target(&self, y: f64) -> f64 {
        self.target.transform(y)
    }

    pub fn inverse_target(&self, z: f64) -> f64 {
        self.target.inverse(z)
    }
}

fn fit_column(name: &str, values: &[f64]) -> Result<ColumnScaler, FeatureError> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let std = var.sqrt();
    if std < MIN_STD * mean.abs().max(1.0) {
        return Err(FeatureError::ConstantColumn(name.to_string()));
    }
    Ok(ColumnScaler {
        name: name.to_string(),
        mean,
        std,
    })
}

/// Fit per-column parameters on `fit_rows` and scale every row of the
/// matrix (target included) with them.
pub fn standardize(
    matrix: &DesignMatrix,
    fit_rows: &[usize],
) -> Result<(DesignMatrix, ScalerParams), FeatureError> {
    if fit_rows.is_empty() {
        return Err(FeatureError::EmptyFitRows);
    }
    let mut columns = Vec::with_capacity(matrix.n_cols());
    for (c, name) in matrix.column_names.iter().enumerate() {
        let values: Vec<f64> = fit_rows.iter().map(|&r| matrix.row(r)[c]).collect();
        columns.push(fit_column(name, &values)?);
    }
    let target_values: Vec<f64> = fit_rows.iter().map(|&r| matrix.targets[r]).collect();
    let target = fit_column("target", &target_values)?;

    let fit_range = {
        let first = matrix.target_dates[*fit_rows.first().unwrap()];
        let last = matrix.target_dates[*fit_rows.last().unwrap()];
        format!("fit[{first}..{last}] n={}", fit_rows.len())
    };
    let params = ScalerParams {
        columns,
        target,
        fit_range,
    };

    let mut scaled = matrix.clone();
    for r in 0..matrix.n_rows() {
        let row = params.transform_row(matrix.row(r));
        scaled.set_row(r, &row);
        scaled.targets[r] = params.transform_target(matrix.targets[r]);
    }
    Ok((scaled, params))
}
