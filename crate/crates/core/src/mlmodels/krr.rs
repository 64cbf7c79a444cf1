//! Kernel ridge regression with an RBF kernel: dual coefficients solve
//! (K + alpha I) w = y via Cholesky, predictions are kernel expansions
//! over the training rows.

use nalgebra::{DMatrix, DVector};

use crate::mlmodels::MlError;

#[derive(Debug, Clone)]
pub(crate) struct KrrModel {
    x: Vec<Vec<f64>>,
    dual: Vec<f64>,
    gamma: f64,
}

fn rbf(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (-gamma * sq).exp()
}

impl KrrModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64], alpha: f64, gamma: f64) -> Result<Self, MlError> {
        let n = x.len();
        let mut gram = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let k = rbf(&x[i], &x[j], gamma);
                gram[(i, j)] = k;
                gram[(j, i)] = k;
            }
        }
        for i in 0..n {
            gram[(i, i)] += alpha;
        }
        let chol = gram.cholesky().ok_or(MlError::SingularKernel)?;
        let dual = chol.solve(&DVector::from_column_slice(y));
        Ok(Self {
            x: x.to_vec(),
            dual: dual.iter().copied().collect(),
            gamma,
        })
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.x
            .iter()
            .zip(&self.dual)
            .map(|(train, w)| w * rbf(train, row, self.gamma))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, (i as f64).sqrt()]).collect();
        let y = vec![0.5, -1.0, 2.0, 4.0, 3.0];
        (x, y)
    }

    #[test]
    fn tiny_alpha_interpolates_the_training_set() {
        let (x, y) = xy();
        let model = KrrModel::fit(&x, &y, 1e-10, 0.5).unwrap();
        for (row, target) in x.iter().zip(&y) {
            let residual = (model.predict(row) - target).abs();
            assert!(residual < 1e-6, "residual {residual}");
        }
    }

    #[test]
    fn zero_targets_give_zero_predictions() {
        let (x, _) = xy();
        let y = vec![0.0; x.len()];
        let model = KrrModel::fit(&x, &y, 1e-3, 0.5).unwrap();
        assert_eq!(model.predict(&[9.0, 9.0]), 0.0);
        assert_eq!(model.predict(&x[2]), 0.0);
    }

    #[test]
    fn residual_norm_decreases_with_alpha() {
        let (x, y) = xy();
        let mut previous = f64::INFINITY;
        for alpha in [10.0, 1e-2, 1e-6] {
            let model = KrrModel::fit(&x, &y, alpha, 0.5).unwrap();
            let norm: f64 = x
                .iter()
                .zip(&y)
                .map(|(row, t)| (model.predict(row) - t).powi(2))
                .sum::<f64>()
                .sqrt();
            assert!(norm < previous, "alpha {alpha}: {norm} >= {previous}");
            previous = norm;
        }
    }

    #[test]
    fn duplicate_rows_with_zero_alpha_are_singular() {
        let x = vec![vec![1.0], vec![1.0]];
        let y = vec![0.0, 1.0];
        assert!(matches!(
            KrrModel::fit(&x, &y, 0.0, 1.0),
            Err(MlError::SingularKernel)
        ));
    }
}
