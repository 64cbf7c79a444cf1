//! k-nearest-neighbours regression over the stored training set,
//! Euclidean distance, distance ties broken by training index.

#[derive(Debug, Clone)]
pub(crate) struct KnnModel {
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
    k: usize,
}

impl KnnModel {
    pub fn fit(x: &[Vec<f64>], y: &[f64], k: usize) -> Self {
        assert!(k >= 1 && k <= x.len(), "k validated by the caller");
        Self {
            x: x.to_vec(),
            y: y.to_vec(),
            k,
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut by_distance: Vec<(f64, usize)> = self
            .x
            .iter()
            .enumerate()
            .map(|(i, train)| (squared_distance(train, row), i))
            .collect();
        by_distance.sort_by(|a, b| a.partial_cmp(b).unwrap());
        by_distance[..self.k]
            .iter()
            .map(|&(_, i)| self.y[i])
            .sum::<f64>()
            / self.k as f64
    }
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
