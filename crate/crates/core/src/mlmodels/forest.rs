//! Bagged regression trees. Each tree draws its own bootstrap sample from
//! a generator keyed by (seed, tree index), so forests are reproducible
//! and trees can be grown in parallel in any order.

use rand::Rng;
use rayon::prelude::*;

use crate::mlmodels::tree::{RegressionTree, TreeConfig};
use crate::rng::keyed_rng;

#[derive(Debug, Clone)]
pub(crate) struct Forest {
    trees: Vec<RegressionTree>,
}

impl Forest {
    pub fn fit(
        x: &[Vec<f64>],
        y: &[f64],
        n_estimators: usize,
        max_depth: Option<usize>,
        bootstrap: bool,
        seed: u64,
    ) -> Self {
        let n = x.len();
        let config = TreeConfig {
            max_depth,
            min_leaf: 1,
        };
        let trees: Vec<RegressionTree> = (0..n_estimators)
            .into_par_iter()
            .map(|tree_idx| {
                let indices: Vec<usize> = if bootstrap {
                    let mut rng = keyed_rng(seed, tree_idx as u64);
                    (0..n).map(|_| rng.gen_range(0..n)).collect()
                } else {
                    (0..n).collect()
                };
                RegressionTree::fit(x, y, &indices, &config)
            })
            .collect();
        Self { trees }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.per_tree(row).iter().sum::<f64>() / self.trees.len() as f64
    }

    pub fn per_tree(&self, row: &[f64]) -> Vec<f64> {
        self.trees.iter().map(|t| t.predict(row)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy() -> (Vec<Vec<f64>>, Vec<f64>) {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64, (i * i % 7) as f64]).collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] - r[1]).collect();
        (x, y)
    }

    #[test]
    fn single_unbagged_tree_memorizes() {
        let (x, y) = xy();
        let forest = Forest::fit(&x, &y, 1, None, false, 0);
        for (row, target) in x.iter().zip(&y) {
            assert_eq!(forest.predict(row), *target);
        }
    }

    #[test]
    fn prediction_is_the_mean_of_trees() {
        let (x, y) = xy();
        let forest = Forest::fit(&x, &y, 25, Some(4), true, 7);
        for row in x.iter().take(5) {
            let per_tree = forest.per_tree(row);
            let mean = per_tree.iter().sum::<f64>() / per_tree.len() as f64;
            assert_eq!(forest.predict(row), mean);
        }
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = xy();
        let a = Forest::fit(&x, &y, 10, Some(6), true, 42);
        let b = Forest::fit(&x, &y, 10, Some(6), true, 42);
        let c = Forest::fit(&x, &y, 10, Some(6), true, 43);
        let probe = vec![7.5, 3.0];
        assert_eq!(a.predict(&probe), b.predict(&probe));
        assert_ne!(a.predict(&probe), c.predict(&probe));
    }
}
