//! CART regression tree: exhaustive threshold scan minimizing the
//! weighted sum of child variances, midpoint thresholds, first-found ties.

#[derive(Debug, Clone)]
pub(crate) struct TreeConfig {
    pub max_depth: Option<usize>,
    pub min_leaf: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self {
            max_depth: None,
            min_leaf: 1,
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct RegressionTree {
    nodes: Vec<Node>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    sse: f64,
}

impl RegressionTree {
    /// Grow a tree on the rows selected by `indices` (duplicates allowed,
    /// as produced by bootstrap sampling).
    pub fn fit(x: &[Vec<f64>], y: &[f64], indices: &[usize], config: &TreeConfig) -> Self {
        assert_eq!(x.len(), y.len());
        assert!(!indices.is_empty(), "tree needs at least one row");
        let mut tree = Self { nodes: Vec::new() };
        tree.grow(x, y, indices.to_vec(), 0, config);
        tree
    }

    fn grow(
        &mut self,
        x: &[Vec<f64>],
        y: &[f64],
        indices: Vec<usize>,
        depth: usize,
        config: &TreeConfig,
    ) -> usize {
        let mean = indices.iter().map(|&i| y[i]).sum::<f64>() / indices.len() as f64;
        let depth_capped = config.max_depth.is_some_and(|d| depth >= d);
        let split = if depth_capped || indices.len() < 2 * config.min_leaf {
            None
        } else {
            best_split(x, y, &indices, config.min_leaf)
        };
        match split {
            None => {
                self.nodes.push(Node::Leaf { value: mean });
                self.nodes.len() - 1
            }
            Some(best) => {
                let (left_idx, right_idx): (Vec<usize>, Vec<usize>) = indices
                    .into_iter()
                    .partition(|&i| x[i][best.feature] <= best.threshold);
                let left = self.grow(x, y, left_idx, depth + 1, config);
                let right = self.grow(x, y, right_idx, depth + 1, config);
                self.nodes.push(Node::Split {
                    feature: best.feature,
                    threshold: best.threshold,
                    left,
                    right,
                });
                self.nodes.len() - 1
            }
        }
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = self.nodes.len() - 1; // root is pushed last
        loop {
            match &self.nodes[node] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    #[cfg(test)]
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }
}

/// Scan every feature and every boundary between distinct sorted values;
/// the winning split strictly lowers the summed child SSE. Child SSE uses
/// the identity sum((v - mean)^2) = sum(v^2) - sum(v)^2 / n over prefix
/// sums.
#[allow(clippy::needless_range_loop)] // `feature` indexes columns, not `x` itself
fn best_split(x: &[Vec<f64>], y: &[f64], indices: &[usize], min_leaf: usize) -> Option<BestSplit> {
    let n = indices.len();
    let total_sum: f64 = indices.iter().map(|&i| y[i]).sum();
    let total_sq: f64 = indices.iter().map(|&i| y[i] * y[i]).sum();
    let parent_sse = total_sq - total_sum * total_sum / n as f64;
    if parent_sse <= 1e-12 {
        return None; // already pure
    }

    let n_features = x[indices[0]].len();
    let mut best: Option<BestSplit> = None;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for feature in 0..n_features {
        order.clear();
        order.extend_from_slice(indices);
        // Stable sort keeps equal-valued rows in index order.
        order.sort_by(|&a, &b| x[a][feature].partial_cmp(&x[b][feature]).unwrap());

        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for (pos, &i) in order.iter().enumerate().take(n - 1) {
            left_sum += y[i];
            left_sq += y[i] * y[i];
            let n_left = pos + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let here = x[i][feature];
            let next = x[order[pos + 1]][feature];
            if here == next {
                continue; // cannot separate equal values
            }
            let right_sum = total_sum - left_sum;
            let right_sq = total_sq - left_sq;
            let sse = (left_sq - left_sum * left_sum / n_left as f64)
                + (right_sq - right_sum * right_sum / n_right as f64);
            if best.as_ref().map_or(true, |b| sse < b.sse) {
                best = Some(BestSplit {
                    feature,
                    threshold: 0.5 * (here + next),
                    sse,
                });
            }
        }
    }
    // Require an actual improvement so constant-feature nodes terminate.
    best.filter(|b| b.sse < parent_sse - 1e-12)
}
