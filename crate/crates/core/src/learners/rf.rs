use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rayon::prelude::*;

use super::{RfParams, TrainSet};
use crate::corpus::Label;
use crate::util::{self, derive_seed};

/// `n` row indices drawn uniformly with replacement.
pub fn bootstrap_indices<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    (0..n).map(|_| rng.gen_range(0..n)).collect()
}

const LEAF: usize = usize::MAX;

#[derive(Debug, Clone)]
struct Node {
    feature: usize,
    threshold: f64,
    left: usize,
    right: usize,
    /// SBR share of the training samples that reached the node.
    value: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    fn prob(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        loop {
            let n = &self.nodes[i];
            if n.feature == LEAF {
                return n.value;
            }
            i = if x[n.feature] <= n.threshold { n.left } else { n.right };
        }
    }

    #[cfg(test)]
    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.feature == LEAF).count()
    }

    #[cfg(test)]
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            let n = &nodes[i];
            if n.feature == LEAF {
                0
            } else {
                1 + walk(nodes, n.left).max(walk(nodes, n.right))
            }
        }
        walk(&self.nodes, 0)
    }
}

/// Bagged CART trees split on gini impurity; the forest predicts SBR when
/// the mean leaf probability reaches 0.5.
#[derive(Debug, Clone)]
pub(crate) struct Forest {
    pub trees: Vec<Tree>,
}

struct Split {
    feature: usize,
    threshold: f64,
    left: Vec<usize>,
    right: Vec<usize>,
    gain: f64,
}

struct Pending {
    node: usize,
    depth: usize,
    split: Split,
}

impl PartialEq for Pending {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Pending {}

impl PartialOrd for Pending {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Pending {
    /// Largest gain first, then oldest node.
    fn cmp(&self, other: &Self) -> Ordering {
        self.split
            .gain
            .total_cmp(&other.split.gain)
            .then(other.node.cmp(&self.node))
    }
}

struct Builder<'a> {
    cols: &'a [Vec<f64>],
    y: &'a [bool],
    p: &'a RfParams,
    mtry: usize,
}

/// `n · gini` for `pos` positives among `n`.
fn weighted_gini(pos: usize, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    2.0 * pos as f64 * (n - pos) as f64 / n as f64
}

impl Builder<'_> {
    fn positives(&self, samples: &[usize]) -> usize {
        samples.iter().filter(|&&i| self.y[i]).count()
    }

    fn best_split<R: Rng>(&self, samples: &[usize], depth: usize, rng: &mut R) -> Option<Split> {
        let n = samples.len();
        let pos = self.positives(samples);
        if n < self.p.min_samples_split
            || n < 2 * self.p.min_samples_leaf
            || pos == 0
            || pos == n
            || self.p.max_depth.is_some_and(|d| depth >= d)
        {
            return None;
        }
        let parent = weighted_gini(pos, n);
        let n_cols = self.cols.len();
        let mut features: Vec<usize> = (0..n_cols).collect();
        let mut visited = 0;
        let mut best: Option<(f64, usize, f64)> = None;
        let mut nonzero: Vec<(f64, bool)> = Vec::with_capacity(n);
        let mut groups: Vec<(f64, usize, usize)> = Vec::new();
        let min_leaf = self.p.min_samples_leaf.max(1);
        for drawn in 0..n_cols {
            if visited >= self.mtry {
                break;
            }
            let pick = rng.gen_range(drawn..n_cols);
            features.swap(drawn, pick);
            let f = features[drawn];
            let col = &self.cols[f];
            nonzero.clear();
            let (mut zeros, mut zero_pos) = (0, 0);
            for &i in samples {
                let v = col[i];
                if v == 0.0 {
                    zeros += 1;
                    zero_pos += usize::from(self.y[i]);
                } else {
                    nonzero.push((v, self.y[i]));
                }
            }
            if nonzero.is_empty() {
                continue;
            }
            nonzero.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            // Distinct values in ascending order as (value, rows, positives);
            // the zero block sits between the negatives and the positives.
            groups.clear();
            let split_at = nonzero.partition_point(|&(v, _)| v < 0.0);
            let push = |v: f64, pos: bool, groups: &mut Vec<(f64, usize, usize)>| match groups.last_mut() {
                Some(g) if g.0 == v => {
                    g.1 += 1;
                    g.2 += usize::from(pos);
                }
                _ => groups.push((v, 1, usize::from(pos))),
            };
            for &(v, pos) in &nonzero[..split_at] {
                push(v, pos, &mut groups);
            }
            if zeros > 0 {
                groups.push((0.0, zeros, zero_pos));
            }
            for &(v, pos) in &nonzero[split_at..] {
                push(v, pos, &mut groups);
            }
            if groups.len() < 2 {
                continue;
            }
            visited += 1;
            let (mut i, mut left_pos) = (0, 0);
            for g in 1..groups.len() {
                i += groups[g - 1].1;
                left_pos += groups[g - 1].2;
                if i < min_leaf || n - i < min_leaf {
                    continue;
                }
                let child = weighted_gini(left_pos, i) + weighted_gini(pos - left_pos, n - i);
                if best.is_none_or(|(b, _, _)| child < b) {
                    let (lo, hi) = (groups[g - 1].0, groups[g].0);
                    let mut threshold = (lo + hi) / 2.0;
                    if threshold >= hi {
                        threshold = lo;
                    }
                    best = Some((child, f, threshold));
                }
            }
        }
        let (child, feature, threshold) = best?;
        let col = &self.cols[feature];
        let (left, right) = samples.iter().partition(|&&i| col[i] <= threshold);
        Some(Split {
            feature,
            threshold,
            left,
            right,
            gain: parent - child,
        })
    }

    fn leaf(&self, samples: &[usize]) -> Node {
        Node {
            feature: LEAF,
            threshold: 0.0,
            left: 0,
            right: 0,
            value: self.positives(samples) as f64 / samples.len() as f64,
        }
    }

    /// Best-first growth: the open node with the largest impurity decrease
    /// is split next, until no split is possible or the leaf budget is spent.
    fn grow<R: Rng>(&self, samples: Vec<usize>, rng: &mut R) -> Tree {
        let mut nodes = vec![self.leaf(&samples)];
        let mut open = BinaryHeap::new();
        if let Some(split) = self.best_split(&samples, 0, rng) {
            open.push(Pending {
                node: 0,
                depth: 0,
                split,
            });
        }
        let budget = self.p.max_leaf_nodes.unwrap_or(usize::MAX);
        let mut leaves = 1;
        while leaves < budget {
            let Some(Pending { node, depth, split }) = open.pop() else {
                break;
            };
            let (l, r) = (nodes.len(), nodes.len() + 1);
            nodes.push(self.leaf(&split.left));
            nodes.push(self.leaf(&split.right));
            nodes[node].feature = split.feature;
            nodes[node].threshold = split.threshold;
            nodes[node].left = l;
            nodes[node].right = r;
            leaves += 1;
            for (child, part) in [(l, split.left), (r, split.right)] {
                if let Some(s) = self.best_split(&part, depth + 1, rng) {
                    open.push(Pending {
                        node: child,
                        depth: depth + 1,
                        split: s,
                    });
                }
            }
        }
        Tree { nodes }
    }
}

impl Forest {
    pub fn fit(ts: &TrainSet, p: &RfParams, seed: u64) -> Self {
        let n_cols = ts.n_features;
        let cols: Vec<Vec<f64>> = (0..n_cols).map(|j| ts.x.iter().map(|r| r[j]).collect()).collect();
        let y: Vec<bool> = ts.y.iter().map(|l| *l == Label::Sbr).collect();
        let mtry = match p.max_features {
            Some(frac) => ((frac * n_cols as f64).floor() as usize).max(1),
            None => ((n_cols as f64).sqrt().floor() as usize).max(1),
        }
        .min(n_cols.max(1));
        let builder = Builder {
            cols: &cols,
            y: &y,
            p,
            mtry,
        };
        let trees = (0..p.n_estimators)
            .into_par_iter()
            .map(|t| {
                let mut rng = util::rng(derive_seed(seed, t as u64));
                let sample = bootstrap_indices(ts.len(), &mut rng);
                builder.grow(sample, &mut rng)
            })
            .collect();
        Self { trees }
    }

    pub fn prob(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.prob(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        Label::from_flag(self.prob(x) >= 0.5)
    }
}
