use super::{KnnParams, TrainSet};
use crate::corpus::Label;
use crate::neighbors::{EuclideanIndex, SparseMatrix};

/// Majority vote of the nearest training rows; a tied vote goes to SBR.
#[derive(Debug, Clone)]
pub(crate) struct Knn {
    index: EuclideanIndex,
    labels: Vec<Label>,
    k: usize,
}

impl Knn {
    pub fn fit(ts: &TrainSet, p: &KnnParams) -> Self {
        let rows = SparseMatrix::from_dense(ts.x.iter().map(Vec::as_slice), ts.n_features);
        Self {
            index: EuclideanIndex::new(rows),
            labels: ts.y.clone(),
            k: p.n_neighbors,
        }
    }

    pub fn predict(&self, x: &[f64]) -> Label {
        let q = SparseMatrix::from_dense([x], x.len());
        let mut scratch = Vec::new();
        let near = self.index.nearest(q.row(0), self.k, |_| false, &mut scratch);
        vote(near.iter().map(|&(_, i)| self.labels[i]))
    }
}

pub(crate) fn vote(labels: impl Iterator<Item = Label>) -> Label {
    let (mut sbr, mut total) = (0usize, 0usize);
    for l in labels {
        total += 1;
        sbr += usize::from(l == Label::Sbr);
    }
    Label::from_flag(2 * sbr >= total)
}
