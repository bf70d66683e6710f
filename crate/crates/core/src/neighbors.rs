//! Sparse row storage and exact Euclidean k-nearest-neighbour search.
//!
//! Term-count rows are mostly zeros, so squared distances are computed as
//! `|q|² + |x|² − 2 q·x` with the dot products accumulated through an
//! inverted index over the nonzero columns of the query.

use std::cmp::Ordering;

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_cols: usize,
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn from_dense<'a, I>(rows: I, n_cols: usize) -> Self
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for row in rows {
            debug_assert_eq!(row.len(), n_cols);
            for (j, &v) in row.iter().enumerate() {
                if v != 0.0 {
                    indices.push(j as u32);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Self {
            n_cols,
            indptr,
            indices,
            values,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> SparseRow<'_> {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        SparseRow {
            indices: &self.indices[a..b],
            values: &self.values[a..b],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SparseRow<'a> {
    pub indices: &'a [u32],
    pub values: &'a [f64],
}

impl<'a> SparseRow<'a> {
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.indices.iter().zip(self.values).map(|(&j, &v)| (j as usize, v))
    }

    pub fn sq_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }
}

/// Exact Euclidean neighbour index over a fixed set of rows.
#[derive(Debug, Clone)]
pub struct EuclideanIndex {
    rows: SparseMatrix,
    postings: Vec<Vec<(u32, f64)>>,
    sq_norms: Vec<f64>,
}

impl EuclideanIndex {
    pub fn new(rows: SparseMatrix) -> Self {
        let mut postings = vec![Vec::new(); rows.n_cols()];
        let mut sq_norms = Vec::with_capacity(rows.n_rows());
        for i in 0..rows.n_rows() {
            let r = rows.row(i);
            for (j, v) in r.iter() {
                postings[j].push((i as u32, v));
            }
            sq_norms.push(r.sq_norm());
        }
        Self {
            rows,
            postings,
            sq_norms,
        }
    }

    pub fn rows(&self) -> &SparseMatrix {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.sq_norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sq_norms.is_empty()
    }

    /// Squared distances from `query` to every indexed row.
    pub fn sq_distances(&self, query: SparseRow<'_>, out: &mut Vec<f64>) {
        out.clear();
        out.resize(self.len(), 0.0);
        for (j, qv) in query.iter() {
            for &(r, xv) in &self.postings[j] {
                out[r as usize] += qv * xv;
            }
        }
        let qn = query.sq_norm();
        for (d, &xn) in out.iter_mut().zip(&self.sq_norms) {
            *d = (qn + xn - 2.0 * *d).max(0.0);
        }
    }

    /// The `k` rows closest to `query`, as `(squared distance, row)` sorted by
    /// distance then row index. Rows for which `skip` holds are ignored.
    pub fn nearest(
        &self,
        query: SparseRow<'_>,
        k: usize,
        skip: impl Fn(usize) -> bool,
        scratch: &mut Vec<f64>,
    ) -> Vec<(f64, usize)> {
        self.sq_distances(query, scratch);
        let mut cand: Vec<(f64, usize)> = scratch
            .iter()
            .enumerate()
            .filter(|(i, _)| !skip(*i))
            .map(|(i, &d)| (d, i))
            .collect();
        smallest_k(&mut cand, k);
        cand
    }
}

fn by_distance(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

/// Keeps the `k` smallest `(distance, index)` pairs, sorted.
pub(crate) fn smallest_k(cand: &mut Vec<(f64, usize)>, k: usize) {
    if k == 0 {
        cand.clear();
        return;
    }
    if cand.len() > k {
        cand.select_nth_unstable_by(k - 1, by_distance);
        cand.truncate(k);
    }
    cand.sort_unstable_by(by_distance);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute(rows: &[Vec<f64>], q: &[f64], k: usize, skip: usize) -> Vec<(f64, usize)> {
        let mut all: Vec<(f64, usize)> = rows
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .map(|(i, r)| (r.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum(), i))
            .collect();
        all.sort_by(by_distance);
        all.truncate(k);
        all
    }

    #[test]
    fn sparse_roundtrip() {
        let rows = [vec![0.0, 2.0, 0.0], vec![1.0, 0.0, 3.0]];
        let m = SparseMatrix::from_dense(rows.iter().map(Vec::as_slice), 3);
        assert_eq!(m.n_rows(), 2);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.row(1).iter().collect::<Vec<_>>(), vec![(0, 1.0), (2, 3.0)]);
    }

    proptest! {
        #[test]
        fn matches_brute_force_on_counts(
            rows in prop::collection::vec(prop::collection::vec(0u8..4, 6), 2..40),
            k in 1usize..8,
            q in 0usize..40,
        ) {
            let rows: Vec<Vec<f64>> = rows.into_iter()
                .map(|r| r.into_iter().map(f64::from).collect()).collect();
            let q = q % rows.len();
            let m = SparseMatrix::from_dense(rows.iter().map(Vec::as_slice), 6);
            let idx = EuclideanIndex::new(m.clone());
            let mut scratch = Vec::new();
            let got = idx.nearest(m.row(q), k, |i| i == q, &mut scratch);
            prop_assert_eq!(got, brute(&rows, &rows[q], k, q));
        }
    }
}
