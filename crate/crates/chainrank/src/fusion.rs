//! Positionwise vote fusion of several models' retrieval lists.
//!
//! All models rank the same queries against the same gallery. For each
//! output position every model nominates the first item of its own list not
//! yet emitted; the candidate with the most votes is appended. A vote tie
//! falls back to distance: each tied candidate is scored by its nominating
//! model's distance to the query (the smallest such distance when several
//! models nominated it), and the closest candidate wins. A residual tie
//! resolves to the lowest gallery position.
//!
//! Distances from different models are compared raw by default; models with
//! incommensurable distance scales can opt into per-query min-max
//! normalization for the tie-break only.

use rayon::prelude::*;

use crate::chain::RetrievalResult;
use crate::error::{Error, Result};
use crate::types::DistanceMatrix;

/// Validated bundle of K retrieval lists with the K query-gallery distance
/// matrices that produced them.
#[derive(Debug)]
pub struct FusionInput<'a> {
    results: &'a [RetrievalResult],
    matrices: &'a [DistanceMatrix],
}

impl<'a> FusionInput<'a> {
    /// Checks K >= 1 and that every result and matrix shares the query and
    /// gallery labels of the first, in identical order.
    pub fn new(
        results: &'a [RetrievalResult],
        matrices: &'a [DistanceMatrix],
    ) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::BadConfig("fusion needs at least one model".into()));
        }
        if results.len() != matrices.len() {
            return Err(Error::BadConfig(format!(
                "{} ranking lists but {} distance matrices",
                results.len(),
                matrices.len()
            )));
        }
        let first = &results[0];
        for r in results {
            if r.query_ids() != first.query_ids() || r.gallery_ids() != first.gallery_ids() {
                return Err(Error::LabelMismatch(
                    "ranking lists disagree on query or gallery labels".into(),
                ));
            }
        }
        for m in matrices {
            if m.row_ids() != first.query_ids() || m.col_ids() != first.gallery_ids() {
                return Err(Error::LabelMismatch(
                    "distance matrix labels do not match the ranking lists".into(),
                ));
            }
        }
        Ok(FusionInput { results, matrices })
    }

    pub fn model_count(&self) -> usize {
        self.results.len()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct FusionOptions {
    /// Min-max normalize each model's distances per query before the
    /// tie-break comparison. Off by default: raw values are compared.
    pub normalize: bool,
}

/// Fuses K retrieval lists into one by positionwise voting.
pub fn fuse(input: &FusionInput<'_>, options: &FusionOptions) -> Result<RetrievalResult> {
    let first = &input.results[0];
    let n = first.gallery_count();
    let rankings: Vec<Vec<usize>> = (0..first.query_count())
        .into_par_iter()
        .map(|i| fuse_query(input, options, i, n))
        .collect();
    RetrievalResult::new(
        first.query_ids().to_vec(),
        first.gallery_ids().to_vec(),
        rankings,
    )
}

fn fuse_query(input: &FusionInput<'_>, options: &FusionOptions, query: usize, n: usize) -> Vec<usize> {
    let k = input.results.len();
    let scorers: Vec<RowScorer<'_>> = input
        .matrices
        .iter()
        .map(|m| RowScorer::new(m.row(query), options.normalize))
        .collect();

    let mut output = Vec::with_capacity(n);
    let mut emitted = vec![false; n];
    // Per-model cursor into its list; items only ever join the output, so
    // cursors never move backwards.
    let mut cursors = vec![0usize; k];
    // votes/score are keyed by candidate and cleared between positions via
    // the stamp, avoiding per-position allocation.
    let mut votes = vec![0usize; n];
    let mut score = vec![0.0f64; n];
    let mut stamp = vec![usize::MAX; n];

    for position in 0..n {
        let mut candidates: Vec<usize> = Vec::with_capacity(k);
        for (l, cursor) in cursors.iter_mut().enumerate() {
            let list = input.results[l].ranking(query);
            while emitted[list[*cursor]] {
                *cursor += 1;
            }
            let candidate = list[*cursor];
            let d = scorers[l].score(candidate);
            if stamp[candidate] != position {
                stamp[candidate] = position;
                votes[candidate] = 1;
                score[candidate] = d;
                candidates.push(candidate);
            } else {
                votes[candidate] += 1;
                score[candidate] = score[candidate].min(d);
            }
        }
        let winner = candidates
            .into_iter()
            .reduce(|best, c| {
                if votes[c] > votes[best]
                    || (votes[c] == votes[best] && score[c] < score[best])
                    || (votes[c] == votes[best] && score[c] == score[best] && c < best)
                {
                    c
                } else {
                    best
                }
            })
            .expect("every model nominates a candidate");
        emitted[winner] = true;
        output.push(winner);
    }
    output
}

/// Tie-break scores for one model's distances to one query.
struct RowScorer<'a> {
    row: &'a [f64],
    scale: Option<(f64, f64)>,
}

impl<'a> RowScorer<'a> {
    fn new(row: &'a [f64], normalize: bool) -> Self {
        let scale = normalize.then(|| {
            let min = row.iter().copied().fold(f64::INFINITY, f64::min);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (min, max)
        });
        RowScorer { row, scale }
    }

    fn score(&self, candidate: usize) -> f64 {
        match self.scale {
            None => self.row[candidate],
            // A constant row carries no preference; everything maps to 0.
            Some((min, max)) if max == min => 0.0,
            Some((min, max)) => (self.row[candidate] - min) / (max - min),
        }
    }
}
