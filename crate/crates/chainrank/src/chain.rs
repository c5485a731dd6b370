//! Chain retrieval over distance matrices.
//!
//! Plain ranking sorts the gallery once by distance to the query. Chain
//! retrieval instead walks the gallery: the first item minimizes distance to
//! the query, every later item minimizes the aggregated distance to a window
//! of recently retrieved items, and retrieved items leave the candidate
//! pool. On frame sequences this follows the drift of an identity through
//! consecutive frames instead of snapping back to the query's appearance.
//!
//! Variants:
//! - local with window N: the window holds the last N retrieved items;
//! - local with `with_ref`: the query stays a permanent extra window member;
//! - global: the query and every retrieved item participate in each step.
//!
//! All comparisons are exact; ties resolve to the lowest gallery position.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{DistanceMatrix, ItemId};

/// Window policy for chain retrieval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Sliding window over the most recent retrievals.
    Local,
    /// Every retrieved item plus the query participates in every step.
    Global,
}

/// How distances from several window members to one candidate are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Nearest window member decides (reduces to plain chaining at N=1).
    Min,
    /// Average distance over window members.
    Mean,
}

/// Configuration of one chain-mining run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChainConfig {
    pub variant: Variant,
    /// Window size N; must be >= 1 for the local variant, ignored for global.
    pub window: usize,
    /// Keep the original query as a permanent extra window member. The
    /// global variant always includes the query, so this flag only affects
    /// the local variant.
    pub with_ref: bool,
    pub aggregation: Aggregation,
}

impl ChainConfig {
    /// Local-N without the query reference, min aggregation. With `window`
    /// of 1 this is plain chain retrieval.
    pub fn local(window: usize) -> Self {
        ChainConfig {
            variant: Variant::Local,
            window,
            with_ref: false,
            aggregation: Aggregation::Min,
        }
    }

    /// Global variant, min aggregation.
    pub fn global() -> Self {
        ChainConfig {
            variant: Variant::Global,
            window: 0,
            with_ref: false,
            aggregation: Aggregation::Min,
        }
    }

    pub fn with_ref(mut self, with_ref: bool) -> Self {
        self.with_ref = with_ref;
        self
    }

    pub fn aggregation(mut self, aggregation: Aggregation) -> Self {
        self.aggregation = aggregation;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.variant == Variant::Local && self.window == 0 {
            return Err(Error::BadConfig("window must be >= 1".into()));
        }
        Ok(())
    }
}

/// Ordered gallery rankings, one per query. Each ranking is a permutation of
/// the gallery positions.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    query_ids: Vec<ItemId>,
    gallery_ids: Vec<ItemId>,
    rankings: Vec<Vec<usize>>,
}

impl RetrievalResult {
    /// Validates that `rankings` holds one permutation of
    /// `0..gallery_ids.len()` per query.
    pub fn new(
        query_ids: Vec<ItemId>,
        gallery_ids: Vec<ItemId>,
        rankings: Vec<Vec<usize>>,
    ) -> Result<Self> {
        if rankings.len() != query_ids.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} queries but {} rankings",
                query_ids.len(),
                rankings.len()
            )));
        }
        let n = gallery_ids.len();
        for (i, ranking) in rankings.iter().enumerate() {
            if ranking.len() != n {
                return Err(Error::NotPermutation(format!(
                    "ranking {} has {} entries, expected {}",
                    i,
                    ranking.len(),
                    n
                )));
            }
            let mut seen = vec![false; n];
            for &p in ranking {
                if p >= n || seen[p] {
                    return Err(Error::NotPermutation(format!(
                        "ranking {i} repeats or exceeds gallery position {p}"
                    )));
                }
                seen[p] = true;
            }
        }
        Ok(RetrievalResult {
            query_ids,
            gallery_ids,
            rankings,
        })
    }

    pub fn query_count(&self) -> usize {
        self.query_ids.len()
    }

    pub fn gallery_count(&self) -> usize {
        self.gallery_ids.len()
    }

    pub fn query_ids(&self) -> &[ItemId] {
        &self.query_ids
    }

    pub fn gallery_ids(&self) -> &[ItemId] {
        &self.gallery_ids
    }

    pub fn rankings(&self) -> &[Vec<usize>] {
        &self.rankings
    }

    pub fn ranking(&self, query: usize) -> &[usize] {
        &self.rankings[query]
    }

    /// Gallery ids of one ranking in retrieval order.
    pub fn ranked_ids(&self, query: usize) -> impl Iterator<Item = &ItemId> {
        self.rankings[query].iter().map(|&p| &self.gallery_ids[p])
    }
}

/// Sorts each gallery row of `qg` by ascending distance. Ties resolve to the
/// lowest gallery position.
pub fn direct_ranking(qg: &DistanceMatrix) -> Result<RetrievalResult> {
    let n = qg.cols();
    let rankings = (0..qg.rows())
        .map(|i| {
            let row = qg.row(i);
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_unstable_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            order
        })
        .collect();
    RetrievalResult::new(qg.row_ids().to_vec(), qg.col_ids().to_vec(), rankings)
}

/// Runs chain retrieval for every query of `qg` against the gallery
/// self-distances `gg`.
///
/// `gg` must be square over exactly the column labels of `qg`, in the same
/// order. Queries run concurrently; each chain is sequential.
pub fn mine_chains(
    qg: &DistanceMatrix,
    gg: &DistanceMatrix,
    cfg: &ChainConfig,
) -> Result<RetrievalResult> {
    cfg.validate()?;
    let n = qg.cols();
    if n == 0 {
        return Err(Error::EmptyGallery);
    }
    if gg.rows() != n || gg.cols() != n {
        return Err(Error::ShapeMismatch(format!(
            "gallery matrix is {}x{}, expected {}x{}",
            gg.rows(),
            gg.cols(),
            n,
            n
        )));
    }
    if gg.row_ids() != qg.col_ids() || gg.col_ids() != qg.col_ids() {
        return Err(Error::LabelMismatch(
            "gallery self-distance labels do not match query-gallery columns".into(),
        ));
    }

    let rankings: Vec<Vec<usize>> = (0..qg.rows())
        .into_par_iter()
        .map(|i| chain_one(qg.row(i), gg, cfg))
        .collect();

    RetrievalResult::new(qg.row_ids().to_vec(), qg.col_ids().to_vec(), rankings)
}

fn chain_one(query_row: &[f64], gg: &DistanceMatrix, cfg: &ChainConfig) -> Vec<usize> {
    let n = query_row.len();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut ranking = Vec::with_capacity(n);

    // First retrieval always comes straight from the query row.
    let first = pop_best(&mut remaining, |c| query_row[c]);
    ranking.push(first);

    match cfg.variant {
        Variant::Global => {
            // The participant set only grows, so min and sum fold forward.
            let mut agg: Vec<f64> = match cfg.aggregation {
                Aggregation::Min => (0..n).map(|c| query_row[c].min(gg.get(first, c))).collect(),
                Aggregation::Mean => (0..n).map(|c| query_row[c] + gg.get(first, c)).collect(),
            };
            while !remaining.is_empty() {
                let members = (ranking.len() + 1) as f64;
                let next = match cfg.aggregation {
                    Aggregation::Min => pop_best(&mut remaining, |c| agg[c]),
                    Aggregation::Mean => pop_best(&mut remaining, |c| agg[c] / members),
                };
                ranking.push(next);
                for c in &remaining {
                    match cfg.aggregation {
                        Aggregation::Min => agg[*c] = agg[*c].min(gg.get(next, *c)),
                        Aggregation::Mean => agg[*c] += gg.get(next, *c),
                    }
                }
            }
        }
        Variant::Local => {
            while !remaining.is_empty() {
                let start = ranking.len().saturating_sub(cfg.window);
                let window = &ranking[start..];
                let next = pop_best(&mut remaining, |c| {
                    score(window, cfg.with_ref.then(|| query_row[c]), gg, c, cfg.aggregation)
                });
                ranking.push(next);
            }
        }
    }
    ranking
}

fn score(
    window: &[usize],
    ref_distance: Option<f64>,
    gg: &DistanceMatrix,
    candidate: usize,
    aggregation: Aggregation,
) -> f64 {
    let member_distances = window.iter().map(|&w| gg.get(w, candidate));
    match aggregation {
        Aggregation::Min => {
            let m = member_distances.fold(f64::INFINITY, f64::min);
            match ref_distance {
                Some(r) => m.min(r),
                None => m,
            }
        }
        Aggregation::Mean => {
            let sum: f64 = member_distances.sum();
            match ref_distance {
                Some(r) => (sum + r) / (window.len() + 1) as f64,
                None => sum / window.len() as f64,
            }
        }
    }
}

/// Removes and returns the candidate with the smallest key; on equal keys the
/// lowest gallery position wins. `remaining` stays in ascending order, so the
/// first strict minimum encountered is the winner.
fn pop_best(remaining: &mut Vec<usize>, key: impl Fn(usize) -> f64) -> usize {
    debug_assert!(!remaining.is_empty());
    let mut best_slot = 0;
    let mut best_key = key(remaining[0]);
    for (slot, &c) in remaining.iter().enumerate().skip(1) {
        let k = key(c);
        if k < best_key {
            best_key = k;
            best_slot = slot;
        }
    }
    remaining.remove(best_slot)
}
