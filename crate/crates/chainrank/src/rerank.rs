//! k-reciprocal re-ranking of a query-gallery distance matrix.
//!
//! Queries and gallery are stitched into one item set P with a full pairwise
//! distance matrix assembled from the three input blocks. Each item gets a
//! soft neighborhood vector built from its k-reciprocal nearest neighbors;
//! the refined distance blends the Jaccard distance between those vectors
//! with the original distance:
//!
//! 1. `N(p, k)`: the k nearest neighbors of p (itself included, ties by
//!    position).
//! 2. `R(p, k) = { x in N(p, k) : p in N(x, k) }`.
//! 3. `R*(p, k1)`: `R(p, k1)` expanded by `R(x, k1/2)` for each
//!    `x in R(p, k1)` whose half-set overlaps `R(p, k1)` in at least two
//!    thirds of its elements.
//! 4. `V_p(x) = exp(-d(p, x))` on `R*(p, k1)`, zero elsewhere,
//!    L1-normalized.
//! 5. `V_p` replaced by the mean of `V_x` over `x in N(p, k2)`.
//! 6. `d_J(q, g) = 1 - sum_x min(V_q(x), V_g(x)) / sum_x max(V_q(x), V_g(x))`
//!    (0/0 counts as distance 0: items with identical, or both empty,
//!    neighborhoods are treated as same).
//! 7. `d*(q, g) = (1 - lambda) * d_J(q, g) + lambda * d(q, g)`.
//!
//! The operation is a pure matrix transform: it takes the query-query and
//! gallery-gallery distances as inputs rather than recomputing them, so it
//! can run on any distance source. Neighborhood vectors are kept dense; at
//! the matrix sizes this pipeline targets that is both simpler and faster
//! than sparse bookkeeping.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RerankParams {
    /// Neighborhood size for the reciprocal sets.
    pub k1: usize,
    /// Neighborhood size for the local expansion step.
    pub k2: usize,
    /// Weight of the original distance in the final blend.
    pub lambda: f64,
}

impl Default for RerankParams {
    fn default() -> Self {
        RerankParams {
            k1: 20,
            k2: 6,
            lambda: 0.3,
        }
    }
}

impl RerankParams {
    /// Checks the parameter ranges that do not depend on the data size; the
    /// size constraint (k1 below the stitched item count) is checked by
    /// [`k_reciprocal_rerank`] once the matrices are known.
    pub fn validate(&self) -> Result<()> {
        if self.k1 == 0 {
            return Err(Error::BadConfig("k1 must be >= 1".into()));
        }
        if self.k2 == 0 {
            return Err(Error::BadConfig("k2 must be >= 1".into()));
        }
        if self.k2 > self.k1 {
            return Err(Error::BadConfig("k2 must be <= k1".into()));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::BadConfig("lambda must be in [0, 1]".into()));
        }
        Ok(())
    }
}

/// Refines `qg` using reciprocal-neighbor structure from all three distance
/// blocks. Returns an m x n matrix with the labels of `qg`.
pub fn k_reciprocal_rerank(
    qg: &DistanceMatrix,
    qq: &DistanceMatrix,
    gg: &DistanceMatrix,
    params: &RerankParams,
) -> Result<DistanceMatrix> {
    let (m, n) = (qg.rows(), qg.cols());
    if !qq.is_self_distance() || qq.row_ids() != qg.row_ids() {
        return Err(Error::LabelMismatch(
            "query self-distance labels do not match query-gallery rows".into(),
        ));
    }
    if !gg.is_self_distance() || gg.row_ids() != qg.col_ids() {
        return Err(Error::LabelMismatch(
            "gallery self-distance labels do not match query-gallery columns".into(),
        ));
    }
    let s = m + n;
    params.validate()?;
    if params.k1 >= s {
        return Err(Error::BadConfig(format!(
            "k1 must be smaller than the {s} stitched items"
        )));
    }

    // Full distance matrix over P = queries then gallery.
    let mut d = vec![0.0; s * s];
    for i in 0..m {
        d[i * s..i * s + m].copy_from_slice(qq.row(i));
        d[i * s + m..(i + 1) * s].copy_from_slice(qg.row(i));
    }
    for j in 0..n {
        let row = (m + j) * s;
        for i in 0..m {
            d[row + i] = qg.get(i, j);
        }
        d[row + m..row + s].copy_from_slice(gg.row(j));
    }

    let k1 = params.k1;
    let half = k1 / 2;

    // Step 1. First k1 of each row's argsort, plus every item's rank in
    // every row (capped at k1; membership in N(x, k) never needs more).
    let mut nearest: Vec<Vec<usize>> = Vec::with_capacity(s);
    let mut rank_in = vec![u32::MAX; s * s];
    let prefixes: Vec<Vec<usize>> = (0..s)
        .into_par_iter()
        .map(|p| {
            let row = &d[p * s..(p + 1) * s];
            let mut order: Vec<usize> = (0..s).collect();
            order.sort_unstable_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
            order.truncate(k1);
            order
        })
        .collect();
    for (p, prefix) in prefixes.into_iter().enumerate() {
        for (r, &x) in prefix.iter().enumerate() {
            rank_in[p * s + x] = r as u32;
        }
        nearest.push(prefix);
    }
    let in_neighbors = |x: usize, p: usize, k: usize| rank_in[x * s + p] < k as u32;

    // Step 2. Reciprocal sets at k1 and k1/2.
    let reciprocal = |p: usize, k: usize| -> Vec<usize> {
        nearest[p][..k]
            .iter()
            .copied()
            .filter(|&x| in_neighbors(x, p, k))
            .collect()
    };
    let r_full: Vec<Vec<usize>> = (0..s).into_par_iter().map(|p| reciprocal(p, k1)).collect();
    let r_half: Vec<Vec<usize>> = (0..s).into_par_iter().map(|p| reciprocal(p, half)).collect();

    // Step 3. Expansion: pull in a neighbor's half-set when it mostly
    // overlaps the base set. The 2/3 threshold compares exactly in integers.
    let expanded: Vec<Vec<usize>> = (0..s)
        .into_par_iter()
        .map(|p| {
            let base = &r_full[p];
            // Overlap is measured against the unexpanded set, so earlier
            // unions cannot influence later admission tests.
            let mut in_base = vec![false; s];
            for &x in base {
                in_base[x] = true;
            }
            let mut member = in_base.clone();
            for &x in base {
                let candidate = &r_half[x];
                let overlap = candidate.iter().filter(|&&y| in_base[y]).count();
                if 3 * overlap >= 2 * candidate.len() {
                    for &y in candidate {
                        member[y] = true;
                    }
                }
            }
            (0..s).filter(|&x| member[x]).collect()
        })
        .collect();

    // Step 4. Soft neighborhood vectors, L1-normalized. An empty expanded
    // set leaves the vector at zero.
    let mut v = vec![0.0; s * s];
    v.par_chunks_mut(s).enumerate().for_each(|(p, row)| {
        let mut sum = 0.0;
        for &x in &expanded[p] {
            let w = (-d[p * s + x]).exp();
            row[x] = w;
            sum += w;
        }
        if sum > 0.0 {
            for &x in &expanded[p] {
                row[x] /= sum;
            }
        }
    });

    // Step 5. Local expansion over the k2 nearest, averaging the
    // pre-expansion vectors.
    let k2 = params.k2;
    let mut v2 = vec![0.0; s * s];
    v2.par_chunks_mut(s).enumerate().for_each(|(p, row)| {
        for &x in &nearest[p][..k2] {
            let vx = &v[x * s..(x + 1) * s];
            for (slot, value) in row.iter_mut().zip(vx) {
                *slot += value;
            }
        }
        for slot in row.iter_mut() {
            *slot /= k2 as f64;
        }
    });

    // Steps 6 and 7. Jaccard distance between neighborhood vectors, blended
    // with the original distance.
    let lambda = params.lambda;
    let mut out = vec![0.0; m * n];
    out.par_chunks_mut(n.max(1)).enumerate().for_each(|(i, row)| {
        let vq = &v2[i * s..(i + 1) * s];
        for (j, slot) in row.iter_mut().enumerate() {
            let vg = &v2[(m + j) * s..(m + j + 1) * s];
            let mut sum_min = 0.0;
            let mut sum_max = 0.0;
            for (a, b) in vq.iter().zip(vg) {
                sum_min += a.min(*b);
                sum_max += a.max(*b);
            }
            let jaccard = if sum_max == 0.0 {
                0.0
            } else {
                1.0 - sum_min / sum_max
            };
            *slot = (1.0 - lambda) * jaccard + lambda * qg.get(i, j);
        }
    });

    DistanceMatrix::new(qg.row_ids().to_vec(), qg.col_ids().to_vec(), out)
}
