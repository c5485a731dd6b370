//! Pairwise distances between two embedding sets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{DistanceMatrix, EmbeddingSet};

/// Euclidean (L2) distance between every row vector and every column vector.
pub fn euclidean_distances(rows: &EmbeddingSet, cols: &EmbeddingSet) -> Result<DistanceMatrix> {
    if rows.dim() != cols.dim() {
        return Err(Error::DimensionMismatch {
            left: rows.dim(),
            right: cols.dim(),
        });
    }
    let n = cols.len();
    let mut values = vec![0.0; rows.len() * n];
    values
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, out)| {
            let a = rows.vector(i);
            for (j, slot) in out.iter_mut().enumerate() {
                let b = cols.vector(j);
                let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
                *slot = sq.sqrt();
            }
        });
    DistanceMatrix::new(rows.ids().to_vec(), cols.ids().to_vec(), values)
}

/// Cosine distance `1 - (a.b)/(|a||b|)`, clamped into `[0, 2]` so rounding
/// can not produce a negative distance. Zero-norm vectors are rejected.
pub fn cosine_distances(rows: &EmbeddingSet, cols: &EmbeddingSet) -> Result<DistanceMatrix> {
    if rows.dim() != cols.dim() {
        return Err(Error::DimensionMismatch {
            left: rows.dim(),
            right: cols.dim(),
        });
    }
    let row_norms = norms(rows)?;
    let col_norms = norms(cols)?;
    let n = cols.len();
    let mut values = vec![0.0; rows.len() * n];
    values
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, out)| {
            let a = rows.vector(i);
            for (j, slot) in out.iter_mut().enumerate() {
                let b = cols.vector(j);
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let d = 1.0 - dot / (row_norms[i] * col_norms[j]);
                *slot = d.clamp(0.0, 2.0);
            }
        });
    DistanceMatrix::new(rows.ids().to_vec(), cols.ids().to_vec(), values)
}

fn norms(set: &EmbeddingSet) -> Result<Vec<f64>> {
    (0..set.len())
        .map(|i| {
            let norm = set.vector(i).iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                Err(Error::ZeroNorm {
                    id: set.ids()[i].as_str().to_owned(),
                })
            } else {
                Ok(norm)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::ItemId;

    fn set(ids: &[&str], dim: usize, rows: &[&[f64]]) -> EmbeddingSet {
        let items = ids
            .iter()
            .zip(rows)
            .map(|(id, row)| (ItemId::new(*id).unwrap(), row.to_vec()))
            .collect();
        EmbeddingSet::new(dim, items).unwrap()
    }

    #[test]
    fn euclidean_three_four_five() {
        let q = set(&["q"], 2, &[&[0.0, 0.0]]);
        let g = set(&["g"], 2, &[&[3.0, 4.0]]);
        let d = euclidean_distances(&q, &g).unwrap();
        assert_eq!(d.get(0, 0), 5.0);
    }

    #[test]
    fn euclidean_identical_rows_are_zero() {
        let q = set(&["q1", "q2"], 2, &[&[1.0, 1.0], &[1.0, 1.0]]);
        let g = set(&["g1", "g2"], 2, &[&[1.0, 1.0], &[1.0, 1.0]]);
        let d = euclidean_distances(&q, &g).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(d.get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn cosine_parallel_orthogonal_opposite() {
        let q = set(&["q"], 2, &[&[1.0, 0.0]]);
        let parallel = set(&["g"], 2, &[&[2.0, 0.0]]);
        let orthogonal = set(&["g"], 2, &[&[0.0, 3.0]]);
        let opposite = set(&["g"], 2, &[&[-4.0, 0.0]]);
        assert_eq!(cosine_distances(&q, &parallel).unwrap().get(0, 0), 0.0);
        assert_eq!(cosine_distances(&q, &orthogonal).unwrap().get(0, 0), 1.0);
        assert_eq!(cosine_distances(&q, &opposite).unwrap().get(0, 0), 2.0);
    }

    #[test]
    fn cosine_rejects_zero_vector() {
        let q = set(&["q"], 2, &[&[0.0, 0.0]]);
        let g = set(&["g"], 2, &[&[1.0, 0.0]]);
        assert!(matches!(
            cosine_distances(&q, &g),
            Err(Error::ZeroNorm { .. })
        ));
    }

    #[test]
    fn dim_mismatch_is_rejected() {
        let q = set(&["q"], 2, &[&[0.0, 0.0]]);
        let g = set(&["g"], 3, &[&[1.0, 0.0, 0.0]]);
        assert!(matches!(
            euclidean_distances(&q, &g),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
