//! Domain types: item identifiers, embedding sets, distance matrices and
//! ground truth.
//!
//! All types validate their invariants on construction and are immutable
//! afterwards, so they can be shared read-only across worker threads.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Opaque identifier of a query or gallery item.
///
/// Ids are arbitrary tokens (dataset naming schemes vary); the only
/// constraints are non-emptiness and the absence of whitespace, which keeps
/// the space-separated file formats unambiguous.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ItemId(String);

impl ItemId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() || id.chars().any(char::is_whitespace) {
            return Err(Error::InvalidItemId(id));
        }
        Ok(ItemId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for ItemId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// A labeled set of fixed-dimension feature vectors (one split: queries or
/// gallery). Vectors are stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    ids: Vec<ItemId>,
    data: Vec<f64>,
    dim: usize,
}

impl EmbeddingSet {
    /// Builds a set from `(id, vector)` pairs, checking that every vector has
    /// length `dim`, every component is finite, and ids are unique.
    pub fn new(dim: usize, items: Vec<(ItemId, Vec<f64>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::BadConfig("embedding dim must be >= 1".into()));
        }
        let mut ids = Vec::with_capacity(items.len());
        let mut data = Vec::with_capacity(items.len() * dim);
        let mut seen = HashMap::with_capacity(items.len());
        for (id, vector) in items {
            if vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: vector.len(),
                });
            }
            if let Some(bad) = vector.iter().find(|v| !v.is_finite()) {
                return Err(Error::NonFinite {
                    context: format!("vector {:?} (component {})", id.as_str(), bad),
                });
            }
            if seen.insert(id.clone(), ()).is_some() {
                return Err(Error::DuplicateId(id.as_str().to_owned()));
            }
            data.extend_from_slice(&vector);
            ids.push(id);
        }
        Ok(EmbeddingSet { ids, data, dim })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[ItemId] {
        &self.ids
    }

    /// Vector of the `i`-th item.
    pub fn vector(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ItemId, &[f64])> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id, self.vector(i)))
    }
}

/// Dense non-negative distance matrix with row and column item labels.
///
/// When the row and column label lists are identical (the gallery-gallery
/// case) the diagonal is forced to zero on construction: chain retrieval
/// never compares an item with itself, but evaluation helpers may scan full
/// rows.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    row_ids: Vec<ItemId>,
    col_ids: Vec<ItemId>,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix from row-major `values` of length
    /// `row_ids.len() * col_ids.len()`. Every value must be finite and >= 0.
    pub fn new(row_ids: Vec<ItemId>, col_ids: Vec<ItemId>, mut values: Vec<f64>) -> Result<Self> {
        let (m, n) = (row_ids.len(), col_ids.len());
        if values.len() != m * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {}x{}={} values, got {}",
                m,
                n,
                m * n,
                values.len()
            )));
        }
        check_unique(&row_ids)?;
        check_unique(&col_ids)?;
        for (k, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    context: format!("matrix entry ({}, {})", k / n.max(1), k % n.max(1)),
                });
            }
            if *v < 0.0 {
                return Err(Error::InvalidMatrix(format!(
                    "negative value {} at ({}, {})",
                    v,
                    k / n.max(1),
                    k % n.max(1)
                )));
            }
        }
        if row_ids == col_ids {
            for i in 0..m {
                values[i * n + i] = 0.0;
            }
        }
        Ok(DistanceMatrix {
            row_ids,
            col_ids,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn cols(&self) -> usize {
        self.col_ids.len()
    }

    pub fn row_ids(&self) -> &[ItemId] {
        &self.row_ids
    }

    pub fn col_ids(&self) -> &[ItemId] {
        &self.col_ids
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.col_ids.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.col_ids.len();
        &self.values[row * n..(row + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// True when row and column labels are the same list in the same order
    /// (self-distance matrix).
    pub fn is_self_distance(&self) -> bool {
        self.row_ids == self.col_ids
    }
}

fn check_unique(ids: &[ItemId]) -> Result<()> {
    let mut seen = HashMap::with_capacity(ids.len());
    for id in ids {
        if seen.insert(id, ()).is_some() {
            return Err(Error::DuplicateId(id.as_str().to_owned()));
        }
    }
    Ok(())
}

/// Per-item identity labels plus optional true frame indices.
///
/// Entries keep their insertion order so files written from a `GroundTruth`
/// are reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    entries: Vec<TruthEntry>,
    index: HashMap<ItemId, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthEntry {
    pub id: ItemId,
    pub identity: String,
    pub frame: Option<u64>,
}

impl GroundTruth {
    /// Validates that ids are unique and that frame indices are distinct
    /// within each identity.
    pub fn new(entries: Vec<TruthEntry>) -> Result<Self> {
        let mut index = HashMap::with_capacity(entries.len());
        let mut frames_by_identity: HashMap<&str, Vec<u64>> = HashMap::new();
        for (i, entry) in entries.iter().enumerate() {
            if index.insert(entry.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(entry.id.as_str().to_owned()));
            }
            if let Some(frame) = entry.frame {
                let frames = frames_by_identity.entry(&entry.identity).or_default();
                if frames.contains(&frame) {
                    return Err(Error::DuplicateFrame {
                        identity: entry.identity.clone(),
                        frame,
                    });
                }
                frames.push(frame);
            }
        }
        Ok(GroundTruth { entries, index })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TruthEntry] {
        &self.entries
    }

    pub fn identity_of(&self, id: &ItemId) -> Option<&str> {
        self.index.get(id).map(|&i| self.entries[i].identity.as_str())
    }

    pub fn frame_of(&self, id: &ItemId) -> Option<u64> {
        self.index.get(id).and_then(|&i| self.entries[i].frame)
    }
}
