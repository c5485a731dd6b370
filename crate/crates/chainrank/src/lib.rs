//! Retrieval post-processing for frame-sequence re-identification.
//!
//! The crate turns raw query-gallery distance matrices into better rankings
//! and scores them:
//!
//! - [`chain`]: chain retrieval, which walks the gallery by repeatedly taking
//!   the item nearest to a window of recent retrievals instead of sorting
//!   once by distance to the query. Exploits the smoothness of video frames.
//! - [`fusion`]: positionwise vote fusion of several models' rankings, with
//!   distance-based tie-breaking.
//! - [`rerank`]: k-reciprocal re-ranking of a distance matrix.
//! - [`eval`]: mAP, CMC, and frame-order consistency scoring.
//! - [`synth`]: a seeded drifting-identity generator for benchmarking the
//!   pipeline without real embeddings.
//! - [`distance`], [`types`], [`io`]: distance computation, validated domain
//!   types, and the text formats connecting the pipeline stages.
//!
//! The `chainrank` binary wires these into file-based pipeline stages; see
//! the README for the command set.
//!
//! Everything is deterministic: distance comparisons are exact, every tie
//! resolves to the lowest gallery position, and generation uses a fixed
//! seeded generator, so identical inputs always reproduce identical outputs.

pub mod chain;
pub mod distance;
pub mod error;
pub mod eval;
pub mod fusion;
pub mod io;
pub mod rerank;
pub mod synth;
pub mod types;

pub use chain::{direct_ranking, mine_chains, Aggregation, ChainConfig, RetrievalResult, Variant};
pub use distance::{cosine_distances, euclidean_distances};
pub use error::{Error, Result};
pub use eval::{
    evaluate, kendall_tau, mean_average_precision, order_consistency, EvalReport,
};
pub use fusion::{fuse, FusionInput, FusionOptions};
pub use rerank::{k_reciprocal_rerank, RerankParams};
pub use synth::{generate, SynthConfig};
pub use types::{DistanceMatrix, EmbeddingSet, GroundTruth, ItemId, TruthEntry};
