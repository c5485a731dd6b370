//! C ABI for the chainrank library.
//!
//! Every object crosses the boundary as an opaque handle created and
//! destroyed by this crate; fallible calls return a [`ChainrankStatus`] and
//! leave a message retrievable with [`chainrank_last_error_message`]. Output
//! parameters are written only on `CHAINRANK_STATUS_OK`. Strings returned as
//! `char*` are owned by the caller and must be released with
//! [`chainrank_string_free`]; the last-error pointer is borrowed and only
//! valid until the next failing call on the same thread.

// One safety contract covers the whole surface: pointer arguments must be
// valid (or null where tolerated) and arrays as long as their count says.
// Restating that on all 30+ functions would only bury the per-function docs.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use chainrank::chain::{direct_ranking, mine_chains, Aggregation, ChainConfig, RetrievalResult, Variant};
use chainrank::distance::{cosine_distances, euclidean_distances};
use chainrank::error::Error;
use chainrank::eval::{evaluate, EvalReport};
use chainrank::fusion::{fuse, FusionInput, FusionOptions};
use chainrank::rerank::{k_reciprocal_rerank, RerankParams};
use chainrank::synth::{generate, SynthConfig};
use chainrank::types::{DistanceMatrix, EmbeddingSet, GroundTruth, ItemId, TruthEntry};

/// Result of every fallible call in this API.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ChainrankStatus {
    Ok = 0,
    /// An item id is empty, contains whitespace, or is duplicated.
    BadId,
    DimMismatch,
    NonFinite,
    ZeroNorm,
    BadMatrix,
    ShapeMismatch,
    LabelMismatch,
    EmptyGallery,
    BadConfig,
    NotPermutation,
    NoRelevant,
    /// An item is missing from the ground truth, or lacks a frame index.
    MissingTruth,
    BadTruth,
    Format,
    Io,
    /// A required pointer argument was null.
    NullPointer,
    /// A string argument was not valid UTF-8.
    Utf8,
    /// An index argument was out of range.
    OutOfRange,
    /// The implementation panicked; state is still consistent.
    Internal,
}

pub struct ChainrankMatrix {
    inner: DistanceMatrix,
}

pub struct ChainrankEmbeddings {
    inner: EmbeddingSet,
}

pub struct ChainrankTruth {
    inner: GroundTruth,
}

pub struct ChainrankRanking {
    inner: RetrievalResult,
}

pub struct ChainrankReport {
    inner: EvalReport,
}

/// Ranking method used by `chainrank_mine_chains`.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ChainrankVariant {
    /// Sliding window over the last `window` retrieved items.
    Local = 0,
    /// All retrieved items plus the query.
    Global = 1,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let clean = message.replace('\0', " ");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = CString::new(clean).unwrap());
}

fn fail(err: &Error) -> ChainrankStatus {
    set_error(&err.to_string());
    match err.code() {
        "bad-id" => ChainrankStatus::BadId,
        "dim-mismatch" => ChainrankStatus::DimMismatch,
        "non-finite" => ChainrankStatus::NonFinite,
        "zero-norm" => ChainrankStatus::ZeroNorm,
        "bad-matrix" => ChainrankStatus::BadMatrix,
        "shape-mismatch" => ChainrankStatus::ShapeMismatch,
        "label-mismatch" => ChainrankStatus::LabelMismatch,
        "empty-gallery" => ChainrankStatus::EmptyGallery,
        "bad-config" => ChainrankStatus::BadConfig,
        "not-permutation" => ChainrankStatus::NotPermutation,
        "no-relevant" => ChainrankStatus::NoRelevant,
        "missing-truth" => ChainrankStatus::MissingTruth,
        "bad-truth" => ChainrankStatus::BadTruth,
        "format" => ChainrankStatus::Format,
        _ => ChainrankStatus::Io,
    }
}

fn null_pointer(name: &str) -> ChainrankStatus {
    set_error(&format!("{name} must not be null"));
    ChainrankStatus::NullPointer
}

fn out_of_range(what: &str, index: usize, len: usize) -> ChainrankStatus {
    set_error(&format!("{what} index {index} out of range, size {len}"));
    ChainrankStatus::OutOfRange
}

/// Catches panics so they cannot unwind across the C boundary.
fn guarded(f: impl FnOnce() -> ChainrankStatus) -> ChainrankStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            ChainrankStatus::Internal
        }
    }
}

unsafe fn read_strings(
    array: *const *const c_char,
    len: usize,
    name: &str,
) -> Result<Vec<String>, ChainrankStatus> {
    if array.is_null() && len > 0 {
        return Err(null_pointer(name));
    }
    let mut out = Vec::with_capacity(len);
    for i in 0..len {
        let ptr = *array.add(i);
        if ptr.is_null() {
            return Err(null_pointer(&format!("{name}[{i}]")));
        }
        match CStr::from_ptr(ptr).to_str() {
            Ok(s) => out.push(s.to_owned()),
            Err(_) => {
                set_error(&format!("{name}[{i}] is not valid UTF-8"));
                return Err(ChainrankStatus::Utf8);
            }
        }
    }
    Ok(out)
}

fn read_ids(strings: Vec<String>) -> Result<Vec<ItemId>, ChainrankStatus> {
    strings
        .into_iter()
        .map(|s| ItemId::new(s).map_err(|e| fail(&e)))
        .collect()
}

/// Hands a heap string to the caller; NULL only when the input contains an
/// interior NUL, which item ids never do.
fn export_string(s: &str) -> *mut c_char {
    match CString::new(s) {
        Ok(c) => c.into_raw(),
        Err(_) => std::ptr::null_mut(),
    }
}

unsafe fn store<T>(out: *mut *mut T, value: T) -> ChainrankStatus {
    *out = Box::into_raw(Box::new(value));
    ChainrankStatus::Ok
}

/// Message of the most recent failure on this thread. Borrowed pointer;
/// never free it, and do not hold it across further failing calls.
#[no_mangle]
pub extern "C" fn chainrank_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this API. NULL is tolerated.
#[no_mangle]
pub unsafe extern "C" fn chainrank_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Distance matrices.

/// Builds a distance matrix from row-major `values` of size `rows * cols`.
/// Values must be finite and non-negative; when the two label lists are
/// identical the diagonal is forced to zero.
#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_new(
    row_ids: *const *const c_char,
    rows: usize,
    col_ids: *const *const c_char,
    cols: usize,
    values: *const f64,
    out: *mut *mut ChainrankMatrix,
) -> ChainrankStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        if values.is_null() && rows * cols > 0 {
            return null_pointer("values");
        }
        let row_ids = match read_strings(row_ids, rows, "row_ids").and_then(read_ids) {
            Ok(ids) => ids,
            Err(status) => return status,
        };
        let col_ids = match read_strings(col_ids, cols, "col_ids").and_then(read_ids) {
            Ok(ids) => ids,
            Err(status) => return status,
        };
        let values = std::slice::from_raw_parts(values, rows * cols).to_vec();
        match DistanceMatrix::new(row_ids, col_ids, values) {
            Ok(inner) => store(out, ChainrankMatrix { inner }),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_rows(matrix: *const ChainrankMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.inner.rows())
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_cols(matrix: *const ChainrankMatrix) -> usize {
    matrix.as_ref().map_or(0, |m| m.inner.cols())
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_get(
    matrix: *const ChainrankMatrix,
    row: usize,
    col: usize,
    out_value: *mut f64,
) -> ChainrankStatus {
    guarded(|| {
        let Some(m) = matrix.as_ref() else {
            return null_pointer("matrix");
        };
        if out_value.is_null() {
            return null_pointer("out_value");
        }
        if row >= m.inner.rows() {
            return out_of_range("row", row, m.inner.rows());
        }
        if col >= m.inner.cols() {
            return out_of_range("col", col, m.inner.cols());
        }
        *out_value = m.inner.get(row, col);
        ChainrankStatus::Ok
    })
}

/// Copies all values row-major into `out_values`, which must hold exactly
/// `rows * cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_copy_values(
    matrix: *const ChainrankMatrix,
    out_values: *mut f64,
    len: usize,
) -> ChainrankStatus {
    guarded(|| {
        let Some(m) = matrix.as_ref() else {
            return null_pointer("matrix");
        };
        if out_values.is_null() {
            return null_pointer("out_values");
        }
        let values = m.inner.values();
        if len != values.len() {
            set_error(&format!("buffer holds {len} values, matrix has {}", values.len()));
            return ChainrankStatus::ShapeMismatch;
        }
        std::slice::from_raw_parts_mut(out_values, len).copy_from_slice(values);
        ChainrankStatus::Ok
    })
}

/// Row label at `index`; NULL when out of range. Free with
/// `chainrank_string_free`.
#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_row_id(
    matrix: *const ChainrankMatrix,
    index: usize,
) -> *mut c_char {
    match matrix.as_ref() {
        Some(m) if index < m.inner.rows() => export_string(m.inner.row_ids()[index].as_str()),
        _ => std::ptr::null_mut(),
    }
}

/// Column label at `index`; NULL when out of range. Free with
/// `chainrank_string_free`.
#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_col_id(
    matrix: *const ChainrankMatrix,
    index: usize,
) -> *mut c_char {
    match matrix.as_ref() {
        Some(m) if index < m.inner.cols() => export_string(m.inner.col_ids()[index].as_str()),
        _ => std::ptr::null_mut(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_matrix_free(matrix: *mut ChainrankMatrix) {
    if !matrix.is_null() {
        drop(Box::from_raw(matrix));
    }
}

// ---------------------------------------------------------------------------
// Embeddings and distances.

/// Builds an embedding set from `count` vectors of `dim` doubles, stored
/// row-major in `vectors`.
#[no_mangle]
pub unsafe extern "C" fn chainrank_embeddings_new(
    dim: usize,
    ids: *const *const c_char,
    count: usize,
    vectors: *const f64,
    out: *mut *mut ChainrankEmbeddings,
) -> ChainrankStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        if vectors.is_null() && count * dim > 0 {
            return null_pointer("vectors");
        }
        let ids = match read_strings(ids, count, "ids").and_then(read_ids) {
            Ok(ids) => ids,
            Err(status) => return status,
        };
        let items = ids
            .into_iter()
            .enumerate()
            .map(|(i, id)| {
                let row = std::slice::from_raw_parts(vectors.add(i * dim), dim);
                (id, row.to_vec())
            })
            .collect();
        match EmbeddingSet::new(dim, items) {
            Ok(inner) => store(out, ChainrankEmbeddings { inner }),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_embeddings_count(set: *const ChainrankEmbeddings) -> usize {
    set.as_ref().map_or(0, |s| s.inner.len())
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_embeddings_dim(set: *const ChainrankEmbeddings) -> usize {
    set.as_ref().map_or(0, |s| s.inner.dim())
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_embeddings_free(set: *mut ChainrankEmbeddings) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

unsafe fn distances(
    rows: *const ChainrankEmbeddings,
    cols: *const ChainrankEmbeddings,
    out: *mut *mut ChainrankMatrix,
    metric: fn(&EmbeddingSet, &EmbeddingSet) -> chainrank::error::Result<DistanceMatrix>,
) -> ChainrankStatus {
    let Some(r) = rows.as_ref() else {
        return null_pointer("rows");
    };
    let Some(c) = cols.as_ref() else {
        return null_pointer("cols");
    };
    if out.is_null() {
        return null_pointer("out");
    }
    match metric(&r.inner, &c.inner) {
        Ok(inner) => store(out, ChainrankMatrix { inner }),
        Err(e) => fail(&e),
    }
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_euclidean_distances(
    rows: *const ChainrankEmbeddings,
    cols: *const ChainrankEmbeddings,
    out: *mut *mut ChainrankMatrix,
) -> ChainrankStatus {
    guarded(|| distances(rows, cols, out, euclidean_distances))
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_cosine_distances(
    rows: *const ChainrankEmbeddings,
    cols: *const ChainrankEmbeddings,
    out: *mut *mut ChainrankMatrix,
) -> ChainrankStatus {
    guarded(|| distances(rows, cols, out, cosine_distances))
}

// ---------------------------------------------------------------------------
// Synthetic data.

/// Generates the drifting-identity dataset: one query per identity (frame 0),
/// the remaining frames as gallery, and ground truth with frame indices.
#[no_mangle]
pub unsafe extern "C" fn chainrank_synth(
    num_identities: usize,
    frames_per_identity: usize,
    dim: usize,
    step_sigma: f64,
    center_sigma: f64,
    noise_sigma: f64,
    seed: u64,
    out_queries: *mut *mut ChainrankEmbeddings,
    out_gallery: *mut *mut ChainrankEmbeddings,
    out_truth: *mut *mut ChainrankTruth,
) -> ChainrankStatus {
    guarded(|| {
        if out_queries.is_null() {
            return null_pointer("out_queries");
        }
        if out_gallery.is_null() {
            return null_pointer("out_gallery");
        }
        if out_truth.is_null() {
            return null_pointer("out_truth");
        }
        let cfg = SynthConfig {
            num_identities,
            frames_per_identity,
            dim,
            step_sigma,
            center_sigma,
            noise_sigma,
            seed,
        };
        match generate(&cfg) {
            Ok((queries, gallery, truth)) => {
                store(out_queries, ChainrankEmbeddings { inner: queries });
                store(out_gallery, ChainrankEmbeddings { inner: gallery });
                store(out_truth, ChainrankTruth { inner: truth })
            }
            Err(e) => fail(&e),
        }
    })
}

// ---------------------------------------------------------------------------
// Ground truth.

/// Builds ground truth from parallel arrays. `frames[i] < 0` marks an item
/// without a frame index.
#[no_mangle]
pub unsafe extern "C" fn chainrank_truth_new(
    ids: *const *const c_char,
    identities: *const *const c_char,
    frames: *const i64,
    count: usize,
    out: *mut *mut ChainrankTruth,
) -> ChainrankStatus {
    guarded(|| {
        if out.is_null() {
            return null_pointer("out");
        }
        if frames.is_null() && count > 0 {
            return null_pointer("frames");
        }
        let ids = match read_strings(ids, count, "ids").and_then(read_ids) {
            Ok(ids) => ids,
            Err(status) => return status,
        };
        let identities = match read_strings(identities, count, "identities") {
            Ok(names) => names,
            Err(status) => return status,
        };
        let entries = ids
            .into_iter()
            .zip(identities)
            .enumerate()
            .map(|(i, (id, identity))| {
                let raw = *frames.add(i);
                TruthEntry {
                    id,
                    identity,
                    frame: (raw >= 0).then_some(raw as u64),
                }
            })
            .collect();
        match GroundTruth::new(entries) {
            Ok(inner) => store(out, ChainrankTruth { inner }),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_truth_free(truth: *mut ChainrankTruth) {
    if !truth.is_null() {
        drop(Box::from_raw(truth));
    }
}

// ---------------------------------------------------------------------------
// Ranking operations.

#[no_mangle]
pub unsafe extern "C" fn chainrank_direct_ranking(
    qg: *const ChainrankMatrix,
    out: *mut *mut ChainrankRanking,
) -> ChainrankStatus {
    guarded(|| {
        let Some(qg) = qg.as_ref() else {
            return null_pointer("qg");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        match direct_ranking(&qg.inner) {
            Ok(inner) => store(out, ChainrankRanking { inner }),
            Err(e) => fail(&e),
        }
    })
}

/// Chain retrieval over `qg` (query rows) and `gg` (gallery self-distances,
/// labels matching the columns of `qg`). `window` is ignored by the global
/// variant, which always keeps the query in the participant set.
#[no_mangle]
pub unsafe extern "C" fn chainrank_mine_chains(
    qg: *const ChainrankMatrix,
    gg: *const ChainrankMatrix,
    variant: ChainrankVariant,
    window: usize,
    with_ref: bool,
    mean_aggregation: bool,
    out: *mut *mut ChainrankRanking,
) -> ChainrankStatus {
    guarded(|| {
        let Some(qg) = qg.as_ref() else {
            return null_pointer("qg");
        };
        let Some(gg) = gg.as_ref() else {
            return null_pointer("gg");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        let cfg = ChainConfig {
            variant: match variant {
                ChainrankVariant::Local => Variant::Local,
                ChainrankVariant::Global => Variant::Global,
            },
            window,
            with_ref,
            aggregation: if mean_aggregation {
                Aggregation::Mean
            } else {
                Aggregation::Min
            },
        };
        match mine_chains(&qg.inner, &gg.inner, &cfg) {
            Ok(inner) => store(out, ChainrankRanking { inner }),
            Err(e) => fail(&e),
        }
    })
}

/// Fuses `count` rankings with their query-gallery matrices (parallel
/// arrays, same label spaces, same order).
#[no_mangle]
pub unsafe extern "C" fn chainrank_fuse(
    rankings: *const *const ChainrankRanking,
    matrices: *const *const ChainrankMatrix,
    count: usize,
    normalize: bool,
    out: *mut *mut ChainrankRanking,
) -> ChainrankStatus {
    guarded(|| {
        if rankings.is_null() && count > 0 {
            return null_pointer("rankings");
        }
        if matrices.is_null() && count > 0 {
            return null_pointer("matrices");
        }
        if out.is_null() {
            return null_pointer("out");
        }
        let mut owned_rankings = Vec::with_capacity(count);
        let mut owned_matrices = Vec::with_capacity(count);
        for i in 0..count {
            let Some(r) = (*rankings.add(i)).as_ref() else {
                return null_pointer(&format!("rankings[{i}]"));
            };
            let Some(m) = (*matrices.add(i)).as_ref() else {
                return null_pointer(&format!("matrices[{i}]"));
            };
            owned_rankings.push(r.inner.clone());
            owned_matrices.push(m.inner.clone());
        }
        let input = match FusionInput::new(&owned_rankings, &owned_matrices) {
            Ok(input) => input,
            Err(e) => return fail(&e),
        };
        match fuse(&input, &FusionOptions { normalize }) {
            Ok(inner) => store(out, ChainrankRanking { inner }),
            Err(e) => fail(&e),
        }
    })
}

/// Refines `qg` with k-reciprocal re-ranking; `qq` and `gg` are the query
/// and gallery self-distance matrices.
#[no_mangle]
pub unsafe extern "C" fn chainrank_rerank(
    qg: *const ChainrankMatrix,
    qq: *const ChainrankMatrix,
    gg: *const ChainrankMatrix,
    k1: usize,
    k2: usize,
    lambda: f64,
    out: *mut *mut ChainrankMatrix,
) -> ChainrankStatus {
    guarded(|| {
        let Some(qg) = qg.as_ref() else {
            return null_pointer("qg");
        };
        let Some(qq) = qq.as_ref() else {
            return null_pointer("qq");
        };
        let Some(gg) = gg.as_ref() else {
            return null_pointer("gg");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        let params = RerankParams { k1, k2, lambda };
        match k_reciprocal_rerank(&qg.inner, &qq.inner, &gg.inner, &params) {
            Ok(inner) => store(out, ChainrankMatrix { inner }),
            Err(e) => fail(&e),
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_ranking_query_count(ranking: *const ChainrankRanking) -> usize {
    ranking.as_ref().map_or(0, |r| r.inner.query_count())
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_ranking_gallery_count(
    ranking: *const ChainrankRanking,
) -> usize {
    ranking.as_ref().map_or(0, |r| r.inner.gallery_count())
}

/// Copies one query's ranked gallery positions into `out_positions`, which
/// must hold exactly the gallery count.
#[no_mangle]
pub unsafe extern "C" fn chainrank_ranking_positions(
    ranking: *const ChainrankRanking,
    query: usize,
    out_positions: *mut usize,
    len: usize,
) -> ChainrankStatus {
    guarded(|| {
        let Some(r) = ranking.as_ref() else {
            return null_pointer("ranking");
        };
        if out_positions.is_null() {
            return null_pointer("out_positions");
        }
        if query >= r.inner.query_count() {
            return out_of_range("query", query, r.inner.query_count());
        }
        let row = r.inner.ranking(query);
        if len != row.len() {
            set_error(&format!("buffer holds {len} positions, ranking has {}", row.len()));
            return ChainrankStatus::ShapeMismatch;
        }
        std::slice::from_raw_parts_mut(out_positions, len).copy_from_slice(row);
        ChainrankStatus::Ok
    })
}

/// Query label at `query`; NULL when out of range. Free with
/// `chainrank_string_free`.
#[no_mangle]
pub unsafe extern "C" fn chainrank_ranking_query_id(
    ranking: *const ChainrankRanking,
    query: usize,
) -> *mut c_char {
    match ranking.as_ref() {
        Some(r) if query < r.inner.query_count() => {
            export_string(r.inner.query_ids()[query].as_str())
        }
        _ => std::ptr::null_mut(),
    }
}

/// Gallery label retrieved at `position` for `query`; NULL when out of
/// range. Free with `chainrank_string_free`.
#[no_mangle]
pub unsafe extern "C" fn chainrank_ranking_item_id(
    ranking: *const ChainrankRanking,
    query: usize,
    position: usize,
) -> *mut c_char {
    match ranking.as_ref() {
        Some(r) if query < r.inner.query_count() && position < r.inner.gallery_count() => {
            let gallery_index = r.inner.ranking(query)[position];
            export_string(r.inner.gallery_ids()[gallery_index].as_str())
        }
        _ => std::ptr::null_mut(),
    }
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_ranking_free(ranking: *mut ChainrankRanking) {
    if !ranking.is_null() {
        drop(Box::from_raw(ranking));
    }
}

// ---------------------------------------------------------------------------
// Evaluation.

#[no_mangle]
pub unsafe extern "C" fn chainrank_evaluate(
    ranking: *const ChainrankRanking,
    truth: *const ChainrankTruth,
    out: *mut *mut ChainrankReport,
) -> ChainrankStatus {
    guarded(|| {
        let Some(r) = ranking.as_ref() else {
            return null_pointer("ranking");
        };
        let Some(t) = truth.as_ref() else {
            return null_pointer("truth");
        };
        if out.is_null() {
            return null_pointer("out");
        }
        match evaluate(&r.inner, &t.inner) {
            Ok(inner) => store(out, ChainrankReport { inner }),
            Err(e) => fail(&e),
        }
    })
}

/// Mean average precision; NaN when `report` is NULL.
#[no_mangle]
pub unsafe extern "C" fn chainrank_report_map(report: *const ChainrankReport) -> f64 {
    report.as_ref().map_or(f64::NAN, |r| r.inner.map_score)
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_report_query_ap(
    report: *const ChainrankReport,
    query: usize,
    out_value: *mut f64,
) -> ChainrankStatus {
    guarded(|| {
        let Some(r) = report.as_ref() else {
            return null_pointer("report");
        };
        if out_value.is_null() {
            return null_pointer("out_value");
        }
        let ap = &r.inner.per_query_ap;
        if query >= ap.len() {
            return out_of_range("query", query, ap.len());
        }
        *out_value = ap[query];
        ChainrankStatus::Ok
    })
}

/// Cumulative match rate at 1-based `rank` (fraction of queries whose first
/// relevant item appears within the top `rank`).
#[no_mangle]
pub unsafe extern "C" fn chainrank_report_cmc(
    report: *const ChainrankReport,
    rank: usize,
    out_value: *mut f64,
) -> ChainrankStatus {
    guarded(|| {
        let Some(r) = report.as_ref() else {
            return null_pointer("report");
        };
        if out_value.is_null() {
            return null_pointer("out_value");
        }
        let cmc = &r.inner.cmc;
        if rank == 0 || rank > cmc.len() {
            return out_of_range("rank", rank, cmc.len());
        }
        *out_value = cmc[rank - 1];
        ChainrankStatus::Ok
    })
}

/// Writes the order-consistency score and returns true, or returns false
/// when the metric is unavailable (frame data incomplete).
#[no_mangle]
pub unsafe extern "C" fn chainrank_report_order_consistency(
    report: *const ChainrankReport,
    out_value: *mut f64,
) -> bool {
    match (report.as_ref(), out_value.as_mut()) {
        (Some(r), Some(slot)) => match r.inner.order_consistency {
            Some(value) => {
                *slot = value;
                true
            }
            None => false,
        },
        _ => false,
    }
}

/// Writes the mean Kendall tau and returns true, or returns false when no
/// query has enough same-identity items or frame data is incomplete.
#[no_mangle]
pub unsafe extern "C" fn chainrank_report_kendall_tau(
    report: *const ChainrankReport,
    out_value: *mut f64,
) -> bool {
    match (report.as_ref(), out_value.as_mut()) {
        (Some(r), Some(slot)) => match r.inner.kendall_tau {
            Some(value) => {
                *slot = value;
                true
            }
            None => false,
        },
        _ => false,
    }
}

#[no_mangle]
pub unsafe extern "C" fn chainrank_report_free(report: *mut ChainrankReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
