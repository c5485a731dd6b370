//! Retrieval scoring: mean average precision, CMC, and frame-order
//! consistency.
//!
//! A gallery item is relevant to a query when both carry the same identity
//! label. Average precision is computed at full depth with 1-indexed ranks;
//! CMC at rank r is the fraction of queries whose first relevant item
//! appears within the top r.
//!
//! Order consistency checks how faithfully a ranking reproduces a video
//! timeline: the ranking is restricted to the query's own identity and
//! compared position by position against those items sorted by true frame
//! index. Kendall's tau over the same two orderings is reported alongside it
//! as a softer diagnostic (pairwise agreement instead of exact positions).

use crate::chain::RetrievalResult;
use crate::error::{Error, Result};
use crate::io::format_value;
use crate::types::{GroundTruth, ItemId};

/// Scores of one retrieval result against ground truth.
#[derive(Debug, Clone)]
pub struct EvalReport {
    /// Mean of `per_query_ap`.
    pub map_score: f64,
    pub per_query_ap: Vec<f64>,
    /// `cmc[r]` is the fraction of queries with a relevant item in the top
    /// r+1; non-decreasing, ends at 1 when every query has a match.
    pub cmc: Vec<f64>,
    /// Present when every relevant gallery item has a frame index.
    pub order_consistency: Option<f64>,
    /// Mean Kendall tau over queries with at least two relevant items;
    /// `None` when no query qualifies or frames are missing.
    pub kendall_tau: Option<f64>,
}

fn identity_of<'t>(truth: &'t GroundTruth, id: &ItemId) -> Result<&'t str> {
    truth
        .identity_of(id)
        .ok_or_else(|| Error::MissingIdentity {
            id: id.as_str().to_owned(),
        })
}

/// Relevance flags for one query's ranking, in retrieval order.
fn relevance_flags(
    result: &RetrievalResult,
    truth: &GroundTruth,
    query: usize,
) -> Result<Vec<bool>> {
    let q_identity = identity_of(truth, &result.query_ids()[query])?;
    result
        .ranked_ids(query)
        .map(|id| Ok(identity_of(truth, id)? == q_identity))
        .collect()
}

/// Computes mAP, per-query AP, and the CMC curve. The order fields of the
/// report are left empty; use [`evaluate`] to fill them when frame data is
/// available.
pub fn mean_average_precision(
    result: &RetrievalResult,
    truth: &GroundTruth,
) -> Result<EvalReport> {
    let m = result.query_count();
    let n = result.gallery_count();
    if m == 0 {
        return Err(Error::BadConfig("cannot evaluate zero queries".into()));
    }
    let mut per_query_ap = Vec::with_capacity(m);
    let mut first_hit = vec![0usize; n];
    for i in 0..m {
        let flags = relevance_flags(result, truth, i)?;
        let total = flags.iter().filter(|&&r| r).count();
        if total == 0 {
            return Err(Error::NoRelevant {
                query: result.query_ids()[i].as_str().to_owned(),
            });
        }
        let mut hits = 0usize;
        let mut ap = 0.0;
        for (k, &relevant) in flags.iter().enumerate() {
            if relevant {
                hits += 1;
                ap += hits as f64 / (k + 1) as f64;
                if hits == 1 {
                    first_hit[k] += 1;
                }
            }
        }
        per_query_ap.push(ap / total as f64);
    }
    let mut cmc = Vec::with_capacity(n);
    let mut seen = 0usize;
    for count in first_hit {
        seen += count;
        cmc.push(seen as f64 / m as f64);
    }
    let map_score = per_query_ap.iter().sum::<f64>() / m as f64;
    Ok(EvalReport {
        map_score,
        per_query_ap,
        cmc,
        order_consistency: None,
        kendall_tau: None,
    })
}

/// The query's same-identity items in retrieval order, and the same items
/// sorted by true frame index.
fn identity_sequences<'r>(
    result: &'r RetrievalResult,
    truth: &GroundTruth,
    query: usize,
) -> Result<(Vec<&'r ItemId>, Vec<&'r ItemId>)> {
    let flags = relevance_flags(result, truth, query)?;
    let retrieved: Vec<&ItemId> = result
        .ranked_ids(query)
        .zip(&flags)
        .filter_map(|(id, &relevant)| relevant.then_some(id))
        .collect();
    if retrieved.is_empty() {
        return Err(Error::NoRelevant {
            query: result.query_ids()[query].as_str().to_owned(),
        });
    }
    let mut with_frames = Vec::with_capacity(retrieved.len());
    for &id in &retrieved {
        let frame = truth.frame_of(id).ok_or_else(|| Error::MissingFrame {
            id: id.as_str().to_owned(),
        })?;
        with_frames.push((frame, id));
    }
    with_frames.sort_by_key(|&(frame, _)| frame);
    let true_order = with_frames.into_iter().map(|(_, id)| id).collect();
    Ok((retrieved, true_order))
}

/// Fraction of same-identity retrieval positions holding exactly the item
/// the true frame order puts there, averaged over queries.
pub fn order_consistency(result: &RetrievalResult, truth: &GroundTruth) -> Result<f64> {
    let m = result.query_count();
    if m == 0 {
        return Err(Error::BadConfig("cannot evaluate zero queries".into()));
    }
    let mut total = 0.0;
    for i in 0..m {
        let (retrieved, true_order) = identity_sequences(result, truth, i)?;
        let matches = retrieved
            .iter()
            .zip(&true_order)
            .filter(|(a, b)| a == b)
            .count();
        total += matches as f64 / retrieved.len() as f64;
    }
    Ok(total / m as f64)
}

/// Mean Kendall tau between retrieval order and true frame order of each
/// query's same-identity items. Queries with fewer than two such items carry
/// no pair information and are skipped; `None` when every query is skipped.
pub fn kendall_tau(result: &RetrievalResult, truth: &GroundTruth) -> Result<Option<f64>> {
    let m = result.query_count();
    if m == 0 {
        return Err(Error::BadConfig("cannot evaluate zero queries".into()));
    }
    let mut total = 0.0;
    let mut counted = 0usize;
    for i in 0..m {
        let (retrieved, true_order) = identity_sequences(result, truth, i)?;
        let len = retrieved.len();
        if len < 2 {
            continue;
        }
        // Position of each item in the true order; frames are distinct
        // within an identity, so the mapping is a permutation.
        let true_pos: std::collections::HashMap<&ItemId, usize> = true_order
            .iter()
            .enumerate()
            .map(|(p, &id)| (id, p))
            .collect();
        let positions: Vec<usize> = retrieved.iter().map(|&id| true_pos[id]).collect();
        let mut concordant = 0i64;
        let mut discordant = 0i64;
        for a in 0..len {
            for b in a + 1..len {
                if positions[a] < positions[b] {
                    concordant += 1;
                } else {
                    discordant += 1;
                }
            }
        }
        let pairs = (len * (len - 1) / 2) as f64;
        total += (concordant - discordant) as f64 / pairs;
        counted += 1;
    }
    Ok((counted > 0).then(|| total / counted as f64))
}

fn frames_complete(result: &RetrievalResult, truth: &GroundTruth) -> bool {
    (0..result.query_count()).all(|i| {
        result.ranked_ids(i).all(|id| {
            match (truth.identity_of(id), truth.identity_of(&result.query_ids()[i])) {
                (Some(g), Some(q)) if g == q => truth.frame_of(id).is_some(),
                _ => true,
            }
        })
    })
}

/// Full report: mAP and CMC always; order consistency and Kendall tau when
/// every relevant gallery item carries a frame index.
pub fn evaluate(result: &RetrievalResult, truth: &GroundTruth) -> Result<EvalReport> {
    let mut report = mean_average_precision(result, truth)?;
    if frames_complete(result, truth) {
        report.order_consistency = Some(order_consistency(result, truth)?);
        report.kendall_tau = kendall_tau(result, truth)?;
    }
    Ok(report)
}

/// Ranks at which the CMC curve is reported: the usual checkpoints that fit
/// the gallery, plus the full depth.
pub fn cmc_display_ranks(gallery_size: usize) -> Vec<usize> {
    let mut ranks: Vec<usize> = [1, 5, 10, 20, 50, 100]
        .into_iter()
        .filter(|&r| r <= gallery_size)
        .collect();
    if ranks.last() != Some(&gallery_size) && gallery_size > 0 {
        ranks.push(gallery_size);
    }
    ranks
}

/// Line-oriented `key=value` rendering of a report.
pub fn render_machine(report: &EvalReport, query_ids: &[ItemId]) -> String {
    let n = report.cmc.len();
    let mut out = String::new();
    out.push_str(&format!("queries={}\n", query_ids.len()));
    out.push_str(&format!("gallery={n}\n"));
    out.push_str(&format!("map={}\n", format_value(report.map_score)));
    for r in cmc_display_ranks(n) {
        out.push_str(&format!("cmc_{r}={}\n", format_value(report.cmc[r - 1])));
    }
    if let Some(oc) = report.order_consistency {
        out.push_str(&format!("order_consistency={}\n", format_value(oc)));
    }
    if let Some(tau) = report.kendall_tau {
        out.push_str(&format!("kendall_tau={}\n", format_value(tau)));
    }
    for (id, ap) in query_ids.iter().zip(&report.per_query_ap) {
        out.push_str(&format!("ap_{id}={}\n", format_value(*ap)));
    }
    out
}

/// Human-readable rendering of a report.
pub fn render_human(report: &EvalReport, query_ids: &[ItemId]) -> String {
    let n = report.cmc.len();
    let mut out = String::new();
    out.push_str(&format!(
        "Evaluated {} queries against {} gallery items\n",
        query_ids.len(),
        n
    ));
    out.push_str(&format!("mAP: {}\n", format_value(report.map_score)));
    for r in cmc_display_ranks(n) {
        out.push_str(&format!(
            "CMC@{r}: {}\n",
            format_value(report.cmc[r - 1])
        ));
    }
    if let Some(oc) = report.order_consistency {
        out.push_str(&format!("order consistency: {}\n", format_value(oc)));
    }
    if let Some(tau) = report.kendall_tau {
        out.push_str(&format!("Kendall tau: {}\n", format_value(tau)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::TruthEntry;

    fn id(s: &str) -> ItemId {
        ItemId::new(s).unwrap()
    }

    fn ids(names: &[&str]) -> Vec<ItemId> {
        names.iter().map(|s| id(s)).collect()
    }

    fn truth(entries: &[(&str, &str, Option<u64>)]) -> GroundTruth {
        GroundTruth::new(
            entries
                .iter()
                .map(|(i, identity, frame)| TruthEntry {
                    id: id(i),
                    identity: (*identity).to_owned(),
                    frame: *frame,
                })
                .collect(),
        )
        .unwrap()
    }

    fn one_query(gallery: &[&str], ranking: Vec<usize>) -> RetrievalResult {
        RetrievalResult::new(ids(&["q"]), ids(gallery), vec![ranking]).unwrap()
    }

    #[test]
    fn perfect_single_query() {
        let result = one_query(&["a", "b"], vec![0, 1]);
        let t = truth(&[("q", "p1", None), ("a", "p1", None), ("b", "p2", None)]);
        let report = mean_average_precision(&result, &t).unwrap();
        assert_eq!(report.map_score, 1.0);
        assert_eq!(report.cmc, vec![1.0, 1.0]);
    }

    #[test]
    fn ap_with_hits_at_ranks_one_and_three() {
        let result = one_query(&["a", "b", "c", "d"], vec![0, 1, 2, 3]);
        let t = truth(&[
            ("q", "p1", None),
            ("a", "p1", None),
            ("b", "p2", None),
            ("c", "p1", None),
            ("d", "p2", None),
        ]);
        let report = mean_average_precision(&result, &t).unwrap();
        assert!((report.map_score - 5.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn ap_with_single_hit_at_last_rank() {
        let result = one_query(&["a", "b", "c", "d"], vec![0, 1, 2, 3]);
        let t = truth(&[
            ("q", "p1", None),
            ("a", "p2", None),
            ("b", "p2", None),
            ("c", "p2", None),
            ("d", "p1", None),
        ]);
        let report = mean_average_precision(&result, &t).unwrap();
        assert_eq!(report.map_score, 0.25);
        assert_eq!(report.cmc, vec![0.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn reversing_a_single_relevant_ranking_scales_ap_to_one_over_n() {
        let t = truth(&[
            ("q", "p1", None),
            ("a", "p1", None),
            ("b", "p2", None),
            ("c", "p2", None),
        ]);
        let top = one_query(&["a", "b", "c"], vec![0, 1, 2]);
        let bottom = one_query(&["a", "b", "c"], vec![2, 1, 0]);
        assert_eq!(mean_average_precision(&top, &t).unwrap().map_score, 1.0);
        assert!(
            (mean_average_precision(&bottom, &t).unwrap().map_score - 1.0 / 3.0).abs() < 1e-12
        );
    }

    #[test]
    fn cmc_is_non_decreasing_and_ends_at_one() {
        let result = RetrievalResult::new(
            ids(&["q1", "q2"]),
            ids(&["a", "b", "c"]),
            vec![vec![1, 0, 2], vec![2, 1, 0]],
        )
        .unwrap();
        let t = truth(&[
            ("q1", "p1", None),
            ("q2", "p2", None),
            ("a", "p1", None),
            ("b", "p2", None),
            ("c", "p2", None),
        ]);
        let report = mean_average_precision(&result, &t).unwrap();
        for w in report.cmc.windows(2) {
            assert!(w[0] <= w[1]);
        }
        assert_eq!(*report.cmc.last().unwrap(), 1.0);
        let mean: f64 =
            report.per_query_ap.iter().sum::<f64>() / report.per_query_ap.len() as f64;
        assert_eq!(report.map_score, mean);
    }

    #[test]
    fn zero_relevant_items_is_an_error() {
        let result = one_query(&["a"], vec![0]);
        let t = truth(&[("q", "p1", None), ("a", "p2", None)]);
        assert!(matches!(
            mean_average_precision(&result, &t),
            Err(Error::NoRelevant { .. })
        ));
    }

    #[test]
    fn unknown_identity_is_an_error() {
        let result = one_query(&["a"], vec![0]);
        let t = truth(&[("q", "p1", None)]);
        assert!(matches!(
            mean_average_precision(&result, &t),
            Err(Error::MissingIdentity { .. })
        ));
    }

    fn frame_truth() -> GroundTruth {
        truth(&[
            ("q", "p1", Some(0)),
            ("f1", "p1", Some(1)),
            ("f2", "p1", Some(2)),
            ("f3", "p1", Some(3)),
            ("x", "p2", Some(1)),
        ])
    }

    #[test]
    fn order_consistency_examples() {
        let gallery = &["f1", "f2", "f3", "x"];
        let t = frame_truth();
        let exact = one_query(gallery, vec![0, 1, 2, 3]);
        assert_eq!(order_consistency(&exact, &t).unwrap(), 1.0);

        let swapped = one_query(gallery, vec![1, 0, 2, 3]);
        assert!((order_consistency(&swapped, &t).unwrap() - 1.0 / 3.0).abs() < 1e-12);

        let two = truth(&[
            ("q", "p1", Some(0)),
            ("f1", "p1", Some(1)),
            ("f2", "p1", Some(2)),
        ]);
        let reversed = one_query(&["f1", "f2"], vec![1, 0]);
        assert_eq!(order_consistency(&reversed, &two).unwrap(), 0.0);
    }

    #[test]
    fn interleaved_irrelevant_items_do_not_affect_order_consistency() {
        let gallery = &["f1", "f2", "f3", "x"];
        let t = frame_truth();
        let interleaved = one_query(gallery, vec![0, 3, 1, 2]);
        assert_eq!(order_consistency(&interleaved, &t).unwrap(), 1.0);
    }

    #[test]
    fn order_consistency_requires_frames() {
        let t = truth(&[("q", "p1", Some(0)), ("f1", "p1", None)]);
        let result = one_query(&["f1"], vec![0]);
        assert!(matches!(
            order_consistency(&result, &t),
            Err(Error::MissingFrame { .. })
        ));
    }

    #[test]
    fn kendall_tau_endpoints() {
        let gallery = &["f1", "f2", "f3", "x"];
        let t = frame_truth();
        let exact = one_query(gallery, vec![0, 1, 2, 3]);
        assert_eq!(kendall_tau(&exact, &t).unwrap(), Some(1.0));
        let reversed = one_query(gallery, vec![2, 1, 0, 3]);
        assert_eq!(kendall_tau(&reversed, &t).unwrap(), Some(-1.0));
    }

    #[test]
    fn kendall_tau_skips_single_item_queries() {
        let t = truth(&[("q", "p1", Some(0)), ("f1", "p1", Some(1)), ("x", "p2", Some(1))]);
        let result = one_query(&["f1", "x"], vec![0, 1]);
        assert_eq!(kendall_tau(&result, &t).unwrap(), None);
    }

    #[test]
    fn evaluate_fills_order_fields_only_when_frames_exist() {
        let gallery = &["f1", "f2", "f3", "x"];
        let with_frames = evaluate(&one_query(gallery, vec![0, 1, 2, 3]), &frame_truth()).unwrap();
        assert_eq!(with_frames.order_consistency, Some(1.0));
        assert_eq!(with_frames.kendall_tau, Some(1.0));

        let t = truth(&[
            ("q", "p1", None),
            ("f1", "p1", None),
            ("f2", "p1", None),
            ("f3", "p1", None),
            ("x", "p2", None),
        ]);
        let without = evaluate(&one_query(gallery, vec![0, 1, 2, 3]), &t).unwrap();
        assert_eq!(without.order_consistency, None);
        assert_eq!(without.kendall_tau, None);
    }

    #[test]
    fn machine_rendering_is_line_oriented() {
        let result = one_query(&["f1", "f2", "f3", "x"], vec![0, 1, 2, 3]);
        let report = evaluate(&result, &frame_truth()).unwrap();
        let text = render_machine(&report, result.query_ids());
        assert!(text.contains("map=1.000000\n"));
        assert!(text.contains("cmc_1=1.000000\n"));
        assert!(text.contains("cmc_4=1.000000\n"));
        assert!(text.contains("order_consistency=1.000000\n"));
        assert!(text.contains("ap_q=1.000000\n"));
        for line in text.lines() {
            assert!(line.contains('='), "line without key=value: {line}");
        }
    }

    #[test]
    fn display_ranks_cover_the_gallery_depth() {
        assert_eq!(cmc_display_ranks(3), vec![1, 3]);
        assert_eq!(cmc_display_ranks(10), vec![1, 5, 10]);
        assert_eq!(cmc_display_ranks(180), vec![1, 5, 10, 20, 50, 100, 180]);
    }
}
