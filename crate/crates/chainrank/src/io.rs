//! Reading and writing of the pipeline's file formats.
//!
//! Four formats connect the pipeline stages:
//! - embeddings: CSV with header `id,v0,...,v{d-1}`, one row per item;
//! - distance matrix: text; line 1 `m n`, line 2 row ids, line 3 column ids,
//!   then m lines of n values, all space separated;
//! - ground truth: CSV with header `id,identity,frame`; the frame column may
//!   be absent or empty;
//! - ranking: one line per query, `query_id: gallery_id_1 ... gallery_id_n`.
//!
//! Numeric values are written with six decimal places, and writers iterate
//! in stored order, so rewriting the same data yields identical bytes.
//! Writers come in two forms: a generic one over any sink and a `_file`
//! wrapper; readers always take a path.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::chain::RetrievalResult;
use crate::error::{Error, Result};
use crate::types::{DistanceMatrix, EmbeddingSet, GroundTruth, ItemId, TruthEntry};

/// Canonical decimal rendering used for every value the pipeline writes.
pub fn format_value(v: f64) -> String {
    format!("{v:.6}")
}

fn format_error(path: &Path, message: impl Into<String>) -> Error {
    Error::Format {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn create(path: &Path) -> Result<File> {
    File::create(path).map_err(|source| Error::File {
        path: path.display().to_string(),
        source,
    })
}

fn parse_value(path: &Path, token: &str, what: &str) -> Result<f64> {
    let v: f64 = token
        .parse()
        .map_err(|_| format_error(path, format!("invalid {what} `{token}`")))?;
    if !v.is_finite() {
        return Err(format_error(path, format!("non-finite {what} `{token}`")));
    }
    Ok(v)
}

pub fn read_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_reader(BufReader::new(open(path)?));
    let headers = reader
        .headers()
        .map_err(|e| format_error(path, e.to_string()))?
        .clone();
    if headers.len() < 2 || headers.get(0) != Some("id") {
        return Err(format_error(path, "expected header `id,v0,...`"));
    }
    let dim = headers.len() - 1;
    let mut items = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format_error(path, e.to_string()))?;
        if record.len() != dim + 1 {
            return Err(format_error(
                path,
                format!("row has {} fields, expected {}", record.len(), dim + 1),
            ));
        }
        let id = ItemId::new(record.get(0).unwrap_or_default())?;
        let vector = record
            .iter()
            .skip(1)
            .map(|t| parse_value(path, t, "embedding value"))
            .collect::<Result<Vec<f64>>>()?;
        items.push((id, vector));
    }
    EmbeddingSet::new(dim, items)
}

pub fn write_embeddings<W: Write>(out: W, set: &EmbeddingSet) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_owned()];
    header.extend((0..set.dim()).map(|i| format!("v{i}")));
    writer.write_record(&header)?;
    for (id, vector) in set.iter() {
        let mut record = vec![id.as_str().to_owned()];
        record.extend(vector.iter().map(|&v| format_value(v)));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_embeddings_file(path: impl AsRef<Path>, set: &EmbeddingSet) -> Result<()> {
    write_embeddings(BufWriter::new(create(path.as_ref())?), set)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
    let path = path.as_ref();
    let reader = BufReader::new(open(path)?);
    let mut lines = reader.lines();
    let mut next_line = |what: &str| -> Result<String> {
        lines
            .next()
            .transpose()?
            .ok_or_else(|| format_error(path, format!("missing {what}")))
    };

    let shape_line = next_line("shape line")?;
    let mut shape = shape_line.split_whitespace();
    let m: usize = shape
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format_error(path, "invalid row count"))?;
    let n: usize = shape
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| format_error(path, "invalid column count"))?;
    if shape.next().is_some() {
        return Err(format_error(path, "shape line has trailing tokens"));
    }

    let parse_ids = |line: String, count: usize, what: &str| -> Result<Vec<ItemId>> {
        let ids = line
            .split_whitespace()
            .map(ItemId::new)
            .collect::<Result<Vec<_>>>()?;
        if ids.len() != count {
            return Err(format_error(
                path,
                format!("expected {} {what}, got {}", count, ids.len()),
            ));
        }
        Ok(ids)
    };
    let row_ids = parse_ids(next_line("row id line")?, m, "row ids")?;
    let col_ids = parse_ids(next_line("column id line")?, n, "column ids")?;

    let mut values = Vec::with_capacity(m * n);
    for i in 0..m {
        let line = next_line(&format!("value row {i}"))?;
        let mut count = 0;
        for token in line.split_whitespace() {
            values.push(parse_value(path, token, "distance")?);
            count += 1;
        }
        if count != n {
            return Err(format_error(
                path,
                format!("value row {i} has {count} values, expected {n}"),
            ));
        }
    }
    DistanceMatrix::new(row_ids, col_ids, values)
}

pub fn write_matrix<W: Write>(mut out: W, matrix: &DistanceMatrix) -> Result<()> {
    writeln!(out, "{} {}", matrix.rows(), matrix.cols())?;
    writeln!(out, "{}", join_ids(matrix.row_ids()))?;
    writeln!(out, "{}", join_ids(matrix.col_ids()))?;
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|&v| format_value(v)).collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_matrix_file(path: impl AsRef<Path>, matrix: &DistanceMatrix) -> Result<()> {
    write_matrix(BufWriter::new(create(path.as_ref())?), matrix)
}

fn join_ids(ids: &[ItemId]) -> String {
    ids.iter()
        .map(ItemId::as_str)
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn read_truth(path: impl AsRef<Path>) -> Result<GroundTruth> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_reader(BufReader::new(open(path)?));
    let headers = reader
        .headers()
        .map_err(|e| format_error(path, e.to_string()))?
        .clone();
    let has_frame = match headers.len() {
        2 => false,
        3 => true,
        _ => return Err(format_error(path, "expected header `id,identity,frame`")),
    };
    if headers.get(0) != Some("id") || headers.get(1) != Some("identity") {
        return Err(format_error(path, "expected header `id,identity,frame`"));
    }
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format_error(path, e.to_string()))?;
        let id = ItemId::new(record.get(0).unwrap_or_default())?;
        let identity = record
            .get(1)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format_error(path, format!("missing identity for `{id}`")))?
            .to_owned();
        let frame = match record.get(2).filter(|_| has_frame) {
            None | Some("") => None,
            Some(token) => Some(token.parse::<u64>().map_err(|_| {
                format_error(path, format!("invalid frame index `{token}` for `{id}`"))
            })?),
        };
        entries.push(TruthEntry { id, identity, frame });
    }
    GroundTruth::new(entries)
}

pub fn write_truth<W: Write>(out: W, truth: &GroundTruth) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["id", "identity", "frame"])?;
    for entry in truth.entries() {
        let frame = entry.frame.map(|f| f.to_string()).unwrap_or_default();
        writer.write_record([entry.id.as_str(), entry.identity.as_str(), &frame])?;
    }
    writer.flush()?;
    Ok(())
}

pub fn write_truth_file(path: impl AsRef<Path>, truth: &GroundTruth) -> Result<()> {
    write_truth(BufWriter::new(create(path.as_ref())?), truth)
}

/// Reads a ranking file. The gallery ordering is taken from the first line;
/// every other line must rank exactly the same id set.
pub fn read_ranking(path: impl AsRef<Path>) -> Result<RetrievalResult> {
    read_ranking_impl(path.as_ref(), None)
}

/// Reads a ranking file and maps gallery ids to positions in `gallery_ids`,
/// so results from several files share one index space.
pub fn read_ranking_against(
    path: impl AsRef<Path>,
    gallery_ids: &[ItemId],
) -> Result<RetrievalResult> {
    read_ranking_impl(path.as_ref(), Some(gallery_ids))
}

fn read_ranking_impl(path: &Path, gallery_ids: Option<&[ItemId]>) -> Result<RetrievalResult> {
    let reader = BufReader::new(open(path)?);
    let mut query_ids = Vec::new();
    let mut id_lists: Vec<Vec<ItemId>> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (query, rest) = line
            .split_once(':')
            .ok_or_else(|| format_error(path, format!("line {}: missing `:`", lineno + 1)))?;
        query_ids.push(ItemId::new(query.trim())?);
        id_lists.push(
            rest.split_whitespace()
                .map(ItemId::new)
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let gallery: Vec<ItemId> = match gallery_ids {
        Some(ids) => ids.to_vec(),
        None => id_lists
            .first()
            .ok_or_else(|| format_error(path, "no ranking lines"))?
            .clone(),
    };
    let position: std::collections::HashMap<&ItemId, usize> =
        gallery.iter().enumerate().map(|(p, id)| (id, p)).collect();
    let rankings = id_lists
        .iter()
        .map(|list| {
            list.iter()
                .map(|id| {
                    position
                        .get(id)
                        .copied()
                        .ok_or_else(|| format_error(path, format!("unknown gallery id `{id}`")))
                })
                .collect::<Result<Vec<usize>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    RetrievalResult::new(query_ids, gallery, rankings)
}

pub fn write_ranking<W: Write>(mut out: W, result: &RetrievalResult) -> Result<()> {
    for (i, query) in result.query_ids().iter().enumerate() {
        let ranked: Vec<&str> = result.ranked_ids(i).map(ItemId::as_str).collect();
        writeln!(out, "{}: {}", query, ranked.join(" "))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_ranking_file(path: impl AsRef<Path>, result: &RetrievalResult) -> Result<()> {
    write_ranking(BufWriter::new(create(path.as_ref())?), result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn ids(names: &[&str]) -> Vec<ItemId> {
        names.iter().map(|s| ItemId::new(*s).unwrap()).collect()
    }

    #[test]
    fn embeddings_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("emb.csv");
        let set = EmbeddingSet::new(
            2,
            vec![
                (ItemId::new("a").unwrap(), vec![1.25, -0.5]),
                (ItemId::new("b").unwrap(), vec![0.0, 3.0]),
            ],
        )
        .unwrap();
        write_embeddings_file(&path, &set).unwrap();
        let back = read_embeddings(&path).unwrap();
        assert_eq!(back.dim(), 2);
        assert_eq!(back.ids(), set.ids());
        assert_eq!(back.vector(0), &[1.25, -0.5]);
        assert_eq!(back.vector(1), &[0.0, 3.0]);
    }

    #[test]
    fn matrix_round_trip_is_byte_stable() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("d.mat");
        let m = DistanceMatrix::new(
            ids(&["q0", "q1"]),
            ids(&["g0", "g1", "g2"]),
            vec![0.5, 0.125, 0.9, 0.1, 0.2, 0.3],
        )
        .unwrap();
        write_matrix_file(&path, &m).unwrap();
        let first = std::fs::read(&path).unwrap();
        let back = read_matrix(&path).unwrap();
        assert_eq!(back, m);
        write_matrix_file(&path, &back).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), first);
    }

    #[test]
    fn matrix_shape_errors_are_reported() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("bad.mat");
        std::fs::write(&path, "2 2\nq0 q1\ng0 g1\n0.1 0.2\n").unwrap();
        assert!(matches!(read_matrix(&path), Err(Error::Format { .. })));
        std::fs::write(&path, "1 2\nq0\ng0 g1\n0.1 0.2 0.3\n").unwrap();
        assert!(matches!(read_matrix(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn missing_file_error_names_the_path() {
        let err = read_matrix("/nonexistent/x.mat").unwrap_err();
        assert!(matches!(err, Error::File { .. }));
        assert!(err.to_string().contains("/nonexistent/x.mat"));
    }

    #[test]
    fn truth_round_trip_with_and_without_frames() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("truth.csv");
        let truth = GroundTruth::new(vec![
            TruthEntry {
                id: ItemId::new("a").unwrap(),
                identity: "p1".into(),
                frame: Some(0),
            },
            TruthEntry {
                id: ItemId::new("b").unwrap(),
                identity: "p1".into(),
                frame: None,
            },
        ])
        .unwrap();
        write_truth_file(&path, &truth).unwrap();
        let back = read_truth(&path).unwrap();
        assert_eq!(back.identity_of(&ItemId::new("a").unwrap()), Some("p1"));
        assert_eq!(back.frame_of(&ItemId::new("a").unwrap()), Some(0));
        assert_eq!(back.frame_of(&ItemId::new("b").unwrap()), None);

        std::fs::write(&path, "id,identity\nx,p2\n").unwrap();
        let short = read_truth(&path).unwrap();
        assert_eq!(short.identity_of(&ItemId::new("x").unwrap()), Some("p2"));
    }

    #[test]
    fn ranking_round_trip_preserves_order() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rank.txt");
        let result = RetrievalResult::new(
            ids(&["q0", "q1"]),
            ids(&["g0", "g1", "g2"]),
            vec![vec![1, 2, 0], vec![0, 1, 2]],
        )
        .unwrap();
        write_ranking_file(&path, &result).unwrap();
        let against = read_ranking_against(&path, &ids(&["g0", "g1", "g2"])).unwrap();
        assert_eq!(against.rankings(), result.rankings());

        let free = read_ranking(&path).unwrap();
        let ranked: Vec<&ItemId> = free.ranked_ids(0).collect();
        assert_eq!(ranked, [&ids(&["g1"])[0], &ids(&["g2"])[0], &ids(&["g0"])[0]]);
    }

    #[test]
    fn ranking_with_unknown_id_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rank.txt");
        std::fs::write(&path, "q0: g0 g9\n").unwrap();
        assert!(matches!(
            read_ranking_against(&path, &ids(&["g0", "g1"])),
            Err(Error::Format { .. })
        ));
    }
}
