use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Label, PairDataset, Requirement, RequirementPair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    /// `.jsonl` / `.json` select JSONL, anything else CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(Error::InvalidArgument(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct PairRow {
    id1: String,
    id2: String,
    #[serde(default)]
    label: Option<String>,
}

fn csv_error(path: &Path, err: csv::Error) -> Error {
    let line = err.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: err.to_string(),
    }
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path, format: Format) -> Result<Vec<(usize, T)>> {
    let file = File::open(path)?;
    let mut rows = Vec::new();
    match format {
        Format::Csv => {
            let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
            let headers = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
            for rec in rdr.records() {
                let rec = rec.map_err(|e| csv_error(path, e))?;
                let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
                let row = rec.deserialize(Some(&headers)).map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    message: e.to_string(),
                })?;
                rows.push((line, row));
            }
        }
        Format::Jsonl => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let row = serde_json::from_str(&line).map_err(|e| Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: e.to_string(),
                })?;
                rows.push((i + 1, row));
            }
        }
    }
    Ok(rows)
}

/// Reads requirements, rejecting duplicate ids and empty texts.
pub fn ingest_requirements(path: &Path, format: Format) -> Result<Vec<Requirement>> {
    let rows: Vec<(usize, Requirement)> = read_rows(path, format)?;
    let mut seen = HashSet::with_capacity(rows.len());
    let mut out = Vec::with_capacity(rows.len());
    for (line, r) in rows {
        r.validate().map_err(|e| match e {
            Error::InvalidArgument(message) => Error::Parse {
                path: path.to_path_buf(),
                line,
                message,
            },
            other => other,
        })?;
        if !seen.insert(r.id.clone()) {
            return Err(Error::DuplicateId(r.id));
        }
        out.push(r);
    }
    Ok(out)
}

/// Reads pair rows in canonical order. An empty label cell means unlabeled.
pub fn read_pairs(path: &Path, format: Format) -> Result<Vec<RequirementPair>> {
    let rows: Vec<(usize, PairRow)> = read_rows(path, format)?;
    rows.into_iter()
        .map(|(_, row)| {
            let label = match row.label.as_deref().map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(Label::from_str(s)?),
            };
            RequirementPair::new(row.id1, row.id2, label)
        })
        .collect()
}

/// Reads labeled pairs into `dataset`, validating every id against it.
pub fn ingest_pairs(path: &Path, dataset: PairDataset) -> Result<PairDataset> {
    let pairs = read_pairs(path, Format::from_path(path))?;
    dataset.with_pairs(pairs)
}

pub fn write_requirements(path: &Path, requirements: &[Requirement], format: Format) -> Result<()> {
    let file = File::create(path)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for r in requirements {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = BufWriter::new(file);
            for r in requirements {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

pub fn write_pairs(path: &Path, pairs: &[RequirementPair], format: Format) -> Result<()> {
    let rows = pairs.iter().map(|p| PairRow {
        id1: p.id1.clone(),
        id2: p.id2.clone(),
        label: p.label.map(|l| l.as_str().to_string()),
    });
    let file = File::create(path)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(file);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = BufWriter::new(file);
            for row in rows {
                serde_json::to_writer(&mut w, &row)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Mode;
    use std::fs;

    fn write(dir: &Path, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn three_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "r.csv",
            "id,doc_id,text\nR1,uav,The UAV shall fly.\nR2,uav,\"The UAV shall land, safely.\"\nR3,uav,The UAV shall charge.\n",
        );
        let reqs = ingest_requirements(&p, Format::Csv).unwrap();
        assert_eq!(reqs.len(), 3);
        assert_eq!(reqs[1].text, "The UAV shall land, safely.");
    }

    #[test]
    fn repeated_id() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "r.csv", "id,doc_id,text\nR1,d,a b c\nR1,d,d e f\n");
        assert!(matches!(ingest_requirements(&p, Format::Csv), Err(Error::DuplicateId(id)) if id == "R1"));
    }

    #[test]
    fn empty_text() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(dir.path(), "r.csv", "id,doc_id,text\nR1,d,   \n");
        assert!(matches!(ingest_requirements(&p, Format::Csv), Err(Error::EmptyText(_))));
    }

    #[test]
    fn jsonl_bad_line_reports_line_number() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "r.jsonl",
            "{\"id\":\"a\",\"doc_id\":\"d\",\"text\":\"x y\"}\n{oops\n",
        );
        match ingest_requirements(&p, Format::Jsonl) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn pairs_are_canonicalized() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(
            dir.path(),
            "p.csv",
            "id1,id2,label\nr_a,r_b,Conflict\nr_b,r_c,neutral\n",
        );
        let reqs = ["r_a", "r_b", "r_c"]
            .iter()
            .map(|id| Requirement::new(*id, "d", "text here"))
            .collect();
        let d = PairDataset::new("t", Mode::Cdn, reqs).unwrap();
        let d = ingest_pairs(&p, d).unwrap();
        assert_eq!(d.pairs[0], RequirementPair::new("r_a", "r_b", Some(Label::Conflict)).unwrap());
        assert_eq!(d.pairs[1].label, Some(Label::Neutral));

        let p = write(dir.path(), "q.csv", "id1,id2,label\nr_b,r_a,neutral\n");
        let d2 = PairDataset::new("t", Mode::Cdn, d.requirements().to_vec()).unwrap();
        let d2 = ingest_pairs(&p, d2).unwrap();
        assert_eq!((d2.pairs[0].id1.as_str(), d2.pairs[0].id2.as_str()), ("r_a", "r_b"));
    }

    #[test]
    fn pair_errors() {
        let dir = tempfile::tempdir().unwrap();
        let reqs: Vec<_> = ["r_a", "r_b"]
            .iter()
            .map(|id| Requirement::new(*id, "d", "text here"))
            .collect();
        let ds = || PairDataset::new("t", Mode::Cdn, reqs.clone()).unwrap();
        let p = write(dir.path(), "a.csv", "id1,id2,label\nr_a,r_a,neutral\n");
        assert!(matches!(ingest_pairs(&p, ds()), Err(Error::SelfPair(_))));
        let p = write(dir.path(), "b.csv", "id1,id2,label\nr_a,r_z,neutral\n");
        assert!(matches!(ingest_pairs(&p, ds()), Err(Error::UnknownId(id)) if id == "r_z"));
        let p = write(dir.path(), "c.csv", "id1,id2,label\nr_a,r_b,entails\n");
        assert!(matches!(ingest_pairs(&p, ds()), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn canonical_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let body = "id,doc_id,text\nR1,uav,\"Quoted, with comma\"\nR2,uav,\"He said \"\"no\"\"\"\n";
        let src = write(dir.path(), "r.csv", body);
        let reqs = ingest_requirements(&src, Format::Csv).unwrap();
        let out = dir.path().join("r2.csv");
        write_requirements(&out, &reqs, Format::Csv).unwrap();
        assert_eq!(fs::read_to_string(&out).unwrap(), body);

        let pbody = "id1,id2,label\nR1,R2,conflict\n";
        let src = write(dir.path(), "p.csv", pbody);
        let pairs = read_pairs(&src, Format::Csv).unwrap();
        let out = dir.path().join("p2.csv");
        write_pairs(&out, &pairs, Format::Csv).unwrap();
        assert_eq!(fs::read_to_string(&out).unwrap(), pbody);

        let jout = dir.path().join("r.jsonl");
        write_requirements(&jout, &reqs, Format::Jsonl).unwrap();
        assert_eq!(ingest_requirements(&jout, Format::Jsonl).unwrap(), reqs);
    }
}
