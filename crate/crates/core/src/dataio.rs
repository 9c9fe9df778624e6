//! File formats: real-dataset ingestion and lossless instance round-trips.
//!
//! Everything is UTF-8 CSV with `\n` line endings and `#`-prefixed header
//! comments carrying the format version (and seed provenance for generated
//! instances). Floats are written with 17 significant digits so reading a
//! file back reproduces every bit.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::domain::{
    pair_count, Answer, AnswerMatrix, CategoricalAnswer, ContinuousAnswer, Domain, Instance,
    PairwiseVector, RankingAnswer,
};
use crate::error::{Error, Result};

const INSTANCE_VERSION: &str = "proxy-td instance v1";

/// Full-precision float formatting; `f64::from_str` recovers the exact value.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// `dcba` -> the ranking (3, 2, 1, 0): letters are candidate indices, best
/// candidate first.
pub fn ranking_from_string(s: &str) -> Result<RankingAnswer> {
    let order = s
        .trim()
        .chars()
        .map(|ch| match ch {
            'a'..='z' => Ok(ch as usize - 'a' as usize),
            _ => Err(Error::Parse { line: 0, msg: format!("bad ranking character `{ch}`") }),
        })
        .collect::<Result<Vec<_>>>()?;
    RankingAnswer::new(order)
}

pub fn ranking_to_string(r: &RankingAnswer) -> String {
    r.order().iter().map(|&c| (b'a' + c as u8) as char).collect()
}

/// Rows of a loaded dataset, by domain.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetData {
    Continuous(Vec<Vec<f64>>),
    Categorical { rows: Vec<Vec<usize>>, k: usize },
    Ranking(Vec<RankingAnswer>),
}

/// A real (or fixture) dataset: a rectangular answer table, an optional
/// truth row, and the count of workers dropped for missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetFile {
    domain: Domain,
    data: DatasetData,
    truth: Option<Answer<f64>>,
    dropped_workers: usize,
}

impl DatasetFile {
    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn data(&self) -> &DatasetData {
        &self.data
    }

    pub fn truth(&self) -> Option<&Answer<f64>> {
        self.truth.as_ref()
    }

    pub fn dropped_workers(&self) -> usize {
        self.dropped_workers
    }

    pub fn workers(&self) -> usize {
        match &self.data {
            DatasetData::Continuous(rows) => rows.len(),
            DatasetData::Categorical { rows, .. } => rows.len(),
            DatasetData::Ranking(rows) => rows.len(),
        }
    }

    pub fn questions(&self) -> usize {
        match &self.data {
            DatasetData::Continuous(rows) => rows[0].len(),
            DatasetData::Categorical { rows, .. } => rows[0].len(),
            DatasetData::Ranking(rows) => rows[0].candidates(),
        }
    }
}

struct RawTable {
    /// Cell strings per kept row, without the worker id column.
    rows: Vec<Vec<String>>,
    dropped: usize,
}

/// Read a `worker_id,...` CSV, dropping workers with any empty cell.
fn read_table(path: &Path, expect_rank_column: bool) -> Result<RawTable> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut rows = Vec::new();
    let mut dropped = 0usize;
    let mut width: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cells: Vec<String> = line.split(',').map(|c| c.trim().to_string()).collect();
        if width.is_none() {
            // header
            if cells.first().map(String::as_str) != Some("worker_id") {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "header must start with `worker_id`".into(),
                });
            }
            if expect_rank_column {
                if cells.len() != 2 || cells[1] != "rank" {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "ranking header must be `worker_id,rank`".into(),
                    });
                }
            } else if cells.len() < 2 {
                return Err(Error::Parse {
                    line: line_no,
                    msg: "header needs at least one question column".into(),
                });
            }
            width = Some(cells.len());
            continue;
        }
        if cells.len() != width.unwrap() {
            return Err(Error::Shape(format!(
                "line {line_no}: {} columns where the header has {}",
                cells.len(),
                width.unwrap()
            )));
        }
        if cells[1..].iter().any(String::is_empty) {
            dropped += 1;
            continue;
        }
        rows.push(cells[1..].to_vec());
    }
    if width.is_none() {
        return Err(Error::Parse { line: 0, msg: format!("{}: no header row", path.display()) });
    }
    Ok(RawTable { rows, dropped })
}

fn parse_f64(cell: &str, line_hint: usize) -> Result<f64> {
    cell.parse()
        .map_err(|e| Error::Parse { line: line_hint, msg: format!("bad number `{cell}`: {e}") })
}

fn parse_usize(cell: &str, line_hint: usize) -> Result<usize> {
    cell.parse()
        .map_err(|e| Error::Parse { line: line_hint, msg: format!("bad label `{cell}`: {e}") })
}

/// Load a dataset CSV (header `worker_id,q1..qm`, or `worker_id,rank` with
/// permutation strings for rankings). A `truth.csv` beside the answers
/// file, when present, supplies the ground truth in the same format.
/// Workers with missing cells are dropped and counted.
pub fn load_dataset(path: &Path, domain: Domain) -> Result<DatasetFile> {
    let table = read_table(path, domain == Domain::Ranking)?;
    if table.rows.is_empty() {
        return Err(Error::Parse { line: 0, msg: format!("{}: no usable worker rows", path.display()) });
    }
    let truth_path = path.with_file_name("truth.csv");
    let truth_row: Option<Vec<String>> = if truth_path.exists() {
        let t = read_table(&truth_path, domain == Domain::Ranking)?;
        if t.rows.len() != 1 {
            return Err(Error::Shape(format!(
                "{}: expected exactly one truth row, got {}",
                truth_path.display(),
                t.rows.len()
            )));
        }
        Some(t.rows.into_iter().next().unwrap())
    } else {
        None
    };

    if table.dropped > 0 {
        log::warn!(
            "{}: dropped {} worker(s) with missing cells",
            path.display(),
            table.dropped
        );
    }

    let (data, truth) = match domain {
        Domain::Continuous => {
            let rows = table
                .rows
                .iter()
                .map(|r| r.iter().map(|c| parse_f64(c, 0)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let truth = truth_row
                .map(|r| -> Result<Answer<f64>> {
                    let values =
                        r.iter().map(|c| parse_f64(c, 0)).collect::<Result<Vec<_>>>()?;
                    if values.len() != rows[0].len() {
                        return Err(Error::Shape("truth row width mismatch".into()));
                    }
                    Ok(Answer::Continuous(ContinuousAnswer::new(values)?))
                })
                .transpose()?;
            (DatasetData::Continuous(rows), truth)
        }
        Domain::Categorical => {
            let rows = table
                .rows
                .iter()
                .map(|r| r.iter().map(|c| parse_usize(c, 0)).collect::<Result<Vec<_>>>())
                .collect::<Result<Vec<_>>>()?;
            let truth_labels = truth_row
                .map(|r| r.iter().map(|c| parse_usize(c, 0)).collect::<Result<Vec<_>>>())
                .transpose()?;
            let max_label = rows
                .iter()
                .flatten()
                .chain(truth_labels.iter().flatten())
                .copied()
                .max()
                .unwrap_or(0);
            let k = (max_label + 1).max(2);
            let truth = truth_labels
                .map(|labels| -> Result<Answer<f64>> {
                    if labels.len() != rows[0].len() {
                        return Err(Error::Shape("truth row width mismatch".into()));
                    }
                    Ok(Answer::Categorical(CategoricalAnswer::new(labels, k)?))
                })
                .transpose()?;
            (DatasetData::Categorical { rows, k }, truth)
        }
        Domain::Ranking => {
            let rows = table
                .rows
                .iter()
                .map(|r| ranking_from_string(&r[0]))
                .collect::<Result<Vec<_>>>()?;
            let c = rows[0].candidates();
            if rows.iter().any(|r| r.candidates() != c) {
                return Err(Error::Shape("rankings disagree on the candidate count".into()));
            }
            let truth = truth_row
                .map(|r| -> Result<Answer<f64>> {
                    let t = ranking_from_string(&r[0])?;
                    if t.candidates() != c {
                        return Err(Error::Shape("truth ranking width mismatch".into()));
                    }
                    Ok(Answer::Ranking(t))
                })
                .transpose()?;
            (DatasetData::Ranking(rows), truth)
        }
    };

    // rectangularity of parsed rows is guaranteed by the shared header width
    Ok(DatasetFile { domain, data, truth, dropped_workers: table.dropped })
}

fn answer_cells(matrix: &AnswerMatrix<f64>, worker: usize) -> Vec<String> {
    match matrix {
        AnswerMatrix::Continuous(v) => v[worker].values().iter().map(|&x| format_float(x)).collect(),
        AnswerMatrix::Categorical(v) => v[worker].labels().iter().map(usize::to_string).collect(),
        AnswerMatrix::Ranking(v) => vec![ranking_to_string(&v[worker])],
        AnswerMatrix::Pairwise(v) => {
            v[worker].entries().iter().map(|e| e.to_string()).collect()
        }
    }
}

fn truth_cells(truth: &Answer<f64>, matrix: &AnswerMatrix<f64>) -> Vec<String> {
    match (truth, matrix) {
        (Answer::Continuous(t), _) => t.values().iter().map(|&x| format_float(x)).collect(),
        (Answer::Categorical(t), _) => t.labels().iter().map(usize::to_string).collect(),
        (Answer::Ranking(t), AnswerMatrix::Pairwise(_)) => {
            t.pairwise().entries().iter().map(i8::to_string).collect()
        }
        (Answer::Ranking(t), _) => vec![ranking_to_string(t)],
    }
}

/// Write an instance (with its truth and true fault levels, when present)
/// to a versioned CSV. `seed` records provenance in the header.
pub fn save_instance(instance: &Instance<f64>, seed: Option<u64>, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(&format!("# {INSTANCE_VERSION}\n"));
    out.push_str(&format!("# domain: {}\n", instance.domain()));
    match instance.answers() {
        AnswerMatrix::Categorical(v) => {
            out.push_str(&format!("# k: {}\n", v[0].categories()));
        }
        AnswerMatrix::Ranking(v) => {
            out.push_str(&format!("# c: {}\n# encoding: orders\n", v[0].candidates()));
        }
        AnswerMatrix::Pairwise(v) => {
            out.push_str(&format!("# c: {}\n# encoding: pairwise\n", v[0].candidates()));
        }
        AnswerMatrix::Continuous(_) => {}
    }
    if let Some(seed) = seed {
        out.push_str(&format!("# seed: {seed}\n"));
    }
    let value_header = match instance.answers() {
        AnswerMatrix::Ranking(_) => "rank".to_string(),
        AnswerMatrix::Pairwise(v) => (1..=pair_count(v[0].candidates()))
            .map(|i| format!("p{i}"))
            .collect::<Vec<_>>()
            .join(","),
        _ => (1..=instance.width()).map(|i| format!("q{i}")).collect::<Vec<_>>().join(","),
    };
    out.push_str(&format!("worker_id,fault,{value_header}\n"));
    if let Some(truth) = instance.truth() {
        out.push_str(&format!("truth,,{}\n", truth_cells(truth, instance.answers()).join(",")));
    }
    for i in 0..instance.n() {
        let fault = instance
            .true_faults()
            .map(|f| format_float(f[i]))
            .unwrap_or_default();
        out.push_str(&format!(
            "w{i},{fault},{}\n",
            answer_cells(instance.answers(), i).join(",")
        ));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Read back a file written by [`save_instance`].
pub fn load_instance(path: &Path) -> Result<Instance<f64>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut lines = Vec::new();
    for line in reader.lines() {
        lines.push(line?);
    }
    let mut iter = lines.iter().enumerate();
    let Some((_, first)) = iter.next() else {
        return Err(Error::Parse { line: 0, msg: "empty instance file".into() });
    };
    let version = first.trim_start_matches('#').trim();
    if version != INSTANCE_VERSION {
        return Err(Error::FormatVersion(version.to_string()));
    }

    let mut domain: Option<Domain> = None;
    let mut k: Option<usize> = None;
    let mut c: Option<usize> = None;
    let mut encoding: Option<String> = None;
    let mut header_seen = false;
    let mut truth_cells: Option<Vec<String>> = None;
    let mut worker_rows: Vec<(Option<f64>, Vec<String>)> = Vec::new();

    for (idx, line) in iter {
        let line_no = idx + 1;
        let line = line.trim_end_matches(['\r', '\n']);
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some((key, value)) = comment.split_once(':') {
                let value = value.trim();
                match key.trim() {
                    "domain" => {
                        domain = Some(match value {
                            "continuous" => Domain::Continuous,
                            "categorical" => Domain::Categorical,
                            "ranking" => Domain::Ranking,
                            other => {
                                return Err(Error::Parse {
                                    line: line_no,
                                    msg: format!("unknown domain `{other}`"),
                                })
                            }
                        });
                    }
                    "k" => k = Some(parse_usize(value, line_no)?),
                    "c" => c = Some(parse_usize(value, line_no)?),
                    "encoding" => encoding = Some(value.to_string()),
                    _ => {} // seed provenance and future metadata
                }
            }
            continue;
        }
        let cells: Vec<String> = line.split(',').map(|x| x.trim().to_string()).collect();
        if !header_seen {
            header_seen = true;
            if cells.first().map(String::as_str) != Some("worker_id") {
                return Err(Error::Parse { line: line_no, msg: "missing column header".into() });
            }
            continue;
        }
        if cells.len() < 3 {
            return Err(Error::Parse { line: line_no, msg: "row too short".into() });
        }
        if cells[0] == "truth" {
            truth_cells = Some(cells[2..].to_vec());
        } else {
            let fault =
                if cells[1].is_empty() { None } else { Some(parse_f64(&cells[1], line_no)?) };
            worker_rows.push((fault, cells[2..].to_vec()));
        }
    }

    let domain = domain.ok_or(Error::Parse { line: 0, msg: "missing `# domain:` header".into() })?;
    if worker_rows.is_empty() {
        return Err(Error::Parse { line: 0, msg: "no worker rows".into() });
    }

    let matrix = match domain {
        Domain::Continuous => {
            let answers = worker_rows
                .iter()
                .map(|(_, cells)| {
                    let values =
                        cells.iter().map(|x| parse_f64(x, 0)).collect::<Result<Vec<_>>>()?;
                    ContinuousAnswer::new(values)
                })
                .collect::<Result<Vec<_>>>()?;
            AnswerMatrix::Continuous(answers)
        }
        Domain::Categorical => {
            let k = k.ok_or(Error::Parse { line: 0, msg: "missing `# k:` header".into() })?;
            let answers = worker_rows
                .iter()
                .map(|(_, cells)| {
                    let labels =
                        cells.iter().map(|x| parse_usize(x, 0)).collect::<Result<Vec<_>>>()?;
                    CategoricalAnswer::new(labels, k)
                })
                .collect::<Result<Vec<_>>>()?;
            AnswerMatrix::Categorical(answers)
        }
        Domain::Ranking => {
            let c = c.ok_or(Error::Parse { line: 0, msg: "missing `# c:` header".into() })?;
            match encoding.as_deref() {
                Some("orders") => {
                    let answers = worker_rows
                        .iter()
                        .map(|(_, cells)| {
                            let r = ranking_from_string(&cells[0])?;
                            if r.candidates() != c {
                                return Err(Error::Shape("ranking width mismatch".into()));
                            }
                            Ok(r)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    AnswerMatrix::Ranking(answers)
                }
                Some("pairwise") => {
                    let answers = worker_rows
                        .iter()
                        .map(|(_, cells)| {
                            let entries = cells
                                .iter()
                                .map(|x| match x.as_str() {
                                    "1" | "+1" => Ok(1),
                                    "-1" => Ok(-1),
                                    other => Err(Error::Parse {
                                        line: 0,
                                        msg: format!("bad pairwise entry `{other}`"),
                                    }),
                                })
                                .collect::<Result<Vec<i8>>>()?;
                            PairwiseVector::new(c, entries)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    AnswerMatrix::Pairwise(answers)
                }
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("bad ranking encoding {other:?}"),
                    })
                }
            }
        }
    };

    let truth = truth_cells
        .map(|cells| -> Result<Answer<f64>> {
            Ok(match &matrix {
                AnswerMatrix::Continuous(_) => Answer::Continuous(ContinuousAnswer::new(
                    cells.iter().map(|x| parse_f64(x, 0)).collect::<Result<Vec<_>>>()?,
                )?),
                AnswerMatrix::Categorical(v) => Answer::Categorical(CategoricalAnswer::new(
                    cells.iter().map(|x| parse_usize(x, 0)).collect::<Result<Vec<_>>>()?,
                    v[0].categories(),
                )?),
                AnswerMatrix::Ranking(_) => Answer::Ranking(ranking_from_string(&cells[0])?),
                AnswerMatrix::Pairwise(v) => {
                    let entries = cells
                        .iter()
                        .map(|x| match x.as_str() {
                            "1" | "+1" => Ok(1),
                            "-1" => Ok(-1),
                            other => Err(Error::Parse {
                                line: 0,
                                msg: format!("bad pairwise entry `{other}`"),
                            }),
                        })
                        .collect::<Result<Vec<i8>>>()?;
                    Answer::Ranking(PairwiseVector::new(v[0].candidates(), entries)?.to_order()?)
                }
            })
        })
        .transpose()?;

    let faults: Option<Vec<f64>> = if worker_rows.iter().all(|(f, _)| f.is_some()) {
        Some(worker_rows.iter().map(|(f, _)| f.unwrap()).collect())
    } else if worker_rows.iter().all(|(f, _)| f.is_none()) {
        None
    } else {
        return Err(Error::Parse {
            line: 0,
            msg: "either every worker row carries a fault or none does".into(),
        });
    };

    let mut instance = Instance::new(matrix, truth)?;
    if let Some(f) = faults {
        instance = instance.with_true_faults(f)?;
    }
    Ok(instance)
}
