//! Replication harness: run method sets over an `(n, m)` grid of synthetic
//! instances and emit heatmap/bar/raw-run CSVs.
//!
//! All randomness flows from one master seed. Cell `ci`, replication `r`
//! always derives the same sub-seed no matter how work is scheduled, so
//! reruns and parallel runs are bit-identical.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::RuleId;
use crate::dataio::{format_float, DatasetData, DatasetFile};
use crate::domain::{Answer, AnswerMatrix, ContinuousAnswer, Domain, Instance};
use crate::error::{Error, Result};
use crate::noise::{derive_seed, rng_from_seed, NoiseKind, NoiseModelSpec};
use crate::pipeline::{run_method, Method, MethodSpec};

fn default_iterations() -> usize {
    8
}

fn default_replications() -> usize {
    300
}

fn default_tie_band() -> (f64, f64) {
    (0.98, 1.02)
}

/// Errors below this are treated as negligible when flagging ratios.
pub const NEGLIGIBLE_ERROR: f64 = 1e-9;

/// One method entry in an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct MethodConfig {
    pub method: Method,
    /// Row label in the outputs; defaults to the method id. Must be unique
    /// across the config.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default)]
    pub u: f64,
    #[serde(default = "default_iterations")]
    pub iterations: usize,
    /// Aggregation rule; defaults to the domain's basic rule, and is
    /// required for ranking experiments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rule: Option<RuleId>,
}

impl MethodConfig {
    pub fn plain(method: Method) -> Self {
        Self { method, label: None, u: 0.0, iterations: default_iterations(), rule: None }
    }

    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| self.method.id().to_string())
    }
}

/// One `(n, m)` grid cell; `m` is the question count for inn/ier and the
/// candidate count for icn/mallows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCell {
    pub n: usize,
    pub m: usize,
}

/// A full experiment description (the JSON config document).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub noise: NoiseModelSpec,
    pub methods: Vec<MethodConfig>,
    pub grid: Vec<GridCell>,
    #[serde(default = "default_replications")]
    pub replications: usize,
    pub master_seed: u64,
    /// `(a, b)` label pairs whose mean-error ratio goes into `heatmap.csv`.
    #[serde(default)]
    pub heatmap_pairs: Vec<(String, String)>,
    /// Ratios inside this band are flagged as ties.
    #[serde(default = "default_tie_band")]
    pub tie_band: (f64, f64),
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// The noise spec with the cell's size substituted in.
    fn effective_noise(&self, cell: GridCell) -> NoiseModelSpec {
        let mut spec = self.noise.clone();
        match spec.kind {
            NoiseKind::Inn | NoiseKind::Ier => spec.questions = Some(cell.m),
            NoiseKind::Icn | NoiseKind::Mallows => spec.candidates = Some(cell.m),
        }
        spec
    }

    fn resolve_rule(&self, mc: &MethodConfig) -> Result<RuleId> {
        let domain = self.noise.domain();
        let rule = match mc.rule {
            Some(r) => r,
            None => RuleId::default_for(domain).ok_or_else(|| {
                Error::InvalidConfig(vec![format!(
                    "method `{}` needs an explicit rule in the ranking domain",
                    mc.label()
                )])
            })?,
        };
        if rule.domain() != domain {
            return Err(Error::InvalidConfig(vec![format!(
                "rule `{}` does not fit the {domain} domain",
                rule.id()
            )]));
        }
        Ok(rule)
    }

    /// Every problem with the config; empty means valid. The whole grid is
    /// checked before anything runs.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.methods.is_empty() {
            out.push("methods must not be empty".into());
        }
        if self.grid.is_empty() {
            out.push("grid must not be empty".into());
        }
        if self.replications == 0 {
            out.push("replications must be >= 1".into());
        }
        if !(self.tie_band.0 > 0.0 && self.tie_band.0 <= self.tie_band.1) {
            out.push("tie-band must be an ordered positive interval".into());
        }
        let mut labels = Vec::new();
        for mc in &self.methods {
            let label = mc.label();
            if labels.contains(&label) {
                out.push(format!("duplicate method label `{label}`"));
            }
            labels.push(label.clone());
            if mc.iterations == 0 {
                out.push(format!("method `{label}`: iterations must be >= 1"));
            }
            if mc.u < 0.0 {
                out.push(format!("method `{label}`: u must be non-negative"));
            }
            let domain = self.noise.domain();
            match mc.method {
                Method::IdTd if domain != Domain::Categorical => {
                    out.push(format!("method `{label}`: id-td runs on categorical data only"));
                }
                Method::IpTd if domain == Domain::Continuous => {
                    out.push(format!("method `{label}`: ip-td does not run on continuous data"));
                }
                _ => {}
            }
            if let Err(Error::InvalidConfig(msgs)) = self.resolve_rule(mc) {
                out.extend(msgs);
            }
        }
        for (a, b) in &self.heatmap_pairs {
            for side in [a, b] {
                if !labels.contains(side) {
                    out.push(format!("heatmap pair references unknown method label `{side}`"));
                }
            }
        }
        for (i, cell) in self.grid.iter().enumerate() {
            if self.grid[..i].contains(cell) {
                out.push(format!("duplicate grid cell ({}, {})", cell.n, cell.m));
            }
            if cell.n < 2 {
                out.push(format!("grid cell ({}, {}): n must be >= 2", cell.n, cell.m));
            }
            for p in self.effective_noise(*cell).problems() {
                out.push(format!("grid cell ({}, {}): {p}", cell.n, cell.m));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidConfig(problems))
        }
    }
}

/// One raw method run; serialized as a `runs.csv` row
/// `method,u,T,rule,n,m_or_c,error,seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub method: String,
    pub u: f64,
    pub iterations: usize,
    pub rule: String,
    pub n: usize,
    pub m: usize,
    pub error: f64,
    pub seed: u64,
}

/// Per-method replication statistics inside one cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellStat {
    pub method: String,
    pub mean_error: f64,
    pub stderr: f64,
    pub count: usize,
}

/// How a mean-error ratio compares two methods in a cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioFlag {
    /// Ratio below the tie band: method A is better.
    AdvA,
    /// Ratio above the tie band: method B is better.
    AdvB,
    Tie,
    /// Both error rates below [`NEGLIGIBLE_ERROR`].
    Negligible,
    /// Denominator is zero while the numerator is not; no finite ratio.
    Undefined,
}

impl RatioFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            RatioFlag::AdvA => "adv_a",
            RatioFlag::AdvB => "adv_b",
            RatioFlag::Tie => "tie",
            RatioFlag::Negligible => "negligible",
            RatioFlag::Undefined => "undefined",
        }
    }
}

/// A compared method pair within a cell.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioStat {
    pub method_a: String,
    pub method_b: String,
    pub ratio: Option<f64>,
    pub flag: RatioFlag,
}

/// All statistics for one grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSummary {
    pub cell: GridCell,
    pub stats: Vec<CellStat>,
    pub ratios: Vec<RatioStat>,
}

/// The completed experiment: per-cell summaries plus every raw run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub master_seed: u64,
    pub tie_band: (f64, f64),
    pub cells: Vec<CellSummary>,
    pub rows: Vec<RunRow>,
}

/// Run the whole grid. `threads` caps the worker pool (`None` = rayon's
/// default). Fails up front if the config is invalid in any way.
pub fn run_grid(config: &ExperimentConfig, threads: Option<usize>) -> Result<ExperimentGrid> {
    config.validate()?;
    match threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?
            .install(|| run_grid_inner(config)),
        None => run_grid_inner(config),
    }
}

fn run_grid_inner(config: &ExperimentConfig) -> Result<ExperimentGrid> {
    let resolved: Vec<(MethodConfig, RuleId)> = config
        .methods
        .iter()
        .map(|mc| Ok((mc.clone(), config.resolve_rule(mc)?)))
        .collect::<Result<_>>()?;

    let jobs: Vec<(usize, usize)> = (0..config.grid.len())
        .flat_map(|ci| (0..config.replications).map(move |rep| (ci, rep)))
        .collect();

    // one Vec<error> per job, in job order regardless of scheduling
    let per_job: Vec<Vec<(f64, u64)>> = jobs
        .par_iter()
        .map(|&(ci, rep)| {
            let cell = config.grid[ci];
            let spec = config.effective_noise(cell);
            let job_seed =
                derive_seed(config.master_seed, ((ci as u64) << 32) | rep as u64);
            let instance = spec.generate(cell.n, job_seed)?;
            resolved
                .iter()
                .enumerate()
                .map(|(mi, (mc, rule))| {
                    let seed = derive_seed(job_seed, 0x4d45_5448 + mi as u64);
                    let ms = MethodSpec::<f64> {
                        method: mc.method,
                        u: mc.u,
                        iterations: mc.iterations,
                        rule: *rule,
                        seed,
                    };
                    let result = run_method(&instance, &ms)?;
                    let error = result.error.expect("synthetic instances carry truth");
                    Ok((error, seed))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(jobs.len() * resolved.len());
    for (job_idx, &(ci, _rep)) in jobs.iter().enumerate() {
        let cell = config.grid[ci];
        for (mi, (mc, rule)) in resolved.iter().enumerate() {
            let (error, seed) = per_job[job_idx][mi];
            rows.push(RunRow {
                method: mc.label(),
                u: mc.u,
                iterations: mc.iterations,
                rule: rule.id().to_string(),
                n: cell.n,
                m: cell.m,
                error,
                seed,
            });
        }
    }

    let labels: Vec<String> = resolved.iter().map(|(mc, _)| mc.label()).collect();
    let cells = summarize(config, &labels, &rows);
    Ok(ExperimentGrid {
        master_seed: config.master_seed,
        tie_band: config.tie_band,
        cells,
        rows,
    })
}

fn summarize(config: &ExperimentConfig, labels: &[String], rows: &[RunRow]) -> Vec<CellSummary> {
    config
        .grid
        .iter()
        .map(|&cell| {
            let stats: Vec<CellStat> = labels
                .iter()
                .map(|label| {
                    let errors: Vec<f64> = rows
                        .iter()
                        .filter(|r| r.n == cell.n && r.m == cell.m && &r.method == label)
                        .map(|r| r.error)
                        .collect();
                    stat_of(label, &errors)
                })
                .collect();
            let ratios = config
                .heatmap_pairs
                .iter()
                .map(|(a, b)| {
                    let ma = stats.iter().find(|s| &s.method == a).unwrap().mean_error;
                    let mb = stats.iter().find(|s| &s.method == b).unwrap().mean_error;
                    ratio_stat(a.clone(), b.clone(), ma, mb, config.tie_band)
                })
                .collect();
            CellSummary { cell, stats, ratios }
        })
        .collect()
}

fn stat_of(label: &str, errors: &[f64]) -> CellStat {
    let count = errors.len();
    let mean = errors.iter().sum::<f64>() / count as f64;
    let stderr = if count > 1 {
        let var = errors.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
        (var / count as f64).sqrt()
    } else {
        0.0
    };
    CellStat { method: label.to_string(), mean_error: mean, stderr, count }
}

fn ratio_stat(
    method_a: String,
    method_b: String,
    mean_a: f64,
    mean_b: f64,
    tie_band: (f64, f64),
) -> RatioStat {
    if mean_a < NEGLIGIBLE_ERROR && mean_b < NEGLIGIBLE_ERROR {
        return RatioStat { method_a, method_b, ratio: None, flag: RatioFlag::Negligible };
    }
    if mean_b <= 0.0 {
        return RatioStat { method_a, method_b, ratio: None, flag: RatioFlag::Undefined };
    }
    let ratio = mean_a / mean_b;
    let flag = if ratio < tie_band.0 {
        RatioFlag::AdvA
    } else if ratio > tie_band.1 {
        RatioFlag::AdvB
    } else {
        RatioFlag::Tie
    };
    RatioStat { method_a, method_b, ratio: Some(ratio), flag }
}

fn header(grid: &ExperimentGrid, what: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# proxy-td {what} v1");
    let _ = writeln!(s, "# master-seed: {}", grid.master_seed);
    let _ = writeln!(s, "# tie-band: {},{}", grid.tie_band.0, grid.tie_band.1);
    s
}

/// Write `heatmap.csv`, `bars.csv`, and `runs.csv` under `dir`.
pub fn emit_reports(grid: &ExperimentGrid, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;

    let mut heatmap = header(grid, "heatmap");
    heatmap.push_str("n,m,method_a,method_b,ratio,flag\n");
    for cell in &grid.cells {
        for r in &cell.ratios {
            let ratio = r.ratio.map(format_float).unwrap_or_default();
            let _ = writeln!(
                heatmap,
                "{},{},{},{},{},{}",
                cell.cell.n,
                cell.cell.m,
                r.method_a,
                r.method_b,
                ratio,
                r.flag.as_str()
            );
        }
    }
    fs::write(dir.join("heatmap.csv"), heatmap)?;

    // bar charts aggregate every replication of every cell per method
    let mut bars = header(grid, "bars");
    bars.push_str("method,mean_error,stderr\n");
    let mut seen: Vec<String> = Vec::new();
    for row in &grid.rows {
        if !seen.contains(&row.method) {
            seen.push(row.method.clone());
        }
    }
    for label in &seen {
        let errors: Vec<f64> =
            grid.rows.iter().filter(|r| &r.method == label).map(|r| r.error).collect();
        let stat = stat_of(label, &errors);
        let _ = writeln!(
            bars,
            "{},{},{}",
            label,
            format_float(stat.mean_error),
            format_float(stat.stderr)
        );
    }
    fs::write(dir.join("bars.csv"), bars)?;

    let mut runs = header(grid, "runs");
    runs.push_str("method,u,T,rule,n,m_or_c,error,seed\n");
    for r in &grid.rows {
        let _ = writeln!(
            runs,
            "{},{},{},{},{},{},{},{}",
            r.method,
            r.u,
            r.iterations,
            r.rule,
            r.n,
            r.m,
            format_float(r.error),
            r.seed
        );
    }
    fs::write(dir.join("runs.csv"), runs)?;
    Ok(())
}

/// Read a `runs.csv` back into raw rows.
pub fn read_runs(path: &Path) -> Result<Vec<RunRow>> {
    let reader = BufReader::new(fs::File::open(path)?);
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !saw_header {
            saw_header = true;
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 8 {
            return Err(Error::Parse {
                line: idx + 1,
                msg: format!("expected 8 columns, got {}", parts.len()),
            });
        }
        let field = |what: &str, i: usize| -> Result<f64> {
            parts[i]
                .parse()
                .map_err(|e| Error::Parse { line: idx + 1, msg: format!("{what}: {e}") })
        };
        rows.push(RunRow {
            method: parts[0].to_string(),
            u: field("u", 1)?,
            iterations: parts[2]
                .parse()
                .map_err(|e| Error::Parse { line: idx + 1, msg: format!("T: {e}") })?,
            rule: parts[3].to_string(),
            n: parts[4]
                .parse()
                .map_err(|e| Error::Parse { line: idx + 1, msg: format!("n: {e}") })?,
            m: parts[5]
                .parse()
                .map_err(|e| Error::Parse { line: idx + 1, msg: format!("m_or_c: {e}") })?,
            error: field("error", 6)?,
            seed: parts[7]
                .parse()
                .map_err(|e| Error::Parse { line: idx + 1, msg: format!("seed: {e}") })?,
        });
    }
    Ok(rows)
}

/// Recompute cell statistics from raw rows (for cross-checking CSV output
/// against in-memory results).
pub fn stats_from_rows(config: &ExperimentConfig, rows: &[RunRow]) -> Vec<CellSummary> {
    let labels: Vec<String> = config.methods.iter().map(MethodConfig::label).collect();
    summarize(config, &labels, rows)
}

/// Resample a real dataset into an `(n, m)` instance: `m` questions and
/// `n` workers drawn uniformly with replacement, then (for continuous
/// data) each sampled question normalized to mean 0 and variance 1.
///
/// For ranking datasets there are no question columns; `m` must equal the
/// candidate count.
pub fn resample_real_dataset(
    dataset: &DatasetFile,
    n: usize,
    m: usize,
    seed: u64,
) -> Result<Instance<f64>> {
    use rand::Rng;
    if n < 2 || m == 0 {
        return Err(Error::InvalidParameter(format!("resample needs n >= 2, m >= 1; got ({n}, {m})")));
    }
    let mut rng = rng_from_seed(seed);
    match dataset.data() {
        DatasetData::Continuous(table) => {
            let cols: Vec<usize> = (0..m).map(|_| rng.random_range(0..table[0].len())).collect();
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..table.len())).collect();
            let mut matrix: Vec<Vec<f64>> = rows
                .iter()
                .map(|&r| cols.iter().map(|&c| table[r][c]).collect())
                .collect();
            let mut truth: Option<Vec<f64>> = dataset
                .truth()
                .and_then(Answer::as_continuous)
                .map(|t| cols.iter().map(|&c| t.values()[c]).collect());
            normalize_columns(&mut matrix, truth.as_mut());
            let answers = matrix
                .into_iter()
                .map(ContinuousAnswer::new)
                .collect::<Result<Vec<_>>>()?;
            Instance::new(
                AnswerMatrix::Continuous(answers),
                truth.map(|t| Ok::<_, Error>(Answer::Continuous(ContinuousAnswer::new(t)?)))
                    .transpose()?,
            )
        }
        DatasetData::Categorical { rows: table, k } => {
            let cols: Vec<usize> = (0..m).map(|_| rng.random_range(0..table[0].len())).collect();
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..table.len())).collect();
            let answers = rows
                .iter()
                .map(|&r| {
                    crate::domain::CategoricalAnswer::new(
                        cols.iter().map(|&c| table[r][c]).collect(),
                        *k,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let truth = dataset
                .truth()
                .and_then(Answer::as_categorical)
                .map(|t| {
                    crate::domain::CategoricalAnswer::new(
                        cols.iter().map(|&c| t.labels()[c]).collect(),
                        *k,
                    )
                })
                .transpose()?
                .map(Answer::Categorical);
            Instance::new(AnswerMatrix::Categorical(answers), truth)
        }
        DatasetData::Ranking(table) => {
            let c = table[0].candidates();
            if m != c {
                return Err(Error::Shape(format!(
                    "ranking dataset has {c} candidates; cannot resample m={m}"
                )));
            }
            let rows: Vec<usize> = (0..n).map(|_| rng.random_range(0..table.len())).collect();
            let answers = rows.iter().map(|&r| table[r].clone()).collect();
            let truth = dataset.truth().and_then(Answer::as_ranking).cloned().map(Answer::Ranking);
            Instance::new(AnswerMatrix::Ranking(answers), truth)
        }
    }
}

/// Center and scale each column to mean 0, variance 1 (population
/// convention). Constant columns are centered only. A truth row, when
/// given, goes through the same per-column affine map as the answers.
pub fn normalize_columns(matrix: &mut [Vec<f64>], mut truth: Option<&mut Vec<f64>>) {
    let n = matrix.len();
    if n == 0 {
        return;
    }
    let m = matrix[0].len();
    for j in 0..m {
        let mean = matrix.iter().map(|row| row[j]).sum::<f64>() / n as f64;
        let var = matrix.iter().map(|row| (row[j] - mean).powi(2)).sum::<f64>() / n as f64;
        let sd = var.sqrt();
        for row in matrix.iter_mut() {
            row[j] -= mean;
            if sd > 0.0 {
                row[j] /= sd;
            }
        }
        if let Some(t) = truth.as_deref_mut() {
            t[j] -= mean;
            if sd > 0.0 {
                t[j] /= sd;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::{ProtoShapeSpec, ProtoSpec, TruthPolicy};

    fn tiny_config() -> ExperimentConfig {
        ExperimentConfig {
            noise: NoiseModelSpec {
                kind: NoiseKind::Ier,
                questions: None,
                candidates: None,
                categories: Some(2),
                proto: ProtoSpec {
                    shape: ProtoShapeSpec::Normal { mean: 0.3, sd: 0.1 },
                    clip: Some((0.0, 1.0)),
                },
                truth: TruthPolicy::Default,
            },
            methods: vec![
                MethodConfig::plain(Method::Ua),
                MethodConfig::plain(Method::PTd),
            ],
            grid: vec![GridCell { n: 8, m: 12 }],
            replications: 5,
            master_seed: 11,
            heatmap_pairs: vec![("p-td".into(), "ua".into())],
            tie_band: default_tie_band(),
        }
    }

    #[test]
    fn single_cell_run_is_reproducible() {
        let cfg = tiny_config();
        let a = run_grid(&cfg, Some(1)).unwrap();
        let b = run_grid(&cfg, Some(3)).unwrap();
        assert_eq!(a.rows, b.rows, "thread count must not change results");
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn validation_collects_every_problem() {
        let mut cfg = tiny_config();
        cfg.grid.push(GridCell { n: 1, m: 12 });
        cfg.grid.push(GridCell { n: 8, m: 12 });
        cfg.methods.push(MethodConfig { u: -1.0, ..MethodConfig::plain(Method::Ua) });
        cfg.heatmap_pairs.push(("nope".into(), "ua".into()));
        let problems = cfg.problems();
        assert!(problems.iter().any(|p| p.contains("n must be >= 2")));
        assert!(problems.iter().any(|p| p.contains("duplicate grid cell")));
        assert!(problems.iter().any(|p| p.contains("duplicate method label")));
        assert!(problems.iter().any(|p| p.contains("u must be non-negative")));
        assert!(problems.iter().any(|p| p.contains("unknown method label")));
        assert!(run_grid(&cfg, None).is_err());
    }

    #[test]
    fn negligible_cells_are_flagged() {
        let mut cfg = tiny_config();
        cfg.noise.proto =
            ProtoSpec { shape: ProtoShapeSpec::PointMass { value: 0.0 }, clip: None };
        let grid = run_grid(&cfg, None).unwrap();
        let ratio = &grid.cells[0].ratios[0];
        assert_eq!(ratio.flag, RatioFlag::Negligible);
        assert!(ratio.ratio.is_none());
    }

    #[test]
    fn reports_roundtrip_and_stats_match() {
        let cfg = tiny_config();
        let grid = run_grid(&cfg, None).unwrap();
        let dir = tempfile::tempdir().unwrap();
        emit_reports(&grid, dir.path()).unwrap();
        let rows = read_runs(&dir.path().join("runs.csv")).unwrap();
        assert_eq!(rows, grid.rows, "raw rows must round-trip exactly");
        let cells = stats_from_rows(&cfg, &rows);
        assert_eq!(cells, grid.cells, "stats recomputed from the file must match exactly");

        let heatmap = std::fs::read_to_string(dir.path().join("heatmap.csv")).unwrap();
        assert!(heatmap.starts_with("# proxy-td heatmap v1"));
        assert!(heatmap.contains("p-td,ua"));
    }

    #[test]
    fn empty_grid_emits_header_only_files() {
        let grid = ExperimentGrid {
            master_seed: 0,
            tie_band: default_tie_band(),
            cells: vec![],
            rows: vec![],
        };
        let dir = tempfile::tempdir().unwrap();
        emit_reports(&grid, dir.path()).unwrap();
        for file in ["heatmap.csv", "bars.csv", "runs.csv"] {
            let text = std::fs::read_to_string(dir.path().join(file)).unwrap();
            let data_lines: Vec<&str> = text
                .lines()
                .filter(|l| !l.starts_with('#') && !l.is_empty())
                .collect();
            assert_eq!(data_lines.len(), 1, "{file} should hold only its column header");
        }
    }

    #[test]
    fn binary_benchmark_cell_favors_proxy_weighting() {
        // the larger cell must show a mean-error ratio below one for
        // proxy weighting against unweighted aggregation
        let mut cfg = tiny_config();
        cfg.noise.proto = ProtoSpec {
            shape: ProtoShapeSpec::Normal { mean: 0.45, sd: 0.1 },
            clip: Some((0.0, 1.0)),
        };
        cfg.grid = vec![GridCell { n: 10, m: 10 }, GridCell { n: 40, m: 50 }];
        cfg.replications = 300;
        let grid = run_grid(&cfg, None).unwrap();
        let big = grid.cells.iter().find(|c| c.cell.n == 40).unwrap();
        let ratio = big.ratios[0].ratio.unwrap();
        assert!(ratio < 1.0, "p-td/ua ratio {ratio} in the (40, 50) cell");
        assert_eq!(big.ratios[0].flag, RatioFlag::AdvA);
    }

    fn fixture_dataset(dir: &std::path::Path) -> crate::dataio::DatasetFile {
        let path = dir.join("answers.csv");
        let mut text = String::from("worker_id,q1,q2,q3,q4\n");
        for i in 0..6 {
            let row: Vec<String> =
                (0..4).map(|j| format!("{}", (i * 7 + j * 3) as f64 * 0.25 - 2.0)).collect();
            text.push_str(&format!("w{i},{}\n", row.join(",")));
        }
        std::fs::write(&path, text).unwrap();
        crate::dataio::load_dataset(&path, Domain::Continuous).unwrap()
    }

    #[test]
    fn resampling_matches_the_requested_shape_and_seed() {
        let dir = tempfile::tempdir().unwrap();
        let ds = fixture_dataset(dir.path());
        let a = resample_real_dataset(&ds, 9, 7, 5).unwrap();
        assert_eq!(a.n(), 9);
        assert_eq!(a.width(), 7);
        let b = resample_real_dataset(&ds, 9, 7, 5).unwrap();
        assert_eq!(a, b, "same seed, same resample");
        let c = resample_real_dataset(&ds, 9, 7, 6).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn resampled_continuous_questions_are_normalized() {
        let dir = tempfile::tempdir().unwrap();
        let ds = fixture_dataset(dir.path());
        let inst = resample_real_dataset(&ds, 8, 5, 11).unwrap();
        let AnswerMatrix::Continuous(rows) = inst.answers() else { panic!() };
        let n = rows.len() as f64;
        for j in 0..5 {
            let mean: f64 = rows.iter().map(|r| r.values()[j]).sum::<f64>() / n;
            let var: f64 =
                rows.iter().map(|r| (r.values()[j] - mean).powi(2)).sum::<f64>() / n;
            assert!(mean.abs() < 1e-9, "question {j}: mean {mean}");
            assert!(var == 0.0 || (var - 1.0).abs() < 1e-9, "question {j}: variance {var}");
        }
    }

    #[test]
    fn ranking_resample_checks_the_candidate_count() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ranks.csv");
        std::fs::write(&path, "worker_id,rank\nw1,abcd\nw2,dcba\nw3,badc\n").unwrap();
        let ds = crate::dataio::load_dataset(&path, Domain::Ranking).unwrap();
        let inst = resample_real_dataset(&ds, 5, 4, 3).unwrap();
        assert_eq!(inst.n(), 5);
        assert_eq!(inst.candidates(), Some(4));
        assert!(resample_real_dataset(&ds, 5, 3, 3).is_err());
    }

    #[test]
    fn normalization_centers_scales_and_is_idempotent() {
        let mut m = vec![vec![1.0, 5.0, 2.0], vec![3.0, 5.0, 8.0], vec![5.0, 5.0, 2.0]];
        normalize_columns(&mut m, None);
        let n = m.len() as f64;
        for j in 0..3 {
            let mean: f64 = m.iter().map(|r| r[j]).sum::<f64>() / n;
            assert!(mean.abs() < 1e-9);
        }
        // constant column centered to zero, not divided
        assert!(m.iter().all(|r| r[1] == 0.0));
        let var0: f64 = m.iter().map(|r| r[0] * r[0]).sum::<f64>() / n;
        assert!((var0 - 1.0).abs() < 1e-9);

        let before = m.clone();
        normalize_columns(&mut m, None);
        for (ra, rb) in before.iter().zip(&m) {
            for (a, b) in ra.iter().zip(rb) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}
