//! `ptd`: generate synthetic instances, estimate worker fault levels,
//! aggregate answers, and run replication experiments from JSON configs.
//!
//! Summaries go to stdout; all machine-readable data goes to files.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use proxy_td::aggregate::RuleId;
use proxy_td::dataio::{format_float, load_instance, ranking_to_string, save_instance};
use proxy_td::domain::{Answer, Domain, Instance};
use proxy_td::estimate::{
    d_efl, empirical_faults, id_td_estimate, ip_efl, p_efl, EstimatorConfig, EstimatorKind,
    FaultEstimate,
};
use proxy_td::experiment::{emit_reports, run_grid, ExperimentConfig};
use proxy_td::noise::{NoiseKind, NoiseModelSpec, ProtoShapeSpec, ProtoSpec, TruthPolicy};
use proxy_td::pipeline::{run_method, Method, MethodSpec};

#[derive(Parser)]
#[command(name = "ptd", version, about = "Estimate worker fault levels from answer distances and aggregate crowd answers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Log verbosity (repeat for more).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic instance from a noise model.
    Generate(GenerateArgs),
    /// Estimate per-worker fault levels of a stored instance.
    Estimate(EstimateArgs),
    /// Run one truth-discovery method on a stored instance.
    Aggregate(AggregateArgs),
    /// Run a replication grid from a JSON config and write report CSVs.
    Experiment(ExperimentArgs),
    /// Validate an experiment config without running it.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Noise model: inn | ier | icn | mallows.
    #[arg(long)]
    model: String,
    /// Worker count.
    #[arg(long)]
    n: usize,
    /// Question count (inn, ier).
    #[arg(long)]
    m: Option<usize>,
    /// Candidate count (icn, mallows).
    #[arg(long)]
    c: Option<usize>,
    /// Category count (ier).
    #[arg(long)]
    k: Option<usize>,
    /// Fault (or, for mallows, dispersion) distribution, e.g.
    /// `normal:0.45,0.1`, `uniform:0.1,0.4`, `triangular:0,0.3,0.8`,
    /// `bimodal:0.2,0.52,0.2`, `point:0.3`.
    #[arg(long)]
    proto: String,
    /// Clip bounds `lo,hi` applied to every draw (accepts `inf`).
    #[arg(long)]
    clip: Option<String>,
    /// Ground-truth policy: default | uniform.
    #[arg(long, default_value = "default")]
    truth: String,
    /// Master seed (required: generation is stochastic).
    #[arg(long)]
    seed: u64,
    /// Output instance file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EstimateArgs {
    /// Instance file written by `generate` (or by hand).
    #[arg(long)]
    instance: PathBuf,
    /// Estimator: d-efl | p-efl | ip-efl | id-td.
    #[arg(long)]
    estimator: String,
    /// Proxy offset parameter for p-efl.
    #[arg(long, default_value_t = 0.0)]
    u: f64,
    /// Iteration count for ip-efl / id-td.
    #[arg(long, default_value_t = 8)]
    iterations: usize,
    /// Base aggregation rule for d-efl on rankings.
    #[arg(long)]
    rule: Option<String>,
    /// Seed for tie-breaking paths.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output fault CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AggregateArgs {
    /// Instance file.
    #[arg(long)]
    instance: PathBuf,
    /// Method: ua | oa | d-td | p-td | id-td | ip-td.
    #[arg(long)]
    method: String,
    /// Proxy offset parameter for p-td.
    #[arg(long, default_value_t = 0.0)]
    u: f64,
    /// Iteration count for the iterative methods.
    #[arg(long, default_value_t = 8)]
    iterations: usize,
    /// Aggregation rule (defaults to mean/plurality; required for rankings).
    #[arg(long)]
    rule: Option<String>,
    /// Seed (required: tie-breaking is stochastic).
    #[arg(long)]
    seed: u64,
    /// Output result CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for heatmap.csv, bars.csv, runs.csv.
    #[arg(long)]
    out: PathBuf,
    /// Cap the worker thread count.
    #[arg(long)]
    threads: Option<usize>,
    /// Validate and print the plan without running.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct ValidateArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .init();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Estimate(args) => estimate(args),
        Command::Aggregate(args) => aggregate(args),
        Command::Experiment(args) => experiment(args),
        Command::Validate(args) => validate(args),
    }
}

fn parse_proto(proto: &str, clip: Option<&str>) -> anyhow::Result<ProtoSpec> {
    let (kind, params) = proto
        .split_once(':')
        .with_context(|| format!("proto `{proto}` is not of the form kind:params"))?;
    let nums: Vec<f64> = params
        .split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("bad proto parameter `{p}`")))
        .collect::<anyhow::Result<_>>()?;
    let arity = |want: usize| -> anyhow::Result<()> {
        if nums.len() == want {
            Ok(())
        } else {
            bail!("proto `{kind}` takes {want} parameters, got {}", nums.len())
        }
    };
    let shape = match kind {
        "point" => {
            arity(1)?;
            ProtoShapeSpec::PointMass { value: nums[0] }
        }
        "normal" => {
            arity(2)?;
            ProtoShapeSpec::Normal { mean: nums[0], sd: nums[1] }
        }
        "uniform" => {
            arity(2)?;
            ProtoShapeSpec::Uniform { lo: nums[0], hi: nums[1] }
        }
        "triangular" => {
            arity(3)?;
            ProtoShapeSpec::Triangular { lo: nums[0], mode: nums[1], hi: nums[2] }
        }
        "bimodal" => {
            arity(3)?;
            ProtoShapeSpec::Bimodal { low: nums[0], high: nums[1], prob_low: nums[2] }
        }
        other => bail!("unknown proto kind `{other}`"),
    };
    let clip = clip
        .map(|c| -> anyhow::Result<(f64, f64)> {
            let (lo, hi) =
                c.split_once(',').with_context(|| format!("clip `{c}` is not lo,hi"))?;
            let parse = |s: &str| -> anyhow::Result<f64> {
                match s.trim() {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    v => v.parse().with_context(|| format!("bad clip bound `{v}`")),
                }
            };
            Ok((parse(lo)?, parse(hi)?))
        })
        .transpose()?;
    Ok(ProtoSpec { shape, clip })
}

fn generate(args: GenerateArgs) -> anyhow::Result<()> {
    let kind = match args.model.as_str() {
        "inn" => NoiseKind::Inn,
        "ier" => NoiseKind::Ier,
        "icn" => NoiseKind::Icn,
        "mallows" => NoiseKind::Mallows,
        other => bail!("unknown model `{other}` (expected inn | ier | icn | mallows)"),
    };
    let truth = match args.truth.as_str() {
        "default" => TruthPolicy::Default,
        "uniform" => TruthPolicy::Uniform,
        other => bail!("unknown truth policy `{other}`"),
    };
    let spec = NoiseModelSpec {
        kind,
        questions: args.m,
        candidates: args.c,
        categories: args.k,
        proto: parse_proto(&args.proto, args.clip.as_deref())?,
        truth,
    };
    let instance = spec.generate(args.n, args.seed)?;
    save_instance(&instance, Some(args.seed), &args.out)?;
    let faults = instance.true_faults().expect("generated instances carry faults");
    let mean_fault = faults.iter().sum::<f64>() / faults.len() as f64;
    println!(
        "wrote {}: model={} domain={} n={} {}={} seed={} mean-fault={mean_fault:.4}",
        args.out.display(),
        args.model,
        instance.domain(),
        instance.n(),
        if instance.candidates().is_some() { "c" } else { "m" },
        instance.width(),
        args.seed,
    );
    Ok(())
}

fn resolve_rule(
    rule: Option<&str>,
    domain: Domain,
    needed_for: &str,
) -> anyhow::Result<RuleId> {
    match rule {
        Some(r) => {
            let rule = RuleId::from_id(r)?;
            if rule.domain() != domain {
                bail!("rule `{r}` does not fit the {domain} domain");
            }
            Ok(rule)
        }
        None => RuleId::default_for(domain)
            .with_context(|| format!("{needed_for} needs --rule in the ranking domain")),
    }
}

fn estimate(args: EstimateArgs) -> anyhow::Result<()> {
    let instance = load_instance(&args.instance)?;
    let estimator = EstimatorKind::from_id(&args.estimator)?;
    let fe: FaultEstimate<f64> = match estimator {
        EstimatorKind::DEfl => {
            let rule = resolve_rule(args.rule.as_deref(), instance.domain(), "d-efl")?;
            d_efl(&instance, rule, args.seed)?
        }
        EstimatorKind::PEfl => p_efl(&instance, args.u)?,
        EstimatorKind::IpEfl => {
            ip_efl(&instance, &EstimatorConfig::default().with_iterations(args.iterations))?
        }
        EstimatorKind::IdTd => {
            let cfg = EstimatorConfig::default().with_iterations(args.iterations);
            id_td_estimate(&instance, &cfg, args.seed)?.faults
        }
    };

    let empirical = instance.truth().map(|_| empirical_faults(&instance)).transpose()?;
    let mut out = String::from("# proxy-td faults v1\n");
    let _ = writeln!(
        out,
        "worker_id,f_hat,estimator,u,T{}",
        if empirical.is_some() { ",empirical" } else { "" }
    );
    for (i, f) in fe.values.iter().enumerate() {
        let u = fe.u.map(|u| u.to_string()).unwrap_or_default();
        let t = fe.iterations.map(|t| t.to_string()).unwrap_or_default();
        let emp = empirical
            .as_ref()
            .map(|e| format!(",{}", format_float(e[i])))
            .unwrap_or_default();
        let _ = writeln!(out, "w{i},{},{},{u},{t}{emp}", format_float(*f), fe.estimator.id());
    }
    fs::write(&args.out, out)?;
    println!(
        "wrote {}: estimator={} workers={}{}",
        args.out.display(),
        fe.estimator.id(),
        fe.values.len(),
        if fe.uniform_fallbacks > 0 {
            format!(" uniform-fallbacks={}", fe.uniform_fallbacks)
        } else {
            String::new()
        }
    );
    Ok(())
}

fn describe_answer(answer: &Answer<f64>) -> String {
    match answer {
        Answer::Continuous(a) => {
            let vals: Vec<String> = a.values().iter().take(8).map(|v| format!("{v:.4}")).collect();
            let ellipsis = if a.len() > 8 { ", .." } else { "" };
            format!("[{}{}]", vals.join(", "), ellipsis)
        }
        Answer::Categorical(a) => {
            let vals: Vec<String> = a.labels().iter().take(16).map(usize::to_string).collect();
            let ellipsis = if a.len() > 16 { ", .." } else { "" };
            format!("[{}{}]", vals.join(", "), ellipsis)
        }
        Answer::Ranking(r) => ranking_to_string(r),
    }
}

fn aggregate(args: AggregateArgs) -> anyhow::Result<()> {
    let instance: Instance<f64> = load_instance(&args.instance)?;
    let method = Method::from_id(&args.method)?;
    let rule = resolve_rule(args.rule.as_deref(), instance.domain(), "aggregate")?;
    let spec = MethodSpec::<f64> {
        method,
        u: args.u,
        iterations: args.iterations,
        rule,
        seed: args.seed,
    };
    let result = run_method(&instance, &spec)?;

    let mut out = String::from("# proxy-td result v1\n");
    out.push_str("method,u,T,rule,n,m_or_c,error,seed\n");
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        method.id(),
        args.u,
        args.iterations,
        rule.id(),
        instance.n(),
        instance.width(),
        result.error.map(format_float).unwrap_or_default(),
        args.seed
    );
    fs::write(&args.out, out)?;

    println!("estimate: {}", describe_answer(&result.estimate));
    match result.error {
        Some(e) => println!("error vs truth: {e:.6}"),
        None => println!("error vs truth: n/a (instance has no ground truth)"),
    }
    println!("wrote {}", args.out.display());
    Ok(())
}

fn load_config(path: &PathBuf) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    Ok(ExperimentConfig::from_json(&text)?)
}

fn report_problems(problems: &[String]) {
    eprintln!("config is invalid ({} problem(s)):", problems.len());
    for p in problems {
        eprintln!("  - {p}");
    }
}

fn experiment(args: ExperimentArgs) -> anyhow::Result<()> {
    let config = load_config(&args.config)?;
    let problems = config.problems();
    if !problems.is_empty() {
        report_problems(&problems);
        bail!("invalid config {}", args.config.display());
    }
    println!(
        "config OK: {} method(s), {} cell(s), {} replication(s), master seed {}",
        config.methods.len(),
        config.grid.len(),
        config.replications,
        config.master_seed
    );
    if args.dry_run {
        println!("dry run: not executing");
        return Ok(());
    }
    let grid = run_grid(&config, args.threads)?;
    emit_reports(&grid, &args.out)?;
    for cell in &grid.cells {
        let mut line = format!("cell n={} m={}:", cell.cell.n, cell.cell.m);
        for stat in &cell.stats {
            let _ = write!(line, " {}={:.4}", stat.method, stat.mean_error);
        }
        for ratio in &cell.ratios {
            let _ = write!(
                line,
                " [{}/{} {} {}]",
                ratio.method_a,
                ratio.method_b,
                ratio.ratio.map(|r| format!("{r:.3}")).unwrap_or_else(|| "-".into()),
                ratio.flag.as_str()
            );
        }
        println!("{line}");
    }
    println!("wrote {}/{{heatmap,bars,runs}}.csv", args.out.display());
    Ok(())
}

fn validate(args: ValidateArgs) -> anyhow::Result<()> {
    let config = load_config(&args.config)?;
    let problems = config.problems();
    if problems.is_empty() {
        println!("config OK: {}", args.config.display());
        Ok(())
    } else {
        report_problems(&problems);
        bail!("invalid config {}", args.config.display());
    }
}
