use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use probalign::align::{Heuristic, SearchBudget, SearchOptions, DEFAULT_MAX_EXPANSIONS};
use probalign::experiment::{self, Algorithm};
use probalign::io::{self, AlignmentDocument, CaseResult, GroundTruthDocument, ReadOptions, ReportRow};
use probalign::noise::{self, GroundTruth, NoiseConfig};
use probalign::petri::PetriNet;
use probalign::problog::{ProbEventLog, ProbTrace};
use probalign::synth;
use probalign::{Error, Result};

#[derive(Parser)]
#[command(name = "probalign", version, about = "Conformance checking of probabilistic event logs")]
struct Cli {
    /// Worker threads; defaults to PROBALIGN_THREADS, then to the number of CPUs.
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    threads: Option<u32>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Align every case of a log against a model.
    Align(AlignArgs),
    /// Turn a deterministic log into a probabilistic one plus ground truth.
    Gen(GenArgs),
    /// Score deviation detection of the three presets against ground truth.
    Detect(DetectArgs),
    /// Detection quality over a grid of epsilon or T_d values.
    Sweep(SweepArgs),
    /// Time the unit-cost and probabilistic variants case by case.
    Bench(BenchArgs),
    /// Write a random block-structured model and conforming traces.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum CostArg {
    /// Unit costs on the most probable activity per event.
    Standard,
    /// Log-probability costs with trust threshold --epsilon.
    Weighted,
}

#[derive(Clone, Copy, ValueEnum)]
enum HeuristicArg {
    Zero,
    Remaining,
}

#[derive(Args)]
struct SearchArgs {
    /// Expansion budget per case.
    #[arg(long, default_value_t = DEFAULT_MAX_EXPANSIONS)]
    max_expansions: u64,
    /// Wall-clock limit per case in milliseconds.
    #[arg(long)]
    time_limit_ms: Option<u64>,
    /// Lower bound guiding the search; `remaining` charges the cheapest move per unread event.
    #[arg(long, value_enum, default_value = "zero")]
    heuristic: HeuristicArg,
}

impl SearchArgs {
    fn options(&self) -> SearchOptions {
        SearchOptions {
            budget: SearchBudget {
                max_expansions: self.max_expansions,
                time_limit: self.time_limit_ms.map(Duration::from_millis),
            },
            heuristic: match self.heuristic {
                HeuristicArg::Zero => Heuristic::Zero,
                HeuristicArg::Remaining => Heuristic::RemainingEvents,
            },
        }
    }
}

#[derive(Args)]
struct LogArgs {
    /// Process model in PNML.
    #[arg(long)]
    model: PathBuf,
    /// Probabilistic log: .json, a per-case .csv, or a directory of .csv files.
    #[arg(long)]
    log: PathBuf,
    /// Rescale events whose probabilities do not sum to 1.
    #[arg(long)]
    renormalize: bool,
}

impl LogArgs {
    fn load(&self) -> Result<(PetriNet, ProbEventLog)> {
        let model = io::read_pnml_file(&self.model)?;
        let opts = ReadOptions { renormalize: self.renormalize, ..ReadOptions::default() };
        Ok((model, io::read_prob_log_path(&self.log, &opts)?))
    }
}

#[derive(Args)]
struct AlignArgs {
    #[command(flatten)]
    input: LogArgs,
    #[arg(long, value_enum, default_value = "weighted")]
    cost: CostArg,
    /// Trust threshold in [1e-6, 1 - 1e-6].
    #[arg(long)]
    epsilon: Option<f64>,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Deterministic log (.json, one activity with probability 1 per event).
    #[arg(long)]
    log: PathBuf,
    /// Share of events whose original activity keeps probability above 0.5.
    #[arg(long)]
    p_h: f64,
    /// Seed of the random generator.
    #[arg(long)]
    seed: u64,
    /// Deviation threshold on the odds of the original activity.
    #[arg(long)]
    t_d: f64,
    /// Also draw alternatives from the activities of this model.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TruthArgs {
    #[command(flatten)]
    input: LogArgs,
    /// Ground-truth sidecar (.gt.json) of the log.
    #[arg(long)]
    truth: PathBuf,
    /// Write measured seconds into runtime_s instead of 0.
    #[arg(long)]
    record_timing: bool,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    common: TruthArgs,
    /// Trust threshold of the probcost preset; defaults to T_d.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Relabel the ground truth with this threshold.
    #[arg(long)]
    t_d: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: TruthArgs,
    /// start:stop:step; values above 1 - 1e-6 are capped.
    #[arg(long, conflicts_with = "t_d_grid", required_unless_present = "t_d_grid")]
    epsilon_grid: Option<String>,
    /// start:stop:step within [0, 1]; probcost runs with epsilon = T_d.
    #[arg(long)]
    t_d_grid: Option<String>,
    /// T_d for an epsilon sweep; defaults to the sidecar value.
    #[arg(long)]
    t_d: Option<f64>,
    /// Also write a gnuplot script next to the CSV.
    #[arg(long)]
    gnuplot: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: LogArgs,
    /// Trust threshold of the probcost variant.
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[command(flatten)]
    search: SearchArgs,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of distinct activities in the model.
    #[arg(long, default_value_t = 20)]
    activities: usize,
    /// Number of traces to play out.
    #[arg(long, default_value_t = 100)]
    traces: usize,
    /// Seed of the random generator.
    #[arg(long)]
    seed: u64,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    kind: &'a str,
    message: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Align(a) = &cli.command {
        if matches!(a.cost, CostArg::Weighted) && a.epsilon.is_none() {
            Cli::command()
                .error(ErrorKind::MissingRequiredArgument, "--cost weighted needs --epsilon <EPSILON>")
                .exit();
        }
    }
    let threads = match worker_count(cli.threads) {
        Ok(n) => n,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(2);
        }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli.command)),
        Err(e) => Err(Error::InvalidInput(e.to_string())),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let report = ErrorReport { kind: e.kind(), message: e.to_string() };
            eprintln!("{}", serde_json::to_string(&report).expect("error reports serialize"));
            ExitCode::from(1)
        }
    }
}

fn worker_count(flag: Option<u32>) -> std::result::Result<usize, String> {
    if let Some(n) = flag {
        return Ok(n as usize);
    }
    match std::env::var("PROBALIGN_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(format!("PROBALIGN_THREADS must be a positive integer, got `{v}`")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Align(a) => cmd_align(a),
        Command::Gen(a) => cmd_gen(a).map(|_| ExitCode::SUCCESS),
        Command::Detect(a) => cmd_detect(a).map(|_| ExitCode::SUCCESS),
        Command::Sweep(a) => cmd_sweep(a).map(|_| ExitCode::SUCCESS),
        Command::Bench(a) => cmd_bench(a).map(|_| ExitCode::SUCCESS),
        Command::Synth(a) => cmd_synth(a).map(|_| ExitCode::SUCCESS),
    }
}

/// File name up to the first dot.
fn stem(path: &Path) -> String {
    io::case_id_from_path(path).unwrap_or_else(|_| "log".to_string())
}

fn write_out(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, contents)?;
    Ok(path)
}

fn cmd_align(args: AlignArgs) -> Result<ExitCode> {
    let (model, log) = args.input.load()?;
    let algorithm = match args.cost {
        CostArg::Standard => Algorithm::Standard,
        CostArg::Weighted => Algorithm::ProbCost { epsilon: args.epsilon.expect("checked in main") },
    };
    let cf = algorithm.cost_function()?;
    let outcomes = experiment::run_suite(&model, &log.traces, algorithm, &args.search.options());
    let cases = outcomes
        .into_iter()
        .map(|o| match o.result {
            Ok(a) => CaseResult::from_alignment(o.case_id, &a),
            Err(e) => Ok(CaseResult::failed(o.case_id, &e)),
        })
        .collect::<Result<Vec<_>>>()?;
    let doc = AlignmentDocument::new(algorithm.name(), cf, cases);
    let path = write_out(
        &args.out,
        &format!("{}.align.json", stem(&args.input.log)),
        &io::write_alignment_document(&doc),
    )?;
    let failed = doc.failures();
    println!("aligned {} of {} cases -> {}", doc.cases.len() - failed, doc.cases.len(), path.display());
    if failed > 0 {
        for c in doc.cases.iter().filter(|c| !c.is_ok()) {
            if let CaseResult::Error { case_id, error } = c {
                eprintln!(
                    "{}",
                    serde_json::json!({"case_id": case_id, "kind": error.kind, "message": error.message})
                );
            }
        }
        return Ok(ExitCode::from(1));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    if !(0.0..=1.0).contains(&args.t_d) {
        return Err(Error::InvalidInput(format!("t_d {} is outside [0, 1]", args.t_d)));
    }
    let originals = io::read_det_log_json(&std::fs::read(&args.log)?)?;
    let mut universe: std::collections::BTreeSet<_> =
        originals.iter().flat_map(|t| t.activities().iter().cloned()).collect();
    if let Some(m) = &args.model {
        universe.extend(io::read_pnml_file(m)?.activities());
    }
    let cfg = NoiseConfig::new(args.p_h, args.seed, universe)?;
    let generated = noise::inject_log(&originals, &cfg)?;
    let traces: Vec<ProbTrace> = generated.iter().map(|(t, _)| t.clone()).collect();
    let truth: Vec<GroundTruth> = generated
        .iter()
        .zip(&originals)
        .map(|((_, raw), o)| noise::label_ground_truth(o.case_id.clone(), raw, args.t_d))
        .collect();
    let name = stem(&args.log);
    let log_path = write_out(&args.out, &format!("{name}.problog.json"), &io::write_traces_json(&traces))?;
    let doc = GroundTruthDocument::new(args.p_h, args.seed, args.t_d, truth);
    let gt_path = write_out(&args.out, &format!("{name}.gt.json"), &io::write_ground_truth(&doc))?;
    println!("wrote {} and {}", log_path.display(), gt_path.display());
    Ok(())
}

/// Ground truth ordered like the log's cases.
fn load_truth(path: &Path, log: &ProbEventLog) -> Result<(GroundTruthDocument, Vec<GroundTruth>)> {
    let doc = io::read_ground_truth(&std::fs::read(path)?)?;
    let cases = log
        .traces
        .iter()
        .map(|t| {
            let gt = doc
                .case(&t.case_id)
                .ok_or_else(|| Error::InvalidInput(format!("no ground truth for case `{}`", t.case_id)))?;
            if gt.events.len() != t.len() {
                return Err(Error::LengthMismatch { left: t.len(), right: gt.events.len() });
            }
            Ok(gt.clone())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((doc, cases))
}

fn finish_rows(mut rows: Vec<ReportRow>, record_timing: bool) -> Vec<ReportRow> {
    if !record_timing {
        for r in &mut rows {
            r.runtime_s = 0.0;
        }
    }
    rows
}

fn check_t_d(t_d: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&t_d) {
        Ok(t_d)
    } else {
        Err(Error::InvalidInput(format!("t_d {t_d} is outside [0, 1]")))
    }
}

fn cmd_detect(args: DetectArgs) -> Result<()> {
    let c = &args.common;
    let (model, log) = c.input.load()?;
    let (doc, truth) = load_truth(&c.truth, &log)?;
    let t_d = check_t_d(args.t_d.unwrap_or(doc.t_d))?;
    let truth: Vec<GroundTruth> = truth.iter().map(|g| g.relabelled(t_d)).collect();
    let epsilon = args.epsilon.unwrap_or(t_d.clamp(1e-6, 1.0 - 1e-6));
    let options = c.search.options();
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for alg in [Algorithm::Standard, Algorithm::ProbCost { epsilon }, Algorithm::LowerTrust] {
        let r = experiment::detect(&model, &log.traces, &truth, t_d, alg, &options)?;
        summary.push(serde_json::json!({
            "algorithm": alg.name(),
            "epsilon": alg.epsilon(),
            "t_d": t_d,
            "report": r.report,
        }));
        rows.push(r.row);
    }
    let rows = finish_rows(rows, c.record_timing);
    let csv = io::write_report_csv(&rows);
    write_out(&c.out, "detect.report.csv", &csv)?;
    let mut json = serde_json::to_string_pretty(&summary)?;
    json.push('\n');
    write_out(&c.out, "detect.report.json", &json)?;
    print!("{csv}");
    Ok(())
}

fn parse_grid(raw: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = raw.split(':').collect();
    let bad = || Error::InvalidInput(format!("grid `{raw}` must be start:stop:step"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums =
        parts.iter().map(|p| p.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
    Ok((nums[0], nums[1], nums[2]))
}

fn gnuplot_script(csv_name: &str, x: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set xlabel '{x}'");
    let _ = writeln!(s, "set ylabel 'G-mean'");
    let _ = writeln!(s, "set yrange [0:1]");
    let _ = writeln!(s, "set terminal pngcairo size 800,500");
    let _ = writeln!(s, "set output 'sweep.png'");
    // lowertrust rows keep their own ε, so an ε axis has no place for them
    let (col, algs) =
        if x == "epsilon" { (1, "standard probcost") } else { (2, "standard probcost lowertrust") };
    let _ = writeln!(
        s,
        "plot for [alg in '{algs}'] '{csv_name}' \
         using {col}:(strcol(3) eq alg ? $8 : 1/0) with linespoints title alg"
    );
    s
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let c = &args.common;
    let (model, log) = c.input.load()?;
    let (doc, truth) = load_truth(&c.truth, &log)?;
    let options = c.search.options();
    let (rows, axis) = if let Some(raw) = &args.epsilon_grid {
        let (a, b, s) = parse_grid(raw)?;
        if a <= 0.0 || b > 1.0 {
            return Err(Error::InvalidInput(format!("epsilon grid `{raw}` must lie in (0, 1]")));
        }
        let grid = experiment::epsilon_grid(a, b, s)?;
        let t_d = check_t_d(args.t_d.unwrap_or(doc.t_d))?;
        (experiment::sweep_epsilon(&model, &log.traces, &truth, t_d, &grid, &options)?, "epsilon")
    } else {
        let raw = args.t_d_grid.as_deref().expect("clap enforces one grid");
        let (a, b, s) = parse_grid(raw)?;
        let grid = experiment::linear_grid(a, b, s)?;
        (experiment::sweep_t_d(&model, &log.traces, &truth, &grid, &options)?, "t_d")
    };
    let rows = finish_rows(rows, c.record_timing);
    let csv = io::write_report_csv(&rows);
    write_out(&c.out, "sweep.report.csv", &csv)?;
    if args.gnuplot {
        write_out(&c.out, "sweep.gp", &gnuplot_script("sweep.report.csv", axis))?;
    }
    print!("{csv}");
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let (model, log) = args.input.load()?;
    let report = experiment::bench(&model, &log.traces, args.epsilon, &args.search.options())?;
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_out(&args.out, "bench.json", &json)?;
    println!(
        "cases {}  events min {} max {} avg {:.2} median {:.1}  model places {} transitions {}",
        report.cases,
        report.events_min,
        report.events_max,
        report.events_avg,
        report.events_median,
        report.model_places,
        report.model_transitions
    );
    println!(
        "{:<10} {:>8} {:>12} {:>14} {:>14} {:>12} {:>9}",
        "algorithm", "epsilon", "total_s", "mean_case_s", "median_case_s", "max_expanded", "failures"
    );
    for v in &report.variants {
        println!(
            "{:<10} {:>8} {:>12.6} {:>14.6} {:>14.6} {:>12} {:>9}",
            v.algorithm,
            v.epsilon.map_or("-".to_string(), |e| format!("{e}")),
            v.total_s,
            v.mean_case_s,
            v.median_case_s,
            v.max_expanded,
            v.failures
        );
    }
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<()> {
    if args.activities == 0 || args.traces == 0 {
        return Err(Error::InvalidInput("--activities and --traces must be positive".into()));
    }
    let tree = synth::random_model(args.seed, args.activities);
    let net = tree.to_petri_net("synthetic");
    let traces = synth::playout(&tree, args.traces, args.seed)?;
    let m = write_out(&args.out, "model.pnml", &io::write_pnml(&net))?;
    let l = write_out(&args.out, "traces.json", &io::write_det_log_json(&traces))?;
    println!("wrote {} and {}", m.display(), l.display());
    Ok(())
}
