//! The `pathforge` command-line front end.
//!
//! Five subcommands expose the pipeline over files: `tree-validate`, `forge`,
//! `transform`, `run-scenario`, and `eval`. Every subcommand is a pure
//! function of its input files, flags, and seed — re-running writes
//! byte-identical outputs — and every output directory receives a
//! `config_snapshot.json` recording the fully resolved settings, which can be
//! replayed verbatim through `--config`.
//!
//! Exit codes: `0` success, `1` domain error (invalid tree, infeasible
//! transform, unknown scenario, empty score table), `2` I/O error. Setting
//! `PATHFORGE_NO_COLOR` (or giving it any value) disables ANSI styling on
//! terminal summaries.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::forge::{
    forge, read_samples_jsonl, read_training_jsonl, shuffle_answers, shuffle_paths,
    ForgeConfig, ForgeError, write_training_jsonl,
};
use crate::grpo::write_ledger_csv;
use crate::metrics::{auc, eer, hter, read_score_rows, MetricsError, ScoreRow, ScoredSet};
use crate::sampler::{Alpha, FlagScope, PathLimit, SamplerConfig};
use crate::svg::LineChart;
use crate::taxonomy::{load_tree_path, max_depth, TreeError};
use crate::toy::scenario::{
    run_scenario, write_accuracy_curve_csv, write_report_json, write_rl_steps_csv,
    write_sft_curve_csv, ScenarioConfig, ScenarioError, ScenarioKind,
};

/// Exit code for clean success.
pub const EXIT_OK: i32 = 0;
/// Exit code for domain errors: invalid inputs, infeasible requests.
pub const EXIT_DOMAIN: i32 = 1;
/// Exit code for I/O failures: missing files, unwritable outputs.
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "pathforge",
    version,
    about = "Reasoning-path augmentation, dataset transforms, a desk-scale SFT+GRPO lab, and anti-spoofing metrics"
)]
struct Cli {
    /// Base seed for every randomized operation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output directory (files are created inside it).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker-thread cap for parallel stages (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Replay a previously emitted config_snapshot.json; explicit flags
    /// override individual fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a reasoning-tree JSON file.
    TreeValidate(TreeValidateArgs),
    /// Sample reasoning paths for every manifest sample and write training
    /// records as JSON Lines.
    Forge(ForgeArgs),
    /// Apply a label-space transform to a training-record file.
    Transform(TransformArgs),
    /// Run one training scenario end to end and write its report files.
    RunScenario(RunScenarioArgs),
    /// Compute AUC / EER / HTER / accuracy over a score table.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
struct TreeValidateArgs {
    /// Tree JSON file.
    #[arg(long)]
    tree: PathBuf,
}

#[derive(Debug, Args)]
struct ForgeArgs {
    /// Tree JSON file.
    #[arg(long)]
    tree: Option<PathBuf>,
    /// Sample manifest (JSON Lines, one sample per line).
    #[arg(long)]
    manifest: Option<PathBuf>,
    /// Paths to sample per manifest entry (N).
    #[arg(long)]
    paths: Option<usize>,
    /// Length-budget ratio (integer, decimal, or fraction, e.g. "7/3").
    #[arg(long)]
    alpha: Option<Alpha>,
    /// Negative-clause interpretation: "per-path" or "global-literal".
    #[arg(long)]
    flag_scope: Option<String>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// Input training records (JSON Lines).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Transform to apply: "shuffle-answers" or "shuffle-paths".
    #[arg(long)]
    mode: Option<String>,
    /// For shuffle-answers: demand every record's answer value change.
    #[arg(long)]
    require_derangement: bool,
}

#[derive(Debug, Args)]
struct RunScenarioArgs {
    /// Scenario name (see `--scenario help` for the list).
    #[arg(long)]
    scenario: Option<String>,
    /// Also render SVG charts of the CSV curves.
    #[arg(long)]
    svg: bool,
    /// Training samples drawn from the synthetic world.
    #[arg(long)]
    train_samples: Option<usize>,
    /// Evaluation samples per split.
    #[arg(long)]
    eval_samples: Option<usize>,
    /// Paths per sample in augmented arms (N).
    #[arg(long)]
    paths: Option<usize>,
    /// Length-budget ratio for the path sampler.
    #[arg(long)]
    alpha: Option<Alpha>,
    /// Supervised steps.
    #[arg(long)]
    sft_steps: Option<usize>,
    /// Supervised learning rate.
    #[arg(long)]
    sft_lr: Option<f64>,
    /// Reinforcement steps.
    #[arg(long)]
    rl_steps: Option<usize>,
    /// Reinforcement learning rate.
    #[arg(long)]
    rl_lr: Option<f64>,
    /// Rollout group size (G).
    #[arg(long)]
    group_size: Option<usize>,
    /// PPO-style clip half-width (epsilon).
    #[arg(long)]
    eps_clip: Option<f64>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Score table CSV with columns sample_id,score,is_live,domain_tag.
    #[arg(long)]
    scores: Option<PathBuf>,
    /// Fixed accept-if-score-≥ threshold; defaults to each group's EER point.
    #[arg(long)]
    threshold: Option<f64>,
}

/// Parse `std::env::args`, run, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help/version are "successful" parse failures.
            let code = if err.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let _ = err.print();
            return code;
        }
    };
    run_parsed(cli)
}

/// Run with explicit argv (first element is the program name) — the test
/// entry point.
pub fn run_from<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => run_parsed(cli),
        Err(err) => {
            let code = if err.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
            let _ = err.print();
            code
        }
    }
}

fn run_parsed(cli: Cli) -> i32 {
    if cli.jobs > 0 {
        // Ignore a second initialization (tests run several commands in one
        // process); determinism never depends on the pool size.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    let result = match &cli.command {
        Command::TreeValidate(args) => cmd_tree_validate(args),
        Command::Forge(args) => cmd_forge(&cli, args),
        Command::Transform(args) => cmd_transform(&cli, args),
        Command::RunScenario(args) => cmd_run_scenario(&cli, args),
        Command::Eval(args) => cmd_eval(&cli, args),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            eprintln!("{}: {}", style("error", "31", color_enabled()), failure.message);
            failure.code
        }
    }
}

/// A failed run: what to print and how to exit.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn domain(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_DOMAIN, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Failure {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Failure {
        Failure::io(err.to_string())
    }
}

impl From<ForgeError> for Failure {
    fn from(err: ForgeError) -> Failure {
        match err {
            ForgeError::Io(io) => Failure::io(io.to_string()),
            other => Failure::domain(other.to_string()),
        }
    }
}

impl From<ScenarioError> for Failure {
    fn from(err: ScenarioError) -> Failure {
        Failure::domain(err.to_string())
    }
}

impl From<MetricsError> for Failure {
    fn from(err: MetricsError) -> Failure {
        Failure::domain(err.to_string())
    }
}

/// True unless `PATHFORGE_NO_COLOR` is set (to anything).
fn color_enabled() -> bool {
    std::env::var_os("PATHFORGE_NO_COLOR").is_none()
}

/// Wrap `text` in an ANSI style when color is on.
fn style(text: &str, code: &str, color: bool) -> String {
    if color {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))
}

fn out_dir(cli: &Cli) -> Result<PathBuf, Failure> {
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)
        .map_err(|e| Failure::io(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_snapshot<T: Serialize>(dir: &Path, snapshot: &T) -> Result<(), Failure> {
    let mut out = create(&dir.join("config_snapshot.json"))?;
    let text = serde_json::to_string_pretty(snapshot).expect("snapshots serialize");
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")?;
    Ok(())
}

fn load_config_file<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::domain(format!("malformed config {}: {e}", path.display())))
}

// ---------------------------------------------------------------------------
// tree-validate

fn cmd_tree_validate(args: &TreeValidateArgs) -> Result<i32, Failure> {
    match load_tree_path(&args.tree) {
        Ok(tree) => {
            println!(
                "{}: {} nodes, depth {}",
                style("valid", "32", color_enabled()),
                tree.len(),
                max_depth(&tree)
            );
            Ok(EXIT_OK)
        }
        Err(TreeError::Io(err)) => {
            Err(Failure::io(format!("{}: {err}", args.tree.display())))
        }
        Err(err) => {
            println!("{}: {err}", style("invalid", "31", color_enabled()));
            Ok(EXIT_DOMAIN)
        }
    }
}

// ---------------------------------------------------------------------------
// forge

/// Fully resolved forge settings, as written to the config snapshot.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct ForgeSnapshot {
    command: String,
    tree: PathBuf,
    manifest: PathBuf,
    paths: usize,
    alpha: Alpha,
    flag_scope: FlagScope,
    seed: u64,
}

fn parse_flag_scope(text: &str) -> Result<FlagScope, Failure> {
    match text {
        "per-path" => Ok(FlagScope::PerPath),
        "global-literal" => Ok(FlagScope::GlobalLiteral),
        other => Err(Failure::domain(format!(
            "unknown flag scope \"{other}\"; expected per-path or global-literal"
        ))),
    }
}

fn cmd_forge(cli: &Cli, args: &ForgeArgs) -> Result<i32, Failure> {
    let base: Option<ForgeSnapshot> =
        cli.config.as_deref().map(load_config_file).transpose()?;
    let tree_path = args
        .tree
        .clone()
        .or_else(|| base.as_ref().map(|b| b.tree.clone()))
        .ok_or_else(|| Failure::domain("--tree is required (or provide --config)"))?;
    let manifest_path = args
        .manifest
        .clone()
        .or_else(|| base.as_ref().map(|b| b.manifest.clone()))
        .ok_or_else(|| Failure::domain("--manifest is required (or provide --config)"))?;
    let snapshot = ForgeSnapshot {
        command: "forge".to_string(),
        tree: tree_path.clone(),
        manifest: manifest_path.clone(),
        paths: args.paths.or(base.as_ref().map(|b| b.paths)).unwrap_or(50),
        alpha: args.alpha.or(base.as_ref().map(|b| b.alpha)).unwrap_or_default(),
        flag_scope: match &args.flag_scope {
            Some(text) => parse_flag_scope(text)?,
            None => base.as_ref().map(|b| b.flag_scope).unwrap_or(FlagScope::PerPath),
        },
        seed: if cli.seed != 0 { cli.seed } else { base.as_ref().map_or(0, |b| b.seed) },
    };

    let tree = match load_tree_path(&tree_path) {
        Ok(tree) => tree,
        Err(TreeError::Io(err)) => {
            return Err(Failure::io(format!("{}: {err}", tree_path.display())))
        }
        Err(err) => return Err(Failure::domain(err.to_string())),
    };
    let samples = read_samples_jsonl(&mut open(&manifest_path)?)?;

    let report = forge(
        &tree,
        &samples,
        &ForgeConfig {
            seed: snapshot.seed,
            sampler: SamplerConfig {
                limit: PathLimit::Count(snapshot.paths),
                alpha: snapshot.alpha,
                seed: 0,
                flag_scope: snapshot.flag_scope,
            },
        },
    );

    let dir = out_dir(cli)?;
    write_snapshot(&dir, &snapshot)?;
    write_training_jsonl(&mut create(&dir.join("dataset.jsonl"))?, &report.records)?;

    #[derive(Serialize)]
    struct ForgeRunReport<'a> {
        records_written: usize,
        shortfalls: &'a [crate::forge::Shortfall],
        errors: &'a [crate::forge::ForgeFailure],
    }
    let run_report = ForgeRunReport {
        records_written: report.records.len(),
        shortfalls: &report.shortfalls,
        errors: &report.failures,
    };
    let mut out = create(&dir.join("forge_report.json"))?;
    out.write_all(serde_json::to_string_pretty(&run_report).expect("serializes").as_bytes())?;
    out.write_all(b"\n")?;

    println!(
        "forged {} records from {} samples ({} shortfalls, {} failures) -> {}",
        report.records.len(),
        samples.len(),
        report.shortfalls.len(),
        report.failures.len(),
        dir.join("dataset.jsonl").display()
    );
    // Only a run where every sample failed is a failed run; partial trouble
    // is data, recorded in the report.
    if !samples.is_empty() && report.failures.len() == samples.len() {
        return Err(Failure::domain("every manifest sample failed to forge"));
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// transform

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TransformSnapshot {
    command: String,
    input: PathBuf,
    mode: String,
    require_derangement: bool,
    seed: u64,
}

fn cmd_transform(cli: &Cli, args: &TransformArgs) -> Result<i32, Failure> {
    let base: Option<TransformSnapshot> =
        cli.config.as_deref().map(load_config_file).transpose()?;
    let input = args
        .input
        .clone()
        .or_else(|| base.as_ref().map(|b| b.input.clone()))
        .ok_or_else(|| Failure::domain("--input is required (or provide --config)"))?;
    let mode = args
        .mode
        .clone()
        .or_else(|| base.as_ref().map(|b| b.mode.clone()))
        .ok_or_else(|| Failure::domain("--mode is required (or provide --config)"))?;
    let snapshot = TransformSnapshot {
        command: "transform".to_string(),
        input: input.clone(),
        mode: mode.clone(),
        require_derangement: args.require_derangement
            || base.as_ref().is_some_and(|b| b.require_derangement),
        seed: if cli.seed != 0 { cli.seed } else { base.as_ref().map_or(0, |b| b.seed) },
    };

    let mut records = read_training_jsonl(&mut open(&input)?)?;
    match mode.as_str() {
        "shuffle-answers" => {
            shuffle_answers(&mut records, snapshot.seed, snapshot.require_derangement)?
        }
        "shuffle-paths" => shuffle_paths(&mut records, snapshot.seed),
        other => {
            return Err(Failure::domain(format!(
                "unknown transform \"{other}\"; expected shuffle-answers or shuffle-paths"
            )))
        }
    }

    let dir = out_dir(cli)?;
    write_snapshot(&dir, &snapshot)?;
    write_training_jsonl(&mut create(&dir.join("dataset.jsonl"))?, &records)?;
    println!(
        "transformed {} records ({mode}) -> {}",
        records.len(),
        dir.join("dataset.jsonl").display()
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// run-scenario

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ScenarioSnapshot {
    command: String,
    svg: bool,
    scenario_config: ScenarioConfig,
}

fn parse_scenario(name: &str) -> Result<ScenarioKind, Failure> {
    ScenarioKind::ALL
        .into_iter()
        .find(|k| k.name() == name)
        .ok_or_else(|| {
            let valid: Vec<&str> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
            Failure::domain(format!(
                "unknown scenario \"{name}\"; valid names: {}",
                valid.join(", ")
            ))
        })
}

fn cmd_run_scenario(cli: &Cli, args: &RunScenarioArgs) -> Result<i32, Failure> {
    let base: Option<ScenarioSnapshot> =
        cli.config.as_deref().map(load_config_file).transpose()?;

    let mut config = match (&args.scenario, base.as_ref()) {
        (Some(name), Some(snap)) => {
            let kind = parse_scenario(name)?;
            let mut config = snap.scenario_config.clone();
            config.kind = kind;
            config
        }
        (Some(name), None) => {
            let kind = parse_scenario(name)?;
            ScenarioConfig::for_kind(
                kind,
                cli.seed,
            )
        }
        (None, Some(snap)) => snap.scenario_config.clone(),
        (None, None) => {
            return Err(Failure::domain(
                "--scenario is required (or provide --config); valid names: \
                 raw_single_path, path_aug, path_aug_shuffle_answers, \
                 path_aug_shuffle_paths, rl_only",
            ))
        }
    };
    if cli.seed != 0 {
        config.seed = cli.seed;
    }
    if let Some(v) = args.train_samples {
        config.train_samples = v;
    }
    if let Some(v) = args.eval_samples {
        config.eval_samples = v;
    }
    if let Some(v) = args.paths {
        config.paths_per_sample = v;
    }
    if let Some(v) = args.alpha {
        config.alpha = v;
    }
    if let Some(v) = args.sft_steps {
        config.sft.steps = v;
    }
    if let Some(v) = args.sft_lr {
        config.sft.learning_rate = v;
    }
    if let Some(v) = args.rl_steps {
        config.rl.steps = v;
    }
    if let Some(v) = args.rl_lr {
        config.rl.learning_rate = v;
    }
    if let Some(v) = args.group_size {
        config.rl.group_size = v;
    }
    if let Some(v) = args.eps_clip {
        config.rl.eps_clip = v;
    }
    let snapshot = ScenarioSnapshot {
        command: "run-scenario".to_string(),
        svg: args.svg || base.as_ref().is_some_and(|b| b.svg),
        scenario_config: config.clone(),
    };

    let outcome = run_scenario(&config)?;
    let report = &outcome.report;

    let dir = out_dir(cli)?;
    write_snapshot(&dir, &snapshot)?;
    write_report_json(&mut create(&dir.join("report.json"))?, report)?;
    if let Some(sft) = &report.sft {
        write_sft_curve_csv(&mut create(&dir.join("sft_loss.csv"))?, &sft.loss_curve)?;
    }
    write_rl_steps_csv(&mut create(&dir.join("rl_steps.csv"))?, &report.rl.steps)?;
    write_ledger_csv(&mut create(&dir.join("rl_ledger.csv"))?, &report.rl.ledger)?;
    write_accuracy_curve_csv(
        &mut create(&dir.join("rl_accuracy.csv"))?,
        &report.rl.accuracy_curve,
    )?;

    if snapshot.svg {
        if let Some(sft) = &report.sft {
            LineChart::of_values("supervised loss", "step", "loss", "train", &sft.loss_curve)
                .write_svg(&mut create(&dir.join("sft_loss.svg"))?)?;
        }
        LineChart::new("clean accuracy during reinforcement", "step", "accuracy")
            .with_series(
                "accuracy",
                report.rl.accuracy_curve.iter().map(|p| (p.step as f64, p.accuracy)),
            )
            .write_svg(&mut create(&dir.join("rl_accuracy.svg"))?)?;
        LineChart::new("cumulative group effectiveness", "step", "groups")
            .with_series(
                "effective",
                report.rl.ledger.iter().map(|p| (p.step as f64, p.cumulative_effective as f64)),
            )
            .with_series(
                "ineffective",
                report
                    .rl
                    .ledger
                    .iter()
                    .map(|p| (p.step as f64, p.cumulative_ineffective as f64)),
            )
            .write_svg(&mut create(&dir.join("rl_ledger.svg"))?)?;
    }

    let color = color_enabled();
    println!(
        "{} scenario {} (seed {}) -> {}",
        style("finished", "32", color),
        report.scenario,
        report.seed,
        dir.display()
    );
    println!(
        "  clean accuracy {:.3}  shifted accuracy {:.3}  auc {:.3}  hter {:.3}  ineffective {}",
        report.final_eval.accuracy_clean,
        report.final_eval.accuracy_shifted,
        report.final_eval.auc_shifted,
        report.final_eval.hter_shifted,
        report.rl.ledger.last().map_or(0, |p| p.cumulative_ineffective),
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// eval

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EvalSnapshot {
    command: String,
    scores: PathBuf,
    threshold: Option<f64>,
}

/// Metrics for one domain tag (or the pooled table).
#[derive(Debug, Clone, Serialize)]
struct GroupMetrics {
    n: usize,
    auc: Option<f64>,
    eer: Option<f64>,
    hter: Option<f64>,
    accuracy: Option<f64>,
    threshold: Option<f64>,
    /// Why the threshold-based metrics are absent, when they are.
    undefined_reason: Option<String>,
}

fn group_metrics(rows: &[&ScoreRow], fixed_threshold: Option<f64>) -> GroupMetrics {
    let set = match ScoredSet::from_pairs(rows.iter().map(|r| (r.score, r.is_live))) {
        Ok(set) => set,
        Err(err) => {
            return GroupMetrics {
                n: rows.len(),
                auc: None,
                eer: None,
                hter: None,
                accuracy: None,
                threshold: None,
                undefined_reason: Some(err.to_string()),
            }
        }
    };
    if set.live.is_empty() || set.spoof.is_empty() {
        let missing = if set.live.is_empty() { "live" } else { "spoof" };
        return GroupMetrics {
            n: rows.len(),
            auc: None,
            eer: None,
            hter: None,
            accuracy: None,
            threshold: None,
            undefined_reason: Some(format!("no {missing} samples in the group")),
        };
    }
    let eer_point = eer(&set).expect("both classes present");
    let threshold = fixed_threshold.unwrap_or(eer_point.threshold);
    let hter_value = hter(&set, threshold).expect("both classes present");
    let correct = rows
        .iter()
        .filter(|r| (r.score >= threshold) == r.is_live)
        .count();
    GroupMetrics {
        n: rows.len(),
        auc: Some(auc(&set).expect("both classes present")),
        eer: Some(eer_point.eer),
        hter: Some(hter_value),
        accuracy: Some(correct as f64 / rows.len() as f64),
        threshold: Some(threshold),
        undefined_reason: None,
    }
}

fn cmd_eval(cli: &Cli, args: &EvalArgs) -> Result<i32, Failure> {
    let base: Option<EvalSnapshot> =
        cli.config.as_deref().map(load_config_file).transpose()?;
    let scores_path = args
        .scores
        .clone()
        .or_else(|| base.as_ref().map(|b| b.scores.clone()))
        .ok_or_else(|| Failure::domain("--scores is required (or provide --config)"))?;
    let threshold = args.threshold.or(base.as_ref().and_then(|b| b.threshold));

    let rows = read_score_rows(open(&scores_path)?)
        .map_err(|e| Failure::domain(format!("malformed score table: {e}")))?;
    if rows.is_empty() {
        return Err(Failure::domain("score table has no rows"));
    }

    let mut by_domain: BTreeMap<&str, Vec<&ScoreRow>> = BTreeMap::new();
    for row in &rows {
        by_domain.entry(row.domain_tag.as_str()).or_default().push(row);
    }
    let mut table: BTreeMap<String, GroupMetrics> = BTreeMap::new();
    for (tag, group) in &by_domain {
        table.insert((*tag).to_string(), group_metrics(group, threshold));
    }
    table.insert("overall".to_string(), group_metrics(&rows.iter().collect::<Vec<_>>(), threshold));

    let color = color_enabled();
    println!(
        "{:<12} {:>6} {:>8} {:>8} {:>8} {:>9}",
        style("domain", "1", color),
        "n",
        "auc",
        "eer",
        "hter",
        "accuracy"
    );
    for (tag, m) in &table {
        match (&m.undefined_reason, m.auc, m.eer, m.hter, m.accuracy) {
            (None, Some(auc), Some(eer), Some(hter), Some(acc)) => println!(
                "{tag:<12} {:>6} {auc:>8.4} {eer:>8.4} {hter:>8.4} {acc:>9.4}",
                m.n
            ),
            _ => println!(
                "{tag:<12} {:>6} {}",
                m.n,
                style(
                    &format!(
                        "undefined: {}",
                        m.undefined_reason.as_deref().unwrap_or("unknown")
                    ),
                    "33",
                    color
                )
            ),
        }
    }

    if cli.out.is_some() {
        let dir = out_dir(cli)?;
        write_snapshot(
            &dir,
            &EvalSnapshot {
                command: "eval".to_string(),
                scores: scores_path.clone(),
                threshold,
            },
        )?;
        let mut out = create(&dir.join("metrics.json"))?;
        out.write_all(serde_json::to_string_pretty(&table).expect("serializes").as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_names_parse_and_unknown_names_list_the_valid_set() {
        for kind in ScenarioKind::ALL {
            assert_eq!(parse_scenario(kind.name()).unwrap(), kind);
        }
        let err = parse_scenario("nope").unwrap_err();
        assert_eq!(err.code, EXIT_DOMAIN);
        for kind in ScenarioKind::ALL {
            assert!(err.message.contains(kind.name()), "{}", err.message);
        }
    }

    #[test]
    fn flag_scope_parsing_covers_both_scopes() {
        assert_eq!(parse_flag_scope("per-path").unwrap(), FlagScope::PerPath);
        assert_eq!(parse_flag_scope("global-literal").unwrap(), FlagScope::GlobalLiteral);
        assert!(parse_flag_scope("sideways").is_err());
    }

    #[test]
    fn styling_is_inert_without_color() {
        assert_eq!(style("x", "31", false), "x");
        assert_eq!(style("x", "31", true), "\x1b[31mx\x1b[0m");
    }
}
