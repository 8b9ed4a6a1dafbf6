mod settings;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use ocrkit_core::curation::{qc_check, select_for_review, QcFinding, Severity};
use ocrkit_core::metrics::{aggregate_report, TokenMode, TokenizationPolicy};
use ocrkit_eval::{
    fetch_predictions, load_manifest, parse_scores, render_report, run_eval, write_outputs, ConditionKind, Endpoint,
    EndpointConfig, EvalCondition, EvalReport, PredictionSource, ReportFormat,
};
use ocrkit_synth::{generate_corpus, GenerationConfig};

use settings::Settings;

#[derive(Debug, Parser)]
#[command(name = "ocrkit", version, about = "Synthetic OCR corpora, quality control and benchmark scoring")]
struct Cli {
    /// TOML config file shared by all verbs.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides `corpus.master_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Render a synthetic corpus with paired ground truth.
    Generate {
        /// Overrides `corpus.count`.
        #[arg(long)]
        count: Option<usize>,
    },
    /// Check annotations against their anchor text; write findings and
    /// review/drop lists.
    Qc {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Score predictions against a corpus.
    Eval(EvalArgs),
    /// Re-render report.md and report.json from scores.jsonl.
    Report {
        #[arg(long)]
        scores: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory of `<id>.pred.txt` files.
    #[arg(long, conflicts_with = "endpoint")]
    predictions: Option<PathBuf>,
    /// Model server URL; other endpoint settings come from `[eval.endpoint]`.
    #[arg(long)]
    endpoint: Option<String>,
    /// with_metadata | image_only
    #[arg(long)]
    condition: Option<ConditionKind>,
    /// script_aware | whitespace | grapheme
    #[arg(long)]
    tokenization: Option<TokenMode>,
    #[arg(long)]
    lowercase: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("warning: --jobs ignored: {e}");
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let settings = Settings::load(cli.config.as_deref())?;
    match cli.verb {
        Verb::Generate { count } => {
            let path = cli.config.as_deref().context("generate needs --config")?;
            let mut cfg = GenerationConfig::load(path)?;
            if let Some(seed) = cli.seed {
                cfg.set_master_seed(seed);
            }
            if let Some(n) = count {
                cfg.set_count(n)?;
            }
            cfg.jobs = cli.jobs;
            let out = cli.out.unwrap_or_else(|| PathBuf::from("corpus"));
            let manifest = generate_corpus(&cfg, &out)?;
            println!(
                "wrote {} samples ({} failed) to {}",
                manifest.entries.len(),
                manifest.failed_count(),
                out.display()
            );
            Ok(())
        }
        Verb::Qc { manifest, budget } => qc(&settings, &manifest, budget, cli.out),
        Verb::Eval(args) => eval(&settings, cli.config.as_deref(), args, cli.out),
        Verb::Report { scores } => report(scores, cli.out),
    }
}

fn manifest_root(manifest: &Path) -> PathBuf {
    manifest.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn qc(settings: &Settings, manifest_path: &Path, budget: Option<f64>, out: Option<PathBuf>) -> Result<()> {
    let manifest = load_manifest(manifest_path)?;
    let root = manifest_root(manifest_path);
    let out = out.unwrap_or_else(|| root.clone());
    let mut findings: BTreeMap<String, Vec<QcFinding>> = BTreeMap::new();
    for e in manifest.ok_entries() {
        let anchor = e
            .anchor_path
            .as_ref()
            .with_context(|| format!("sample {} has no anchor text to check against", e.id))?;
        let raw = std::fs::read_to_string(root.join(anchor))?;
        let gt = std::fs::read_to_string(root.join(&e.gt_path))?;
        findings.insert(e.id.clone(), qc_check(&e.id, &raw, &gt, &settings.qc.thresholds));
    }
    let selection = select_for_review(&findings, budget.unwrap_or(settings.qc.review_budget))?;
    std::fs::create_dir_all(&out)?;
    let mut lines = String::new();
    for f in findings.values().flatten() {
        lines.push_str(&serde_json::to_string(f)?);
        lines.push('\n');
    }
    std::fs::write(out.join("qc.jsonl"), lines)?;
    let list = |ids: &[String]| ids.iter().map(|i| format!("{i}\n")).collect::<String>();
    std::fs::write(out.join("review.txt"), list(&selection.review_ids))?;
    std::fs::write(out.join("drop.txt"), list(&selection.drop_ids))?;
    let fails = findings.values().flatten().filter(|f| f.severity == Severity::Fail).count();
    println!(
        "checked {} samples: {} fail findings, {} dropped, {} for review",
        findings.len(),
        fails,
        selection.drop_ids.len(),
        selection.review_ids.len()
    );
    Ok(())
}

fn eval(settings: &Settings, config: Option<&Path>, args: EvalArgs, out: Option<PathBuf>) -> Result<()> {
    let s = &settings.eval;
    let manifest = load_manifest(&args.manifest)?;
    let root = manifest_root(&args.manifest);
    let base = config.and_then(Path::parent).unwrap_or(Path::new("."));
    let source = match (args.predictions, args.endpoint) {
        (Some(dir), _) => PredictionSource::Directory(dir),
        (None, Some(url)) => {
            let mut cfg = s.endpoint.clone().unwrap_or_else(|| EndpointConfig::new(url.clone()));
            cfg.url = url;
            PredictionSource::Endpoint(Endpoint::from_config(cfg, base)?)
        }
        (None, None) => match (&s.predictions, &s.endpoint) {
            (Some(dir), None) => PredictionSource::Directory(base.join(dir)),
            (None, Some(cfg)) => PredictionSource::Endpoint(Endpoint::from_config(cfg.clone(), base)?),
            (Some(_), Some(_)) => bail!("[eval] sets both predictions and endpoint; keep one"),
            (None, None) => bail!("no prediction source: pass --predictions or --endpoint"),
        },
    };
    let condition = EvalCondition::new(args.condition.unwrap_or(s.condition));
    let policy = TokenizationPolicy {
        mode: args.tokenization.unwrap_or(s.tokenization.mode),
        lowercase: args.lowercase || s.tokenization.lowercase,
    };
    let predictions = fetch_predictions(&manifest, &root, &source, &condition)?;
    let result = run_eval(&manifest, &root, &predictions, policy, &condition)?;
    let out = out.unwrap_or_else(|| PathBuf::from("eval_out"));
    write_outputs(&out, &result.records, &result.report)?;
    print!("{}", render_report(&result.report, ReportFormat::Markdown));
    Ok(())
}

fn report(scores: Option<PathBuf>, out: Option<PathBuf>) -> Result<()> {
    let dir = out.unwrap_or_else(|| PathBuf::from("eval_out"));
    let scores_path = scores.unwrap_or_else(|| dir.join("scores.jsonl"));
    let records = parse_scores(&std::fs::read_to_string(&scores_path).with_context(|| format!("reading {}", scores_path.display()))?)?;
    let previous: Option<EvalReport> = std::fs::read_to_string(dir.join("report.json"))
        .ok()
        .map(|t| serde_json::from_str(&t))
        .transpose()
        .context("parsing report.json")?;
    let policy = previous.as_ref().map(|p| p.metrics.policy).unwrap_or_default();
    let report = EvalReport {
        metrics: aggregate_report(&records, policy)?,
        condition: previous.as_ref().map_or(ConditionKind::ImageOnly, |p| p.condition),
        config_fingerprint: previous.as_ref().map(|p| p.config_fingerprint.clone()).unwrap_or_default(),
        scored: records.len(),
        flagged: previous.as_ref().map_or(0, |p| p.flagged),
        failed: previous.as_ref().map_or(0, |p| p.failed),
    };
    write_outputs(&dir, &records, &report)?;
    print!("{}", render_report(&report, ReportFormat::Markdown));
    Ok(())
}
