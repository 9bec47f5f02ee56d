use std::io::{self, BufRead, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use patchsim_core::corpus::{self, VariantKind};
use patchsim_core::evaluation::AnnotationSet;
use patchsim_core::pipeline::{self, RunConfig, RunReport};
use patchsim_core::similarity::Metric;
use patchsim_core::tokenizer::tokenize;
use patchsim_core::EmbeddingConfig;

/// Rank plausible patches by embedding similarity and evaluate the rankings.
#[derive(Debug, Parser)]
#[command(name = "patchsim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every stage end to end.
    Pipeline(RunArgs),
    /// Validate the corpus and write out/corpus.json.
    Ingest(RunArgs),
    /// Print the tokens of a file (or stdin), one per line.
    Tokenize(TokenizeArgs),
    /// Train one model per bug into out/models/.
    Train(RunArgs),
    /// Rank variants with the saved models into out/rankings/.
    Rank(RunArgs),
    /// Score unannotated candidates of one bug interactively.
    Annotate(AnnotateArgs),
    /// Evaluate saved rankings against annotations into out/evals.json.
    Eval(RunArgs),
    /// Write out/ndcg.csv and out/charts/ from saved rankings and evaluations.
    Report(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, default_value_t = 256)]
    dim: usize,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 2)]
    min_count: usize,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    negative: usize,
    #[arg(long, default_value_t = corpus::DEFAULT_RADIUS)]
    radius: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = Metric::Cosmul)]
    metric: Metric,
    /// Extra .js files added to every bug's training documents.
    #[arg(long)]
    aux: Option<PathBuf>,
    #[arg(long)]
    nondeterministic_parallel: bool,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            corpus: self.corpus.clone(),
            out: self.out.clone(),
            embedding: EmbeddingConfig {
                dim: self.dim,
                window: self.window,
                min_count: self.min_count,
                epochs: self.epochs,
                negative_samples: self.negative,
                seed: self.seed,
                deterministic: !self.nondeterministic_parallel,
                ..EmbeddingConfig::default()
            },
            radius: self.radius,
            metric: self.metric,
            aux: self.aux.clone(),
            nondeterministic_parallel: self.nondeterministic_parallel,
        }
    }
}

#[derive(Debug, Args)]
struct TokenizeArgs {
    /// Source file; stdin when omitted.
    file: Option<PathBuf>,
    /// Tokenize only the snippet window centred on this 1-based line.
    #[arg(long)]
    line: Option<usize>,
    #[arg(long, default_value_t = corpus::DEFAULT_RADIUS)]
    radius: usize,
}

#[derive(Debug, Args)]
struct AnnotateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    bug: String,
    #[arg(long, default_value = "annotator")]
    annotator: String,
}

fn finish(report: RunReport) -> ExitCode {
    for notice in &report.notices {
        eprintln!("note: {notice}");
    }
    for (bug, err) in &report.failures {
        eprintln!("error: bug `{bug}`: {err}");
    }
    if report.is_clean() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn run_stage(
    args: &RunArgs,
    stage: impl FnOnce(&RunConfig, &corpus::CorpusManifest) -> anyhow::Result<RunReport>,
) -> anyhow::Result<ExitCode> {
    let cfg = args.config();
    cfg.validate()?;
    let (manifest, mut report) = pipeline::ingest(&cfg)?;
    let rest = stage(&cfg, &manifest)?;
    report.failures.extend(rest.failures);
    report.notices.extend(rest.notices);
    Ok(finish(report))
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Pipeline(args) => {
            let cfg = args.config();
            Ok(finish(pipeline::run_pipeline(&cfg)?))
        }
        Command::Ingest(args) => run_stage(&args, |_, manifest| {
            eprintln!(
                "{} bugs, {} candidates",
                manifest.bugs.len(),
                manifest.candidate_count()
            );
            Ok(RunReport::default())
        }),
        Command::Train(args) => run_stage(&args, |cfg, manifest| {
            pipeline::write_run_config(cfg)?;
            Ok(pipeline::train_stage(cfg, manifest)?.1)
        }),
        Command::Rank(args) => run_stage(&args, |cfg, manifest| {
            let (models, mut report) = pipeline::load_models(cfg, manifest);
            let (_, r) = pipeline::rank_stage(cfg, manifest, &models)?;
            report.failures.extend(r.failures);
            Ok(report)
        }),
        Command::Eval(args) => run_stage(&args, |cfg, manifest| {
            let (rankings, mut report) = pipeline::load_rankings(cfg, manifest);
            let (_, r) = pipeline::eval_stage(cfg, manifest, &rankings)?;
            report.failures.extend(r.failures);
            report.notices.extend(r.notices);
            Ok(report)
        }),
        Command::Report(args) => run_stage(&args, |cfg, manifest| {
            let (rankings, mut report) = pipeline::load_rankings(cfg, manifest);
            let evals = pipeline::load_evals(cfg)?;
            let r = pipeline::report_stage(cfg, manifest, rankings, evals)?;
            report.notices.extend(r.notices);
            Ok(report)
        }),
        Command::Tokenize(args) => {
            let text = match &args.file {
                Some(path) => std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            let text = match args.line {
                Some(line) => {
                    corpus::extract_snippet(&text, line, args.radius, "-", VariantKind::Original)?
                        .text
                }
                None => text,
            };
            for token in tokenize(&text) {
                println!("{token}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Annotate(args) => {
            let dir = args.corpus.join(&args.bug);
            if !dir.is_dir() {
                bail!("no bug directory {}", dir.display());
            }
            let bug = corpus::load_bug(&dir)?;
            let path = pipeline::annotations_path(&args.corpus, &bug.bug_id);
            let existing = match path.is_file() {
                true => Some(AnnotationSet::read_json(&path)?),
                false => None,
            };
            let stdin = io::stdin();
            let mut input = stdin.lock();
            let set = pipeline::annotate_bug(
                &bug,
                existing,
                &args.annotator,
                &mut input as &mut dyn BufRead,
                &mut io::stderr(),
            )?;
            set.write_json(&path)?;
            eprintln!("\nwrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.use_stderr() {
                true => ExitCode::from(1),
                false => ExitCode::SUCCESS,
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
