//! `bayeslex`: verbal explanations of Bayesian updates from the command line.

mod consult;
mod error;

use std::borrow::Cow;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use bayeslex::belief::{biased_estimate, DiagnosticUpdate, Polarity, Probability, TraceStep};
use bayeslex::corpus::{bundled_problems, evaluate_problem, interval_label, load_problems_file};
use bayeslex::kb::KnowledgeBase;
use bayeslex::lexicon::{validate_term_set, Lexicons, TermSetDocument};
use bayeslex::narrative::{NarrativeContext, Narrator, StepRendering};

use error::CliError;

#[derive(Parser)]
#[command(name = "bayeslex", version, about = "Explain Bayesian belief updates in words")]
struct Cli {
    /// Directory holding probability.json, change_increasing.json and
    /// change_decreasing.json, replacing the built-in vocabulary.
    #[arg(long, global = true, env = "BAYESLEX_LEXICON_DIR")]
    lexicon_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Explain one update from a prior, a hit rate and a false-alarm rate.
    Explain(ExplainArgs),
    /// Interactive consultation over a knowledge base.
    Consult {
        /// Knowledge base JSON; the bundled demo when omitted.
        #[arg(long)]
        kb: Option<PathBuf>,
    },
    /// Base-rate problem corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusCommand,
    },
    /// Term set files.
    Lexicon {
        #[command(subcommand)]
        action: LexiconCommand,
    },
    /// Start the HTTP service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        kb: Option<PathBuf>,
        /// Persist session logs here; in-memory only when omitted.
        #[arg(long)]
        data_dir: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CorpusCommand {
    /// Evaluate problems and compare normative and biased answers.
    Run {
        /// `bundled` or a path to a problems JSON file.
        #[arg(long, default_value = "bundled")]
        problems: String,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum LexiconCommand {
    /// Check a term set file and print the findings.
    Validate {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

/// Decimal in [0, 1]; percentages are rejected as ambiguous.
fn probability_arg(s: &str) -> Result<f64, String> {
    if s.contains('%') {
        return Err("write probabilities as decimals in [0, 1], not percentages".into());
    }
    let x: f64 = s.trim().parse().map_err(|e| format!("`{s}`: {e}"))?;
    Probability::new(x).map(Probability::value).map_err(|e| e.to_string())
}

#[derive(Args)]
struct ExplainArgs {
    /// P(H) before the evidence.
    #[arg(long, value_parser = probability_arg)]
    prior: f64,
    /// P(positive | H).
    #[arg(long, value_parser = probability_arg)]
    sens: f64,
    /// P(positive | not H).
    #[arg(long, value_parser = probability_arg)]
    fpr: f64,
    /// Observed outcome: positive or negative (also + or -).
    #[arg(long, default_value = "positive", allow_hyphen_values = true)]
    polarity: Polarity,
    /// Also show the answer that ignores the base rate.
    #[arg(long)]
    show_bias: bool,
    /// Print the structured rendering as JSON.
    #[arg(long)]
    json: bool,
    #[arg(long, default_value = "H is true")]
    hypothesis: String,
    #[arg(long, default_value = "the base rate")]
    basis: String,
    /// Reference class, e.g. "drug users".
    #[arg(long = "class", default_value = "cases where H is true")]
    class_name: String,
    /// Evidence description; defaults to "a positive result" or "a negative result".
    #[arg(long)]
    evidence: Option<String>,
}

#[derive(Serialize)]
struct BiasedAnswer {
    value: Probability,
    term: String,
}

#[derive(Serialize)]
struct ExplainOutput {
    prior: Probability,
    sens: Probability,
    fpr: Probability,
    polarity: Polarity,
    marginal: Probability,
    posterior: Probability,
    posterior_term: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    biased: Option<BiasedAnswer>,
    text: String,
    rendering: StepRendering,
}

fn explain(args: &ExplainArgs, lexicons: &Lexicons, out: &mut impl Write) -> Result<(), CliError> {
    let update = DiagnosticUpdate::new(args.prior, args.sens, args.fpr, args.polarity)?;
    let step = TraceStep::compute(update)?;
    let ctx = NarrativeContext::new(args.hypothesis.as_str(), args.basis.as_str(), args.class_name.as_str());
    let evidence: Cow<str> = match &args.evidence {
        Some(e) => e.into(),
        None => format!("a {} result", args.polarity.as_str()).into(),
    };
    let rendering = Narrator::new(lexicons).render_step(&step, &ctx, &evidence)?;
    let biased = args.show_bias.then(|| {
        let value = biased_estimate(&update);
        BiasedAnswer {
            value,
            term: lexicons.probability_term(value).phrase.clone(),
        }
    });
    let output = ExplainOutput {
        prior: update.prior,
        sens: update.p_e_given_h,
        fpr: update.p_e_given_not_h,
        polarity: update.polarity,
        marginal: step.marginal,
        posterior: step.posterior,
        posterior_term: rendering.posterior.term.clone(),
        biased,
        text: rendering.text(),
        rendering,
    };
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&output).expect("serializable"))?;
        return Ok(());
    }
    writeln!(out, "{}\n", output.text)?;
    writeln!(out, "posterior: {} ({})", output.posterior, output.posterior_term)?;
    if let Some(b) = &output.biased {
        writeln!(
            out,
            "ignoring the base rate: {} ({}); it would seem {} that {}.",
            b.value,
            b.term,
            lexicons.probability_term(b.value).noun_form,
            args.hypothesis
        )?;
    }
    Ok(())
}

fn corpus_run(source: &str, json: bool, lexicons: &Lexicons, out: &mut impl Write) -> Result<(), CliError> {
    let problems = match source {
        "bundled" => bundled_problems(),
        path => load_problems_file(Path::new(path))?,
    };
    let answers = problems
        .iter()
        .map(|p| evaluate_problem(p, lexicons).map(|a| (p, a)))
        .collect::<Result<Vec<_>, _>>()?;
    if json {
        #[derive(Serialize)]
        struct Row<'a> {
            id: &'a str,
            #[serde(flatten)]
            answer: &'a bayeslex::corpus::ProblemAnswer,
        }
        let rows: Vec<Row> = answers.iter().map(|(p, a)| Row { id: &p.id, answer: a }).collect();
        writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("serializable"))?;
        return Ok(());
    }
    writeln!(
        out,
        "{:<20} {:>10} {:>12} {:>10} {:>12}  differ",
        "problem", "normative", "interval", "biased", "interval"
    )?;
    for (p, a) in &answers {
        writeln!(
            out,
            "{:<20} {:>10.4} {:>12} {:>10.4} {:>12}  {}",
            p.id,
            a.normative.value(),
            format!("{} {}", a.normative_interval, interval_label(a.normative_interval)),
            a.biased.value(),
            format!("{} {}", a.biased_interval, interval_label(a.biased_interval)),
            if a.normative_interval != a.biased_interval {
                "yes"
            } else {
                "no"
            }
        )?;
    }
    Ok(())
}

fn lexicon_validate(file: &Path, json: bool, out: &mut impl Write) -> Result<(), CliError> {
    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::new("file_not_found", format!("{}: {e}", file.display())))?;
    let report = validate_term_set(&TermSetDocument::from_json(&text)?);
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("serializable"))?;
    } else {
        write!(out, "{report}")?;
    }
    if report.is_valid() {
        Ok(())
    } else {
        Err(CliError::new(
            "invalid_lexicon",
            format!("{} error(s) in {}", report.errors.len(), file.display()),
        ))
    }
}

fn load_kb(path: Option<&Path>) -> Result<KnowledgeBase, CliError> {
    Ok(match path {
        Some(p) => KnowledgeBase::load(p)?,
        None => KnowledgeBase::demo(),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let lexicons = match &cli.lexicon_dir {
        Some(dir) => Lexicons::load_dir(dir)?,
        None => Lexicons::builtin().clone(),
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Explain(args) => explain(&args, &lexicons, &mut out),
        Command::Consult { kb } => {
            let kb = load_kb(kb.as_deref())?;
            Ok(consult::run(&kb, Narrator::new(&lexicons), io::stdin().lock(), out)?)
        }
        Command::Corpus {
            action: CorpusCommand::Run { problems, json },
        } => corpus_run(&problems, json, &lexicons, &mut out),
        Command::Lexicon {
            action: LexiconCommand::Validate { file, json },
        } => lexicon_validate(&file, json, &mut out),
        Command::Serve { addr, kb, data_dir } => {
            tracing_subscriber::fmt()
                .with_env_filter(
                    tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
                )
                .with_writer(io::stderr)
                .init();
            let kb = load_kb(kb.as_deref())?;
            let state = match data_dir {
                Some(dir) => bayeslex_service::AppState::with_store(kb, lexicons, dir)?,
                None => bayeslex_service::AppState::new(kb, lexicons),
            };
            let runtime = tokio::runtime::Runtime::new()?;
            Ok(runtime.block_on(bayeslex_service::serve(addr, state))?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let _ = writeln!(io::stderr(), "{}", e.envelope());
            ExitCode::from(1)
        }
    }
}
