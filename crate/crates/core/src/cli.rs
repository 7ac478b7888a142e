//! Command-line front end. `run` returns the process exit code: 0 on
//! success, 1 for input, validation or configuration errors, 2 for usage
//! errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::canonical::{parse_json, to_canonical_bytes};
use crate::error::{Error, Result};
use crate::metrics::{overall_evaluation, OverallEvaluation};
use crate::protocols::{analyze_session, ProtocolResults};
use crate::questionnaire::{cohort_summary, parse_responses, CohortSummary, ScoreRow};
use crate::report::generate_report;
use crate::script::{parse_script, TestScript};
use crate::session::{parse_session, serialize_session, SessionRecord};
use crate::simulator::{simulate_session, ModelFile, SimConfig};

pub const RESULTS_SCHEMA_VERSION: u32 = 1;

/// Contents of a results file written by `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultsFile {
    pub schema_version: u32,
    pub protocols: ProtocolResults,
    #[serde(default)]
    pub evaluation: Option<OverallEvaluation>,
}

/// Analyzes a session and scores it. The evaluation is absent only when
/// no protocol produced results.
pub fn analyze(session: &SessionRecord, script: &TestScript) -> Result<ResultsFile> {
    let protocols = analyze_session(session, script)?;
    let evaluation = if protocols.is_empty() {
        None
    } else {
        Some(overall_evaluation(&protocols, &script.analysis.evaluation)?)
    };
    Ok(ResultsFile {
        schema_version: RESULTS_SCHEMA_VERSION,
        protocols,
        evaluation,
    })
}

/// Picks the questionnaire row for a session: the row whose id matches the
/// participant name, or the only row of a single-participant file.
pub fn scores_for<'a>(summary: &'a CohortSummary, session: &SessionRecord) -> Option<&'a ScoreRow> {
    summary
        .participants
        .iter()
        .find(|r| r.participant_id == session.meta.name)
        .or(if summary.participants.len() == 1 {
            summary.participants.first()
        } else {
            None
        })
}

#[derive(Parser, Debug)]
#[command(
    name = "vrgaze",
    version,
    about = "VR eye-tracking assessment pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic session from a test script and gazer model.
    Simulate {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the protocol analyses and overall evaluation on a session.
    Analyze {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render the HTML report for analyzed results.
    Report {
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        results: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Where to write the summary JSON (default: next to the report).
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Questionnaire scores file from `score-questionnaire`.
        #[arg(long)]
        scores: Option<PathBuf>,
    },
    /// Score engagement questionnaire responses.
    ScoreQuestionnaire {
        #[arg(long)]
        responses: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Simulate, analyze, score and report in one go.
    RunAll {
        #[arg(long)]
        script: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        responses: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    path: Option<PathBuf>,
    error: String,
}

fn at(path: &Path) -> impl FnOnce(Error) -> Failure + '_ {
    move |e| Failure {
        path: Some(path.to_path_buf()),
        error: e.to_string(),
    }
}

fn read(path: &Path) -> std::result::Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure {
        path: Some(path.to_path_buf()),
        error: format!("cannot read: {e}"),
    })
}

fn write(path: &Path, bytes: &[u8]) -> std::result::Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure {
        path: Some(path.to_path_buf()),
        error: format!("cannot write: {e}"),
    })
}

fn load_script(path: &Path) -> std::result::Result<TestScript, Failure> {
    parse_script(&read(path)?).map_err(at(path))
}

fn load_model(path: &Path, seed: u64) -> std::result::Result<(ModelFile, SimConfig), Failure> {
    let model: ModelFile = parse_json(&read(path)?).map_err(at(path))?;
    model.gazer.validate().map_err(at(path))?;
    let cfg = SimConfig {
        seed,
        settings: model.sim,
    };
    cfg.validate().map_err(at(path))?;
    Ok((model, cfg))
}

fn score_file(path: &Path) -> std::result::Result<CohortSummary, Failure> {
    cohort_summary(&parse_responses(&read(path)?).map_err(at(path))?).map_err(at(path))
}

fn default_summary_path(report: &Path) -> PathBuf {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report.with_file_name(format!("{stem}.summary.json"))
}

fn execute(cmd: Command) -> std::result::Result<(), Failure> {
    match cmd {
        Command::Simulate {
            script,
            model,
            seed,
            out,
        } => {
            let s = load_script(&script)?;
            let (m, cfg) = load_model(&model, seed)?;
            let session = simulate_session(&s, &m.gazer, &cfg).map_err(at(&model))?;
            write(&out, &serialize_session(&session))
        }
        Command::Analyze {
            session,
            script,
            out,
        } => {
            let rec = parse_session(&read(&session)?).map_err(at(&session))?;
            let s = load_script(&script)?;
            let results = analyze(&rec, &s).map_err(at(&session))?;
            write(&out, &to_canonical_bytes(&results))
        }
        Command::Report {
            session,
            results,
            out,
            summary,
            scores,
        } => {
            let rec = parse_session(&read(&session)?).map_err(at(&session))?;
            let res: ResultsFile = parse_json(&read(&results)?).map_err(at(&results))?;
            let cohort = scores
                .as_deref()
                .map(|p| parse_json::<CohortSummary>(&read(p)?).map_err(at(p)))
                .transpose()?;
            let row = cohort.as_ref().and_then(|c| scores_for(c, &rec));
            let doc = generate_report(&rec, &res.protocols, res.evaluation.as_ref(), row)
                .map_err(at(&results))?;
            write(&out, doc.html.as_bytes())?;
            write(
                &summary.unwrap_or_else(|| default_summary_path(&out)),
                doc.summary.as_bytes(),
            )
        }
        Command::ScoreQuestionnaire { responses, out } => {
            write(&out, &to_canonical_bytes(&score_file(&responses)?))
        }
        Command::RunAll {
            script,
            model,
            seed,
            out_dir,
            responses,
        } => {
            let s = load_script(&script)?;
            let (m, cfg) = load_model(&model, seed)?;
            let cohort = responses.as_deref().map(score_file).transpose()?;
            fs::create_dir_all(&out_dir).map_err(|e| Failure {
                path: Some(out_dir.clone()),
                error: format!("cannot create directory: {e}"),
            })?;
            let session = simulate_session(&s, &m.gazer, &cfg).map_err(at(&model))?;
            let results = analyze(&session, &s).map_err(at(&script))?;
            let row = cohort.as_ref().and_then(|c| scores_for(c, &session));
            let doc = generate_report(
                &session,
                &results.protocols,
                results.evaluation.as_ref(),
                row,
            )
            .map_err(at(&script))?;
            write(&out_dir.join("session.json"), &serialize_session(&session))?;
            write(&out_dir.join("results.json"), &to_canonical_bytes(&results))?;
            if let Some(c) = &cohort {
                write(&out_dir.join("scores.json"), &to_canonical_bytes(c))?;
            }
            write(&out_dir.join("report.html"), doc.html.as_bytes())?;
            write(&out_dir.join("summary.json"), doc.summary.as_bytes())
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            match f.path {
                Some(p) => eprintln!("error: {}: {}", p.display(), f.error),
                None => eprintln!("error: {}", f.error),
            }
            1
        }
    }
}
