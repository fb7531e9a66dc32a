use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use glue_core::index::GluingIndexCategory;
use glue_core::pipeline::{run_text, PipelineError, PipelineOptions, PipelineRun};
use serde_json::{json, Value};

/// Glue finite spaces, sheaves and ringed spaces from gluing-data documents.
#[derive(Parser)]
#[command(name = "glue", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct the glued object and print the verification report.
    Verify {
        file: PathBuf,
        /// Override the document's variant (top, otop, rts, lrts).
        #[arg(long)]
        variant: Option<String>,
    },
    /// Like verify, and write report.json, q.json, q.dot and summary.json to a directory.
    Build {
        file: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        variant: Option<String>,
    },
    /// Census of the index category for n charts.
    Index {
        #[arg(long)]
        n: usize,
        /// Write the category as a DOT graph.
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Print the report in the chosen format.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        variant: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Dot,
}

/// Failures outside the pipeline: unreadable files, bad flags.
fn usage_error(e: anyhow::Error) -> ExitCode {
    eprintln!("{}", json!({"error": "input", "message": format!("{e:#}")}));
    ExitCode::from(2)
}

fn pipeline_error(e: &PipelineError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}

fn load(file: &Path, variant: Option<&str>) -> Result<String> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let Some(v) = variant else { return Ok(text) };
    let mut value: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", file.display()))?;
    value
        .as_object_mut()
        .context("document is not a JSON object")?
        .insert("variant".into(), Value::from(v));
    Ok(value.to_string())
}

/// Parse, construct and verify; `Err` carries the exit code already reported.
fn run(file: &Path, variant: Option<&str>) -> Result<PipelineRun, ExitCode> {
    if variant == Some("sch") {
        return Err(pipeline_error(&PipelineError::Document(glue_core::doc::DocumentError::SchemeUnsupported)));
    }
    let text = load(file, variant).map_err(usage_error)?;
    run_text(&text, &PipelineOptions::default()).map_err(|e| pipeline_error(&e))
}

fn exit_for(run: &PipelineRun) -> ExitCode {
    ExitCode::from(run.report.exit_code() as u8)
}

fn write_artifacts(out: &Path, run: &PipelineRun) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    fs::write(out.join("report.json"), run.report.to_json())?;
    fs::write(out.join("q.json"), run.q_json())?;
    fs::write(out.join("q.dot"), run.q_dot())?;
    fs::write(out.join("summary.json"), run.summary_json())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { file, variant } => match run(&file, variant.as_deref()) {
            Ok(r) => {
                print!("{}", r.report.to_json());
                exit_for(&r)
            }
            Err(code) => code,
        },
        Command::Build { file, out, variant } => match run(&file, variant.as_deref()) {
            Ok(r) => match write_artifacts(&out, &r) {
                Ok(()) => {
                    print!("{}", r.report.to_json());
                    exit_for(&r)
                }
                Err(e) => usage_error(e),
            },
            Err(code) => code,
        },
        Command::Report { file, format, variant } => match run(&file, variant.as_deref()) {
            Ok(r) => {
                match format {
                    Format::Json => print!("{}", r.report.to_json()),
                    Format::Dot => print!("{}", r.q_dot()),
                }
                exit_for(&r)
            }
            Err(code) => code,
        },
        Command::Index { n, dot } => {
            let cat = match GluingIndexCategory::new(n) {
                Ok(c) => c,
                Err(e) => return usage_error(e.into()),
            };
            let census = json!({"n": n, "objects": cat.objects().len(), "morphisms": cat.morphism_count()});
            println!("{}", serde_json::to_string_pretty(&census).expect("serializable"));
            if let Some(path) = dot {
                if let Err(e) = fs::write(&path, cat.to_dot()) {
                    return usage_error(anyhow::Error::new(e).context(format!("writing {}", path.display())));
                }
            }
            ExitCode::SUCCESS
        }
    }
}
