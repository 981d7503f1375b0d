mod wizard;

use std::fs;
use std::io::{self, BufRead, BufReader, IsTerminal};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use exekg::dot::to_dot;
use exekg::executor::{Executor, MethodRegistry};
use exekg::methods::ml::Metric;
use exekg::pipeline::{load_pipeline, LoadError, PipelineKG};
use exekg::schema::{Schema, DOCUMENTS};
use exekg::tabular::load_csv;

use wizard::{Wizard, WizardError};

const OK: u8 = 0;
const INVALID: u8 = 1;
const USAGE: u8 = 2;
const EXEC_FAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "exekg", version, about = "Build, check, run and draw pipeline knowledge graphs")]
struct Cli {
    /// More diagnostics on stderr; repeat for more.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a pipeline by answering questions.
    Build {
        /// Read answers from this file, one per line, instead of the terminal.
        #[arg(long)]
        answers: Option<PathBuf>,
        /// Where to write the pipeline.
        #[arg(short, long)]
        output: PathBuf,
        /// Pipeline name; defaults to the output file stem.
        #[arg(long)]
        name: Option<String>,
    },
    /// Validate and execute a pipeline.
    Run {
        pipeline: PathBuf,
        /// Dataset to use instead of the one the pipeline names.
        #[arg(long)]
        data: Option<PathBuf>,
        /// Directory for plots and report.json.
        #[arg(long, env = "EXEKG_OUT", default_value = "exekg-out")]
        out: PathBuf,
    },
    /// Write a Graphviz DOT drawing of a pipeline.
    Viz {
        pipeline: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the schema documents to a directory.
    ExportSchemas {
        #[arg(long)]
        out: PathBuf,
    },
}

/// An error to report on stderr together with its exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn fail(code: u8, error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code,
        error: error.into(),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code().clamp(0, 255) as u8);
        }
    };
    let result = match cli.command {
        Command::Build { answers, output, name } => build(answers.as_deref(), &output, name),
        Command::Run { pipeline, data, out } => run(&pipeline, data.as_deref(), &out, cli.verbose),
        Command::Viz { pipeline, out } => viz(&pipeline, out.as_deref()),
        Command::ExportSchemas { out } => export_schemas(&out),
    };
    match result {
        Ok(()) => ExitCode::from(OK),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

fn require_path(p: &Path, what: &str) -> Result<(), Failure> {
    if p.as_os_str().is_empty() {
        return Err(fail(USAGE, anyhow::anyhow!("{what} must not be empty")));
    }
    Ok(())
}

fn build(answers: Option<&Path>, output: &Path, name: Option<String>) -> Result<(), Failure> {
    require_path(output, "--output")?;
    let name = match name {
        Some(n) => n,
        None => output
            .file_stem()
            .and_then(|s| s.to_str())
            .map(str::to_string)
            .ok_or_else(|| fail(USAGE, anyhow::anyhow!("cannot derive a pipeline name from {}", output.display())))?,
    };
    let input: Box<dyn BufRead> = match answers {
        Some(p) => {
            let f = fs::File::open(p)
                .with_context(|| format!("cannot open answers file {}", p.display()))
                .map_err(|e| fail(USAGE, e))?;
            Box::new(BufReader::new(f))
        }
        None => Box::new(io::stdin().lock()),
    };
    let echo = answers.is_some() || !io::stdin().is_terminal();
    let kg = Wizard::new(Schema::builtin(), input, io::stderr(), echo)
        .run(&name)
        .map_err(|e| match e {
            WizardError::Eof => fail(USAGE, anyhow::anyhow!("input ended before the pipeline was complete; nothing written")),
            WizardError::Io(e) => fail(USAGE, e),
            WizardError::Setup(m) => fail(INVALID, anyhow::anyhow!(m)),
        })?;
    kg.save(output)
        .with_context(|| format!("cannot write {}", output.display()))
        .map_err(|e| fail(EXEC_FAILED, e))?;
    println!("wrote {} ({} tasks)", output.display(), kg.chain().len());
    Ok(())
}

fn load(path: &Path) -> Result<PipelineKG, Failure> {
    require_path(path, "pipeline path")?;
    if !path.is_file() {
        return Err(fail(USAGE, anyhow::anyhow!("no such file: {}", path.display())));
    }
    load_pipeline(path).map_err(|e| match e {
        LoadError::Io { .. } => fail(USAGE, e),
        LoadError::Parse(_) | LoadError::Invalid(_) => fail(INVALID, e),
    })
}

/// A relative dataset path is tried against the working directory first,
/// then against the pipeline file's directory.
fn dataset_path(kg: &PipelineKG, pipeline: &Path) -> PathBuf {
    let p = Path::new(kg.dataset_path());
    if p.is_absolute() || p.exists() {
        return p.to_path_buf();
    }
    match pipeline.parent() {
        Some(dir) => dir.join(p),
        None => p.to_path_buf(),
    }
}

fn describe(m: &Metric) -> String {
    match m {
        Metric::Scalar(v) => format!("{v}"),
        Metric::Vector(v) => {
            let mean = if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 };
            format!("{} values, mean {mean}", v.len())
        }
    }
}

fn run(pipeline: &Path, data: Option<&Path>, out: &Path, verbose: u8) -> Result<(), Failure> {
    let kg = load(pipeline)?;
    let data_path = match data {
        Some(d) if !d.is_file() => {
            return Err(fail(USAGE, anyhow::anyhow!("no such dataset: {}", d.display())));
        }
        Some(d) => d.to_path_buf(),
        None => dataset_path(&kg, pipeline),
    };
    if verbose > 0 {
        eprintln!("dataset: {}", data_path.display());
        eprintln!("output: {}", out.display());
    }
    let table = load_csv(&data_path)
        .with_context(|| format!("cannot load dataset {}", data_path.display()))
        .map_err(|e| fail(EXEC_FAILED, e))?;
    let registry = MethodRegistry::with_defaults();
    let report = Executor::new(Schema::builtin(), &registry)
        .execute(&kg, &table, out)
        .map_err(|e| fail(EXEC_FAILED, e))?;
    println!("pipeline {}: {} tasks", kg.pipeline_iri().local_name(), report.tasks.len());
    for t in &report.tasks {
        let task = t.iri.rsplit(['#', '/']).next().unwrap_or(&t.iri);
        let method = t.method.rsplit(['#', '/']).next().unwrap_or(&t.method);
        println!("  {task:<28} {method:<24} {:>9.3} ms", t.millis);
    }
    for (name, m) in &report.metrics {
        println!("metric {name}: {}", describe(m));
    }
    for a in &report.artifacts {
        println!("artifact {}", out.join(a).display());
    }
    println!("report {}", out.join("report.json").display());
    Ok(())
}

fn viz(pipeline: &Path, out: Option<&Path>) -> Result<(), Failure> {
    if let Some(o) = out {
        require_path(o, "--out")?;
    }
    let kg = load(pipeline)?;
    let dot = to_dot(Schema::builtin(), &kg);
    match out {
        None => print!("{dot}"),
        Some(o) => fs::write(o, dot)
            .with_context(|| format!("cannot write {}", o.display()))
            .map_err(|e| fail(EXEC_FAILED, e))?,
    }
    Ok(())
}

fn export_schemas(out: &Path) -> Result<(), Failure> {
    require_path(out, "--out")?;
    fs::create_dir_all(out)
        .with_context(|| format!("cannot create {}", out.display()))
        .map_err(|e| fail(EXEC_FAILED, e))?;
    for (name, text) in DOCUMENTS {
        let p = out.join(name);
        fs::write(&p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(|e| fail(EXEC_FAILED, e))?;
        println!("{}", p.display());
    }
    Ok(())
}
