//! The `fg` command line driver.
//!
//! Exit codes: 0 success (for `validate`, a clean report), 1 validation
//! findings, 2 usage, IO or parse errors.

pub mod render;

use std::ffi::OsString;
use std::io::{Read, Write};

use clap::{Args, Parser, Subcommand};

use crate::validator::parse_spec;
use crate::Analysis;

#[derive(Debug, Parser)]
#[command(name = "fg", about = "Flow graphs for mini-Java methods", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the flow graph's containment structure.
    Build {
        /// Source file (`-` for stdin).
        file: String,
    },
    /// Print control flow edges.
    Cfg {
        file: String,
        #[command(flatten)]
        format: Format,
    },
    /// Print control flow, def/use sets and data flow edges.
    Dfg {
        file: String,
        #[command(flatten)]
        format: Format,
    },
    /// Check a `.validate` specification against the computed graph.
    Validate {
        file: String,
        /// Specification file (`-` for stdin).
        #[arg(long, required_unless_present = "emit")]
        spec: Option<String>,
        /// Print a specification matching the graph instead of checking.
        #[arg(long)]
        emit: bool,
        /// Print the report as JSON.
        #[arg(long, conflicts_with = "emit")]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct Format {
    #[arg(long, conflicts_with = "json")]
    pub dot: bool,
    #[arg(long)]
    pub json: bool,
}

/// Process handles, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
    /// ANSI colors in validation reports.
    pub color: bool,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Run one invocation and return its exit code.
pub fn run<I, T>(args: I, io: &mut Io<'_>) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { io.stderr } else { io.stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute(cli.command, io) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(io.stderr, "error: {msg}");
            2
        }
    }
}

fn read_input(path: &str, stdin: &mut dyn Read) -> Result<String, Failure> {
    let mut text = String::new();
    if path == "-" {
        stdin
            .read_to_string(&mut text)
            .map_err(|e| Failure(format!("<stdin>: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{path}: {e}")))?;
    }
    Ok(text)
}

fn analyze(path: &str, stdin: &mut dyn Read) -> Result<Analysis, Failure> {
    let source = read_input(path, stdin)?;
    Analysis::from_source(&source).map_err(|e| Failure(format!("{path}: {e}")))
}

fn execute(command: Command, io: &mut Io<'_>) -> Result<i32, Failure> {
    match command {
        Command::Build { file } => {
            let a = analyze(&file, io.stdin)?;
            io.stdout
                .write_all(render::structure(&a.graph).as_bytes())?;
        }
        Command::Cfg { file, format } => {
            let a = analyze(&file, io.stdin)?;
            let out = if format.dot {
                render::dot(&a, false)
            } else if format.json {
                format!("{}\n", render::json(&a, false))
            } else {
                render::cf_listing(&a)
            };
            io.stdout.write_all(out.as_bytes())?;
        }
        Command::Dfg { file, format } => {
            let a = analyze(&file, io.stdin)?;
            for w in &a.data.warnings {
                writeln!(io.stderr, "warning: {w}")?;
            }
            let out = if format.dot {
                render::dot(&a, true)
            } else if format.json {
                format!("{}\n", render::json(&a, true))
            } else {
                render::df_listing(&a)
            };
            io.stdout.write_all(out.as_bytes())?;
        }
        Command::Validate {
            file,
            spec,
            emit,
            json,
        } => {
            if spec.as_deref() == Some("-") && file == "-" {
                return Err(Failure(
                    "only one of the source and the spec can be read from stdin".into(),
                ));
            }
            let a = analyze(&file, io.stdin)?;
            if emit {
                io.stdout.write_all(a.emit_spec().to_string().as_bytes())?;
                return Ok(0);
            }
            let spec_path = spec.expect("clap requires --spec without --emit");
            let text = read_input(&spec_path, io.stdin)?;
            let spec = parse_spec(&text).map_err(|e| Failure(format!("{spec_path}: {e}")))?;
            let report = a.check(&spec);
            for w in &report.warnings {
                writeln!(io.stderr, "warning: {w}")?;
            }
            if json {
                writeln!(io.stdout, "{}", serde_json::to_string(&report)?)?;
            } else {
                io.stdout.write_all(report.render(io.color).as_bytes())?;
            }
            return Ok(if report.is_clean() { 0 } else { 1 });
        }
    }
    Ok(0)
}

/// Color setting from `FG_COLOR` (`1` enables, anything else disables).
pub fn color_from_env() -> bool {
    std::env::var("FG_COLOR").is_ok_and(|v| v == "1")
}
