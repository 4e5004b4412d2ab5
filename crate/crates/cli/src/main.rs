mod args;
mod commands;
mod input;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde_json::{json, Value};

use args::{BatchArgs, Cli, Command};
use commands::Context;
use report::{render, report as make_report, CliError};

fn parse(argv: impl IntoIterator<Item = String>) -> Result<Cli, CliError> {
    Cli::try_parse_from(argv).map_err(|e| CliError::Usage(e.render().to_string().trim_end().to_string()))
}

fn context(cli: &Cli, base: &Path) -> Context {
    Context {
        base: base.to_path_buf(),
        tol: cli.tol,
        seed: cli.seed,
    }
}

/// Runs every invocation in the file; the exit code is that of the first failure.
fn batch(args: &BatchArgs, base: &Path) -> (Result<Value, CliError>, i32) {
    let path = if args.file.is_absolute() {
        args.file.clone()
    } else {
        base.join(&args.file)
    };
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) => return (Err(CliError::Io(format!("{}: {e}", path.display()))), 1),
    };
    let invocations: Vec<Vec<String>> = match input::parse_json(&text, &path.display().to_string()) {
        Ok(v) => v,
        Err(e) => return (Err(e), 1),
    };
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut code = 0;
    let mut results = Vec::with_capacity(invocations.len());
    for argv in &invocations {
        let outcome = parse(std::iter::once("grushin".to_string()).chain(argv.iter().cloned()))
            .and_then(|cli| commands::run(&cli.command, &context(&cli, &dir)));
        match outcome {
            Ok(r) => results.push(r),
            Err(e) => {
                if code == 0 {
                    code = e.exit_code();
                }
                results.push(e.record(argv.first().map(String::as_str)));
            }
        }
    }
    let report = make_report("batch", &json!({ "invocations": invocations }), json!({ "results": results }));
    (Ok(report), code)
}

fn emit(value: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(render(value).as_bytes());
}

fn fail(err: &CliError, command: Option<&str>) -> ExitCode {
    eprintln!("{}", err.record(command));
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = CliError::Usage(e.render().to_string().trim_end().to_string());
            return fail(&err, None);
        }
    };
    let cwd = PathBuf::from(".");
    let name = cli.command.name();
    match &cli.command {
        Command::Batch(args) => match batch(args, &cwd) {
            (Ok(report), code) => {
                emit(&report);
                ExitCode::from(code as u8)
            }
            (Err(e), _) => fail(&e, Some(name)),
        },
        command => match commands::run(command, &context(&cli, &cwd)) {
            Ok(report) => {
                emit(&report);
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e, Some(name)),
        },
    }
}
