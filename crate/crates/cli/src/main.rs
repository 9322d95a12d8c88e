use std::path::PathBuf;
use std::process::ExitCode;

use barrier_spectra::config::{schema, Command, Format, RunConfig};
use barrier_spectra::error::{CliError, EXIT_VALIDATION};
use barrier_spectra::run::execute;
use clap::{Parser, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "barrier-spectra",
    version,
    about = "Eigenvalues of complex barrier potentials, eigenvalue sums and figures",
    after_help = parameter_help()
)]
struct Args {
    /// What to compute.
    command: Command,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Output formats, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "csv,json,svg")]
    format: Vec<Format>,
    /// JSON file with a `parameters` object; command-line pairs override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Command parameters as `--name value` pairs.
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        value_name = "PARAMS"
    )]
    params: Vec<String>,
}

fn parameter_help() -> String {
    let mut text = String::from("Parameters:\n");
    for command in Command::ALL {
        text.push_str(&format!("  {command}\n"));
        for spec in schema(command) {
            let default = spec
                .default
                .map(|d| format!(" [default: {d}]"))
                .unwrap_or_default();
            text.push_str(&format!("    --{:<9} {}{default}\n", spec.name, spec.help));
        }
    }
    text.push_str("\nExit status: 0 success, 1 invalid configuration, 2 computation or certification failure.");
    text
}

fn pairs(raw: &[String]) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    let mut items = raw.iter();
    while let Some(item) = items.next() {
        let Some(name) = item.strip_prefix("--") else {
            return Err(CliError::Validation(format!(
                "expected --name, got {item:?}"
            )));
        };
        let (key, value) = match name.split_once('=') {
            Some((k, v)) => (k.to_string(), v.to_string()),
            None => {
                let value = items
                    .next()
                    .ok_or_else(|| CliError::Validation(format!("--{name} needs a value")))?;
                (name.to_string(), value.clone())
            }
        };
        out.push((key.replace('-', "_"), value));
    }
    Ok(out)
}

/// Applies `--out`, `--format` and `--config` given after the command
/// parameters, which clap leaves in the trailing list.
fn split_options(args: &mut Args) -> Result<Vec<(String, String)>, CliError> {
    let mut params = Vec::new();
    for (key, value) in pairs(&args.params)? {
        match key.as_str() {
            "out" => args.out = PathBuf::from(value),
            "config" => args.config = Some(PathBuf::from(value)),
            "format" => {
                args.format = value
                    .split(',')
                    .map(|f| Format::from_str(f.trim(), true).map_err(CliError::Validation))
                    .collect::<Result<_, _>>()?;
            }
            _ => params.push((key, value)),
        }
    }
    Ok(params)
}

fn config(args: &mut Args) -> Result<RunConfig, CliError> {
    let params = split_options(args)?;
    let mut config =
        RunConfig::new(args.command, &args.out).with_formats(args.format.iter().copied());
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        let file: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        let parameters = file.get("parameters").cloned().unwrap_or(file);
        let echo = serde_json::json!({
            "command": args.command,
            "parameters": parameters,
            "output_dir": args.out,
            "formats": config.formats,
        });
        config = RunConfig::from_json(&echo.to_string())?;
    }
    for (key, value) in params {
        config = config.with_param(&key, value);
    }
    Ok(config)
}

fn main() -> ExitCode {
    let mut args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_VALIDATION as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = config(&mut args).and_then(|c| execute(&c));
    match outcome {
        Ok(output) => {
            let envelope = &output.envelope;
            if let Some(error) = &envelope.error {
                eprintln!("computation failed: {error}");
            }
            for check in envelope.failed_checks() {
                eprintln!("check failed: {}: {}", check.name, check.detail);
            }
            for artifact in &output.artifacts {
                println!("{}", args.out.join(&artifact.name).display());
            }
            ExitCode::from(envelope.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
