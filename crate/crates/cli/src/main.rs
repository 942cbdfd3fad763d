use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use norden::report::{to_json, to_markdown};
use norden::suite::{self, Generator, DEFAULT_POINTS, DEFAULT_SEED};
use norden::{catalog, load_manifold, CheckReport, ConnectionField, Structure, Tolerance, DEFAULT_TOLERANCE};

#[derive(Parser)]
#[command(name = "norden", version, about = "Numerical checks for Norden manifolds and conjugate connections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Run named checks on a catalog structure or a TOML manifold file.
    Check {
        /// Catalog name or path to a .toml file.
        target: String,
        /// Comma-separated check ids; all checks when omitted.
        #[arg(long, value_delimiter = ',')]
        checks: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        /// Tolerance for deciding hypotheses; defaults to --tol.
        #[arg(long)]
        hypothesis_tol: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Connection generator (levi-civita, levi-civita-twin, zero, random,
        /// codazzi, j-invariant, j-invariant-codazzi). Defaults to the file's
        /// connection, else levi-civita.
        #[arg(long)]
        connection: Option<String>,
    },
    /// Run every check across the catalog and derived seeds.
    VerifyPaper {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// List built-in structures.
    Catalog {
        #[arg(long, value_enum, default_value_t = Format::Md)]
        format: Format,
    },
    /// List check ids.
    Checks,
}

fn render(reports: &[CheckReport], format: Format) -> String {
    match format {
        Format::Json => to_json(reports),
        Format::Md => to_markdown(reports),
    }
}

// a closed pipe (e.g. `| head`) is not an error
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn exit_for(reports: &[CheckReport]) -> ExitCode {
    if reports.iter().all(CheckReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn load_target(target: &str) -> norden::Result<(Structure, Option<ConnectionField>)> {
    if catalog::list().iter().any(|e| e.name == target) {
        return Ok((catalog::by_name(target)?, None));
    }
    let path = Path::new(target);
    if path.extension().is_some_and(|e| e == "toml") || path.exists() {
        let spec = load_manifold(path)?;
        return Ok((spec.structure, spec.connection));
    }
    Err(norden::Error::UnknownStructure(target.to_string()))
}

#[allow(clippy::too_many_arguments)]
fn check(
    target: &str,
    checks: Vec<String>,
    points: usize,
    seed: u64,
    tol: Tolerance,
    format: Format,
    connection: Option<String>,
) -> norden::Result<ExitCode> {
    let (structure, file_connection) = load_target(target)?;
    let ids = if checks.is_empty() {
        suite::CHECK_IDS.iter().map(|s| s.to_string()).collect()
    } else {
        checks
    };
    if let Some(bad) = ids.iter().find(|id| !suite::is_check_id(id)) {
        return Err(norden::Error::UnknownCheck(bad.clone()));
    }
    let connection = match connection {
        Some(name) => name.parse::<Generator>()?.build(&structure, seed)?,
        None => file_connection.unwrap_or_else(|| ConnectionField::levi_civita(structure.g())),
    };
    if connection.dim() != structure.dim() {
        return Err(norden::Error::InvalidInput(format!(
            "connection has dimension {}, structure has {}",
            connection.dim(),
            structure.dim()
        )));
    }
    let samples = structure.sample(points, seed)?;
    let reports = suite::run_checks(&ids, &structure, &connection, &samples, tol)?;
    emit(render(&reports, format).trim_end());
    Ok(exit_for(&reports))
}

fn run(cli: Cli) -> norden::Result<ExitCode> {
    match cli.command {
        Command::Check {
            target,
            checks,
            points,
            seed,
            tol,
            hypothesis_tol,
            format,
            connection,
        } => {
            let tol = Tolerance {
                conclusion: tol,
                hypothesis: hypothesis_tol.unwrap_or(tol),
            };
            check(&target, checks, points, seed, tol, format, connection)
        }
        Command::VerifyPaper {
            seed,
            points,
            tol,
            format,
        } => {
            let reports = suite::verify_paper(seed, points, Tolerance::uniform(tol))?;
            emit(render(&reports, format).trim_end());
            Ok(exit_for(&reports))
        }
        Command::Catalog { format } => {
            match format {
                Format::Json => emit(&serde_json::to_string_pretty(catalog::list()).expect("catalog serializes")),
                Format::Md => {
                    let mut out = String::from("| name | dim | anti-Kahler | integrable J | description |\n|---|---|---|---|---|");
                    for e in catalog::list() {
                        out += &format!("\n| {} | {} | {} | {} | {} |", e.name, e.dim, e.anti_kahler, e.integrable, e.description);
                    }
                    emit(&out);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Checks => {
            emit(&suite::CHECK_IDS.join("\n"));
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
