use clap::{Parser, ValueEnum};
use qduo_cli::{exit_code_for, run_scenario_text, CliError, Flags, Report};
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Analyze quasi-duoness of differential polynomial rings over finite
/// coefficient rings.
#[derive(Parser, Debug)]
#[command(name = "qduo", version, about)]
struct Args {
    /// Scenario file ('-' reads from stdin).
    scenario: Option<PathBuf>,

    /// Default degree bound for polynomial enumeration (scenario options
    /// take precedence).
    #[arg(long, default_value_t = 3)]
    dmax: usize,

    /// Default ring order cap (scenario options take precedence).
    #[arg(long = "order-cap", default_value_t = 4096)]
    order_cap: usize,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,

    /// Run every scenario file listed (one path per line, '#' comments);
    /// scenarios run isolated and reports keep the input order.
    #[arg(long)]
    batch: Option<PathBuf>,

    /// Append the per-instance invariant suite to the report.
    #[arg(long)]
    verify: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Human,
    Machine,
}

fn read_scenario(path: &Path) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn print_report(report: &Report, format: Format) {
    match format {
        Format::Human => print!("{}", report.emit_human()),
        Format::Machine => print!("{}", report.emit_machine()),
    }
}

fn run_single(text: &str, flags: &Flags, format: Format) -> i32 {
    match run_scenario_text(text, flags) {
        Ok(report) => {
            print_report(&report, format);
            exit_code_for(&report)
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

fn run_batch(batch_path: &Path, flags: &Flags, format: Format) -> i32 {
    let listing = match std::fs::read_to_string(batch_path) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {}: {e}", batch_path.display());
            return 1;
        }
    };
    let base = batch_path.parent().unwrap_or(Path::new("."));
    let paths: Vec<PathBuf> = listing
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect();

    let run_one = |path: &PathBuf| -> (String, Result<Report, CliError>) {
        let outcome = match read_scenario(path) {
            Ok(text) => run_scenario_text(&text, flags),
            Err(e) => Err(CliError::Input(e)),
        };
        (path.display().to_string(), outcome)
    };

    #[cfg(feature = "parallel")]
    let outcomes: Vec<(String, Result<Report, CliError>)> = {
        use rayon::prelude::*;
        paths.par_iter().map(run_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<(String, Result<Report, CliError>)> = paths.iter().map(run_one).collect();

    let mut code = 0;
    for (i, (path, outcome)) in outcomes.iter().enumerate() {
        if i > 0 {
            println!("---");
        }
        println!("# {path}");
        match outcome {
            Ok(report) => {
                print_report(report, format);
                code = code.max(exit_code_for(report));
            }
            Err(e) => {
                println!("error.kind {}", if e.exit_code() == 1 { "input" } else { "internal" });
                println!("error.message {}", e.message());
                code = code.max(e.exit_code());
            }
        }
    }
    code
}

fn main() -> ExitCode {
    let args = Args::parse();
    let flags = Flags { dmax: args.dmax, order_cap: args.order_cap, verify: args.verify };

    let code = match (&args.scenario, &args.batch) {
        (Some(_), Some(_)) => {
            eprintln!("error: pass either a scenario file or --batch, not both");
            1
        }
        (None, None) => {
            eprintln!("error: a scenario file or --batch is required (see --help)");
            1
        }
        (Some(path), None) => match read_scenario(path) {
            Ok(text) => run_single(&text, &flags, args.format),
            Err(e) => {
                eprintln!("error: {e}");
                1
            }
        },
        (None, Some(batch)) => run_batch(batch, &flags, args.format),
    };
    ExitCode::from(code as u8)
}
