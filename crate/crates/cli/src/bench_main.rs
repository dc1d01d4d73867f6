//! Regression harness over the built-in PDE cases.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;

use quadratize_core::{
    format_recorded_sets, format_suite, run_suite, verify_recorded_sets, Heuristic, SuiteConfig,
};

#[derive(Parser, Debug)]
#[command(
    name = "quadratize-bench",
    version,
    about = "Replays the search over the built-in PDE cases and checks the outcomes"
)]
struct Args {
    /// Keep only cases whose name contains this string
    filter: Option<String>,

    /// Include the heavy cases
    #[arg(long)]
    heavy: bool,

    /// Check the recorded auxiliary sets with the verifier alone, no search
    #[arg(long)]
    sets: bool,

    /// Child ordering rule: h1, h2, or h3
    #[arg(long, default_value = "h3")]
    heuristic: String,

    /// Per-case node budget
    #[arg(long)]
    node_limit: Option<u64>,

    /// Per-case time budget in seconds
    #[arg(long)]
    time_limit: Option<f64>,

    /// Write one JSON report per case into this directory
    #[arg(long)]
    json_dir: Option<PathBuf>,
}

fn parse_heuristic(name: &str) -> Result<Heuristic, String> {
    match name {
        "h1" => Ok(Heuristic::H1),
        "h2" => Ok(Heuristic::H2),
        "h3" => Ok(Heuristic::h3_default()),
        other => Err(format!("unknown heuristic `{}`; expected h1, h2, or h3", other)),
    }
}

fn run(args: &Args) -> Result<ExitCode, String> {
    let filter = args.filter.as_deref();

    if args.sets {
        let rows = verify_recorded_sets(filter);
        print!("{}", format_recorded_sets(&rows));
        let ok = rows.iter().all(|r| r.verified_at.is_some());
        return Ok(if ok {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(2)
        });
    }

    let cfg = SuiteConfig {
        heuristic: parse_heuristic(&args.heuristic)?,
        include_heavy: args.heavy,
        node_limit: args.node_limit,
        time_limit: args.time_limit.map(Duration::from_secs_f64),
    };
    let rows = run_suite(filter, &cfg);
    print!("{}", format_suite(&rows));

    if let Some(dir) = &args.json_dir {
        fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {}", dir.display(), e))?;
        for row in &rows {
            let path = dir.join(format!("{}.json", row.name));
            let text = serde_json::to_string_pretty(&row.report)
                .map_err(|e| format!("cannot serialize {}: {}", row.name, e))?;
            fs::write(&path, text + "\n")
                .map_err(|e| format!("cannot write {}: {}", path.display(), e))?;
        }
    }

    let passed = rows.iter().filter(|r| r.pass).count();
    println!("{} of {} cases pass", passed, rows.len());
    Ok(if passed == rows.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            use clap::error::ErrorKind;
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{}", e);
                ExitCode::SUCCESS
            } else {
                eprint!("{}", e);
                ExitCode::from(1)
            };
        }
    };
    match run(&args) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("quadratize-bench: {}", message);
            ExitCode::from(1)
        }
    }
}
