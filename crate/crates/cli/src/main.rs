//! Command line driver: parse a PDE system, search for a quadratization,
//! print or serialize the result.

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::Parser;

use quadratize_core::{
    auto_search, build_report, find_case, parse, polynomialize, search, AutoRound, Heuristic,
    QuadResult, RunReport, SearchConfig, SearchFailure,
};

#[derive(Parser, Debug)]
#[command(
    name = "quadratize",
    version,
    about = "Rewrites polynomial and rational PDE systems with quadratic right-hand sides",
    after_help = "Reads equations of the form `name_t = expression`, one per line, from FILE\n\
                  or standard input. `param name = value` lines bind rational constants."
)]
struct Args {
    /// Input file; standard input when omitted
    file: Option<PathBuf>,

    /// Child ordering rule: h1, h2, or h3
    #[arg(long, default_value = "h3")]
    heuristic: String,

    /// Largest candidate set size
    #[arg(long, default_value_t = 8)]
    max_aux: u32,

    /// Differential order for verification; three times the system order when omitted
    #[arg(long)]
    diff_order: Option<u32>,

    /// Highest derivative cost of a candidate; twice the system order when omitted
    #[arg(long)]
    max_aux_deriv: Option<u32>,

    /// Keep the first verified set without sweeping its subsets
    #[arg(long)]
    no_shrink: bool,

    /// Retry with widened bounds, starting at the system's own order
    #[arg(long)]
    auto: bool,

    /// Abort after this many verified candidate sets
    #[arg(long)]
    node_limit: Option<u64>,

    /// Abort after this many seconds
    #[arg(long)]
    time_limit: Option<f64>,

    /// Write the JSON report here instead of printing text ("-" for standard output)
    #[arg(long)]
    json: Option<PathBuf>,

    /// Print search counters
    #[arg(long)]
    stats: bool,

    /// Run a built-in case instead of reading input
    #[arg(long, conflicts_with = "file")]
    benchmark: Option<String>,

    /// List the built-in cases and exit
    #[arg(long)]
    list_benchmarks: bool,
}

fn parse_heuristic(name: &str) -> Result<Heuristic, String> {
    match name {
        "h1" => Ok(Heuristic::H1),
        "h2" => Ok(Heuristic::H2),
        "h3" => Ok(Heuristic::h3_default()),
        other => Err(format!("unknown heuristic `{}`; expected h1, h2, or h3", other)),
    }
}

fn read_source(args: &Args) -> Result<String, String> {
    if let Some(name) = &args.benchmark {
        let case = find_case(name)
            .ok_or_else(|| format!("unknown benchmark `{}`; try --list-benchmarks", name))?;
        return Ok(case.source.to_string());
    }
    match &args.file {
        Some(path) => {
            fs::read_to_string(path).map_err(|e| format!("cannot read {}: {}", path.display(), e))
        }
        None => {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| format!("cannot read standard input: {}", e))?;
            Ok(text)
        }
    }
}

fn list_benchmarks() {
    println!("{:<14} {:>8}  {}", "name", "expected", "notes");
    for case in quadratize_core::cases() {
        println!(
            "{:<14} {:>8}  {}",
            case.name,
            case.expected_order,
            if case.heavy { "heavy" } else { "" }
        );
    }
}

fn print_text(report: &RunReport, rounds: &[AutoRound], stats: bool) {
    match report.result.status.as_str() {
        "success" => {
            if report.result.aux_vars.is_empty() {
                println!(
                    "the system is quadratic as given at differential order {}",
                    report.result.diff_order
                );
            } else {
                println!(
                    "quadratization of order {} at differential order {}",
                    report.result.aux_vars.len(),
                    report.result.diff_order
                );
                for aux in &report.result.aux_vars {
                    println!("  {}", aux);
                }
            }
            println!("quadratic system:");
            for eq in &report.result.quadratic_system {
                println!("  {}", eq);
            }
        }
        status => {
            eprintln!(
                "search failed ({}) after {} nodes at differential order {}",
                status, report.stats.nodes, report.result.diff_order
            );
            if !rounds.is_empty() {
                eprintln!("hint: the widening schedule was exhausted");
            } else {
                eprintln!("hint: retry with --auto or larger bounds");
            }
        }
    }
    if stats {
        println!("nodes: {}", report.stats.nodes);
        println!("shrink checks: {}", report.stats.shrink_checks);
        println!("wall time: {} ms", report.stats.wall_ms);
        for (i, r) in rounds.iter().enumerate() {
            println!(
                "round {}: diff order {}, cap {}, nodes {}, {}",
                i + 1,
                r.diff_order,
                r.max_aux,
                r.nodes_traversed,
                r.failure.map_or("success", |f| f.label())
            );
        }
    }
}

fn run(args: &Args) -> Result<ExitCode, String> {
    if args.list_benchmarks {
        list_benchmarks();
        return Ok(ExitCode::SUCCESS);
    }

    let source = read_source(args)?;
    let system = parse(&source).map_err(|e| format!("parse error: {}", e))?;
    let lifted = polynomialize(&system).map_err(|e| format!("lift error: {}", e))?;

    let mut cfg = SearchConfig::for_system(&lifted);
    cfg.heuristic = parse_heuristic(&args.heuristic)?;
    cfg.max_aux = args.max_aux;
    if let Some(k) = args.diff_order {
        cfg.diff_order = k;
    } else if args.auto {
        cfg.diff_order = lifted.order();
    }
    if let Some(m) = args.max_aux_deriv {
        cfg.max_aux_deriv = m;
    }
    cfg.shrink_enabled = !args.no_shrink;
    cfg.node_limit = args.node_limit;
    cfg.time_limit = args.time_limit.map(Duration::from_secs_f64);

    let (rounds, outcome): (Vec<AutoRound>, Result<QuadResult, SearchFailure>) = if args.auto {
        auto_search(&lifted, &cfg)
    } else {
        (Vec::new(), search(&lifted, &cfg))
    };

    let attempted = rounds.last().map_or(cfg.diff_order, |r| r.diff_order);
    let report = build_report(&system, &cfg, args.auto, attempted, &outcome);

    if let Some(path) = &args.json {
        let text = serde_json::to_string_pretty(&report)
            .map_err(|e| format!("cannot serialize report: {}", e))?;
        if path.as_os_str() == "-" {
            println!("{}", text);
        } else {
            fs::write(path, text + "\n")
                .map_err(|e| format!("cannot write {}: {}", path.display(), e))?;
        }
    } else {
        print_text(&report, &rounds, args.stats);
    }

    Ok(if outcome.is_ok() {
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
            eprintln!("quadratize: {}", message);
            ExitCode::from(1)
        }
    }
}
