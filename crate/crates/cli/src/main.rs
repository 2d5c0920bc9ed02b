use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::Value;

use avmod::atlas::{atlas, glue_check, TransitionRule};
use avmod::gk::{growth_exponent, growth_series, DEFAULT_TAIL};
use avmod::modules::{minimal_differentiability, Differentiability};
use avmod_cli::{
    all_passed, parse_frame, parse_scenarios, rep_summary, resolve_module, run_all, run_scenarios, show_error, to_json,
    Report, RunOptions,
};

#[derive(Parser)]
#[command(name = "avmod", version, about = "Exact checks for AV-modules, jets and chart gluing")]
struct Cli {
    /// Also write the machine-readable result to this file.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Number of randomized samples for property checks.
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,
    /// Record per-check wall time in reports.
    #[arg(long, global = true)]
    timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in scenario suite.
    Verify {
        /// Only scenarios whose name or checks contain this string.
        #[arg(long)]
        filter: Option<String>,
    },
    /// Run the scenarios in a JSON file.
    Scenario { file: PathBuf },
    /// Minimal N for which a module is N-differentiable.
    DiffOrder {
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = 4)]
        nmax: u32,
        #[arg(long, default_value_t = 6)]
        degree: u32,
    },
    /// Growth series and exponent of a module under a frame; CSV on stdout.
    Gk {
        #[arg(long)]
        module: String,
        /// `weyl` or `jets:<s>`.
        #[arg(long, default_value = "weyl")]
        frame: String,
        #[arg(long, default_value_t = 24)]
        lmax: usize,
    },
    /// Casimir scalars, central character and exterior type of a rep.
    Rep {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = 2)]
        casimirs: usize,
    },
    /// Cocycle and intertwining checks for a transition rule on an atlas.
    Glue {
        #[arg(long)]
        atlas: String,
        /// `section`, `rep:<expr>`, `det:<lambda>`, `charged:<lambda>` or `jet:<s>`.
        #[arg(long)]
        rule: String,
        #[arg(long, default_value_t = 3)]
        degree: u32,
    },
}

fn write_json(path: &Option<PathBuf>, value: &impl serde::Serialize) -> Result<(), String> {
    if let Some(p) = path {
        std::fs::write(p, to_json(value) + "\n").map_err(|e| format!("error: cannot write {}: {e}", p.display()))?;
    }
    Ok(())
}

fn print_reports(reports: &[Report]) {
    for r in reports {
        println!("{}", r.summary_line());
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!("{} scenarios, {} passed, {} failed", reports.len(), reports.len() - failed, failed);
}

fn run(cli: &Cli) -> Result<bool, String> {
    let opts = RunOptions { seed: cli.seed, samples: cli.samples, timings: cli.timings };
    match &cli.command {
        Command::Verify { filter } => {
            let reports = run_all(filter.as_deref(), &opts).map_err(|e| show_error(&e, None))?;
            print_reports(&reports);
            write_json(&cli.json, &reports)?;
            Ok(all_passed(&reports))
        }
        Command::Scenario { file } => {
            let text = std::fs::read_to_string(file).map_err(|e| format!("error: cannot read {}: {e}", file.display()))?;
            let list = parse_scenarios(&text).map_err(|e| show_error(&e, None))?;
            let reports = run_scenarios(&list, &opts).map_err(|e| show_error(&e, None))?;
            print_reports(&reports);
            write_json(&cli.json, &reports)?;
            Ok(all_passed(&reports))
        }
        Command::DiffOrder { module, nmax, degree } => {
            let m = resolve_module(module).map_err(|e| show_error(&e, Some(module)))?;
            let d = minimal_differentiability(m.as_ref(), *nmax, *degree).map_err(|e| show_error(&e, None))?;
            println!("{}: {d}", m.describe());
            write_json(&cli.json, &serde_json::json!({ "module": m.describe(), "result": d.to_string() }))?;
            Ok(matches!(d, Differentiability::Order(_)))
        }
        Command::Gk { module, frame, lmax } => {
            let m = resolve_module(module).map_err(|e| show_error(&e, Some(module)))?;
            let f = parse_frame(frame, m.as_ref()).map_err(|e| show_error(&e, Some(frame)))?;
            let seed = m.basis(0).into_iter().find(|b| !m.is_zero(b)).ok_or("error: zero module")?;
            let series = growth_series(m.as_ref(), &f, &[seed], *lmax, None).map_err(|e| show_error(&e, None))?;
            print!("{}", series.to_csv());
            let fit = growth_exponent(&series, DEFAULT_TAIL).map_err(|e| show_error(&e, None))?;
            eprintln!("exponent {:.4}, residual {:.2e}, offset {}", fit.exponent, fit.residual, fit.offset);
            write_json(&cli.json, &serde_json::json!({ "module": m.describe(), "frame": f.to_string(), "series": series, "fit": fit }))?;
            Ok(true)
        }
        Command::Rep { expr, casimirs } => {
            let v: Value = rep_summary(expr, *casimirs).map_err(|e| show_error(&e, Some(expr)))?;
            println!("{}", to_json(&v));
            write_json(&cli.json, &v)?;
            Ok(true)
        }
        Command::Glue { atlas: name, rule, degree } => {
            let a = atlas(name).map_err(|e| show_error(&e, None))?;
            let r = TransitionRule::parse(rule).map_err(|e| show_error(&e, Some(rule)))?;
            let rep = glue_check(&a, &r, *degree).map_err(|e| show_error(&e, None))?;
            println!("{rep}");
            write_json(&cli.json, &rep)?;
            Ok(rep.passed())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
