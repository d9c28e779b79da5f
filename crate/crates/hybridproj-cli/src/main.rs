use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hybridproj_cli::experiment::{load_experiment, run_experiment};
use hybridproj_cli::generate::{generate_instance, render_json, Template};
use hybridproj_cli::report;
use hybridproj_cli::{HarnessError, EXIT_OK, EXIT_SOLVER, EXIT_VALIDATION};

/// Hybrid projection solvers for common solutions of equilibrium,
/// variational-inequality, and fixed-point problems.
#[derive(Parser)]
#[command(name = "hybridproj", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one or more experiment files, writing trace and summary outputs.
    Run {
        /// Problem-definition JSON files.
        files: Vec<PathBuf>,
        /// Override the outer tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Override the iteration cap.
        #[arg(long)]
        max_iters: Option<usize>,
        /// Trace CSV path (single input file only).
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Suppress per-run console output.
        #[arg(long)]
        quiet: bool,
    },
    /// Generate a seeded problem file with a planted common solution.
    Gen {
        /// two-ep | two-vi | fp-only | full-theorem1 | multi-q
        #[arg(long)]
        template: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Load a problem file and check every instance invariant.
    Verify { file: PathBuf },
    /// Run a module property suite.
    Props {
        /// geometry | sets | catalog | resolvent | solver
        #[arg(long)]
        module: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Suppress per-property lines; report only the verdict.
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run {
            files,
            tol,
            max_iters,
            trace,
            quiet,
        } => cmd_run(&files, tol, max_iters, trace.as_deref(), quiet),
        Command::Gen {
            template,
            seed,
            out,
        } => cmd_gen(&template, seed, &out),
        Command::Verify { file } => cmd_verify(&file),
        Command::Props {
            module,
            seed,
            quiet,
        } => cmd_props(&module, seed, quiet),
    };
    ExitCode::from(code as u8)
}

fn cmd_run(
    files: &[PathBuf],
    tol: Option<f64>,
    max_iters: Option<usize>,
    trace_override: Option<&Path>,
    quiet: bool,
) -> i32 {
    if files.is_empty() {
        eprintln!("error: no input files");
        return EXIT_VALIDATION;
    }
    if trace_override.is_some() && files.len() > 1 {
        eprintln!("error: --trace applies to a single input file");
        return EXIT_VALIDATION;
    }
    let mut worst = EXIT_OK;
    for file in files {
        let code = run_one(file, tol, max_iters, trace_override, quiet);
        worst = worst.max(code);
    }
    worst
}

fn run_one(
    file: &Path,
    tol: Option<f64>,
    max_iters: Option<usize>,
    trace_override: Option<&Path>,
    quiet: bool,
) -> i32 {
    let mut spec = match load_experiment(file) {
        Ok(spec) => spec,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return EXIT_VALIDATION;
        }
    };
    if let Some(t) = tol {
        spec.config.tol = t;
    }
    if let Some(m) = max_iters {
        spec.config.max_iters = m;
    }

    let trace_path = trace_override
        .map(Path::to_path_buf)
        .or_else(|| spec.trace_path.clone())
        .unwrap_or_else(|| file.with_extension("trace.csv"));
    let summary_path = spec
        .summary_path
        .clone()
        .unwrap_or_else(|| file.with_extension("summary.txt"));

    let outcome = match run_experiment(&spec) {
        Ok(outcome) => outcome,
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            return match e {
                HarnessError::Solver(_) => EXIT_SOLVER,
                _ => EXIT_VALIDATION,
            };
        }
    };

    if let Some(baseline) = &outcome.baseline {
        let csv = report::baseline_csv(baseline);
        let summary =
            report::baseline_summary_text(spec.runner.as_str(), baseline, outcome.exit_code);
        if let Err(e) = report::write_text(&trace_path, &csv)
            .and_then(|_| report::write_text(&summary_path, &summary))
        {
            eprintln!("{}: {e}", file.display());
            return EXIT_VALIDATION;
        }
        if !quiet {
            print!("{summary}");
        }
        return outcome.exit_code;
    }

    let result = outcome.result.expect("hybrid runs carry a result");
    let trace = outcome.trace.expect("hybrid runs carry a trace");
    let oracle = outcome.oracle.expect("hybrid runs carry an oracle report");

    let csv = report::trace_csv(&trace);
    let summary = report::summary_text(
        spec.runner.as_str(),
        &result,
        &trace,
        &oracle,
        outcome.exit_code,
    );
    if let Err(e) = report::write_text(&trace_path, &csv)
        .and_then(|_| report::write_text(&summary_path, &summary))
    {
        eprintln!("{}: {e}", file.display());
        return EXIT_VALIDATION;
    }
    if !quiet {
        println!(
            "{}",
            report::console_line(&file.display().to_string(), &result, &oracle)
        );
    }
    if let Some(msg) = &result.failure_message {
        eprintln!("{}: {msg}", file.display());
    }
    outcome.exit_code
}

fn cmd_gen(template: &str, seed: u64, out: &Path) -> i32 {
    let template = match Template::parse(template) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    let file = match generate_instance(template, seed) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_VALIDATION;
        }
    };
    match report::write_text(out, &render_json(&file)) {
        Ok(()) => {
            println!("wrote {}", out.display());
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_VALIDATION
        }
    }
}

fn cmd_verify(file: &Path) -> i32 {
    match load_experiment(file) {
        Ok(spec) => {
            let inst = &spec.instance;
            println!(
                "valid: {} (runner={}, dim={}, d={}, m={}, q={})",
                file.display(),
                spec.runner.as_str(),
                inst.space.dim(),
                inst.fixed_point_maps.len(),
                inst.ism_operators.len(),
                inst.equilibrium_pairs.len()
            );
            EXIT_OK
        }
        Err(e) => {
            eprintln!("{}: {e}", file.display());
            EXIT_VALIDATION
        }
    }
}

fn cmd_props(module: &str, seed: u64, quiet: bool) -> i32 {
    let modules: Vec<&str> = if module == "all" {
        vec!["geometry", "sets", "catalog", "resolvent", "solver"]
    } else {
        vec![module]
    };
    let mut all_passed = true;
    for module in modules {
        let reports = match hybridproj::props::suite_by_name(module, seed) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return EXIT_VALIDATION;
            }
        };
        for report in &reports {
            all_passed &= report.passed();
            if !quiet {
                println!(
                    "[{}] {module}: {} (samples={}, violations={}, worst_margin={:.3e})",
                    if report.passed() { "PASS" } else { "FAIL" },
                    report.name,
                    report.samples,
                    report.violations,
                    report.worst_margin
                );
            }
        }
    }
    if all_passed {
        println!("all properties passed");
        EXIT_OK
    } else {
        println!("property violations detected");
        EXIT_SOLVER
    }
}
