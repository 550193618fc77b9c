use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use liouvillian::frontend::{
    corpus_exit_code, emit_report, parse_binding, read_equation_source, run_corpus, run_single,
    single_exit_code, Format,
};
use liouvillian::SearchConfig;

/// Liouvillian integrating factors for dy/dx = M(x, y)/N(x, y).
#[derive(Parser)]
#[command(name = "liouvillian", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for an integrating factor of one equation.
    Solve {
        /// Equation text, or a file containing it.
        equation: String,
        /// Bind a parameter to a rational, e.g. `a=3/2`. Repeatable.
        #[arg(long = "bind", value_name = "NAME=RATIONAL")]
        bind: Vec<String>,
        #[arg(long, value_name = "N", default_value_t = 1)]
        max_eigen_degree: u32,
        #[arg(long, value_name = "N", default_value_t = 2)]
        max_q_degree: u32,
        #[arg(long, value_name = "N")]
        max_p_degree: Option<u32>,
        #[arg(long, value_name = "N", default_value_t = 100_000)]
        branch_cap: u64,
        /// Wall-clock budget in seconds.
        #[arg(long, value_name = "SECS", default_value_t = 120.0)]
        timeout: f64,
        /// Evaluate branches on all cores.
        #[arg(long)]
        parallel: bool,
        #[arg(long, value_name = "json|text", default_value = "text")]
        output: Format,
    },
    /// Run every entry of a corpus file.
    Corpus {
        path: PathBuf,
        #[arg(long, value_name = "json|text", default_value = "text")]
        output: Format,
    },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(1)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // Usage errors are input errors; help and version are not.
            return ExitCode::from(u8::from(e.use_stderr()));
        }
    };
    match cli.command {
        Command::Solve {
            equation,
            bind,
            max_eigen_degree,
            max_q_degree,
            max_p_degree,
            branch_cap,
            timeout,
            parallel,
            output,
        } => {
            let mut bindings = BTreeMap::new();
            for b in &bind {
                match parse_binding(b) {
                    Ok((name, value)) => {
                        bindings.insert(name, value);
                    }
                    Err(e) => return fail(e),
                }
            }
            if !(timeout.is_finite() && timeout >= 0.0) {
                return fail("--timeout must be a non-negative number of seconds");
            }
            let cfg = SearchConfig {
                max_eigen_degree,
                max_q_degree,
                max_p_degree,
                branch_cap,
                time_budget: Duration::from_secs_f64(timeout),
                parallel,
                ..SearchConfig::default()
            };
            let text = match read_equation_source(&equation) {
                Ok(t) => t,
                Err(e) => return fail(e),
            };
            match run_single(&text, &bindings, &cfg) {
                Ok(report) => {
                    print!("{}", emit_report(&report, output));
                    ExitCode::from(single_exit_code(&report) as u8)
                }
                Err(e) => fail(e),
            }
        }
        Command::Corpus { path, output } => match run_corpus(&path) {
            Ok(report) => {
                print!("{}", emit_report(&report, output));
                ExitCode::from(corpus_exit_code(&report) as u8)
            }
            Err(e) => fail(e),
        },
    }
}
