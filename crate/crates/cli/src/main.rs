use std::process::ExitCode;

use chang_cli::commands::{self, Failure, Output, ScriptChoice};
use chang_core::expr::Env;
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "chang", version, about = "Smash products of Chang complexes")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose X ^ Y into a wedge and verify it.
    Smash { x: String, y: String },
    /// Integral homology.
    Homology { x: String },
    /// Mod 2 cohomology; --sq also lists Sq1, Sq2, Sq4.
    Cohomology {
        #[arg(long)]
        sq: bool,
        x: String,
    },
    /// Spanier-Whitehead dual inside its duality window.
    Dual {
        x: String,
        /// Bottom dimension n of the window, when it cannot be inferred.
        #[arg(long)]
        window: Option<i32>,
    },
    /// The homotopy group pi_N.
    Pi { n: i32, x: String },
    /// The group [susp(deg, X), Y].
    Homgroup {
        x: String,
        y: String,
        #[arg(long, default_value_t = 0)]
        deg: i32,
    },
    /// Run row and column moves on a recorded matrix and split its cone.
    Reduce {
        matrix: String,
        #[arg(long, conflicts_with = "auto")]
        script: Option<String>,
        /// Use the recorded script whose condition fits the parameters.
        #[arg(long)]
        auto: bool,
        /// Matrix parameter, as name=value. Repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
    },
    /// Check that W is a plausible decomposition of X ^ Y.
    Verify { x: String, y: String, w: String },
    /// Decision table diagnostics.
    Table {
        #[arg(long)]
        branch_coverage: bool,
    },
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or("expected name=value")?;
    Ok((k.trim().to_string(), v.trim().parse().map_err(|e| format!("{v}: {e}"))?))
}

fn run(cli: Cli) -> Result<Output, Failure> {
    match cli.command {
        Command::Smash { x, y } => commands::smash(&x, &y),
        Command::Homology { x } => commands::homology(&x),
        Command::Cohomology { sq, x } => commands::cohomology(&x, sq),
        Command::Dual { x, window } => commands::dual(&x, window),
        Command::Pi { n, x } => commands::pi(n, &x),
        Command::Homgroup { x, y, deg } => commands::homgroup(&x, &y, deg),
        Command::Reduce { matrix, script, auto, params } => {
            let choice = match (script, auto) {
                (Some(s), _) => ScriptChoice::File(s),
                (None, true) => ScriptChoice::Auto,
                (None, false) => ScriptChoice::None,
            };
            commands::reduce(&matrix, choice, &params.into_iter().collect::<Env>())
        }
        Command::Verify { x, y, w } => commands::verify(&x, &y, &w),
        Command::Table { branch_coverage } => {
            if branch_coverage {
                commands::branch_coverage()
            } else {
                Err(Failure::usage("table: pass --branch-coverage"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = cli.format;
    match run(cli) {
        Ok(out) => {
            match format {
                Format::Text => print!("{}", out.text),
                Format::Structured => println!("{}", serde_json::to_string_pretty(&out.json).unwrap()),
            }
            ExitCode::from(out.code as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
    }
}
