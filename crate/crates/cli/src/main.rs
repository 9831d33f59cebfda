mod worksheet;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ccalc_core::ksymbols::Preset;
use worksheet::{Outcome, WorksheetError};

#[derive(Debug, Parser)]
#[command(
    name = "ccalc",
    version,
    about = "Exact Chow-ring, Milnor K-theory and Galois-orbit worksheets"
)]
struct Cli {
    /// Emit a JSON record instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Field model for K-theory computations.
    #[arg(long, global = true, env = "CCALC_MODEL", default_value = "euclidean")]
    model: Preset,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Class of the locus of singular plane curves of degree d.
    Classz {
        #[arg(short = 'd')]
        d: u32,
    },
    /// Class of the closure of the binodal locus, degree d >= 4.
    Classd {
        #[arg(short = 'd')]
        d: u32,
    },
    /// r = gcd(d(d-1)^2, 3(d-2)).
    Rvalue {
        #[arg(short = 'd')]
        d: u32,
    },
    /// Galois-Stiefel-Whitney classes of an etale algebra.
    Sw {
        #[arg(long)]
        algebra: String,
        #[arg(long = "max-degree")]
        max_degree: Option<usize>,
    },
    /// Galois orbits on the 27 lines of the blown-up plane.
    Lines {
        /// Generators of the splitting field, two or three.
        #[arg(long, value_delimiter = ',', default_value = "a,b")]
        gens: Vec<String>,
        #[arg(long = "verify-position")]
        verify_position: bool,
        #[arg(long)]
        certificate: bool,
    },
    /// Brauer group of a moduli stack.
    Brauer {
        #[arg(long)]
        stack: ccalc_core::groups::Stack,
        #[arg(short = 'd')]
        d: Option<u32>,
        #[arg(long = "char", default_value_t = 0)]
        characteristic: u64,
        /// Base field algebraically closed (always the case for xd).
        #[arg(long)]
        closed: bool,
    },
    /// Residue of a K-theory element at a divisor `name = 0`.
    Residue {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        at: String,
    },
    /// Every oracle check; exits 0 iff all match.
    CheckAll,
}

fn main() -> ExitCode {
    let json_requested = std::env::args().any(|a| a == "--json");
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if json_requested {
                eprintln!("{}", worksheet::error_json("usage", &e.to_string()));
            } else {
                let _ = e.print();
            }
            return ExitCode::from(2);
        }
    };
    let outcome = match cli.command {
        Command::Classz { d } => worksheet::classz(d),
        Command::Classd { d } => worksheet::classd(d),
        Command::Rvalue { d } => worksheet::rvalue(d),
        Command::Sw {
            algebra,
            max_degree,
        } => worksheet::sw(&algebra, cli.model, max_degree),
        Command::Lines {
            gens,
            verify_position,
            certificate,
        } => worksheet::lines(&gens, verify_position, certificate),
        Command::Brauer {
            stack,
            d,
            characteristic,
            closed,
        } => worksheet::brauer(stack, d, characteristic, closed),
        Command::Residue { expr, at } => worksheet::residue(&expr, &at, cli.model),
        Command::CheckAll => worksheet::check_all(),
    };
    report(outcome, cli.json)
}

fn report(outcome: Result<Outcome, WorksheetError>, json: bool) -> ExitCode {
    match outcome {
        Ok(out) => {
            if json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&out.record).expect("serializable")
                );
            } else {
                print!("{}", out.text);
            }
            if out.record.oracle.as_ref().is_some_and(|o| !o.matches) {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            if json {
                eprintln!("{}", worksheet::error_json("computation", &e.0));
            } else {
                eprintln!("error: {}", e.0);
            }
            ExitCode::from(1)
        }
    }
}
