mod commands;
mod report;

use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use spineless::spine::StarMode;

use commands::SearchCaps;

#[derive(Parser, Debug)]
#[command(
    name = "spineless",
    version,
    about = "Decision procedures and witnesses for residuated-lattice equations"
)]
struct Cli {
    /// Print the report as single-line JSON.
    #[arg(long, global = true)]
    json: bool,

    /// Write the report (or, for build-mk, the machine text) to this file.
    #[arg(short = 'o', long = "output", global = true)]
    output: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Single,
    Double,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify an equation: simple form, mingly, expansive, prespinal.
    Analyze { equation: String },
    /// Reduce an equation to a simple equation.
    Linearize { equation: String },
    /// Search for an accepting computation of a machine.
    Simulate {
        machine: String,
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 100)]
        depth: usize,
        #[arg(long, default_value_t = 100)]
        reg: u64,
        #[arg(long, default_value_t = 16)]
        width: usize,
    },
    /// Simulate a machine with the extra steps generated by an equation.
    AmbientSimulate {
        machine: String,
        #[arg(long)]
        equation: String,
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 100)]
        depth: usize,
        #[arg(long, default_value_t = 100)]
        reg: u64,
        #[arg(long, default_value_t = 16)]
        width: usize,
        #[arg(long, default_value_t = 2)]
        degree_cap: u64,
    },
    /// Compare bounded acceptance with and without an equation.
    Admissibility {
        machine: String,
        #[arg(long)]
        equation: String,
        #[arg(long, default_value_t = 12)]
        reg: u64,
        #[arg(long, default_value_t = 3)]
        degree_cap: u64,
    },
    /// Build the machine M_K from a two-register machine.
    BuildMk {
        machine: String,
        #[arg(short = 'K', long = "K")]
        k: u64,
    },
    /// Compute a star falsifier for a spinal equation.
    FalsifyStar {
        equation: String,
        #[arg(short = 'K', long = "K")]
        k: u64,
    },
    /// Search for a counterexample to a star inequality.
    StarSearch {
        equation: String,
        #[arg(short = 'K', long = "K")]
        k: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Single)]
        mode: Mode,
        #[arg(long, default_value_t = 10)]
        bound: u64,
    },
    /// Compare the algebra and frame conditions on random frames.
    FrameCheck {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
    /// Print the acceptance quasiequation of a machine and an ID.
    AccQuasieq {
        machine: String,
        #[arg(long)]
        init: String,
    },
    /// Print the equation encoding acceptance with exponent n.
    EpsilonSn {
        machine: String,
        #[arg(long)]
        init: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
}

fn run(cli: &Cli) -> commands::CmdResult {
    match &cli.command {
        Command::Analyze { equation } => commands::analyze(equation),
        Command::Linearize { equation } => commands::linearize(equation),
        Command::Simulate {
            machine,
            init,
            depth,
            reg,
            width,
        } => commands::simulate(
            machine,
            init,
            SearchCaps {
                depth: *depth,
                reg: *reg,
                width: *width,
            },
        ),
        Command::AmbientSimulate {
            machine,
            equation,
            init,
            depth,
            reg,
            width,
            degree_cap,
        } => commands::ambient_simulate(
            machine,
            equation,
            init,
            SearchCaps {
                depth: *depth,
                reg: *reg,
                width: *width,
            },
            *degree_cap,
        ),
        Command::Admissibility {
            machine,
            equation,
            reg,
            degree_cap,
        } => commands::admissibility(machine, equation, *reg, *degree_cap),
        Command::BuildMk { machine, k } => commands::build_mk(machine, *k, cli.output.as_deref()),
        Command::FalsifyStar { equation, k } => commands::falsify(equation, *k),
        Command::StarSearch {
            equation,
            k,
            mode,
            bound,
        } => {
            let mode = match mode {
                Mode::Single => StarMode::Single,
                Mode::Double => StarMode::Double,
            };
            commands::star_search(equation, *k, mode, *bound)
        }
        Command::FrameCheck { seed, count } => commands::frame_check(*seed, *count),
        Command::AccQuasieq { machine, init } => commands::acc_quasieq(machine, init),
        Command::EpsilonSn { machine, init, n } => commands::epsilon_sn(machine, init, *n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(report) => {
            let text = report.render(cli.json);
            for line in report.summary() {
                eprintln!("{}", line);
            }
            match (&cli.output, &cli.command) {
                (Some(path), cmd) if !matches!(cmd, Command::BuildMk { .. }) => {
                    if let Err(e) = fs::write(path, format!("{}\n", text)) {
                        eprintln!("error: cannot write {}: {}", path, e);
                        return ExitCode::from(1);
                    }
                }
                _ => {
                    let _ = writeln!(std::io::stdout().lock(), "{}", text);
                }
            }
            ExitCode::SUCCESS
        }
        Err(msg) => {
            eprintln!("error: {}", msg);
            ExitCode::from(1)
        }
    }
}
