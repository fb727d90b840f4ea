//! `dyncoh`: measures, protocol constructions and reproduction suites from the command line.
//!
//! Exit codes: 0 pass, 1 input error, 2 solver failure, 3 certificate failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use dyncoh::conic::SolverSettings;

#[derive(Parser, Debug)]
#[command(name = "dyncoh", version, about = "Dynamic coherence: channel monotones, superchannel constructions and certificates")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here (atomically) instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Solver tolerance.
    #[arg(long, global = true, env = "DYNCOH_SOLVER_TOL")]
    pub tol: Option<f64>,
    /// Solver iteration limit.
    #[arg(long, global = true)]
    pub max_iter: Option<usize>,
    /// Seed for sampled inputs and random channels.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

impl Global {
    pub fn solver(&self) -> Result<SolverSettings, commands::CliError> {
        let mut s = SolverSettings::default();
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return Err(commands::CliError::Input(format!("solver tolerance {t} outside (0, 1)")));
            }
            s.tol = t;
        }
        if let Some(m) = self.max_iter {
            s.max_iter = m;
        }
        Ok(s)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ClassArg {
    Misc,
    Disc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MeasureKind {
    /// Log-robustness (smoothed when --eps > 0).
    Lr,
    /// Dephasing log-robustness (smoothed when --eps > 0).
    Lrdelta,
    /// Generalised channel robustness 2^LR - 1.
    Cr,
    /// Max-relative entropy between the Choi states of --a and --b.
    Dmax,
    /// Half diamond distance between --a and --b.
    Diamond,
    /// Hypothesis-testing relative entropy between the Choi states of --a and --b.
    Htest,
    /// Hypothesis-testing coherence lower bound (--class selects the dephasing variant).
    Ch,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum PropertyArg {
    Admissible,
    Misc,
    Disc,
    DeltaMisc,
}

/// A channel given as a builder shorthand (`--builder qft:3`) or a JSON spec file.
#[derive(Args, Debug, Clone)]
pub struct ChannelInput {
    /// Builder shorthand, e.g. qft:3, dephasing:2, replacement:2, deterministic:2:0,0, random:2:7.
    #[arg(long)]
    pub builder: Option<String>,
    /// Channel spec: a JSON file, or a builder shorthand.
    pub spec: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a coherence monotone or distance.
    Measure {
        kind: MeasureKind,
        #[command(flatten)]
        channel: ChannelInput,
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = ClassArg::Misc)]
        class: ClassArg,
        /// Haar-random inputs added to the maximally entangled one (ch only).
        #[arg(long, default_value_t = 64)]
        inputs: usize,
    },
    /// One-shot coherence cost with the explicit QFT-consuming superchannel.
    Cost {
        #[command(flatten)]
        channel: ChannelInput,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        /// Also write the constructed superchannel spec here.
        #[arg(long)]
        emit_superchannel: Option<PathBuf>,
    },
    /// Upper bound on one-shot distillation.
    DistillBound {
        #[command(flatten)]
        channel: ChannelInput,
        #[arg(long, value_enum)]
        class: ClassArg,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long, default_value_t = 64)]
        inputs: usize,
    },
    /// Catalytic cost under delta-MISC with a QFT catalyst.
    Catalytic {
        #[command(flatten)]
        channel: ChannelInput,
        #[arg(long, default_value_t = 0.0)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        emit_superchannel: Option<PathBuf>,
    },
    /// Certify a superchannel spec against a property.
    Verify {
        #[arg(long, value_enum)]
        property: PropertyArg,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Superchannel JSON spec file.
        superchannel: PathBuf,
    },
    /// Run reproduction suites (thm1..thm5, appendix-a..c, all).
    Reproduce {
        suite: String,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<usize>>,
        /// Comma-separated smoothing parameters.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        #[arg(long, default_value_t = 2)]
        trials: usize,
        #[arg(long, default_value_t = 16)]
        inputs: usize,
    },
    /// Channel utilities.
    Channel {
        #[command(subcommand)]
        action: ChannelAction,
    },
}

#[derive(Subcommand, Debug)]
pub enum ChannelAction {
    /// Dimensions, class membership and closed-form monotones of a channel.
    Info {
        #[command(flatten)]
        channel: ChannelInput,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(outcome) => {
            if let Err(e) = output::emit(&outcome, &cli.global) {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
