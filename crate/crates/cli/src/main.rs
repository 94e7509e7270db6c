use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clke::group::{GroupKind, GroupParams};
use clke::handshake::Variant;
use rand_core::{OsRng, RngCore};

mod commands;

#[derive(Parser)]
#[command(
    name = "clke",
    version,
    about = "Certificateless key exchange: handshakes, the leakage attack, and reachability analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// toy or production
    #[arg(long)]
    group: Option<GroupKind>,
    /// TOML group config; --group overrides its `group` field
    #[arg(long)]
    config: Option<PathBuf>,
    /// original or improved
    #[arg(long, default_value_t = Variant::Improved)]
    variant: Variant,
    /// Seed for every random choice; a fresh one is drawn and printed if absent
    #[arg(long)]
    seed: Option<u64>,
    /// Also write the command's artifact to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run Setup and extract partial private keys into a key file
    Kgc {
        #[command(flatten)]
        common: Common,
        /// Comma-separated identities
        #[arg(long, default_value = "alice,bob", value_delimiter = ',')]
        ids: Vec<String>,
    },
    /// Run both roles of one key exchange
    Handshake {
        #[command(flatten)]
        common: Common,
        /// Verify every Z exponent with the toy discrete-log oracle
        #[arg(long)]
        check_exponents: bool,
        /// Feed the messages of this transcript to freshly regenerated
        /// parties (use the seed that produced it)
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Reproduce the leakage attack inside the security game
    Attack {
        #[command(flatten)]
        common: Common,
        /// Exhaustively search attacker-side combinations (toy group only)
        #[arg(long)]
        brute_check: bool,
    },
    /// Per-Z reachability under a leakage profile
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Built-in profile name or a reveal list such as z_A,z_B,e_A,S_B
        #[arg(long, default_value = "forward-secrecy")]
        profile: String,
    },
}

#[derive(Debug)]
pub enum Failure {
    /// Exit 2.
    Usage(String),
    /// Exit 1, with the report that exposed it.
    Anomaly(String),
}

impl From<clke::Error> for Failure {
    fn from(e: clke::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// What a command produced: text for stdout and whether it was expected.
pub struct Outcome {
    pub text: String,
    pub artifact: Option<String>,
    pub expected: bool,
}

impl Common {
    pub fn params(&self) -> Result<GroupParams, Failure> {
        let mut params = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
                GroupParams::parse(&text)?
            }
            None => GroupParams::toy(),
        };
        if let Some(kind) = self.group {
            if kind != params.group {
                params = match kind {
                    GroupKind::Toy => GroupParams::toy(),
                    GroupKind::Production => GroupParams::production(),
                };
            }
        }
        Ok(params)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or_else(|| OsRng.next_u64())
    }
}

fn run(cli: Cli) -> Result<(Outcome, Option<PathBuf>), Failure> {
    Ok(match cli.command {
        Command::Kgc { common, ids } => (commands::kgc(&common, &ids)?, common.out),
        Command::Handshake {
            common,
            check_exponents,
            replay,
        } => (
            commands::handshake(&common, check_exponents, replay.as_deref())?,
            common.out,
        ),
        Command::Attack {
            common,
            brute_check,
        } => (commands::attack(&common, brute_check)?, common.out),
        Command::Analyze { common, profile } => (commands::analyze(&common, &profile)?, common.out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((outcome, out)) => {
            print!("{}", outcome.text);
            if let Some(path) = out {
                let body = outcome.artifact.as_deref().unwrap_or(&outcome.text);
                if let Err(e) = fs::write(&path, body) {
                    eprintln!("error: {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            if outcome.expected {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Anomaly(text)) => {
            print!("{text}");
            ExitCode::from(1)
        }
    }
}
