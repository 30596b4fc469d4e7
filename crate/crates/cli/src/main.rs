use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mereovc::data_model::LoadOptions;
use mereovc::laws::{selftest, SelftestConfig};
use mereovc::mistakes::localize;
use mereovc::predictor::{run_trial, PredictionConfig, TieStrategy};
use mereovc::session::evaluate_loo;
use mereovc::syllogistic::{
    catalog_name, enumerate_moods, is_valid_mood, lookup_mood, moods_csv, Mood,
};
use mereovc::{DecisionSystem, Epsilon, Error, ErrorKind, Mode, NewObject};

#[derive(Parser)]
#[command(
    name = "mereovc",
    version,
    about = "VC-weighted decision prediction over decision tables"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Predict the decision of one new object.
    Predict {
        #[command(flatten)]
        table: TableArgs,
        #[command(flatten)]
        omega: OmegaArgs,
        /// The expert decision; enables rewards, winner and regret.
        #[arg(long)]
        expert: Option<f64>,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Leave-one-out evaluation over every row of the table.
    Evaluate {
        #[command(flatten)]
        table: TableArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        #[arg(long, value_enum, default_value_t = Output::Json)]
        output: Output,
    },
    /// Localize the expert decision by shrinking neighborhoods.
    Localize {
        #[command(flatten)]
        table: TableArgs,
        #[command(flatten)]
        omega: OmegaArgs,
        #[arg(long)]
        expert: f64,
        #[command(flatten)]
        protocol: ProtocolArgs,
    },
    /// Syllogistic moods.
    Moods {
        #[command(subcommand)]
        command: MoodsCommand,
    },
    /// Algebra and t-norm law suites.
    Algebra {
        #[command(subcommand)]
        command: AlgebraCommand,
    },
}

#[derive(Subcommand)]
enum MoodsCommand {
    /// All 256 moods as CSV.
    List,
    /// Decide one mood, given as an expression or a catalog name.
    Check { expr: String },
}

#[derive(Subcommand)]
enum AlgebraCommand {
    /// Run the law suites and print a summary.
    Selftest {
        /// Atoms of the exhaustively checked uniform universe.
        #[arg(long, default_value_t = 4)]
        atoms: usize,
        /// Number of random weighted universes.
        #[arg(long, default_value_t = 1000)]
        universes: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct TableArgs {
    /// Decision table (CSV with a header row).
    table: PathBuf,
    /// Decision column; defaults to the last column.
    #[arg(long)]
    decision: Option<String>,
    #[arg(long, default_value_t = ',')]
    delimiter: char,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct OmegaArgs {
    /// New object as `f1=v1,f2=v2,...`.
    #[arg(long)]
    omega: Option<String>,
    /// New object as a file with a header row and one value row.
    #[arg(long)]
    omega_file: Option<PathBuf>,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Rational threshold such as `1/2`.
    #[arg(long, default_value = "1")]
    epsilon: Epsilon,
    #[arg(long, default_value_t = 1)]
    delta: u64,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = TieArg::Lowest)]
    tie: TieArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Localization stops once every radius is below this.
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    AtLeast,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Random,
    Lowest,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

impl ProtocolArgs {
    fn config(&self) -> PredictionConfig {
        PredictionConfig {
            epsilon: self.epsilon,
            delta: self.delta,
            mode: match self.mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::AtLeast => Mode::AtLeast,
            },
            tie_strategy: match self.tie {
                TieArg::Random => TieStrategy::Random,
                TieArg::Lowest => TieStrategy::LowestObjectId,
            },
            seed: self.seed,
            eta: self.eta,
            radius_tolerance: self.tolerance,
        }
    }
}

impl TableArgs {
    fn delimiter(&self) -> Result<u8, Error> {
        u8::try_from(self.delimiter)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| Error::Usage(format!("delimiter `{}` is not ASCII", self.delimiter)))
    }

    fn load(&self) -> Result<DecisionSystem, Error> {
        let opts = LoadOptions {
            delimiter: self.delimiter()?,
            decision_column: self.decision.clone(),
        };
        DecisionSystem::from_reader(open(&self.table)?, &opts)
    }
}

impl OmegaArgs {
    fn load(&self, delimiter: u8) -> Result<NewObject, Error> {
        match (&self.omega, &self.omega_file) {
            (Some(inline), _) => NewObject::parse_inline(inline),
            (None, Some(path)) => NewObject::from_reader(open(path)?, delimiter),
            (None, None) => Err(Error::Usage("give --omega or --omega-file".into())),
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Error> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize") + "\n"
}

fn run(cli: Cli) -> Result<(String, bool), Error> {
    match cli.command {
        Command::Predict {
            table,
            omega,
            expert,
            protocol,
        } => {
            let system = table.load()?;
            let omega = omega.load(table.delimiter()?)?;
            let trial = run_trial(&system, &omega, expert, &protocol.config())?;
            Ok((json(&trial), true))
        }
        Command::Evaluate {
            table,
            protocol,
            output,
        } => {
            let report = evaluate_loo(&table.load()?, &protocol.config())?;
            let text = match output {
                Output::Json => json(&report),
                Output::Csv => report.to_csv()?,
            };
            Ok((text, true))
        }
        Command::Localize {
            table,
            omega,
            expert,
            protocol,
        } => {
            let system = table.load()?;
            let omega = omega.load(table.delimiter()?)?;
            let config = protocol.config();
            let trial = run_trial(&system, &omega, Some(expert), &config)?;
            Ok((json(&localize(&trial, expert, &config)?), true))
        }
        Command::Moods {
            command: MoodsCommand::List,
        } => Ok((moods_csv(&enumerate_moods()), true)),
        Command::Moods {
            command: MoodsCommand::Check { expr },
        } => {
            let mood = match expr.parse::<Mood>() {
                Ok(m) => m,
                Err(parse_error) => lookup_mood(&expr).map_err(|_| parse_error)?,
            };
            let v = is_valid_mood(&mood);
            let mut out = format!("{mood}: {}", if v.valid { "valid" } else { "invalid" });
            if let Some(name) = catalog_name(&mood) {
                out.push_str(&format!(" ({name})"));
            }
            if let Some(m) = v.countermodel {
                out.push_str(&format!("\ncountermodel: {m}"));
            }
            Ok((out + "\n", true))
        }
        Command::Algebra {
            command:
                AlgebraCommand::Selftest {
                    atoms,
                    universes,
                    seed,
                },
        } => {
            let report = selftest(&SelftestConfig {
                atoms,
                random_universes: universes,
                seed,
                ..SelftestConfig::default()
            })?;
            let mut out = String::new();
            for (label, r) in [
                ("exhaustive", &report.exhaustive),
                ("sampled", &report.sampled),
            ] {
                let failed = r.failures().count();
                out.push_str(&format!(
                    "{label}: {} laws, {} checks, {} failed\n",
                    r.outcomes.len(),
                    r.total_checks(),
                    failed
                ));
                for f in r.failures() {
                    out.push_str(&format!(
                        "  FAIL {}: {}\n",
                        f.law,
                        f.counterexample.as_deref().unwrap_or_default()
                    ));
                }
            }
            for (check, failure) in &report.tnorm {
                match failure {
                    None => out.push_str(&format!("tnorm: {check}: pass\n")),
                    Some(f) => out.push_str(&format!("tnorm: {check}: FAIL {f}\n")),
                }
            }
            let passed = report.passed();
            out.push_str(if passed {
                "all checks passed\n"
            } else {
                "some checks failed\n"
            });
            Ok((out, passed))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.kind() {
        ErrorKind::Io => 1,
        ErrorKind::Validation => 2,
        ErrorKind::Domain => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, passed)) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
