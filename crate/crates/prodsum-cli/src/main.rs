use clap::{Parser, Subcommand, ValueEnum};
use prodsum_cli::commands::{self, CliError};
use prodsum_cli::runreport::RunReport;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "prodsum", version, about = "Decide when products and coproducts coincide, with certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for the run report.
    #[arg(long, global = true, value_enum, default_value_t = ReportMode::Text)]
    report: ReportMode,
    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every randomized check.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Proof step budget; also bounds frobenius unit candidates.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ReportMode {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Structural checks against the built-in models.
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Equational reasoning over spec files.
    Chase {
        #[command(subcommand)]
        what: ChaseCommand,
    },
    /// The doubling argument, from hypotheses to contradiction.
    Swindle {
        #[command(subcommand)]
        what: SwindleCommand,
    },
    /// Summary verdicts.
    Verdict {
        #[command(subcommand)]
        what: VerdictCommand,
    },
    /// Corings, comodules, and the frobenius search.
    Coring {
        #[command(subcommand)]
        what: CoringCommand,
    },
    /// Worked demonstrations in the lattice model.
    Demo {
        #[command(subcommand)]
        what: DemoCommand,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Commutative-monoid enrichment on small object catalogs.
    Enrichment {
        /// Restrict to one model (finab or lattice); default is both.
        #[arg(long)]
        model: Option<String>,
    },
    /// Biproduct relations on random pairs and the diagonal sum route.
    Biproduct {
        /// Restrict to one model (finab or lattice); default is both.
        #[arg(long)]
        model: Option<String>,
    },
}

#[derive(Subcommand)]
enum ChaseCommand {
    /// Prove every goal in a spec file.
    Prove { file: PathBuf },
}

#[derive(Subcommand)]
enum SwindleCommand {
    /// Verify the diagrams, derive the absorption identities, then prove the file's goals.
    Run {
        file: PathBuf,
        /// Replay at a finite stage N, or note the symbolic case.
        #[arg(long)]
        truncate: Option<String>,
    },
}

#[derive(Subcommand)]
enum VerdictCommand {
    /// Whether product and coproduct agree for a model and an index regime.
    Finiteness {
        /// finab or lattice.
        #[arg(long)]
        model: String,
        /// A finite stage N or `symbolic`.
        #[arg(long)]
        truncate: Option<String>,
    },
}

#[derive(Subcommand)]
enum CoringCommand {
    /// Check the coring laws on a JSON fixture.
    Check { file: PathBuf },
    /// Search a JSON fixture for a frobenius system.
    Frobenius { file: PathBuf },
    /// Verdict for the regular sum coring over a finite ring.
    Verdict {
        /// Comma-separated cyclic moduli, for example `2` or `2,3`.
        #[arg(long)]
        ring: String,
        /// Number of summands, or `symbolic`.
        #[arg(long)]
        size: String,
    },
}

#[derive(Subcommand)]
enum DemoCommand {
    /// Idempotent addition, invertible homs, and an indexed biproduct.
    Lattice,
    /// A family completed by a finite surrogate of its infinite tail.
    CompletedFamily,
}

fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let seed = cli.seed.unwrap_or(commands::DEFAULT_SEED);
    let budget = commands::resolve_budget(cli.budget, commands::DEFAULT_PROVE_BUDGET);
    let bound = commands::resolve_budget(cli.budget, commands::DEFAULT_SEARCH_BOUND);
    let path_str = |p: &PathBuf| p.to_string_lossy().into_owned();
    match &cli.command {
        Command::Check { what: CheckCommand::Enrichment { model } } => {
            commands::check_enrichment_cmd(model.as_deref(), seed, budget)
        }
        Command::Check { what: CheckCommand::Biproduct { model } } => {
            commands::check_biproduct_cmd(model.as_deref(), seed, budget)
        }
        Command::Chase { what: ChaseCommand::Prove { file } } => {
            commands::chase_prove(&path_str(file), seed, budget)
        }
        Command::Swindle { what: SwindleCommand::Run { file, truncate } } => {
            commands::swindle_run(&path_str(file), seed, budget, truncate.as_deref())
        }
        Command::Verdict { what: VerdictCommand::Finiteness { model, truncate } } => {
            commands::verdict_finiteness(model, truncate.as_deref(), seed, budget)
        }
        Command::Coring { what: CoringCommand::Check { file } } => {
            commands::coring_check(&path_str(file), seed, budget)
        }
        Command::Coring { what: CoringCommand::Frobenius { file } } => {
            commands::coring_frobenius(&path_str(file), seed, bound)
        }
        Command::Coring { what: CoringCommand::Verdict { ring, size } } => {
            commands::coring_verdict(ring, size, seed, bound)
        }
        Command::Demo { what: DemoCommand::Lattice } => commands::demo_lattice(seed, budget),
        Command::Demo { what: DemoCommand::CompletedFamily } => {
            commands::demo_completed_family(seed, budget)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            let rendered = match cli.report {
                ReportMode::Json => report.render_json(),
                ReportMode::Text => report.render_text(),
            };
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &rendered) {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            } else {
                print!("{rendered}");
            }
            ExitCode::from(report.exit_status.clamp(0, 1) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
