use std::io::IsTerminal;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use csa::report::{self, OutputFormat, RunConfig};

#[derive(Parser)]
#[command(name = "csa", version, about = "Closest similarity analysis for cognate datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and check a taxonomy and an items file
    Validate(Common),
    /// Closest similarity scores per group, with section breakdown
    Score(Common),
    /// Chi-square test of the focus group against the rest of the universe
    Chisq(Common),
    /// Monte Carlo test under count-proportional reassignment
    Permtest(Common),
    /// Rank candidate forms by phonetic distance to a query form
    Suggest {
        #[arg(long)]
        query: String,
        #[arg(long)]
        candidates: PathBuf,
        /// Phonetic class table overriding the bundled one
        #[arg(long)]
        phonetics: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
        #[arg(long, default_value_t = 2)]
        decimals: u32,
    },
    /// Write the bundled files to a directory
    Init {
        #[arg(long, required = true)]
        fixture: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
}

#[derive(Args)]
struct Common {
    /// Taxonomy TSV; the bundled fixture when omitted
    #[arg(long)]
    taxonomy: Option<PathBuf>,
    /// Items TSV; the bundled fixture when omitted
    #[arg(long)]
    items: Option<PathBuf>,
    #[arg(long, default_value = "FORM")]
    focus: String,
    #[arg(long, default_value = "AN")]
    universe: String,
    #[arg(long, default_value_t = 100_000)]
    iters: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
    #[arg(long, default_value_t = 2)]
    decimals: u32,
}

impl Common {
    fn config(self) -> RunConfig {
        RunConfig {
            taxonomy: self.taxonomy,
            items: self.items,
            focus: self.focus,
            universe: self.universe,
            iterations: self.iters,
            seed: self.seed,
            workers: self.workers,
            format: self.format,
            decimals: self.decimals,
            color: std::env::var_os("CSS_NO_COLOR").is_none() && std::io::stdout().is_terminal(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (result, format, color) = match cli.command {
        Command::Validate(c) => run(c, report::cmd_validate),
        Command::Score(c) => run(c, report::cmd_score),
        Command::Chisq(c) => run(c, report::cmd_chisq),
        Command::Permtest(c) => run(c, report::cmd_permtest),
        Command::Suggest {
            query,
            candidates,
            phonetics,
            format,
            decimals,
        } => (
            report::cmd_suggest(&query, &candidates, phonetics.as_deref(), decimals),
            format,
            false,
        ),
        Command::Init { out, .. } => (report::cmd_init(&out), OutputFormat::Text, false),
    };
    match result {
        Ok(doc) => {
            print!("{}", doc.render(format, color));
            let failed = doc.get("status") == Some("errors");
            ExitCode::from(u8::from(failed))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(
    c: Common,
    cmd: fn(&RunConfig) -> csa::Result<report::Document>,
) -> (csa::Result<report::Document>, OutputFormat, bool) {
    let config = c.config();
    (cmd(&config), config.format, config.color)
}
