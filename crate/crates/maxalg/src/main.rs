use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use maxalg::commands::{self, Relation, StepJson, Target};
use maxalg::report::{Format, RunReport};
use maxalg::reproduce::reproduce;
use maxalg_core::Word;

/// Max-plus automata, switching max-plus linear systems and their hybrid
/// automata.
#[derive(Parser, Debug)]
#[command(name = "maxalg", version)]
struct Cli {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Word length bound for language and inclusion checks.
    #[arg(long, global = true, default_value_t = 6)]
    bound: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a model on a word.
    Eval {
        /// Model file or bundled model name.
        model: String,
        #[arg(long)]
        word: String,
    },
    /// Run a model on a word or an input file.
    Simulate {
        model: String,
        #[arg(long, conflicts_with = "inputs")]
        word: Option<String>,
        /// JSON array of events `{"w", "u", "v", "r"}`.
        #[arg(long)]
        inputs: Option<String>,
        /// Keep only the first K events.
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Translate a model and print the new model file.
    Translate {
        model: String,
        #[arg(long, value_enum)]
        to: Target,
    },
    /// Print the finite-state abstraction of a model.
    Abstract { model: String },
    /// Compare two models.
    Check {
        left: String,
        right: String,
        #[arg(long, value_enum)]
        relation: Relation,
    },
    /// Run the seeded reproduction suite.
    Reproduce,
}

enum Output {
    Report(RunReport),
    Text(String),
}

fn run(cli: &Cli) -> Result<Output> {
    Ok(match &cli.command {
        Command::Eval { model, word } => {
            Output::Report(commands::eval(&commands::load_model(model)?, &Word::parse(word))?)
        }
        Command::Simulate {
            model,
            word,
            inputs,
            steps,
        } => {
            let doc = commands::load_model(model)?;
            let (mut events, label) = match (word, inputs) {
                (Some(w), None) => (
                    Word::parse(w)
                        .symbols()
                        .iter()
                        .map(|s| StepJson {
                            w: Some(s.clone()),
                            ..Default::default()
                        })
                        .collect::<Vec<_>>(),
                    format!("simulate --word {w}"),
                ),
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
                    (commands::parse_inputs(&text)?, format!("simulate --inputs {path}"))
                }
                _ => bail!("simulate needs exactly one of --word and --inputs"),
            };
            if let Some(k) = steps {
                events.truncate(*k);
            }
            Output::Report(commands::simulate_inputs(&doc, &events, label)?)
        }
        Command::Translate { model, to } => {
            Output::Text(commands::translate_text(&commands::load_model(model)?, *to)?)
        }
        Command::Abstract { model } => Output::Text(commands::abstract_text(
            &commands::load_model(model)?,
            cli.format == Format::Json,
        )?),
        Command::Check { left, right, relation } => Output::Report(commands::check(
            &commands::load_model(left)?,
            &commands::load_model(right)?,
            *relation,
            cli.bound,
            cli.seed,
        )?),
        Command::Reproduce => Output::Report(reproduce(cli.seed)),
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Output::Report(r)) => {
            print!("{}", r.render(cli.format));
            ExitCode::from(r.exit_code())
        }
        Ok(Output::Text(t)) => {
            print!("{t}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
