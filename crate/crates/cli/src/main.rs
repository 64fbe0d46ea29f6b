mod error;
mod run;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fusion_slp::oracles::SweepConfig;

use crate::error::CliError;
use crate::run::{input_path, Report, Settings, StepArgs, SCHEMA};

/// Fusion calculus, hypergraph rewriting and synchronized logic programs.
#[derive(Debug, Parser)]
#[command(name = "fslp", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Seed for fresh names and random generation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Keep even m2 chains in translated process productions.
    #[arg(long, global = true)]
    no_chain_collapse: bool,
    /// Translate by the definitions alone. Implies --no-chain-collapse and no foo convention.
    #[arg(long, global = true)]
    literal_translation: bool,
    /// Wrap unsynchronized head variables as foo(x) in translated clauses.
    #[arg(long, global = true)]
    foo: bool,
    /// Bound on enumerated choice maps or clause selections.
    #[arg(long, global = true)]
    bound: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the reductions of a process.
    FusionReduce { file: String },
    /// Translate a process into a graph with its productions.
    Fusion2hshr { file: String },
    /// Enumerate or derive the transitions of a graph.
    HshrStep {
        file: String,
        /// One production index per edge, `-` for idle, e.g. `0,-,1`.
        #[arg(long)]
        select: Option<String>,
        /// Keep only interleaving transitions.
        #[arg(long)]
        interleaving: bool,
        /// Actions for isolated nodes, e.g. `x: a<y z>`. Needs --select.
        #[arg(long)]
        isolated: Option<String>,
    },
    /// Translate a graph or process into a logic program and a query.
    Hshr2slp { file: String },
    /// Check every transition of a graph against the big-steps of its translation.
    Check { file: String },
    /// Enumerate the big-steps of each query in a program.
    SlpBigstep {
        file: String,
        /// Drop the empty big-step.
        #[arg(long)]
        nonempty: bool,
        /// One clause index per goal atom, `-` for none.
        #[arg(long)]
        select: Option<String>,
    },
    /// Run a process through every stage and check that they agree.
    Pipeline { file: String },
    /// Check random processes end to end.
    Sweep {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long)]
        max_components: Option<usize>,
        #[arg(long)]
        max_arity: Option<usize>,
    },
    /// Render a graph or translated process as Graphviz.
    Dot { file: String },
}

fn settings(g: &Global) -> Settings {
    Settings {
        seed: g.seed,
        bound: g.bound,
        nonempty: false,
        no_chain_collapse: g.no_chain_collapse,
        literal_translation: g.literal_translation,
        foo: g.foo,
    }
}

fn dispatch(cli: Cli) -> Result<Report, CliError> {
    let mut s = settings(&cli.global);
    match cli.command {
        Command::FusionReduce { file } => run::fusion_reduce(&input_path(&file)),
        Command::Fusion2hshr { file } => run::fusion2hshr(&input_path(&file), &s),
        Command::HshrStep { file, select, interleaving, isolated } => run::hshr_step(
            &input_path(&file),
            &s,
            StepArgs { select: select.as_deref(), interleaving, isolated: isolated.as_deref() },
        ),
        Command::Hshr2slp { file } => run::hshr2slp(&input_path(&file), &s),
        Command::Check { file } => run::check(&input_path(&file), &s),
        Command::SlpBigstep { file, nonempty, select } => {
            s.nonempty = nonempty;
            run::slp_bigstep(&input_path(&file), &s, select.as_deref())
        }
        Command::Pipeline { file } => run::pipeline(&input_path(&file), &s),
        Command::Sweep { count, max_components, max_arity } => {
            let d = SweepConfig::default();
            let cfg = SweepConfig {
                max_components: max_components.unwrap_or(d.max_components),
                max_arity: max_arity.unwrap_or(d.max_arity),
                ..d
            };
            Ok(run::sweep(&s, count, cfg))
        }
        Command::Dot { file } => run::dot(&input_path(&file), &s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.global.json;
    match dispatch(cli) {
        Ok(report) => {
            if json {
                let mut v = report.json;
                if let Some(obj) = v.as_object_mut() {
                    obj.insert("schema".into(), SCHEMA.into());
                    obj.insert("ok".into(), report.ok.into());
                }
                println!("{}", serde_json::to_string_pretty(&v).expect("JSON values serialize"));
            } else {
                print!("{}", report.text);
            }
            if report.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("fslp: {e}");
            ExitCode::from(2)
        }
    }
}
