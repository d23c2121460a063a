use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fairim::config::{CommunitySource, EdgeListConfig, ExperimentConfig, InstanceSource, ModelName, Overrides};
use fairim::experiment::{cmd_evaluate, cmd_generate, cmd_solve, print_csv};
use fairim::io::ColumnOrder;
use fairim::Result;

/// Randomized maximin-fair influence maximization experiments.
#[derive(Debug, Parser)]
#[command(name = "fairim", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write graph and community fixtures plus a manifest.
    Generate(Common),
    /// Run the configured algorithms and write CSV rows and strategies.
    Solve(Common),
    /// Re-evaluate a strategy file; prints one CSV row.
    Evaluate {
        /// Strategy JSON written by `solve`.
        strategy: PathBuf,
        /// Graph repetition of the configured instance.
        #[arg(long, default_value_t = 0)]
        graph_index: usize,
        /// Run seed (the `seed` column of the row to reproduce).
        #[arg(long)]
        run_seed: Option<u64>,
        /// Label for the algorithm column.
        #[arg(long, default_value = "evaluate")]
        label: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Experiment config (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (must exist).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated algorithm labels.
    #[arg(long, value_delimiter = ',')]
    algos: Option<Vec<String>>,
    /// Comma-separated budgets.
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<usize>>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    t_opt: Option<usize>,
    #[arg(long)]
    t_eval: Option<usize>,
    #[arg(long, value_enum)]
    model: Option<ModelName>,
    /// Graph repetitions.
    #[arg(long)]
    graphs: Option<usize>,
    /// Sample repetitions per graph.
    #[arg(long)]
    runs: Option<usize>,
    /// Use a graph fixture as the instance.
    #[arg(long, conflicts_with = "edges")]
    graph: Option<PathBuf>,
    /// Use an edge list as the instance.
    #[arg(long)]
    edges: Option<PathBuf>,
    /// Community file for the instance.
    #[arg(long)]
    communities: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ColumnOrder::CommunityFirst)]
    community_order: ColumnOrder,
    /// Treat every edge-list line as two opposing arcs.
    #[arg(long)]
    undirected: bool,
    /// Restrict an edge list to its largest weakly connected component.
    #[arg(long)]
    lwcc: bool,
}

impl Common {
    fn config(self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let instance = match (self.graph, self.edges) {
            (Some(path), _) => Some(InstanceSource::Graph(path)),
            (None, Some(path)) => Some(InstanceSource::EdgeList(EdgeListConfig {
                path,
                undirected: false,
                weights: None,
                lwcc: false,
            })),
            (None, None) => None,
        };
        Overrides {
            seed: self.seed,
            out: self.out,
            algorithms: self.algos,
            k: self.k,
            epsilon: self.eps,
            delta: self.delta,
            eta: self.eta,
            max_iterations: self.max_iters,
            t_opt: self.t_opt,
            t_eval: self.t_eval,
            model: self.model,
            graphs: self.graphs,
            runs: self.runs,
            instance,
            communities: self.communities.map(|path| CommunitySource::File {
                path,
                order: self.community_order,
            }),
            undirected: self.undirected,
            lwcc: self.lwcc,
        }
        .apply(&mut cfg)?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(common) => {
            let cfg = common.config()?;
            let manifest = cmd_generate(&cfg)?;
            eprintln!("wrote {} graph(s) to {}", manifest.graphs.len(), cfg.out.display());
        }
        Command::Solve(common) => {
            let cfg = common.config()?;
            let out = cmd_solve(&cfg)?;
            eprintln!("wrote {} row(s) to {}", out.cells.len(), out.csv.display());
        }
        Command::Evaluate {
            strategy,
            graph_index,
            run_seed,
            label,
            common,
        } => {
            let cfg = common.config()?;
            let (row, _) = cmd_evaluate(&cfg, &strategy, graph_index, run_seed, &label)?;
            print_csv(&[row])?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
