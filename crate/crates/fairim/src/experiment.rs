//! The `generate`, `solve` and `evaluate` commands as library functions.
//!
//! Seeds: graph repetition `g` uses `graph_seed = master + g` (graph
//! weights, community rule via `derive(graph_seed, 0)`). Run `r` on that
//! graph uses `run_seed = derive(graph_seed, r + 1)`, from which the
//! optimization sample (`derive(run_seed, 1)`), the evaluation sample
//! (`derive(run_seed, 2)`) and the ex-post draw (`derive(run_seed, 3)`)
//! follow. A CSV row's `graph_seed` and `seed` columns reproduce it alone.

use std::path::{Path, PathBuf};
use std::time::Instant;

use fairim_core::evaluation::Strategy;
use fairim_core::{
    evaluate_strategy, generate_communities, generate_graph, greedy_maximin, greedy_weighted_im, myopic_fish, rng,
    sample_live_edges, solve_node_based, solve_set_based, uniform_node_strategy, CommunityRule, CommunityStructure,
    DirectedWeightedGraph, EvaluationReport, LiveEdgeSample, MwState, NodeWeights,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Algorithm, CommunitySource, ExperimentConfig, InstanceSource};
use crate::error::{Error, Result};
use crate::io::{self, EdgeListOptions, GraphFile, MwTrace};

/// One graph with its communities and the seed it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedInstance {
    pub graph: DirectedWeightedGraph,
    pub communities: CommunityStructure,
    pub graph_seed: u64,
    pub ids: Option<Vec<u64>>,
}

impl ResolvedInstance {
    pub fn graph_file(&self) -> GraphFile {
        GraphFile {
            ids: self.ids.clone(),
            seed: Some(self.graph_seed),
            ..GraphFile::new(&self.graph, Some(&self.communities))
        }
    }
}

/// Builds graph repetition `index` of the configured instance.
pub fn build_instance(cfg: &ExperimentConfig, index: usize) -> Result<ResolvedInstance> {
    let mut graph_seed = cfg.seed.wrapping_add(index as u64);
    let (graph, stored, ids, loaded) = match &cfg.instance {
        InstanceSource::Generator(g) => (generate_graph(&g.spec(graph_seed))?, None, None, None),
        InstanceSource::EdgeList(list) => {
            let opts = EdgeListOptions {
                undirected: list.undirected,
                weights: list.weights(),
                seed: graph_seed,
                lwcc: list.lwcc,
            };
            let loaded = io::load_edge_list(&list.path, &opts)?;
            (loaded.graph.clone(), None, Some(loaded.ids.clone()), Some(loaded))
        }
        InstanceSource::Graph(path) => {
            let inst = io::read_graph(path)?;
            if let Some(seed) = inst.seed {
                graph_seed = seed;
            }
            (inst.graph, inst.communities, inst.ids, None)
        }
    };
    let communities = match (&cfg.communities, stored) {
        (Some(CommunitySource::File { path, order }), _) => match &loaded {
            Some(loaded) => io::load_communities_for(path, loaded, *order)?,
            None => io::load_communities(path, graph.n(), *order)?,
        },
        (Some(source), _) => {
            let rule = source.rule().expect("file handled above");
            generate_communities(&graph, &rule, rng::derive(graph_seed, 0))?
        }
        (None, Some(stored)) => stored,
        (None, None) => generate_communities(&graph, &CommunityRule::Singleton, 0)?,
    };
    Ok(ResolvedInstance {
        graph,
        communities,
        graph_seed,
        ids,
    })
}

fn require_dir(dir: &Path) -> Result<()> {
    match std::fs::metadata(dir) {
        Ok(m) if m.is_dir() => Ok(()),
        Ok(_) => Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "not a directory"),
        )),
        Err(e) => Err(Error::io(dir, e)),
    }
}

fn create_subdir(dir: &Path, name: &str) -> Result<PathBuf> {
    let sub = dir.join(name);
    std::fs::create_dir_all(&sub).map_err(|e| Error::io(&sub, e))?;
    Ok(sub)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub graph_seed: u64,
    pub n: usize,
    pub arcs: usize,
    pub communities: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub master_seed: u64,
    pub graphs: Vec<ManifestEntry>,
    pub config: ExperimentConfig,
}

/// Writes `graph_<i>.json` for every graph repetition and `manifest.json`
/// into the existing output directory.
pub fn cmd_generate(cfg: &ExperimentConfig) -> Result<Manifest> {
    cfg.validate()?;
    require_dir(&cfg.out)?;
    let mut graphs = Vec::with_capacity(cfg.graphs);
    for i in 0..cfg.graphs {
        let inst = build_instance(cfg, i)?;
        let file = format!("graph_{i}.json");
        io::write_graph(&cfg.out.join(&file), &inst.graph_file())?;
        graphs.push(ManifestEntry {
            file,
            graph_seed: inst.graph_seed,
            n: inst.graph.n(),
            arcs: inst.graph.arcs().len(),
            communities: inst.communities.len(),
        });
    }
    let manifest = Manifest {
        master_seed: cfg.seed,
        graphs,
        config: cfg.clone(),
    };
    io::write_json(&cfg.out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// One CSV result row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub algorithm: String,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    #[serde(rename = "T_opt")]
    pub t_opt: usize,
    #[serde(rename = "T_eval")]
    pub t_eval: usize,
    pub ex_ante: f64,
    pub ex_post: f64,
    pub spread: f64,
    pub runtime_ms: f64,
    pub seed: u64,
    pub graph_seed: u64,
}

impl CsvRow {
    pub fn new(report: &EvaluationReport, graph_seed: u64) -> Self {
        Self {
            algorithm: report.algorithm.clone(),
            n: report.n,
            m: report.m,
            k: report.k,
            t_opt: report.t_opt,
            t_eval: report.t_eval,
            ex_ante: report.ex_ante_min,
            ex_post: report.ex_post_min,
            spread: report.expected_spread,
            runtime_ms: report.runtime_ms,
            seed: report.seed,
            graph_seed,
        }
    }
}

pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let csv_err = |source| Error::Csv {
        path: path.into(),
        source,
    };
    csv::Reader::from_path(path)
        .map_err(csv_err)?
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(csv_err)
}

/// Writes rows (with header) to standard output.
pub fn print_csv(rows: &[CsvRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    for row in rows {
        w.serialize(row).map_err(|source| Error::Csv {
            path: "<stdout>".into(),
            source,
        })?;
    }
    w.flush().map_err(|e| Error::io("<stdout>", e))
}

/// Result of one (graph, k, algorithm, run) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub graph: usize,
    pub run: usize,
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    pub trace: Option<MwTrace>,
    pub report: EvaluationReport,
    pub graph_seed: u64,
}

impl Cell {
    pub fn row(&self) -> CsvRow {
        CsvRow::new(&self.report, self.graph_seed)
    }

    pub fn file_stem(&self) -> String {
        format!("g{}_k{}_{}_r{}", self.graph, self.report.k, self.algorithm, self.run)
    }
}

pub fn run_seed(graph_seed: u64, run: usize) -> u64 {
    rng::derive(graph_seed, run as u64 + 1)
}

/// Runs one algorithm on the optimization sample.
pub fn run_algorithm(
    algorithm: Algorithm,
    opt: &LiveEdgeSample,
    communities: &CommunityStructure,
    k: usize,
    cfg: &ExperimentConfig,
) -> Result<(Strategy, Option<MwState>)> {
    let mw = cfg.mw_config();
    Ok(match algorithm {
        Algorithm::SetBased => {
            let (p, state) = solve_set_based(opt, communities, k, &mw)?;
            (Strategy::Set(p), Some(state))
        }
        Algorithm::NodeBased => {
            let (x, state) = solve_node_based(opt, communities, k, &mw)?;
            (Strategy::Node(x), Some(state))
        }
        Algorithm::Uniform => (Strategy::Node(uniform_node_strategy(opt.n(), k)?), None),
        Algorithm::GreedyIm => {
            let trace = greedy_weighted_im(opt, &NodeWeights::ones(opt.n()), k)?;
            (Strategy::Seeds(trace.prefix(k).to_vec()), None)
        }
        Algorithm::GreedyMaximin => (Strategy::Seeds(greedy_maximin(opt, communities, k)?), None),
        Algorithm::Myopic => (Strategy::Seeds(myopic_fish(opt, k)?), None),
    })
}

/// Output of [`cmd_solve`], in canonical order: graph, k, algorithm (as
/// configured), run.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutput {
    pub cells: Vec<Cell>,
    pub csv: PathBuf,
}

impl SolveOutput {
    pub fn rows(&self) -> Vec<CsvRow> {
        self.cells.iter().map(Cell::row).collect()
    }
}

/// Runs every configured (graph, k, algorithm, run) cell and writes
/// `results.csv`, `reports.json`, `graphs/` and `strategies/` under the
/// existing output directory. Cells run in parallel; the output does not
/// depend on the thread count except for the runtime column.
pub fn cmd_solve(cfg: &ExperimentConfig) -> Result<SolveOutput> {
    cfg.validate()?;
    let algorithms = cfg.algorithms()?;
    require_dir(&cfg.out)?;
    let graph_dir = create_subdir(&cfg.out, "graphs")?;
    let strategy_dir = create_subdir(&cfg.out, "strategies")?;
    let model = cfg.diffusion_model();
    let mut cells = Vec::new();
    for g in 0..cfg.graphs {
        let inst = build_instance(cfg, g)?;
        let n = inst.graph.n();
        if let Some(&k) = cfg.k.iter().find(|&&k| k > n) {
            return Err(Error::Config(format!("k = {k} exceeds n = {n}")));
        }
        io::write_graph(&graph_dir.join(format!("graph_{g}.json")), &inst.graph_file())?;
        let (t_opt, t_eval) = cfg.sample_counts(n)?;
        let samples = (0..cfg.runs)
            .map(|r| {
                let seed = run_seed(inst.graph_seed, r);
                let opt = sample_live_edges(&inst.graph, model, t_opt, rng::derive(seed, 1))?;
                let eval = sample_live_edges(&inst.graph, model, t_eval, rng::derive(seed, 2))?;
                Ok((seed, opt, eval))
            })
            .collect::<Result<Vec<_>>>()?;
        let jobs: Vec<(usize, Algorithm, usize)> = cfg
            .k
            .iter()
            .flat_map(|&k| algorithms.iter().flat_map(move |&a| (0..cfg.runs).map(move |r| (k, a, r))))
            .collect();
        let done = jobs
            .par_iter()
            .map(|&(k, algorithm, r)| {
                let (seed, opt, eval) = &samples[r];
                let start = Instant::now();
                let (strategy, state) = run_algorithm(algorithm, opt, &inst.communities, k, cfg)?;
                let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
                let mut report = evaluate_strategy(&strategy, eval, &inst.communities, rng::derive(*seed, 3))?;
                report.algorithm = algorithm.label().into();
                report.k = k;
                report.t_opt = t_opt;
                report.seed = *seed;
                report.runtime_ms = runtime_ms;
                Ok(Cell {
                    graph: g,
                    run: r,
                    algorithm,
                    strategy,
                    trace: state.as_ref().map(MwTrace::from),
                    report,
                    graph_seed: inst.graph_seed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        cells.extend(done);
    }
    for cell in &cells {
        let stem = cell.file_stem();
        io::write_strategy(&strategy_dir.join(format!("{stem}.json")), &cell.strategy)?;
        if let Some(trace) = &cell.trace {
            io::write_json(&strategy_dir.join(format!("{stem}_trace.json")), trace)?;
        }
    }
    let csv = cfg.out.join("results.csv");
    let out = SolveOutput { cells, csv };
    write_csv(&out.csv, &out.rows())?;
    let reports: Vec<&EvaluationReport> = out.cells.iter().map(|c| &c.report).collect();
    io::write_json(&cfg.out.join("reports.json"), &reports)?;
    Ok(out)
}

/// Re-evaluates a strategy file on graph repetition `graph` of the
/// configured instance, using the evaluation sample and draw of `run_seed`
/// (run 0 of that graph when unset).
pub fn cmd_evaluate(
    cfg: &ExperimentConfig,
    strategy_path: &Path,
    graph: usize,
    run_seed: Option<u64>,
    label: &str,
) -> Result<(CsvRow, EvaluationReport)> {
    cfg.validate()?;
    let strategy = io::read_strategy(strategy_path)?;
    let inst = build_instance(cfg, graph)?;
    let run_seed = run_seed.unwrap_or_else(|| self::run_seed(inst.graph_seed, 0));
    strategy.check_nodes(inst.graph.n())?;
    let (t_opt, t_eval) = cfg.sample_counts(inst.graph.n())?;
    let eval = sample_live_edges(&inst.graph, cfg.diffusion_model(), t_eval, rng::derive(run_seed, 2))?;
    let mut report = evaluate_strategy(&strategy, &eval, &inst.communities, rng::derive(run_seed, 3))?;
    report.algorithm = label.into();
    report.t_opt = t_opt;
    report.seed = run_seed;
    Ok((CsvRow::new(&report, inst.graph_seed), report))
}
