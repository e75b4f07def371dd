use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use sparse_qaoa::alignment::{aligned_levels_with, AlignmentRule};
use sparse_qaoa::graph::brute_force_maxcut;
use sparse_qaoa::runner::{self, ExperimentConfig, PlotStyle};
use sparse_qaoa::sparsify::{sparsify, Method, SparsifyConfig};
use sparse_qaoa::Graph;

/// QAOA MaxCut experiments with sparsified and split phase operators.
#[derive(Parser)]
#[command(version)]
struct Cli {
    /// Root seed; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; overrides the config.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Worker threads (0 = all cores); overrides the config.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Validate and print the plan without computing anything.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment config.
    Run { config: PathBuf },
    /// Re-plot a results.csv.
    Plot {
        csv: PathBuf,
        #[arg(long)]
        style: String,
    },
    /// Count aligned energy levels between two graphs on the same vertices.
    Align {
        graph_a: PathBuf,
        graph_b: PathBuf,
        #[arg(long, value_enum, default_value = "prefix")]
        rule: Rule,
    },
    /// Exact MaxCut by enumeration.
    Maxcut { graph: PathBuf },
    /// Sparsify a graph and print the kept edge list.
    Sparsify {
        graph: PathBuf,
        #[arg(long)]
        method: String,
        #[arg(long)]
        ratio: f64,
        /// Method parameter as key=value; repeatable.
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Rule {
    Prefix,
    Largest,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected key=value")?;
    let v: f64 = v.parse().map_err(|e| format!("{v}: {e}"))?;
    Ok((k.to_string(), v))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::read_edge_list(path).with_context(|| format!("reading {}", path.display()))
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { ref config } => run(&cli, config),
        Command::Plot { ref csv, ref style } => {
            let style: PlotStyle = style.parse()?;
            let rows = runner::read_rows(csv)?;
            let dir = cli
                .out_dir
                .clone()
                .unwrap_or_else(|| csv.parent().unwrap_or(Path::new(".")).join("plots"));
            if cli.dry_run {
                println!(
                    "would plot {} rows as {} into {}",
                    rows.len(),
                    style.name(),
                    dir.display()
                );
                return Ok(());
            }
            let written = runner::plot::emit_plots(&rows, style, &dir)?;
            if written.is_empty() {
                eprintln!("nothing to plot: no rows for style {}", style.name());
            }
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
        Command::Align {
            ref graph_a,
            ref graph_b,
            rule,
        } => {
            let rule = match rule {
                Rule::Prefix => AlignmentRule::Prefix,
                Rule::Largest => AlignmentRule::LargestAligned,
            };
            let report = aligned_levels_with(&read_graph(graph_a)?, &read_graph(graph_b)?, rule)?;
            println!("aligned_levels {}", report.aligned_levels);
            println!("ground_state_aligned {}", report.ground_state_aligned);
            for l in &report.levels {
                let c = l
                    .containment
                    .map_or("none".to_string(), |c| format!("{c:?}"));
                println!(
                    "level {} sizes {}/{} {}",
                    l.k, l.original_size, l.sparse_size, c
                );
            }
            Ok(())
        }
        Command::Maxcut { ref graph } => {
            let (c_max, optima) = brute_force_maxcut(&read_graph(graph)?)?;
            println!("c_max {c_max}");
            for s in optima {
                println!("{}", s.assignment);
            }
            Ok(())
        }
        Command::Sparsify {
            ref graph,
            ref method,
            ratio,
            ref params,
        } => {
            let g = read_graph(graph)?;
            let method: Method = method.parse()?;
            let mut config = SparsifyConfig::new(method, ratio, cli.seed.unwrap_or(0));
            for (k, v) in params {
                config = config.with_param(k, *v);
            }
            config.validate()?;
            if cli.dry_run {
                println!(
                    "would keep {} of {} edges",
                    sparse_qaoa::sparsify::kept_count(g.num_edges(), ratio),
                    g.num_edges()
                );
                return Ok(());
            }
            let sparse = sparsify(&g, &config)?;
            match &cli.out_dir {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    let stem = graph
                        .file_stem()
                        .and_then(|s| s.to_str())
                        .unwrap_or("graph");
                    let path = dir.join(format!("{stem}_{}_{ratio}.txt", method.name()));
                    std::fs::write(&path, sparse.to_edge_list())?;
                    println!("{}", path.display());
                }
                None => print!("{}", sparse.to_edge_list()),
            }
            Ok(())
        }
    }
}

fn run(cli: &Cli, path: &Path) -> Result<()> {
    let mut config = ExperimentConfig::load(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(jobs) = cli.jobs {
        config.jobs = jobs;
    }
    let base = path.parent().unwrap_or(Path::new("."));
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| config.out_dir.as_ref().map(|d| base.join(d)))
        .unwrap_or_else(|| PathBuf::from("results").join(&config.name));
    if cli.dry_run {
        let jobs = runner::plan(&config)?;
        println!(
            "config ok: {} jobs, output to {}",
            jobs.len(),
            out_dir.display()
        );
        for j in jobs {
            println!("{} {} p={}", j.graph_id, j.label, j.p);
        }
        return Ok(());
    }
    let output = runner::run_experiment(&config, base)?;
    for f in &output.manifest.failures {
        eprintln!(
            "failed: {} {} {} p={:?}: {}",
            f.graph_id, f.label, f.detail, f.p, f.error
        );
    }
    for path in runner::write_outputs(&output, &out_dir)? {
        println!("{}", path.display());
    }
    if output.rows.is_empty() {
        bail!("no job succeeded");
    }
    Ok(())
}
