//! Experiment orchestration: expands a config into jobs, runs them on a
//! bounded worker pool and writes CSV results, a replay manifest and plots.

pub mod config;
pub mod plot;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::alignment::aligned_levels;
use crate::error::{Error, Result};
use crate::graph::{
    max_cut_value, solution_at_distance, CutSolution, Graph, MAX_SPECTRUM_VERTICES,
};
use crate::heuristics::{goemans_williamson, initial_solution, GwConfig};
use crate::optimize::{multistart_with, Objective, OptimizationResult, OptimizerConfig};
use crate::seed;
use crate::sim::{gate_count, scaled_depth, PhaseSpec};
use crate::sparsify::{remove_k_noncut_edges, select_noncut_edges, sparsify, sparsify_by_solution};

pub use config::{
    ExperimentConfig, GraphSource, PlotStyle, SolutionSource, VariantEntry, VariantSpec,
};

/// Version of the CSV column layout below.
pub const CSV_VERSION: u32 = 1;

/// Column order of `results.csv`.
pub const COLUMNS: [&str; 18] = [
    "graph_id",
    "n",
    "m_original",
    "variant",
    "label",
    "method",
    "detail",
    "p",
    "m_used",
    "scaled_p",
    "phase_gate_count",
    "initial_cut",
    "expectation",
    "c_max",
    "ratio",
    "aligned_levels",
    "seed",
    "wall_time_ms",
];

/// One optimized `(graph, variant instance, p)` combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub graph_id: String,
    pub n: usize,
    pub m_original: usize,
    pub variant: String,
    pub label: String,
    pub method: String,
    pub detail: String,
    pub p: usize,
    pub m_used: usize,
    pub scaled_p: f64,
    pub phase_gate_count: usize,
    pub initial_cut: Option<usize>,
    pub expectation: f64,
    pub c_max: usize,
    pub ratio: f64,
    pub aligned_levels: Option<usize>,
    pub seed: u64,
    pub wall_time_ms: f64,
}

impl ResultRow {
    /// Series key used by plots.
    pub fn series(&self) -> String {
        if self.detail.is_empty() {
            self.label.clone()
        } else {
            format!("{} {}", self.label, self.detail)
        }
    }
}

/// Row of `alignment.csv`: a sparsified run paired with the standard run on
/// the same graph and depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlignmentRow {
    pub graph_id: String,
    pub sparsifier: String,
    pub p: usize,
    pub aligned_levels: usize,
    pub ratio_sparse: f64,
    pub ratio_standard: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub graph_id: String,
    pub label: String,
    pub detail: String,
    pub p: Option<usize>,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub id: String,
    pub n: usize,
    pub m: usize,
    pub connected: bool,
    pub c_max: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub graph_id: String,
    pub scope: String,
    pub seed: u64,
}

/// Everything needed to replay a run exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub csv_version: u32,
    pub columns: Vec<String>,
    pub library_version: String,
    pub experiment: String,
    pub config_sha256: String,
    pub root_seed: u64,
    pub graphs: Vec<GraphRecord>,
    pub seeds: Vec<SeedRecord>,
    pub rows: usize,
    pub failures: Vec<Failure>,
    pub config: ExperimentConfig,
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub alignment: Vec<AlignmentRow>,
    pub manifest: Manifest,
}

/// Planned work, as printed by a dry run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlannedJob {
    pub graph_id: String,
    pub label: String,
    pub p: usize,
}

struct PreparedGraph {
    id: String,
    graph: Graph,
    c_max: usize,
    seed: u64,
}

/// A concrete phase operator produced by one variant on one graph.
struct Instance {
    variant_index: usize,
    detail: String,
    spec: PhaseSpec,
    tied: bool,
    inject_standard: bool,
    initial_cut: Option<usize>,
    aligned_levels: Option<usize>,
    seed: u64,
}

fn graph_seed(root: u64, id: &str) -> u64 {
    seed::derive(root, &format!("graph:{id}"), 0)
}

fn variant_seed(graph_seed: u64, label: &str) -> u64 {
    seed::derive(graph_seed, &format!("variant:{label}"), 0)
}

/// Optimizer starts depend on the graph and depth only, so every variant on
/// the same graph and depth starts from the same random points.
fn optimizer_seed(graph_seed: u64, p: usize) -> u64 {
    seed::derive(graph_seed, "optimizer", p as u64)
}

pub fn plan(config: &ExperimentConfig) -> Result<Vec<PlannedJob>> {
    config.validate()?;
    let mut jobs = Vec::new();
    for (gi, g) in config.graphs.iter().enumerate() {
        for v in &config.variants {
            for &p in &config.p_values {
                jobs.push(PlannedJob {
                    graph_id: g.id(gi),
                    label: v.label(),
                    p,
                });
            }
        }
    }
    Ok(jobs)
}

fn resolve_solution(source: &SolutionSource, g: &PreparedGraph, seed: u64) -> Result<CutSolution> {
    match source {
        SolutionSource::Distance { d } => solution_at_distance(&g.graph, *d, seed),
        SolutionSource::Gw {
            require_suboptimal: true,
            rounding_trials,
            iterations,
            max_attempts,
        } => {
            let base = GwConfig::default();
            for attempt in 0..*max_attempts {
                let cfg = GwConfig {
                    rounding_trials: rounding_trials.unwrap_or(base.rounding_trials),
                    iterations: iterations.unwrap_or(base.iterations),
                    seed: seed::derive(seed, "gw-attempt", attempt as u64),
                    ..base.clone()
                };
                let out = goemans_williamson(&g.graph, &cfg)?;
                if out.solution.value < g.c_max {
                    return Ok(out.solution);
                }
            }
            Err(Error::NotFound(format!(
                "GW returned an optimal cut in all {max_attempts} attempts"
            )))
        }
        other => initial_solution(
            &g.graph,
            &other.as_initial_choice().expect("non-distance source"),
            seed,
        ),
    }
}

fn alignment_of(original: &Graph, sparse: &Graph) -> Result<Option<usize>> {
    if original.num_vertices() > MAX_SPECTRUM_VERTICES {
        return Ok(None);
    }
    Ok(Some(aligned_levels(original, sparse)?.aligned_levels))
}

fn fmt_prob(p: f64) -> String {
    format!("p_e={p}")
}

fn build_instances(
    g: &PreparedGraph,
    variant_index: usize,
    entry: &VariantEntry,
) -> Result<Vec<Instance>> {
    let vseed = variant_seed(g.seed, &entry.label());
    let solution = match entry.spec.initial() {
        Some(source) => Some(resolve_solution(
            source,
            g,
            seed::derive(vseed, "initial", 0),
        )?),
        None => None,
    };
    let initial_cut = solution.map(|s| s.value);
    let make =
        |detail: String, spec: PhaseSpec, aligned: Option<usize>, tied: bool, inject: bool| {
            Instance {
                variant_index,
                detail,
                spec,
                tied,
                inject_standard: inject,
                initial_cut,
                aligned_levels: aligned,
                seed: vseed,
            }
        };
    let sparse_instance = |detail: String, sparse: Graph| -> Result<Instance> {
        let aligned = alignment_of(&g.graph, &sparse)?;
        Ok(make(
            detail,
            PhaseSpec::standard(sparse),
            aligned,
            false,
            false,
        ))
    };
    let samples_detail = |p_e: f64, samples: usize, s: usize| {
        if samples == 1 {
            fmt_prob(p_e)
        } else {
            format!("{},s={s}", fmt_prob(p_e))
        }
    };

    let mut out = Vec::new();
    match &entry.spec {
        VariantSpec::Standard => {
            out.push(make(
                String::new(),
                PhaseSpec::standard(g.graph.clone()),
                None,
                false,
                false,
            ));
        }
        VariantSpec::Sparse { remove_k, .. } => {
            let sol = solution.expect("sparse variants carry an initial solution");
            match remove_k {
                None => out.push(sparse_instance(
                    "all".into(),
                    sparsify_by_solution(&g.graph, &sol, 1.0, vseed)?,
                )?),
                Some(ks) => {
                    for &k in ks {
                        let sparse = remove_k_noncut_edges(
                            &g.graph,
                            &sol,
                            k,
                            seed::derive(vseed, "order", 0),
                        )?;
                        out.push(sparse_instance(format!("k={k}"), sparse)?);
                    }
                }
            }
        }
        VariantSpec::RandomSparse { p_e, samples, .. } => {
            let sol = solution.expect("random sparse variants carry an initial solution");
            for s in 0..*samples {
                let sparse = sparsify_by_solution(
                    &g.graph,
                    &sol,
                    *p_e,
                    seed::derive(vseed, "sample", s as u64),
                )?;
                out.push(sparse_instance(samples_detail(*p_e, *samples, s), sparse)?);
            }
        }
        VariantSpec::Cut {
            tie_gammas,
            seed_with_standard,
            ..
        } => {
            let sol = solution.expect("cut variants carry an initial solution");
            let detail = if *tie_gammas { "tied" } else { "" };
            out.push(make(
                detail.into(),
                PhaseSpec::cut(&g.graph, &sol)?,
                None,
                *tie_gammas,
                *seed_with_standard && !*tie_gammas,
            ));
        }
        VariantSpec::RandomCut {
            p_e,
            samples,
            seed_with_standard,
            ..
        } => {
            let sol = solution.expect("random cut variants carry an initial solution");
            for s in 0..*samples {
                let selected = select_noncut_edges(
                    &g.graph,
                    &sol,
                    *p_e,
                    seed::derive(vseed, "sample", s as u64),
                )?;
                out.push(make(
                    samples_detail(*p_e, *samples, s),
                    PhaseSpec::selected(&g.graph, &selected)?,
                    None,
                    false,
                    *seed_with_standard,
                ));
            }
        }
        VariantSpec::Sparsifier { target_ratio, .. } => {
            let cfg = entry.spec.sparsify_config(vseed).expect("sparsifier");
            let sparse = sparsify(&g.graph, &cfg)?;
            out.push(sparse_instance(format!("ratio={target_ratio}"), sparse)?);
        }
    }
    Ok(out)
}

fn optimize_instance(
    g: &PreparedGraph,
    instance: &Instance,
    p: usize,
    base: &OptimizerConfig,
    standard: Option<&OptimizationResult>,
) -> Result<OptimizationResult> {
    let objective = if instance.tied {
        Objective::tied(&instance.spec, &g.graph)?
    } else {
        Objective::new(&instance.spec, &g.graph)?
    };
    let mut config = OptimizerConfig {
        seed: optimizer_seed(g.seed, p),
        ..base.clone()
    };
    if instance.inject_standard {
        let std = standard
            .ok_or_else(|| Error::Config("standard optimum unavailable for injection".into()))?;
        config
            .extra_starts
            .push(std.best_params.to_split().to_flat());
    }
    multistart_with(&objective, g.c_max, p, &config)
}

fn row_for(
    g: &PreparedGraph,
    entry: &VariantEntry,
    instance: &Instance,
    p: usize,
    result: &OptimizationResult,
    wall_time_ms: f64,
) -> ResultRow {
    let m_used = instance.spec.topology().num_edges();
    let m_original = g.graph.num_edges();
    ResultRow {
        graph_id: g.id.clone(),
        n: g.graph.num_vertices(),
        m_original,
        variant: entry.spec.kind().into(),
        label: entry.label(),
        method: entry.spec.method(),
        detail: instance.detail.clone(),
        p,
        m_used,
        scaled_p: scaled_depth(p, m_used, m_original),
        phase_gate_count: gate_count(&instance.spec, p, g.graph.num_vertices()).phase_gates,
        initial_cut: instance.initial_cut,
        expectation: result.best_expectation,
        c_max: g.c_max,
        ratio: result.ratio,
        aligned_levels: instance.aligned_levels,
        seed: instance.seed,
        wall_time_ms,
    }
}

/// Runs every job of `config`. Relative graph paths resolve against `base_dir`.
///
/// Per-job failures are collected in the manifest and do not stop the sweep.
pub fn run_experiment(config: &ExperimentConfig, base_dir: &Path) -> Result<RunOutput> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_inner(config, base_dir))
}

fn run_inner(config: &ExperimentConfig, base_dir: &Path) -> Result<RunOutput> {
    let mut failures = Vec::new();
    let mut graphs = Vec::new();
    let mut seeds = Vec::new();
    for (gi, source) in config.graphs.iter().enumerate() {
        let id = source.id(gi);
        let (graph, connected) = source.load(base_dir)?;
        let c_max = max_cut_value(&graph)?;
        let gseed = graph_seed(config.seed, &id);
        if c_max == 0 {
            failures.push(Failure {
                graph_id: id,
                label: String::new(),
                detail: String::new(),
                p: None,
                error: "graph has no edges; approximation ratio undefined".into(),
            });
            continue;
        }
        graphs.push((
            GraphRecord {
                id: id.clone(),
                n: graph.num_vertices(),
                m: graph.num_edges(),
                connected,
                c_max,
                seed: gseed,
            },
            PreparedGraph {
                id,
                graph,
                c_max,
                seed: gseed,
            },
        ));
    }

    // Instances per (graph, variant), built in parallel, kept in config order.
    let built: Vec<(usize, usize, Result<Vec<Instance>>)> = graphs
        .par_iter()
        .enumerate()
        .flat_map_iter(|(gi, (_, g))| {
            config
                .variants
                .iter()
                .enumerate()
                .map(move |(vi, entry)| (gi, vi, build_instances(g, vi, entry)))
        })
        .collect();

    let mut instances: Vec<(usize, Instance)> = Vec::new();
    for (gi, vi, result) in built {
        let g = &graphs[gi].1;
        let label = config.variants[vi].label();
        seeds.push(SeedRecord {
            graph_id: g.id.clone(),
            scope: format!("variant:{label}"),
            seed: variant_seed(g.seed, &label),
        });
        match result {
            Ok(list) => instances.extend(list.into_iter().map(|inst| (gi, inst))),
            Err(e) => failures.push(Failure {
                graph_id: g.id.clone(),
                label,
                detail: String::new(),
                p: None,
                error: e.to_string(),
            }),
        }
    }
    for (_, g) in &graphs {
        for &p in &config.p_values {
            seeds.push(SeedRecord {
                graph_id: g.id.clone(),
                scope: format!("optimizer:p={p}"),
                seed: optimizer_seed(g.seed, p),
            });
        }
    }

    // Standard optima first: cut variants inject them as extra starts.
    let needs_standard = config.variants.iter().any(|v| v.spec.needs_standard());
    let standard: BTreeMap<(usize, usize), Result<OptimizationResult>> = if needs_standard {
        graphs
            .par_iter()
            .enumerate()
            .flat_map_iter(|(gi, (_, g))| config.p_values.iter().map(move |&p| (gi, g, p)))
            .map(|(gi, g, p)| {
                let inst = Instance {
                    variant_index: usize::MAX,
                    detail: String::new(),
                    spec: PhaseSpec::standard(g.graph.clone()),
                    tied: false,
                    inject_standard: false,
                    initial_cut: None,
                    aligned_levels: None,
                    seed: 0,
                };
                (
                    (gi, p),
                    optimize_instance(g, &inst, p, &config.optimizer, None),
                )
            })
            .collect()
    } else {
        BTreeMap::new()
    };

    let jobs: Vec<(usize, &Instance, usize)> = instances
        .iter()
        .flat_map(|(gi, inst)| config.p_values.iter().map(move |&p| (*gi, inst, p)))
        .collect();
    let results: Vec<(Result<OptimizationResult>, f64)> = jobs
        .par_iter()
        .map(|&(gi, inst, p)| {
            let start = Instant::now();
            let std = standard.get(&(gi, p)).and_then(|r| r.as_ref().ok());
            let result = optimize_instance(&graphs[gi].1, inst, p, &config.optimizer, std);
            (result, start.elapsed().as_secs_f64() * 1e3)
        })
        .collect();

    let mut rows = Vec::with_capacity(jobs.len());
    for ((gi, inst, p), (result, ms)) in jobs.into_iter().zip(results) {
        let g = &graphs[gi].1;
        let entry = &config.variants[inst.variant_index];
        match result {
            Ok(r) => rows.push(row_for(g, entry, inst, p, &r, ms)),
            Err(e) => failures.push(Failure {
                graph_id: g.id.clone(),
                label: entry.label(),
                detail: inst.detail.clone(),
                p: Some(p),
                error: e.to_string(),
            }),
        }
    }

    let alignment = pair_alignment_rows(&rows);
    let manifest = Manifest {
        schema_version: config::SCHEMA_VERSION,
        csv_version: CSV_VERSION,
        columns: COLUMNS.iter().map(|s| s.to_string()).collect(),
        library_version: env!("CARGO_PKG_VERSION").into(),
        experiment: config.name.clone(),
        config_sha256: config_hash(config)?,
        root_seed: config.seed,
        graphs: graphs.into_iter().map(|(rec, _)| rec).collect(),
        seeds,
        rows: rows.len(),
        failures,
        config: config.clone(),
    };
    Ok(RunOutput {
        rows,
        alignment,
        manifest,
    })
}

pub fn config_hash(config: &ExperimentConfig) -> Result<String> {
    let digest = Sha256::digest(config.to_toml()?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Pairs every row that carries an alignment count with the standard row of
/// the same graph and depth.
pub fn pair_alignment_rows(rows: &[ResultRow]) -> Vec<AlignmentRow> {
    let standard: BTreeMap<(&str, usize), f64> = rows
        .iter()
        .filter(|r| r.variant == "standard")
        .map(|r| ((r.graph_id.as_str(), r.p), r.ratio))
        .collect();
    rows.iter()
        .filter(|r| r.variant != "standard")
        .filter_map(|r| {
            let aligned = r.aligned_levels?;
            let ratio_standard = *standard.get(&(r.graph_id.as_str(), r.p))?;
            Some(AlignmentRow {
                graph_id: r.graph_id.clone(),
                sparsifier: r.series(),
                p: r.p,
                aligned_levels: aligned,
                ratio_sparse: r.ratio,
                ratio_standard,
                delta: r.ratio - ratio_standard,
            })
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_rows(path: &Path, rows: &[ResultRow]) -> Result<()> {
    write_csv(path, rows, &COLUMNS)
}

pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
    let header: Vec<String> = r
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(String::from)
        .collect();
    if header != COLUMNS {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected results header {header:?}"),
        });
    }
    r.deserialize().map(|row| row.map_err(csv_err)).collect()
}

/// Writes `results.csv`, `alignment.csv`, `manifest.json` and any configured
/// plots under `out_dir`; returns the written paths.
pub fn write_outputs(output: &RunOutput, out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let results = out_dir.join("results.csv");
    write_rows(&results, &output.rows)?;
    written.push(results);
    if !output.alignment.is_empty() {
        let path = out_dir.join("alignment.csv");
        write_csv(
            &path,
            &output.alignment,
            &[
                "graph_id",
                "sparsifier",
                "p",
                "aligned_levels",
                "ratio_sparse",
                "ratio_standard",
                "delta",
            ],
        )?;
        written.push(path);
    }
    let manifest = out_dir.join("manifest.json");
    fs::write(
        &manifest,
        serde_json::to_string_pretty(&output.manifest)
            .map_err(|e| Error::Io(std::io::Error::other(e)))?,
    )?;
    written.push(manifest);
    let mut styles = output.manifest.config.plots.clone();
    styles.sort();
    styles.dedup();
    for style in styles {
        written.extend(plot::emit_plots(
            &output.rows,
            style,
            &out_dir.join("plots"),
        )?);
    }
    Ok(written)
}
