//! Experiment configuration (TOML).
//!
//! ```toml
//! schema_version = 1
//! name = "gradual-deletion"
//! seed = 2022
//! p_values = [1, 2, 3]
//! plots = ["ratio_vs_p"]
//!
//! [optimizer]
//! num_random_starts = 30
//!
//! [[graphs]]
//! id = "graph1"
//! generate = { n = 10, m = 30, seed = 1 }
//!
//! [[graphs]]
//! path = "instances/petersen.txt"
//!
//! [[variants]]
//! kind = "standard"
//!
//! [[variants]]
//! kind = "sparse"
//! initial = { kind = "exact" }
//! remove_k = [2, 4, 6, 8, 10]
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate_random_graph, Graph};
use crate::heuristics::{GwConfig, InitialChoice};
use crate::optimize::OptimizerConfig;
use crate::sparsify::{Method, SparsifyConfig};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default = "default_name")]
    pub name: String,
    /// Root of every derived seed.
    #[serde(default)]
    pub seed: u64,
    pub p_values: Vec<usize>,
    pub graphs: Vec<GraphSource>,
    pub variants: Vec<VariantEntry>,
    #[serde(default)]
    pub optimizer: OptimizerConfig,
    #[serde(default)]
    pub plots: Vec<PlotStyle>,
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[serde(default)]
    pub jobs: usize,
}

fn default_name() -> String {
    "experiment".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSource {
    #[serde(default)]
    pub id: Option<String>,
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub generate: Option<GenerateSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenerateSpec {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
}

impl GraphSource {
    pub fn id(&self, index: usize) -> String {
        if let Some(id) = &self.id {
            return id.clone();
        }
        match (&self.generate, &self.path) {
            (Some(g), _) => format!("g{}_{}_s{}", g.n, g.m, g.seed),
            (None, Some(p)) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| format!("graph{index}")),
            (None, None) => format!("graph{index}"),
        }
    }

    /// Loads the graph; relative paths resolve against `base`.
    pub fn load(&self, base: &Path) -> Result<(Graph, bool)> {
        match (&self.generate, &self.path) {
            (Some(spec), None) => {
                let generated = generate_random_graph(spec.n, spec.m, spec.seed)?;
                Ok((generated.graph, generated.connected))
            }
            (None, Some(path)) => {
                let g = Graph::read_edge_list(base.join(path))?;
                let connected = g.is_connected();
                Ok((g, connected))
            }
            _ => Err(Error::Config(
                "a graph needs exactly one of `path` or `generate`".into(),
            )),
        }
    }
}

/// Where the reference cut of a solution-guided variant comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolutionSource {
    Exact,
    Gw {
        #[serde(default)]
        rounding_trials: Option<usize>,
        #[serde(default)]
        iterations: Option<usize>,
        /// Retry with fresh seeds until GW returns a non-optimal cut.
        #[serde(default)]
        require_suboptimal: bool,
        #[serde(default = "default_attempts")]
        max_attempts: usize,
    },
    LocalSearch,
    Given {
        assignment: String,
    },
    /// A seeded assignment with cut value exactly `C_max - d`.
    Distance {
        d: usize,
    },
}

fn default_attempts() -> usize {
    200
}

impl SolutionSource {
    pub fn name(&self) -> String {
        match self {
            SolutionSource::Distance { d } => format!("d={d}"),
            other => other
                .as_initial_choice()
                .map(|c| c.name().to_string())
                .unwrap_or_default(),
        }
    }

    pub fn as_initial_choice(&self) -> Option<InitialChoice> {
        Some(match self {
            SolutionSource::Exact => InitialChoice::Exact,
            SolutionSource::Gw {
                rounding_trials,
                iterations,
                ..
            } => {
                let base = GwConfig::default();
                InitialChoice::Gw {
                    config: GwConfig {
                        rounding_trials: rounding_trials.unwrap_or(base.rounding_trials),
                        iterations: iterations.unwrap_or(base.iterations),
                        ..base
                    },
                }
            }
            SolutionSource::LocalSearch => InitialChoice::LocalSearch,
            SolutionSource::Given { assignment } => InitialChoice::Given {
                assignment: assignment.clone(),
            },
            SolutionSource::Distance { .. } => return None,
        })
    }
}

fn default_ratio() -> f64 {
    0.66
}

fn default_true() -> bool {
    true
}

fn default_samples() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VariantSpec {
    /// Full phase operator, one gamma per layer.
    Standard,
    /// Drop non-cut edges of a reference solution. Without `remove_k`, all of
    /// them are dropped; with it, one instance per listed count is run, each
    /// removing a prefix of the same seeded order.
    Sparse {
        initial: SolutionSource,
        #[serde(default)]
        remove_k: Option<Vec<usize>>,
    },
    /// Drop each non-cut edge independently with probability `p_e`.
    RandomSparse {
        initial: SolutionSource,
        p_e: f64,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Two gammas: cut edges and non-cut edges.
    Cut {
        initial: SolutionSource,
        /// Search only along `gamma_1 = gamma_2` (reproduces the standard variant).
        #[serde(default)]
        tie_gammas: bool,
        /// Add the standard optimum (with `gamma_1 = gamma_2`) as an extra start.
        #[serde(default = "default_true")]
        seed_with_standard: bool,
    },
    /// Two gammas: a random subset of non-cut edges versus everything else.
    RandomCut {
        initial: SolutionSource,
        p_e: f64,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_true")]
        seed_with_standard: bool,
    },
    /// Score-and-filter sparsification.
    Sparsifier {
        method: Method,
        #[serde(default = "default_ratio")]
        target_ratio: f64,
        #[serde(default)]
        params: BTreeMap<String, f64>,
    },
}

impl VariantSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            VariantSpec::Standard => "standard",
            VariantSpec::Sparse { .. } => "sparse",
            VariantSpec::RandomSparse { .. } => "random_sparse",
            VariantSpec::Cut { .. } => "cut",
            VariantSpec::RandomCut { .. } => "random_cut",
            VariantSpec::Sparsifier { .. } => "sparsifier",
        }
    }

    pub fn initial(&self) -> Option<&SolutionSource> {
        match self {
            VariantSpec::Sparse { initial, .. }
            | VariantSpec::RandomSparse { initial, .. }
            | VariantSpec::Cut { initial, .. }
            | VariantSpec::RandomCut { initial, .. } => Some(initial),
            _ => None,
        }
    }

    /// Value of the `method` column.
    pub fn method(&self) -> String {
        match self {
            VariantSpec::Standard => String::new(),
            VariantSpec::Sparsifier { method, .. } => method.to_string(),
            other => other
                .initial()
                .map(SolutionSource::name)
                .unwrap_or_default(),
        }
    }

    pub fn needs_standard(&self) -> bool {
        matches!(
            self,
            VariantSpec::Cut {
                seed_with_standard: true,
                tie_gammas: false,
                ..
            } | VariantSpec::RandomCut {
                seed_with_standard: true,
                ..
            }
        )
    }

    pub fn sparsify_config(&self, seed: u64) -> Option<SparsifyConfig> {
        match self {
            VariantSpec::Sparsifier {
                method,
                target_ratio,
                params,
            } => Some(SparsifyConfig {
                method: *method,
                target_ratio: *target_ratio,
                seed,
                params: params.clone(),
            }),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariantEntry {
    /// Series name; defaults to `<kind>[/<method>]`.
    #[serde(default)]
    pub label: Option<String>,
    #[serde(flatten)]
    pub spec: VariantSpec,
}

impl VariantEntry {
    pub fn label(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            let method = self.spec.method();
            if method.is_empty() {
                self.spec.kind().to_string()
            } else {
                format!("{}/{}", self.spec.kind(), method)
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlotStyle {
    RatioVsP,
    RatioVsScaledP,
    DeltaVsAlignment,
}

impl std::str::FromStr for PlotStyle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ratio_vs_p" => Ok(PlotStyle::RatioVsP),
            "ratio_vs_scaled_p" => Ok(PlotStyle::RatioVsScaledP),
            "delta_vs_alignment" => Ok(PlotStyle::DeltaVsAlignment),
            _ => Err(Error::Config(format!("unknown plot style {s:?}"))),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Checks every variant-specific requirement before anything runs.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.p_values.is_empty() || self.p_values.contains(&0) {
            return bad("p_values must be a non-empty list of depths >= 1".into());
        }
        if self.graphs.is_empty() {
            return bad("no graphs configured".into());
        }
        if self.variants.is_empty() {
            return bad("no variants configured".into());
        }
        self.optimizer.validate()?;
        let mut ids = std::collections::BTreeSet::new();
        for (i, g) in self.graphs.iter().enumerate() {
            if g.path.is_some() == g.generate.is_some() {
                return bad(format!(
                    "graph {i}: set exactly one of `path` or `generate`"
                ));
            }
            if !ids.insert(g.id(i)) {
                return bad(format!("duplicate graph id {:?}", g.id(i)));
            }
        }
        let mut labels = std::collections::BTreeSet::new();
        for v in &self.variants {
            let label = v.label();
            if !labels.insert(label.clone()) {
                return bad(format!(
                    "duplicate variant label {label:?}; set `label` explicitly"
                ));
            }
            match &v.spec {
                VariantSpec::RandomSparse { p_e, samples, .. }
                | VariantSpec::RandomCut { p_e, samples, .. } => {
                    if !(0.0..=1.0).contains(p_e) {
                        return bad(format!("{label}: p_e {p_e} outside [0, 1]"));
                    }
                    if *samples == 0 {
                        return bad(format!("{label}: samples must be at least 1"));
                    }
                }
                VariantSpec::Sparsifier { .. } => {
                    v.spec.sparsify_config(0).expect("sparsifier").validate()?;
                }
                VariantSpec::Sparse {
                    remove_k: Some(ks), ..
                } if ks.is_empty() => {
                    return bad(format!("{label}: remove_k must not be empty"));
                }
                _ => {}
            }
            if let Some(SolutionSource::Gw {
                rounding_trials: Some(0),
                ..
            }) = v.spec.initial()
            {
                return bad(format!("{label}: rounding_trials must be at least 1"));
            }
        }
        Ok(())
    }
}
