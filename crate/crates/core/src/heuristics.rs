//! Classical MaxCut heuristics used as initial solutions.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{brute_force_maxcut, Assignment, CutSolution, Graph};
use crate::seed;

/// Settings for the low-rank Goemans–Williamson solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GwConfig {
    /// Vector dimension; `None` means `ceil(sqrt(2n)) + 1`.
    pub rank: Option<usize>,
    pub iterations: usize,
    pub initial_step: f64,
    /// Relaxation change that counts as converged.
    pub tolerance: f64,
    pub rounding_trials: usize,
    pub seed: u64,
}

impl Default for GwConfig {
    fn default() -> Self {
        Self {
            rank: None,
            iterations: 500,
            initial_step: 0.5,
            tolerance: 1e-9,
            rounding_trials: 100,
            seed: 0,
        }
    }
}

impl GwConfig {
    pub fn rank_for(&self, n: usize) -> usize {
        self.rank
            .unwrap_or_else(|| (2.0 * n as f64).sqrt().ceil() as usize + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GwOutcome {
    pub solution: CutSolution,
    /// Final value of the vector relaxation (an upper bound estimate of `C_max`).
    pub relaxation: f64,
    /// Set when the ascent did not settle within the iteration budget.
    pub not_converged: bool,
    /// Relaxation value after every accepted ascent step.
    pub trace: Vec<f64>,
}

fn relaxation_value(g: &Graph, vecs: &[Vec<f64>]) -> f64 {
    g.edges()
        .iter()
        .map(|&(u, v)| {
            let d: f64 = vecs[u].iter().zip(&vecs[v]).map(|(a, b)| a * b).sum();
            0.5 * (1.0 - d)
        })
        .sum()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

/// Burer–Monteiro ascent on unit vectors followed by best-of-T random
/// hyperplane rounding.
pub fn goemans_williamson(g: &Graph, config: &GwConfig) -> Result<GwOutcome> {
    if g.num_edges() == 0 {
        return input("Goemans-Williamson needs at least one edge");
    }
    let rank = config.rank_for(g.num_vertices());
    if rank < 2 || config.rounding_trials == 0 || !(config.initial_step > 0.0) {
        return Err(Error::Config(
            "GW needs rank >= 2, rounding_trials >= 1, initial_step > 0".into(),
        ));
    }
    let n = g.num_vertices();
    let adj = g.neighbors();
    let mut rng = seed::rng(seed::derive(config.seed, "gw-init", 0));
    let mut vecs: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut v: Vec<f64> = (0..rank).map(|_| StandardNormal.sample(&mut rng)).collect();
            normalize(&mut v);
            v
        })
        .collect();

    let mut value = relaxation_value(g, &vecs);
    let mut trace = vec![value];
    let mut step = config.initial_step;
    let mut last_change = f64::INFINITY;
    for _ in 0..config.iterations {
        // Ascent direction for vertex u: -1/2 * sum of neighbor vectors, projected
        // back onto the sphere after the step.
        let candidate: Vec<Vec<f64>> = (0..n)
            .map(|u| {
                let mut v = vecs[u].clone();
                for &w in &adj[u] {
                    v.iter_mut()
                        .zip(&vecs[w])
                        .for_each(|(a, b)| *a -= 0.5 * step * b);
                }
                normalize(&mut v);
                v
            })
            .collect();
        let next = relaxation_value(g, &candidate);
        if next > value {
            last_change = next - value;
            vecs = candidate;
            value = next;
            trace.push(value);
            if last_change < config.tolerance {
                break;
            }
        } else {
            step *= 0.5;
            if step < 1e-12 {
                last_change = 0.0;
                break;
            }
        }
    }

    let mut best: Option<(u64, usize)> = None;
    for trial in 0..config.rounding_trials {
        let mut rng = seed::rng(seed::derive(config.seed, "gw-round", trial as u64));
        let normal: Vec<f64> = (0..rank).map(|_| StandardNormal.sample(&mut rng)).collect();
        let mut bits = 0u64;
        for (u, v) in vecs.iter().enumerate() {
            let side: f64 = v.iter().zip(&normal).map(|(a, b)| a * b).sum();
            if side >= 0.0 {
                bits |= 1 << u;
            }
        }
        let cut = g.cut_of_bits(bits);
        if best.is_none_or(|(_, c)| cut > c) {
            best = Some((bits, cut));
        }
    }
    let (bits, value_cut) = best.expect("at least one rounding trial");
    Ok(GwOutcome {
        solution: CutSolution {
            assignment: Assignment::new(bits, n)?,
            value: value_cut,
        },
        relaxation: value,
        not_converged: last_change >= config.tolerance,
        trace,
    })
}

/// Steepest-ascent single-vertex flips until no flip improves the cut.
/// Ties go to the smallest vertex index.
pub fn local_search_1flip(g: &Graph, start: Assignment) -> Result<CutSolution> {
    let mut sol = CutSolution::evaluate(g, start)?;
    let masks = g.adjacency_masks();
    loop {
        let bits = sol.assignment.bits();
        let gain = |v: usize| -> isize {
            let diff = if (bits >> v) & 1 == 0 {
                masks[v] & bits
            } else {
                masks[v] & !bits
            };
            let deg = masks[v].count_ones() as isize;
            // Same-side neighbors become cut, opposite-side neighbors become uncut.
            deg - 2 * diff.count_ones() as isize
        };
        let best = (0..g.num_vertices()).map(|v| (v, gain(v))).fold(
            None,
            |acc: Option<(usize, isize)>, (v, gv)| match acc {
                Some((_, ga)) if ga >= gv => acc,
                _ => Some((v, gv)),
            },
        );
        match best {
            Some((v, gv)) if gv > 0 => {
                sol = CutSolution {
                    assignment: sol.assignment.flipped(v),
                    value: sol.value + gv as usize,
                };
            }
            _ => return Ok(sol),
        }
    }
}

/// Source of the reference cut for the sparse and cut variants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialChoice {
    /// Lexicographically smallest exact optimum.
    Exact,
    Gw {
        #[serde(flatten)]
        config: GwConfig,
    },
    /// 1-flip local search from a seeded random assignment.
    LocalSearch,
    Given {
        assignment: String,
    },
}

impl InitialChoice {
    pub fn name(&self) -> &'static str {
        match self {
            InitialChoice::Exact => "exact",
            InitialChoice::Gw { .. } => "gw",
            InitialChoice::LocalSearch => "local_search",
            InitialChoice::Given { .. } => "given",
        }
    }
}

pub fn initial_solution(g: &Graph, choice: &InitialChoice, seed: u64) -> Result<CutSolution> {
    match choice {
        InitialChoice::Exact => {
            let (_, optima) = brute_force_maxcut(g)?;
            Ok(optima[0])
        }
        InitialChoice::Gw { config } => {
            let config = GwConfig {
                seed,
                ..config.clone()
            };
            Ok(goemans_williamson(g, &config)?.solution)
        }
        InitialChoice::LocalSearch => {
            let n = g.num_vertices();
            let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let bits = seed::rng(seed).gen::<u64>() & mask;
            local_search_1flip(g, Assignment::new(bits, n)?)
        }
        InitialChoice::Given { assignment } => {
            let a: Assignment = assignment.parse()?;
            CutSolution::evaluate(g, a)
        }
    }
}
