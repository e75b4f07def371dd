//! Edge scoring, target-ratio filtering and cut-guided sparsification.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{partition_edges, CutSolution, Graph};
use crate::seed;

/// Edge scoring methods.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Random,
    Algebraic,
    Fire,
    Degree,
    Similarity,
    Scan,
    Simmelian,
    Effective,
}

impl Method {
    pub const ALL: [Method; 8] = [
        Method::Random,
        Method::Algebraic,
        Method::Fire,
        Method::Degree,
        Method::Similarity,
        Method::Scan,
        Method::Simmelian,
        Method::Effective,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Random => "random",
            Method::Algebraic => "algebraic",
            Method::Fire => "fire",
            Method::Degree => "degree",
            Method::Similarity => "similarity",
            Method::Scan => "scan",
            Method::Simmelian => "simmelian",
            Method::Effective => "effective",
        }
    }

    fn default_direction(self) -> Direction {
        match self {
            Method::Random | Method::Algebraic => Direction::KeepLow,
            _ => Direction::KeepHigh,
        }
    }

    fn known_params(self) -> &'static [&'static str] {
        match self {
            Method::Algebraic => &[
                "test_vectors",
                "sweeps",
                "omega",
                "norm",
                "exponent",
                "ascending",
            ],
            Method::Fire => &["burn_probability", "budget_factor"],
            _ => &[],
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown sparsification method {s:?}")))
    }
}

/// Which end of the ranking survives filtering.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    KeepHigh,
    KeepLow,
}

/// Configuration of a score-and-filter sparsifier.
///
/// Method parameters (all optional):
///
/// | method    | key                | default | meaning                                         |
/// |-----------|--------------------|---------|-------------------------------------------------|
/// | algebraic | `test_vectors`     | 10      | number of random test vectors                   |
/// | algebraic | `sweeps`           | 20      | weighted-Jacobi relaxation sweeps               |
/// | algebraic | `omega`            | 0.5     | Jacobi weight                                   |
/// | algebraic | `norm`             | 2       | p-norm taken across test vectors                |
/// | algebraic | `exponent`         | 1       | power applied to the final norm                 |
/// | algebraic | `ascending`        | 0       | nonzero keeps the high-distance edges instead   |
/// | fire      | `burn_probability` | 0.7     | probability of burning each neighbor edge       |
/// | fire      | `budget_factor`    | 100     | total edge visits = factor * m                  |
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsifyConfig {
    pub method: Method,
    pub target_ratio: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

impl SparsifyConfig {
    pub fn new(method: Method, target_ratio: f64, seed: u64) -> Self {
        Self {
            method,
            target_ratio,
            seed,
            params: BTreeMap::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_ratio > 0.0 && self.target_ratio <= 1.0) {
            return Err(Error::Config(format!(
                "target ratio {} outside (0, 1]",
                self.target_ratio
            )));
        }
        let known = self.method.known_params();
        for (key, value) in &self.params {
            if !known.contains(&key.as_str()) {
                return Err(Error::Config(format!(
                    "unknown parameter {key:?} for method {}",
                    self.method
                )));
            }
            if !value.is_finite() {
                return Err(Error::Config(format!("parameter {key:?} is not finite")));
            }
        }
        Ok(())
    }

    fn param(&self, key: &str, default: f64) -> f64 {
        self.params.get(key).copied().unwrap_or(default)
    }
}

/// One score per edge, aligned with the graph's canonical edge order.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeScores {
    pub graph: Graph,
    pub scores: Vec<f64>,
    pub direction: Direction,
}

/// Scores every edge of `g` with the configured method.
pub fn score_edges(g: &Graph, config: &SparsifyConfig) -> Result<EdgeScores> {
    config.validate()?;
    if g.num_edges() == 0 {
        return input("cannot score the edges of an edgeless graph");
    }
    let mut direction = config.method.default_direction();
    let scores = match config.method {
        Method::Random => {
            let mut rng = seed::rng(config.seed);
            (0..g.num_edges()).map(|_| rng.gen::<f64>()).collect()
        }
        Method::Algebraic => {
            if config.param("ascending", 0.0) != 0.0 {
                direction = Direction::KeepHigh;
            }
            algebraic_distance(g, config)?
        }
        Method::Fire => forest_fire(g, config)?,
        Method::Degree => local_degree(g),
        Method::Similarity => jaccard(g),
        Method::Scan => scan(g),
        Method::Simmelian => simmelian(g),
        Method::Effective => effective_resistance(g)?,
    };
    debug_assert!(scores.iter().all(|s: &f64| s.is_finite()));
    Ok(EdgeScores {
        graph: g.clone(),
        scores,
        direction,
    })
}

/// Number of edges kept for a target ratio: `round(ratio * m)`.
pub fn kept_count(m: usize, target_ratio: f64) -> usize {
    ((target_ratio * m as f64).round() as usize).min(m)
}

/// Keeps the best `round(target_ratio * m)` edges according to the score
/// direction; ties fall to a seeded shuffle, then canonical order.
pub fn filter_to_ratio(scores: &EdgeScores, target_ratio: f64, seed: u64) -> Result<Graph> {
    if !(target_ratio > 0.0 && target_ratio <= 1.0) {
        return input(format!("target ratio {target_ratio} outside (0, 1]"));
    }
    let m = scores.graph.num_edges();
    if scores.scores.len() != m {
        return input("score vector does not match the edge count");
    }
    let mut shuffle: Vec<usize> = (0..m).collect();
    shuffle.shuffle(&mut seed::rng(seed));
    let mut tiebreak = vec![0usize; m];
    for (pos, &edge) in shuffle.iter().enumerate() {
        tiebreak[edge] = pos;
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (scores.scores[a], scores.scores[b]);
        let primary = match scores.direction {
            Direction::KeepHigh => sb.total_cmp(&sa),
            Direction::KeepLow => sa.total_cmp(&sb),
        };
        primary.then(tiebreak[a].cmp(&tiebreak[b])).then(a.cmp(&b))
    });
    let mut keep = vec![false; m];
    for &e in order.iter().take(kept_count(m, target_ratio)) {
        keep[e] = true;
    }
    Ok(scores.graph.filter_edges(|i, _| keep[i]))
}

/// Scores and filters in one step.
pub fn sparsify(g: &Graph, config: &SparsifyConfig) -> Result<Graph> {
    let scores = score_edges(g, config)?;
    filter_to_ratio(
        &scores,
        config.target_ratio,
        seed::derive(config.seed, "tiebreak", 0),
    )
}

/// Removes each edge outside the cut of `sol` independently with probability
/// `p_e`. Cut edges are always kept; `p_e = 1` removes every non-cut edge.
pub fn sparsify_by_solution(g: &Graph, sol: &CutSolution, p_e: f64, seed: u64) -> Result<Graph> {
    let removed = select_noncut_edges(g, sol, p_e, seed)?;
    Ok(g.filter_edges(|i, _| !removed[i]))
}

/// Marks each non-cut edge independently with probability `p_e`
/// (the randomized edge subset shared by the random sparse and random cut
/// variants). Indexed by canonical edge position.
pub fn select_noncut_edges(g: &Graph, sol: &CutSolution, p_e: f64, seed: u64) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&p_e) {
        return input(format!("edge probability {p_e} outside [0, 1]"));
    }
    if sol.assignment.len() != g.num_vertices() {
        return input("solution length does not match the graph");
    }
    let mut rng = seed::rng(seed);
    let a = sol.assignment;
    Ok(g.edges()
        .iter()
        .map(|&(u, v)| a.side(u) == a.side(v) && rng.gen::<f64>() < p_e)
        .collect())
}

/// Removes exactly `k` non-cut edges. The removal order is a seeded
/// permutation, so `k + 1` always removes a superset of what `k` removes.
pub fn remove_k_noncut_edges(g: &Graph, sol: &CutSolution, k: usize, seed: u64) -> Result<Graph> {
    let (_, mut not_in_cut) = partition_edges(g, sol)?;
    if k > not_in_cut.len() {
        return input(format!(
            "cannot remove {k} non-cut edges; only {} exist",
            not_in_cut.len()
        ));
    }
    not_in_cut.shuffle(&mut seed::rng(seed));
    let mut removed = not_in_cut[..k].to_vec();
    removed.sort_unstable();
    Ok(g.filter_edges(|_, e| removed.binary_search(&e).is_err()))
}

fn algebraic_distance(g: &Graph, config: &SparsifyConfig) -> Result<Vec<f64>> {
    let vectors = config.param("test_vectors", 10.0);
    let sweeps = config.param("sweeps", 20.0);
    let omega = config.param("omega", 0.5);
    let norm = config.param("norm", 2.0);
    let exponent = config.param("exponent", 1.0);
    if vectors < 1.0 || sweeps < 0.0 || !(omega > 0.0 && omega <= 1.0) || norm < 1.0 {
        return Err(Error::Config(
            "algebraic distance needs test_vectors >= 1, sweeps >= 0, omega in (0, 1], norm >= 1"
                .into(),
        ));
    }
    let n = g.num_vertices();
    let adj = g.neighbors();
    let mut rng = seed::rng(config.seed);
    let mut sums = vec![0.0f64; g.num_edges()];
    let mut x = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    for _ in 0..vectors as usize {
        for xi in &mut x {
            *xi = rng.gen_range(-0.5..0.5);
        }
        for _ in 0..sweeps as usize {
            for v in 0..n {
                next[v] = if adj[v].is_empty() {
                    x[v]
                } else {
                    let avg = adj[v].iter().map(|&w| x[w]).sum::<f64>() / adj[v].len() as f64;
                    (1.0 - omega) * x[v] + omega * avg
                };
            }
            std::mem::swap(&mut x, &mut next);
        }
        for (s, &(u, v)) in sums.iter_mut().zip(g.edges()) {
            *s += (x[u] - x[v]).abs().powf(norm);
        }
    }
    Ok(sums
        .into_iter()
        .map(|s| s.powf(1.0 / norm).powf(exponent))
        .collect())
}

fn forest_fire(g: &Graph, config: &SparsifyConfig) -> Result<Vec<f64>> {
    let burn = config.param("burn_probability", 0.7);
    let factor = config.param("budget_factor", 100.0);
    if !(burn > 0.0 && burn <= 1.0) || factor <= 0.0 {
        return Err(Error::Config(
            "forest fire needs burn_probability in (0, 1] and budget_factor > 0".into(),
        ));
    }
    let n = g.num_vertices();
    let adj = g.neighbors();
    let budget = (factor * g.num_edges() as f64).ceil() as usize;
    let mut rng = seed::rng(config.seed);
    let mut visits = vec![0.0f64; g.num_edges()];
    let mut total = 0usize;
    let mut burnt = vec![false; n];
    let mut frontier = std::collections::VecDeque::new();
    while total < budget {
        // Start a new fire from a random vertex.
        burnt.iter_mut().for_each(|b| *b = false);
        frontier.clear();
        let start = rng.gen_range(0..n);
        burnt[start] = true;
        frontier.push_back(start);
        while let Some(v) = frontier.pop_front() {
            if total >= budget {
                break;
            }
            let mut candidates: Vec<usize> =
                adj[v].iter().copied().filter(|&w| !burnt[w]).collect();
            candidates.shuffle(&mut rng);
            for w in candidates {
                if total >= budget {
                    break;
                }
                if rng.gen::<f64>() < burn {
                    let e = g.edge_index(v, w).expect("neighbor edge exists");
                    visits[e] += 1.0;
                    total += 1;
                    burnt[w] = true;
                    frontier.push_back(w);
                }
            }
        }
        if adj.iter().all(Vec::is_empty) {
            break;
        }
    }
    Ok(visits)
}

fn local_degree(g: &Graph) -> Vec<f64> {
    let adj = g.neighbors();
    let deg = g.degrees();
    // Fraction of `u`'s neighbors whose degree does not exceed that of `v`.
    let percentile = |u: usize, v: usize| {
        adj[u].iter().filter(|&&w| deg[w] <= deg[v]).count() as f64 / adj[u].len() as f64
    };
    g.edges()
        .iter()
        .map(|&(u, v)| percentile(u, v).max(percentile(v, u)))
        .collect()
}

fn common_count(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

fn jaccard(g: &Graph) -> Vec<f64> {
    let adj = g.neighbors();
    g.edges()
        .iter()
        .map(|&(u, v)| {
            let common = common_count(&adj[u], &adj[v]);
            let union = adj[u].len() + adj[v].len() - common;
            common as f64 / union as f64
        })
        .collect()
}

fn scan(g: &Graph) -> Vec<f64> {
    let adj = g.neighbors();
    g.edges()
        .iter()
        .map(|&(u, v)| {
            // Closed neighborhoods: u and v belong to both, on top of the open overlap.
            let common = common_count(&adj[u], &adj[v]) + 2;
            let (du, dv) = (adj[u].len() + 1, adj[v].len() + 1);
            common as f64 / ((du * dv) as f64).sqrt()
        })
        .collect()
}

fn simmelian(g: &Graph) -> Vec<f64> {
    let adj = g.neighbors();
    let strength: Vec<usize> = g
        .edges()
        .iter()
        .map(|&(u, v)| common_count(&adj[u], &adj[v]))
        .collect();
    // Neighbors ranked by tie strength, strongest first, ties by index.
    let ranked: Vec<Vec<usize>> = (0..g.num_vertices())
        .map(|u| {
            let mut list = adj[u].clone();
            list.sort_by_key(|&w| {
                let e = g.edge_index(u, w).expect("neighbor edge exists");
                (std::cmp::Reverse(strength[e]), w)
            });
            list
        })
        .collect();
    g.edges()
        .iter()
        .map(|&(u, v)| {
            let depth = ranked[u].len().min(ranked[v].len());
            let mut best = 0.0f64;
            let mut seen_u = std::collections::HashSet::new();
            let mut seen_v = std::collections::HashSet::new();
            let mut overlap = 0usize;
            for k in 0..depth {
                let (a, b) = (ranked[u][k], ranked[v][k]);
                if a == b {
                    overlap += 1;
                } else {
                    overlap += usize::from(seen_v.contains(&a)) + usize::from(seen_u.contains(&b));
                }
                seen_u.insert(a);
                seen_v.insert(b);
                let size = k + 1;
                best = best.max(overlap as f64 / (2 * size - overlap) as f64);
            }
            best
        })
        .collect()
}

/// Moore–Penrose pseudoinverse of the combinatorial Laplacian.
pub fn laplacian_pseudoinverse(g: &Graph) -> Result<DMatrix<f64>> {
    let n = g.num_vertices();
    let mut lap = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        lap[(u, u)] += 1.0;
        lap[(v, v)] += 1.0;
        lap[(u, v)] -= 1.0;
        lap[(v, u)] -= 1.0;
    }
    let eig = SymmetricEigen::new(lap);
    let largest = eig.eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cutoff = 1e-9 * largest.max(1.0);
    let mut pinv = DMatrix::<f64>::zeros(n, n);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda.abs() > cutoff {
            let col = eig.eigenvectors.column(k);
            pinv += (col * col.transpose()) / lambda;
        }
    }
    if pinv.iter().any(|x| !x.is_finite()) {
        return Err(Error::Numerical(
            "Laplacian pseudoinverse is not finite".into(),
        ));
    }
    Ok(pinv)
}

fn effective_resistance(g: &Graph) -> Result<Vec<f64>> {
    let pinv = laplacian_pseudoinverse(g)?;
    Ok(g.edges()
        .iter()
        .map(|&(u, v)| pinv[(u, u)] + pinv[(v, v)] - 2.0 * pinv[(u, v)])
        .collect())
}
