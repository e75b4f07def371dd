//! Graphs, cut evaluation and the exact enumeration oracles.
//!
//! Bit convention: bit `i` of an assignment (little-endian, bit 0 = qubit 0)
//! is the side of vertex `i`. The textual form of an [`Assignment`] lists
//! vertex 0 first, so `"001"` puts vertex 2 alone on side 1.

use std::cmp::Ordering;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng as _;

use crate::error::{input, Error, Result};
use crate::seed;

/// Largest vertex count accepted by the brute-force MaxCut oracle.
pub const MAX_ENUM_VERTICES: usize = 28;
/// Largest vertex count accepted by [`spectrum`].
pub const MAX_SPECTRUM_VERTICES: usize = 20;

/// A simple undirected unweighted graph stored as a canonical edge list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Builds a graph, orienting every pair as `(min, max)` and sorting.
    ///
    /// Self-loops, duplicates and out-of-range endpoints are rejected.
    pub fn new(
        num_vertices: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if num_vertices == 0 {
            return input("a graph needs at least one vertex");
        }
        if num_vertices > 64 {
            return Err(Error::Capability(format!(
                "{num_vertices} vertices do not fit a 64-bit assignment"
            )));
        }
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b {
                return input(format!("self-loop at vertex {a}"));
            }
            if a >= num_vertices || b >= num_vertices {
                return input(format!(
                    "edge ({a}, {b}) has an endpoint outside [0, {num_vertices})"
                ));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return input(format!("duplicate edge ({}, {})", w[0].0, w[0].1));
        }
        Ok(Self {
            num_vertices,
            edges: list,
        })
    }

    pub fn empty(num_vertices: usize) -> Result<Self> {
        Self::new(num_vertices, [])
    }

    pub fn path(n: usize) -> Result<Self> {
        Self::new(n, (1..n).map(|v| (v - 1, v)))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return input("a cycle needs at least three vertices");
        }
        Self::new(n, (0..n).map(|v| (v, (v + 1) % n)))
    }

    pub fn complete(n: usize) -> Result<Self> {
        Self::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn complete_bipartite(a: usize, b: usize) -> Result<Self> {
        Self::new(a + b, (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v))))
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical (lexicographic) order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.num_vertices];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for &(u, v) in &self.edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        deg
    }

    /// Neighbor sets as bit masks.
    pub fn adjacency_masks(&self) -> Vec<u64> {
        let mut masks = vec![0u64; self.num_vertices];
        for &(u, v) in &self.edges {
            masks[u] |= 1 << v;
            masks[v] |= 1 << u;
        }
        masks
    }

    /// Graph on the same vertex set restricted to the edges where `keep` holds.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize, (usize, usize)) -> bool) -> Graph {
        Graph {
            num_vertices: self.num_vertices,
            edges: self
                .edges
                .iter()
                .enumerate()
                .filter(|&(i, &e)| keep(i, e))
                .map(|(_, &e)| e)
                .collect(),
        }
    }

    pub fn num_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.num_vertices).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = self.num_vertices;
        for &(u, v) in &self.edges {
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru] = rv;
                components -= 1;
            }
        }
        components
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// Cut size of the raw bit pattern `bits` (no length check).
    pub fn cut_of_bits(&self, bits: u64) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| ((bits >> u) ^ (bits >> v)) & 1 == 1)
            .count()
    }

    /// Cut value of every basis state, indexed by bit pattern.
    pub fn cut_table(&self) -> Result<Vec<u32>> {
        let n = self.num_vertices;
        if n > MAX_ENUM_VERTICES {
            return Err(Error::Capability(format!(
                "cut table for {n} vertices exceeds the {MAX_ENUM_VERTICES}-vertex budget"
            )));
        }
        let masks = self.adjacency_masks();
        let deg = self.degrees();
        let mut table = vec![0u32; 1usize << n];
        for x in 1usize..table.len() {
            let top = usize::BITS as usize - 1 - x.leading_zeros() as usize;
            let rest = x ^ (1 << top);
            let same = (masks[top] & rest as u64).count_ones();
            table[x] = table[rest] + deg[top] as u32 - 2 * same;
        }
        Ok(table)
    }

    /// Parses the edge-list text format: `n m` then `m` lines of `u v`.
    /// Lines starting with `#` (and trailing `#` comments) are ignored.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            message: "missing header line".into(),
        })?;
        let (n, m) = parse_pair(line, header)?;
        let mut edges = Vec::with_capacity(m);
        for (line, body) in lines {
            edges.push(parse_pair(line, body)?);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line,
                message: format!("header declares {m} edges but {} were listed", edges.len()),
            });
        }
        Self::new(n, edges)
    }

    pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_edge_list(&std::fs::read_to_string(path)?)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.num_vertices, self.edges.len());
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_edge_list(s)
    }
}

fn parse_pair(line: usize, body: &str) -> Result<(usize, usize)> {
    let mut it = body.split_whitespace().map(str::parse::<usize>);
    match (it.next(), it.next(), it.next()) {
        (Some(Ok(a)), Some(Ok(b)), None) => Ok((a, b)),
        _ => Err(Error::Parse {
            line,
            message: format!("expected two non-negative integers, got {body:?}"),
        }),
    }
}

/// A vertex bipartition of a fixed length.
///
/// Ordered lexicographically by its textual form (vertex 0 first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: u64,
    len: usize,
}

impl Assignment {
    pub fn new(bits: u64, len: usize) -> Result<Self> {
        if len == 0 || len > 64 {
            return input(format!("assignment length {len} outside 1..=64"));
        }
        if len < 64 && bits >> len != 0 {
            return input(format!("bits {bits:#b} exceed length {len}"));
        }
        Ok(Self { bits, len })
    }

    pub fn zeros(len: usize) -> Result<Self> {
        Self::new(0, len)
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn side(&self, vertex: usize) -> bool {
        (self.bits >> vertex) & 1 == 1
    }

    pub fn flipped(&self, vertex: usize) -> Self {
        Self {
            bits: self.bits ^ (1 << vertex),
            len: self.len,
        }
    }

    pub fn complement(&self) -> Self {
        let mask = if self.len == 64 {
            u64::MAX
        } else {
            (1u64 << self.len) - 1
        };
        Self {
            bits: !self.bits & mask,
            len: self.len,
        }
    }

    fn lex_key(&self) -> u64 {
        self.bits.reverse_bits() >> (64 - self.len)
    }
}

impl Ord for Assignment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.lex_key().cmp(&other.lex_key()))
    }
}

impl PartialOrd for Assignment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.side(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Assignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut bits = 0u64;
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' if i < 64 => bits |= 1 << i,
                _ => return input(format!("invalid assignment string {s:?}")),
            }
        }
        Self::new(bits, s.chars().count())
    }
}

/// An assignment together with its cut value on a particular graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CutSolution {
    pub assignment: Assignment,
    pub value: usize,
}

impl CutSolution {
    pub fn evaluate(g: &Graph, assignment: Assignment) -> Result<Self> {
        Ok(Self {
            value: cut_value(g, &assignment)?,
            assignment,
        })
    }
}

fn check_len(g: &Graph, a: &Assignment) -> Result<()> {
    if a.len() != g.num_vertices() {
        return input(format!(
            "assignment of length {} for a graph with {} vertices",
            a.len(),
            g.num_vertices()
        ));
    }
    Ok(())
}

/// Number of edges whose endpoints lie on different sides.
pub fn cut_value(g: &Graph, assignment: &Assignment) -> Result<usize> {
    check_len(g, assignment)?;
    Ok(g.cut_of_bits(assignment.bits()))
}

/// Splits the edge set into edges crossing the cut and the remaining ones.
pub fn partition_edges(
    g: &Graph,
    sol: &CutSolution,
) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    check_len(g, &sol.assignment)?;
    let a = sol.assignment;
    Ok(g.edges()
        .iter()
        .partition(|&&(u, v)| a.side(u) != a.side(v)))
}

/// Visits every assignment (optionally with vertex 0 pinned to side 0) in
/// Gray-code order, passing the bit pattern and its cut value.
fn for_each_cut(g: &Graph, pin_vertex0: bool, mut visit: impl FnMut(u64, usize)) {
    let n = g.num_vertices();
    let masks = g.adjacency_masks();
    let deg = g.degrees();
    let offset = usize::from(pin_vertex0);
    let free = n - offset;
    let mut x = 0u64;
    let mut cut = 0isize;
    visit(0, 0);
    for step in 1u64..(1u64 << free) {
        let v = step.trailing_zeros() as usize + offset;
        let same_side = if (x >> v) & 1 == 0 {
            deg[v] as isize - (masks[v] & x).count_ones() as isize
        } else {
            (masks[v] & x).count_ones() as isize
        };
        cut += 2 * same_side - deg[v] as isize;
        x ^= 1 << v;
        visit(x, cut as usize);
    }
}

fn check_budget(g: &Graph, budget: usize) -> Result<()> {
    if g.num_vertices() > budget {
        return Err(Error::Capability(format!(
            "{} vertices exceed the enumeration budget of {budget}",
            g.num_vertices()
        )));
    }
    Ok(())
}

/// Exact MaxCut by enumeration.
///
/// Returns `C_max` and every maximizer with vertex 0 on side 0 (one
/// representative per complementary pair), sorted lexicographically.
pub fn brute_force_maxcut(g: &Graph) -> Result<(usize, Vec<CutSolution>)> {
    check_budget(g, MAX_ENUM_VERTICES)?;
    let n = g.num_vertices();
    let mut best = 0usize;
    let mut optima = Vec::new();
    for_each_cut(g, true, |bits, value| {
        if value > best {
            best = value;
            optima.clear();
        }
        if value == best {
            optima.push(bits);
        }
    });
    let mut optima: Vec<CutSolution> = optima
        .into_iter()
        .map(|bits| CutSolution {
            assignment: Assignment { bits, len: n },
            value: best,
        })
        .collect();
    optima.sort_by_key(|s| s.assignment);
    Ok((best, optima))
}

/// Maximum cut value only.
pub fn max_cut_value(g: &Graph) -> Result<usize> {
    check_budget(g, MAX_ENUM_VERTICES)?;
    let mut best = 0;
    for_each_cut(g, true, |_, value| best = best.max(value));
    Ok(best)
}

/// One level of a [`Spectrum`]: a cut value and all assignments attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    pub cut_value: usize,
    /// Bit patterns in increasing numeric order.
    pub members: Vec<u32>,
}

/// All assignments grouped by cut value, highest value first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spectrum {
    pub num_vertices: usize,
    pub levels: Vec<Level>,
}

impl Spectrum {
    /// Level index (0-based) of every bit pattern.
    pub fn level_of(&self) -> Vec<u32> {
        let mut out = vec![0u32; 1 << self.num_vertices];
        for (k, level) in self.levels.iter().enumerate() {
            for &x in &level.members {
                out[x as usize] = k as u32;
            }
        }
        out
    }

    pub fn max_cut(&self) -> usize {
        self.levels[0].cut_value
    }
}

pub fn spectrum(g: &Graph) -> Result<Spectrum> {
    check_budget(g, MAX_SPECTRUM_VERTICES)?;
    let table = g.cut_table()?;
    let mut counts = vec![0usize; g.num_edges() + 1];
    for &c in &table {
        counts[c as usize] += 1;
    }
    let mut levels: Vec<Level> = (0..counts.len())
        .rev()
        .filter(|&c| counts[c] > 0)
        .map(|c| Level {
            cut_value: c,
            members: Vec::with_capacity(counts[c]),
        })
        .collect();
    let mut slot = vec![usize::MAX; counts.len()];
    for (k, level) in levels.iter().enumerate() {
        slot[level.cut_value] = k;
    }
    for (x, &c) in table.iter().enumerate() {
        levels[slot[c as usize]].members.push(x as u32);
    }
    Ok(Spectrum {
        num_vertices: g.num_vertices(),
        levels,
    })
}

/// Output of [`generate_random_graph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedGraph {
    pub graph: Graph,
    pub connected: bool,
}

/// Uniform `G(n, m)` sample. Disconnected samples are kept and flagged.
pub fn generate_random_graph(n: usize, m: usize, seed: u64) -> Result<GeneratedGraph> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    if m > pairs.len() {
        return input(format!(
            "{m} edges requested but K_{n} has only {}",
            pairs.len()
        ));
    }
    let mut rng = seed::rng(seed);
    let chosen = index::sample(&mut rng, pairs.len(), m);
    let graph = Graph::new(n, chosen.into_iter().map(|i| pairs[i]))?;
    let connected = graph.is_connected();
    Ok(GeneratedGraph { graph, connected })
}

/// A seeded uniform choice among all assignments with cut value `C_max - d`.
pub fn solution_at_distance(g: &Graph, d: usize, seed: u64) -> Result<CutSolution> {
    check_budget(g, MAX_ENUM_VERTICES)?;
    let c_max = max_cut_value(g)?;
    let target = c_max
        .checked_sub(d)
        .ok_or_else(|| Error::NotFound(format!("distance {d} exceeds the maximum cut {c_max}")))?;
    let mut count = 0u64;
    for_each_cut(g, false, |_, value| count += u64::from(value == target));
    if count == 0 {
        return Err(Error::NotFound(format!(
            "no assignment cuts exactly {target} edges"
        )));
    }
    let pick = seed::rng(seed).gen_range(0..count);
    let mut seen = 0u64;
    let mut found = None;
    for_each_cut(g, false, |bits, value| {
        if value == target {
            if seen == pick {
                found = Some(bits);
            }
            seen += 1;
        }
    });
    let bits = found.expect("pick index is below the number of matches");
    Ok(CutSolution {
        assignment: Assignment {
            bits,
            len: g.num_vertices(),
        },
        value: target,
    })
}
