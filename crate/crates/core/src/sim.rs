//! Dense statevector simulation of the QAOA circuit for MaxCut.
//!
//! Amplitude `x` belongs to the basis state whose bit `i` is qubit (vertex) `i`.
//! The phase operator is applied as the diagonal `exp(-i * sum_e gamma_e * [e cut by x])`,
//! which drops the constant global phase carried by the identity term of the
//! MaxCut Hamiltonian. The mixer is `exp(-i * beta * X)` on every qubit.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{partition_edges, CutSolution, Graph};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 28;

/// Registers at least this large use data-parallel kernels.
const PARALLEL_QUBITS: usize = 14;
const REDUCE_CHUNK: usize = 1 << 12;

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<()> {
    if n == 0 {
        return input("a register needs at least one qubit");
    }
    if n > MAX_QUBITS {
        return Err(Error::Capability(format!(
            "{n} qubits exceed the {MAX_QUBITS}-qubit simulation budget"
        )));
    }
    Ok(())
}

impl Statevector {
    /// The uniform superposition `|+>^n`.
    pub fn plus(n: usize) -> Result<Self> {
        check_qubits(n)?;
        let amp = Complex64::new((0.5f64).powf(n as f64 / 2.0), 0.0);
        Ok(Self {
            num_qubits: n,
            amps: vec![amp; 1 << n],
        })
    }

    pub fn basis(n: usize, x: usize) -> Result<Self> {
        check_qubits(n)?;
        if x >> n != 0 {
            return input(format!("basis index {x} out of range for {n} qubits"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[x] = Complex64::new(1.0, 0.0);
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    /// Wraps raw amplitudes; the length must be a power of two. No normalization is applied.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() || amps.len() < 2 {
            return input(format!("{} amplitudes is not a register size", amps.len()));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_qubits(n)?;
        Ok(Self {
            num_qubits: n,
            amps,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps
            .iter()
            .map(Complex64::norm_sqr)
            .sum::<f64>()
            .sqrt()
    }

    /// Resets in place to `|+>^n` without reallocating.
    pub fn reset_plus(&mut self) {
        let amp = Complex64::new((0.5f64).powf(self.num_qubits as f64 / 2.0), 0.0);
        self.amps.iter_mut().for_each(|a| *a = amp);
    }

    /// Applies `exp(-i * beta * X)` to every qubit.
    pub fn apply_mixer(&mut self, beta: f64) {
        let (s, c) = beta.sin_cos();
        let parallel = self.num_qubits >= PARALLEL_QUBITS;
        for q in 0..self.num_qubits {
            let stride = 1usize << q;
            let rotate = |lo: &mut Complex64, hi: &mut Complex64| {
                let (a, b) = (*lo, *hi);
                // -i*s*z = (s*z.im, -s*z.re)
                *lo = Complex64::new(c * a.re + s * b.im, c * a.im - s * b.re);
                *hi = Complex64::new(c * b.re + s * a.im, c * b.im - s * a.re);
            };
            let pair = |chunk: &mut [Complex64]| {
                let (lo, hi) = chunk.split_at_mut(stride);
                lo.iter_mut()
                    .zip(hi.iter_mut())
                    .for_each(|(a, b)| rotate(a, b));
            };
            if !parallel {
                self.amps.chunks_mut(2 * stride).for_each(pair);
            } else if self.amps.len() / (2 * stride) >= 64 {
                self.amps.par_chunks_mut(2 * stride).for_each(pair);
            } else {
                for chunk in self.amps.chunks_mut(2 * stride) {
                    let (lo, hi) = chunk.split_at_mut(stride);
                    lo.par_iter_mut()
                        .zip(hi.par_iter_mut())
                        .with_min_len(REDUCE_CHUNK)
                        .for_each(|(a, b)| rotate(a, b));
                }
            }
        }
    }

    /// Multiplies amplitude `x` by `factors[index[x]]`.
    fn apply_diagonal(&mut self, index: &[u32], factors: &[Complex64]) {
        if self.num_qubits >= PARALLEL_QUBITS {
            self.amps
                .par_iter_mut()
                .zip(index.par_iter())
                .with_min_len(REDUCE_CHUNK)
                .for_each(|(a, &k)| *a *= factors[k as usize]);
        } else {
            self.amps
                .iter_mut()
                .zip(index)
                .for_each(|(a, &k)| *a *= factors[k as usize]);
        }
    }

    /// `sum_x |a_x|^2 * values[x]`, reduced in a fixed order.
    fn diagonal_expectation(&self, values: &[u32]) -> f64 {
        let partial = |(a, v): (&[Complex64], &[u32])| -> f64 {
            a.iter()
                .zip(v)
                .map(|(a, &v)| a.norm_sqr() * f64::from(v))
                .sum()
        };
        if self.num_qubits >= PARALLEL_QUBITS {
            let sums: Vec<f64> = self
                .amps
                .par_chunks(REDUCE_CHUNK)
                .zip(values.par_chunks(REDUCE_CHUNK))
                .map(partial)
                .collect();
            sums.iter().sum()
        } else {
            partial((&self.amps, values))
        }
    }
}

/// Which gamma an edge of a split phase operator uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeClass {
    /// Uses the first gamma of the layer.
    First,
    /// Uses the second gamma of the layer.
    Second,
}

/// Topology (and optional edge classes) of the phase operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseSpec {
    topology: Graph,
    edge_class: Option<Vec<EdgeClass>>,
}

impl PhaseSpec {
    /// One gamma per layer over every edge of `topology`.
    pub fn standard(topology: Graph) -> Self {
        Self {
            topology,
            edge_class: None,
        }
    }

    /// Two gammas per layer; `classes` labels every edge in canonical order.
    pub fn split(topology: Graph, classes: Vec<EdgeClass>) -> Result<Self> {
        if classes.len() != topology.num_edges() {
            return input(format!(
                "{} edge classes for {} edges",
                classes.len(),
                topology.num_edges()
            ));
        }
        Ok(Self {
            topology,
            edge_class: Some(classes),
        })
    }

    /// Cut QAOA: edges crossing `sol` use the first gamma, all others the second.
    pub fn cut(g: &Graph, sol: &CutSolution) -> Result<Self> {
        partition_edges(g, sol)?;
        let a = sol.assignment;
        let classes = g
            .edges()
            .iter()
            .map(|&(u, v)| {
                if a.side(u) != a.side(v) {
                    EdgeClass::First
                } else {
                    EdgeClass::Second
                }
            })
            .collect();
        Self::split(g.clone(), classes)
    }

    /// Random Cut QAOA: edges in `selected` (canonical positions) use the first
    /// gamma, the rest the second.
    pub fn selected(g: &Graph, selected: &[bool]) -> Result<Self> {
        let classes = selected
            .iter()
            .map(|&s| {
                if s {
                    EdgeClass::First
                } else {
                    EdgeClass::Second
                }
            })
            .collect();
        Self::split(g.clone(), classes)
    }

    pub fn topology(&self) -> &Graph {
        &self.topology
    }

    pub fn edge_class(&self) -> Option<&[EdgeClass]> {
        self.edge_class.as_deref()
    }

    /// Number of gamma values per layer (1 or 2).
    pub fn gamma_arity(&self) -> usize {
        if self.edge_class.is_some() {
            2
        } else {
            1
        }
    }

    fn class_graph(&self, class: EdgeClass) -> Graph {
        let classes = self.edge_class.as_ref().expect("split spec");
        self.topology.filter_edges(|i, _| classes[i] == class)
    }

    /// Precomputes the per-basis-state lookup used by [`apply_phase`].
    pub fn compile(&self, num_qubits: usize) -> Result<PhaseTable> {
        check_qubits(num_qubits)?;
        if self.topology.num_vertices() > num_qubits {
            return input(format!(
                "phase topology has {} vertices but the register has {num_qubits} qubits",
                self.topology.num_vertices()
            ));
        }
        let widen = |g: &Graph| -> Result<Vec<u32>> {
            let wide = Graph::new(num_qubits, g.edges().iter().copied())?;
            wide.cut_table()
        };
        match &self.edge_class {
            None => Ok(PhaseTable {
                index: widen(&self.topology)?,
                first_levels: self.topology.num_edges() + 1,
                second_levels: None,
            }),
            Some(_) => {
                let first = self.class_graph(EdgeClass::First);
                let second = self.class_graph(EdgeClass::Second);
                let width = second.num_edges() + 1;
                let mut index = widen(&first)?;
                for (k, c2) in index.iter_mut().zip(widen(&second)?) {
                    *k = *k * width as u32 + c2;
                }
                Ok(PhaseTable {
                    index,
                    first_levels: first.num_edges() + 1,
                    second_levels: Some(width),
                })
            }
        }
    }
}

/// Per-layer gamma value(s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Gamma {
    Single(f64),
    Pair(f64, f64),
}

impl Gamma {
    pub fn arity(&self) -> usize {
        match self {
            Gamma::Single(_) => 1,
            Gamma::Pair(..) => 2,
        }
    }
}

/// One QAOA layer: phase angle(s) then mixer angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub gamma: Gamma,
    pub beta: f64,
}

/// Angles of a depth-`p` circuit.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct QaoaParams {
    pub layers: Vec<Layer>,
}

impl QaoaParams {
    pub fn standard(gammas: &[f64], betas: &[f64]) -> Result<Self> {
        if gammas.len() != betas.len() {
            return input("gamma and beta schedules differ in length");
        }
        Ok(Self {
            layers: gammas
                .iter()
                .zip(betas)
                .map(|(&g, &b)| Layer {
                    gamma: Gamma::Single(g),
                    beta: b,
                })
                .collect(),
        })
    }

    pub fn zeros(p: usize, gamma_arity: usize) -> Result<Self> {
        Self::from_flat(&vec![0.0; p * (gamma_arity + 1)], gamma_arity)
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Flattened as `[gamma.., beta]` per layer.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for layer in &self.layers {
            match layer.gamma {
                Gamma::Single(g) => out.push(g),
                Gamma::Pair(a, b) => out.extend([a, b]),
            }
            out.push(layer.beta);
        }
        out
    }

    pub fn from_flat(flat: &[f64], gamma_arity: usize) -> Result<Self> {
        let width = gamma_arity + 1;
        if !(1..=2).contains(&gamma_arity) || !flat.len().is_multiple_of(width) {
            return input(format!(
                "{} values do not split into layers of gamma arity {gamma_arity}",
                flat.len()
            ));
        }
        Ok(Self {
            layers: flat
                .chunks(width)
                .map(|c| Layer {
                    gamma: if gamma_arity == 1 {
                        Gamma::Single(c[0])
                    } else {
                        Gamma::Pair(c[0], c[1])
                    },
                    beta: c[gamma_arity],
                })
                .collect(),
        })
    }

    /// Copies each single gamma into both slots of a pair.
    pub fn to_split(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    gamma: match l.gamma {
                        Gamma::Single(g) => Gamma::Pair(g, g),
                        pair => pair,
                    },
                    beta: l.beta,
                })
                .collect(),
        }
    }
}

/// Compiled phase operator: for each basis state, an index into a table of
/// phase factors built from the layer's gamma(s).
#[derive(Clone, Debug)]
pub struct PhaseTable {
    index: Vec<u32>,
    first_levels: usize,
    second_levels: Option<usize>,
}

impl PhaseTable {
    pub fn gamma_arity(&self) -> usize {
        if self.second_levels.is_some() {
            2
        } else {
            1
        }
    }

    fn factors(&self, gamma: Gamma) -> Result<Vec<Complex64>> {
        let phase = |angle: f64| Complex64::from_polar(1.0, -angle);
        match (gamma, self.second_levels) {
            (Gamma::Single(g), None) => Ok((0..self.first_levels)
                .map(|k| phase(g * k as f64))
                .collect()),
            (Gamma::Pair(g1, g2), Some(width)) => Ok((0..self.first_levels)
                .flat_map(|k1| (0..width).map(move |k2| phase(g1 * k1 as f64 + g2 * k2 as f64)))
                .collect()),
            _ => input(format!(
                "gamma arity {} does not match a phase operator of arity {}",
                gamma.arity(),
                self.gamma_arity()
            )),
        }
    }

    pub fn apply(&self, state: &mut Statevector, gamma: Gamma) -> Result<()> {
        if state.amps.len() != self.index.len() {
            return input("phase table and state differ in size");
        }
        let factors = self.factors(gamma)?;
        state.apply_diagonal(&self.index, &factors);
        Ok(())
    }

    /// Runs the full circuit into `state`, starting from `|+>^n`.
    pub fn prepare(&self, state: &mut Statevector, params: &QaoaParams) -> Result<()> {
        state.reset_plus();
        for layer in &params.layers {
            self.apply(state, layer.gamma)?;
            state.apply_mixer(layer.beta);
        }
        Ok(())
    }
}

pub fn prepare_plus_state(n: usize) -> Result<Statevector> {
    Statevector::plus(n)
}

/// Applies the (possibly split) phase operator of `spec`.
pub fn apply_phase(state: &mut Statevector, spec: &PhaseSpec, gamma: Gamma) -> Result<()> {
    spec.compile(state.num_qubits())?.apply(state, gamma)
}

pub fn apply_mixer(state: &mut Statevector, beta: f64) {
    state.apply_mixer(beta);
}

/// `U(B, beta_p) U(H, gamma_p) ... U(B, beta_1) U(H, gamma_1) |+>^n`.
pub fn trial_state(n: usize, spec: &PhaseSpec, params: &QaoaParams) -> Result<Statevector> {
    let table = spec.compile(n)?;
    let mut state = Statevector::plus(n)?;
    table.prepare(&mut state, params)?;
    Ok(state)
}

/// Diagonal cost operator of a graph: the cut value of every basis state.
#[derive(Clone, Debug)]
pub struct CostTable {
    values: Vec<u32>,
}

impl CostTable {
    pub fn new(original: &Graph) -> Result<Self> {
        check_qubits(original.num_vertices())?;
        Ok(Self {
            values: original.cut_table()?,
        })
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        if state.amps.len() != self.values.len() {
            return input(format!(
                "state has {} qubits but the cost operator acts on {}",
                state.num_qubits,
                self.values.len().trailing_zeros()
            ));
        }
        Ok(state.diagonal_expectation(&self.values))
    }
}

/// `<psi| H_original |psi>` with `H` the MaxCut Hamiltonian of `original`.
pub fn expectation(state: &Statevector, original: &Graph) -> Result<f64> {
    if state.num_qubits() != original.num_vertices() {
        return input(format!(
            "state has {} qubits, graph has {} vertices",
            state.num_qubits(),
            original.num_vertices()
        ));
    }
    CostTable::new(original)?.expectation(state)
}

/// `expectation / c_max`.
pub fn approximation_ratio(expectation: f64, c_max: usize) -> Result<f64> {
    if c_max == 0 {
        return input("approximation ratio is undefined for a graph with maximum cut 0");
    }
    Ok(expectation / c_max as f64)
}

/// Gate tally of the circuit: Hadamard layer, two CNOTs and one Rz per edge
/// per phase layer, one Rx per qubit per mixer layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCounts {
    pub cnot: usize,
    pub rz: usize,
    pub rx: usize,
    pub h: usize,
    pub total: usize,
    /// Gates inside the phase operators only (`3 * p * m`).
    pub phase_gates: usize,
}

pub fn gate_count(spec: &PhaseSpec, p: usize, n: usize) -> GateCounts {
    let m = spec.topology().num_edges();
    let (cnot, rz, rx, h) = (2 * p * m, p * m, p * n, n);
    GateCounts {
        cnot,
        rz,
        rx,
        h,
        total: cnot + rz + rx + h,
        phase_gates: cnot + rz,
    }
}

/// Depth rescaled by phase-operator cost: `p * m_used / m_original`.
pub fn scaled_depth(p: usize, m_used: usize, m_original: usize) -> f64 {
    if m_original == 0 {
        return p as f64;
    }
    p as f64 * m_used as f64 / m_original as f64
}
