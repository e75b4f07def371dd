//! Classical outer loop: QAOA objective, finite-difference gradients,
//! limited-memory quasi-Newton local search and the multistart protocol.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::graph::{max_cut_value, Graph};
use crate::seed;
use crate::sim::{approximation_ratio, CostTable, PhaseSpec, PhaseTable, QaoaParams, Statevector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Central-difference step.
    pub gradient_step: f64,
    pub gradient_tolerance: f64,
    /// Relative objective change below which a run is converged.
    pub objective_tolerance: f64,
    /// Number of curvature pairs kept by the quasi-Newton update.
    pub memory: usize,
    pub num_random_starts: usize,
    /// Random starts are uniform in `[start_box.0, start_box.1]` per coordinate.
    pub start_box: (f64, f64),
    /// Explicit starts, flattened as `[gamma.., beta]` per layer.
    pub extra_starts: Vec<Vec<f64>>,
    /// Adds a deterministic linear-ramp start to the candidate set.
    pub linear_ramp_start: bool,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 20_000,
            gradient_step: 1e-6,
            gradient_tolerance: 1e-8,
            objective_tolerance: 1e-10,
            memory: 10,
            num_random_starts: 30,
            start_box: (-2.0 * PI, 2.0 * PI),
            extra_starts: Vec::new(),
            linear_ramp_start: false,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Config(format!("optimizer: {what}")));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if !(self.gradient_step > 0.0
            && self.gradient_tolerance > 0.0
            && self.objective_tolerance > 0.0)
        {
            return bad("step and tolerances must be positive");
        }
        if self.memory == 0 {
            return bad("memory must be at least 1");
        }
        if !(self.start_box.0 < self.start_box.1) {
            return bad("start_box must be a non-empty interval");
        }
        if self.num_random_starts == 0 && self.extra_starts.is_empty() && !self.linear_ramp_start {
            return bad("no starting points configured");
        }
        Ok(())
    }
}

/// Outcome of one local optimization.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StartRecord {
    pub start: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Final expectation value (maximized); NaN if the start failed.
    pub value: f64,
    pub iterations: usize,
    /// False when the run stopped on the iteration limit.
    pub converged: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_params: QaoaParams,
    pub best_expectation: f64,
    pub c_max: usize,
    pub ratio: f64,
    /// Index into `starts` of the winning run.
    pub best_start: usize,
    pub starts: Vec<StartRecord>,
}

/// `<gamma, beta| H_original |gamma, beta>` for a fixed phase operator.
#[derive(Clone, Debug)]
pub struct Objective {
    phase: PhaseTable,
    cost: CostTable,
    num_qubits: usize,
    /// Single-gamma parameters driving a split operator with both gammas equal.
    tied: bool,
}

impl Objective {
    pub fn new(spec: &PhaseSpec, original: &Graph) -> Result<Self> {
        let n = original.num_vertices();
        Ok(Self {
            phase: spec.compile(n)?,
            cost: CostTable::new(original)?,
            num_qubits: n,
            tied: false,
        })
    }

    /// A split-gamma operator searched only along `gamma_1 = gamma_2`.
    pub fn tied(spec: &PhaseSpec, original: &Graph) -> Result<Self> {
        if spec.gamma_arity() != 2 {
            return input("tied gammas need a split phase operator");
        }
        Ok(Self {
            tied: true,
            ..Self::new(spec, original)?
        })
    }

    /// Gamma values per layer in the searched parameter vector.
    pub fn gamma_arity(&self) -> usize {
        if self.tied {
            1
        } else {
            self.phase.gamma_arity()
        }
    }

    /// Converts a searched parameter vector into circuit angles.
    pub fn params_from_flat(&self, flat: &[f64]) -> Result<QaoaParams> {
        let params = QaoaParams::from_flat(flat, self.gamma_arity())?;
        Ok(if self.tied { params.to_split() } else { params })
    }

    pub fn dimension(&self, p: usize) -> usize {
        p * (self.gamma_arity() + 1)
    }

    pub fn scratch(&self) -> Statevector {
        Statevector::plus(self.num_qubits).expect("qubit count validated at construction")
    }

    pub fn value(&self, params: &QaoaParams) -> Result<f64> {
        self.value_with(params, &mut self.scratch())
    }

    pub fn value_with(&self, params: &QaoaParams, scratch: &mut Statevector) -> Result<f64> {
        self.phase.prepare(scratch, params)?;
        self.cost.expectation(scratch)
    }

    /// Objective of a flattened parameter vector.
    pub fn value_flat(&self, flat: &[f64], scratch: &mut Statevector) -> Result<f64> {
        let params = self.params_from_flat(flat)?;
        self.value_with(&params, scratch)
    }

    /// Central-difference gradient with step `h`.
    pub fn gradient(&self, flat: &[f64], h: f64, scratch: &mut Statevector) -> Result<Vec<f64>> {
        let mut x = flat.to_vec();
        let mut grad = Vec::with_capacity(flat.len());
        for i in 0..flat.len() {
            x[i] = flat[i] + h;
            let up = self.value_flat(&x, scratch)?;
            x[i] = flat[i] - h;
            let down = self.value_flat(&x, scratch)?;
            x[i] = flat[i];
            grad.push((up - down) / (2.0 * h));
        }
        Ok(grad)
    }
}

pub fn objective(spec: &PhaseSpec, original: &Graph, params: &QaoaParams) -> Result<f64> {
    Objective::new(spec, original)?.value(params)
}

pub fn gradient(
    spec: &PhaseSpec,
    original: &Graph,
    params: &QaoaParams,
    step: f64,
) -> Result<Vec<f64>> {
    let obj = Objective::new(spec, original)?;
    let mut scratch = obj.scratch();
    obj.gradient(&params.to_flat(), step, &mut scratch)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Minimizes `-objective` from `start` with L-BFGS and a backtracking
/// sufficient-decrease line search, so the objective never decreases
/// across accepted steps.
pub fn local_optimize_flat(
    obj: &Objective,
    start: &[f64],
    config: &OptimizerConfig,
) -> Result<StartRecord> {
    const ARMIJO: f64 = 1e-4;
    const MAX_BACKTRACKS: usize = 60;

    let mut scratch = obj.scratch();
    let eval = |x: &[f64], scratch: &mut Statevector| -> Result<f64> {
        let v = obj.value_flat(x, scratch)?;
        if !v.is_finite() {
            return Err(Error::Numerical(format!(
                "objective is {v} at parameters {x:?}"
            )));
        }
        Ok(-v)
    };
    let grad = |x: &[f64], scratch: &mut Statevector| -> Result<Vec<f64>> {
        let g = obj.gradient(x, config.gradient_step, scratch)?;
        Ok(g.into_iter().map(|v| -v).collect())
    };

    let mut x = start.to_vec();
    let mut fx = eval(&x, &mut scratch)?;
    let mut gx = grad(&x, &mut scratch)?;
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;

    while iterations < config.max_iterations {
        if norm(&gx) <= config.gradient_tolerance {
            converged = true;
            break;
        }
        let mut dir = two_loop(&gx, &memory);
        if dot(&dir, &gx) >= 0.0 {
            memory.clear();
            dir = gx.iter().map(|g| -g).collect();
        }
        let slope = dot(&dir, &gx);
        let mut t = if memory.is_empty() {
            (1.0 / norm(&gx)).min(1.0)
        } else {
            1.0
        };
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + t * di).collect();
            let ft = eval(&trial, &mut scratch)?;
            if ft <= fx + ARMIJO * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((x_new, f_new)) = accepted else {
            if memory.is_empty() {
                // No descent left at working precision.
                converged = true;
                break;
            }
            memory.clear();
            continue;
        };
        iterations += 1;
        let g_new = grad(&x_new, &mut scratch)?;
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * norm(&s) * norm(&y) && sy > 0.0 {
            if memory.len() == config.memory {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        let change = (fx - f_new) / fx.abs().max(f_new.abs()).max(1.0);
        x = x_new;
        fx = f_new;
        gx = g_new;
        if change <= config.objective_tolerance {
            converged = true;
            break;
        }
    }

    Ok(StartRecord {
        start: start.to_vec(),
        final_params: x,
        value: -fx,
        iterations,
        converged,
        error: None,
    })
}

fn two_loop(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let scale = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|qi| *qi *= scale);
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|qi| *qi = -*qi);
    q
}

pub fn local_optimize(
    spec: &PhaseSpec,
    original: &Graph,
    start: &QaoaParams,
    config: &OptimizerConfig,
) -> Result<StartRecord> {
    config.validate()?;
    let obj = Objective::new(spec, original)?;
    if start
        .layers
        .iter()
        .any(|l| l.gamma.arity() != obj.gamma_arity())
    {
        return input("start parameters do not match the phase operator's gamma arity");
    }
    local_optimize_flat(&obj, &start.to_flat(), config)
}

/// Linear-ramp schedule: gammas rise and betas fall across layers.
pub fn linear_ramp(p: usize, gamma_arity: usize, scale: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(p * (gamma_arity + 1));
    for k in 0..p {
        let frac = (k as f64 + 0.5) / p as f64;
        out.extend(std::iter::repeat_n(frac * scale, gamma_arity));
        out.push((1.0 - frac) * scale);
    }
    out
}

/// The candidate starting points: seeded uniform draws, then the linear ramp
/// (if enabled), then the explicit extra starts.
pub fn starting_points(
    p: usize,
    gamma_arity: usize,
    config: &OptimizerConfig,
) -> Result<Vec<Vec<f64>>> {
    let dim = p * (gamma_arity + 1);
    let (lo, hi) = config.start_box;
    let mut starts: Vec<Vec<f64>> = (0..config.num_random_starts)
        .map(|i| {
            let mut rng = seed::rng(seed::derive(config.seed, "start", i as u64));
            (0..dim).map(|_| rng.gen_range(lo..hi)).collect()
        })
        .collect();
    if config.linear_ramp_start {
        starts.push(linear_ramp(p, gamma_arity, 0.75));
    }
    for extra in &config.extra_starts {
        if extra.len() != dim {
            return input(format!(
                "extra start has {} values, expected {dim}",
                extra.len()
            ));
        }
        starts.push(extra.clone());
    }
    Ok(starts)
}

/// Runs the local optimizer from every starting point and keeps the best.
///
/// Starts run concurrently; the winner is the largest final value with ties
/// going to the lowest start index. A failing start is recorded and skipped.
pub fn multistart_optimize(
    spec: &PhaseSpec,
    original: &Graph,
    p: usize,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    let c_max = max_cut_value(original)?;
    multistart_with(&Objective::new(spec, original)?, c_max, p, config)
}

/// [`multistart_optimize`] over a prebuilt objective with a known `C_max`.
pub fn multistart_with(
    obj: &Objective,
    c_max: usize,
    p: usize,
    config: &OptimizerConfig,
) -> Result<OptimizationResult> {
    config.validate()?;
    if p == 0 {
        return input("multistart optimization needs depth p >= 1");
    }
    let starts = starting_points(p, obj.gamma_arity(), config)?;
    let records: Vec<StartRecord> = starts
        .par_iter()
        .map(|start| {
            local_optimize_flat(obj, start, config).unwrap_or_else(|e| StartRecord {
                start: start.clone(),
                final_params: start.clone(),
                value: f64::NAN,
                iterations: 0,
                converged: false,
                error: Some(e.to_string()),
            })
        })
        .collect();
    let best_start = records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.error.is_none())
        .fold(None, |best: Option<(usize, f64)>, (i, r)| match best {
            Some((_, v)) if v >= r.value => best,
            _ => Some((i, r.value)),
        })
        .map(|(i, _)| i)
        .ok_or_else(|| {
            Error::Numerical(format!(
                "all {} starts failed; first error: {}",
                records.len(),
                records[0].error.as_deref().unwrap_or("unknown")
            ))
        })?;
    let best = &records[best_start];
    Ok(OptimizationResult {
        best_params: obj.params_from_flat(&best.final_params)?,
        best_expectation: best.value,
        c_max,
        ratio: approximation_ratio(best.value, c_max)?,
        best_start,
        starts: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

    fn edge() -> Graph {
        Graph::path(2).unwrap()
    }

    /// Closed form for one edge at p = 1: <C> = (1 + sin(4*beta) * sin(gamma)) / 2
    /// under exp(-i*gamma*C) and exp(-i*beta*X).
    fn edge_closed_form(gamma: f64, beta: f64) -> f64 {
        0.5 * (1.0 + (4.0 * beta).sin() * gamma.sin())
    }

    #[test]
    fn objective_examples() {
        let g = Graph::complete(5).unwrap();
        let spec = PhaseSpec::standard(g.clone());
        let zero = QaoaParams::zeros(2, 1).unwrap();
        assert!((objective(&spec, &g, &zero).unwrap() - 5.0).abs() < 1e-12);

        let e = edge();
        let opt = QaoaParams::standard(&[FRAC_PI_2], &[FRAC_PI_8]).unwrap();
        assert!((objective(&PhaseSpec::standard(e.clone()), &e, &opt).unwrap() - 1.0).abs() < 1e-9);

        let a = QaoaParams::standard(&[0.3, -1.2], &[0.5, 0.1]).unwrap();
        let b = QaoaParams::standard(&[0.3 + 2.0 * PI, -1.2 - 2.0 * PI], &[0.5, 0.1]).unwrap();
        assert!(
            (objective(&spec, &g, &a).unwrap() - objective(&spec, &g, &b).unwrap()).abs() < 1e-10
        );
    }

    #[test]
    fn closed_form_matches_simulation() {
        let e = edge();
        let spec = PhaseSpec::standard(e.clone());
        for &(g, b) in &[(0.3, 0.2), (-1.1, 0.9), (2.5, -0.4)] {
            let p = QaoaParams::standard(&[g], &[b]).unwrap();
            assert!((objective(&spec, &e, &p).unwrap() - edge_closed_form(g, b)).abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_matches_closed_form_derivative() {
        let e = edge();
        let spec = PhaseSpec::standard(e.clone());
        for &(g, b) in &[(0.3, 0.2), (-1.1, 0.9), (2.5, -0.4)] {
            let p = QaoaParams::standard(&[g], &[b]).unwrap();
            let fd = gradient(&spec, &e, &p, 1e-6).unwrap();
            let d_gamma = 0.5 * (4.0 * b).sin() * g.cos();
            let d_beta = 2.0 * (4.0 * b).cos() * g.sin();
            assert!((fd[0] - d_gamma).abs() < 1e-5);
            assert!((fd[1] - d_beta).abs() < 1e-5);
        }
    }

    #[test]
    fn local_optimize_examples() {
        let e = edge();
        let spec = PhaseSpec::standard(e.clone());
        let config = OptimizerConfig::default();
        let start = QaoaParams::standard(&[0.1], &[0.1]).unwrap();
        let rec = local_optimize(&spec, &e, &start, &config).unwrap();
        assert!((rec.value - 1.0).abs() < 1e-4, "{rec:?}");
        assert!(rec.converged);

        let at_opt = QaoaParams::standard(&[FRAC_PI_2], &[FRAC_PI_8]).unwrap();
        let rec = local_optimize(&spec, &e, &at_opt, &config).unwrap();
        assert!(rec.iterations <= 2);
        assert!((rec.value - 1.0).abs() < 1e-12);
        let g = gradient(
            &spec,
            &e,
            &QaoaParams::from_flat(&rec.final_params, 1).unwrap(),
            1e-6,
        )
        .unwrap();
        assert!(norm(&g) < 1e-4);

        let bad = QaoaParams::standard(&[0.1], &[0.1]).unwrap().to_split();
        assert!(local_optimize(&spec, &e, &bad, &config).is_err());
    }

    #[test]
    fn multistart_examples() {
        let e = edge();
        let spec = PhaseSpec::standard(e.clone());
        let config = OptimizerConfig {
            seed: 3,
            ..Default::default()
        };
        let r = multistart_optimize(&spec, &e, 1, &config).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-4);
        assert_eq!(r.starts.len(), 30);
        assert_eq!(r, multistart_optimize(&spec, &e, 1, &config).unwrap());
        assert!(multistart_optimize(&spec, &e, 0, &config).is_err());

        let wrong = OptimizerConfig {
            extra_starts: vec![vec![0.0; 3]],
            ..config.clone()
        };
        assert!(multistart_optimize(&spec, &e, 1, &wrong).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(OptimizerConfig {
            max_iterations: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(OptimizerConfig {
            gradient_step: 0.0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(OptimizerConfig {
            start_box: (1.0, 1.0),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(OptimizerConfig {
            num_random_starts: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        let ramp = OptimizerConfig {
            num_random_starts: 0,
            linear_ramp_start: true,
            ..Default::default()
        };
        assert!(ramp.validate().is_ok());
        assert_eq!(
            starting_points(2, 1, &ramp).unwrap(),
            vec![linear_ramp(2, 1, 0.75)]
        );
    }
}
