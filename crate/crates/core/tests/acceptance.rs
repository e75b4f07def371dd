//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each,
//! and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparse_qaoa::alignment::{aligned_levels, alignment_ratio_study, StudyInstance};
use sparse_qaoa::graph::{
    brute_force_maxcut, generate_random_graph, partition_edges, solution_at_distance, spectrum,
};
use sparse_qaoa::heuristics::{goemans_williamson, GwConfig};
use sparse_qaoa::optimize::{multistart_optimize, objective, OptimizerConfig};
use sparse_qaoa::runner::{run_experiment, write_rows, ExperimentConfig};
use sparse_qaoa::sim::{gate_count, trial_state, EdgeClass, Gamma, Layer};
use sparse_qaoa::sparsify::{
    remove_k_noncut_edges, score_edges, sparsify, sparsify_by_solution, Method, SparsifyConfig,
};
use sparse_qaoa::{Graph, PhaseSpec, QaoaParams};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let t = start.elapsed();
    if t > limit {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    } else {
        Ok(t)
    }
}

// Dense gate-matrix oracle. Qubit i is bit i of the basis index.

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn on_qubit(gate: &DMatrix<Complex64>, q: usize, n: usize) -> DMatrix<Complex64> {
    let id = DMatrix::<Complex64>::identity(2, 2);
    let mut full = DMatrix::<Complex64>::identity(1, 1);
    for k in (0..n).rev() {
        full = full.kronecker(if k == q { gate } else { &id });
    }
    full
}

fn cnot(control: usize, target: usize, n: usize) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for x in 0..dim {
        let y = if (x >> control) & 1 == 1 {
            x ^ (1 << target)
        } else {
            x
        };
        m[(y, x)] = c(1.0, 0.0);
    }
    m
}

fn hadamard() -> DMatrix<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)])
}

/// `Rz(theta) = exp(-i theta Z / 2)`.
fn rz(theta: f64) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::from_polar(1.0, -theta / 2.0),
            c(0.0, 0.0),
            c(0.0, 0.0),
            Complex64::from_polar(1.0, theta / 2.0),
        ],
    )
}

/// `Rx(theta) = exp(-i theta X / 2)`.
fn rx(theta: f64) -> DMatrix<Complex64> {
    let (co, si) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    DMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(0.0, -si), c(0.0, -si), c(co, 0.0)])
}

/// Circuit: H on every qubit, then per layer and edge CNOT, Rz, CNOT, then
/// Rx on every qubit. `exp(-i g (1 - ZZ)/2)` is `e^{-ig/2}` times
/// `CNOT Rz(-g) CNOT`, so each edge also carries that scalar.
fn dense_trial_state(
    n: usize,
    edges: &[(usize, usize)],
    gammas: &[Vec<f64>],
    betas: &[f64],
) -> Vec<Complex64> {
    let dim = 1 << n;
    let mut state = DMatrix::<Complex64>::zeros(dim, 1);
    state[(0, 0)] = c(1.0, 0.0);
    for q in 0..n {
        state = on_qubit(&hadamard(), q, n) * state;
    }
    for (layer, &beta) in gammas.iter().zip(betas) {
        for (&(u, v), &g) in edges.iter().zip(layer) {
            let cx = cnot(u, v, n);
            state = &cx * (on_qubit(&rz(-g), v, n) * (&cx * state));
            state *= Complex64::from_polar(1.0, -g / 2.0);
        }
        for q in 0..n {
            state = on_qubit(&rx(2.0 * beta), q, n) * state;
        }
    }
    state.iter().copied().collect()
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> Graph {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    Graph::new(n, pairs.into_iter().filter(|_| rng.gen_bool(0.6))).unwrap()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let n = rng.gen_range(1..=3);
        let g = random_graph(&mut rng, n);
        let p = rng.gen_range(1..=3);
        let split = case % 2 == 1;
        let classes: Vec<EdgeClass> = (0..g.num_edges())
            .map(|_| {
                if rng.gen_bool(0.5) {
                    EdgeClass::First
                } else {
                    EdgeClass::Second
                }
            })
            .collect();
        let mut layers = Vec::new();
        let mut per_edge = Vec::new();
        let mut betas = Vec::new();
        for _ in 0..p {
            let (g1, g2, b) = (
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
                rng.gen_range(-PI..PI),
            );
            let gamma = if split {
                Gamma::Pair(g1, g2)
            } else {
                Gamma::Single(g1)
            };
            layers.push(Layer { gamma, beta: b });
            per_edge.push(
                classes
                    .iter()
                    .map(|&k| {
                        if split && k == EdgeClass::Second {
                            g2
                        } else {
                            g1
                        }
                    })
                    .collect::<Vec<_>>(),
            );
            betas.push(b);
        }
        let spec = if split {
            PhaseSpec::split(g.clone(), classes).unwrap()
        } else {
            PhaseSpec::standard(g.clone())
        };
        let ours = trial_state(n, &spec, &QaoaParams { layers }).unwrap();
        let oracle = dense_trial_state(n, g.edges(), &per_edge, &betas);
        for (a, b) in ours.amplitudes().iter().zip(&oracle) {
            worst = worst.max((a - b).norm());
        }
    }
    let t = within(Duration::from_secs(10), start)?;
    check(
        worst < 1e-10,
        format!("max amplitude deviation {worst:.2e} over 200 cases in {t:.2?}"),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let n = rng.gen_range(2..=16);
        let max_m = n * (n - 1) / 2;
        let m = rng.gen_range(1..=max_m.min(40));
        let g = generate_random_graph(n, m, rng.gen()).unwrap().graph;
        let p = rng.gen_range(1..=3);
        let e = objective(
            &PhaseSpec::standard(g.clone()),
            &g,
            &QaoaParams::zeros(p, 1).unwrap(),
        )
        .unwrap();
        worst = worst.max((e - m as f64 / 2.0).abs());
    }
    check(
        worst < 1e-10,
        format!("max |E - m/2| = {worst:.2e} over 50 graphs"),
    )
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let edge = Graph::path(2).unwrap();
    let r = multistart_optimize(
        &PhaseSpec::standard(edge.clone()),
        &edge,
        1,
        &OptimizerConfig::default(),
    )
    .map_err(|e| e.to_string())?;
    let t = within(Duration::from_secs(5), start)?;
    check(
        (r.ratio - 1.0).abs() <= 1e-4,
        format!("ratio {:.8} in {t:.2?}", r.ratio),
    )
}

fn criterion_4() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for (name, g) in [
        ("K3", Graph::complete(3).unwrap()),
        ("P3", Graph::path(3).unwrap()),
    ] {
        let spec = PhaseSpec::standard(g.clone());
        let best = multistart_optimize(&spec, &g, 1, &OptimizerConfig::default())
            .map_err(|e| e.to_string())?
            .best_expectation;
        // Integer cut values give period 2 pi in gamma; the mixer gives period pi in beta.
        let steps = 400;
        let mut grid = f64::NEG_INFINITY;
        for i in 0..steps {
            for j in 0..steps {
                let gamma = 2.0 * PI * i as f64 / steps as f64;
                let beta = PI * j as f64 / steps as f64;
                let params = QaoaParams::standard(&[gamma], &[beta]).unwrap();
                grid = grid.max(objective(&spec, &g, &params).unwrap());
            }
        }
        let diff = (best - grid).abs();
        ok &= diff <= 1e-3 && best + 1e-9 >= grid;
        details.push(format!("{name}: optimizer {best:.6} grid {grid:.6}"));
    }
    check(ok, details.join(", "))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_sum = 0.0f64;
    let mut worst_tree = 0.0f64;
    for i in 0..100 {
        let n = rng.gen_range(2..=20);
        let max_m = n * (n - 1) / 2;
        let m = rng.gen_range(1..=max_m.min(3 * n));
        let g = generate_random_graph(n, m, rng.gen()).unwrap().graph;
        let cfg = SparsifyConfig::new(Method::Effective, 1.0, 0);
        let scores = score_edges(&g, &cfg).map_err(|e| e.to_string())?.scores;
        let sum: f64 = scores.iter().sum();
        worst_sum = worst_sum.max((sum - (n - g.num_components()) as f64).abs());

        // A random tree: vertex v attaches to a uniform earlier vertex.
        let tree_n = 2 + i % 19;
        let tree = Graph::new(tree_n, (1..tree_n).map(|v| (rng.gen_range(0..v), v))).unwrap();
        for s in score_edges(&tree, &cfg).map_err(|e| e.to_string())?.scores {
            worst_tree = worst_tree.max((s - 1.0).abs());
        }
    }
    check(
        worst_sum < 1e-6 && worst_tree < 1e-9,
        format!("max |sum R - (n - c)| = {worst_sum:.2e}, max tree deviation {worst_tree:.2e}"),
    )
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut bad = 0;
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let g = random_graph(&mut rng, n);
        let levels = spectrum(&g).unwrap().levels.len();
        if aligned_levels(&g, &g).unwrap().aligned_levels != levels {
            bad += 1;
        }
    }
    let p3 = aligned_levels(&Graph::path(3).unwrap(), &Graph::new(3, [(0, 1)]).unwrap())
        .unwrap()
        .aligned_levels;
    check(
        bad == 0 && p3 == 1,
        format!("{bad}/200 self-alignment mismatches, P3 vs edge = {p3}"),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut wins = 0;
    let mut lines = Vec::new();
    for seed in 1..=5u64 {
        let g = generate_random_graph(10, 30, seed).unwrap().graph;
        let (_, optima) = brute_force_maxcut(&g).unwrap();
        let sparse = sparsify_by_solution(&g, &optima[0], 1.0, 0).unwrap();
        let config = OptimizerConfig {
            seed,
            ..Default::default()
        };
        let mut instance_ok = true;
        let mut deltas = Vec::new();
        for p in 1..=3 {
            let std = multistart_optimize(&PhaseSpec::standard(g.clone()), &g, p, &config)
                .map_err(|e| e.to_string())?;
            let sp = multistart_optimize(&PhaseSpec::standard(sparse.clone()), &g, p, &config)
                .map_err(|e| e.to_string())?;
            instance_ok &= sp.ratio >= std.ratio - 0.01;
            deltas.push(format!("{:+.3}", sp.ratio - std.ratio));
        }
        wins += instance_ok as usize;
        lines.push(format!("s{seed}[{}]", deltas.join(" ")));
    }
    let t = within(Duration::from_secs(15 * 60), start)?;
    check(
        wins >= 4,
        format!(
            "{wins}/5 instances within 0.01 at p=1..3 in {t:.1?}; deltas {}",
            lines.join(" ")
        ),
    )
}

fn criterion_8() -> Outcome {
    // Ten G(10, 30) graphs, each sparsified 13 ways: partial and full removal
    // of non-cut edges of an optimum, removal guided by suboptimal cuts, and
    // every score-and-filter method at ratio 0.66.
    let mut by_p: Vec<Vec<StudyInstance>> = vec![Vec::new(); 3];
    for s in 0..10u64 {
        let g = generate_random_graph(10, 30, 100 + s).unwrap().graph;
        let config = OptimizerConfig {
            seed: s,
            ..Default::default()
        };
        let (_, optima) = brute_force_maxcut(&g).unwrap();
        let (_, not_cut) = partition_edges(&g, &optima[0]).unwrap();
        let mut sparse = Vec::new();
        for k in [2, 4, not_cut.len()] {
            sparse.push(remove_k_noncut_edges(&g, &optima[0], k.min(not_cut.len()), s).unwrap());
        }
        for d in [1, 2] {
            let sol = solution_at_distance(&g, d, s).unwrap();
            sparse.push(sparsify_by_solution(&g, &sol, 1.0, s).unwrap());
        }
        for method in Method::ALL {
            sparse.push(sparsify(&g, &SparsifyConfig::new(method, 0.66, s)).unwrap());
        }
        for p in 1..=3 {
            let std = multistart_optimize(&PhaseSpec::standard(g.clone()), &g, p, &config)
                .map_err(|e| e.to_string())?
                .ratio;
            for sp in &sparse {
                let r = multistart_optimize(&PhaseSpec::standard(sp.clone()), &g, p, &config)
                    .map_err(|e| e.to_string())?
                    .ratio;
                by_p[p - 1].push(StudyInstance {
                    original: g.clone(),
                    sparse: sp.clone(),
                    ratio_sparse: r,
                    ratio_standard: std,
                });
            }
        }
    }
    let instances: Vec<StudyInstance> = by_p.into_iter().flatten().collect();
    let table = alignment_ratio_study(&instances).map_err(|e| e.to_string())?;
    let mean = |pred: &dyn Fn(usize) -> bool| {
        let d: Vec<f64> = table
            .rows
            .iter()
            .filter(|r| pred(r.aligned_levels))
            .map(|r| r.ratio_delta)
            .collect();
        (d.iter().sum::<f64>() / d.len() as f64, d.len())
    };
    let (zero, n0) = mean(&|a| a == 0);
    let (two, n2) = mean(&|a| a >= 2);
    check(
        table.rows.len() >= 50 && n0 > 0 && n2 > 0 && two > zero,
        format!(
            "{} pairs; mean delta aligned>=2 {two:+.4} (n={n2}) vs aligned=0 {zero:+.4} (n={n0})",
            table.rows.len()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut cases = 0;
    for seed in 0..6u64 {
        let g = generate_random_graph(10, 30, 200 + seed).unwrap().graph;
        let config = OptimizerConfig {
            num_random_starts: 10,
            seed,
            ..Default::default()
        };
        for d in [1, 2, 3] {
            let sol = solution_at_distance(&g, d, seed).unwrap();
            let split = PhaseSpec::cut(&g, &sol).unwrap();
            for p in 1..=2 {
                let std = multistart_optimize(&PhaseSpec::standard(g.clone()), &g, p, &config)
                    .map_err(|e| e.to_string())?;
                let mut seeded = config.clone();
                seeded
                    .extra_starts
                    .push(std.best_params.to_split().to_flat());
                let cut = multistart_optimize(&split, &g, p, &seeded).map_err(|e| e.to_string())?;
                worst = worst.min(cut.best_expectation - std.best_expectation);
                cases += 1;
            }
        }
    }
    check(
        worst >= -1e-9,
        format!("min (cut - standard) = {worst:+.3e} over {cases} cases"),
    )
}

fn criterion_10() -> Outcome {
    let mut good = 0;
    for seed in 0..100u64 {
        let g = generate_random_graph(10, 30, 1000 + seed).unwrap().graph;
        let (c_max, _) = brute_force_maxcut(&g).unwrap();
        let out = goemans_williamson(
            &g,
            &GwConfig {
                seed,
                ..Default::default()
            },
        )
        .map_err(|e| e.to_string())?;
        good += (out.solution.value as f64 >= 0.878 * c_max as f64) as usize;
    }
    check(
        good >= 95,
        format!("{good}/100 graphs at or above 0.878 C_max"),
    )
}

fn criterion_11() -> Outcome {
    let count = |m: usize, p: usize| {
        let g = generate_random_graph(10, m, 0).unwrap().graph;
        gate_count(&PhaseSpec::standard(g), p, 10).phase_gates
    };
    let (a, b) = (count(30, 2), count(20, 3));
    check(
        a == 180 && b == 180,
        format!("m=30,p=2 -> {a}; m=20,p=3 -> {b}"),
    )
}

fn criterion_12() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs/quick.toml");
    let base = path.parent().unwrap();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut csvs = Vec::new();
    for (i, jobs) in [(0, 1), (1, 4)] {
        let mut config = ExperimentConfig::load(&path).map_err(|e| e.to_string())?;
        config.jobs = jobs;
        let out = run_experiment(&config, base).map_err(|e| e.to_string())?;
        let file = dir.path().join(format!("run{i}.csv"));
        write_rows(&file, &out.rows).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(&file).map_err(|e| e.to_string())?;
        // Drop the trailing wall_time_ms column.
        let stripped: Vec<String> = text
            .lines()
            .map(|l| l.rsplit_once(',').map_or(l, |(head, _)| head).to_string())
            .collect();
        csvs.push(stripped);
    }
    check(
        csvs[0] == csvs[1] && csvs[0].len() > 1,
        format!(
            "{} rows identical across two runs (1 and 4 workers)",
            csvs[0].len() - 1
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("dense-oracle equivalence", criterion_1),
        ("uniform-state identity", criterion_2),
        ("single-edge optimum", criterion_3),
        ("grid-search cross-check", criterion_4),
        ("Foster identity", criterion_5),
        ("alignment hand-checks", criterion_6),
        ("sparse QAOA trend", criterion_7),
        ("alignment vs ratio trend", criterion_8),
        ("cut QAOA dominance", criterion_9),
        ("GW quality", criterion_10),
        ("gate-count normalization", criterion_11),
        ("replay determinism", criterion_12),
    ];
    let filter: Option<String> = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let id = format!("{:02}", i + 1);
        if filter
            .as_ref()
            .is_some_and(|f| !id.contains(f.as_str()) && !name.contains(f.as_str()))
        {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id} PASS  {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id} FAIL  {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
