// Split phase operator: edges cut by a reference solution get one angle,
// the rest another. With the angles tied it reproduces standard QAOA.

use sparse_qaoa::graph::{max_cut_value, solution_at_distance};
use sparse_qaoa::optimize::{multistart_optimize, multistart_with, Objective, OptimizerConfig};
use sparse_qaoa::{PhaseSpec, Result};

pub fn run_example() -> Result<()> {
    let g = sparse_qaoa::graph::generate_random_graph(8, 18, 2)?.graph;
    let c_max = max_cut_value(&g)?;
    let reference = solution_at_distance(&g, 1, 4)?;
    println!(
        "reference cut {} of C_max {c_max}: {}",
        reference.value, reference.assignment
    );

    let config = OptimizerConfig {
        num_random_starts: 10,
        seed: 3,
        ..Default::default()
    };
    let standard = PhaseSpec::standard(g.clone());
    let split = PhaseSpec::cut(&g, &reference)?;
    for p in 1..=2 {
        let std = multistart_optimize(&standard, &g, p, &config)?;
        let tied = multistart_with(&Objective::tied(&split, &g)?, c_max, p, &config)?;
        // Seed the free search with the standard optimum so it can only improve.
        let mut seeded = config.clone();
        seeded
            .extra_starts
            .push(std.best_params.to_split().to_flat());
        let free = multistart_optimize(&split, &g, p, &seeded)?;
        println!(
            "p={p}: standard {:.4}  tied {:.4}  two-angle {:.4}",
            std.ratio, tied.ratio, free.ratio
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
