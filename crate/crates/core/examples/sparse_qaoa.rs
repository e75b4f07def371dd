// QAOA on a graph with every non-cut edge of an optimal solution removed,
// compared with standard QAOA on the full graph. Both are scored against
// the original graph.

use sparse_qaoa::graph::brute_force_maxcut;
use sparse_qaoa::optimize::{multistart_optimize, OptimizerConfig};
use sparse_qaoa::sim::{gate_count, scaled_depth};
use sparse_qaoa::sparsify::sparsify_by_solution;
use sparse_qaoa::{Graph, PhaseSpec, Result};

pub fn run_example() -> Result<()> {
    let g = sparse_qaoa::graph::generate_random_graph(8, 16, 5)?.graph;
    let (_, optima) = brute_force_maxcut(&g)?;
    let sparse: Graph = sparsify_by_solution(&g, &optima[0], 1.0, 0)?;
    println!(
        "m = {}, m' = {} (only cut edges remain)",
        g.num_edges(),
        sparse.num_edges()
    );

    let config = OptimizerConfig {
        num_random_starts: 10,
        seed: 9,
        ..Default::default()
    };
    let standard = PhaseSpec::standard(g.clone());
    let reduced = PhaseSpec::standard(sparse.clone());
    println!(
        "{:>2} {:>9} {:>9} {:>9} {:>7}",
        "p", "standard", "sparse", "scaled p", "gates"
    );
    for p in 1..=3 {
        let a = multistart_optimize(&standard, &g, p, &config)?;
        let b = multistart_optimize(&reduced, &g, p, &config)?;
        println!(
            "{p:>2} {:>9.4} {:>9.4} {:>9.3} {:>7}",
            a.ratio,
            b.ratio,
            scaled_depth(p, sparse.num_edges(), g.num_edges()),
            gate_count(&reduced, p, g.num_vertices()).phase_gates
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
