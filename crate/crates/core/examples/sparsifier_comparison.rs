// Runs every edge sparsifier at the same keep ratio and reports how many
// energy levels of the original graph survive.

use sparse_qaoa::alignment::aligned_levels;
use sparse_qaoa::graph::generate_random_graph;
use sparse_qaoa::sparsify::{sparsify, Method, SparsifyConfig};
use sparse_qaoa::Result;

pub fn run_example() -> Result<()> {
    let g = generate_random_graph(12, 33, 3)?.graph;
    println!(
        "{:<12} {:>6} {:>10} {:>8}",
        "method", "edges", "connected", "aligned"
    );
    for method in Method::ALL {
        let config = SparsifyConfig::new(method, 0.66, 42);
        let sparse = sparsify(&g, &config)?;
        let report = aligned_levels(&g, &sparse)?;
        println!(
            "{:<12} {:>6} {:>10} {:>8}",
            method.name(),
            sparse.num_edges(),
            sparse.is_connected(),
            report.aligned_levels
        );
    }

    // Parameters are method specific; unknown keys are rejected.
    let tuned = SparsifyConfig::new(Method::Fire, 0.5, 42).with_param("burn_probability", 0.9);
    println!(
        "fire(0.9) keeps {} edges",
        sparsify(&g, &tuned)?.num_edges()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
