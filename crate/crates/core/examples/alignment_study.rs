// Removes a growing number of non-cut edges, counts aligned energy levels,
// and relates them to the change in approximation ratio at p = 1.

use sparse_qaoa::alignment::{alignment_ratio_study, StudyInstance};
use sparse_qaoa::graph::{brute_force_maxcut, generate_random_graph, partition_edges};
use sparse_qaoa::optimize::{multistart_optimize, OptimizerConfig};
use sparse_qaoa::sparsify::remove_k_noncut_edges;
use sparse_qaoa::{PhaseSpec, Result};

pub fn run_example() -> Result<()> {
    let config = OptimizerConfig {
        num_random_starts: 6,
        seed: 1,
        ..Default::default()
    };
    let mut instances = Vec::new();
    for seed in 0..3 {
        let g = generate_random_graph(8, 20, seed)?.graph;
        let (_, optima) = brute_force_maxcut(&g)?;
        let standard = multistart_optimize(&PhaseSpec::standard(g.clone()), &g, 1, &config)?.ratio;
        let (_, not_cut) = partition_edges(&g, &optima[0])?;
        for k in 0..=not_cut.len() {
            let sparse = remove_k_noncut_edges(&g, &optima[0], k, seed)?;
            let ratio =
                multistart_optimize(&PhaseSpec::standard(sparse.clone()), &g, 1, &config)?.ratio;
            instances.push(StudyInstance {
                original: g.clone(),
                sparse,
                ratio_sparse: ratio,
                ratio_standard: standard,
            });
        }
    }
    let table = alignment_ratio_study(&instances)?;
    for bucket in &table.buckets {
        println!(
            "aligned {:>2}: {:>2} instances, mean ratio change {:+.4}",
            bucket.aligned_levels, bucket.count, bucket.mean_delta
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
