// Exact MaxCut, the energy spectrum, and the classical heuristics on a
// random G(n, m) instance.

use sparse_qaoa::graph::{brute_force_maxcut, generate_random_graph, spectrum};
use sparse_qaoa::heuristics::{goemans_williamson, local_search_1flip, GwConfig};
use sparse_qaoa::{Assignment, Result};

pub fn run_example() -> Result<()> {
    let generated = generate_random_graph(10, 30, 7)?;
    let g = generated.graph;
    println!("G(10, 30) seed 7: connected = {}", generated.connected);

    let (c_max, optima) = brute_force_maxcut(&g)?;
    println!(
        "C_max = {c_max}, {} optimal cuts up to complement",
        optima.len()
    );
    println!("first optimum: {}", optima[0].assignment);

    let spec = spectrum(&g)?;
    for level in spec.levels.iter().take(3) {
        println!(
            "  cut {} reached by {} assignments",
            level.cut_value,
            level.members.len()
        );
    }

    let gw = goemans_williamson(
        &g,
        &GwConfig {
            seed: 1,
            ..Default::default()
        },
    )?;
    println!(
        "GW: relaxation {:.3}, rounded cut {} ({} ascent steps)",
        gw.relaxation,
        gw.solution.value,
        gw.trace.len() - 1
    );

    let ls = local_search_1flip(&g, Assignment::zeros(10)?)?;
    println!("1-flip local search from all zeros: {}", ls.value);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
