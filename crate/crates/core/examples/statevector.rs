// Low-level simulator use: build a trial state by hand and evaluate it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

use sparse_qaoa::sim::{
    apply_mixer, apply_phase, expectation, gate_count, prepare_plus_state, Gamma,
};
use sparse_qaoa::{Graph, PhaseSpec, Result};

pub fn run_example() -> Result<()> {
    // A single edge reaches a full cut at gamma = pi/2, beta = pi/8.
    let edge = Graph::path(2)?;
    let spec = PhaseSpec::standard(edge.clone());
    let mut state = prepare_plus_state(2)?;
    apply_phase(&mut state, &spec, Gamma::Single(FRAC_PI_2))?;
    apply_mixer(&mut state, FRAC_PI_8);
    println!(
        "edge: <C> = {:.6}, norm = {:.6}",
        expectation(&state, &edge)?,
        state.norm()
    );

    let ring = Graph::cycle(6)?;
    let counts = gate_count(&PhaseSpec::standard(ring), 2, 6);
    println!(
        "C6 at p=2: {} CNOT, {} RZ, {} RX, {} H ({} total)",
        counts.cnot, counts.rz, counts.rx, counts.h, counts.total
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
