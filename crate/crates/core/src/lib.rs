//! Statevector QAOA for MaxCut with sparsified and multi-parameter phase
//! operators.
//!
//! The phase operator of a QAOA circuit can be built from a subgraph of the
//! problem graph (fewer two-qubit gates) or can carry two gammas per layer
//! (one for edges inside a reference cut, one for the rest), while the
//! optimized objective is always the MaxCut Hamiltonian of the original
//! graph.
//!
//! Modules:
//! - [`graph`]: graphs, cut values, exact MaxCut, spectra, random instances
//! - [`sparsify`]: edge scoring methods and cut-guided sparsification
//! - [`sim`]: dense statevector simulation and gate counting
//! - [`optimize`]: objective, finite-difference gradients, L-BFGS multistart
//! - [`heuristics`]: Goemans–Williamson and local search initial cuts
//! - [`alignment`]: energy-level alignment between two graphs
//! - [`runner`]: experiment configs, CSV results and SVG plots

pub mod alignment;
pub mod error;
pub mod graph;
pub mod heuristics;
pub mod optimize;
pub mod runner;
pub mod seed;
pub mod sim;
pub mod sparsify;

pub use error::{Error, Result};
pub use graph::{Assignment, CutSolution, Graph};
pub use sim::{PhaseSpec, QaoaParams, Statevector};
