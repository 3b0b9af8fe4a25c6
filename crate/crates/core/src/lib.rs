//! Graph isomorphism as a quadratic unconstrained binary program.
//!
//! Three penalty formulations (`lucas`, `zick`, `calude`) are built over `n²`
//! binary variables, solved exactly by Gray-code enumeration, and
//! approximately by simulated QAOA and VQE. The `experiments` module runs the
//! energy-clustering, edge-removal and VQE-convergence pipelines.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod optim;
pub mod plot;
pub mod qubo;
pub mod rng;
pub mod sim;

pub use error::{Error, Result};
