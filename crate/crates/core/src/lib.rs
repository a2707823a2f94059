//! Statevector benchmarks of non-fault-tolerant quantum optimization
//! algorithms (QAOA, VQE, imaginary-time and annealing methods) on small
//! max-cut, number partitioning, knapsack and quantum spin glass instances.

pub mod annealer;
pub mod bench;
pub mod circuits;
pub mod cli;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod optimizers;
pub mod pauli;
pub mod problems;
pub mod qite;
pub mod statevector;
pub mod variational;

pub use error::{Error, Result};
