//! Partition qubit and fermionic Hamiltonians into exactly solvable fragments,
//! solve those fragments analytically, and check the results against dense
//! brute-force oracles.

pub mod contextuality;
pub mod error;
pub mod fermion;
pub mod io;
pub mod nc;
pub mod partition;
pub mod pauli;
pub mod sim;

pub use contextuality::{decompose, NcDecomposition};
pub use error::{Error, Result};
pub use partition::{
    fnc_partition, greedy_partition, greedy_partition_with_sweeps, verify_partition, Criterion,
    Method, Partition, PartitionReport,
};
pub use pauli::{Axis, PauliSum, PauliWord, Phase, TAU_ZERO};
