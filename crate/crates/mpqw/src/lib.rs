//! Multi-particle quantum walk toolkit: scattering analysis of graph
//! gadgets, two-particle interaction phases, circuit-to-graph compilation,
//! and direct many-body time evolution.
//!
//! The pieces fit together like this: [`gadgets`] holds the small graphs
//! whose S-matrices ([`scattering`]) implement logic gates on dual-rail
//! encoded qubits; [`two_particle`] solves for the phase two particles
//! exchange when they collide on a path, which powers the entangling gate;
//! [`compiler`] and [`layout`] turn a circuit ([`circuit`]) into one big
//! graph with timing; [`basis`], [`hamiltonian`], [`statevec`], [`evolve`],
//! and [`predict`] simulate the resulting many-body walk and compare it with
//! the analytic predictions; [`harness`] packages the standard experiments.

pub mod basis;
pub mod circuit;
pub mod compiler;
pub mod evolve;
pub mod gadgets;
pub mod graph;
pub mod hamiltonian;
pub mod harness;
pub mod io;
pub mod layout;
pub mod planarity;
pub mod predict;
pub mod scattering;
pub mod statevec;
pub mod two_particle;

pub use basis::{enumerate_basis, ConfigurationBasis};
pub use circuit::{decompose_to_native, ideal_unitary, CircuitIR, Gate};
pub use compiler::{plan_blocks, BlockPlan, BlockSpec, EncodedQubit, Variant};
pub use evolve::{dense_expm_apply, evolve};
pub use gadgets::{build_gadget, validate, validate_gadget, ValidationReport};
pub use graph::{Gadget, Graph, Label, VertexId};
pub use hamiltonian::{build_hamiltonian, SparseHamiltonian};
pub use layout::{emit_layout, CdDistances, CompiledLayout};
pub use predict::{predicted_single_packet, predicted_two_packet, truncation_bound};
pub use scattering::{
    check_block_form, partition_adjacency, s_matrix, SMatrixMethod, ScatteringSolution,
};
pub use statevec::{product_and_symmetrize, wave_packet, StateVector, WavePacketSpec};
pub use two_particle::{
    bose_hubbard_theta, cd_repeat_count, exchange_phase, solve_two_particle, InteractionModel,
    Statistics, TwoParticleScattering,
};
