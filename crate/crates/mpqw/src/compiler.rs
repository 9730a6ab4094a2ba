//! Block planning: pack a native gate list into type-I blocks of parallel
//! single-qubit gates and type-II interaction blocks, in both the standard
//! (one shared mediator) and planar (n-1 interleaved mediators) schemes.

use crate::circuit::{CircuitIR, CircuitError, Gate};
use crate::two_particle::cd_repeat_count;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

pub const MIN_PACKET_LENGTH: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("packet length {0} below the floor {1}")]
    PacketTooShort(usize, usize),
    #[error("standard planning requires native gates; found {0}")]
    NotNative(String),
    #[error("planar planning accepts {{single-qubit, CP, CZ}}; found {0}")]
    NotPlanarInput(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("interaction phase not realizable within the repetition budget")]
    PhaseNotRealizable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Standard,
    Planar,
}

/// One encoded qubit: a computational qubit or a mediator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncodedQubit {
    Comp(usize),
    Med(usize),
}

impl EncodedQubit {
    pub fn is_mediator(&self) -> bool {
        matches!(self, EncodedQubit::Med(_))
    }

    /// Design momentum of this qubit's packets.
    pub fn momentum(&self) -> f64 {
        match self {
            EncodedQubit::Comp(_) => -std::f64::consts::FRAC_PI_4,
            EncodedQubit::Med(_) => -FRAC_PI_2,
        }
    }

    pub fn label(&self) -> String {
        match self {
            EncodedQubit::Comp(i) => format!("q{i}"),
            EncodedQubit::Med(i) => format!("med{i}"),
        }
    }
}

/// Single-qubit assignment inside a type-I block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotGate {
    Identity,
    PhaseT,
    BasisB,
    /// Hadamard on a mediator rail pair (the planar scheme uses the planar
    /// Hadamard gadget automatically).
    Hadamard,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BlockSpec {
    /// Parallel single-qubit gates, one slot per encoded qubit.
    I { slots: Vec<SlotGate> },
    /// Standard interaction block between computational qubit i and the
    /// shared mediator.
    Ii { computational: usize },
    /// Planar entangling block between encoded[upper] and encoded[upper+1].
    PlanarEntangler { upper: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub qubit_count: usize,
    pub variant: Variant,
    pub packet_length: usize,
    /// Encoded qubits in rail order, top to bottom.
    pub encoded: Vec<EncodedQubit>,
    pub blocks: Vec<BlockSpec>,
}

impl BlockPlan {
    pub fn type_i_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| matches!(b, BlockSpec::I { .. }))
            .count()
    }

    pub fn type_ii_count(&self) -> usize {
        self.blocks
            .iter()
            .filter(|b| !matches!(b, BlockSpec::I { .. }))
            .count()
    }

    pub fn encoded_index(&self, q: EncodedQubit) -> usize {
        self.encoded.iter().position(|&e| e == q).expect("encoded")
    }
}

/// Greedy packer: a fresh type-I block collects parallel single-qubit gates;
/// an interaction gate flushes it and emits its own block.
struct Packer {
    encoded: Vec<EncodedQubit>,
    current: Vec<Option<SlotGate>>,
    blocks: Vec<BlockSpec>,
}

impl Packer {
    fn new(encoded: Vec<EncodedQubit>) -> Self {
        let n = encoded.len();
        Packer {
            encoded,
            current: vec![None; n],
            blocks: Vec::new(),
        }
    }

    fn flush(&mut self) {
        if self.current.iter().any(|s| s.is_some()) {
            let slots = self
                .current
                .iter()
                .map(|s| s.unwrap_or(SlotGate::Identity))
                .collect();
            self.blocks.push(BlockSpec::I { slots });
            self.current = vec![None; self.encoded.len()];
        }
    }

    fn place_single(&mut self, idx: usize, gate: SlotGate) {
        if self.current[idx].is_some() {
            self.flush();
        }
        self.current[idx] = Some(gate);
    }

    fn interaction(&mut self, block: BlockSpec) {
        self.flush();
        self.blocks.push(block);
    }

    fn identity_block(&mut self) {
        self.flush();
        self.blocks.push(BlockSpec::I {
            slots: vec![SlotGate::Identity; self.encoded.len()],
        });
    }

    fn finish(mut self) -> Vec<BlockSpec> {
        self.flush();
        self.blocks
    }
}

/// Plan blocks for a native circuit (standard variant) or a
/// single-qubit/CP/CZ circuit (planar variant). Identity type-I blocks are
/// placed at both ends unconditionally so the first and last blocks carry
/// plain input/output rails.
pub fn plan_blocks(
    circuit: &CircuitIR,
    packet_length: usize,
    variant: Variant,
    theta: f64,
) -> Result<BlockPlan, PlanError> {
    if packet_length < MIN_PACKET_LENGTH {
        return Err(PlanError::PacketTooShort(packet_length, MIN_PACKET_LENGTH));
    }
    circuit.check()?;
    let n = circuit.qubit_count;
    match variant {
        Variant::Standard => {
            if !circuit.is_native() {
                let bad = circuit
                    .gates
                    .iter()
                    .find(|g| matches!(g, Gate::Cp { .. } | Gate::Cz { .. }))
                    .unwrap();
                return Err(PlanError::NotNative(format!("{bad:?}")));
            }
            let mut encoded: Vec<EncodedQubit> = (0..n).map(EncodedQubit::Comp).collect();
            encoded.push(EncodedQubit::Med(0));
            let med_idx = n;
            let mut packer = Packer::new(encoded.clone());
            packer.identity_block();
            for g in &circuit.gates {
                match *g {
                    Gate::PhaseT { i } => packer.place_single(i, SlotGate::PhaseT),
                    Gate::BasisB { i } => packer.place_single(i, SlotGate::BasisB),
                    Gate::HadamardMed => packer.place_single(med_idx, SlotGate::Hadamard),
                    Gate::Cd { i } => packer.interaction(BlockSpec::Ii { computational: i }),
                    Gate::Identity => {}
                    Gate::Cp { .. } | Gate::Cz { .. } => unreachable!("checked native"),
                }
            }
            packer.identity_block();
            Ok(BlockPlan {
                qubit_count: n,
                variant,
                packet_length,
                encoded,
                blocks: packer.finish(),
            })
        }
        Variant::Planar => {
            // encoded order: q0, med0, q1, med1, ..., q_{n-1}
            let mut encoded = Vec::new();
            for i in 0..n {
                encoded.push(EncodedQubit::Comp(i));
                if i + 1 < n {
                    encoded.push(EncodedQubit::Med(i));
                }
            }
            // the entangling block squares the interaction phase, so either
            // e^{i a theta} = +i or -i realizes the controlled Z
            let reps = match (
                cd_repeat_count(theta, -FRAC_PI_2, 0.05, 64),
                cd_repeat_count(theta, FRAC_PI_2, 0.05, 64),
            ) {
                (Ok(a), Ok(b)) => a.min(b),
                (Ok(a), Err(_)) | (Err(_), Ok(a)) => a,
                (Err(_), Err(_)) => return Err(PlanError::PhaseNotRealizable),
            };
            let mut packer = Packer::new(encoded.clone());
            packer.identity_block();
            for g in &circuit.gates {
                lower_planar_gate(g, n, reps, &mut packer)?;
            }
            packer.identity_block();
            Ok(BlockPlan {
                qubit_count: n,
                variant,
                packet_length,
                encoded,
                blocks: packer.finish(),
            })
        }
    }
}

/// Planar lowering. Computational qubit i sits at encoded index 2i; mediator
/// med(i) between qubits i and i+1 at encoded index 2i + 1.
fn lower_planar_gate(
    g: &Gate,
    n: usize,
    reps: usize,
    packer: &mut Packer,
) -> Result<(), PlanError> {
    let comp = |i: usize| 2 * i;
    match *g {
        Gate::Identity => Ok(()),
        Gate::PhaseT { i } => {
            packer.place_single(comp(i), SlotGate::PhaseT);
            Ok(())
        }
        Gate::BasisB { i } => {
            packer.place_single(comp(i), SlotGate::BasisB);
            Ok(())
        }
        Gate::HadamardMed | Gate::Cd { .. } => Err(PlanError::NotPlanarInput(format!("{g:?}"))),
        Gate::Cz { i, j } => {
            let (lo, hi) = (i.min(j), i.max(j));
            // swap lo up next to hi, entangle, swap back
            for k in lo..hi.saturating_sub(1) {
                planar_swap(k, n, reps, packer);
            }
            planar_adjacent_cz(hi - 1, reps, packer);
            for k in (lo..hi.saturating_sub(1)).rev() {
                planar_swap(k, n, reps, packer);
            }
            Ok(())
        }
        Gate::Cp { i, j } => {
            // diag(1,1,1,-i) = (T^7 x T^7) CNOT (I x T) CNOT up to phase,
            // with CNOT(i -> j) = H_j CZ H_j and H = T^2 B T^2 up to phase
            let cnot = |a: usize, b: usize, packer: &mut Packer| -> Result<(), PlanError> {
                planar_hadamard_comp(b, packer);
                lower_planar_gate(&Gate::Cz { i: a, j: b }, n, reps, packer)?;
                planar_hadamard_comp(b, packer);
                Ok(())
            };
            cnot(i, j, packer)?;
            packer.place_single(comp(j), SlotGate::PhaseT);
            cnot(i, j, packer)?;
            for _ in 0..7 {
                packer.place_single(comp(i), SlotGate::PhaseT);
                packer.place_single(comp(j), SlotGate::PhaseT);
            }
            Ok(())
        }
    }
}

/// Hadamard on a computational qubit: T^2 B T^2 up to global phase.
fn planar_hadamard_comp(i: usize, packer: &mut Packer) {
    let idx = 2 * i;
    packer.place_single(idx, SlotGate::PhaseT);
    packer.place_single(idx, SlotGate::PhaseT);
    packer.place_single(idx, SlotGate::BasisB);
    packer.place_single(idx, SlotGate::PhaseT);
    packer.place_single(idx, SlotGate::PhaseT);
}

/// CZ between adjacent computational qubits k and k+1 through mediator
/// med(k): H_med (ent med,k+1) H_med (ent k,med) H_med (ent med,k+1) H_med,
/// each entangler applied `reps` times.
fn planar_adjacent_cz(k: usize, reps: usize, packer: &mut Packer) {
    let med_idx = 2 * k + 1;
    let ent = |upper: usize, packer: &mut Packer| {
        for _ in 0..reps {
            packer.interaction(BlockSpec::PlanarEntangler { upper });
        }
    };
    packer.place_single(med_idx, SlotGate::Hadamard);
    ent(med_idx, packer); // med(k) with qubit k+1 below it
    packer.place_single(med_idx, SlotGate::Hadamard);
    ent(med_idx - 1, packer); // qubit k with med(k) below it
    packer.place_single(med_idx, SlotGate::Hadamard);
    ent(med_idx, packer);
    packer.place_single(med_idx, SlotGate::Hadamard);
}

/// SWAP between adjacent computational qubits k, k+1 out of three CNOTs.
fn planar_swap(k: usize, n: usize, reps: usize, packer: &mut Packer) {
    let cnot = |a: usize, b: usize, packer: &mut Packer| {
        planar_hadamard_comp(b, packer);
        lower_planar_gate(&Gate::Cz { i: a, j: b }, n, reps, packer).expect("adjacent");
        planar_hadamard_comp(b, packer);
    };
    cnot(k, k + 1, packer);
    cnot(k + 1, k, packer);
    cnot(k, k + 1, packer);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::decompose_to_native;

    #[test]
    fn empty_circuit_single_identity_blocks() {
        let c = CircuitIR::new(1, vec![]).unwrap();
        let plan = plan_blocks(&c, 8, Variant::Standard, -FRAC_PI_2).unwrap();
        assert_eq!(plan.encoded.len(), 2); // qubit + mediator
        assert_eq!(plan.blocks.len(), 2); // the two unconditional end blocks
        assert!(plan
            .blocks
            .iter()
            .all(|b| matches!(b, BlockSpec::I { slots } if slots.iter().all(|s| *s == SlotGate::Identity))));
    }

    #[test]
    fn figure_circuit_block_sequence() {
        // B on qubit 1 after CP(0,1) after T on qubit 0
        let c = CircuitIR::new(
            2,
            vec![
                Gate::PhaseT { i: 0 },
                Gate::Cp { i: 0, j: 1 },
                Gate::BasisB { i: 1 },
            ],
        )
        .unwrap();
        let native = decompose_to_native(&c, -FRAC_PI_2, 1e-9, 16).unwrap();
        let plan = plan_blocks(&native, 10, Variant::Standard, -FRAC_PI_2).unwrap();
        // leading identity, [T+H], CD0, CD0, H, CD1, H, CD0, CD0, [B+H], trailing identity
        use BlockSpec::*;
        use SlotGate::*;
        let want = vec![
            I { slots: vec![Identity, Identity, Identity] },
            I { slots: vec![PhaseT, Identity, Hadamard] },
            Ii { computational: 0 },
            Ii { computational: 0 },
            I { slots: vec![Identity, Identity, Hadamard] },
            Ii { computational: 1 },
            I { slots: vec![Identity, Identity, Hadamard] },
            Ii { computational: 0 },
            Ii { computational: 0 },
            I { slots: vec![Identity, BasisB, Hadamard] },
            I { slots: vec![Identity, Identity, Identity] },
        ];
        assert_eq!(plan.blocks, want);
        assert_eq!(plan.type_i_count(), 6);
        assert_eq!(plan.type_ii_count(), 5);
    }

    #[test]
    fn repeated_gate_on_same_qubit_splits_blocks() {
        let c = CircuitIR::new(
            1,
            vec![Gate::PhaseT { i: 0 }, Gate::PhaseT { i: 0 }],
        )
        .unwrap();
        let plan = plan_blocks(&c, 8, Variant::Standard, -FRAC_PI_2).unwrap();
        assert_eq!(plan.type_i_count(), 4); // 2 ends + 2 phase blocks
    }

    #[test]
    fn standard_rejects_unexpanded_two_qubit_gates() {
        let c = CircuitIR::new(2, vec![Gate::Cp { i: 0, j: 1 }]).unwrap();
        assert!(matches!(
            plan_blocks(&c, 8, Variant::Standard, -FRAC_PI_2),
            Err(PlanError::NotNative(_))
        ));
    }

    #[test]
    fn packet_floor_enforced() {
        let c = CircuitIR::new(1, vec![]).unwrap();
        assert!(matches!(
            plan_blocks(&c, 4, Variant::Standard, -FRAC_PI_2),
            Err(PlanError::PacketTooShort(4, _))
        ));
    }

    #[test]
    fn planar_nonadjacent_cz_uses_swaps() {
        let c = CircuitIR::new(3, vec![Gate::Cz { i: 0, j: 2 }]).unwrap();
        let plan = plan_blocks(&c, 8, Variant::Planar, -FRAC_PI_2).unwrap();
        assert_eq!(plan.encoded.len(), 5); // q0 med0 q1 med1 q2
        let ent_blocks = plan
            .blocks
            .iter()
            .filter(|b| matches!(b, BlockSpec::PlanarEntangler { .. }))
            .count();
        // one adjacent CZ = 3 entangler applications; a SWAP holds 3 CNOTs
        // each with its own CZ: total (2 swaps * 3 + 1) * 3 = 21
        assert_eq!(ent_blocks, 21);
        // entanglers only sit между adjacent encoded pairs
        for b in &plan.blocks {
            if let BlockSpec::PlanarEntangler { upper } = b {
                assert!(*upper + 1 < plan.encoded.len());
            }
        }
    }

    #[test]
    fn planar_rejects_mediator_gates() {
        let c = CircuitIR::new(2, vec![Gate::Cd { i: 0 }]).unwrap();
        assert!(matches!(
            plan_blocks(&c, 8, Variant::Planar, -FRAC_PI_2),
            Err(PlanError::NotPlanarInput(_))
        ));
    }
}
