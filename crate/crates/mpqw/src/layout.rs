//! Walk-graph emission: turn a block plan into the full graph with its rail
//! registry, timing schedule, packet templates, and readout windows.
//!
//! Rails run left to right. Between consecutive gate subgraphs each rail
//! carries exactly 2 M(k) + L plain vertices (the block overlap region), so
//! consecutive blocks share those vertices. Interaction blocks reproduce the
//! two-switch geometry with integer distances
//!   Z = 4L, X = d2 + L + M(-pi/2), W = d1 + L + M(-pi/4),
//!   d1 = M(-pi/4), d2 = ceil((5L + 2 d1)/sqrt 2 - 5L/2).

use crate::compiler::{BlockPlan, BlockSpec, EncodedQubit, SlotGate, Variant};
use crate::gadgets;
use crate::graph::{Gadget, Graph, Label, VertexId};
use crate::statevec::WavePacketSpec;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LayoutError {
    #[error("bitstring length {0} does not match qubit count {1}")]
    BitstringLength(usize, usize),
}

/// Exact ceil(((3 sqrt 2 - 2)/4) L): the float candidate is verified and
/// corrected with integer arithmetic (4m + 2L)^2 >= 18 L^2, so the result is
/// exact far beyond L = 10^6.
pub fn m_quarter(l: usize) -> usize {
    let approx = ((3.0 * 2.0f64.sqrt() - 2.0) / 4.0 * l as f64).ceil() as i128;
    let holds = |m: i128| m >= 0 && (4 * m + 2 * l as i128).pow(2) >= 18 * (l as i128).pow(2);
    let mut m = approx.max(0);
    while !holds(m) {
        m += 1;
    }
    while m > 0 && holds(m - 1) {
        m -= 1;
    }
    m as usize
}

/// M(-pi/2) = L.
pub fn m_half(l: usize) -> usize {
    l
}

/// Exact ceil((5L + 2 d1)/sqrt 2 - 5L/2): smallest d with
/// (2d + 5L)^2 >= 2 (5L + 2 d1)^2.
pub fn d2_distance(l: usize, d1: usize) -> usize {
    let target = (5.0 * l as f64 + 2.0 * d1 as f64) / 2.0f64.sqrt() - 2.5 * l as f64;
    let holds =
        |d: i128| d >= 0 && (2 * d + 5 * l as i128).pow(2) >= 2 * (5 * l as i128 + 2 * d1 as i128).pow(2);
    let mut d = (target.ceil() as i128).max(0);
    while !holds(d) {
        d += 1;
    }
    while d > 0 && holds(d - 1) {
        d -= 1;
    }
    d as usize
}

/// Exact ceil(sqrt(2) n): smallest t with t^2 >= 2 n^2.
fn ceil_sqrt2(n: usize) -> usize {
    let approx = (2.0f64.sqrt() * n as f64).ceil() as i128;
    let holds = |t: i128| t >= 0 && t * t >= 2 * (n as i128) * (n as i128);
    let mut t = approx.max(0);
    while !holds(t) {
        t += 1;
    }
    while t > 0 && holds(t - 1) {
        t -= 1;
    }
    t as usize
}

/// The integer distances of one interaction block at packet length L.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CdDistances {
    pub l: usize,
    pub m4: usize,
    pub m2: usize,
    pub d1: usize,
    pub d2: usize,
    pub z: usize,
    pub x: usize,
    pub w: usize,
}

impl CdDistances {
    pub fn for_length(l: usize) -> Self {
        let m4 = m_quarter(l);
        let m2 = m_half(l);
        let d1 = m4;
        let d2 = d2_distance(l, d1);
        CdDistances {
            l,
            m4,
            m2,
            d1,
            d2,
            z: 4 * l,
            x: d2 + l + m2,
            w: d1 + l + m4,
        }
    }

    /// Duration of a type-I block: 3L/2.
    pub fn t_i(&self) -> f64 {
        1.5 * self.l as f64
    }

    /// Duration of a type-II block: (5L + 2 M(-pi/4)) / sqrt 2.
    pub fn t_ii(&self) -> f64 {
        (5.0 * self.l as f64 + 2.0 * self.d1 as f64) / 2.0f64.sqrt()
    }

    /// Computational-particle travel in a planar entangling block.
    fn planar_comp_travel(&self) -> usize {
        4 * self.m4 + 10 * self.l + 8
    }

    /// Duration of a planar entangling block (two crossings in series).
    pub fn t_planar(&self) -> f64 {
        self.planar_comp_travel() as f64 / 2.0f64.sqrt()
    }

    /// Pass-through rail length for a computational qubit in a type-II
    /// block: 4 M(-pi/4) + 6L + 4 (also the 0-rail of the involved qubit).
    pub fn comp_passthrough(&self) -> usize {
        4 * self.m4 + 6 * self.l + 4
    }

    /// Mediator rail length in a type-II block: 2X + Z + 6.
    pub fn med_passthrough(&self) -> usize {
        2 * self.x + self.z + 6
    }

    /// Middle mediator-carrying segment of a planar entangling block, sized
    /// so the slow and fast packets cross on both verticals.
    pub fn planar_x_mid(&self) -> usize {
        let med_travel = ceil_sqrt2(self.planar_comp_travel());
        med_travel + 2 * self.m2 + self.l - (2 * self.x + 2 * self.z + 12)
    }

    /// Rail totals in a planar entangling block.
    pub fn planar_comp_len(&self) -> usize {
        3 * self.w + 2 * self.z + 8
    }

    pub fn planar_med_len(&self) -> usize {
        2 * self.x + self.planar_x_mid() + 2 * self.z + 12
    }

    /// Stub shared between consecutive blocks on a rail of the given kind.
    pub fn stub(&self, med: bool) -> usize {
        if med {
            2 * self.m2 + self.l
        } else {
            2 * self.m4 + self.l
        }
    }

    pub fn m_of(&self, med: bool) -> usize {
        if med {
            self.m2
        } else {
            self.m4
        }
    }
}

/// Where a qubit's logical value is read out: rail positions
/// [start+1, start+length] of rail (encoded, value).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReadoutWindow {
    pub encoded: usize,
    pub value: u8,
    pub start: usize,
    pub length: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompiledLayout {
    pub graph: Graph,
    pub plan: BlockPlan,
    pub distances: CdDistances,
    /// Plain rail vertices per (encoded qubit index, logical value), ordered
    /// left to right; gadget and switch interiors are not rail positions.
    pub rails: BTreeMap<(usize, u8), Vec<VertexId>>,
    /// Block label and duration, in order.
    pub schedule: Vec<(String, f64)>,
    pub total_time: f64,
    /// Input packet template per encoded qubit and logical value.
    pub packet_specs: BTreeMap<(usize, u8), WavePacketSpec>,
    pub readout_windows: Vec<ReadoutWindow>,
}

impl CompiledLayout {
    /// Resolve a rail position (1-based) to a vertex.
    pub fn rail_vertex(&self, encoded: usize, value: u8, x: usize) -> Option<VertexId> {
        self.rails
            .get(&(encoded, value))
            .and_then(|r| r.get(x - 1))
            .copied()
    }

    pub fn rail(&self, encoded: usize, value: u8) -> &[VertexId] {
        &self.rails[&(encoded, value)]
    }

    pub fn readout_window(&self, encoded: usize, value: u8) -> &ReadoutWindow {
        self.readout_windows
            .iter()
            .find(|w| w.encoded == encoded && w.value == value)
            .expect("window exists")
    }

    /// Packet specs for an encoded input bitstring: computational qubit i
    /// rides the rail matching bit i, mediators ride their 0 rails.
    pub fn encode_input(
        &self,
        bits: &[u8],
    ) -> Result<Vec<(usize, u8, WavePacketSpec)>, LayoutError> {
        if bits.len() != self.plan.qubit_count {
            return Err(LayoutError::BitstringLength(
                bits.len(),
                self.plan.qubit_count,
            ));
        }
        let mut out = Vec::new();
        for (idx, q) in self.plan.encoded.iter().enumerate() {
            let value = match q {
                EncodedQubit::Comp(i) => bits[*i] & 1,
                EncodedQubit::Med(_) => 0,
            };
            let spec = self.packet_specs[&(idx, value)].clone();
            out.push((idx, value, spec));
        }
        Ok(out)
    }
}

struct RailBuilder {
    name: String,
    vertices: Vec<VertexId>,
}

struct Emitter {
    graph: Graph,
    rails: Vec<[RailBuilder; 2]>,
}

/// Momentum-switch terminal indices in the library gadget: terminal 0 routes
/// the -pi/4 particle to/from terminal 2, terminal 1 routes the -pi/2
/// particle to/from terminal 2.
const SW_QUARTER: usize = 0;
const SW_HALF: usize = 1;
const SW_SHARED: usize = 2;

impl Emitter {
    fn tip(&self, q: usize, v: u8) -> VertexId {
        *self.rails[q][v as usize].vertices.last().expect("nonempty")
    }

    fn extend_rail(&mut self, q: usize, v: u8, count: usize) {
        for _ in 0..count {
            let tip = self.tip(q, v);
            let nv = self.graph.add_vertex();
            self.graph.add_edge(tip, nv).expect("fresh");
            let rail = &mut self.rails[q][v as usize];
            rail.vertices.push(nv);
            self.graph.set_label(
                nv,
                Label::Rail {
                    path: rail.name.clone(),
                    x: rail.vertices.len(),
                },
            );
        }
    }

    fn start_rail(&mut self, q: usize, v: u8) {
        let nv = self.graph.add_vertex();
        let rail = &mut self.rails[q][v as usize];
        rail.vertices.push(nv);
        self.graph.set_label(
            nv,
            Label::Rail {
                path: rail.name.clone(),
                x: rail.vertices.len(),
            },
        );
    }

    /// Instantiate `gadget` with some vertices identified with existing ones;
    /// returns the full gadget-vertex -> graph-vertex map.
    fn splice_gadget(
        &mut self,
        gadget: &Gadget,
        tag: &str,
        identify: &[(usize, VertexId)],
    ) -> Vec<VertexId> {
        let nv = gadget.graph.vertex_count();
        let mut map = vec![usize::MAX; nv];
        for &(gv, existing) in identify {
            map[gv] = existing;
        }
        let terminals = gadget.terminals();
        for v in 0..nv {
            if map[v] == usize::MAX {
                map[v] = self.graph.add_vertex();
                if !terminals.contains(&v) {
                    self.graph.set_label(
                        map[v],
                        Label::Internal {
                            gadget: tag.to_string(),
                            index: v,
                        },
                    );
                }
            }
        }
        for &(a, b) in gadget.graph.edges() {
            self.graph.add_edge(map[a], map[b]).expect("spliced edge");
        }
        map
    }

    fn adopt_rail_vertex(&mut self, q: usize, v: u8, vertex: VertexId) {
        let rail = &mut self.rails[q][v as usize];
        rail.vertices.push(vertex);
        self.graph.set_label(
            vertex,
            Label::Rail {
                path: rail.name.clone(),
                x: rail.vertices.len(),
            },
        );
    }

    /// Fresh path of `count` vertices starting with an edge from `from`;
    /// returns the last vertex (or `from` when count = 0).
    fn fresh_chain(&mut self, from: VertexId, count: usize, tag: &str) -> VertexId {
        let mut prev = from;
        for i in 0..count {
            let nv = self.graph.add_vertex();
            self.graph.add_edge(prev, nv).expect("fresh");
            self.graph.set_label(
                nv,
                Label::Internal {
                    gadget: tag.to_string(),
                    index: i,
                },
            );
            prev = nv;
        }
        prev
    }
}

fn slot_gadget(slot: SlotGate, mediator: bool, variant: Variant) -> Option<Gadget> {
    match slot {
        SlotGate::Identity => None,
        SlotGate::PhaseT => Some(gadgets::phase_gate()),
        SlotGate::BasisB => Some(gadgets::basis_change()),
        SlotGate::Hadamard => {
            debug_assert!(mediator, "Hadamard slots sit on mediator rails");
            Some(match variant {
                Variant::Standard => gadgets::hadamard_k2(),
                Variant::Planar => gadgets::hadamard_planar(),
            })
        }
    }
}

/// Emit the full graph for a block plan.
pub fn emit_layout(plan: &BlockPlan) -> CompiledLayout {
    let dist = CdDistances::for_length(plan.packet_length);
    let encoded = &plan.encoded;
    let mut em = Emitter {
        graph: Graph::new(0),
        rails: encoded
            .iter()
            .map(|q| {
                [0u8, 1u8].map(|v| RailBuilder {
                    name: format!("{}_{}", q.label(), v),
                    vertices: Vec::new(),
                })
            })
            .collect(),
    };

    // input stubs
    for (qi, q) in encoded.iter().enumerate() {
        let stub = dist.stub(q.is_mediator());
        for v in [0u8, 1] {
            em.start_rail(qi, v);
            em.extend_rail(qi, v, stub - 1);
        }
    }

    let mut schedule = Vec::new();
    for (bi, block) in plan.blocks.iter().enumerate() {
        match block {
            BlockSpec::I { slots } => {
                for (qi, (q, slot)) in encoded.iter().zip(slots).enumerate() {
                    let stub = dist.stub(q.is_mediator());
                    match slot_gadget(*slot, q.is_mediator(), plan.variant) {
                        None => {
                            for v in [0u8, 1] {
                                em.extend_rail(qi, v, stub);
                            }
                        }
                        Some(gadget) => {
                            let tag = format!("b{bi}_{}", q.label());
                            let map = em.splice_gadget(
                                &gadget,
                                &tag,
                                &[
                                    (gadget.inputs[0], em.tip(qi, 0)),
                                    (gadget.inputs[1], em.tip(qi, 1)),
                                ],
                            );
                            em.adopt_rail_vertex(qi, 0, map[gadget.outputs[0]]);
                            em.adopt_rail_vertex(qi, 1, map[gadget.outputs[1]]);
                            for v in [0u8, 1] {
                                em.extend_rail(qi, v, stub - 1);
                            }
                        }
                    }
                }
                schedule.push((format!("block{bi}:I"), dist.t_i()));
            }
            BlockSpec::Ii { computational } => {
                emit_type_ii(&mut em, plan, &dist, *computational, bi);
                schedule.push((format!("block{bi}:II"), dist.t_ii()));
            }
            BlockSpec::PlanarEntangler { upper } => {
                emit_planar_entangler(&mut em, plan, &dist, *upper, bi);
                schedule.push((format!("block{bi}:entangler"), dist.t_planar()));
            }
        }
    }

    let total_time = schedule.iter().map(|(_, t)| t).sum();
    let mut rails = BTreeMap::new();
    let mut packet_specs = BTreeMap::new();
    let mut readout_windows = Vec::new();
    for (qi, q) in encoded.iter().enumerate() {
        let m = dist.m_of(q.is_mediator());
        for v in [0u8, 1] {
            let rb = &em.rails[qi][v as usize];
            packet_specs.insert(
                (qi, v),
                WavePacketSpec {
                    rail: rb.name.clone(),
                    offset: m,
                    length: dist.l,
                    momentum: q.momentum(),
                    toward_positive: true,
                },
            );
            readout_windows.push(ReadoutWindow {
                encoded: qi,
                value: v,
                start: rb.vertices.len() - m - dist.l,
                length: dist.l,
            });
            rails.insert((qi, v), rb.vertices.clone());
        }
    }

    CompiledLayout {
        graph: em.graph,
        plan: plan.clone(),
        distances: dist,
        rails,
        schedule,
        total_time,
        packet_specs,
        readout_windows,
    }
}

/// Standard interaction block (two momentum switches joined by a Z-vertex
/// vertical path) between computational qubit `comp` and the shared
/// mediator; every other rail passes straight through.
fn emit_type_ii(em: &mut Emitter, plan: &BlockPlan, dist: &CdDistances, comp: usize, bi: usize) {
    let comp_idx = plan.encoded_index(EncodedQubit::Comp(comp));
    let med_idx = plan
        .encoded
        .iter()
        .position(|q| q.is_mediator())
        .expect("standard plan has the shared mediator");
    for (qi, q) in plan.encoded.iter().enumerate() {
        if qi == comp_idx || qi == med_idx {
            continue;
        }
        debug_assert!(!q.is_mediator());
        let grow = dist.comp_passthrough() - dist.stub(false);
        em.extend_rail(qi, 0, grow);
        em.extend_rail(qi, 1, grow);
    }
    em.extend_rail(comp_idx, 0, dist.comp_passthrough() - dist.stub(false));
    em.extend_rail(med_idx, 0, dist.med_passthrough() - dist.stub(true));
    // mediator 1-rail grows to X vertices before its switch
    em.extend_rail(med_idx, 1, dist.x - dist.stub(true));

    let switch = gadgets::momentum_switch();
    // top switch: computational particle enters at the quarter port
    let sw1 = em.splice_gadget(
        &switch,
        &format!("b{bi}_sw_top"),
        &[(SW_QUARTER, em.tip(comp_idx, 1))],
    );
    // vertical path of Z vertices including both shared terminals
    let v_tail = em.fresh_chain(sw1[SW_SHARED], dist.z - 2, &format!("b{bi}_vertical"));
    let sw2 = em.splice_gadget(
        &switch,
        &format!("b{bi}_sw_bottom"),
        &[(SW_HALF, em.tip(med_idx, 1))],
    );
    em.graph.add_edge(v_tail, sw2[SW_SHARED]).expect("vertical");
    // outgoing rails: computational from the bottom switch, mediator from
    // the top switch
    em.adopt_rail_vertex(comp_idx, 1, sw2[SW_QUARTER]);
    em.extend_rail(comp_idx, 1, dist.w - 1);
    em.adopt_rail_vertex(med_idx, 1, sw1[SW_HALF]);
    em.extend_rail(med_idx, 1, dist.x - 1);
}

/// Planar entangling block between encoded[upper] (top) and
/// encoded[upper+1] (bottom): the top qubit's 1 rail and the bottom qubit's
/// 0 rail swap through a first switch pair, run along each other, and swap
/// back through a second pair, crossing on both verticals.
fn emit_planar_entangler(
    em: &mut Emitter,
    plan: &BlockPlan,
    dist: &CdDistances,
    upper: usize,
    bi: usize,
) {
    let a_idx = upper;
    let b_idx = upper + 1;
    let a = plan.encoded[a_idx];
    let b = plan.encoded[b_idx];
    assert_ne!(
        a.is_mediator(),
        b.is_mediator(),
        "entangler pairs a computational qubit with a mediator"
    );
    let port_of = |q: EncodedQubit| if q.is_mediator() { SW_HALF } else { SW_QUARTER };
    let entry_len = |q: EncodedQubit| if q.is_mediator() { dist.x } else { dist.w };
    let mid_len = |q: EncodedQubit| {
        if q.is_mediator() {
            dist.planar_x_mid()
        } else {
            dist.w
        }
    };
    let pass_len = |q: EncodedQubit| {
        if q.is_mediator() {
            dist.planar_med_len()
        } else {
            dist.planar_comp_len()
        }
    };

    // pass-through rails
    for (qi, q) in plan.encoded.iter().enumerate() {
        let grow = pass_len(*q) - dist.stub(q.is_mediator());
        if qi == a_idx {
            em.extend_rail(qi, 0, grow);
        } else if qi == b_idx {
            em.extend_rail(qi, 1, grow);
        } else {
            em.extend_rail(qi, 0, grow);
            em.extend_rail(qi, 1, grow);
        }
    }
    // entry segments on the inner rails
    em.extend_rail(a_idx, 1, entry_len(a) - dist.stub(a.is_mediator()));
    em.extend_rail(b_idx, 0, entry_len(b) - dist.stub(b.is_mediator()));

    let switch = gadgets::momentum_switch();
    // first half: swap the particles across the left vertical
    let s1_top = em.splice_gadget(
        &switch,
        &format!("b{bi}_ent_sw1t"),
        &[(port_of(a), em.tip(a_idx, 1))],
    );
    let v1 = em.fresh_chain(s1_top[SW_SHARED], dist.z - 2, &format!("b{bi}_ent_v1"));
    let s1_bot = em.splice_gadget(
        &switch,
        &format!("b{bi}_ent_sw1b"),
        &[(port_of(b), em.tip(b_idx, 0))],
    );
    em.graph.add_edge(v1, s1_bot[SW_SHARED]).expect("vertical");
    // middle segments: B's particle runs on the top rail, A's on the bottom
    em.adopt_rail_vertex(a_idx, 1, s1_top[port_of(b)]);
    em.extend_rail(a_idx, 1, mid_len(b) - 2);
    em.adopt_rail_vertex(b_idx, 0, s1_bot[port_of(a)]);
    em.extend_rail(b_idx, 0, mid_len(a) - 2);
    // second half: swap back across the right vertical
    let s2_top = em.splice_gadget(
        &switch,
        &format!("b{bi}_ent_sw2t"),
        &[(port_of(b), em.tip(a_idx, 1))],
    );
    let v2 = em.fresh_chain(s2_top[SW_SHARED], dist.z - 2, &format!("b{bi}_ent_v2"));
    let s2_bot = em.splice_gadget(
        &switch,
        &format!("b{bi}_ent_sw2b"),
        &[(port_of(a), em.tip(b_idx, 0))],
    );
    em.graph.add_edge(v2, s2_bot[SW_SHARED]).expect("vertical");
    // exit segments
    em.adopt_rail_vertex(a_idx, 1, s2_top[port_of(a)]);
    em.extend_rail(a_idx, 1, entry_len(a) - 1);
    em.adopt_rail_vertex(b_idx, 0, s2_bot[port_of(b)]);
    em.extend_rail(b_idx, 0, entry_len(b) - 1);
}

fn plan_for_gadget(blocks: Vec<BlockSpec>, variant: Variant, l: usize) -> BlockPlan {
    BlockPlan {
        qubit_count: 1,
        variant,
        packet_length: l,
        encoded: vec![EncodedQubit::Comp(0), EncodedQubit::Med(0)],
        blocks,
    }
}

/// The interaction-block graph as a standalone gadget. Terminal order:
/// inputs (0_c, 1_c, 1_med, 0_med), outputs (0_c, 1_c, 1_med, 0_med).
pub fn cd_block_gadget(l: usize) -> Gadget {
    let plan = plan_for_gadget(
        vec![BlockSpec::Ii { computational: 0 }],
        Variant::Standard,
        l,
    );
    let layout = emit_layout(&plan);
    gadget_from_layout(&layout)
}

/// The planar entangling block as a standalone gadget, same terminal order.
pub fn planar_entangler_gadget(l: usize, _balanced: bool) -> Gadget {
    let plan = plan_for_gadget(vec![BlockSpec::PlanarEntangler { upper: 0 }], Variant::Planar, l);
    let layout = emit_layout(&plan);
    gadget_from_layout(&layout)
}

fn gadget_from_layout(layout: &CompiledLayout) -> Gadget {
    let rail_ends = |qi: usize, v: u8| {
        let r = layout.rail(qi, v);
        (r[0], *r.last().unwrap())
    };
    let (c0_in, c0_out) = rail_ends(0, 0);
    let (c1_in, c1_out) = rail_ends(0, 1);
    let (m1_in, m1_out) = rail_ends(1, 1);
    let (m0_in, m0_out) = rail_ends(1, 0);
    Gadget::new(
        layout.graph.clone(),
        vec![c0_in, c1_in, m1_in, m0_in],
        vec![c0_out, c1_out, m1_out, m0_out],
        None,
    )
    .expect("rail ends are distinct")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{decompose_to_native, CircuitIR, Gate};
    use crate::compiler::{plan_blocks, Variant};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn integer_distances_at_l10() {
        let d = CdDistances::for_length(10);
        assert_eq!(d.m4, 6);
        assert_eq!(d.m2, 10);
        assert_eq!(d.d1, 6);
        assert_eq!(d.d2, 19);
        assert_eq!(d.z, 40);
        assert_eq!(d.x, 39);
        assert_eq!(d.w, 22);
        assert_eq!(d.med_passthrough(), 124);
        assert_eq!(d.comp_passthrough(), 4 * 6 + 60 + 4);
    }

    #[test]
    fn m_quarter_guarded_rounding() {
        // cross-check against direct rational reasoning for many L
        for l in 1..=4000usize {
            let m = m_quarter(l);
            let lhs = (4 * m as i128 + 2 * l as i128).pow(2);
            assert!(lhs >= 18 * (l as i128).pow(2));
            if m > 0 {
                let prev = (4 * (m as i128 - 1) + 2 * l as i128).pow(2);
                assert!(prev < 18 * (l as i128).pow(2));
            }
        }
        assert_eq!(m_quarter(10), 6);
        assert_eq!(m_quarter(32), 18);
        // spot checks at large L
        for l in [999_983usize, 1_000_000] {
            let m = m_quarter(l);
            assert!((4 * m as i128 + 2 * l as i128).pow(2) >= 18 * (l as i128).pow(2));
            assert!((4 * (m as i128 - 1) + 2 * l as i128).pow(2) < 18 * (l as i128).pow(2));
        }
    }

    #[test]
    fn identity_block_chain_lengths() {
        // single identity type-I block, one qubit + mediator, L = 8
        let c = CircuitIR::new(1, vec![]).unwrap();
        let plan = plan_blocks(&c, 8, Variant::Standard, -FRAC_PI_2).unwrap();
        let layout = emit_layout(&plan);
        let d = &layout.distances;
        // two identity blocks: rails have 3 stubs worth of vertices
        assert_eq!(layout.rail(0, 0).len(), 3 * d.stub(false));
        assert_eq!(layout.rail(1, 0).len(), 3 * d.stub(true));
        // schedule: two type-I durations
        assert_eq!(layout.schedule.len(), 2);
        assert!((layout.total_time - 2.0 * d.t_i()).abs() < 1e-12);
        // all vertices reachable from rails
        let seeds: Vec<_> = layout.rails.values().flatten().copied().collect();
        let seen = layout.graph.reachable_from(&seeds);
        assert!(seen.iter().all(|&s| s));
    }

    #[test]
    fn type_ii_block_rail_lengths() {
        let c = CircuitIR::new(1, vec![Gate::Cd { i: 0 }]).unwrap();
        let plan = plan_blocks(&c, 10, Variant::Standard, -FRAC_PI_2).unwrap();
        let layout = emit_layout(&plan);
        let d = &layout.distances;
        // comp 0-rail: stub + (passthrough - stub) + stub (from the two
        // identity end blocks and the interaction block)
        assert_eq!(
            layout.rail(0, 0).len(),
            2 * d.stub(false) + d.comp_passthrough()
        );
        assert_eq!(
            layout.rail(1, 0).len(),
            2 * d.stub(true) + d.med_passthrough()
        );
        // comp 1-rail plain vertices: stub + W + W + stub
        assert_eq!(layout.rail(0, 1).len(), 2 * d.stub(false) + 2 * d.w);
        assert_eq!(layout.rail(1, 1).len(), 2 * d.stub(true) + 2 * d.x);
        // total time: 2 t_I + t_II
        assert!((layout.total_time - (2.0 * d.t_i() + d.t_ii())).abs() < 1e-12);
        // registry totality
        let seeds: Vec<_> = layout.rails.values().flatten().copied().collect();
        let seen = layout.graph.reachable_from(&seeds);
        assert!(seen.iter().all(|&s| s));
        // readout windows resolve to distinct vertices
        let mut all = std::collections::HashSet::new();
        for w in &layout.readout_windows {
            for x in w.start + 1..=w.start + w.length {
                let v = layout.rail_vertex(w.encoded, w.value, x).unwrap();
                assert!(all.insert(v), "windows overlap");
            }
        }
    }

    #[test]
    fn cd_block_gadget_shape() {
        let g = cd_block_gadget(10);
        let d = CdDistances::for_length(10);
        // vertices: 4 rails + vertical + 2 switch interiors
        let want = d.comp_passthrough() + d.med_passthrough() + 2 * d.w + 2 * d.x + d.z + 20;
        assert_eq!(g.graph.vertex_count(), want);
        assert_eq!(g.inputs.len(), 4);
        assert_eq!(g.outputs.len(), 4);
    }

    #[test]
    fn fig8_circuit_total_time() {
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
        let layout = emit_layout(&plan);
        let g_i = plan.type_i_count() as f64;
        let g_ii = plan.type_ii_count() as f64;
        let want = g_i * 15.0 + g_ii * (50.0 + 12.0) / 2.0f64.sqrt();
        assert!((layout.total_time - want).abs() < 1e-12);
        let sum: f64 = layout.schedule.iter().map(|(_, t)| t).sum();
        assert!((layout.total_time - sum).abs() < 1e-12);
    }

    #[test]
    fn planar_entangler_is_planar_and_degree_four() {
        use crate::gadgets::validate_gadget;
        let g = planar_entangler_gadget(8, true);
        let rep = validate_gadget(&g, 1);
        assert!(rep.is_planar);
        assert!(rep.max_degree <= 4);
        assert!(rep.terminal_separation_ok);
    }

    #[test]
    fn planar_circuit_layout_is_planar() {
        let c = CircuitIR::new(2, vec![Gate::Cz { i: 0, j: 1 }]).unwrap();
        let plan = plan_blocks(&c, 8, Variant::Planar, -FRAC_PI_2).unwrap();
        let layout = emit_layout(&plan);
        let rep = crate::gadgets::validate(&layout.graph, &[], &[], 0);
        assert!(rep.is_planar, "planar compile must stay planar");
        assert!(rep.max_degree <= 4, "degree {}", rep.max_degree);
    }
}
