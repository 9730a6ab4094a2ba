//! Finite simple graphs with vertex labels, plus the gadget type used for
//! scattering analysis.
//!
//! Vertices are dense integer indices. Gadgets built from the library ship
//! with a frozen numbering so S-matrix row/column order is reproducible.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use thiserror::Error;

pub type VertexId = usize;

/// Label attached to a vertex of a compiled or hand-built graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Label {
    /// Vertex on a long path: which rail it belongs to and the 1-based
    /// position along that rail.
    Rail { path: String, x: usize },
    /// Interior vertex of a gate subgraph.
    Internal { gadget: String, index: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("edge ({0}, {1}) endpoint out of range (vertex count {2})")]
    EdgeOutOfRange(VertexId, VertexId, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(VertexId, VertexId),
    #[error("terminal list invalid: {0}")]
    BadTerminals(String),
    #[error("unknown gadget name `{0}`")]
    UnknownGadget(String),
    #[error("missing or invalid parameter `{0}`")]
    BadParam(String),
    #[error("arity mismatch: {0} outputs vs {1} inputs")]
    ArityMismatch(usize, usize),
    #[error("terminal path length list has {0} entries, expected {1}")]
    LengthListMismatch(usize, usize),
}

/// Undirected simple graph with optional vertex labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    vertex_count: usize,
    /// Normalized edge list: each edge stored once as (min, max), sorted.
    edges: Vec<(VertexId, VertexId)>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<VertexId, Label>,
}

impl Graph {
    pub fn new(vertex_count: usize) -> Self {
        Graph {
            vertex_count,
            edges: Vec::new(),
            labels: BTreeMap::new(),
        }
    }

    pub fn from_edges(
        vertex_count: usize,
        edges: &[(VertexId, VertexId)],
    ) -> Result<Self, GraphError> {
        let mut g = Graph::new(vertex_count);
        for &(a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_vertex(&mut self) -> VertexId {
        self.vertex_count += 1;
        self.vertex_count - 1
    }

    pub fn add_edge(&mut self, a: VertexId, b: VertexId) -> Result<(), GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        if a >= self.vertex_count || b >= self.vertex_count {
            return Err(GraphError::EdgeOutOfRange(a, b, self.vertex_count));
        }
        let e = (a.min(b), a.max(b));
        match self.edges.binary_search(&e) {
            Ok(_) => Err(GraphError::DuplicateEdge(e.0, e.1)),
            Err(pos) => {
                self.edges.insert(pos, e);
                Ok(())
            }
        }
    }

    pub fn has_edge(&self, a: VertexId, b: VertexId) -> bool {
        let e = (a.min(b), a.max(b));
        self.edges.binary_search(&e).is_ok()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn set_label(&mut self, v: VertexId, label: Label) {
        self.labels.insert(v, label);
    }

    pub fn label(&self, v: VertexId) -> Option<&Label> {
        self.labels.get(&v)
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, Label> {
        &self.labels
    }

    pub fn adjacency_list(&self) -> Vec<Vec<VertexId>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    pub fn max_degree(&self) -> usize {
        let mut deg = vec![0usize; self.vertex_count];
        for &(a, b) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg.into_iter().max().unwrap_or(0)
    }

    /// BFS distances from `start`; unreachable vertices get `usize::MAX`.
    pub fn bfs_distances(&self, start: VertexId) -> Vec<usize> {
        let adj = self.adjacency_list();
        let mut dist = vec![usize::MAX; self.vertex_count];
        let mut q = VecDeque::new();
        dist[start] = 0;
        q.push_back(start);
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Vertices reachable from any vertex in `seeds`.
    pub fn reachable_from(&self, seeds: &[VertexId]) -> Vec<bool> {
        let adj = self.adjacency_list();
        let mut seen = vec![false; self.vertex_count];
        let mut q: VecDeque<VertexId> = seeds.iter().copied().collect();
        for &s in seeds {
            seen[s] = true;
        }
        while let Some(v) = q.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    q.push_back(w);
                }
            }
        }
        seen
    }

    /// Disjoint union; returns the index offset applied to `other`'s vertices.
    pub fn append(&mut self, other: &Graph) -> usize {
        let offset = self.vertex_count;
        self.vertex_count += other.vertex_count;
        for &(a, b) in &other.edges {
            self.add_edge(a + offset, b + offset).expect("disjoint");
        }
        for (&v, l) in &other.labels {
            self.labels.insert(v + offset, l.clone());
        }
        offset
    }

    /// Relabel vertices through `map` (old -> new), producing a graph with
    /// `new_count` vertices. `map` must be injective on used vertices.
    pub fn relabeled(&self, map: &[VertexId], new_count: usize) -> Graph {
        let mut g = Graph::new(new_count);
        for &(a, b) in &self.edges {
            g.add_edge(map[a], map[b]).expect("injective relabeling");
        }
        for (&v, l) in &self.labels {
            g.labels.insert(map[v], l.clone());
        }
        g
    }
}

/// Finite graph with ordered input/output terminal vertices: the unit of
/// scattering analysis and composition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gadget {
    pub graph: Graph,
    pub inputs: Vec<VertexId>,
    pub outputs: Vec<VertexId>,
    /// Momentum (radians) the gadget is designed for, when it has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design_momentum: Option<f64>,
}

impl Gadget {
    pub fn new(
        graph: Graph,
        inputs: Vec<VertexId>,
        outputs: Vec<VertexId>,
        design_momentum: Option<f64>,
    ) -> Result<Self, GraphError> {
        let n = graph.vertex_count();
        let mut seen = vec![false; n];
        for &t in inputs.iter().chain(outputs.iter()) {
            if t >= n {
                return Err(GraphError::BadTerminals(format!(
                    "terminal {t} out of range"
                )));
            }
            if seen[t] {
                return Err(GraphError::BadTerminals(format!(
                    "terminal {t} listed twice"
                )));
            }
            seen[t] = true;
        }
        Ok(Gadget {
            graph,
            inputs,
            outputs,
            design_momentum,
        })
    }

    /// Terminals in S-matrix order: inputs then outputs.
    pub fn terminals(&self) -> Vec<VertexId> {
        self.inputs
            .iter()
            .chain(self.outputs.iter())
            .copied()
            .collect()
    }

    pub fn terminal_count(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    pub fn interior_count(&self) -> usize {
        self.graph.vertex_count() - self.terminal_count()
    }

    /// Join `self`'s outputs with `other`'s inputs by vertex identification.
    /// The result inherits `self.inputs` and `other.outputs`.
    pub fn concatenate(&self, other: &Gadget) -> Result<Gadget, GraphError> {
        if self.outputs.len() != other.inputs.len() {
            return Err(GraphError::ArityMismatch(
                self.outputs.len(),
                other.inputs.len(),
            ));
        }
        let na = self.graph.vertex_count();
        let nb = other.graph.vertex_count();
        // Map other's vertices: inputs onto self.outputs, the rest appended.
        let mut map = vec![usize::MAX; nb];
        for (i, &t) in other.inputs.iter().enumerate() {
            map[t] = self.outputs[i];
        }
        let mut next = na;
        for v in 0..nb {
            if map[v] == usize::MAX {
                map[v] = next;
                next += 1;
            }
        }
        let mut graph = self.graph.clone();
        graph.vertex_count = next;
        for &(a, b) in other.graph.edges() {
            // A shared vertex may already carry this edge when both gadgets
            // have it; tolerate the duplicate.
            let _ = graph.add_edge(map[a], map[b]);
        }
        for (&v, l) in other.graph.labels() {
            if map[v] >= na {
                graph.labels.insert(map[v], l.clone());
            }
        }
        Gadget::new(
            graph,
            self.inputs.clone(),
            other.outputs.iter().map(|&t| map[t]).collect(),
            self.design_momentum.or(other.design_momentum),
        )
    }

    /// Attach a pendant path to each terminal (inputs then outputs).
    /// `lengths[q]` new vertices are appended after terminal q; the rail
    /// coordinate convention puts x = 1 at the terminal itself, so the new
    /// vertices sit at x = 2 .. lengths[q] + 1.
    pub fn attach_terminal_paths(&self, lengths: &[usize]) -> Result<Graph, GraphError> {
        let terms = self.terminals();
        if lengths.len() != terms.len() {
            return Err(GraphError::LengthListMismatch(lengths.len(), terms.len()));
        }
        let mut g = self.graph.clone();
        for (q, (&t, &len)) in terms.iter().zip(lengths.iter()).enumerate() {
            let mut prev = t;
            for x in 2..=(len + 1) {
                let v = g.add_vertex();
                g.add_edge(prev, v).expect("fresh vertex");
                g.set_label(
                    v,
                    Label::Rail {
                        path: format!("rail{}", q + 1),
                        x,
                    },
                );
                prev = v;
            }
        }
        Ok(g)
    }

    /// Rail vertex list for terminal `q` of the graph produced by
    /// [`attach_terminal_paths`]: position x (1-based, x = 1 at the gadget)
    /// maps to entry x - 1.
    pub fn rail_vertices(&self, lengths: &[usize], q: usize) -> Vec<VertexId> {
        let terms = self.terminals();
        let mut start = self.graph.vertex_count();
        for len in lengths.iter().take(q) {
            start += len;
        }
        let mut rail = vec![terms[q]];
        rail.extend(start..start + lengths[q]);
        rail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_graph_invariants() {
        let mut g = Graph::new(3);
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.add_edge(1, 0), Err(GraphError::DuplicateEdge(0, 1)));
        assert_eq!(g.add_edge(2, 2), Err(GraphError::SelfLoop(2)));
        assert_eq!(g.add_edge(0, 7), Err(GraphError::EdgeOutOfRange(0, 7, 3)));
        assert!(g.has_edge(1, 0) && g.has_edge(0, 1));
    }

    #[test]
    fn concatenate_paths_shares_endpoint() {
        // path of 3 vertices with terminals at the two ends
        let path3 = || {
            let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
            Gadget::new(g, vec![0], vec![2], None).unwrap()
        };
        let joined = path3().concatenate(&path3()).unwrap();
        assert_eq!(joined.graph.vertex_count(), 5);
        assert_eq!(joined.graph.edge_count(), 4);
        assert_eq!(joined.inputs, vec![0]);
        assert_eq!(joined.outputs, vec![4]);
    }

    #[test]
    fn attach_lengths() {
        let g = Graph::new(1);
        let gadget = Gadget::new(g, vec![0], vec![], None).unwrap();
        let attached = gadget.attach_terminal_paths(&[3]).unwrap();
        assert_eq!(attached.vertex_count(), 4);
        assert_eq!(attached.edge_count(), 3);
        // zero lengths leave the graph unchanged
        let same = gadget.attach_terminal_paths(&[0]).unwrap();
        assert_eq!(same.vertex_count(), 1);
        assert_eq!(same.edge_count(), 0);
    }
}
