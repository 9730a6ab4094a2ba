//! Graph interchange: the JSON graph format (bit-exact round trip) and DOT
//! export for visualization.

use crate::graph::{Gadget, Graph, GraphError, Label};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// On-disk schema: {"vertices": N, "edges": [[i, j], ...],
/// "inputs": [...], "outputs": [...], "labels": {...}}.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GraphJson {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, Label>,
}

impl GraphJson {
    pub fn from_gadget(g: &Gadget) -> Self {
        GraphJson {
            vertices: g.graph.vertex_count(),
            edges: g.graph.edges().to_vec(),
            inputs: g.inputs.clone(),
            outputs: g.outputs.clone(),
            labels: g
                .graph
                .labels()
                .iter()
                .map(|(v, l)| (v.to_string(), l.clone()))
                .collect(),
        }
    }

    pub fn from_graph(g: &Graph) -> Self {
        GraphJson {
            vertices: g.vertex_count(),
            edges: g.edges().to_vec(),
            inputs: vec![],
            outputs: vec![],
            labels: g
                .labels()
                .iter()
                .map(|(v, l)| (v.to_string(), l.clone()))
                .collect(),
        }
    }

    pub fn to_gadget(&self) -> Result<Gadget, GraphError> {
        let mut graph = Graph::from_edges(self.vertices, &self.edges)?;
        for (v, l) in &self.labels {
            let idx: usize = v
                .parse()
                .map_err(|_| GraphError::BadTerminals(format!("label key {v}")))?;
            graph.set_label(idx, l.clone());
        }
        Gadget::new(graph, self.inputs.clone(), self.outputs.clone(), None)
    }

    pub fn to_string_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// DOT rendering; terminals are drawn as boxes.
pub fn to_dot(g: &Graph, inputs: &[usize], outputs: &[usize], name: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("graph {name} {{\n  node [shape=point];\n"));
    for &t in inputs {
        out.push_str(&format!("  v{t} [shape=box, label=\"in{t}\"];\n"));
    }
    for &t in outputs {
        out.push_str(&format!("  v{t} [shape=box, label=\"out{t}\"];\n"));
    }
    for v in 0..g.vertex_count() {
        if let Some(Label::Rail { path, x }) = g.label(v) {
            if *x == 1 {
                out.push_str(&format!("  v{v} [xlabel=\"{path}\"];\n"));
            }
        }
    }
    for &(a, b) in g.edges() {
        out.push_str(&format!("  v{a} -- v{b};\n"));
    }
    out.push_str("}\n");
    out
}
