//! Attack graphs: recorded (state, action, reward, state) transitions keyed
//! by state fingerprint, with GraphViz export and the actor comparison
//! report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::flow::HistoryEntry;
use crate::state::{Bits, EncodingParams, NetState, StateError};

/// A node: one observed encoded state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphNode {
    pub fingerprint: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// An edge: an action taken from one state to another, with the reward it
/// earned and how often the exact transition was seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub from: u64,
    pub to: u64,
    pub action: String,
    pub reward: i64,
    pub visits: u64,
}

/// Nodes are keyed by the fingerprint of the state's canonical encoding, so
/// revisited states fold into loops instead of growing a chain.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AttackGraph {
    nodes: BTreeMap<u64, GraphNode>,
    edges: BTreeMap<(u64, u64, String), GraphEdge>,
    root: Option<u64>,
}

impl AttackGraph {
    pub fn new() -> Self {
        AttackGraph::default()
    }

    /// Build a graph from a recorded flow history.
    pub fn from_history(
        history: &[HistoryEntry],
        params: &EncodingParams,
    ) -> Result<Self, StateError> {
        let mut graph = AttackGraph::new();
        for entry in history {
            graph.record(
                &entry.before,
                &entry.action.name,
                entry.reward,
                &entry.after,
                params,
            )?;
        }
        Ok(graph)
    }

    /// Record one transition; repeats of the same (from, to, action) only
    /// bump the visit count.
    pub fn record(
        &mut self,
        before: &NetState,
        action: &str,
        reward: i64,
        after: &NetState,
        params: &EncodingParams,
    ) -> Result<(), StateError> {
        let from = self.intern(&before.one_hot_encode(params)?);
        let to = self.intern(&after.one_hot_encode(params)?);
        if self.root.is_none() {
            self.root = Some(from);
        }
        self.edges
            .entry((from, to, action.to_string()))
            .and_modify(|e| e.visits += 1)
            .or_insert(GraphEdge {
                from,
                to,
                action: action.to_string(),
                reward,
                visits: 1,
            });
        Ok(())
    }

    fn intern(&mut self, encoding: &Bits) -> u64 {
        let fingerprint = encoding.fingerprint();
        self.nodes.entry(fingerprint).or_insert(GraphNode {
            fingerprint,
            label: None,
        });
        fingerprint
    }

    pub fn set_label(&mut self, fingerprint: u64, label: &str) {
        if let Some(node) = self.nodes.get_mut(&fingerprint) {
            node.label = Some(label.to_string());
        }
    }

    pub fn root(&self) -> Option<u64> {
        self.root
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.values()
    }

    pub fn nodes(&self) -> impl Iterator<Item = &GraphNode> {
        self.nodes.values()
    }

    /// Self-loop edges, the signature of an actor settling on one action.
    pub fn self_loops(&self) -> impl Iterator<Item = &GraphEdge> {
        self.edges.values().filter(|e| e.from == e.to)
    }

    /// GraphViz DOT text. Nodes and edges are emitted in sorted fingerprint
    /// order so the output is identical for identical traces.
    pub fn export_dot(&self) -> String {
        let mut out = String::from("digraph attack {\n");
        out.push_str("    rankdir=LR;\n");
        out.push_str("    node [shape=circle, fontsize=10];\n");
        for node in self.nodes.values() {
            let id = short_fp(node.fingerprint);
            let label = node.label.clone().unwrap_or_else(|| id.clone());
            let shape = if Some(node.fingerprint) == self.root {
                ", shape=doublecircle"
            } else {
                ""
            };
            out.push_str(&format!("    \"{id}\" [label=\"{label}\"{shape}];\n"));
        }
        for edge in self.edges.values() {
            out.push_str(&format!(
                "    \"{}\" -> \"{}\" [label=\"{} / {} (x{})\"];\n",
                short_fp(edge.from),
                short_fp(edge.to),
                edge.action,
                edge.reward,
                edge.visits
            ));
        }
        out.push_str("}\n");
        out
    }
}

fn short_fp(fingerprint: u64) -> String {
    format!("{fingerprint:016x}")[..8].to_string()
}

/// One row of the actor comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub actor: String,
    pub cumulative_reward: i64,
    pub steps: usize,
}

/// Comparison across actor runs, rows sorted by reward, best first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<ReportRow>,
}

impl BenchReport {
    pub fn new(mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by(|a, b| {
            b.cumulative_reward
                .cmp(&a.cumulative_reward)
                .then(a.actor.cmp(&b.actor))
        });
        BenchReport { rows }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(&self.rows)
    }

    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<10} {:>6} {:>18}\n",
            "actor", "steps", "cumulative_reward"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<10} {:>6} {:>18}\n",
                row.actor, row.steps, row.cumulative_reward
            ));
        }
        out
    }
}
