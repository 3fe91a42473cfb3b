//! Annotation/artefact graph and its DOT and JSON renderings.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{AnnotationFunction, AnnotationId, LifecycleState};
use crate::registry::{ArtefactId, ArtefactKind};
use crate::repository::canonical;
use crate::repository::Project;

/// Longest body summary shown on an annotation node.
pub const SUMMARY_CHARS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Node {
    Annotation {
        id: String,
        annotation: AnnotationId,
        function: AnnotationFunction,
        state: LifecycleState,
        summary: String,
    },
    /// `kind` and `latest_version` are absent for an artefact that is
    /// referenced but no longer registered.
    Artefact {
        id: String,
        artefact: ArtefactId,
        name: String,
        kind: Option<ArtefactKind>,
        latest_version: Option<u32>,
    },
}

impl Node {
    pub fn id(&self) -> &str {
        match self {
            Node::Annotation { id, .. } | Node::Artefact { id, .. } => id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
    /// Selector expression, e.g. `region:10,20,30,40`.
    pub selector: String,
    /// Version number or `any`.
    pub version: String,
    pub target_index: usize,
}

impl Edge {
    pub fn label(&self) -> String {
        format!("{}@{}", self.selector, self.version)
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnnotationGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
}

pub fn annotation_node_id(id: &AnnotationId) -> String {
    format!("annotation:{id}")
}

pub fn artefact_node_id(id: &ArtefactId) -> String {
    format!("artefact:{id}")
}

/// One node per annotation (disposed ones only on request) and per
/// artefact, one edge per target. Artefact nodes follow registry order, then
/// unregistered artefacts by id; annotation nodes and edges are ordered by
/// annotation id and target index.
pub fn build_graph(project: &Project, include_disposed: bool) -> AnnotationGraph {
    let mut annotations: Vec<_> = project
        .annotations()
        .filter(|a| include_disposed || a.state() != LifecycleState::Disposed)
        .collect();
    annotations.sort_by(|a, b| a.id().cmp(b.id()));

    let mut nodes = Vec::new();
    for artefact in project.registry().artefacts() {
        nodes.push(Node::Artefact {
            id: artefact_node_id(&artefact.id),
            artefact: artefact.id.clone(),
            name: artefact.name.clone(),
            kind: Some(artefact.kind),
            latest_version: Some(artefact.latest_version().version_id),
        });
    }
    let dangling: BTreeSet<&ArtefactId> = annotations
        .iter()
        .flat_map(|a| a.targets())
        .map(|t| &t.artefact)
        .filter(|id| project.registry().get(id).is_none())
        .collect();
    for id in dangling {
        nodes.push(Node::Artefact {
            id: artefact_node_id(id),
            artefact: id.clone(),
            name: id.to_string(),
            kind: None,
            latest_version: None,
        });
    }

    let mut edges = Vec::new();
    for a in annotations {
        let from = annotation_node_id(a.id());
        nodes.push(Node::Annotation {
            id: from.clone(),
            annotation: a.id().clone(),
            function: a.function(),
            state: a.state(),
            summary: a.body().summary(SUMMARY_CHARS),
        });
        for (i, t) in a.targets().iter().enumerate() {
            edges.push(Edge {
                from: from.clone(),
                to: artefact_node_id(&t.artefact),
                selector: t.selector.to_string(),
                version: t.version.to_string(),
                target_index: i,
            });
        }
    }
    AnnotationGraph { nodes, edges }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => {}
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz rendering: one statement per line, node statements before edge
/// statements.
pub fn export_dot(graph: &AnnotationGraph) -> String {
    let mut out = String::from("digraph annotations {\n");
    for node in &graph.nodes {
        match node {
            Node::Annotation {
                id,
                annotation,
                function,
                state,
                summary,
            } => {
                let label = format!("{annotation} [{function}, {state}]\n{summary}");
                let _ = writeln!(
                    out,
                    "  {} [shape=note, style=filled, fillcolor=yellow, label={}];",
                    quote(id),
                    quote(&label)
                );
            }
            Node::Artefact {
                id,
                name,
                kind,
                latest_version,
                ..
            } => {
                let label = match (kind, latest_version) {
                    (Some(k), Some(v)) => format!("{name}\n{} v{v}", k.as_str()),
                    _ => format!("{name}\n(unregistered)"),
                };
                let style = if kind.is_some() { "" } else { ", style=dashed" };
                let _ = writeln!(
                    out,
                    "  {} [shape=box{style}, label={}];",
                    quote(id),
                    quote(&label)
                );
            }
        }
    }
    for edge in &graph.edges {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&edge.from),
            quote(&edge.to),
            quote(&edge.label())
        );
    }
    out.push_str("}\n");
    out
}

/// Compact canonical JSON with `nodes` and `edges` arrays.
pub fn export_graph_json(graph: &AnnotationGraph) -> String {
    canonical::to_canonical_string(graph).expect("graph serializes")
}

pub fn graph_from_json(text: &str) -> Result<AnnotationGraph, serde_json::Error> {
    serde_json::from_str(text)
}
