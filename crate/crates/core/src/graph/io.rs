use serde::{Deserialize, Serialize};

use super::{GraphError, WeightedDigraph};

/// On-disk graph document.
///
/// `{"vertices": ["o","d"], "arcs": [{"s":"o","t":"d","w":1.0}], "directed": true}`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub vertices: Vec<String>,
    pub arcs: Vec<ArcDocument>,
    #[serde(default = "default_directed")]
    pub directed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcDocument {
    pub s: String,
    pub t: String,
    pub w: f64,
}

fn default_directed() -> bool {
    true
}

impl GraphDocument {
    /// Builds the graph. Undirected documents contribute both orientations of
    /// every edge (a self-loop contributes one arc).
    pub fn to_graph(&self) -> Result<WeightedDigraph<f64>, GraphError> {
        let mut g = WeightedDigraph::new();
        for v in &self.vertices {
            g.add_vertex(v)?;
        }
        for (i, a) in self.arcs.iter().enumerate() {
            let locate = |e: GraphError| relocate(e, i);
            g.add_arc(&a.s, &a.t, a.w).map_err(locate)?;
            if !self.directed && a.s != a.t {
                g.add_arc(&a.t, &a.s, a.w).map_err(locate)?;
            }
        }
        Ok(g)
    }

    pub fn from_graph(g: &WeightedDigraph<f64>) -> Self {
        GraphDocument {
            vertices: g.vertices().to_vec(),
            arcs: g
                .arcs()
                .iter()
                .map(|a| ArcDocument {
                    s: g.vertex_name(a.source).to_string(),
                    t: g.vertex_name(a.target).to_string(),
                    w: a.weight,
                })
                .collect(),
            directed: true,
        }
    }
}

// Locations refer to the document's arc list, not the expanded graph.
fn relocate(e: GraphError, doc_index: usize) -> GraphError {
    let location = format!("arcs[{doc_index}]");
    match e {
        GraphError::NonPositiveWeight { source_id, target_id, weight, .. } => GraphError::NonPositiveWeight {
            location,
            source_id,
            target_id,
            weight,
        },
        GraphError::DuplicateArc { source_id, target_id, .. } => GraphError::DuplicateArc {
            location,
            source_id,
            target_id,
        },
        GraphError::DanglingEndpoint { vertex, .. } => GraphError::DanglingEndpoint { location, vertex },
        other => other,
    }
}

pub fn parse_graph(text: &str) -> Result<WeightedDigraph<f64>, GraphError> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
    doc.to_graph()
}

/// Canonical text form: pretty JSON, directed, insertion order.
pub fn emit_graph(g: &WeightedDigraph<f64>) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDocument::from_graph(g))
        .expect("graph documents always serialize");
    s.push('\n');
    s
}
